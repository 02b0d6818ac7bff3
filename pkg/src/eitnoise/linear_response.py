"""
Weak-probe propagation exponent and slow-light quantities.

Linearizing the mean-field equations about the dark state (``sigma_bb = 1``)
leaves two coupled coherences,

    (gamma_ba - i w) s_ba = i g E + i Omega_c s_bc
    (gamma_bc' - i w) s_bc = i Omega_c^* s_ba

and the field obeys ``dE/dz = -Lambda(w) E`` in the frame co-moving at c, with

    Lambda(w) = (g^2 N / c) (gamma_bc' - i w) / [(gamma_ba - i w)(gamma_bc' - i w) + |Omega_c|^2].

Fields carry the time dependence ``exp(-i w t)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import bisect

from .errors import DegenerateDenominator, NoRoot
from .lambda_system import AtomicParams


@dataclass(frozen=True)
class TransferFunction:
    omega_grid: np.ndarray
    lambda_values: np.ndarray
    params_snapshot: AtomicParams

    def __post_init__(self):
        w = np.asarray(self.omega_grid, dtype=float)
        lam = np.asarray(self.lambda_values, dtype=complex)
        if w.ndim != 1 or w.size < 2:
            raise ValueError("omega_grid must be 1-D with at least 2 points")
        if lam.shape != w.shape:
            raise ValueError("lambda_values and omega_grid differ in length")
        if np.any(np.diff(w) <= 0):
            raise ValueError("omega_grid must be strictly increasing")
        if np.any(lam.real < -1e-15):
            raise ValueError("Re Lambda < 0: medium is not passive")
        object.__setattr__(self, "omega_grid", w)
        object.__setattr__(self, "lambda_values", lam)

    def transmission(self, length=None):
        L = self.params_snapshot.length if length is None else length
        return np.exp(-2.0 * self.lambda_values.real * L)


def _ground_dephasing(params, dephasing):
    return params.gamma_bc_prime if dephasing is None else dephasing


def propagation_exponent(params, omega, *, dephasing=None, method="closed"):
    """
    Complex propagation exponent Lambda(omega), per unit length.

    Parameters
    ----------
    params : AtomicParams
    omega : float or array_like
        Sideband frequency.
    dephasing : float, optional
        Ground-state coherence decay to use in place of ``gamma_bc_prime``.
    method : {"closed", "linear_solve"}
        ``"linear_solve"`` solves the 2x2 linearized system per frequency
        instead of using the closed form; kept for verification.

    Raises
    ------
    DegenerateDenominator
        Denominator vanishes (only for pathological zero-rate parameters).
    """
    gbc = _ground_dephasing(params, dephasing)
    w = np.asarray(omega, dtype=float)
    if method == "linear_solve":
        out = np.vectorize(lambda x: _lambda_linear_solve(params, x, gbc), otypes=[complex])(w)
        return complex(out) if out.ndim == 0 else out
    if method != "closed":
        raise ValueError(f"unknown method {method!r}")
    if params.omega_c_sq == 0:
        # (gamma_bc' - i w) cancels: two-level Lorentzian
        num = np.ones_like(w, dtype=complex)
        den = params.gamma_ba - 1j * w
    else:
        num = gbc - 1j * w
        den = (params.gamma_ba - 1j * w) * num + params.omega_c_sq
    if np.any(den == 0):
        raise DegenerateDenominator(f"Lambda denominator vanishes at omega={omega}")
    lam = params.coupling_rate * num / den
    return complex(lam) if lam.ndim == 0 else lam


def _lambda_linear_solve(params, omega, gbc):
    W = params.omega_c
    A = np.array([[params.gamma_ba - 1j * omega, -1j * W],
                  [-1j * np.conj(W), gbc - 1j * omega]])
    rhs = np.array([1j * params.g, 0.0])
    try:
        s_ba, _ = np.linalg.solve(A, rhs)
    except np.linalg.LinAlgError:
        raise DegenerateDenominator(f"singular linear response at omega={omega}") from None
    # dE/dz = (i g N / c) s_ba E  ->  Lambda = -i g N s_ba / c
    return complex(-1j * params.g * params.N * s_ba / params.c_light)


def propagation_exponent_derivative(params, omega, *, dephasing=None):
    """Analytic d Lambda / d omega."""
    gbc = _ground_dephasing(params, dephasing)
    w = np.asarray(omega, dtype=float)
    num = gbc - 1j * w
    den = (params.gamma_ba - 1j * w) * num + params.omega_c_sq
    dnum = -1j
    dden = -1j * (num + params.gamma_ba - 1j * w)
    d = params.coupling_rate * (dnum * den - num * dden) / den**2
    return complex(d) if d.ndim == 0 else d


def transfer_function(params, omega_grid, *, dephasing=None):
    w = np.asarray(omega_grid, dtype=float)
    return TransferFunction(w, propagation_exponent(params, w, dephasing=dephasing), params)


def power_transmission(params, omega, length=None, *, dephasing=None):
    """``exp(-2 Re Lambda(omega) L)``; ``length`` defaults to ``params.length``."""
    L = params.length if length is None else float(length)
    if L < 0:
        raise ValueError("length must be non-negative")
    lam = propagation_exponent(params, omega, dephasing=dephasing)
    T = np.exp(-2.0 * np.real(lam) * L)
    return float(T) if np.ndim(T) == 0 else T


def phase_shift(params, omega, length=None, *, dephasing=None):
    """Quadrature rotation ``-Im Lambda(omega) L`` accumulated in the medium."""
    L = params.length if length is None else float(length)
    lam = propagation_exponent(params, omega, dephasing=dephasing)
    phi = -np.imag(lam) * L
    return float(phi) if np.ndim(phi) == 0 else phi


def group_delay(params, length=None, *, include_vacuum_transit=False, dephasing=None):
    """
    Delay relative to vacuum propagation, ``-L d(Im Lambda)/d omega`` at omega = 0.

    Central difference with step ``1e-6 * max(gamma_ba, |Omega_c|)``, one
    Richardson extrapolation.  The vacuum transit ``L / c`` is added when
    ``include_vacuum_transit`` is set.
    """
    if params.omega_c == 0:
        raise ValueError("group delay requires a non-zero control field")
    L = params.length if length is None else float(length)
    h = 1e-6 * max(params.gamma_ba, abs(params.omega_c))

    def central(step):
        up = propagation_exponent(params, step, dephasing=dephasing)
        down = propagation_exponent(params, -step, dephasing=dephasing)
        return (up.imag - down.imag) / (2 * step)

    slope = (4 * central(h / 2) - central(h)) / 3
    delay = -L * slope
    if include_vacuum_transit:
        delay += L / params.c_light
    return float(delay)


def transparency_width(params, length=None, *, dephasing=None, omega_max=None, n_scan=400):
    """
    Half-width of the transparency window.

    Smallest omega > 0 with ``2 Re Lambda(omega) L = 1``: a log-spaced scan
    locates the first crossing, bisection refines it.

    Raises
    ------
    NoRoot
        Transmission never drops to 1/e in the search bracket, or the line
        centre is already opaque.
    """
    if params.omega_c == 0:
        raise ValueError("transparency width requires a non-zero control field")
    L = params.length if length is None else float(length)

    def excess(w):
        return 2.0 * propagation_exponent(params, w, dephasing=dephasing).real * L - 1.0

    if excess(0.0) >= 0:
        raise NoRoot("line centre is already opaque: no transparency window")
    scale = max(params.gamma_ba, abs(params.omega_c), _ground_dephasing(params, dephasing))
    hi = 10.0 * (scale + abs(params.omega_c)) if omega_max is None else omega_max
    grid = np.geomspace(hi * 1e-9, hi, n_scan)
    values = 2.0 * propagation_exponent(params, grid, dephasing=dephasing).real * L - 1.0
    above = np.nonzero(values >= 0)[0]
    if above.size == 0:
        raise NoRoot(f"transmission stays above 1/e for 0 < omega <= {hi:.3e}")
    i = above[0]
    lo = 0.0 if i == 0 else grid[i - 1]
    return float(bisect(excess, lo, grid[i], xtol=1e-14 * grid[i], rtol=1e-14))
