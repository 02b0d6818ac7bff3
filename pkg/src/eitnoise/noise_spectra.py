"""
Quadrature noise spectra of the probe after the medium.

Variances are in shot-noise units (vacuum = 1).  For the off-diagonal
dephasing model the medium acts as a frequency-dependent beamsplitter with
power transmission ``T(w) = exp(-2 Re Lambda(w) L)``:

    S_out = S_in T + (1 - T)

The population-exchange model multiplies the admixed vacuum by a factor
below one, which lets vacuum input come out below shot noise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDenominator, GridMismatch
from .lambda_system import AtomicParams, NoiseModel
from .linear_response import group_delay, power_transmission

__all__ = [
    "NoiseModel",
    "Quadrature",
    "SpectrumSeries",
    "added_noise_factor_population_exchange",
    "commutation_check",
    "output_spectrum",
    "squeezed_input",
    "squeezing_db",
    "squeezing_delay_report",
]

VACUUM_TOL = 1e-12


@dataclass(frozen=True)
class Quadrature:
    """Quadrature label: amplitude (theta = 0), phase (pi/2) or a general angle."""

    kind: str = "amplitude"
    theta: float | None = None

    def __post_init__(self):
        if self.kind not in ("amplitude", "phase", "angle"):
            raise ValueError(f"unknown quadrature kind {self.kind!r}")
        if self.kind == "angle" and self.theta is None:
            raise ValueError("angle quadrature needs theta")

    @classmethod
    def amplitude(cls):
        return cls("amplitude")

    @classmethod
    def phase(cls):
        return cls("phase")

    @classmethod
    def angle(cls, theta):
        return cls("angle", float(theta))

    def __str__(self):
        return f"angle({self.theta:g})" if self.kind == "angle" else self.kind


@dataclass(frozen=True)
class SpectrumSeries:
    omega_grid: np.ndarray
    values: np.ndarray
    quadrature: Quadrature = Quadrature()

    def __post_init__(self):
        w = np.asarray(self.omega_grid, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if w.ndim != 1 or v.shape != w.shape:
            raise ValueError("omega_grid and values must be 1-D and equally long")
        if w.size > 1 and np.any(np.diff(w) <= 0):
            raise ValueError("omega_grid must be strictly increasing")
        if np.any(v < 0):
            raise ValueError("variances must be non-negative")
        object.__setattr__(self, "omega_grid", w)
        object.__setattr__(self, "values", v)

    @classmethod
    def flat(cls, omega_grid, value, quadrature=Quadrature()):
        w = np.asarray(omega_grid, dtype=float)
        return cls(w, np.full(w.shape, float(value)), quadrature)

    @classmethod
    def vacuum(cls, omega_grid, quadrature=Quadrature()):
        return cls.flat(omega_grid, 1.0, quadrature)


def squeezing_db(variance):
    """Squeezing in dB below shot noise (positive when squeezed)."""
    return -10.0 * np.log10(variance) + 0.0


def squeezed_input(omega_grid, r, *, antisqueezed=False, source_bandwidth=None):
    """
    Input spectrum of a minimum-uncertainty squeezed source.

    Flat ``exp(-2r)`` (or ``exp(2r)`` for the anti-squeezed quadrature) by
    default.  With ``source_bandwidth`` the excess follows a single-pole
    Lorentzian ``k^2 / (k^2 + w^2)`` and returns to shot noise in the wings.
    """
    if r < 0:
        raise ValueError("squeezing parameter must be non-negative")
    w = np.asarray(omega_grid, dtype=float)
    level = np.exp(2 * r) if antisqueezed else np.exp(-2 * r)
    if source_bandwidth is None:
        values = np.full(w.shape, level)
    else:
        k2 = float(source_bandwidth) ** 2
        values = 1.0 + (level - 1.0) * k2 / (k2 + w**2)
    quad = Quadrature.phase() if antisqueezed else Quadrature.amplitude()
    return SpectrumSeries(w, values, quad)


def added_noise_factor_population_exchange(params, omega):
    """
    Weight of the admixed vacuum in the population-exchange model.

    ``1 - gamma_bc (w^2 + gamma_bc^2) / (gamma (w^2 + gamma_bc^2) + gamma_bc |Omega_c|^2)``
    with ``gamma = params.gamma_total`` and ``gamma_bc = params.gamma_bc_popexch``.
    """
    gbc = params.gamma_bc_popexch
    w2 = np.asarray(omega, dtype=float) ** 2
    den = params.gamma_total * (w2 + gbc**2) + gbc * params.omega_c_sq
    if gbc == 0:
        # both gamma_bc terms vanish regardless of the denominator
        out = np.ones_like(w2)
    else:
        if np.any(den <= 0):
            raise DegenerateDenominator("population-exchange noise factor denominator is not positive")
        out = 1.0 - gbc * (w2 + gbc**2) / den
    return float(out) if out.ndim == 0 else out


def _transmission(model, params, omega, length):
    if model is NoiseModel.POPULATION_EXCHANGE:
        return power_transmission(params, omega, length, dephasing=params.gamma_bc_popexch)
    return power_transmission(params, omega, length)


def output_spectrum(model, s_in, params, length=None, omega_grid=None):
    """
    Propagate an input spectrum through the medium.

    Parameters
    ----------
    model : NoiseModel or str
    s_in : SpectrumSeries
    params : AtomicParams
    length : float, optional
        Defaults to ``params.length``.
    omega_grid : array_like, optional
        Requested grid; must coincide with ``s_in.omega_grid``.

    Raises
    ------
    GridMismatch
        ``omega_grid`` given and different from the input grid.
    """
    model = NoiseModel.parse(model)
    L = params.length if length is None else float(length)
    if L < 0:
        raise ValueError("length must be non-negative")
    w = s_in.omega_grid
    if omega_grid is not None:
        req = np.asarray(omega_grid, dtype=float)
        if req.shape != w.shape or not np.array_equal(req, w):
            raise GridMismatch("input spectrum is not defined on the requested grid")
    T = _transmission(model, params, w, L)
    added = 1.0 - T
    if model is NoiseModel.POPULATION_EXCHANGE:
        added = added * added_noise_factor_population_exchange(params, w)
    return SpectrumSeries(w, s_in.values * T + added, s_in.quadrature)


@dataclass(frozen=True)
class CommutationReport:
    max_violation: float
    min_product: float
    passes: bool


def commutation_check(model, params, length=None, omega_grid=None, *, tol=VACUUM_TOL):
    """
    Send vacuum through both conjugate quadratures and test the shot-noise bound.

    Passes iff every output variance and the product of conjugate variances
    stay above ``1 - tol``.
    """
    model = NoiseModel.parse(model)
    w = np.asarray([0.0] if omega_grid is None else omega_grid, dtype=float)
    x = output_spectrum(model, SpectrumSeries.vacuum(w, Quadrature.amplitude()), params, length)
    p = output_spectrum(model, SpectrumSeries.vacuum(w, Quadrature.phase()), params, length)
    min_out = float(min(x.values.min(), p.values.min()))
    min_product = float(np.min(x.values * p.values))
    passes = min_out >= 1.0 - tol and min_product >= 1.0 - tol
    return CommutationReport(max(0.0, 1.0 - min_out), min_product, passes)


@dataclass(frozen=True)
class SqueezingDelayReport:
    s_out_squeezed: SpectrumSeries
    s_out_antisqueezed: SpectrumSeries
    delay_s: float
    preservation_ratio: float


def squeezing_delay_report(r, params, length=None, omega_grid=None, *, source_bandwidth=None,
                           include_vacuum_transit=False):
    """
    Squeezed and anti-squeezed output spectra plus delay for the off-diagonal model.

    ``preservation_ratio`` is the fraction of the input noise reduction left
    at line centre, ``(1 - S_out(0)) / (1 - exp(-2r))``; it is 1 for r = 0.
    """
    L = params.length if length is None else float(length)
    w = np.asarray([0.0] if omega_grid is None else omega_grid, dtype=float)
    sq = squeezed_input(w, r, source_bandwidth=source_bandwidth)
    anti = squeezed_input(w, r, antisqueezed=True, source_bandwidth=source_bandwidth)
    out_sq = output_spectrum(NoiseModel.OFF_DIAGONAL, sq, params, L)
    out_anti = output_spectrum(NoiseModel.OFF_DIAGONAL, anti, params, L)
    delay = group_delay(params, L, include_vacuum_transit=include_vacuum_transit)
    if r == 0:
        ratio = 1.0
    else:
        centre = squeezed_input([0.0], r, source_bandwidth=source_bandwidth)
        s0 = output_spectrum(NoiseModel.OFF_DIAGONAL, centre, params, L).values[0]
        ratio = (1.0 - s0) / (1.0 - np.exp(-2 * r))
        ratio = float(min(max(ratio, 0.0), 1.0))
    return SqueezingDelayReport(out_sq, out_anti, delay, ratio)
