"""
Time-domain integration of the mean-field Lambda-system equations.

An explicit Dormand-Prince 5(4) pair with step-size control.  It shares only
the right-hand side with :mod:`eitnoise.lambda_system` and is used as an
independent check on the algebraic steady state and on the closed-form
linear response.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import StepUnderflow
from .lambda_system import AtomicParams, BlochState, _rhs_tuple

#: fastest rate x integration span above which integration is refused
MAX_STIFF_RATIO = 1e6
MAX_STEPS = 2_000_000

# Dormand & Prince (1980) coefficients
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B5 = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
_B4 = (5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40)
_E = tuple(b5 - b4 for b5, b4 in zip(_B5, _B4))


@dataclass
class OdeResult:
    times: np.ndarray
    ys: np.ndarray
    n_steps: int
    n_rejected: int
    error_estimate: float


def dopri5(f, t0, y0, t1, *, rtol=1e-9, atol=1e-12, h0=None, record=True,
           max_steps=MAX_STEPS):
    """
    Integrate ``y' = f(t, y)`` from ``t0`` to ``t1`` with local error control.

    ``y`` may be complex.  ``error_estimate`` is the sum of the accepted
    local error norms (absolute, max-norm), a crude bound on the global error.
    """
    y = np.array(y0, dtype=complex)
    t = float(t0)
    t1 = float(t1)
    span = t1 - t
    if span <= 0:
        raise ValueError("t1 must exceed t0")
    k1 = f(t, y)
    if h0 is None:
        scale = atol + rtol * np.abs(y)
        d0 = np.max(np.abs(y) / scale)
        d1 = np.max(np.abs(k1) / scale)
        h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h = min(h0, span)
    times = [t] if record else None
    ys = [y.copy()] if record else None
    n_steps = n_rej = 0
    err_sum = 0.0
    while t < t1:
        if n_steps + n_rej >= max_steps:
            raise StepUnderflow(f"step budget {max_steps} exhausted at t={t:.6g}")
        if h < 1e-14 * max(abs(t), span):
            raise StepUnderflow(f"step size underflow at t={t:.6g} (h={h:.3e})")
        last = t + h >= t1
        if last:
            h = t1 - t
        k = [k1]
        for i in range(1, 7):
            yi = y + h * sum(a * kj for a, kj in zip(_A[i], k) if a != 0.0)
            k.append(f(t + _C[i] * h, yi))
        y_new = y + h * sum(b * kj for b, kj in zip(_B5, k) if b != 0.0)
        err_vec = h * sum(e * kj for e, kj in zip(_E, k))
        scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
        err = float(np.sqrt(np.mean((np.abs(err_vec) / scale) ** 2)))
        if err <= 1.0:
            t = t1 if last else t + h
            y = y_new
            k1 = k[6]
            n_steps += 1
            err_sum += float(np.max(np.abs(err_vec)))
            if record:
                times.append(t)
                ys.append(y.copy())
            factor = 5.0 if err == 0 else min(5.0, 0.9 * err ** -0.2)
        else:
            n_rej += 1
            factor = max(0.2, 0.9 * err ** -0.2)
        h *= factor
    if not record:
        times, ys = [t], [y]
    return OdeResult(np.array(times), np.array(ys), n_steps, n_rej, err_sum)


@dataclass
class Trajectory:
    times: np.ndarray
    states: list
    params_snapshot: AtomicParams
    probe: complex | Callable
    error_estimate: float

    @property
    def final(self):
        return self.states[-1]


def _fastest_rate(params, probe_scale):
    return max(params.gamma_b + params.gamma_c, params.gamma_ba, params.gamma_ac,
               params.gamma_bc_prime, 2 * abs(params.omega_c), 2 * abs(params.g) * probe_scale)


def _bloch_field(params, probe):
    if callable(probe):
        def f(t, y):
            return np.array(_rhs_tuple(y[0].real, y[1].real, y[2], y[3], y[4],
                                       params, complex(probe(t))))
    else:
        E = complex(probe)

        def f(t, y):
            return np.array(_rhs_tuple(y[0].real, y[1].real, y[2], y[3], y[4], params, E))
    return f


def _check_stiffness(params, probe_scale, span):
    ratio = _fastest_rate(params, probe_scale) * span
    if ratio > MAX_STIFF_RATIO:
        raise StepUnderflow(
            f"stiff ratio {ratio:.3e} (fastest rate x time span) exceeds {MAX_STIFF_RATIO:.0e}; "
            "rescale the rates or shorten the integration", stiff_ratio=ratio)


def integrate(params, probe, initial, t_final, tol=1e-9, *, atol=None, record=True):
    """
    Integrate the mean-field equations from ``initial`` over ``[0, t_final]``.

    Parameters
    ----------
    probe : complex or callable
        Constant probe envelope or a function ``E(t)``.
    tol : float
        Relative local error tolerance, in ``(0, 1e-3]``.  The absolute
        tolerance defaults to ``tol`` as well.

    Raises
    ------
    StepUnderflow
        The problem is too stiff for explicit stepping.
    """
    if t_final <= 0:
        raise ValueError("t_final must be positive")
    if not 0 < tol <= 1e-3:
        raise ValueError("tol must lie in (0, 1e-3]")
    probe_scale = abs(probe(0.0)) if callable(probe) else abs(complex(probe))
    _check_stiffness(params, probe_scale, t_final)
    res = dopri5(_bloch_field(params, probe), 0.0, initial.as_complex(), t_final,
                 rtol=tol, atol=tol if atol is None else atol, record=record)
    states = [BlochState.from_complex(y) for y in res.ys]
    return Trajectory(res.times, states, params, probe, res.error_estimate)


def _numerical_jacobian_rates(params, probe, y):
    # Real 8x8 Jacobian by central differences; only used to pick time scales.
    def real_f(x):
        d = _rhs_tuple(x[0], x[1], complex(x[2], x[3]), complex(x[4], x[5]),
                       complex(x[6], x[7]), params, probe)
        return np.array([d[0].real, d[1].real, d[2].real, d[2].imag,
                         d[3].real, d[3].imag, d[4].real, d[4].imag])

    x0 = np.array([y[0].real, y[1].real, y[2].real, y[2].imag,
                   y[3].real, y[3].imag, y[4].real, y[4].imag])
    J = np.empty((8, 8))
    for k in range(8):
        e = np.zeros(8)
        e[k] = 1e-6
        J[:, k] = (real_f(x0 + e) - real_f(x0 - e)) / 2e-6
    return -np.linalg.eigvals(J).real


def slowest_rate(params, probe=0j):
    """Smallest decay rate of the linearized dynamics around the dark state."""
    rates = _numerical_jacobian_rates(params, complex(probe), BlochState.dark().as_complex())
    rates = rates[rates > 1e-12 * _fastest_rate(params, abs(probe))]
    if rates.size == 0:
        raise StepUnderflow("no decaying mode: dynamics never settle")
    return float(rates.min())


def relax(params, probe, initial=None, *, tol=1e-12, residual=1e-13, max_chunks=50):
    """
    Integrate with a constant probe until the right-hand side has settled.

    Returns the final state as a complex 5-vector.  Convergence is declared
    when the max-norm of the derivative drops below ``residual`` times the
    fastest rate.
    """
    E = complex(probe)
    f = _bloch_field(params, E)
    y = (initial if initial is not None else BlochState.dark().as_complex()).astype(complex)
    chunk = 10.0 / slowest_rate(params, E)
    fast = _fastest_rate(params, abs(E))
    _check_stiffness(params, abs(E), chunk)
    for _ in range(max_chunks):
        y = dopri5(f, 0.0, y, chunk, rtol=tol, atol=tol * 1e-2, record=False).ys[-1]
        if np.max(np.abs(f(0.0, y))) < residual * fast:
            return y
    raise StepUnderflow(f"state did not settle within {max_chunks} x {chunk:.3g} time units")


def step_response_susceptibility(params, probe_amplitude, modulation_freq, *, m=1e-4,
                                 tol=1e-11, settle_lifetimes=10.0, periods=20):
    """
    Sideband response of ``<sigma_ba>`` per unit probe field.

    The probe ``E(t) = E0 (1 + m exp(-i w t))`` is switched on from the
    settled state at ``E0``; after ``settle_lifetimes`` slowest-rate
    lifetimes the ``exp(-i w t)`` component of ``sigma_ba`` is demodulated
    over ``periods`` modulation periods.  At ``w = 0`` the response is the
    settled change of ``sigma_ba`` divided by ``E0 m``.

    The propagation exponent follows as ``-i g N chi / c``; see
    :func:`oracle_propagation_exponent`.
    """
    E0 = float(probe_amplitude)
    w = float(modulation_freq)
    if E0 <= 0:
        raise ValueError("probe amplitude must be positive")
    y_ref = relax(params, E0)
    if w == 0.0:
        y_mod = relax(params, E0 * (1 + m), initial=y_ref)
        return complex((y_mod[2] - y_ref[2]) / (E0 * m))

    t_settle = settle_lifetimes / slowest_rate(params, E0)
    period = 2 * np.pi / abs(w)
    t_window = periods * period
    t_total = t_settle + t_window
    _check_stiffness(params, E0 * (1 + m), t_total)
    bloch = _bloch_field(params, lambda t: E0 * (1 + m * np.exp(-1j * w * t)))
    ba_ref = y_ref[2]

    def f_settle(t, y):
        return np.append(bloch(t, y[:5]), 0.0)

    def f_window(t, y):
        return np.append(bloch(t, y[:5]), (y[2] - ba_ref) * np.exp(1j * w * t))

    y0 = np.append(y_ref, 0.0)
    y1 = dopri5(f_settle, 0.0, y0, t_settle, rtol=tol, atol=tol * 1e-2, record=False).ys[-1]
    y2 = dopri5(f_window, t_settle, y1, t_total, rtol=tol, atol=tol * 1e-2, record=False).ys[-1]
    return complex(y2[5] / (t_window * E0 * m))


def oracle_propagation_exponent(params, omega, *, probe_fraction=1e-3, **kwargs):
    """
    Lambda(omega) from the time-domain sideband response.

    The probe amplitude is ``probe_fraction * |Omega_c| / g``.
    """
    if params.g == 0:
        return 0j
    E0 = probe_fraction * abs(params.omega_c) / params.g
    chi = step_response_susceptibility(params, E0, omega, **kwargs)
    return complex(-1j * params.g * params.N * chi / params.c_light)
