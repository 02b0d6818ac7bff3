"""
Mean-field model of a three-level Lambda medium.

States are labelled ``a`` (excited), ``b`` (probe ground state) and ``c``
(control ground state).  The probe couples b<->a with strength ``g`` and
envelope ``E``; the control couples c<->a with Rabi frequency ``omega_c``.
Expectation values follow the Heisenberg convention ``sigma_ij = <|i><j|>``,
so the populations are ``sigma_ii`` and ``sigma_ji = conj(sigma_ij)``.

The excited-state population is not an independent variable:
``sigma_aa = 1 - sigma_bb - sigma_cc`` and it decays at ``gamma_b + gamma_c``.
"""

from __future__ import annotations

import dataclasses
import enum
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSteadyState, DivisionDegenerate, NoConvergence

#: Ratio of population deficit to epsilon**2 tolerated by the off-diagonal
#: consistency verdict.  A test threshold, not a physical bound.
CONSISTENCY_K = 10.0

STEADY_STATE_RTOL = 1e-12
STEADY_STATE_MAXITER = 200


class NoiseModel(enum.Enum):
    """Ground-state dephasing model."""

    OFF_DIAGONAL = "offdiag"
    POPULATION_EXCHANGE = "popexch"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("-", "").replace("_", "")
        aliases = {
            "offdiag": cls.OFF_DIAGONAL,
            "offdiagonal": cls.OFF_DIAGONAL,
            "popexch": cls.POPULATION_EXCHANGE,
            "populationexchange": cls.POPULATION_EXCHANGE,
        }
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"unknown noise model {value!r}") from None


class Verdict(enum.Enum):
    CONSISTENT_SECOND_ORDER = "ConsistentSecondOrder"
    INCONSISTENT = "Inconsistent"


@dataclass(frozen=True)
class AtomicParams:
    """
    Rates and couplings of the Lambda medium.

    All rates are angular (rad/s, or units of a reference rate in the
    dimensionless presets).  ``gamma_ba``, ``gamma_ac`` default to
    ``(gamma_b + gamma_c)/2 + gamma_bc_prime/2`` and ``gamma_total`` defaults
    to ``gamma_b + gamma_c``; pass explicit values to override.

    Parameters
    ----------
    g : float
        Probe coupling, taken real and non-negative.
    N : float
        Atomic density factor; only ``g**2 * N`` enters observables.
    omega_c : complex
        Control Rabi frequency.
    gamma_b, gamma_c : float
        Spontaneous decay rates a->b and a->c.
    gamma_ba, gamma_ac : float, optional
        Decay rates of the optical coherences.
    gamma_bc_prime : float
        Pure (off-diagonal) ground-state dephasing.
    gamma_bc_popexch : float
        Ground-state rate of the population-exchange model.  Used only by the
        population-exchange formulas.
    gamma_total : float, optional
        Rate ``gamma`` of the population-exchange added-noise factor.
    length : float
        Medium length.
    c_light : float
        Speed of light.
    """

    g: float = 1.0
    N: float = 1.0
    omega_c: complex = 1.0
    gamma_b: float = 0.5
    gamma_c: float = 0.5
    gamma_ba: float | None = None
    gamma_ac: float | None = None
    gamma_bc_prime: float = 0.0
    gamma_bc_popexch: float = 0.0
    gamma_total: float | None = None
    length: float = 1.0
    c_light: float = 1.0

    def __post_init__(self):
        default_optical = 0.5 * (self.gamma_b + self.gamma_c) + 0.5 * self.gamma_bc_prime
        if self.gamma_ba is None:
            object.__setattr__(self, "gamma_ba", default_optical)
        if self.gamma_ac is None:
            object.__setattr__(self, "gamma_ac", default_optical)
        if self.gamma_total is None:
            object.__setattr__(self, "gamma_total", self.gamma_b + self.gamma_c)
        object.__setattr__(self, "omega_c", complex(self.omega_c))
        for name in ("g", "N", "gamma_b", "gamma_c", "gamma_ba", "gamma_ac",
                     "gamma_bc_prime", "gamma_bc_popexch", "gamma_total",
                     "length", "c_light"):
            value = float(getattr(self, name))
            object.__setattr__(self, name, value)
            if not np.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value}")
        for name in ("g", "N", "gamma_b", "gamma_c", "gamma_ba", "gamma_ac",
                     "gamma_bc_prime", "gamma_bc_popexch", "gamma_total", "length"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative, got {getattr(self, name)}")
        if self.c_light <= 0:
            raise ValueError(f"c_light must be positive, got {self.c_light}")
        if not np.isfinite(self.omega_c):
            raise ValueError("omega_c must be finite")

    @property
    def coupling_rate(self):
        """``g**2 N / c``: absorption coefficient scale (rate per length)."""
        return self.g**2 * self.N / self.c_light

    @property
    def omega_c_sq(self):
        return abs(self.omega_c) ** 2

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)


@dataclass(frozen=True)
class BlochState:
    """
    Mean values of the five independent density-matrix elements.

    Also used as the container for time derivatives, so construction does not
    validate; call :meth:`validate` to check the physical invariants.
    """

    sigma_bb: float = 1.0
    sigma_cc: float = 0.0
    sigma_ba: complex = 0j
    sigma_bc: complex = 0j
    sigma_ac: complex = 0j

    @property
    def sigma_aa(self):
        return 1.0 - self.sigma_bb - self.sigma_cc

    @classmethod
    def dark(cls):
        """All population in |b>, no coherences."""
        return cls()

    @classmethod
    def excited(cls):
        """All population in |a>."""
        return cls(sigma_bb=0.0)

    def as_complex(self):
        return np.array([self.sigma_bb, self.sigma_cc, self.sigma_ba,
                         self.sigma_bc, self.sigma_ac], dtype=complex)

    @classmethod
    def from_complex(cls, vec):
        bb, cc, ba, bc, ac = vec
        return cls(float(np.real(bb)), float(np.real(cc)), complex(ba), complex(bc), complex(ac))

    def as_real(self):
        """Pack into the 8 real unknowns (bb, cc, Re/Im ba, bc, ac)."""
        return np.array([self.sigma_bb, self.sigma_cc,
                         self.sigma_ba.real, self.sigma_ba.imag,
                         self.sigma_bc.real, self.sigma_bc.imag,
                         self.sigma_ac.real, self.sigma_ac.imag])

    @classmethod
    def from_real(cls, x):
        return cls(float(x[0]), float(x[1]), complex(x[2], x[3]),
                   complex(x[4], x[5]), complex(x[6], x[7]))

    def expectation_matrix(self):
        """3x3 matrix ``S[i, j] = <sigma_ij>`` in the basis order (a, b, c)."""
        aa = self.sigma_aa
        S = np.empty((3, 3), dtype=complex)
        S[0, 0], S[1, 1], S[2, 2] = aa, self.sigma_bb, self.sigma_cc
        S[1, 0], S[0, 1] = self.sigma_ba, np.conj(self.sigma_ba)
        S[1, 2], S[2, 1] = self.sigma_bc, np.conj(self.sigma_bc)
        S[0, 2], S[2, 0] = self.sigma_ac, np.conj(self.sigma_ac)
        return S

    @classmethod
    def from_expectation_matrix(cls, S):
        return cls(float(S[1, 1].real), float(S[2, 2].real),
                   complex(S[1, 0]), complex(S[1, 2]), complex(S[0, 2]))

    def max_abs(self):
        return float(np.max(np.abs(self.as_complex())))

    def validate(self, tol=1e-9):
        """Raise ``ValueError`` if populations or coherences are unphysical."""
        aa = self.sigma_aa
        for name, p in (("sigma_bb", self.sigma_bb), ("sigma_cc", self.sigma_cc), ("sigma_aa", aa)):
            if p < -tol or p > 1 + tol:
                raise ValueError(f"{name}={p} outside [0, 1]")
        pairs = ((self.sigma_ba, self.sigma_bb, aa),
                 (self.sigma_bc, self.sigma_bb, self.sigma_cc),
                 (self.sigma_ac, aa, self.sigma_cc))
        for coh, p, q in pairs:
            if abs(coh) ** 2 > max(p, 0.0) * max(q, 0.0) + tol:
                raise ValueError(f"coherence {coh} violates positivity with populations {p}, {q}")
        return self


@dataclass(frozen=True)
class ConsistencyReport:
    model: NoiseModel
    epsilon: float
    population_deficit: float
    verdict: Verdict


def _rhs_tuple(bb, cc, ba, bc, ac, p, E):
    # Scalar kernel shared with the time-domain integrator.
    g = p.g
    W = p.omega_c
    aa = 1.0 - bb - cc
    ab = ba.conjugate()
    ca = ac.conjugate()
    gE = g * E
    gEc = gE.conjugate()
    Wc = W.conjugate()
    d_bb = p.gamma_b * aa - 1j * gE * ab + 1j * gEc * ba
    d_cc = p.gamma_c * aa - 1j * W * ac + 1j * Wc * ca
    d_ba = -p.gamma_ba * ba + 1j * gE * (bb - aa) + 1j * W * bc
    d_bc = -p.gamma_bc_prime * bc - 1j * gE * ac + 1j * Wc * ba
    d_ac = -p.gamma_ac * ac - 1j * gEc * bc + 1j * Wc * (aa - cc)
    return d_bb, d_cc, d_ba, d_bc, d_ac


def bloch_rhs(state, params, probe=0j):
    """
    Time derivative of the five independent mean values.

    Langevin forces are dropped and operator products are factorized; the
    probe is a c-number envelope.

    Returns
    -------
    BlochState
        Derivatives; populations carry the real parts only (their imaginary
        parts vanish identically).
    """
    d = _rhs_tuple(float(state.sigma_bb), float(state.sigma_cc), complex(state.sigma_ba),
                   complex(state.sigma_bc), complex(state.sigma_ac), params, complex(probe))
    return BlochState(d[0].real, d[1].real, d[2], d[3], d[4])


def excited_population_rate(state, params, probe=0j):
    """d(sigma_aa)/dt written out directly, as eliminated by the trace."""
    E = complex(probe)
    gE = params.g * E
    W = params.omega_c
    ab = np.conj(state.sigma_ba)
    ca = np.conj(state.sigma_ac)
    val = (-(params.gamma_b + params.gamma_c) * state.sigma_aa
           + 1j * gE * ab - 1j * np.conj(gE) * state.sigma_ba
           + 1j * W * state.sigma_ac - 1j * np.conj(W) * ca)
    return complex(val)


def interaction_hamiltonian(params, probe=0j):
    """Interaction Hamiltonian (hbar = 1) in the basis order (a, b, c)."""
    H = np.zeros((3, 3), dtype=complex)
    H[0, 1] = -params.g * complex(probe)
    H[0, 2] = -params.omega_c
    H[1, 0] = np.conj(H[0, 1])
    H[2, 0] = np.conj(H[0, 2])
    return H


def expectation_matrix_rhs(S, params, probe=0j):
    """
    Derivative of the full 3x3 matrix ``S[i, j] = <sigma_ij>``.

    Coherent part from the Heisenberg equation ``dS/dt = i [H^T, S]``,
    followed by the decay and repopulation terms.  ``S`` need not be
    Hermitian, which makes this usable for closure checks.
    """
    S = np.asarray(S, dtype=complex)
    Ht = interaction_hamiltonian(params, probe).T
    dS = 1j * (Ht @ S - S @ Ht)
    gamma_a = params.gamma_b + params.gamma_c
    decay = np.array([
        [gamma_a, params.gamma_ba, params.gamma_ac],
        [params.gamma_ba, 0.0, params.gamma_bc_prime],
        [params.gamma_ac, params.gamma_bc_prime, 0.0],
    ])
    dS = dS - decay * S
    dS[1, 1] += params.gamma_b * S[0, 0]
    dS[2, 2] += params.gamma_c * S[0, 0]
    return dS


def _real_rhs(x, params, probe):
    d = _rhs_tuple(x[0], x[1], complex(x[2], x[3]), complex(x[4], x[5]),
                   complex(x[6], x[7]), params, probe)
    return np.array([d[0].real, d[1].real, d[2].real, d[2].imag,
                     d[3].real, d[3].imag, d[4].real, d[4].imag])


def _jacobian(x, params, probe):
    # The right-hand side is affine in the state for a c-number probe, so
    # unit-step differences give the Jacobian without truncation error.
    f0 = _real_rhs(np.zeros(8), params, probe)
    J = np.empty((8, 8))
    for k in range(8):
        e = np.zeros(8)
        e[k] = 1.0
        J[:, k] = _real_rhs(e, params, probe) - f0
    return J


def _rate_scale(params, probe):
    return max(params.gamma_b + params.gamma_c, params.gamma_ba, params.gamma_ac,
               params.gamma_bc_prime, abs(params.omega_c), abs(params.g * probe), 1e-300)


def steady_state(params, probe=0j, *, initial=None, rtol=STEADY_STATE_RTOL,
                 maxiter=STEADY_STATE_MAXITER):
    """
    Stationary mean values for a constant probe.

    Damped Newton iteration on the 8 real unknowns, started from the dark
    state unless ``initial`` is given.  Converged when the max-norm of the
    right-hand side is below ``rtol`` times the largest rate of the system.

    Raises
    ------
    DegenerateSteadyState
        Probe and control both off, or the Jacobian is singular.
    NoConvergence
        Residual not reduced below tolerance within ``maxiter`` iterations.
    """
    E = complex(probe)
    if E == 0 and params.omega_c == 0:
        raise DegenerateSteadyState(
            "probe and control are both zero: |b> and |c> are uncoupled and the "
            "steady-state manifold is degenerate")
    if params.gamma_b + params.gamma_c <= 0:
        raise DegenerateSteadyState("no spontaneous decay out of |a>: steady state is not unique")

    x = (initial or BlochState.dark()).as_real()
    J = _jacobian(x, params, E)
    if np.linalg.cond(J) > 1e14:
        raise DegenerateSteadyState("singular Jacobian: steady state is not unique")

    scale = _rate_scale(params, E)
    f = _real_rhs(x, params, E)
    fnorm = np.max(np.abs(f))
    for _ in range(maxiter):
        if fnorm <= rtol * scale:
            break
        step = np.linalg.solve(J, -f)
        lam = 1.0
        while True:
            x_try = x + lam * step
            f_try = _real_rhs(x_try, params, E)
            fn_try = np.max(np.abs(f_try))
            if fn_try < fnorm or lam < 1e-6:
                break
            lam *= 0.5
        if fn_try >= fnorm:
            # no further decrease possible: at the rounding floor
            break
        x, f, fnorm = x_try, f_try, fn_try
    if fnorm > rtol * scale:
        raise NoConvergence(
            f"steady state residual {fnorm:.3e} exceeds {rtol:.1e} x rate scale {scale:.3e}")
    return BlochState.from_real(x).validate()


def population_exchange_steady_bb(params, probe):
    """
    Ground-state population predicted by the population-exchange model.

    ``-2 g^2 |E|^2 / (gamma_ba * gamma_bc + |Omega_c|^2)`` with ``gamma_bc``
    the population-exchange rate.  Negative for any non-zero probe, which is
    incompatible with nearly all population remaining in |b>.
    """
    denom = params.gamma_ba * params.gamma_bc_popexch + params.omega_c_sq
    if denom == 0:
        raise DivisionDegenerate("gamma_ba * gamma_bc + |Omega_c|^2 vanishes")
    return -2.0 * params.g**2 * abs(complex(probe)) ** 2 / denom


def weak_probe_consistency(params, probe, model=NoiseModel.OFF_DIAGONAL, *, k=CONSISTENCY_K):
    """
    Check whether a model's steady state is compatible with the weak-probe premise.

    For the off-diagonal model the verdict is consistent when
    ``1 - sigma_bb <= k * eps**2`` with ``eps = |g E / Omega_c|``.  The
    population-exchange model is inconsistent for every non-zero probe; its
    reported deficit is ``1 - sigma_bb`` using the closed-form population.
    A zero probe is the exact dark state for both models.
    """
    model = NoiseModel.parse(model)
    E = complex(probe)
    if params.omega_c == 0:
        raise ValueError("weak-probe consistency requires a non-zero control field")
    if abs(params.g * E) >= abs(params.omega_c):
        raise ValueError("probe is not weak: |g E| >= |Omega_c|")
    eps = abs(params.g * E / params.omega_c)
    if E == 0:
        return ConsistencyReport(model, 0.0, 0.0, Verdict.CONSISTENT_SECOND_ORDER)
    if model is NoiseModel.POPULATION_EXCHANGE:
        deficit = 1.0 - population_exchange_steady_bb(params, E)
        return ConsistencyReport(model, eps, deficit, Verdict.INCONSISTENT)
    state = steady_state(params, E)
    deficit = state.sigma_aa + state.sigma_cc
    verdict = (Verdict.CONSISTENT_SECOND_ORDER if deficit <= k * eps**2
               else Verdict.INCONSISTENT)
    return ConsistencyReport(model, eps, deficit, verdict)
