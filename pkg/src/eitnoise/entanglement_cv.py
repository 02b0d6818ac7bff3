"""
Two-mode Gaussian states with one arm sent through the EIT medium.

Covariance matrices are ordered (X_A, P_A, X_B, P_B) with vacuum equal to
the identity.  Each sideband frequency is treated as an independent two-mode
system; the medium acts on its arm as a lossy beamsplitter followed by a
quadrature rotation.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateConditioning
from .linear_response import group_delay, phase_shift, power_transmission

DUAN_SEPARABLE_BOUND = 4.0
BONA_FIDE_TOL = 1e-10

_OMEGA = np.array([[0.0, 1.0, 0.0, 0.0],
                   [-1.0, 0.0, 0.0, 0.0],
                   [0.0, 0.0, 0.0, 1.0],
                   [0.0, 0.0, -1.0, 0.0]])


class Arm(enum.Enum):
    A = "A"
    B = "B"

    @property
    def slice(self):
        return slice(0, 2) if self is Arm.A else slice(2, 4)


def symplectic_eigenvalues(sigma):
    """Symplectic spectrum of a 4x4 covariance matrix, ascending."""
    ev = np.abs(np.linalg.eigvals(1j * _OMEGA @ np.asarray(sigma, dtype=float)))
    return np.sort(ev)[::2]


def partial_transpose(sigma):
    """Flip the sign of P_B."""
    flip = np.diag([1.0, 1.0, 1.0, -1.0])
    return flip @ np.asarray(sigma, dtype=float) @ flip


@dataclass(frozen=True)
class CovarianceMatrix:
    entries: np.ndarray
    sideband: float = 0.0

    def __post_init__(self):
        m = np.array(self.entries, dtype=float)
        if m.shape != (4, 4):
            raise ValueError("covariance matrix must be 4x4")
        if np.max(np.abs(m - m.T)) > 1e-14 * max(1.0, np.max(np.abs(m))):
            raise ValueError("covariance matrix is not symmetric")
        m = 0.5 * (m + m.T)
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    def is_bona_fide(self, tol=BONA_FIDE_TOL):
        """Uncertainty principle: ``sigma + i Omega >= 0``."""
        return bool(np.min(np.linalg.eigvalsh(self.entries + 1j * _OMEGA)) >= -tol)

    def validate(self, tol=BONA_FIDE_TOL):
        if not self.is_bona_fide(tol):
            raise ValueError("covariance matrix violates the uncertainty principle")
        return self

    def block(self, arm):
        s = Arm(arm).slice
        return self.entries[s, s]

    def variance(self, u):
        """Variance of the linear combination ``u . (X_A, P_A, X_B, P_B)``."""
        u = np.asarray(u, dtype=float)
        return float(u @ self.entries @ u)

    def covariance(self, u, v):
        return float(np.asarray(u, float) @ self.entries @ np.asarray(v, float))


def rotation(phi):
    c, s = np.cos(phi), np.sin(phi)
    return np.array([[c, -s], [s, c]])


def epr_pair_from_squeezers(r, sideband=0.0):
    """Two-mode squeezed vacuum with squeezing parameter ``r``."""
    if r < 0:
        raise ValueError("squeezing parameter must be non-negative")
    ch, sh = np.cosh(2 * r), np.sinh(2 * r)
    m = np.zeros((4, 4))
    m[:2, :2] = ch * np.eye(2)
    m[2:, 2:] = ch * np.eye(2)
    m[:2, 2:] = sh * np.diag([1.0, -1.0])
    m[2:, :2] = sh * np.diag([1.0, -1.0])
    return CovarianceMatrix(m, sideband)


def lossy_rotation_channel(cm, transmission, phase=0.0, arm=Arm.B):
    """
    Attenuate and rotate one arm: ``x -> sqrt(T) R(phi) x`` plus ``(1 - T)`` vacuum.

    ``T = 1, phi = 0`` returns the input unchanged.
    """
    arm = Arm(arm)
    T = float(transmission)
    if not 0.0 <= T <= 1.0:
        raise ValueError("transmission must lie in [0, 1]")
    if T == 1.0 and phase == 0.0:
        return cm
    X = np.eye(4)
    Y = np.zeros((4, 4))
    s = arm.slice
    X[s, s] = np.sqrt(T) * rotation(phase)
    Y[s, s] = (1.0 - T) * np.eye(2)
    return CovarianceMatrix(X @ cm.entries @ X.T + Y, cm.sideband)


def rotate_arm(cm, phase, arm=Arm.A):
    """Pure quadrature rotation of one arm (a delay of tau gives phase w*tau)."""
    return lossy_rotation_channel(cm, 1.0, phase, arm)


def apply_eit_channel(cm, params, length=None, arm=Arm.B):
    """Send one arm through the medium at the matrix's sideband frequency."""
    w = cm.sideband
    T = power_transmission(params, w, length)
    phi = phase_shift(params, w, length)
    return lossy_rotation_channel(cm, T, phi, arm)


def duan_criterion(cm):
    """``V(X_A - X_B) + V(P_A + P_B)``; below 4 witnesses entanglement."""
    return cm.variance([1, 0, -1, 0]) + cm.variance([0, 1, 0, 1])


def _conditional_variance(cm, u, v):
    vv = cm.variance(v)
    if vv == 0:
        raise DegenerateConditioning("conditioning quadrature has zero variance")
    return cm.variance(u) - cm.covariance(u, v) ** 2 / vv


def reid_epr_criterion(cm, infer="A"):
    """
    Product of conditional variances ``V(X|X') V(P|P')``.

    With ``infer="A"`` the quadratures of arm A are inferred from arm B,
    ``V(X_A|X_B) V(P_A|P_B)``; ``infer="B"`` swaps the roles.  A value below
    1 demonstrates the EPR paradox.
    """
    xa, pa, xb, pb = np.eye(4)
    if Arm(infer) is Arm.A:
        return _conditional_variance(cm, xa, xb) * _conditional_variance(cm, pa, pb)
    return _conditional_variance(cm, xb, xa) * _conditional_variance(cm, pb, pa)


class Compensation(enum.Enum):
    NONE = "none"
    DELAY = "delay"
    EXACT = "exact"


@dataclass(frozen=True)
class EntanglementDelayReport:
    omega_grid: np.ndarray
    duan: np.ndarray
    reid: np.ndarray
    delay_s: float
    entangled_interval: tuple[float, float] | None

    @property
    def entangled_bandwidth(self):
        if self.entangled_interval is None:
            return 0.0
        lo, hi = self.entangled_interval
        return hi - lo


def _entangled_interval(w, duan):
    inside = duan < DUAN_SEPARABLE_BOUND
    if not inside.any():
        return None
    i0 = int(np.argmin(np.abs(w)))
    if not inside[i0]:
        i0 = int(np.nonzero(inside)[0][0])
    lo = hi = i0
    while lo > 0 and inside[lo - 1]:
        lo -= 1
    while hi < w.size - 1 and inside[hi + 1]:
        hi += 1
    return float(w[lo]), float(w[hi])


def entanglement_delay_report(r, params, length=None, omega_grid=None, *,
                              compensation=Compensation.DELAY, tau=None, infer="A"):
    """
    Sweep sideband frequency with arm B in the medium.

    Arm A may be rotated to re-synchronise with arm B: ``"delay"`` applies a
    pure delay phase ``-w tau`` (``tau`` defaults to the group delay),
    ``"exact"`` undoes the medium's phase exactly, ``"none"`` leaves arm A
    alone.  ``entangled_interval`` is the contiguous stretch of the grid
    around line centre where the Duan value stays below 4.
    """
    if r <= 0:
        raise ValueError("entanglement report needs r > 0")
    compensation = Compensation(compensation)
    w = np.asarray([0.0] if omega_grid is None else omega_grid, dtype=float)
    delay = group_delay(params, length)
    if tau is None:
        tau = delay
    duan = np.empty(w.size)
    reid = np.empty(w.size)
    for i, wi in enumerate(w):
        cm = apply_eit_channel(epr_pair_from_squeezers(r, wi), params, length, Arm.B)
        if compensation is Compensation.DELAY:
            cm = rotate_arm(cm, -wi * tau, Arm.A)
        elif compensation is Compensation.EXACT:
            cm = rotate_arm(cm, -phase_shift(params, wi, length), Arm.A)
        duan[i] = duan_criterion(cm)
        reid[i] = reid_epr_criterion(cm, infer)
    return EntanglementDelayReport(w, duan, reid, delay, _entangled_interval(w, duan))
