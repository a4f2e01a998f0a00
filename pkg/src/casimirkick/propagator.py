"""Heisenberg-picture transfer-matrix propagation of the electron + mode system.

Operators are ordered ``v = (x, p, a, a^+)`` in natural units (time in
``1/omega``, length in ``sigma_x``, momentum in ``hbar/sigma_x``), so that
``[x, p] = i`` and ``[a, a^+] = 1``.  The equations of motion are linear,
``dv/dt = M(t) v``, and the solution is ``v(t) = phi(t) v(0)``.  The
integrator works on ``phi - 1`` rather than ``phi`` so that the tiny
electron kick is not lost against the identity.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from . import analytic
from .exceptions import IntegrationError, ValidationError

__all__ = [
    "X",
    "P",
    "A",
    "AD",
    "COMMUTATORS",
    "Frame",
    "ModelFlags",
    "CANONICAL",
    "TransferMatrix",
    "GaussianMoments",
    "MomentReport",
    "AuditReport",
    "build_generator",
    "propagate",
    "propagate_many",
    "commutator_residual",
    "kinetic_moments",
    "approximation_audit",
    "variance_adjudication",
]

X, P, A, AD = 0, 1, 2, 3
ELECTRON = slice(0, 2)
FIELD = slice(2, 4)

# COMMUTATORS[i, j] = [v_i, v_j]
COMMUTATORS = np.array(
    [
        [0, 1j, 0, 0],
        [-1j, 0, 0, 0],
        [0, 0, 0, 1],
        [0, 0, -1, 0],
    ],
    dtype=complex,
)

LADDER = "ladder"
TOL_RANGE = (1e-12, 1e-4)


class Frame(str, enum.Enum):
    ROTATING = "rotating"
    LAB = "lab"


@dataclass(frozen=True)
class ModelFlags:
    """Switchable approximations.

    Attributes:
        rwa: drop the counter-rotating part of the parametric pump.  With
            ``rwa=False`` the field rows carry the full pump
            ``-2i r sin(2t) a + r (1 - e^{4it}) a^+`` whose secular part is
            the plain squeeze ``r a^+``.
        backaction: let the electron drive the mode,
            ``da/dt += i g_over x e^{2it}``.
        frame: ``rotating`` removes the free ``-i a`` rotation of the mode.
    """

    rwa: bool = True
    backaction: bool = False
    frame: Frame = Frame.ROTATING

    def __post_init__(self):
        object.__setattr__(self, "frame", Frame(self.frame))

    @property
    def is_canonical(self):
        return self == CANONICAL

    def as_dict(self):
        return {"rwa": self.rwa, "backaction": self.backaction, "frame": self.frame.value}


CANONICAL = ModelFlags()


def build_generator(t, flags, groups):
    """Return the 4x4 complex matrix ``M(t)`` with ``dv/dt = M(t) v``."""
    r = groups.r
    g = groups.g_over
    drive = complex(math.cos(2.0 * t), math.sin(2.0 * t))
    m = np.zeros((4, 4), dtype=complex)
    m[X, P] = groups.recoil
    m[P, A] = g * drive.conjugate()
    m[P, AD] = g * drive
    m[A, AD] = r
    m[AD, A] = r
    if flags.frame is Frame.LAB:
        m[A, A] = -1j
        m[AD, AD] = 1j
    if not flags.rwa:
        s2 = math.sin(2.0 * t)
        quad = drive * drive
        m[A, A] += -2j * r * s2
        m[AD, AD] += 2j * r * s2
        m[A, AD] -= r * quad
        m[AD, A] -= r * quad.conjugate()
    if flags.backaction:
        m[A, X] = 1j * g * drive
        m[AD, X] = -1j * g * drive.conjugate()
    return m


@dataclass(frozen=True)
class TransferMatrix:
    """Linear map ``v(t) = phi v(0)``; ``delta = phi - 1`` is the primary data."""

    delta: np.ndarray
    t: float
    flags: ModelFlags = CANONICAL
    convention: str = LADDER
    nfev: int = 0

    @property
    def phi(self):
        return np.eye(4, dtype=complex) + self.delta

    @classmethod
    def identity(cls, flags=CANONICAL):
        return cls(delta=np.zeros((4, 4), dtype=complex), t=0.0, flags=flags)


def _check_tol(tol):
    tol = float(tol)
    if not TOL_RANGE[0] <= tol <= TOL_RANGE[1]:
        raise ValidationError("tol", f"must lie in [{TOL_RANGE[0]:g}, {TOL_RANGE[1]:g}], got {tol!r}")
    return tol


def _scaling(groups):
    # Electron operators are measured in units of g_over so that every
    # propagated entry is O(1) except the weak back-action column.
    s = groups.g_over if groups.g_over > 0 else 1.0
    d = np.array([s, s, 1.0, 1.0])
    weight = np.ones((4, 4))
    weight[FIELD, ELECTRON] = min(1.0, s * s)
    return d, weight


def propagate_many(flags, groups, times, tol=1e-9, check=True):
    """Propagate to each of the ascending ``times``, restarting at every checkpoint.

    No dense-output interpolation is used, so every returned matrix carries
    the full step-controlled accuracy.
    """
    tol = _check_tol(tol)
    times = [float(t) for t in times]
    if any(t < 0 for t in times) or any(b < a for a, b in zip(times, times[1:])):
        raise ValidationError("t_final", "times must be >= 0 and ascending")
    d, weight = _scaling(groups)
    rescale = d[None, :] / d[:, None]
    eye = np.eye(4)

    def rhs(t, y):
        mu = build_generator(t, flags, groups) * rescale
        return (mu @ (eye + y.reshape(4, 4))).ravel()

    atol = (1e-2 * tol * weight).ravel()
    y = np.zeros(16, dtype=complex)
    t_now = 0.0
    nfev = 0
    out = []
    for t_next in times:
        if t_next > t_now:
            sol = solve_ivp(rhs, (t_now, t_next), y, method="RK45", rtol=tol, atol=atol)
            nfev += sol.nfev
            if sol.status != 0:
                raise IntegrationError(f"integration failed: {sol.message}", time=float(sol.t[-1]))
            y = sol.y[:, -1]
            t_now = t_next
        delta = y.reshape(4, 4) * (d[:, None] / d[None, :])
        tm = TransferMatrix(delta=delta.copy(), t=t_next, flags=flags, nfev=nfev)
        if check:
            res = commutator_residual(tm)
            if res > 100.0 * tol:
                raise IntegrationError(
                    f"commutator residual {res:.3e} exceeds 100*tol = {100 * tol:.3e}", time=t_next
                )
        out.append(tm)
    return out


def propagate(flags, groups, t_final=None, tol=1e-9, check=True):
    """Integrate ``dphi/dt = M(t) phi`` from ``phi(0) = 1`` up to ``t_final``.

    ``t_final`` defaults to the flight phase ``groups.theta``.  Raises
    :class:`IntegrationError` on step-size failure and, when ``check`` is
    set, if the commutator residual exceeds ``100 * tol``.
    """
    if t_final is None:
        t_final = groups.theta
    return propagate_many(flags, groups, [t_final], tol=tol, check=check)[0]


def commutator_residual(phi, blockwise=None):
    """Max-norm of ``phi C phi^T - C`` for the canonical commutator matrix ``C``.

    Without back-action the electron is driven by the field but never acts
    on it, a one-way coupling that is canonical only subsystem by subsystem.
    For such maps (``blockwise=True``, the default for a :class:`TransferMatrix`
    whose flags disable back-action) the electron and field blocks are
    checked separately.
    """
    if isinstance(phi, TransferMatrix):
        if blockwise is None:
            blockwise = not phi.flags.backaction
        delta = phi.delta
    else:
        delta = np.asarray(phi, dtype=complex) - np.eye(4)
    if blockwise:
        return max(_residual(delta[b, b], COMMUTATORS[b, b]) for b in (ELECTRON, FIELD))
    return _residual(delta, COMMUTATORS)


def _residual(delta, comm):
    # phi C phi^T - C expanded in delta = phi - 1 to avoid cancellation.
    r = delta @ comm + comm @ delta.T + delta @ comm @ delta.T
    return float(np.max(np.abs(r)))


@dataclass(frozen=True)
class GaussianMoments:
    """First moments and symmetrised covariance ``<{dv_i, dv_j}>/2``.

    Only the ladder ordering ``(x, p, a, a^+)`` is supported; the field
    block of the covariance holds ``<a a>`` and ``n_th + 1/2``.
    """

    mean: np.ndarray
    cov: np.ndarray
    convention: str = LADDER

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=complex)
        cov = np.asarray(self.cov, dtype=complex)
        if mean.shape != (4,) or cov.shape != (4, 4):
            raise ValidationError("moments", "expected a 4-vector mean and 4x4 covariance")
        if not np.allclose(cov, cov.T, rtol=0, atol=1e-12 * max(1.0, np.abs(cov).max())):
            raise ValidationError("cov", "symmetrised covariance must be symmetric")
        sx2 = cov[X, X].real
        sp2 = cov[P, P].real
        if sx2 * sp2 < 0.25 * (1.0 - 1e-12):
            raise ValidationError("cov", f"uncertainty bound violated: var_x * var_p = {sx2 * sp2:.6g} < 1/4")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @classmethod
    def thermal(cls, groups, electron_state="minimum", narrowing=100.0):
        """Uncorrelated electron wavepacket and thermal mode.

        ``electron_state="minimum"`` is the minimum-uncertainty packet of
        width ``sigma_x`` (``var_p = 1/4``).  ``"narrow"`` shrinks the
        momentum spread by ``narrowing`` and broadens the position spread by
        the same factor, keeping the packet minimum-uncertainty.
        """
        if electron_state == "minimum":
            var_x, var_p = 1.0, 0.25
        elif electron_state == "narrow":
            if narrowing < 1:
                raise ValidationError("narrowing", "must be >= 1")
            var_x, var_p = narrowing**2, 0.25 / narrowing**2
        else:
            raise ValidationError("electron_state", f"unknown preset {electron_state!r}")
        half = groups.n_th + 0.5
        cov = np.zeros((4, 4), dtype=complex)
        cov[X, X] = var_x
        cov[P, P] = var_p
        cov[A, AD] = cov[AD, A] = half
        mean = np.array([0.0, groups.p_mean, 0.0, 0.0], dtype=complex)
        return cls(mean=mean, cov=cov)


@dataclass(frozen=True)
class MomentReport:
    """Expectation values after propagation.

    ``delta_k`` and ``delta_var_k`` are computed from ``phi - 1`` directly and
    remain accurate even when the initial kinetic energy dwarfs the kick.
    """

    mean_k: float
    var_k: float
    mean_n: float
    delta_k: float
    delta_var_k: float
    commutator_residual: float
    flags: ModelFlags = CANONICAL


def kinetic_moments(phi, init, groups):
    """Mean and variance of ``K = p^2/2m`` and mean photon number.

    Uses the Gaussian identity ``Var(p^2) = 4 <p>^2 var_p + 2 var_p^2``.
    Energies are returned in joules via ``groups.hbar_omega``.
    """
    if phi.convention != init.convention:
        raise ValidationError("convention", f"transfer matrix uses {phi.convention!r}, moments use {init.convention!r}")
    delta = phi.delta
    mean, cov = init.mean, init.cov

    m_p = mean[P].real
    s_p = cov[P, P].real
    dm_p = (delta[P] @ mean).real
    ds_p = (2.0 * (delta[P] @ cov[:, P]) + delta[P] @ cov @ delta[P]).real
    dm2 = dm_p * (2.0 * m_p + dm_p)

    m_p2 = m_p * m_p
    s_t = s_p + ds_p
    half_mu = 0.5 * groups.recoil
    unit = groups.hbar_omega
    mean_k0 = half_mu * (m_p2 + s_p)
    var_k0 = half_mu**2 * (4.0 * m_p2 * s_p + 2.0 * s_p * s_p)
    delta_k = half_mu * (dm2 + ds_p)
    delta_var = half_mu**2 * (4.0 * (dm2 * s_t + m_p2 * ds_p) + 2.0 * ds_p * (2.0 * s_p + ds_p))

    # <a^+ a> = <{a^+, a}>/2 - 1/2 + <a^+><a>
    phi_full = phi.phi
    row_a, row_ad = phi_full[A], phi_full[AD]
    mean_n = (row_ad @ cov @ row_a + (row_ad @ mean) * (row_a @ mean)).real - 0.5

    return MomentReport(
        mean_k=unit * (mean_k0 + delta_k),
        var_k=unit**2 * (var_k0 + delta_var),
        mean_n=float(mean_n),
        delta_k=unit * delta_k,
        delta_var_k=unit**2 * delta_var,
        commutator_residual=commutator_residual(phi),
        flags=phi.flags,
    )


AUDIT_VARIANTS = {
    "canonical": CANONICAL,
    "rwa_off": ModelFlags(rwa=False),
    "backaction_on": ModelFlags(backaction=True),
    "frame_lab": ModelFlags(frame=Frame.LAB),
}


@dataclass(frozen=True)
class AuditReport:
    """Per-variant moments and deviations from the canonical model.

    ``dev_k`` is ``|mean_k - mean_k_canonical| / mean_k_canonical`` and
    ``dev_n`` is ``|mean_n - mean_n_canonical| / (mean_n_canonical + 1/2)``.
    """

    reports: dict = field(default_factory=dict)
    dev_k: dict = field(default_factory=dict)
    dev_n: dict = field(default_factory=dict)


def approximation_audit(groups, t_final=None, tol=1e-9, init=None):
    """Compare the canonical model with each single-flag departure from it."""
    if init is None:
        init = GaussianMoments.thermal(groups)
    reports = {}
    for name, flags in AUDIT_VARIANTS.items():
        reports[name] = kinetic_moments(propagate(flags, groups, t_final, tol), init, groups)
    ref = reports["canonical"]
    dev_k, dev_n = {}, {}
    for name, rep in reports.items():
        dev_k[name] = abs(rep.delta_k - ref.delta_k) / abs(ref.mean_k)
        dev_n[name] = abs(rep.mean_n - ref.mean_n) / (ref.mean_n + 0.5)
    return AuditReport(reports=reports, dev_k=dev_k, dev_n=dev_n)


def variance_adjudication(groups, tol=1e-9, narrowing=100.0):
    """Leading-order variance shift with the Wick-oracle ratio filled in.

    The oracle propagates a narrow-momentum packet under the canonical flags
    and takes the exact Gaussian variance change of ``K``.
    """
    init = GaussianMoments.thermal(groups, electron_state="narrow", narrowing=narrowing)
    rep = kinetic_moments(propagate(CANONICAL, groups, tol=tol), init, groups)
    return analytic.variance_shift_paper(
        groups.r, groups.theta, groups.n_th, groups.eps_kick, groups.k0, oracle_dvar=rep.delta_var_k
    )
