"""Truncated number-basis oracle for the squeezed cavity mode.

The density matrix is evolved under the rotating-frame squeeze generator
``H = -i (lambda/2) (a^2 - a^+^2)`` with a fixed-step RK4 scheme, entirely
independently of the Heisenberg/Bogoliubov route.  Time is measured in the
squeezing parameter ``s = lambda t``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import TruncationError, ValidationError

__all__ = [
    "FockDensity",
    "TruncationReport",
    "MAX_STEP",
    "TAIL_TOL",
    "thermal_density",
    "evolve_squeeze",
    "photon_stats",
    "convergence_scan",
    "DEFAULT_DIMS",
]

MAX_STEP = 1e-3
TAIL_TOL = 1e-6
TRACE_TOL = 1e-10
HERMITIAN_TOL = 1e-10
POSITIVITY_TOL = 1e-8
DEFAULT_DIM = 60
DEFAULT_DIMS = (60, 80, 120, 160, 200, 280, 400, 560)


def _tail_start(dim):
    return dim - max(1, int(math.ceil(0.1 * dim)))


def tail_mass(populations):
    """Population held in the top 10% of levels."""
    populations = np.asarray(populations)
    return float(np.sum(populations[_tail_start(len(populations)):]))


@dataclass(frozen=True)
class FockDensity:
    """Density matrix truncated to ``dim`` number states."""

    rho: np.ndarray

    def __post_init__(self):
        rho = np.asarray(self.rho, dtype=complex)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1] or rho.shape[0] < 2:
            raise ValidationError("rho", f"expected a square matrix with dim >= 2, got shape {rho.shape}")
        object.__setattr__(self, "rho", rho)

    @property
    def dim(self):
        return self.rho.shape[0]

    @property
    def populations(self):
        return np.real(np.diag(self.rho))

    def trace_error(self):
        return abs(np.trace(self.rho) - 1.0)

    def hermiticity_error(self):
        return float(np.max(np.abs(self.rho - self.rho.conj().T)))

    def min_eigenvalue(self):
        return float(np.linalg.eigvalsh(0.5 * (self.rho + self.rho.conj().T))[0])

    def validate(self, check_positivity=True):
        """Raise :class:`ValidationError` if trace, Hermiticity or positivity drift."""
        if self.trace_error() > TRACE_TOL:
            raise ValidationError("rho", f"trace drifted by {self.trace_error():.3e}")
        if self.hermiticity_error() > HERMITIAN_TOL:
            raise ValidationError("rho", f"not Hermitian (max deviation {self.hermiticity_error():.3e})")
        if check_positivity and self.min_eigenvalue() < -POSITIVITY_TOL:
            raise ValidationError("rho", f"negative eigenvalue {self.min_eigenvalue():.3e}")


@dataclass(frozen=True)
class TruncationReport:
    dim: int
    mean_n: float
    tail_mass: float
    converged: bool
    error: str = ""


def thermal_density(n_th, dim=DEFAULT_DIM, tail_tol=TAIL_TOL):
    """Geometric (thermal) state, renormalised over the truncation.

    Raises :class:`TruncationError` if more than ``tail_tol`` of the
    untruncated population would sit in the top 10% of levels.
    """
    if not math.isfinite(n_th) or n_th < 0:
        raise ValidationError("n_th", f"must be finite and >= 0, got {n_th!r}")
    if int(dim) != dim or dim < 2:
        raise ValidationError("dim", f"must be an integer >= 2, got {dim!r}")
    dim = int(dim)
    k = np.arange(dim, dtype=float)
    if n_th == 0:
        p = np.zeros(dim)
        p[0] = 1.0
    else:
        q = n_th / (1.0 + n_th)
        p = q**k / (1.0 + n_th)
    tail = tail_mass(p) + (1.0 - p.sum())
    if tail > tail_tol:
        raise TruncationError(
            f"dim = {dim} too small for n_th = {n_th:g}: tail mass {tail:.3e} > {tail_tol:g}",
            time=0.0,
            tail_mass=tail,
        )
    return FockDensity(np.diag(p / p.sum()).astype(complex))


def _squeeze_bands(dim):
    """Off-diagonal bands of ``G = (a^+^2 - a^2)/2`` (real antisymmetric).

    ``G[k+2, k] = b[k]`` and ``G[k, k+2] = -b[k]`` with ``b[k] = sqrt((k+1)(k+2))/2``.
    """
    k = np.arange(dim - 2, dtype=float)
    return 0.5 * np.sqrt((k + 1.0) * (k + 2.0))


def _commutator(b, rho):
    # d rho / ds = G rho - rho G.  G is real antisymmetric and rho Hermitian,
    # so rho G = -(G rho)^H and only one banded product is needed.
    x = np.empty_like(rho)
    x[:2] = 0.0
    x[2:] = b[:, None] * rho[:-2]
    x[:-2] -= b[:, None] * rho[2:]
    return x + x.conj().T


def evolve_squeeze(state, r_theta, steps=None, tail_tol=TAIL_TOL, check_every=50):
    """Evolve ``state`` to squeezing parameter ``r_theta = lambda t``.

    ``steps`` defaults to the smallest count with step ``<= 1e-3``.  The
    tail population is monitored every ``check_every`` steps and at the end;
    a breach raises :class:`TruncationError` carrying the time reached.
    Trace drift beyond ``1e-10`` is reported as an error, never renormalised.
    """
    if not math.isfinite(r_theta) or r_theta < 0:
        raise ValidationError("r_theta", f"must be finite and >= 0, got {r_theta!r}")
    if r_theta > 2.0:
        raise ValidationError("r_theta", f"truncated evolution supports r_theta <= 2, got {r_theta!r}")
    if r_theta == 0:
        return state
    min_steps = int(math.ceil(r_theta / MAX_STEP - 1e-9))
    if steps is None:
        steps = min_steps
    elif steps < min_steps:
        raise ValidationError("steps", f"need at least {min_steps} steps for step <= {MAX_STEP:g}")
    h = r_theta / steps
    b = _squeeze_bands(state.dim)
    rho = state.rho
    # The generator is real, so a real state stays real.
    if not np.any(rho.imag):
        rho = rho.real.copy()
    start = _tail_start(state.dim)
    for i in range(1, steps + 1):
        k1 = _commutator(b, rho)
        k2 = _commutator(b, rho + 0.5 * h * k1)
        k3 = _commutator(b, rho + 0.5 * h * k2)
        k4 = _commutator(b, rho + h * k3)
        rho = rho + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if i % check_every == 0 or i == steps:
            tail = float(np.real(np.trace(rho[start:, start:])))
            if tail > tail_tol:
                raise TruncationError(
                    f"tail mass {tail:.3e} > {tail_tol:g} at s = {i * h:.6g}; increase dim (now {state.dim})",
                    time=i * h,
                    tail_mass=tail,
                )
            drift = abs(np.trace(rho) - 1.0)
            if drift > TRACE_TOL:
                raise TruncationError(f"trace drift {drift:.3e} at s = {i * h:.6g}", time=i * h)
    return FockDensity(rho.astype(complex))


def photon_stats(state):
    """Return ``(<a^+ a>, <a^2>, Var N)`` of a truncated state."""
    rho = state.rho
    n = np.arange(state.dim, dtype=float)
    pops = np.real(np.diag(rho))
    mean_n = float(pops @ n)
    var_n = float(pops @ (n * n)) - mean_n**2
    # <a^2> = sum_k sqrt(k (k-1)) rho[k, k-2]
    k = np.arange(2, state.dim)
    mean_a_sq = complex(np.sum(np.sqrt(k * (k - 1.0)) * rho[k, k - 2]))
    if abs(mean_a_sq.imag) <= 1e-14 * max(1.0, abs(mean_a_sq)):
        mean_a_sq = mean_a_sq.real
    return mean_n, mean_a_sq, var_n


def convergence_scan(n_th, r_theta, dims=DEFAULT_DIMS, tol=1e-8, tail_tol=TAIL_TOL):
    """Run the oracle at each truncation in ``dims`` (ascending).

    An entry is converged when it evolves without a tail breach and its
    ``<N>`` differs from the next dimension's by less than ``tol``.  The scan
    stops one step after the first converged entry; the last dimension can
    never be declared converged because it has no successor.
    """
    dims = [int(d) for d in dims]
    if any(b <= a for a, b in zip(dims, dims[1:])):
        raise ValidationError("dims", "must be strictly ascending")
    results = []
    for d in dims:
        try:
            state = evolve_squeeze(thermal_density(n_th, d, tail_tol), r_theta, tail_tol=tail_tol)
        except TruncationError as exc:
            tail = exc.tail_mass if exc.tail_mass is not None else float("nan")
            results.append(TruncationReport(d, float("nan"), tail, False, str(exc)))
            continue
        mean_n = photon_stats(state)[0]
        results.append(TruncationReport(d, mean_n, tail_mass(state.populations), False))
        if len(results) >= 2:
            prev = results[-2]
            if not prev.error and abs(prev.mean_n - mean_n) < tol and prev.tail_mass < tail_tol:
                results[-2] = TruncationReport(prev.dim, prev.mean_n, prev.tail_mass, True)
                break
    return results


def converged_state(n_th, r_theta, dims=DEFAULT_DIMS, tol=1e-8):
    """Smallest converged truncation from :func:`convergence_scan` and its ``<N>``."""
    for rep in convergence_scan(n_th, r_theta, dims, tol):
        if rep.converged:
            return rep
    raise TruncationError(f"no converged truncation among dims {list(dims)} for n_th={n_th}, s={r_theta}")
