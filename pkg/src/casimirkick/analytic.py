"""Closed-form results for the squeezed field and the electron kick.

All functions take the reduced parameters ``r = lambda/omega`` and
``theta = omega*tau`` and accept scalars or numpy arrays.  The drive seen by
the electron oscillates at twice the mode frequency, so in reduced units its
frequency is the constant 2.

Field (rotating frame, fast terms dropped)::

    a(t) = a cosh(r t) + a^+ sinh(r t)

Electron momentum after the flight::

    p(tau) = p(0) + g / (omega (r^2 + 4)) * [ (a + a^+) c1 - i (a - a^+) c2 ]

with ``c1 = (r^2+4) * int_0^theta e^{r u} cos 2u du`` and
``c2 = (r^2+4) * int_0^theta e^{-r u} sin 2u du``.  Averaging over a thermal
field gives ``<K(tau)> - <K(0)> = eps_kick (1 + 2 n_th) f`` with
``f = (c1^2 + c2^2) / (r^2 + 4)^2``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import RangeError, ValidationError

__all__ = [
    "MAX_SQUEEZE",
    "BogoliubovPair",
    "KickCoefficients",
    "EnergyShift",
    "VarianceShift",
    "bogoliubov",
    "mean_photons",
    "kick_coefficients",
    "mean_kinetic_shift",
    "resonant_shift",
    "small_squeeze_limit",
    "variance_shift_paper",
]

MAX_SQUEEZE = 300.0
SMALL_SQUEEZE_BOUND = 0.1


def _out(x):
    x = np.asarray(x)
    return float(x) if x.ndim == 0 else x


def _reduced(r, theta):
    r = np.asarray(r, dtype=float)
    theta = np.asarray(theta, dtype=float)
    if np.any(r < 0) or not np.all(np.isfinite(r)):
        raise ValidationError("r", "must be finite and >= 0")
    if np.any(theta < 0) or not np.all(np.isfinite(theta)):
        raise ValidationError("theta", "must be finite and >= 0")
    x = r * theta
    if np.any(x > MAX_SQUEEZE):
        raise RangeError(
            f"squeezing parameter r*theta = {np.max(x):.6g} exceeds {MAX_SQUEEZE:g}"
        )
    return r, theta, x


def _occupancy(n_th):
    n_th = np.asarray(n_th, dtype=float)
    if np.any(n_th < 0) or not np.all(np.isfinite(n_th)):
        raise ValidationError("n_th", "must be finite and >= 0")
    return n_th


@dataclass(frozen=True)
class BogoliubovPair:
    """Coefficients ``c = cosh(r theta)`` and ``s = sinh(r theta)``."""

    c: float
    s: float


@dataclass(frozen=True)
class KickCoefficients:
    """Quadrature weights of the momentum kick and their common denominator."""

    c1: float
    c2: float
    denom: float


@dataclass(frozen=True)
class EnergyShift:
    """Mean kinetic-energy change: dimensionless shape ``f`` and ``delta_k`` [J]."""

    f: float
    delta_k: float


@dataclass(frozen=True)
class VarianceShift:
    """Kinetic-energy variance change.

    ``dvar_paper`` is the leading-order closed form ``3 k0 delta_k`` [J^2].
    ``dvar_oracle_ratio`` is the Gaussian-moment (Wick) value divided by
    ``dvar_paper``; ``None`` unless an oracle value was supplied.
    """

    dvar_paper: float
    dvar_oracle_ratio: float | None = None


def bogoliubov(r, theta):
    _, _, x = _reduced(r, theta)
    return BogoliubovPair(c=_out(np.cosh(x)), s=_out(np.sinh(x)))


def mean_photons(r, theta, n_th):
    """Photon number ``sinh^2(r theta) (1 + 2 n_th) + n_th`` of the squeezed thermal field."""
    _, _, x = _reduced(r, theta)
    n_th = _occupancy(n_th)
    return _out(np.sinh(x) ** 2 * (1.0 + 2.0 * n_th) + n_th)


def kick_coefficients(r, theta):
    r, theta, x = _reduced(r, theta)
    grow = np.exp(x)
    decay = np.exp(-x)
    s2 = np.sin(2.0 * theta)
    cos2 = np.cos(2.0 * theta)
    c1 = 2.0 * grow * s2 - r * (1.0 - grow * cos2)
    c2 = 2.0 * (1.0 - decay * cos2) - r * decay * s2
    return KickCoefficients(c1=_out(c1), c2=_out(c2), denom=_out(r * r + 4.0))


def _shift(f, n_th, eps_kick):
    n_th = _occupancy(n_th)
    eps_kick = np.asarray(eps_kick, dtype=float)
    if np.any(eps_kick <= 0):
        raise ValidationError("eps_kick", "must be > 0")
    return EnergyShift(f=_out(f), delta_k=_out(eps_kick * (1.0 + 2.0 * n_th) * f))


def mean_kinetic_shift(r, theta, n_th, eps_kick):
    """Change of the mean kinetic energy after a flight of phase ``theta``.

    At ``r = 0`` the shape reduces to ``sin(theta)**2``.
    """
    k = kick_coefficients(r, theta)
    f = (np.asarray(k.c1) ** 2 + np.asarray(k.c2) ** 2) / np.asarray(k.denom) ** 2
    return _shift(f, n_th, eps_kick)


def _resonant_phase(n):
    n_arr = np.asarray(n)
    if np.any(n_arr < 1) or np.any(np.asarray(n_arr, dtype=float) != np.round(n_arr)):
        raise ValidationError("n", "must be an integer >= 1")
    return np.pi * np.asarray(n_arr, dtype=float)


def resonant_shift(r, n, n_th, eps_kick):
    """Mean kinetic-energy change for the resonant flight ``theta = pi n``.

    Here the oscillating parts of the kick cancel and only the squeezing
    growth (``e^{r theta} - 1``) and decay (``1 - e^{-r theta}``) survive.
    """
    theta = _resonant_phase(n)
    r, theta, x = _reduced(r, theta)
    grow = np.expm1(x)
    decay = -np.expm1(-x)
    f = (r * r * grow**2 + 4.0 * decay**2) / (r * r + 4.0) ** 2
    return _shift(f, n_th, eps_kick)


def small_squeeze_limit(r, n, n_th, eps_kick):
    """Leading-order resonant shift ``eps (1 + 2 n_th) (r theta)^2 / (r^2 + 4)``.

    Only valid for ``r * pi * n < 0.1``; the relative error of the
    approximation is first order in ``r * theta``.
    """
    theta = _resonant_phase(n)
    r, theta, x = _reduced(r, theta)
    if np.any(x >= SMALL_SQUEEZE_BOUND):
        raise ValidationError(
            "r", f"small-squeeze limit needs r*theta < {SMALL_SQUEEZE_BOUND:g}, got {np.max(x):.6g}"
        )
    return _shift(x * x / (r * r + 4.0), n_th, eps_kick)


def variance_shift_paper(r, theta, n_th, eps_kick, k0, oracle_dvar=None):
    """Leading-order variance change ``3 k0 eps_kick (1 + 2 n_th) f``.

    Pass ``oracle_dvar`` (for instance from
    :func:`casimirkick.propagator.kinetic_moments`) to populate the ratio.
    """
    k0 = np.asarray(k0, dtype=float)
    if np.any(k0 <= 0):
        raise ValidationError("k0", "must be > 0")
    shift = mean_kinetic_shift(r, theta, n_th, eps_kick)
    dvar = 3.0 * k0 * np.asarray(shift.delta_k)
    ratio = None
    if oracle_dvar is not None:
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = _out(np.asarray(oracle_dvar, dtype=float) / dvar)
    return VarianceShift(dvar_paper=_out(dvar), dvar_oracle_ratio=ratio)
