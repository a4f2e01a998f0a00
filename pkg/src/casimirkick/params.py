"""Physical inputs, constants and reduction to dimensionless groups.

Everything downstream works in units where time is measured in ``1/omega``,
lengths in the electron's initial position spread ``sigma_x`` and momenta in
``hbar/sigma_x``.  Energies carried by :class:`DimensionlessGroups` stay in
joules so that closed-form results can be reported in SI directly.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .exceptions import ValidationError

__all__ = [
    "PhysicalConstants",
    "CODATA",
    "CavityConfig",
    "ElectronConfig",
    "DimensionlessGroups",
    "coupling_g",
    "thermal_occupancy",
    "flight_time",
    "resonance_flight_times",
    "reduce",
]


def _check(name, value, *, positive=False, nonnegative=False):
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise ValidationError(name, f"expected a number, got {value!r}") from None
    if not math.isfinite(value):
        raise ValidationError(name, f"must be finite, got {value!r}")
    if positive and value <= 0.0:
        raise ValidationError(name, f"must be > 0, got {value!r}")
    if nonnegative and value < 0.0:
        raise ValidationError(name, f"must be >= 0, got {value!r}")
    return value


@dataclass(frozen=True)
class PhysicalConstants:
    """SI constants (CODATA 2018 values), immutable."""

    hbar: float = 1.054571817e-34
    e_charge: float = 1.602176634e-19
    m_electron: float = 9.1093837015e-31
    eps0: float = 8.8541878128e-12
    k_boltzmann: float = 1.380649e-23
    c_light: float = 299792458.0

    def __post_init__(self):
        for name in ("hbar", "e_charge", "m_electron", "eps0", "k_boltzmann", "c_light"):
            _check(name, getattr(self, name), positive=True)


CODATA = PhysicalConstants()


@dataclass(frozen=True)
class CavityConfig:
    """Single cavity mode driven parametrically.

    Attributes:
        omega: mode angular frequency [rad/s].
        volume: mode volume [m^3].
        lambda_sq: parametric squeezing rate [1/s].
        temperature: initial field temperature [K].
        n_th: optional thermal occupancy; overrides ``temperature`` when set.
    """

    omega: float
    volume: float
    lambda_sq: float = 0.0
    temperature: float = 0.0
    n_th: float | None = None

    def __post_init__(self):
        _check("omega", self.omega, positive=True)
        _check("volume", self.volume, positive=True)
        _check("lambda_sq", self.lambda_sq, nonnegative=True)
        _check("temperature", self.temperature, nonnegative=True)
        if self.n_th is not None:
            _check("n_th", self.n_th, nonnegative=True)


@dataclass(frozen=True)
class ElectronConfig:
    """Electron crossing the cavity.

    Attributes:
        v0: mean initial speed [m/s].
        sigma_x: initial position spread [m].
        flight_length: length of the traversal ``L`` [m].
    """

    v0: float
    flight_length: float
    sigma_x: float = 1e-6

    def __post_init__(self):
        _check("v0", self.v0, positive=True)
        _check("sigma_x", self.sigma_x, positive=True)
        _check("flight_length", self.flight_length, positive=True)


@dataclass(frozen=True)
class DimensionlessGroups:
    """Reduced parameters every formula is evaluated in.

    Attributes:
        r: squeezing rate over mode frequency, ``lambda/omega``.
        theta: flight phase ``omega * tau``.
        n_th: thermal photon number of the initial field.
        eps_kick: kick energy scale ``g^2 / (2 m omega^2)`` [J].
        k0: initial mean kinetic energy ``m v0^2 / 2`` [J].
        g_over: coupling in natural units, ``g sigma_x / (hbar omega)``.
        recoil: free-flight rate ``hbar / (m sigma_x^2 omega)``; the
            position row of the equations of motion reads ``dx/dt = recoil * p``.
        hbar_omega: photon energy [J], converts natural energies to SI.

    In natural units the kinetic energy is ``K / (hbar omega) = recoil * p^2 / 2``
    so ``eps_kick = hbar_omega * recoil * g_over**2 / 2`` for groups built by
    :func:`reduce` or :meth:`natural`.
    """

    r: float
    theta: float
    n_th: float
    eps_kick: float
    k0: float
    g_over: float = 0.0
    recoil: float = 1.0
    hbar_omega: float = 1.0

    def __post_init__(self):
        _check("r", self.r, nonnegative=True)
        _check("theta", self.theta, nonnegative=True)
        _check("n_th", self.n_th, nonnegative=True)
        _check("eps_kick", self.eps_kick, positive=True)
        _check("k0", self.k0, positive=True)
        _check("g_over", self.g_over, nonnegative=True)
        _check("recoil", self.recoil, positive=True)
        _check("hbar_omega", self.hbar_omega, positive=True)

    @classmethod
    def natural(cls, r, theta, n_th=0.0, *, g_over=1e-3, recoil=1.0, p_mean=100.0):
        """Self-consistent groups with ``hbar_omega = 1`` (energies in photon units)."""
        g_over = _check("g_over", g_over, positive=True)
        recoil = _check("recoil", recoil, positive=True)
        p_mean = _check("p_mean", p_mean, positive=True)
        return cls(
            r=r,
            theta=theta,
            n_th=n_th,
            eps_kick=0.5 * recoil * g_over**2,
            k0=0.5 * recoil * p_mean**2,
            g_over=g_over,
            recoil=recoil,
            hbar_omega=1.0,
        )

    @property
    def p_mean(self):
        """Initial mean momentum in units of ``hbar / sigma_x``."""
        return math.sqrt(2.0 * self.k0 / (self.recoil * self.hbar_omega))


def coupling_g(cavity, consts=CODATA):
    """Electron-photon coupling ``g = e * sqrt(hbar omega / (2 V eps0))`` [J/m]."""
    omega = _check("omega", cavity.omega, positive=True)
    volume = _check("volume", cavity.volume, positive=True)
    return consts.e_charge * math.sqrt(consts.hbar * omega / (2.0 * volume * consts.eps0))


def thermal_occupancy(omega, temperature, consts=CODATA):
    """Bose-Einstein occupancy ``1 / (exp(hbar omega / kT) - 1)``.

    Returns exactly 0 at ``T = 0`` and underflows gracefully to 0 for very
    cold modes instead of overflowing ``exp``.
    """
    omega = _check("omega", omega, positive=True)
    temperature = _check("temperature", temperature, nonnegative=True)
    if temperature == 0.0:
        return 0.0
    x = consts.hbar * omega / (consts.k_boltzmann * temperature)
    if x > 700.0:
        return math.exp(-x)
    return 1.0 / math.expm1(x)


def flight_time(electron):
    """Time ``tau = L / v0`` spent inside the cavity [s]."""
    return electron.flight_length / electron.v0


def resonance_flight_times(omega, n_max):
    """Flight times ``pi n / omega`` for ``n = 1..n_max``.

    At these times the drive phase ``2 omega tau`` is a multiple of ``2 pi``
    and the vacuum kick averages out.
    """
    omega = _check("omega", omega, positive=True)
    if int(n_max) != n_max or n_max < 1:
        raise ValidationError("n_max", f"must be an integer >= 1, got {n_max!r}")
    return [math.pi * n / omega for n in range(1, int(n_max) + 1)]


def reduce(cavity, electron, consts=CODATA):
    """Map SI configuration onto :class:`DimensionlessGroups`.

    When both a temperature and an explicit ``n_th`` are supplied the
    occupancy wins and a :class:`UserWarning` is emitted.
    """
    omega = cavity.omega
    m = consts.m_electron
    g = coupling_g(cavity, consts)
    if cavity.n_th is not None:
        if cavity.temperature > 0.0:
            warnings.warn(
                "both temperature and n_th given; using n_th "
                f"= {cavity.n_th!r} and ignoring temperature = {cavity.temperature!r}",
                UserWarning,
                stacklevel=2,
            )
        n_th = float(cavity.n_th)
    else:
        n_th = thermal_occupancy(omega, cavity.temperature, consts)
    return DimensionlessGroups(
        r=cavity.lambda_sq / omega,
        theta=omega * flight_time(electron),
        n_th=n_th,
        eps_kick=g * g / (2.0 * m * omega * omega),
        k0=0.5 * m * electron.v0 * electron.v0,
        g_over=g * electron.sigma_x / (consts.hbar * omega),
        recoil=consts.hbar / (m * electron.sigma_x**2 * omega),
        hbar_omega=consts.hbar * omega,
    )
