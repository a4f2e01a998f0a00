"""Cross-oracle validation suite: closed forms vs ODE propagator vs Fock oracle.

Every check returns a :class:`CheckResult` with the measured value and the
bound it was held to.  Bounds are fixed; loosening the integrator tolerance
makes checks fail rather than moving the goalposts.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, replace

import numpy as np

from . import analytic, fockoracle, propagator
from .config import Axis, SweepSpec
from .exceptions import CasimirKickError
from .propagator import CANONICAL, GaussianMoments, ModelFlags
from .sweep import columns, format_csv, run_sweep

__all__ = ["CheckResult", "run_all", "CHECKS"]

SEED = 20240601


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    measured: float
    bound: float
    detail: str = ""

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        text = f"{status} {self.name} measured={self.measured:.6g} bound={self.bound:.6g}"
        return f"{text} {self.detail}" if self.detail else text

    def as_dict(self):
        d = asdict(self)
        for k in ("measured", "bound"):
            if not math.isfinite(d[k]):
                d[k] = str(d[k])
        return d


def _at(groups, r=None, theta=None, n_th=None, g_over=None):
    changes = {k: v for k, v in (("r", r), ("theta", theta), ("n_th", n_th)) if v is not None}
    if g_over is not None:
        changes["g_over"] = g_over
        changes["eps_kick"] = 0.5 * groups.hbar_omega * groups.recoil * g_over**2
    return replace(groups, **changes)


def check_vacuum_reduction(cfg, groups):
    theta = np.random.default_rng(SEED).uniform(0.0, 8.0 * np.pi, 1000)
    f = analytic.mean_kinetic_shift(0.0, theta, 0.0, 1.0).f
    err = float(np.max(np.abs(f - np.sin(theta) ** 2)))
    return CheckResult("vacuum_reduction", err < 1e-12, err, 1e-12)


def check_resonant_null(cfg, groups):
    worst = 0.0
    for n in range(1, 11):
        an = analytic.mean_kinetic_shift(0.0, np.pi * n, groups.n_th, groups.eps_kick).delta_k
        g = _at(groups, r=0.0, theta=np.pi * n)
        tm = propagator.propagate(CANONICAL, g, tol=cfg.tol, check=False)
        rep = propagator.kinetic_moments(tm, GaussianMoments.thermal(g), g)
        worst = max(worst, abs(an) / groups.eps_kick, abs(rep.delta_k) / groups.eps_kick)
    return CheckResult("resonant_null", worst < 1e-12, worst, 1e-12, "max |delta_k|/eps_kick, n=1..10")


def _oracle_grid(cfg, groups, n_r=20, n_theta=20, n_values=(0.0, 1.0, 5.0)):
    """Worst closed-form vs propagator mismatch and worst commutator residual."""
    thetas = np.linspace(0.0, 4.0 * np.pi, n_theta)
    worst = 0.0
    worst_res = 0.0
    for r in np.linspace(0.0, 0.2, n_r):
        g = _at(groups, r=float(r))
        tms = propagator.propagate_many(CANONICAL, g, thetas, tol=cfg.tol, check=False)
        for tm in tms:
            worst_res = max(worst_res, propagator.commutator_residual(tm))
            for n_th in n_values:
                gn = _at(g, theta=tm.t, n_th=n_th)
                sim = propagator.kinetic_moments(tm, GaussianMoments.thermal(gn), gn).delta_k
                an = analytic.mean_kinetic_shift(r, tm.t, n_th, gn.eps_kick).delta_k
                worst = max(worst, abs(sim - an) / (gn.eps_kick * (1.0 + 2.0 * n_th)))
    return worst, worst_res


def check_oracle_agreement(cfg, groups):
    worst, _ = _oracle_grid(cfg, groups)
    return CheckResult("oracle_agreement", worst <= 1e-7, worst, 1e-7, "20x20 (r, theta) grid, n_th in {0, 1, 5}")


def check_photon_number_law(cfg, groups):
    worst = 0.0
    detail = ""
    n_values = sorted({0.0, 1.0, 2.0, float(groups.n_th)})
    for s in (0.25, 0.5, 1.0):
        for n_th in n_values:
            exact = (n_th + 0.5) * math.cosh(2.0 * s) - 0.5
            try:
                if cfg.fock_dim is not None:
                    state = fockoracle.evolve_squeeze(fockoracle.thermal_density(n_th, cfg.fock_dim), s)
                    mean_n = fockoracle.photon_stats(state)[0]
                else:
                    mean_n = fockoracle.converged_state(n_th, s).mean_n
            except CasimirKickError as exc:
                return CheckResult("photon_number_law", False, math.inf, 1e-5, f"truncation failure: {exc}")
            err = abs(mean_n - exact)
            if err >= worst:
                worst, detail = err, f"worst at lambda*t={s}, n_th={n_th:g}"
    return CheckResult("photon_number_law", worst < 1e-5, worst, 1e-5, detail)


def check_fock_invariants(cfg, groups):
    dim = cfg.fock_dim or 120
    worst = 0.0
    moment_err = 0.0
    try:
        for n_th in (0.0, 1.0):
            state = fockoracle.evolve_squeeze(fockoracle.thermal_density(n_th, dim), 0.5)
            _, a_sq, _ = fockoracle.photon_stats(state)
            k = np.arange(1, dim)
            a_mean = abs(np.sum(np.sqrt(k) * state.rho[k - 1, k]))
            worst = max(
                worst,
                state.trace_error(),
                state.hermiticity_error(),
                max(0.0, -state.min_eigenvalue()),
                a_mean,
            )
            moment_err = max(moment_err, abs(a_sq - (n_th + 0.5) * math.sinh(1.0)))
    except CasimirKickError as exc:
        return CheckResult("fock_invariants", False, math.inf, 1e-8, f"truncation failure: {exc}")
    ok = worst < 1e-8 and moment_err < 1e-5
    return CheckResult(
        "fock_invariants", ok, worst, 1e-8, f"trace/Hermiticity/positivity/<a>; <a^2> error {moment_err:.3e} (bound 1e-05)"
    )


def check_thermal_enhancement(cfg, groups):
    rng = np.random.default_rng(SEED + 1)
    r = rng.uniform(0.0, 0.2, 100)
    theta = rng.uniform(0.1, 4.0 * np.pi, 100)
    base = analytic.mean_kinetic_shift(r, theta, 0.0, groups.eps_kick).delta_k
    worst = 0.0
    for n_th in (0.5, 1.0, 5.0):
        hot = analytic.mean_kinetic_shift(r, theta, n_th, groups.eps_kick).delta_k
        worst = max(worst, float(np.max(np.abs(hot / base / (1.0 + 2.0 * n_th) - 1.0))))
    snr = []
    for n_th in (0.0, 1.0, 5.0):
        shift = analytic.mean_kinetic_shift(0.1, 2.0, n_th, groups.eps_kick).delta_k
        snr.append(shift / math.sqrt(analytic.variance_shift_paper(0.1, 2.0, n_th, groups.eps_kick, groups.k0).dvar_paper))
    grows = all(b > a for a, b in zip(snr, snr[1:]))
    ok = worst < 1e-14 and grows
    return CheckResult("thermal_enhancement", ok, worst, 1e-14, f"snr increasing in n_th: {grows}")


def small_squeeze_slope(n=1, points=21):
    x = np.logspace(-3, -2, points)
    r = x / (np.pi * n)
    dk = analytic.resonant_shift(r, n, 0.0, 1.0).delta_k
    return float(np.polyfit(np.log(x), np.log(dk), 1)[0])


def check_small_squeeze_slope(cfg, groups):
    slope = small_squeeze_slope()
    dev = abs(slope - 2.0)
    return CheckResult("small_squeeze_slope", dev <= 0.01, dev, 0.01, f"slope={slope:.6f}")


def check_symplectic(cfg, groups):
    _, worst = _oracle_grid(cfg, groups, n_values=())
    for n in range(1, 11):
        tm = propagator.propagate(CANONICAL, _at(groups, r=0.0, theta=np.pi * n), tol=cfg.tol, check=False)
        worst = max(worst, propagator.commutator_residual(tm))
    for r, theta in ((0.05, 2.0 * np.pi), (0.2, 4.0 * np.pi)):
        for flags in (ModelFlags(rwa=False), ModelFlags(backaction=True)):
            tm = propagator.propagate(flags, _at(groups, r=r, theta=theta), tol=cfg.tol, check=False)
            worst = max(worst, propagator.commutator_residual(tm))
    return CheckResult("symplectic_integrity", worst < 1e-7, worst, 1e-7)


def variance_ratios(groups, tol=1e-9, narrowing=100.0):
    ratios = []
    for r in np.linspace(0.02, 0.2, 10):
        for theta in np.linspace(0.4, 4.0 * np.pi, 10):
            g = _at(groups, r=float(r), theta=float(theta))
            ratios.append(propagator.variance_adjudication(g, tol=tol, narrowing=narrowing).dvar_oracle_ratio)
    return np.array(ratios)


def check_variance_constancy(cfg, groups):
    ratios = variance_ratios(groups, cfg.tol, cfg.narrowing)
    spread = float((ratios.max() - ratios.min()) / abs(ratios.mean()))
    return CheckResult(
        "variance_ratio_constancy", spread < 0.01, spread, 0.01, f"wick/closed-form ratio = {ratios.mean():.8f}"
    )


def backaction_slope(groups, tol=1e-9, g_values=(1e-3, 2e-3, 4e-3)):
    devs = []
    for g_over in g_values:
        g = _at(groups, g_over=g_over)
        audit = propagator.approximation_audit(g, tol=tol)
        devs.append(audit.dev_k["backaction_on"])
    return float(np.polyfit(np.log(g_values), np.log(devs), 1)[0])


def check_backaction_scaling(cfg, groups):
    g = _at(groups, r=0.05, theta=2.0 * np.pi)
    slope = backaction_slope(g, cfg.tol)
    dev = abs(slope - 2.0)
    return CheckResult("backaction_scaling", dev < 0.05, dev, 0.05, f"slope={slope:.6f}")


def check_determinism(cfg, groups):
    spec = cfg.sweep or SweepSpec(Axis("theta", 0.0, 4.0 * np.pi, 20), Axis("r", 0.0, 0.2, 20))
    local = replace(cfg, sweep=spec)
    texts = {w: format_csv(run_sweep(local, workers=w), columns(spec), local) for w in (1, 4)}
    same = texts[1] == texts[4]
    return CheckResult("sweep_determinism", same, 0.0 if same else 1.0, 0.0, "workers 1 vs 4")


CHECKS = (
    check_vacuum_reduction,
    check_resonant_null,
    check_oracle_agreement,
    check_photon_number_law,
    check_fock_invariants,
    check_thermal_enhancement,
    check_small_squeeze_slope,
    check_symplectic,
    check_variance_constancy,
    check_backaction_scaling,
    check_determinism,
)


def run_all(cfg, checks=CHECKS):
    groups = cfg.groups
    results = []
    for check in checks:
        try:
            results.append(check(cfg, groups))
        except CasimirKickError as exc:
            name = check.__name__.removeprefix("check_")
            results.append(CheckResult(name, False, math.nan, math.nan, f"{type(exc).__name__}: {exc}"))
    return results
