"""
Numerical checks of the inequalities and identities of radial harmonic
analysis on a model space.

Every check returns a :class:`VerificationReport`.  Its ``passed`` flag is
recomputed from the recorded metrics and rules, never set by hand.
Vanishing-type uncertainty statements are checked in contrapositive form:
nonzero test functions must satisfy the complementary inequality.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import oracles
from .eigenfunctions import phi_table
from .fitting import FitError, fit_gaussian_decay, fit_stretched_decay
from .kernels import heat_kernel, heat_l2_norm, schrodinger_evolve
from .model_space import ModelSpace
from .quadrature import panel_breaks, panel_grid
from .spectral_measure import LAMBDA_MIN, PlancherelData
from .transforms import (
    LineFunction,
    RadialFunction,
    SpectralFunction,
    abel_transform,
    bump,
    convolve_radial,
    euclidean_ft,
    gaussian,
    inverse_euclidean_ft,
    line_grid,
    lp_norm,
    spectral_l2,
    spherical_ft,
    tail_ratio,
    weighted_l2,
)

__all__ = [
    "Rule",
    "VerificationReport",
    "CHECKS",
    "default_family",
    "verify_plancherel",
    "verify_eigen_bounds",
    "verify_young",
    "verify_smoothing",
    "verify_heisenberg",
    "verify_heat_norm_asymptotics",
    "verify_hausdorff_young",
    "verify_morgan_boundary",
    "verify_schrodinger_uncertainty",
    "verify_hormander_divergence",
    "verify_abel_factorization",
    "run_check",
]

_OPS = {
    "<=": lambda v, b: v <= b,
    ">=": lambda v, b: v >= b,
    "<": lambda v, b: v < b,
    ">": lambda v, b: v > b,
}


@dataclass(frozen=True)
class Rule:
    metric: str
    op: str
    bound: float

    def holds(self, metrics: dict) -> bool:
        v = metrics[self.metric]["value"]
        return bool(np.isfinite(v)) and _OPS[self.op](v, self.bound)


@dataclass
class VerificationReport:
    """Outcome of one named check.

    ``metrics`` maps a name to ``{"value": float, "formula": str}``;
    ``tolerances`` maps a name to a :class:`Rule`.
    """

    check_name: str
    space: dict
    params: list
    metrics: dict
    tolerances: dict
    runtime_seconds: float = 0.0
    notes: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(rule.holds(self.metrics) for rule in self.tolerances.values())

    def failures(self) -> list:
        return [k for k, rule in self.tolerances.items() if not rule.holds(self.metrics)]

    def to_dict(self) -> dict:
        return {
            "check_name": self.check_name,
            "space": self.space,
            "params": self.params,
            "metrics": {k: {"value": _jsonable(v["value"]), "formula": v["formula"]} for k, v in self.metrics.items()},
            "tolerances": {k: {"metric": r.metric, "op": r.op, "bound": r.bound} for k, r in self.tolerances.items()},
            "pass": self.passed,
            "runtime_seconds": self.runtime_seconds,
            "notes": self.notes,
        }


def _jsonable(v):
    v = float(v)
    return v if math.isfinite(v) else str(v)


class _Builder:
    def __init__(self, name, space: ModelSpace):
        self.name = name
        self.space = space
        self.params = []
        self.metrics = {}
        self.rules = {}
        self.notes = []
        self.t0 = time.perf_counter()

    def metric(self, name, value, formula):
        self.metrics[name] = {"value": float(value), "formula": formula}

    def rule(self, metric, op, bound, key=None):
        self.rules[key or metric] = Rule(metric, op, float(bound))

    def done(self) -> VerificationReport:
        return VerificationReport(self.name, self.space.descriptor(), self.params, self.metrics, self.rules,
                                  time.perf_counter() - self.t0, self.notes)


def default_family(space: ModelSpace, seed: int = 0):
    """Ten radial test functions: six Gaussians and four bumps, with seeded amplitudes."""
    rng = np.random.default_rng(seed)
    amps = rng.uniform(0.5, 2.0, size=10)
    fams = []
    for amp, a in zip(amps[:6], (0.2, 0.5, 1.0, 2.0, 5.0, 10.0)):
        fams.append((f"gaussian(a={a:g})", gaussian(space, a, float(amp))))
    for amp, R in zip(amps[6:], (1.0, 2.0, 3.0, 4.0)):
        fams.append((f"bump(R={R:g})", bump(space, R, float(amp))))
    return fams


# ---------------------------------------------------------------------------


def verify_plancherel(pdata: PlancherelData, family=None, heat_times=(0.1, 1.0), tol=1e-4) -> VerificationReport:
    """Relative gap between ``||f||_2`` and ``||f_hat||`` in ``L^2(C0 |c|^{-2} d lambda)``."""
    space = pdata.space
    b = _Builder("plancherel", space)
    family = default_family(space) if family is None else family
    members = list(family) + [(f"heat(t={t:g})", heat_kernel(pdata, t)) for t in heat_times]
    gap = 0.0
    for label, f in members:
        n2 = lp_norm(space, f, 2)
        fh = spherical_ft(space, f, pdata)
        s2 = spectral_l2(pdata, fh, 0.0)
        g = 0.0 if n2 == 0 else abs(n2 - s2) / n2
        b.params.append({"function": label, "norm": n2, "spectral_norm": s2, "gap": g})
        gap = max(gap, g)
    b.metric("max_gap", gap, "max_f |‖f‖₂ − (C0∫|f̂|²|c|⁻²dλ)^½| / ‖f‖₂")
    b.rule("max_gap", "<=", tol)
    return b.done()


def verify_eigen_bounds(space: ModelSpace, lambda_sweep=(0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0),
                        imag_fractions=(0.25, 0.5, 1.0, 1.5, 2.0), r_sweep=None, slack=1e-8) -> VerificationReport:
    """Pointwise eigenfunction bounds for real and complex spectral parameters.

    * ``|phi_lambda| <= 1`` for real ``lambda``;
    * ``|phi_{xi + i eta}| <= phi_{i eta} <= phi_0 e^{|eta| r}``;
    * ``e^{(|eta| - rho) r} <= phi_{i eta} <= 1`` for ``|eta| <= rho``;
    * ``|1 - phi_lambda(r)| <= r^2 (lambda^2 + rho^2)`` for ``r <= 1``.
    """
    b = _Builder("eigen_bounds", space)
    rho = space.rho
    r = np.linspace(0.0, 40.0, 801)[1:] if r_sweep is None else np.asarray(r_sweep, dtype=float)
    lam = np.asarray(lambda_sweep, dtype=float)
    b.params.append({"lambda": lam.tolist(), "imag_over_rho": list(imag_fractions),
                     "r_min": float(r[0]), "r_max": float(r[-1]), "n_r": int(r.size)})
    real_tab = phi_table(space, lam, r, asymptotic=False)
    b.metric("max_abs_phi_real", np.abs(real_tab).max(), "max |φ_λ(r)|, λ real")
    b.rule("max_abs_phi_real", "<=", 1.0 + slack)

    etas = rho * np.asarray(imag_fractions, dtype=float)
    pure = phi_table(space, 1j * etas + 0.0, r, asymptotic=False).real
    phi0 = phi_table(space, [0.0], r, asymptotic=False)[0]
    worst_mod, worst_growth, worst_low, worst_high = -np.inf, -np.inf, -np.inf, -np.inf
    for k, eta in enumerate(etas):
        cplx = phi_table(space, lam + 1j * eta, r, asymptotic=False)
        # relative margins so that exponentially growing values compare fairly
        worst_mod = max(worst_mod, float(np.max((np.abs(cplx) - pure[k]) / pure[k])))
        worst_growth = max(worst_growth, float(np.max((pure[k] - phi0 * np.exp(eta * r)) / pure[k])))
        if eta <= rho + 1e-12:
            lower = np.exp((eta - rho) * r)
            worst_low = max(worst_low, float(np.max((lower - pure[k]) / lower)))
            worst_high = max(worst_high, float(np.max(pure[k] - 1.0)))
    b.metric("modulus_margin", worst_mod, "max (|φ_{ξ+iη}| − φ_{iη}) / φ_{iη}")
    b.metric("growth_margin", worst_growth, "max (φ_{iη} − φ₀ e^{|η|r}) / φ_{iη}")
    b.metric("strip_lower_margin", worst_low, "max (e^{(|η|−ρ)r} − φ_{iη}) / e^{(|η|−ρ)r}, |η| ≤ ρ")
    b.metric("strip_upper_margin", worst_high, "max φ_{iη} − 1, |η| ≤ ρ")
    for m in ("modulus_margin", "growth_margin", "strip_lower_margin", "strip_upper_margin"):
        b.rule(m, "<=", slack)

    rs = np.linspace(0.0, 1.0, 201)[1:]
    small = phi_table(space, lam, rs, asymptotic=False)
    mu = lam * lam + rho * rho
    ratio = np.abs(1.0 - small) / (rs[None, :] ** 2 * mu[:, None])
    b.metric("small_r_ratio_max", ratio.max(), "max |1 − φ_λ(r)| / (r²(λ²+ρ²)), r ≤ 1")
    b.rule("small_r_ratio_max", "<=", 1.0 + 1e-6)
    tiny = phi_table(space, lam, np.array([1e-3]), asymptotic=False)[:, 0]
    b.metric("small_r_ratio_at_1e-3", float(np.max(np.abs(1.0 - tiny) / (1e-6 * mu))),
             "max_λ |1 − φ_λ(10⁻³)| / (10⁻⁶(λ²+ρ²)); limit 1/(4(α+1))")
    b.metric("small_r_limit", 1.0 / (4.0 * (space.alpha + 1.0)), "1/(4(α+1))")
    return b.done()


def _random_gaussians(space, rng, count):
    out = []
    for _ in range(count):
        a = float(np.exp(rng.uniform(np.log(0.3), np.log(3.0))))
        amp = float(rng.uniform(0.5, 2.0))
        out.append((a, amp, gaussian(space, a, amp)))
    return out


def verify_young(pdata: PlancherelData, trials: int = 5, triples=((1.0, 1.0, 1.0), (2.0, 1.0, 2.0), (1.5, 1.5, 3.0)),
                 seed: int = 1, slack: float = 1e-6, tail_budget: float = 1e-4) -> VerificationReport:
    """``||f * g||_r <= ||f||_p ||g||_q`` with ``1 + 1/r = 1/p + 1/q``.

    Synthesized convolutions stop where their values reach the synthesis
    error floor; ``tail_budget`` bounds the norm share left in the last panel.
    """
    space = pdata.space
    b = _Builder("young", space)
    for p, q, r in triples:
        if abs(1.0 + 1.0 / r - 1.0 / p - 1.0 / q) > 1e-12:
            raise ValueError(f"invalid Young triple {(p, q, r)}")
    rng = np.random.default_rng(seed)
    pairs = [(_random_gaussians(space, rng, 1)[0], _random_gaussians(space, rng, 1)[0]) for _ in range(trials)]
    worst = tail = 0.0
    for (a1, m1, f), (a2, m2, g) in pairs:
        conv = convolve_radial(pdata, f, g)
        tail = max(tail, tail_ratio(space, conv, 1.0))
        for p, q, r in triples:
            lhs = lp_norm(space, conv, r, tail_budget)
            rhs = lp_norm(space, f, p) * lp_norm(space, g, q)
            ratio = lhs / rhs
            worst = max(worst, ratio)
            b.params.append({"a_f": a1, "a_g": a2, "p": p, "q": q, "r": r, "ratio": ratio})
    b.metric("max_ratio", worst, "max ‖f∗g‖_r / (‖f‖_p‖g‖_q)")
    b.rule("max_ratio", "<=", 1.0 + slack)
    h1, h2 = heat_kernel(pdata, 0.3), heat_kernel(pdata, 0.7)
    hc = convolve_radial(pdata, h1, h2)
    tail = max(tail, *(tail_ratio(space, h, 1.0) for h in (h1, h2, hc)))
    heat_ratio = lp_norm(space, hc, 1.0, tail_budget) / (lp_norm(space, h1, 1.0, tail_budget)
                                                          * lp_norm(space, h2, 1.0, tail_budget))
    b.metric("heat_pair_l1_ratio_error", abs(heat_ratio - 1.0), "|‖h_.3∗h_.7‖₁ / (‖h_.3‖₁‖h_.7‖₁) − 1|")
    b.rule("heat_pair_l1_ratio_error", "<=", 1e-4)
    semigroup = heat_kernel(pdata, 1.0, hc.r)
    near = hc.r <= 5.0
    b.metric("heat_semigroup_error", np.max(np.abs(hc.values[near] - semigroup.values[near])) / semigroup.values[0],
             "max_{r≤5} |h_.3∗h_.7 − h_1| / h_1(0)")
    b.rule("heat_semigroup_error", "<=", 1e-5)
    b.metric("max_tail_ratio", tail, "largest last-panel share of an L¹ norm")
    b.rule("max_tail_ratio", "<=", tail_budget)
    return b.done()


def _smoothed_norm(pdata, fh, t):
    """``||f * h_t||_2`` from the transform side."""
    lam = fh.lam
    w = np.exp(-2.0 * t * (lam * lam + pdata.rho**2)) * np.abs(fh.values) ** 2 * pdata.density(lam)
    return math.sqrt(pdata.C0 * fh.integrate(w))


def verify_smoothing(pdata: PlancherelData, f: RadialFunction | None = None, gamma: float = 0.8, a: float = 1.5,
                     t_sweep=None, t_extension=(2.0, 5.0, 10.0), growth_cap: float = 1.5) -> VerificationReport:
    """``sup_t t^{a/2} ||f * h_t||_2 / ||d^{gamma a} f||_2`` is finite and not growing.

    The supremum over ``t in [1e-3, 1]`` is compared with the supremum after
    extending the sweep to ``t = 10``.
    """
    space = pdata.space
    ga = gamma * a
    if ga >= space.alpha + 1.0:
        raise ValueError(f"gamma*a = {ga:g} must be below alpha + 1 = {space.alpha + 1:g}")
    b = _Builder("smoothing", space)
    f = gaussian(space, 1.0) if f is None else f
    t_sweep = np.logspace(-3, 0, 13) if t_sweep is None else np.asarray(t_sweep, dtype=float)
    weighted = weighted_l2(space, f, ga)
    if weighted == 0:
        b.metric("sup_ratio", 0.0, "sup_t t^{a/2}‖f∗h_t‖₂ / ‖d^{γa}f‖₂")
        b.metric("extension_growth", 1.0, "sup over t ≤ 10 / sup over t ≤ 1")
        b.rule("extension_growth", "<=", growth_cap)
        return b.done()
    fh = spherical_ft(space, f, pdata)
    ratios = [t ** (0.5 * a) * _smoothed_norm(pdata, fh, t) / weighted for t in t_sweep]
    ext = [t ** (0.5 * a) * _smoothed_norm(pdata, fh, t) / weighted for t in t_extension]
    for t, v in zip(list(t_sweep) + list(t_extension), ratios + ext):
        b.params.append({"t": float(t), "ratio": float(v)})
    sup = max(ratios)
    b.params.insert(0, {"gamma": gamma, "a": a, "gamma_a": ga})
    b.metric("sup_ratio", sup, "sup_{t∈[1e-3,1]} t^{a/2}‖f∗h_t‖₂ / ‖d^{γa}f‖₂")
    b.metric("extension_growth", max(sup, max(ext)) / sup, "sup_{t≤10} / sup_{t≤1}")
    b.rule("sup_ratio", "<", 1e12)
    b.rule("extension_growth", "<=", growth_cap)
    return b.done()


def verify_heisenberg(pdata: PlancherelData, a: float = 1.0, bexp: float = 1.0, gamma: float = 1.0,
                      widths=None, threshold: float = 1e-3, trend_floor: float = -0.05) -> VerificationReport:
    """``||d^{gamma a} f||^{b/(a+b)} ||(lambda^2+rho^2)^{b/2} f_hat||^{a/(a+b)} / ||f||_2`` on Gaussians."""
    space = pdata.space
    if not (a > 0 and bexp > 0):
        raise ValueError("a and b must be positive")
    if not 0.5 < gamma <= 1.0:
        raise ValueError("gamma must lie in (1/2, 1]")
    rep = _Builder("heisenberg", space)
    widths = np.logspace(-1, 2, 10) if widths is None else np.asarray(widths, dtype=float)
    ratios = []
    for c in widths:
        f = gaussian(space, float(c))
        fh = spherical_ft(space, f, pdata)
        left = weighted_l2(space, f, gamma * a)
        right = spectral_l2(pdata, fh, bexp)
        val = left ** (bexp / (a + bexp)) * right ** (a / (a + bexp)) / lp_norm(space, f, 2)
        ratios.append(val)
        rep.params.append({"c": float(c), "ratio": float(val)})
    ratios = np.array(ratios)
    half = widths.size // 2
    slope = np.polyfit(np.log(widths[half:]), np.log(ratios[half:]), 1)[0]
    rep.params.insert(0, {"a": a, "b": bexp, "gamma": gamma})
    rep.metric("min_ratio", ratios.min(), "min_c RHS(e^{-cr²}) / ‖e^{-cr²}‖₂")
    rep.metric("upper_half_log_slope", slope, "slope of log ratio vs log c over the upper half of the sweep")
    rep.rule("min_ratio", ">", threshold)
    rep.rule("upper_half_log_slope", ">=", trend_floor)
    return rep.done()


def _slope(ts, ys):
    return float(np.polyfit(np.log(ts), np.log(ys), 1)[0])


def verify_heat_norm_asymptotics(pdata: PlancherelData, small=(1e-3, 1e-1), large=(10.0, 100.0), points: int = 21,
                                 tol: float = 0.05, consistency_times=(0.05, 0.5, 5.0)) -> VerificationReport:
    """Log-log slopes of ``e^{t rho^2} ||h_t||_2`` for small and large ``t``."""
    space = pdata.space
    b = _Builder("heat_norm_asymptotics", space)
    rho2 = pdata.rho**2
    ts = np.logspace(math.log10(small[0]), math.log10(small[1]), points)
    tl = np.logspace(math.log10(large[0]), math.log10(large[1]), points)
    ns = np.array([heat_l2_norm(pdata, t) for t in ts])
    nl = np.array([heat_l2_norm(pdata, t) for t in tl])
    target_small = -(space.alpha + 1.0) / 2.0
    small_slope = _slope(ts, ns * np.exp(ts * rho2))
    large_slope = _slope(tl, nl * np.exp(tl * rho2))
    b.params.append({"small_t": list(small), "large_t": list(large), "points": points})
    b.metric("small_t_slope", small_slope, "slope of log(e^{tρ²}‖h_t‖₂) vs log t on the small-t window")
    b.metric("small_t_slope_raw", _slope(ts, ns), "slope of log ‖h_t‖₂ vs log t on the small-t window")
    b.metric("small_t_target", target_small, "−(α+1)/2")
    b.metric("small_t_error", abs(small_slope - target_small), "|small_t_slope − target|")
    b.metric("large_t_slope", large_slope, "slope of log(e^{tρ²}‖h_t‖₂) vs log t on the large-t window")
    b.metric("large_t_error", abs(large_slope + 0.75), "|large_t_slope + 3/4|")
    b.rule("small_t_error", "<=", tol)
    b.rule("large_t_error", "<=", tol)
    worst = 0.0
    for t in consistency_times:
        h = heat_kernel(pdata, t)
        worst = max(worst, abs(heat_l2_norm(pdata, t) / lp_norm(space, h, 2) - 1.0))
    b.metric("synthesis_consistency", worst, "max_t |spectral ‖h_t‖₂ / synthesized ‖h_t‖₂ − 1|")
    b.rule("synthesis_consistency", "<=", 1e-4)
    return b.done()


def verify_hausdorff_young(pdata: PlancherelData, ps=(1.0, 1.5, 2.0), family=None, slack: float = 1e-6,
                           plancherel_tol: float = 1e-4, tail_budget: float = 1e-4) -> VerificationReport:
    """``(C0 int |f_hat|^q |c|^{-2})^{1/q} <= ||f||_p``, ``1/p + 1/q = 1``."""
    space = pdata.space
    b = _Builder("hausdorff_young", space)
    if family is None:
        family = [(f"gaussian(a={a:g})", gaussian(space, a)) for a in (0.3, 1.0, 3.0)]
        family += [(f"heat(t={t:g})", heat_kernel(pdata, t)) for t in (0.1, 1.0)]
    worst = {}
    tail = 0.0
    for p in ps:
        if not 1.0 <= p <= 2.0:
            raise ValueError("p must lie in [1, 2]")
        worst[p] = 0.0
    for label, f in family:
        fh = spherical_ft(space, f, pdata)
        tail = max(tail, tail_ratio(space, f, 1.0))
        for p in ps:
            lhs_p = lp_norm(space, f, p, tail_budget)
            if p == 1.0:
                # q = inf: the supremum over lambda >= 0 includes lambda = 0
                val = max(float(np.max(np.abs(fh.values))), abs(float(fh.source(np.array([0.0]))[0])))
            else:
                q = p / (p - 1.0)
                val = (pdata.C0 * fh.integrate(np.abs(fh.values) ** q * pdata.density(fh.lam))) ** (1.0 / q)
            ratio = val / lhs_p
            b.params.append({"function": label, "p": p, "ratio": float(ratio)})
            worst[p] = max(worst[p], ratio)
    for p in ps:
        key = f"max_ratio_p{p:g}"
        b.metric(key, worst[p], f"max_f ‖f̂‖_{{L^q(C0|c|⁻²)}} / ‖f‖_p at p={p:g}")
        b.rule(key, "<=", 1.0 + slack)
    if 2.0 in worst:
        b.metric("plancherel_equality_error", abs(worst[2.0] - 1.0), "|ratio at p=2 − 1| (largest member)")
        b.rule("plancherel_equality_error", "<=", plancherel_tol)
    b.metric("max_tail_ratio", tail, "largest last-panel share of an L¹ norm")
    b.rule("max_tail_ratio", "<=", tail_budget)
    return b.done()


def _noise_floor(values, tail: float = 0.1):
    """Rounding floor of samples whose true tail is far below double precision."""
    av = np.abs(np.asarray(values))
    k = max(3, int(tail * av.size))
    return max(1e-15 * av.max(), 3.0 * float(np.median(av[-k:])))


def _spectral_samples(space, f, lo, hi, n):
    lam = np.linspace(lo, hi, n)
    return lam, spherical_ft(space, f, lam=lam).values


def verify_morgan_boundary(pdata: PlancherelData, alpha_sweep=(0.25, 1.0, 4.0), tol: float = 0.02,
                           line_tol: float = 1e-6, residual_cap: float = 1.5) -> VerificationReport:
    """Hardy case ``p = q = 2``: Gaussians ``e^{-alpha r^2}`` must satisfy ``4 alpha beta_fit <= 1``."""
    space = pdata.space
    b = _Builder("morgan_boundary", space)
    # fitter sanity on the line: e^{-a s^2} has transform sqrt(pi/a) e^{-lambda^2/4a}
    a_line = 1.0
    g = line_grid(math.sqrt(40.0 / a_line) + 2.0)
    line = LineFunction(g, g.nodes, np.exp(-a_line * g.nodes**2))
    lam_line = np.linspace(0.05, 2.0 * math.sqrt(37.0 * a_line), 600)
    G = euclidean_ft(line, lam_line).real
    fit = fit_gaussian_decay(lam_line, G, nuisance=(), floor=1e-15 * np.abs(G).max())
    b.metric("line_product_error", abs(4.0 * a_line * fit.beta - 1.0), "|4aβ_fit − 1| for e^{-as²} on ℝ")
    b.rule("line_product_error", "<=", line_tol)
    products = []
    for alpha in alpha_sweep:
        f = gaussian(space, alpha)
        top = 2.0 * math.sqrt(37.0 * alpha) + 5.0
        lam, fh = _spectral_samples(space, f, LAMBDA_MIN, top, 2000)
        floor = _noise_floor(fh)
        try:
            fit = fit_gaussian_decay(lam, fh, rel_window=(1e-15, 1e-2), nuisance=(), floor=floor,
                                     residual_cap=residual_cap)
        except FitError as exc:
            # an unusable fit cannot certify the bound, so it counts against it
            products.append(math.inf)
            b.params.append({"alpha": alpha, "fit_error": str(exc)})
            continue
        prod = 4.0 * alpha * fit.beta
        products.append(prod)
        entry = {"alpha": alpha, "beta_fit": fit.beta, "product": prod, "window": list(fit.window),
                 "residual": fit.residual, "nuisance": fit.extra}
        try:
            sfit = fit_stretched_decay(lam, fh, floor=floor)
            entry.update({"stretched_exponent": sfit.p, "stretched_beta": sfit.beta})
        except FitError as exc:
            entry["stretched_error"] = str(exc)
        b.params.append(entry)
    products = np.array(products)
    b.metric("max_product", products.max(), "max_α 4αβ_fit (inf when a fit is unusable)")
    b.metric("trend_gap_at_largest_alpha", abs(1.0 - products[-1]), "|1 − 4αβ_fit| at the largest α")
    diffs = np.diff(products[np.isfinite(products)])
    b.metric("monotone_trend", float(np.all(diffs >= 0) or np.all(diffs <= 0)),
             "1 if 4αβ_fit is monotone along the sweep")
    b.rule("max_product", "<=", 1.0 + tol)
    return b.done()


def _line_schrodinger_beta(space, a, t0):
    """Fit ``|u(t0)|`` for free Schrodinger data ``e^{-a s^2}`` on the line by quadrature."""
    beta_exact = oracles.line_schrodinger_rate(a, t0)
    s_max = math.sqrt(40.0 / beta_exact) + 2.0
    lam_top = 2.0 * math.sqrt(40.0 * a)
    width = min(0.5, 6.0 / (s_max + 2.0 * t0 * lam_top))
    lgrid = panel_grid(panel_breaks(0.0, lam_top, width), 16)
    # transform of e^{-a s^2} is sqrt(pi/a) e^{-lambda^2/4a}; evolve and invert
    F = math.sqrt(math.pi / a) * np.exp(-lgrid.nodes**2 / (4.0 * a)) * np.exp(-1j * t0 * lgrid.nodes**2)
    spec = SpectralFunction(space, lgrid, lgrid.nodes, F)
    s = np.linspace(0.0, s_max, 400)
    u = inverse_euclidean_ft(spec, s).values
    fit = fit_gaussian_decay(s, u, nuisance=(), floor=1e-15 * np.abs(u).max(), peaks=False)
    return fit.beta, beta_exact


def verify_schrodinger_uncertainty(pdata: PlancherelData, a_sweep=(0.5, 1.0, 2.0), t0_sweep=(0.1, 0.2, 0.4),
                                   tol: float = 0.02, line_tol: float = 1e-6) -> VerificationReport:
    """Gaussian data ``e^{-a r^2}``: ``16 a beta_fit t0^2 <= 1`` where ``|u(t0, r)| ~ e^{-beta r^2}``."""
    space = pdata.space
    b = _Builder("schrodinger_uncertainty", space)
    beta_fit, beta_exact = _line_schrodinger_beta(space, 1.0, 0.2)
    b.metric("line_beta_error", abs(beta_fit / beta_exact - 1.0), "|β_fit/β_exact − 1|, line model a=1, t0=0.2")
    b.rule("line_beta_error", "<=", line_tol)
    rows = []
    for a in a_sweep:
        f = gaussian(space, a)
        for t0 in t0_sweep:
            u = schrodinger_evolve(pdata, f, t0)
            au = np.abs(u.values)
            fit = fit_gaussian_decay(u.r, au, nuisance=("linear",), floor=_noise_floor(au), peaks=False,
                                     x_min=0.5)
            prod = 16.0 * a * fit.beta * t0 * t0
            rows.append((a * t0, prod))
            b.params.append({"a": a, "t0": t0, "beta_fit": fit.beta, "product": prod,
                             "line_model_product": 16.0 * a * oracles.line_schrodinger_rate(a, t0) * t0 * t0,
                             "window": list(fit.window), "residual": fit.residual})
    rows.sort()
    prods = np.array([p for _, p in rows])
    b.metric("max_product", prods.max(), "max 16 a β_fit t0²")
    b.metric("trend_violations", float(np.sum(np.diff(prods) < -1e-9)), "decreases of the product as a·t0 grows")
    b.rule("max_product", "<=", 1.0 + tol)
    b.rule("trend_violations", "<=", 0.0)
    return b.done()


def _cut_at_floor(values, rel, x):
    """Zero ``values`` beyond the first ``x`` past the peak where they reach the floor."""
    floor = max(rel * values.max(), _noise_floor(values))
    ipk = int(np.argmax(values))
    below = (values <= floor) & (x >= x[ipk])
    out = values.copy()
    if below.any():
        out[x >= x[below].min()] = 0.0
    return out


def verify_hormander_divergence(pdata: PlancherelData, f: RadialFunction | None = None,
                                S_sweep=(1.0, 2.0, 4.0, 8.0), growth_min: float = 1.5,
                                noise: float = 1e-14) -> VerificationReport:
    """Partial integrals ``I(S) = int_{|s|<=S} int |Rf(s)| |f_hat(lambda)| e^{lambda |s|} |c|^{-2}``.

    ``Rf`` and ``f_hat`` are cut off where they first drop below their
    noise floor (at least ``noise`` times the peak): past that point the
    samples are rounding error, which ``e^{lambda |s|}`` would amplify.  The
    integrals must grow without plateau.
    """
    space = pdata.space
    b = _Builder("hormander_divergence", space)
    f = heat_kernel(pdata, 0.5) if f is None else f
    if np.any(np.real(f.values) < -1e-8 * np.abs(f.values).max()):
        raise ValueError("the divergence check needs a nonnegative function")
    S_sweep = np.asarray(S_sweep, dtype=float)
    if f.is_zero():
        b.notes.append("vanishing input")
        b.metric("last_growth_ratio", 0.0, "I(S_last) / I(S_prev)")
        return b.done()
    s_grid = line_grid(float(S_sweep.max()), width=0.25)
    Rf = _cut_at_floor(np.abs(abel_transform(pdata, f, s_grid).values), noise, np.abs(s_grid.nodes))
    lgrid = pdata.quadrature()
    fh = _cut_at_floor(np.abs(spherical_ft(space, f, lam=lgrid.nodes).values), noise, lgrid.nodes)
    inner_w = lgrid.weights * fh * pdata.density(lgrid.nodes)
    inner = np.exp(np.outer(np.abs(s_grid.nodes), lgrid.nodes)) @ inner_w
    partials = []
    for S in S_sweep:
        mask = np.abs(s_grid.nodes) <= S + 1e-12
        partials.append(float(np.sum((s_grid.weights * Rf * inner)[mask])))
    partials = np.array(partials)
    for S, v in zip(S_sweep, partials):
        b.params.append({"S": float(S), "partial": float(v)})
    b.metric("min_increment", float(np.min(np.diff(partials) / partials[:-1])), "min relative increase I(S_k+1)/I(S_k) − 1")
    b.metric("last_growth_ratio", partials[-1] / partials[-2], "I(S_last) / I(S_prev)")
    b.rule("min_increment", ">", 0.0)
    b.rule("last_growth_ratio", ">=", growth_min)
    return b.done()


def verify_abel_factorization(pdata: PlancherelData, family=None, heat_times=(0.25, 1.0), tol: float = 1e-5) -> VerificationReport:
    """``F(Rf) = f_hat`` on the line and the closed form of the Abel image of ``h_t``."""
    space = pdata.space
    b = _Builder("abel_factorization", space)
    if family is None:
        family = [(f"gaussian(a={a:g})", gaussian(space, a)) for a in (0.3, 1.0, 3.0)]
    members = list(family) + [(f"heat(t={t:g})", heat_kernel(pdata, t)) for t in heat_times]
    gap, lip = 0.0, 0.0
    heat_gap = 0.0
    for label, f in members:
        Rf = abel_transform(pdata, f)
        lam = np.linspace(0.0, 15.0, 151)
        G = euclidean_ft(Rf, lam)
        fh = spherical_ft(space, f, lam=lam).values
        g = float(np.max(np.abs(G - fh)) / np.max(np.abs(fh)))
        gap = max(gap, g)
        line_norm = math.sqrt(float(Rf.grid.integrate(np.abs(Rf.values) ** 2)))
        lip = max(lip, lp_norm(space, f, 2) / line_norm)
        entry = {"function": label, "gap": g}
        if label.startswith("heat"):
            t = float(label[7:-1])
            hg = float(np.max(np.abs(Rf.values - oracles.line_heat_abel(t, pdata.rho, Rf.s))))
            heat_gap = max(heat_gap, hg)
            entry["closed_form_gap"] = hg
        b.params.append(entry)
    b.metric("max_factorization_gap", gap, "max_f sup_λ |ℱ(Rf)(λ) − f̂(λ)| / sup|f̂|")
    b.metric("heat_closed_form_gap", heat_gap, "max_t sup_s |Rh_t(s) − e^{-tρ²}(4πt)^{-1/2}e^{-s²/4t}|")
    b.metric("norm_ratio", lip, "max_f ‖f‖₂ / ‖Rf‖_{L²(ℝ)}")
    b.rule("max_factorization_gap", "<=", tol)
    b.rule("heat_closed_form_gap", "<=", tol)
    return b.done()


def _space_level(fn):
    def run(pdata, **kw):
        return fn(pdata.space, **kw)

    return run


CHECKS = {
    "plancherel": verify_plancherel,
    "eigen_bounds": _space_level(verify_eigen_bounds),
    "young": verify_young,
    "smoothing": verify_smoothing,
    "heisenberg": verify_heisenberg,
    "heat_norm_asymptotics": verify_heat_norm_asymptotics,
    "hausdorff_young": verify_hausdorff_young,
    "morgan_boundary": verify_morgan_boundary,
    "schrodinger_uncertainty": verify_schrodinger_uncertainty,
    "hormander_divergence": verify_hormander_divergence,
    "abel_factorization": verify_abel_factorization,
}


def run_check(name: str, pdata: PlancherelData, overrides: dict | None = None) -> VerificationReport:
    """Run a check by name; ``overrides`` are passed as keyword arguments."""
    if name not in CHECKS:
        raise KeyError(f"unknown check {name!r}; choose from {', '.join(CHECKS)}")
    return CHECKS[name](pdata, **(overrides or {}))
