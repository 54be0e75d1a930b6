"""Randomized checks of the divided-difference and interpolation inequalities."""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from functools import lru_cache

import numpy as np

from ..bestapprox import remez_discrete
from ..corpus import ModulusFunction, check_phi_membership, corpus_lookup
from ..divdiff import NewtonForm, divided_difference, divided_difference_bound, newton_hermite
from ..errors import ConfigError, ConvergenceError, DomainError, PreconditionError
from ..functionals import lambda_pqr, lambda_r
from ..knots import KnotSet, Interval, d_pq, first_violation, q_set, separation
from ..quadrature import DEFAULT_QUAD
from ..smoothness import modulus_curve, phi_from_omega
from .baselines import load_baselines, lookup
from .config import TrialConfig
from .report import Row, VerificationReport, score
from .sampling import (distinct_values, expand_identifier, function_pool, preset_for,
                       sample_knots, sample_modulus, trial_rng)

ZERO_TOL = 1e-9
KNOT_TOL = 1e-8
_EPS = np.finfo(float).eps

SECTION5_FUNCTIONS = ("exp", "affine(3,0,sin)", "abs(0.5,{r}+0.5)", "tpow(0.3,{r}+1)",
                      "x^{m}", "affine(2,-1,exp)")


@lru_cache(maxsize=64)
def _pool(functions: tuple, m: int, r: int, need: int):
    return function_pool(functions, m, r, need)


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("DIVLAB_THREADS", "1")))
    except ValueError:
        raise ConfigError("DIVLAB_THREADS must be an integer") from None


def _map(fn, cfg, count: int) -> list:
    """Apply ``fn(cfg, i)`` for ``i < count``; results in index order."""
    threads = _threads()
    if threads == 1 or count < 2:
        return [fn(cfg, i) for i in range(count)]
    with ProcessPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, [cfg] * count, range(count), chunksize=max(1, count // (8 * threads))))


# ---------------------------------------------------------------------------
# main estimate and the k = 1 base case

def theorem_sides(X: KnotSet, f, r: int, grid_x: int = 2048, grid_u: int = 512):
    """``|[X; f]|`` and ``Lambda_r(X; omega_k)`` with the estimated modulus of ``f^(r)``."""
    if X.max_multiplicity > r + 1:
        raise DomainError(f"knot multiplicity exceeds r+1 at j={first_violation(X, r)}")
    k = X.m - r
    lhs = max(abs(divided_difference(X, f)) - divided_difference_bound(X, f), 0.0)
    curve = modulus_curve(f.view(r), k, X.interval, grid_x=grid_x, grid_u=grid_u)
    res = lambda_r(X, r, curve)
    return lhs, res.value, curve


def _main_trial(cfg: TrialConfig, index: int) -> Row:
    rng = trial_rng(cfg.seed, index)
    pool = _pool(cfg.functions, cfg.m, cfg.r, cfg.r)
    f = pool[int(rng.integers(len(pool)))]
    X = sample_knots(rng, cfg.m + 1, cfg.r, cfg.min_gap, cfg.multiplicity_policy,
                     preset_for(cfg, index))
    lhs, rhs, curve = theorem_sides(X, f, cfg.r, cfg.grid_x, cfg.grid_u)
    ratio, failed = score(lhs, rhs, cfg.tol("zero", ZERO_TOL))
    extra = {"lambda": separation(X, cfg.r)}
    if cfg.check == "lemma_k1":
        d = 2 * X.span
        closed = float(curve.power_integrals(-2.0, d / 2, d))
        extra["closed_form_gap"] = abs(closed - rhs) / max(closed, 1e-300)
        failed = failed or extra["closed_form_gap"] > 1e-9
    if cfg.m == 2 and cfg.r == 0 and X.max_multiplicity == 1:
        xs = X.expanded
        h = min(xs[1] - xs[0], xs[2] - xs[1])
        L = X.span
        classical = float(curve.power_integrals(-2.0, h, L)) / L
        extra["classical_ratio"] = score(lhs, classical, ZERO_TOL)[0]
    return Row(index, cfg.m, cfg.r, X.format(), f.identifier, lhs, rhs, ratio, failed, extra)


def check_main_theorem(cfg: TrialConfig, baselines=None) -> VerificationReport:
    if cfg.m < cfg.r + 1:
        raise ConfigError("main check needs m >= r+1")
    return _finish(cfg, _map(_main_trial, cfg, cfg.trials), baselines)


def check_lemma_k1(cfg: TrialConfig, baselines=None) -> VerificationReport:
    if cfg.m != cfg.r + 1:
        raise ConfigError(f"lemma_k1 needs m = r+1, got m={cfg.m}, r={cfg.r}")
    return _finish(cfg, _map(_main_trial, cfg, cfg.trials), baselines)


# ---------------------------------------------------------------------------
# auxiliary lemmas

def lemma3_pairs(m: int, r: int) -> list:
    return [pq for pq in q_set(m, r) if pq.q - pq.p + 2 <= m]


def check_lemma3(X: KnotSet, r: int, pair, omega: ModulusFunction, quad=DEFAULT_QUAD,
                 tol: float = 1e-9):
    """``(lhs, rhs, passed)`` for one admissible pair, ``phi`` from :func:`phi_from_omega`."""
    m = X.m
    k = m - r
    p, q = int(pair[0]), int(pair[1])
    if not (0 <= p and q <= m and q - p >= r + 1 and q - p + 2 <= m):
        raise DomainError(f"pair ({p},{q}) needs (p,q) in Q with q-p+2 <= m={m}")
    d = 2 * X.span
    phi = phi_from_omega(omega, k, d, quad)
    lhs = lambda_pqr(X, r, (p, q), phi, quad)
    rhs = 2.0 ** (k * k) * lambda_r(X, r, omega, quad).value
    return lhs, rhs, bool(lhs <= rhs * (1 + tol) + 1e-300)


def check_lemma4(X: KnotSet, r: int, omega: ModulusFunction, quad=DEFAULT_QUAD) -> dict:
    """Both sides of the dropped-endpoint estimates and the reflection identity."""
    m = X.m
    k = m - r
    if k < 2:
        raise DomainError(f"need k = m - r >= 2, got {k}")
    if X.max_multiplicity > r + 1:
        raise DomainError(f"knot multiplicity exceeds r+1 at j={first_violation(X, r)}")
    d = 2 * X.span
    check_phi_membership(omega, T=d)
    phi = phi_from_omega(omega, k, d, quad)
    xs = X.expanded
    rhs = (xs[-1] - xs[0]) * lambda_r(X, r, omega, quad).value
    eq3 = lambda_r(KnotSet.from_points(xs[:-1]), r, phi, quad).value
    eq4 = lambda_r(KnotSet.from_points(xs[1:]), r, phi, quad).value
    mirrored = lambda_r(KnotSet.from_points(X.reflected().expanded[:-1]), r, phi, quad).value
    gap = abs(mirrored - eq4) / max(abs(eq4), 1e-300)
    return {"eq3": eq3, "eq4": eq4, "rhs": rhs, "reflection_error": gap if eq4 else abs(mirrored)}


def _random_omega(rng, cfg, d):
    if not cfg.phis and rng.uniform() < 0.25:
        pool = _pool(cfg.functions, cfg.m, 0, 0)
        f = pool[int(rng.integers(len(pool)))]
        kk = int(rng.integers(1, 4))
        a = float(rng.uniform(-1, 0))
        return modulus_curve(f, kk, Interval(a, a + d), grid_x=512, grid_u=128,
                             identifier=f"omega{kk}[{f.identifier}]")
    return sample_modulus(rng, cfg.phis, d)


def _sample_lemma_knots(rng, cfg, index):
    return sample_knots(rng, cfg.m + 1, cfg.r, cfg.min_gap, cfg.multiplicity_policy,
                        preset_for(cfg, index))


def _lemma3_trial(cfg: TrialConfig, index: int) -> Row:
    rng = trial_rng(cfg.seed, index)
    X = _sample_lemma_knots(rng, cfg, index)
    omega = _random_omega(rng, cfg, 2 * X.span)
    best = None
    for pair in lemma3_pairs(X.m, cfg.r):
        lhs, rhs, ok = check_lemma3(X, cfg.r, pair, omega)
        ratio, failed = score(lhs, rhs, 0.0)
        if best is None or ratio > best[2]:
            best = (lhs, rhs, ratio, failed or not ok, pair)
    lhs, rhs, ratio, failed, pair = best
    return Row(index, cfg.m, cfg.r, X.format(), omega.identifier, lhs, rhs, ratio, failed,
               {"pair": list(pair)})


def run_lemma3(cfg: TrialConfig, baselines=None) -> VerificationReport:
    rep = VerificationReport("lemma3", cfg.key, cfg.to_dict(), fixed_bound=1.0 + 1e-9)
    if not lemma3_pairs(cfg.m, cfg.r):
        rep.notes.append(f"no pair in Q with q-p+2 <= m for m={cfg.m}, r={cfg.r}; vacuous")
        return rep
    rep.rows = _map(_lemma3_trial, cfg, cfg.trials)
    return rep


def _lemma4_trial(cfg: TrialConfig, index: int) -> list:
    rng = trial_rng(cfg.seed, index)
    X = _sample_lemma_knots(rng, cfg, index)
    omega = _random_omega(rng, cfg, 2 * X.span)
    res = check_lemma4(X, cfg.r, omega)
    bad = res["reflection_error"] > 1e-8
    rows = []
    for eq in ("eq3", "eq4"):
        ratio, failed = score(res[eq], res["rhs"], 0.0)
        rows.append(Row(index, cfg.m, cfg.r, X.format(), f"{eq}:{omega.identifier}",
                        res[eq], res["rhs"], ratio, failed or bad,
                        {"reflection_error": res["reflection_error"]}))
    return rows


def run_lemma4(cfg: TrialConfig, baselines=None) -> VerificationReport:
    rows = [row for pair in _map(_lemma4_trial, cfg, cfg.trials) for row in pair]
    return _finish(cfg, rows, baselines)


# ---------------------------------------------------------------------------
# best approximation, Whitney and Marchaud chain

def check_section4_chain(f, r: int, k: int, interval: Interval, grid_x: int = 2048,
                         grid_u: int = 512, t_count: int = 41, zero_tol: float = ZERO_TOL) -> dict:
    """Sides of the three chain estimates at their worst probe value of ``t``."""
    if k < 2:
        raise DomainError("chain needs k >= 2")
    F = f.view(r)
    best = remez_discrete(F, k - 1, interval)
    P = best.polynomial

    def g(x):
        return np.asarray(F(x), dtype=float) - P(x)

    L = interval.length
    wk = modulus_curve(F, k, interval, grid_x=grid_x, grid_u=grid_u)
    wg = modulus_curve(g, k - 1, interval, grid_x=grid_x, grid_u=grid_u)
    scale = max(1.0, wk.sup_norm)
    tol = zero_tol * scale
    out = {}
    norm_g = max(best.error, wg.sup_norm)
    out["nr0"] = (norm_g, float(wk.eval(L)), L)
    ts = np.geomspace(L * 1e-3, L, t_count)
    lhs = np.asarray(wg.eval(ts))
    rhs = ts ** (k - 1) * wk.power_integrals(-float(k), ts, np.full_like(ts, 2 * L))
    out["nr"] = _worst(lhs, rhs, ts, tol)
    ts = np.linspace(L, 2 * L, t_count)
    out["nr1"] = _worst(np.asarray(wg.eval(ts)), np.asarray(wk.eval(ts)), ts, tol)
    result = {}
    for name, (lh, rh, t) in out.items():
        ratio, failed = score(lh, rh, tol)
        result[name] = {"lhs": float(lh), "rhs": float(rh), "ratio": ratio, "failed": failed,
                        "t": float(t)}
    result["remez"] = {"error": best.error, "iterations": best.iterations,
                       "converged": best.converged}
    return result


def _worst(lhs, rhs, ts, tol):
    ratios = np.array([score(a, b, tol)[0] for a, b in zip(lhs, rhs)])
    i = int(np.argmax(ratios))
    return lhs[i], rhs[i], ts[i]


SECTION4_FUNCTIONS = ("exp", "sin", "abs(0,3.5)", "tpow(0,{r}+2)")


def run_section4(cfg: TrialConfig, baselines=None) -> list:
    r, k = cfg.r, cfg.k
    interval = Interval(*(cfg.interval or (-1.0, 1.0)))
    ids = cfg.functions or SECTION4_FUNCTIONS
    reports = {name: VerificationReport("section4", cfg.key, cfg.to_dict(), label=f"section4_{name}")
                  for name in ("nr0", "nr", "nr1")}
    for i, ident in enumerate(ids):
        f = corpus_lookup(expand_identifier(ident, cfg.m, r))
        try:
            res = check_section4_chain(f, r, k, interval, cfg.grid_x, cfg.grid_u)
        except ConvergenceError as exc:
            for rep in reports.values():
                rep.rows.append(Row(i, cfg.m, r, "", f.identifier, math.nan, math.nan,
                                    math.inf, True, {"error": str(exc)}))
            continue
        for name, rep in reports.items():
            v = res[name]
            rep.rows.append(Row(i, cfg.m, r, f"{interval.a!r},{interval.b!r}", f.identifier,
                                v["lhs"], v["rhs"], v["ratio"], v["failed"], {"t": v["t"]}))
    out = list(reports.values())
    _attach(out, baselines)
    return out


# ---------------------------------------------------------------------------
# interpolation error

def section5_grid(X: KnotSet, n: int = 257) -> np.ndarray:
    v = np.asarray(X.distinct_values)
    mids = (v[1:] + v[:-1]) / 2
    return np.unique(np.concatenate([np.linspace(v[0], v[-1], n), v, mids]))


def _taylor_at(P: NewtonForm, z: float, nd: int) -> np.ndarray:
    """``P^(l)(z)/l!`` for ``l < nd`` by nested division of the Newton form."""
    c, xs = P.coefficients, P.centers
    v = np.zeros(nd)
    v[0] = c[-1]
    for i in range(len(c) - 2, -1, -1):
        dz = z - xs[i]
        for l in range(nd - 1, 0, -1):
            v[l] = v[l] * dz + v[l - 1]
        v[0] = v[0] * dz + c[i]
    return v


def _data_floor(X: KnotSet, f, P: NewtonForm, x: np.ndarray) -> np.ndarray:
    """Error of ``P`` that is explained by its mismatch in the Hermite data."""
    vals = np.asarray(X.distinct_values)
    mults = X.multiplicities
    errs = []
    for z, mu in zip(vals, mults):
        tp = _taylor_at(P, z, mu)
        tf = np.array([f.eval(z, l) / math.factorial(l) for l in range(mu)])
        errs.append(np.abs(tp - tf))
    near = np.argmin(np.abs(x[:, None] - vals[None, :]), axis=1)
    delta = np.abs(x - vals[near])
    out = np.zeros_like(x)
    for j, e in enumerate(errs):
        sel = near == j
        out[sel] = sum(e[l] * delta[sel] ** l for l in range(len(e)))
    return out


def interp_sides(X: KnotSet, f, r: int, x_grid, variant: str, grid_x: int = 2048,
                 grid_u: int = 512, lambda_min: float = 0.0) -> dict:
    """Pointwise sides of the interpolation-error estimates on ``x_grid``.

    ``X`` holds the ``m`` interpolation knots; ``k = m - r``.
    """
    m = X.size
    k = m - r
    lam = separation(X, r)
    if not lam > 0 or lam < lambda_min:
        xs = X.expanded
        gaps = xs[r + 1:] - xs[: m - r - 1]
        j = int(np.argmin(gaps))
        raise PreconditionError(
            f"separation x_{{j+r+1}} - x_j >= lambda*|I| fails at j={j} (lambda={lam:.6g})")
    if variant == "full":
        counts = set(X.multiplicities)
        if counts != {r + 1}:
            raise PreconditionError("full-multiplicity variant needs every knot repeated r+1 times")
    if k < 1:
        raise DomainError(f"need m > r, got m={m}, r={r}")
    if variant != "whitney" and k < 2:
        raise DomainError(f"variant {variant} needs m >= r + 2")
    x = np.asarray(x_grid, dtype=float)
    I = X.interval
    L = I.length
    P = newton_hermite(X, f)
    fx = np.asarray(f.eval(x, 0), dtype=float)
    px, ebound = P.nested(x)
    raw = np.abs(fx - px)
    floor = _data_floor(X, f, P, x) + ebound + 4 * _EPS * np.abs(fx)
    net = np.maximum(raw - floor, 0.0)
    curve = modulus_curve(f.view(r), k, I, grid_x=grid_x, grid_u=grid_u)
    dist = np.sort(np.abs(x[:, None] - X.expanded[None, :]), axis=1)
    rho = dist[:, r]
    positive = rho > 0
    safe = np.where(positive, rho, 1.0)
    two_l = np.full_like(x, 2 * L)
    if variant == "whitney":
        rhs = np.full_like(x, L ** r * float(curve.eval(L)))
    elif variant == "pointwise":
        D = np.prod(dist[:, : r + 1], axis=1)
        rhs = np.where(positive, D * curve.power_integrals(-2.0, safe, two_l), 0.0)
    elif variant == "modulus":
        D = np.prod(dist[:, :r], axis=1)
        star = L * (safe / L) ** (1.0 / k)
        rhs = np.where(positive, D * np.asarray(curve.eval(star)), 0.0)
    elif variant == "full":
        dz = np.min(np.abs(x[:, None] - np.asarray(X.distinct_values)[None, :]), axis=1)
        pos = dz > 0
        sz = np.where(pos, dz, 1.0)
        rhs = np.where(pos, sz ** (r + 1) * curve.power_integrals(-2.0, sz, two_l), 0.0)
    else:
        raise DomainError(f"unknown variant {variant!r}")
    at_knot = np.isin(x, np.asarray(X.distinct_values))
    knot_scale = np.maximum(1.0, np.abs(fx))
    knot_bad = at_knot & (raw > KNOT_TOL * knot_scale)
    # lhs is the computed error; net discounts the rounding floor and is what gets scored
    out = {"x": x, "lhs": raw, "net": net, "floor": floor, "rhs": rhs, "lambda": lam, "k": k,
           "curve": curve, "knot_failures": int(np.sum(knot_bad)), "rho": rho}
    if variant == "modulus" and k >= 2:
        D = np.prod(dist[:, : r + 1], axis=1)
        point = np.where(positive, D * curve.power_integrals(-2.0, safe, two_l), 0.0)
        bound = (1 + 2.0 ** (2 * k - 1) / (k - 1)) * rhs
        resolved = rho >= 16 * curve.spacing
        out["chain_violations"] = int(np.sum(resolved & (point > bound * (1 + 1e-9))))
    return out


def check_interp_error(X: KnotSet, f, r: int, x_grid, variant: str, grid_x: int = 2048,
                       grid_u: int = 512, zero_tol: float = ZERO_TOL, lambda_min: float = 0.0) -> dict:
    """Worst point of the grid for one knot set and one function."""
    s = interp_sides(X, f, r, x_grid, variant, grid_x, grid_u, lambda_min)
    ratios, fails = zip(*(score(a, b, zero_tol) for a, b in zip(s["net"], s["rhs"])))
    ratios = np.array(ratios)
    i = int(np.argmax(ratios))
    s.update(ratio=float(ratios[i]), worst=i, failed=bool(any(fails)) or s["knot_failures"] > 0)
    return s


def _interp_knots(rng, cfg, index):
    preset = preset_for(cfg, index)
    if cfg.variant == "full":
        mu = cfg.m // (cfg.r + 1) - 1
        Z = distinct_values(rng, mu + 1, cfg.min_gap, preset)
        return KnotSet(tuple(Z), (cfg.r + 1,) * (mu + 1))
    return sample_knots(rng, cfg.m, cfg.r, cfg.min_gap, cfg.multiplicity_policy, preset)


def _interp_trial(cfg: TrialConfig, index: int) -> tuple:
    rng = trial_rng(cfg.seed, index)
    X = _interp_knots(rng, cfg, index)
    grid = section5_grid(X)
    rows = []
    chain = 0
    for f in _pool(cfg.functions or SECTION5_FUNCTIONS, cfg.m, cfg.r, cfg.r):
        s = check_interp_error(X, f, cfg.r, grid, cfg.variant, cfg.grid_x, cfg.grid_u,
                               cfg.tol("zero", ZERO_TOL), cfg.tol("lambda_min", 0.0))
        i = s["worst"]
        chain += s.get("chain_violations", 0)
        rows.append(Row(index, cfg.m, cfg.r, X.format(), f.identifier, float(s["net"][i]),
                        float(s["rhs"][i]), s["ratio"], s["failed"],
                        {"x": float(s["x"][i]), "lambda": s["lambda"],
                         "knot_failures": s["knot_failures"]}))
    return rows, chain


def run_interp(cfg: TrialConfig, baselines=None) -> VerificationReport:
    results = _map(_interp_trial, cfg, cfg.trials)
    rows = [row for rs, _ in results for row in rs]
    rep = _finish(cfg, rows, baselines, label=f"interp_{cfg.variant}")
    rep.extra["min_lambda"] = min(row.extra["lambda"] for row in rows)
    if cfg.variant == "modulus":
        rep.extra["chain_violations"] = int(sum(c for _, c in results))
    return rep


# ---------------------------------------------------------------------------
# suite plumbing

def _attach(reports, baselines):
    table = load_baselines() if baselines is None else baselines
    for rep in reports:
        if rep.fixed_bound is None:
            rep.baseline = lookup(table, rep.baseline_name, rep.key)
            if rep.baseline is None and rep.rows:
                rep.notes.append("no committed baseline")


def _finish(cfg, rows, baselines, label=None) -> VerificationReport:
    rep = VerificationReport(cfg.check, cfg.key, cfg.to_dict(), rows=rows, label=label)
    if cfg.check == "main" and cfg.m == 2 and cfg.r == 0:
        classical = [row.extra["classical_ratio"] for row in rows if "classical_ratio" in row.extra]
        rep.extra["below_18"] = rep.max_ratio < 18
        if classical:
            rep.extra["classical_max_ratio"] = max(classical)
            rep.extra["classical_below_18"] = max(classical) < 18
    _attach([rep], baselines)
    return rep


RUNNERS = {
    "main": check_main_theorem,
    "lemma_k1": check_lemma_k1,
    "lemma3": run_lemma3,
    "lemma4": run_lemma4,
    "section4": run_section4,
    "interp": run_interp,
}


def run_config(cfg: TrialConfig, baselines=None) -> list:
    t0 = time.perf_counter()
    out = RUNNERS[cfg.check](cfg, baselines)
    reports = out if isinstance(out, list) else [out]
    elapsed = time.perf_counter() - t0
    for rep in reports:
        rep.elapsed = elapsed
    return reports


def run_suite(configs, baselines=None, out_dir=None, deterministic: bool = False):
    """Run every config; returns ``(reports, passed)``."""
    table = load_baselines() if baselines is None else baselines
    reports = []
    for cfg in configs:
        reports.extend(run_config(cfg, table))
    if out_dir is not None:
        for rep in reports:
            rep.write(out_dir, deterministic)
    return reports, all(rep.passed for rep in reports)
