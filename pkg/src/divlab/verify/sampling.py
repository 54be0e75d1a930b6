"""Seeded generation of knot sets and corpus draws."""

from __future__ import annotations

import numpy as np

from ..corpus import corpus_lookup
from ..errors import ConfigError
from ..knots import KnotSet

DEFAULT_FUNCTIONS = ("exp", "sin", "cos", "affine(3,0,sin)", "abs(0.37,{r}+0.5)",
                     "abs(0.61,{r}+1)", "tpow(0.42,{r}+1)", "tpow(0.55,{r}+1.5)", "x^{m}",
                     "affine(2,-1,exp)")


def trial_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng([int(seed), int(index)])


def expand_identifier(template: str, m: int, r: int) -> str:
    """Substitute ``{m}``/``{r}`` and fold ``a+b`` numeric arguments."""
    text = template.replace("{m}", str(m)).replace("{r}", str(r))
    out, token = [], ""
    for ch in text + ",":
        if ch in ",()":
            if "+" in token:
                try:
                    token = repr(float(sum(float(v) for v in token.split("+"))))
                except ValueError:
                    pass
            out.append(token + ch)
            token = ""
        else:
            token += ch
    return "".join(out)[:-1]


def function_pool(identifiers, m: int, r: int, need: int):
    """Corpus functions with derivatives at least to order ``need``."""
    ids = identifiers or DEFAULT_FUNCTIONS
    pool = []
    for ident in ids:
        f = corpus_lookup(expand_identifier(ident, m, r))
        if f.max_derivative_order >= need:
            pool.append(f)
    if not pool:
        raise ConfigError(f"no configured function has derivatives to order {need}")
    return pool


def multiplicities(rng, count: int, r: int, policy: str) -> list:
    if policy == "all-simple":
        return [1] * count
    if policy == "full":
        q, rem = divmod(count, r + 1)
        return [r + 1] * q + ([rem] if rem else [])
    parts, left = [], count
    while left:
        p = int(rng.integers(1, min(r + 1, left) + 1))
        parts.append(p)
        left -= p
    return parts


def _ok(vals, min_gap):
    return len(vals) < 2 or np.min(np.diff(vals)) >= min_gap * (vals[-1] - vals[0])


def distinct_values(rng, n: int, min_gap: float, preset: str = "uniform") -> np.ndarray:
    """``n`` increasing values in ``[0, 1]`` with gaps ``>= min_gap * span``."""
    if n == 1:
        return np.array([float(rng.uniform())])
    if n == 2:
        return np.sort(rng.uniform(size=2)) if preset == "uniform" else np.array([0.0, 1.0])
    if preset == "geometric":
        gaps = 2.0 ** -np.arange(1, n)
        if rng.uniform() < 0.5:
            gaps = gaps[::-1]
        vals = np.concatenate([[0.0], np.cumsum(gaps)])
        vals = vals / vals[-1]
        if _ok(vals, min_gap):
            return vals
        preset = "uniform"
    for _ in range(10000):
        vals = np.sort(rng.uniform(size=n))
        if preset == "near-pair":
            j = int(rng.integers(0, n - 2))
            span = vals[-1] - vals[0]
            vals[j + 1] = vals[j] + min_gap * span * (1 + 1e-12)
            if not vals[j + 1] < vals[-1]:
                continue
        if _ok(vals, min_gap) and np.all(np.diff(vals) > 0):
            return vals
    raise ConfigError(f"cannot place {n} values with min_gap={min_gap}")


def preset_for(cfg, index: int) -> str:
    if not cfg.presets:
        return "uniform"
    return {3: "near-pair", 7: "geometric"}.get(index % 10, "uniform")


def sample_knots(rng, count: int, r: int, min_gap: float, policy: str,
                 preset: str = "uniform") -> KnotSet:
    """Knot multiset of ``count`` points with multiplicities at most ``r + 1``."""
    mults = multiplicities(rng, count, r, policy)
    if policy == "random":
        mults = list(rng.permutation(mults))
    vals = distinct_values(rng, len(mults), min_gap, preset)
    return KnotSet(tuple(vals), tuple(int(v) for v in mults))


def sample_modulus(rng, phis, d: float):
    """A random member of the modulus family scaled to the scale ``d``."""
    from ..corpus import PiecewiseLinearModulus, PowerModulus, phi_lookup
    if phis:
        return phi_lookup(phis[int(rng.integers(len(phis)))])
    kind = int(rng.integers(3))
    if kind == 0:
        return PowerModulus(float(rng.uniform(0.2, 3.0)), declared_domain=2 * d)
    if kind == 1:
        return PowerModulus(float(rng.uniform(0.2, 3.0)), cap=float(rng.uniform(0.05, 1.0) * d),
                            declared_domain=2 * d)
    ts = np.sort(rng.uniform(0, d, size=4))
    vs = np.cumsum(rng.exponential(size=4))
    return PiecewiseLinearModulus(ts, vs, declared_domain=2 * d)
