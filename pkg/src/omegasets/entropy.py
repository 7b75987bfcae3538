"""Entropy estimators (all values in nats)."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, comb, exp, log

import numpy as np

from .errors import DepthCap, GrowthViolated, LengthMismatch, PreconditionError, Reducible
from .measures import MarkovMeasure, PeriodicMeasure, ergodic_components
from .words import WORD_CAP, BlockSft, SftDescr, count_words

POWER_TOL = 1e-12
SELECTION_CAP = 30


@dataclass(frozen=True)
class EntropyEstimate:
    value: float
    method: str
    params: dict = field(default_factory=dict)
    error_bound: float | None = None
    exact: bool = False

    def __post_init__(self):
        if self.value < 0:
            raise PreconditionError("entropy estimates are nonnegative")

    def to_json(self) -> dict:
        return {"format": 1, "value": self.value, "unit": "nats", "method": self.method,
                "params": self.params, "error_bound": self.error_bound, "exact": self.exact}


def perron_root(mat: np.ndarray, tol: float = POWER_TOL) -> float:
    """Spectral radius of an irreducible nonnegative matrix by power iteration on A + I."""
    A = np.asarray(mat, dtype=float) + np.eye(len(mat))
    v = np.ones(len(A)) / len(A)
    lam = 0.0
    for _ in range(1_000_000):
        w = A @ v
        new = w.sum()
        w /= new
        if abs(new - lam) < tol * new and np.abs(w - v).max() < tol:
            lam = new
            break
        v, lam = w, new
    return lam - 1.0


def sft_entropy(sft: SftDescr | BlockSft, check_n: int = 20) -> EntropyEstimate:
    if isinstance(sft, BlockSft):
        # free concatenations of |Gamma| blocks of length n
        if sft.size == 0:
            raise Reducible("empty block set")
        return EntropyEstimate(log(sft.size) / sft.n, "block-count",
                               {"n": sft.n, "size": sft.size}, exact=True)
    if not sft.irreducible:
        raise Reducible("entropy of a reducible SFT is not computed")
    verts = sorted(sft.vertices)
    sub = sft.array[np.ix_(verts, verts)]
    lam = perron_root(sub)
    value = log(lam) if lam > 1 + 1e-15 else 0.0
    counted = log(count_words(sft, check_n)) / check_n
    return EntropyEstimate(value, "spectral", {"check_n": check_n, "word_count_value": counted,
                                               "agrees_1e-2": abs(counted - value) <= 1e-2},
                           error_bound=POWER_TOL)


def word_count_entropy(sft: SftDescr, n: int) -> EntropyEstimate:
    c = count_words(sft, n)
    return EntropyEstimate(log(c) / n, "word-count", {"n": n, "count": c}, exact=True)


def separated_count(words, k: int) -> int:
    """Size of a greedy maximal subset pairwise separated at resolution ``k``.

    Two length-L words are separated at resolution k when they differ within
    their first L - k + 1 symbols; resolution 1 separates all distinct words.
    """
    words = list(words)
    if k < 1:
        raise PreconditionError("resolution must be at least 1")
    if not words:
        return 0
    L = len(words[0])
    if any(len(w) != L for w in words):
        raise LengthMismatch("all words must have equal length")
    span = max(0, L - k + 1)
    kept: set[str] = set()
    for w in words:
        kept.add(w[:span])
    return len(kept)


# ---------------------------------------------------------------- Katok

def _min_count_from_classes(classes: list[tuple[Fraction, int]], gamma: Fraction) -> int:
    """Classes are (weight of each cylinder, number of cylinders)."""
    classes = sorted(classes, key=lambda c: -c[0])
    total, count = Fraction(0), 0
    for w, size in classes:
        if total + w * size >= gamma:
            return count + ceil((gamma - total) / w)
        total += w * size
        count += size
    return count


def _compositions(n: int, m: int):
    if m == 1:
        yield (n,)
        return
    for first in range(n + 1):
        for rest in _compositions(n - first, m - 1):
            yield (first,) + rest


def _bernoulli_counts(probs: list[Fraction], n: int, gamma: Fraction) -> int:
    support = [p for p in probs if p > 0]
    classes = []
    for comp in _compositions(n, len(support)):
        w = Fraction(1)
        size, left = 1, n
        for p, c in zip(support, comp):
            w *= p**c
            size *= comb(left, c)
            left -= c
        classes.append((w, size))
    return _min_count_from_classes(classes, gamma)


def _periodic_counts(mu: PeriodicMeasure, n: int, gamma: Fraction) -> int:
    p = len(mu.word)
    text = mu.word * (n // p + 2)
    tally: dict[str, int] = {}
    for i in range(p):
        tally[text[i:i + n]] = tally.get(text[i:i + n], 0) + 1
    return _min_count_from_classes([(Fraction(c, p), 1) for c in tally.values()], gamma)


def _markov_counts_numpy(mu: MarkovMeasure, n: int, gamma: float) -> int:
    m = mu.m
    P = np.array([[float(x) for x in r] for r in mu.P])
    w = np.array([float(x) for x in mu.pi])
    for _ in range(n - 1):
        last = np.arange(w.size) % m
        w = (w[:, None] * P[last]).ravel()
    w = np.sort(w[w > 0])[::-1]
    return int(np.searchsorted(np.cumsum(w), gamma - 1e-15) + 1)


def _markov_counts_mc(mu: MarkovMeasure, n: int, gamma: float, rng, samples: int) -> tuple[float, float]:
    """Monte-Carlo estimate of r_n and a 95% half-width on log r_n."""
    from .schedule import MarkovGenerator
    words = MarkovGenerator(mu)._sample(rng, n, samples)
    P = np.array([[float(x) for x in r] for r in mu.P])
    pi = np.array([float(x) for x in mu.pi])
    logw = np.log(pi[words[:, 0]]) + np.log(P[words[:, :-1], words[:, 1:]]).sum(axis=1)
    t = np.quantile(logw, 1 - gamma)
    vals = np.where(logw >= t, np.exp(-logw), 0.0)
    est = vals.mean()
    half = 1.96 * vals.std(ddof=1) / np.sqrt(samples) / est
    return float(est), float(half)


def katok_counts(mu, gamma=Fraction(1, 2), n_max: int = 24, cap: int = WORD_CAP,
                 monte_carlo: bool = False, seed: int = 0, samples: int = 20000) -> list[dict]:
    """For each n <= n_max, r_n = fewest n-cylinders of total weight >= gamma."""
    gamma = Fraction(gamma) if not isinstance(gamma, float) else Fraction(repr(gamma))
    if not 0 < gamma < 1:
        raise PreconditionError("gamma must lie in (0, 1)")
    comps = ergodic_components(mu)
    if len(comps) != 1:
        raise PreconditionError("Katok counts need an ergodic measure")
    mu = comps[0]
    rng = np.random.default_rng(seed)
    rows = []
    for n in range(1, n_max + 1):
        half = 0.0
        if isinstance(mu, PeriodicMeasure):
            r = _periodic_counts(mu, n, gamma)
        elif mu.is_bernoulli:
            verts = sorted(mu.support_sft.vertices)
            r = _bernoulli_counts([mu.P[verts[0]][v] for v in verts], n, gamma)
        elif mu.m**n <= cap:
            r = _markov_counts_numpy(mu, n, float(gamma))
        elif monte_carlo:
            r, half = _markov_counts_mc(mu, n, float(gamma), rng, samples)
        else:
            raise DepthCap(f"{mu.m}^{n} cylinders exceed the enumeration cap {cap}")
        rows.append({"n": n, "r_n": r, "rate": log(r) / n, "log_ci_halfwidth": half})
    return rows


def katok_entropy_estimate(mu, gamma=Fraction(1, 2), n_max: int = 24, **kw) -> EntropyEstimate:
    """Slope of log r_n against n over the upper half of 1..n_max."""
    rows = katok_counts(mu, gamma, n_max, **kw)
    tail = [r for r in rows if r["n"] >= ceil(n_max / 2)]
    if len(tail) >= 2:
        ns = np.array([r["n"] for r in tail], dtype=float)
        ls = np.log(np.array([float(r["r_n"]) for r in tail]))
        slope = float(np.polyfit(ns, ls, 1)[0])
    else:
        slope = rows[-1]["rate"]
    rates = [r["rate"] for r in tail]
    return EntropyEstimate(max(0.0, slope), "katok", {
        "gamma": str(gamma), "n_max": n_max, "liminf": min(rates), "limsup": max(rates),
        "rates": [[r["n"], r["rate"]] for r in rows]})


# ---------------------------------------------------------------- family bound

def _random_cover_sum(branching: list[int], rng) -> Fraction:
    """Random prefix-closed cover of the leaves of a tree; returns sum |V cap W|/|W|."""
    depth = len(branching)
    leaves = int(np.prod(branching))
    total = Fraction(0)

    def visit(level: int, weight: int):
        nonlocal total
        if level == depth or rng.random() < 0.3:
            total += Fraction(weight, leaves)
            if rng.random() < 0.2:
                total += Fraction(weight, leaves)  # overlapping cover element
            return
        for _ in range(branching[level]):
            visit(level + 1, weight // branching[level])
    visit(0, leaves)
    return total


def family_entropy_bound(cfg, covers: int = 200) -> EntropyEstimate:
    """Certified lower bound h~ - 2 eta (clamped at 0) for the saturated family of ``cfg``."""
    eta = float(cfg.eta)
    if eta <= 0:
        raise PreconditionError("eta must be positive")
    vertices = list(cfg.K.vertices)
    hs = [mu.entropy for mu in vertices]
    h_tilde = min(hs)
    target = (h_tilde - 2 * eta) / (h_tilde - eta) if h_tilde > eta else -1.0
    q = len(vertices)
    M, logW, r0 = 0, 0.0, None
    stages = []
    for j in range(SELECTION_CAP + 1):
        n, N = cfg.lengths(j), cfg.repeats(j)
        h = hs[j % q]
        log_gamma = max(0.0, n * (h - eta))
        ratio = M / (M + n)
        ok = ratio >= target
        if ok and r0 is None:
            r0 = j
        elif not ok:
            r0 = None
        M += N * n
        logW += N * log_gamma
        stages.append({"stage": j, "n": n, "N": N, "log_gamma": log_gamma, "ratio": ratio, "ok": ok})
    if r0 is None:
        raise GrowthViolated("block-to-prefix ratio never reaches the selection threshold")
    rng = np.random.default_rng(getattr(cfg, "seed", 0))
    branching = [max(1, min(3, int(exp(min(st["log_gamma"], 5))))) for st in stages[:4]]
    worst = min(_random_cover_sum(branching, rng) for _ in range(covers))
    if worst < 1:
        raise GrowthViolated("a cover failed the counting inequality")
    return EntropyEstimate(max(0.0, h_tilde - 2 * eta), "family-bound", {
        "eta": eta, "h_tilde": h_tilde, "selection_stage": r0, "threshold": target,
        "covers_checked": covers, "min_cover_sum": float(worst), "log_W_30": logW, "M_30": M})
