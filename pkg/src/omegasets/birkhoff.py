"""Birkhoff averages of locally constant observables along scheduled points,
level-set entropy and irregular witnesses."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import log

import numpy as np
from scipy.optimize import minimize

from .entropy import EntropyEstimate, family_entropy_bound
from .errors import BoundaryValue, DegenerateObservable, PreconditionError
from .limitsets import MeasurePolyline, measure_support, omega_limit, vf_polyline
from .measures import (MarkovMeasure, PeriodicMeasure, combine, ergodic_components, to_fraction,
                       window_codes)
from .schedule import BlockSchedule, schedule_array, schedule_prefix
from .subshifts import comparison_depth, subset
from .words import SftDescr, all_words, check_word, idx, sft_language

DEPTH_CAP = 8
RESTARTS = 20


@dataclass(frozen=True)
class Observable:
    """phi(x) = weight of the first ``depth`` symbols of x (missing words weigh 0)."""

    m: int
    depth: int
    weights: tuple

    def __post_init__(self):
        w = tuple(sorted((k, to_fraction(v)) for k, v in dict(self.weights).items()))
        if not 1 <= self.depth <= DEPTH_CAP:
            raise PreconditionError(f"depth must be in 1..{DEPTH_CAP}")
        for k, _ in w:
            check_word(k, self.m)
            if len(k) != self.depth:
                raise PreconditionError("observable words must have the stated depth")
        object.__setattr__(self, "weights", w)

    @classmethod
    def indicator(cls, word: str, m: int = 2) -> "Observable":
        return cls(m, len(word), ((word, 1),))

    @classmethod
    def constant(cls, c, m: int = 2) -> "Observable":
        return cls(m, 1, tuple((a, c) for a in all_words(m, 1)))

    def weight(self, w: str) -> Fraction:
        return dict(self.weights).get(w, Fraction(0))

    def lift(self, m: int) -> "Observable":
        if m < self.m:
            raise PreconditionError("cannot restrict an observable to fewer symbols")
        return Observable(m, self.depth, self.weights)

    def integral(self, mu) -> Fraction:
        return sum((v * mu.cylinder_weight(k) for k, v in self.weights), Fraction(0))

    def values(self, x: np.ndarray) -> np.ndarray:
        """phi at every position where a full window fits."""
        table = np.zeros(self.m**self.depth)
        for k, v in self.weights:
            code = 0
            for c in k:
                code = code * self.m + idx(c)
            table[code] = float(v)
        return table[window_codes(x, self.m, self.depth)]

    def to_json(self) -> dict:
        return {"format": 1, "m": self.m, "depth": self.depth,
                "weights": {k: str(v) for k, v in self.weights}}

    @classmethod
    def from_json(cls, d: dict) -> "Observable":
        return cls(d["m"], d["depth"], tuple((k, Fraction(v)) for k, v in d["weights"].items()))


# ---------------------------------------------------------------- L_phi via cycle means

def _edge_graph(phi: Observable, sft: SftDescr):
    """Nodes are (depth-1)-words (symbols when depth is 1); edges carry phi."""
    ess = sft.essential
    if phi.depth == 1:
        nodes = [a for a in all_words(sft.m, 1) if idx(a) in ess.vertices]
        edges = [(a, b, phi.weight(a)) for a in nodes for b in nodes if ess.matrix[idx(a)][idx(b)]]
        return nodes, edges
    words = sft_language(ess, phi.depth)
    nodes = sorted({w[:-1] for w in words} | {w[1:] for w in words})
    edges = [(w[:-1], w[1:], phi.weight(w)) for w in words]
    return nodes, edges


def _min_cycle_mean(nodes, edges) -> Fraction:
    """Karp's algorithm, exact in rationals, minimized over all start vertices."""
    n = len(nodes)
    pos = {v: i for i, v in enumerate(nodes)}
    INF = None
    best = None
    # Karp with a virtual source joined to every node at cost 0
    D = [[INF] * n for _ in range(n + 1)]
    for v in range(n):
        D[0][v] = Fraction(0)
    for k in range(1, n + 1):
        for a, b, w in edges:
            i, j = pos[a], pos[b]
            if D[k - 1][i] is not None:
                c = D[k - 1][i] + w
                if D[k][j] is None or c < D[k][j]:
                    D[k][j] = c
    for v in range(n):
        if D[n][v] is None:
            continue
        worst = None
        for k in range(n):
            if D[k][v] is not None:
                r = (D[n][v] - D[k][v]) / (n - k)
                worst = r if worst is None or r > worst else worst
        if worst is not None and (best is None or worst < best):
            best = worst
    if best is None:
        raise PreconditionError("the shift carries no cycle")
    return best


def phi_range(phi: Observable, sft: SftDescr) -> tuple[Fraction, Fraction]:
    """L_phi = [min, max] of the phi-integral over invariant measures of ``sft``."""
    nodes, edges = _edge_graph(phi, sft)
    lo = _min_cycle_mean(nodes, edges)
    hi = -_min_cycle_mean(nodes, [(a, b, -w) for a, b, w in edges])
    return lo, hi


# ---------------------------------------------------------------- Birkhoff bounds

REGULAR, QUASI_REGULAR, IRREGULAR = "Regular", "QuasiRegular", "Irregular"


@dataclass(frozen=True)
class BirkhoffReport:
    liminf: Fraction
    limsup: Fraction
    L_phi: tuple
    kind: str
    phi_irregular: bool
    series: tuple = ()
    exact: bool = True

    def to_json(self) -> dict:
        return {"format": 1, "liminf": str(self.liminf), "limsup": str(self.limsup),
                "liminf_float": float(self.liminf), "limsup_float": float(self.limsup),
                "L_phi": [str(v) for v in self.L_phi], "kind": self.kind,
                "phi_irregular": self.phi_irregular, "exact": self.exact,
                "series": [[n, v] for n, v in self.series]}


def birkhoff_series(s: BlockSchedule, phi: Observable, horizon: int, points: int = 200) -> tuple:
    """(n, (1/n) sum_{i<n} phi(sigma^i x)) on a geometric grid of n <= horizon."""
    x = schedule_array(s, horizon + phi.depth - 1)
    vals = phi.values(x)
    cs = np.cumsum(vals)
    ns = np.unique(np.geomspace(1, horizon, points).astype(np.int64))
    return tuple((int(n), float(cs[n - 1] / n)) for n in ns)


def regularity(s: BlockSchedule, poly: MeasurePolyline) -> str:
    if not poly.is_singleton:
        return IRREGULAR
    mu = poly.vertices[0]
    comps = ergodic_components(mu)
    if len(comps) != 1:
        return QUASI_REGULAR
    sup = measure_support(mu)
    if not subset(omega_limit(s), sup):
        return QUASI_REGULAR
    # x lies in S_mu when its opening windows (prefix included) are words of S_mu
    L = comparison_depth(s.m)
    x = schedule_prefix(s, len(s.prefix) + 2 * L)
    words = sup.language(L)
    return REGULAR if all(x[i:i + L] in words for i in range(len(x) - L + 1)) else QUASI_REGULAR


def birkhoff_bounds(s: BlockSchedule, phi: Observable, horizon: int | None = None) -> BirkhoffReport:
    """liminf and limsup of Birkhoff averages: extremes of the phi-integral over V_f."""
    if phi.m != s.m:
        phi = phi.lift(s.m)
    poly = vf_polyline(s)
    vals = [phi.integral(mu) for mu in poly.vertices]
    lo, hi = min(vals), max(vals)
    L = phi_range(phi, s.ambient)
    series = birkhoff_series(s, phi, horizon) if horizon else ()
    return BirkhoffReport(lo, hi, L, regularity(s, poly), lo < hi, series)


# ---------------------------------------------------------------- level entropy

@dataclass(frozen=True)
class LevelResult:
    a: float
    value: float
    P: tuple
    pi: tuple
    boundary: bool = False

    def to_json(self) -> dict:
        return {"format": 1, "a": self.a, "t_a": self.value, "unit": "nats", "boundary": self.boundary,
                "argmax": {"P": [list(r) for r in self.P], "pi": list(self.pi)}}


def _pair_weights(phi: Observable, m: int) -> np.ndarray:
    if phi.depth == 1:
        return np.array([[float(phi.weight(all_words(m, 1)[i])) for _ in range(m)] for i in range(m)])
    if phi.depth == 2:
        words = all_words(m, 2)
        return np.array([float(phi.weight(w)) for w in words]).reshape(m, m)
    raise PreconditionError("level entropy supports observables of depth 1 or 2")


def _conditional_entropy(q: np.ndarray, m: int) -> float:
    Q = np.clip(q.reshape(m, m), 0, None)
    row = Q.sum(axis=1, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(Q > 0, Q * np.log(np.where(row > 0, Q / row, 1)), 0.0)
    return float(-terms.sum())


def level_entropy(phi: Observable, a, seed: int = 0, restarts: int = RESTARTS) -> LevelResult:
    """t_a = sup of h_mu over memory-1 Markov measures with integral of phi equal to a.

    Optimizes the (concave) conditional entropy of the pair distribution q_ij
    subject to stationarity and the linear level constraint."""
    m = phi.m
    W = _pair_weights(phi, m)
    lo, hi = phi_range(phi, SftDescr.full(m))
    a = float(a)
    if a < float(lo) - 1e-12 or a > float(hi) + 1e-12:
        raise PreconditionError(f"a = {a} lies outside L_phi = [{float(lo)}, {float(hi)}]")
    boundary = abs(a - float(lo)) <= 1e-12 or abs(a - float(hi)) <= 1e-12
    cons = [
        {"type": "eq", "fun": lambda q: q.sum() - 1.0},
        {"type": "eq", "fun": lambda q: (q.reshape(m, m) * W).sum() - a},
        {"type": "eq", "fun": lambda q: (q.reshape(m, m).sum(axis=1) - q.reshape(m, m).sum(axis=0))[:-1]},
    ]
    rng = np.random.default_rng(seed)
    best = None
    for _ in range(restarts):
        q0 = rng.dirichlet(np.ones(m * m))
        res = minimize(lambda q: -_conditional_entropy(q, m), q0, method="SLSQP",
                       bounds=[(0.0, 1.0)] * (m * m), constraints=cons,
                       options={"ftol": 1e-14, "maxiter": 1000})
        q = np.clip(res.x, 0, None)
        viol = max(abs(q.sum() - 1), abs((q.reshape(m, m) * W).sum() - a))
        if viol > 1e-8:
            continue
        val = _conditional_entropy(q, m)
        if best is None or val > best[0]:
            best = (val, q)
    if best is None:
        raise PreconditionError("the optimizer found no feasible measure")
    val, q = best
    Q = q.reshape(m, m)
    row = Q.sum(axis=1)
    P = tuple(tuple(float(x) for x in (Q[i] / row[i] if row[i] > 0 else np.full(m, 1 / m))) for i in range(m))
    res = LevelResult(a, max(0.0, val), P, tuple(float(x) for x in row), boundary)
    if boundary:
        raise BoundaryValue(f"a = {a} is on the boundary of L_phi; degenerate supremum {res.value}", res)
    return res


# ---------------------------------------------------------------- irregular witnesses

@dataclass(frozen=True)
class IrregularWitness:
    schedule: BlockSchedule
    report: BirkhoffReport
    entropy: EntropyEstimate
    nonrecurrent: bool
    mu: object
    nu: object

    def to_json(self) -> dict:
        return {"format": 1, "kind": "irregular-witness", "schedule": self.schedule.to_json(),
                "report": self.report.to_json(), "entropy": self.entropy.to_json(),
                "nonrecurrent": self.nonrecurrent, "mu": self.mu.to_json(), "nu": self.nu.to_json()}


def _bisect(f, lo: float, hi: float, target: float, iters: int = 80) -> float:
    """Solve f(t) = target for f increasing on [lo, hi]."""
    for _ in range(iters):
        mid = (lo + hi) / 2
        if f(mid) < target:
            lo = mid
        else:
            hi = mid
    return hi


def _candidates(phi: Observable, m: int, h_target: float) -> list:
    """Measures on {0,1} with entropy h_target: a Bernoulli measure and mixtures
    of the uniform measure with short periodic orbits."""
    from .measures import binary_entropy
    out = []
    p = _bisect(lambda t: binary_entropy(t), 1e-9, 0.5, h_target)
    out.append(MarkovMeasure.bernoulli([1 - to_fraction(round(p, 12)), to_fraction(round(p, 12))], m))
    unif = MarkovMeasure.bernoulli([Fraction(1, 2), Fraction(1, 2)], m)
    theta = to_fraction(round(1 - h_target / log(2), 12))
    for w in ("0", "1", "01"):
        out.append(combine([(1 - theta, unif), (theta, PeriodicMeasure(m, w))]))
    return out


def irregular_witness(phi: Observable, eta: float, m: int = 3, seed: int = 0,
                      prefix: str = "2") -> IrregularWitness:
    """Nonrecurrent point with divergent Birkhoff averages of phi whose
    saturated family has certified entropy at least log 2 - 2 eta."""
    if eta <= 0:
        raise PreconditionError("eta must be positive")
    if m < 3 and prefix:
        raise PreconditionError("a reserved prefix symbol needs m >= 3")
    phi = phi.lift(m)
    lam = SftDescr.full(2, ambient=m)
    lo, hi = phi_range(phi, lam)
    if lo == hi:
        raise DegenerateObservable("phi has the same integral for every invariant measure")
    from .synthesis import SynthesisConfig, build_saturated_schedule
    mu = MarkovMeasure.bernoulli([Fraction(1, 2), Fraction(1, 2)], m)
    h_nu = log(2) - 0.9 * eta
    base = phi.integral(mu)
    nu = max(_candidates(phi, m, h_nu), key=lambda v: abs(phi.integral(v) - base))
    if phi.integral(nu) == base:
        raise DegenerateObservable("no nearby measure separates the phi-integral")
    cfg = SynthesisConfig(K=MeasurePolyline((mu, nu)), lam=lam, ambient=SftDescr.full(m),
                          eta=eta / 2, seed=seed, prefix=prefix)
    s = build_saturated_schedule(cfg)
    rep = birkhoff_bounds(s, phi)
    bound = family_entropy_bound(cfg)
    from .limitsets import is_nonrecurrent
    nonrec = is_nonrecurrent(s, omega_limit(s), comparison_depth(m))
    return IrregularWitness(s, rep, bound, nonrec, mu, nu)
