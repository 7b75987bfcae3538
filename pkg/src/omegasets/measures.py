"""Invariant and empirical measures on shift spaces and the truncated weak* metric.

Every measure exposes ``cylinder_weight(word)``; the metric compares measures
on cylinder indicators enumerated by length, then lexicographically.
Entropies are in nats.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from math import log
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import AlphabetMismatch, DepthTooLarge, PreconditionError, Reducible, WeightSum
from .subshifts import SubshiftDescr, canonical_rotation
from .words import SftDescr, all_words, check_word, idx, sym, word_to_array

DEPTH_CAP = 12
ROW_SUM_TOL = 1e-12


def to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    # decimal repr of floats keeps user-typed values like 0.7 exact
    return Fraction(repr(float(x)))


@lru_cache(maxsize=256)
def cylinders(m: int, count: int) -> tuple[str, ...]:
    """The first ``count`` cylinders in length-then-lex order."""
    out: list[str] = []
    length = 1
    while len(out) < count:
        out.extend(all_words(m, length))
        length += 1
    return tuple(out[:count])


def depth_for(m: int, terms: int) -> int:
    return max(len(c) for c in cylinders(m, terms))


def entropy_of_probs(ps: Iterable[float]) -> float:
    return -sum(p * log(p) for p in ps if p > 0)


def binary_entropy(p: float) -> float:
    return entropy_of_probs([p, 1 - p])


@dataclass(frozen=True)
class CylinderMeasure:
    """Weights on the cylinders of one depth; shorter cylinders are marginals."""

    m: int
    depth: int
    weights: tuple[tuple[str, Fraction], ...]

    def __post_init__(self):
        w = tuple(sorted((k, to_fraction(v)) for k, v in dict(self.weights).items() if v != 0))
        if any(len(k) != self.depth for k, _ in w):
            raise PreconditionError("all cylinder words must have the stated depth")
        if w and sum(v for _, v in w) != 1:
            total = sum(v for _, v in w)
            if abs(float(total) - 1) > 1e-9:
                raise WeightSum(f"weights sum to {float(total)}")
        object.__setattr__(self, "weights", w)

    @cached_property
    def table(self) -> dict[str, Fraction]:
        return dict(self.weights)

    @cached_property
    def _marginals(self) -> dict[str, Fraction]:
        out: dict[str, Fraction] = {}
        for w, v in self.weights:
            for k in range(1, self.depth + 1):
                out[w[:k]] = out.get(w[:k], Fraction(0)) + v
        return out

    def cylinder_weight(self, w: str) -> Fraction:
        if len(w) > self.depth:
            raise DepthTooLarge(f"cylinder of length {len(w)} beyond depth {self.depth}")
        return self._marginals.get(w, Fraction(0))

    def to_json(self) -> dict:
        return {"format": 1, "kind": "cylinder", "m": self.m, "depth": self.depth,
                "weights": {k: str(v) for k, v in self.weights}}

    def to_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["word", "weight"])
        for k, v in self.weights:
            wr.writerow([k, f"{float(v):.17g}"])
        return buf.getvalue()


def _solve_stationary(P: tuple[tuple[Fraction, ...], ...]) -> tuple[Fraction, ...]:
    m = len(P)
    # rows: (P^T - I) pi = 0 with the last equation replaced by sum(pi) = 1
    A = [[P[j][i] - (1 if i == j else 0) for j in range(m)] for i in range(m)]
    A[-1] = [Fraction(1)] * m
    b = [Fraction(0)] * (m - 1) + [Fraction(1)]
    for col in range(m):
        piv = next((r for r in range(col, m) if A[r][col] != 0), None)
        if piv is None:
            raise Reducible("stationary vector is not unique")
        A[col], A[piv] = A[piv], A[col]
        b[col], b[piv] = b[piv], b[col]
        for r in range(m):
            if r != col and A[r][col] != 0:
                f = A[r][col] / A[col][col]
                A[r] = [x - f * y for x, y in zip(A[r], A[col])]
                b[r] -= f * b[col]
    return tuple(b[i] / A[i][i] for i in range(m))


@dataclass(frozen=True)
class MarkovMeasure:
    """Stationary memory-1 Markov measure with exact rational transition matrix."""

    P: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        P = tuple(tuple(to_fraction(x) for x in row) for row in self.P)
        m = len(P)
        if m == 0 or any(len(r) != m for r in P):
            raise PreconditionError("transition matrix must be square")
        if any(x < 0 for r in P for x in r):
            raise PreconditionError("negative transition probability")
        for r in P:
            if abs(float(sum(r)) - 1) > ROW_SUM_TOL:
                raise PreconditionError("rows must sum to 1")
        object.__setattr__(self, "P", P)
        support = self.support_sft
        if not support.irreducible:
            raise Reducible("support of the chain is not irreducible")

    @classmethod
    def bernoulli(cls, probs, m: int | None = None) -> "MarkovMeasure":
        """Bernoulli measure; a scalar p means P(symbol 1) = p on two symbols."""
        if not isinstance(probs, (list, tuple)):
            p = to_fraction(probs)
            probs = [1 - p, p]
        probs = [to_fraction(x) for x in probs]
        if m is not None and m > len(probs):
            probs = probs + [Fraction(0)] * (m - len(probs))
        keep = [i for i, p in enumerate(probs) if p > 0]
        rows = []
        for i in range(len(probs)):
            rows.append(tuple(probs) if i in keep else
                        tuple(Fraction(1) if j == keep[0] else Fraction(0) for j in range(len(probs))))
        return cls(tuple(rows))

    @property
    def m(self) -> int:
        return len(self.P)

    @cached_property
    def support_sft(self) -> SftDescr:
        pos = tuple(tuple(x > 0 for x in r) for r in self.P)
        full = SftDescr(self.m, pos)
        # restrict to the recurrent class visited by the stationary chain
        comps = full.components
        closed = [c for c in comps if all(not pos[a][b] or b in c for a in c for b in range(self.m))]
        if len(closed) != 1:
            return full
        return full.restrict(closed[0]).essential

    @cached_property
    def pi(self) -> tuple[Fraction, ...]:
        verts = sorted(self.support_sft.vertices)
        sub = tuple(tuple(self.P[a][b] for b in verts) for a in verts)
        small = _solve_stationary(sub)
        out = [Fraction(0)] * self.m
        for a, v in zip(verts, small):
            out[a] = v
        return tuple(out)

    @cached_property
    def entropy(self) -> float:
        return -sum(float(self.pi[i]) * float(p) * log(float(p))
                    for i in range(self.m) for p in self.P[i] if p > 0)

    @property
    def is_ergodic(self) -> bool:
        return True

    @property
    def is_bernoulli(self) -> bool:
        verts = sorted(self.support_sft.vertices)
        return all(self.P[a] == self.P[verts[0]] for a in verts)

    def cylinder_weight(self, w: str) -> Fraction:
        if not w:
            return Fraction(1)
        s = [idx(c) for c in w]
        if max(s) >= self.m:
            return Fraction(0)
        out = self.pi[s[0]]
        for a, b in zip(s, s[1:]):
            out *= self.P[a][b]
            if out == 0:
                break
        return out

    def support(self) -> SubshiftDescr:
        sft = self.support_sft
        if sft.is_cycle():
            return SubshiftDescr.periodic(self.m, sft.cycle_word())
        return SubshiftDescr.from_sft(sft)

    def to_json(self) -> dict:
        return {"kind": "markov", "P": [[str(x) for x in r] for r in self.P]}


@dataclass(frozen=True)
class PeriodicMeasure:
    """Uniform measure on the orbit of ``word^inf``."""

    m: int
    word: str

    def __post_init__(self):
        check_word(self.word, self.m)
        object.__setattr__(self, "word", canonical_rotation(self.word))

    entropy = 0.0
    is_ergodic = True

    def cylinder_weight(self, w: str) -> Fraction:
        p = len(self.word)
        text = self.word * (len(w) // p + 2)
        hits = sum(1 for i in range(p) if text.startswith(w, i))
        return Fraction(hits, p)

    def support(self) -> SubshiftDescr:
        return SubshiftDescr.periodic(self.m, self.word)

    def to_json(self) -> dict:
        return {"kind": "periodic", "m": self.m, "word": self.word}


def dirac(m: int, s: int = 0) -> PeriodicMeasure:
    return PeriodicMeasure(m, sym(s))


@dataclass(frozen=True)
class Mixture:
    """Finite convex combination of measures (not ergodic unless trivial)."""

    entries: tuple[tuple[Fraction, object], ...]

    def __post_init__(self):
        merged: dict = {}
        for w, mu in self.entries:
            w = to_fraction(w)
            if w < 0:
                raise WeightSum("negative weight")
            if w:
                merged[mu] = merged.get(mu, Fraction(0)) + w
        if sum(merged.values()) != 1:
            raise WeightSum(f"weights sum to {float(sum(merged.values()))}")
        ms = {mu.m for mu in merged}
        if len(ms) != 1:
            raise AlphabetMismatch("mixture components use different alphabets")
        object.__setattr__(self, "entries", tuple(sorted(((w, mu) for mu, w in merged.items()),
                                                          key=lambda e: repr(e[1]))))

    @property
    def m(self) -> int:
        return self.entries[0][1].m

    @property
    def entropy(self) -> float:
        return sum(float(w) * mu.entropy for w, mu in self.entries)

    @property
    def is_ergodic(self) -> bool:
        return len(self.entries) == 1

    def cylinder_weight(self, w: str) -> Fraction:
        return sum((c * mu.cylinder_weight(w) for c, mu in self.entries), Fraction(0))

    def components(self) -> list:
        return [mu for _, mu in self.entries]

    def support(self) -> SubshiftDescr:
        out = SubshiftDescr.empty(self.m)
        for _, mu in self.entries:
            out = out.union(mu.support())
        return out

    def to_json(self) -> dict:
        return {"kind": "mixture", "entries": [[str(w), mu.to_json()] for w, mu in self.entries]}


Measure = Union[MarkovMeasure, PeriodicMeasure, Mixture, CylinderMeasure]


def simplify(mu):
    """Collapse one-entry mixtures; flatten nested mixtures."""
    if isinstance(mu, Mixture):
        flat: list = []
        for w, sub in mu.entries:
            sub = simplify(sub)
            if isinstance(sub, Mixture):
                flat.extend((w * w2, s2) for w2, s2 in sub.entries)
            else:
                flat.append((w, sub))
        res = Mixture(tuple(flat))
        return res.entries[0][1] if len(res.entries) == 1 else res
    return mu


def combine(entries: Sequence[tuple]) -> object:
    return simplify(Mixture(tuple((to_fraction(w), mu) for w, mu in entries)))


def ergodic_components(mu) -> list:
    mu = simplify(mu)
    return mu.components() if isinstance(mu, Mixture) else [mu]


def measure_from_json(d: dict):
    kind = d["kind"]
    if kind == "markov":
        return MarkovMeasure(tuple(tuple(Fraction(x) for x in r) for r in d["P"]))
    if kind == "periodic":
        return PeriodicMeasure(d["m"], d["word"])
    if kind == "mixture":
        return Mixture(tuple((Fraction(w), measure_from_json(mu)) for w, mu in d["entries"]))
    if kind == "cylinder":
        return CylinderMeasure(d["m"], d["depth"], tuple((k, Fraction(v)) for k, v in d["weights"].items()))
    raise PreconditionError(f"unknown measure kind {kind!r}")


def empirical_measure(w: str, d: int, m: int | None = None) -> CylinderMeasure:
    """Frequencies of the |w|-d+1 length-d windows of ``w`` (no wraparound)."""
    if d < 1 or d > len(w):
        raise DepthTooLarge(f"depth {d} not in [1, {len(w)}]")
    if m is None:
        m = max(idx(c) for c in w) + 1
    total = len(w) - d + 1
    if len(w) > 4096:
        counts = window_counts(word_to_array(w), m, d)
        weights = tuple((word, Fraction(int(c), total)) for word, c in zip(all_words(m, d), counts) if c)
    else:
        tally: dict[str, int] = {}
        for i in range(total):
            tally[w[i:i + d]] = tally.get(w[i:i + d], 0) + 1
        weights = tuple((k, Fraction(c, total)) for k, c in tally.items())
    return CylinderMeasure(m, d, weights)


def window_codes(a: np.ndarray, m: int, d: int) -> np.ndarray:
    """Base-m integer code of every length-d window along the last axis."""
    n = a.shape[-1] - d + 1
    codes = np.zeros(a.shape[:-1] + (n,), dtype=np.int64)
    for t in range(d):
        codes = codes * m + a[..., t:t + n]
    return codes


def window_counts(a: np.ndarray, m: int, d: int) -> np.ndarray:
    return np.bincount(window_codes(a, m, d), minlength=m**d)


def weak_star_distance(xi, tau, terms: int = 16) -> tuple[float, float]:
    """Truncated metric rho_J and the bound on its distance to the full metric."""
    if xi.m != tau.m:
        raise AlphabetMismatch("measures live on different alphabets")
    total = Fraction(0)
    for j, c in enumerate(cylinders(xi.m, terms), start=1):
        total += abs(xi.cylinder_weight(c) - tau.cylinder_weight(c)) / 2**j
    return float(total), 2.0 ** (1 - terms)


def rho(xi, tau, terms: int = 16) -> float:
    return weak_star_distance(xi, tau, terms)[0]


def cylinder_vector(mu, terms: int) -> np.ndarray:
    return np.array([float(mu.cylinder_weight(c)) for c in cylinders(mu.m, terms)])


def rho_weights(m: int, terms: int) -> np.ndarray:
    return 0.5 ** np.arange(1, terms + 1)


def empirical_vectors(blocks: np.ndarray, m: int, terms: int) -> np.ndarray:
    """Empirical cylinder weights (first ``terms`` cylinders) of each row."""
    blocks = np.atleast_2d(blocks)
    rows, n = blocks.shape
    out = np.zeros((rows, terms))
    col = 0
    length = 1
    while col < terms:
        k = min(m**length, terms - col)
        if length > n:
            break
        codes = window_codes(blocks, m, length)
        flat = codes + (np.arange(rows)[:, None] * m**length)
        counts = np.bincount(flat.ravel(), minlength=rows * m**length).reshape(rows, m**length)
        out[:, col:col + k] = counts[:, :k] / (n - length + 1)
        col += k
        length += 1
    return out


def rho_rows(blocks: np.ndarray, target: np.ndarray, m: int, terms: int) -> np.ndarray:
    """rho_J between each row's empirical measure and a target cylinder vector."""
    emp = empirical_vectors(blocks, m, terms)
    return np.abs(emp - target[None, :]) @ rho_weights(m, terms)


def markov_invariants(P) -> tuple[tuple[float, ...], float, SftDescr]:
    """Stationary vector by power iteration, entropy rate (nats) and support."""
    arr = np.array([[float(to_fraction(x)) for x in row] for row in P])
    if np.any(np.abs(arr.sum(axis=1) - 1) > ROW_SUM_TOL):
        raise PreconditionError("rows must sum to 1")
    mu = MarkovMeasure(tuple(tuple(row) for row in P))
    lazy = 0.5 * (arr + np.eye(len(arr)))
    v = np.full(len(arr), 1.0 / len(arr))
    for _ in range(100000):
        nxt = v @ lazy
        if np.abs(nxt - v).max() < 1e-15:
            v = nxt
            break
        v = nxt
    v = v / v.sum()
    h = -sum(v[i] * p * log(p) for i in range(len(arr)) for p in arr[i] if p > 0)
    return tuple(float(x) for x in v), float(h), mu.support_sft


def mix(entries: Sequence[tuple], depth: int) -> CylinderMeasure:
    """Cylinder table at ``depth`` of a convex combination of measures."""
    ws = [to_fraction(w) for w, _ in entries]
    if any(w < 0 for w in ws) or sum(ws) != 1:
        raise WeightSum("weights must be nonnegative and sum to 1")
    if depth > DEPTH_CAP:
        raise DepthTooLarge(f"depth {depth} beyond cap {DEPTH_CAP}")
    ms = {mu.m for _, mu in entries}
    if len(ms) != 1:
        raise AlphabetMismatch("measures on different alphabets")
    m = ms.pop()
    table = []
    for word in all_words(m, depth):
        v = sum((w * mu.cylinder_weight(word) for w, (_, mu) in zip(ws, entries)), Fraction(0))
        if v:
            table.append((word, v))
    return CylinderMeasure(m, depth, tuple(table))


def mix_support(entries: Sequence[tuple]) -> SubshiftDescr:
    m = entries[0][1].m
    out = SubshiftDescr.empty(m)
    for w, mu in entries:
        if to_fraction(w) > 0:
            out = out.union(mu.support())
    return out
