"""Natural and Banach densities of sets of visiting times, and syndeticity."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import ceil

WINDOW_EXPONENT = 0.75

import numpy as np

from .errors import PreconditionError, UnsupportedPattern
from .measures import window_codes
from .schedule import BlockSchedule, schedule_array
from .words import check_word, word_to_array

INF = float("inf")


@dataclass(frozen=True)
class FinitePrefix:
    """The indices of a set that lie below ``horizon``."""

    indices: tuple[int, ...]
    horizon: int

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        if self.horizon < 1:
            raise PreconditionError("horizon must be at least 1")
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise PreconditionError("indices must be strictly increasing")
        if idx and (idx[0] < 0 or idx[-1] >= self.horizon):
            raise PreconditionError("indices must lie in [0, horizon)")
        object.__setattr__(self, "indices", idx)

    def indicator(self) -> np.ndarray:
        out = np.zeros(self.horizon, dtype=bool)
        out[list(self.indices)] = True
        return out

    def complement(self) -> "FinitePrefix":
        return FinitePrefix(tuple(np.nonzero(~self.indicator())[0].tolist()), self.horizon)

    def to_json(self) -> dict:
        return {"format": 1, "kind": "finite", "horizon": self.horizon, "indices": list(self.indices)}


@dataclass(frozen=True)
class PeriodicPattern:
    """{i : i mod period in residues}, with finitely many indices added or removed."""

    period: int
    residues: tuple[int, ...]
    added: tuple[int, ...] = ()
    removed: tuple[int, ...] = ()

    def __post_init__(self):
        if self.period < 1:
            raise UnsupportedPattern("period must be positive")
        object.__setattr__(self, "residues", tuple(sorted({r % self.period for r in self.residues})))
        object.__setattr__(self, "added", tuple(sorted(set(self.added))))
        object.__setattr__(self, "removed", tuple(sorted(set(self.removed))))
        if any(i < 0 for i in self.added + self.removed):
            raise UnsupportedPattern("exceptions must be nonnegative")

    def contains(self, i: int) -> bool:
        if i in self.removed:
            return False
        return i in self.added or (i % self.period) in self.residues

    def to_json(self) -> dict:
        return {"format": 1, "kind": "periodic", "period": self.period, "residues": list(self.residues),
                "added": list(self.added), "removed": list(self.removed)}


@dataclass(frozen=True)
class GeometricPattern:
    """Union over k >= 0 of [A*beta^k + A0, B*beta^k + B0)."""

    A: int
    B: int
    beta: int
    A0: int = 0
    B0: int = 0

    def __post_init__(self):
        if self.beta < 2 or self.A < 1 or self.B < self.A:
            raise UnsupportedPattern("need beta >= 2 and 1 <= A <= B")
        if self.A * self.beta < self.B:
            raise UnsupportedPattern("intervals of consecutive rounds overlap")
        if self.B == self.A and self.B0 <= self.A0:
            raise UnsupportedPattern("intervals are empty")
        for k in range(64):
            lo, hi = self.interval(k)
            if lo < 0 or hi < lo or self.interval(k + 1)[0] < hi:
                raise UnsupportedPattern(f"round {k} interval is not ordered")

    def interval(self, k: int) -> tuple[int, int]:
        return self.A * self.beta**k + self.A0, self.B * self.beta**k + self.B0

    def intervals_below(self, n: int) -> list[tuple[int, int]]:
        out, k = [], 0
        while True:
            lo, hi = self.interval(k)
            if lo >= n:
                return out
            out.append((lo, min(hi, n)))
            k += 1

    def to_json(self) -> dict:
        return {"format": 1, "kind": "geometric", "A": self.A, "B": self.B, "beta": self.beta,
                "A0": self.A0, "B0": self.B0}


IndexSet = FinitePrefix | PeriodicPattern | GeometricPattern


def index_set_from_json(d: dict):
    kind = d["kind"]
    if kind == "finite":
        return FinitePrefix(tuple(d["indices"]), d["horizon"])
    if kind == "periodic":
        return PeriodicPattern(d["period"], tuple(d["residues"]), tuple(d["added"]), tuple(d["removed"]))
    if kind == "geometric":
        return GeometricPattern(d["A"], d["B"], d["beta"], d["A0"], d["B0"])
    raise UnsupportedPattern(f"unknown index set kind {kind!r}")


def prefix_of(S, horizon: int) -> FinitePrefix:
    """Truncate any index set to a finite prefix."""
    if isinstance(S, FinitePrefix):
        return FinitePrefix(tuple(i for i in S.indices if i < horizon), horizon)
    ind = np.zeros(horizon, dtype=bool)
    if isinstance(S, PeriodicPattern):
        for r in S.residues:
            ind[r::S.period] = True
        ind[[i for i in S.added if i < horizon]] = True
        ind[[i for i in S.removed if i < horizon]] = False
    elif isinstance(S, GeometricPattern):
        for lo, hi in S.intervals_below(horizon):
            ind[lo:hi] = True
    else:
        raise UnsupportedPattern(f"unsupported index set {type(S).__name__}")
    return FinitePrefix(tuple(np.nonzero(ind)[0].tolist()), horizon)


@dataclass(frozen=True)
class DensityProfile:
    B_lower: Fraction
    d_lower: Fraction
    d_upper: Fraction
    B_upper: Fraction
    exact: bool

    def as_tuple(self) -> tuple:
        return (self.B_lower, self.d_lower, self.d_upper, self.B_upper)

    def to_json(self) -> dict:
        return {"format": 1, "B_lower": str(self.B_lower), "d_lower": str(self.d_lower),
                "d_upper": str(self.d_upper), "B_upper": str(self.B_upper), "exact": self.exact}


def _extreme_ratio(counts: np.ndarray, lengths: np.ndarray, largest: bool) -> Fraction:
    r = counts / lengths
    best = r.max() if largest else r.min()
    cand = np.nonzero(np.abs(r - best) <= 1e-9)[0]
    fr = [Fraction(int(counts[i]), int(lengths[i])) for i in cand]
    return max(fr) if largest else min(fr)


def _min_window(N: int) -> int:
    # shortest Banach window: N^(3/4), so window averages resolve to ~N^(-3/4)
    L = max(1, int(N**WINDOW_EXPONENT))
    while (L + 1) ** 4 <= N**3:
        L += 1
    while L > 1 and L**4 > N**3:
        L -= 1
    return L


def _finite_profile(S: FinitePrefix) -> DensityProfile:
    N = S.horizon
    F = np.concatenate([[0], np.cumsum(S.indicator(), dtype=np.int64)])
    lo = max(1, ceil(N / 8))
    ns = np.arange(lo, N + 1)
    d_lower = _extreme_ratio(F[ns], ns, largest=False)
    d_upper = _extreme_ratio(F[ns], ns, largest=True)
    lengths = sorted({ceil(N / 2**i) for i in range(N.bit_length() + 1)
                      if ceil(N / 2**i) >= _min_window(N)})
    b_lo, b_hi = Fraction(1), Fraction(0)
    for L in lengths:
        win = F[L:] - F[:-L]
        b_lo = min(b_lo, Fraction(int(win.min()), L))
        b_hi = max(b_hi, Fraction(int(win.max()), L))
    return DensityProfile(min(b_lo, d_lower), d_lower, d_upper, max(b_hi, d_upper), exact=False)


def density_profile(S) -> DensityProfile:
    """(B_lower, d_lower, d_upper, B_upper); exact for patterns, windowed estimates for prefixes."""
    if isinstance(S, FinitePrefix):
        return _finite_profile(S)
    if isinstance(S, PeriodicPattern):
        d = Fraction(len(S.residues), S.period)
        return DensityProfile(d, d, d, d, exact=True)
    if isinstance(S, GeometricPattern):
        A, B, beta = S.A, S.B, S.beta
        if A == B:
            zero = Fraction(0)
            return DensityProfile(zero, zero, zero, zero, exact=True)
        upper = Fraction((B - A) * beta, (beta - 1) * B)
        lower = Fraction(B - A, A * (beta - 1))
        b_upper = Fraction(1)
        b_lower = Fraction(0) if A * beta > B else Fraction(1)
        return DensityProfile(b_lower, lower, upper, b_upper, exact=True)
    raise UnsupportedPattern(f"unsupported index set {type(S).__name__}")


def _max_gap(elements: list[int]) -> int:
    gaps = [b - a for a, b in zip(elements, elements[1:])]
    return max([elements[0] + 1] + gaps)


def is_syndetic(S) -> tuple[bool, float | int]:
    """Whether gaps are bounded, and the largest gap (first element counts as a gap from -1)."""
    if isinstance(S, FinitePrefix):
        raise UnsupportedPattern("syndeticity is not decidable from a finite prefix")
    if isinstance(S, PeriodicPattern):
        if not S.residues:
            return False, INF
        last = max(S.added + S.removed, default=0)
        stop = last + 2 * S.period + 1
        elems = [i for i in range(stop) if S.contains(i)]
        cyc = [r for r in S.residues]
        cyc_gap = max([b - a for a, b in zip(cyc, cyc[1:])] + [cyc[0] + S.period - cyc[-1]])
        return True, max(_max_gap(elems), cyc_gap)
    if isinstance(S, GeometricPattern):
        if S.A == S.B or S.A * S.beta > S.B:
            return False, INF
        elems = []
        for k in range(4):
            lo, hi = S.interval(k)
            elems.extend(range(lo, hi))
        return True, _max_gap(elems)
    raise UnsupportedPattern(f"unsupported index set {type(S).__name__}")


def visit_times(s: BlockSchedule, cyl: str, horizon: int) -> FinitePrefix:
    """Indices j < horizon at which the scheduled point reads ``cyl``."""
    check_word(cyl, s.m)
    if not cyl:
        raise PreconditionError("cylinder word must be nonempty")
    x = schedule_array(s, horizon + len(cyl) - 1)
    code = 0
    for v in word_to_array(cyl):
        code = code * s.m + int(v)
    hits = np.nonzero(window_codes(x, s.m, len(cyl)) == code)[0]
    return FinitePrefix(tuple(hits.tolist()), horizon)
