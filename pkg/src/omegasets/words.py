"""Alphabets, words, subshifts of finite type and the shift metric.

Words are plain ``str`` objects over ``ALPHABET``; symbol ``i`` is the
character ``ALPHABET[i]``.  One-sided shifts only.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from math import comb, factorial, log, prod
from typing import Iterable, Sequence

import numpy as np

from .errors import LengthMismatch, OversizeRequest, PreconditionError, Reducible

ALPHABET = "0123456789abcdefghijklmnopqrstuvwxyz"
WORD_CAP = 2**26

_INDEX = {c: i for i, c in enumerate(ALPHABET)}


def sym(i: int) -> str:
    return ALPHABET[i]


def idx(c: str) -> int:
    return _INDEX[c]


def word_to_array(w: str) -> np.ndarray:
    """Symbol indices of ``w`` as a uint8 array."""
    raw = np.frombuffer(w.encode("ascii"), dtype=np.uint8)
    out = raw - ord("0")
    letters = raw >= ord("a")
    out[letters] = raw[letters] - ord("a") + 10
    return out.astype(np.uint8)


def array_to_word(a: np.ndarray) -> str:
    a = np.asarray(a, dtype=np.uint8)
    if a.size and a.max() >= 10:
        return "".join(ALPHABET[int(v)] for v in a)
    return (a + ord("0")).astype(np.uint8).tobytes().decode("ascii")


def check_word(w: str, m: int) -> None:
    for c in set(w):
        if c not in _INDEX or _INDEX[c] >= m:
            raise PreconditionError(f"symbol {c!r} outside alphabet of size {m}")


def all_words(m: int, n: int) -> list[str]:
    """Every word of length ``n`` over ``m`` symbols, lexicographically."""
    words = [""]
    for _ in range(n):
        words = [w + ALPHABET[s] for w in words for s in range(m)]
    return words


def shift_distance(x: str, y: str) -> Fraction:
    """d(x, y) = 2^-j where j is the first index at which x and y differ."""
    if len(x) != len(y):
        raise LengthMismatch(f"lengths {len(x)} and {len(y)} differ")
    for j, (a, b) in enumerate(zip(x, y)):
        if a != b:
            return Fraction(1, 2**j)
    return Fraction(0)


@dataclass(frozen=True)
class SftDescr:
    """Memory-1 subshift of finite type given by a 0/1 transition matrix."""

    m: int
    matrix: tuple[tuple[bool, ...], ...]

    def __post_init__(self):
        mat = tuple(tuple(bool(v) for v in row) for row in self.matrix)
        if len(mat) != self.m or any(len(r) != self.m for r in mat):
            raise PreconditionError("transition matrix must be m x m")
        if self.m > len(ALPHABET):
            raise PreconditionError("alphabet too large")
        object.__setattr__(self, "matrix", mat)

    kind = "sft"

    @classmethod
    def full(cls, m: int, symbols: Iterable[int] | None = None, ambient: int | None = None):
        """Full shift on ``symbols`` (default all ``m``) inside an alphabet of size ``ambient``."""
        size = ambient if ambient is not None else m
        syms = set(range(m)) if symbols is None else set(symbols)
        return cls(size, tuple(tuple(i in syms and j in syms for j in range(size)) for i in range(size)))

    @classmethod
    def golden_mean(cls, ambient: int = 2):
        mat = [[False] * ambient for _ in range(ambient)]
        mat[0][0] = mat[0][1] = mat[1][0] = True
        return cls(ambient, tuple(map(tuple, mat)))

    @classmethod
    def from_edges(cls, m: int, edges: Iterable[tuple[int, int]]):
        mat = [[False] * m for _ in range(m)]
        for a, b in edges:
            mat[a][b] = True
        return cls(m, tuple(map(tuple, mat)))

    @cached_property
    def array(self) -> np.ndarray:
        return np.array(self.matrix, dtype=bool)

    def successors(self, a: int) -> list[int]:
        return [b for b in range(self.m) if self.matrix[a][b]]

    @cached_property
    def essential(self) -> "SftDescr":
        """Same shift with symbols that cannot continue forever removed."""
        alive = set(range(self.m))
        changed = True
        while changed:
            changed = False
            for a in list(alive):
                if not any(self.matrix[a][b] for b in alive):
                    alive.discard(a)
                    changed = True
        return SftDescr(self.m, tuple(tuple(self.matrix[a][b] and a in alive and b in alive
                                            for b in range(self.m)) for a in range(self.m)))

    @cached_property
    def vertices(self) -> frozenset[int]:
        ess = self.essential
        return frozenset(a for a in range(self.m) if any(ess.matrix[a]))

    @property
    def is_empty(self) -> bool:
        return not self.vertices

    @cached_property
    def components(self) -> tuple[frozenset[int], ...]:
        """Strongly connected components of the essential graph that carry a cycle."""
        ess = self.essential
        verts = sorted(self.vertices)
        reach = {a: self._reach(a) for a in verts}
        comps, seen = [], set()
        for a in verts:
            if a in seen:
                continue
            comp = frozenset(b for b in verts if b in reach[a] and a in reach[b])
            seen |= comp
            if any(ess.matrix[x][y] for x in comp for y in comp):
                comps.append(comp)
        return tuple(comps)

    def _reach(self, a: int) -> set[int]:
        ess = self.essential
        out, todo = {a}, [a]
        while todo:
            x = todo.pop()
            for y in range(self.m):
                if ess.matrix[x][y] and y not in out:
                    out.add(y)
                    todo.append(y)
        return out

    @cached_property
    def irreducible(self) -> bool:
        comps = self.components
        return len(comps) == 1 and comps[0] == self.vertices

    def restrict(self, symbols: Iterable[int]) -> "SftDescr":
        keep = set(symbols)
        return SftDescr(self.m, tuple(tuple(self.matrix[a][b] and a in keep and b in keep
                                            for b in range(self.m)) for a in range(self.m)))

    def intersect(self, other: "SftDescr") -> "SftDescr":
        if other.m != self.m:
            raise PreconditionError("alphabet sizes differ")
        return SftDescr(self.m, tuple(tuple(a and b for a, b in zip(r1, r2))
                                      for r1, r2 in zip(self.matrix, other.matrix))).essential

    def allows(self, w: str) -> bool:
        if not w:
            return True
        ws = [idx(c) for c in w]
        if any(s >= self.m for s in ws):
            return False
        return all(self.matrix[a][b] for a, b in zip(ws, ws[1:]))

    def allows_array(self, a: np.ndarray) -> bool:
        if a.size == 0:
            return True
        if int(a.max()) >= self.m:
            return False
        return bool(self.array[a[:-1], a[1:]].all())

    def is_cycle(self) -> bool:
        """True when the essential graph is a single simple cycle."""
        ess = self.essential
        verts = self.vertices
        return bool(verts) and self.irreducible and all(
            sum(ess.matrix[a]) == 1 for a in verts)

    def cycle_word(self) -> str:
        ess = self.essential
        start = min(self.vertices)
        word, a = "", start
        while True:
            word += sym(a)
            a = ess.successors(a)[0]
            if a == start:
                return word

    def language(self, n: int, cap: int = WORD_CAP) -> list[str]:
        return sft_language(self, n, cap)

    def to_json(self) -> dict:
        return {"format": 1, "kind": "sft", "m": self.m,
                "matrix": [[int(v) for v in row] for row in self.matrix]}


@dataclass(frozen=True)
class BlockSft:
    """Free concatenations of a fixed set of ``n``-blocks.

    The block set is either explicit (``words``) or given implicitly by the
    symbol-count vectors it contains (``classes``): every ``n``-word whose
    symbol counts equal one of the vectors belongs to the set.
    """

    m: int
    n: int
    words: frozenset[str] | None = None
    classes: tuple[tuple[int, ...], ...] | None = None

    kind = "block"

    def __post_init__(self):
        if (self.words is None) == (self.classes is None):
            raise PreconditionError("give exactly one of words / classes")
        if self.words is not None:
            object.__setattr__(self, "words", frozenset(self.words))
            if any(len(w) != self.n for w in self.words):
                raise PreconditionError("all blocks must have length n")
        else:
            cl = tuple(sorted(tuple(c) for c in self.classes))
            if any(len(c) != self.m or sum(c) != self.n for c in cl):
                raise PreconditionError("count vectors must have m entries summing to n")
            object.__setattr__(self, "classes", cl)

    @cached_property
    def size(self) -> int:
        if self.words is not None:
            return len(self.words)
        return sum(factorial(self.n) // prod(factorial(c) for c in cl) for cl in self.classes)

    @property
    def irreducible(self) -> bool:
        return self.size > 0

    def aligned_count(self, k: int) -> int:
        """Number of admissible words of length ``k*n`` starting at a block boundary."""
        return self.size**k

    def contains_block(self, w: str) -> bool:
        if len(w) != self.n:
            return False
        if self.words is not None:
            return w in self.words
        counts = tuple(w.count(sym(s)) for s in range(self.m))
        return counts in set(self.classes)

    def sample(self, rng: np.random.Generator, k: int) -> str:
        """Concatenation of ``k`` blocks drawn uniformly from the block set."""
        if self.words is not None:
            pool = sorted(self.words)
            return "".join(pool[i] for i in rng.integers(0, len(pool), size=k))
        sizes = np.array([factorial(self.n) // prod(factorial(c) for c in cl) for cl in self.classes],
                         dtype=float)
        picks = rng.choice(len(self.classes), size=k, p=sizes / sizes.sum())
        out = []
        for p in picks:
            block = np.repeat(np.arange(self.m, dtype=np.uint8), self.classes[p])
            rng.shuffle(block)
            out.append(array_to_word(block))
        return "".join(out)

    def language(self, length: int, cap: int = WORD_CAP) -> list[str]:
        """Factors of length ``length`` of concatenations of blocks."""
        if self.words is None:
            raise OversizeRequest("implicit block sets do not enumerate their language")
        k = -(-length // self.n) + 1
        if self.size**k > cap:
            raise OversizeRequest(f"{self.size}^{k} concatenations exceed cap {cap}")
        pool = sorted(self.words)
        out = set()
        concat = [""]
        for _ in range(k):
            concat = [c + b for c in concat for b in pool]
        for c in concat:
            for i in range(self.n):
                out.add(c[i:i + length])
        return sorted(out)

    def to_json(self) -> dict:
        d = {"format": 1, "kind": "block", "m": self.m, "n": self.n}
        if self.words is not None:
            d["words"] = sorted(self.words)
        else:
            d["classes"] = [list(c) for c in self.classes]
        return d


def sft_from_json(d: dict):
    if d.get("kind") == "block":
        if "words" in d:
            return BlockSft(d["m"], d["n"], words=frozenset(d["words"]))
        return BlockSft(d["m"], d["n"], classes=tuple(tuple(c) for c in d["classes"]))
    return SftDescr(d["m"], tuple(tuple(bool(v) for v in row) for row in d["matrix"]))


def sft_language(sft: SftDescr | BlockSft, n: int, cap: int = WORD_CAP) -> list[str]:
    """All admissible ``n``-words of ``sft``, sorted lexicographically."""
    if n < 1:
        raise PreconditionError("n must be positive")
    if sft.m**n > cap:
        raise OversizeRequest(f"{sft.m}^{n} words exceed cap {cap}")
    if isinstance(sft, BlockSft):
        return sft.language(n, cap)
    ess = sft.essential
    words = [sym(a) for a in sorted(ess.vertices)]
    for _ in range(n - 1):
        words = [w + sym(b) for w in words for b in ess.successors(idx(w[-1]))]
    return words


def count_words(sft: SftDescr, n: int) -> int:
    """|L_n| via transfer-matrix powers (no enumeration)."""
    ess = sft.essential.array.astype(object)
    v = np.array([1 if a in sft.vertices else 0 for a in range(sft.m)], dtype=object)
    for _ in range(n - 1):
        v = ess.dot(v)
    return int(sum(v))


@lru_cache(maxsize=4096)
def bridge(sft: SftDescr, a: int, b: int) -> str:
    """Shortest word ``w`` with ``a w b`` admissible in ``sft``.

    Raises :class:`Reducible` if no such word exists.
    """
    if sft.matrix[a][b]:
        return ""
    prev = {}
    todo = deque()
    for s in range(sft.m):
        if sft.matrix[a][s]:
            prev[s] = None
            todo.append(s)
    while todo:
        s = todo.popleft()
        if sft.matrix[s][b]:
            path = []
            while s is not None:
                path.append(sym(s))
                s = prev[s]
            return "".join(reversed(path))
        for t in range(sft.m):
            if sft.matrix[s][t] and t not in prev:
                prev[t] = s
                todo.append(t)
    raise Reducible(f"no path from {a} to {b}")


def max_bridge_length(sft: SftDescr) -> int:
    verts = sorted(sft.vertices)
    return max((len(bridge(sft, a, b)) for a in verts for b in verts), default=0)


def join(sft: SftDescr, parts: Sequence[str]) -> str:
    """Concatenate words, inserting shortest bridges where a junction is illegal."""
    out: list[str] = []
    last = None
    for p in parts:
        if not p:
            continue
        if last is not None:
            out.append(bridge(sft, last, idx(p[0])))
        out.append(p)
        last = idx(p[-1])
    return "".join(out)


class TransitivePoint:
    """Prefixes of a canonical transitive point of an irreducible SFT.

    The point lists every admissible word by length, then lexicographically,
    joined by shortest bridges.
    """

    def __init__(self, sft: SftDescr):
        if not sft.irreducible:
            raise Reducible("transitive point needs an irreducible SFT")
        self.sft = sft
        self._text = ""
        self._level = 0

    def prefix(self, n: int) -> str:
        while len(self._text) < n:
            self._level += 1
            self._text = join(self.sft, [self._text] + sft_language(self.sft, self._level))
        return self._text[:n]


def entropy_of_counts(count: int, n: int) -> float:
    return log(count) / n if count > 0 else float("-inf")


def multinomial(counts: Sequence[int]) -> int:
    out, total = 1, 0
    for c in counts:
        total += c
        out *= comb(total, c)
    return out
