"""Closed shift-invariant sets built from SFTs, eventually periodic orbits and
extension pieces, with the set algebra needed for limit-set computations.

Equality and inclusion are decided on languages up to a fixed depth.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Union

from .errors import Indeterminate, PreconditionError
from .words import SftDescr, TransitivePoint, check_word, idx, sft_language, sft_from_json, sym

LANGUAGE_BUDGET = 4096


def comparison_depth(m: int) -> int:
    """Largest depth d <= 2 m^2 with m^d within the language budget."""
    d = 1
    while d < 2 * m * m and m ** (d + 1) <= LANGUAGE_BUDGET:
        d += 1
    return d


def canonical_rotation(w: str) -> str:
    # smallest primitive root, smallest rotation
    for p in range(1, len(w) + 1):
        if len(w) % p == 0 and w[:p] * (len(w) // p) == w:
            w = w[:p]
            break
    return min(w[i:] + w[:i] for i in range(len(w)))


@dataclass(frozen=True)
class SftPiece:
    sft: SftDescr

    def language(self, n: int) -> frozenset[str]:
        return _sft_lang(self.sft, n)

    def recurrent(self) -> list:
        return [SftPiece(self.sft.restrict(c).essential) for c in self.sft.components]

    def to_json(self) -> dict:
        return {"piece": "sft", **self.sft.to_json()}


@dataclass(frozen=True)
class OrbitPiece:
    """Orbit of the eventually periodic point ``pre + period^inf``."""

    pre: str
    period: str

    def __post_init__(self):
        if not self.period:
            raise PreconditionError("period word must be nonempty")
        if not self.pre:
            object.__setattr__(self, "period", canonical_rotation(self.period))

    def language(self, n: int) -> frozenset[str]:
        p = len(self.period)
        text = self.pre + self.period * (n // p + 2)
        return frozenset(text[i:i + n] for i in range(len(self.pre) + p))

    def recurrent(self) -> list:
        return [OrbitPiece("", self.period)]

    def to_json(self) -> dict:
        return {"piece": "orbit", "pre": self.pre, "period": self.period}


@dataclass(frozen=True)
class ExtensionPiece:
    """Points ``s + middle + t``: ``s`` a finite word of ``left``, ``t`` a point
    of ``right`` (or exactly the canonical transitive point of ``right_point``).

    Together with their shifts these are the accumulation points created at a
    junction between two recurring parts of a schedule.
    """

    left: "SubshiftDescr"
    middle: str
    right: "SubshiftDescr"
    right_point: SftDescr | None = None

    def language(self, n: int) -> frozenset[str]:
        out = set(self.left.language(n)) | set(self.right.language(n))
        mid = self.middle

        def tails(k: int, j: int = 0) -> list[str]:
            # words of length k read from position j of mid + t
            seg = mid[j:j + k]
            return [seg + t for t in self._right_prefixes(k - len(seg))]

        for i in range(1, n):
            for s in self.left.language(i):
                out.update(s + t for t in tails(n - i))
        for j in range(len(mid)):
            out.update(tails(n, j))
        return frozenset(out)

    def _right_prefixes(self, k: int) -> frozenset[str]:
        if k <= 0:
            return frozenset([""])
        if self.right_point is not None:
            return frozenset([_transitive(self.right_point).prefix(k)])
        return self.right.language(k)

    def recurrent(self) -> list:
        return list(self.left.recurrent().pieces) + list(self.right.recurrent().pieces)

    def to_json(self) -> dict:
        d = {"piece": "extension", "left": self.left.to_json(), "middle": self.middle,
             "right": self.right.to_json()}
        if self.right_point is not None:
            d["right_point"] = self.right_point.to_json()
        return d


Piece = Union[SftPiece, OrbitPiece, ExtensionPiece]


@lru_cache(maxsize=None)
def _transitive(sft: SftDescr) -> TransitivePoint:
    return TransitivePoint(sft)


@lru_cache(maxsize=4096)
def _sft_lang(sft: SftDescr, n: int) -> frozenset[str]:
    if n == 0:
        return frozenset([""]) if not sft.is_empty else frozenset()
    if sft.is_empty:
        return frozenset()
    return frozenset(sft_language(sft, n))


@dataclass(frozen=True)
class SubshiftDescr:
    """Finite union of pieces; the empty union is the empty set."""

    m: int
    pieces: tuple = ()
    label: str = ""

    @classmethod
    def empty(cls, m: int, label: str = "") -> "SubshiftDescr":
        return cls(m, (), label)

    @classmethod
    def from_sft(cls, sft: SftDescr, label: str = "") -> "SubshiftDescr":
        ess = sft.essential
        return cls(sft.m, () if ess.is_empty else (SftPiece(ess),), label)

    @classmethod
    def finite_points(cls, m: int, points: Iterable[tuple[str, str]], label: str = ""):
        pts = []
        for pre, per in points:
            check_word(pre + per, m)
            pts.append(OrbitPiece(pre, per))
        return cls(m, tuple(dict.fromkeys(pts)), label)

    @classmethod
    def periodic(cls, m: int, word: str, label: str = "") -> "SubshiftDescr":
        return cls.finite_points(m, [("", word)], label)

    @property
    def is_empty(self) -> bool:
        return not self.pieces

    def with_label(self, label: str) -> "SubshiftDescr":
        return SubshiftDescr(self.m, self.pieces, label)

    def language(self, n: int) -> frozenset[str]:
        if n == 0:
            return frozenset([""]) if self.pieces else frozenset()
        out: set[str] = set()
        for p in self.pieces:
            out |= p.language(n)
        return frozenset(out)

    def union(self, *others: "SubshiftDescr") -> "SubshiftDescr":
        pieces = list(self.pieces)
        for o in others:
            pieces.extend(o.pieces)
        return SubshiftDescr(self.m, tuple(dict.fromkeys(pieces)))

    def intersect(self, other: "SubshiftDescr") -> "SubshiftDescr":
        out = []
        for a in self.pieces:
            for b in other.pieces:
                out.extend(_intersect_pieces(a, b))
        return SubshiftDescr(self.m, tuple(dict.fromkeys(out)))

    def recurrent(self) -> "SubshiftDescr":
        """Measure center: closure of the union of supports of invariant measures."""
        out = []
        for p in self.pieces:
            out.extend(p.recurrent())
        return SubshiftDescr(self.m, tuple(dict.fromkeys(out)))

    def minimal_sets(self) -> tuple[list[str], bool]:
        """Periodic minimal sets of the measure center and whether any
        recurrent component is richer than a single periodic orbit."""
        orbits, rich = [], False
        for p in self.recurrent().pieces:
            if isinstance(p, OrbitPiece):
                orbits.append(p.period)
            elif p.sft.is_cycle():
                orbits.append(canonical_rotation(p.sft.cycle_word()))
            else:
                rich = True
        return sorted(set(orbits)), rich

    def is_minimal(self) -> bool:
        orbits, rich = self.minimal_sets()
        return not rich and len(orbits) == 1 and self.recurrent().language_equal(self)

    def language_equal(self, other: "SubshiftDescr", depth: int | None = None) -> bool:
        return compare(self, other, depth) == "="

    def to_json(self) -> dict:
        return {"format": 1, "m": self.m, "label": self.label,
                "pieces": [p.to_json() for p in self.pieces]}

    @classmethod
    def from_json(cls, d: dict) -> "SubshiftDescr":
        return cls(d["m"], tuple(_piece_from_json(p) for p in d["pieces"]), d.get("label", ""))

    def describe(self) -> str:
        if self.is_empty:
            return "empty"
        parts = []
        for p in self.pieces:
            if isinstance(p, SftPiece):
                parts.append("SFT[" + ",".join(sym(a) for a in sorted(p.sft.vertices)) + "]"
                             + ("" if _is_full_on_vertices(p.sft) else "*"))
            elif isinstance(p, OrbitPiece):
                parts.append(f"orbit({p.pre}({p.period})^inf)")
            else:
                parts.append(f"ext({p.left.describe()}|{p.middle}|{p.right.describe()})")
        return " U ".join(parts)


def _is_full_on_vertices(sft: SftDescr) -> bool:
    v = sft.vertices
    return all(sft.matrix[a][b] for a in v for b in v)


def _piece_from_json(d: dict):
    kind = d["piece"]
    if kind == "sft":
        return SftPiece(sft_from_json(d))
    if kind == "orbit":
        return OrbitPiece(d["pre"], d["period"])
    rp = d.get("right_point")
    return ExtensionPiece(SubshiftDescr.from_json(d["left"]), d["middle"],
                          SubshiftDescr.from_json(d["right"]),
                          sft_from_json(rp) if rp else None)


def _orbit_in_sft(word: str, sft: SftDescr, cyclic: bool) -> bool:
    w = word + word[0] if cyclic else word
    return sft.allows(w) and all(sft.essential.vertices.__contains__(idx(c)) for c in word)


def _intersect_pieces(a, b) -> list:
    if isinstance(a, ExtensionPiece) or isinstance(b, ExtensionPiece):
        raise Indeterminate("intersection with extension pieces is not supported")
    if isinstance(a, SftPiece) and isinstance(b, SftPiece):
        s = a.sft.intersect(b.sft)
        return [] if s.is_empty else [SftPiece(s)]
    if isinstance(a, SftPiece):
        a, b = b, a
    if isinstance(b, SftPiece):
        if not _orbit_in_sft(a.period, b.sft, cyclic=True):
            return []
        if a.pre and b.sft.allows(a.pre + a.period[0]):
            return [a]
        return [OrbitPiece("", a.period)]
    if canonical_rotation(a.period) != canonical_rotation(b.period):
        return []
    if a == b:
        return [a]
    return [OrbitPiece("", a.period)]


def compare(a: SubshiftDescr, b: SubshiftDescr, depth: int | None = None) -> str:
    """Return '=', '<' (strict subset), '>' (strict superset) or '|' (incomparable)."""
    if a.m != b.m:
        raise PreconditionError("alphabet sizes differ")
    if a.is_empty or b.is_empty:
        if a.is_empty and b.is_empty:
            return "="
        return "<" if a.is_empty else ">"
    d = depth or comparison_depth(a.m)
    la, lb = a.language(d), b.language(d)
    if la == lb:
        return "="
    if la < lb:
        return "<"
    if la > lb:
        return ">"
    return "|"


def subset(a: SubshiftDescr, b: SubshiftDescr, depth: int | None = None) -> bool:
    return compare(a, b, depth) in ("=", "<")
