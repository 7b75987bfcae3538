"""Limit sets of scheduled points: the omega-limit set, the four statistical
omega-limit sets, the syndetic center, the set V_f of limit empirical measures
and the twelve-case classification.

Everything is computed symbolically from the schedule's templates; no prefix
of the point is materialized except for the short nonrecurrence check.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import groupby

import numpy as np

from .errors import SyndeticCenterNonEmpty, UnsupportedSchedule
from .measures import (PeriodicMeasure, combine, cylinder_vector, ergodic_components, mix,
                       rho_weights)
from .schedule import (BlockSchedule, DenseSequenceGenerator, MarkovGenerator, MixtureGenerator,
                       PeriodicGenerator, Template, schedule_prefix)
from .subshifts import ExtensionPiece, SftPiece, SubshiftDescr, compare, comparison_depth
from .words import bridge, idx

ONE = Fraction(1)


# ---------------------------------------------------------------- polylines

@dataclass(frozen=True)
class MeasurePolyline:
    """Vertices alpha_1..alpha_q joined by segments; ``closed`` adds alpha_q -> alpha_1."""

    vertices: tuple
    closed: bool = False

    def __post_init__(self):
        if not self.vertices:
            raise UnsupportedSchedule("a polyline needs at least one vertex")
        if len({mu.m for mu in self.vertices}) != 1:
            raise UnsupportedSchedule("polyline vertices use different alphabets")

    @property
    def m(self) -> int:
        return self.vertices[0].m

    @property
    def is_singleton(self) -> bool:
        return len(set(self.vertices)) == 1

    def segments(self) -> list[tuple]:
        v = list(self.vertices)
        if len(v) == 1:
            return [(v[0], v[0])]
        pairs = list(zip(v, v[1:]))
        if self.closed and len(v) > 2:
            pairs.append((v[-1], v[0]))
        return pairs

    def vectors(self, terms: int) -> list[tuple[np.ndarray, np.ndarray]]:
        cache: dict = {}

        def vec(mu):
            if mu not in cache:
                cache[mu] = cylinder_vector(mu, terms)
            return cache[mu]
        return [(vec(a), vec(b)) for a, b in self.segments()]

    def distance(self, point: np.ndarray, terms: int) -> float:
        return point_to_segments(point, self.vectors(terms), rho_weights(self.m, terms))

    def to_json(self) -> dict:
        return {"closed": self.closed, "vertices": [mu.to_json() for mu in self.vertices]}


def point_to_segment(p: np.ndarray, a: np.ndarray, b: np.ndarray, w: np.ndarray) -> float:
    """Exact weighted-L1 distance from p to the segment [a, b]."""
    d = b - a
    nz = np.abs(d) > 0
    cand = np.concatenate([[0.0, 1.0], np.clip((p[nz] - a[nz]) / d[nz], 0.0, 1.0)])
    vals = np.abs(p[None, :] - (a[None, :] + cand[:, None] * d[None, :])) @ w
    return float(vals.min())


def point_to_segments(p, segs, w) -> float:
    return min(point_to_segment(p, a, b, w) for a, b in segs)


def sample_segments(segs, per_segment: int = 200) -> np.ndarray:
    ts = np.linspace(0.0, 1.0, per_segment + 1)
    return np.concatenate([a[None, :] + ts[:, None] * (b - a)[None, :] for a, b in segs])


def hausdorff_points_to_polyline(points: np.ndarray, K: MeasurePolyline, terms: int,
                                 per_segment: int = 200) -> float:
    """rho_J Hausdorff distance between a finite point cloud and a polyline."""
    w = rho_weights(K.m, terms)
    segs = K.vectors(terms)
    forward = max(point_to_segments(p, segs, w) for p in points)
    backward = 0.0
    for q in sample_segments(segs, per_segment):
        backward = max(backward, float((np.abs(points - q[None, :]) @ w).min()))
    return max(forward, backward)


def hausdorff_polylines(A: MeasurePolyline, B: MeasurePolyline, terms: int, per_segment: int = 200) -> float:
    w = rho_weights(A.m, terms)
    sa, sb = A.vectors(terms), B.vectors(terms)
    one = max(point_to_segments(p, sb, w) for p in sample_segments(sa, per_segment))
    two = max(point_to_segments(p, sa, w) for p in sample_segments(sb, per_segment))
    return max(one, two)


# ---------------------------------------------------------------- schedule analysis

def generator_measure(gen):
    if isinstance(gen, PeriodicGenerator):
        return PeriodicMeasure(gen.m, gen.word)
    return gen.measure


def generator_support(gen) -> SubshiftDescr:
    return gen.support()


def _symbols(sub: SubshiftDescr) -> set[int]:
    out: set[int] = set()
    for w in sub.language(1):
        out.add(idx(w))
    return out


def _extra_key(s: BlockSchedule) -> tuple:
    """Growth class, in the round index, of the per-round marker and enumeration cost."""
    keys = [mk.length.key for mk in s.markers]
    if s.enumeration is not None:
        keys.append((ONE, ONE, s.m.bit_length() + 1))
    return max(keys, default=None)


def _round_key(t: Template, P: int, p: int) -> tuple:
    # template evaluated at j = k*P + p, as a template in k
    return (t.g ** (P * P), t.b**P * t.g ** (2 * p * P), t.a)


def check_normal_form(s: BlockSchedule) -> None:
    """Raise UnsupportedSchedule unless the limit analysis below is exact."""
    P = len(s.phases)
    for p, ph in enumerate(s.phases):
        gen = ph.generator
        if isinstance(gen, (MarkovGenerator, MixtureGenerator)) and not ph.length.unbounded:
            raise UnsupportedSchedule(f"phase {p}: random blocks need unbounded length")
        if isinstance(gen, MarkovGenerator):
            sup = gen.measure.support_sft
            if sup.intersect(s.ambient) != sup.essential:
                raise UnsupportedSchedule(f"phase {p}: support not inside the ambient shift")
        if P > 1 and not ph.total.unbounded:
            raise UnsupportedSchedule(f"phase {p}: bounded phase length in a multi-phase schedule")
    extra = _extra_key(s)
    if extra is not None:
        main = max(_round_key(ph.total, P, p) for p, ph in enumerate(s.phases))
        g, b, a = main
        cumulative = main if (g > 1 or b > 1) else (ONE, ONE, a + 1)
        if not extra < cumulative:
            raise UnsupportedSchedule("markers or enumeration do not have zero density")


def dominant_phases(s: BlockSchedule) -> list[int]:
    keys = [ph.total.key for ph in s.phases]
    top = max(keys)
    return [p for p, k in enumerate(keys) if k == top]


def _dedupe_cycle(vs: list) -> list:
    out = [k for k, _ in groupby(vs)]
    while len(out) > 1 and out[0] == out[-1]:
        out.pop()
    return out


@dataclass(frozen=True)
class VfResult:
    polyline: MeasurePolyline
    depth: int
    center: SubshiftDescr
    vstar_exact: bool

    @property
    def is_singleton(self) -> bool:
        return self.polyline.is_singleton

    def contains(self, mu, terms: int = 16, tol: float = 1e-12) -> bool:
        return self.polyline.distance(cylinder_vector(mu, terms), terms) <= tol

    def tables(self) -> list:
        return [mix([(1, v)], self.depth) for v in self.polyline.vertices]

    def to_json(self) -> dict:
        return {"depth": self.depth, "singleton": self.is_singleton, "polyline": self.polyline.to_json(),
                "vstar": {"center": self.center.to_json(), "exact": self.vstar_exact}}


def vf_polyline(s: BlockSchedule) -> MeasurePolyline:
    check_normal_form(s)
    P = len(s.phases)
    dom = dominant_phases(s)
    mus = [generator_measure(ph.generator) for ph in s.phases]
    if any(mu is None for mu in mus):
        raise UnsupportedSchedule("limit measures of dense-sequence phases are not tracked")
    g, b, _ = s.phases[dom[0]].total.key
    if len(dom) == 1:
        return MeasurePolyline((mus[dom[0]],))
    if g > 1:
        verts = _dedupe_cycle([mus[p] for p in dom])
        return MeasurePolyline(tuple(verts), closed=True)
    cs = {p: s.phases[p].total.c for p in dom}
    if b == 1:
        total = sum(cs.values())
        return MeasurePolyline((combine([(cs[p] / total, mus[p]) for p in dom]),))
    # geometric regime: the state at the end of phase p weights earlier stages by b^-r
    verts = []
    for p in dom:
        weights: dict[int, Fraction] = {}
        for q in dom:
            r = (p - q) % P
            weights[q] = cs[q] * b ** (-r) / (1 - b ** (-P))
        total = sum(weights.values())
        verts.append(combine([(weights[q] / total, mus[q]) for q in dom]))
    verts = _dedupe_cycle(verts)
    return MeasurePolyline(tuple(verts), closed=True)


def vf_limits(s: BlockSchedule, d: int = 3) -> VfResult:
    """V_f(x) as a polyline of limit empirical measures; V*_f through the measure center."""
    poly = vf_polyline(s)
    center = omega_limit(s).recurrent()
    exact = len(center.pieces) == 1 and isinstance(center.pieces[0], SftPiece)
    return VfResult(poly, d, center, exact)


# ---------------------------------------------------------------- omega-limit set

def _junction_pieces(left: SubshiftDescr, right: SubshiftDescr, s: BlockSchedule) -> list:
    middles = set()
    for a in _symbols(left):
        for b in _symbols(right):
            middles.add(bridge(s.ambient, a, b))
    return [ExtensionPiece(left, mid, right) for mid in sorted(middles)]


def omega_limit(s: BlockSchedule) -> SubshiftDescr:
    """Accumulation points of the orbit, described as a union of pieces."""
    check_normal_form(s)
    m = s.m
    elements: list[tuple[str, object]] = []
    for mk in s.markers:
        elements.append(("marker", mk))
    if s.enumeration is not None:
        elements.append(("support", SubshiftDescr.from_sft(s.enumeration)))
    for ph in s.phases:
        elements.append(("support", generator_support(ph.generator)))
    if len(s.phases) == 1 and not elements[:-1] and not isinstance(s.phases[0].generator,
                                                                  DenseSequenceGenerator):
        return elements[-1][1].with_label("omega_f")

    def body(el) -> SubshiftDescr:
        kind, v = el
        return SubshiftDescr.from_sft(v.source) if kind == "marker" else v

    out = SubshiftDescr.empty(m)
    for el in elements:
        out = out.union(body(el))
    for ph in s.phases:
        if isinstance(ph.generator, DenseSequenceGenerator):
            sup = generator_support(ph.generator)
            out = out.union(SubshiftDescr(m, tuple(_junction_pieces(sup, sup, s))))
    for i, el in enumerate(elements):
        prev = body(elements[i - 1])
        if el[0] == "marker":
            mk = el[1]
            mids = {bridge(s.ambient, a, idx(mk.symbol)) + mk.symbol for a in _symbols(prev)}
            pieces = tuple(ExtensionPiece(prev, mid, body(el), mk.source) for mid in sorted(mids))
            out = out.union(SubshiftDescr(m, pieces))
        else:
            out = out.union(SubshiftDescr(m, tuple(_junction_pieces(prev, el[1], s))))
    return out.with_label("omega_f")


# ---------------------------------------------------------------- statistical sets

def measure_support(mu) -> SubshiftDescr:
    out = SubshiftDescr.empty(mu.m)
    for c in ergodic_components(mu):
        out = out.union(c.support())
    return out


def syndetic_center_of(omega_f: SubshiftDescr) -> SubshiftDescr:
    orbits, rich = omega_f.minimal_sets()
    if rich or len(orbits) != 1:
        return SubshiftDescr.empty(omega_f.m, "omega_B_lower")
    return SubshiftDescr.periodic(omega_f.m, orbits[0], "omega_B_lower")


def syndetic_center(s: BlockSchedule) -> SubshiftDescr:
    """The unique minimal set visited with bounded gaps, or the empty set."""
    return syndetic_center_of(omega_limit(s))


@dataclass(frozen=True)
class CaseLabel:
    index: int
    primed: bool = False

    def __post_init__(self):
        if not 1 <= self.index <= 6:
            raise ValueError("case index must be in 1..6")

    def __str__(self) -> str:
        return f"{self.index}{chr(39) if self.primed else ''}"

    @classmethod
    def parse(cls, text: str) -> "CaseLabel":
        text = str(text).strip()
        primed = text.endswith(("'", "p", "′"))
        return cls(int(text.rstrip("'p′")), primed)


ALL_LABELS = tuple(CaseLabel(i, p) for p in (False, True) for i in range(1, 7))

_CASES = {("<", "=", "="): 1, ("<", "=", "<"): 2, ("=", "<", "="): 3,
          ("<", "<", "="): 4, ("=", "<", "<"): 5, ("<", "<", "<"): 6}


@dataclass(frozen=True)
class OmegaReport:
    omega_f: SubshiftDescr
    omega_B_lower: SubshiftDescr
    omega_d_lower: SubshiftDescr
    omega_d_upper: SubshiftDescr
    omega_B_upper: SubshiftDescr
    depth: int
    vf: MeasurePolyline
    nonrecurrent: bool
    case: CaseLabel | None = None
    relations: tuple = field(default=())

    def chain(self) -> list:
        return [self.omega_B_lower, self.omega_d_lower, self.omega_d_upper, self.omega_B_upper, self.omega_f]

    def chain_holds(self) -> bool:
        sets = self.chain()
        return all(compare(a, b, self.depth) in ("=", "<") for a, b in zip(sets, sets[1:]))

    def to_json(self) -> dict:
        return {"format": 1, "depth": self.depth, "case": str(self.case) if self.case else None,
                "nonrecurrent": self.nonrecurrent, "relations": list(self.relations),
                "omega_f": self.omega_f.to_json(), "omega_B_lower": self.omega_B_lower.to_json(),
                "omega_d_lower": self.omega_d_lower.to_json(), "omega_d_upper": self.omega_d_upper.to_json(),
                "omega_B_upper": self.omega_B_upper.to_json(), "vf": self.vf.to_json()}


def is_nonrecurrent(s: BlockSchedule, omega_f: SubshiftDescr, depth: int) -> bool:
    """True when some prefix word of x is not a word of omega_f."""
    x = schedule_prefix(s, depth)
    return any(x[:n] not in omega_f.language(n) for n in range(1, depth + 1))


def statistical_omegas(s: BlockSchedule, depth: int | None = None) -> OmegaReport:
    omega_f = omega_limit(s)
    d = depth or comparison_depth(s.m)
    poly = vf_polyline(s)
    supports = [measure_support(v) for v in poly.vertices]
    lower = supports[0]
    upper = SubshiftDescr.empty(s.m)
    for sup in supports:
        lower = lower.intersect(sup)
        upper = upper.union(sup)
    return OmegaReport(
        omega_f=omega_f,
        omega_B_lower=syndetic_center_of(omega_f),
        omega_d_lower=lower.with_label("omega_d_lower"),
        omega_d_upper=upper.with_label("omega_d_upper"),
        omega_B_upper=omega_f.recurrent().with_label("omega_B_upper"),
        depth=d,
        vf=poly,
        nonrecurrent=is_nonrecurrent(s, omega_f, d),
    )


def classify_report(rep: OmegaReport) -> CaseLabel:
    if not rep.omega_B_lower.is_empty:
        raise SyndeticCenterNonEmpty("the syndetic center is nonempty: " + rep.omega_B_lower.describe())
    sets = rep.chain()
    rel = tuple(compare(a, b, rep.depth) for a, b in zip(sets, sets[1:]))
    if any(r not in ("=", "<") for r in rel) or rel[:3] not in _CASES:
        raise UnsupportedSchedule(f"inclusion chain {rel} matches no case")
    return CaseLabel(_CASES[rel[:3]], rel[3] == "<")


def classify_case(s: BlockSchedule, depth: int | None = None) -> tuple[CaseLabel, OmegaReport]:
    rep = statistical_omegas(s, depth)
    label = classify_report(rep)
    sets = rep.chain()
    rel = tuple(compare(a, b, rep.depth) for a, b in zip(sets, sets[1:]))
    return label, OmegaReport(**{**rep.__dict__, "case": label, "relations": rel})
