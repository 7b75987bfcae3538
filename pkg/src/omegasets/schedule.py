"""Block schedules: finite rules that generate an infinite symbolic point.

A schedule emits, after an optional prefix, rounds ``k = 0, 1, ...``.  Each
round starts with its markers and (optionally) an enumeration of the words of
a subshift, then runs every phase once.  Phase ``p`` of round ``k`` is stage
``j = k*P + p``; it emits ``repeats(j)`` blocks of length ``length(j)`` from
its generator.  Illegal junctions are repaired with shortest bridge words.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, floor, log2
from typing import Iterator, Union

import numpy as np

from .errors import (AmbientViolation, GenericityFailure, OversizeRequest, PreconditionError,
                     UnsupportedSchedule)
from .measures import (MarkovMeasure, PeriodicMeasure, combine, cylinder_vector, measure_from_json,
                       rho_rows, to_fraction)
from .subshifts import SubshiftDescr
from .errors import Reducible
from .words import (SftDescr, TransitivePoint, array_to_word, bridge, check_word, idx, join,
                    sft_from_json, sft_language, sym, word_to_array)

PREFIX_CAP = 2**24
RETRY_LIMIT = 100


@dataclass(frozen=True)
class Template:
    """Closed-form integer sequence floor(c * (j+1)^a * b^j * g^(j^2)), j >= 0."""

    c: Fraction = Fraction(1)
    a: int = 0
    b: Fraction = Fraction(1)
    g: Fraction = Fraction(1)

    def __post_init__(self):
        for name in ("c", "b", "g"):
            object.__setattr__(self, name, to_fraction(getattr(self, name)))
        if self.a < 0 or self.c <= 0 or self.b <= 0 or self.g < 1:
            raise UnsupportedSchedule(f"template {self} outside the supported family")
        if self.key < (Fraction(1), Fraction(1), 0):
            raise UnsupportedSchedule(f"template {self} decreases to zero")

    @property
    def key(self) -> tuple:
        """Growth class; larger keys dominate."""
        return (self.g, self.b, self.a)

    def exact(self, j: int) -> Fraction:
        return self.c * (j + 1) ** self.a * self.b**j * self.g ** (j * j)

    def __call__(self, j: int) -> int:
        v = floor(self.exact(j))
        if v < 1:
            raise UnsupportedSchedule(f"template {self} yields {v} < 1 at stage {j}")
        return v

    @property
    def unbounded(self) -> bool:
        return self.key > (Fraction(1), Fraction(1), 0)

    def times(self, other: "Template") -> "Template":
        return Template(self.c * other.c, self.a + other.a, self.b * other.b, self.g * other.g)

    def to_json(self) -> dict:
        return {"c": str(self.c), "a": self.a, "b": str(self.b), "g": str(self.g)}

    @classmethod
    def from_json(cls, d: dict) -> "Template":
        return cls(Fraction(d["c"]), int(d["a"]), Fraction(d["b"]), Fraction(d["g"]))


def const(v: int) -> Template:
    return Template(Fraction(v))


def geometric(base, c=1) -> Template:
    return Template(Fraction(c), 0, Fraction(base))


@dataclass(frozen=True)
class PeriodicGenerator:
    """Emits the periodic sequence ``word^inf`` for the whole phase."""

    m: int
    word: str

    def __post_init__(self):
        check_word(self.word, self.m)

    @property
    def measure(self) -> PeriodicMeasure:
        return PeriodicMeasure(self.m, self.word)

    def support(self) -> SubshiftDescr:
        return SubshiftDescr.periodic(self.m, self.word)

    def blocks(self, rng, n: int, count: int) -> np.ndarray:
        w = word_to_array(self.word)
        row = np.resize(w, n)
        return np.tile(row, (count, 1))

    def to_json(self) -> dict:
        return {"kind": "periodic", "m": self.m, "word": self.word}


@dataclass(frozen=True)
class MarkovGenerator:
    """Emits blocks sampled from a stationary Markov chain, re-sampled until
    their empirical measure is within ``tolerance + kappa / sqrt(n)`` in rho_J."""

    measure: MarkovMeasure
    tolerance: float = 0.05
    kappa: float = 2.0
    terms: int = 8

    @property
    def m(self) -> int:
        return self.measure.m

    def support(self) -> SubshiftDescr:
        return self.measure.support()

    def limit(self, n: int) -> float:
        return self.tolerance + self.kappa / n**0.5

    def blocks(self, rng: np.random.Generator, n: int, count: int) -> np.ndarray:
        target = cylinder_vector(self.measure, self.terms)
        out = self._sample(rng, n, count)
        bad = np.nonzero(rho_rows(out, target, self.m, self.terms) > self.limit(n))[0]
        tries = 0
        while bad.size:
            tries += 1
            if tries > RETRY_LIMIT:
                raise GenericityFailure(
                    f"no {self.limit(n):.3g}-generic word of length {n} after {RETRY_LIMIT} retries")
            fresh = self._sample(rng, n, bad.size)
            ok = rho_rows(fresh, target, self.m, self.terms) <= self.limit(n)
            out[bad[ok]] = fresh[ok]
            bad = bad[~ok]
        return out

    def _sample(self, rng: np.random.Generator, n: int, count: int) -> np.ndarray:
        P = np.array([[float(x) for x in r] for r in self.measure.P])
        pi = np.array([float(x) for x in self.measure.pi])
        if self.measure.is_bernoulli:
            return rng.choice(self.m, size=(count, n), p=pi).astype(np.uint8)
        cum = np.cumsum(P, axis=1)
        cum[:, -1] = 1.0
        out = np.empty((count, n), dtype=np.uint8)
        state = rng.choice(self.m, size=count, p=pi)
        out[:, 0] = state
        u = rng.random((count, n))
        for t in range(1, n):
            state = (u[:, t, None] > cum[state]).sum(axis=1)
            out[:, t] = state
        return out

    def to_json(self) -> dict:
        return {"kind": "markov", "measure": self.measure.to_json(), "tolerance": self.tolerance,
                "kappa": self.kappa, "terms": self.terms}


@dataclass(frozen=True)
class MixtureGenerator:
    """Each block is split into consecutive sub-blocks, one per component,
    with lengths proportional to the weights."""

    components: tuple

    def __post_init__(self):
        comps = tuple((to_fraction(w), g) for w, g in self.components if to_fraction(w) > 0)
        if sum(w for w, _ in comps) != 1:
            raise PreconditionError("mixture weights must sum to 1")
        object.__setattr__(self, "components", comps)

    @property
    def m(self) -> int:
        return self.components[0][1].m

    @property
    def measure(self):
        return combine([(w, g.measure) for w, g in self.components])

    def support(self) -> SubshiftDescr:
        out = SubshiftDescr.empty(self.m)
        for _, g in self.components:
            out = out.union(g.support())
        return out

    def cuts(self, n: int) -> list[int]:
        acc, cuts = Fraction(0), [0]
        for w, _ in self.components:
            acc += w
            cuts.append(floor(acc * n))
        return cuts

    def to_json(self) -> dict:
        return {"kind": "mixture", "components": [[str(w), g.to_json()] for w, g in self.components]}


@dataclass(frozen=True)
class DenseSequenceGenerator:
    """Stage with block length n emits the length-n prefixes of x_1, ..., x_N,
    where x_t is the t-th word of ``sft`` (by length, then lexicographically)
    continued forever along lexicographically smallest successors."""

    sft: SftDescr

    measure = None

    @property
    def m(self) -> int:
        return self.sft.m

    def support(self) -> SubshiftDescr:
        return SubshiftDescr.from_sft(self.sft)

    def point_prefix(self, t: int, n: int) -> str:
        ess = self.sft.essential
        length, words = 1, sft_language(ess, 1)
        while t >= len(words):
            t -= len(words)
            length += 1
            words = sft_language(ess, length)
        w = words[t][:n]
        last = idx(words[t][-1])
        while len(w) < n:
            last = ess.successors(last)[0]
            w += sym(last)
        return w

    def to_json(self) -> dict:
        return {"kind": "dense", "sft": self.sft.to_json()}


Generator = Union[PeriodicGenerator, MarkovGenerator, MixtureGenerator, DenseSequenceGenerator]


def generator_from_json(d: dict):
    if d["kind"] == "periodic":
        return PeriodicGenerator(d["m"], d["word"])
    if d["kind"] == "dense":
        return DenseSequenceGenerator(sft_from_json(d["sft"]))
    if d["kind"] == "markov":
        return MarkovGenerator(measure_from_json(d["measure"]), d["tolerance"], d["kappa"], d["terms"])
    return MixtureGenerator(tuple((Fraction(w), generator_from_json(g)) for w, g in d["components"]))


@dataclass(frozen=True)
class Phase:
    generator: object
    length: Template
    repeats: Template

    @property
    def total(self) -> Template:
        return self.length.times(self.repeats)

    def to_json(self) -> dict:
        return {"generator": self.generator.to_json(), "length": self.length.to_json(),
                "repeats": self.repeats.to_json()}


@dataclass(frozen=True)
class Marker:
    """At the start of every round emit ``symbol`` followed by the first
    ``length(k)`` symbols of the canonical transitive point of ``source``."""

    symbol: str
    source: SftDescr
    length: Template = field(default_factory=lambda: Template(1, 1))

    def word(self, k: int) -> str:
        return self.symbol + TransitivePoint(self.source).prefix(self.length(k))

    def to_json(self) -> dict:
        return {"symbol": self.symbol, "source": self.source.to_json(), "length": self.length.to_json()}


def enumeration_length(k: int) -> int:
    return max(1, ceil(log2(k + 2)))


@dataclass(frozen=True)
class BlockSchedule:
    ambient: SftDescr
    prefix: str = ""
    phases: tuple = ()
    markers: tuple = ()
    enumeration: SftDescr | None = None
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "phases", tuple(self.phases))
        object.__setattr__(self, "markers", tuple(self.markers))
        if not self.phases:
            raise UnsupportedSchedule("a schedule needs at least one phase")
        check_word(self.prefix, self.ambient.m)
        for ph in self.phases:
            if ph.generator.m != self.ambient.m:
                raise UnsupportedSchedule("generator alphabet differs from ambient")
        if not 0 <= self.seed < 2**64:
            raise PreconditionError("seed must be a 64-bit unsigned integer")

    @property
    def m(self) -> int:
        return self.ambient.m

    def stage(self, k: int, p: int) -> int:
        return k * len(self.phases) + p

    def to_json(self) -> dict:
        return {"format": 1, "ambient": self.ambient.to_json(), "prefix": self.prefix,
                "phases": [p.to_json() for p in self.phases],
                "markers": [mk.to_json() for mk in self.markers],
                "enumeration": self.enumeration.to_json() if self.enumeration else None,
                "seed": self.seed}

    @classmethod
    def from_json(cls, d: dict) -> "BlockSchedule":
        if d.get("format") != 1:
            raise PreconditionError("unsupported schedule format")
        return cls(
            ambient=sft_from_json(d["ambient"]),
            prefix=d["prefix"],
            phases=tuple(Phase(generator_from_json(p["generator"]), Template.from_json(p["length"]),
                               Template.from_json(p["repeats"])) for p in d["phases"]),
            markers=tuple(Marker(mk["symbol"], sft_from_json(mk["source"]),
                                 Template.from_json(mk["length"])) for mk in d["markers"]),
            enumeration=sft_from_json(d["enumeration"]) if d.get("enumeration") else None,
            seed=int(d["seed"]),
        )


# ---------------------------------------------------------------- materialization

def _chunk_blocks(n: int) -> int:
    return max(1, (1 << 16) // n)


def _rng(*key: int) -> np.random.Generator:
    return np.random.default_rng(list(key))


def _rows(gen, rng, n: int, count: int) -> list[np.ndarray]:
    """Blocks as lists of segments (mixtures split into sub-blocks)."""
    if isinstance(gen, MixtureGenerator):
        cuts = gen.cuts(n)
        parts = []
        for i, (_, comp) in enumerate(gen.components):
            ln = cuts[i + 1] - cuts[i]
            parts.append(comp.blocks(rng, ln, count) if ln > 0 else None)
        segs = []
        for r in range(count):
            for part in parts:
                if part is not None:
                    segs.append(part[r])
        return segs
    rows = gen.blocks(rng, n, count)
    if isinstance(gen, PeriodicGenerator):
        return [rows.ravel()]
    G = gen.measure.support_sft.array
    ok = G[rows[:-1, -1], rows[1:, 0]]
    if ok.all():
        return [rows.ravel()]
    breaks = np.nonzero(~ok)[0] + 1
    return [chunk.ravel() for chunk in np.split(rows, breaks)]


def _phase_graph(gen, ambient: SftDescr) -> SftDescr:
    if isinstance(gen, MarkovGenerator):
        return gen.measure.support_sft
    return ambient


def iter_segments(s: BlockSchedule) -> Iterator[tuple[np.ndarray, SftDescr, str]]:
    """Yield (segment, graph used to bridge into it, tag) in emission order."""
    if s.prefix:
        yield word_to_array(s.prefix), s.ambient, "prefix"
    offsets = [0] * len(s.phases)
    k = 0
    while True:
        for mk in s.markers:
            yield word_to_array(mk.word(k)), s.ambient, "marker"
        if s.enumeration is not None:
            words = sft_language(s.enumeration, enumeration_length(k))
            yield word_to_array(join(s.enumeration, words)), s.ambient, "enumeration"
        for p, ph in enumerate(s.phases):
            j = s.stage(k, p)
            n, N = ph.length(j), ph.repeats(j)
            gen = ph.generator
            graph = _phase_graph(gen, s.ambient)
            if isinstance(gen, PeriodicGenerator):
                total = n * N
                w = word_to_array(gen.word)
                # a periodic phase resumes its word where the previous stage stopped
                w = np.roll(w, -(offsets[p] % len(w)))
                offsets[p] += total
                step = max(len(w), (1 << 16) // len(w) * len(w))
                done, first = 0, True
                while done < total:
                    ln = min(step, total - done)
                    yield np.resize(w, ln), s.ambient if first else graph, f"phase{p}"
                    done += ln
                    first = False
                continue
            if isinstance(gen, DenseSequenceGenerator):
                for t in range(N):
                    yield word_to_array(gen.point_prefix(t, n)), s.ambient, f"phase{p}"
                continue
            per = _chunk_blocks(n)
            done, chunk, first = 0, 0, True
            while done < N:
                cnt = min(per, N - done)
                rng = _rng(s.seed, k, p, chunk)
                for seg in _rows(gen, rng, n, cnt):
                    if seg.size:
                        yield seg, s.ambient if first else graph, f"phase{p}"
                        first = False
                done += cnt
                chunk += 1
        k += 1


def schedule_array(s: BlockSchedule, N: int, cap: int = PREFIX_CAP) -> np.ndarray:
    if N < 1:
        raise PreconditionError("N must be positive")
    if N > cap:
        raise OversizeRequest(f"prefix length {N} exceeds cap {cap}")
    out: list[np.ndarray] = []
    total = 0
    last = None
    for seg, graph, tag in iter_segments(s):
        if not s.ambient.allows_array(seg):
            raise AmbientViolation(f"{tag} emitted a word outside the ambient language")
        if last is not None:
            first = int(seg[0])
            if not graph.matrix[last][first]:
                try:
                    br = bridge(graph, last, first)
                except Reducible:
                    br = bridge(s.ambient, last, first)
                if not s.ambient.allows(sym(last) + br + sym(first)):
                    raise AmbientViolation(f"junction before {tag} leaves the ambient language")
                out.append(word_to_array(br))
                total += len(br)
        out.append(seg)
        total += seg.size
        last = int(seg[-1])
        if total >= N:
            break
    return np.concatenate(out)[:N]


def schedule_prefix(s: BlockSchedule, N: int, cap: int = PREFIX_CAP) -> str:
    """First ``N`` symbols of the point generated by ``s``."""
    return array_to_word(schedule_array(s, N, cap))
