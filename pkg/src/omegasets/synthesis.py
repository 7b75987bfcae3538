"""Constructions: generic words, saturated schedules, case witnesses,
omega-set realizers and entropy-dense block horseshoes."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import exp, lgamma, log

import numpy as np

from .entropy import EntropyEstimate, family_entropy_bound, sft_entropy
from .errors import (AmbientTooSmall, ConfigViolatesGrowth, GenericityFailure, NotProperSubset,
                     NotTransitive, PreconditionError, SlackTooTight)
from .limitsets import (CaseLabel, MeasurePolyline, OmegaReport, classify_case, hausdorff_polylines,
                        measure_support)
from .measures import (MarkovMeasure, Mixture, PeriodicMeasure, depth_for, dirac, empirical_measure,
                       ergodic_components, measure_from_json, rho_rows, cylinder_vector,
                       weak_star_distance)
from .schedule import (BlockSchedule, DenseSequenceGenerator, MarkovGenerator, Marker, MixtureGenerator,
                       PeriodicGenerator, Phase, Template)
from .subshifts import ExtensionPiece, SubshiftDescr, compare, subset
from .words import (BlockSft, SftDescr, array_to_word, max_bridge_length, sft_from_json, sft_language,
                    sym)

GENERIC_RETRIES = 10_000
DEFAULT_LENGTHS = Template(8, 0, 2)
DEFAULT_REPEATS = Template(1, 0, 1, 2)


# ---------------------------------------------------------------- generic words

def generic_word(mu, n: int, zeta: float, seed: int = 0, terms: int = 16,
                 periodic: bool = False) -> str:
    """An n-word of the support of ``mu`` whose empirical measure is within
    ``zeta`` of ``mu`` in rho_J.  With ``periodic`` the word also closes up
    into an admissible cycle, so its infinite repetition is a periodic point."""
    if zeta <= 0:
        raise PreconditionError("zeta must be positive")
    if isinstance(mu, PeriodicMeasure):
        w = (mu.word * (n // len(mu.word) + 1))[:n]
        if _word_close(w, mu, zeta, terms):
            return w
        raise GenericityFailure(f"{n} is too short for a {zeta}-generic word")
    if not isinstance(mu, MarkovMeasure):
        raise PreconditionError("generic words are drawn from Markov or periodic measures")
    rng = np.random.default_rng(seed)
    gen = MarkovGenerator(mu)
    target = cylinder_vector(mu, terms)
    support = mu.support_sft
    tried = 0
    while tried < GENERIC_RETRIES:
        batch = min(64, GENERIC_RETRIES - tried)
        rows = gen._sample(rng, n, batch)
        tried += batch
        good = np.nonzero(rho_rows(rows, target, mu.m, terms) <= zeta)[0]
        for i in good:
            w = array_to_word(rows[i])
            if periodic and not support.allows(w[-1] + w[0]):
                continue
            if _word_close(w, mu, zeta, terms):
                return w
    raise GenericityFailure(f"no {zeta}-generic word of length {n} in {GENERIC_RETRIES} draws")


def _word_close(w: str, mu, zeta: float, terms: int) -> bool:
    d = min(depth_for(mu.m, terms), len(w))
    if depth_for(mu.m, terms) > len(w):
        return False
    return weak_star_distance(empirical_measure(w, d, mu.m), mu, terms)[0] <= zeta


# ---------------------------------------------------------------- configs

def _generator_for(mu, zeta: float):
    if isinstance(mu, Mixture):
        return MixtureGenerator(tuple((w, _generator_for(c, zeta)) for w, c in mu.entries))
    if isinstance(mu, PeriodicMeasure):
        return PeriodicGenerator(mu.m, mu.word)
    if isinstance(mu, MarkovMeasure):
        return MarkovGenerator(mu, tolerance=zeta)
    raise PreconditionError(f"no generator for {type(mu).__name__}")


@dataclass(frozen=True)
class SynthesisConfig:
    K: MeasurePolyline
    lam: SftDescr
    ambient: SftDescr | None = None
    zeta: float = 0.05
    lengths: Template = DEFAULT_LENGTHS
    repeats: Template = DEFAULT_REPEATS
    eta: float = 0.05
    seed: int = 0
    enumerate_lambda: bool = False
    prefix: str = ""
    markers: tuple = ()

    @property
    def amb(self) -> SftDescr:
        return self.ambient if self.ambient is not None else self.lam

    def phase_measures(self) -> list:
        """Vertices in traversal order; open polylines are walked back and forth."""
        v = list(self.K.vertices)
        if self.K.closed or len(v) <= 2:
            return v
        return v + v[-2:0:-1]

    def validate(self) -> None:
        if not self.lam.irreducible:
            raise NotTransitive("Lambda must be a transitive SFT")
        lam_set = SubshiftDescr.from_sft(self.lam)
        for mu in self.K.vertices:
            if not subset(measure_support(mu), lam_set):
                raise PreconditionError("every measure of K must live on Lambda")
        T = self.lengths.times(self.repeats)
        if T.g <= 1:
            raise ConfigViolatesGrowth("block totals must grow superexponentially (N_k n_k dominates)")
        prev_key = (T.g, T.b / T.g**2, T.a)
        if not self.lengths.key < prev_key:
            raise ConfigViolatesGrowth("block length does not vanish against the previous total")
        if self.zeta <= 0 or self.eta <= 0:
            raise PreconditionError("zeta and eta must be positive")

    def growth_table(self, stages: int = 30) -> list[dict]:
        out, S = [], 0
        for j in range(stages):
            n, N = self.lengths(j), self.repeats(j)
            out.append({"stage": j, "n": n, "N": N, "M_prev": S,
                        "eq1": n / S if S else float("inf"),
                        "eq2": N * n / S if S else float("inf")})
            S += N * n
        return out

    def to_json(self) -> dict:
        return {"format": 1, "K": self.K.to_json(), "lambda": self.lam.to_json(),
                "ambient": self.amb.to_json(), "zeta": self.zeta, "lengths": self.lengths.to_json(),
                "repeats": self.repeats.to_json(), "eta": self.eta, "seed": self.seed,
                "enumerate_lambda": self.enumerate_lambda, "prefix": self.prefix,
                "markers": [mk.to_json() for mk in self.markers]}

    @classmethod
    def from_json(cls, d: dict) -> "SynthesisConfig":
        K = MeasurePolyline(tuple(measure_from_json(v) for v in d["K"]["vertices"]), d["K"]["closed"])
        return cls(K=K, lam=sft_from_json(d["lambda"]), ambient=sft_from_json(d["ambient"]),
                   zeta=d["zeta"], lengths=Template.from_json(d["lengths"]),
                   repeats=Template.from_json(d["repeats"]), eta=d["eta"], seed=d["seed"],
                   enumerate_lambda=d["enumerate_lambda"], prefix=d["prefix"],
                   markers=tuple(Marker(mk["symbol"], sft_from_json(mk["source"]),
                                        Template.from_json(mk["length"])) for mk in d["markers"]))


def build_saturated_schedule(cfg: SynthesisConfig) -> BlockSchedule:
    """Schedule cycling through the vertices of K with superexponentially growing stages."""
    cfg.validate()
    phases = tuple(Phase(_generator_for(mu, cfg.zeta), cfg.lengths, cfg.repeats)
                   for mu in cfg.phase_measures())
    return BlockSchedule(ambient=cfg.amb, prefix=cfg.prefix, phases=phases, markers=cfg.markers,
                         enumeration=cfg.lam if cfg.enumerate_lambda else None, seed=cfg.seed)


def bridge_overhead_stage(cfg: SynthesisConfig, stages: int = 30) -> int | None:
    """First stage from which bridges take less than zeta/8 of every block."""
    L = max_bridge_length(cfg.amb)
    for j in range(stages):
        if all(L / cfg.lengths(i) < cfg.zeta / 8 for i in range(j, stages)):
            return j
    return None


# ---------------------------------------------------------------- certificates

@dataclass
class Certificate:
    label: CaseLabel
    mode: str
    report: OmegaReport
    config: SynthesisConfig
    schedule: BlockSchedule
    vf_distance: float
    entropy: EntropyEstimate
    checks: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def to_json(self) -> dict:
        return {"format": 1, "kind": "certificate", "label": str(self.label), "mode": self.mode,
                "ok": self.ok, "checks": self.checks, "vf_distance": self.vf_distance,
                "entropy": self.entropy.to_json(), "report": self.report.to_json(),
                "config": self.config.to_json(), "schedule": self.schedule.to_json()}


def certify(label: CaseLabel, mode: str, cfg: SynthesisConfig, s: BlockSchedule,
            terms: int = 16) -> Certificate:
    got, rep = classify_case(s)
    dist = hausdorff_polylines(rep.vf, cfg.K, terms)
    bound = family_entropy_bound(cfg)
    checks = {
        "label": got == label,
        "nonrecurrence": rep.nonrecurrent == (mode == "nonrecurrent"),
        "chain": rep.chain_holds(),
        "vf_matches_K": dist <= cfg.zeta,
        "bridge_overhead": bridge_overhead_stage(cfg) is not None,
    }
    return Certificate(label, mode, rep, cfg, s, dist, bound, checks)


def verify_certificate(d: dict) -> Certificate:
    """Recompute every claim of a serialized certificate."""
    from .limitsets import CaseLabel as _CL
    cfg = SynthesisConfig.from_json(d["config"])
    s = BlockSchedule.from_json(d["schedule"])
    return certify(_CL.parse(d["label"]), d["mode"], cfg, s)


# ---------------------------------------------------------------- case witnesses

MODES = ("nonrecurrent", "recurrent_nontransitive")


def case_measures(index: int, m: int) -> tuple[MeasurePolyline, bool]:
    """Target K and whether Lambda is enumerated, for each of the six cases."""
    half = Fraction(1, 2)
    full = MarkovMeasure.bernoulli([half, half], m)
    d0, d1 = dirac(m, 0), dirac(m, 1)
    if index == 1:
        return MeasurePolyline((full,)), False
    if index == 2:
        rows = [[half, half] + [0] * (m - 2)] + [[1] + [0] * (m - 1) for _ in range(m - 1)]
        return MeasurePolyline((MarkovMeasure(tuple(map(tuple, rows))),)), True
    if index == 3:
        return MeasurePolyline((d0, full, d1)), False
    if index == 4:
        return MeasurePolyline((d0, full)), False
    if index == 5:
        return MeasurePolyline((d0, d1)), True
    if index == 6:
        return MeasurePolyline((d0, Mixture(((half, d0), (half, d1))))), True
    raise PreconditionError("case index must be in 1..6")


def realize_case(label, m: int = 3, mode: str = "nonrecurrent", seed: int = 0,
                 eta: float = 0.05, zeta: float = 0.05) -> tuple[BlockSchedule, Certificate]:
    """Schedule whose point realizes ``label``, with its certificate."""
    if not isinstance(label, CaseLabel):
        label = CaseLabel.parse(label)
    if mode not in MODES:
        raise PreconditionError(f"mode must be one of {MODES}")
    if m < 3:
        raise AmbientTooSmall("a reserved symbol outside Lambda needs m >= 3")
    if mode == "recurrent_nontransitive" and label.primed:
        raise PreconditionError("primed labels are realized only in nonrecurrent mode")
    lam = SftDescr.full(2, ambient=m)
    K, enum = case_measures(label.index, m)
    markers = (Marker("2", lam, Template(1, 1)),) if label.primed else ()
    prefix = "" if mode != "nonrecurrent" else ("22" if label.primed else "2")
    cfg = SynthesisConfig(K=K, lam=lam, ambient=SftDescr.full(m), zeta=zeta, eta=eta, seed=seed,
                          enumerate_lambda=enum, prefix=prefix, markers=markers)
    s = build_saturated_schedule(cfg)
    return s, certify(label, mode, cfg, s)


# ---------------------------------------------------------------- omega-set realizer

def omega_realizer(A: SftDescr, ambient: SftDescr) -> BlockSchedule:
    """Point whose omega-limit set contains A and lies in the shifts-preimage of A."""
    if not ambient.irreducible:
        raise NotTransitive("ambient must be a transitive SFT")
    if A.is_empty:
        raise PreconditionError("A must be nonempty")
    a_set, amb_set = SubshiftDescr.from_sft(A), SubshiftDescr.from_sft(ambient)
    rel = compare(a_set, amb_set)
    if rel == "=":
        raise NotProperSubset("A equals the ambient shift")
    if rel != "<":
        raise NotProperSubset("A is not inside the ambient shift")
    gen = DenseSequenceGenerator(A.essential)
    grow = Template(1, 1)
    return BlockSchedule(ambient=ambient, phases=(Phase(gen, grow, grow),))


def eventually_in(omega: SubshiftDescr, A: SftDescr) -> bool:
    """Every piece is inside A or is a junction whose forward part lies in A."""
    a_set = SubshiftDescr.from_sft(A)
    for p in omega.pieces:
        target = p.right if isinstance(p, ExtensionPiece) else SubshiftDescr(omega.m, (p,))
        if not subset(target, a_set):
            return False
    return True


# ---------------------------------------------------------------- horseshoes

def _log_multinomial(counts) -> float:
    return lgamma(sum(counts) + 1) - sum(lgamma(c + 1) for c in counts)


def _compositions(n: int, m: int):
    if m == 1:
        yield (n,)
        return
    for first in range(n + 1):
        for rest in _compositions(n - first, m - 1):
            yield (first,) + rest


def entropy_dense_horseshoe(mu, eta: float, zeta: float, n_cap: int = 4096,
                            explicit_cap: int = 2**16) -> BlockSft:
    """Block shift of all n-words whose symbol frequencies are within zeta/4 of
    mu, for the least n with log|Gamma_n|/n >= h_mu - eta."""
    if eta <= 0 or zeta <= 0:
        raise PreconditionError("eta and zeta must be positive")
    comps = ergodic_components(mu)
    if len(comps) != 1:
        raise PreconditionError("horseshoes are built for ergodic measures")
    mu = comps[0]
    m = mu.m
    if isinstance(mu, PeriodicMeasure):
        return BlockSft(m, len(mu.word), words=frozenset([mu.word]))
    h = mu.entropy
    if h <= 0:
        w = mu.support_sft.cycle_word() if mu.support_sft.is_cycle() else "0"
        return BlockSft(m, len(w), words=frozenset([w]))
    freqs = [float(mu.cylinder_weight(sym(a))) for a in range(m)]
    tol = zeta / 4
    best = (-1.0, 0)
    if mu.is_bernoulli:
        syms = [a for a in range(m) if freqs[a] > 0]
        for n in range(1, n_cap + 1):
            classes = [c for c in _compositions(n, len(syms))
                       if all(abs(ci / n - freqs[a]) <= tol + 1e-15 for ci, a in zip(c, syms))]
            if not classes:
                continue
            logs = [_log_multinomial(c) for c in classes]
            top = max(logs)
            rate = (top + log(sum(exp(v - top) for v in logs))) / n
            best = max(best, (rate, n))
            if rate >= h - eta:
                full = []
                for c in classes:
                    vec = [0] * m
                    for ci, a in zip(c, syms):
                        vec[a] = ci
                    full.append(tuple(vec))
                return BlockSft(m, n, classes=tuple(full))
    else:
        # blocks start at the heaviest symbol and end where they may return to it,
        # so every concatenation of blocks is admissible
        support = mu.support_sft
        start = sym(max(range(m), key=lambda a: freqs[a]))
        n = 1
        while m**n <= explicit_cap and n <= n_cap:
            closed = frozenset(
                w for w in sft_language(support, n)
                if w[0] == start and support.allows(w[-1] + start)
                and all(abs(w.count(sym(a)) / n - freqs[a]) <= tol + 1e-15 for a in range(m)))
            if closed:
                rate = log(len(closed)) / n
                best = max(best, (rate, n))
                if rate >= h - eta:
                    return BlockSft(m, n, words=closed)
            n += 1
    raise SlackTooTight(f"no block length reaches entropy {h - eta:.4f}; best {best[0]:.4f} at n={best[1]}",
                        best=best)


def horseshoe_entropy(block: BlockSft) -> EntropyEstimate:
    return sft_entropy(block)
