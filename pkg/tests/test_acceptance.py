"""Acceptance criteria 1-11.  Each test prints one PASS/FAIL line, then asserts.

Run directly (``python3 tests/test_acceptance.py``) or through pytest.
"""
import json
import random
import subprocess
import sys
import time
from fractions import Fraction
from math import log, sqrt
from pathlib import Path

import numpy as np
import pytest

from omegasets.birkhoff import Observable, irregular_witness, level_entropy
from omegasets.densities import GeometricPattern, density_profile, prefix_of
from omegasets.entropy import family_entropy_bound, katok_entropy_estimate, sft_entropy, word_count_entropy
from omegasets.limitsets import (ALL_LABELS, MeasurePolyline, classify_case, hausdorff_points_to_polyline,
                                 hausdorff_polylines, statistical_omegas, vf_limits)
from omegasets.measures import MarkovMeasure, binary_entropy, cylinders, dirac, window_codes
from omegasets.schedule import schedule_array
from omegasets.shadowing import ShiftPseudoOrbit, circle_distance, double, shadow_doubling, shadow_shift
from omegasets.synthesis import (MODES, SynthesisConfig, build_saturated_schedule, entropy_dense_horseshoe,
                                 horseshoe_entropy, realize_case)
from omegasets.words import SftDescr

from schedules import normal_form_schedules

F = Fraction
HALF = F(1, 2)
LOG2 = log(2)


RESULTS: list[str] = []


def record(n: int, ok: bool, detail: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}"
    RESULTS.append(line)
    print(line)
    assert ok, line


def bern(p, m=2):
    return MarkovMeasure.bernoulli([1 - F(p), F(p)], m)


def test_01_twelve_case_round_trip():
    t0 = time.perf_counter()
    bad = []
    runs = 0
    for label in ALL_LABELS:
        for mode in MODES:
            if label.primed and mode != "nonrecurrent":
                continue
            s, cert = realize_case(label, mode=mode, seed=runs)
            got, rep = classify_case(s)
            runs += 1
            if got != label or rep.nonrecurrent != (mode == "nonrecurrent") or not cert.ok:
                bad.append(f"{label}/{mode}->{got}")
    dt = time.perf_counter() - t0
    record(1, not bad and runs == 18 and dt < 60,
           f"{runs} realizations, {len(bad)} mismatches {bad}, {dt:.1f} s (< 60 s)")


def test_02_chain_invariant():
    violations = sum(not statistical_omegas(s).chain_holds() for s in normal_form_schedules(1000))
    record(2, violations == 0, f"1000 random normal-form schedules, {violations} chain violations")


def test_03_sft_entropy():
    gm = SftDescr.golden_mean()
    spectral = sft_entropy(gm).value
    exact = log((1 + sqrt(5)) / 2)
    counted = word_count_entropy(gm, 20).value
    full = [word_count_entropy(SftDescr.full(2), n).value for n in (1, 10, 20, 40)]
    ok = (abs(spectral - exact) <= 1e-9 and round(spectral, 6) == 0.481212
          and abs(counted - 0.481212) <= 1e-2 and all(v == LOG2 for v in full))
    record(3, ok, f"spectral {spectral:.10f} (closed form {exact:.10f}), count n=20 {counted:.5f}, "
                  f"full shift by counting {full[-1]!r}")


def test_04_katok():
    t0 = time.perf_counter()
    half = katok_entropy_estimate(bern(HALF), HALF, 24).value
    nine = katok_entropy_estimate(bern(F(9, 10)), HALF, 24).value
    dt = time.perf_counter() - t0
    ok = abs(half - LOG2) <= .05 and abs(nine - binary_entropy(.9)) <= .05 and dt < 30
    record(4, ok, f"Bernoulli(1/2) slope {half:.4f} vs {LOG2:.4f}; Bernoulli(0.9) {nine:.4f} "
                  f"vs {binary_entropy(.9):.4f}; {dt:.1f} s")


def _sweep(x: np.ndarray, terms: int, points: int = 3000) -> np.ndarray:
    """Empirical cylinder vectors of x[:n] along a geometric grid of n."""
    N = len(x)
    ns = np.unique(np.geomspace(2 * 10**4, N, points).astype(np.int64))
    out = np.zeros((len(ns), terms))
    for j, c in enumerate(cylinders(2, terms)):
        L = len(c)
        hits = (window_codes(x, 2, L) == int(c, 2)).astype(np.int64)
        cs = np.concatenate([[0], np.cumsum(hits)])
        out[:, j] = cs[ns - L + 1] / (ns - L + 1)
    return out


def test_05_saturated_construction():
    K = MeasurePolyline((dirac(2, 0), bern(HALF)))
    cfg = SynthesisConfig(K=K, lam=SftDescr.full(2))
    s = build_saturated_schedule(cfg)
    vf = vf_limits(s, 2).polyline
    terms = 8
    oracle = hausdorff_points_to_polyline(_sweep(schedule_array(s, 10**7), terms), K, terms)
    reported = hausdorff_polylines(vf, K, terms)
    seg_bound = family_entropy_bound(cfg).value
    one = family_entropy_bound(SynthesisConfig(K=MeasurePolyline((bern(HALF),)), lam=SftDescr.full(2))).value
    ok = oracle <= .05 and reported <= .05 and seg_bound >= -.1 and one >= LOG2 - .1
    record(5, ok, f"sweep Hausdorff {oracle:.4f}, V_f vs K {reported:.4f}; bounds {seg_bound:.4f} (>= -0.1), "
                  f"{one:.4f} (>= {LOG2 - .1:.4f})")


def test_06_entropy_dense_horseshoe():
    mu = bern(F(7, 10))
    hs = entropy_dense_horseshoe(mu, .05, .1)
    h = horseshoe_entropy(hs).value
    rng = np.random.default_rng(0)
    worst = 0.0
    for _ in range(1000):
        w = hs.sample(rng, 10)
        worst = max(worst, abs(w.count("1") / len(w) - .7), abs(w.count("0") / len(w) - .3))
    ok = h >= binary_entropy(.7) - .05 and worst <= .1
    record(6, ok, f"n={hs.n}, entropy {h:.4f} >= {binary_entropy(.7) - .05:.4f}; "
                  f"worst depth-1 deviation over 1000 samples {worst:.4f} (<= 0.1)")


def test_07_irregular_witness():
    w = irregular_witness(Observable.indicator("1"), .1)
    gap = w.report.limsup - w.report.liminf
    ok = gap >= .1 and w.nonrecurrent and w.entropy.value >= LOG2 - .2
    record(7, ok, f"liminf {float(w.report.liminf):.4f}, limsup {float(w.report.limsup):.4f}, gap {float(gap):.4f}; "
                  f"nonrecurrent {w.nonrecurrent}; entropy bound {w.entropy.value:.4f} >= {LOG2 - .2:.4f}")


def test_08_level_sets():
    phi = Observable.indicator("1")
    grid = {k: binary_entropy(k / 100) for k in range(1, 100)}
    t_half = level_entropy(phi, HALF).value
    t_quarter = level_entropy(phi, F(1, 4)).value
    ok = abs(t_half - grid[50]) <= 1e-6 and abs(t_quarter - grid[25]) <= 1e-3
    record(8, ok, f"t_1/2 {t_half:.8f} vs {grid[50]:.8f}; t_1/4 {t_quarter:.6f} vs {grid[25]:.6f}")


def _shift_pseudo_orbit(rng, k):
    length = k + 1 + rng.randrange(6)
    words = ["".join(rng.choice("012") for _ in range(length))]
    for _ in range(rng.randrange(1, 30)):
        words.append(words[-1][1:k + 1] + "".join(rng.choice("012") for _ in range(length - k)))
    return ShiftPseudoOrbit(tuple(words), k)


def _doubling_pseudo_orbit(rng, steps=60):
    delta = F(1, 256)
    x = F(rng.getrandbits(40), 2**40)
    xs = []
    for i in range(steps):
        xs.append(x)
        e = delta if i == 0 else F(rng.randint(-2**12, 2**12), 2**12) * delta
        x = (double(x) + e) % 1
    return xs


def test_09_shadowing():
    rng = random.Random(2024)
    t0 = time.perf_counter()
    shift_bad = 0
    for i in range(10_000):
        k = 1 + i % 8
        r = shadow_shift(_shift_pseudo_orbit(rng, k))
        shift_bad += r.epsilon > F(1, 2 ** (k + 1))
    dbl_bad, worst = 0, F(0)
    for _ in range(1000):
        xs = _doubling_pseudo_orbit(rng)
        r = shadow_doubling(xs, F(1, 32))
        z, dev = r.y, F(0)
        for x in xs:
            dev = max(dev, circle_distance(z, x))
            z = double(z)
        worst = max(worst, dev)
        dbl_bad += dev > F(1, 32) or r.delta != F(1, 256)
    dt = time.perf_counter() - t0
    ok = shift_bad == 0 and dbl_bad == 0 and dt < 20
    record(9, ok, f"10^4 shift orbits: {shift_bad} failures; 10^3 doubling orbits (delta=2^-8): {dbl_bad} failures, "
                  f"worst deviation {float(worst):.2e} <= 2^-5; {dt:.1f} s")


def test_10_density_profile():
    S = GeometricPattern(1, 2, 4)
    exact = density_profile(S).as_tuple()
    est = density_profile(prefix_of(S, 4**10)).as_tuple()
    worst = max(abs(float(a) - float(b)) for a, b in zip(exact, est))
    ok = exact == (0, F(1, 3), F(2, 3), 1) and worst <= 1e-3
    record(10, ok, f"exact {tuple(str(v) for v in exact)}; prefix 4^10 max deviation {worst:.2e}")


def _cli_runs(workdir: Path) -> dict:
    """Run every subcommand in ``workdir``; return {artifact name: bytes}."""
    workdir.mkdir(parents=True, exist_ok=True)
    (workdir / "pattern.json").write_text(json.dumps(GeometricPattern(1, 2, 4).to_json()))
    (workdir / "shift.json").write_text(json.dumps([{"k": 2}, "0110", "1101", "1011"]))
    (workdir / "dbl.json").write_text(json.dumps(["1/3", "2/3", "1/3", "2/3"]))
    cfg = SynthesisConfig(K=MeasurePolyline((dirac(2, 0), bern(HALF))), lam=SftDescr.full(2))
    (workdir / "cfg.json").write_text(json.dumps(cfg.to_json()))
    commands = [
        ["realize", "--case", "4", "--out", "w.json"],
        ["classify", "--in", "w.json", "--out", "classify.json"],
        ["synth", "--config", "cfg.json", "--horizon", "200", "--out", "synth.json"],
        ["omega", "--in", "w.json", "--out", "omega.json"],
        ["density", "--pattern", "pattern.json", "--out", "density.json"],
        ["entropy", "--golden-mean", "--horizon", "20", "--out", "entropy.json"],
        ["katok", "--bernoulli", "0.9", "--format", "csv", "--out", "katok.csv"],
        ["level", "--indicator", "1", "--a", "1/4", "--out", "level.json"],
        ["irregular", "--indicator", "1", "--horizon", "100000", "--out", "irregular.json"],
        ["shadow", "--in", "shift.json", "--out", "shadow_shift.json"],
        ["shadow", "--in", "dbl.json", "--out", "shadow_dbl.json"],
        ["code", "--x", "1/3", "--n", "16", "--out", "code.json"],
        ["verify", "--in", "w.cert.json", "--out", "verify.json"],
        ["report", "irregular.json", "level.json", "--out", "report"],
    ]
    out = {}
    for i, cmd in enumerate(commands):
        argv = [sys.executable, "-m", "omegasets", "--seed", "0", *cmd]
        p = subprocess.run(argv, cwd=workdir, capture_output=True)
        out[f"{i}:{cmd[0]}:exit"] = str(p.returncode).encode()
        out[f"{i}:{cmd[0]}:stdout"] = p.stdout
    for f in sorted(workdir.iterdir()):
        out[f.name] = f.read_bytes()
    return out


def test_11_cli_determinism(tmp_path):
    a = _cli_runs(tmp_path / "a")
    b = _cli_runs(tmp_path / "b")
    codes = {k: v for k, v in a.items() if k.endswith(":exit")}
    differing = sorted(k for k in a if a[k] != b.get(k))
    failed = sorted(k for k, v in codes.items() if v != b"0")
    subcommands = {k.split(":")[1] for k in codes}
    ok = not differing and not failed and a.keys() == b.keys() and len(subcommands) == 13
    record(11, ok, f"{len(codes)} runs over {len(subcommands)} subcommands, {len(a)} artifacts; "
                   f"differing {differing}; nonzero exits {failed}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
