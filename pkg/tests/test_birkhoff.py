from fractions import Fraction
from math import log

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from omegasets.birkhoff import (IRREGULAR, QUASI_REGULAR, REGULAR, Observable, birkhoff_bounds,
                                irregular_witness, level_entropy, phi_range)
from omegasets.errors import BoundaryValue, DegenerateObservable
from omegasets.limitsets import MeasurePolyline, vf_polyline
from omegasets.measures import binary_entropy, dirac
from omegasets.schedule import BlockSchedule, PeriodicGenerator, Phase, Template, schedule_array
from omegasets.synthesis import SynthesisConfig, build_saturated_schedule
from omegasets.words import SftDescr, all_words

from schedules import normal_form_schedules

F = Fraction
ONE = Observable.indicator("1")


def periodic(word):
    return BlockSchedule(SftDescr.full(2), phases=(Phase(PeriodicGenerator(2, word), Template(1, 1), Template(1)),))


def doubling_blocks():
    return BlockSchedule(SftDescr.full(2), phases=(
        Phase(PeriodicGenerator(2, "0"), Template(1, 0, 2), Template(1)),
        Phase(PeriodicGenerator(2, "1"), Template(1, 0, 2), Template(1))))


def test_fixed_point_is_regular():
    r = birkhoff_bounds(periodic("0"), ONE)
    assert (r.liminf, r.limsup, r.kind) == (0, 0, REGULAR)


def test_doubling_blocks_bounds_and_prefix_oracle():
    s = doubling_blocks()
    r = birkhoff_bounds(s, ONE)
    assert (r.liminf, r.limsup, r.kind) == (F(1, 3), F(2, 3), IRREGULAR)
    N = 10**7
    x = schedule_array(s, N).astype(np.int64)
    avg = np.cumsum(x) / np.arange(1, N + 1)
    tail = avg[N // 8:]
    assert abs(tail.min() - 1 / 3) < 1e-3 and abs(tail.max() - 2 / 3) < 1e-3


def test_segment_between_fixed_points():
    cfg = SynthesisConfig(K=MeasurePolyline((dirac(2, 0), dirac(2, 1))), lam=SftDescr.full(2))
    r = birkhoff_bounds(build_saturated_schedule(cfg), ONE)
    assert (r.liminf, r.limsup) == (0, 1)


def test_level_entropy_grid_oracle():
    grid = {round(p, 2): binary_entropy(p) for p in np.arange(1, 100) / 100}
    assert abs(level_entropy(ONE, F(1, 2)).value - grid[.5]) <= 1e-6
    assert abs(level_entropy(ONE, F(1, 4)).value - grid[.25]) <= 1e-3
    res = level_entropy(ONE, F(1, 2))
    assert np.allclose(np.array(res.P, dtype=float), .5, atol=1e-4)


def test_level_entropy_boundary():
    with pytest.raises(BoundaryValue) as e:
        level_entropy(ONE, 0)
    assert e.value.result.value == pytest.approx(0, abs=1e-9)


def test_level_entropy_concave_and_symmetric():
    a = [F(k, 10) for k in range(1, 10)]
    t = [level_entropy(ONE, v).value for v in a]
    for x, y, z in zip(t, t[1:], t[2:]):
        assert 2 * y >= x + z - 1e-7
    for k in range(9):
        assert abs(t[k] - t[8 - k]) <= 1e-6


def test_irregular_witness_indicator():
    w = irregular_witness(ONE, 0.1)
    assert w.report.limsup - w.report.liminf >= 0.1
    assert w.nonrecurrent
    assert w.entropy.value >= log(2) - 0.2


def test_irregular_witness_bigram():
    w = irregular_witness(Observable.indicator("01"), 0.1)
    assert w.report.liminf < w.report.limsup
    assert w.entropy.value >= log(2) - 0.2


def test_constant_observable_is_degenerate():
    with pytest.raises(DegenerateObservable):
        irregular_witness(Observable.constant(F(1, 3)), 0.1)


def observables():
    return st.integers(1, 2).flatmap(lambda d: st.lists(
        st.fractions(-2, 2, max_denominator=7), min_size=2**d, max_size=2**d).map(
        lambda ws: Observable(2, d, tuple(zip(all_words(2, d), ws)))))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), observables())
def test_bounds_are_vertex_extremes(seed, phi):
    s = next(normal_form_schedules(1, start=seed))
    r = birkhoff_bounds(s, phi)
    vals = [phi.lift(s.m).integral(mu) for mu in vf_polyline(s).vertices]
    assert (r.liminf, r.limsup) == (min(vals), max(vals))
    lo, hi = r.L_phi
    assert lo <= r.liminf <= r.limsup <= hi
    assert r.kind in (REGULAR, QUASI_REGULAR, IRREGULAR)
    if r.phi_irregular:
        assert r.kind == IRREGULAR
    if r.kind != IRREGULAR:
        assert r.liminf == r.limsup


def test_phi_range_full_shift():
    assert phi_range(ONE, SftDescr.full(2)) == (0, 1)
    assert phi_range(Observable.indicator("11"), SftDescr.golden_mean()) == (0, 0)
