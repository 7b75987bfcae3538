from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from omegasets.errors import SyndeticCenterNonEmpty
from omegasets.limitsets import (CaseLabel, classify_case, hausdorff_points_to_polyline, measure_support,
                                 omega_limit, statistical_omegas, syndetic_center, vf_limits)
from omegasets.measures import MarkovMeasure, combine, dirac, empirical_vectors
from omegasets.schedule import (BlockSchedule, Marker, MarkovGenerator, PeriodicGenerator, Phase,
                                Template, schedule_array, schedule_prefix)
from omegasets.subshifts import SubshiftDescr, compare
from omegasets.words import SftDescr, all_words

from schedules import normal_form_schedules

HALF = Fraction(1, 2)
BERN = MarkovMeasure.bernoulli([HALF, HALF], 2)
GROW = Template(8, 0, 2)


def single(gen, m=2, prefix=""):
    return BlockSchedule(SftDescr.full(m), prefix=prefix, phases=(Phase(gen, GROW, Template(1)),))


def test_eventually_periodic_omega():
    s = single(PeriodicGenerator(2, "01"), prefix="1")
    assert compare(omega_limit(s), SubshiftDescr.periodic(2, "01")) == "="


def test_bernoulli_omega_is_full_shift():
    s = single(MarkovGenerator(BERN))
    assert compare(omega_limit(s), SubshiftDescr.from_sft(SftDescr.full(2))) == "="
    x = schedule_prefix(s, 10**6)
    seen = {x[i:i + 8] for i in range(len(x) - 7)}
    assert seen == set(all_words(2, 8))


def test_marker_tails_enlarge_lambda():
    lam = SftDescr.full(2, ambient=3)
    bern3 = MarkovMeasure.bernoulli([HALF, HALF], 3)
    s = BlockSchedule(SftDescr.full(3), phases=(Phase(MarkovGenerator(bern3), GROW, Template(1)),),
                      markers=(Marker("2", lam, Template(1, 1)),))
    om = omega_limit(s)
    assert compare(om, SubshiftDescr.from_sft(lam)) == ">"
    # late windows of the point must be words of omega_f
    x = schedule_prefix(s, 200_000)
    L = 6
    lang = om.language(L)
    assert all(x[i:i + L] in lang for i in range(100_000, len(x) - L, 7))
    assert any("2" in x[i:i + L] for i in range(100_000, len(x) - L))


def test_statistical_omegas_examples():
    r = statistical_omegas(single(MarkovGenerator(BERN)))
    full = SubshiftDescr.from_sft(SftDescr.full(2))
    for a in (r.omega_d_lower, r.omega_d_upper, r.omega_B_upper, r.omega_f):
        assert compare(a, full) == "="
    assert r.omega_B_lower.is_empty
    r0 = statistical_omegas(single(PeriodicGenerator(2, "0")))
    fixed = SubshiftDescr.periodic(2, "0")
    assert all(compare(a, fixed) == "=" for a in r0.chain())


def zero_bernoulli(repeats):
    return BlockSchedule(SftDescr.full(2), phases=(
        Phase(PeriodicGenerator(2, "0"), Template(8, 0, 2), repeats),
        Phase(MarkovGenerator(BERN), Template(8, 0, 2), repeats)))


def test_zero_and_bernoulli_blocks_sets():
    r = statistical_omegas(zero_bernoulli(Template(1, 0, 1, 2)))
    assert compare(r.omega_d_lower, SubshiftDescr.periodic(2, "0")) == "="
    assert compare(r.omega_d_upper, SubshiftDescr.from_sft(SftDescr.full(2))) == "="


def test_syndetic_center_examples():
    assert compare(syndetic_center(single(PeriodicGenerator(2, "01"))), SubshiftDescr.periodic(2, "01")) == "="
    assert compare(syndetic_center(single(PeriodicGenerator(3, "01"), 3, prefix="2")),
                   SubshiftDescr.periodic(3, "01")) == "="
    two = BlockSchedule(SftDescr.full(2), phases=(
        Phase(PeriodicGenerator(2, "0"), Template(1, 1), Template(1)),
        Phase(PeriodicGenerator(2, "1"), Template(1, 1), Template(1))))
    assert syndetic_center(two).is_empty


def test_vf_single_generator():
    v = vf_limits(single(MarkovGenerator(BERN)), 2)
    assert v.is_singleton and v.contains(BERN)


def test_vf_superexponential_segment_by_sweep():
    s = zero_bernoulli(Template(1, 0, 1, 2))
    v = vf_limits(s, 2)
    assert len(v.polyline.vertices) == 2 and not v.is_singleton
    N = 2_000_000
    x = schedule_array(s, N)
    terms = 6
    ns = np.unique(np.geomspace(20_000, N, 300).astype(int))
    emp = np.array([empirical_vectors(x[:n], 2, terms)[0] for n in ns])
    assert hausdorff_points_to_polyline(emp, v.polyline, terms) <= 0.05


def test_vf_bounded_ratio_cyclic_combinations():
    s = zero_bernoulli(Template(1))
    v = vf_limits(s, 2).polyline
    d0 = dirac(2, 0)
    want = {combine([(Fraction(2, 3), d0), (Fraction(1, 3), BERN)]),
            combine([(Fraction(1, 3), d0), (Fraction(2, 3), BERN)])}
    assert set(v.vertices) == want


def test_classify_examples():
    assert classify_case(single(MarkovGenerator(BERN)))[0] == CaseLabel(1)
    assert classify_case(zero_bernoulli(Template(1, 0, 1, 2)))[0] == CaseLabel(4)
    # with merely doubling totals V_f is a segment of full-support mixtures
    assert classify_case(zero_bernoulli(Template(1)))[0] == CaseLabel(1)
    with pytest.raises(SyndeticCenterNonEmpty):
        classify_case(single(PeriodicGenerator(2, "01")))


def test_case_label_parsing():
    assert CaseLabel.parse("3'") == CaseLabel(3, True)
    assert CaseLabel.parse("5") == CaseLabel(5)
    assert str(CaseLabel(6, True)) == "6'"
    with pytest.raises(ValueError):
        CaseLabel(7)


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**6))
def test_chain_holds_on_random_schedules(seed):
    s = next(normal_form_schedules(1, start=seed))
    assert statistical_omegas(s).chain_holds()


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, 4), min_size=2, max_size=3), st.text(alphabet="01", max_size=3))
def test_single_ergodic_generator_collapses_chain(raw, prefix):
    m = len(raw)
    if sum(raw) == 0:
        raw[0] = 1
    mu = MarkovMeasure.bernoulli([Fraction(v, sum(raw)) for v in raw], m)
    r = statistical_omegas(single(MarkovGenerator(mu, tolerance=0.1), m, prefix=prefix))
    sup = measure_support(mu)
    for a in (r.omega_d_lower, r.omega_d_upper, r.omega_B_upper, r.omega_f):
        assert compare(a, sup) == "="


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_nonempty_syndetic_center_is_minimal(seed):
    s = next(normal_form_schedules(1, start=seed))
    c = syndetic_center(s)
    if not c.is_empty:
        assert c.is_minimal()
