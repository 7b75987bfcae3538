from fractions import Fraction
from math import inf

from hypothesis import given, settings, strategies as st

from omegasets.densities import (FinitePrefix, GeometricPattern, PeriodicPattern, density_profile,
                                 is_syndetic, prefix_of, visit_times)
from omegasets.schedule import BlockSchedule, PeriodicGenerator, Phase, Template
from omegasets.words import SftDescr

F = Fraction


def test_even_integers():
    assert density_profile(PeriodicPattern(2, (0,))).as_tuple() == (F(1, 2),) * 4


def test_geometric_pattern_exact():
    assert density_profile(GeometricPattern(1, 2, 4)).as_tuple() == (0, F(1, 3), F(2, 3), 1)


def test_empty_set():
    assert density_profile(PeriodicPattern(1, ())).as_tuple() == (0, 0, 0, 0)


def test_geometric_matches_brute_force_prefix():
    N = 4**10
    # i lies in [4^k, 2*4^k) exactly when its binary length is odd
    count, at = 0, {}
    checkpoints = {4**k for k in range(3, 11)} | {2 * 4**k for k in range(3, 10)}
    for i in range(N):
        count += i.bit_length() % 2
        if i + 1 in checkpoints:
            at[i + 1] = F(count, i + 1)
    assert abs(float(at[4**10]) - 1 / 3) < 1e-3
    assert abs(float(at[2 * 4**9]) - 2 / 3) < 1e-3
    est = density_profile(prefix_of(GeometricPattern(1, 2, 4), N))
    assert abs(float(est.d_lower) - float(at[4**10])) < 1e-3
    assert abs(float(est.d_upper) - float(at[2 * 4**9])) < 1e-3
    for a, b in zip(est.as_tuple(), density_profile(GeometricPattern(1, 2, 4)).as_tuple()):
        assert abs(float(a) - float(b)) <= 1e-3


def test_periodic_pattern_matches_prefix():
    S = PeriodicPattern(5, (0, 3), added=(1,), removed=(10,))
    est = density_profile(prefix_of(S, 4**10))
    for a, b in zip(est.as_tuple(), density_profile(S).as_tuple()):
        assert abs(float(a) - float(b)) <= 1e-3


def test_syndetic_examples():
    assert is_syndetic(PeriodicPattern(3, (0,))) == (True, 3)
    assert is_syndetic(GeometricPattern(1, 1, 2, 0, 1)) == (False, inf)
    assert is_syndetic(PeriodicPattern(1, (0,), removed=(5,))) == (True, 2)


def test_visit_times():
    alt = BlockSchedule(SftDescr.full(2), phases=(Phase(PeriodicGenerator(2, "01"), Template(1, 1), Template(1)),))
    assert visit_times(alt, "0", 6).indices == (0, 2, 4)
    assert visit_times(alt, "11", 10).indices == ()
    blocks = BlockSchedule(SftDescr.full(2), phases=(
        Phase(PeriodicGenerator(2, "0"), Template(1, 0, 2), Template(1)),
        Phase(PeriodicGenerator(2, "1"), Template(1, 0, 2), Template(1))))
    assert visit_times(blocks, "1", 15).indices == (1, 2, 7, 8, 9, 10, 11, 12, 13, 14)


prefix_sets = st.integers(1, 400).flatmap(
    lambda N: st.tuples(st.just(N), st.sets(st.integers(0, N - 1)), st.sets(st.integers(0, N - 1))))


@settings(max_examples=200, deadline=None)
@given(prefix_sets)
def test_complement_identity(data):
    N, a, _ = data
    S = FinitePrefix(tuple(sorted(a)), N)
    assert density_profile(S).d_upper + density_profile(S.complement()).d_lower == 1


@settings(max_examples=200, deadline=None)
@given(prefix_sets)
def test_monotone_under_inclusion(data):
    N, a, b = data
    small = density_profile(FinitePrefix(tuple(sorted(a)), N)).as_tuple()
    big = density_profile(FinitePrefix(tuple(sorted(a | b)), N)).as_tuple()
    assert all(x <= y for x, y in zip(small, big))


@settings(max_examples=200, deadline=None)
@given(prefix_sets)
def test_profile_is_ordered(data):
    N, a, _ = data
    p = density_profile(FinitePrefix(tuple(sorted(a)), N)).as_tuple()
    assert 0 <= p[0] <= p[1] <= p[2] <= p[3] <= 1
