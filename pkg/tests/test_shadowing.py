import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from omegasets.errors import NotAPseudoOrbit, PseudoOrbitTooLoose
from omegasets.measures import MarkovMeasure
from omegasets.schedule import BlockSchedule, MarkovGenerator, Phase, Template, schedule_prefix
from omegasets.shadowing import (ShiftPseudoOrbit, circle_distance, coding_to_point, double,
                                 doubling_coding, shadow_doubling, shadow_shift)
from omegasets.words import SftDescr

F = Fraction


def random_pseudo_orbit(rng, k, steps, length, alphabet="012"):
    words = ["".join(rng.choice(alphabet) for _ in range(length))]
    for _ in range(steps - 1):
        prev = words[-1]
        words.append(prev[1:k + 1] + "".join(rng.choice(alphabet) for _ in range(length - k)))
    return ShiftPseudoOrbit(tuple(words), k)


def test_true_orbit_shadows_itself():
    z = "0110100110010110"
    p = ShiftPseudoOrbit(tuple(z[n:n + 6] for n in range(10)), 5)
    r = shadow_shift(p)
    assert z.startswith(r.point) and r.epsilon == 0


def test_spliced_orbits():
    a, b = "0101010101", "1011100000"
    # b agrees with sigma^5 a on its first 3 symbols
    words = [a[n:n + 6] for n in range(5)] + [b[n:n + 6] for n in range(4)]
    r = shadow_shift(ShiftPseudoOrbit(tuple(words), 3))
    assert r.epsilon <= F(1, 16)


def test_no_agreement_rejected():
    with pytest.raises(NotAPseudoOrbit):
        shadow_shift(ShiftPseudoOrbit(("01", "00"), 0))


@settings(max_examples=300, deadline=None)
@given(st.integers(1, 8), st.integers(1, 30), st.integers(0, 2**32))
def test_diagonal_shadow_bound(k, steps, seed):
    rng = random.Random(seed)
    p = random_pseudo_orbit(rng, k, steps, k + 1 + rng.randrange(4))
    r = shadow_shift(p)
    for n, w in enumerate(p.words):
        assert r.point[n:n + k + 1] == w[:k + 1]
    assert r.epsilon <= F(1, 2 ** (k + 1))


def test_limit_shadowing_window_sets_agree():
    mu = MarkovMeasure.bernoulli([F(1, 2), F(1, 2)])
    z = schedule_prefix(BlockSchedule(SftDescr.full(2), phases=(Phase(MarkovGenerator(mu), Template(8, 0, 2), Template(1)),)), 6000)
    # agreement k_n grows like sqrt(n); past k_n the words carry junk
    words = []
    for n in range(4000):
        kn = 2 + int(n**.5)
        junk = "".join("1" if c == "0" else "0" for c in z[n + kn + 1:n + kn + 5])
        words.append(z[n:n + kn + 1] + junk)
    r = shadow_shift(ShiftPseudoOrbit(tuple(words), 2))
    for L in range(1, 7):
        late = range(2000, 4000)
        assert {w[:L] for w in (words[n] for n in late)} == {r.point[n:n + L] for n in late}


def test_doubling_true_orbit():
    r = shadow_doubling([F(1, 3), F(2, 3)] * 20, F(1, 32))
    assert r.y == F(1, 3) and r.deviation == 0


def test_doubling_perturbed():
    rng = random.Random(5)
    x, xs = F(rng.getrandbits(30), 2**30), []
    for _ in range(200):
        xs.append(x)
        x = (double(x) + F(rng.randint(-256, 256), 256 * 2**8)) % 1
    r = shadow_doubling(xs, F(1, 32))
    z = r.y
    for x in xs:
        assert circle_distance(z, x) <= F(1, 32)
        z = double(z)
    assert r.deviation <= r.delta <= F(1, 256)


def test_doubling_too_loose():
    with pytest.raises(PseudoOrbitTooLoose):
        shadow_doubling([F(0), F(3, 10)], F(1, 10))


def test_coding_examples():
    assert doubling_coding(0, 8) == "0" * 8
    assert doubling_coding(F(1, 3), 8) == "01" * 4
    assert doubling_coding(F(1, 2), 6) == "1" + "0" * 5
    assert doubling_coding("0110", 3) == "011"


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2**20 - 1), st.integers(1, 40))
def test_coding_equivariance(num, n):
    x = F(num, 2**20)
    assert doubling_coding(double(x), n) == doubling_coding(x, n + 1)[1:]
    assert coding_to_point(doubling_coding(x, 20)) == x
