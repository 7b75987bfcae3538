"""Pseudo-orbit shadowing for the shift and for the doubling map x -> 2x mod 1.

Doubling-map arithmetic is exact: points are dyadic (or general) rationals.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import NotAPseudoOrbit, PreconditionError, PseudoOrbitTooLoose
from .words import shift_distance

CODING_CAP = 1 << 20


@dataclass(frozen=True)
class ShiftPseudoOrbit:
    """Words x_0, x_1, ... where x_{n+1} agrees with sigma(x_n) on k symbols."""

    words: tuple[str, ...]
    k: int

    def __post_init__(self):
        object.__setattr__(self, "words", tuple(self.words))
        if self.k < 0:
            raise PreconditionError("agreement must be nonnegative")

    def check(self) -> None:
        if not self.words:
            raise NotAPseudoOrbit("empty pseudo-orbit")
        for n, w in enumerate(self.words):
            if len(w) < self.k + 1:
                raise NotAPseudoOrbit(f"word {n} is shorter than k + 1")
        need = max(self.k, 1)
        for n, (a, b) in enumerate(zip(self.words, self.words[1:])):
            if a[1:need + 1] != b[:need]:
                raise NotAPseudoOrbit(f"step {n}: next word does not follow the shifted word")

    def to_json(self) -> list:
        return [{"k": self.k}] + list(self.words)


@dataclass(frozen=True)
class ShadowResult:
    point: str
    epsilon: Fraction

    def to_json(self) -> dict:
        return {"format": 1, "point": self.point, "epsilon": str(self.epsilon)}


def shadow_shift(p: ShiftPseudoOrbit) -> ShadowResult:
    """Diagonal shadow y[n] = x_n[0], continued by the tail of the last word."""
    p.check()
    y = "".join(w[0] for w in p.words) + p.words[-1][1:]
    eps = Fraction(0)
    for n, w in enumerate(p.words):
        eps = max(eps, shift_distance(y[n:n + len(w)], w))
    bound = Fraction(1, 2 ** (max(p.k, 1) + 1))
    if eps > bound:
        raise NotAPseudoOrbit(f"shadow misses by {eps} > {bound}")
    return ShadowResult(y, eps)


# ---------------------------------------------------------------- doubling map

def as_fraction(x) -> Fraction:
    """Exact value of a float (always dyadic), int, str or Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(x)
    return Fraction(x)


def circle_distance(a: Fraction, b: Fraction) -> Fraction:
    d = (a - b) % 1
    return min(d, 1 - d)


def double(x: Fraction) -> Fraction:
    return (2 * x) % 1


def pseudo_orbit_delta(xs) -> Fraction:
    xs = [as_fraction(x) for x in xs]
    return max((circle_distance(double(a), b) for a, b in zip(xs, xs[1:])), default=Fraction(0))


@dataclass(frozen=True)
class DoublingShadow:
    y: Fraction
    deviation: Fraction
    delta: Fraction

    def to_json(self) -> dict:
        return {"format": 1, "y": str(self.y), "deviation": str(self.deviation),
                "deviation_float": float(self.deviation), "delta": str(self.delta)}


def shadow_doubling(xs, eps) -> DoublingShadow:
    """Exact shadow of a pseudo-orbit of x -> 2x mod 1.

    Pulls the last point back along the inverse branch nearest to each x_n;
    each step halves the accumulated error, so the deviation stays below delta.
    """
    xs = [as_fraction(x) % 1 for x in xs]
    eps = as_fraction(eps)
    if not xs:
        raise PreconditionError("empty pseudo-orbit")
    delta = pseudo_orbit_delta(xs)
    if not (eps < Fraction(1, 4) and delta <= eps / 4):
        raise PseudoOrbitTooLoose(f"need eps < 1/4 and delta <= eps/4; got eps={float(eps)}, "
                                  f"delta={float(delta)}")
    y = xs[-1]
    for x in reversed(xs[:-1]):
        y = min(((y + j) / 2 for j in (0, 1)), key=lambda c: circle_distance(c, x))
    dev, z = Fraction(0), y
    for x in xs:
        dev = max(dev, circle_distance(z, x))
        z = double(z)
    if dev > eps:
        raise PseudoOrbitTooLoose(f"verified deviation {dev} exceeds eps {eps}")
    return DoublingShadow(y, dev, delta)


def doubling_coding(x, n: int) -> str:
    """Binary itinerary of x under doubling w.r.t. [0,1/2), [1/2,1).

    Dyadic points use their terminating (0-tail) expansion.  A digit string
    is accepted as an already-coded point.
    """
    if n < 0 or n > CODING_CAP:
        raise PreconditionError(f"n must be in [0, {CODING_CAP}]")
    if isinstance(x, str) and set(x) <= {"0", "1"} and not x.startswith("0."):
        if len(x) < n:
            raise PreconditionError("digit stream shorter than n")
        return x[:n]
    z = as_fraction(x) % 1
    out = []
    for _ in range(n):
        z *= 2
        if z >= 1:
            out.append("1")
            z -= 1
        else:
            out.append("0")
    return "".join(out)


def coding_to_point(w: str) -> Fraction:
    """The dyadic rational whose terminating expansion is ``0.w``."""
    return sum((Fraction(int(c), 2 ** (i + 1)) for i, c in enumerate(w)), Fraction(0))
