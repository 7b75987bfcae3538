from omegasets.subshifts import SubshiftDescr, canonical_rotation, compare, subset
from omegasets.words import SftDescr


def test_canonical_rotation():
    assert canonical_rotation("10") == canonical_rotation("01") == "01"
    assert canonical_rotation("0101") == "01"


def test_compare_basic_sets():
    full = SubshiftDescr.from_sft(SftDescr.full(2))
    gm = SubshiftDescr.from_sft(SftDescr.golden_mean())
    fix = SubshiftDescr.periodic(2, "0")
    alt = SubshiftDescr.periodic(2, "01")
    assert compare(fix, gm) == "<" and compare(gm, full) == "<"
    assert compare(full, full) == "="
    assert compare(gm, fix) == ">"
    assert compare(fix, SubshiftDescr.periodic(2, "1")) not in ("=", "<", ">")
    assert subset(alt, gm)
    assert compare(fix.union(alt), gm) == "<"
    assert compare(gm.intersect(SubshiftDescr.periodic(2, "1")), SubshiftDescr.empty(2)) == "="


def test_json_round_trip_and_minimality():
    s = SubshiftDescr.periodic(3, "012").union(SubshiftDescr.from_sft(SftDescr.full(2, ambient=3)))
    assert compare(SubshiftDescr.from_json(s.to_json()), s) == "="
    assert SubshiftDescr.periodic(3, "012").is_minimal()
    assert not s.is_minimal()
