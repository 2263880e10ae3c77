import json
from collections import Counter
from fractions import Fraction
from itertools import combinations_with_replacement, permutations
from math import gcd, sqrt
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from redtypes import classify as C
from redtypes.acceptance import brute_cores, principal_bounds_hold, shape_from_fixture, ratio_row_match
from redtypes.fibre import PrincipalInvariants, abelian_toric, chi, chi_sum_check, total_genus, validate
from redtypes.label import canonical_label, parse_principal_type, type_label

DATA = Path(__file__).parent / "data"
TABLES = json.loads((DATA / "tables.json").read_text())


# cores

def test_core_chi_examples():
    assert C.core_chi(C.Core(6, (1, 2, 3))) == 0
    assert C.core_chi(C.Core(2, (1, 1))) == 2
    assert C.core_chi(C.Core(5, (1, 1, 3))) == -2


def test_core_of_examples():
    assert C.core_of(PrincipalInvariants(6, 0, (5, 4, 3), ())) == (1, C.Core(6, (5, 4, 3)))
    assert C.core_of(PrincipalInvariants(6, 0, (3, 3, 3, 3), ())) == (3, C.Core(2, (1, 1, 1, 1)))
    assert C.core_of(PrincipalInvariants(1, 1, (), ())) == (1, C.Core(1, ()))
    assert str(C.Core(1, ())) == "I"


def test_cores_chi0():
    names = {str(c) for c in C.enumerate_cores(0)}
    assert names == {"I*_0", "IV", "IV*", "III", "III*", "II", "II*"}


def test_cores_edge_cases():
    with pytest.raises(ValueError):
        C.enumerate_cores(2)
    assert C.enumerate_cores(-3) == set() and C.enumerate_cores(4) == set()


def test_cores_exhaustive_small():
    for chi in (0, -2, -4, -6, -8):
        found = {c for c in C.enumerate_cores(chi) if c.m <= 8 and len(c.residues) <= 6}
        brute = set()
        for m in range(2, 9):
            for k in range(1, 7):
                brute |= brute_cores(m, k, chi)
        assert found == brute


def test_cores_match_tables():
    for chi, rows in TABLES["cores"].items():
        assert C.enumerate_cores(int(chi)) == {C.Core(m, tuple(r)) for m, r in rows}


# principal invariants and types

@pytest.mark.parametrize("chi", [-1, -2, -3, -4])
def test_invariants_chi_and_bounds(chi):
    ps = C.enumerate_principal_invariants(chi)
    assert all(chi_ == chi for chi_ in (p.chi for p in ps))
    assert all(principal_bounds_hold(p) for p in ps)
    # each bound is attained
    b = -chi
    assert max(p.m for p in ps) == 6 * b
    assert max(p.g for p in ps) == (2 + b) // 2
    # |O| = 4 - chi forces m = 2 with all residues 1, whose sum is even only for even chi
    if chi % 2 == 0:
        assert max(len(p.O) for p in ps) == 4 + b
    else:
        assert max(len(p.O) for p in ps) < 4 + b
    assert max(len(p.L) for p in ps) == 2 + b


def test_invariants_examples():
    ps = C.enumerate_principal_invariants(-1)
    assert PrincipalInvariants(1, 1, (), (1,)) in ps
    assert PrincipalInvariants(3, 0, (1, 2), (3,)) in ps
    with pytest.raises(ValueError):
        C.enumerate_principal_invariants(0)


def brute_invariants(chi, mmax):
    """All invariants with m <= mmax by direct search over the bound box."""
    out = set()
    b = -chi
    for m in range(1, mmax + 1):
        for g in range((2 + b) // 2 + 1):
            for a in range(1 if m == 1 else 4 + b + 1):
                for O in combinations_with_replacement(range(1, m), a):
                    for k in range(2 + b + 1):
                        for L in combinations_with_replacement(range(1, m + 1), k):
                            if (sum(O) + sum(L)) % m:
                                continue
                            p = PrincipalInvariants(m, g, O, L)
                            if chi == (2 - 2 * g - a - k) * m + sum(gcd(o, m) for o in O) and (g > 0 or a + k >= 3):
                                out.add(p)
    return out


def test_invariants_against_brute_force():
    key = lambda p: (p.m, p.g, tuple(sorted(p.O)), tuple(sorted(p.L)))
    for chi in (-1, -2):
        ours = {key(p) for p in C.enumerate_principal_invariants(chi) if p.m <= 6}
        assert ours == {key(p) for p in brute_invariants(chi, 6)}


def test_type_counts():
    for chi, n in TABLES["principal_type_counts"].items():
        assert len(C.enumerate_principal_types(int(chi))) == n


def test_types_match_fixture_labels():
    rows = json.loads((DATA / "principal_types.json").read_text())
    for chi in (-1, -2, -3, -4, -5):
        exp = {e["label"] for e in rows if e["chi"] == chi}
        assert {type_label(t) for t in C.enumerate_principal_types(chi)} == exp


def test_types_valid():
    for chi in (-1, -2, -3):
        for t in C.enumerate_principal_types(chi):
            assert t.chi == chi < 0
            assert all(gcd(l, t.m) % 2 == 0 for l in t.LD)
            assert all(gcd(a, t.m) == gcd(b, t.m) for a, b in t.LL)


def test_shape_groups():
    g1 = C.types_by_shape(-1)
    assert sorted(len(v) for v in g1.values()) == [1, 1, 1, 10]
    assert len(C.types_by_shape(-2)[(1, 1)]) == 8


def brute_count(chi, w):
    n = 0
    for t in C.enumerate_principal_types(chi):
        n += sum(1 for p in set(permutations(t.LM)) if tuple(gcd(l, t.m) for l in p) == tuple(w))
    return n


@pytest.mark.parametrize("chi,w,n", [(-1, (1,), 10), (-2, (), 46), (-2, (2,), 18), (-2, (1, 1), 8)])
def test_weight_vector_counts(chi, w, n):
    assert C.count_types_by_weight_vector(chi, w) == n == brute_count(chi, w)


def test_weight_vector_formula_against_permutations():
    for chi in (-3, -4):
        for w in C.types_by_shape(chi):
            if len(w) <= 5:
                for perm in set(permutations(w)):
                    assert C.count_types_by_weight_vector(chi, perm) == brute_count(chi, perm)
                    assert C.count_types_by_weight_vector(chi, perm) <= sqrt(10) ** (2 - chi - len(w)) + 1e-9


def test_large_multiplicity():
    rows = json.loads((DATA / "ratio_rows.json").read_text())["rows"]
    for chi in range(-1, -7, -1):
        for p in C.large_multiplicity_check(chi):
            assert Fraction(p.m, -chi) > 2
            assert ratio_row_match(p, rows) is not None
            assert C.ratio_is_admissible(Fraction(p.m, -chi))


def test_ratio_forms():
    assert C.ratio_is_admissible(6) and C.ratio_is_admissible(Fraction(21, 10))
    assert not C.ratio_is_admissible(Fraction(27, 10))


# shapes and families

def test_genus2_shapes():
    shapes = C.enumerate_shapes(2)
    assert len(shapes) == 5
    assert {str(s) for s in shapes} == {"[-2]", "[-1,-1] 0-1:1", "[-1,-1] 0-1:1,1,1",
                                        "[-1,-1] 0-1:1,2", "[-1,-1] 0-1:3"}


def test_genus3_shapes_and_counts():
    fs = C.enumerate_families(3, jobs=1)
    counts = Counter(f.shape.key() for f in fs)
    rows = json.loads((DATA / "shape_counts.json").read_text())["genus3"]
    assert len(C.enumerate_shapes(3)) == 35 == len(rows)
    assert {shape_from_fixture(e).key(): e["count"] for e in rows} == dict(counts)
    assert sorted(counts.values(), reverse=True)[:6] == [440, 390, 220, 180, 171, 150]
    assert max(counts.values()) <= 440 and list(counts.values()).count(440) == 1
    assert len(fs) == 1901


def test_genus2_family_details():
    fs = C.enumerate_families(2, jobs=1)
    counts = sorted(Counter(f.shape.key() for f in fs).values())
    assert counts == [1, 1, 1, 46, 55]
    assert max(counts) <= 55 and counts.count(55) == 1
    labels = [f.label for f in fs]
    assert labels == sorted(labels) and len(set(labels)) == 104
    big = sorted(f.label for f in fs if any(v.m > 6 for v in f.vertices))
    assert big == sorted(TABLES["large_multiplicity"]["2"])
    assert sorted(f.label for f in fs if any(v.m == 12 for v in f.vertices)) == ["[2]II*_D", "[2]II_D"]


def test_families_fibres_consistent():
    for g in (2, 3):
        for fam in C.enumerate_families(g, jobs=1):
            f = fam.fibre()
            assert validate(f) == []
            assert total_genus(f) == g
            assert chi_sum_check(f)
            assert canonical_label(f) == fam.label


def test_semistable():
    s2 = C.enumerate_semistable_families(2, jobs=1)
    assert sorted(f.label for f in s2) == sorted(TABLES["semistable_genus2"])
    s3 = C.enumerate_semistable_families(3, jobs=1)
    assert len(s3) == 42
    for f in s2 + s3:
        a, t = abelian_toric(f.fibre())
        assert a + t == f.shape.genus


def test_deterministic_and_parallel():
    a = [f.label for f in C.enumerate_families(3, jobs=1)]
    b = [f.label for f in C.enumerate_families(3, jobs=1)]
    c = [f.label for f in C.enumerate_families(3, jobs=2)]
    assert a == b == c


def test_shape_bounds():
    with pytest.raises(ValueError):
        C.enumerate_shapes(1)
    with pytest.raises(ValueError):
        C.enumerate_shapes(6)


def test_shape_key_isomorphism_invariant():
    # relabelling the vertices of a shape does not change its canonical key
    s = C.Shape((-1, -1, -2), ((0, 2, (1,)), (1, 2, (1,))))
    t = C.Shape((-2, -1, -1), ((0, 1, (1,)), (0, 2, (1,))))
    assert s.key() == t.key()
    u = C.Shape((-1, -2, -1), ((0, 1, (1,)), (0, 2, (1,))))
    assert s.key() != u.key()


def _cores_with_k(chi, k):
    m_max = 6 - 2 * chi
    out = set()
    for m in range(2, m_max + 1):
        for rs in C._gcd_multisets(m, k, chi - m * (2 - k)):
            if sum(rs) % m == 0 and gcd(m, *rs) == 1:
                out.add(C.Core(m, rs))
    return out


def test_core_bound_equality_k5():
    # cores with k = 5 residues attaining m = (6 - 2 chi) / 3
    k = 5
    found = set()
    for m in range(2, 64, 2):
        found |= {c for c in _cores_with_k((6 - 3 * m) // 2, k) if c.m == m}
    listed = {C.Core(6, (2, 2, 2, 3, 3)), C.Core(6, (4, 4, 4, 3, 3)),
              C.Core(30, (4, 6, 20, 15, 15)), C.Core(30, (14, 6, 10, 15, 15)),
              C.Core(30, (16, 24, 20, 15, 15)), C.Core(30, (26, 24, 10, 15, 15))}
    for m in range(6, 64, 4):
        for a in range(1, m):
            if gcd(a, m) == 2:
                listed.add(C.Core(m, ((m * k // 2 - a) % m, a) + (m // 2,) * (k - 2)))
    assert listed <= found
    # the rest are unit multiples of the listed m = 30 cores
    orbit = {C.Core(30, tuple(u * r % 30 for r in (4, 6, 20, 15, 15)))
             for u in range(1, 30) if gcd(u, 30) == 1}
    assert found - listed == orbit - listed and len(found - listed) == 4
