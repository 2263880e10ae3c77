import json

import pytest
from hypothesis import given, settings, strategies as st

from redtypes.acceptance import (cycle_fibre, dstar_fibre, kodaira_fibres, tree_fibre,
                                 worked_example_fibre)
from redtypes.fibre import (Component, DecompositionData, ExceptionalType, Fibre, FibreError,
                            PrincipalInvariants, PrincipalType, abelian_toric, assemble, chi,
                            chi_sum_check, decompose, exceptional_fibre, exceptional_form,
                            family_representative, is_semistable, is_snc, self_intersection,
                            total_genus, validate)


def test_json_round_trip():
    f = kodaira_fibres()["III*"]
    assert Fibre.from_json(f.dumps()).to_json() == f.to_json()


@pytest.mark.parametrize("obj", [
    {"components": [{"id": 0, "m": 1, "colour": 3}], "intersections": []},
    {"components": [{"id": 0, "m": 1}], "intersections": [], "extra": 1},
    {"components": [{"id": 0, "m": 1}, {"id": 1, "m": 1}], "intersections": [[1, 0, 1]]},
    {"components": [{"id": 0, "m": 1}, {"id": 1, "m": 1}], "intersections": [[0, 1, 0]]},
    {"components": [{"id": 0, "m": 1}, {"id": 1, "m": 1}], "intersections": [[0, 1, 1], [0, 1, 1]]},
    {"components": [{"id": 1, "m": 1}], "intersections": []},
    {"components": [{"id": 0, "m": "2"}], "intersections": []},
])
def test_json_rejects(obj):
    with pytest.raises(FibreError):
        Fibre.from_json(json.dumps(obj))


def test_kodaira_valid_genus_one():
    for name, f in kodaira_fibres().items():
        assert validate(f) == [], name
        assert total_genus(f) == 1, name


def test_kodaira_two_figure_multiplicities():
    # outer chains of II start with 1, 2, 3 (the core 6^{1,2,3})
    assert validate(tree_fibre(6, [[1], [2], [3]])) == []
    # reading the table entry literally (1, 1, 3) breaks the kernel condition
    assert any("kernel" in e for e in validate(tree_fibre(6, [[1], [1], [3]])))


def test_self_intersection():
    f = kodaira_fibres()["II*"]
    assert [self_intersection(f, c.id) for c in f.components] == [-2] * len(f)


def test_violations():
    assert validate(Fibre([Component(0, 1)])) == ["total genus is 0"]
    disc = Fibre([Component(0, 1, 1), Component(1, 1, 1)])
    assert "fibre is not connected" in validate(disc)
    bad = tree_fibre(3, [[1], [1]])
    assert any("kernel" in e for e in validate(bad))
    # a rational tail meeting the rest once is a (-1)-curve
    minus1 = Fibre.from_json({"components": [{"id": 0, "m": 1, "g": 2}, {"id": 1, "m": 1}],
                              "intersections": [[0, 1, 1]]})
    assert any("(-1)" in e for e in validate(minus1))


def test_worked_example_decomposition():
    f = worked_example_fibre()
    assert validate(f) == [] and total_genus(f) == 3
    d, records = decompose(f)
    assert sorted(chi(p) for p in d.principals) == [-1, -1, -1, -1]
    assert chi_sum_check(f)
    assert abelian_toric(f) == (0, 0)


def test_exceptional():
    for n in (1, 2, 5):
        f = cycle_fibre(n)
        assert exceptional_form(f) == (1, n)
        with pytest.raises(ExceptionalType) as e:
            decompose(f)
        assert (e.value.c, e.value.n) == (1, n)
    f = exceptional_fibre(3, 4)
    assert exceptional_form(f) == (3, 4) and validate(f) == []
    assert abelian_toric(f) == (0, 1)
    assert family_representative(f).to_json() == exceptional_fibre(3, 1).to_json()


def test_assemble_loop_node():
    # a minimal-depth loop on an m=1 component is a node
    P = [PrincipalInvariants(1, 0, (), (1, 1, 1, 1))]
    f = assemble(DecompositionData(P, [((0, 0), (0, 1)), ((0, 2), (0, 3))], [1, 2]))
    assert f[0].nodes == 1 and total_genus(f) == 2 and validate(f) == []


def test_semistable_flags():
    assert is_semistable(cycle_fibre(3)) and is_snc(cycle_fibre(3))
    assert not is_snc(cycle_fibre(1))
    assert not is_semistable(dstar_fibre(2))


def test_principal_type_normalises():
    t = PrincipalType(6, 0, (3, 2), ((2, 2),), (), (5, 1))
    assert t.O == (2, 3) and t.LM == (1, 5)
    assert t.invariants().L == (1, 5, 2, 2)
    assert t.chi == chi(t.invariants())


def test_decomposition_violations():
    P = [PrincipalInvariants(2, 0, (1,), (1,))]
    d = DecompositionData(P, [((0, 0), (0, 0))], [0])
    assert d.violations()


def _fibre_from_chains(n_depths):
    # two genus-one m=1 components joined by chains of given lengths
    P = [PrincipalInvariants(1, 1, (), (1,) * len(n_depths)), PrincipalInvariants(1, 1, (), (1,) * len(n_depths))]
    pairs = [((0, i), (1, i)) for i in range(len(n_depths))]
    return assemble(DecompositionData(P, pairs, list(n_depths)))


@settings(max_examples=50)
@given(st.lists(st.integers(1, 5), min_size=1, max_size=3))
def test_genus_of_assembled(depths):
    f = _fibre_from_chains(depths)
    assert validate(f) == []
    assert total_genus(f) == 2 + len(depths) - 1
    assert chi_sum_check(f)
    a, t = abelian_toric(f)
    assert a + t == total_genus(f)


@settings(max_examples=50)
@given(st.lists(st.integers(1, 5), min_size=1, max_size=3), st.randoms())
def test_decompose_relabel_invariant(depths, rnd):
    f = _fibre_from_chains(depths)
    perm = list(range(len(f)))
    rnd.shuffle(perm)
    g = f.relabel(perm)
    d1, _ = decompose(f)
    d2, _ = decompose(g)
    key = lambda d: sorted((p.m, p.g, p.O, tuple(sorted(p.L))) for p in d.principals)
    assert key(d1) == key(d2) and sorted(d1.depths) == sorted(d2.depths)
