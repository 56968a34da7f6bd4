"""Bar and Chevalley-Eilenberg complexes of the braid Lie algebras."""

import pytest

from dklie.complexes import (BarElement, CEElement, antisymmetrize,
                             bar_complex, bar_compose_ordered,
                             bar_differential, ce_boundary, ce_cells,
                             ce_complex, empty_bar_word, envelope,
                             homology_ranks, pbw_basis, relabel_bar,
                             single_factor_word, wedge_sort)
from dklie.dk import FinSet, SetMap, dk_basis, generator_element

T2 = FinSet.range(2)
T3 = FinSet.range(3)


def test_pbw_dimensions():
    assert len(pbw_basis(T2, 0)) == 1
    assert len(pbw_basis(T2, 3)) == 1          # polynomial algebra on t12
    assert len(pbw_basis(T3, 1)) == 3
    # weight 2: sym^2 of the 3 generators (6) plus the weight-2 Lie part (1)
    assert len(pbw_basis(T3, 2)) == 7


def test_envelope_multiplication_straightens():
    env = envelope(T3)
    b1 = dk_basis(T3, 1)
    keys = [(1, i) for i in range(b1.dim)]
    # commutator of two envelope generators equals their Lie bracket
    x, y = keys[0], keys[1]
    xy = env.multiply({(x,): 1}, {(y,): 1})
    yx = env.multiply({(y,): 1}, {(x,): 1})
    diff = dict(xy)
    for mono, c in yx.items():
        v = diff.get(mono, 0) - c
        if v:
            diff[mono] = v
        else:
            del diff[mono]
    t12, t13 = b1.basis_elements()[0], b1.basis_elements()[1]
    br = t12.bracket(t13)
    expected = {((2, i),): c for i, c in br.coords.items()}
    assert diff == expected


def test_wedge_sort_sign_and_duplicates():
    assert wedge_sort(((1, 1), (1, 0))) == (((1, 0), (1, 1)), -1)
    assert wedge_sort(((1, 0), (1, 0))) is None
    assert wedge_sort(((1, 0), (1, 2))) == (((1, 0), (1, 2)), 1)


def test_ce_boundary_pinned_sign():
    # d(x ^ y) = [x, y] with the (-1)^(i+j+1) convention at (i, j) = (1, 2)
    x = CEElement(T3, {((1, 0), (1, 1)): 1})
    d = ce_boundary(x)
    t12 = generator_element(T3, 1, 2)
    t13 = generator_element(T3, 1, 3)
    br = t12.bracket(t13)
    assert d == CEElement(T3, {((2, i),): c for i, c in br.coords.items()})


def test_ce_dsquared_zero():
    for w in range(1, 5):
        assert ce_complex(T3, w).check_dsquared() is None


def test_bar_dsquared_zero():
    for w in range(1, 5):
        assert bar_complex(T3, w, -w).check_dsquared() is None


def test_bar_complex_rejects_bad_floor():
    with pytest.raises(ValueError):
        bar_complex(T2, 1, 0)


def test_two_point_homology_is_koszul():
    """g(2) is one-dimensional abelian: homology is an exterior algebra on
    one class in degree -1, weight 1."""
    for w in range(0, 5):
        bar = homology_ranks(bar_complex(T2, w, -max(w, 1)))
        ce = homology_ranks(ce_complex(T2, w))
        expected = {}
        if w == 0:
            expected[(0, 0)] = 1
        if w == 1:
            expected[(-1, 1)] = 1
        assert {k: v for k, v in bar.items() if v} == expected
        assert {k: v for k, v in ce.items() if v} == expected


def test_antisymmetrize_unnormalized():
    x = CEElement(T3, {((1, 0), (1, 1)): 1})
    img = antisymmetrize(x)
    assert img.terms == {(((1, 0),), ((1, 1),)): 1,
                         (((1, 1),), ((1, 0),)): -1}


def test_antisymmetrize_is_chain_map():
    for w in range(1, 4):
        for m, chains in ce_cells(T3, w).items():
            if m == 0:
                continue
            for ch in chains:
                x = CEElement(T3, {ch: 1})
                assert bar_differential(antisymmetrize(x)) == \
                    antisymmetrize(ce_boundary(x))


def test_mu_generators_are_cycles():
    c = empty_bar_word(T2)
    t = single_factor_word(generator_element(T2, 1, 2))
    assert not bar_differential(c)
    assert not bar_differential(t)


def test_compose_with_unit_relabels():
    t = single_factor_word(generator_element(T2, 1, 2))
    c = empty_bar_word(T2)
    # inserting the empty word only renames points
    left = bar_compose_ordered(t, 1, c)
    assert sorted(len(word) for word in left.terms) == [1, 1]


def test_gerstenhaber_defects_vanish_on_the_nose():
    c = empty_bar_word(T2)
    t = single_factor_word(generator_element(T2, 1, 2))
    rho = SetMap.total(T3, T3, {1: 2, 2: 3, 3: 1})
    swap12 = SetMap.total(T3, T3, {1: 2, 2: 1, 3: 3})

    assert bar_compose_ordered(c, 1, c) == bar_compose_ordered(c, 2, c)

    tt = bar_compose_ordered(t, 1, t)
    jac = tt + relabel_bar(tt, rho) + relabel_bar(relabel_bar(tt, rho), rho)
    assert not jac

    leib = (bar_compose_ordered(t, 2, c) - bar_compose_ordered(c, 1, t)
            - relabel_bar(bar_compose_ordered(c, 2, t), swap12))
    assert not leib


def test_bar_compose_raises_off_label():
    c = empty_bar_word(T2)
    with pytest.raises(ValueError):
        bar_compose_ordered(c, 3, c)
