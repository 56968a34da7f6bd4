"""Infinitesimal braid Lie algebras on finite sets and their functorial maps."""

import random

import pytest

from dklie.dk import (DKBasis, FinSet, PreconditionError, SetMap,
                      check_commutation, dilation, direct_image, dk_basis,
                      dk_compose, generator_element, inverse_image,
                      partial_pullback)
from dklie.freelie import witt_dimension

T3 = FinSet.range(3)
T4 = FinSet.range(4)


def witt_sum(n, w):
    return sum(witt_dimension(k, w) for k in range(1, n))


@pytest.mark.parametrize("n,dims", [
    (2, [1, 0, 0, 0]),
    (3, [3, 1, 2, 3]),
    (4, [6, 4, 10, 21]),
])
def test_small_dimensions(n, dims):
    for w, d in enumerate(dims, start=1):
        assert dk_basis(FinSet.range(n), w).dim == d
        assert d == witt_sum(n, w)


def test_defining_relations_vanish():
    t12 = generator_element(T4, 1, 2)
    t34 = generator_element(T4, 3, 4)
    t13 = generator_element(T4, 1, 3)
    t23 = generator_element(T4, 2, 3)
    assert not t12.bracket(t34)                      # disjoint pairs commute
    assert not t12.bracket(t13 + t23)                # the local relation
    assert t12.bracket(t13)                          # but not each term alone


def test_generator_symmetry():
    assert generator_element(T3, 2, 1) == generator_element(T3, 1, 2)
    with pytest.raises(ValueError):
        generator_element(T3, 1, 1)


def test_jacobi_in_quotient():
    rng = random.Random(9)
    basis = dk_basis(T4, 1)
    elems = basis.basis_elements()
    for _ in range(12):
        a, b, c = (rng.choice(elems) for _ in range(3))
        jac = (a.bracket(b.bracket(c)) + b.bracket(c.bracket(a))
               + c.bracket(a.bracket(b)))
        assert not jac


def test_dilation_scales_by_weight_power():
    t12 = generator_element(T3, 1, 2)
    t13 = generator_element(T3, 1, 3)
    x = t12.bracket(t13)
    assert dilation(3, x) == x.scale(9)
    assert dilation(2, t12) == t12.scale(2)


def test_direct_image_on_generators():
    f = SetMap.total(T3, T4, {1: 2, 2: 4, 3: 1})
    t12 = generator_element(T3, 1, 2)
    assert direct_image(f, t12) == generator_element(T4, 2, 4)


def test_direct_image_requires_injective_total():
    f = SetMap.total(T3, FinSet.range(2), {1: 1, 2: 1, 3: 2})
    with pytest.raises(PreconditionError):
        direct_image(f, generator_element(T3, 1, 2))
    g = SetMap(T3, T4, {1: 1, 2: 2})
    with pytest.raises(PreconditionError):
        direct_image(g, generator_element(T3, 1, 2))


def test_inverse_image_fiber_sum():
    # collapse {2,3}: t12 pulls back to t12 + t13
    f = SetMap.total(T3, FinSet.range(2), {1: 1, 2: 2, 3: 2})
    t12 = generator_element(FinSet.range(2), 1, 2)
    pulled = inverse_image(f, t12)
    expected = generator_element(T3, 1, 2) + generator_element(T3, 1, 3)
    assert pulled == expected


def test_inverse_image_requires_total():
    f = SetMap(T3, FinSet.range(2), {1: 1, 3: 2})
    with pytest.raises(PreconditionError):
        inverse_image(f, generator_element(FinSet.range(2), 1, 2))


def test_partial_pullback_worked_example():
    f = SetMap(T3, FinSet.range(2), {1: 1, 3: 2})
    t12 = generator_element(FinSet.range(2), 1, 2)
    assert partial_pullback(f, t12) == generator_element(T3, 1, 3)


def _random_injection(rng, src, dst):
    labels = rng.sample(sorted(dst.labels), len(src))
    return SetMap.total(src, dst, dict(zip(sorted(src.labels), labels)))


def _random_total(rng, src, dst):
    labels = sorted(dst.labels)
    return SetMap.total(src, dst,
                        {x: rng.choice(labels) for x in sorted(src.labels)})


def test_functoriality_random_maps():
    """(g o f)_* = g_* o f_* and (g o f)^* = f^* o g^* on random elements."""
    rng = random.Random(23)
    for _ in range(10):
        ns = rng.randint(2, 3)
        nt = rng.randint(ns, 4)
        nr = rng.randint(nt, 5)
        S, T, R = (FinSet.range(k) for k in (ns, nt, nr))
        f = _random_injection(rng, S, T)
        g = _random_injection(rng, T, R)
        w = rng.randint(1, 2)
        for x in dk_basis(S, w).basis_elements():
            assert direct_image(g, direct_image(f, x)) == \
                direct_image(g.compose(f), x)
        p = _random_total(rng, T, S)
        q = _random_total(rng, R, T)
        for x in dk_basis(S, w).basis_elements():
            assert inverse_image(q, inverse_image(p, x)) == \
                inverse_image(p.compose(q), x)


def test_images_preserve_brackets():
    rng = random.Random(51)
    S, T = FinSet.range(3), FinSet.range(5)
    f = _random_injection(rng, S, T)
    p = _random_total(rng, T, S)
    b1 = dk_basis(S, 1).basis_elements()
    for x in b1:
        for y in b1:
            assert direct_image(f, x.bracket(y)) == \
                direct_image(f, x).bracket(direct_image(f, y))
            assert inverse_image(p, x.bracket(y)) == \
                inverse_image(p, x).bracket(inverse_image(p, y))


def test_commutation_of_pushed_and_pulled_images():
    T5 = FinSet.range(5)
    f = SetMap.total(FinSet.range(2), T5, {1: 1, 2: 2})
    # both points of im(f) sit in one fiber of g
    g = SetMap.total(T5, T3, {1: 1, 2: 1, 3: 2, 4: 3, 5: 2})
    ok, witness = check_commutation(f, g, weight_cap=3)
    assert ok and witness is None


def test_commutation_preconditions():
    f = SetMap.total(T3, FinSet.range(2), {1: 1, 2: 1, 3: 2})  # not injective
    g = SetMap.total(FinSet.range(2), T3, {1: 1, 2: 2})
    with pytest.raises(PreconditionError):
        check_commutation(f, g)


def test_dk_compose_insertion():
    # inserting the two-point algebra at a point of [2] lands in g on 3 points
    X = FinSet.range(2)
    Y = FinSet(["a", "b"])
    a = generator_element(X, 1, 2)
    b = generator_element(Y, "a", "b")
    out = dk_compose(X, 2, Y, a, b)
    part = out.component(1)
    assert len(part.T) == 3
    collapse = SetMap.total(part.T, X, {1: 1, "a": 2, "b": 2})
    include = SetMap.total(Y, part.T, {"a": "a", "b": "b"})
    assert part == inverse_image(collapse, a) + direct_image(include, b)


def test_rep_strings_deterministic():
    one = dk_basis(T4, 3)
    two = DKBasis(T4, 3)
    assert one.rep_strings() == two.rep_strings()


def test_to_coords_round_trip():
    basis = dk_basis(T3, 2)
    for i, e in enumerate(basis.basis_elements()):
        coords = basis.to_coords(e.free_terms())
        assert coords == {i: 1}


def test_disk_cache_round_trip(tmp_path, monkeypatch):
    monkeypatch.setenv("DKLIE_CACHE_DIR", str(tmp_path))
    from dklie import dk
    dk._TEMPLATES.clear()
    dk._BASES.clear()
    b1 = dk_basis(T3, 2)
    files = list(tmp_path.iterdir())
    assert files, "expected a cache file to be written"
    dk._TEMPLATES.clear()
    dk._BASES.clear()
    b2 = dk_basis(T3, 2)
    assert b1.rep_strings() == b2.rep_strings()
    dk._TEMPLATES.clear()
    dk._BASES.clear()
