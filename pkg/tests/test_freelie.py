"""Free Lie algebras over Lyndon words."""

import pytest
from hypothesis import given, settings, strategies as st

from dklie.freelie import (LieElement, ShuffleQuotient, bracketed_string,
                           is_lyndon, lyndon_basis, lyndon_elements,
                           lyndon_words, multilinear_basis, shuffle_subspace,
                           shuffle_sums, standard_factorization,
                           witt_dimension, word_tensor_expansion)


@pytest.mark.parametrize("d,expected", [(1, 2), (2, 1), (3, 2), (4, 3),
                                        (5, 6), (6, 9), (7, 18), (8, 30)])
def test_witt_two_letters(d, expected):
    assert witt_dimension(2, d) == expected


def test_witt_one_letter():
    assert witt_dimension(1, 1) == 1
    assert all(witt_dimension(1, d) == 0 for d in range(2, 8))


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 5), st.integers(1, 7))
def test_necklace_identity(m, n):
    # sum of d * witt(m, d) over divisors d of n counts all length-n words
    total = sum(d * witt_dimension(m, d) for d in range(1, n + 1)
                if n % d == 0)
    assert total == m ** n


def test_lyndon_words_two_letters_weight_three():
    assert lyndon_words(2, 3) == [(1, 1, 2), (1, 2, 2)]


def test_lyndon_counts_match_witt():
    for m in (2, 3):
        for d in range(1, 6):
            assert len(lyndon_words(m, d)) == witt_dimension(m, d)


@settings(max_examples=80, deadline=None)
@given(st.lists(st.integers(1, 3), min_size=1, max_size=6))
def test_is_lyndon_definition(letters):
    word = tuple(letters)
    expected = all(word < word[i:] for i in range(1, len(word)))
    assert is_lyndon(word) == expected


def test_standard_factorization():
    # the right factor is the longest proper Lyndon suffix
    assert standard_factorization((1, 1, 2)) == ((1,), (1, 2))
    assert standard_factorization((1, 2, 2)) == ((1, 2), (2,))


def test_bracketed_string():
    assert bracketed_string((1, 2)) == "[1,2]"
    assert bracketed_string((1, 1, 2)) == "[1,[1,2]]"


def test_lyndon_basis_sizes():
    for d in range(1, 7):
        assert len(lyndon_basis(2, d)) == witt_dimension(2, d)


def test_tensor_expansion_leading_term():
    # expansion of a Lyndon bracketing contains its own word with
    # coefficient 1; this is what makes triangular reduction work
    for word in lyndon_words(3, 4):
        exp = word_tensor_expansion(word)
        assert exp.get(word) == 1


def test_bracket_antisymmetry_and_jacobi():
    x = LieElement.generator(2, 1)
    y = LieElement.generator(2, 2)
    xy = x.bracket(y)
    assert xy == y.bracket(x).scale(-1)
    a, b, c = x, y, xy
    jac = (a.bracket(b.bracket(c)) + b.bracket(c.bracket(a))
           + c.bracket(a.bracket(b)))
    assert not jac


def test_lyndon_elements_expand_independently():
    elems = lyndon_elements(2, 4)
    seen = set()
    for e in elems:
        exp = e.tensor_expansion()
        lead = min(w for w in exp if w in set(lyndon_words(2, 4)))
        assert lead not in seen
        seen.add(lead)


def test_multilinear_basis_size():
    for n in range(2, 6):
        assert len(multilinear_basis(n)) == _factorial(n - 1)


def _factorial(k):
    out = 1
    for i in range(2, k + 1):
        out *= i
    return out


def test_shuffle_sums_kill_lie_elements():
    """Coefficient functionals of proper shuffles vanish on Lie elements:
    pairing each shuffle-sum vector against the tensor expansion of a
    multilinear Lie bracket gives zero."""
    for n in (3, 4):
        lie = multilinear_basis(n)
        for vec in shuffle_sums(n):
            for e in lie:
                exp = e.tensor_expansion()
                total = 0
                for word, c in vec.terms.items():
                    total += c * exp.get(word, 0)
                assert total == 0


def test_shuffle_subspace_dimension():
    # multilinear part splits as lie + shuffles: (n-1)! + shuffle rank = n!
    for n in (3, 4):
        q = ShuffleQuotient(n)
        assert q.shuffle_rank + _factorial(n - 1) == _factorial(n)
        assert len(shuffle_subspace(n)) == q.shuffle_rank
