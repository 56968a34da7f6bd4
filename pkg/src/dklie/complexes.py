"""Envelopes and chain complexes over the braid Lie algebras.

Universal envelopes are handled through weight-truncated PBW bases: a
monomial is a weakly increasing tuple of quotient-basis keys (weight, index),
and products straighten out-of-order adjacent pairs against the quotient
bracket.  On top of that sit the reduced tensor-coalgebra complex (factors
from the augmentation ideal, merging differential) and the exterior-power
chain complex of the Lie algebra itself (bracket differential), the
antisymmetrization comparison map between them, insertion composition of
tensor words, and exact homology ranks.

Sign conventions, fixed once and validated by the d^2 = 0 and chain-map
tests: merging differential d(a_1|...|a_l) = sum_i (-1)^(i-1)(...|a_i
a_{i+1}|...); bracket differential uses (-1)^(i+j+1) on the (i, j) pair;
antisymmetrization carries the permutation sign and no 1/m! factor.  The
three are jointly consistent; changing any one breaks the comparison map.
"""

import threading
from itertools import combinations, permutations

from .dk import FinSet, SetMap, dk_basis, direct_image, inverse_image
from .exactla import SparseMatrix, rank, rat, rat_str


def _as_finset(T):
    return T if isinstance(T, FinSet) else FinSet(T)


class Envelope:
    """Weight-truncated universal envelope of the algebra on T, with PBW
    monomial bases and straightening multiplication."""

    def __init__(self, T):
        self.T = _as_finset(T)
        self._mono_memo = {}
        self._straight_memo = {}
        self._swap_memo = {}

    def quotient_basis(self, w):
        return dk_basis(self.T, w)

    def key_element(self, key):
        w, i = key
        return self.quotient_basis(w).element({i: 1})

    def _keys_of_weight(self, w):
        return [(w, i) for i in range(self.quotient_basis(w).dim)]

    def monomials(self, weight, _min_key=None):
        """All PBW monomials of the given total weight, lexicographically
        ordered, factors weakly increasing."""
        memo_key = (weight, _min_key)
        hit = self._mono_memo.get(memo_key)
        if hit is not None:
            return hit
        if weight == 0:
            out = [()]
        else:
            out = []
            for w1 in range(1, weight + 1):
                for key in self._keys_of_weight(w1):
                    if _min_key is not None and key < _min_key:
                        continue
                    for rest in self.monomials(weight - w1, key):
                        out.append((key,) + rest)
        self._mono_memo[memo_key] = out
        return out

    def _swap(self, ka, kb):
        """x_ka * x_kb for ka > kb, as a monomial combination."""
        memo = self._swap_memo
        hit = memo.get((ka, kb))
        if hit is None:
            br = self.key_element(ka).bracket(self.key_element(kb))
            hit = {(kb, ka): rat(1)}
            for i, c in br.coords.items():
                hit[((br.weight, i),)] = c
            memo[(ka, kb)] = hit
        return hit

    def straighten(self, factors):
        """Normal form of an arbitrary product of quotient-basis keys."""
        memo = self._straight_memo
        hit = memo.get(factors)
        if hit is not None:
            return hit
        for pos in range(len(factors) - 1):
            if factors[pos] > factors[pos + 1]:
                break
        else:
            memo[factors] = {factors: rat(1)}
            return memo[factors]
        out = {}
        for mid, c in self._swap(factors[pos], factors[pos + 1]).items():
            sub = self.straighten(factors[:pos] + mid + factors[pos + 2:])
            for m, c2 in sub.items():
                v = out.get(m, rat(0)) + c * c2
                if v:
                    out[m] = v
                else:
                    out.pop(m, None)
        memo[factors] = out
        return out

    def multiply(self, t1, t2):
        """Product of two monomial combinations {monomial: coeff}."""
        out = {}
        for m1, c1 in t1.items():
            for m2, c2 in t2.items():
                for m, c in self.straighten(m1 + m2).items():
                    v = out.get(m, rat(0)) + c1 * c2 * c
                    if v:
                        out[m] = v
                    else:
                        out.pop(m, None)
        return out


_ENVELOPES = {}
_ENV_LOCK = threading.RLock()


def envelope(T):
    T = _as_finset(T)
    with _ENV_LOCK:
        hit = _ENVELOPES.get(T.labels)
        if hit is None:
            hit = Envelope(T)
            _ENVELOPES[T.labels] = hit
        return hit


def pbw_basis(T, weight):
    """PBW monomials of the given total weight (tuples of (weight, index)
    quotient keys, weakly increasing)."""
    if weight < 0:
        raise ValueError("weight must be nonnegative")
    return envelope(T).monomials(weight)


class EnvelopeMap:
    """Algebra map between envelopes extending a Lie-algebra map; generator
    images computed lazily per quotient key and memoized."""

    def __init__(self, source, target, lie_map):
        self.source = source
        self.target = target
        self.lie_map = lie_map
        self.key_images = {}
        self._memo = {}

    def _image_of_key(self, key):
        img = self.key_images.get(key)
        if img is None:
            w, i = key
            out = self.lie_map(self.source.quotient_basis(w).element({i: 1}))
            img = {(out.weight, j): c for j, c in out.coords.items()}
            self.key_images[key] = img
        return img

    def apply_monomial(self, mono):
        hit = self._memo.get(mono)
        if hit is not None:
            return hit
        cur = {(): rat(1)}
        for key in mono:
            img = {(k,): c for k, c in self._image_of_key(key).items()}
            cur = self.target.multiply(cur, img)
            if not cur:
                break
        self._memo[mono] = cur
        return cur

    def apply(self, terms):
        out = {}
        for m, c in terms.items():
            for m2, c2 in self.apply_monomial(m).items():
                v = out.get(m2, rat(0)) + c * c2
                if v:
                    out[m2] = v
                else:
                    out.pop(m2, None)
        return out


def lie_envelope_map(f_source, f_target, lie_map):
    """Envelope algebra map extending the given map of Lie elements."""
    return EnvelopeMap(envelope(f_source), envelope(f_target), lie_map)


class BarElement:
    """Combination of reduced tensor words; a word is a tuple of PBW
    monomials, each of weight >= 1."""

    __slots__ = ("T", "terms")

    def __init__(self, T, terms=()):
        self.T = _as_finset(T)
        self.terms = {}
        for word, c in dict(terms).items():
            c = rat(c)
            if c:
                self.terms[word] = c

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        return (isinstance(other, BarElement) and self.T == other.T
                and self.terms == other.terms)

    def __add__(self, other):
        if self.T != other.T:
            raise ValueError("sums across label sets")
        out = dict(self.terms)
        for w, c in other.terms.items():
            v = out.get(w, rat(0)) + c
            if v:
                out[w] = v
            else:
                del out[w]
        return BarElement(self.T, out)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c):
        c = rat(c)
        return BarElement(self.T, {w: c * v for w, v in self.terms.items()}
                          if c else {})

    def __str__(self):
        if not self.terms:
            return "0"
        bits = []
        for word in sorted(self.terms):
            factors = "|".join("*".join("e%d_%d" % k for k in mono)
                               for mono in word) or "1"
            bits.append("%s(%s)" % (rat_str(self.terms[word]), factors))
        return " + ".join(bits)


def empty_bar_word(T):
    """The degree-0, weight-0 word with no tensor factors."""
    return BarElement(T, {(): 1})


def single_factor_word(elem):
    """Wrap a Lie element as a one-factor tensor word (degree -1)."""
    return BarElement(elem.T, {(((elem.weight, i),),): c
                               for i, c in elem.coords.items()})


def bar_differential_terms(env, word):
    """d of one tensor word: alternating sum of adjacent merges."""
    out = {}
    sign = rat(1)
    for i in range(len(word) - 1):
        prod = env.multiply({word[i]: rat(1)}, {word[i + 1]: rat(1)})
        for m, c in prod.items():
            merged = word[:i] + (m,) + word[i + 2:]
            v = out.get(merged, rat(0)) + sign * c
            if v:
                out[merged] = v
            else:
                out.pop(merged, None)
        sign = -sign
    return out


def bar_differential(elem):
    env = envelope(elem.T)
    out = {}
    for word, c in elem.terms.items():
        for w2, c2 in bar_differential_terms(env, word).items():
            v = out.get(w2, rat(0)) + c * c2
            if v:
                out[w2] = v
            else:
                out.pop(w2, None)
    return BarElement(elem.T, out)


class CEElement:
    """Combination of exterior-power chains; a chain is a strictly
    increasing tuple of quotient-basis keys."""

    __slots__ = ("T", "terms")

    def __init__(self, T, terms=()):
        self.T = _as_finset(T)
        self.terms = {}
        for chain, c in dict(terms).items():
            c = rat(c)
            if c:
                self.terms[chain] = c

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        return (isinstance(other, CEElement) and self.T == other.T
                and self.terms == other.terms)

    def __add__(self, other):
        out = dict(self.terms)
        for ch, c in other.terms.items():
            v = out.get(ch, rat(0)) + c
            if v:
                out[ch] = v
            else:
                del out[ch]
        return CEElement(self.T, out)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c):
        c = rat(c)
        return CEElement(self.T, {ch: c * v for ch, v in self.terms.items()}
                         if c else {})

    def __str__(self):
        if not self.terms:
            return "0"
        bits = []
        for ch in sorted(self.terms):
            body = "^".join("e%d_%d" % k for k in ch) or "1"
            bits.append("%s(%s)" % (rat_str(self.terms[ch]), body))
        return " + ".join(bits)


def wedge_sort(keys):
    """Sort a key tuple into strict order; returns (chain, sign) or None
    when two factors coincide."""
    keys = list(keys)
    sign = 1
    for i in range(1, len(keys)):
        j = i
        while j > 0 and keys[j] < keys[j - 1]:
            keys[j], keys[j - 1] = keys[j - 1], keys[j]
            sign = -sign
            j -= 1
    for i in range(len(keys) - 1):
        if keys[i] == keys[i + 1]:
            return None
    return tuple(keys), sign


def ce_cells(T, weight):
    """Wedge-degree m -> list of strictly increasing key tuples of total
    weight; m runs from 0 upward."""
    T = _as_finset(T)
    keys = []
    for w in range(1, weight + 1):
        b = dk_basis(T, w)
        keys.extend((w, i) for i in range(b.dim))
    cells = {0: [()] if weight == 0 else []}
    for m in range(1, weight + 1):
        cells[m] = [ch for ch in combinations(keys, m)
                    if sum(k[0] for k in ch) == weight]
    return {m: chs for m, chs in cells.items() if chs or m == 0}


def ce_boundary_chain(T, chain):
    """Bracket differential of one wedge chain, as {chain: coeff}."""
    T = _as_finset(T)
    out = {}
    for i in range(len(chain)):
        for j in range(i + 1, len(chain)):
            ki, kj = chain[i], chain[j]
            br = (dk_basis(T, ki[0]).element({ki[1]: 1})
                  .bracket(dk_basis(T, kj[0]).element({kj[1]: 1})))
            if not br:
                continue
            sign = rat(-1) ** (i + j + 1)
            rest = tuple(k for p, k in enumerate(chain) if p not in (i, j))
            for idx, c in br.coords.items():
                srt = wedge_sort(((br.weight, idx),) + rest)
                if srt is None:
                    continue
                ch2, s2 = srt
                v = out.get(ch2, rat(0)) + sign * s2 * c
                if v:
                    out[ch2] = v
                else:
                    out.pop(ch2, None)
    return out


def ce_boundary(elem):
    out = {}
    for chain, c in elem.terms.items():
        for ch2, c2 in ce_boundary_chain(elem.T, chain).items():
            v = out.get(ch2, rat(0)) + c * c2
            if v:
                out[ch2] = v
            else:
                out.pop(ch2, None)
    return CEElement(elem.T, out)


def antisymmetrize(elem):
    """Comparison map into tensor words: each wedge chain goes to the
    signed sum of all orderings, one single-key factor per slot."""
    out = {}
    for chain, c in elem.terms.items():
        m = len(chain)
        for perm in permutations(range(m)):
            sign = 1
            for a in range(m):
                for b in range(a + 1, m):
                    if perm[a] > perm[b]:
                        sign = -sign
            word = tuple((chain[p],) for p in perm)
            v = out.get(word, rat(0)) + rat(sign) * c
            if v:
                out[word] = v
            else:
                out.pop(word, None)
    return BarElement(elem.T, out)


class ChainComplex:
    """Finite family of cells (degree, weight) with degree-raising
    differentials; d composes to zero on every pair (checked)."""

    def __init__(self, components, differentials, name=""):
        self.components = components
        self.differentials = differentials
        self.name = name

    def dim(self, degree, weight):
        return len(self.components.get((degree, weight), ()))

    def check_dsquared(self):
        """Returns the first cell where d after d is nonzero, else None."""
        for (deg, w), mat in sorted(self.differentials.items()):
            nxt = self.differentials.get((deg + 1, w))
            if nxt is None or mat.nrows == 0 or nxt.nrows == 0:
                continue
            for col in range(mat.ncols):
                vec = mat.apply({col: rat(1)})
                if nxt.apply(vec):
                    return (deg, w)
        return None

    def to_json(self):
        cells = [{"degree": d, "weight": w, "dimension": len(basis)}
                 for (d, w), basis in sorted(self.components.items())]
        diffs = [{"degree": d, "weight": w,
                  "entries": [[r, c, rat_str(v)]
                              for (r, c), v in sorted(mat.entries.items())]}
                 for (d, w), mat in sorted(self.differentials.items())]
        return {"name": self.name, "cells": cells, "differentials": diffs}


def bar_complex(T, weight, min_degree):
    """Reduced tensor-word complex of the envelope at one weight, degrees
    min_degree..0."""
    if min_degree > -1:
        raise ValueError("min_degree must be <= -1")
    T = _as_finset(T)
    env = envelope(T)

    def words(l):
        if l == 0:
            return [()] if weight == 0 else []
        out = []

        def rec(prefix, remaining, slots):
            if slots == 0:
                if remaining == 0:
                    out.append(prefix)
                return
            for w in range(1, remaining - slots + 2):
                for mono in env.monomials(w):
                    rec(prefix + (mono,), remaining - w, slots - 1)

        rec((), weight, l)
        return out

    components = {}
    for l in range(0, -min_degree + 1):
        components[(-l, weight)] = words(l)
    differentials = {}
    for l in range(1, -min_degree + 1):
        source = components[(-l, weight)]
        target = components[(-l + 1, weight)]
        tindex = {wrd: i for i, wrd in enumerate(target)}
        entries = {}
        for col, word in enumerate(source):
            for merged, c in bar_differential_terms(env, word).items():
                entries[(tindex[merged], col)] = c
        differentials[(-l, weight)] = SparseMatrix(len(target), len(source),
                                                   entries)
    return ChainComplex(components, differentials,
                        name="bar(%d points, weight %d)" % (len(T), weight))


def ce_complex(T, weight):
    """Exterior-power chain complex of the algebra on T at one weight."""
    if weight < 0:
        raise ValueError("weight must be nonnegative")
    T = _as_finset(T)
    cells = ce_cells(T, weight)
    components = {(-m, weight): chs for m, chs in cells.items()}
    differentials = {}
    for m in sorted(cells):
        if m == 0:
            continue
        source = cells[m]
        target = cells.get(m - 1, [])
        tindex = {ch: i for i, ch in enumerate(target)}
        entries = {}
        for col, chain in enumerate(source):
            for ch2, c in ce_boundary_chain(T, chain).items():
                entries[(tindex[ch2], col)] = c
        differentials[(-m, weight)] = SparseMatrix(len(target), len(source),
                                                   entries)
    return ChainComplex(components, differentials,
                        name="ce(%d points, weight %d)" % (len(T), weight))


def homology_ranks(C):
    """Rank of homology at every cell; raises if the differentials do not
    compose to zero, naming the offending cell."""
    bad = C.check_dsquared()
    if bad is not None:
        raise ValueError("differential does not square to zero at cell "
                         "(degree %d, weight %d)" % bad)
    ranks = {}
    for (deg, w), basis in C.components.items():
        out = C.differentials.get((deg, w))
        inc = C.differentials.get((deg - 1, w))
        r_out = rank(out) if out is not None else 0
        r_in = rank(inc) if inc is not None else 0
        ranks[(deg, w)] = len(basis) - r_out - r_in
    return ranks


def _shuffle_signs(p, q):
    """Interleavings of p+q odd slots: yields (positions of the first word,
    sign) with the usual transposition-count sign."""
    for subset in combinations(range(p + q), p):
        inv = 0
        second = [pos for pos in range(p + q) if pos not in subset]
        for a in subset:
            for b in second:
                if b < a:
                    inv += 1
        yield subset, (-1) ** inv


def bar_compose(X, x, Y, a, b):
    """Insertion composition of tensor words: pull a back along the collapse
    map, push b in along the inclusion, then signed-shuffle the factors.

    The result lives over the label set X-{x} then Y, in that order.
    """
    X = _as_finset(X)
    Y = _as_finset(Y)
    if x not in X:
        raise ValueError("slot %r not in %r" % (x, X))
    keep = [l for l in X if l != x]
    if set(keep) & set(Y.labels):
        raise ValueError("labels of X-{x} and Y overlap")
    Z = FinSet(tuple(keep) + Y.labels)
    collapse = SetMap.total(Z, X, {**{l: l for l in keep}, **{l: x for l in Y}})
    include = SetMap.total(Y, Z, {l: l for l in Y})

    pull = lie_envelope_map(X, Z, lambda e: inverse_image(collapse, e))
    push = lie_envelope_map(Y, Z, lambda e: direct_image(include, e))

    out = {}
    for wa, ca in a.terms.items():
        words_a = _map_word(pull, wa)
        for wb, cb in b.terms.items():
            words_b = _map_word(push, wb)
            for ta, ca2 in words_a.items():
                for tb, cb2 in words_b.items():
                    coeff = ca * cb * ca2 * cb2
                    p, q = len(ta), len(tb)
                    for positions, sign in _shuffle_signs(p, q):
                        word = [None] * (p + q)
                        for idx, pos in enumerate(positions):
                            word[pos] = ta[idx]
                        rest = iter(tb)
                        for pos in range(p + q):
                            if word[pos] is None:
                                word[pos] = next(rest)
                        word = tuple(word)
                        v = out.get(word, rat(0)) + coeff * sign
                        if v:
                            out[word] = v
                        else:
                            out.pop(word, None)
    return BarElement(Z, out)


def _map_word(env_map, word):
    """Apply an envelope map factor-wise; expands factor images into a
    combination of words."""
    results = {(): rat(1)}
    for mono in word:
        img = env_map.apply_monomial(mono)
        nxt = {}
        for prefix, c in results.items():
            for m, c2 in img.items():
                if not m:
                    raise ValueError("factor image hit the unit; "
                                     "word is not reduced")
                v = nxt.get(prefix + (m,), rat(0)) + c * c2
                if v:
                    nxt[prefix + (m,)] = v
                else:
                    nxt.pop(prefix + (m,), None)
        results = nxt
    return results


def relabel_bar(elem, bijection):
    """Transport a bar element along a bijective SetMap."""
    if not (bijection.is_total and bijection.is_injective
            and len(bijection.source) == len(bijection.target)):
        raise ValueError("relabeling needs a bijection")
    env_map = lie_envelope_map(bijection.source, bijection.target,
                               lambda e: direct_image(bijection, e))
    out = {}
    for word, c in elem.terms.items():
        for w2, c2 in _map_word(env_map, word).items():
            v = out.get(w2, rat(0)) + c * c2
            if v:
                out[w2] = v
            else:
                out.pop(w2, None)
    return BarElement(bijection.target, out)


def bar_compose_ordered(a, slot, b):
    """bar_compose over canonical [m], [n] with the inserted block occupying
    positions slot..slot+n-1 of the standard-order result [m+n-1]."""
    m = len(a.T)
    n = len(b.T)
    if list(a.T.labels) != list(range(1, m + 1)):
        raise ValueError("first argument must live over 1..m")
    fresh = FinSet(range(m + 1, m + n + 1))
    offset = SetMap.total(b.T, fresh, {l: m + i + 1
                                       for i, l in enumerate(b.T.labels)})
    raw = bar_compose(a.T, slot, fresh, a, relabel_bar(b, offset))
    assign = {}
    for l in range(1, slot):
        assign[l] = l
    for i in range(n):
        assign[m + 1 + i] = slot + i
    for l in range(slot + 1, m + 1):
        assign[l] = l + n - 1
    final = SetMap.total(raw.T, FinSet.range(m + n - 1), assign)
    return relabel_bar(raw, final)
