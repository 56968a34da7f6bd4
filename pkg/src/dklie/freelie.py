"""Free Lie algebras on a finite alphabet, in the Lyndon-word basis.

Words are tuples of integer letters 1..m.  A Lyndon word is strictly smaller
than every proper suffix; the basis element attached to it is the standard
bracketing of its standard factorization.  Brackets of basis elements are
rewritten into the basis by the classical recursion on standard
factorizations, so all arithmetic stays in normal form.

Also here: the shuffle subspace of the group algebra k[S_n], which downstream
modules quotient by, and tensor-word expansions used for pairings.
"""

from functools import lru_cache
from itertools import combinations, permutations

from .exactla import Echelon, rat, rat_str


def mobius(d):
    m, p = 1, 2
    while p * p <= d:
        if d % p == 0:
            d //= p
            if d % p == 0:
                return 0
            m = -m
        else:
            p += 1
    return -m if d > 1 else m


def witt_dimension(m, w):
    """Dimension of the weight-w component of the free Lie algebra on m
    letters: (1/w) sum_{d|w} mobius(d) m^(w/d)."""
    if w < 1 or m < 1:
        return 0
    return sum(mobius(d) * m ** (w // d) for d in range(1, w + 1) if w % d == 0) // w


def is_lyndon(word):
    n = len(word)
    if n == 0:
        return False
    return all(word < word[i:] for i in range(1, n))


def lyndon_words(m, w):
    """All Lyndon words of length w over letters 1..m, lex increasing (Duval)."""
    if w < 1 or m < 1:
        return []
    out = []
    word = [1]
    while word:
        if len(word) == w:
            out.append(tuple(word))
        # extend periodically to length w, then increment
        ext = [word[i % len(word)] for i in range(w)]
        while ext and ext[-1] == m:
            ext.pop()
        if not ext:
            break
        ext[-1] += 1
        # the next candidate prefix; keep only prefixes that are Lyndon
        word = ext
        if not is_lyndon(tuple(word)):
            # Duval guarantees the incremented prefix is Lyndon; guard anyway
            raise AssertionError("duval produced a non-lyndon prefix")
    return out


@lru_cache(maxsize=None)
def standard_factorization(word):
    """Split a Lyndon word of length >= 2 as u v with v the longest proper
    Lyndon suffix; both halves are Lyndon."""
    for i in range(1, len(word)):
        if is_lyndon(word[i:]):
            return word[:i], word[i:]
    raise ValueError("no lyndon suffix: %r" % (word,))


_BRACKET = {}


def bracket_words(u, v):
    """[b_u, b_v] in the Lyndon basis, as {word: int}.  u, v Lyndon."""
    if u == v:
        return {}
    if v < u:
        return {w: -c for w, c in bracket_words(v, u).items()}
    key = (u, v)
    hit = _BRACKET.get(key)
    if hit is not None:
        return hit
    if len(u) == 1 or standard_factorization(u)[1] >= v:
        out = {u + v: 1}
    else:
        # u = u1 u2 with u2 < v: [b_u,b_v] = [[b_u1,b_v],b_u2] + [b_u1,[b_u2,b_v]]
        u1, u2 = standard_factorization(u)
        out = bracket_terms(bracket_words(u1, v), {u2: 1})
        for w, c in bracket_terms({u1: 1}, bracket_words(u2, v)).items():
            c2 = out.get(w, 0) + c
            if c2:
                out[w] = c2
            else:
                del out[w]
    _BRACKET[key] = out
    return out


def bracket_terms(d1, d2):
    """Bilinear extension of bracket_words to {word: coeff} dicts."""
    out = {}
    for w1, c1 in d1.items():
        for w2, c2 in d2.items():
            c12 = c1 * c2
            for w, c in bracket_words(w1, w2).items():
                cw = out.get(w, 0) + c12 * c
                if cw:
                    out[w] = cw
                else:
                    del out[w]
    return out


def substitute_terms(terms, images):
    """Apply the Lie homomorphism letter -> images[letter] to a normal-form
    term dict; images values are term dicts in the target algebra."""
    memo = {}

    def image_of(word):
        hit = memo.get(word)
        if hit is None:
            if len(word) == 1:
                hit = images[word[0]]
            else:
                u, v = standard_factorization(word)
                hit = bracket_terms(image_of(u), image_of(v))
            memo[word] = hit
        return hit

    out = {}
    for word, c in terms.items():
        for w, c2 in image_of(word).items():
            cw = out.get(w, 0) + c * c2
            if cw:
                out[w] = cw
            else:
                del out[w]
    return out


@lru_cache(maxsize=None)
def word_tensor_expansion(word):
    """Tensor-word expansion of the basis element b_word, as {word: int}."""
    if len(word) == 1:
        return {word: 1}
    u, v = standard_factorization(word)
    eu, ev = word_tensor_expansion(u), word_tensor_expansion(v)
    out = {}
    for w1, c1 in eu.items():
        for w2, c2 in ev.items():
            for w, s in ((w1 + w2, 1), (w2 + w1, -1)):
                c = out.get(w, 0) + s * c1 * c2
                if c:
                    out[w] = c
                else:
                    del out[w]
    return out


class LieElement:
    """Element of the free Lie algebra on letters 1..m, homogeneous of the
    given weight, stored as {lyndon word: rational} in normal form."""

    __slots__ = ("m", "weight", "terms")

    def __init__(self, m, weight, terms=()):
        self.m = m
        self.weight = weight
        clean = {}
        for w, c in dict(terms).items():
            c = rat(c)
            if c:
                if len(w) != weight:
                    raise ValueError("word %r has wrong weight" % (w,))
                clean[w] = c
        self.terms = clean

    @classmethod
    def generator(cls, m, letter):
        if not 1 <= letter <= m:
            raise ValueError("letter %d outside 1..%d" % (letter, m))
        return cls(m, 1, {(letter,): 1})

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        return (isinstance(other, LieElement) and self.m == other.m
                and self.weight == other.weight and self.terms == other.terms)

    def __add__(self, other):
        if self.m != other.m or self.weight != other.weight:
            raise ValueError("mixed alphabets or weights")
        out = dict(self.terms)
        for w, c in other.terms.items():
            c2 = out.get(w, rat(0)) + c
            if c2:
                out[w] = c2
            else:
                del out[w]
        return LieElement(self.m, self.weight, out)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c):
        c = rat(c)
        return LieElement(self.m, self.weight,
                          {w: c * v for w, v in self.terms.items()} if c else {})

    def bracket(self, other):
        if self.m != other.m:
            raise ValueError("mixed alphabets")
        return LieElement(self.m, self.weight + other.weight,
                          bracket_terms(self.terms, other.terms))

    def tensor_expansion(self):
        out = {}
        for word, c in self.terms.items():
            for w, c2 in word_tensor_expansion(word).items():
                cw = out.get(w, rat(0)) + c * c2
                if cw:
                    out[w] = cw
                else:
                    del out[w]
        return out

    def __str__(self):
        if not self.terms:
            return "0"
        out = ""
        for w in sorted(self.terms):
            c = self.terms[w]
            mag = rat_str(c if c > 0 else -c)
            piece = "%s·%s" % (mag, bracketed_string(w))
            if not out:
                out = piece if c > 0 else "-" + piece
            else:
                out += (" + " if c > 0 else " - ") + piece
        return out

    def __repr__(self):
        return "LieElement(m=%d, w=%d, %s)" % (self.m, self.weight, str(self))


def bracketed_string(word):
    """Standard bracketing of a Lyndon word, e.g. (1, 1, 2) -> "[1,[1,2]]"."""
    if len(word) == 1:
        return str(word[0])
    u, v = standard_factorization(word)
    return "[%s,%s]" % (bracketed_string(u), bracketed_string(v))


def lyndon_basis(m, w):
    """All Lyndon words of weight w over 1..m, lex sorted; the standard
    bracketings of these words form a basis of the free Lie component."""
    return lyndon_words(m, w)


def lyndon_elements(m, w):
    """The same basis as LieElements, one per Lyndon word."""
    return [LieElement(m, w, {word: 1}) for word in lyndon_words(m, w)]


def multilinear_basis(n):
    """Basis of the multilinear component on n letters: left-normed brackets
    [[...[e_1, e_s2], e_s3], ..., e_sn] over permutations s of 2..n.
    Size (n-1)!."""
    out = []
    for rest in permutations(range(2, n + 1)):
        e = LieElement.generator(n, 1)
        for k in rest:
            e = e.bracket(LieElement.generator(n, k))
        out.append(e)
    return out


class PermutationVector:
    """Element of k[S_n]; terms map one-line words (s_1..s_n), read as the
    bijection k -> s_k, to rational coefficients."""

    __slots__ = ("n", "terms")

    def __init__(self, n, terms=()):
        self.n = n
        clean = {}
        for p, c in dict(terms).items():
            c = rat(c)
            if c:
                if sorted(p) != list(range(1, n + 1)):
                    raise ValueError("not a permutation word: %r" % (p,))
                clean[tuple(p)] = c
        self.terms = clean

    def __eq__(self, other):
        return (isinstance(other, PermutationVector) and self.n == other.n
                and self.terms == other.terms)

    def __add__(self, other):
        out = dict(self.terms)
        for p, c in other.terms.items():
            c2 = out.get(p, rat(0)) + c
            if c2:
                out[p] = c2
            else:
                del out[p]
        return PermutationVector(self.n, out)

    def scale(self, c):
        c = rat(c)
        return PermutationVector(self.n, {p: c * v for p, v in self.terms.items()})

    def __str__(self):
        if not self.terms:
            return "0"
        return " + ".join("%s*(%s)" % (rat_str(c), "".join(map(str, p)))
                          for p, c in sorted(self.terms.items()))


def shuffle_sums(n):
    """Generating family of the shuffle subspace: for every decomposition of
    {1..n} into two nonempty blocks, each given an arbitrary total order,
    the sum of all interleavings of the two sequences."""
    out = []
    items = list(range(1, n + 1))
    for asize in range(1, n):
        for a_set in combinations(items, asize):
            if 1 not in a_set:
                continue  # each unordered block pair once
            b_set = tuple(x for x in items if x not in a_set)
            for alpha in permutations(a_set):
                for beta in permutations(b_set):
                    terms = {}
                    for apos in combinations(range(n), len(alpha)):
                        word = [0] * n
                        ai = iter(alpha)
                        bi = iter(beta)
                        for k in range(n):
                            word[k] = next(ai) if k in apos else next(bi)
                        w = tuple(word)
                        terms[w] = terms.get(w, 0) + 1
                    out.append(PermutationVector(n, terms))
    return out


class ShuffleQuotient:
    """k[S_n] modulo the shuffle subspace, with a canonical complement.

    Columns are permutation words in lex order; the echelon eats pivots from
    the lex-small end, so the complement (free) words are deterministic.
    """

    def __init__(self, n):
        self.n = n
        self.perms = sorted(permutations(range(1, n + 1)))
        self.index = {p: i for i, p in enumerate(self.perms)}
        self.ech = Echelon()
        for vec in shuffle_sums(n):
            self.ech.insert({self.index[p]: c for p, c in vec.terms.items()})
        self.free_perms = [p for p in self.perms
                           if self.index[p] not in self.ech.pivot_columns]

    @property
    def shuffle_rank(self):
        return self.ech.rank

    @property
    def dim(self):
        return len(self.free_perms)

    def reduce(self, vec):
        """Canonical representative of vec mod shuffles, supported on
        free_perms."""
        res = self.ech.reduce({self.index[p]: c for p, c in vec.terms.items()})
        return PermutationVector(self.n, {self.perms[i]: c for i, c in res.items()})


def shuffle_subspace(n):
    """Echelonized basis of the shuffle subspace of k[S_n], deterministic."""
    sq = ShuffleQuotient(n)
    rows = [sq.ech.rows[p] for p in sorted(sq.ech.rows)]
    return [PermutationVector(n, {sq.perms[i]: c for i, c in row.items()})
            for row in rows]
