"""Infinitesimal braid Lie algebras on finite label sets.

For a finite set T the algebra is presented by generators t_ab = t_ba for
distinct a, b in T, modulo: brackets of generators on disjoint pairs vanish,
and [t_ab, t_ac + t_bc] = 0 for distinct a, b, c.  Everything is graded by
weight (bracket length); the module computes exact Lyndon-complement bases
of each weight component, homomorphisms induced by set maps (direct images
along injections, pullbacks along total or partial maps), the insertion
composition, and the commutation property relating the two images.

The relation ideal is eliminated blockwise: each spanning bracket touches a
definite support set of strands, so the ideal splits as a direct sum over
supports, and blocks of equal size are identical up to the order-preserving
relabeling.  One template per (support size, weight) is computed and reused;
pivots are eaten from the lex-largest word down, so the surviving complement
is the lex-smallest set of Lyndon words blockwise.
"""

import json
import os
import threading
from itertools import combinations

from .exactla import Echelon, SparseMatrix, rat, rat_str
from .freelie import (bracket_terms, is_lyndon, lyndon_words,
                      standard_factorization, substitute_terms, witt_dimension)


class PreconditionError(ValueError):
    """A hypothesis of the requested operation does not hold."""


class FinSet:
    """Ordered finite label set; labels are distinct hashables, order is the
    tuple order (positions are what internal computations use)."""

    __slots__ = ("labels",)

    def __init__(self, labels):
        labels = tuple(labels)
        if len(set(labels)) != len(labels):
            raise ValueError("labels not distinct: %r" % (labels,))
        self.labels = labels

    @classmethod
    def range(cls, n):
        return cls(range(1, n + 1))

    def __len__(self):
        return len(self.labels)

    def __iter__(self):
        return iter(self.labels)

    def __contains__(self, x):
        return x in self.labels

    def __eq__(self, other):
        return isinstance(other, FinSet) and self.labels == other.labels

    def __hash__(self):
        return hash(self.labels)

    def position(self, label):
        return self.labels.index(label) + 1

    def __repr__(self):
        return "FinSet%r" % (self.labels,)


class SetMap:
    """Partial map between FinSets: assignment on a subset of the source."""

    __slots__ = ("source", "target", "assignment")

    def __init__(self, source, target, assignment):
        self.source = source
        self.target = target
        self.assignment = dict(assignment)
        for k, v in self.assignment.items():
            if k not in source:
                raise ValueError("%r not in source" % (k,))
            if v not in target:
                raise ValueError("%r not in target" % (v,))

    @classmethod
    def total(cls, source, target, assignment):
        m = cls(source, target, assignment)
        if not m.is_total:
            raise ValueError("assignment does not cover the source")
        return m

    @property
    def domain(self):
        return frozenset(self.assignment)

    @property
    def is_total(self):
        return len(self.assignment) == len(self.source)

    @property
    def is_injective(self):
        vals = list(self.assignment.values())
        return len(set(vals)) == len(vals)

    def __call__(self, x):
        return self.assignment[x]

    def compose(self, other):
        """self after other (other first)."""
        assign = {k: self.assignment[v] for k, v in other.assignment.items()
                  if v in self.assignment}
        return SetMap(other.source, self.target, assign)

    def restrict_to_domain(self):
        """Total map on the domain, domain labels kept in source order."""
        dom = FinSet(l for l in self.source if l in self.assignment)
        return SetMap.total(dom, self.target, self.assignment)

    def __repr__(self):
        return "SetMap(%r -> %r, %r)" % (self.source.labels,
                                         self.target.labels, self.assignment)


def _pairs(n):
    return [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]


def _word_support(word, pairs):
    s = set()
    for letter in word:
        s.update(pairs[letter - 1])
    return frozenset(s)


class _Template:
    """Ideal echelon and complement for support exactly [k], one weight.

    words: exact-support Lyndon words, lex ascending.  Echelon columns are
    descending-lex ranks (column c is words[len-1-c]), so min-column pivots
    eat the lex-largest words first.
    """

    __slots__ = ("k", "weight", "words", "index", "echelon", "rep_indices")

    def __init__(self, k, weight, words, echelon, rep_indices):
        self.k = k
        self.weight = weight
        self.words = words
        self.index = {w: i for i, w in enumerate(words)}
        self.echelon = echelon
        self.rep_indices = rep_indices

    def col_of(self, word):
        return len(self.words) - 1 - self.index[word]

    def word_of(self, col):
        return self.words[len(self.words) - 1 - col]

    def echelon_rows_as_words(self):
        """Rows as {word: int}, in pivot-column order (deterministic)."""
        return [{self.word_of(c): v for c, v in self.echelon.rows[p].items()}
                for p in sorted(self.echelon.rows)]


_TEMPLATES = {}
_BASES = {}
_LOCK = threading.RLock()
_CACHE_ENV = "DKLIE_CACHE_DIR"
_CACHE_VERSION = 1


def _relator_rows(k):
    """Weight-2 relator vectors with support exactly [k], as {word: int}."""
    pairs = _pairs(k)
    idx = {p: i + 1 for i, p in enumerate(pairs)}
    rows = []
    if k == 3:
        for (e, f, g) in [((1, 2), (1, 3), (2, 3)),
                          ((1, 3), (1, 2), (2, 3)),
                          ((2, 3), (1, 2), (1, 3))]:
            terms = bracket_terms({(idx[e],): 1}, {(idx[f],): 1, (idx[g],): 1})
            rows.append(terms)
    elif k == 4:
        for e, f in [((1, 2), (3, 4)), ((1, 3), (2, 4)), ((1, 4), (2, 3))]:
            rows.append(bracket_terms({(idx[e],): 1}, {(idx[f],): 1}))
    return rows


def _relabel_word(word, sub_pairs, sub_to_big, big_index):
    """Order-preserving relabeling of a Lyndon word from the canonical
    sub-support into positions sub_to_big; stays Lyndon."""
    out = []
    for letter in word:
        a, b = sub_pairs[letter - 1]
        out.append(big_index[(sub_to_big[a - 1], sub_to_big[b - 1])])
    return tuple(out)


def _template(k, weight):
    key = (k, weight)
    with _LOCK:
        hit = _TEMPLATES.get(key)
        if hit is not None:
            return hit
        hit = _load_template(k, weight)
        if hit is None:
            hit = _build_template(k, weight)
            _store_template(hit)
        _TEMPLATES[key] = hit
        return hit


def _build_template(k, weight):
    pairs = _pairs(k)
    words = [w for w in lyndon_words(len(pairs), weight)
             if len(_word_support(w, pairs)) == k]
    ech = Echelon()
    tpl = _Template(k, weight, words, ech, [])
    if words:
        if weight == 2:
            for row in _relator_rows(k):
                ech.insert({tpl.col_of(w): c for w, c in row.items()})
        elif weight > 2:
            big_index = {p: i + 1 for i, p in enumerate(pairs)}
            for size in (k, k - 1, k - 2):
                if size < 2:
                    continue
                sub = _template(size, weight - 1)
                if not sub.echelon.rows:
                    continue
                sub_pairs = _pairs(size)
                sub_rows = sub.echelon_rows_as_words()
                for supp in combinations(range(1, k + 1), size):
                    missing = [x for x in range(1, k + 1) if x not in supp]
                    if size == k:
                        edges = pairs
                    elif size == k - 1:
                        m = missing[0]
                        edges = [tuple(sorted((m, x))) for x in supp]
                    else:
                        edges = [tuple(missing)]
                    rel_rows = [{_relabel_word(w, sub_pairs, supp, big_index): c
                                 for w, c in row.items()} for row in sub_rows]
                    for e in sorted(edges):
                        eword = {(big_index[e],): 1}
                        for row in rel_rows:
                            vec = bracket_terms(eword, row)
                            ech.insert({tpl.col_of(w): c for w, c in vec.items()})
    free_cols = set(range(len(words))) - ech.pivot_columns
    tpl.rep_indices.extend(sorted(len(words) - 1 - c for c in free_cols))
    return tpl


def _cache_path(k, weight):
    root = os.environ.get(_CACHE_ENV)
    if not root:
        return None
    return os.path.join(root, "template_v%d_%d_%d.json" % (_CACHE_VERSION, k, weight))


def _load_template(k, weight):
    path = _cache_path(k, weight)
    if not path or not os.path.exists(path):
        return None
    try:
        with open(path) as fh:
            data = json.load(fh)
        if data.get("k") != k or data.get("weight") != weight:
            return None
        words = [tuple(w) for w in data["words"]]
        ech = Echelon()
        ech.rows.update({int(p): {int(c): int(v) for c, v in row}
                         for p, row in data["rows"].items()})
        return _Template(k, weight, words, ech, [int(i) for i in data["reps"]])
    except (OSError, ValueError, KeyError):
        return None


def _store_template(tpl):
    path = _cache_path(tpl.k, tpl.weight)
    if not path:
        return
    try:
        os.makedirs(os.path.dirname(path), exist_ok=True)
        data = {"k": tpl.k, "weight": tpl.weight,
                "words": [list(w) for w in tpl.words],
                "rows": {str(p): sorted([c, v] for c, v in row.items())
                         for p, row in tpl.echelon.rows.items()},
                "reps": tpl.rep_indices}
        tmp = path + ".tmp.%d" % os.getpid()
        with open(tmp, "w") as fh:
            json.dump(data, fh)
        os.replace(tmp, path)
    except OSError:
        pass


def bracket_string(word, pair_labels):
    """Readable bracket form of a Lyndon word, e.g. [t12,[t13,t23]]."""

    def tname(letter):
        a, b = pair_labels[letter - 1]
        sa, sb = str(a), str(b)
        if len(sa) == 1 and len(sb) == 1:
            return "t%s%s" % (sa, sb)
        return "t(%s,%s)" % (sa, sb)

    def rec(w):
        if len(w) == 1:
            return tname(w[0])
        u, v = standard_factorization(w)
        return "[%s,%s]" % (rec(u), rec(v))

    return rec(word)


class DKBasis:
    """Exact basis data for one weight component of the algebra on T.

    rep_words are the free Lyndon words surviving the relation-ideal
    elimination, globally lex-sorted; representatives holds their indices in
    free_basis; projection (computed lazily) expresses every free basis word
    in the surviving basis.
    """

    def __init__(self, T, weight):
        self.T = T
        self.weight = weight
        n = len(T)
        self.pairs = _pairs(n)
        self.pair_index = {p: i + 1 for i, p in enumerate(self.pairs)}
        self.free_basis = (lyndon_words(len(self.pairs), weight)
                           if n >= 2 and weight >= 1 else [])
        free_index = {w: i for i, w in enumerate(self.free_basis)}
        self._blocks = {}  # support frozenset -> (template, positions tuple)
        reps = []
        if n >= 2 and weight >= 1:
            for size in range(2, min(n, 2 * weight) + 1):
                tpl = _template(size, weight)
                if not tpl.words:
                    continue
                sub_pairs = _pairs(size)
                for supp in combinations(range(1, n + 1), size):
                    self._blocks[frozenset(supp)] = (tpl, supp)
                    for i in tpl.rep_indices:
                        reps.append(_relabel_word(tpl.words[i], sub_pairs, supp,
                                                  self.pair_index))
        self.rep_words = sorted(reps)
        self.representatives = [free_index[w] for w in self.rep_words]
        self.rep_index = {w: i for i, w in enumerate(self.rep_words)}
        self.ideal_rank = len(self.free_basis) - len(self.rep_words)
        self._projection = None

    @property
    def dim(self):
        return len(self.rep_words)

    def rep_strings(self):
        return [bracket_string(w, self.label_pairs()) for w in self.rep_words]

    def to_json(self):
        return {"points": len(self.T), "weight": self.weight,
                "dimension": self.dim, "representatives": self.rep_strings()}

    def label_pairs(self):
        labels = self.T.labels
        return [(labels[i - 1], labels[j - 1]) for (i, j) in self.pairs]

    def to_coords(self, terms):
        """Reduce free-Lie terms {word: rational} to coordinates
        {representative index: rational}; canonical and linear."""
        by_support = {}
        for w, c in terms.items():
            s = _word_support(w, self.pairs)
            by_support.setdefault(s, {})[w] = c
        out = {}
        for s, part in by_support.items():
            blk = self._blocks.get(s)
            if blk is None:
                raise ValueError("support %r exceeds the label set" % (sorted(s),))
            tpl, supp = blk
            sub_pairs = _pairs(tpl.k)
            back = {_relabel_word(tpl.words[i], sub_pairs, supp, self.pair_index):
                    tpl.words[i] for i in range(len(tpl.words))}
            vec = {}
            for w, c in part.items():
                vec[tpl.col_of(back[w])] = c
            res = tpl.echelon.reduce(vec)
            for col, c in res.items():
                w = _relabel_word(tpl.word_of(col), sub_pairs, supp, self.pair_index)
                out[self.rep_index[w]] = out.get(self.rep_index[w], rat(0)) + c
        return {i: c for i, c in out.items() if c}

    def lift(self, coords):
        """Free-Lie terms of a coordinate vector (each representative is
        itself a free basis word)."""
        return {self.rep_words[i]: c for i, c in coords.items() if c}

    @property
    def projection(self):
        """SparseMatrix taking free-basis coordinates to representative
        coordinates; rows follow representatives, columns free_basis."""
        if self._projection is None:
            entries = {}
            for col, word in enumerate(self.free_basis):
                for ri, c in self.to_coords({word: 1}).items():
                    entries[(ri, col)] = c
            self._projection = SparseMatrix(len(self.rep_words),
                                            len(self.free_basis), entries)
        return self._projection

    def element(self, coords):
        return DKElement(self, {i: rat(c) for i, c in coords.items() if rat(c)})

    def basis_elements(self):
        return [self.element({i: 1}) for i in range(self.dim)]

    def __repr__(self):
        return "DKBasis(T=%r, weight=%d, dim=%d)" % (self.T.labels, self.weight,
                                                     self.dim)


def dk_basis(T, weight):
    """Basis of the weight component of the algebra on T (cached)."""
    if not isinstance(T, FinSet):
        T = FinSet(T)
    key = (T.labels, weight)
    with _LOCK:
        hit = _BASES.get(key)
        if hit is None:
            hit = DKBasis(T, weight)
            _BASES[key] = hit
        return hit


class DKElement:
    """Homogeneous element, stored as sparse coordinates over its DKBasis."""

    __slots__ = ("basis", "coords")

    def __init__(self, basis, coords=()):
        self.basis = basis
        clean = {}
        for i, c in dict(coords).items():
            c = rat(c)
            if c:
                if not 0 <= i < basis.dim:
                    raise ValueError("coordinate index %d out of range" % i)
                clean[i] = c
        self.coords = clean

    @property
    def T(self):
        return self.basis.T

    @property
    def weight(self):
        return self.basis.weight

    def __bool__(self):
        return bool(self.coords)

    def __eq__(self, other):
        return (isinstance(other, DKElement) and self.basis is other.basis
                and self.coords == other.coords)

    def __add__(self, other):
        if self.basis is not other.basis:
            raise ValueError("elements over different bases")
        out = dict(self.coords)
        for i, c in other.coords.items():
            c2 = out.get(i, rat(0)) + c
            if c2:
                out[i] = c2
            else:
                del out[i]
        return DKElement(self.basis, out)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c):
        c = rat(c)
        return DKElement(self.basis, {i: c * v for i, v in self.coords.items()}
                         if c else {})

    def free_terms(self):
        return self.basis.lift(self.coords)

    def bracket(self, other):
        if self.T != other.T:
            raise ValueError("elements on different label sets")
        target = dk_basis(self.T, self.weight + other.weight)
        terms = bracket_terms(self.free_terms(), other.free_terms())
        return target.element(target.to_coords(terms))

    def __str__(self):
        if not self.coords:
            return "0"
        bits = []
        labels = self.basis.label_pairs()
        for i in sorted(self.coords):
            bits.append("%s*%s" % (rat_str(self.coords[i]),
                                   bracket_string(self.basis.rep_words[i],
                                                  labels)))
        return " + ".join(bits)

    def __repr__(self):
        return "DKElement(%s, w=%d)" % (self.T, self.weight)


def generator_element(T, a, b):
    """The weight-1 generator on labels a, b of T."""
    if not isinstance(T, FinSet):
        T = FinSet(T)
    if a == b or a not in T or b not in T:
        raise ValueError("need two distinct labels of %r" % (T,))
    basis = dk_basis(T, 1)
    i, j = sorted((T.position(a), T.position(b)))
    word = (basis.pair_index[(i, j)],)
    return basis.element({basis.rep_index[word]: 1})


def dilation(x, elem):
    """Rescaling every generator by x multiplies weight w by x^w."""
    return elem.scale(rat(x) ** elem.weight)


def _apply_letter_images(elem, target_basis, images):
    """Push an element through the Lie homomorphism determined by generator
    images (term dicts over the target alphabet)."""
    terms = substitute_terms(elem.free_terms(), images)
    return target_basis.element(target_basis.to_coords(terms))


def direct_image(f, elem):
    """Induced map along an injective total map: t_ab -> t_f(a)f(b)."""
    if not f.is_total:
        raise PreconditionError("direct image needs a total map")
    if not f.is_injective:
        raise PreconditionError("direct image needs an injective map")
    if elem.T != f.source:
        raise ValueError("element not on the source of the map")
    target = dk_basis(f.target, elem.weight)
    images = {}
    for letter, (i, j) in enumerate(elem.basis.pairs, start=1):
        a = f.target.position(f(f.source.labels[i - 1]))
        b = f.target.position(f(f.source.labels[j - 1]))
        images[letter] = {(target.pair_index[tuple(sorted((a, b)))],): 1}
    return _apply_letter_images(elem, target, images)


def inverse_image(f, elem):
    """Pullback along a total map f: X -> Y of an element on Y:
    t_ij -> sum of t_pq over preimage pairs."""
    if not f.is_total:
        raise PreconditionError("pullback needs a total map; "
                                "use partial_pullback otherwise")
    if elem.T != f.target:
        raise ValueError("element not on the target of the map")
    src = dk_basis(f.source, elem.weight)
    fibers = {}
    for x in f.source:
        fibers.setdefault(f(x), []).append(f.source.position(x))
    images = {}
    for letter, (i, j) in enumerate(elem.basis.pairs, start=1):
        li = f.target.labels[i - 1]
        lj = f.target.labels[j - 1]
        img = {}
        for p in fibers.get(li, ()):
            for q in fibers.get(lj, ()):
                img[(src.pair_index[tuple(sorted((p, q)))],)] = 1
        images[letter] = img
    return _apply_letter_images(elem, src, images)


def partial_pullback(f, elem):
    """Pullback along a partial map: restrict to the domain, pull back, then
    include the domain into the source."""
    if elem.T != f.target:
        raise ValueError("element not on the target of the map")
    fu = f.restrict_to_domain()
    pulled = inverse_image(fu, elem)
    incl = SetMap.total(fu.source, f.source, {l: l for l in fu.source})
    return direct_image(incl, pulled)


class GradedElement:
    """Formal sum of homogeneous elements on one label set, keyed by weight."""

    __slots__ = ("T", "parts")

    def __init__(self, T, parts=()):
        self.T = T
        self.parts = {}
        for w, e in dict(parts).items():
            if e:
                if e.T != T:
                    raise ValueError("component on wrong label set")
                self.parts[w] = e

    @classmethod
    def of(cls, elem):
        return cls(elem.T, {elem.weight: elem})

    def component(self, w):
        hit = self.parts.get(w)
        if hit is None:
            return dk_basis(self.T, w).element({})
        return hit

    def __add__(self, other):
        if self.T != other.T:
            raise ValueError("sums across label sets")
        out = dict(self.parts)
        for w, e in other.parts.items():
            out[w] = out[w] + e if w in out else e
        return GradedElement(self.T, out)

    def __bool__(self):
        return any(self.parts.values())

    def __eq__(self, other):
        return (isinstance(other, GradedElement) and self.T == other.T
                and self.parts == other.parts)

    def __str__(self):
        if not self.parts:
            return "0"
        return " + ".join(str(self.parts[w]) for w in sorted(self.parts))


def dk_compose(X, x, Y, a, b):
    """Insertion composition: Z is X minus the slot x (in X's order) followed
    by Y; the result is the pullback of a along the collapse Z -> X plus the
    direct image of b along the inclusion Y -> Z."""
    if not isinstance(X, FinSet):
        X = FinSet(X)
    if not isinstance(Y, FinSet):
        Y = FinSet(Y)
    if x not in X:
        raise PreconditionError("slot %r not in %r" % (x, X))
    keep = [l for l in X if l != x]
    if set(keep) & set(Y.labels):
        raise PreconditionError("labels of X-{x} and Y overlap")
    Z = FinSet(tuple(keep) + Y.labels)
    collapse = SetMap.total(Z, X, {**{l: l for l in keep}, **{l: x for l in Y}})
    include = SetMap.total(Y, Z, {l: l for l in Y})
    out = GradedElement(Z)
    if a:
        out = out + GradedElement.of(inverse_image(collapse, a))
    if b:
        out = out + GradedElement.of(direct_image(include, b))
    return out


def check_commutation(f, g, weight_cap=3):
    """Whether [image of the direct image along f, image of the pullback
    along g] vanishes, for all basis pairs up to the weight cap.

    f: S -> T must be injective and total; g: T -> R total; the composite
    g o f must hit at most one point.  Violations of these hypotheses raise
    PreconditionError.  Returns (True, None) or (False, witness) with
    witness = (w1, w2, u, v, bracket).
    """
    if not (f.is_total and f.is_injective):
        raise PreconditionError("f must be total and injective")
    if not g.is_total:
        raise PreconditionError("g must be total")
    if f.target != g.source:
        raise PreconditionError("f and g do not compose")
    image = {g(f(s)) for s in f.source}
    if len(image) > 1:
        raise PreconditionError("composite hits %d > 1 points" % len(image))
    for w1 in range(1, weight_cap):
        for w2 in range(1, weight_cap - w1 + 1):
            us = dk_basis(f.source, w1).basis_elements()
            vs = dk_basis(g.target, w2).basis_elements()
            for u in us:
                fu = direct_image(f, u)
                for v in vs:
                    gv = inverse_image(g, v)
                    br = fu.bracket(gv)
                    if br:
                        return False, (w1, w2, u, v, br)
    return True, None
