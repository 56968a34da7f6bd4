"""Operad calculus over finite label sets.

An operad instance supplies, for each ordered label set, a graded basis plus
an insertion composition; this module provides the concrete instances used
elsewhere (one-dimensional commutative operads and their degree shifts,
total orders with order insertion, the braid Lie algebras, and free operads
on one generator per arity), the Gerstenhaber bracket, tensor products of
instances, differentials on the free operads, reduction modulo the shuffle
ideal, modules over an operad, and an exhaustive axiom checker.

Composition results live over the label set X-{x} followed by Y, matching
the Lie-algebra convention; `transport` moves elements between different
orderings of the same labels, and the axiom checker uses it to compare the
two sides of each axiom over a common ordering.

Free-operad signs: a tree is read as the ordered product of its internal
vertices in pre-order, every generator having degree +1; grafting b at leaf
x costs (-1)^(deg b * number of vertices after x).  These choices are
validated by the differential squaring to zero through arity 5.
"""

from itertools import combinations, permutations

from .dk import (FinSet, SetMap, dk_basis, dk_compose, direct_image,
                 GradedElement)
from .exactla import rat, rat_str
from .freelie import PermutationVector, ShuffleQuotient


def _as_finset(X):
    return X if isinstance(X, FinSet) else FinSet(X)


def perm_sign(seq):
    """Sign of a permutation given in one-line form (any sortable items)."""
    sign = 1
    items = list(seq)
    for i in range(len(items)):
        for j in range(i + 1, len(items)):
            if items[i] > items[j]:
                sign = -sign
    return sign


class OperadElement:
    """Finite combination of basis labels over one ordered label set."""

    __slots__ = ("instance", "X", "coeffs")

    def __init__(self, instance, X, coeffs=()):
        self.instance = instance
        self.X = _as_finset(X)
        self.coeffs = {}
        for label, c in dict(coeffs).items():
            c = rat(c)
            if c:
                self.coeffs[label] = c

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        return (isinstance(other, OperadElement)
                and self.instance is other.instance
                and self.X == other.X and self.coeffs == other.coeffs)

    def __add__(self, other):
        if self.instance is not other.instance or self.X != other.X:
            raise ValueError("operands incompatible")
        out = dict(self.coeffs)
        for l, c in other.coeffs.items():
            v = out.get(l, rat(0)) + c
            if v:
                out[l] = v
            else:
                del out[l]
        return OperadElement(self.instance, self.X, out)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c):
        c = rat(c)
        return OperadElement(self.instance, self.X,
                             {l: c * v for l, v in self.coeffs.items()}
                             if c else {})

    def degree(self):
        degs = {self.instance.degree(self.X, l) for l in self.coeffs}
        if len(degs) > 1:
            raise ValueError("element not homogeneous: degrees %r" % degs)
        return degs.pop() if degs else None

    def __str__(self):
        if not self.coeffs:
            return "0"
        return " + ".join("%s*%s" % (rat_str(c), self.instance.label_str(l))
                          for l, c in sorted(self.coeffs.items(),
                                             key=lambda kv: repr(kv[0])))


class OperadInstance:
    """Base class: subclasses provide basis enumeration, degrees, label
    composition, relabeling, and units."""

    name = "?"

    def basis(self, X):
        raise NotImplementedError

    def degree(self, X, label):
        raise NotImplementedError

    def compose_labels(self, X, x, Y, la, lb):
        """-> (Z, {label: coeff}) for basis labels la over X, lb over Y."""
        raise NotImplementedError

    def relabel_label(self, X, label, bij):
        """-> (new label, coeff) under a bijective SetMap."""
        raise NotImplementedError

    def unit(self, X):
        raise NotImplementedError

    def label_str(self, label):
        return repr(label)

    def element(self, X, coeffs):
        return OperadElement(self, X, coeffs)

    def zero(self, X):
        return OperadElement(self, X, {})

    def basis_elements(self, X):
        return [self.element(X, {l: 1}) for l in self.basis(_as_finset(X))]

    def compose(self, X, x, Y, a, b):
        """Bilinear extension of compose_labels."""
        X = _as_finset(X)
        Y = _as_finset(Y)
        Z = compose_target(X, x, Y)
        out = {}
        for la, ca in a.coeffs.items():
            for lb, cb in b.coeffs.items():
                Z2, terms = self.compose_labels(X, x, Y, la, lb)
                if Z2 != Z:
                    raise AssertionError("instance produced wrong label set")
                for l, c in terms.items():
                    v = out.get(l, rat(0)) + ca * cb * c
                    if v:
                        out[l] = v
                    else:
                        out.pop(l, None)
        return OperadElement(self, Z, out)

    def relabel(self, a, bij):
        out = {}
        for l, c in a.coeffs.items():
            l2, c2 = self.relabel_label(a.X, l, bij)
            v = out.get(l2, rat(0)) + c * c2
            if v:
                out[l2] = v
            else:
                out.pop(l2, None)
        return OperadElement(self, bij.target, out)

    def transport(self, a, Z):
        """Move an element to a differently ordered copy of its labels."""
        Z = _as_finset(Z)
        if set(Z.labels) != set(a.X.labels):
            raise ValueError("label sets differ")
        bij = SetMap.total(a.X, Z, {l: l for l in a.X})
        return self.relabel(a, bij)


def compose_target(X, x, Y):
    """Label set of a composition: X minus the slot, then Y."""
    X = _as_finset(X)
    Y = _as_finset(Y)
    if x not in X:
        raise ValueError("slot %r not in %r" % (x, X))
    keep = tuple(l for l in X if l != x)
    if set(keep) & set(Y.labels):
        raise ValueError("labels of X-{x} and Y overlap")
    return FinSet(keep + Y.labels)


def compose(instance, X, x, Y, a, b):
    """Top-level insertion composition (instances may override compose)."""
    if a.instance is not instance or b.instance is not instance:
        raise ValueError("elements not of the given instance")
    return instance.compose(X, x, Y, a, b)


def compose_ordered(a, slot, b):
    """Composition over canonical [m], [n], the inserted block occupying
    positions slot..slot+n-1 of the result [m+n-1]."""
    inst = a.instance
    m = len(a.X)
    n = len(b.X)
    if list(a.X.labels) != list(range(1, m + 1)):
        raise ValueError("first operand must live over 1..m")
    fresh = FinSet(range(m + 1, m + n + 1))
    b2 = inst.relabel(b, SetMap.total(
        b.X, fresh, {l: m + 1 + i for i, l in enumerate(b.X.labels)}))
    raw = inst.compose(a.X, slot, fresh, a, b2)
    assign = {}
    for l in range(1, slot):
        assign[l] = l
    for i in range(n):
        assign[m + 1 + i] = slot + i
    for l in range(slot + 1, m + 1):
        assign[l] = l + n - 1
    return inst.relabel(raw, SetMap.total(raw.X, FinSet.range(m + n - 1),
                                          assign))


class CommOperad(OperadInstance):
    """One-dimensional in every arity, all compositions identities."""

    name = "comm"

    def basis(self, X):
        return ["1"]

    def degree(self, X, label):
        return 0

    def compose_labels(self, X, x, Y, la, lb):
        return compose_target(X, x, Y), {"1": rat(1)}

    def relabel_label(self, X, label, bij):
        return label, rat(1)

    def unit(self, X):
        return self.element(X, {"1": 1})

    def label_str(self, label):
        return "1"


class CommShiftOperad(OperadInstance):
    """Degree-shifted commutative operad: one generator per label set, in
    degree k(|X|-1), symmetries acting by the k-th power of the sign.

    The composition sign comes from the endomorphism operad of a line in
    degree k: inserting an n-ary generator at position i of m inputs moves
    its input block past the trailing m-i letters and the operation itself
    past the leading i-1, so the exponent is k(n(m-i) + (n-1)(i-1)).  This
    is the unique choice (given the action) passing the full axiom suite.
    """

    def __init__(self, k):
        self.k = k
        self.name = "comm{%d}" % k

    def basis(self, X):
        return ["g"]

    def degree(self, X, label):
        return self.k * (len(X) - 1)

    def compose_labels(self, X, x, Y, la, lb):
        m, n = len(X), len(Y)
        i = X.position(x)
        sign = rat(-1) ** (self.k * (n * (m - i) + (n - 1) * (i - 1)))
        return compose_target(X, x, Y), {"g": sign}

    def relabel_label(self, X, label, bij):
        perm = [bij.target.position(bij(l)) for l in X]
        return label, rat(perm_sign(perm)) ** self.k

    def unit(self, X):
        return self.element(X, {"g": 1})

    def label_str(self, label):
        return "g"


class AssocOperad(OperadInstance):
    """Basis: total orders of the label set; composition splices the
    inserted order into the slot."""

    name = "assoc"

    def basis(self, X):
        return [tuple(p) for p in permutations(X.labels)]

    def degree(self, X, label):
        return 0

    def compose_labels(self, X, x, Y, la, lb):
        Z = compose_target(X, x, Y)
        spliced = []
        for l in la:
            if l == x:
                spliced.extend(lb)
            else:
                spliced.append(l)
        return Z, {tuple(spliced): rat(1)}

    def relabel_label(self, X, label, bij):
        return tuple(bij(l) for l in label), rat(1)

    def unit(self, X):
        return self.element(X, {tuple(X.labels): 1})

    def label_str(self, label):
        return "<".join(str(l) for l in label)


class DKOperad(OperadInstance):
    """The braid Lie algebras with the pullback-plus-inclusion composition.

    Labels are (weight, index) pairs up to the weight cap; composition is
    additive rather than bilinear, so `compose` is overridden.  The unit is
    the zero element of the one-point algebra.
    """

    def __init__(self, weight_cap):
        self.weight_cap = weight_cap
        self.name = "dk(w<=%d)" % weight_cap

    def basis(self, X):
        out = []
        for w in range(1, self.weight_cap + 1):
            out.extend((w, i) for i in range(dk_basis(X, w).dim))
        return out

    def degree(self, X, label):
        return 0

    def _to_graded(self, elem):
        parts = {}
        for (w, i), c in elem.coeffs.items():
            parts.setdefault(w, {})[i] = c
        return GradedElement(elem.X, {w: dk_basis(elem.X, w).element(d)
                                      for w, d in parts.items()})

    def _from_graded(self, graded):
        coeffs = {}
        for w, e in graded.parts.items():
            if w > self.weight_cap:
                raise ValueError("weight %d exceeds the instance cap" % w)
            for i, c in e.coords.items():
                coeffs[(w, i)] = c
        return OperadElement(self, graded.T, coeffs)

    def compose(self, X, x, Y, a, b):
        ga = self._to_graded(a)
        gb = self._to_graded(b)
        out = GradedElement(compose_target(X, x, Y))
        for e in ga.parts.values():
            out = out + dk_compose(X, x, Y, e, None)
        for e in gb.parts.values():
            out = out + dk_compose(X, x, Y, None, e)
        return self._from_graded(out)

    def compose_labels(self, X, x, Y, la, lb):
        a = self.element(X, {la: 1})
        b = self.element(Y, {lb: 1})
        res = self.compose(X, x, Y, a, b)
        return res.X, res.coeffs

    def relabel(self, a, bij):
        out = {}
        for (w, i), c in a.coeffs.items():
            img = direct_image(bij, dk_basis(a.X, w).element({i: 1}))
            for j, c2 in img.coords.items():
                v = out.get((w, j), rat(0)) + c * c2
                if v:
                    out[(w, j)] = v
                else:
                    out.pop((w, j), None)
        return OperadElement(self, bij.target, out)

    def unit(self, X):
        return self.zero(X)

    def label_str(self, label):
        return "e%d_%d" % label


def tree_vertex_count(t):
    if not isinstance(t, tuple):
        return 0
    return 1 + sum(tree_vertex_count(c) for c in t)


def tree_leaves(t):
    if not isinstance(t, tuple):
        return [t]
    out = []
    for c in t:
        out.extend(tree_leaves(c))
    return out


def tree_str(t):
    if not isinstance(t, tuple):
        return str(t)
    return "m%d(%s)" % (len(t), ",".join(tree_str(c) for c in t))


def corolla(n):
    """The one-vertex tree over canonical 1..n."""
    if n < 2:
        raise ValueError("generators have arity >= 2")
    return tuple(range(1, n + 1))


def _graft_tree(t, x, b):
    """Replace leaf x of t by tree b; returns (tree, vertices after x) or
    None when x does not occur."""
    if not isinstance(t, tuple):
        return (b, 0) if t == x else None
    for j, c in enumerate(t):
        hit = _graft_tree(c, x, b)
        if hit is not None:
            sub, after = hit
            tail = sum(tree_vertex_count(t[l]) for l in range(j + 1, len(t)))
            return t[:j] + (sub,) + t[j + 1:], after + tail
    return None


class FreeOperad(OperadInstance):
    """Free operad on one generator of each arity 2..arity_cap, every
    generator of degree +1; basis elements are planar trees with leaves
    labeled bijectively by the label set."""

    def __init__(self, arity_cap):
        self.arity_cap = arity_cap
        self.name = "free(<=%d)" % arity_cap
        self._basis_memo = {}

    def basis(self, X):
        X = _as_finset(X)
        hit = self._basis_memo.get(X.labels)
        if hit is None:
            hit = sorted(self._trees(X.labels), key=repr)
            self._basis_memo[X.labels] = hit
        return hit

    def _trees(self, labels):
        if len(labels) == 1:
            return [labels[0]]
        out = []
        for k in range(2, min(len(labels), self.arity_cap) + 1):
            for blocks in _ordered_partitions(labels, k):
                subtrees = [self._trees(b) for b in blocks]
                for combo in _product(subtrees):
                    out.append(tuple(combo))
        return out

    def degree(self, X, label):
        return tree_vertex_count(label)

    def compose_labels(self, X, x, Y, la, lb):
        Z = compose_target(X, x, Y)
        hit = _graft_tree(la, x, lb)
        if hit is None:
            raise ValueError("slot %r missing from tree" % (x,))
        tree, after = hit
        sign = rat(-1) ** (tree_vertex_count(lb) * after)
        return Z, {tree: sign}

    def relabel_label(self, X, label, bij):
        def rec(t):
            if not isinstance(t, tuple):
                return bij(t)
            return tuple(rec(c) for c in t)
        return rec(label), rat(1)

    def unit(self, X):
        if len(X) != 1:
            raise ValueError("unit lives over a single point")
        return self.element(X, {X.labels[0]: 1})

    def label_str(self, label):
        return tree_str(label)


def _ordered_partitions(labels, k):
    """Splits of the labels into k nonempty blocks, in every block order.
    Unordered partitions are grown with the first element pinned to the
    first block, then each partition is arranged all k! ways."""
    items = list(labels)
    parts = []

    def grow(i, blocks):
        if i == len(items):
            if len(blocks) == k:
                parts.append([tuple(b) for b in blocks])
            return
        for j in range(len(blocks)):
            blocks[j].append(items[i])
            grow(i + 1, blocks)
            blocks[j].pop()
        if len(blocks) < k:
            blocks.append([items[i]])
            grow(i + 1, blocks)
            blocks.pop()

    grow(0, [])
    out = []
    for blocks in parts:
        for order in permutations(blocks):
            out.append(tuple(order))
    return out


def _product(lists):
    if not lists:
        return [()]
    out = []
    for head in lists[0]:
        for rest in _product(lists[1:]):
            out.append((head,) + rest)
    return out


comm = CommOperad()
assoc = AssocOperad()

_COMM_SHIFTS = {}


def comm_shift(k):
    inst = _COMM_SHIFTS.get(k)
    if inst is None:
        inst = _COMM_SHIFTS[k] = CommShiftOperad(k)
    return inst


def comm_shift_element(k, X):
    """The generator of the k-shifted commutative operad over X."""
    return comm_shift(k).element(_as_finset(X), {"g": 1})


def gerstenhaber_bracket(m1, m2):
    """{m1, m2} = m1{m2} - (-1)^(|m1||m2|) m2{m1} over canonical label
    sets, where the brace is the sum of insertions at every slot."""
    d1 = m1.degree()
    d2 = m2.degree()
    if d1 is None or d2 is None:
        raise ValueError("brackets need nonzero homogeneous operands")
    first = braces(m1, m2)
    second = braces(m2, m1)
    return first - second.scale(rat(-1) ** (d1 * d2))


def braces(m1, m2):
    """m1{m2}: insertions of m2 at every slot of m1."""
    inst = m1.instance
    m = len(m1.X)
    n = len(m2.X)
    out = inst.zero(FinSet.range(m + n - 1))
    for slot in range(1, m + 1):
        out = out + compose_ordered(m1, slot, m2)
    return out


class TensorOperad(OperadInstance):
    """Arity-wise tensor product; composition composes the factors with the
    Koszul sign for moving the second factor of a past the first of b."""

    def __init__(self, first, second):
        self.first = first
        self.second = second
        self.name = "%s (x) %s" % (first.name, second.name)

    def basis(self, X):
        return [(l1, l2) for l1 in self.first.basis(X)
                for l2 in self.second.basis(X)]

    def degree(self, X, label):
        return (self.first.degree(X, label[0])
                + self.second.degree(X, label[1]))

    def compose_labels(self, X, x, Y, la, lb):
        Z = compose_target(X, x, Y)
        sign = rat(-1) ** (self.second.degree(X, la[1])
                           * self.first.degree(Y, lb[0]))
        Z1, t1 = self.first.compose_labels(X, x, Y, la[0], lb[0])
        Z2, t2 = self.second.compose_labels(X, x, Y, la[1], lb[1])
        out = {}
        for l1, c1 in t1.items():
            for l2, c2 in t2.items():
                out[(l1, l2)] = sign * c1 * c2
        return Z, out

    def relabel_label(self, X, label, bij):
        l1, c1 = self.first.relabel_label(X, label[0], bij)
        l2, c2 = self.second.relabel_label(X, label[1], bij)
        return (l1, l2), c1 * c2

    def unit(self, X):
        u1 = self.first.unit(X)
        u2 = self.second.unit(X)
        out = {}
        for l1, c1 in u1.coeffs.items():
            for l2, c2 in u2.coeffs.items():
                out[(l1, l2)] = c1 * c2
        return self.element(X, out)

    def label_str(self, label):
        return "(%s, %s)" % (self.first.label_str(label[0]),
                             self.second.label_str(label[1]))


def operad_tensor(first, second):
    return TensorOperad(first, second)


def hoass_differential(t, arity_cap):
    """Differential of a free-operad element: each vertex of arity k is
    replaced by the signed sum of its two-vertex splittings, the inner
    vertex grouping k+1-i consecutive children.  Raises when a vertex
    exceeds the arity cap."""
    inst = t.instance
    out = {}

    def emit(tree, c):
        v = out.get(tree, rat(0)) + c
        if v:
            out[tree] = v
        else:
            out.pop(tree, None)

    def walk(t0, pos, wrap, coeff):
        # pos counts vertices before t0 in pre-order of the whole tree
        if not isinstance(t0, tuple):
            return pos
        k = len(t0)
        if k > arity_cap:
            raise ValueError("vertex arity %d exceeds cap %d" % (k, arity_cap))
        for i in range(2, k):
            j = k + 1 - i
            for slot in range(1, i + 1):
                inner = t0[slot - 1:slot - 1 + j]
                grouped = t0[:slot - 1] + (inner,) + t0[slot - 1 + j:]
                before = sum(tree_vertex_count(t0[l])
                             for l in range(slot - 1))
                sign = rat(-1) ** (pos + 1 + before)
                emit(wrap(grouped), coeff * sign)
        p = pos + 1
        for idx in range(k):
            def wrap2(s, idx=idx, t0=t0, wrap=wrap):
                return wrap(t0[:idx] + (s,) + t0[idx + 1:])
            p = walk(t0[idx], p, wrap2, coeff)
        return p

    for tree, c in t.coeffs.items():
        walk(tree, 0, lambda s: s, c)
    return OperadElement(inst, t.X, out)


_SHUFFLE_QUOTIENTS = {}


def _shuffle_quotient(n):
    sq = _SHUFFLE_QUOTIENTS.get(n)
    if sq is None:
        sq = _SHUFFLE_QUOTIENTS[n] = ShuffleQuotient(n)
    return sq


def _min_leaf(t):
    return min(tree_leaves(t))


def _arrangement(children):
    """(word, ranked) for a child tuple: ranked lists the children by
    minimal leaf, word[s] is the rank held in slot s (1-based)."""
    ranked = sorted(children, key=_min_leaf)
    rank = {_min_leaf(c): r + 1 for r, c in enumerate(ranked)}
    word = tuple(rank[_min_leaf(c)] for c in children)
    return word, ranked


def _arrangement_sign(word, ranked):
    """Koszul sign of arranging the ranked children into slot order."""
    sign = 1
    degs = [tree_vertex_count(c) % 2 for c in ranked]
    for s in range(len(word)):
        for s2 in range(s + 1, len(word)):
            if (word[s] > word[s2] and degs[word[s] - 1]
                    and degs[word[s2] - 1]):
                sign = -sign
    return sign


_FREE_CACHE = {}


def _free_words(k):
    hit = _FREE_CACHE.get(k)
    if hit is None:
        hit = _FREE_CACHE[k] = frozenset(_shuffle_quotient(k).free_perms)
    return hit


def _first_nonfree(tree, path):
    """Path to the first vertex (pre-order) whose arrangement word is not
    in the canonical complement of the shuffle subspace."""
    if not isinstance(tree, tuple):
        return None
    word, _ = _arrangement(tree)
    if word not in _free_words(len(word)):
        return path
    for idx, c in enumerate(tree):
        hit = _first_nonfree(c, path + (idx,))
        if hit is not None:
            return hit
    return None


def _subtree_at(tree, path):
    for idx in path:
        tree = tree[idx]
    return tree


def _replace_at(tree, path, new):
    if not path:
        return new
    idx = path[0]
    return tree[:idx] + (_replace_at(tree[idx], path[1:], new),) + \
        tree[idx + 1:]


def hocomm_reduce(t):
    """Normal form modulo the shuffle ideal: every vertex arrangement is
    rewritten into the canonical complement of the shuffle subspace, with
    Koszul signs for reordering graded child subtrees."""
    inst = t.instance
    work = [(tree, c) for tree, c in t.coeffs.items()]
    out = {}
    while work:
        tree, c = work.pop()
        path = _first_nonfree(tree, ())
        if path is None:
            v = out.get(tree, rat(0)) + c
            if v:
                out[tree] = v
            else:
                out.pop(tree, None)
            continue
        vertex = _subtree_at(tree, path)
        word, ranked = _arrangement(vertex)
        k = len(word)
        sq = _shuffle_quotient(k)
        eps = _arrangement_sign(word, ranked)
        reduced = sq.reduce(PermutationVector(k, {word: 1}))
        for word2, c2 in reduced.terms.items():
            arranged = tuple(ranked[r - 1] for r in word2)
            eps2 = _arrangement_sign(word2, ranked)
            work.append((_replace_at(tree, path, arranged),
                         c * c2 * rat(eps * eps2)))
    return OperadElement(inst, t.X, out)


def shuffle_ideal_corollas(n):
    """Generators of the shuffle ideal in arity n: one free-operad element
    per echelon row of the shuffle subspace, leaves arranged by each word."""
    from .freelie import shuffle_subspace
    inst_cap = max(n, 2)
    inst = free_operad(inst_cap)
    out = []
    for vec in shuffle_subspace(n):
        coeffs = {}
        for word, c in vec.terms.items():
            coeffs[tuple(word)] = c
        out.append(inst.element(FinSet.range(n), coeffs))
    return out


_FREE_OPERADS = {}


def free_operad(arity_cap):
    inst = _FREE_OPERADS.get(arity_cap)
    if inst is None:
        inst = _FREE_OPERADS[arity_cap] = FreeOperad(arity_cap)
    return inst


class ModuleOverOperad:
    """Linear carrier over each label set, with insertions of operad
    elements into carrier elements and the reverse.  Insertions of the
    carrier into itself vanish; `law_check` verifies that the extended
    composition on operad-plus-carrier is an operad law."""

    def __init__(self, operad, name):
        self.operad = operad
        self.name = name

    def basis(self, X):
        raise NotImplementedError

    def degree(self, X, label):
        raise NotImplementedError

    def insert_operad(self, X, x, Y, mlabel, olabel):
        """Carrier over X with an operad label inserted at x; -> (Z, terms)."""
        raise NotImplementedError

    def operad_insert(self, X, x, Y, olabel, mlabel):
        """Operad label over X acting on a carrier element over Y."""
        raise NotImplementedError

    def relabel_label(self, X, label, bij):
        raise NotImplementedError

    def label_str(self, label):
        return repr(label)

    def element(self, X, coeffs):
        return OperadElement(self, X, coeffs)

    def zero(self, X):
        return OperadElement(self, X, {})

    def basis_elements(self, X):
        return [self.element(X, {l: 1}) for l in self.basis(_as_finset(X))]

    def relabel(self, a, bij):
        out = {}
        for l, c in a.coeffs.items():
            l2, c2 = self.relabel_label(a.X, l, bij)
            v = out.get(l2, rat(0)) + c * c2
            if v:
                out[l2] = v
            else:
                out.pop(l2, None)
        return OperadElement(self, bij.target, out)

    def transport(self, a, Z):
        Z = _as_finset(Z)
        bij = SetMap.total(a.X, Z, {l: l for l in a.X})
        return self.relabel(a, bij)

    def compose_mo(self, X, x, Y, m_elem, o_elem):
        X = _as_finset(X)
        Y = _as_finset(Y)
        Z = compose_target(X, x, Y)
        out = {}
        for ml, mc in m_elem.coeffs.items():
            for ol, oc in o_elem.coeffs.items():
                Z2, terms = self.insert_operad(X, x, Y, ml, ol)
                for l, c in terms.items():
                    v = out.get(l, rat(0)) + mc * oc * c
                    if v:
                        out[l] = v
                    else:
                        out.pop(l, None)
        return OperadElement(self, Z, out)

    def compose_om(self, X, x, Y, o_elem, m_elem):
        X = _as_finset(X)
        Y = _as_finset(Y)
        Z = compose_target(X, x, Y)
        out = {}
        for ol, oc in o_elem.coeffs.items():
            for ml, mc in m_elem.coeffs.items():
                Z2, terms = self.operad_insert(X, x, Y, ol, ml)
                for l, c in terms.items():
                    v = out.get(l, rat(0)) + mc * oc * c
                    if v:
                        out[l] = v
                    else:
                        out.pop(l, None)
        return OperadElement(self, Z, out)


class ExtElement:
    """Element of operad-plus-carrier, the direct sum the extended
    composition lives on."""

    __slots__ = ("module", "X", "o", "m")

    def __init__(self, module, X, o=None, m=None):
        self.module = module
        self.X = _as_finset(X)
        self.o = o if o is not None else module.operad.zero(self.X)
        self.m = m if m is not None else module.zero(self.X)

    def __eq__(self, other):
        return (isinstance(other, ExtElement) and self.module is other.module
                and self.X == other.X and self.o == other.o
                and self.m == other.m)

    def __add__(self, other):
        return ExtElement(self.module, self.X, self.o + other.o,
                          self.m + other.m)

    def scale(self, c):
        return ExtElement(self.module, self.X, self.o.scale(c),
                          self.m.scale(c))

    def degree(self):
        degs = set()
        if self.o:
            degs.add(self.o.degree())
        if self.m:
            degs.add(self.m.degree())
        if len(degs) > 1:
            raise ValueError("mixed degrees in extended element")
        return degs.pop() if degs else None


def ext_compose(module, X, x, Y, a, b):
    """Extended insertion on operad-plus-carrier: operad into operad,
    operad into carrier, carrier absorbing operad; carrier into carrier
    gives zero."""
    O = module.operad
    Z = compose_target(_as_finset(X), x, _as_finset(Y))
    o_part = O.compose(X, x, Y, a.o, b.o)
    m_part = module.compose_om(X, x, Y, a.o, b.m) + \
        module.compose_mo(X, x, Y, a.m, b.o)
    return ExtElement(module, Z, o_part, m_part)


def ext_relabel(module, a, bij):
    return ExtElement(module, bij.target, module.operad.relabel(a.o, bij),
                      module.relabel(a.m, bij))


def ext_transport(module, a, Z):
    Z = _as_finset(Z)
    bij = SetMap.total(a.X, Z, {l: l for l in a.X})
    return ext_relabel(module, a, bij)


def _ce_key_apply(target, key_map, coeffs):
    """Apply a per-key Lie map to wedge chains; key_map sends a basis key
    to a quotient element over the target algebra."""
    from .complexes import wedge_sort
    out = {}
    for chain, c in coeffs.items():
        partial = [((), c)]
        for key in chain:
            img = key_map(key)
            nxt = []
            for keys, cc in partial:
                for k2, c2 in sorted(img.coords.items()):
                    w = key[0]
                    nxt.append((keys + ((w, k2),), cc * c2))
            partial = nxt
        for keys, cc in partial:
            hit = wedge_sort(keys)
            if hit is None:
                continue
            chain2, sign = hit
            v = out.get(chain2, rat(0)) + cc * sign
            if v:
                out[chain2] = v
            else:
                out.pop(chain2, None)
    return out


class CECommModule(ModuleOverOperad):
    """Chains of the braid Lie algebras as a module over the
    one-dimensional operad: inserting the unit operation collapses labels
    and pulls chains back, inserting a chain pushes it forward along the
    label inclusion."""

    def __init__(self, weight_cap):
        ModuleOverOperad.__init__(self, comm, "ce-chains(w<=%d)" % weight_cap)
        self.weight_cap = weight_cap

    def basis(self, X):
        from .complexes import ce_cells
        out = []
        for w in range(1, self.weight_cap + 1):
            cells = ce_cells(X, w)
            for m in sorted(cells):
                if m >= 1:
                    out.extend(cells[m])
        return out

    def degree(self, X, label):
        return -len(label)

    def insert_operad(self, X, x, Y, mlabel, olabel):
        from .dk import inverse_image
        Z = compose_target(X, x, Y)
        collapse = SetMap.total(Z, X, dict(
            [(l, l) for l in X if l != x] + [(l, x) for l in Y]))

        def key_map(key):
            w, i = key
            return inverse_image(collapse, dk_basis(X, w).element({i: 1}))

        return Z, _ce_key_apply(Z, key_map, {mlabel: rat(1)})

    def operad_insert(self, X, x, Y, olabel, mlabel):
        Z = compose_target(X, x, Y)
        include = SetMap.total(Y, Z, {l: l for l in Y})

        def key_map(key):
            w, i = key
            return direct_image(include, dk_basis(Y, w).element({i: 1}))

        return Z, _ce_key_apply(Z, key_map, {mlabel: rat(1)})

    def relabel_label(self, X, label, bij):
        img = _ce_key_apply(bij.target, lambda key: direct_image(
            bij, dk_basis(X, key[0]).element({key[1]: 1})), {label: rat(1)})
        # a bijection sends basis chains to signed combinations; callers
        # needing full linearity go through relabel below
        if len(img) == 1:
            (l2, c2), = img.items()
            return l2, c2
        raise ValueError("relabeling split a chain; use relabel()")

    def relabel(self, a, bij):
        out = {}
        for l, c in a.coeffs.items():
            img = _ce_key_apply(bij.target, lambda key: direct_image(
                bij, dk_basis(a.X, key[0]).element({key[1]: 1})),
                {l: rat(1)})
            for l2, c2 in img.items():
                v = out.get(l2, rat(0)) + c * c2
                if v:
                    out[l2] = v
                else:
                    out.pop(l2, None)
        return OperadElement(self, bij.target, out)

    def label_str(self, label):
        return "^".join("e%d_%d" % k for k in label) or "1"


def ce_comm_module(weight_cap):
    return CECommModule(weight_cap)


def _fresh_sets(m, n, p=None):
    X = FinSet.range(m)
    Y = FinSet(range(m + 1, m + n + 1))
    if p is None:
        return X, Y
    W = FinSet(range(m + n + 1, m + n + p + 1))
    return X, Y, W


def axiom_check(O, size_cap):
    """Exhaustive operad-law check over canonical label sets: units, both
    associativity shapes (parallel insertions carry the Koszul sign of
    swapping the inserted operands), and equivariance under all label
    bijections.  Every label set involved stays within the size cap.
    Returns a report with the first violation, if any."""
    report = {"instance": O.name, "size_cap": size_cap, "checked": 0,
              "passed": True, "violation": None}

    def fail(axiom, detail):
        if report["passed"]:
            report["passed"] = False
            report["violation"] = {"axiom": axiom, "detail": detail}

    # units
    for m in range(1, size_cap + 1):
        X = FinSet.range(m)
        pt = FinSet((m + 1,))
        u = O.unit(pt)
        for b in O.basis_elements(X):
            report["checked"] += 1
            if O.compose(pt, m + 1, X, u, b) != b:
                fail("left-unit", "size %d, operand %s" % (m, b))
        for x in X:
            Z = compose_target(X, x, pt)
            bij = SetMap.total(X, Z, dict(
                [(l, l) for l in X if l != x] + [(x, m + 1)]))
            for a in O.basis_elements(X):
                report["checked"] += 1
                if O.compose(X, x, pt, a, u) != O.relabel(a, bij):
                    fail("right-unit", "size %d, slot %r, operand %s"
                         % (m, x, a))
        if not report["passed"]:
            return report

    # equivariance
    for m in range(1, size_cap + 1):
        for n in range(1, size_cap - m + 2):
            if m - 1 + n > size_cap:
                continue
            X, Y = _fresh_sets(m, n)
            basX = O.basis_elements(X)
            basY = O.basis_elements(Y)
            for sperm in permutations(X.labels):
                sigma = SetMap.total(X, X, dict(zip(X.labels, sperm)))
                for tperm in permutations(Y.labels):
                    tau = SetMap.total(Y, Y, dict(zip(Y.labels, tperm)))
                    for x in X:
                        Z1 = compose_target(X, x, Y)
                        Z2 = compose_target(X, sigma(x), Y)
                        induced = SetMap.total(Z1, Z2, dict(
                            [(l, sigma(l)) for l in X if l != x]
                            + [(l, tau(l)) for l in Y]))
                        for a in basX:
                            for b in basY:
                                report["checked"] += 1
                                lhs = O.relabel(
                                    O.compose(X, x, Y, a, b), induced)
                                rhs = O.compose(X, sigma(x), Y,
                                                O.relabel(a, sigma),
                                                O.relabel(b, tau))
                                if lhs != rhs:
                                    fail("equivariance",
                                         "sizes (%d,%d), slot %r, %s, %s"
                                         % (m, n, x, a, b))
                                    return report

    # parallel associativity
    for m in range(2, size_cap + 2):
        for n in range(1, size_cap + 1):
            for p in range(1, size_cap + 1):
                if m - 2 + n + p > size_cap:
                    continue
                X, Y, W = _fresh_sets(m, n, p)
                basX = O.basis_elements(X)
                basY = O.basis_elements(Y)
                basW = O.basis_elements(W)
                for x in X:
                    for y in X:
                        if x == y:
                            continue
                        for a in basX:
                            for b in basY:
                                for c in basW:
                                    report["checked"] += 1
                                    ab = O.compose(X, x, Y, a, b)
                                    s1 = O.compose(ab.X, y, W, ab, c)
                                    ac = O.compose(X, y, W, a, c)
                                    s2 = O.compose(ac.X, x, Y, ac, b)
                                    sign = rat(-1) ** (
                                        (b.degree() or 0) * (c.degree() or 0))
                                    s2t = O.transport(s2, s1.X).scale(sign)
                                    if s1 != s2t:
                                        fail("parallel-associativity",
                                             "sizes (%d,%d,%d), slots "
                                             "(%r,%r), %s, %s, %s"
                                             % (m, n, p, x, y, a, b, c))
                                        return report

    # nested associativity
    for m in range(1, size_cap + 1):
        for n in range(1, size_cap + 1):
            for p in range(1, size_cap + 1):
                if m + n + p - 2 > size_cap:
                    continue
                X, Y, W = _fresh_sets(m, n, p)
                basX = O.basis_elements(X)
                basY = O.basis_elements(Y)
                basW = O.basis_elements(W)
                for x in X:
                    for y in Y:
                        for a in basX:
                            for b in basY:
                                for c in basW:
                                    report["checked"] += 1
                                    ab = O.compose(X, x, Y, a, b)
                                    s1 = O.compose(ab.X, y, W, ab, c)
                                    bc = O.compose(Y, y, W, b, c)
                                    s2 = O.compose(X, x, bc.X, a, bc)
                                    if s1 != O.transport(s2, s1.X):
                                        fail("nested-associativity",
                                             "sizes (%d,%d,%d), slots "
                                             "(%r,%r), %s, %s, %s"
                                             % (m, n, p, x, y, a, b, c))
                                        return report
    return report


def module_law_check(module, size_cap):
    """Operad-law check for the extended composition on operad-plus-
    carrier: triples with at most one carrier operand, equivariance, and
    units, over canonical label sets within the size cap."""
    O = module.operad
    report = {"module": module.name, "size_cap": size_cap, "checked": 0,
              "passed": True, "violation": None}

    def fail(axiom, detail):
        if report["passed"]:
            report["passed"] = False
            report["violation"] = {"axiom": axiom, "detail": detail}

    def ext_basis(X):
        out = [ExtElement(module, X, o=e) for e in O.basis_elements(X)]
        out.extend(ExtElement(module, X, m=e)
                   for e in module.basis_elements(X))
        return out

    # units (operad unit only; the carrier has none)
    for m in range(1, size_cap + 1):
        X = FinSet.range(m)
        pt = FinSet((m + 1,))
        u = ExtElement(module, pt, o=O.unit(pt))
        for b in ext_basis(X):
            report["checked"] += 1
            if ext_compose(module, pt, m + 1, X, u, b) != b:
                fail("left-unit", "size %d, operand m=%s o=%s"
                     % (m, b.m, b.o))
        for x in X:
            Z = compose_target(X, x, pt)
            bij = SetMap.total(X, Z, dict(
                [(l, l) for l in X if l != x] + [(x, m + 1)]))
            for a in ext_basis(X):
                report["checked"] += 1
                if ext_compose(module, X, x, pt, a, u) != \
                        ext_relabel(module, a, bij):
                    fail("right-unit", "size %d, slot %r" % (m, x))
        if not report["passed"]:
            return report

    # equivariance
    for m in range(1, size_cap + 1):
        for n in range(1, size_cap - m + 2):
            if m - 1 + n > size_cap:
                continue
            X, Y = _fresh_sets(m, n)
            for sperm in permutations(X.labels):
                sigma = SetMap.total(X, X, dict(zip(X.labels, sperm)))
                for tperm in permutations(Y.labels):
                    tau = SetMap.total(Y, Y, dict(zip(Y.labels, tperm)))
                    for x in X:
                        Z1 = compose_target(X, x, Y)
                        Z2 = compose_target(X, sigma(x), Y)
                        induced = SetMap.total(Z1, Z2, dict(
                            [(l, sigma(l)) for l in X if l != x]
                            + [(l, tau(l)) for l in Y]))
                        for a in ext_basis(X):
                            for b in ext_basis(Y):
                                report["checked"] += 1
                                lhs = ext_relabel(module, ext_compose(
                                    module, X, x, Y, a, b), induced)
                                rhs = ext_compose(
                                    module, X, sigma(x), Y,
                                    ext_relabel(module, a, sigma),
                                    ext_relabel(module, b, tau))
                                if lhs != rhs:
                                    fail("equivariance",
                                         "sizes (%d,%d), slot %r" % (m, n, x))
                                    return report

    # associativity, both shapes, at most one carrier operand
    def triples(X, Y, W):
        for pick in range(3):
            ops = []
            for pos, S in enumerate((X, Y, W)):
                if pos == pick:
                    ops.append([ExtElement(module, S, m=e)
                                for e in module.basis_elements(S)])
                else:
                    ops.append([ExtElement(module, S, o=e)
                                for e in O.basis_elements(S)])
            for a in ops[0]:
                for b in ops[1]:
                    for c in ops[2]:
                        yield a, b, c

    for m in range(2, size_cap + 2):
        for n in range(1, size_cap + 1):
            for p in range(1, size_cap + 1):
                if m - 2 + n + p > size_cap:
                    continue
                X, Y, W = _fresh_sets(m, n, p)
                for x in X:
                    for y in X:
                        if x == y:
                            continue
                        for a, b, c in triples(X, Y, W):
                            report["checked"] += 1
                            ab = ext_compose(module, X, x, Y, a, b)
                            s1 = ext_compose(module, ab.X, y, W, ab, c)
                            ac = ext_compose(module, X, y, W, a, c)
                            s2 = ext_compose(module, ac.X, x, Y, ac, b)
                            sign = rat(-1) ** ((b.degree() or 0)
                                               * (c.degree() or 0))
                            if s1 != ext_transport(module, s2,
                                                   s1.X).scale(sign):
                                fail("parallel-associativity",
                                     "sizes (%d,%d,%d)" % (m, n, p))
                                return report

    for m in range(1, size_cap + 1):
        for n in range(1, size_cap + 1):
            for p in range(1, size_cap + 1):
                if m + n + p - 2 > size_cap:
                    continue
                X, Y, W = _fresh_sets(m, n, p)
                for x in X:
                    for y in Y:
                        for a, b, c in triples(X, Y, W):
                            report["checked"] += 1
                            ab = ext_compose(module, X, x, Y, a, b)
                            s1 = ext_compose(module, ab.X, y, W, ab, c)
                            bc = ext_compose(module, Y, y, W, b, c)
                            s2 = ext_compose(module, X, x, bc.X, a, bc)
                            if s1 != ext_transport(module, s2, s1.X):
                                fail("nested-associativity",
                                     "sizes (%d,%d,%d)" % (m, n, p))
                                return report
    return report
