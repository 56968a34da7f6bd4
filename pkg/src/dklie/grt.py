"""Kernel conditions on the three-strand braid Lie algebra and the
deformation complex they embed into.

Two linear systems cut out the distinguished subspace of g(3) in each
weight: a pair of permutation-difference operators (the shuffle block),
and a five-term alternating sum of push/pull maps into g(4) (the pentagon
block).  `grt_basis` returns the joint kernel.

The deformation side works with values: per arity n, a sign-twisted
S_n-invariant element of (multilinear Lie part) tensor (wedge chains over
g(n)).  The differential brackets the value with the binary generator,
inserting it into every input and composing it around the value, and
re-projects; it raises arity by one and preserves the wedge degree.  `embed_grt` realizes a g(3) element as an invariant
value with that element as its wedge-1 extraction, and
`cohomology_class_test` decides cocycle and coboundary questions in
explicit arity windows.

Permutation words (s1..sn) always denote the bijection k -> s_k acting by
relabeling the underlying points.

Lie parts are stored in the left-normed basis: words (1, s2, .., sn)
stand for the iterated bracket [[..[e1, e_s2], ..], e_sn].  The
coefficient of the basis word (1, u) in any multilinear element equals
the coefficient of the tensor word (1, u) in its expansion, which makes
reduction after relabeling or insertion a direct read-off.
"""

from itertools import permutations

from .complexes import ce_cells, wedge_sort
from .dk import FinSet, SetMap, dk_basis, direct_image, inverse_image
from .exactla import SparseMatrix, kernel_basis, rank, rat, rat_str, \
    Echelon, TrackingEchelon


def perm_sign(word):
    sign = 1
    for i in range(len(word)):
        for j in range(i + 1, len(word)):
            if word[i] > word[j]:
                sign = -sign
    return sign


def perm_map(word):
    """The bijection k -> word[k-1] on canonical labels."""
    n = len(word)
    X = FinSet.range(n)
    return SetMap.total(X, X, {k: word[k - 1] for k in range(1, n + 1)})


def relabel_g(word, elem):
    """Relabel a homogeneous g(n) element by a permutation word."""
    return direct_image(perm_map(word), elem)


def _action_matrix(w, words_and_signs):
    """Matrix of a signed sum of permutation relabelings on g(3)_w."""
    basis = dk_basis(FinSet.range(3), w)
    entries = {}
    for j in range(basis.dim):
        col = {}
        for word, sgn in words_and_signs:
            img = relabel_g(word, basis.element({j: 1}))
            for i, c in img.coords.items():
                v = col.get(i, rat(0)) + sgn * c
                if v:
                    col[i] = v
                else:
                    col.pop(i, None)
        for i, c in col.items():
            entries[(i, j)] = c
    return SparseMatrix(basis.dim, basis.dim, entries)


def shuffle_condition(w):
    """Stacked matrix of the two permutation-difference operators on
    g(3)_w; an element is a solution when both halves kill it."""
    if w < 1:
        raise ValueError("weight must be at least 1")
    op1 = _action_matrix(w, (((2, 1, 3), rat(1)), ((2, 3, 1), rat(-1)),
                             ((1, 2, 3), rat(-1))))
    op2 = _action_matrix(w, (((1, 3, 2), rat(1)), ((3, 1, 2), rat(-1)),
                             ((1, 2, 3), rat(-1))))
    d = op1.ncols
    entries = {}
    for (i, j), c in op1.entries.items():
        entries[(i, j)] = c
    for (i, j), c in op2.entries.items():
        entries[(i + d, j)] = c
    return SparseMatrix(2 * d, d, entries)


PENTAGON_PUSH = (
    ((1, 2, 3), rat(1)),     # include as strands 1,2,3
    ((2, 3, 4), rat(1)),     # include as strands 2,3,4
)
PENTAGON_PULL = (
    ((1, 2, 2, 3), rat(1)),   # merge strands 2,3
    ((1, 2, 3, 3), rat(-1)),  # merge strands 3,4
    ((1, 1, 2, 3), rat(-1)),  # merge strands 1,2
)


def _pentagon_maps():
    X3 = FinSet.range(3)
    X4 = FinSet.range(4)
    maps = []
    for image, sgn in PENTAGON_PUSH:
        f = SetMap.total(X3, X4, {k: image[k - 1] for k in (1, 2, 3)})
        maps.append(("push", f, sgn))
    for fibers, sgn in PENTAGON_PULL:
        f = SetMap.total(X4, X3, {k: fibers[k - 1] for k in (1, 2, 3, 4)})
        maps.append(("pull", f, sgn))
    return maps


def pentagon_terms(elem):
    """The five signed images in g(4) of a g(3) element, as a list of
    (description, image) pairs; their sum is the pentagon operator."""
    out = []
    for kind, f, sgn in _pentagon_maps():
        img = direct_image(f, elem) if kind == "push" else \
            inverse_image(f, elem)
        out.append((kind, sgn, img))
    return out


def pentagon_apply(elem):
    total = None
    for kind, sgn, img in pentagon_terms(elem):
        part = img.scale(sgn)
        total = part if total is None else total + part
    return total


def pentagon_condition(w):
    """Matrix of the five-term operator g(3)_w -> g(4)_w."""
    if w < 1:
        raise ValueError("weight must be at least 1")
    b3 = dk_basis(FinSet.range(3), w)
    b4 = dk_basis(FinSet.range(4), w)
    entries = {}
    for j in range(b3.dim):
        img = pentagon_apply(b3.element({j: 1}))
        for i, c in img.coords.items():
            entries[(i, j)] = c
    return SparseMatrix(b4.dim, b3.dim, entries)


class ConditionSystem:
    """Both condition blocks at one weight."""

    __slots__ = ("weight", "shuffle_block", "pentagon_block")

    def __init__(self, weight):
        self.weight = weight
        self.shuffle_block = shuffle_condition(weight)
        self.pentagon_block = pentagon_condition(weight)

    def stacked(self):
        s, p = self.shuffle_block, self.pentagon_block
        entries = dict(s.entries)
        for (i, j), c in p.entries.items():
            entries[(i + s.nrows, j)] = c
        return SparseMatrix(s.nrows + p.nrows, s.ncols, entries)


def condition_system(w):
    return ConditionSystem(w)


def grt_basis(w):
    """Deterministic basis of the joint kernel of both condition systems,
    as elements of g(3)_w."""
    system = condition_system(w)
    basis = dk_basis(FinSet.range(3), w)
    out = []
    for vec in kernel_basis(system.stacked()):
        out.append(basis.element(vec))
    return out


# ---------------------------------------------------------------------------
# Multilinear Lie parts in the left-normed basis.

_LN_TENSOR_CACHE = {}


def _ln_tensor(word):
    """Tensor expansion of the left-normed bracket of a word: {word: ±1}."""
    cached = _LN_TENSOR_CACHE.get(word)
    if cached is None:
        cur = {(word[0],): 1}
        for letter in word[1:]:
            nxt = {}
            for w, c in cur.items():
                for w2, c2 in ((w + (letter,), c), ((letter,) + w, -c)):
                    v = nxt.get(w2, 0) + c2
                    if v:
                        nxt[w2] = v
                    else:
                        nxt.pop(w2, None)
            cur = nxt
        cached = _LN_TENSOR_CACHE[word] = cur
    return cached


def left_normed_words(arity):
    """The left-normed basis words of the multilinear degree-n component:
    (1, u) for u a permutation of 2..n."""
    return [(1,) + u for u in permutations(range(2, arity + 1))]


def reduce_multilinear(tensor):
    """Left-normed coordinates of a multilinear Lie element given by its
    tensor-word expansion: read off the words starting with letter 1."""
    return {w: c for w, c in tensor.items() if w[0] == 1 and c}


_ACT_LIE_CACHE = {}


def _act_lie(sigma, word):
    """Left-normed coordinates of the relabeling of a left-normed basis
    word by the permutation word sigma; {word: int}."""
    key = (sigma, word)
    cached = _ACT_LIE_CACHE.get(key)
    if cached is None:
        out = {}
        for w, c in _ln_tensor(word).items():
            if sigma[w[0] - 1] == 1:
                out[tuple(sigma[l - 1] for l in w)] = c
        cached = _ACT_LIE_CACHE[key] = out
    return cached


# ---------------------------------------------------------------------------
# Chain parts: wedge words of quotient-basis keys (weight, index) over g(n).

_ACT_KEY_CACHE = {}


def _act_key(n, sigma, key):
    """Key-level relabeling in g(n): {key: coeff}."""
    ck = (n, sigma, key)
    cached = _ACT_KEY_CACHE.get(ck)
    if cached is None:
        w, i = key
        img = relabel_g(sigma, dk_basis(FinSet.range(n), w).element({i: 1}))
        cached = _ACT_KEY_CACHE[ck] = {(w, j): c for j, c in
                                       img.coords.items()}
    return cached


def _expand_chains(factor_images):
    """Wedge product of per-factor key expansions: {chain: coeff}."""
    out = {(): rat(1)}
    for img in factor_images:
        nxt = {}
        for pref, c in out.items():
            for key, c2 in img.items():
                raw = pref + (key,)
                v = nxt.get(raw, rat(0)) + c * c2
                if v:
                    nxt[raw] = v
                else:
                    nxt.pop(raw, None)
        out = nxt
    final = {}
    for raw, c in out.items():
        srt = wedge_sort(raw)
        if srt is None:
            continue
        ch, s = srt
        v = final.get(ch, rat(0)) + s * c
        if v:
            final[ch] = v
        else:
            final.pop(ch, None)
    return final


def _act_chain(n, sigma, chain):
    return _expand_chains([_act_key(n, sigma, k) for k in chain])


# ---------------------------------------------------------------------------
# Values and the equivariant projector.


class DerivationValue:
    """Finitely supported family, per arity n, of elements of
    (multilinear Lie part) tensor (wedge chains over g(n)).

    Terms are keyed (word, chain) with word a left-normed basis word and
    chain a sorted tuple of (weight, index) keys.  Relabelings act on the
    Lie part with an extra alternating twist; `p_project` averages over
    that twisted action, and invariant values are its fixed points.
    """

    __slots__ = ("components",)

    def __init__(self, components):
        comps = {}
        for n, terms in components.items():
            clean = {k: rat(c) for k, c in terms.items() if rat(c)}
            if clean:
                comps[n] = clean
        self.components = comps

    def arities(self):
        return sorted(self.components)

    def component(self, n):
        return dict(self.components.get(n, {}))

    def __bool__(self):
        return bool(self.components)

    def __eq__(self, other):
        return isinstance(other, DerivationValue) and \
            self.components == other.components

    def __add__(self, other):
        out = {n: dict(t) for n, t in self.components.items()}
        for n, terms in other.components.items():
            dst = out.setdefault(n, {})
            for k, c in terms.items():
                dst[k] = dst.get(k, rat(0)) + c
        return DerivationValue(out)

    def __sub__(self, other):
        return self + other.scale(rat(-1))

    def scale(self, c):
        c = rat(c)
        return DerivationValue(
            {n: {k: c * v for k, v in terms.items()}
             for n, terms in self.components.items()})

    def weight(self):
        """Common total chain weight of all terms; None when empty."""
        ws = {sum(k[0] for k in ch)
              for terms in self.components.values() for _, ch in terms}
        if not ws:
            return None
        if len(ws) > 1:
            raise ValueError("value mixes chain weights: %s" % sorted(ws))
        return ws.pop()

    def degree(self):
        """Common total degree (n - 1 - wedge count); None when empty."""
        ds = {n - 1 - len(ch)
              for n, terms in self.components.items() for _, ch in terms}
        if not ds:
            return None
        if len(ds) > 1:
            raise ValueError("value mixes degrees: %s" % sorted(ds))
        return ds.pop()

    def __str__(self):
        if not self.components:
            return "0"
        parts = []
        for n in self.arities():
            terms = self.components[n]
            shown = []
            for (word, ch), c in sorted(terms.items()):
                lie = "L(%s)" % ",".join(str(l) for l in word)
                if ch:
                    lie += "|" + "^".join("(%d,%d)" % k for k in ch)
                shown.append("%s*%s" % (rat_str(c), lie))
            parts.append("arity %d: %s" % (n, " + ".join(shown)))
        return "; ".join(parts)

    def __repr__(self):
        return "DerivationValue(%s)" % str(self)


def act_value_term(n, sigma, word, chain):
    """Twisted relabeling of one term: {(word, chain): coeff}, including
    the alternating twist of the Lie-part grading."""
    out = {}
    eps = perm_sign(sigma)
    lie = _act_lie(sigma, word)
    chains = _act_chain(n, sigma, chain)
    for w2, c in lie.items():
        for ch2, c2 in chains.items():
            k = (w2, ch2)
            v = out.get(k, rat(0)) + eps * c * c2
            if v:
                out[k] = v
            else:
                out.pop(k, None)
    return out


def p_project(arity, terms):
    """Average of the twisted S_n-action: the equivariant projection onto
    invariants, as a term dict."""
    out = {}
    for sigma in permutations(range(1, arity + 1)):
        for (word, chain), c in terms.items():
            for k, c2 in act_value_term(arity, sigma, word, chain).items():
                v = out.get(k, rat(0)) + c * c2
                if v:
                    out[k] = v
                else:
                    out.pop(k, None)
    scale = rat(1)
    for i in range(2, arity + 1):
        scale *= i
    return {k: c / scale for k, c in out.items() if c}


def projects_to_zero(arity, terms):
    """Whether p_project(arity, terms) vanishes, decided in time linear in
    the tensor expansion.

    Valid because the twisted S_n-action is free on tensor monomials: the
    Lie factor of every monomial is a full permutation word, so each
    monomial transports to a unique canonical representative with Lie word
    (1..n); the average vanishes iff the canonical accumulation does.
    """
    acc = {}
    for (word, chain), c in terms.items():
        for w, tc in _ln_tensor(word).items():
            sigma = [0] * arity
            for pos, letter in enumerate(w):
                sigma[letter - 1] = pos + 1
            sigma = tuple(sigma)
            eps = perm_sign(sigma)
            base = c * tc * eps
            for ch2, c2 in _act_chain(arity, sigma, chain).items():
                v = acc.get(ch2, rat(0)) + base * c2
                if v:
                    acc[ch2] = v
                else:
                    acc.pop(ch2, None)
    return not acc


_DEF_SPACE_CACHE = {}


def deformation_space(arity, weight, degree):
    """Deterministic ordered basis of the invariant values at one
    (arity, weight, CE degree) cell, each a DerivationValue supported on
    that single arity."""
    if arity < 2:
        raise ValueError("arity must be at least 2")
    ck = (arity, weight, degree)
    cached = _DEF_SPACE_CACHE.get(ck)
    if cached is not None:
        return list(cached)
    m = -degree
    if m < 0 or weight < 0:
        _DEF_SPACE_CACHE[ck] = []
        return []
    cells = ce_cells(FinSet.range(arity), weight).get(m, [])
    pairs = [(w, ch) for w in left_normed_words(arity) for ch in cells]
    index = {p: i for i, p in enumerate(pairs)}
    ech = Echelon()
    out = []
    for pair in pairs:
        proj = p_project(arity, {pair: rat(1)})
        if not proj:
            continue
        if not ech.insert({index[k]: c for k, c in proj.items()}):
            continue
        lead = min(proj, key=lambda k: index[k])
        inv = rat(1) / proj[lead]
        out.append(DerivationValue(
            {arity: {k: inv * c for k, c in proj.items()}}))
    _DEF_SPACE_CACHE[ck] = out
    return list(out)


def bracket_value():
    """The invariant value of the binary bracket generator: the single
    term L(1,2) with the empty chain."""
    return DerivationValue({2: {((1, 2), ()): rat(1)}})


# ---------------------------------------------------------------------------
# The differential: insertion against the bracket generator.

_PULL_KEY_CACHE = {}
_PUSH_KEY_CACHE = {}


def _collapse_map(n):
    """[n+1] -> [n] merging the first two points."""
    src = FinSet.range(n + 1)
    dst = FinSet.range(n)
    images = {1: 1, 2: 1}
    for k in range(3, n + 2):
        images[k] = k - 1
    return SetMap.total(src, dst, images)


def _include_map(n):
    """[n] -> [n+1] as the first n points."""
    src = FinSet.range(n)
    dst = FinSet.range(n + 1)
    return SetMap.total(src, dst, {k: k for k in range(1, n + 1)})


def _pull_key(n, key):
    ck = (n, key)
    cached = _PULL_KEY_CACHE.get(ck)
    if cached is None:
        w, i = key
        img = inverse_image(_collapse_map(n),
                            dk_basis(FinSet.range(n), w).element({i: 1}))
        cached = _PULL_KEY_CACHE[ck] = {(w, j): c
                                        for j, c in img.coords.items()}
    return cached


def _push_key(n, key):
    ck = (n, key)
    cached = _PUSH_KEY_CACHE.get(ck)
    if cached is None:
        w, i = key
        img = direct_image(_include_map(n),
                           dk_basis(FinSet.range(n), w).element({i: 1}))
        cached = _PUSH_KEY_CACHE[ck] = {(w, j): c
                                        for j, c in img.coords.items()}
    return cached


def deformation_differential(v, arity_cap):
    """Bracket each component against the binary generator and re-project;
    raises arity by one, preserves wedge degree and weight.

    Each arity-n component contributes two families of insertions: the
    generator composed into any of the n inputs, and the component
    composed into either slot of the generator.  After averaging, every
    member of a family is a relabeling of its slot-1 representative, so
    the projected integrand carries the representative with the family
    size as its weight: n for input insertions, 2 for outer composition.
    The remaining signs are (-1)^m (Koszul, moving a wedge-m chain past
    the degree-1 generator) and (-1)^n relative between the families
    (suspension plus the degree sign of the bracket).  Dropping the
    family sizes breaks the square-zero identity: cross terms between
    insertions at disjoint inputs no longer cancel.
    """
    if any(n >= arity_cap for n in v.components):
        raise ValueError("support reaches arity cap %d" % arity_cap)
    out = {}
    for n, terms in v.components.items():
        integrand = {}
        for (word, chain), c in terms.items():
            base = c if len(chain) % 2 == 0 else -c
            ca = base * n
            cb = base * 2 * (-1 if n % 2 else 1)
            # generator into the value's first input: left-normed words
            # map to left-normed words; chains pull back along the
            # two-point collapse
            wa = (1, 2) + tuple(l + 1 for l in word[1:])
            for ch2, c2 in _expand_chains(
                    [_pull_key(n, k) for k in chain]).items():
                k2 = (wa, ch2)
                val = integrand.get(k2, rat(0)) + ca * c2
                if val:
                    integrand[k2] = val
                else:
                    integrand.pop(k2, None)
            # the value into the generator's first slot: append the new
            # letter; chains push forward along the inclusion
            wb = word + (n + 1,)
            for ch2, c2 in _expand_chains(
                    [_push_key(n, k) for k in chain]).items():
                k2 = (wb, ch2)
                val = integrand.get(k2, rat(0)) + cb * c2
                if val:
                    integrand[k2] = val
                else:
                    integrand.pop(k2, None)
        if not integrand or projects_to_zero(n + 1, integrand):
            continue
        proj = p_project(n + 1, integrand)
        if proj:
            out[n + 1] = proj
    return DerivationValue(out)


# ---------------------------------------------------------------------------
# Realizing g(3) elements as values, and the class test.


def generator_value(v, arity):
    """Chain coefficients of the identity-word slice of one component:
    the value the derivation takes on the arity-n generator."""
    idw = tuple(range(1, arity + 1))
    return {ch: c for (w, ch), c in v.components.get(arity, {}).items()
            if w == idw}


def value_element(v, arity, weight):
    """The wedge-1 extraction of a component as a g(arity) element."""
    basis = dk_basis(FinSet.range(arity), weight)
    coords = {}
    for ch, c in generator_value(v, arity).items():
        if len(ch) == 1 and ch[0][0] == weight:
            coords[ch[0][1]] = c
    return basis.element(coords)


def embed_grt(phi):
    """Invariant arity-3 value whose extraction is phi, when one exists.

    Solved exactly over the invariant basis of the (3, weight, wedge-1)
    cell; the solution is the canonical one from the tracking
    elimination.  Elements outside the realizable subspace (those not
    killed by shuffles) have no such value; the twisted symmetrization of
    the raw term is returned instead, and its extraction then differs
    from phi, which `cohomology_class_test` detects.
    """
    w = phi.weight
    basis = deformation_space(3, w, -1)
    te = TrackingEchelon()
    for j, val in enumerate(basis):
        vec = {}
        for ch, c in generator_value(val, 3).items():
            if len(ch) == 1:
                vec[ch[0][1]] = c
        te.insert(vec, j)
    residue, comb = te.reduce_with_combination(dict(phi.coords))
    if not residue:
        x = DerivationValue({})
        for j, a in sorted(comb.items()):
            x = x + basis[j].scale(a)
        return x
    raw = {((1, 2, 3), ((w, i),)): c for i, c in phi.coords.items()}
    return DerivationValue({3: p_project(3, raw)})


def cohomology_class_test(phi, arity_window):
    """Cocycle and coboundary verdicts for the value realizing phi.

    cocycle: the realization extracts back to phi exactly and its
    differential vanishes through the window.  coboundary: the value is a
    differential of a wedge-1 value supported on arities 2 and 3 (the
    only support a preimage can have, since the differential moves
    support up by exactly one arity).  The returned witness is the
    nonzero differential when the cocycle check fails there.
    """
    if arity_window < 4:
        raise ValueError("arity window must be at least 4")
    w = phi.weight
    x = embed_grt(phi)
    dx = deformation_differential(x, arity_window)
    faithful = value_element(x, 3, w).coords == \
        {i: rat(c) for i, c in phi.coords.items() if rat(c)}
    cocycle = faithful and not dx
    unknowns = deformation_space(2, w, -1) + deformation_space(3, w, -1)
    te = TrackingEchelon()
    for j, y in enumerate(unknowns):
        dy = deformation_differential(y, 5)
        vec = {}
        for n2, terms in dy.components.items():
            for (word, ch), c in terms.items():
                vec[(n2, word, ch)] = c
        te.insert(vec, j)
    xvec = {}
    for n2, terms in x.components.items():
        for (word, ch), c in terms.items():
            xvec[(n2, word, ch)] = c
    residue, _ = te.reduce_with_combination(xvec)
    coboundary = not residue
    return {
        "cocycle": cocycle,
        "coboundary": coboundary,
        "nonzero_class": cocycle and not coboundary,
        "witness": dx if dx else None,
    }


def solver_report(w):
    """Weight-w summary for machine output: dimensions, the basis as
    element strings, and the class test of the first basis element."""
    basis = grt_basis(w)
    report = {
        "weight": w,
        "dim_g3": dk_basis(FinSet.range(3), w).dim,
        "dim_shuffle_kernel":
            shuffle_condition(w).ncols - rank(shuffle_condition(w)),
        "dim_grt": len(basis),
        "basis": [str(e) for e in basis],
        "class_test": None,
    }
    if basis:
        t = cohomology_class_test(basis[0], 4)
        report["class_test"] = {"cocycle": t["cocycle"],
                                "coboundary": t["coboundary"]}
    return report
