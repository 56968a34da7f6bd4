"""Exact sparse linear algebra over the rationals.

Everything downstream (basis extraction, chain complexes, condition systems)
reduces to three primitives implemented here: an immutable sparse matrix, a
deterministic reduced-echelon kernel computation, and an incremental integer
row echelon used for the large relation-ideal eliminations.  Arithmetic is
gmpy2.mpq when available, fractions.Fraction otherwise; both are exact and
serialize identically, so results do not depend on the backend.
"""

from math import gcd

try:
    from gmpy2 import mpq as _mpq

    def rat(p=0, q=1):
        return _mpq(p, q)
except ImportError:  # pure-stdlib fallback, ~10x slower on big eliminations
    from fractions import Fraction as _mpq

    def rat(p=0, q=1):
        return _mpq(p, q)


_ZERO = rat(0)
_ONE = rat(1)


def rat_str(x):
    """Serialize a rational as 'p' or 'p/q' with q > 0."""
    x = rat(x)
    n, d = x.numerator, x.denominator
    return "%d" % n if d == 1 else "%d/%d" % (n, d)


def parse_rational(s):
    s = s.strip()
    if "/" in s:
        p, q = s.split("/")
        return rat(int(p), int(q))
    return rat(int(s))


class SparseMatrix:
    """Immutable sparse matrix; entries is a dict {(row, col): nonzero rational}.

    Rows and columns are 0-indexed.  Construction drops explicit zeros; the
    entry dict should not be mutated afterwards.
    """

    __slots__ = ("nrows", "ncols", "entries")

    def __init__(self, nrows, ncols, entries):
        self.nrows = nrows
        self.ncols = ncols
        clean = {}
        for (r, c), v in entries.items():
            if not (0 <= r < nrows and 0 <= c < ncols):
                raise ValueError("entry (%s,%s) outside %sx%s" % (r, c, nrows, ncols))
            v = rat(v)
            if v:
                clean[(r, c)] = v
        self.entries = clean

    @classmethod
    def from_rows(cls, rows, ncols):
        """rows: iterable of dicts {col: value}."""
        rows = list(rows)
        entries = {}
        for r, row in enumerate(rows):
            for c, v in row.items():
                entries[(r, c)] = v
        return cls(len(rows), ncols, entries)

    def rows(self):
        out = [dict() for _ in range(self.nrows)]
        for (r, c), v in self.entries.items():
            out[r][c] = v
        return out

    def transpose(self):
        return SparseMatrix(self.ncols, self.nrows,
                            {(c, r): v for (r, c), v in self.entries.items()})

    def apply(self, vec):
        """Matrix times a sparse vector {col: value} -> {row: value}."""
        out = {}
        for (r, c), v in self.entries.items():
            x = vec.get(c)
            if x:
                y = out.get(r, _ZERO) + v * x
                if y:
                    out[r] = y
                else:
                    del out[r]
        return out

    def __eq__(self, other):
        return (isinstance(other, SparseMatrix) and self.nrows == other.nrows
                and self.ncols == other.ncols and self.entries == other.entries)

    def __repr__(self):
        return "SparseMatrix(%dx%d, %d entries)" % (self.nrows, self.ncols,
                                                    len(self.entries))


def _rref(rows, ncols):
    """Reduced row echelon form of dict-rows, scanning columns in ascending
    order and picking the first row with a nonzero entry.  Returns
    (reduced rows, pivot dict {col: row index into returned list})."""
    work = [dict(r) for r in rows if r]
    out = []
    pivots = {}
    for col in range(ncols):
        hit = None
        for i, row in enumerate(work):
            if row.get(col):
                hit = i
                break
        if hit is None:
            continue
        row = work.pop(hit)
        inv = _ONE / row[col]
        row = {c: v * inv for c, v in row.items()}
        for other in (out, work):
            for j, r2 in enumerate(other):
                f = r2.get(col)
                if f:
                    nr = dict(r2)
                    for c, v in row.items():
                        nv = nr.get(c, _ZERO) - f * v
                        if nv:
                            nr[c] = nv
                        else:
                            nr.pop(c, None)
                    other[j] = nr
        pivots[col] = len(out)
        out.append(row)
        work = [r for r in work if r]
    return out, pivots


def kernel_basis(m):
    """Basis of the right kernel of a SparseMatrix, as sparse dict-vectors.

    Deterministic: reduced echelon with pivots chosen as the first nonzero
    entry in ascending column order; one kernel vector per free column, free
    columns in increasing index order, each normalized with coefficient 1 at
    its free column.
    """
    reduced, pivots = _rref(m.rows(), m.ncols)
    basis = []
    for col in range(m.ncols):
        if col in pivots:
            continue
        vec = {col: _ONE}
        for pcol, ridx in pivots.items():
            v = reduced[ridx].get(col)
            if v:
                vec[pcol] = -v
        basis.append(vec)
    return basis


def rank(m):
    """Rank, via fraction-free integer elimination."""
    ech = Echelon()
    for row in m.rows():
        ech.insert(row)
    return ech.rank


class Echelon:
    """Incremental integer row echelon over ordered column keys.

    insert() sifts a vector against existing pivot rows fraction-freely
    (gcd-normalized integers, so coefficients stay small) and registers it
    under its leading surviving column; the pivot column set depends only on
    the span and the column order, not on insertion order.  reduce() returns
    canonical quotient coordinates: the unique representative of the
    vector's class supported on non-pivot columns.  It is linear, which
    insert's partial sift is not; projections must use reduce.
    """

    __slots__ = ("rows",)

    def __init__(self):
        self.rows = {}

    @property
    def rank(self):
        return len(self.rows)

    @property
    def pivot_columns(self):
        return set(self.rows)

    def insert(self, vec):
        """Add a vector (dict {col: int or rational}); True if rank grew."""
        vec = _to_int_vec(vec)
        rows = self.rows
        while vec:
            p = min(vec)
            row = rows.get(p)
            if row is None:
                g = 0
                for v in vec.values():
                    g = gcd(g, v)
                    if g == 1:
                        break
                if vec[p] < 0:
                    g = -g
                rows[p] = {c: v // g for c, v in vec.items()} if g != 1 else vec
                return True
            a, b = vec[p], row[p]
            g = gcd(a, b)
            ma, mb = a // g, b // g
            nxt = {}
            for c in vec.keys() | row.keys():
                v = mb * vec.get(c, 0) - ma * row.get(c, 0)
                if v:
                    nxt[c] = v
            # keep coefficients small across long sifts
            g = 0
            for v in nxt.values():
                g = gcd(g, v)
                if g == 1:
                    break
            if g > 1:
                nxt = {c: v // g for c, v in nxt.items()}
            vec = nxt
        return False

    def reduce(self, vec):
        """Canonical residue of vec modulo the row span (rational values)."""
        out = {}
        for c, v in vec.items():
            v = rat(v)
            if v:
                out[c] = v
        rows = self.rows
        while True:
            pcols = [c for c in out if c in rows]
            if not pcols:
                return out
            p = min(pcols)
            row = rows[p]
            f = out[p] / row[p]
            for c, v in row.items():
                nv = out.get(c, _ZERO) - f * v
                if nv:
                    out[c] = nv
                else:
                    out.pop(c, None)

    def contains(self, vec):
        return not self.reduce(vec)


class TrackingEchelon:
    """Echelon of tagged vectors that can express any reduced vector as a
    combination of the inserted ones.  Used for explicit coboundary
    witnesses: if reduce_with_combination(x) has zero residue, the returned
    combination {tag: coeff} satisfies  sum coeff * inserted[tag] = x.
    """

    __slots__ = ("rows", "hist")

    def __init__(self):
        self.rows = {}
        self.hist = {}

    @property
    def rank(self):
        return len(self.rows)

    def insert(self, vec, tag):
        out = {c: rat(v) for c, v in vec.items() if rat(v)}
        h = {tag: _ONE}
        rows, hist = self.rows, self.hist
        while True:
            pcols = [c for c in out if c in rows]
            if not pcols:
                break
            p = min(pcols)
            f = out[p] / rows[p][p]
            for c, v in rows[p].items():
                nv = out.get(c, _ZERO) - f * v
                if nv:
                    out[c] = nv
                else:
                    out.pop(c, None)
            for t, v in hist[p].items():
                nv = h.get(t, _ZERO) - f * v
                if nv:
                    h[t] = nv
                else:
                    h.pop(t, None)
        if not out:
            return False
        p = min(out)
        rows[p] = out
        hist[p] = h
        return True

    def reduce_with_combination(self, vec):
        out = {c: rat(v) for c, v in vec.items() if rat(v)}
        comb = {}
        rows, hist = self.rows, self.hist
        while True:
            pcols = [c for c in out if c in rows]
            if not pcols:
                return out, comb
            p = min(pcols)
            f = out[p] / rows[p][p]
            for c, v in rows[p].items():
                nv = out.get(c, _ZERO) - f * v
                if nv:
                    out[c] = nv
                else:
                    out.pop(c, None)
            for t, v in hist[p].items():
                nv = comb.get(t, _ZERO) + f * v
                if nv:
                    comb[t] = nv
                else:
                    comb.pop(t, None)


def _to_int_vec(vec):
    """Clear denominators; returns a dict of ints."""
    ints = {}
    mult = 1
    for c, v in vec.items():
        if isinstance(v, int):
            if v:
                ints[c] = v
            continue
        v = rat(v)
        if v:
            ints[c] = v
            d = v.denominator
            mult = mult * d // gcd(mult, d)
    if mult == 1:
        return {c: int(v) for c, v in ints.items()}
    return {c: int(v * mult) for c, v in ints.items()}
