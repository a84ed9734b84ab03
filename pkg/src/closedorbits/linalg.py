"""Dense exact matrices, polynomials and the kernels built on them.

Matrices hold ``Fraction`` or :class:`~closedorbits.scalar.Quad` entries (or
:class:`Dual` numbers during jet evaluation). Rank and kernel use fraction-free
(Bareiss) elimination; the characteristic polynomial uses the Faddeev-LeVerrier
recurrence. Everything here is valid over any field of characteristic 0, so
nothing needs eigenvalues except :func:`rational_roots`.
"""

from __future__ import annotations

from fractions import Fraction
from functools import reduce
from math import lcm
from typing import Callable, Iterable, Sequence

from .scalar import ONE, ZERO, as_scalar, extension_of


class Mat:
    """Immutable dense matrix, stored row-major as a tuple of row tuples."""

    __slots__ = ("rows", "cols", "_data", "_hash")

    def __init__(self, data: Iterable[Iterable], cols: int | None = None, *, _trusted=False):
        if _trusted:
            rows_t = data
        else:
            rows_t = tuple(tuple(as_scalar(x) if not isinstance(x, Dual) else x for x in r) for r in data)
        self._data = rows_t
        self.rows = len(rows_t)
        if self.rows:
            self.cols = len(rows_t[0])
            if any(len(r) != self.cols for r in rows_t):
                raise ValueError("ragged matrix rows")
        else:
            self.cols = cols or 0
        self._hash = None

    @classmethod
    def _wrap(cls, rows, cols=None):
        return cls(tuple(tuple(r) for r in rows), cols, _trusted=True)

    # construction --------------------------------------------------------
    @classmethod
    def zeros(cls, rows: int, cols: int | None = None) -> Mat:
        cols = rows if cols is None else cols
        return cls._wrap([[ZERO] * cols for _ in range(rows)], cols)

    @classmethod
    def identity(cls, n: int) -> Mat:
        return cls._wrap([[ONE if i == j else ZERO for j in range(n)] for i in range(n)], n)

    @classmethod
    def diag(cls, values: Sequence) -> Mat:
        vals = [as_scalar(v) for v in values]
        n = len(vals)
        return cls._wrap([[vals[i] if i == j else ZERO for j in range(n)] for i in range(n)], n)

    @classmethod
    def column(cls, values: Sequence) -> Mat:
        return cls([[v] for v in values], 1)

    @classmethod
    def row(cls, values: Sequence) -> Mat:
        vals = list(values)
        return cls([vals], len(vals))

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], nrows: int | None = None) -> Mat:
        if not columns:
            return cls.zeros(nrows or 0, 0)
        cols = [list(c) for c in columns]
        n = len(cols[0])
        return cls([[c[i] for c in cols] for i in range(n)], len(cols))

    # access -------------------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def __getitem__(self, ij):
        i, j = ij
        return self._data[i][j]

    def tolist(self) -> list[list]:
        return [list(r) for r in self._data]

    def row_tuple(self, i: int) -> tuple:
        return self._data[i]

    def col_tuple(self, j: int) -> tuple:
        return tuple(r[j] for r in self._data)

    def entries(self) -> list:
        return [x for r in self._data for x in r]

    def is_square(self) -> bool:
        return self.rows == self.cols

    def is_zero(self) -> bool:
        return all(not x for r in self._data for x in r)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> Mat:
        return Mat._wrap([[self._data[i][j] for j in cols] for i in rows], len(cols))

    # arithmetic ---------------------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, Mat):
            return NotImplemented
        return self.shape == other.shape and self._data == other._data

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.rows, self.cols, self._data))
        return self._hash

    def _check_same(self, other: Mat):
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")

    def __add__(self, other: Mat) -> Mat:
        self._check_same(other)
        return Mat._wrap([[a + b for a, b in zip(r, s)] for r, s in zip(self._data, other._data)], self.cols)

    def __sub__(self, other: Mat) -> Mat:
        self._check_same(other)
        return Mat._wrap([[a - b for a, b in zip(r, s)] for r, s in zip(self._data, other._data)], self.cols)

    def __neg__(self) -> Mat:
        return Mat._wrap([[-a for a in r] for r in self._data], self.cols)

    def scale(self, c) -> Mat:
        return Mat._wrap([[c * a for a in r] for r in self._data], self.cols)

    def __mul__(self, c):
        if isinstance(c, Mat):
            return self @ c
        return self.scale(c)

    def __rmul__(self, c):
        return self.scale(c)

    def __matmul__(self, other: Mat) -> Mat:
        if self.cols != other.rows:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        n = other.cols
        fast = _rational_matmul(self, other)
        if fast is not None:
            return fast
        # sparse view of the right factor: canonical points are mostly zeros
        onz = [[(j, b) for j, b in enumerate(row) if b] for row in other._data]
        out = []
        for r in self._data:
            acc = [ZERO] * n
            for a, nz in zip(r, onz):
                if nz and a:
                    for j, b in nz:
                        acc[j] = acc[j] + a * b
            out.append(acc)
        return Mat._wrap(out, n)

    @property
    def T(self) -> Mat:
        return Mat._wrap([[self._data[i][j] for i in range(self.rows)] for j in range(self.cols)], self.rows)

    def trace(self):
        acc = ZERO
        for i in range(min(self.rows, self.cols)):
            acc = acc + self._data[i][i]
        return acc

    def __pow__(self, e: int) -> Mat:
        if not self.is_square():
            raise ValueError("power of a non-square matrix")
        if e < 0:
            return inverse(self) ** (-e)
        result = Mat.identity(self.rows)
        base = self
        while e:
            if e & 1:
                result = result @ base
            base = base @ base
            e >>= 1
        return result

    def powers(self, count: int) -> list[Mat]:
        """``[I, M, M^2, ..., M^(count-1)]`` by iterated multiplication."""
        out = [Mat.identity(self.rows)]
        for _ in range(1, count):
            out.append(out[-1] @ self)
        return out[:count]

    def commutator(self, other: Mat) -> Mat:
        return self @ other - other @ self

    def __repr__(self):
        body = "; ".join(", ".join(str(x) for x in r) for r in self._data)
        return f"Mat({self.rows}x{self.cols}: [{body}])"


def _common_denominator(M: Mat) -> int | None:
    den = 1
    for r in M._data:
        for x in r:
            if type(x) is not Fraction:
                return None
            den = lcm(den, x.denominator)
    return den


def _rational_matmul(A: Mat, B: Mat) -> Mat | None:
    """Product over Q done in integers after clearing denominators."""
    da = _common_denominator(A)
    db = _common_denominator(B) if da is not None else None
    if db is None:
        return None
    ia = [[(x * da).numerator for x in r] for r in A._data]
    bcols = [[(x * db).numerator for x in c] for c in zip(*B._data)] if B.rows else [[] for _ in range(B.cols)]
    den = da * db
    out = [[Fraction(sum(a * b for a, b in zip(r, c) if a), den) for c in bcols] for r in ia]
    return Mat._wrap(out, B.cols)


def vec_dot(a: Sequence, b: Sequence):
    acc = ZERO
    for x, y in zip(a, b):
        if x and y:
            acc = acc + x * y
    return acc


# ---------------------------------------------------------------- builders

def jordan_block(k: int) -> Mat:
    """The nilpotent Jordan block J_k (ones on the superdiagonal); J_0 is empty."""
    if k < 0:
        raise IndexError("Jordan block size must be non-negative")
    return Mat._wrap([[ONE if j == i + 1 else ZERO for j in range(k)] for i in range(k)], k)


def unit_matrix(i: int, j: int, n: int, m: int | None = None) -> Mat:
    """e_{i,j}(n): 1 at (i, j) (1-based), zero elsewhere."""
    m = n if m is None else m
    if not (1 <= i <= n and 1 <= j <= m):
        raise IndexError(f"unit matrix index ({i},{j}) out of range for {n}x{m}")
    return Mat._wrap([[ONE if (r == i - 1 and c == j - 1) else ZERO for c in range(m)] for r in range(n)], m)


def block_diag(*blocks: Mat) -> Mat:
    n = sum(b.rows for b in blocks)
    m = sum(b.cols for b in blocks)
    out = [[ZERO] * m for _ in range(n)]
    r0 = c0 = 0
    for b in blocks:
        for i in range(b.rows):
            for j in range(b.cols):
                out[r0 + i][c0 + j] = b[i, j]
        r0 += b.rows
        c0 += b.cols
    return Mat._wrap(out, m)


def assemble(grid: Sequence[Sequence[Mat | None]], row_sizes: Sequence[int], col_sizes: Sequence[int]) -> Mat:
    """Bordered block assembly; ``None`` cells are zero blocks of the stated size."""
    out = [[ZERO] * sum(col_sizes) for _ in range(sum(row_sizes))]
    r0 = 0
    for bi, rs in enumerate(row_sizes):
        c0 = 0
        for bj, cs in enumerate(col_sizes):
            blk = grid[bi][bj]
            if blk is not None:
                if blk.shape != (rs, cs):
                    raise ValueError(f"block ({bi},{bj}) has shape {blk.shape}, expected {(rs, cs)}")
                for i in range(rs):
                    for j in range(cs):
                        out[r0 + i][c0 + j] = blk[i, j]
            c0 += cs
        r0 += rs
    return Mat._wrap(out, sum(col_sizes))


def standard_blocks(block: dict) -> Mat:
    """Build a standard matrix from a small descriptor dict.

    ``{"jordan": k}``, ``{"unit": (i, j, n)}``, ``{"identity": n}``,
    ``{"zero": (r, c)}``, ``{"diag": [blocks...]}`` or
    ``{"grid": [[...]], "rows": [...], "cols": [...]}``.
    """
    if "jordan" in block:
        return jordan_block(block["jordan"])
    if "unit" in block:
        return unit_matrix(*block["unit"])
    if "identity" in block:
        return Mat.identity(block["identity"])
    if "zero" in block:
        return Mat.zeros(*block["zero"])
    if "diag" in block:
        return block_diag(*[b if isinstance(b, Mat) else standard_blocks(b) for b in block["diag"]])
    if "grid" in block:
        grid = [[None if c is None else (c if isinstance(c, Mat) else standard_blocks(c)) for c in row]
                for row in block["grid"]]
        return assemble(grid, block["rows"], block["cols"])
    raise ValueError(f"unknown block descriptor {block!r}")


# ------------------------------------------------------------- elimination

def _integerize_rows(rows: list[list]) -> list[list] | None:
    """Scale each rational row to integers; None if any entry is not rational."""
    out = []
    for r in rows:
        dens = []
        for x in r:
            if not isinstance(x, Fraction):
                return None
            dens.append(x.denominator)
        m = reduce(lcm, dens, 1)
        out.append([x.numerator * (m // x.denominator) for x in r])
    return out


def echelon(M: Mat) -> tuple[list[list], list[int]]:
    """Fraction-free row echelon form.

    Returns the echelon rows (only the nonzero ones) and the pivot columns.
    Rational input is scaled to integers first so every Bareiss division is an
    exact integer division; other fields fall back to field division.
    """
    rows = [list(r) for r in M._data]
    ints = _integerize_rows(rows)
    exact_int = ints is not None
    if exact_int:
        rows = ints
    nrows, ncols = len(rows), M.cols
    pivots: list[int] = []
    prev = 1
    r = 0
    for c in range(ncols):
        if r >= nrows:
            break
        p = next((i for i in range(r, nrows) if rows[i][c]), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        piv = rows[r][c]
        for i in range(r + 1, nrows):
            a = rows[i][c]
            ri = rows[i]
            rr = rows[r]
            if exact_int:
                rows[i] = [(piv * ri[j] - a * rr[j]) // prev for j in range(ncols)]
            else:
                rows[i] = [(piv * ri[j] - a * rr[j]) / prev for j in range(ncols)]
        prev = piv
        pivots.append(c)
        r += 1
    return rows[:r], pivots


def mat_rank(M: Mat) -> int:
    if M.rows == 0 or M.cols == 0:
        return 0
    return len(echelon(M)[1])


def kernel_basis(M: Mat) -> list[tuple]:
    """Exact basis of the right kernel ``{x : M x = 0}`` as tuples."""
    ech, pivots = echelon(M)
    n = M.cols
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        x = [ZERO] * n
        x[f] = ONE
        for i in range(len(pivots) - 1, -1, -1):
            c = pivots[i]
            row = ech[i]
            acc = ZERO
            for j in range(c + 1, n):
                if row[j] and x[j]:
                    acc = acc + row[j] * x[j]
            x[c] = -acc / as_scalar(row[c])
        basis.append(tuple(as_scalar(v) for v in x))
    return basis


def solve(A: Mat, b: Sequence) -> tuple | None:
    """One exact solution of ``A x = b`` (None when inconsistent)."""
    aug = Mat._wrap([list(A.row_tuple(i)) + [as_scalar(b[i])] for i in range(A.rows)], A.cols + 1)
    ech, pivots = echelon(aug)
    if pivots and pivots[-1] == A.cols:
        return None
    n = A.cols
    x = [ZERO] * n
    for i in range(len(pivots) - 1, -1, -1):
        c = pivots[i]
        row = [as_scalar(v) for v in ech[i]]
        acc = row[n]
        for j in range(c + 1, n):
            if row[j] and x[j]:
                acc = acc - row[j] * x[j]
        x[c] = acc / row[c]
    return tuple(x)


def inverse(M: Mat) -> Mat:
    """Gauss-Jordan inverse; raises ZeroDivisionError if M is singular."""
    if not M.is_square():
        raise ValueError("inverse of non-square matrix")
    n = M.rows
    a = [list(r) + [ONE if i == j else ZERO for j in range(n)] for i, r in enumerate(M._data)]
    for c in range(n):
        p = next((i for i in range(c, n) if a[i][c]), None)
        if p is None:
            raise ZeroDivisionError("matrix is singular")
        a[c], a[p] = a[p], a[c]
        inv = ONE / a[c][c]
        a[c] = [x * inv for x in a[c]]
        for i in range(n):
            if i != c and a[i][c]:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return Mat._wrap([r[n:] for r in a], n)


def column_space_basis(vectors: Sequence[Sequence]) -> list[tuple]:
    """A maximal independent subset of ``vectors`` (in order)."""
    chosen: list[tuple] = []
    rank = 0
    for v in vectors:
        trial = Mat.from_columns(chosen + [tuple(v)])
        r = mat_rank(trial)
        if r > rank:
            chosen.append(tuple(as_scalar(x) for x in v))
            rank = r
    return chosen


# ------------------------------------------------------------ polynomials

class Poly:
    """Univariate polynomial with exact coefficients, lowest degree first."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable):
        c = [as_scalar(x) for x in coeffs]
        while c and not c[-1]:
            c.pop()
        self.coeffs = tuple(c)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def lead(self):
        return self.coeffs[-1] if self.coeffs else ZERO

    def __eq__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"Poly({[str(c) for c in self.coeffs]})"

    def __add__(self, other: Poly) -> Poly:
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (ZERO,) * (n - len(self.coeffs))
        b = other.coeffs + (ZERO,) * (n - len(other.coeffs))
        return Poly(x + y for x, y in zip(a, b))

    def __neg__(self) -> Poly:
        return Poly(-x for x in self.coeffs)

    def __sub__(self, other: Poly) -> Poly:
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, Poly):
            return Poly(other * x for x in self.coeffs)
        if self.is_zero() or other.is_zero():
            return Poly([])
        out = [ZERO] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return Poly(out)

    __rmul__ = __mul__

    def monic(self) -> Poly:
        if self.is_zero():
            return self
        lc = self.lead()
        return Poly(x / lc for x in self.coeffs)

    def derivative(self) -> Poly:
        return Poly(i * c for i, c in enumerate(self.coeffs) if i)

    def divmod(self, other: Poly) -> tuple[Poly, Poly]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        r = list(self.coeffs)
        q = [ZERO] * max(len(r) - len(other.coeffs) + 1, 0)
        lc = other.lead()
        dg = other.degree
        while len(r) - 1 >= dg and r:
            f = r[-1] / lc
            s = len(r) - 1 - dg
            q[s] = f
            for i, c in enumerate(other.coeffs):
                r[s + i] = r[s + i] - f * c
            r.pop()
            while r and not r[-1]:
                r.pop()
        return Poly(q), Poly(r)

    def __floordiv__(self, other: Poly) -> Poly:
        return self.divmod(other)[0]

    def __mod__(self, other: Poly) -> Poly:
        return self.divmod(other)[1]

    def __call__(self, x):
        acc = ZERO
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def eval_matrix(self, M: Mat) -> Mat:
        """Horner evaluation at a square matrix."""
        n = M.rows
        acc = Mat.zeros(n)
        eye = Mat.identity(n)
        for c in reversed(self.coeffs):
            acc = acc @ M + eye.scale(c)
        return acc


def poly_gcd(a: Poly, b: Poly) -> Poly:
    while not b.is_zero():
        a, b = b, a % b
    return a.monic()


def squarefree_part(p: Poly) -> Poly:
    """Product of the distinct irreducible factors of ``p`` (monic)."""
    if p.degree <= 0:
        return p.monic()
    g = poly_gcd(p, p.derivative())
    return (p // g).monic()


def char_poly(M: Mat) -> Poly:
    """Monic characteristic polynomial det(tI - M) via Faddeev-LeVerrier."""
    if not M.is_square():
        raise ValueError("characteristic polynomial needs a square matrix")
    n = M.rows
    coeffs = [ZERO] * (n + 1)
    coeffs[n] = ONE
    Mk = Mat.zeros(n)
    eye = Mat.identity(n)
    for k in range(1, n + 1):
        Mk = M @ Mk + eye.scale(coeffs[n - k + 1])
        coeffs[n - k] = -(M @ Mk).trace() / k
    return Poly(coeffs)


def rational_roots(p: Poly) -> list[Fraction]:
    """All distinct rational roots of a rational polynomial (rational root test)."""
    if p.is_zero():
        raise ValueError("zero polynomial has every root")
    coeffs = [Fraction(c) for c in p.coeffs]
    den = reduce(lcm, (c.denominator for c in coeffs), 1)
    ints = [int(c * den) for c in coeffs]
    roots = []
    if ints[0] == 0:
        roots.append(Fraction(0))
        while ints and ints[0] == 0:
            ints.pop(0)
    if len(ints) <= 1:
        return roots
    a0, an = abs(ints[0]), abs(ints[-1])
    for pnum in _divisors(a0):
        for q in _divisors(an):
            for s in (1, -1):
                cand = Fraction(s * pnum, q)
                if cand not in roots and Poly(ints)(cand) == 0:
                    roots.append(cand)
    return sorted(roots)


def _divisors(n: int) -> list[int]:
    n = abs(n)
    small, large = [], []
    i = 1
    while i * i <= n:
        if n % i == 0:
            small.append(i)
            if i * i != n:
                large.append(n // i)
        i += 1
    return small + large[::-1]


def jordan_chevalley(X: Mat) -> tuple[Mat, Mat]:
    """Jordan-Chevalley decomposition ``X = X_s + X_n`` over Q.

    Newton iteration ``S <- S - f(S) f'(S)^-1`` against the square-free part
    ``f`` of the characteristic polynomial. It converges in O(log multiplicity)
    steps and never leaves the rationals.
    """
    if not X.is_square():
        raise ValueError("Jordan-Chevalley needs a square matrix")
    if extension_of(*X.entries()) is not None:
        raise ValueError("Jordan-Chevalley is implemented for rational matrices only")
    n = X.rows
    if n == 0:
        return X, X
    f = squarefree_part(char_poly(X))
    df = f.derivative()
    S = X
    for _ in range(n + 2):
        fS = f.eval_matrix(S)
        if fS.is_zero():
            break
        S = S - fS @ inverse(df.eval_matrix(S))
    else:  # pragma: no cover - Newton always terminates in char 0
        raise RuntimeError("Newton iteration failed to converge")
    return S, X - S


def is_nilpotent(M: Mat) -> bool:
    return (M ** M.rows).is_zero() if M.rows else True


def minimal_poly_squarefree(M: Mat) -> bool:
    """True iff the minimal polynomial of M is square-free (M semisimple)."""
    f = squarefree_part(char_poly(M))
    return f.eval_matrix(M).is_zero()


# ------------------------------------------------------------------ jets

class Dual:
    """First-order jet ``a + b*eps`` with ``eps^2 = 0`` over exact scalars."""

    __slots__ = ("a", "b")

    def __init__(self, a, b=ZERO):
        self.a = a
        self.b = b

    @staticmethod
    def _parts(x):
        if isinstance(x, Dual):
            return x.a, x.b
        return x, ZERO

    def __add__(self, other):
        a, b = self._parts(other)
        return Dual(self.a + a, self.b + b)

    __radd__ = __add__

    def __sub__(self, other):
        a, b = self._parts(other)
        return Dual(self.a - a, self.b - b)

    def __rsub__(self, other):
        a, b = self._parts(other)
        return Dual(a - self.a, b - self.b)

    def __neg__(self):
        return Dual(-self.a, -self.b)

    def __mul__(self, other):
        a, b = self._parts(other)
        return Dual(self.a * a, self.a * b + self.b * a)

    __rmul__ = __mul__

    def __truediv__(self, other):
        a, b = self._parts(other)
        return Dual(self.a / a, (self.b * a - self.a * b) / (a * a))

    def __bool__(self):
        return bool(self.a) or bool(self.b)

    def __eq__(self, other):
        a, b = self._parts(other)
        return self.a == a and self.b == b

    def __hash__(self):
        return hash((self.a, self.b))

    def __repr__(self):
        return f"Dual({self.a}, {self.b})"


def _lift(M: Mat, D: Mat) -> Mat:
    M._check_same(D)
    return Mat._wrap([[Dual(a, b) for a, b in zip(r, s)] for r, s in zip(M._data, D._data)], M.cols)


def jet_eval(f: Callable[..., object], base: Sequence[Mat], direction: Sequence[Mat]):
    """Value and directional derivative of a polynomial map, exactly.

    ``f`` takes as many matrices as ``base`` has and returns a scalar or a
    sequence of scalars. Returns ``(f(base), Df(base)[direction])`` with the
    same structure.
    """
    lifted = [_lift(M, D) for M, D in zip(base, direction)]
    out = f(*lifted)
    if isinstance(out, (list, tuple)):
        return [Dual._parts(v)[0] for v in out], [Dual._parts(v)[1] for v in out]
    a, b = Dual._parts(out)
    return a, b
