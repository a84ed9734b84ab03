"""Classical groups, their Lie algebras, and the (MVW-extended) action on g x E.

Conventions
-----------
Points are ``(X, u)`` or, for GL, ``(X, u, v)`` with ``u`` a column and ``v`` a
row, both stored as tuples.

An MVW element ``(g, delta)`` of a form-preserving group satisfies
``g^t B g = B`` when ``delta = 1`` and ``g^t B g = B^t`` when ``delta = -1``; it
acts by ``(delta g X g^-1, delta g u)``. For Sp this is the same action as the
table ``(g', -1).X = -g' I_{n,n} X I_{n,n} g'^-1`` with ``g = g' I_{n,n}``. For GL
any invertible ``g`` is allowed and ``(g, -1)`` sends ``(X, u, v)`` to
``(g X^t g^-1, -g v^t, -u^t g^-1)``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import lru_cache
from fractions import Fraction
from typing import Sequence

from .linalg import Mat, inverse, kernel_basis, mat_rank, vec_dot
from .scalar import ONE, ZERO, as_scalar

KINDS = ("gl", "sp", "oodd", "oeven", "gram")


class MembershipError(ValueError):
    """An element or point does not belong where it was used."""


@dataclass(frozen=True)
class GroupDescriptor:
    """Which classical group acts. ``gram`` carries an explicit Gram matrix."""

    kind: str
    rank: int = 0
    gram: Mat | None = field(default=None, compare=True)

    def __post_init__(self):
        kind = self.kind.lower()
        object.__setattr__(self, "kind", kind)
        if kind not in KINDS:
            raise ValueError(f"unknown group kind {self.kind!r}")
        if kind == "gram":
            B = self.gram
            if B is None or not B.is_square():
                raise ValueError("gram descriptor needs a square Gram matrix")
            if B.T != B and B.T != -B:
                raise ValueError("Gram matrix must be symmetric or antisymmetric")
            if B.rows and mat_rank(B) != B.rows:
                raise ValueError("Gram matrix must be invertible")
            object.__setattr__(self, "rank", B.rows)
        elif self.rank < 0:
            raise ValueError("rank must be non-negative")

    @classmethod
    def from_gram(cls, B: Mat) -> GroupDescriptor:
        return cls("gram", B.rows, B)

    @property
    def size(self) -> int:
        """Matrix size m of the natural module."""
        if self.kind in ("gl",):
            return self.rank
        if self.kind in ("sp", "oeven"):
            return 2 * self.rank
        if self.kind == "oodd":
            return 2 * self.rank + 1
        return self.gram.rows

    @property
    def symmetric(self) -> bool | None:
        """True for orthogonal forms, False for symplectic ones, None for GL."""
        if self.kind == "gl":
            return None
        if self.kind == "sp":
            return False
        if self.kind in ("oodd", "oeven"):
            return True
        B = self.gram
        return B.rows == 0 or B.T == B

    @property
    def dim(self) -> int:
        m = self.size
        if self.kind == "gl":
            return m * m
        if self.symmetric:
            return m * (m - 1) // 2
        return m * (m + 1) // 2

    @property
    def module_dim(self) -> int:
        """dim E: 2n for GL (column plus row), m otherwise."""
        return 2 * self.size if self.kind == "gl" else self.size

    def form(self) -> Mat:
        return standard_form(self)

    def label(self) -> str:
        if self.kind == "gram":
            return f"G({'sym' if self.symmetric else 'alt'},{self.size})"
        return {"gl": "GL_{}", "sp": "Sp_{}", "oodd": "O_{}", "oeven": "O_{}"}[self.kind].format(
            self.size)


@dataclass(frozen=True)
class EnhancedPoint:
    group: GroupDescriptor
    X: Mat
    u: tuple
    v: tuple | None = None

    def __post_init__(self):
        m = self.group.size
        object.__setattr__(self, "u", tuple(as_scalar(x) for x in self.u))
        if self.v is not None:
            object.__setattr__(self, "v", tuple(as_scalar(x) for x in self.v))
        if self.X.shape != (m, m):
            raise ValueError(f"X must be {m}x{m}, got {self.X.shape}")
        if len(self.u) != m:
            raise ValueError(f"u must have length {m}")
        if self.group.kind == "gl":
            if self.v is None or len(self.v) != m:
                raise ValueError(f"GL points need a row vector v of length {m}")
        elif self.v is not None:
            raise ValueError("only GL points carry a row vector v")

    @classmethod
    def zero(cls, group: GroupDescriptor) -> EnhancedPoint:
        m = group.size
        return cls(group, Mat.zeros(m), (ZERO,) * m, (ZERO,) * m if group.kind == "gl" else None)

    def is_zero(self) -> bool:
        return self.X.is_zero() and not any(self.u) and not any(self.v or ())


@dataclass(frozen=True)
class MvwElement:
    g: Mat
    delta: int = 1

    def __post_init__(self):
        if self.delta not in (1, -1):
            raise ValueError("delta must be +1 or -1")


# ----------------------------------------------------------------- forms

def _alpha(m: int) -> Mat:
    if m % 2 == 0:
        h = m // 2
        return Mat._wrap([[ONE if (j == i + h or i == j + h) else ZERO for j in range(m)] for i in range(m)], m)
    h = (m - 1) // 2
    rows = []
    for i in range(m):
        row = []
        for j in range(m):
            if i == 0 or j == 0:
                row.append(ONE if i == j == 0 else ZERO)
            else:
                row.append(ONE if (j - 1 == i - 1 + h or i - 1 == j - 1 + h) else ZERO)
        rows.append(row)
    return Mat._wrap(rows, m)


def _beta(n: int) -> Mat:
    m = 2 * n
    rows = []
    for i in range(m):
        row = []
        for j in range(m):
            if j == i + n:
                row.append(ONE)
            elif i == j + n:
                row.append(-ONE)
            else:
                row.append(ZERO)
        rows.append(row)
    return Mat._wrap(rows, m)


def i_nn(n: int) -> Mat:
    """I_{n,n} = diag(I_n, -I_n)."""
    return Mat.diag([1] * n + [-1] * n)


def standard_form(group: GroupDescriptor) -> Mat:
    """The Gram matrix B of the invariant form: alpha_m, beta_2n or the stored one."""
    if group.kind == "gl":
        raise ValueError("GL has no invariant bilinear form")
    if group.kind == "sp":
        return _beta(group.rank)
    if group.kind in ("oodd", "oeven"):
        return _alpha(group.size)
    return group.gram


def form_pairing(group: GroupDescriptor, a: Sequence, b: Sequence):
    """<a, b>_E = a^t B b."""
    B = standard_form(group)
    m = B.rows
    if len(a) != m or len(b) != m:
        raise ValueError("vector length does not match the form")
    Bb = [vec_dot(B.row_tuple(i), b) for i in range(m)]
    return vec_dot(a, Bb)


def _check_size(X: Mat, group: GroupDescriptor):
    m = group.size
    if X.shape != (m, m):
        raise ValueError(f"expected a {m}x{m} matrix, got {X.shape}")


def in_lie_algebra(X: Mat, group: GroupDescriptor) -> bool:
    _check_size(X, group)
    if group.kind == "gl":
        return True
    B = standard_form(group)
    return (X.T @ B + B @ X).is_zero()


def in_group(e: MvwElement, group: GroupDescriptor) -> bool:
    _check_size(e.g, group)
    if group.kind == "gl":
        return e.g.rows == 0 or mat_rank(e.g) == e.g.rows
    B = standard_form(group)
    target = B if e.delta == 1 else B.T
    return e.g.T @ B @ e.g == target


# ---------------------------------------------------------------- action

def _matvec(M: Mat, x: Sequence) -> tuple:
    return tuple(vec_dot(M.row_tuple(i), x) for i in range(M.rows))


def _vecmat(x: Sequence, M: Mat) -> tuple:
    return tuple(vec_dot(x, M.col_tuple(j)) for j in range(M.cols))


def act(e: MvwElement, p: EnhancedPoint, *, check: bool = True) -> EnhancedPoint:
    """Apply ``(g, delta)`` to a point."""
    group = p.group
    if check and not in_group(e, group):
        raise MembershipError("element is not in the MVW extension of the group")
    g = e.g
    ginv = inverse(g) if g.rows else g
    if group.kind == "gl":
        if e.delta == 1:
            return EnhancedPoint(group, g @ p.X @ ginv, _matvec(g, p.u), _vecmat(p.v, ginv))
        u = tuple(-x for x in _matvec(g, p.v))
        v = tuple(-x for x in _vecmat(p.u, ginv))
        return EnhancedPoint(group, g @ p.X.T @ ginv, u, v)
    X = g @ p.X @ ginv
    u = _matvec(g, p.u)
    if e.delta == -1:
        X = -X
        u = tuple(-x for x in u)
    return EnhancedPoint(group, X, u)


def compose(group: GroupDescriptor, e1: MvwElement, e2: MvwElement) -> MvwElement:
    """The product ``e1 * e2``: acting by it equals acting by e2, then e1."""
    if group.kind == "gl" and e1.delta == -1:
        g2 = inverse(e2.g).T if e2.g.rows else e2.g
        return MvwElement(e1.g @ g2, -e2.delta)
    return MvwElement(e1.g @ e2.g, e1.delta * e2.delta)


def identity_element(group: GroupDescriptor) -> MvwElement:
    return MvwElement(Mat.identity(group.size), 1)


def twisting_element(group: GroupDescriptor) -> MvwElement:
    """A fixed element of the non-identity component of the MVW extension."""
    m = group.size
    if group.kind in ("gl", "oodd", "oeven"):
        return MvwElement(Mat.identity(m), -1)
    if group.kind == "sp":
        return MvwElement(i_nn(group.rank), -1)
    if group.symmetric:
        return MvwElement(Mat.identity(m), -1)
    P = symplectic_basis(group.gram)
    n = m // 2
    return MvwElement(P @ i_nn(n) @ inverse(P), -1)


def symplectic_basis(B: Mat) -> Mat:
    """P with ``P^t B P = beta_{2n}`` for an invertible antisymmetric B (over Q)."""
    m = B.rows
    n = m // 2
    vecs = [tuple(ONE if i == j else ZERO for i in range(m)) for j in range(m)]

    def pair(a, b):
        return vec_dot(a, _matvec(B, b))

    es, fs = [], []
    pool = list(vecs)
    while pool:
        e = pool.pop(0)
        idx = next((i for i, w in enumerate(pool) if pair(e, w)), None)
        if idx is None:
            if not any(e):
                continue
            raise ValueError("Gram matrix is degenerate")
        f = pool.pop(idx)
        c = pair(e, f)
        f = tuple(x / c for x in f)
        es.append(e)
        fs.append(f)
        new_pool = []
        for w in pool:
            # w - <w,f> e + <w,e> f is orthogonal to e and f
            a, b = pair(w, f), pair(w, e)
            w2 = tuple(wi - a * ei + b * fi for wi, ei, fi in zip(w, e, f))
            if any(w2):
                new_pool.append(w2)
        pool = new_pool
    if len(es) != n:
        raise ValueError("Gram matrix is degenerate")
    return Mat.from_columns(es + fs)


# ---------------------------------------------------------- Lie algebras

@lru_cache(maxsize=256)
def lie_algebra_basis(group: GroupDescriptor) -> tuple[Mat, ...]:
    """An exact basis of g: unit matrices for GL, ``B^-1 S`` otherwise."""
    m = group.size
    if group.kind == "gl":
        return tuple(Mat._wrap([[ONE if (r, c) == (i, j) else ZERO for c in range(m)] for r in range(m)], m)
                     for i in range(m) for j in range(m))
    Binv = inverse(standard_form(group)) if m else Mat.zeros(0)
    sym = group.symmetric
    basis = []
    for i in range(m):
        for j in range(i if not sym else i + 1, m):
            S = [[ZERO] * m for _ in range(m)]
            S[i][j] = ONE
            S[j][i] = -ONE if sym else ONE
            basis.append(Binv @ Mat._wrap(S, m))
    return tuple(basis)


def project_to_lie_algebra(R: Mat, group: GroupDescriptor) -> Mat:
    """``R - B^-1 R^t B``, which lies in g for any square R."""
    if group.kind == "gl":
        return R
    B = standard_form(group)
    return R - inverse(B) @ R.T @ B


def cayley(A: Mat, group: GroupDescriptor) -> Mat:
    """``(I - A)(I + A)^-1``: an element of G whenever A is in g."""
    _check_size(A, group)
    if not in_lie_algebra(A, group):
        raise MembershipError("Cayley transform needs A in the Lie algebra")
    eye = Mat.identity(A.rows)
    try:
        g = (eye - A) @ inverse(eye + A)
    except ZeroDivisionError:
        raise ZeroDivisionError("I + A is singular") from None
    if group.kind == "gl" and g.rows and mat_rank(g) != g.rows:
        raise ZeroDivisionError("I - A is singular, Cayley image not invertible")
    return g


_POOL = [Fraction(a, b) for b in (1, 2) for a in range(-3, 4)]


def _random_matrix(rng: random.Random, rows: int, cols: int) -> Mat:
    return Mat._wrap([[rng.choice(_POOL) for _ in range(cols)] for _ in range(rows)], cols)


def random_lie_element(group: GroupDescriptor, rng: random.Random) -> Mat:
    m = group.size
    return project_to_lie_algebra(_random_matrix(rng, m, m), group)


def random_point(group: GroupDescriptor, rng: random.Random) -> EnhancedPoint:
    m = group.size
    X = random_lie_element(group, rng)
    u = tuple(rng.choice(_POOL) for _ in range(m))
    v = tuple(rng.choice(_POOL) for _ in range(m)) if group.kind == "gl" else None
    return EnhancedPoint(group, X, u, v)


def random_group_element(group: GroupDescriptor, rng: random.Random) -> MvwElement:
    while True:
        A = random_lie_element(group, rng)
        try:
            return MvwElement(cayley(A, group), 1)
        except ZeroDivisionError:
            continue


def sample(group: GroupDescriptor, seed: int) -> tuple[MvwElement, EnhancedPoint]:
    """Deterministic ``(group element, point)`` pair drawn from a small rational pool."""
    rng = random.Random(seed)
    e = random_group_element(group, rng)
    return e, random_point(group, rng)


# ------------------------------------------------------ stabilizers, spans

def cyclic_span(X: Mat, u: Sequence) -> tuple[Mat, int]:
    """Columns ``u, Xu, ..., X^(m-1) u`` and the dimension of their span."""
    m = X.rows
    cols = []
    w = tuple(u)
    for _ in range(m):
        cols.append(w)
        w = _matvec(X, w)
    K = Mat.from_columns(cols, m) if cols else Mat.zeros(m, 0)
    return K, mat_rank(K)


def cyclic_basis(X: Mat, u: Sequence) -> list[tuple]:
    """A basis ``u, Xu, ..., X^(d-1) u`` of the cyclic span (d = its dimension)."""
    out: list[tuple] = []
    w = tuple(u)
    for _ in range(X.rows):
        if mat_rank(Mat.from_columns(out + [w])) <= len(out):
            break
        out.append(w)
        w = _matvec(X, w)
    return out


def _stabilizer_system(p: EnhancedPoint) -> tuple[tuple[Mat, ...], Mat | None]:
    """Columns are the images of the Lie basis under Z -> ([Z, X], Z u[, v Z])."""
    basis = lie_algebra_basis(p.group)
    if not basis:
        return basis, None
    m = p.group.size
    X = p.X._data
    Xcols = list(zip(*X))
    columns = []
    for Z in basis:
        # basis elements have one or two nonzero entries, so work sparsely
        nz = [(i, j, z) for i, row in enumerate(Z._data) for j, z in enumerate(row) if z]
        C = [[ZERO] * m for _ in range(m)]
        zu = [ZERO] * m
        vz = [ZERO] * m
        for i, j, z in nz:
            Crow = C[i]
            for c, x in enumerate(X[j]):
                if x:
                    Crow[c] = Crow[c] + z * x
            for r, x in enumerate(Xcols[i]):
                if x:
                    C[r][j] = C[r][j] - x * z
            if p.u[j]:
                zu[i] = zu[i] + z * p.u[j]
            if p.v is not None and p.v[i]:
                vz[j] = vz[j] + p.v[i] * z
        img = [x for row in C for x in row] + zu
        if p.v is not None:
            img += vz
        columns.append(img)
    return basis, Mat.from_columns(columns)


def stabilizer_algebra(p: EnhancedPoint) -> list[Mat]:
    """Basis of ``{Z in g : [Z, X] = 0, Z u = 0, v Z = 0}``."""
    basis, L = _stabilizer_system(p)
    out = []
    for c in kernel_basis(L) if L is not None else []:
        Z = Mat.zeros(p.group.size)
        for coef, B in zip(c, basis):
            if coef:
                Z = Z + B.scale(coef)
        out.append(Z)
    return out


def lie_stabilizer_dim(p: EnhancedPoint) -> int:
    """dim g_x, computed as one exact kernel dimension (equals dim G_x in char 0)."""
    basis, L = _stabilizer_system(p)
    return len(basis) - mat_rank(L) if L is not None else 0


def orbit_dim(p: EnhancedPoint) -> int:
    return p.group.dim - lie_stabilizer_dim(p)


def restricted_gram(group: GroupDescriptor, basis: Sequence[Sequence]) -> Mat:
    """Gram matrix of the form restricted to span(basis): ``P^t B P``."""
    if not basis:
        return Mat.zeros(0)
    P = Mat.from_columns(basis)
    return P.T @ standard_form(group) @ P


def matvec(M: Mat, x: Sequence) -> tuple:
    return _matvec(M, x)


def vecmat(x: Sequence, M: Mat) -> tuple:
    return _vecmat(x, M)


__all__ = [
    "GroupDescriptor", "EnhancedPoint", "MvwElement", "MembershipError",
    "standard_form", "form_pairing", "in_lie_algebra", "in_group", "act", "compose",
    "identity_element", "twisting_element", "symplectic_basis", "lie_algebra_basis",
    "project_to_lie_algebra", "cayley", "sample", "random_point", "random_group_element",
    "cyclic_span", "cyclic_basis", "stabilizer_algebra", "lie_stabilizer_dim", "orbit_dim",
    "restricted_gram", "matvec", "vecmat", "i_nn",
]
