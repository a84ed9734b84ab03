"""Canonical closed-orbit families and the semisimple/eigenspace pipeline.

Coordinates below are 0-based. With ``n`` the rank and ``k`` the jet order:

* GL:     X = J_k + 0, u = (y_1..y_k, 0..), v = e_1 (v = 0 when k = 0).
* SP:     X = [[J_k+0, e_kk], [0, -J_k^t+0]], u supported on 0..k-1 and n..n+k-1.
* OODD:   index 0 is the anisotropic line; X[0, n+k] = 1, X[k, 0] = -1, J_k on
          1..n and -J_k^t on n+1..2n; u supported on 0..k and n+1..n+k.
* OEVEN:  as SP but the corner block is e_{k-1,k} - e_{k,k-1} (absent for k <= 1).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from fractions import Fraction
from typing import Sequence

from .groups import (
    EnhancedPoint,
    GroupDescriptor,
    matvec,
    restricted_gram,
    standard_form,
)
from .invariants import InvariantVector, effective_kind, generator_indices, quotient_map
from .linalg import (
    Mat,
    Poly,
    block_diag,
    char_poly,
    inverse,
    jordan_chevalley,
    kernel_basis,
    rational_roots,
    squarefree_part,
)
from .scalar import ZERO, as_scalar, exact_sqrt, extension_of, format_scalar, parse_scalar


class UnsupportedInput(ValueError):
    """Input outside what exact rational machinery can handle."""

    code = "unsupported"


class NonSplitError(UnsupportedInput):
    code = "non_split"


class NotNilpotentFiber(UnsupportedInput):
    code = "not_nilpotent_fiber"


# ------------------------------------------------------------------ seeds

def leading_slot(kind: str, k: int) -> int:
    """Index in the seed coefficients of the coordinate that must be nonzero."""
    return {"gl": k - 1, "oodd": k + 1}.get(kind, k)


def seed_length(kind: str, k: int) -> int:
    if kind == "gl":
        return k
    if kind == "oodd":
        return 2 * k + 1
    return 2 * k


@dataclass(frozen=True)
class NilpotentSeed:
    """Parameters of one member of the nilpotent family.

    ``coeffs`` lists the free coordinates of u in order: GL ``y_1..y_k``; SP and
    OEVEN ``u_1..u_k, u_{n+1}..u_{n+k}``; OODD ``u_1..u_{k+1}, u_{n+2}..u_{n+k+1}``.
    """

    kind: str
    rank: int
    k: int
    coeffs: tuple = ()

    def __post_init__(self):
        kind = self.kind.lower()
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "coeffs", tuple(as_scalar(c) for c in self.coeffs))
        if kind not in ("gl", "sp", "oodd", "oeven"):
            raise ValueError(f"no nilpotent family for kind {kind!r}")
        if not 0 <= self.k <= self.rank:
            raise ValueError(f"jet order must satisfy 0 <= k <= n, got k={self.k}, n={self.rank}")
        if len(self.coeffs) != seed_length(kind, self.k):
            raise ValueError(f"{kind} seed with k={self.k} takes {seed_length(kind, self.k)} coefficients")
        if self.k == 0:
            return
        lead = self.leading
        if not lead:
            raise ValueError("leading coefficient must be nonzero")
        # with k = 1 the corner block vanishes and X = 0, so u must be anisotropic
        if kind == "oeven" and self.k == 1 and not self.coeffs[0]:
            raise ValueError("oeven seed with k=1 needs u_1 != 0")

    @property
    def leading(self):
        return self.coeffs[self.leading_slot()] if self.k else ZERO

    def leading_slot(self) -> int:
        return leading_slot(self.kind, self.k)

    @property
    def group(self) -> GroupDescriptor:
        return GroupDescriptor(self.kind, self.rank)

    def to_json(self) -> dict:
        return {"kind": self.kind, "rank": self.rank, "k": self.k,
                "coeffs": [format_scalar(c) for c in self.coeffs]}

    @classmethod
    def from_json(cls, obj: dict) -> NilpotentSeed:
        return cls(obj["kind"], int(obj["rank"]), int(obj["k"]),
                   tuple(parse_scalar(c) for c in obj.get("coeffs", ())))


@dataclass(frozen=True)
class ClosedSeed:
    """Zero block (absent for GL) plus eigenblocks ``(c_i, GL seed of rank n_i)``."""

    kind: str
    rank: int
    zero: NilpotentSeed | None = None
    blocks: tuple = ()

    def __post_init__(self):
        kind = self.kind.lower()
        object.__setattr__(self, "kind", kind)
        blocks = tuple((as_scalar(c), s) for c, s in self.blocks)
        object.__setattr__(self, "blocks", blocks)
        for c, s in blocks:
            if s.kind != "gl" or s.rank < 1:
                raise ValueError("eigenblocks must be GL seeds of rank >= 1")
            if extension_of(c) is not None:
                raise ValueError("eigenvalues must be rational")
        cs = [c for c, _ in blocks]
        if kind == "gl":
            if self.zero is not None:
                raise ValueError("GL closed seeds have no zero block")
            if len(set(cs)) != len(cs):
                raise ValueError("eigenvalue clash: c_i = c_j")
            total = 0
        else:
            if self.zero is None or self.zero.kind != kind:
                raise ValueError(f"{kind} closed seed needs a zero block of the same kind")
            if any(c == 0 for c in cs):
                raise ValueError("eigenblock values must be nonzero")
            if len({abs(c) for c in cs}) != len(cs):
                raise ValueError("eigenvalue clash: c_i = +-c_j")
            total = self.zero.rank
        total += sum(s.rank for _, s in blocks)
        if total != self.rank:
            raise ValueError(f"block ranks sum to {total}, expected {self.rank}")

    @property
    def group(self) -> GroupDescriptor:
        return GroupDescriptor(self.kind, self.rank)

    @classmethod
    def nilpotent(cls, seed: NilpotentSeed) -> ClosedSeed:
        if seed.kind == "gl":
            blocks = ((ZERO, seed),) if seed.rank else ()
            return cls("gl", seed.rank, None, blocks)
        return cls(seed.kind, seed.rank, seed, ())

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "rank": self.rank,
            "zero": self.zero.to_json() if self.zero else None,
            "blocks": [{"c": format_scalar(c), "seed": s.to_json()} for c, s in self.blocks],
        }

    @classmethod
    def from_json(cls, obj: dict) -> ClosedSeed:
        zero = obj.get("zero")
        return cls(
            obj["kind"], int(obj["rank"]),
            NilpotentSeed.from_json(zero) if zero else None,
            tuple((parse_scalar(b["c"]), NilpotentSeed.from_json(b["seed"])) for b in obj.get("blocks", ())),
        )


# --------------------------------------------------------------- builders

def nilpotent_matrix(kind: str, n: int, k: int) -> Mat:
    """The X of the nilpotent family (no vector)."""
    if kind == "gl":
        X = [[ZERO] * n for _ in range(n)]
        for i in range(k - 1):
            X[i][i + 1] = Fraction(1)
        return Mat(X)
    off = 1 if kind == "oodd" else 0
    m = 2 * n + off
    X = [[ZERO] * m for _ in range(m)]
    for i in range(k - 1):
        X[off + i][off + i + 1] = Fraction(1)              # J_k
        X[off + n + i + 1][off + n + i] = Fraction(-1)     # -J_k^t
    if k >= 1:
        if kind == "sp":
            X[k - 1][n + k - 1] = Fraction(1)
        elif kind == "oodd":
            X[0][n + k] = Fraction(1)
            X[k][0] = Fraction(-1)
        elif k >= 2:
            X[k - 2][n + k - 1] = Fraction(1)
            X[k - 1][n + k - 2] = Fraction(-1)
    return Mat(X)


def build_nilpotent(seed: NilpotentSeed) -> EnhancedPoint:
    n, k, c = seed.rank, seed.k, seed.coeffs
    group = seed.group
    X = nilpotent_matrix(seed.kind, n, k)
    m = group.size
    u = [ZERO] * m
    if seed.kind == "gl":
        u[:k] = c
        v = [ZERO] * m
        if k:
            v[0] = Fraction(1)
        return EnhancedPoint(group, X, tuple(u), tuple(v))
    if seed.kind == "oodd":
        u[0:k + 1] = c[:k + 1]
        u[n + 1:n + 1 + k] = c[k + 1:]
    else:
        u[0:k] = c[:k]
        u[n:n + k] = c[k:]
    return EnhancedPoint(group, X, tuple(u))


def maximal_point(kind: str, n: int, u: Sequence) -> EnhancedPoint:
    """The maximal-dimension family: X of jet order n with an arbitrary vector u."""
    group = GroupDescriptor(kind, n)
    X = nilpotent_matrix(kind, n, n)
    if kind == "gl":
        v = tuple(Fraction(1) if i == 0 else ZERO for i in range(n))
        return EnhancedPoint(group, X, tuple(u), v)
    return EnhancedPoint(group, X, tuple(u))


def maximal_leading_index(kind: str, n: int) -> int:
    """0-based coordinate of u that must be nonzero at the maximal point."""
    return {"gl": n - 1, "sp": n, "oodd": n + 1, "oeven": n}[kind]


def build_closed(seed: ClosedSeed) -> EnhancedPoint:
    group = seed.group
    if seed.kind == "gl":
        mats, us, vs = [], [], []
        for c, s in seed.blocks:
            p = build_nilpotent(s)
            mats.append(p.X + Mat.identity(s.rank).scale(c))
            us += p.u
            vs += p.v
        X = block_diag(*mats) if mats else Mat.zeros(0)
        return EnhancedPoint(group, X, tuple(us), tuple(vs))

    z = build_nilpotent(seed.zero)
    n0 = seed.zero.rank
    h0 = n0 + (1 if seed.kind == "oodd" else 0)   # size of the zero block's first half
    sizes = [s.rank for _, s in seed.blocks]
    half = h0 + sum(sizes)
    m = group.size
    # positions: zero first half, GL blocks, zero second half, dual GL blocks
    zpos = list(range(h0)) + list(range(half, half + n0))
    X = [[ZERO] * m for _ in range(m)]
    u = [ZERO] * m
    for a, i in enumerate(zpos):
        u[i] = z.u[a]
        for b, j in enumerate(zpos):
            X[i][j] = z.X[a, b]
    start = h0
    for (c, s), r in zip(seed.blocks, sizes):
        g = build_nilpotent(s)
        dual = half + n0 + (start - h0)
        for a in range(r):
            u[start + a] = g.u[a]
            u[dual + a] = g.v[a]
            for b in range(r):
                val = g.X[a, b] + (c if a == b else 0)
                X[start + a][start + b] = val
                X[dual + b][dual + a] = -val
        start += r
    return EnhancedPoint(group, Mat(X), tuple(u))


# ------------------------------------------------------ invariants -> data

def _pairing_exponents(iv: InvariantVector) -> list[int]:
    return generator_indices(iv.kind, iv.rank)[1]


def extract_jet_order(iv: InvariantVector) -> int:
    """Jet order k of the nilpotent fiber with invariants ``iv``."""
    if any(iv.traces):
        raise NotNilpotentFiber("not a nilpotent fiber: some trace invariant is nonzero")
    last = None
    for j, val in zip(_pairing_exponents(iv), iv.pairings):
        if val:
            last = j
    if last is None:
        return 0
    if iv.kind == "gl":
        return last + 1
    if iv.kind == "sp":
        return (last + 1) // 2
    if iv.kind == "oodd":
        return last // 2
    return last // 2 + 1


def eta_signature(x) -> tuple:
    """``(k, leading pairings)``: the data that separates nilpotent closed orbits.

    Accepts an :class:`EnhancedPoint` (nilpotent X) or a :class:`NilpotentSeed`.
    For GL the pairings are ``mu_0..mu_{k-1}``; for SP ``eta_1, eta_3..eta_{2k-1}``;
    for OODD ``eta_0..eta_{2k}``; for OEVEN ``eta_0..eta_{2k-2}``.
    """
    p = build_nilpotent(x) if isinstance(x, NilpotentSeed) else x
    iv = quotient_map(p)
    if any(iv.traces) or not _is_nilpotent(p.X):
        raise NotNilpotentFiber("eta_signature needs a nilpotent X")
    k = extract_jet_order(iv)
    count = {"gl": k, "sp": k, "oodd": k + 1, "oeven": k}[iv.kind]
    if iv.kind == "oodd" and k == 0 and not iv.pairings[0]:
        count = 0
    return (k, tuple(iv.pairings[:count]))


def _is_nilpotent(X: Mat) -> bool:
    return X.rows == 0 or (X ** X.rows).is_zero()


# -------------------------------------------------- representative solver

def representative_from_invariants(group: GroupDescriptor, iv: InvariantVector) -> EnhancedPoint:
    """A point of the nilpotent family whose invariants equal ``iv``.

    GL reads the parameters off directly. For SP and O the leading coefficient
    solves ``lead * c**2 = eta`` (one square root, possibly in an extension);
    every remaining pairing is then affine in exactly one fresh coordinate whose
    coefficient is a nonzero multiple of that root, so the rest is linear.
    The result is re-checked before it is returned.
    """
    kind, n = effective_kind(group)
    if group.kind == "gram" or (kind, n) != (iv.kind, iv.rank):
        raise ValueError(f"invariant vector is for {iv.kind} rank {iv.rank}, not {group.label()}")
    k = extract_jet_order(iv)
    if kind == "gl":
        p = build_nilpotent(NilpotentSeed("gl", n, k, tuple(iv.pairings[:k])))
    else:
        p = _solve_form_kind(kind, n, k, iv)
    if quotient_map(p) != iv:
        raise ArithmeticError("representative failed re-verification")
    return p


def _solve_form_kind(kind: str, n: int, k: int, iv: InvariantVector) -> EnhancedPoint:
    pairings = dict(zip(_pairing_exponents(iv), iv.pairings))
    if k == 0:
        if kind == "oodd":
            # sphere orbit: <u, u> = u_1^2
            root, _ = exact_sqrt(pairings[0])
            return build_nilpotent(NilpotentSeed(kind, n, 0, (root,)))
        return build_nilpotent(NilpotentSeed(kind, n, 0, ()))
    if kind == "oeven" and k == 1:
        # X = 0 and eta_0 = 2 u_1 u_{n+1}: take u_{n+1} = 1
        return build_nilpotent(NilpotentSeed(kind, n, 1, (pairings[0] / 2, Fraction(1))))

    forms = eta_forms(kind, k)
    top = _top_exponent(kind, k)
    lead = leading_slot(kind, k)
    coeffs: list = [ZERO] * seed_length(kind, k)
    scale = forms[top][lead][lead]
    coeffs[lead], d = exact_sqrt(pairings[top] / scale)
    fixed = {lead}
    higher = [top]
    for j in range(top - 2, -1, -2):
        slot = _affine_slot(forms, j, fixed, higher)
        if slot is None:
            raise ArithmeticError(f"no affine coordinate for eta_{j} (k={k})")
        S = forms[j]
        slope = 2 * sum((S[slot][t] * coeffs[t] for t in fixed), ZERO)
        if not slope:
            raise ArithmeticError(f"eta_{j} is degenerate at this seed")
        coeffs[slot] = (pairings[j] - _quad_value(S, coeffs)) / slope
        extension_of(*coeffs)
        fixed.add(slot)
        higher.append(j)
    return build_nilpotent(NilpotentSeed(kind, n, k, tuple(coeffs)))


def _affine_slot(forms: dict, j: int, fixed: set, higher: list) -> int | None:
    """A free slot that enters eta_j only through products with fixed slots and
    leaves every already-solved eta untouched."""
    S = forms[j]
    for s in range(len(S)):
        if s in fixed or S[s][s]:
            continue
        row = [t for t in range(len(S)) if S[s][t]]
        if not row or any(t not in fixed for t in row):
            continue
        if any(any(forms[h][s]) for h in higher):
            continue
        return s
    return None


def _quad_value(S, c):
    L = len(c)
    return sum((S[a][b] * c[a] * c[b] for a in range(L) for b in range(L) if S[a][b]), ZERO)


def _top_exponent(kind: str, k: int) -> int:
    return {"sp": 2 * k - 1, "oodd": 2 * k, "oeven": 2 * k - 2}[kind]


def seed_embedding(kind: str, n: int, k: int) -> Mat:
    """The m x L matrix sending seed coefficients to the vector u."""
    m = GroupDescriptor(kind, n).size
    L = seed_length(kind, k)
    if kind == "gl":
        pos = list(range(k))
    elif kind == "oodd":
        pos = list(range(k + 1)) + list(range(n + 1, n + 1 + k))
    else:
        pos = list(range(k)) + list(range(n, n + k))
    P = [[ZERO] * L for _ in range(m)]
    for col, row in enumerate(pos):
        P[row][col] = Fraction(1)
    return Mat(P) if m else Mat.zeros(0, L)


@lru_cache(maxsize=None)
def eta_forms(kind: str, k: int) -> dict:
    """``{j: S_j}`` with eta_j(seed) = c^t S_j c on the rank-k family (S_j symmetric)."""
    group = GroupDescriptor(kind, k)
    X = nilpotent_matrix(kind, k, k)
    B = standard_form(group)
    P = seed_embedding(kind, k, k)
    out = {}
    Xj = Mat.identity(group.size)
    for j in range(group.size):
        Q = P.T @ Xj.T @ B @ P
        S = (Q + Q.T).scale(Fraction(1, 2))
        out[j] = tuple(S.row_tuple(i) for i in range(S.rows))
        Xj = X @ Xj
    return out


# ------------------------------------------------- semisimple pipeline

@dataclass(frozen=True)
class SemisimpleSplit:
    Xs: Mat
    Xn: Mat
    spectrum: tuple            # ((eigenvalue, multiplicity), ...) sorted
    pairs: tuple = ()          # SP/O: positive representatives c of the +-c pairs
    zero_multiplicity: int = 0


def semisimple_split(X: Mat, group: GroupDescriptor | None = None) -> SemisimpleSplit:
    """Jordan-Chevalley parts plus the exact rational spectrum of X."""
    if extension_of(*X.entries()) is not None:
        raise UnsupportedInput("semisimple_split needs rational entries")
    m = X.rows
    if _is_nilpotent(X):
        return SemisimpleSplit(Mat.zeros(m), X, ((ZERO, m),) if m else (), (), m)
    Xs, Xn = jordan_chevalley(X)
    cp = char_poly(X)
    roots = rational_roots(squarefree_part(cp)) if m else []
    spectrum = []
    total = 0
    for r in roots:
        mult = _multiplicity(cp, r)
        spectrum.append((r, mult))
        total += mult
    if total != m:
        raise NonSplitError("non-split semisimple part: characteristic polynomial has an irreducible factor")
    spectrum.sort()
    zero_mult = sum(mu for r, mu in spectrum if r == 0)
    pairs: tuple = ()
    if group is not None and group.kind != "gl":
        pairs = tuple(sorted(r for r, _ in spectrum if r > 0))
    return SemisimpleSplit(Xs, Xn, tuple(spectrum), pairs, zero_mult)


def _multiplicity(p: Poly, r) -> int:
    lin = Poly([-r, 1])
    count = 0
    while p.degree > 0:
        q, rem = p.divmod(lin)
        if not rem.is_zero():
            break
        p = q
        count += 1
    return count


@dataclass(frozen=True)
class GlPart:
    c: Fraction
    basis: tuple        # columns spanning E_i
    N: Mat
    u: tuple
    v: tuple

    def point(self) -> EnhancedPoint:
        return EnhancedPoint(GroupDescriptor("gl", len(self.u)), self.N, self.u, self.v)


@dataclass(frozen=True)
class ZeroPart:
    basis: tuple
    gram: Mat
    symmetric: bool
    N: Mat
    u: tuple

    def point(self) -> EnhancedPoint | None:
        if not self.basis:
            return None
        return EnhancedPoint(GroupDescriptor.from_gram(self.gram), self.N, self.u)


@dataclass(frozen=True)
class CentralizerFactors:
    zero: ZeroPart | None
    gl_parts: tuple

    def block_dims(self) -> list[int]:
        dims = [len(self.zero.basis)] if self.zero else []
        for g in self.gl_parts:
            dims.append(len(g.basis) * (1 if self.zero is None else 2))
        return dims


def _eigenspace(X: Mat, c) -> list[tuple]:
    m = X.rows
    return kernel_basis(X - Mat.identity(m).scale(c)) if m else []


def _restrict(M: Mat, basis: list[tuple], coords) -> Mat:
    """Matrix of M on span(basis) (M must preserve it); ``coords`` maps a vector to coordinates."""
    cols = [coords(matvec(M, b)) for b in basis]
    r = len(basis)
    return Mat.from_columns(cols, r) if cols else Mat.zeros(0)


def centralizer_decomposition(p: EnhancedPoint) -> CentralizerFactors:
    """Split ``p`` along the generalized eigenspaces of X."""
    group = p.group
    split = semisimple_split(p.X, group)
    m = group.size
    Xs, Xn = split.Xs, split.Xn

    if group.kind == "gl":
        spaces = [(c, _eigenspace(Xs, c)) for c, _ in split.spectrum]
    else:
        spaces = [(ZERO, _eigenspace(Xs, ZERO))]
        for c in split.pairs:
            spaces.append((c, _eigenspace(Xs, c)))
            spaces.append((-c, _eigenspace(Xs, -c)))
    allb = [b for _, sp in spaces for b in sp]
    P = Mat.from_columns(allb, m) if allb else Mat.zeros(0)
    Pinv = inverse(P) if m else P
    ucoord = matvec(Pinv, p.u) if m else ()
    offsets = {}
    pos = 0
    for c, sp in spaces:
        offsets[c] = (pos, pos + len(sp))
        pos += len(sp)

    def coords_in(c):
        lo, hi = offsets[c]
        return lambda w: matvec(Pinv, w)[lo:hi]

    def comp(c):
        lo, hi = offsets[c]
        return tuple(ucoord[lo:hi])

    parts = []
    if group.kind == "gl":
        vP = tuple(sum((p.v[i] * P[i, j] for i in range(m)), ZERO) for j in range(m))
        for c, sp in spaces:
            lo, hi = offsets[c]
            parts.append(GlPart(c, tuple(sp), _restrict(Xn, sp, coords_in(c)), comp(c), vP[lo:hi]))
        return CentralizerFactors(None, tuple(parts))

    B = standard_form(group)
    for c in split.pairs:
        sp, dual = spaces[[s[0] for s in spaces].index(c)][1], spaces[[s[0] for s in spaces].index(-c)][1]
        a = comp(c)
        w = [ZERO] * m
        for coef, b in zip(comp(-c), dual):
            for i in range(m):
                w[i] += coef * b[i]
        Bw = matvec(B, w)
        vrow = tuple(sum((bi * x for bi, x in zip(b, Bw)), ZERO) for b in sp)
        parts.append(GlPart(c, tuple(sp), _restrict(Xn, sp, coords_in(c)), a, vrow))
    zb = spaces[0][1]
    gram = restricted_gram(group, zb)
    zero = ZeroPart(tuple(zb), gram, bool(group.symmetric), _restrict(Xn, zb, coords_in(ZERO)), comp(ZERO))
    return CentralizerFactors(zero, tuple(parts))
