"""Closedness, stabilizers and descendants.

A point is declared closed when its orbit dimension equals the smallest orbit
dimension in its fiber. The smallest one belongs to the unique closed orbit in
the fiber and is read off from invariants alone: each generalized eigenspace
contributes a stabilizer factor determined by where its pairings stop being
nonzero. Orbits in the closure of another orbit have strictly smaller dimension,
so any non-closed orbit is strictly bigger than the fiber minimum.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .canonical import (
    CentralizerFactors,
    ClosedSeed,
    NilpotentSeed,
    build_closed,
    build_nilpotent,
    centralizer_decomposition,
)
from .groups import (
    EnhancedPoint,
    GroupDescriptor,
    MvwElement,
    act,
    cyclic_basis,
    in_group,
    lie_stabilizer_dim,
    matvec,
    twisting_element,
)
from .linalg import Mat, block_diag, inverse, kernel_basis
from .scalar import ZERO, format_scalar


@dataclass(frozen=True)
class StabilizerFactor:
    """One factor of a stabilizer: GL_r, Sp_r or O_r with r the matrix size."""

    family: str     # "gl", "sp" or "o"
    size: int

    @property
    def dim(self) -> int:
        r = self.size
        return {"gl": r * r, "sp": r * (r + 1) // 2, "o": r * (r - 1) // 2}[self.family]

    @property
    def kind(self) -> str:
        if self.family == "o":
            return "oodd" if self.size % 2 else "oeven"
        return self.family

    @property
    def rank(self) -> int:
        return self.size if self.family == "gl" else self.size // 2

    def label(self) -> str:
        return {"gl": "GL", "sp": "Sp", "o": "O"}[self.family] + f"_{self.size}"

    def to_json(self) -> dict:
        return {"kind": self.kind, "rank": self.rank, "label": self.label(), "dim": self.dim}


def form_factor(symmetric: bool, size: int) -> StabilizerFactor:
    return StabilizerFactor("o" if symmetric else "sp", size)


def predicted_stabilizer(kind: str, n: int, k: int, sphere: bool = False) -> StabilizerFactor:
    """Stabilizer of a closed nilpotent orbit of jet order ``k``.

    ``sphere`` only matters for OODD with k = 0: a nonzero anisotropic u has
    stabilizer O_2n instead of the whole group.
    """
    kind = kind.lower()
    if not 0 <= k <= n:
        raise ValueError(f"jet order must satisfy 0 <= k <= n, got k={k}, n={n}")
    if kind == "gl":
        return StabilizerFactor("gl", n - k)
    if kind == "sp":
        return StabilizerFactor("sp", 2 * (n - k))
    if kind == "oodd":
        if k == 0 and not sphere:
            return StabilizerFactor("o", 2 * n + 1)
        return StabilizerFactor("o", 2 * (n - k))
    if kind == "oeven":
        if k == 0:
            return StabilizerFactor("o", 2 * n)
        return StabilizerFactor("o", 2 * (n - k) + 1)
    raise ValueError(f"unknown kind {kind!r}")


# ----------------------------------------------------------- per-part data

def last_nonzero(values) -> int:
    """1 + index of the last nonzero entry (0 if all vanish)."""
    top = 0
    for i, x in enumerate(values):
        if x:
            top = i + 1
    return top


def gl_part_moments(N: Mat, u, v) -> list:
    """mu_t = v N^t u for t < size."""
    out = []
    w = tuple(u)
    for _ in range(len(w)):
        out.append(sum((a * b for a, b in zip(v, w)), ZERO))
        w = matvec(N, w)
    return out


def zero_part_moments(gram: Mat, N: Mat, u) -> list:
    """eta_t = <N^t u, u> for t < size, with the restricted form."""
    Gu = matvec(gram, u)
    out = []
    w = tuple(u)
    for _ in range(len(w)):
        out.append(sum((a * b for a, b in zip(w, Gu)), ZERO))
        w = matvec(N, w)
    return out


def zero_jet_order(symmetric: bool, size: int, d: int) -> int:
    """Jet order of the zero part whose closed-orbit span has dimension ``d``."""
    if not d:
        return 0
    if not symmetric:
        return d // 2
    return (d - 1) // 2 if size % 2 else (d + 1) // 2


@dataclass(frozen=True)
class PartSummary:
    c: Fraction
    size: int
    jet: int

    def to_json(self) -> dict:
        return {"c": format_scalar(self.c), "size": self.size, "jet_order": self.jet}


@dataclass(frozen=True)
class ClassificationReport:
    is_closed: bool
    zero_jet_order: int | None
    zero_span_dim: int | None
    gl_parts: tuple
    stabilizer: tuple
    stabilizer_dim: int
    lie_stabilizer_dim: int
    orbit_dim: int
    fiber_min_orbit_dim: int

    def to_json(self) -> dict:
        return {
            "is_closed": self.is_closed,
            "zero_jet_order": self.zero_jet_order,
            "zero_span_dim": self.zero_span_dim,
            "gl_parts": [g.to_json() for g in self.gl_parts],
            "stabilizer": [f.to_json() for f in self.stabilizer],
            "stabilizer_dim": self.stabilizer_dim,
            "lie_stabilizer_dim": self.lie_stabilizer_dim,
            "orbit_dim": self.orbit_dim,
            "fiber_min_orbit_dim": self.fiber_min_orbit_dim,
        }


def _fiber_data(factors: CentralizerFactors):
    parts, stab = [], []
    for g in factors.gl_parts:
        j = last_nonzero(gl_part_moments(g.N, g.u, g.v))
        size = len(g.basis)
        parts.append(PartSummary(g.c, size, j))
        stab.append(StabilizerFactor("gl", size - j))
    zj = zd = None
    z = factors.zero
    if z is not None:
        m0 = len(z.basis)
        zd = last_nonzero(zero_part_moments(z.gram, z.N, z.u))
        zj = zero_jet_order(z.symmetric, m0, zd)
        stab.insert(0, form_factor(z.symmetric, m0 - zd))
    return zj, zd, tuple(parts), tuple(stab)


def is_closed(p: EnhancedPoint) -> ClassificationReport:
    """Decide whether the orbit of ``p`` is closed (rational split spectrum only)."""
    factors = centralizer_decomposition(p)
    zj, zd, parts, stab = _fiber_data(factors)
    sdim = sum(f.dim for f in stab)
    gdim = p.group.dim
    lsd = lie_stabilizer_dim(p)
    return ClassificationReport(
        is_closed=(lsd == sdim),
        zero_jet_order=zj,
        zero_span_dim=zd,
        gl_parts=parts,
        stabilizer=stab,
        stabilizer_dim=sdim,
        lie_stabilizer_dim=lsd,
        orbit_dim=gdim - lsd,
        fiber_min_orbit_dim=gdim - sdim,
    )


# ------------------------------------------------------------- descendants

@dataclass(frozen=True)
class DescendantReport:
    h_factors: tuple
    mult_k: int
    gamma: int
    h_en_dim: int
    normal_dim: int
    lie_stabilizer_dim: int
    span_dim: int
    mvw_witness: bool
    identities: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "h_factors": [f.to_json() for f in self.h_factors],
            "mult_k": self.mult_k,
            "gamma": self.gamma,
            "h_en_dim": self.h_en_dim,
            "normal_dim": self.normal_dim,
            "lie_stabilizer_dim": self.lie_stabilizer_dim,
            "span_dim": self.span_dim,
            "mvw_witness": self.mvw_witness,
            "identities": dict(self.identities),
        }


def descend(seed: ClosedSeed) -> DescendantReport:
    """Stabilizer structure and normal-space bookkeeping at a closed point."""
    if isinstance(seed, NilpotentSeed):
        seed = ClosedSeed.nilpotent(seed)
    p = build_closed(seed)
    factors = centralizer_decomposition(p)
    zj, zd, parts, stab = _fiber_data(factors)
    group = p.group
    gx = lie_stabilizer_dim(p)
    if gx != sum(f.dim for f in stab):
        raise ArithmeticError("seed point is not closed")

    gamma = 0
    d = 0
    h_factors = []
    h_en = 0
    if factors.zero is not None:
        z = factors.zero
        d = len(cyclic_basis(z.N, z.u)) if z.basis else 0
        if d != zd:
            raise ArithmeticError("cyclic span and pairing pattern disagree on the zero part")
        if z.symmetric and (not z.N.is_zero() or any(z.u)):
            gamma = 1
        perp = form_factor(z.symmetric, len(z.basis) - d)
        h_factors.append(perp)
        h_en += perp.dim + perp.size
    jets = [g.jet for g in parts]
    ks = [g.size - g.jet for g in parts]
    for k in ks:
        if k:
            h_factors.append(StabilizerFactor("gl", k))
            h_en += k * k + 2 * k
    mult = (d - gamma) // 2 + sum(jets)
    dim_e = group.module_dim
    normal = gx + dim_e
    ident = {"normal_space": h_en + 2 * mult + gamma == normal}
    n = group.rank
    if group.kind == "gl":
        ident["gl_rank_sum"] = mult + sum(ks) == n
    elif group.kind == "sp":
        ident["sp_rank_sum"] = mult + (len(factors.zero.basis) - d) // 2 + sum(ks) == n
    else:
        l = len(factors.zero.basis) - d
        m = group.size
        ident["o_rank_sum"] = 2 * mult + l + 2 * sum(ks) + gamma == m
        # the printed variant with a single copy of the multiplicity
        ident["o_rank_sum_printed"] = mult + l + 2 * sum(ks) + gamma == m
    if not ident["normal_space"]:
        raise ArithmeticError("normal-space dimension identity failed")
    try:
        mvw_witness(seed)
        witness = True
    except ArithmeticError:
        witness = False
    return DescendantReport(tuple(h_factors), mult, gamma, h_en, normal, gx, d, witness, ident)


# -------------------------------------------------------------- witnesses

def hankel_witness(y) -> Mat:
    """The symmetric matrix h with h[i][j] = -y_{i+j+1} (zero past y_k)."""
    k = len(y)
    return Mat([[-y[i + j] if i + j < k else ZERO for j in range(k)] for i in range(k)])


def _gl_block_witness(s: NilpotentSeed) -> Mat:
    h = hankel_witness(s.coeffs)
    rest = Mat.identity(s.rank - s.k)
    return block_diag(h, rest) if s.k else rest


def mvw_stabilizer_witness(seed) -> MvwElement:
    """``(g_0, -1)`` fixing a GL closed point; it squares to the identity."""
    if isinstance(seed, NilpotentSeed):
        seed = ClosedSeed.nilpotent(seed)
    if seed.kind != "gl":
        raise ValueError("explicit MVW witness is only provided for GL seeds")
    return mvw_witness(seed)


def mvw_witness(seed: ClosedSeed) -> MvwElement:
    """A verified element ``(g, -1)`` of the MVW stabilizer of the seed point."""
    p = build_closed(seed)
    if seed.kind == "gl":
        mats = [_gl_block_witness(s) for _, s in seed.blocks]
        g = block_diag(*mats) if mats else Mat.zeros(0)
    else:
        g = _form_witness(seed)
    e = MvwElement(g, -1)
    if not in_group(e, p.group) or act(e, p) != p:
        raise ArithmeticError("witness does not fix the point")
    return e


def _zero_witness(z: EnhancedPoint) -> Mat:
    """On V = span(X^i u): X^i u -> (-1)^(i+1) X^i u; on V-perp a twisting element."""
    m = z.group.size
    if m == 0:
        return Mat.zeros(0)
    B = z.group.form()
    vb = cyclic_basis(z.X, z.u)
    if vb:
        pair = Mat.from_columns(vb).T @ B
        perp = kernel_basis(pair)
    else:
        perp = [tuple(1 if i == j else 0 for i in range(m)) for j in range(m)]
    diag = [(-1) ** (i + 1) for i in range(len(vb))]
    if perp:
        Pp = Mat.from_columns(perp)
        t = twisting_element(GroupDescriptor.from_gram(Pp.T @ B @ Pp)).g
    else:
        t = Mat.zeros(0)
    D = block_diag(Mat.diag(diag), t) if vb else t
    Q = Mat.from_columns(list(vb) + list(perp))
    return Q @ D @ inverse(Q)


def _form_witness(seed: ClosedSeed) -> Mat:
    m = seed.group.size
    n0 = seed.zero.rank
    h0 = n0 + (1 if seed.kind == "oodd" else 0)
    half = h0 + sum(s.rank for _, s in seed.blocks)
    zpos = list(range(h0)) + list(range(half, half + n0))
    G = [[ZERO] * m for _ in range(m)]
    gz = _zero_witness(build_nilpotent(seed.zero))
    for a, i in enumerate(zpos):
        for b, j in enumerate(zpos):
            G[i][j] = gz[a, b]
    start = h0
    for _, s in seed.blocks:
        h = _gl_block_witness(s)
        hinv = inverse(h)
        r = s.rank
        dual = half + n0 + (start - h0)
        # (a, b) -> (h b, h^-1 a); h symmetric keeps the pairing twisted
        for a in range(r):
            for b in range(r):
                G[start + a][dual + b] = h[a, b]
                G[dual + a][start + b] = hinv[a, b]
        start += r
    return Mat(G)
