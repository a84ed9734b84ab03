import random
from fractions import Fraction

import pytest

from closedorbits.canonical import (
    ClosedSeed,
    NilpotentSeed,
    NonSplitError,
    NotNilpotentFiber,
    build_closed,
    build_nilpotent,
    centralizer_decomposition,
    eta_forms,
    eta_signature,
    extract_jet_order,
    maximal_point,
    representative_from_invariants,
    semisimple_split,
)
from closedorbits.groups import EnhancedPoint, GroupDescriptor, act, in_lie_algebra, random_group_element
from closedorbits.invariants import InvariantVector, quotient_map
from closedorbits.linalg import Mat, inverse, is_nilpotent, mat_rank, minimal_poly_squarefree
from closedorbits.oracle import grid_seeds
from closedorbits.scalar import ExtensionError, Quad

KINDS = ("gl", "sp", "oodd", "oeven")


def iv(kind, rank, traces, pairings):
    return InvariantVector(kind, rank, tuple(Fraction(t) for t in traces), tuple(Fraction(p) for p in pairings))


# ------------------------------------------------------------------ seeds

def test_seed_validation():
    with pytest.raises(ValueError):
        NilpotentSeed("gl", 2, 2, (3, 0))
    with pytest.raises(ValueError):
        NilpotentSeed("sp", 2, 1, (1, 0))
    with pytest.raises(ValueError):
        NilpotentSeed("oodd", 2, 1, (1, 1, 0))
    with pytest.raises(ValueError):
        NilpotentSeed("sp", 1, 2, (1, 1, 1, 1))
    with pytest.raises(ValueError):
        NilpotentSeed("oeven", 2, 1, (0, 1))
    NilpotentSeed("oodd", 2, 0, (0,))
    s = NilpotentSeed("oeven", 3, 2, ("1", "0", "2", "0"))
    assert NilpotentSeed.from_json(s.to_json()) == s


def test_closed_seed_validation():
    gl1 = NilpotentSeed("gl", 1, 1, (1,))
    with pytest.raises(ValueError):
        ClosedSeed("gl", 2, None, ((1, gl1), (1, gl1)))
    zero = NilpotentSeed("sp", 1, 0, ())
    with pytest.raises(ValueError):
        ClosedSeed("sp", 3, zero, ((1, gl1), (-1, gl1)))
    with pytest.raises(ValueError):
        ClosedSeed("sp", 2, zero, ((0, gl1),))
    with pytest.raises(ValueError):
        ClosedSeed("sp", 3, zero, ((1, gl1),))
    seed = ClosedSeed("sp", 2, zero, ((1, gl1),))
    assert ClosedSeed.from_json(seed.to_json()) == seed


def test_build_nilpotent_examples():
    p = build_nilpotent(NilpotentSeed("gl", 2, 2, (3, 5)))
    assert p == EnhancedPoint(GroupDescriptor("gl", 2), Mat([[0, 1], [0, 0]]), (3, 5), (1, 0))
    p = build_nilpotent(NilpotentSeed("sp", 2, 1, (0, 1)))
    assert p.X == Mat([[0, 0, 1, 0], [0, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]])
    assert p.u == (0, 0, 1, 0)
    for kind in KINDS:
        coeffs = (0,) if kind == "oodd" else ()
        assert build_nilpotent(NilpotentSeed(kind, 2, 0, coeffs)).is_zero()


def test_build_nilpotent_properties():
    for kind in KINDS:
        for n in (1, 2, 3):
            for seed in grid_seeds(kind, n, (-2, 1))[::3]:
                p = build_nilpotent(seed)
                assert in_lie_algebra(p.X, p.group)
                assert is_nilpotent(p.X)
                assert extract_jet_order(quotient_map(p)) == seed.k


def test_build_closed_examples():
    gl = build_closed(ClosedSeed("gl", 1, None, ((2, NilpotentSeed("gl", 1, 1, (5,))),)))
    assert gl == EnhancedPoint(GroupDescriptor("gl", 1), Mat([[2]]), (5,), (1,))
    seed = ClosedSeed("sp", 2, NilpotentSeed("sp", 1, 0, ()), ((1, NilpotentSeed("gl", 1, 1, (1,))),))
    p = build_closed(seed)
    assert in_lie_algebra(p.X, p.group)
    assert sorted(p.X[i, i] for i in range(4)) == [-1, 0, 0, 1]
    assert build_closed(ClosedSeed.nilpotent(NilpotentSeed("oeven", 2, 0, ()))).is_zero()


def test_build_closed_in_lie_algebra():
    gl1 = NilpotentSeed("gl", 1, 1, (3,))
    gl2 = NilpotentSeed("gl", 2, 2, (0, 2))
    for kind in ("sp", "oodd", "oeven"):
        zero = grid_seeds(kind, 1, (1,))[-1]
        seed = ClosedSeed(kind, 4, zero, ((2, gl1), (Fraction(-1, 2), gl2)))
        p = build_closed(seed)
        assert in_lie_algebra(p.X, p.group)


# ------------------------------------------------------ invariant readers

def test_extract_jet_order_examples():
    assert extract_jet_order(iv("gl", 2, (0, 0), (3, 5))) == 2
    assert extract_jet_order(iv("sp", 2, (0, 0), (0, 0))) == 0
    assert extract_jet_order(iv("oodd", 2, (0, 0), (4, 0, 0))) == 0
    with pytest.raises(NotNilpotentFiber):
        extract_jet_order(iv("gl", 2, (1, 0), (3, 5)))


def test_eta_signature_examples():
    g = GroupDescriptor("sp", 1)
    assert eta_signature(EnhancedPoint(g, Mat([[0, 1], [0, 0]]), (0, 1))) == (1, (1,))
    assert eta_signature(EnhancedPoint.zero(g)) == (0, ())
    with pytest.raises(NotNilpotentFiber):
        eta_signature(EnhancedPoint(g, Mat.diag([1, -1]), (0, 1)))


def test_oeven_maximal_leading_eta():
    # eta_{2n-2} = (-1)^(n-1) 2 u_{n+1}^2 for n >= 2
    rng = random.Random(1)
    for n in (2, 3, 4):
        u = [Fraction(rng.randint(-4, 4)) for _ in range(2 * n)]
        u[n] = Fraction(3)
        k, etas = eta_signature(maximal_point("oeven", n, u))
        assert k == n
        assert etas[-1] == (-1) ** (n - 1) * 2 * 9


def test_one_square_root_expansions():
    # the leading eta is a square, the lower ones are affine in a fresh slot
    # slots: first-half coordinates, then second-half ones
    f = eta_forms("sp", 3)
    assert f[5][3][3] == 1 and sum(map(sum, f[5])) == 1
    # eta_3 = 2 c3 c5 - c4^2
    assert f[3][3][5] == 1 and f[3][4][4] == -1
    f = eta_forms("oeven", 3)
    assert f[4][3][3] == 2
    f = eta_forms("oodd", 3)
    assert f[6][4][4] == -1


# ---------------------------------------------------------------- solver

def test_representative_examples():
    gl2 = GroupDescriptor("gl", 2)
    assert representative_from_invariants(gl2, iv("gl", 2, (0, 0), (3, 5))) == build_nilpotent(
        NilpotentSeed("gl", 2, 2, (3, 5)))
    sp1 = GroupDescriptor("sp", 1)
    p = representative_from_invariants(sp1, iv("sp", 1, (0,), (4,)))
    assert p == EnhancedPoint(sp1, Mat([[0, 1], [0, 0]]), (0, 2))
    p = representative_from_invariants(sp1, iv("sp", 1, (0,), (2,)))
    assert p.u == (0, Quad(0, 1, 2))


def test_representative_errors():
    with pytest.raises(NotNilpotentFiber):
        representative_from_invariants(GroupDescriptor("sp", 1), iv("sp", 1, (1,), (2,)))
    nested = InvariantVector("sp", 1, (Fraction(0),), (Quad(0, 1, 3),))
    with pytest.raises(ExtensionError):
        representative_from_invariants(GroupDescriptor("sp", 1), nested)
    with pytest.raises(ValueError):
        representative_from_invariants(GroupDescriptor("sp", 2), iv("sp", 1, (0,), (2,)))


def test_representative_round_trip_small_grid():
    for kind in KINDS:
        for n in (1, 2):
            g = GroupDescriptor(kind, n)
            for seed in grid_seeds(kind, n, (-1, 2, 3)):
                target = quotient_map(build_nilpotent(seed))
                assert quotient_map(representative_from_invariants(g, target)) == target


def test_representative_negative_leading():
    # eta_1 = -3 on Sp_2 needs sqrt(-3)
    p = representative_from_invariants(GroupDescriptor("sp", 1), iv("sp", 1, (0,), (-3,)))
    assert quotient_map(p).pairings == (-3,)


# -------------------------------------------------------- semisimple part

def test_semisimple_split_examples():
    sp2 = GroupDescriptor("sp", 2)
    X = Mat.diag([1, 0, -1, 0])
    s = semisimple_split(X, sp2)
    assert s.Xs == X and s.Xn.is_zero()
    assert dict(s.spectrum) == {-1: 1, 0: 2, 1: 1} and s.pairs == (1,)
    s = semisimple_split(Mat([[1, 1], [0, 2]]))
    assert s.Xn.is_zero() and dict(s.spectrum) == {1: 1, 2: 1}
    with pytest.raises(NonSplitError):
        semisimple_split(Mat([[0, -1], [1, 0]]))


def _random_split_matrix(rng, n):
    # block upper-triangular with rational diagonal, conjugated by a unimodular matrix
    T = [[0] * n for _ in range(n)]
    for i in range(n):
        T[i][i] = rng.choice([-2, -1, 0, 1, 2, Fraction(1, 2)])
    for i in range(n - 1):
        if T[i][i] == T[i + 1][i + 1] and rng.random() < 0.6:
            T[i][i + 1] = 1
    P = Mat.identity(n)
    for _ in range(n):
        i, j = rng.sample(range(n), 2) if n > 1 else (0, 0)
        if i != j:
            E = [[1 if a == b else 0 for b in range(n)] for a in range(n)]
            E[i][j] = rng.randint(-2, 2)
            P = P @ Mat(E)
    return P @ Mat(T) @ inverse(P)


def test_semisimple_split_fuzz():
    rng = random.Random(9)
    for _ in range(500):
        n = rng.randint(1, 4)
        X = _random_split_matrix(rng, n)
        s = semisimple_split(X)
        assert s.Xs + s.Xn == X
        assert s.Xs @ s.Xn == s.Xn @ s.Xs
        assert minimal_poly_squarefree(s.Xs) and is_nilpotent(s.Xn)
        assert sum(mu for _, mu in s.spectrum) == n


# ---------------------------------------------------------- centralizers

def test_centralizer_examples():
    sp2 = GroupDescriptor("sp", 2)
    f = centralizer_decomposition(EnhancedPoint(sp2, Mat.diag([1, 0, -1, 0]), (1, 0, 1, 0)))
    assert len(f.zero.basis) == 2 and f.zero.N.is_zero() and not any(f.zero.u)
    (part,) = f.gl_parts
    assert (part.c, part.u, part.v) == (1, (1,), (1,)) and part.N.is_zero()
    gl2 = GroupDescriptor("gl", 2)
    f = centralizer_decomposition(EnhancedPoint(gl2, Mat.diag([1, 2]), (1, 1), (1, 0)))
    assert [(g.c, g.u, g.v) for g in f.gl_parts] == [(1, (1,), (1,)), (2, (1,), (0,))]
    p = build_nilpotent(NilpotentSeed("oodd", 2, 2, (1, 2, 1, 1, 1)))
    f = centralizer_decomposition(p)
    assert f.gl_parts == () and f.zero.N == p.X and f.zero.u == p.u


def _power_trace(M, i):
    return (M ** i).trace() if M.rows else 0


def test_centralizer_reassembly_matches_invariants():
    rng = random.Random(12)
    for kind in ("sp", "oodd", "oeven", "gl"):
        g = GroupDescriptor(kind, 3)
        sym = g.symmetric
        for _ in range(6):
            zero = None if kind == "gl" else rng.choice(grid_seeds(kind, 1, (1, -2)))
            blocks = [(Fraction(2), NilpotentSeed("gl", 2, 2, (rng.choice([0, 1]), 3)))]
            if kind == "gl":
                blocks.append((Fraction(-1), NilpotentSeed("gl", 1, 1, (1,))))
            p = build_closed(ClosedSeed(kind, 3, zero, tuple(blocks)))
            # conjugate to hide the block structure
            p = act(random_group_element(g, rng), p)
            f = centralizer_decomposition(p)
            assert sum(f.block_dims()) == g.size
            if f.zero is not None:
                assert mat_rank(f.zero.gram) == len(f.zero.basis)
            for part in f.gl_parts:
                assert is_nilpotent(part.N)
            X = p.X
            for i in range(1, 2 * g.size + 1):
                want = _power_trace(X, i)
                got = _power_trace(f.zero.N, i) if f.zero else 0
                for part in f.gl_parts:
                    A = part.N + Mat.identity(part.N.rows).scale(part.c)
                    got += _power_trace(A, i)
                    if kind != "gl":
                        got += _power_trace(A.scale(-1).T, i)
                assert got == want
            U = Mat.column(p.u)
            for j in range(2 * g.size):
                if kind == "gl":
                    want = (Mat.row(p.v) @ X ** j @ U)[0, 0] if j else (Mat.row(p.v) @ U)[0, 0]
                    got = 0
                    factor = 1
                else:
                    XjU = (X ** j if j else Mat.identity(g.size)) @ U
                    want = (XjU.T @ g.form() @ U)[0, 0]
                    z = f.zero
                    Z = Mat.column(z.u)
                    NjZ = (z.N ** j if j else Mat.identity(z.N.rows)) @ Z
                    got = (NjZ.T @ z.gram @ Z)[0, 0] if z.basis else 0
                    factor = 1 + (1 if sym else -1) * (-1) ** j
                for part in f.gl_parts:
                    A = part.N + Mat.identity(part.N.rows).scale(part.c)
                    Aj = A ** j if j else Mat.identity(A.rows)
                    got += factor * (Mat.row(part.v) @ Aj @ Mat.column(part.u))[0, 0]
                assert got == want
