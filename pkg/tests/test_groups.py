import random
from fractions import Fraction

import pytest

from closedorbits.groups import (
    EnhancedPoint,
    GroupDescriptor,
    MembershipError,
    MvwElement,
    act,
    cayley,
    compose,
    cyclic_basis,
    cyclic_span,
    form_pairing,
    i_nn,
    in_group,
    in_lie_algebra,
    lie_algebra_basis,
    lie_stabilizer_dim,
    random_group_element,
    random_lie_element,
    random_point,
    restricted_gram,
    sample,
    standard_form,
    stabilizer_algebra,
    symplectic_basis,
    twisting_element,
)
from closedorbits.linalg import Mat, inverse, mat_rank

SP1, SP2 = GroupDescriptor("sp", 1), GroupDescriptor("sp", 2)
OE1, OO1 = GroupDescriptor("oeven", 1), GroupDescriptor("oodd", 1)
KINDS = ("gl", "sp", "oodd", "oeven")


def all_groups(max_rank):
    return [GroupDescriptor(k, n) for k in KINDS for n in range(1, max_rank + 1)]


def test_standard_forms():
    assert standard_form(SP1) == Mat([[0, 1], [-1, 0]])
    assert standard_form(OE1) == Mat([[0, 1], [1, 0]])
    assert standard_form(OO1) == Mat([[1, 0, 0], [0, 0, 1], [0, 1, 0]])
    with pytest.raises(ValueError):
        standard_form(GroupDescriptor("gl", 2))


def test_descriptor_dims():
    assert GroupDescriptor("gl", 3).dim == 9
    assert GroupDescriptor("sp", 2).dim == 10
    assert GroupDescriptor("oodd", 2).dim == 10
    assert GroupDescriptor("oeven", 2).dim == 6
    alt = GroupDescriptor.from_gram(Mat([[0, 2], [-2, 0]]))
    assert alt.dim == 3 and alt.symmetric is False
    for g in all_groups(3):
        assert len(lie_algebra_basis(g)) == g.dim


def test_gram_validation():
    with pytest.raises(ValueError):
        GroupDescriptor.from_gram(Mat([[1, 2], [3, 4]]))
    with pytest.raises(ValueError):
        GroupDescriptor.from_gram(Mat([[1, 1], [1, 1]]))


def test_in_lie_algebra_examples():
    assert in_lie_algebra(Mat.diag([2, -2]), OE1)
    assert in_lie_algebra(Mat([[0, 1], [0, 0]]), SP1)
    assert not in_lie_algebra(Mat.identity(2), SP1)
    with pytest.raises(ValueError):
        in_lie_algebra(Mat.identity(3), SP1)


def test_in_group_examples():
    assert in_group(MvwElement(Mat.identity(2)), SP1)
    assert in_group(MvwElement(Mat.diag([Fraction(-1, 3), -3])), OE1)
    assert in_group(MvwElement(i_nn(1), -1), SP1)
    assert not in_group(MvwElement(i_nn(1), 1), SP1)


def test_act_examples():
    gl2 = GroupDescriptor("gl", 2)
    p = EnhancedPoint(gl2, Mat([[1, 2], [3, 4]]), (1, 0), (0, 1))
    q = act(MvwElement(Mat.identity(2), -1), p)
    assert q == EnhancedPoint(gl2, Mat([[1, 3], [2, 4]]), (0, -1), (-1, 0))
    X = Mat.diag([2, -2])
    p = EnhancedPoint(OE1, X, (1, 3))
    assert act(MvwElement(Mat.identity(2), -1), p) == EnhancedPoint(OE1, -X, (-1, -3))
    assert act(MvwElement(Mat.identity(2)), p) == p


def test_act_rejects_non_members():
    p = EnhancedPoint(SP1, Mat.zeros(2), (1, 0))
    with pytest.raises(MembershipError):
        act(MvwElement(Mat.diag([2, 1])), p)


def test_cayley_examples():
    assert cayley(Mat.zeros(2), SP1) == Mat.identity(2)
    assert cayley(Mat.diag([2, -2]), OE1) == Mat.diag([Fraction(-1, 3), -3])
    g = cayley(Mat([[0, 1], [0, 0]]), SP1)
    assert g == Mat([[1, -2], [0, 1]])
    assert in_group(MvwElement(g), SP1)
    with pytest.raises(ZeroDivisionError):
        cayley(Mat.diag([-1, 1]), OE1)


def test_cayley_membership_fuzz():
    rng = random.Random(11)
    for g in all_groups(4):
        for _ in range(25):
            A = random_lie_element(g, rng)
            assert in_lie_algebra(A, g)
            try:
                h = cayley(A, g)
            except ZeroDivisionError:
                continue
            assert in_group(MvwElement(h), g)


def test_sample_valid_and_deterministic():
    e, p = sample(SP1, 0)
    assert in_group(e, SP1) and in_lie_algebra(p.X, SP1)
    assert sample(SP2, 42) == sample(SP2, 42)
    assert sample(SP2, 1) != sample(SP2, 2)
    for s in range(100):
        e, p = sample(SP2, s)
        assert in_group(e, SP2) and in_lie_algebra(p.X, SP2)


def test_form_pairing_examples():
    assert form_pairing(SP1, (1, 0), (0, 1)) == 1
    assert form_pairing(SP1, (0, 1), (1, 0)) == -1
    assert form_pairing(OE1, (1, 0), (1, 0)) == 0
    assert form_pairing(OO1, (1, 0, 0), (1, 0, 0)) == 1


def test_twisting_element_members():
    for g in all_groups(3):
        assert in_group(twisting_element(g), g)
    alt = GroupDescriptor.from_gram(Mat([[0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, 3], [0, 0, -3, 0]]))
    tw = twisting_element(alt)
    assert tw.delta == -1 and in_group(tw, alt)


def test_symplectic_basis():
    B = Mat([[0, 2, 1, 0], [-2, 0, 0, 1], [-1, 0, 0, 3], [0, -1, -3, 0]])
    P = symplectic_basis(B)
    assert P.T @ B @ P == standard_form(SP2)


def test_group_law():
    rng = random.Random(5)
    for g in all_groups(3):
        tw = twisting_element(g)
        for _ in range(8):
            e1, e2 = random_group_element(g, rng), random_group_element(g, rng)
            if rng.random() < 0.5:
                e1 = compose(g, tw, e1)
            if rng.random() < 0.5:
                e2 = compose(g, tw, e2)
            p = random_point(g, rng)
            e12 = compose(g, e1, e2)
            assert in_group(e12, g)
            assert act(e1, act(e2, p)) == act(e12, p)


def test_conjugation_preserves_lie_algebra():
    rng = random.Random(8)
    for g in all_groups(3):
        e = random_group_element(g, rng)
        X = random_lie_element(g, rng)
        assert in_lie_algebra(e.g @ X @ inverse(e.g), g)


def test_cyclic_span_examples():
    _, d = cyclic_span(Mat([[0, 1], [0, 0]]), (0, 1))
    assert d == 2
    _, d = cyclic_span(Mat.zeros(2), (0, 0))
    assert d == 0
    assert cyclic_basis(Mat([[0, 1], [0, 0]]), (1, 0)) == [(1, 0)]


def test_lie_stabilizer_examples():
    gl2 = GroupDescriptor("gl", 2)
    assert lie_stabilizer_dim(EnhancedPoint(gl2, Mat.zeros(2), (5, 0), (1, 0))) == 1
    assert lie_stabilizer_dim(EnhancedPoint.zero(gl2)) == 4
    assert lie_stabilizer_dim(EnhancedPoint(SP1, Mat([[0, 1], [0, 0]]), (0, 1))) == 0


def test_stabilizer_algebra_really_stabilizes():
    rng = random.Random(2)
    for g in all_groups(2):
        p = random_point(g, rng)
        p = EnhancedPoint(g, Mat.zeros(g.size), p.u, p.v)
        for Z in stabilizer_algebra(p):
            assert in_lie_algebra(Z, g)
            assert not any((Z @ Mat.column(p.u)).col_tuple(0))


def test_span_and_stabilizer_are_orbit_invariants():
    rng = random.Random(4)
    for g in all_groups(2):
        for _ in range(5):
            e = random_group_element(g, rng)
            p = random_point(g, rng)
            q = act(e, p)
            assert cyclic_span(q.X, q.u)[1] == cyclic_span(p.X, p.u)[1]
            assert lie_stabilizer_dim(q) == lie_stabilizer_dim(p)


def test_restricted_gram():
    G = restricted_gram(OE1, [(1, 1)])
    assert G == Mat([[2]])
    assert mat_rank(restricted_gram(SP2, [(1, 0, 0, 0), (0, 0, 1, 0)])) == 2
