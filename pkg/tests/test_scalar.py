from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from closedorbits.scalar import (
    ExtensionError,
    Quad,
    as_scalar,
    exact_sqrt,
    extension_of,
    format_scalar,
    parse_scalar,
    squarefree_decompose,
)

rationals = st.fractions(min_value=-50, max_value=50, max_denominator=30)
quads = st.builds(lambda a, b: Quad.make(a, b, 2), rationals, rationals)


@settings(max_examples=1000)
@given(rationals, rationals, rationals)
def test_field_axioms_rational(x, y, z):
    assert (x + y) - y == x
    assert x * (y + z) == x * y + x * z
    assert (x * y) * z == x * (y * z)
    if y:
        assert (x / y) * y == x


@settings(max_examples=300)
@given(quads, quads, quads)
def test_field_axioms_quad(x, y, z):
    assert (x + y) - y == x
    assert x * (y + z) == x * y + x * z
    assert (x * y) * z == x * (y * z)
    if y:
        assert (x / y) * y == x


def test_quad_collapses_to_rational():
    r = Quad(3, 1, 2) - Quad(0, 1, 2)
    assert r == Fraction(3) and isinstance(r, Fraction)
    assert Quad.make(5, 0, 7) == 5


def test_sqrt_products():
    s2 = Quad(0, 1, 2)
    assert s2 * s2 == 2
    i = Quad(0, 1, -1)
    assert i * i == -1


def test_mixed_extensions_rejected():
    with pytest.raises(ExtensionError):
        Quad(0, 1, 2) + Quad(0, 1, 3)
    with pytest.raises(ExtensionError):
        extension_of(Quad(0, 1, 2), Quad(1, 1, 5))


def test_bad_d():
    for d in (0, 1, 4, 12):
        with pytest.raises(ValueError):
            Quad(1, 1, d)


def test_squarefree_decompose():
    assert squarefree_decompose(12) == (3, 2)
    assert squarefree_decompose(-8) == (-2, 2)
    assert squarefree_decompose(1) == (1, 1)


def test_exact_sqrt():
    assert exact_sqrt(Fraction(9, 4)) == (Fraction(3, 2), None)
    root, d = exact_sqrt(Fraction(2))
    assert d == 2 and root * root == 2
    root, d = exact_sqrt(Fraction(8, 9), 2)
    assert root == Quad(0, Fraction(2, 3), 2)
    with pytest.raises(ExtensionError):
        exact_sqrt(3, 2)
    # (1 + sqrt 2)^2 = 3 + 2 sqrt 2
    root, _ = exact_sqrt(Quad(3, 2, 2))
    assert root * root == Quad(3, 2, 2)


def test_serialization_round_trip():
    assert format_scalar(Fraction(-3, 4)) == "-3/4"
    assert format_scalar(7) == "7"
    q = Quad(Fraction(1, 2), -3, 5)
    assert format_scalar(q) == {"a": "1/2", "b": "-3", "d": 5}
    assert parse_scalar(format_scalar(q)) == q
    assert parse_scalar("6/4") == Fraction(3, 2)


def test_floats_rejected():
    with pytest.raises(TypeError):
        parse_scalar(0.5)
    with pytest.raises(TypeError):
        as_scalar(True)
