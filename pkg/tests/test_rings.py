from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tenred.errors import ParseError, RingMismatchError
from tenred.rings import (
    GF,
    QQ,
    ZZ,
    RingDescriptor,
    Scalar,
    from_int,
    one,
    zero,
)


def test_descriptor_str_round_trip():
    for ring in (ZZ, QQ, GF(2), GF(11), GF(101)):
        assert RingDescriptor.from_str(str(ring)) == ring


def test_descriptor_parse_errors():
    with pytest.raises(ParseError):
        RingDescriptor.from_str("R")
    with pytest.raises(ParseError):
        RingDescriptor.from_str("gf:4")
    with pytest.raises(ParseError):
        RingDescriptor.from_str("gf:x")
    with pytest.raises(ValueError):
        GF(1)
    with pytest.raises(ValueError):
        GF(15)


def test_descriptor_properties():
    assert not ZZ.is_field
    assert QQ.is_field
    assert GF(7).is_field
    assert ZZ.field_size is None
    assert QQ.field_size is None
    assert GF(7).field_size == 7


def test_prime_field_canonicalization():
    p = GF(7)
    assert Scalar(p, 10).value == 3
    assert Scalar(p, -1).value == 6
    assert Scalar(p, 21).is_zero
    assert (Scalar(p, 3) + Scalar(p, 5)).value == 1
    assert (Scalar(p, 3) * Scalar(p, 5)).value == 1
    assert (-Scalar(p, 2)).value == 5


def test_rational_canonicalization():
    x = Scalar(QQ, Fraction(2, 4))
    assert x.value == Fraction(1, 2)
    assert str(x) == "1/2"
    assert str(Scalar(QQ, Fraction(3))) == "3"
    assert str(Scalar(QQ, Fraction(-5, 3))) == "-5/3"


def test_integer_ring_rejects_fractions():
    with pytest.raises(ValueError):
        Scalar(ZZ, Fraction(1, 2))


def test_inverse():
    assert Scalar(QQ, Fraction(2, 3)).inverse().value == Fraction(3, 2)
    assert Scalar(GF(11), 4).inverse().value == 3
    with pytest.raises(ValueError):
        Scalar(ZZ, 2).inverse()
    with pytest.raises(ZeroDivisionError):
        zero(QQ).inverse()
    with pytest.raises(ZeroDivisionError):
        zero(GF(5)).inverse()


def test_power():
    assert Scalar(GF(11), 2).power(10).is_one
    assert Scalar(QQ, Fraction(1, 2)).power(3).value == Fraction(1, 8)
    assert Scalar(ZZ, 5).power(0).is_one
    with pytest.raises(ValueError):
        Scalar(ZZ, 2).power(-1)


def test_ring_mismatch():
    with pytest.raises(RingMismatchError):
        Scalar(QQ, 1) + Scalar(ZZ, 1)
    with pytest.raises(RingMismatchError):
        Scalar(GF(5), 1) * Scalar(GF(7), 1)


def test_scalar_from_str():
    assert Scalar.from_str(QQ, "-3/4").value == Fraction(-3, 4)
    assert Scalar.from_str(ZZ, " 12 ").value == 12
    assert Scalar.from_str(GF(5), "7").value == 2
    with pytest.raises(ParseError):
        Scalar.from_str(QQ, "1/0")
    with pytest.raises(ParseError):
        Scalar.from_str(ZZ, "1/2")
    with pytest.raises(ParseError):
        Scalar.from_str(GF(5), "a")


def _scalars(ring):
    if ring.kind == "prime-field":
        return st.integers(0, ring.modulus - 1).map(lambda n: Scalar(ring, n))
    if ring == QQ:
        return st.builds(
            Fraction, st.integers(-50, 50), st.integers(1, 50)
        ).map(lambda q: Scalar(ring, q))
    return st.integers(-50, 50).map(lambda n: Scalar(ring, n))


@pytest.mark.parametrize("ring", [ZZ, QQ, GF(2), GF(11)], ids=str)
def test_ring_axioms(ring):
    @given(_scalars(ring), _scalars(ring), _scalars(ring))
    def check(a, b, c):
        assert a + b == b + a
        assert a * b == b * a
        assert (a + b) + c == a + (b + c)
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
        assert a + zero(ring) == a
        assert a * one(ring) == a
        assert a + (-a) == zero(ring)
        if ring.is_field and not b.is_zero:
            assert b * b.inverse() == one(ring)

    check()


def test_from_int_embedding():
    assert from_int(GF(3), 5).value == 2
    assert from_int(QQ, 5).value == Fraction(5)
    assert from_int(ZZ, 5).value == 5


def test_sort_key_total_order():
    vals = [Scalar(GF(7), n) for n in (4, 1, 6, 0)]
    assert [s.value for s in sorted(vals, key=Scalar.sort_key)] == [0, 1, 4, 6]
