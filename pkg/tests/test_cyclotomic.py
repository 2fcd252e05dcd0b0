import cmath

import pytest
from hypothesis import given
from hypothesis import strategies as st

from olab.cyclotomic import Cyclotomic
from olab.errors import CharacterError

ORDERS = [1, 2, 3, 4, 5, 6, 8, 12]


@st.composite
def cyclotomics(draw, e: int):
    multiplicities = draw(st.lists(st.integers(-5, 5), min_size=1, max_size=e))
    return Cyclotomic.from_multiplicities(e, multiplicities)


@st.composite
def pairs(draw):
    e = draw(st.sampled_from(ORDERS))
    return draw(cyclotomics(e)), draw(cyclotomics(e))


class TestArithmetic:
    def test_roots_of_unity_sum_to_zero(self) -> None:
        assert Cyclotomic.from_multiplicities(3, [1, 1, 1]) == Cyclotomic.from_int(3, 0)

    def test_i_squared(self) -> None:
        z = Cyclotomic.from_multiplicities(4, [0, 1])
        assert z * z == Cyclotomic.from_int(4, -1)

    def test_conjugate_of_i(self) -> None:
        z = Cyclotomic.from_multiplicities(4, [0, 1])
        assert z.conjugate() == -z

    def test_integer_scaling(self) -> None:
        z = Cyclotomic.from_multiplicities(3, [1, 2])
        assert 3 * z == z * 3
        assert (z * 3).coeffs == (3, 6)

    def test_subtraction(self) -> None:
        z = Cyclotomic.from_multiplicities(5, [0, 1])
        assert (z - z) == Cyclotomic.from_int(5, 0)

    def test_to_int(self) -> None:
        assert Cyclotomic.from_int(6, -2).to_int() == -2

    def test_to_int_rejects_irrationals(self) -> None:
        with pytest.raises(CharacterError, match="not a rational integer"):
            Cyclotomic.from_multiplicities(4, [0, 1]).to_int()

    def test_exact_div(self) -> None:
        value = Cyclotomic.from_multiplicities(3, [4, 2])
        assert value.exact_div(2) == Cyclotomic.from_multiplicities(3, [2, 1])

    def test_inexact_div_raises(self) -> None:
        with pytest.raises(CharacterError, match="not divisible"):
            Cyclotomic.from_multiplicities(3, [3, 2]).exact_div(2)

    def test_mixed_orders_raise(self) -> None:
        with pytest.raises(CharacterError, match="Mixed cyclotomic orders"):
            _ = Cyclotomic.from_int(3, 1) + Cyclotomic.from_int(4, 1)

    def test_str(self) -> None:
        assert str(Cyclotomic.from_multiplicities(4, [1, 2])) == "1 + 2*z"
        assert str(Cyclotomic.from_int(4, 0)) == "0"

    def test_to_complex(self) -> None:
        z = Cyclotomic.from_multiplicities(8, [0, 1])
        assert cmath.isclose(z.to_complex(), cmath.exp(2j * cmath.pi / 8))


class TestProperties:
    @given(pairs())
    def test_multiplication_commutes(self, pair) -> None:
        a, b = pair
        assert a * b == b * a

    @given(pairs())
    def test_complex_embedding_is_a_ring_map(self, pair) -> None:
        a, b = pair
        assert cmath.isclose(
            (a * b).to_complex(), a.to_complex() * b.to_complex(), abs_tol=1e-6
        )
        assert cmath.isclose(
            (a + b).to_complex(), a.to_complex() + b.to_complex(), abs_tol=1e-6
        )

    @given(pairs())
    def test_conjugation(self, pair) -> None:
        a, _ = pair
        assert a.conjugate().conjugate() == a
        assert cmath.isclose(
            a.conjugate().to_complex(), a.to_complex().conjugate(), abs_tol=1e-6
        )
