"""Exact arithmetic in Z[zeta_e], reduced modulo the e-th cyclotomic polynomial."""

import cmath
from dataclasses import dataclass
from functools import lru_cache

from sympy import Poly, Symbol, cyclotomic_poly

from olab.errors import CharacterError

_X = Symbol("x")


@lru_cache(maxsize=64)
def _modulus(e: int) -> tuple[int, ...]:
    """Coefficients of the e-th cyclotomic polynomial, lowest degree first."""
    coeffs = Poly(cyclotomic_poly(e, _X), _X).all_coeffs()
    return tuple(int(c) for c in reversed(coeffs))


def _reduce(e: int, dense: list[int]) -> tuple[int, ...]:
    modulus = _modulus(e)
    n = len(modulus) - 1
    dense = list(dense)
    # the modulus is monic, so plain long division stays in the integers
    for top in range(len(dense) - 1, n - 1, -1):
        c = dense[top]
        if c:
            shift = top - n
            for i, m in enumerate(modulus):
                dense[shift + i] -= c * m
    dense += [0] * (n - len(dense))
    return tuple(dense[:n])


@dataclass(frozen=True)
class Cyclotomic:
    """An element of Z[zeta_e] in the power basis 1, zeta, ..., zeta^(phi(e)-1)."""

    e: int
    coeffs: tuple[int, ...]

    @classmethod
    def from_int(cls, e: int, n: int) -> "Cyclotomic":
        return cls(e, _reduce(e, [n]))

    @classmethod
    def from_multiplicities(cls, e: int, multiplicities: list[int]) -> "Cyclotomic":
        """sum_k m_k zeta^k, the trace of a matrix with eigenvalue multiplicities m."""
        return cls(e, _reduce(e, multiplicities))

    def _check(self, other: "Cyclotomic") -> None:
        if other.e != self.e:
            raise CharacterError(f"Mixed cyclotomic orders {self.e} and {other.e}")

    def __add__(self, other: "Cyclotomic") -> "Cyclotomic":
        self._check(other)
        pairs = zip(self.coeffs, other.coeffs, strict=True)
        return Cyclotomic(self.e, tuple(a + b for a, b in pairs))

    def __neg__(self) -> "Cyclotomic":
        return Cyclotomic(self.e, tuple(-a for a in self.coeffs))

    def __sub__(self, other: "Cyclotomic") -> "Cyclotomic":
        return self + (-other)

    def __mul__(self, other: "Cyclotomic | int") -> "Cyclotomic":
        if isinstance(other, int):
            return Cyclotomic(self.e, tuple(a * other for a in self.coeffs))
        self._check(other)
        dense = [0] * (len(self.coeffs) + len(other.coeffs))
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    dense[i + j] += a * b
        return Cyclotomic(self.e, _reduce(self.e, dense))

    __rmul__ = __mul__

    def conjugate(self) -> "Cyclotomic":
        """Complex conjugation, zeta^k -> zeta^(e-k)."""
        dense = [0] * self.e
        for k, a in enumerate(self.coeffs):
            dense[(-k) % self.e] += a
        return Cyclotomic(self.e, _reduce(self.e, dense))

    @property
    def is_integer(self) -> bool:
        return not any(self.coeffs[1:])

    def to_int(self) -> int:
        if not self.is_integer:
            raise CharacterError(f"{self} is not a rational integer")
        return self.coeffs[0] if self.coeffs else 0

    def exact_div(self, n: int) -> "Cyclotomic":
        """Divide by a rational integer.

        Raises:
            CharacterError: If some coordinate is not divisible by n.
        """
        if any(a % n for a in self.coeffs):
            raise CharacterError(f"{self} is not divisible by {n}")
        return Cyclotomic(self.e, tuple(a // n for a in self.coeffs))

    def to_complex(self) -> complex:
        turns = (cmath.exp(2j * cmath.pi * k / self.e) for k in range(len(self.coeffs)))
        return sum((a * w for a, w in zip(self.coeffs, turns, strict=True)), start=0j)

    def __str__(self) -> str:
        terms = []
        for k, a in enumerate(self.coeffs):
            if not a:
                continue
            if k == 0:
                terms.append(str(a))
            else:
                power = "z" if k == 1 else f"z^{k}"
                terms.append(power if a == 1 else f"{a}*{power}")
        return " + ".join(terms) or "0"
