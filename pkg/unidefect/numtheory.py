"""Define exact integer number theory helpers."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
import math

from .errors import InvalidParameterError

MAX_FACTORIZABLE = 2**32


@dataclass(frozen=True)
class Factorization:
    """Define N = prod p_j^k_j with primes in strictly decreasing order."""

    primes: tuple[int, ...]
    exponents: tuple[int, ...]

    @property
    def value(self) -> int:
        """Return the factorized integer."""
        return math.prod(p**k for p, k in zip(self.primes, self.exponents))

    def items(self) -> list[tuple[int, int]]:
        """Return (prime, exponent) pairs."""
        return list(zip(self.primes, self.exponents))


def _require_positive(*values: int) -> None:
    """Reject anything that is not a positive integer."""
    for value in values:
        if isinstance(value, bool) or not isinstance(value, int) or value < 1:
            raise InvalidParameterError(f"Expected a positive integer, got {value!r}")


def gcd_lcm(a: int, b: int) -> tuple[int, int]:
    """Return (gcd(a, b), lcm(a, b))."""
    _require_positive(a, b)
    gcd = math.gcd(a, b)
    return gcd, a // gcd * b


@lru_cache(maxsize=4096, typed=True)
def factorize(number: int) -> Factorization:
    """Return the prime factorization of a positive integer by trial division."""
    _require_positive(number)
    if number > MAX_FACTORIZABLE:
        raise InvalidParameterError(f"Refusing to factorize {number} > 2^32")

    found: dict[int, int] = {}
    remaining = number
    divisor = 2
    while divisor * divisor <= remaining:
        while remaining % divisor == 0:
            found[divisor] = found.get(divisor, 0) + 1
            remaining //= divisor
        divisor += 1 if divisor == 2 else 2
    if remaining > 1:
        found[remaining] = found.get(remaining, 0) + 1

    primes = tuple(sorted(found, reverse=True))
    return Factorization(primes, tuple(found[p] for p in primes))


def is_prime(number: int) -> bool:
    """Return whether an integer is prime."""
    if isinstance(number, bool) or not isinstance(number, int) or number < 2:
        return False
    return factorize(number).exponents == (1,)


def divisors(number: int) -> list[int]:
    """Return the positive divisors of a number in ascending order."""
    result = [1]
    for prime, exponent in factorize(number).items():
        result = [d * prime**e for d in result for e in range(exponent + 1)]
    return sorted(result)


def euler_phi(number: int) -> int:
    """Return Euler's totient."""
    result = number
    for prime in factorize(number).primes:
        result = result // prime * (prime - 1)
    return result


def moebius(number: int) -> int:
    """Return the Moebius function: (-1)^s for squarefree numbers, else 0."""
    factors = factorize(number)
    if any(exponent > 1 for exponent in factors.exponents):
        return 0
    return -1 if len(factors.primes) % 2 else 1


def psi(number: int) -> Fraction:
    """Return phi(M) / M."""
    return Fraction(euler_phi(number), number)


def psi_le(number: int) -> Fraction:
    """Return the sum of psi(M / d) over the divisors d of M."""
    return sum((psi(number // d) for d in divisors(number)), Fraction(0))


def euler_product(number: int) -> Fraction:
    """Return prod (1 + k_j - k_j / p_j) over the factorization of N."""
    result = Fraction(1)
    for prime, exponent in factorize(number).items():
        result *= 1 + exponent - Fraction(exponent, prime)
    return result
