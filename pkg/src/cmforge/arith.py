"""Exact integer and rational primitives used by every other module.

Everything here is pure and deterministic: the factoring fallback sweeps
Pollard-Brent parameters in a fixed order instead of drawing random starting
points, so repeated runs are reproducible bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt

from .errors import InternalError, ParameterError, UndefinedValuationError

# Bases making Miller-Rabin deterministic for n < 3.3e24; inputs here stay far below.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

_TRIAL_LIMIT = 10 ** 6

#: Marker for the archimedean place in hilbert_symbol.
INFINITE_PLACE = math.inf


def is_prime(n: int) -> bool:
    """Deterministic primality test (Miller-Rabin with fixed bases)."""
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class Factorization:
    """A certified prime factorization of a positive integer."""

    value: int
    factors: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if self.value < 1:
            raise ParameterError(f"cannot factor non-positive integer {self.value}")
        prod = 1
        last = 1
        for p, e in self.factors:
            if p <= last:
                raise InternalError(f"factor primes not increasing: {self.factors}")
            if e < 1:
                raise InternalError(f"non-positive exponent in {self.factors}")
            if not is_prime(p):
                raise InternalError(f"{p} is not prime in {self.factors}")
            prod *= p ** e
            last = p
        if prod != self.value:
            raise InternalError(f"factors {self.factors} do not multiply to {self.value}")

    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.factors)

    def divisors(self) -> list[int]:
        """All positive divisors, sorted."""
        divs = [1]
        for p, e in self.factors:
            divs = [d * p ** k for d in divs for k in range(e + 1)]
        return sorted(divs)

    def is_squarefree(self) -> bool:
        return all(e == 1 for _, e in self.factors)


def _pollard_brent(n: int) -> int:
    """Return a nontrivial factor of composite odd n; deterministic parameter sweep."""
    if n % 2 == 0:
        return 2
    for c in range(1, 1000):
        y, m = 2, 128
        g = r = q = 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                k += m
                g = gcd(q, n)
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = gcd(abs(x - ys), n)
        if g != n:
            return g
    raise InternalError(f"factorization parameter sweep exhausted for {n}")


def factorize(n: int) -> Factorization:
    """Factor a positive integer; n = 1 yields the empty product."""
    if not isinstance(n, int):
        raise ParameterError(f"factorize expects an integer, got {n!r}")
    if n < 1:
        raise ParameterError(f"cannot factor non-positive integer {n}")
    value = n
    counts: dict[int, int] = {}
    for p in (2, 3, 5):
        while n % p == 0:
            counts[p] = counts.get(p, 0) + 1
            n //= p
    # 30-wheel trial division
    f = 7
    increments = (4, 2, 4, 2, 4, 6, 2, 6)
    i = 0
    while f * f <= n and f <= _TRIAL_LIMIT:
        while n % f == 0:
            counts[f] = counts.get(f, 0) + 1
            n //= f
        f += increments[i]
        i = (i + 1) % 8
    stack = [n] if n > 1 else []
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_prime(m):
            counts[m] = counts.get(m, 0) + 1
            continue
        d = _pollard_brent(m)
        stack.append(d)
        stack.append(m // d)
    return Factorization(value, tuple(sorted(counts.items())))


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a|n), completely multiplicative in n."""
    if a == 0 and n == 0:
        raise ParameterError("kronecker(0, 0) is undefined")
    if n == 0:
        return 1 if a in (1, -1) else 0
    sign = 1
    if n < 0:
        n = -n
        if a < 0:
            sign = -sign
    if n % 2 == 0:
        if a % 2 == 0:
            return 0
        two = 1 if a % 8 in (1, 7) else -1
        while n % 2 == 0:
            n //= 2
            sign *= two
    # Jacobi loop on odd positive n
    a %= n
    result = sign
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def ord_q(x, q: int) -> int:
    """q-adic valuation of a nonzero rational."""
    if not is_prime(q):
        raise ParameterError(f"{q} is not prime")
    x = Fraction(x)
    if x == 0:
        raise UndefinedValuationError("valuation of zero is undefined")
    return _int_ord(x.numerator, q) - _int_ord(x.denominator, q)


def _int_ord(n: int, q: int) -> int:
    n = abs(n)
    v = 0
    while n % q == 0:
        n //= q
        v += 1
    return v


def _unit_mod(x: Fraction, modulus: int) -> int:
    """Residue of a rational that is a unit at every prime of the modulus."""
    num = x.numerator % modulus
    den = x.denominator % modulus
    return num * pow(den, -1, modulus) % modulus


def hilbert_symbol(a, b, q) -> int:
    """Local Hilbert symbol (a, b)_q for a prime q or the infinite place."""
    a = Fraction(a)
    b = Fraction(b)
    if a == 0 or b == 0:
        raise ParameterError("hilbert symbol requires nonzero arguments")
    if q == INFINITE_PLACE:
        return -1 if (a < 0 and b < 0) else 1
    q = int(q)
    alpha = ord_q(a, q)
    beta = ord_q(b, q)
    u = a / Fraction(q) ** alpha
    v = b / Fraction(q) ** beta
    if q == 2:
        # epsilon(x) = (x-1)/2, omega(x) = (x^2-1)/8, both mod 2, via x mod 8
        um, vm = _unit_mod(u, 8), _unit_mod(v, 8)
        eps_u, eps_v = (um - 1) // 2 % 2, (vm - 1) // 2 % 2
        om_u, om_v = (um * um - 1) // 8 % 2, (vm * vm - 1) // 8 % 2
        exponent = eps_u * eps_v + alpha * om_v + beta * om_u
        return -1 if exponent % 2 else 1
    sign = -1 if (alpha % 2) and (beta % 2) and (q - 1) // 2 % 2 else 1
    if beta % 2:
        sign *= kronecker(_unit_mod(u, q), q)
    if alpha % 2:
        sign *= kronecker(_unit_mod(v, q), q)
    return sign


def is_fundamental_discriminant(disc: int) -> bool:
    """True iff disc is the discriminant of an imaginary quadratic ring of integers."""
    if disc >= 0:
        raise ParameterError(f"expected a negative discriminant, got {disc}")
    if disc % 4 == 1:
        return factorize(-disc).is_squarefree()
    if disc % 4 == 0:
        quarter = disc // 4
        return quarter % 4 in (2, 3) and factorize(-quarter).is_squarefree()
    return False
