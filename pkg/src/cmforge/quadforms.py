"""Binary quadratic forms: reduction, class numbers, Heegner representatives.

A form (a, b, c) of negative discriminant with p | a and b in a fixed residue
class mod 2p carries a CM point (-b + sqrt(disc)) / (2a); this module picks one
such form per equivalence class, deterministically.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd, isqrt

from .arith import factorize, is_fundamental_discriminant, is_prime
from .errors import EnumerationExhaustedError, InternalError, ParameterError


@dataclass(frozen=True)
class QuadraticForm:
    a: int
    b: int
    c: int

    @property
    def discriminant(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def is_positive_definite(self) -> bool:
        return self.discriminant < 0 and self.a > 0

    def is_primitive(self) -> bool:
        return gcd(gcd(self.a, self.b), self.c) == 1

    def __str__(self):
        return f"({self.a}, {self.b}, {self.c})"


@dataclass(frozen=True)
class HeegnerPoint:
    """The point (-b + i*sqrt(-disc)) / (2a), stored exactly."""

    b: int
    a: int
    disc: int

    def __post_init__(self):
        if self.a <= 0:
            raise ParameterError("Heegner point needs a positive leading coefficient")
        if self.disc >= 0:
            raise ParameterError("Heegner point needs a negative discriminant")

    def __str__(self):
        return f"(-{self.b} + sqrt({self.disc})) / {2 * self.a}"


def reduce(f: QuadraticForm) -> QuadraticForm:
    """Canonical representative under unimodular equivalence.

    Output satisfies |b| <= a <= c with b >= 0 whenever |b| = a or a = c.
    """
    if not f.is_positive_definite():
        raise ParameterError(f"form {f} is not positive definite")
    a, b, c = f.a, f.b, f.c
    while True:
        if not -a < b <= a:
            r = (a - b) // (2 * a)
            c = a * r * r + b * r + c
            b = b + 2 * r * a
        if a > c:
            a, b, c = c, -b, a
            continue
        break
    if a == c and b < 0:
        b = -b
    out = QuadraticForm(a, b, c)
    assert out.discriminant == f.discriminant
    return out


def class_number(disc: int) -> int:
    """Number of classes of primitive positive-definite forms of discriminant disc."""
    if not is_fundamental_discriminant(disc):
        raise ParameterError(f"{disc} is not a fundamental discriminant")
    count = 0
    a = 1
    while 3 * a * a <= -disc:
        for b in range(-a + 1, a + 1):
            if (b * b - disc) % (4 * a):
                continue
            c = (b * b - disc) // (4 * a)
            if c < a:
                continue
            if a == c and b < 0:
                continue
            if gcd(gcd(a, b), c) != 1:
                continue
            count += 1
        a += 1
    return count


def admissible_residues(disc: int, p: int) -> list[int]:
    """All residues beta mod 2p with beta^2 = disc mod 4p; empty if none exist."""
    if not is_prime(p):
        raise ParameterError(f"{p} is not prime")
    if not is_fundamental_discriminant(disc):
        raise ParameterError(f"{disc} is not a fundamental discriminant")
    modulus = 4 * p
    return [beta for beta in range(2 * p) if (beta * beta - disc) % modulus == 0]


def heegner_reps(disc: int, p: int, beta: int) -> list[QuadraticForm]:
    """One form (a, b, c) per class, with p | a and b = beta mod 2p.

    Exactly class_number(disc) forms are returned.  Candidates are scanned by
    increasing |b| level; within the scanned window the representative of each
    class minimizes (a, |b|, b), which makes the choice deterministic.
    """
    if not is_prime(p):
        raise ParameterError(f"{p} is not prime")
    if not is_fundamental_discriminant(disc):
        raise ParameterError(f"{disc} is not a fundamental discriminant")
    if (beta * beta - disc) % (4 * p):
        raise ParameterError(f"residue {beta} is not admissible for disc {disc} mod {4 * p}")
    h = class_number(disc)
    b0 = beta % (2 * p)
    bound = 2 * p * h * (isqrt(-disc) + 1)
    best: dict[QuadraticForm, tuple[tuple[int, int, int], QuadraticForm]] = {}
    level = 0
    while True:
        offsets = (0,) if level == 0 else (-level, level)
        bs = [b0 + 2 * p * j for j in offsets]
        if min(abs(b) for b in bs) > bound:
            raise EnumerationExhaustedError(
                f"found {len(best)} of {h} classes for disc {disc}, p={p}, "
                f"beta={beta} within |b| <= {bound}"
            )
        for b in bs:
            n4 = b * b - disc
            if n4 % (4 * p):
                raise InternalError(f"b={b} violates the admissibility congruence")
            nb = n4 // (4 * p)
            for k in factorize(nb).divisors():
                cand = QuadraticForm(p * k, b, nb // k)
                if not cand.is_primitive():
                    continue
                assert cand.discriminant == disc
                red = reduce(cand)
                key = (cand.a, abs(b), b)
                cur = best.get(red)
                if cur is None or key < cur[0]:
                    best[red] = (key, cand)
        if len(best) > h:
            raise InternalError(f"more than h({disc}) = {h} classes enumerated")
        if len(best) == h:
            reps = [cand for _, cand in best.values()]
            reps.sort(key=lambda f: (f.a, abs(f.b), f.b, f.c))
            return reps
        level += 1


def heegner_point(f: QuadraticForm) -> HeegnerPoint:
    """CM point attached to a positive-definite form."""
    if not f.is_positive_definite():
        raise ParameterError(f"form {f} is not positive definite")
    return HeegnerPoint(b=f.b, a=f.a, disc=f.discriminant)
