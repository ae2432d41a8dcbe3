"""Exact evaluation of the CM-norm lattice sum as a formal prime-log combination.

gz_log_norm(params) returns the logarithm of the 8th-power norm
prod prod |j_p*(tau_{Q_D}) - j_p*(tau_{Q_d})|^8 as an exact map
prime -> exponent, assembled from finitely many lattice terms.  Each term
(sign, y, n) carries m = d/(4p) - t^2/(4 g^2 p D) with
t = g*mu*(sign*beta) - 2npD - 2gpy, and contributes only when the local
obstruction set of m is a single prime.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, isqrt

from .arith import is_fundamental_discriminant, is_prime, kronecker, ord_q
from .cmvalue import KappaContext, diff_set, o_of_m, rho_checked
from .errors import IntegralityError, InternalError, ParameterError
from .quadforms import admissible_residues

RAMIFIED_OF_M = "of_m"
RAMIFIED_OF_MD = "of_mD"
#: "of_mD" uses ord_q(m*D) as the ramified-term exponent, "of_m" uses ord_q(m).
#: The numeric cross-check singles out "of_mD"; "of_m" is kept for comparison.
DEFAULT_RAMIFIED_EXPONENT = RAMIFIED_OF_MD

_RAMIFIED_CHOICES = (RAMIFIED_OF_M, RAMIFIED_OF_MD)


@dataclass(frozen=True)
class GZParams:
    """Validated input tuple (p, d, D, mu, beta) plus the derived gcd g."""

    p: int
    d: int
    D: int
    mu: int
    beta: int
    g: int = field(init=False)

    def __post_init__(self):
        if not is_prime(self.p):
            raise ParameterError(f"{self.p} is not prime")
        for name, value in (("d", self.d), ("D", self.D)):
            if value <= 4:
                raise ParameterError(f"{name} must exceed 4, got {value}")
            if not is_fundamental_discriminant(-value):
                raise ParameterError(f"-{value} is not a fundamental discriminant")
        if self.d == self.D:
            raise ParameterError("d and D must be distinct")
        object.__setattr__(self, "mu", self.mu % (2 * self.p))
        object.__setattr__(self, "beta", self.beta % (2 * self.p))
        if (self.mu * self.mu + self.D) % (4 * self.p):
            raise ParameterError(
                f"mu={self.mu} is not admissible for -{self.D} mod {4 * self.p}"
            )
        if (self.beta * self.beta + self.d) % (4 * self.p):
            raise ParameterError(
                f"beta={self.beta} is not admissible for -{self.d} mod {4 * self.p}"
            )
        # gcd(0, 2p) = 2p covers the mu = 0 convention
        object.__setattr__(self, "g", gcd(self.mu, 2 * self.p))

    @classmethod
    def create(cls, p: int, d: int, D: int, mu: int | None = None,
               beta: int | None = None) -> "GZParams":
        """Build params, auto-selecting the smallest admissible residues."""
        for name, value in (("d", d), ("D", D)):
            if value <= 4:
                raise ParameterError(f"{name} must exceed 4, got {value}")
        if mu is None:
            mu = _smallest_residue(-D, p)
        if beta is None:
            beta = _smallest_residue(-d, p)
        return cls(p=p, d=d, D=D, mu=mu, beta=beta)


def _smallest_residue(disc: int, p: int) -> int:
    residues = admissible_residues(disc, p)
    if not residues:
        raise ParameterError(f"{disc} is not a square mod {4 * p}")
    return residues[0]


@dataclass(frozen=True)
class LatticeTerm:
    """One admissible (sign, y, n) triple with its t and m."""

    n: int
    y: int
    sign: int  # +1 for the beta sum, -1 for the mirrored sum
    t: int
    m: Fraction


@dataclass
class PrimeLogSum:
    """Finite formal sum of e_q * log(q) with exact rational exponents."""

    exponents: dict[int, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        cleaned = {}
        for q, e in self.exponents.items():
            e = Fraction(e)
            if e:
                cleaned[int(q)] = e
        self.exponents = cleaned

    def __add__(self, other: "PrimeLogSum") -> "PrimeLogSum":
        merged = dict(self.exponents)
        for q, e in other.exponents.items():
            merged[q] = merged.get(q, Fraction(0)) + e
        return PrimeLogSum(merged)

    def is_zero(self) -> bool:
        return not self.exponents

    def items(self) -> list[tuple[int, Fraction]]:
        return sorted(self.exponents.items())

    def log_value(self) -> float:
        return math.fsum(float(e) * math.log(q) for q, e in self.exponents.items())

    def log_value_mpf(self, ctx):
        """Value as an mpf in the supplied mpmath context."""
        total = ctx.mpf(0)
        for q, e in self.items():
            total += ctx.mpf(e.numerator) / e.denominator * ctx.log(q)
        return total

    def nonnegative_integral(self) -> bool:
        return all(e.denominator == 1 and e >= 0 for e in self.exponents.values())


@dataclass(frozen=True)
class NormMagnitude:
    """Exact positive magnitude as a product of prime powers prod q^(e_q)."""

    factors: tuple[tuple[int, Fraction], ...]

    @property
    def is_integral(self) -> bool:
        return all(e.denominator == 1 and e >= 0 for _, e in self.factors)

    def as_integer(self) -> int:
        if not self.is_integral:
            raise ParameterError(f"magnitude {self} is not an integer")
        value = 1
        for q, e in self.factors:
            value *= q ** int(e)
        return value

    def __float__(self):
        return math.exp(math.fsum(float(e) * math.log(q) for q, e in self.factors))

    def __str__(self):
        if not self.factors:
            return "1"
        if self.is_integral:
            return str(self.as_integer())
        return "*".join(
            f"{q}^({e})" if e.denominator != 1 else f"{q}^{e}" for q, e in self.factors
        )


def enumerate_terms(params: GZParams) -> list[LatticeTerm]:
    """All lattice terms for both the beta and the -beta sums, in (sign, y, n) order."""
    p, d, D, g = params.p, params.d, params.D, params.g
    dD = d * D
    if isqrt(dD) ** 2 == dD:
        raise InternalError(f"d*D = {dD} is a perfect square; impossible for distinct "
                            "fundamental discriminants")
    if D % g:
        raise InternalError(f"g = {g} does not divide D = {D}")
    bound_sq = g * g * dD
    s_max = isqrt(bound_sq - 1)  # largest |t| with t^2 < g^2 dD
    step = 2 * p * D
    terms = []
    for sign in (1, -1):
        for y in range(D // g):
            head = g * params.mu * (sign * params.beta) - 2 * g * p * y
            n_lo = -((s_max - head) // step)
            n_hi = (head + s_max) // step
            for n in range(n_lo, n_hi + 1):
                t = head - step * n
                if t * t >= bound_sq:
                    raise InternalError(f"enumeration bound violated at t={t}")
                m = Fraction(d, 4 * p) - Fraction(t * t, 4 * g * g * p * D)
                if m <= 0:
                    raise InternalError(f"non-positive m for term (sign={sign}, y={y}, n={n})")
                if (m * D).denominator != 1:
                    raise IntegralityError(
                        f"m*D = {m * D} is not integral for term (sign={sign}, y={y}, n={n})"
                    )
                terms.append(LatticeTerm(n=n, y=y, sign=sign, t=t, m=m))
    return terms


def term_contribution(term: LatticeTerm, params: GZParams,
                      ramified_exponent: str = DEFAULT_RAMIFIED_EXPONENT) -> PrimeLogSum:
    """Weighted prime-log contribution of one lattice term.

    Zero unless the obstruction set of m is a single prime q.  The weight
    2^(o(m)+1) includes a factor 2 because both orientations of the CM plane
    contribute one copy of the lattice sum.
    """
    if ramified_exponent not in _RAMIFIED_CHOICES:
        raise ParameterError(f"unknown ramified_exponent {ramified_exponent!r}")
    ctx = KappaContext(D=params.D, ideal_norm=params.p)
    m = term.m
    obstructed = diff_set(m, ctx)
    if len(obstructed) != 1:
        return PrimeLogSum()
    q = obstructed[0]
    md = m * params.D
    weight = 2 ** (o_of_m(m, params.D) + 1)
    chi = kronecker(-params.D, q)
    if chi == -1:
        try:
            coeff = weight * (ord_q(m, q) + 1) * rho_checked(md / q, params.D)
        except IntegralityError as exc:
            raise IntegralityError(f"{exc} (term sign={term.sign}, y={term.y}, n={term.n})") from exc
    elif chi == 0:
        order = ord_q(md, q) if ramified_exponent == RAMIFIED_OF_MD else ord_q(m, q)
        coeff = weight * order * rho_checked(md, params.D)
    else:
        raise InternalError(f"split prime {q} appeared in the obstruction set of m={m}")
    if coeff == 0:
        return PrimeLogSum()
    return PrimeLogSum({q: Fraction(coeff)})


def gz_log_norm(params: GZParams,
                ramified_exponent: str = DEFAULT_RAMIFIED_EXPONENT) -> PrimeLogSum:
    """Exact log of the 8th-power norm as a prime-log sum."""
    total = PrimeLogSum()
    for term in enumerate_terms(params):
        total = total + term_contribution(term, params, ramified_exponent)
    return total


def norm_magnitude(params: GZParams,
                   ramified_exponent: str = DEFAULT_RAMIFIED_EXPONENT) -> NormMagnitude:
    """Unsigned norm prod prod |j*(tau_{Q_D}) - j*(tau_{Q_d})| as an exact magnitude.

    Exponents are eighth parts of the assembled log-norm exponents; an
    integer exactly when every assembled exponent is divisible by 8.
    """
    pls = gz_log_norm(params, ramified_exponent)
    return NormMagnitude(tuple((q, e / 8) for q, e in pls.items()))
