"""Class polynomial construction from exact norm magnitudes.

The pipeline: pick the base discriminant that pins the generator's zero,
compute the exact magnitudes (X_D, Y_D) for every usable degree-one
discriminant, resolve the two sign strings, and interpolate a monic integer
polynomial of degree h(-d) in exact rational arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product

import mpmath

from .arith import is_fundamental_discriminant, is_prime
from .errors import (
    AmbiguousSignsError,
    DegenerateDataError,
    InfeasibleError,
    InternalError,
    NonIntegralMagnitudeError,
    ParameterError,
    SeriesRequiredError,
    SignResolutionError,
)
from .gzrhs import DEFAULT_RAMIFIED_EXPONENT, GZParams, NormMagnitude, norm_magnitude
from .hauptmodul import (
    DEFAULT_PRECISION,
    ETA_QUOTIENT_PRIMES,
    PrecisionConfig,
    _value_with_bound,
    heegner_point,
)
from .quadforms import admissible_residues, class_number, heegner_reps

#: Primes whose Fricke curve has genus zero.
GENUS_ZERO_FRICKE_PRIMES = frozenset(
    (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 41, 47, 59, 71)
)

#: The nine imaginary quadratic fields with trivial class group.
CLASS_NUMBER_ONE_DISCRIMINANTS = (-3, -4, -7, -8, -11, -19, -43, -67, -163)

SIGN_STRATEGIES = ("search", "numeric")


def s_set(p: int) -> list[int]:
    """Degree-one discriminants that are squares mod 4p, by increasing |D|."""
    if p not in GENUS_ZERO_FRICKE_PRIMES:
        raise ParameterError(f"p={p}: the Fricke curve is not genus zero")
    return [disc for disc in CLASS_NUMBER_ONE_DISCRIMINANTS if admissible_residues(disc, p)]


def usable_s_set(p: int) -> list[int]:
    """s_set members with |D| > 4 (the ones the norm formula accepts)."""
    return [disc for disc in s_set(p) if disc < -4]


def feasible(d: int, p: int) -> bool:
    """Whether h(-d)+1 interpolation pairs can exist at all."""
    if not is_fundamental_discriminant(-d):
        raise ParameterError(f"-{d} is not a fundamental discriminant")
    if not admissible_residues(-d, p):
        raise ParameterError(f"-{d} is not a square mod {4 * p}")
    return class_number(-d) + 1 <= len(usable_s_set(p))


@dataclass
class InterpolationPair:
    """One (X_D, Y_D) magnitude pair; signs start unresolved (None)."""

    D: int
    x_mag: int
    y_mag: int
    x_sign: int | None = None
    y_sign: int | None = None

    def __post_init__(self):
        if self.y_mag <= 0 or self.x_mag < 0:
            raise InternalError(f"magnitudes out of range for D={self.D}")

    @property
    def resolved(self) -> bool:
        return (self.x_sign is not None or self.x_mag == 0) and self.y_sign is not None

    def signed_x(self) -> int:
        if self.x_mag == 0:
            return 0
        if self.x_sign is None:
            raise SignResolutionError(f"x sign unresolved for D={self.D}")
        return self.x_sign * self.x_mag

    def signed_y(self) -> int:
        if self.y_sign is None:
            raise SignResolutionError(f"y sign unresolved for D={self.D}")
        return self.y_sign * self.y_mag


@dataclass(frozen=True)
class ClassPolynomial:
    """Monic integer polynomial of degree h(-d); coefficients low degree first."""

    d: int
    coefficients: tuple[int, ...]

    def __post_init__(self):
        if not self.coefficients or self.coefficients[-1] != 1:
            raise InternalError(f"polynomial for d={self.d} is not monic")
        if any(not isinstance(c, int) for c in self.coefficients):
            raise InternalError("coefficients must be integers")
        if self.degree != class_number(-self.d):
            raise InternalError(
                f"degree {self.degree} differs from the class number of -{self.d}"
            )
        for root_num in _rational_root_candidates(self.coefficients):
            if self.evaluate(root_num) == 0 and self.degree > 1:
                raise InternalError(f"reducible: rational root {root_num}")

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def evaluate(self, x) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coefficients):
            acc = acc * x + c
        return acc

    def __str__(self):
        parts = []
        for k in range(self.degree, -1, -1):
            c = self.coefficients[k]
            if c == 0:
                continue
            mag = abs(c)
            if k == 0:
                body = str(mag)
            elif k == 1:
                body = "X" if mag == 1 else f"{mag}X"
            else:
                body = f"X^{k}" if mag == 1 else f"{mag}X^{k}"
            if not parts:
                parts.append(body if c > 0 else f"-{body}")
            else:
                parts.append(f"+ {body}" if c > 0 else f"- {body}")
        return " ".join(parts) if parts else "0"


def _rational_root_candidates(coefficients):
    # monic, so rational roots are integer divisors of the constant term
    constant = coefficients[0]
    if constant == 0:
        return [0]
    divs = [k for k in range(1, abs(constant) + 1) if constant % k == 0]
    return [s * k for k in divs for s in (1, -1)]


def is_irreducible(poly: ClassPolynomial, prime_limit: int = 100):
    """Best-effort irreducibility check: True, False, or None when inconclusive."""
    coeffs = poly.coefficients
    if poly.degree == 1:
        return True
    for cand in _rational_root_candidates(coeffs):
        if poly.evaluate(cand) == 0:
            return False
    for q in range(2, prime_limit):
        if not is_prime(q) or coeffs[0] % q == 0:
            continue
        if _irreducible_mod_q(coeffs, q):
            return True
    return None


def _irreducible_mod_q(coeffs, q):
    """Irreducibility over the field with q elements, by gcd with x^(q^k) - x."""
    n = len(coeffs) - 1
    mod = [c % q for c in coeffs]

    def polymod(a):
        a = [c % q for c in a]
        while len(a) > n:
            lead = a[-1]
            if lead:
                shift = len(a) - 1 - n
                for i in range(n + 1):
                    a[shift + i] = (a[shift + i] - lead * mod[i]) % q
            a.pop()
        return a

    def mulmod(a, b):
        out = [0] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    out[i + j] = (out[i + j] + ai * bj) % q
        return polymod(out)

    def powx(e):
        result = [1]
        base = polymod([0, 1])
        while e:
            if e & 1:
                result = mulmod(result, base)
            e >>= 1
            if e:
                base = mulmod(base, base)
        return result

    def gcd_deg(a, b):
        a, b = [c % q for c in a], [c % q for c in b]
        while any(b):
            while b and b[-1] == 0:
                b.pop()
            if not b:
                break
            inv = pow(b[-1], -1, q)
            while len(a) >= len(b) and any(a):
                while a and a[-1] == 0:
                    a.pop()
                if len(a) < len(b):
                    break
                coef = a[-1] * inv % q
                shift = len(a) - len(b)
                for i in range(len(b)):
                    a[shift + i] = (a[shift + i] - coef * b[i]) % q
            a, b = b, a
        while a and a[-1] == 0:
            a.pop()
        return len(a) - 1 if a else -1

    for k in range(1, n // 2 + 1):
        xqk = powx(q ** k)
        diff = list(xqk)
        if len(diff) < 2:
            diff += [0] * (2 - len(diff))
        diff[1] = (diff[1] - 1) % q
        if gcd_deg(mod, diff) > 0:
            return False
    return True


def _integral_magnitude(mag: NormMagnitude, what: str) -> int:
    if not mag.is_integral:
        raise NonIntegralMagnitudeError(f"{what} = {mag} is not an integer")
    return mag.as_integer()


def build_pairs(d: int, beta: int, p: int, base_disc: int,
                ramified_exponent: str = DEFAULT_RAMIFIED_EXPONENT) -> list[InterpolationPair]:
    """Magnitude pairs over the usable degree-one discriminants.

    The diagonal D = d (possible when d itself has class number one) is
    skipped: its Y vanishes identically and the norm formula requires
    distinct discriminants.
    """
    usable = usable_s_set(p)
    if base_disc not in usable:
        raise ParameterError(f"base discriminant {base_disc} is not usable for p={p}")
    if -base_disc == d:
        raise ParameterError("base discriminant must differ from d")
    pairs = []
    for disc in usable:
        D = -disc
        if D == d:
            continue
        if disc == base_disc:
            x = 0
        else:
            x_params = GZParams.create(p=p, d=-base_disc, D=D)
            x = _integral_magnitude(norm_magnitude(x_params, ramified_exponent), f"X_{D}")
        y_params = GZParams.create(p=p, d=d, D=D, beta=beta)
        y = _integral_magnitude(norm_magnitude(y_params, ramified_exponent), f"Y_{D}")
        pairs.append(InterpolationPair(D=D, x_mag=x, y_mag=y))
    return pairs


def _lagrange(xs, ys):
    """Exact interpolation; coefficients low degree first, length len(xs)."""
    n = len(xs)
    coeffs = [Fraction(0)] * n
    for i in range(n):
        # numerator polynomial prod_{j != i} (X - x_j), built incrementally
        num = [Fraction(1)]
        denom = Fraction(1)
        for j in range(n):
            if j == i:
                continue
            num = [Fraction(0)] + num
            for k in range(len(num) - 1):
                num[k] -= xs[j] * num[k + 1]
            denom *= xs[i] - xs[j]
        scale = Fraction(ys[i]) / denom
        for k in range(len(num)):
            coeffs[k] += scale * num[k]
    return coeffs


def _monic_integer_of_degree(coeffs, h):
    """Integer coefficient tuple when coeffs is monic of exact degree h, else None."""
    for k in range(h + 1, len(coeffs)):
        if coeffs[k] != 0:
            return None
    if len(coeffs) <= h or coeffs[h] != 1:
        return None
    if any(c.denominator != 1 for c in coeffs[: h + 1]):
        return None
    return tuple(int(c) for c in coeffs[: h + 1])


def _mirror_coeffs(coeffs):
    h = len(coeffs) - 1
    return tuple(c if (h - k) % 2 == 0 else -c for k, c in enumerate(coeffs))


def resolve_signs(pairs: list[InterpolationPair], d: int, strategy: str = "search",
                  p: int | None = None, base_disc: int | None = None,
                  beta: int | None = None,
                  prec: PrecisionConfig | None = None,
                  series=None) -> list[InterpolationPair]:
    """Fill in the sign strings of the magnitude pairs.

    search: accept exactly the sign assignments whose interpolant is a monic
    integer polynomial of degree h(-d); unique up to the global mirror
    (X, Y) -> (-X, (-1)^h Y), canonicalized to the lexicographically smaller
    coefficient tuple.  numeric: read the signs off high-precision values of
    the generator (closed forms for p in {2,3,5,7,13}, otherwise a series).
    """
    if strategy not in SIGN_STRATEGIES:
        raise ParameterError(f"unknown sign strategy {strategy!r}")
    h = class_number(-d)
    if len(pairs) < h + 1:
        raise InfeasibleError(
            f"need {h + 1} interpolation pairs, only {len(pairs)} available"
        )
    if strategy == "search":
        return _resolve_by_search(pairs, h)
    return _resolve_by_numerics(pairs, d, p, base_disc, beta, prec, series)


def _resolve_by_search(pairs, h):
    zero_idx = [i for i, pr in enumerate(pairs) if pr.x_mag == 0]
    if len(zero_idx) > 1:
        raise DegenerateDataError("more than one zero X magnitude")
    nonzero_idx = [i for i, pr in enumerate(pairs) if pr.x_mag != 0]
    if not nonzero_idx:
        raise DegenerateDataError("all X magnitudes vanish")
    free_x = nonzero_idx[1:]  # first nonzero X fixed +1; mirror restores the other half
    accepted = []
    for x_bits in product((1, -1), repeat=len(free_x)):
        xs = [0] * len(pairs)
        for i in zero_idx:
            xs[i] = 0
        xs[nonzero_idx[0]] = pairs[nonzero_idx[0]].x_mag
        for i, s in zip(free_x, x_bits):
            xs[i] = s * pairs[i].x_mag
        if len(set(xs)) != len(xs):
            continue
        for y_bits in product((1, -1), repeat=len(pairs)):
            ys = [s * pr.y_mag for s, pr in zip(y_bits, pairs)]
            coeffs = _monic_integer_of_degree(_lagrange(xs, ys), h)
            if coeffs is not None:
                accepted.append((xs, y_bits, coeffs))
    if not accepted:
        raise SignResolutionError("no sign assignment yields a monic integer polynomial")
    distinct = sorted({coeffs for _, _, coeffs in accepted})
    if len(distinct) > 1:
        raise AmbiguousSignsError(
            f"{len(distinct)} distinct integer polynomials fit the magnitudes",
            candidates=distinct,
        )
    xs, y_bits, coeffs = accepted[0]
    mirrored = _mirror_coeffs(coeffs)
    if list(mirrored) < list(coeffs):
        xs = [-x for x in xs]
        y_bits = tuple(s if h % 2 == 0 else -s for s in y_bits)
    for pr, x, ysign in zip(pairs, xs, y_bits):
        pr.x_sign = None if pr.x_mag == 0 else (1 if x > 0 else -1)
        pr.y_sign = ysign
    return pairs


def _resolve_by_numerics(pairs, d, p, base_disc, beta, prec, series):
    if p is None or base_disc is None or beta is None:
        raise ParameterError("numeric strategy needs p, base_disc and beta")
    if series is None and p not in ETA_QUOTIENT_PRIMES:
        raise SeriesRequiredError(
            f"numeric sign resolution for p={p} needs series data"
        )
    prec = prec or DEFAULT_PRECISION
    ctx = prec.context()
    tol = ctx.mpf(10) ** (-prec.decimal_digits // 4)

    def values_at(disc, residue):
        reps = heegner_reps(disc, p, residue)
        return [
            _value_with_bound(p, heegner_point(f), prec, ctx, series)[0] for f in reps
        ]

    base_val = values_at(base_disc, min(admissible_residues(base_disc, p)))[0]
    d_vals = values_at(-d, beta)
    for pr in pairs:
        val_D = values_at(-pr.D, min(admissible_residues(-pr.D, p)))[0]
        x_num = val_D - base_val
        y_num = ctx.mpc(1)
        for v in d_vals:
            y_num *= val_D - v
        for label, numeric, magnitude in (("X", x_num, pr.x_mag),
                                          ("Y", y_num, pr.y_mag)):
            if abs(numeric.imag) > tol * max(1, abs(numeric)):
                raise InternalError(
                    f"{label}_{pr.D} is not numerically real: {mpmath.nstr(numeric, 8)}"
                )
            if abs(abs(numeric.real) - magnitude) > tol * max(1, magnitude):
                raise InternalError(
                    f"numeric |{label}_{pr.D}| = {mpmath.nstr(abs(numeric.real), 12)} "
                    f"disagrees with the exact magnitude {magnitude}"
                )
        pr.x_sign = None if pr.x_mag == 0 else (1 if x_num.real > 0 else -1)
        pr.y_sign = 1 if y_num.real > 0 else -1
    return pairs


def interpolate(pairs: list[InterpolationPair], d: int) -> ClassPolynomial:
    """Exact interpolation of signed pairs into a monic integer polynomial."""
    h = class_number(-d)
    if len(pairs) < h + 1:
        raise InfeasibleError(f"need {h + 1} pairs, got {len(pairs)}")
    xs = [pr.signed_x() for pr in pairs]
    ys = [pr.signed_y() for pr in pairs]
    if len(set(xs)) != len(xs):
        raise DegenerateDataError(f"duplicate X values: {sorted(xs)}")
    coeffs = _lagrange(xs, ys)
    integer_coeffs = _monic_integer_of_degree(coeffs, h)
    if integer_coeffs is None:
        raise SignResolutionError(
            f"interpolant is not a monic integer polynomial of degree {h}: {coeffs}"
        )
    poly = ClassPolynomial(d=d, coefficients=integer_coeffs)
    for x, y in zip(xs, ys):
        if poly.evaluate(x) != y:
            raise InternalError(f"round-trip failed at X={x}")
    return poly


@dataclass
class ClassPolyReport:
    p: int
    d: int
    beta: int
    base_disc: int
    s_set: list[int]
    pairs: list[InterpolationPair]
    polynomial: ClassPolynomial


def class_polynomial(p: int, d: int, base_disc: int | None = None,
                     strategy: str = "search",
                     prec: PrecisionConfig | None = None,
                     series=None,
                     ramified_exponent: str = DEFAULT_RAMIFIED_EXPONENT) -> ClassPolyReport:
    """End-to-end pipeline: S(p), feasibility, pairs, signs, interpolation."""
    members = s_set(p)
    if not feasible(d, p):
        h = class_number(-d)
        raise InfeasibleError(
            f"need h(-{d})+1 = {h + 1} pairs but only {len(usable_s_set(p))} usable "
            f"degree-one discriminants exist for p={p}"
        )
    beta = min(admissible_residues(-d, p))
    usable = usable_s_set(p)
    if base_disc is None:
        candidates = [disc for disc in usable if -disc != d]
        if not candidates:
            raise InfeasibleError(f"no usable base discriminant for p={p}, d={d}")
        base_disc = candidates[0]
    pairs = build_pairs(d, beta, p, base_disc, ramified_exponent)
    h = class_number(-d)
    if len(pairs) < h + 1:
        raise InfeasibleError(
            f"need h(-{d})+1 = {h + 1} pairs but only {len(pairs)} are available "
            f"(the diagonal D = d pair is degenerate)"
        )
    pairs = resolve_signs(pairs, d, strategy=strategy, p=p, base_disc=base_disc,
                          beta=beta, prec=prec, series=series)
    poly = interpolate(pairs, d)
    return ClassPolyReport(p=p, d=d, beta=beta, base_disc=base_disc,
                           s_set=members, pairs=pairs, polynomial=poly)
