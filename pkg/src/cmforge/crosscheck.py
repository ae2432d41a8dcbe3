"""Comparison of the exact prime-log sum against the numeric evaluator.

The relative tolerance is pinned at 1e-8; runs at the default 80 digits land
many orders of magnitude below it when the exact side is correct, so a FAIL is
a genuine disagreement, not noise.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .arith import is_fundamental_discriminant
from .errors import ParameterError
from .gzrhs import (
    DEFAULT_RAMIFIED_EXPONENT,
    RAMIFIED_OF_M,
    RAMIFIED_OF_MD,
    GZParams,
    gz_log_norm,
)
from .hauptmodul import DEFAULT_PRECISION, PrecisionConfig, lhs_log_norm
from .quadforms import admissible_residues

RELATIVE_TOLERANCE = 1e-8


@dataclass
class CrosscheckResult:
    p: int
    d: int
    D: int
    beta: int
    mu: int
    lhs: float
    lhs_error_estimate: float
    rhs: dict = field(default_factory=dict)          # variant -> float value
    discrepancy: dict = field(default_factory=dict)  # variant -> relative discrepancy
    passes: dict = field(default_factory=dict)       # variant -> bool
    variants_differ: bool = False

    def passed(self, variant: str = DEFAULT_RAMIFIED_EXPONENT) -> bool:
        return self.passes[variant]


def run_crosscheck(p: int, d: int, D: int,
                   prec: PrecisionConfig | None = None,
                   series=None,
                   mu: int | None = None,
                   beta: int | None = None) -> CrosscheckResult:
    """Evaluate both sides for one discriminant pair; residues default to smallest."""
    prec = prec or DEFAULT_PRECISION
    params = GZParams.create(p=p, d=d, D=D, mu=mu, beta=beta)
    sums = {
        RAMIFIED_OF_MD: gz_log_norm(params, RAMIFIED_OF_MD),
        RAMIFIED_OF_M: gz_log_norm(params, RAMIFIED_OF_M),
    }
    lhs = lhs_log_norm(p=p, d=params.d, beta=params.beta, D=params.D, mu=params.mu,
                       prec=prec, series=series)
    ctx = prec.context()
    lhs_value = lhs.value
    result = CrosscheckResult(
        p=p, d=params.d, D=params.D, beta=params.beta, mu=params.mu,
        lhs=float(lhs_value), lhs_error_estimate=float(lhs.error_estimate),
        variants_differ=sums[RAMIFIED_OF_MD] != sums[RAMIFIED_OF_M],
    )
    denom = max(ctx.mpf(1), abs(lhs_value))
    for variant, pls in sums.items():
        rhs_value = pls.log_value_mpf(ctx)
        rel = float(abs(rhs_value - lhs_value) / denom)
        result.rhs[variant] = float(rhs_value)
        result.discrepancy[variant] = rel
        result.passes[variant] = rel < RELATIVE_TOLERANCE
    return result


def admissible_discriminants(p: int, max_disc: int = 500) -> list[int]:
    """Positive d <= max_disc with -d fundamental, d > 4, and -d a square mod 4p."""
    out = []
    for d in range(5, max_disc + 1):
        if d % 4 not in (0, 3):
            continue
        if not is_fundamental_discriminant(-d):
            continue
        if admissible_residues(-d, p):
            out.append(d)
    return out


def admissible_pairs(p: int, max_disc: int = 500, count: int = 5) -> list[tuple[int, int]]:
    """First `count` admissible (d, D) pairs with d < D, ordered by (d + D, d)."""
    discs = admissible_discriminants(p, max_disc)
    pairs = [(a, b) for i, a in enumerate(discs) for b in discs[i + 1:]]
    pairs.sort(key=lambda pair: (pair[0] + pair[1], pair[0], pair[1]))
    if len(pairs) < count:
        raise ParameterError(
            f"only {len(pairs)} admissible pairs exist for p={p} below {max_disc}"
        )
    return pairs[:count]
