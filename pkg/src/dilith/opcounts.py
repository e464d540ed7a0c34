"""Z_q operation-count accounting for ring multiplication and the scheme.

Two multiplication cost models are covered.  With q = 1 mod 2n a full
transform is available and one ring product costs

    3/2 * n * log2(n) + 2n  multiplications,   3 * n * log2(n)  additions.

Without it, the hybrid transform applies whenever q = 1 mod (n / 2^(a+b-1))
for split parameters a, b >= 0; its per-product cost adds

    (3*2^(a+b-3) + 2^(a-2) + 3*2^(b-3) + 2^(a-b-2) - 3/2*(a+b) + 5/4) * n

multiplications and

    (5*2^(a+b-2) + 5*2^(b-2) + 5*2^(a-2) - 3*(a+b) - 15/4) * n

additions on top of the same n*log(n) terms.  Both are evaluated over
exact rationals and must land on integers.

Scheme-level counts charge ring products at the full CostPair and ring
additions at n Z_q-additions.  The expected number of signing repeats
enters rounded to two decimals, and each phase total is rounded to the
nearest integer; that convention reproduces the published comparison
table cell-for-cell.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

from . import estimator
from .params import ParameterSet


class NonIntegralCost(ValueError):
    """The hybrid-transform formulas gave a fractional operation count."""


@dataclass(frozen=True)
class CostPair:
    mults: int
    adds: int

    def __post_init__(self):
        if self.mults < 0 or self.adds < 0:
            raise ValueError("operation counts must be nonnegative")


def _log2_exact(n: int) -> int:
    if n < 2 or n & (n - 1):
        raise ValueError(f"n = {n} must be a power of two >= 2")
    return n.bit_length() - 1

def ntt_mul_cost(n: int) -> CostPair:
    """Cost of one ring product via the full transform."""
    lg = _log2_exact(n)
    return CostPair(mults=3 * n * lg // 2 + 2 * n, adds=3 * n * lg)


def hntt_per_n_coefficients(a: int, b: int) -> tuple[Fraction, Fraction]:
    """Per-n cost coefficients of the hybrid transform beyond n*log(n)."""
    if a < 0 or b < 0:
        raise ValueError("split parameters must be nonnegative")
    mults = (
        3 * Fraction(2) ** (a + b - 3)
        + Fraction(2) ** (a - 2)
        + 3 * Fraction(2) ** (b - 3)
        + Fraction(2) ** (a - b - 2)
        - Fraction(3, 2) * (a + b)
        + Fraction(5, 4)
    )
    adds = (
        5 * Fraction(2) ** (a + b - 2)
        + 5 * Fraction(2) ** (b - 2)
        + 5 * Fraction(2) ** (a - 2)
        - 3 * (a + b)
        - Fraction(15, 4)
    )
    return mults, adds


def hntt_mul_cost(n: int, a: int, b: int) -> CostPair:
    """Cost of one ring product via the hybrid transform with split (a, b)."""
    lg = _log2_exact(n)
    cm, ca = hntt_per_n_coefficients(a, b)
    mults = Fraction(3, 2) * n * lg + cm * n
    adds = 3 * n * lg + ca * n
    if mults.denominator != 1 or adds.denominator != 1:
        raise NonIntegralCost(f"split ({a}, {b}) gives fractional counts at n = {n}")
    if mults < 0 or adds < 0:
        raise NonIntegralCost(f"split ({a}, {b}) gives negative counts at n = {n}")
    return CostPair(mults=int(mults), adds=int(adds))


def hntt_valid_split_sums(n: int, q: int) -> list[int]:
    """Values of a+b compatible with q = 1 mod (n / 2^(a+b-1))."""
    lg = _log2_exact(n)
    sums = []
    for s in range(1, lg + 2):  # the modulus n / 2^(s-1) ranges over n .. 1
        modulus = n >> (s - 1)
        if q % modulus == 1 % modulus:
            sums.append(s)
    return sums


def hntt_minimal_split(n: int, q: int) -> tuple[int, int, CostPair]:
    """Cheapest valid (a, b), minimising multiplications then additions."""
    best = None
    for s in hntt_valid_split_sums(n, q):
        for a in range(0, s + 1):
            b = s - a
            try:
                cost = hntt_mul_cost(n, a, b)
            except NonIntegralCost:
                continue
            key = (cost.mults, cost.adds, a, b)
            if best is None or key < best[0]:
                best = (key, (a, b, cost))
    if best is None:
        raise NonIntegralCost(f"no valid hybrid split for n = {n}, q = {q}")
    return best[1]


def mul_cost_for(params: ParameterSet) -> CostPair:
    """Default per-product cost: full transform when available, else hybrid."""
    if params.q % (2 * params.n) == 1:
        return ntt_mul_cost(params.n)
    return hntt_minimal_split(params.n, params.q)[2]


def scheme_ring_op_counts(k: int, l: int, r: float) -> dict[str, dict[str, float]]:
    """Ring-level products/additions per phase, with r signing repeats."""
    return {
        "mults": {"gen": k * l, "sign": (k * l + k + l) * r, "verify": k * l + k},
        "adds": {"gen": k * l, "sign": (k * l + l) * r, "verify": k * l},
    }


def _round_half_up(x: Fraction) -> int:
    return int(x + Fraction(1, 2)) if x >= 0 else -int(-x + Fraction(1, 2))


def zq_op_table(
    params: ParameterSet, cost: CostPair, r: float | None = None
) -> dict[str, CostPair]:
    """Total Z_q multiplications/additions per phase.

    r defaults to the expected repeats rounded to two decimals; phase
    totals are (ring products)*cost.mults multiplications and (ring
    products)*cost.adds + (ring additions)*n additions, rounded to the
    nearest integer.
    """
    if r is None:
        r = round(estimator.expected_repeats(params), 2)
    r_frac = Fraction(str(round(r, 2)))
    k, l, n = params.k, params.l, params.n
    counts = {
        "gen": (Fraction(k * l), Fraction(k * l)),
        "sign": ((k * l + k + l) * r_frac, (k * l + l) * r_frac),
        "verify": (Fraction(k * l + k), Fraction(k * l)),
    }
    table = {}
    for phase, (ring_mults, ring_adds) in counts.items():
        table[phase] = CostPair(
            mults=_round_half_up(ring_mults * cost.mults),
            adds=_round_half_up(ring_mults * cost.adds + ring_adds * n),
        )
    return table


PHASES = ("gen", "sign", "verify")


def comparison_to_dict(sets: list[tuple[ParameterSet, dict[str, CostPair]]]) -> dict:
    return {
        params.name: {
            phase: {"mults": table[phase].mults, "adds": table[phase].adds}
            for phase in PHASES
        }
        for params, table in sets
    }


def comparison_to_json(sets: list[tuple[ParameterSet, dict[str, CostPair]]]) -> str:
    return json.dumps(comparison_to_dict(sets), indent=2)


def comparison_to_csv(sets: list[tuple[ParameterSet, dict[str, CostPair]]]) -> str:
    """Two blocks of phase rows (multiplications, then additions), one
    column per parameter set."""
    names = [params.name for params, _ in sets]
    lines = ["op,phase," + ",".join(names)]
    for op in ("mults", "adds"):
        for phase in PHASES:
            cells = [str(getattr(table[phase], op)) for _, table in sets]
            lines.append(f"{op},{phase}," + ",".join(cells))
    return "\n".join(lines) + "\n"
