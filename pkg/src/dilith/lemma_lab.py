"""Brute-force verification of the classical facts behind the reduction.

Everything here runs at toy moduli and checks, by exact enumeration, the
three ingredients the security argument consumes:

  * the bucketed rounding map Z_q -> {0..t-1} and the collision
    probability p_t = Pr[round(u) = round(u+v)] for uniform u, v, whose
    closed form must match pairwise enumeration and stay below 2/t;
  * uniformity of a fixed coefficient of b * Delta over uniform b, for
    any nonzero Delta;
  * the evaluation map R_q -> Z_q^n being a bijective multiplicative
    homomorphism, plus the vanishing twiddle sums it relies on.

Scales are guarded by operation-count pre-estimates rather than timeouts
so CI behaviour is deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np
import sympy

from . import ring
from .ring import RingContext, RingVector

_ENUM_CAP = 1 << 24  # largest enumerable space q^(n*l)
_SWEEP_OP_CAP = 1 << 33  # full-sweep threshold on (deltas x enumeration) ops


class PreconditionViolated(ValueError):
    """A lemma hypothesis (e.g. t^2 <= q) does not hold."""


class TooLarge(ValueError):
    """The requested enumeration exceeds the toy-scale cap."""


class Check(NamedTuple):
    name: str
    passed: bool
    detail: str


def _enumeration_size(q: int, dims: int) -> int:
    """q^dims, guarded so oversized spaces fail fast without huge integers."""
    if dims * q.bit_length() > 64:
        raise TooLarge(f"q^{dims} for q = {q} exceeds the enumeration cap {_ENUM_CAP}")
    total = q**dims
    if total > _ENUM_CAP:
        raise TooLarge(f"q^{dims} = {total} exceeds the enumeration cap {_ENUM_CAP}")
    return total


# ---------------------------------------------------------------------------
# rounding into t buckets


@dataclass(frozen=True)
class RoundingSpec:
    """Partition of Z_q into t intervals of floor(q/t) values (last absorbs
    the remainder, so q/t <= |I_{t-1}| <= q/t + t - 1)."""

    q: int
    t: int

    def __post_init__(self):
        if self.q < 3 or self.q % 2 == 0 or not sympy.isprime(self.q):
            raise ValueError(f"q = {self.q} must be an odd prime")
        if not 1 <= self.t <= self.q:
            raise ValueError(f"t = {self.t} out of range")

    @property
    def width(self) -> int:
        return self.q // self.t

    @property
    def last_size(self) -> int:
        return self.q - (self.t - 1) * self.width

    def bucket_edges(self) -> list[tuple[int, int]]:
        """Inclusive (start, end) residue ranges of I_0 .. I_{t-1}."""
        edges = [(j * self.width, (j + 1) * self.width - 1) for j in range(self.t - 1)]
        edges.append(((self.t - 1) * self.width, self.q - 1))
        return edges


def round_t(a: int, spec: RoundingSpec) -> int:
    """The unique bucket index j with a in I_j."""
    if not 0 <= a < spec.q:
        raise ValueError(f"residue {a} out of range for q = {spec.q}")
    return min(a // spec.width, spec.t - 1)


def _require_t_squared(spec: RoundingSpec) -> None:
    if spec.t * spec.t > spec.q:
        raise PreconditionViolated(f"t^2 = {spec.t ** 2} exceeds q = {spec.q}")


def p_t_exact(spec: RoundingSpec) -> Fraction:
    """Closed-form collision probability of the rounding map."""
    _require_t_squared(spec)
    q, t, w, last = spec.q, spec.t, spec.width, spec.last_size
    return 1 - (
        Fraction((t - 1) * w, q) * Fraction(q - w, q)
        + Fraction(last, q) * Fraction(q - last, q)
    )


def p_t_bruteforce(spec: RoundingSpec) -> Fraction:
    """Pairwise enumeration of Pr[round(u) = round(u+v)] over Z_q^2."""
    _require_t_squared(spec)
    q = spec.q
    buckets = np.minimum(np.arange(q) // spec.width, spec.t - 1)
    u = buckets[:, None]
    uv = buckets[(np.arange(q)[:, None] + np.arange(q)[None, :]) % q]
    return Fraction(int(np.count_nonzero(u == uv)), q * q)


# ---------------------------------------------------------------------------
# uniformity of (b . Delta)_alpha


def _coefficient_map(ctx: RingContext, delta: RingVector, alpha: int) -> np.ndarray:
    """Vector v with (b . Delta)_alpha = <flat(b), v> over Z_q.

    Entry (i, j) is the alpha-th coefficient of X^j * Delta_i, i.e. a
    signed pick of Delta_i's coefficients under negacyclic wraparound.
    """
    n, q = ctx.n, ctx.q
    v = np.empty(n * len(delta), dtype=np.int64)
    for i, e in enumerate(delta):
        c = e.coeffs
        for j in range(n):
            if j <= alpha:
                v[i * n + j] = c[alpha - j]
            else:
                v[i * n + j] = (q - c[n + alpha - j]) % q
    return v


def _digit_block(q: int, dims: int, start: int, stop: int) -> np.ndarray:
    """Rows start..stop of the base-q digit enumeration of Z_q^dims."""
    idx = np.arange(start, stop, dtype=np.int64)
    out = np.empty((stop - start, dims), dtype=np.int64)
    for m in range(dims):
        out[:, m] = (idx // q**m) % q
    return out


def uniformity_check(ctx: RingContext, l: int, delta: RingVector, alpha: int) -> bool:
    """Enumerate all b in R_q^l and tally (b . Delta)_alpha.

    Passes iff every residue occurs exactly q^(n*l - 1) times.  Delta must
    be nonzero; the enumeration is capped at 2^24 vectors.
    """
    n, q = ctx.n, ctx.q
    if len(delta) != l:
        raise ring.DimensionMismatch(f"Delta has length {len(delta)}, expected {l}")
    if not 0 <= alpha < n:
        raise ValueError(f"coefficient index {alpha} out of range")
    if all(not e.coeffs.any() for e in delta):
        raise ValueError("Delta must be nonzero")
    total = _enumeration_size(q, n * l)
    v = _coefficient_map(ctx, delta, alpha)
    counts = np.zeros(q, dtype=np.int64)
    step = 1 << 19
    for start in range(0, total, step):
        block = _digit_block(q, n * l, start, min(start + step, total))
        counts += np.bincount((block @ v) % q, minlength=q)
    return bool((counts == total // q).all())


@dataclass(frozen=True)
class SweepResult:
    mode: str  # "full" or "sampled:<count>"
    checked: int
    failures: int

    @property
    def passed(self) -> bool:
        return self.failures == 0


def uniformity_sweep(
    ctx: RingContext,
    l: int,
    alpha: int,
    mode: str = "auto",
    samples: int = 100,
    seed: int = 0,
) -> SweepResult:
    """Run uniformity_check over many nonzero Delta.

    mode "full" enumerates every nonzero Delta; "sampled" draws `samples`
    of them.  "auto" picks full when the pre-estimated basic-operation
    count (deltas times enumerated b) stays within 2^33.
    """
    n, q = ctx.n, ctx.q
    total = _enumeration_size(q, n * l)
    if mode == "auto":
        mode = "full" if (total - 1) * total <= _SWEEP_OP_CAP else "sampled"

    if mode == "sampled":
        rng = np.random.default_rng(seed)
        failures = 0
        for _ in range(samples):
            coeffs = rng.integers(0, q, size=(l, n))
            while not coeffs.any():
                coeffs = rng.integers(0, q, size=(l, n))
            delta = RingVector(tuple(ring.RingElement(row) for row in coeffs))
            if not uniformity_check(ctx, l, delta, alpha):
                failures += 1
        return SweepResult(mode=f"sampled:{samples}", checked=samples, failures=failures)

    if mode != "full":
        raise ValueError(f"unknown sweep mode {mode!r}")
    # The map Delta -> v (see _coefficient_map) is a signed permutation of
    # coefficients, hence a bijection of Z_q^(n*l) fixing zero: sweeping all
    # nonzero v is exactly sweeping all nonzero Delta.  The tallies are taken
    # by walking v in base-q counter order and updating the length-q^(n*l)
    # value table <b, v> mod q incrementally: stepping digit m (with digits
    # below it rolling q-1 -> 0) adds column m plus the rolled columns, and
    # -(q-1) = 1 mod q turns each rolled column into a single addition.
    dims = n * l
    b_mat = _digit_block(q, dims, 0, total)
    step_add = np.empty((dims, total), dtype=np.int64)
    acc = np.zeros(total, dtype=np.int64)
    for m in range(dims):
        step_add[m] = (acc + b_mat[:, m]) % q
        acc = (acc + b_mat[:, m]) % q
    expect = total // q
    failures = 0
    values = np.zeros(total, dtype=np.int64)
    for v_index in range(1, total):
        m, rem = 0, v_index
        while rem % q == 0:
            m += 1
            rem //= q
        values += step_add[m]
        np.subtract(values, q, out=values, where=values >= q)
        if not (np.bincount(values, minlength=q) == expect).all():
            failures += 1
    return SweepResult(mode="full", checked=total - 1, failures=failures)


# ---------------------------------------------------------------------------
# evaluation-map isomorphism and twiddle sums


def primitive_sums_vanish(ctx: RingContext) -> bool:
    """sum_j w^(2mj) = 0 in Z_q for all 0 < |m| < n."""
    n, q, w = ctx.n, ctx.q, ctx.w
    for m in list(range(1, n)) + [-m for m in range(1, n)]:
        base = pow(w, 2 * m, q) if m > 0 else pow(pow(w, -1, q), -2 * m, q)
        if sum(pow(base, j, q) for j in range(n)) % q != 0:
            return False
    return True


@dataclass(frozen=True)
class IsomorphismResult:
    roundtrip_ok: bool
    homomorphism_ok: bool
    primitive_sums_ok: bool
    elements: int
    pairs: int

    @property
    def passed(self) -> bool:
        return self.roundtrip_ok and self.homomorphism_ok and self.primitive_sums_ok


def _negacyclic_batch(a: np.ndarray, b: np.ndarray, n: int, q: int) -> np.ndarray:
    """Row-wise negacyclic products of two (m, n) batches, by schoolbook."""
    out = np.zeros_like(a)
    for j in range(n):
        for k in range(n):
            term = a[:, j] * b[:, k]
            idx = j + k
            if idx < n:
                out[:, idx] += term
            else:
                out[:, idx - n] -= term
    return np.mod(out, q)


def isomorphism_exhaustive(ctx: RingContext, pairs: int = 10_000, seed: int = 0) -> IsomorphismResult:
    """Exhaustive roundtrip plus randomized multiplicativity at a toy ring."""
    n, q = ctx.n, ctx.q
    total = _enumeration_size(q, n)

    roundtrip_ok = True
    step = 1 << 18
    for start in range(0, total, step):
        block = _digit_block(q, n, start, min(start + step, total))
        back = ring.ntt_inverse_batch(ctx, ring.ntt_forward_batch(ctx, block))
        if not np.array_equal(back, block):
            roundtrip_ok = False
            break

    rng = np.random.default_rng(seed)
    a = rng.integers(0, q, size=(pairs, n))
    b = rng.integers(0, q, size=(pairs, n))
    prod = _negacyclic_batch(a, b, n, q)
    lhs = ring.ntt_forward_batch(ctx, prod)
    rhs = ring.mulmod(ring.ntt_forward_batch(ctx, a), ring.ntt_forward_batch(ctx, b), q)
    homomorphism_ok = bool(np.array_equal(lhs, rhs))

    return IsomorphismResult(
        roundtrip_ok=roundtrip_ok,
        homomorphism_ok=homomorphism_ok,
        primitive_sums_ok=primitive_sums_vanish(ctx),
        elements=total,
        pairs=pairs,
    )


# ---------------------------------------------------------------------------
# hypotheses of the main hardness statement, reused by the estimator


def check_theorem_hypotheses(
    q: int, n: int, m: int, k: int, gamma: int, eta: int
) -> list[Check]:
    """q >= 16 and 2*gamma*eta*n*(m+k) < floor(q/32), exact integers."""
    product = 2 * gamma * eta * n * (m + k)
    bound = q // 32
    return [
        Check("q_ge_16", q >= 16, f"q = {q}"),
        Check(
            "norm_product_bound",
            product < bound,
            f"2*gamma*eta*n*(m+k) = {product} vs floor(q/32) = {bound}",
        ),
    ]
