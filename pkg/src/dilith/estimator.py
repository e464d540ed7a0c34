"""Concrete-security estimation: Core-SVP block sizes, reduction-loss
arithmetic, size/repeat formulas, validity checks, and parameter search.

The attack model is the conservative Core-SVP methodology: a lattice
problem costs 2^(0.265 mu) where mu is the smallest BKZ block size whose
single-SVP-call succeeds.  Block sizes come from three standard analyses:

  * primal (unique-SVP embedding):    xi*sqrt(mu) <= delta(mu)^(2mu-c) * q^(na/c),
    with c = na + nb + 1;
  * dual (distinguishing):            -2*pi^2*tau(mu)^2 >= ln(2^(-0.2075*mu/2)),
    with tau(mu) = delta(mu)^(c'-1) * q^(nb/c') * eps/q and c' = na + nb;
  * short-solution lattice reduction: 2^(2*sqrt(na*log2(q)*log2(delta(mu))))
    divided by sqrt(na+nb) must not exceed the infinity-norm bound.

Module problems reduce to their unstructured counterparts by multiplying
both dimensions by the ring degree n.  All logarithms here are base 2;
`xi` in the primal/dual inequalities is interpreted as the uniform error
bound itself (the interpretation that reproduces the published block
sizes), with the standard-deviation reading sqrt(eps(eps+1)/3) available
behind a flag.

The hash-targeted variant of the short-solution problem is scored through
the reduction to the (k+l+1, k, eta') module-LWE problem: if z = 0.265*mu
is that problem's Core-SVP exponent and B_level bounds the adversary's
hash queries, the variant's security is floor(z/2 - 1.5*log2(B) - 3).
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import sympy

from .lemma_lab import Check, check_theorem_hypotheses
from .params import ParameterSet


class DomainError(ValueError):
    """delta(mu) is undefined for mu < 2."""


class InfeasibleAtCap(RuntimeError):
    """No block size up to the search cap satisfies the attack inequality."""


class XiTooLarge(ValueError):
    """Infinity-norm bound >= q, so trivial q-vectors break the instance."""


class EtaPrimeInvalid(ValueError):
    """eta' missing or too large for the reduction's norm hypothesis."""


class NoFeasiblePoint(RuntimeError):
    """Parameter search found no candidate meeting the targets."""


# query bounds per NIST security level, exact powers of two
QUERY_BOUND_LOG2 = {1: 64, 2: 86, 3: 96, 4: 128, 5: 128}


@dataclass(frozen=True)
class AttackModel:
    core_svp_exponent: float = 0.265
    query_bounds: dict[int, int] = field(
        default_factory=lambda: {lvl: 2**e for lvl, e in QUERY_BOUND_LOG2.items()}
    )
    mu_min: int = 50
    mu_max: int = 2**15
    xi_stddev: bool = False  # alternate reading of the error parameter

    def xi(self, eps: int) -> float:
        return math.sqrt(eps * (eps + 1) / 3) if self.xi_stddev else float(eps)


DEFAULT_MODEL = AttackModel()

_LOG2_DELTA: list[float] = []  # cache indexed by mu, NaN below mu = 2


def delta(mu: int) -> float:
    """Root-Hermite factor of block-size-mu reduction (double precision)."""
    if mu < 2:
        raise DomainError(f"delta undefined for mu = {mu}")
    return ((mu * math.pi) ** (1 / mu) * mu / (2 * math.pi * math.e)) ** (
        1 / (2 * (mu - 1))
    )


def _log2_delta(mu: int) -> float:
    if mu >= len(_LOG2_DELTA):
        for m in range(len(_LOG2_DELTA), mu + 256):
            _LOG2_DELTA.append(math.log2(delta(m)) if m >= 2 else math.nan)
    return _LOG2_DELTA[mu]


def primal_condition(mu: int, na: int, nb: int, xi: float, q: int) -> bool:
    """True when block size mu suffices for the unique-SVP embedding."""
    c = na + nb + 1
    lhs = math.log2(xi) + 0.5 * math.log2(mu)
    return lhs <= (2 * mu - c) * _log2_delta(mu) + (na / c) * math.log2(q)


def dual_condition(mu: int, na: int, nb: int, xi: float, q: int) -> bool:
    """True when block size mu gives the dual distinguisher enough advantage."""
    c2 = na + nb
    ln_tau = (
        (c2 - 1) * _log2_delta(mu) * math.log(2)
        + (nb / c2) * math.log(q)
        + math.log(xi)
        - math.log(q)
    )
    return math.log(2 * math.pi**2) + 2 * ln_tau <= math.log(0.2075 * mu * math.log(2) / 2)


def sis_condition(mu: int, na: int, nb: int, xi: int, q: int) -> bool:
    """True when reduction at block size mu reaches the norm bound xi."""
    lhs = 2 * math.sqrt(na * math.log2(q) * _log2_delta(mu)) - 0.5 * math.log2(na + nb)
    return lhs <= math.log2(xi)


def _scan(condition, model: AttackModel) -> int:
    # monotone in mu over the cap range, so the first hit is the minimum
    for mu in range(model.mu_min, model.mu_max + 1):
        if condition(mu):
            return mu
    raise InfeasibleAtCap(f"no block size <= {model.mu_max} satisfies the inequality")


def lwe_primal_blocksize(
    na: int, nb: int, eps: int, q: int, model: AttackModel = DEFAULT_MODEL
) -> int:
    xi = model.xi(eps)
    return _scan(lambda mu: primal_condition(mu, na, nb, xi, q), model)


def lwe_dual_blocksize(
    na: int, nb: int, eps: int, q: int, model: AttackModel = DEFAULT_MODEL
) -> int:
    xi = model.xi(eps)
    return _scan(lambda mu: dual_condition(mu, na, nb, xi, q), model)


def lwe_blocksize(
    na: int, nb: int, eps: int, q: int, model: AttackModel = DEFAULT_MODEL
) -> int:
    """min(primal, dual) block size for an unstructured LWE instance."""
    return min(
        lwe_primal_blocksize(na, nb, eps, q, model),
        lwe_dual_blocksize(na, nb, eps, q, model),
    )


def mlwe_coresvp(
    k: int, l: int, eta: int, q: int, n: int, model: AttackModel = DEFAULT_MODEL
) -> tuple[int, int]:
    """Block size and Core-SVP exponent of MLWE_(k,l,eta) via LWE_(nk,nl,eta)."""
    mu = lwe_blocksize(n * k, n * l, eta, q, model)
    return mu, math.floor(model.core_svp_exponent * mu)


def sis_blocksize(
    na: int, nb: int, xi: int, q: int, model: AttackModel = DEFAULT_MODEL
) -> int:
    if xi >= q:
        raise XiTooLarge(f"norm bound {xi} >= q = {q}")
    return _scan(lambda mu: sis_condition(mu, na, nb, xi, q), model)


def msis_coresvp(
    k: int, l: int, xi: int, q: int, n: int, model: AttackModel = DEFAULT_MODEL
) -> tuple[int, int]:
    mu = sis_blocksize(n * k, n * l, xi, q, model)
    return mu, math.floor(model.core_svp_exponent * mu)


# ---------------------------------------------------------------------------
# scheme-level formulas


def zeta_bounds(params: ParameterSet) -> tuple[int, int]:
    """Norm bounds transferred to the two short-solution problems."""
    zeta = max(params.gamma1 - params.beta, 2 * params.gamma2 + 1 + 2 ** (params.d - 1) * params.tau)
    zeta_prime = max(2 * (params.gamma1 - params.beta), 4 * params.gamma2 + 2)
    return zeta, zeta_prime


def alpha_lower_bound(params: ParameterSet) -> float:
    """Min-entropy bound: min(-n*log2((2g1+1)/(2g2-1)), -k*l*log2(n/q))."""
    first = -params.n * math.log2((2 * params.gamma1 + 1) / (2 * params.gamma2 - 1))
    second = -params.k * params.l * math.log2(params.n / params.q)
    return min(first, second)


def _ceil_log2(x: int) -> int:
    return (x - 1).bit_length()


def sizes(params: ParameterSet) -> tuple[int, int]:
    """Public-key and signature sizes in bytes for the compressed encoding.

    pk: (n*k*(ceil(log2 q) - d) + 256) bits; sig: n*l*ceil(log2(2*gamma1))
    bits for z plus n*k hint bits plus tau*(log2(n)+1) bits of challenge.
    Bit totals are ceiling-divided into bytes.
    """
    pk_bits = params.n * params.k * (params.q.bit_length() - params.d) + 256
    sig_bits = (
        params.n * params.l * _ceil_log2(2 * params.gamma1)
        + params.n * params.k
        + params.tau * (params.n.bit_length() - 1 + 1)
    )
    return (pk_bits + 7) // 8, (sig_bits + 7) // 8


def repeat_rate(n: int, beta: int, k: int, l: int, gamma1: int, gamma2: int) -> float:
    return math.exp(n * beta * (l / gamma1 + k / gamma2))


def expected_repeats(params: ParameterSet) -> float:
    """Expected signing attempts, exp(n*beta*(l/gamma1 + k/gamma2))."""
    return repeat_rate(params.n, params.beta, params.k, params.l, params.gamma1, params.gamma2)


def eta_prime_limit(params: ParameterSet) -> int:
    """Largest valid eta': eta' * 2*zeta*n*(k+l+1) < floor(q/32)."""
    zeta, _ = zeta_bounds(params)
    denom = 2 * zeta * params.n * (params.k + params.l + 1)
    return (params.q // 32 - 1) // denom


def stmsis_coresvp(
    params: ParameterSet, level: int | None = None, model: AttackModel = DEFAULT_MODEL
) -> tuple[int, int]:
    """Security of the hash-targeted problem through the reduction loss.

    Returns (mu, coresvp) where mu is the block size of the associated
    MLWE_(k+l+1, k, eta') instance and coresvp = floor(z/2 - 1.5*log2(B) - 3)
    for z = 0.265*mu and B the query bound of the given level.
    """
    level = params.level if level is None else level
    if params.eta_prime is None:
        raise EtaPrimeInvalid("parameter set carries no eta'")
    zeta, _ = zeta_bounds(params)
    denom = 2 * zeta * params.n * (params.k + params.l + 1)
    if params.eta_prime * denom >= params.q // 32:
        raise EtaPrimeInvalid(
            f"eta' = {params.eta_prime} not below floor(q/32)/(2*zeta*n*(k+l+1))"
        )
    mu = lwe_blocksize(
        params.n * (params.k + params.l + 1), params.n * params.k, params.eta_prime,
        params.q, model,
    )
    z = model.core_svp_exponent * mu
    log2_b = math.log2(model.query_bounds[level])
    return mu, math.floor(z / 2 - 1.5 * log2_b - 3)


def advantage_lower_bound(
    eps, big_q: int, n: int, q: int, k: int, tau: int, w: int
) -> Fraction:
    """Exact advantage bound of the reduction, over arbitrary-precision
    rationals; may be negative (no clamping).

    ((eps - n*q^-k) / (4*(2Q+1)^2)) * ((eps - n*q^-k)/(2Q+1)^2 - 1/|B_tau|)
      - (1/4) * 3^-w,   with |B_tau| = 2^tau * C(n, tau).
    """
    if big_q < 1 or w < 1:
        raise ValueError("Q and w must be positive")
    eps = Fraction(eps)
    if not 0 <= eps <= 1:
        raise ValueError("eps must lie in [0, 1]")
    ball = 2**tau * math.comb(n, tau)
    head = eps - Fraction(n, q**k)
    denom = (2 * big_q + 1) ** 2
    return (head / (4 * denom)) * (head / denom - Fraction(1, ball)) - Fraction(1, 4 * 3**w)


def validate(params: ParameterSet) -> list[Check]:
    """Named pass/fail outcomes for every structural constraint."""
    p = params
    checks = [
        Check("q_prime", sympy.isprime(p.q), f"q = {p.q}"),
        Check("q_mod_2n", p.q % (2 * p.n) == 1, f"q mod 2n = {p.q % (2 * p.n)}"),
        Check("q_mod_2gamma2", p.q % (2 * p.gamma2) == 1, f"q mod 2*gamma2 = {p.q % (2 * p.gamma2)}"),
        Check("q_gt_4gamma2", p.q > 4 * p.gamma2, f"q = {p.q}, 4*gamma2 = {4 * p.gamma2}"),
        Check("beta_eq_tau_eta", p.beta == p.tau * p.eta, f"beta = {p.beta}, tau*eta = {p.tau * p.eta}"),
        Check("gamma1_gt_beta", p.gamma1 > p.beta, f"gamma1 = {p.gamma1}, beta = {p.beta}"),
        Check("gamma2_gt_beta", p.gamma2 > p.beta, f"gamma2 = {p.gamma2}, beta = {p.beta}"),
    ]
    if p.eta_prime is not None:
        zeta, _ = zeta_bounds(p)
        checks.extend(
            check_theorem_hypotheses(p.q, p.n, p.k, p.l + 1, zeta, p.eta_prime)
        )
    else:
        checks.append(Check("q_ge_16", p.q >= 16, f"q = {p.q}"))
    return checks


# ---------------------------------------------------------------------------
# reports


@dataclass(frozen=True)
class SecurityReport:
    name: str
    level: int
    zeta: int
    zeta_prime: int
    alpha_lb: float
    pk_bytes: int
    sig_bytes: int
    repeats: float
    lwe_blocksize: int
    lwe_coresvp: int
    stmsis_lwe_blocksize: int | None
    stmsis_coresvp: int | None
    sis_blocksize: int | None
    sis_coresvp: int | None
    validity: list[Check]

    @property
    def all_valid(self) -> bool:
        return all(c.passed for c in self.validity)


# calibration notes carried into every JSON report (resolved empirically:
# the published block sizes pin both interpretations)
MODEL_NOTES = {
    "core_svp_exponent": 0.265,
    "primal_dual_error_term": "uniform bound",
    "log_base": 2,
}


def report(
    params: ParameterSet, level: int | None = None, model: AttackModel = DEFAULT_MODEL
) -> SecurityReport:
    """Compose every estimate for one parameter set."""
    level = params.level if level is None else level
    zeta, zeta_prime = zeta_bounds(params)
    pk_bytes, sig_bytes = sizes(params)
    lwe_mu, lwe_cs = mlwe_coresvp(params.k, params.l, params.eta, params.q, params.n, model)
    st_mu = st_cs = None
    if params.eta_prime is not None:
        st_mu, st_cs = stmsis_coresvp(params, level, model)
    sis_mu = sis_cs = None
    if params.msis_term:
        sis_mu, sis_cs = msis_coresvp(params.k, params.l, zeta_prime, params.q, params.n, model)
    return SecurityReport(
        name=params.name,
        level=level,
        zeta=zeta,
        zeta_prime=zeta_prime,
        alpha_lb=alpha_lower_bound(params),
        pk_bytes=pk_bytes,
        sig_bytes=sig_bytes,
        repeats=expected_repeats(params),
        lwe_blocksize=lwe_mu,
        lwe_coresvp=lwe_cs,
        stmsis_lwe_blocksize=st_mu,
        stmsis_coresvp=st_cs,
        sis_blocksize=sis_mu,
        sis_coresvp=sis_cs,
        validity=validate(params),
    )


def report_to_dict(params: ParameterSet, rep: SecurityReport) -> dict:
    return {
        "name": rep.name,
        "params": params.to_json_dict(),
        "level": rep.level,
        "zeta": rep.zeta,
        "zeta_prime": rep.zeta_prime,
        "alpha_lb": rep.alpha_lb,
        "pk_bytes": rep.pk_bytes,
        "sig_bytes": rep.sig_bytes,
        "repeats": round(rep.repeats, 2),
        "lwe_blocksize": rep.lwe_blocksize,
        "lwe_coresvp": rep.lwe_coresvp,
        "stmsis_lwe_blocksize": rep.stmsis_lwe_blocksize,
        "stmsis_coresvp": rep.stmsis_coresvp,
        "sis_blocksize": rep.sis_blocksize,
        "sis_coresvp": rep.sis_coresvp,
        "validity": [c._asdict() for c in rep.validity],
        "model": MODEL_NOTES,
    }


CSV_COLUMNS = [
    "name", "q", "n", "k", "l", "d", "tau", "gamma1", "gamma2", "zeta",
    "zeta_prime", "eta", "eta_prime", "pk_bytes", "sig_bytes", "repeats",
    "lwe_blocksize", "lwe_coresvp", "stmsis_blocksize", "stmsis_coresvp",
    "sis_blocksize", "sis_coresvp",
]


def reports_to_csv(rows: list[tuple[ParameterSet, SecurityReport]]) -> str:
    """One row per parameter set, quantities in the comparison-table order."""
    out = io.StringIO()
    writer = csv.writer(out)
    writer.writerow(CSV_COLUMNS)

    def cell(v):
        return "NA" if v is None else v

    for params, rep in rows:
        writer.writerow([
            params.name, params.q, params.n, params.k, params.l, params.d,
            params.tau, params.gamma1, params.gamma2, rep.zeta, rep.zeta_prime,
            params.eta, cell(params.eta_prime), rep.pk_bytes, rep.sig_bytes,
            f"{rep.repeats:.2f}", rep.lwe_blocksize, rep.lwe_coresvp,
            cell(rep.stmsis_lwe_blocksize), cell(rep.stmsis_coresvp),
            cell(rep.sis_blocksize), cell(rep.sis_coresvp),
        ])
    return out.getvalue()


def reports_to_json(rows: list[tuple[ParameterSet, SecurityReport]]) -> str:
    return json.dumps([report_to_dict(p, r) for p, r in rows], indent=2)


# ---------------------------------------------------------------------------
# parameter search


@dataclass(frozen=True)
class SearchTargets:
    """Minimum Core-SVP exponents a candidate must reach on all three fronts."""

    lwe: int
    stmsis: int
    sis: int

    @classmethod
    def for_level(cls, level: int) -> "SearchTargets":
        t = QUERY_BOUND_LOG2[level]
        return cls(lwe=t, stmsis=t, sis=t)


def _divisors_in(value: int, lo: int, hi: int) -> list[int]:
    return sorted(d for d in sympy.divisors(value) if lo <= d <= hi)


def search(
    level: int,
    targets: SearchTargets,
    q: int,
    n: int,
    d: int,
    tau: int,
    k_range: tuple[int, int],
    l_range: tuple[int, int],
    gamma2_range: tuple[int, int],
    etas: tuple[int, ...] = (2, 4),
    model: AttackModel = DEFAULT_MODEL,
) -> ParameterSet:
    """Deterministic enumeration of candidate sets meeting the targets.

    (k, l) ascend lexicographically; gamma2 runs over divisors of (q-1)/2
    inside the given range (so q = 1 mod 2*gamma2 holds by construction);
    gamma1 takes the values adjacent to ceil(gamma2/2); eta' is maximal
    valid.  The winner is the lexicographic minimum of
    (pk_bytes, sig_bytes, repeats).
    """
    if not sympy.isprime(q) or q % (2 * n) != 1:
        raise NoFeasiblePoint(f"q = {q} is not an NTT-friendly prime for n = {n}")
    gamma2s = [g for g in _divisors_in((q - 1) // 2, *gamma2_range) if q > 4 * g]
    best: tuple | None = None
    for k in range(k_range[0], k_range[1] + 1):
        for l in range(l_range[0], l_range[1] + 1):
            for gamma2 in gamma2s:
                half = -(-gamma2 // 2)
                for gamma1 in (half - 1, half, half + 1):
                    for eta in etas:
                        beta = tau * eta
                        if gamma1 <= beta or gamma2 <= beta:
                            continue
                        cand = ParameterSet(
                            name=f"search-l{level}", q=q, n=n, k=k, l=l, d=d,
                            tau=tau, gamma1=gamma1, gamma2=gamma2, eta=eta,
                            beta=beta, eta_prime=None, level=level,
                        )
                        ep = eta_prime_limit(cand)
                        if ep < 1:
                            continue
                        cand = ParameterSet(
                            name=cand.name, q=q, n=n, k=k, l=l, d=d, tau=tau,
                            gamma1=gamma1, gamma2=gamma2, eta=eta, beta=beta,
                            eta_prime=ep, level=level,
                        )
                        try:
                            _, lwe_cs = mlwe_coresvp(k, l, eta, q, n, model)
                            _, st_cs = stmsis_coresvp(cand, level, model)
                            _, zeta_prime = zeta_bounds(cand)
                            _, sis_cs = msis_coresvp(k, l, zeta_prime, q, n, model)
                        except (InfeasibleAtCap, XiTooLarge):
                            continue
                        if lwe_cs < targets.lwe or st_cs < targets.stmsis or sis_cs < targets.sis:
                            continue
                        pk_bytes, sig_bytes = sizes(cand)
                        key = (pk_bytes, sig_bytes, expected_repeats(cand))
                        if best is None or key < best[0]:
                            best = (key, cand)
    if best is None:
        raise NoFeasiblePoint("no candidate in the given ranges meets the targets")
    return best[1]
