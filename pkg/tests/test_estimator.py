"""Security estimator: block sizes, formulas, validity, and search."""

import dataclasses
import math
from fractions import Fraction

import mpmath
import pytest

from dilith import estimator as est
from dilith.params import BUILTIN, Q0, ParameterSet
from expected_values import SECURITY


def test_delta_domain():
    with pytest.raises(est.DomainError):
        est.delta(1)
    with pytest.raises(est.DomainError):
        est.delta(0)


def test_delta_monotone_decreasing():
    values = [est.delta(mu) for mu in range(50, 2001)]
    assert all(a > b for a, b in zip(values, values[1:]))
    assert est.delta(50) > est.delta(1000)


def test_delta_at_380():
    d = est.delta(380)
    assert 1.0040 < d < 1.0046
    # cross-check against a 50-digit evaluation of the same expression
    mu = mpmath.mpf(380)
    with mpmath.workdps(50):
        ref = ((mu * mpmath.pi) ** (1 / mu) * mu / (2 * mpmath.pi * mpmath.e)) ** (
            1 / (2 * (mu - 1))
        )
    assert abs(d - float(ref)) < 1e-12


@pytest.mark.parametrize("name", sorted(SECURITY))
def test_reports_match_expected(name):
    zeta, zp, pk, sig, reps, lwe, stmsis, sis = SECURITY[name]
    r = est.report(BUILTIN[name])
    assert (r.zeta, r.zeta_prime) == (zeta, zp)
    assert (r.pk_bytes, r.sig_bytes) == (pk, sig)
    assert abs(r.repeats - reps) <= 0.01
    assert (r.lwe_blocksize, r.lwe_coresvp) == lwe
    got_st = None if r.stmsis_lwe_blocksize is None else (r.stmsis_lwe_blocksize, r.stmsis_coresvp)
    assert got_st == stmsis
    got_sis = None if r.sis_blocksize is None else (r.sis_blocksize, r.sis_coresvp)
    assert got_sis == sis


def test_coresvp_floor_discipline():
    assert math.floor(0.265 * 4942) == 1309
    for name, row in SECURITY.items():
        mu, cs = row[5]
        assert cs == math.floor(0.265 * mu)
        if row[7] is not None:
            mu, cs = row[7]
            assert cs == math.floor(0.265 * mu)


@pytest.mark.parametrize(
    "kind,args,mu",
    [
        ("lwe", (1024, 1024, 2, 2**23 - 8191), 448),
        ("lwe", (5120, 2048, 2, Q0), 605),
        ("sis", (1024, 1024, 380930, 2**23 - 8191), 363),
        ("sis", (6144, 4096, 2963458, Q0), 5644),
    ],
)
def test_minimality_contract(kind, args, mu):
    model = est.DEFAULT_MODEL
    if kind == "lwe":
        na, nb, eps, q = args
        assert est.lwe_blocksize(na, nb, eps, q) == mu
        xi = model.xi(eps)
        cond = lambda m: est.primal_condition(m, na, nb, xi, q) or est.dual_condition(m, na, nb, xi, q)
    else:
        na, nb, xi, q = args
        assert est.sis_blocksize(na, nb, xi, q) == mu
        cond = lambda m: est.sis_condition(m, na, nb, xi, q)
    assert cond(mu)
    assert not cond(mu - 1)


def test_mlwe_coresvp_examples():
    assert est.mlwe_coresvp(4, 4, 2, 2**23 - 8191, 256) == (448, 118)
    assert est.mlwe_coresvp(10, 4, 2, Q0, 512) == (605, 160)
    assert est.mlwe_coresvp(13, 13, 2, Q0, 512) == (2079, 550)


def test_sis_xi_too_large():
    with pytest.raises(est.XiTooLarge):
        est.sis_blocksize(1024, 1024, 2**23 - 8191, 2**23 - 8191)


def test_infeasible_at_cap():
    tight = dataclasses.replace(est.DEFAULT_MODEL, mu_max=60)
    with pytest.raises(est.InfeasibleAtCap):
        est.lwe_primal_blocksize(5120, 2048, 2, Q0, tight)


def test_zeta_bounds_examples():
    assert est.zeta_bounds(BUILTIN["ours-sl2"]) == (1539077, 1767434)
    assert est.zeta_bounds(BUILTIN["qrom-rec"])[1] == 3622718
    # degenerate gamma1 = beta + 1 forces the second branch of zeta
    p = dataclasses.replace(BUILTIN["ours-sl2"], gamma1=81)
    zeta, _ = est.zeta_bounds(p)
    assert zeta == 2 * p.gamma2 + 1 + 2 ** (p.d - 1) * p.tau


def test_alpha_lower_bound():
    a = est.alpha_lower_bound(BUILTIN["ours-sl2"])
    assert abs(a - 512.0) < 0.1
    for name in SECURITY:
        if name.startswith(("ours", "nist")):
            assert est.alpha_lower_bound(BUILTIN[name]) >= 257
    # 2*gamma1 + 1 > 2*gamma2 - 1 makes the first branch negative, no clamping
    p = dataclasses.replace(BUILTIN["ours-sl2"], gamma1=2 * BUILTIN["ours-sl2"].gamma2)
    assert est.alpha_lower_bound(p) < 0


def test_sizes_examples():
    assert est.sizes(BUILTIN["dil-sl2"]) == (1312, 2476)  # 19807 sig bits, ceiled
    assert est.sizes(BUILTIN["ours-sl2"]) == (18592, 5554)
    assert est.sizes(BUILTIN["nist-sl5"]) == (24160, 18354)


def test_expected_repeats():
    assert abs(est.expected_repeats(BUILTIN["dil-sl2"]) - 4.25) <= 0.01
    assert abs(est.expected_repeats(BUILTIN["ours-sl2"]) - 5.30) <= 0.01
    assert est.repeat_rate(512, 0, 10, 4, 220929, 441858) == 1.0


def test_stmsis_examples():
    assert est.stmsis_coresvp(BUILTIN["ours-sl2"]) == (1753, 100)
    assert est.stmsis_coresvp(BUILTIN["ours-sl5"]) == (3025, 205)
    # hypothetical query bound of 1: the log term vanishes
    model = dataclasses.replace(
        est.DEFAULT_MODEL, query_bounds={lvl: 1 for lvl in range(1, 6)}
    )
    mu, cs = est.stmsis_coresvp(BUILTIN["ours-sl2"], model=model)
    assert mu == 1753
    assert cs == math.floor(0.265 * mu / 2 - 3)


def test_stmsis_eta_prime_gate():
    with pytest.raises(est.EtaPrimeInvalid):
        est.stmsis_coresvp(BUILTIN["dil-sl2"])  # no eta'
    p = dataclasses.replace(BUILTIN["ours-sl2"], eta_prime=1_000_000)
    with pytest.raises(est.EtaPrimeInvalid):
        est.stmsis_coresvp(p)
    assert est.eta_prime_limit(BUILTIN["ours-sl2"]) >= 8


def test_advantage_bound_anchors():
    n, q, k, tau = 512, Q0, 10, 40
    # eps = n*q^-k zeroes the leading factor exactly
    v = est.advantage_lower_bound(Fraction(n, q**k), 3, n, q, k, tau, 9)
    assert v == -Fraction(1, 4 * 3**9)
    v2 = est.advantage_lower_bound(1, 1, n, q, k, tau, 200)
    ball = 2**tau * math.comb(n, tau)
    assert abs(float(v2) - (1 / 324 - 1 / (36 * ball))) < 1e-15
    assert abs(float(v2) - 3.086e-3) < 1e-5


def test_advantage_bound_monotone():
    n, q, k, tau = 512, Q0, 10, 40
    lo = Fraction(n, q**k)
    grid = [lo + (1 - lo) * Fraction(i, 99) for i in range(100)]
    vals = [est.advantage_lower_bound(e, 64, n, q, k, tau, 50) for e in grid]
    assert all(a <= b for a, b in zip(vals, vals[1:]))
    wvals = [est.advantage_lower_bound(Fraction(1, 2), 64, n, q, k, tau, w) for w in range(1, 101)]
    assert all(a <= b for a, b in zip(wvals, wvals[1:]))


def test_validate_builtin_sets():
    for name in SECURITY:
        checks = est.validate(BUILTIN[name])
        failed = {c.name for c in checks if not c.passed}
        if name.startswith(("ours", "nist", "dil")):
            assert not failed, (name, failed)
        else:  # the q = 5 mod 8 sets cannot satisfy the transform congruence
            assert "q_mod_2n" in failed


def test_validate_flags_tampering():
    p = dataclasses.replace(BUILTIN["ours-sl2"], beta=81)
    failed = {c.name for c in est.validate(p) if not c.passed}
    assert "beta_eq_tau_eta" in failed


def test_validate_theorem_hypothesis_numbers():
    p = BUILTIN["ours-sl2"]
    zeta, _ = est.zeta_bounds(p)
    product = 2 * zeta * p.eta_prime * p.n * (p.k + p.l + 1)
    assert product == 189121781760  # ~1.89e11
    assert p.q // 32 == 388736063808  # ~3.89e11
    assert product < p.q // 32


def test_xi_stddev_flag_changes_answers():
    alt = dataclasses.replace(est.DEFAULT_MODEL, xi_stddev=True)
    assert est.lwe_blocksize(1024, 1024, 2, 2**23 - 8191, alt) != 448


def test_csv_emission_shape():
    rows = [(BUILTIN[n], est.report(BUILTIN[n])) for n in ("dil-sl2", "qrom-rec")]
    text = est.reports_to_csv(rows)
    lines = text.strip().splitlines()
    assert lines[0].split(",") == est.CSV_COLUMNS
    assert len(lines) == 3
    assert lines[2].split(",")[est.CSV_COLUMNS.index("stmsis_blocksize")] == "NA"


def test_search_smoke_and_bounds():
    targets = est.SearchTargets.for_level(2)
    winner = est.search(
        level=2, targets=targets, q=Q0, n=512, d=15, tau=40,
        k_range=(9, 10), l_range=(4, 5), gamma2_range=(400_000, 500_000),
    )
    assert winner.q == Q0 and winner.beta == winner.tau * winner.eta
    assert est.sizes(winner)[0] <= 18592  # a known feasible set caps the minimum
    checks = est.validate(winner)
    assert all(c.passed for c in checks)
    rep = est.report(winner)
    assert rep.lwe_coresvp >= targets.lwe
    assert rep.stmsis_coresvp >= targets.stmsis
    assert rep.sis_coresvp >= targets.sis


def test_search_empty_range():
    with pytest.raises(est.NoFeasiblePoint):
        est.search(
            level=2, targets=est.SearchTargets.for_level(2), q=Q0, n=512, d=15,
            tau=40, k_range=(5, 4), l_range=(4, 4), gamma2_range=(400_000, 500_000),
        )


def test_search_rejects_bad_modulus():
    with pytest.raises(est.NoFeasiblePoint):
        est.search(
            level=2, targets=est.SearchTargets.for_level(2), q=2**45 - 21283,
            n=512, d=15, tau=40, k_range=(4, 5), l_range=(4, 5),
            gamma2_range=(400_000, 500_000),
        )
