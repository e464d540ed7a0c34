"""Brute-force lemma checks at toy moduli."""

from fractions import Fraction

import numpy as np
import pytest
import sympy

from dilith import lemma_lab as lab
from dilith import ring


def test_rounding_spec_invariants():
    spec = lab.RoundingSpec(17, 4)
    edges = spec.bucket_edges()
    assert edges == [(0, 3), (4, 7), (8, 11), (12, 16)]
    sizes = [hi - lo + 1 for lo, hi in edges]
    assert sizes[:-1] == [spec.width] * 3
    assert spec.q / spec.t <= spec.last_size <= spec.q / spec.t + spec.t - 1


def test_rounding_spec_rejects():
    with pytest.raises(ValueError):
        lab.RoundingSpec(16, 4)  # not prime
    with pytest.raises(ValueError):
        lab.RoundingSpec(17, 0)


def test_round_t_examples():
    spec = lab.RoundingSpec(17, 4)
    assert lab.round_t(0, spec) == 0
    assert lab.round_t(11, spec) == 2
    assert lab.round_t(12, spec) == 3
    assert lab.round_t(16, spec) == 3  # last bucket absorbs the remainder


def test_p_t_17_4():
    spec = lab.RoundingSpec(17, 4)
    assert lab.p_t_exact(spec) == Fraction(73, 289)  # 3*16 + 25 over 17^2
    assert lab.p_t_bruteforce(spec) == Fraction(73, 289)
    assert lab.p_t_exact(spec) <= Fraction(2, 4)


def test_p_t_closed_form_matches_bruteforce_all_small_primes():
    for q in sympy.primerange(17, 98):
        t = 1
        while t * t <= q:
            spec = lab.RoundingSpec(int(q), t)
            exact = lab.p_t_exact(spec)
            assert exact == lab.p_t_bruteforce(spec), (q, t)
            assert exact <= Fraction(1, t) + Fraction(t, int(q))  # proof's midpoint
            assert exact <= Fraction(2, t)
            t += 1


def test_p_t_single_bucket():
    spec = lab.RoundingSpec(17, 1)
    assert lab.p_t_exact(spec) == 1
    assert lab.p_t_bruteforce(spec) == 1


def test_p_t_precondition():
    with pytest.raises(lab.PreconditionViolated):
        lab.p_t_exact(lab.RoundingSpec(17, 5))
    with pytest.raises(lab.PreconditionViolated):
        lab.p_t_bruteforce(lab.RoundingSpec(17, 5))


def test_uniformity_unit_delta(ctx17):
    assert lab.uniformity_check(ctx17, 1, ctx17.vector([ctx17.one()]), 0)


def test_uniformity_binomial_delta(ctx17):
    delta = ctx17.vector([ctx17.element([1, 1, 0, 0])])
    assert lab.uniformity_check(ctx17, 1, delta, 2)


def test_uniformity_rejects_zero(ctx17):
    with pytest.raises(ValueError):
        lab.uniformity_check(ctx17, 1, ctx17.vector([ctx17.zero()]), 0)


def test_uniformity_too_large(ctx17):
    delta = ctx17.vector([ctx17.one(), ctx17.one()])
    with pytest.raises(lab.TooLarge):
        lab.uniformity_check(ctx17, 2, delta, 0)


def test_uniformity_length_two_vector():
    ctx = ring.make_ring(5, 2)
    delta = ctx.vector([ctx.zero(), ctx.element([0, 3])])
    assert lab.uniformity_check(ctx, 2, delta, 1)


def test_sweep_sampled(ctx17):
    res = lab.uniformity_sweep(ctx17, 1, 0, mode="sampled", samples=30, seed=5)
    assert res.passed and res.mode == "sampled:30" and res.checked == 30


def test_sweep_full_tiny():
    ctx = ring.make_ring(5, 2)
    res = lab.uniformity_sweep(ctx, 1, 1, mode="full")
    assert res.passed and res.mode == "full" and res.checked == 24


def test_sweep_auto_mode_selection():
    # 5^2 = 25 vectors: trivially under the op threshold, auto goes full
    ctx = ring.make_ring(5, 2)
    assert lab.uniformity_sweep(ctx, 1, 0, mode="auto").mode == "full"
    # 41^4 ~ 2.8e6 vectors: the pairwise estimate overshoots 2^33, auto samples
    ctx41 = ring.make_ring(41, 4)
    res = lab.uniformity_sweep(ctx41, 1, 0, mode="auto", samples=3, seed=1)
    assert res.mode == "sampled:3" and res.passed


def test_sweep_walk_matches_direct_check():
    # the incremental full-sweep tally must agree with per-delta enumeration
    ctx = ring.make_ring(5, 2)
    assert lab.uniformity_sweep(ctx, 1, 0, mode="full").passed
    for c0 in range(5):
        for c1 in range(5):
            if (c0, c1) != (0, 0):
                d = ctx.vector([ctx.element([c0, c1])])
                assert lab.uniformity_check(ctx, 1, d, 0)


def test_isomorphism_exhaustive(ctx17):
    res = lab.isomorphism_exhaustive(ctx17, pairs=10_000)
    assert res.passed
    assert res.elements == 17**4
    assert res.roundtrip_ok and res.homomorphism_ok and res.primitive_sums_ok


def test_isomorphism_too_large(ctx0):
    with pytest.raises(lab.TooLarge):
        lab.isomorphism_exhaustive(ctx0)


def test_primitive_sums(ctx17):
    assert lab.primitive_sums_vanish(ctx17)
    # the m = 1 sum evaluates to 1 + 13 + 16 + 4 = 34 = 0 mod 17
    w2 = pow(9, 2, 17)
    assert sum(pow(w2, j, 17) for j in range(4)) % 17 == 0


def test_negacyclic_batch_against_schoolbook(ctx17):
    rng = np.random.default_rng(8)
    a = rng.integers(0, 17, size=(50, 4))
    b = rng.integers(0, 17, size=(50, 4))
    got = lab._negacyclic_batch(a, b, 4, 17)
    for i in range(50):
        want = ring.schoolbook_mul(ctx17, ring.RingElement(a[i]), ring.RingElement(b[i]))
        assert np.array_equal(got[i], want.coeffs)


def test_theorem_hypotheses():
    checks = lab.check_theorem_hypotheses(12439554041857, 512, 10, 5, 1539077, 8)
    assert all(c.passed for c in checks)
    small_q = lab.check_theorem_hypotheses(13, 2, 1, 1, 1, 1)
    assert not small_q[0].passed  # q >= 16 fails
    tight = lab.check_theorem_hypotheses(12439554041857, 512, 10, 5, 1539077, 800)
    assert not tight[1].passed
