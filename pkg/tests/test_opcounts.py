"""Operation-count models and the scheme comparison table."""

from fractions import Fraction

import pytest

from dilith import opcounts as oc
from dilith.params import BUILTIN, Q_QROM
from expected_values import OPCOUNTS


def test_ntt_cost_anchors():
    assert oc.ntt_mul_cost(512) == oc.CostPair(7936, 13824)
    assert oc.ntt_mul_cost(2) == oc.CostPair(7, 6)  # 3*1 + 4 mults, 6 adds
    # formula value at n = 1024: 3/2*1024*10 + 2*1024 and 3*1024*10
    assert oc.ntt_mul_cost(1024) == oc.CostPair(17408, 30720)


def test_ntt_cost_rejects_bad_n():
    with pytest.raises(ValueError):
        oc.ntt_mul_cost(3)
    with pytest.raises(ValueError):
        oc.ntt_mul_cost(1)


def test_hntt_cost_anchor():
    assert oc.hntt_mul_cost(512, 4, 4) == oc.CostPair(55808, 183936)


def test_hntt_per_n_coefficients():
    cm, ca = oc.hntt_per_n_coefficients(4, 4)
    assert cm == Fraction(191, 2)  # 95.5
    assert ca == Fraction(1329, 4)  # 332.25


def test_hntt_minimal_split():
    sums = oc.hntt_valid_split_sums(512, Q_QROM)
    assert sums == [8, 9, 10]
    a, b, cost = oc.hntt_minimal_split(512, Q_QROM)
    assert (a, b) == (4, 4)
    assert cost == oc.CostPair(55808, 183936)


def test_hntt_non_integral():
    # split (1, 0) at n = 2 gives 3.75 extra multiplications
    with pytest.raises(oc.NonIntegralCost):
        oc.hntt_mul_cost(2, 1, 0)


def test_scheme_ring_op_counts():
    rc = oc.scheme_ring_op_counts(12, 5, 1.0)
    assert rc["mults"] == {"gen": 60, "sign": 77, "verify": 72}
    assert rc["adds"] == {"gen": 60, "sign": 65, "verify": 60}
    assert abs(oc.scheme_ring_op_counts(4, 4, 4.29)["mults"]["sign"] - 102.96) < 1e-9
    zero = oc.scheme_ring_op_counts(4, 4, 0)
    assert zero["mults"]["sign"] == 0 and zero["adds"]["sign"] == 0


@pytest.mark.parametrize("name", sorted(OPCOUNTS))
def test_comparison_table(name):
    p = BUILTIN[name]
    table = oc.zq_op_table(p, oc.mul_cost_for(p))
    for phase, (mults, adds) in OPCOUNTS[name].items():
        assert (table[phase].mults, table[phase].adds) == (mults, adds), phase


def test_default_cost_selection():
    assert oc.mul_cost_for(BUILTIN["ours-rec"]) == oc.ntt_mul_cost(512)
    assert oc.mul_cost_for(BUILTIN["qrom-rec"]) == oc.hntt_mul_cost(512, 4, 4)


def test_cost_ratios_at_n512():
    ntt = oc.ntt_mul_cost(512)
    hntt = oc.hntt_mul_cost(512, 4, 4)
    assert abs(hntt.mults / ntt.mults - 7.03) < 0.01
    assert abs(hntt.adds / ntt.adds - 13.3) < 0.01


def test_repeats_enter_rounded_to_two_decimals():
    # 77 * 5.03 * 7936 = 3073692.16 must round down to the table value
    p = BUILTIN["ours-rec"]
    table = oc.zq_op_table(p, oc.ntt_mul_cost(512), r=5.03)
    assert table["sign"].mults == 3073692


def test_cost_pair_validation():
    with pytest.raises(ValueError):
        oc.CostPair(-1, 0)


def test_csv_layout():
    sets = [(BUILTIN[n], oc.zq_op_table(BUILTIN[n], oc.mul_cost_for(BUILTIN[n])))
            for n in ("qrom-rec", "ours-rec")]
    lines = oc.comparison_to_csv(sets).strip().splitlines()
    assert lines[0] == "op,phase,qrom-rec,ours-rec"
    assert len(lines) == 7  # header + 2 ops x 3 phases
    assert lines[1] == "mults,gen,892928,476160"
