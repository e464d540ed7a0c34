"""Command-line interface: exit codes, determinism, output formats."""

import csv
import io
import json

import pytest

from dilith import cli, params
from expected_values import OPCOUNTS, SECURITY

SEED = "ab" * 32


def run(*argv):
    return cli.main(list(argv))


def keygen(tmp_path, set_id="ours-sl2", seed=SEED):
    pk = tmp_path / "pk.bin"
    sk = tmp_path / "sk.bin"
    code = run(
        "keygen", "--params", set_id, "--seed", seed,
        "--out-pk", str(pk), "--out-sk", str(sk),
    )
    assert code == 0
    return pk, sk


def test_keygen_deterministic(tmp_path):
    (tmp_path / "a").mkdir()
    (tmp_path / "b").mkdir()
    pk1, _ = keygen(tmp_path / "a")
    pk2, _ = keygen(tmp_path / "b")
    assert pk1.read_bytes() == pk2.read_bytes()


def test_keygen_prints_lengths(tmp_path, capsys):
    (tmp_path / "a").mkdir()
    keygen(tmp_path / "a")
    out = capsys.readouterr().out
    assert f"pk: {6 + 32 + (512 * 10 * 44 + 7) // 8} bytes" in out


def test_keygen_requires_seed(tmp_path):
    code = run("keygen", "--params", "ours-sl2",
               "--out-pk", str(tmp_path / "p"), "--out-sk", str(tmp_path / "s"))
    assert code == 2


def test_keygen_bad_seed(tmp_path):
    code = run("keygen", "--params", "ours-sl2", "--seed", "zz",
               "--out-pk", str(tmp_path / "p"), "--out-sk", str(tmp_path / "s"))
    assert code == 2


def test_keygen_rejects_invalid_params_file(tmp_path, capsys):
    bad = params.builtin("ours-sl2").to_json_dict()
    bad["beta"] = 81  # violates beta = tau * eta
    f = tmp_path / "bad.json"
    f.write_text(json.dumps(bad))
    code = run("keygen", "--params", str(f), "--seed", SEED,
               "--out-pk", str(tmp_path / "p"), "--out-sk", str(tmp_path / "s"))
    assert code == 2
    assert "beta_eq_tau_eta" in capsys.readouterr().err


def test_keygen_io_failure(tmp_path):
    code = run("keygen", "--params", "ours-sl2", "--seed", SEED,
               "--out-pk", str(tmp_path / "nodir" / "p"), "--out-sk", str(tmp_path / "s"))
    assert code == 3


def test_sign_verify_flow(tmp_path, capsys):
    pk, sk = keygen(tmp_path)
    msg = tmp_path / "msg.bin"
    msg.write_bytes(b"a message to sign")
    sig = tmp_path / "sig.bin"
    assert run("sign", "--sk", str(sk), "--in", str(msg), "--out-sig", str(sig)) == 0
    assert "attempts:" in capsys.readouterr().out
    assert run("verify", "--pk", str(pk), "--in", str(msg), "--sig", str(sig)) == 0

    other = tmp_path / "other.bin"
    other.write_bytes(b"a different message")
    assert run("verify", "--pk", str(pk), "--in", str(other), "--sig", str(sig)) == 1

    corrupted = tmp_path / "sig2.bin"
    blob = bytearray(sig.read_bytes())
    blob[len(blob) // 2] ^= 1
    corrupted.write_bytes(bytes(blob))
    assert run("verify", "--pk", str(pk), "--in", str(msg), "--sig", str(corrupted)) == 1


def test_verify_missing_file(tmp_path):
    pk, _ = keygen(tmp_path)
    msg = tmp_path / "m"
    msg.write_bytes(b"x")
    assert run("verify", "--pk", str(pk), "--in", str(msg), "--sig", str(tmp_path / "no")) == 3


def test_estimate_unknown_set():
    assert run("estimate", "--set", "no-such-set") == 2


def test_estimate_single_json(capsys):
    assert run("estimate", "--set", "ours-sl2") == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["pk_bytes"] == 18592
    assert doc["stmsis_coresvp"] == 100
    assert doc["model"]["log_base"] == 2


def test_estimate_all_tables_csv(capsys):
    assert run("estimate", "--all-tables", "--format", "csv") == 0
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert len(rows) == 14
    by_name = {r["name"]: r for r in rows}
    for name, (zeta, zp, pk, sig, reps, lwe, stmsis, sis) in SECURITY.items():
        row = by_name[name]
        assert int(row["pk_bytes"]) == pk and int(row["sig_bytes"]) == sig
        assert abs(float(row["repeats"]) - reps) <= 0.01
        assert int(row["lwe_blocksize"]) == lwe[0]
        if stmsis is None:
            assert row["stmsis_coresvp"] == "NA"
        else:
            assert int(row["stmsis_coresvp"]) == stmsis[1]


def test_estimate_all_tables_json_grouping(capsys):
    assert run("estimate", "--all-tables") == 0
    doc = json.loads(capsys.readouterr().out)
    assert set(doc) == {"dilithium", "dilithium-qrom", "nist-levels"}
    assert [r["name"] for r in doc["dilithium-qrom"]] == [
        "qrom-rec", "qrom-vh", "ours-rec", "ours-vh",
    ]
    assert doc["nist-levels"][0]["stmsis_coresvp"] == 66


def test_estimate_json_roundtrips_params_file(tmp_path, capsys):
    assert run("estimate", "--set", "ours-sl3") == 0
    doc = json.loads(capsys.readouterr().out)
    f = tmp_path / "params.json"
    f.write_text(json.dumps(doc["params"]))
    assert run("estimate", "--set", str(f)) == 0
    doc2 = json.loads(capsys.readouterr().out)
    assert doc2["params"] == doc["params"]
    assert doc2["lwe_blocksize"] == doc["lwe_blocksize"]


def test_opcounts_reproduces_comparison_column(capsys):
    assert run("opcounts", "--set", "qrom-rec") == 0
    doc = json.loads(capsys.readouterr().out)["qrom-rec"]
    for phase, (mults, adds) in OPCOUNTS["qrom-rec"].items():
        assert doc[phase] == {"mults": mults, "adds": adds}


def test_opcounts_explicit_mul(capsys):
    assert run("opcounts", "--set", "ours-rec", "--mul", "ntt") == 0
    doc = json.loads(capsys.readouterr().out)["ours-rec"]
    assert doc["cost_per_mul"] == {"mults": 7936, "adds": 13824}


def test_search_smoke(capsys):
    code = run(
        "search", "--level", "2", "--k-range", "9:10", "--l-range", "4:5",
        "--gamma2-range", "400000:500000",
    )
    assert code == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["beta"] == doc["tau"] * doc["eta"]
    assert doc["q"] == params.Q0


def test_search_result_feeds_keygen(tmp_path, capsys):
    code = run(
        "search", "--level", "2", "--k-range", "9:10", "--l-range", "4:4",
        "--gamma2-range", "400000:500000",
    )
    assert code == 0
    f = tmp_path / "won.json"
    f.write_text(capsys.readouterr().out)
    pk, sk = tmp_path / "p", tmp_path / "s"
    assert run("keygen", "--params", str(f), "--seed", SEED,
               "--out-pk", str(pk), "--out-sk", str(sk)) == 0
    msg = tmp_path / "m"
    msg.write_bytes(b"msg")
    sig = tmp_path / "sig"
    assert run("sign", "--sk", str(sk), "--in", str(msg), "--out-sig", str(sig)) == 0
    assert run("verify", "--pk", str(pk), "--in", str(msg), "--sig", str(sig)) == 0


def test_search_infeasible_exit(capsys):
    code = run(
        "search", "--level", "2", "--k-range", "5:4", "--l-range", "4:4",
        "--gamma2-range", "400000:500000",
    )
    assert code == 4


def test_lemmas_rounding(capsys):
    assert run("lemmas", "--suite", "rounding") == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["passed"]
    cases = doc["suites"]["rounding"]["cases"]
    assert {c["q"] for c in cases} == {17, 19, 23}
    assert all(c["closed_form_matches_bruteforce"] and c["below_2_over_t"] for c in cases)


def test_lemmas_ntt_and_uniformity_sampled(capsys):
    assert run("lemmas", "--suite", "ntt") == 0
    assert json.loads(capsys.readouterr().out)["suites"]["ntt"]["passed"]
    assert run("lemmas", "--suite", "uniformity", "--mode", "sampled", "--samples", "20") == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["suites"]["uniformity"]["mode"] == "sampled:20"
