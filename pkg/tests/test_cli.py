import csv
import io
import json

from cmforge.cli import (
    EXIT_CROSSCHECK_FAILED,
    EXIT_INFEASIBLE,
    EXIT_OK,
    EXIT_USAGE,
    canonical_json,
    main,
)


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_sset_text(capsys):
    code, out, err = run_cli(capsys, "sset", "--p", "47")
    assert code == EXIT_OK
    assert out.strip() == "{-11, -19, -43, -67, -163}"
    assert err == ""


def test_sset_json_roundtrip(capsys):
    code, out, _ = run_cli(capsys, "--format", "json", "sset", "--p", "47")
    assert code == EXIT_OK
    line = out.strip()
    parsed = json.loads(line)
    assert parsed["command"] == "sset"
    assert parsed["result"]["s_set"] == [-11, -19, -43, -67, -163]
    assert canonical_json(parsed) == line  # byte-identical reserialization


def test_gznorm_reference_values(capsys):
    code, out, _ = run_cli(capsys, "--format", "json", "gznorm",
                           "--p", "47", "--D", "163", "--d", "39")
    assert code == EXIT_OK
    parsed = json.loads(out.strip())
    assert parsed["result"]["norm"]["value"] == 217
    assert parsed["result"]["exponents"] == {"7": "8/1", "31": "8/1"}
    assert canonical_json(parsed) == out.strip()

    code, out, _ = run_cli(capsys, "--format", "json", "gznorm",
                           "--p", "47", "--D", "19", "--d", "11")
    parsed = json.loads(out.strip())
    assert parsed["result"]["norm"]["value"] == 1
    assert parsed["result"]["exponents"] == {}


def test_gznorm_breakdown_text(capsys):
    code, out, _ = run_cli(capsys, "gznorm", "--p", "47", "--D", "163", "--d", "39",
                           "--breakdown")
    assert code == EXIT_OK
    assert "norm: 217" in out
    assert out.count("sign=") == 4


def test_gznorm_csv_columns(capsys):
    code, out, _ = run_cli(capsys, "--format", "csv", "gznorm",
                           "--p", "47", "--D", "163", "--d", "39")
    assert code == EXIT_OK
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["p", "d", "beta", "D", "mu", "prime", "exponent"]
    assert rows[1] == ["47", "39", "33", "163", "5", "7", "8/1"]
    assert rows[2] == ["47", "39", "33", "163", "5", "31", "8/1"]


def test_gznorm_rejects_equal_discriminants(capsys):
    code, out, err = run_cli(capsys, "gznorm", "--p", "47", "--D", "39", "--d", "39")
    assert code == EXIT_USAGE
    assert "distinct" in err
    assert out == ""


def test_gznorm_rejects_small_and_inadmissible(capsys):
    code, _, err = run_cli(capsys, "gznorm", "--p", "47", "--D", "3", "--d", "39")
    assert code == EXIT_USAGE and "exceed 4" in err
    code, _, err = run_cli(capsys, "gznorm", "--p", "47", "--D", "163", "--d", "11",
                           "--beta", "40")
    assert code == EXIT_USAGE and "admissible" in err


def test_classpoly_reference_example(capsys):
    code, out, _ = run_cli(capsys, "classpoly", "--p", "47", "--d", "39")
    assert code == EXIT_OK
    lines = out.strip().splitlines()
    assert lines[-1] == "X^4 - X^3 + 2X^2 - 2X + 1"
    assert "(11, 0, 1) (19, 1, 1) (43, -1, 7) (67, 2, 13) (163, 4, 217)" in out


def test_classpoly_json(capsys):
    code, out, _ = run_cli(capsys, "--format", "json", "classpoly",
                           "--p", "47", "--d", "39")
    parsed = json.loads(out.strip())
    assert parsed["result"]["coefficients"] == [1, -2, 2, -1, 1]
    assert parsed["result"]["base_discriminant"] == -11
    assert canonical_json(parsed) == out.strip()


def test_classpoly_infeasible_exit(capsys):
    code, out, err = run_cli(capsys, "classpoly", "--p", "13", "--d", "43")
    assert code == EXIT_INFEASIBLE
    assert "pairs" in err
    code, _, err = run_cli(capsys, "classpoly", "--p", "47", "--d", "151")
    assert code == EXIT_INFEASIBLE
    assert "h(-151)+1 = 8" in err


def test_classpoly_invalid_prime(capsys):
    code, _, err = run_cli(capsys, "classpoly", "--p", "46", "--d", "39")
    assert code == EXIT_USAGE
    assert "genus" in err


def test_heegner_output(capsys):
    code, out, _ = run_cli(capsys, "heegner", "--d", "11", "--p", "47", "--beta", "41")
    assert code == EXIT_OK
    assert out.strip() == "(47, 41, 9)  tau = (-41 + sqrt(-11)) / 94"
    code, out, _ = run_cli(capsys, "--format", "csv", "heegner",
                           "--d", "39", "--p", "47", "--beta", "33")
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["a", "b", "c"]
    assert len(rows) == 5  # header + h(-39) forms


def test_crosscheck_single_pass(capsys):
    code, out, _ = run_cli(capsys, "--precision", "40", "crosscheck",
                           "--p", "2", "--d", "7", "--D", "15")
    assert code == EXIT_OK
    assert "PASS" in out
    assert "passing variant: of_mD" in out


def test_crosscheck_wrong_variant_fails(capsys):
    code, out, _ = run_cli(capsys, "--precision", "40", "--ramified-exponent", "of_m",
                           "crosscheck", "--p", "2", "--d", "7", "--D", "15")
    assert code == EXIT_CROSSCHECK_FAILED
    assert "FAIL" in out


def test_crosscheck_batch_sorted(capsys):
    code, out, _ = run_cli(capsys, "--precision", "40", "--format", "json",
                           "crosscheck", "--p", "3", "--max-disc", "40", "--count", "3")
    assert code == EXIT_OK
    parsed = json.loads(out.strip())
    checks = parsed["result"]["checks"]
    assert len(checks) == 3
    assert [(c["d"], c["D"]) for c in checks] == sorted((c["d"], c["D"]) for c in checks)
    assert parsed["result"]["all_pass"] is True


def test_crosscheck_requires_series_for_large_p(capsys):
    code, _, err = run_cli(capsys, "crosscheck", "--p", "47", "--d", "39", "--D", "163")
    assert code == EXIT_USAGE
    assert "coefficient" in err or "series" in err.lower()


def test_crosscheck_partial_pair_rejected(capsys):
    code, _, err = run_cli(capsys, "crosscheck", "--p", "2", "--d", "7")
    assert code == EXIT_USAGE


def test_crosscheck_equal_discriminants_rejected(capsys):
    code, _, err = run_cli(capsys, "crosscheck", "--p", "2", "--d", "7", "--D", "7")
    assert code == EXIT_USAGE
    assert "distinct" in err


def test_internal_errors_map_to_exit_3(capsys, monkeypatch):
    from cmforge import cli as cli_mod
    from cmforge.errors import InternalError

    def boom(args, config):
        raise InternalError("synthetic consistency failure")

    monkeypatch.setattr(cli_mod, "cmd_sset", boom)
    code = cli_mod.main(["sset", "--p", "47"])
    assert code == cli_mod.EXIT_INTERNAL
    assert "internal error" in capsys.readouterr().err


def test_eval_matches_direct_recomputation(capsys):
    code, out, _ = run_cli(capsys, "--precision", "50", "eval",
                           "--p", "2", "--tau", "0.0+1.0i")
    assert code == EXIT_OK
    shown = out.split()
    from cmforge.hauptmodul import PrecisionConfig, eta

    prec = PrecisionConfig(decimal_digits=50)
    ctx = prec.context()
    tau = ctx.mpc(0, 1)
    t = (eta(tau, prec, ctx) / eta(2 * tau, prec, ctx)) ** 24
    expected = t + 4096 / t
    assert abs(ctx.mpf(shown[0]) - expected.real) < ctx.mpf(10) ** -45
    assert abs(expected.imag) < ctx.mpf(10) ** -45


def test_eval_with_series_file(tmp_path, capsys):
    from cmforge.hauptmodul import eta_quotient_qseries

    qs = eta_quotient_qseries(5, 80)
    path = tmp_path / "p5.txt"
    body = [f"p {qs.p}", f"count {len(qs.coefficients)}"] + [str(c) for c in qs.coefficients]
    path.write_text("\n".join(body) + "\n", encoding="ascii")
    code, out, _ = run_cli(capsys, "--precision", "40", "--series", str(path),
                           "eval", "--p", "5", "--tau", "0.2+1.3i")
    assert code == EXIT_OK
    code2, out2, _ = run_cli(capsys, "--precision", "40", "eval",
                             "--p", "5", "--tau", "0.2+1.3i")
    assert out.split()[0][:30] == out2.split()[0][:30]


def test_eval_bad_tau(capsys):
    code, _, err = run_cli(capsys, "eval", "--p", "2", "--tau", "nonsense")
    assert code == EXIT_USAGE
    assert "tau" in err


def test_precision_env_override(capsys, monkeypatch):
    monkeypatch.setenv("CMFORGE_PRECISION", "45")
    code, out, _ = run_cli(capsys, "eval", "--p", "2", "--tau", "0.0+2.0i")
    assert code == EXIT_OK
    mantissa = out.split()[0].split(".")[1]
    assert len(mantissa) <= 46
    monkeypatch.setenv("CMFORGE_PRECISION", "whoops")
    code, _, err = run_cli(capsys, "eval", "--p", "2", "--tau", "0.0+2.0i")
    assert code == EXIT_USAGE and "CMFORGE_PRECISION" in err


def test_usage_error_exit_code(capsys):
    assert main(["gznorm", "--p", "47"]) == EXIT_USAGE  # missing required flags
    assert main(["unknown-command"]) == EXIT_USAGE


def test_big_integers_serialized_as_strings():
    big = 2 ** 61
    assert canonical_json({"x": big}) == f'{{"x":"{big}"}}'
    assert canonical_json({"x": 7}) == '{"x":7}'
