"""End-to-end tests for the command-line interface."""

import json
import subprocess
import sys
from fractions import Fraction

import pytest

from qmaass.cli import (
    RunConfig,
    UsageError,
    build_parser,
    parse_matrix,
    parse_rational,
    parse_rational_pair,
    parse_tau,
    run,
)
from qmaass.theta import family_params


def _run(capsys, *argv):
    """Run the CLI in-process; return (exit_code, stdout lines, stderr)."""
    code = run(list(argv))
    captured = capsys.readouterr()
    lines = [line for line in captured.out.splitlines() if line]
    return code, lines, captured.err


def _json_lines(lines):
    return [json.loads(line) for line in lines]


# ------------------------------------------------------------ exact parsing


class TestParsing:
    def test_rational_is_exact(self):
        value = parse_rational("1/10")
        assert value == Fraction(1, 10)
        assert value.denominator == 10

    def test_rational_rejects_garbage(self):
        with pytest.raises(UsageError):
            parse_rational("one half")
        with pytest.raises(UsageError):
            parse_rational("1/0")

    def test_rational_pair(self):
        assert parse_rational_pair("1/3,-2/5") == (Fraction(1, 3), Fraction(-2, 5))
        with pytest.raises(UsageError):
            parse_rational_pair("1/3")

    def test_tau_forms(self):
        assert parse_tau("i") == 1j
        assert parse_tau("0.5,2.0") == complex(0.5, 2.0)
        with pytest.raises(UsageError):
            parse_tau("0.5,-1.0")
        with pytest.raises(UsageError):
            parse_tau("nonsense")

    def test_matrix(self):
        assert parse_matrix("0,-1,2,0") == (0, -1, 2, 0)
        with pytest.raises(UsageError):
            parse_matrix("1,2,3")

    def test_runconfig_keeps_fractions(self):
        ns = build_parser().parse_args(
            ["eval", "quantum", "--j", "1", "--k", "1", "--l", "1", "--x", "1/7"]
        )
        cfg = RunConfig.from_args(ns)
        assert cfg.x == Fraction(1, 7)
        assert isinstance(cfg.x, Fraction)

    def test_bad_thread_env(self, capsys, monkeypatch):
        monkeypatch.setenv("QMAASS_THREADS", "zero")
        code, _, err = _run(capsys, "verify", "sigma", "--order", "10")
        assert code == 2
        assert "QMAASS_THREADS" in err


# ------------------------------------------------------------ verify


class TestVerify:
    def test_sigma_suite(self, capsys):
        code, lines, _ = _run(capsys, "verify", "sigma", "--order", "60")
        assert code == 0
        objs = _json_lines(lines)
        assert len(objs) == 4
        assert all(o["status"] == "pass" for o in objs)
        kinds = {(o["params"]["series"], o["params"]["rhs"]) for o in objs}
        assert ("sigma", "indefinite") in kinds
        assert ("sigma-star", "alternating") in kinds

    def test_params_suite_count(self, capsys):
        code, lines, _ = _run(capsys, "verify", "params", "--kmax", "4")
        assert code == 0
        # Four families, one check per (k, ell) with ell <= k <= 4.
        assert len(lines) == 4 * (1 + 2 + 3 + 4)
        assert all(o["status"] == "pass" for o in _json_lines(lines))

    def test_ag_suite(self, capsys):
        code, lines, _ = _run(capsys, "verify", "ag", "--kmax", "2", "--nmax", "4")
        assert code == 0
        objs = _json_lines(lines)
        # k = 2 only, ell in {1, 2}; n in 0..4 for b=0 and 1..4 for b=1.
        assert len(objs) == 2 * (5 + 4)
        assert all(o["status"] == "pass" for o in objs)

    def test_bailey_suite(self, capsys):
        code, lines, _ = _run(
            capsys, "verify", "bailey", "--kmax", "2", "--nmax", "6", "--order", "30"
        )
        assert code == 0
        assert all(o["status"] == "pass" for o in _json_lines(lines))

    def test_lattice_and_embedding_suites(self, capsys):
        for suite in ("prop32", "thm1"):
            code, lines, _ = _run(
                capsys, "verify", suite, "--kmax", "2", "--order", "40"
            )
            assert code == 0, suite
            assert len(lines) == 4 * 3
            assert all(o["status"] == "pass" for o in _json_lines(lines))

    def test_completion_suite(self, capsys):
        code, lines, _ = _run(capsys, "verify", "completion")
        assert code == 0
        objs = _json_lines(lines)
        assert len(objs) == 3
        assert objs[-1]["check"] == "completion_defect_control"
        assert objs[-1]["defect"] > 1e-3

    def test_cohen_suite(self, capsys):
        code, lines, _ = _run(capsys, "verify", "cohen", "--ncut", "600")
        assert code == 0
        objs = _json_lines(lines)
        assert len(objs) == 5
        assert objs[0]["check"] == "cohen_waveform_real_on_axis"
        assert abs(objs[0]["value_im"]) < 1e-8

    def test_duality_suite(self, capsys):
        code, lines, _ = _run(
            capsys, "verify", "duality", "--kmax", "2", "--nmax", "8"
        )
        assert code == 0
        assert len(lines) == 3 * 8
        assert all(o["status"] == "pass" for o in _json_lines(lines))

    def test_all_runs_every_suite(self, capsys):
        code, lines, _ = _run(
            capsys,
            "verify", "all", "--kmax", "2", "--nmax", "4", "--order", "30",
            "--ncut", "600",
        )
        assert code == 0
        # Every suite contributes at least one distinct check name.
        checks = {o["check"] for o in _json_lines(lines)}
        assert len(checks) >= 8

    def test_thread_count_does_not_change_output(self, capsys, monkeypatch):
        monkeypatch.setenv("QMAASS_THREADS", "1")
        _, serial, _ = _run(capsys, "verify", "bailey", "--kmax", "2", "--order", "25")
        monkeypatch.setenv("QMAASS_THREADS", "4")
        _, pooled, _ = _run(capsys, "verify", "bailey", "--kmax", "2", "--order", "25")
        assert serial == pooled

    def test_unknown_suite_is_usage_error(self, capsys):
        with pytest.raises(SystemExit) as info:
            run(["verify", "nosuchsuite"])
        assert info.value.code == 2
        capsys.readouterr()


# ------------------------------------------------------------ expand


class TestExpand:
    def test_family_table_has_order_rows(self, capsys):
        code, lines, _ = _run(
            capsys, "expand", "f", "--j", "1", "--k", "2", "--l", "1",
            "--order", "50",
        )
        assert code == 0
        assert lines[0] == "n,coefficient"
        assert len(lines) == 51
        assert lines[1] == "0,1"

    def test_hpoly_shortest_chain_is_all_ones(self, capsys):
        code, lines, _ = _run(capsys, "expand", "hpoly", "--k", "1")
        assert code == 0
        assert lines[0] == "n,coefficients"
        assert len(lines) == 10
        assert all(line.split(",")[1] == "1" for line in lines[1:])

    def test_hpoly_longer_chain(self, capsys):
        code, lines, _ = _run(
            capsys, "expand", "hpoly", "--k", "2", "--l", "1", "--nmax", "3"
        )
        assert code == 0
        rows = [line.split(",", 1) for line in lines[1:]]
        assert rows[0] == ["0", "1"]
        # Row n has a nonconstant polynomial from n = 1 on.
        assert " " in rows[2][1]

    def test_classical_tables(self, capsys):
        code, lines, _ = _run(capsys, "expand", "sigma", "--order", "12")
        assert code == 0
        assert len(lines) == 13
        assert lines[1] == "0,1"
        code, lines, _ = _run(capsys, "expand", "sigma-star", "--order", "4")
        assert code == 0
        assert [line.split(",")[1] for line in lines[1:]] == ["0", "-2", "-2", "-2"]

    def test_theta_matches_family_after_shift(self, capsys):
        data = family_params(1, 1, 1)
        code, f_lines, _ = _run(
            capsys, "expand", "f", "--j", "1", "--k", "1", "--l", "1",
            "--order", "30", "--format", "json",
        )
        assert code == 0
        fam = {
            int(o["n"]): Fraction(o["coefficient"]) for o in _json_lines(f_lines)
        }
        code, t_lines, _ = _run(
            capsys, "expand", "s-theta", "--j", "1", "--k", "1", "--l", "1",
            "--order", "30", "--format", "json",
        )
        assert code == 0
        for obj in _json_lines(t_lines):
            exponent = Fraction(obj["exponent"])
            coeff = Fraction(obj["coefficient"])
            inner = (exponent - data.alpha) / data.power
            assert inner.denominator == 1
            assert coeff == data.scale * fam[int(inner)]

    def test_theta_with_explicit_parameters(self, capsys):
        code, lines, _ = _run(
            capsys, "expand", "s-theta", "--M", "3", "--a", "1/3,1/8",
            "--b", "1/5,1/7", "--order", "5",
        )
        assert code == 0
        assert lines[0] == "exponent,coefficient"
        assert len(lines) > 1

    def test_negative_part_table(self, capsys):
        code, lines, _ = _run(
            capsys, "expand", "negative-part", "--M", "3", "--l", "1",
            "--order", "20",
        )
        assert code == 0
        assert lines[0] == "exponent,coefficient,region,anomalous_terms"
        assert len(lines) > 1
        assert all(line.split(",")[2] == "printed" for line in lines[1:])

    def test_out_file(self, capsys, tmp_path):
        path = tmp_path / "table.csv"
        code, lines, _ = _run(
            capsys, "expand", "sigma", "--order", "6", "--out", str(path)
        )
        assert code == 0
        assert lines == []
        content = path.read_text().splitlines()
        assert content[0] == "n,coefficient"
        assert len(content) == 7

    def test_missing_flag_is_usage_error(self, capsys):
        code, _, err = _run(capsys, "expand", "f", "--j", "1", "--k", "2",
                            "--order", "10")
        assert code == 2
        assert "--l" in err


# ------------------------------------------------------------ eval


class TestEval:
    def test_quantum_exact_integer(self, capsys):
        code, lines, _ = _run(
            capsys, "eval", "quantum", "--j", "4", "--k", "1", "--l", "1",
            "--x", "0/1",
        )
        assert code == 0
        obj = json.loads(lines[0])
        assert obj["value"] == "-2"
        assert obj["order"] == 1

    def test_quantum_periodicity(self, capsys):
        _, lines_a, _ = _run(
            capsys, "eval", "quantum", "--j", "1", "--k", "1", "--l", "1",
            "--x", "1/3",
        )
        _, lines_b, _ = _run(
            capsys, "eval", "quantum", "--j", "1", "--k", "1", "--l", "1",
            "--x", "4/3",
        )
        a, b = json.loads(lines_a[0]), json.loads(lines_b[0])
        assert a["value_re"] == pytest.approx(b["value_re"], abs=1e-15)
        assert a["value_im"] == pytest.approx(b["value_im"], abs=1e-15)

    def test_waveform_cohen_real_on_axis(self, capsys):
        code, lines, _ = _run(
            capsys, "eval", "waveform", "--cohen", "--tau", "i",
            "--ncut", "800",
        )
        assert code == 0
        obj = json.loads(lines[0])
        assert obj["model"] == "cohen"
        assert obj["value_im"] == 0.0
        assert obj["value_re"] != 0.0

    def test_waveform_family_route(self, capsys):
        code, lines, _ = _run(
            capsys, "eval", "waveform", "--j", "1", "--k", "1", "--l", "1",
            "--tau", "i", "--lattice-cut", "8",
        )
        assert code == 0
        obj = json.loads(lines[0])
        assert obj["model"] == "theta"
        assert abs(obj["value_re"]) + abs(obj["value_im"]) > 0.0
        assert obj["tail_bound"] < 1e-12

    def test_radial_pass_and_fail_codes(self, capsys):
        code, lines, _ = _run(
            capsys, "eval", "radial", "--j", "1", "--k", "1", "--l", "1",
            "--x", "0/1",
        )
        assert code == 0
        assert json.loads(lines[0])["status"] == "pass"
        code, lines, _ = _run(
            capsys, "eval", "radial", "--j", "1", "--k", "1", "--l", "1",
            "--x", "0/1", "--tol", "1e-20",
        )
        assert code == 1
        assert json.loads(lines[0])["status"] == "fail"

    def test_cocycle_three_samples(self, capsys):
        code, lines, _ = _run(
            capsys, "eval", "cocycle", "--cohen", "--gamma", "0,-1,2,0",
            "--xs", "1/5,1/4,1/3",
        )
        assert code == 0
        objs = _json_lines(lines)
        assert [o["x"] for o in objs] == ["1/5", "1/4", "1/3"]
        assert all("value_re" in o and "value_im" in o for o in objs)

    def test_cocycle_insufficient_extent_is_precision_failure(self, capsys):
        code, _, err = _run(
            capsys, "eval", "cocycle", "--cohen", "--gamma", "0,-1,2,0",
            "--xs", "1/5", "--ncut", "100",
        )
        assert code == 3
        assert "precision" in err

    def test_cocycle_requires_cohen(self, capsys):
        code, _, err = _run(
            capsys, "eval", "cocycle", "--gamma", "0,-1,2,0", "--xs", "1/5"
        )
        assert code == 2
        assert "--cohen" in err


# ------------------------------------------------------------ entry point


def test_console_script_entry_point():
    result = subprocess.run(
        [sys.executable, "-m", "qmaass.cli", "verify", "sigma", "--order", "30"],
        capture_output=True,
        text=True,
        timeout=120,
    )
    assert result.returncode == 0
    assert len(result.stdout.splitlines()) == 4
