"""Integration tests for the command-line interface."""

import json

import numpy as np
import pytest

from src.config import Config
from src.main import run_command

FIXTURES = Config.FIXTURES_DIR


def _run(capsys, *argv):
    code = run_command([str(a) for a in argv])
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.startswith("{") else out)


def _matrix(encoded):
    return np.array([[complex(re, im) for re, im in row] for row in encoded])


class TestCommands:
    """Test suite for the subcommands and their exit codes."""

    def test_verify(self, capsys):
        """A CPTP fixture verifies."""
        code, report = _run(capsys, "verify", FIXTURES / "dephasing-d2.json")

        assert code == 0
        assert report['ok'] is True
        assert report['command'] == "verify"
        assert report['payload']['representation'] == "kraus"
        assert set(report['inputs']) == {"dephasing-d2.json"}
        assert 'runtime_ms' not in report

    def test_verify_non_tp(self, capsys):
        """verify reports a failing channel with exit 1."""
        code, report = _run(capsys, "verify", FIXTURES / "non-tp-holevo.json")

        assert code == 1
        assert report['ok'] is False
        assert report['payload']['validation']['is_valid'] is False

    def test_decompose(self, capsys):
        """Dephasing decomposes into unit effects."""
        code, report = _run(capsys, "decompose", FIXTURES / "dephasing-d2.json", "--seed", "7")

        assert code == 0
        effects = report['payload']['decomposition']['effects']
        np.testing.assert_allclose(_matrix(effects[0]), np.diag([1, 0]), atol=1e-12)
        np.testing.assert_allclose(_matrix(effects[1]), np.diag([0, 1]), atol=1e-12)
        assert report['payload']['check']['ok'] is True

    def test_decompose_writes_holevo(self, capsys, tmp_path):
        """The written Holevo file verifies."""
        out = tmp_path / "holevo.json"
        code, _ = _run(capsys, "decompose", FIXTURES / "prepare-state-d3.json", "-o", out)
        assert code == 0

        code, report = _run(capsys, "verify", out)
        assert code == 0
        assert report['payload']['representation'] == "holevo"

    def test_decompose_identity_fails(self, capsys):
        """Non-commutative range completes with exit 1 and an error record."""
        code, report = _run(capsys, "decompose", FIXTURES / "identity-d2.json")

        assert code == 1
        assert report['error']['type'] == "NotCommutativeRange"

    def test_range_comm_identity(self, capsys):
        """Witness pair (1,2), (2,1)."""
        code, report = _run(capsys, "range-comm", FIXTURES / "identity-d2.json")

        assert code == 1
        assert report['payload']['range_commutativity']['worst_pair'] == [[1, 2], [2, 1]]

    def test_synth_null_pipeline(self, capsys, tmp_path):
        """Synthesized channel file verifies."""
        out = tmp_path / "channel.json"
        code, report = _run(capsys, "synth-null", FIXTURES / "sigmaz-span.json", "-o", out)

        assert code == 0
        assert report['payload']['check']['rank_of_effect_map'] == 3
        assert report['payload']['subspace_dimension'] == 1

        code, report = _run(capsys, "verify", out)
        assert code == 0
        assert report['payload']['dim_out'] == 3

    def test_dilate(self, capsys, tmp_path):
        """Dephasing dilates."""
        out = tmp_path / "dilation.json"
        code, report = _run(capsys, "dilate", FIXTURES / "dephasing-d2.json", "-o", out)

        assert code == 0
        assert report['payload']['dilation']['dilation_dim'] == 4
        assert json.loads(out.read_text(encoding='utf-8'))['block_count'] == 2

    def test_fixed_points(self, capsys):
        """Qutrit dephasing has a three-dimensional commutant."""
        code, report = _run(capsys, "fixed-points", FIXTURES / "dephasing-d3.json", "--seed", "3")

        assert code == 0
        assert report['payload']['commutant_dimension'] == 3
        assert report['payload']['fix_dimension'] == 3
        assert len(report['payload']['projection_checks']) == 3

    def test_fixed_points_identity(self, capsys):
        """Identity channel has no rank-one form."""
        code, report = _run(capsys, "fixed-points", FIXTURES / "identity-d2.json")

        assert code == 1
        assert report['error']['type'] == "NotRankOne"

    def test_mult_domain(self, capsys):
        """Only the diagonal projection lies in the domain."""
        code, report = _run(capsys, "mult-domain", FIXTURES / "dephasing-d2.json",
                            "--projection", FIXTURES / "projections-d2.json")

        assert code == 1
        assert report['payload']['in_domain_count'] == 1
        assert [p['in_domain'] for p in report['payload']['projections']] == [True, False]
        assert set(report['inputs']) == {"dephasing-d2.json", "projections-d2.json"}

    def test_convert_to_choi(self, capsys, tmp_path):
        """Converted file reads back in its new representation."""
        out = tmp_path / "choi.json"
        code, report = _run(capsys, "convert", FIXTURES / "dephasing-d2.json", "--to", "choi",
                            "-o", out)

        assert code == 0
        assert report['payload']['channel']['representation'] == "choi"
        sigma = _matrix(json.loads(out.read_text(encoding='utf-8'))['choi']['sigma'])
        np.testing.assert_allclose(sigma, np.diag([0.5, 0, 0, 0.5]), atol=1e-15)

    def test_text_report(self, capsys):
        """Flat key: value listing."""
        code, out = _run(capsys, "range-comm", FIXTURES / "dephasing-d3.json", "--report", "text")

        assert code == 0
        assert "ok: true" in out.splitlines()
        assert "payload.range_commutativity.commutes: true" in out.splitlines()


class TestExitCodes:
    """Test suite for usage errors and determinism."""

    def test_missing_file(self, capsys, tmp_path):
        """Unreadable input is a usage error."""
        code, report = _run(capsys, "verify", tmp_path / "absent.json")

        assert code == 2
        assert report['error']['type'] == "IoError"

    def test_validation_failure(self, capsys):
        """Analyses reject non-CPTP inputs with exit 2."""
        code, report = _run(capsys, "range-comm", FIXTURES / "non-tp-holevo.json")

        assert code == 2
        assert report['error']['type'] == "ValidationError"

    def test_no_verify(self, capsys):
        """--no-verify lets the analysis run anyway."""
        code, _ = _run(capsys, "range-comm", FIXTURES / "non-tp-holevo.json", "--no-verify")
        assert code == 0

    def test_subspace_with_trace(self, capsys, tmp_path):
        """A generator with nonzero trace is a malformed input, exit 2."""
        path = tmp_path / "subspace.json"
        path.write_text(json.dumps({'dim': 2, 'generators': [[[[1, 0], [0, 0]], [[0, 0], [0, 0]]]]}),
                        encoding='utf-8')
        code, report = _run(capsys, "synth-null", path)

        assert code == 2
        assert report['error']['type'] == "ValidationError"
        assert report['error']['details']['path'] == "generators[0]"

    def test_bad_weights(self, capsys):
        """Weights must sum to 1."""
        code, report = _run(capsys, "decompose", FIXTURES / "dephasing-d2.json",
                            "--weights", "0.5,0.6")

        assert code == 2
        assert report['error']['type'] == "BadWeights"

    @pytest.mark.parametrize("argv", [
        [],
        ["frobnicate"],
        ["verify"],
        ["verify", "x.json", "--tol-comm", "2"],
        ["convert", "x.json", "--to", "ptm"],
    ])
    def test_usage_errors(self, capsys, argv):
        """Malformed invocations exit 2."""
        assert run_command(argv) == 2
        assert capsys.readouterr().out == ""

    def test_deterministic_output(self, capsys):
        """Same input and seed, byte-identical report."""
        argv = ["decompose", str(FIXTURES / "prepare-state-d3.json"), "--seed", "5"]

        assert run_command(argv) == 0
        first = capsys.readouterr().out
        assert run_command(argv) == 0
        second = capsys.readouterr().out

        assert first == second

    @pytest.mark.parametrize("argv", [
        ["verify", "dephasing-d2.json"],
        ["range-comm", "identity-d2.json"],
        ["decompose", "prepare-state-d3.json", "--seed", "7"],
        ["synth-null", "sigmaz-span.json"],
        ["dilate", "dephasing-d2.json"],
        ["fixed-points", "dephasing-d3.json", "--seed", "7"],
        ["mult-domain", "dephasing-d2.json", "--projection", "projections-d2.json"],
    ])
    def test_pipeline_deterministic(self, capsys, argv):
        """Two consecutive runs print byte-identical reports."""
        resolved = [str(FIXTURES / a) if a.endswith(".json") else a for a in argv]

        first_code = run_command(resolved)
        first = capsys.readouterr().out
        second_code = run_command(resolved)
        second = capsys.readouterr().out

        assert first_code == second_code
        assert first == second
        assert first.endswith("\n")

    def test_tolerances_in_report(self, capsys):
        """Report echoes the effective tolerances."""
        code, report = _run(capsys, "verify", FIXTURES / "dephasing-d2.json", "--tol-recon", "1e-6")

        assert code == 0
        assert report['tolerances']['eps_recon'] == 1e-6
