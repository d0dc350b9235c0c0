"""Tests for the command-line entry point."""

import json

import pytest

from app.main import EXIT_FAILED, EXIT_INVALID, EXIT_OK, main, normalize_argv
from app.models.report import CheckReport
from app.services.verification_service import VerificationService
from app.utils.matrices import matrix_to_json

EXAMPLE = ["--preset", "A1affine", "--word", "-1,-2,1,2"]


def _run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def _lines(out):
    return [json.loads(line) for line in out.strip().splitlines()]


class TestArgv:
    def test_signed_values_are_joined(self):
        assert normalize_argv(["seed", "build", "--word", "-1,2", "--n", "3"]) == [
            "seed",
            "build",
            "--word=-1,2",
            "--n",
            "3",
        ]

    def test_unsigned_values_untouched(self):
        assert normalize_argv(["--word", "1,2"]) == ["--word", "1,2"]

    def test_unknown_command_exits_with_usage_error(self, capsys):
        with pytest.raises(SystemExit) as excinfo:
            main(["frobnicate"])
        assert excinfo.value.code == EXIT_INVALID


class TestCartanCommand:
    def test_validate(self, capsys):
        code, out, _ = _run(capsys, "cartan", "validate", "--preset", "B2")

        assert code == EXIT_OK
        assert _lines(out) == [{"valid": True, "r": 2, "C": [[2, -2], [-1, 2]], "d": [1, 2]}]

    def test_show_affine(self, capsys, example_data):
        code, out, _ = _run(capsys, "cartan", "show", "--preset", "A1affine")
        (data,) = _lines(out)

        assert code == EXIT_OK
        assert data["rtilde"] == 3
        assert data["auto_extended"] is True
        assert data["Cfull"] == example_data["Cfull"].tolist()

    def test_invalid_matrix(self, capsys):
        code, out, err = _run(capsys, "cartan", "validate", "--matrix", "2,-1;-1,1")

        assert code == EXIT_INVALID
        assert out == ""
        assert "error: NOT_GCM" in err

    def test_missing_realization(self, capsys):
        code, _, err = _run(capsys, "cartan", "show")

        assert code == EXIT_INVALID
        assert "BAD_SHAPE" in err


class TestSeedAndEnsemble:
    def test_ensemble_json(self, capsys, example_data):
        code, out, _ = _run(capsys, "ensemble", *EXAMPLE)
        (data,) = _lines(out)

        assert code == EXIT_OK
        assert data["I"] == example_data["I"]
        assert data["B"] == matrix_to_json(example_data["B"])
        assert data["Btilde"] == matrix_to_json(example_data["Btilde"])
        assert data["abs_det"] == [2, 1]
        assert data["detBtilde"] in ([2, 1], [-2, 1])
        assert data["M"] == matrix_to_json(example_data["M"])

    def test_ensemble_json_fields(self, capsys):
        """Seed fields plus M, B~, det B~ and the absolute determinant."""
        _, out, _ = _run(capsys, "ensemble", *EXAMPLE)
        (data,) = _lines(out)

        assert set(data) == {"I", "frozen", "weights", "B", "d", "M", "Btilde", "detBtilde", "abs_det"}
        assert data["weights"] == [3, 2, 1, 1, 2, 1, 2]
        assert data["frozen"] == [True, True, True, False, False, True, True]

    def test_ensemble_is_byte_stable(self, capsys):
        _, first, _ = _run(capsys, "ensemble", *EXAMPLE)
        _, second, _ = _run(capsys, "ensemble", *EXAMPLE)

        assert first == second

    def test_ensemble_pretty(self, capsys):
        code, out, _ = _run(capsys, "ensemble", *EXAMPLE, "--format", "pretty")

        assert code == EXIT_OK
        assert "Btilde:" in out
        assert "abs_det: 2" in out

    def test_seed_build(self, capsys, example_data):
        code, out, _ = _run(capsys, "seed", "build", *EXAMPLE)
        (data,) = _lines(out)

        assert code == EXIT_OK
        assert data["word"]["u"] == [1, 2]
        unfrozen = [k for k, frozen in zip(data["I"], data["frozen"]) if not frozen]
        assert unfrozen == example_data["unfrozen"]
        assert set(data) == {"word", "I", "frozen", "weights", "B", "d"}
        assert data["weights"] == [3, 2, 1, 1, 2, 1, 2]
        assert data["B"] == matrix_to_json(example_data["B"])

    def test_seed_build_pretty(self, capsys):
        code, out, _ = _run(capsys, "seed", "build", *EXAMPLE, "--format", "pretty")

        assert code == EXIT_OK
        assert "B:" in out
        assert "weights: [3, 2, 1, 1, 2, 1, 2]" in out

    def test_seed_mutate(self, capsys):
        code, out, _ = _run(capsys, "seed", "mutate", *EXAMPLE, "--seq", "1,2")
        (data,) = _lines(out)

        assert code == EXIT_OK
        assert data["sequence"] == [1, 2]
        assert data["A"]["-3"] == "Am3"

    def test_mutate_frozen_index(self, capsys):
        code, _, err = _run(capsys, "seed", "mutate", *EXAMPLE, "--seq", "3")

        assert code == EXIT_INVALID
        assert "FROZEN_INDEX" in err

    def test_non_reduced_word(self, capsys):
        code, _, err = _run(capsys, "seed", "build", "--preset", "A2", "--word", "1,1")

        assert code == EXIT_INVALID
        assert "NOT_REDUCED" in err


class TestVerifyCommand:
    def test_worked_example(self, capsys):
        code, out, _ = _run(capsys, "verify", "worked-example")
        lines = _lines(out)

        assert code == EXIT_OK
        assert lines[-1]["check"] == "summary"
        assert lines[-1]["pass"] is True

    def test_paper_example_runs_the_worked_example(self, capsys):
        code, out, _ = _run(capsys, "verify", "paper-example")
        _, alias_out, _ = _run(capsys, "verify", "worked-example")

        assert code == EXIT_OK
        assert out == alias_out
        lines = _lines(out)
        checks = [line["check"] for line in lines]
        assert "example-Btilde" in checks
        assert "example-det" in checks
        assert lines[-1]["witness"]["failed"] == 0

    def test_def_oracle_reproducible(self, capsys):
        argv = ["verify", "def-oracle", "--trials", "5", "--rng-seed", "7", "--max-length", "6"]
        code, first, _ = _run(capsys, *argv)
        _, second, _ = _run(capsys, *argv)

        assert code == EXIT_OK
        assert first == second
        assert len(first.strip().splitlines()) == 6

    def test_gendetid_custom_triple(self, capsys):
        code, out, _ = _run(
            capsys, "verify", "gendetid", "--n", "4", "--u", "2", "--v", "3", "--i", "1", "--trials", "2"
        )

        assert code == EXIT_OK
        assert _lines(out)[0]["instance"] == {"n": 4, "u": [2], "v": [3], "i": 1}

    def test_gendetid_length_precondition(self, capsys):
        code, _, err = _run(
            capsys, "verify", "gendetid", "--n", "4", "--u", "2", "--v", "3", "--i", "2"
        )

        assert code == EXIT_INVALID
        assert "PRECONDITION_VIOLATED" in err

    def test_word_required(self, capsys):
        code, _, err = _run(capsys, "verify", "poisson", "--preset", "A2")

        assert code == EXIT_INVALID
        assert "needs --word" in err

    def test_pretty_report_lines(self, capsys):
        code, out, _ = _run(capsys, "verify", "poisson", *EXAMPLE, "--format", "pretty")

        assert code == EXIT_OK
        assert out.splitlines()[0].startswith("PASS poisson-word")
        assert out.splitlines()[-1].startswith("PASS summary")

    def test_invalid_threads(self, capsys):
        code, _, err = _run(capsys, "verify", "worked-example", "--threads", "0")

        assert code == EXIT_INVALID
        assert "CONFIG_ERROR" in err

    def test_failed_report_exit_code(self, capsys, monkeypatch):
        monkeypatch.setattr(
            VerificationService,
            "poisson_suite",
            lambda self, word: [CheckReport("poisson-word", {}, False, {})],
        )

        code, _, _ = _run(capsys, "verify", "poisson", *EXAMPLE)
        assert code == EXIT_FAILED
