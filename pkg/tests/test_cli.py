"""Exit codes, JSON output, and determinism of the command-line front end."""

import json

import pytest

from starhom.cli import EXIT_MALFORMED, EXIT_OK, EXIT_VIOLATED, main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


STAR_DOC = json.dumps(
    {
        "f": {"gens": ["x1", "xi1"], "terms": [{"exp": [1, 0], "coef": "1/1"}]},
        "g": {"gens": ["x1", "xi1"], "terms": [{"exp": [0, 1], "coef": "1/1"}]},
    }
)


class TestStar:
    def test_product(self, capsys, tmp_path):
        path = tmp_path / "in.json"
        path.write_text(STAR_DOC)
        code, out, err = run_cli(
            capsys, "star", "--dim", "1", "--trunc-t", "6", "--json", str(path)
        )
        assert code == EXIT_OK
        doc = json.loads(out)
        assert doc["trunc"] == 6
        assert doc["value"]["coeffs"]["1"]["terms"][0]["coef"] == "-1/2"

    def test_missing_input(self, capsys):
        code, _, err = run_cli(capsys, "star")
        assert code == EXIT_MALFORMED
        assert "input" in err


class TestVerifyCycle:
    @pytest.mark.parametrize("chain,dim", [("phi_E", 1), ("phi_E", 2), ("phi_A", 2)])
    def test_builtin_cycles_verify(self, capsys, chain, dim):
        code, out, _ = run_cli(
            capsys, "verify-cycle", "--chain", chain, "--dim", str(dim)
        )
        assert code == EXIT_OK
        assert json.loads(out)["status"] == "verified"

    def test_non_cycle_violates(self, capsys, tmp_path):
        doc = {
            "algebra": "poly",
            "degree": 1,
            "terms": [
                {
                    "coef": "1/1",
                    "word": [
                        {"gens": ["x", "y"], "terms": [{"exp": [1, 0], "coef": "1/1"}]},
                        {"gens": ["x", "y"], "terms": [{"exp": [0, 2], "coef": "1/1"}]},
                    ],
                }
            ],
        }
        path = tmp_path / "chain.json"
        path.write_text(json.dumps(doc))
        code, out, _ = run_cli(capsys, "verify-cycle", "--json", str(path))
        # b of a 1-chain over a commutative ring is zero: this one verifies
        assert code == EXIT_OK

    def test_hb_endpoint(self, capsys, tmp_path):
        doc = {
            "algebra": "weyl",
            "degree": 1,
            "dim": 1,
            "terms": [
                {
                    "coef": "1/1",
                    "word": [
                        {"gens": ["x1", "xi1"], "terms": [{"exp": [1, 0], "coef": "1/1"}]},
                        {"gens": ["x1", "xi1"], "terms": [{"exp": [0, 1], "coef": "1/1"}]},
                    ],
                }
            ],
        }
        path = tmp_path / "chain.json"
        path.write_text(json.dumps(doc))
        code, out, _ = run_cli(capsys, "hb", "--dim", "1", "--trunc-t", "6", "--json", str(path))
        assert code == EXIT_OK
        parsed = json.loads(out)
        assert parsed["algebra"] == "weyl" and parsed["degree"] == 0


class TestMalformedInput:
    def test_bad_json_reports_position(self, capsys, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        code, _, err = run_cli(capsys, "star", "--json", str(path))
        assert code == EXIT_MALFORMED
        assert "line 1" in err and "column" in err

    def test_bad_rational(self, capsys, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(
            json.dumps(
                {
                    "f": {"gens": ["x1", "xi1"], "terms": [{"exp": [1, 0], "coef": "x"}]},
                    "g": {"gens": ["x1", "xi1"], "terms": []},
                }
            )
        )
        code, _, _ = run_cli(capsys, "star", "--json", str(path))
        assert code == EXIT_MALFORMED


class TestChecks:
    def test_charclass_rr(self, capsys):
        code, out, _ = run_cli(
            capsys, "charclass", "--class", "rr-check", "--dim", "2", "--max-deg", "6"
        )
        assert code == EXIT_OK
        assert json.loads(out)["status"] == "verified"

    def test_charclass_value_output(self, capsys):
        code, out, _ = run_cli(
            capsys, "charclass", "--class", "todd", "--dim", "1", "--max-deg", "2",
            "--basis", "chern",
        )
        assert code == EXIT_OK
        doc = json.loads(out)
        assert doc["components"]["2"]["terms"][0]["coef"] == "1/2"

    def test_fedosov_flat(self, capsys):
        code, out, _ = run_cli(
            capsys, "fedosov", "--check", "flat", "--dim", "2", "--fiber-trunc", "3"
        )
        assert code == EXIT_OK

    def test_rees_sigma(self, capsys):
        code, out, _ = run_cli(capsys, "rees", "--check", "sigma", "--seed", "7")
        assert code == EXIT_OK


class TestSuiteCommand:
    def test_mutation_makes_checks_fail(self, capsys):
        code, out, _ = run_cli(capsys, "suite", "--mutate-moyal-sign")
        assert code == EXIT_VIOLATED
        doc = json.loads(out)
        statuses = {c["id"]: c["status"] for c in doc["checks"]}
        assert statuses["C02"] == "violated"

    def test_repeat_runs_are_byte_identical(self, capsys):
        _, out1, _ = run_cli(capsys, "verify-cycle", "--chain", "phi_A", "--dim", "2", "--seed", "3")
        _, out2, _ = run_cli(capsys, "verify-cycle", "--chain", "phi_A", "--dim", "2", "--seed", "3")
        assert out1 == out2


class TestFedosovPsi:
    @pytest.mark.parametrize("dim", [1, 2])
    def test_psi_check_exact_at_flat_data(self, capsys, dim):
        code, out, _ = run_cli(
            capsys, "fedosov", "--check", "psi", "--dim", str(dim), "--fiber-trunc", "3"
        )
        assert code == EXIT_OK
        assert json.loads(out)["status"] == "verified"
