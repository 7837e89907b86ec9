"""
Test cases for the divaudit command line.
"""

import csv
import json
import math
import re

import pytest

from divaudit.cli import EXIT_NO_VIOLATION, EXIT_OK, EXIT_USAGE, RunConfig, main


def _load(path):
    with open(path) as f:
        return json.load(f)


class TestDiv:
    """test the div command"""

    def test_jsd(self, tmp_path, capsys):
        assert main(["div", "--measure", "jsd", "--p", "[1, 0]", "--q", "[0, 1]", "--output", str(tmp_path)]) == EXIT_OK
        data = _load(tmp_path / "div.json")
        assert data["schema"] == 1
        assert data["measure"] == "jsd"
        assert data["value"] == pytest.approx(1.0)
        assert "timestamp" in data
        out = capsys.readouterr().out
        assert out.startswith("jsd = ")
        assert out.rstrip().endswith("(base 2)")

    def test_infinite_kl(self, tmp_path):
        assert main(["div", "--measure", "kl", "--p", "0.5,0.5", "--q", "1,0", "--output", str(tmp_path)]) == EXIT_OK
        assert _load(tmp_path / "div.json")["value"] == "inf"

    def test_f_divergence(self, tmp_path):
        args = ["div", "--measure", "f:tv", "--p", "0.2,0.8", "--q", "0.5,0.5", "--output", str(tmp_path)]
        assert main(args) == EXIT_OK
        data = _load(tmp_path / "div.json")
        assert data["value"] == pytest.approx(0.3)
        assert data["base"] == "e"

    @pytest.mark.parametrize("oracle", [False, True])
    def test_cauchy(self, tmp_path, oracle):
        args = ["div", "--family", "cauchy", "--gen", "kl", "--a", "0,1", "--b", "0,2", "--output", str(tmp_path)]
        assert main(args + (["--oracle"] if oracle else [])) == EXIT_OK
        data = _load(tmp_path / "div.json")
        assert data["zeta"] == pytest.approx(1.25)
        assert data["value"] == pytest.approx(math.log(1.125), abs=1e-9)

    def test_cauchy_far_apart(self, tmp_path, capsys):
        args = ["div", "--family", "cauchy", "--gen", "kl", "--a", "0,1", "--b", "0,1000", "--output", str(tmp_path)]
        assert main(args) == EXIT_OK
        data = _load(tmp_path / "div.json")
        assert data["value"] == pytest.approx(math.log((1 + data["zeta"]) / 2), abs=1e-9)
        assert "(base e)" in capsys.readouterr().out

    def test_cauchy_sweep(self, tmp_path):
        args = ["div", "--family", "cauchy", "--gen", "js", "--sweep", "0.1,0.01", "--output", str(tmp_path)]
        assert main(args) == EXIT_OK
        with open(tmp_path / "cauchy_sweep_js.csv") as f:
            rows = list(csv.reader(f))
        assert rows[0] == ["t", "h", "h_prime", "h_double_prime", "ratio"]
        assert [float(r[0]) for r in rows[1:]] == [0.1, 0.01]

    @pytest.mark.parametrize(
        "args",
        [
            ["div", "--family", "cauchy", "--measure", "jsd", "--gen", "js", "--a", "0,1", "--b", "0,2"],
            ["div", "--family", "cauchy", "--a", "0,1", "--b", "0,2"],
            ["div", "--measure", "jsd", "--p", "0.5,0.5"],
            ["div", "--measure", "hellinger", "--p", "0.5,0.5", "--q", "0.2,0.8"],
            ["div", "--measure", "jsd", "--p", "0.5,0.5", "--q", "0.2,0.3,0.5"],
            ["div", "--measure", "jsd", "--p", "-1,2", "--q", "0.2,0.8"],
        ],
    )
    def test_invalid(self, tmp_path, args):
        assert main(args + ["--output", str(tmp_path)]) == EXIT_USAGE


class TestAudit:
    """test the audit subcommands"""

    def test_find_and_amplify(self, tmp_path):
        assert main(["audit", "find", "--family", "multinomial", "--alpha", "0.6", "--output", str(tmp_path)]) == EXIT_OK
        cert = _load(tmp_path / "certificate.json")
        assert cert["family"] == "multinomial"
        assert cert["margin"] > 1e-10

        args = ["audit", "amplify", "--cert", str(tmp_path / "certificate.json"), "--beta", "2"]
        assert main(args + ["--output", str(tmp_path)]) == EXIT_OK
        amplified = _load(tmp_path / "certificate_amplified.json")
        assert amplified["alpha"] == pytest.approx(1.2)
        assert amplified["margin"] > 0

    def test_find_embedded(self, tmp_path):
        args = ["audit", "find", "--alpha", "0.75", "--n", "5", "--output", str(tmp_path)]
        assert main(args) == EXIT_OK
        assert all(len(p) == 5 for p in _load(tmp_path / "certificate.json")["points"])

    def test_find_cauchy(self, tmp_path):
        args = ["audit", "find", "--family", "cauchy", "--gen", "kl", "--alpha", "0.75", "--output", str(tmp_path)]
        assert main(args) == EXIT_OK
        assert _load(tmp_path / "certificate.json")["generator"] == "kl"

    def test_no_violation(self, tmp_path, capsys):
        args = ["audit", "find", "--family", "multinomial", "--alpha", "0.5", "--output", str(tmp_path)]
        assert main(args) == EXIT_NO_VIOLATION
        assert "max margin" in capsys.readouterr().err
        assert not (tmp_path / "certificate.json").exists()

    def test_tv_gate(self, tmp_path):
        args = ["audit", "find", "--family", "cauchy", "--gen", "tv", "--alpha", "0.6", "--output", str(tmp_path)]
        assert main(args) == EXIT_USAGE

    def test_random(self, tmp_path):
        args = ["audit", "random", "--alpha", "0.5", "--trials", "2000", "--seed", "3", "--output", str(tmp_path)]
        assert main(args) == EXIT_OK
        report = _load(tmp_path / "audit_random.json")
        assert report["violations"] == 0
        assert report["seed"] == 3

    def test_deterministic(self, tmp_path):
        texts = []
        for name in ("a", "b"):
            out = tmp_path / name
            assert main(["audit", "find", "--alpha", "0.6", "--n", "3", "--output", str(out)]) == EXIT_OK
            text = (out / "certificate.json").read_text()
            texts.append(re.sub(r'"timestamp": "[^"]*"', "", text))
        assert texts[0] == texts[1]

    def test_missing_certificate(self, tmp_path):
        args = ["audit", "amplify", "--cert", str(tmp_path / "nope.json"), "--beta", "2", "--output", str(tmp_path)]
        assert main(args) == EXIT_USAGE

    def test_beta_below_one(self, tmp_path):
        main(["audit", "find", "--alpha", "0.6", "--output", str(tmp_path)])
        args = ["audit", "amplify", "--cert", str(tmp_path / "certificate.json"), "--beta", "0.5"]
        assert main(args + ["--output", str(tmp_path)]) == EXIT_USAGE


class TestLimits:
    """test the limits command"""

    def test_cauchy(self, tmp_path):
        assert main(["limits", "cauchy", "--gen", "kl", "--output", str(tmp_path)]) == EXIT_OK
        summary = _load(tmp_path / "limits_cauchy_kl.json")
        assert all(e["passed"] for e in summary["estimates"])
        assert [e["expected"] for e in summary["estimates"][:3]] == [4.0, 4.0, 4.0]
        with open(tmp_path / "limits_cauchy_kl.csv") as f:
            rows = list(csv.reader(f))
        assert rows[0][0] == "t"
        assert len(rows) == 6

    def test_jsd(self, tmp_path):
        assert main(["limits", "jsd", "--grid", "0.1,0.01,0.001", "--output", str(tmp_path)]) == EXIT_OK
        assert all(e["passed"] for e in _load(tmp_path / "limits_jsd.json")["estimates"])

    def test_tv(self, tmp_path):
        assert main(["limits", "tv", "--output", str(tmp_path)]) == EXIT_OK
        estimates = _load(tmp_path / "limits_tv.json")["estimates"]
        assert estimates[1]["expected"] == pytest.approx(1 / math.pi)

    def test_cauchy_needs_generator(self, tmp_path):
        assert main(["limits", "cauchy", "--output", str(tmp_path)]) == EXIT_USAGE


class TestArguments:
    """test usage errors and global flags"""

    @pytest.mark.parametrize(
        "args",
        [
            [],
            ["audit", "find"],
            ["limits", "normal"],
            ["limits", "jsd", "--grid", "a,b"],
            ["div", "--family", "normal"],
        ],
    )
    def test_usage_exits_with_one(self, args):
        with pytest.raises(SystemExit) as excinfo:
            main(args)
        assert excinfo.value.code == EXIT_USAGE

    def test_output_from_environment(self, output_dir):
        assert main(["div", "--measure", "tvd", "--p", "1,0", "--q", "0,1"]) == EXIT_OK
        assert _load(output_dir / "div.json")["value"] == 2.0

    def test_tolerance_must_be_positive(self, tmp_path):
        assert main(["limits", "jsd", "--tolerance", "0", "--output", str(tmp_path)]) == EXIT_USAGE

    def test_validate_before_compute(self):
        cfg = RunConfig(command="audit-find", family="cauchy", alpha=0.6)
        with pytest.raises(ValueError, match="--gen"):
            cfg.validate()
