"""
Komut satırı testleri: alt komutlar, çıkış kodları ve yeniden üretilebilirlik
"""

import json

import pandas as pd
import pytest

from app.cli import EXIT_DOMAIN, EXIT_OK, EXIT_USAGE, main
from app.services.manifest import DIGEST_COLUMN


def run(capsys, *argv):
    code = main([str(arg) for arg in argv])
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def _without_wall_clock(document: dict) -> dict:
    document = dict(document)
    document.pop("runtime", None)
    manifest = dict(document["manifest"])
    manifest.pop("wall_clock", None)
    document["manifest"] = manifest
    return document


@pytest.fixture
def binary_file(data_dir):
    return data_dir / "binary.json"


@pytest.fixture
def single_child_file(tmp_path):
    path = tmp_path / "single.json"
    path.write_text(
        json.dumps({"version": 1, "format": "cone-model", "matrix": [[1]], "v_per": [0.0]}),
        encoding="utf-8",
    )
    return path


class TestParser:
    def test_missing_subcommand(self, capsys):
        code, _, err = run(capsys)
        assert code == EXIT_USAGE
        assert "usage" in err

    def test_version(self, capsys):
        code, out, _ = run(capsys, "--version")
        assert code == EXIT_OK
        assert out.startswith("conespectra ")

    def test_invalid_threads(self, capsys, binary_file):
        code, _, _ = run(capsys, "--threads", 0, "validate", binary_file)
        assert code == EXIT_USAGE


class TestValidate:
    def test_valid_model(self, capsys, binary_file):
        code, out, _ = run(capsys, "validate", binary_file)
        assert code == EXIT_OK
        assert "(M0)" in out and "sağlanıyor" in out

    def test_invalid_model(self, capsys, single_child_file):
        code, out, _ = run(capsys, "validate", single_child_file)
        assert code == EXIT_DOMAIN
        assert "(M0) violated" in out

    def test_json_output(self, capsys, data_dir):
        code, out, _ = run(capsys, "validate", data_dir / "two_label.json", "--json")
        document = json.loads(out)
        assert code == EXIT_OK
        assert document["valid"] is True
        assert document["manifest"]["command"] == "validate"

    def test_missing_file(self, capsys, tmp_path):
        code, _, err = run(capsys, "validate", tmp_path / "yok.json")
        assert code == EXIT_USAGE
        assert "Model dosyası hatası" in err

    def test_malformed_file(self, capsys, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"format": "cone-model",', encoding="utf-8")
        code, _, err = run(capsys, "validate", path)
        assert code == EXIT_USAGE
        assert "satır 1" in err


class TestBands:
    def test_report_and_table(self, capsys, binary_file, tmp_path):
        table = tmp_path / "scan.csv"
        out = tmp_path / "bands.json"
        code, _, _ = run(
            capsys, "bands", "--model", binary_file, "--grid-step", 0.1, "--table", table, "--out", out
        )
        assert code == EXIT_OK

        report = json.loads(out.read_text(encoding="utf-8"))
        (low, high), = report["intervals"]
        assert high == pytest.approx(2.8284271, abs=2e-2)
        assert low == pytest.approx(-2.8284271, abs=2e-2)
        assert str(table) in report["manifest"]["output_digests"]

        df = pd.read_csv(table)
        assert (df[DIGEST_COLUMN] == report["manifest"]["digest"]).all()

    def test_bad_table_extension(self, capsys, binary_file, tmp_path):
        code, _, _ = run(capsys, "bands", "--model", binary_file, "--grid-step", 0.5, "--table", tmp_path / "a.xlsx")
        assert code == EXIT_USAGE


class TestSolve:
    def test_single_point(self, capsys, binary_file):
        code, out, _ = run(capsys, "solve", "--model", binary_file, "--energy", 0.0, "--eta", 1.0)
        document = json.loads(out)
        assert code == EXIT_OK
        assert document["values"][0] == pytest.approx([0.0, 0.5], abs=1e-10)
        assert document["full_green_at_root"] == document["values"][0]

    def test_grid_table(self, capsys, data_dir, tmp_path):
        table = tmp_path / "green.parquet"
        code, out, _ = run(
            capsys, "solve", "--model", data_dir / "two_label.json",
            "--emin", -1, "--emax", 1, "--points", 5, "--eta", 0.1, "--out", table,
        )
        assert code == EXIT_OK
        assert json.loads(out)["rows"] == 5
        df = pd.read_parquet(table)
        assert list(df.columns[:3]) == ["E", "eta", "re_gamma_a"]
        assert len(df) == 5

    @pytest.mark.parametrize(
        "extra",
        [
            [],
            ["--emin", -1],
            ["--emin", -1, "--emax", 1, "--points", 5],
            ["--emin", -1, "--emax", 1, "--points", 1, "--out", "t.csv"],
        ],
    )
    def test_usage_errors(self, capsys, binary_file, extra):
        code, _, _ = run(capsys, "solve", "--model", binary_file, *extra)
        assert code == EXIT_USAGE


class TestSimulate:
    ARGS = ["--trials", 20, "--depth", 4, "--eta", 1.0, "--lambda", 0.1, "--seed", 5]

    def test_single_point(self, capsys, binary_file):
        code, out, _ = run(capsys, "simulate", "--model", binary_file, *self.ARGS)
        document = json.loads(out)
        assert code == EXIT_OK
        assert len(document["moment_vector"]) == 1
        assert document["config"]["disorder"]["mode"] == "iid_both"
        assert document["euclidean_moment"]["mean"] <= document["euclidean_moment"]["cauchy_schwarz_bound"]

    def test_reproducible_across_threads(self, capsys, data_dir):
        model = data_dir / "two_label.json"
        _, first, _ = run(capsys, "--threads", 1, "simulate", "--model", model, *self.ARGS)
        _, second, _ = run(capsys, "--threads", 3, "simulate", "--model", model, *self.ARGS)
        assert _without_wall_clock(json.loads(first)) == _without_wall_clock(json.loads(second))

    def test_disorder_override(self, capsys, data_dir):
        code, out, _ = run(
            capsys, "simulate", "--model", data_dir / "two_label.json", *self.ARGS,
            "--disorder-mode", "iid_potential", "--width", 0.3,
        )
        assert code == EXIT_OK
        disorder = json.loads(out)["config"]["disorder"]
        assert disorder["mode"] == "iid_potential"
        assert disorder["per_label"][0]["params"] == {"width": 0.3}

    def test_sweep_table(self, capsys, binary_file, tmp_path):
        table = tmp_path / "sweep.csv"
        code, _, _ = run(
            capsys, "simulate", "--model", binary_file, *self.ARGS,
            "--lambdas", "0,0.1", "--etas", "1.0,0.5", "--out", table,
        )
        assert code == EXIT_OK
        df = pd.read_csv(table)
        assert len(df) == 4
        assert df.loc[df["lambda"] == 0.0, "E_gamma_a"].max() <= 1e-13

    def test_sweep_requires_table(self, capsys, binary_file):
        code, _, _ = run(capsys, "simulate", "--model", binary_file, *self.ARGS, "--lambdas", "0.1")
        assert code == EXIT_USAGE

    def test_invalid_lambda(self, capsys, binary_file):
        code, _, err = run(capsys, "simulate", "--model", binary_file, "--lambda", 1.5)
        assert code == EXIT_USAGE
        assert "λ" in err


@pytest.mark.slow
class TestVerify:
    def test_default_binary_run(self, capsys, binary_file, tmp_path):
        out = tmp_path / "verify.json"
        code, _, _ = run(
            capsys, "verify", "--model", binary_file, "--interval", -1, 1,
            "--samples", 2000, "--lambda", 0.05, "--seed", 1, "--out", out,
        )
        report = json.loads(out.read_text(encoding="utf-8"))
        assert code == EXIT_OK
        assert report["passed"] is True
        assert report["manifest"]["seed"] == 1

    def test_interval_at_band_edge(self, capsys, binary_file):
        code, _, _ = run(capsys, "verify", "--model", binary_file, "--interval", 2.0, 2.8, "--samples", 100)
        assert code == EXIT_DOMAIN

    def test_unknown_suite(self, capsys, binary_file):
        code, _, _ = run(
            capsys, "verify", "--model", binary_file, "--interval", -1, 1, "--samples", 10, "--suites", "yok"
        )
        assert code == EXIT_USAGE
