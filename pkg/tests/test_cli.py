import json
from importlib import resources
from pathlib import Path

import jsonschema
import pytest
from referencing import Registry, Resource

from slopesearch.cli import main
from slopesearch.config import ConfigError, parse_analysis, parse_sweep

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def schema(name):
    return json.loads(resources.files("slopesearch").joinpath("schemas", name).read_text())


def validator(name):
    docs = [schema(s) for s in ("analysis.schema.json", "compare.schema.json", "bench.schema.json")]
    registry = Registry().with_resources((d["$id"], Resource.from_contents(d)) for d in docs)
    return jsonschema.Draft202012Validator(schema(name), registry=registry)


def write(tmp_path, text, name="cfg.ini"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


class TestAnalyze:
    def test_case1(self, tmp_path):
        out = tmp_path / "a.json"
        assert main(["analyze", "--config", str(CONFIGS / "case1.ini"), "--out", str(out)]) == 0
        doc = json.loads(out.read_text())
        validator("analysis.schema.json").validate(doc)
        assert doc["factor_of_safety"] == pytest.approx(1.3429, abs=0.015)
        assert doc["algorithm"] == "hi"
        assert len(doc["polyline"]) == 26
        assert doc["polyline"][0] == [doc["surface"]["x_out"], 0.0]
        e = doc["evaluations"]
        assert e["total"] == e["grid"] + e["refine"]
        assert "wall_time" not in doc

    def test_byte_identical(self, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        for p in (a, b):
            assert main(["analyze", "--config", str(CONFIGS / "case1.ini"), "--out", str(p)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_algorithm_and_slices_override(self, tmp_path):
        out = tmp_path / "a.json"
        assert main(["analyze", "--config", str(CONFIGS / "case1.ini"), "--algorithm", "fs",
                     "--slices", "10", "--out", str(out), "--timings"]) == 0
        doc = json.loads(out.read_text())
        validator("analysis.schema.json").validate(doc)
        assert doc["evaluations"]["total"] == 1000
        assert len(doc["polyline"]) == 11
        assert doc["wall_time"] >= 0

    def test_zero_inclination(self, tmp_path, caplog):
        cfg = write(tmp_path, "[geometry]\nheight = 5\nbeta_deg = 0\n[layer 1]\nc = 1\nphi_deg = 20\ngamma = 18\n")
        assert main(["analyze", "--config", cfg]) == 1
        assert "inclination must be in (0, 90]" in caplog.text
        assert "cfg.ini:3" in caplog.text

    def test_all_invalid(self, tmp_path):
        cfg = write(tmp_path, "[geometry]\nheight = 5\nbeta_deg = 45\n[layer 1]\nc = 1\nphi_deg = 20\ngamma = 18\n"
                              "[search]\nmax_iter = 1\ntol_F = 1e-15\n")
        assert main(["analyze", "--config", cfg]) == 2

    def test_missing_file(self, tmp_path):
        assert main(["analyze", "--config", str(tmp_path / "nope.ini")]) == 1

    def test_bad_slices(self):
        assert main(["analyze", "--config", str(CONFIGS / "case1.ini"), "--slices", "0"]) == 1

    def test_seedless_is_accepted(self, tmp_path):
        out = tmp_path / "a.json"
        assert main(["--seedless", "analyze", "--config", str(CONFIGS / "case2.ini"), "--out", str(out)]) == 0
        assert json.loads(out.read_text())["factor_of_safety"] == pytest.approx(1.7336, abs=0.02)


class TestCompare:
    def test_case1(self, tmp_path):
        out = tmp_path / "c.json"
        assert main(["compare", "--config", str(CONFIGS / "case1.ini"), "--out", str(out)]) == 0
        doc = json.loads(out.read_text())
        validator("compare.schema.json").validate(doc)
        assert doc["algorithms"]["fs"]["evaluations"]["total"] == 1000
        assert doc["efficiency_gain_evaluations"]["hi"] > 50
        assert doc["accuracy_ratio"]["hi"] <= 1.0
        assert "efficiency_gain_wall_time" not in doc


class TestSweep:
    def test_one_cell(self, tmp_path):
        out, summary = tmp_path / "s.csv", tmp_path / "s.json"
        assert main(["sweep", "--config", str(CONFIGS / "sweep_one.ini"), "--out", str(out),
                     "--summary", str(summary)]) == 0
        lines = out.read_text().splitlines()
        assert len(lines) == 2
        assert lines[0].startswith("beta_deg,c,phi_deg,H,gamma,hi_F,")
        s = json.loads(summary.read_text())
        assert s["cases"] == 1 and s["failures"] == 0
        assert s["accuracy"]["hi_over_fs"]["median"] > 0

    def test_byte_identical(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for p in (a, b):
            assert main(["sweep", "--config", str(CONFIGS / "sweep_one.ini"), "--out", str(p)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_algorithm_subset_and_simplex_counts(self, tmp_path):
        out, counts = tmp_path / "s.csv", tmp_path / "n.csv"
        assert main(["sweep", "--config", str(CONFIGS / "sweep_one.ini"), "--algorithm", "hi",
                     "--out", str(out), "--simplex-counts", str(counts)]) == 0
        assert "fi_F" not in out.read_text()
        assert len(counts.read_text().splitlines()) == 2

    def test_bad_sweep_config(self, tmp_path, caplog):
        cfg = write(tmp_path, "[sweep]\nbeta_deg = 10, abc\n")
        assert main(["sweep", "--config", cfg]) == 1
        assert "cfg.ini:2" in caplog.text


class TestBench:
    def test_report(self, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        for p in (a, b):
            assert main(["bench", "--out", str(p)]) == 0
        assert a.read_bytes() == b.read_bytes()
        doc = json.loads(a.read_text())
        validator("bench.schema.json").validate(doc)
        assert [c["case"] for c in doc["cases"]] == [1, 2]
        assert all(c["reference"] for c in doc["cases"])


class TestConfig:
    def test_layered(self):
        cfg = parse_analysis(str(CONFIGS / "layered.ini"))
        assert len(cfg.slope.profile.layers) == 2

    def test_default_sweep(self):
        assert len(parse_sweep(None).table["beta_deg"]) == 9

    @pytest.mark.parametrize("text, line, fragment", [
        ("height = 5\n", 1, "section"),
        ("[geometry]\nheight = x\nbeta_deg = 30\n", 2, "must be a float"),
        ("[geometry]\nbeta_deg = 30\n[layer 1]\nc=1\nphi_deg=1\ngamma=1\n", 1, "height"),
        ("[geometry]\nheight = 5\nbeta_deg = 30\n[layer 1]\nc = 1\nphi_deg = 95\ngamma = 18\n", 4, "friction"),
        ("[geometry]\nheight = 5\nbeta_deg = 30\n[layer 1]\nc = 1\nphi_deg = 9\ngamma = 18\n"
         "[search]\nalgorithm = pso\n", 9, "algorithm"),
        ("[geometry]\nheight = 5\nbeta_deg = 30\n", None, "layer"),
    ])
    def test_errors_are_line_anchored(self, tmp_path, text, line, fragment):
        cfg = write(tmp_path, text)
        with pytest.raises(ConfigError) as info:
            parse_analysis(cfg)
        assert info.value.line == line
        assert fragment in str(info.value)


class TestSchemas:
    def test_rejects_incomplete_documents(self):
        for name in ("analysis.schema.json", "compare.schema.json", "bench.schema.json"):
            assert not validator(name).is_valid({})

    def test_compare_checks_nested_outcomes(self):
        doc = {"algorithms": {"hi": {}, "fi": {}, "fs": {}},
               "efficiency_gain_evaluations": {"hi": 1.0, "fi": 1.0},
               "accuracy_ratio": {"hi": 1.0, "fi": 1.0}}
        assert not validator("compare.schema.json").is_valid(doc)
