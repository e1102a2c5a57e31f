import json
import os
import shutil

import pytest
import yaml

from slicesim.cli import EXIT_IO, EXIT_OK, EXIT_SETUP, EXIT_VALIDATION, main

GOLDEN = "scenarios/baseline.yaml"
DEMO = "scenarios/admission-demo.yaml"


def write_scenario(tmp_path, doc, name="scenario.yaml"):
    path = tmp_path / name
    path.write_text(yaml.safe_dump(doc))
    return str(path)


class TestValidateCommand:
    def test_clean_scenario(self, capsys):
        assert main(["validate", GOLDEN]) == EXIT_OK
        assert "ok" in capsys.readouterr().out

    def test_invalid_scenario(self, tmp_path, capsys):
        path = write_scenario(tmp_path, {"policy": "bogus"})
        assert main(["validate", path]) == EXIT_VALIDATION
        assert "bogus" in capsys.readouterr().err

    def test_unreadable_file(self, capsys):
        assert main(["validate", "/no/such/file.yaml"]) == EXIT_VALIDATION


class TestRunCommand:
    def test_golden_run_outputs(self, tmp_path):
        out = str(tmp_path / "out")
        assert main(["run", GOLDEN, "--out", out]) == EXIT_OK
        with open(os.path.join(out, "summary.json")) as fh:
            summary = json.load(fh)
        placements = [n["placement_name"] for n in summary["nfs"].values()]
        assert placements == ["c1", "c2", "c1", "c2"]
        assert [n["utilization"] for n in summary["nfs"].values()] == [70, 54, 80, 32]
        assert os.path.exists(os.path.join(out, "trace.jsonl"))
        assert os.path.exists(os.path.join(out, "charts", "layered.json"))

    def test_setup_rejection_names_the_nf(self, tmp_path, capsys):
        doc = {
            "clouds": [{"name": "tiny", "compute": 10, "memory": 10, "storage": 10}],
            "nfs": [
                {"name": "fits", "compute": 5, "memory": 5, "storage": 5},
                {"name": "too-big", "compute": 50, "memory": 5, "storage": 5},
            ],
            "output": {"directory": str(tmp_path / "out")},
        }
        path = write_scenario(tmp_path, doc)
        assert main(["run", path]) == EXIT_SETUP
        assert "too-big" in capsys.readouterr().err

    def test_validation_blocks_run(self, tmp_path, capsys):
        path = write_scenario(tmp_path, {"policy": "bogus"})
        assert main(["run", path]) == EXIT_VALIDATION

    def test_byte_identical_reruns(self, tmp_path):
        out1, out2 = str(tmp_path / "a"), str(tmp_path / "b")
        for out in (out1, out2):
            assert main(["run", DEMO, "--out", out]) == EXIT_OK
        for rel in ["summary.json", "trace.jsonl", "charts/layered.json"]:
            with open(os.path.join(out1, rel), "rb") as f1, open(os.path.join(out2, rel), "rb") as f2:
                assert f1.read() == f2.read(), rel

    def test_seed_override_changes_trace(self, tmp_path):
        out1, out2 = str(tmp_path / "a"), str(tmp_path / "b")
        assert main(["run", DEMO, "--out", out1, "--seed", "1"]) == EXIT_OK
        assert main(["run", DEMO, "--out", out2, "--seed", "2"]) == EXIT_OK
        with open(os.path.join(out1, "trace.jsonl"), "rb") as f1, \
                open(os.path.join(out2, "trace.jsonl"), "rb") as f2:
            assert f1.read() != f2.read()

    def test_policy_override(self, tmp_path):
        out = str(tmp_path / "out")
        assert main(["run", GOLDEN, "--out", out, "--policy", "worst-fit"]) == EXIT_OK
        with open(os.path.join(out, "summary.json")) as fh:
            summary = json.load(fh)
        assert summary["meta"]["policy"] == "worst-fit"
        # Hand-computed slack scores: NF1 goes to the roomier c2; NF2 then
        # ties both clouds at 1.8766 and falls back to c1 by registration
        # index; NF3 and NF4 prefer c2 again.
        placements = [n["placement_name"] for n in summary["nfs"].values()]
        assert placements == ["c2", "c1", "c2", "c2"]

    def test_figures_rendered_when_png_selected(self, tmp_path):
        out = str(tmp_path / "out")
        assert main(["run", GOLDEN, "--out", out]) == EXIT_OK
        figures = os.listdir(os.path.join(out, "figures"))
        assert any(f.endswith(".png") for f in figures)
        assert any("sunburst" in f for f in figures)

    def test_no_figures_without_png_format(self, tmp_path):
        doc = yaml.safe_load(open(GOLDEN))
        doc["output"] = {"directory": "ignored", "formats": ["json", "jsonl"]}
        path = write_scenario(tmp_path, doc)
        out = str(tmp_path / "out")
        assert main(["run", path, "--out", out]) == EXIT_OK
        assert not os.path.exists(os.path.join(out, "figures"))

    def test_unwritable_output_is_io_error(self, tmp_path, capsys):
        blocker = tmp_path / "blocker"
        blocker.write_text("in the way")
        assert main(["run", GOLDEN, "--out", str(blocker / "sub")]) == EXIT_IO


class TestReportCommand:
    @pytest.fixture
    def run_dir(self, tmp_path):
        out = str(tmp_path / "out")
        assert main(["run", DEMO, "--out", out]) == EXIT_OK
        return out

    def test_tables_rendered(self, run_dir, capsys):
        assert main(["report", run_dir]) == EXIT_OK
        out = capsys.readouterr().out
        for heading in ("Clouds", "Network functions", "Slices", "Services"):
            assert heading in out
        assert "Emergency Call" in out

    def test_missing_directory(self, tmp_path, capsys):
        assert main(["report", str(tmp_path / "nope")]) == EXIT_IO

    def test_corrupt_summary(self, run_dir, capsys):
        with open(os.path.join(run_dir, "summary.json"), "w") as fh:
            fh.write("{not json")
        assert main(["report", run_dir]) == EXIT_IO

    def test_empty_trace_tables(self, tmp_path, capsys):
        out = str(tmp_path / "out")
        assert main(["run", GOLDEN, "--out", out]) == EXIT_OK
        assert main(["report", out]) == EXIT_OK
        text = capsys.readouterr().out
        assert "Trace: 0 record(s)" in text

    def test_figures_flag_renders_from_charts(self, run_dir, capsys):
        shutil.rmtree(os.path.join(run_dir, "figures"))
        assert main(["report", run_dir, "--figures"]) == EXIT_OK
        assert os.path.isdir(os.path.join(run_dir, "figures"))
