"""Command-line interface: exit codes, JSON determinism, DOT emission."""

from __future__ import annotations

import json
import subprocess
import sys

import pytest

from posetglue.cli import main
from posetglue.poset_core import poset_from_generators, poset_to_json


@pytest.fixture
def files(tmp_path):
    def write(name, doc):
        p = tmp_path / name
        p.write_text(json.dumps(doc))
        return str(p)

    chain3 = write(
        "chain3.json",
        {"elements": ["a", "b", "c"], "relations": [["a", "b"], ["b", "c"]]},
    )
    chain3b = write(
        "chain3b.json",
        {"elements": ["x", "y", "z"], "relations": [["x", "y"], ["y", "z"]]},
    )
    anti2 = write("anti2.json", {"elements": ["u", "v"], "relations": []})
    glue_ok = write(
        "glue_ok.json",
        {
            "X": {"elements": ["a", "b"], "relations": [["a", "b"]]},
            "Y": {"elements": ["p"], "relations": []},
            "Yx": {"a": ["p"], "b": ["p"]},
        },
    )
    glue_bad = write(
        "glue_bad.json",
        {
            "X": {"elements": ["1"], "relations": []},
            "Y": {"elements": ["2", "3", "4"], "relations": [["2", "4"], ["3", "4"]]},
            "Yx": {"1": ["2", "3"]},
        },
    )
    path_fwd = write(
        "path_fwd.json",
        {
            "elements": ["a", "b", "c", "d"],
            "relations": [["a", "b"], ["b", "c"], ["c", "d"]],
        },
    )
    path_bwd = write(
        "path_bwd.json",
        {
            "elements": ["a", "b", "c", "d"],
            "relations": [["b", "a"], ["c", "b"], ["d", "c"]],
        },
    )
    return {
        "chain3": chain3,
        "chain3b": chain3b,
        "anti2": anti2,
        "glue_ok": glue_ok,
        "glue_bad": glue_bad,
        "path_fwd": path_fwd,
        "path_bwd": path_bwd,
        "tmp": tmp_path,
    }


class TestPoset:
    def test_check_ok(self, files, capsys):
        assert main(["poset", "check", files["chain3"]]) == 0
        assert "3 elements" in capsys.readouterr().out

    def test_check_bad_json_exits_3(self, files, capsys):
        bad = files["tmp"] / "broken.json"
        bad.write_text("{nope")
        assert main(["poset", "check", str(bad)]) == 3
        assert "parse error" in capsys.readouterr().err

    def test_check_missing_file_exits_3(self, files, capsys):
        assert main(["poset", "check", str(files["tmp"] / "nothere.json")]) == 3
        capsys.readouterr()

    def test_iso_found_and_not_found(self, files, capsys):
        assert main(["poset", "iso", files["chain3"], files["chain3b"]]) == 0
        out = capsys.readouterr().out
        assert "a -> x" in out
        assert main(["poset", "iso", files["chain3"], files["anti2"]]) == 1
        assert "none" in capsys.readouterr().out

    def test_op_output_parses(self, files, capsys):
        assert main(["poset", "op", "ordinal-sum", files["anti2"], files["chain3"]]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert len(doc["elements"]) == 5

    def test_op_wrong_arity_exits_3(self, files, capsys):
        assert main(["poset", "op", "opposite", files["chain3"], files["anti2"]]) == 3
        capsys.readouterr()

    def test_hasse_emits_dot(self, files, capsys):
        assert main(["poset", "hasse", files["chain3"]]) == 0
        out = capsys.readouterr().out
        assert out.startswith("digraph") and '"a" -> "b";' in out

    def test_bad_subcommand_exits_3(self, files, capsys):
        with pytest.raises(SystemExit) as info:
            main(["poset", "frobnicate"])
        assert info.value.code == 3
        capsys.readouterr()


class TestGlue:
    def test_validate_ok(self, files, capsys):
        assert main(["glue", "validate", files["glue_ok"]]) == 0
        capsys.readouterr()

    def test_validate_counterexample_exits_1_with_witness(self, files, capsys):
        assert main(["glue", "validate", files["glue_bad"]]) == 1
        err = capsys.readouterr().err
        assert "'4'" in err and "'2'" in err and "'3'" in err

    def test_build_writes_poset_and_dot(self, files, capsys):
        dot_dir = files["tmp"] / "dot"
        assert (
            main(
                [
                    "glue",
                    "build",
                    files["glue_ok"],
                    "--mode",
                    "plus",
                    "--dot",
                    str(dot_dir),
                ]
            )
            == 0
        )
        doc = json.loads(capsys.readouterr().out)
        assert set(doc["elements"]) == {"a", "b", "p"}
        dots = list(dot_dir.glob("*.dot"))
        assert len(dots) == 1 and dots[0].read_text().startswith("digraph")


class TestVerify:
    def test_two_chain_passes(self, files, capsys):
        assert main(["verify", "two-chain", "--trials", "3"]) == 0
        assert "result: PASS" in capsys.readouterr().out

    def test_theorem_passes(self, files, capsys):
        rc = main(
            [
                "verify",
                "theorem",
                "--gluing",
                files["glue_ok"],
                "--trials",
                "3",
                "--max-dim",
                "2",
                "--window",
                "-1",
                "1",
            ]
        )
        assert rc == 0
        capsys.readouterr()

    def test_theorem_on_invalid_gluing_exits_1(self, files, capsys):
        rc = main(["verify", "theorem", "--gluing", files["glue_bad"], "--trials", "3"])
        assert rc == 1
        capsys.readouterr()

    def test_bgp_passes(self, files, capsys):
        rc = main(
            [
                "verify",
                "bgp",
                "--tree",
                files["path_fwd"],
                "--from",
                files["path_fwd"],
                "--to",
                files["path_bwd"],
                "--trials",
                "2",
                "--max-dim",
                "2",
                "--window",
                "-1",
                "1",
            ]
        )
        assert rc == 0
        assert "result: PASS" in capsys.readouterr().out

    def test_x1z_passes(self, files, capsys):
        rc = main(
            [
                "verify",
                "x1z",
                "--x",
                files["anti2"],
                "--z",
                files["chain3"],
                "--trials",
                "2",
                "--max-dim",
                "2",
                "--window",
                "-1",
                "1",
            ]
        )
        assert rc == 0
        capsys.readouterr()

    def test_json_reports_are_byte_identical(self, files, capsys):
        argv = ["verify", "two-chain", "--trials", "3", "--json"]
        assert main(argv) == 0
        first = capsys.readouterr().out
        assert main(argv) == 0
        second = capsys.readouterr().out
        assert first == second
        doc = json.loads(first)
        assert doc["ok"] is True

    def test_field_flag_changes_config_not_tables(self, files, capsys):
        assert main(["verify", "two-chain", "--trials", "3", "--json"]) == 0
        q = json.loads(capsys.readouterr().out)
        assert (
            main(["verify", "two-chain", "--trials", "3", "--field", "p:5", "--json"])
            == 0
        )
        p5 = json.loads(capsys.readouterr().out)
        assert q["trials"] == p5["trials"]
        assert q["config"] != p5["config"]

    def test_jobs_flag_keeps_output(self, files, capsys):
        base = ["verify", "two-chain", "--trials", "4", "--json"]
        assert main(base) == 0
        seq = capsys.readouterr().out
        assert main(base + ["--jobs", "2"]) == 0
        par = capsys.readouterr().out
        seq_doc, par_doc = json.loads(seq), json.loads(par)
        assert seq_doc["trials"] == par_doc["trials"]

    def test_bad_field_exits_3(self, files, capsys):
        assert main(["verify", "two-chain", "--field", "p:4"]) == 3
        capsys.readouterr()

    def test_zero_trials_exits_3(self, files, capsys):
        assert main(["verify", "two-chain", "--trials", "0"]) == 3
        capsys.readouterr()

    def test_empty_window_exits_3(self, files, capsys):
        assert main(["verify", "two-chain", "--window", "2", "-1"]) == 3
        capsys.readouterr()


class TestDemo:
    def test_counterexample_exits_1(self, files, capsys):
        assert main(["demo", "counterexample"]) == 1
        assert "'4'" in capsys.readouterr().err

    def test_two_chain(self, files, capsys):
        assert main(["demo", "two-chain", "--trials", "2"]) == 0
        capsys.readouterr()

    def test_x1z(self, files, capsys):
        rc = main(
            ["demo", "x1z", "--trials", "2", "--max-dim", "2", "--window", "-1", "1"]
        )
        assert rc == 0
        capsys.readouterr()

    def test_bgp_star(self, files, capsys):
        rc = main(
            [
                "demo",
                "bgp-star",
                "--trials",
                "1",
                "--max-dim",
                "2",
                "--window",
                "-1",
                "1",
            ]
        )
        assert rc == 0
        capsys.readouterr()

    def test_figure1_json(self, files, capsys):
        rc = main(
            [
                "demo",
                "figure1",
                "--trials",
                "2",
                "--max-dim",
                "2",
                "--window",
                "-1",
                "1",
                "--json",
            ]
        )
        assert rc == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["ok"] is True
        assert len(doc["pairs"]) == 3
        for entry in doc["pairs"]:
            assert entry["plus_isomorphic"] and entry["minus_isomorphic"]


class TestConsoleScript:
    def test_module_entry_point(self, files):
        result = subprocess.run(
            [sys.executable, "-m", "posetglue.cli", "poset", "check", files["chain3"]],
            capture_output=True,
            text=True,
        )
        assert result.returncode == 0
        assert "3 elements" in result.stdout


def test_round_trip_through_op(tmp_path, capsys):
    p = poset_from_generators(["m", "n"], [("m", "n")])
    f = tmp_path / "p.json"
    f.write_text(json.dumps(poset_to_json(p)))
    assert main(["poset", "op", "opposite", str(f)]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert ["n", "m"] in doc["relations"]
