import json

import pytest

from flab.cli import main


def run_cli(args, capsys):
    code = main(args)
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


class TestOw:
    def test_pass_and_exact_triple(self, capsys):
        code, report = run_cli(["ow"], capsys)
        assert code == 0 and report["status"] == "PASS"
        assert report["addition"]["verdict"] == "EXACT-PASS"
        assert report["reports"]["full_shift"]["f"]["value"]["terms"] == {"2": "1"}
        assert report["reports"]["kernel_column"]["f"]["value"]["terms"] == {"2": "-1"}
        assert report["reports"]["image"]["f"]["value"]["terms"] == {"2": "2"}

    def test_kernel_dimension_evidence(self, capsys):
        _, report = run_cli(["ow"], capsys)
        assert all(
            d["dimension"] == 1 for d in report["kernel_window_dimensions"].values()
        )
        assert report["surjectivity"]["kind"] == "window-checked"
        assert report["surjectivity"]["theorem_backed"] is False


class TestGen:
    @pytest.mark.parametrize("k,rank,coeff", [("Z/3", 2, "-1"), ("Z/2", 3, "-2")])
    def test_triples(self, capsys, k, rank, coeff):
        code, report = run_cli(["gen", "--k", k, "--rank", str(rank)], capsys)
        assert code == 0 and report["status"] == "PASS"
        assert report["addition"]["verdict"] == "EXACT-PASS"
        base = k.split("/")[1]
        assert report["expected_constants_f"]["terms"] == {base: coeff}

    def test_comparison_kernel_constants(self, capsys):
        _, report = run_cli(["gen", "--k", "Z/3"], capsys)
        comp = report["comparison_kernel"]
        assert comp["applicable"] and comp["constants_only"]

    def test_nonprime_abelian_skips_comparison(self, capsys):
        code, report = run_cli(["gen", "--k", "Z/4"], capsys)
        assert code == 0 and not report["comparison_kernel"]["applicable"]

    def test_nonabelian_rejected(self, capsys):
        code = main(["gen", "--k", "D4"])
        err = capsys.readouterr().err
        assert code == 2 and "abelian" in err


class TestKernel:
    def test_edge_kernel_run(self, tmp_path, capsys):
        spec = tmp_path / "kernel.json"
        spec.write_text(
            json.dumps({"p": 2, "rank": 2, "coeffs": {"e": [[1]], "A": [[1]]}})
        )
        code, report = run_cli(["kernel", "--spec", str(spec), "--nmax", "2"], capsys)
        assert code == 0 and report["status"] == "PASS"
        assert report["column_vs_zero"]["verdict"] == "TIGHT"
        rows = report["reports"]["kernel_column"]["rows"]
        assert all(row["F"]["terms"] == {} for row in rows)
        assert report["preimage_recheck"]["verified"] == 5

    def test_delta_kernel_exact_zero(self, tmp_path, capsys):
        spec = tmp_path / "kernel.json"
        spec.write_text(json.dumps({"p": 2, "rank": 2, "coeffs": {"e": [[1]]}}))
        code, report = run_cli(["kernel", "--spec", str(spec)], capsys)
        assert code == 0
        assert report["column_vs_zero"]["verdict"] == "EXACT-ZERO"

    def test_p3_variant(self, tmp_path, capsys):
        spec = tmp_path / "kernel.json"
        spec.write_text(
            json.dumps({"p": 3, "rank": 2, "coeffs": {"e": [[1]], "A": [[1]], "B": [[2]]}})
        )
        code, report = run_cli(["kernel", "--spec", str(spec)], capsys)
        assert code == 0 and report["preimage_recheck"]["verified"] == 5

    def test_zero_kernel_rejected(self, tmp_path, capsys):
        spec = tmp_path / "kernel.json"
        spec.write_text(json.dumps({"p": 2, "rank": 2, "coeffs": {}}))
        code = main(["kernel", "--spec", str(spec)])
        assert code == 2


class TestVerify:
    def test_all_suites_pass(self, capsys):
        code, report = run_cli(["verify", "--suite", "all"], capsys)
        assert code == 0 and report["status"] == "PASS"
        names = {s["name"] for s in report["suites"]}
        assert names == {
            "cocycle",
            "special",
            "skew-entropy-bound",
            "relative-collapse",
            "pullback-exchange",
            "generated-algebra",
            "window-split",
            "addition-formula",
        }

    def test_single_suite(self, capsys):
        code, report = run_cli(["verify", "--suite", "addition-formula"], capsys)
        assert code == 0 and len(report["suites"]) == 1

    def test_empty_selection(self, capsys):
        code, report = run_cli(["verify", "--suite", "none"], capsys)
        assert code == 0 and report["suites"] == []

    def test_injected_bug_fails_with_witness(self, capsys):
        code, report = run_cli(
            ["verify", "--suite", "cocycle", "--inject-bug", "negate-cocycle"], capsys
        )
        assert code == 1 and report["status"] == "FAIL"
        failing = [
            c for s in report["suites"] for c in s["cases"] if not c["passed"]
        ]
        assert len(failing) == 1 and failing[0]["witness"] is not None

    def test_unknown_suite_rejected(self, capsys):
        assert main(["verify", "--suite", "nope"]) == 2


class TestComputeF:
    def test_bernoulli_spec(self, tmp_path, capsys):
        spec = tmp_path / "proc.json"
        spec.write_text(json.dumps({"type": "bernoulli", "k": 4, "rank": 2}))
        code, report = run_cli(["compute-f", "--process", str(spec)], capsys)
        assert code == 0
        assert report["report"]["f"]["value"]["terms"] == {"2": "2"}

    def test_finite_group_spec_with_table(self, tmp_path, capsys):
        # explicit multiplication table (Z/2) and explicit permutation autos
        spec = tmp_path / "proc.json"
        spec.write_text(
            json.dumps(
                {
                    "type": "finite_group",
                    "group": {"name": "C2", "elements": ["0", "1"], "table": [[0, 1], [1, 0]]},
                    "autos": [[0, 1], [0, 1]],
                    "rank": 2,
                }
            )
        )
        code, report = run_cli(["compute-f", "--process", str(spec)], capsys)
        assert code == 0
        assert report["report"]["f"]["value"]["terms"] == {"2": "-1"}

    def test_skew_section_spec(self, tmp_path, capsys):
        spec = tmp_path / "proc.json"
        spec.write_text(
            json.dumps(
                {
                    "type": "skew_section",
                    "group": {"preset": "Z/4"},
                    "autos": [1, 0],
                    "subgroup": ["0", "2"],
                    "rank": 2,
                }
            )
        )
        code, report = run_cli(["compute-f", "--process", str(spec)], capsys)
        assert code == 0
        assert report["report"]["f"]["value"]["terms"] == {"2": "-2"}
        assert "relative_report" in report

    def test_skew_custom_cocycle_table(self, tmp_path, capsys):
        spec = tmp_path / "proc.json"
        spec.write_text(
            json.dumps(
                {
                    "type": "skew_custom",
                    "base_group": {"preset": "Z/2"},
                    "base_autos": [0, 0],
                    "fiber_group": {"preset": "Z/2"},
                    "fiber_autos": [0, 0],
                    "cocycle": [["0", "1"], ["0", "0"]],
                    "rank": 2,
                }
            )
        )
        code, report = run_cli(["compute-f", "--process", str(spec)], capsys)
        assert code == 0
        assert report["report"]["f"]["value"]["terms"] == {"2": "-2"}

    def test_bad_spec_rejected(self, tmp_path, capsys):
        spec = tmp_path / "proc.json"
        spec.write_text(json.dumps({"type": "nonsense"}))
        assert main(["compute-f", "--process", str(spec)]) == 2


class TestDeterminism:
    def test_reports_byte_identical(self, tmp_path):
        out1, out2 = tmp_path / "a.json", tmp_path / "b.json"
        assert main(["ow", "--out", str(out1)]) == 0
        assert main(["ow", "--out", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()

    def test_verify_deterministic(self, tmp_path):
        out1, out2 = tmp_path / "a.json", tmp_path / "b.json"
        assert main(["verify", "--suite", "addition-formula,skew-entropy-bound", "--out", str(out1)]) == 0
        assert main(["verify", "--suite", "addition-formula,skew-entropy-bound", "--out", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()

    def test_exact_fields_never_floats(self, capsys):
        _, report = run_cli(["ow"], capsys)
        for rep in report["reports"].values():
            for term in rep["f"]["value"]["terms"].values():
                assert isinstance(term, str)

    def test_pretty_table_derives_from_json(self, capsys):
        code = main(["ow", "--pretty"])
        captured = capsys.readouterr()
        assert code == 0
        assert "addition verdict: EXACT-PASS" in captured.err
