import json

import pytest

from quasiconv.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestCheck:
    def test_member_exits_zero(self, capsys):
        code, out, _ = run(
            capsys, "check", "--f", "x^2+y^2", "--domain", "0,1,0,1",
            "--class", "QC2", "--resolution", "9", "--halton", "128",
        )
        assert code == 0
        assert "no violation found at resolution" in out

    def test_violation_exits_one(self, capsys):
        code, out, _ = run(
            capsys, "check", "--f", "-(x^2)", "--domain", "-1,1,-1,1",
            "--class", "JQC2",
        )
        assert code == 1
        assert "JQC2 violated" in out

    def test_syntax_error_exits_two(self, capsys):
        code, _, err = run(
            capsys, "check", "--f", "x +* y", "--domain", "0,1,0,1",
            "--class", "QC2",
        )
        assert code == 2
        assert "offset 3" in err

    def test_domain_class_mismatch_exits_two(self, capsys):
        code, _, err = run(
            capsys, "check", "--f", "x^2", "--domain", "0,1", "--class", "QC2"
        )
        assert code == 2

    def test_partial_function_exits_two(self, capsys):
        code, _, _ = run(
            capsys, "check", "--f", "log(x)", "--domain", "-1,1,-1,1",
            "--class", "QC2", "--resolution", "5", "--halton", "16",
        )
        assert code == 2

    def test_json_round_trip(self, capsys):
        args = [
            "check", "--f", "-(x^2)", "--domain", "-1,1,-1,1",
            "--class", "JQC2", "--resolution", "9", "--halton", "64", "--json",
        ]
        code, out, _ = run(capsys, *args)
        assert code == 1
        record = json.loads(out)
        assert record["schema"] == 1
        # re-run the recorded inputs; the outcome must reproduce exactly
        rerun = [
            "check",
            "--f", record["inputs"]["expression"],
            "--domain", record["inputs"]["domain"],
            "--class", record["inputs"]["class_id"],
            "--resolution", str(record["config"]["resolution"]),
            "--halton", str(record["config"]["halton"]),
            "--json",
        ]
        code2, out2, _ = run(capsys, *rerun)
        record2 = json.loads(out2)
        assert code2 == code
        assert record2["outcome"] == record["outcome"]


class TestVerify:
    def test_thm_jqc_on_affine(self, capsys):
        code, out, _ = run(
            capsys, "verify", "--inequality", "THM_2_1", "--f", "x+y",
            "--domain", "0,1,0,1",
        )
        assert code == 0
        assert "H" in out

    def test_chain_sharpness(self, capsys):
        code, out, _ = run(
            capsys, "verify", "--inequality", "CHAIN1_6", "--f", "x+y",
            "--domain", "0,1,0,1", "--json",
        )
        assert code == 0
        record = json.loads(out)
        values = [v for _, v in record["outcome"]["terms"]]
        assert max(values) - min(values) <= 1e-9

    def test_hh1d(self, capsys):
        code, out, _ = run(
            capsys, "verify", "--inequality", "HH1D", "--f", "x^2",
            "--domain", "0,1", "--json",
        )
        assert code == 0
        record = json.loads(out)
        values = [v for _, v in record["outcome"]["terms"]]
        assert values == pytest.approx([0.25, 1 / 3, 0.5], abs=1e-8)

    def test_failed_link_exits_one(self, capsys):
        # a concave function breaks the chain
        code, _, _ = run(
            capsys, "verify", "--inequality", "CHAIN1_6", "--f", "-(x^2) - y^2",
            "--domain", "0,1,0,1",
        )
        assert code == 1

    def test_unknown_inequality_exits_two(self, capsys):
        code, _, err = run(
            capsys, "verify", "--inequality", "NOPE", "--f", "x", "--domain", "0,1"
        )
        assert code == 2

    def test_dimension_mismatch_exits_two(self, capsys):
        code, _, _ = run(
            capsys, "verify", "--inequality", "THM_2_1", "--f", "x^2",
            "--domain", "0,1",
        )
        assert code == 2


class TestSearchAndGallery:
    def test_search_found(self, capsys):
        code, out, _ = run(
            capsys, "search", "--in", "QC2", "--not-in", "C2",
            "--family", "pwl4", "--trials", "100", "--seed", "7",
        )
        assert code == 0
        assert "found at trial" in out

    def test_search_invalid_direction(self, capsys):
        code, _, err = run(capsys, "search", "--in", "C2", "--not-in", "QC2")
        assert code == 2
        assert "chain" in err

    def test_search_exhausted_exits_one(self, capsys):
        code, out, _ = run(
            capsys, "search", "--in", "JQC2", "--not-in", "WQC2",
            "--family", "pwl4", "--trials", "3", "--seed", "0",
        )
        assert code == 1
        assert "exhausted" in out

    def test_gallery_list(self, capsys):
        code, out, _ = run(capsys, "gallery")
        assert code == 0
        assert "paraboloid" in out

    def test_gallery_validate(self, capsys):
        code, out, _ = run(capsys, "gallery", "--validate")
        assert code == 0
        assert "claims re-validated" in out

    def test_gallery_json(self, capsys):
        code, out, _ = run(capsys, "gallery", "--validate", "--json")
        assert code == 0
        record = json.loads(out)
        assert record["outcome"]["all_ok"] is True


def test_no_command_prints_help(capsys):
    code, out, _ = run(capsys)
    assert code == 2
