import json
import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qperm.cli import ExperimentConfig, main
from qperm.errors import QpermError
from qperm.weingarten import parse_rational, rational_str


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def run_json(capsys, *argv):
    code, out = run(capsys, *argv)
    return code, json.loads(out)


class TestEnvelope:
    def test_schema_fields(self, capsys):
        code, report = run_json(capsys, "haar", "moment", "--n", "4", "--i", "1", "--j", "2")
        assert code == 0
        assert set(report) == {"command", "config", "results", "pass"}
        assert report["pass"] is True

    def test_deterministic_output(self, capsys):
        args = ("weingarten", "dk", "--k", "2", "--n-range", "4..9")
        _, first = run(capsys, *args)
        _, second = run(capsys, *args)
        assert first == second


class TestPartitionsCli:
    def test_enum_nc_k4_has_14(self, capsys):
        code, report = run_json(capsys, "partitions", "enum", "--k", "4", "--nc")
        assert code == 0
        assert report["results"]["count"] == 14
        assert len(report["results"]["partitions"]) == 14

    def test_enum_csv(self, capsys):
        code, out = run(capsys, "partitions", "enum", "--k", "2", "--csv")
        assert code == 0
        # comma-bearing partition texts are quoted, so the CSV stays parseable
        assert out.splitlines() == ["1|2", '"1,2"']

    def test_mobius(self, capsys):
        code, report = run_json(
            capsys, "partitions", "mobius", "--p", "1|2|3|4", "--q", "1,2,3,4"
        )
        assert code == 0
        assert report["results"]["mobius"] == -5


class TestWeingartenCli:
    def test_table_k2_n4(self, capsys):
        code, report = run_json(capsys, "weingarten", "table", "--k", "2", "--n", "4")
        assert code == 0
        assert report["results"]["matrix"] == [["1/12", "-1/12"], ["-1/12", "1/3"]]
        assert report["results"]["index"] == ["1|2", "1,2"]

    def test_table_csv_mirrors_order(self, capsys):
        import csv as csv_mod
        import io

        code, out = run(capsys, "weingarten", "table", "--k", "2", "--n", "4", "--csv")
        assert code == 0
        rows = list(csv_mod.reader(io.StringIO(out)))
        assert rows == [["1|2", "1/12", "-1/12"], ["1,2", "-1/12", "1/3"]]

    def test_singular_is_usage_error_with_parameters(self, capsys):
        code = main(["weingarten", "table", "--k", "2", "--n", "1"])
        err = capsys.readouterr().err
        assert code == 1
        assert "k=2" in err and "n=1" in err

    def test_asym_single_pair(self, capsys):
        code, report = run_json(
            capsys,
            "weingarten", "asym", "--k", "2", "--n-range", "4..12",
            "--p", "1|2", "--q", "1,2",
        )
        assert code == 0
        entry = report["results"][0]
        assert entry["relation"] == "mobius_residual"
        assert entry["bounded"] is True
        assert entry["rows"][0]["n"] == 4

    def test_dk_values(self, capsys):
        code, report = run_json(capsys, "weingarten", "dk", "--k", "2", "--n-range", "4..6")
        assert code == 0
        assert report["results"]["values"][0] == {"n": 4, "dk": "16/3"}


class TestHaarCli:
    def test_first_moment(self, capsys):
        code, report = run_json(capsys, "haar", "moment", "--n", "4", "--i", "1", "--j", "2")
        assert code == 0
        assert report["results"]["value"] == "1/4"

    def test_word_moment(self, capsys):
        code, report = run_json(
            capsys, "haar", "moment", "--n", "4", "--i", "1,2", "--j", "3,3"
        )
        assert code == 0
        assert report["results"]["value"] == "0/1"


class TestCumulantsCli:
    SPEC = {"alphabet": ["c"], "k_max": 8, "cumulants": {"c,c": "1/1"}}

    def test_convert_spec_to_moment(self, capsys, tmp_path):
        path = tmp_path / "spec.json"
        path.write_text(json.dumps(self.SPEC))
        code, report = run_json(
            capsys, "cumulants", "convert", "--spec", str(path), "--word", "c,c,c,c"
        )
        assert code == 0
        assert report["results"]["value"] == "2/1"

    def test_convert_moments_to_cumulant(self, capsys, tmp_path):
        moments = {
            "alphabet": ["a"],
            "k_max": 2,
            "moments": {"a": "1/2", "a,a": "1/1"},
        }
        path = tmp_path / "mf.json"
        path.write_text(json.dumps(moments))
        code, report = run_json(
            capsys, "cumulants", "convert", "--moments", str(path), "--word", "a,a"
        )
        assert code == 0
        assert report["results"]["value"] == "3/4"  # 1 - (1/2)^2

    def test_free_moment(self, capsys, tmp_path):
        path = tmp_path / "spec.json"
        path.write_text(json.dumps(self.SPEC))
        code, report = run_json(
            capsys,
            "cumulants", "free-moment", "--spec", str(path),
            "--letters", "c,c,c,c", "--labels", "1,2,1,2",
        )
        assert code == 0
        assert report["results"]["value"] == "0/1"

    def test_check_free_detects_tensor_pair(self, capsys, tmp_path):
        moments = {}
        import itertools

        for k in range(1, 5):
            for word in itertools.product("ab", repeat=k):
                even = all(word.count(s) % 2 == 0 for s in set(word))
                moments[",".join(word)] = "1/1" if even else "0/1"
        data = {"alphabet": ["a", "b"], "k_max": 4, "moments": moments}
        path = tmp_path / "mf.json"
        path.write_text(json.dumps(data))
        code, report = run_json(
            capsys,
            "cumulants", "check-free", "--moments", str(path), "--families", "a=1,b=2",
        )
        assert code == 2
        assert report["pass"] is False
        assert report["results"]["violations"]


class TestUrnCli:
    def test_quantum(self, capsys):
        code, report = run_json(
            capsys, "urn", "quantum", "--n", "4", "--lam", "1,0,0,0", "--j", "1,1"
        )
        assert code == 0
        assert report["results"]["value"] == "1/4"

    def test_classical(self, capsys):
        code, report = run_json(
            capsys, "urn", "classical", "--n", "2", "--lam", "1,0", "--j", "1,2"
        )
        assert code == 0
        assert report["results"]["value"] == "0/1"

    def test_gap(self, capsys):
        code, report = run_json(
            capsys, "urn", "gap", "--n", "6", "--lam", "1,1,1,0,0,0", "--j", "1,2,1,2"
        )
        assert code == 0
        results = report["results"]
        assert parse_rational(results["gap"]) <= parse_rational(results["bound"])

    def test_rational_weights(self, capsys):
        code, report = run_json(
            capsys, "urn", "quantum", "--n", "3", "--lam", "1/2,1/2,1/2", "--j", "2,2"
        )
        assert code == 0
        assert report["results"]["value"] == "1/4"


class TestMagicCli:
    def test_validate_permutation(self, capsys):
        code, report = run_json(capsys, "magic", "validate", "--perm", "2,1,3")
        assert code == 0
        assert report["results"]["violations"] == []

    def test_validate_two_projection(self, capsys):
        code, report = run_json(
            capsys, "magic", "validate", "--theta", str(math.pi / 5)
        )
        assert code == 0
        assert report["results"]["n"] == 4
        assert report["results"]["d"] == 2

    def test_validate_zero_tolerance_flags_rounding(self, capsys):
        # floating-point projections cannot satisfy the relations exactly
        code, report = run_json(
            capsys, "magic", "validate", "--theta", str(math.pi / 5), "--tol", "0"
        )
        assert code == 2
        assert report["results"]["violations"]

    def test_invariance_violation_exit_code(self, capsys, tmp_path):
        import itertools

        moments = {}
        for k in range(1, 5):
            for word in itertools.product(range(1, 5), repeat=k):
                even = all(word.count(s) % 2 == 0 for s in set(word))
                moments[",".join(str(x) for x in word)] = "1/1" if even else "0/1"
        data = {"alphabet": ["1", "2", "3", "4"], "k_max": 4, "moments": moments}
        path = tmp_path / "mf.json"
        path.write_text(json.dumps(data))
        code, report = run_json(
            capsys,
            "magic", "invariance", "--theta", str(math.pi / 5),
            "--moments", str(path), "--degree", "4",
        )
        assert code == 2
        assert report["pass"] is False
        assert report["results"]["max_deviation"] > 1e-3
        code, report = run_json(
            capsys,
            "magic", "invariance", "--perm", "2,1,4,3",
            "--moments", str(path), "--degree", "4",
        )
        assert code == 0


class TestReproduceAll:
    def test_smoke_config_passes(self, capsys):
        code, report = run_json(
            capsys,
            "reproduce-all", "--k-max", "3", "--n-range", "4..6", "--tol", "1e-9",
        )
        assert code == 0
        assert report["pass"] is True
        assert len(report["results"]) == 13
        for entry in report["results"]:
            assert entry["pass"] is True

    def test_byte_identical_for_fixed_seed(self, capsys):
        args = ("reproduce-all", "--k-max", "2", "--n-range", "4..5", "--seed", "5")
        _, first = run(capsys, *args)
        _, second = run(capsys, *args)
        assert first == second

    def test_zero_tolerance_flags_complex_checks_without_crashing(self, capsys):
        code, report = run_json(
            capsys,
            "reproduce-all", "--k-max", "2", "--n-range", "4..5", "--tol", "0",
        )
        assert code == 2
        assert report["pass"] is False
        by_number = {entry["criterion"]: entry for entry in report["results"]}
        # the two-projection deviation is ~1e-16 > 0: flagged, not a crash
        assert by_number[8]["pass"] is False
        assert by_number[1]["pass"] is True


class TestUsageErrors:
    def test_unknown_flag(self, capsys):
        assert main(["partitions", "enum", "--bogus"]) == 1

    def test_unknown_subcommand(self, capsys):
        assert main(["nonsense"]) == 1

    def test_help_exits_zero(self, capsys):
        assert main(["--help"]) == 0
        assert main(["urn", "--help"]) == 0

    def test_bad_partition_text(self, capsys):
        assert main(["partitions", "mobius", "--p", "1,,2", "--q", "1,2"]) == 1

    def test_bad_range(self, capsys):
        assert main(["weingarten", "dk", "--k", "2", "--n-range", "x..y"]) == 1

    def test_out_of_bound_k(self, capsys):
        assert main(["partitions", "enum", "--k", "0"]) == 1

    def test_missing_file(self, capsys):
        assert main(["cumulants", "free-moment", "--spec", "/nope.json",
                     "--letters", "c", "--labels", "1"]) == 1

    def test_conflicting_unitary_flags(self, capsys):
        assert main(["magic", "validate", "--perm", "1,2", "--theta", "0.3"]) == 1


class TestExperimentConfig:
    def test_validates(self):
        cfg = ExperimentConfig(k_max=4, n_range=(4, 8), tolerance=0.0)
        assert cfg.output_format == "json"
        with pytest.raises(QpermError):
            ExperimentConfig(k_max=0)
        with pytest.raises(QpermError):
            ExperimentConfig(n_range=(5, 4))
        with pytest.raises(QpermError):
            ExperimentConfig(tolerance=-1.0)

    def test_rational_round_trip(self):
        for q in [Fraction(3, 7), Fraction(-1, 12), Fraction(5), Fraction(0)]:
            assert parse_rational(rational_str(q)) == q

    @given(st.fractions())
    def test_rational_round_trip_randomized(self, q):
        assert parse_rational(rational_str(q)) == q
