import csv
import json
import subprocess
import sys

import pytest

from conftest import SCENARIOS
from geepower import ConfigError, ParseError, fast_gee_power, load_spec
from geepower.cli import main
from geepower.scenario import parse_text, spec_from_mapping

EX2 = SCENARIOS / "example2_connect_home_poisson.txt"
EX3 = SCENARIOS / "example3_decision_regret.txt"
EX4 = SCENARIOS / "example4_heart_health_now.txt"
EUDL = SCENARIOS / "eudl_parallel.txt"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def table_row(out):
    lines = out.splitlines()
    head = lines.index(next(l for l in lines if l.startswith("T ")))
    return lines[head + 1].split()


class TestParsing:
    def test_single_line_matrix(self):
        raw = parse_text("designpattern = {0 2 1 1, 0 0 2 1}\nm = 3 4\n")
        assert raw["designpattern"] == [[0, 2, 1, 1], [0, 0, 2, 1]]
        assert raw["m"] == [3.0, 4.0]

    def test_comments_and_case(self):
        raw = parse_text("# header\nDIST = Binary  # trailing\n\nPhi = 1\n")
        assert raw == {"dist": "Binary", "phi": "1"}

    def test_ragged_row_names_index(self):
        with pytest.raises(ParseError, match="row 2"):
            parse_text("designpattern = {\n0 1 1\n0 0\n}\n")

    def test_bad_number(self):
        with pytest.raises(ParseError, match="cp_size_matrix row 1"):
            parse_text("cp_size_matrix = {2 x 2}\n")

    def test_unknown_key(self):
        with pytest.raises(ParseError, match="unknown key 'colour'"):
            parse_text("colour = blue\n")

    def test_unclosed_brace(self):
        with pytest.raises(ParseError, match="closing brace"):
            parse_text("designpattern = {\n0 1\n")

    def test_missing_key(self):
        raw = parse_text(EX3.read_text())
        del raw["m"]
        with pytest.raises(ConfigError, match="'m'"):
            spec_from_mapping(raw)

    def test_missing_correlation_key(self):
        raw = parse_text(EX3.read_text())
        del raw["r0"]
        with pytest.raises(ConfigError, match="'r0'"):
            spec_from_mapping(raw)

    def test_json_matches_text(self):
        assert load_spec(SCENARIOS / "eudl_parallel.json") == load_spec(EUDL)
        assert load_spec(SCENARIOS / "eudl_parallel.json", as_json=True) == load_spec(EUDL)


class TestRun:
    def test_example4_row(self, capsys):
        code, out, _ = run(capsys, "run", EX4)
        assert code == 0
        assert out.startswith("The fast GEE power of binary outcomes with nested exchangeable")
        assert table_row(out) == ["11", "6", "180", "177", "-2.944", "198000", "BINARY", "LOGIT",
                                  "2.7477", "0.7846", "0.7801"]

    def test_example2_row(self, capsys):
        code, out, _ = run(capsys, "run", EX2)
        assert code == 0
        row = table_row(out)
        assert row[:4] == ["22", "6", "12", "9"]
        assert row[5:] == ["720", "POISSON", "LOG", "3.1096", "0.8749", "0.7906"]

    def test_theta_column(self, capsys):
        _, out, _ = run(capsys, "run", EX3)
        lines = out.splitlines()
        theta_lines = [l.split()[0] for l in lines[lines.index(next(l for l in lines if l.startswith("T "))) + 2:]]
        assert theta_lines == ["0.01"] * 5 + ["-0.789"]

    def test_json_flag(self, capsys, tmp_path):
        target = tmp_path / "eudl.cfg"
        target.write_text((SCENARIOS / "eudl_parallel.json").read_text())
        code, out, _ = run(capsys, "run", target, "--json")
        assert code == 0
        assert table_row(out)[-3:] == ["3.2624", "0.9036", "0.8875"]

    def test_df_choice(self, capsys):
        _, out, _ = run(capsys, "run", EX3, "--df", "2")
        assert table_row(out)[3] == "38"

    def test_byte_identical(self, capsys):
        _, first, _ = run(capsys, "run", EX4)
        _, second, _ = run(capsys, "run", EX4)
        assert first == second

    def test_misaligned_design_exits_2(self, capsys, tmp_path):
        bad = tmp_path / "bad.txt"
        bad.write_text(EX3.read_text().replace("2 2 2 2 2 2\n", "2 2 0 2 2 2\n", 1))
        code, out, err = run(capsys, "run", bad)
        assert code == 2 and out == ""
        assert "V1" in err and "(1,3)" in err

    def test_missing_key_exits_2(self, capsys, tmp_path):
        bad = tmp_path / "bad.txt"
        bad.write_text("\n".join(l for l in EX3.read_text().splitlines() if not l.startswith("delta")))
        code, _, err = run(capsys, "run", bad)
        assert code == 2
        assert "ConfigError" in err and "'delta'" in err

    def test_parse_error_exits_2(self, capsys, tmp_path):
        bad = tmp_path / "bad.txt"
        bad.write_text(EX3.read_text().replace("0 0 1 1 1 1\n", "0 0 1 1 1\n", 1))
        code, _, err = run(capsys, "run", bad)
        assert code == 2 and "designpattern row 2" in err

    def test_missing_file_exits_1(self, capsys, tmp_path):
        code, _, err = run(capsys, "run", tmp_path / "nope.txt")
        assert code == 1 and "error" in err

    def test_module_entry_point(self):
        proc = subprocess.run([sys.executable, "-m", "geepower", "run", str(EX3)],
                              capture_output=True, text=True, check=False)
        assert proc.returncode == 0
        assert "2.9170" in proc.stdout


class TestSweep:
    def read(self, path):
        with open(path, newline="") as fh:
            return list(csv.reader(fh))

    def test_csv_layout(self, capsys, tmp_path):
        out_csv = tmp_path / "sweep.csv"
        code, out, _ = run(capsys, "sweep", EUDL, "--param", "delta",
                           "--values", "-0.223,-0.357,-0.511", "--out", out_csv, "--summary")
        assert code == 0
        rows = self.read(out_csv)
        assert rows[0][:7] == ["param", "value", "stddel", "zpower", "tpower", "df", "totaln"]
        assert len(rows) == 4
        assert [r[9] for r in rows[1:]] == ["0.5080", "0.8875", "0.9933"]
        assert all(len(r[2].replace("-", "").replace(".", "")) >= 10 for r in rows[1:])
        assert "wrote 3 rows (3 valid)" in out
        assert out.count("|") == 6

    def test_single_value_equals_run(self, capsys, tmp_path, example_specs):
        out_csv = tmp_path / "one.csv"
        run(capsys, "sweep", EX3, "--param", "delta", "--values", "-0.789", "--out", out_csv)
        row = self.read(out_csv)[1]
        res = fast_gee_power(example_specs["example3"])
        assert float(row[2]) == res.stddel
        assert float(row[3]) == res.zpower and float(row[4]) == res.tpower
        assert row[5:7] == ["33", "480"]

    def test_invalid_points_are_reported(self, capsys, tmp_path):
        out_csv = tmp_path / "corr.csv"
        code, _, _ = run(capsys, "sweep", EX3, "--param", "r0", "--values", "0.5,1.5",
                         "--out", out_csv)
        assert code == 0
        rows = self.read(out_csv)
        assert rows[1][-1] == ""
        assert rows[2][2] == "" and "V5" in rows[2][-1]

    def test_cluster_multiplier(self, capsys, tmp_path):
        out_csv = tmp_path / "m.csv"
        run(capsys, "sweep", EX3, "--param", "cluster_multiplier", "--values", "1,2", "--out", out_csv)
        rows = self.read(out_csv)
        assert float(rows[2][2]) == pytest.approx(float(rows[1][2]) * 2 ** 0.5, rel=1e-10)
        assert rows[2][5:7] == ["73", "960"]

    def test_bad_values(self, capsys, tmp_path):
        code, _, err = run(capsys, "sweep", EX3, "--param", "delta", "--values", "a,b",
                           "--out", tmp_path / "x.csv")
        assert code == 2 and "--values" in err


class TestExplain:
    def test_incomplete_design(self, capsys):
        code, out, _ = run(capsys, "explain", SCENARIOS / "implementation_periods.txt")
        assert code == 0
        assert "sequence 1: (b0,b1,q0,q1) = (1,1,3,4)" in out
        assert "sequence 2: (b0,b1,q0,q1) = (1,2,4,4)" in out
        assert "periods   [1, 3, 4]" in out
        assert "var(delta) = " in out

    def test_example3(self, capsys, example_specs):
        _, out, _ = run(capsys, "explain", EX3)
        assert "p = 7" in out
        assert "R is 12x12, X is 12x7" in out
        var = float(out.rsplit("var(delta) = ", 1)[1])
        assert var == pytest.approx(fast_gee_power(example_specs["example3"]).var_delta, rel=1e-15)

    def test_example1(self, capsys):
        _, out, _ = run(capsys, "explain", SCENARIOS / "example1_connect_home_normal.txt")
        assert out.startswith("p = 3")
        assert "sequence 1: (b0,b1,q0,q1) = (1,5,8,17)  c = 2" in out
        assert "per-cluster n = 60  (R is 60x60, X is 60x3)" in out

    def test_invalid(self, capsys, tmp_path):
        bad = tmp_path / "bad.json"
        raw = json.loads((SCENARIOS / "eudl_parallel.json").read_text())
        raw["phi"] = 2
        bad.write_text(json.dumps(raw))
        code, _, err = run(capsys, "explain", bad)
        assert code == 2 and "V10" in err
