import csv
import io
import json

import jsonschema
import pytest

from dmtlab.cli import main, sweep_points
from dmtlab.dmt import AntennaConfig, FeedbackCase, d_case
from dmtlab.errors import DomainError
from dmtlab.io import CURVE_COLUMNS, FIGURE1_MANIFEST_SCHEMA, SIMULATE_COLUMNS, format_number, parse_number


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows_of(text):
    return list(csv.DictReader(io.StringIO(text)))


class TestPoint:
    def test_csir_origin(self, capsys):
        code, out, _ = run(capsys, "point", "--case", "csir", "--m", "2", "--n", "2", "--r", "0")
        assert code == 0
        assert rows_of(out) == [{"case": "csir", "m": "2", "n": "2", "k": "", "r": "0", "d": "4"}]

    def test_unbounded_serialized_as_inf(self, capsys):
        code, out, _ = run(capsys, "point", "--case", "csir-tc", "--r", "1")
        assert code == 0 and rows_of(out)[0]["d"] == "inf"

    def test_tdd_value(self, capsys):
        code, out, _ = run(capsys, "point", "--case", "csir-hat-tc-hat", "--r", "1")
        assert code == 0 and float(rows_of(out)[0]["d"]) == 17

    def test_json(self, capsys):
        code, out, _ = run(capsys, "point", "--case", "csir-tq", "--k", "2", "--r", "0", "--format", "json")
        doc = json.loads(out)
        assert code == 0 and doc["rows"][0]["d"] == 20 and doc["meta"]["tool"] == "dmtlab"

    def test_overhead(self, capsys):
        code, out, _ = run(capsys, "point", "--case", "csir", "--r", "0.5", "--overhead", "100:20")
        assert code == 0 and float(rows_of(out)[0]["r"]) == pytest.approx(0.625)

    def test_unknown_case_is_usage_error(self, capsys):
        code, _, err = run(capsys, "point", "--case", "csit", "--r", "0")
        assert code == 1 and "unknown case" in err

    def test_domain_error(self, capsys):
        code, _, err = run(capsys, "point", "--case", "csir", "--r", "2")
        assert code == 2 and "min(m,n)" in err

    def test_bad_k_is_domain_error(self, capsys):
        code, _, err = run(capsys, "point", "--case", "csir-tq-hat", "--k", "1", "--r", "0.2")
        assert code == 2 and "K >= 2" in err


class TestCurve:
    def test_csir_rows(self, capsys):
        code, out, _ = run(capsys, "curve", "--case", "csir", "--m", "2", "--n", "2")
        assert code == 0
        assert [(r["r"], r["d"]) for r in rows_of(out)] == [("0", "4"), ("1", "1"), ("2", "0")]
        assert out.splitlines()[0] == ",".join(CURVE_COLUMNS)

    def test_first_row_trained_receiver(self, capsys):
        _, out, _ = run(capsys, "curve", "--case", "csir-hat-tq", "--m", "2", "--n", "2", "--k", "2")
        first = rows_of(out)[0]
        assert (first["r"], first["d"]) == ("0", "20")

    def test_tdd_siso(self, capsys):
        _, out, _ = run(capsys, "curve", "--case", "csir-hat-tc-hat", "--m", "1", "--n", "1")
        assert [(r["r"], r["d"]) for r in rows_of(out)] == [("0", "2"), ("1", "1")]

    def test_unbounded_exit_3(self, capsys):
        code, _, _ = run(capsys, "curve", "--case", "csir-tc-hat")
        assert code == 3

    @pytest.mark.parametrize("case,k", [("csir-tq-hat", "3"), ("csir-tq", "4"), ("csir-hat-tc-hat", "2")])
    def test_round_trip(self, capsys, case, k):
        _, out, _ = run(capsys, "curve", "--case", case, "--k", k, "--m", "3", "--n", "2", "--dense")
        cfg = AntennaConfig(3, 2)
        fc = FeedbackCase.parse(case, int(k))
        rows = rows_of(out)
        assert len(rows) > 201
        for row in rows:
            r, d = parse_number(row["r"]), parse_number(row["d"])
            # The right end carries the left-limit value.
            r_eval = min(r, cfg.min_mn * (1 - 1e-13))
            assert d == pytest.approx(d_case(fc, r_eval, cfg), abs=1e-9)

    def test_r_max(self, capsys):
        _, out, _ = run(capsys, "curve", "--case", "csir", "--r-max", "1.5")
        assert [(r["r"], r["d"]) for r in rows_of(out)] == [("0", "4"), ("1", "1"), ("1.5", "0.5")]

    def test_identical_repeat(self, capsys):
        first = run(capsys, "curve", "--case", "csir-tq-hat", "--k", "4", "--dense")[1]
        second = run(capsys, "curve", "--case", "csir-tq-hat", "--k", "4", "--dense")[1]
        assert first == second


class TestTable:
    def test_ten_rows_three_inf(self, capsys):
        code, out, _ = run(capsys, "table", "--m", "2", "--n", "2", "--k", "2", "--r", "1e-9")
        rows = rows_of(out)
        assert code == 0 and len(rows) == 10
        assert sum(r["d"] == "inf" for r in rows) == 3
        assert all(r["characteristic"] for r in rows)

    def test_siso_noisy_feedback(self, capsys):
        _, out, _ = run(capsys, "table", "--m", "1", "--n", "1", "--k", "2", "--r", "1e-9")
        row = next(r for r in rows_of(out) if r["case"] == "csir-tq-hat")
        assert float(row["d"]) == pytest.approx(2, abs=1e-6)

    def test_near_full_multiplexing(self, capsys):
        _, out, _ = run(capsys, "table", "--r", "1.999")
        for row in rows_of(out):
            d = parse_number(row["d"])
            if row["case"] in ("csir", "csir-hat"):
                assert d == pytest.approx(0, abs=0.01)
            else:
                assert d > 0


class TestFigure1:
    def test_outputs(self, capsys, tmp_path):
        out = tmp_path / "fig.csv"
        code, _, _ = run(capsys, "figure1", "--out", str(out))
        assert code == 0
        rows = rows_of(out.read_text())
        assert len({r["case"] for r in rows}) == 7
        manifest = json.loads((tmp_path / "fig.manifest.json").read_text())
        jsonschema.validate(manifest, FIGURE1_MANIFEST_SCHEMA)
        assert {u["case"] for u in manifest["unbounded"]} == {"csir-tc", "csir-hat-tc", "csir-tc-hat"}
        assert sum(c["rows"] for c in manifest["curves"]) == len(rows)

    def test_io_error(self, capsys, tmp_path):
        code, _, _ = run(capsys, "figure1", "--out", str(tmp_path / "missing" / "fig.csv"))
        assert code == 4


class TestSimulate:
    ARGS = ("simulate", "--protocol", "no-feedback-csir", "--m", "1", "--n", "1", "--r", "0.2",
            "--snr-db", "10:20:5", "--trials", "200000", "--seed", "17")

    def test_rows_and_fit(self, capsys, tmp_path):
        out = tmp_path / "sim.csv"
        code, _, _ = run(capsys, *self.ARGS, "--out", str(out))
        assert code == 0
        text = out.read_text()
        assert text.splitlines()[0] == ",".join(SIMULATE_COLUMNS)
        rows = rows_of(text)
        assert [r["snr_db"] for r in rows] == ["10", "15", "20", "fit", "reference"]
        assert float(rows[-1]["p_out"]) == pytest.approx(0.8)

        code, fit_out, _ = run(capsys, "fit", str(out))
        assert code == 0
        assert rows_of(fit_out)[0]["diversity"] == rows[3]["p_out"]

    def test_workers_identical(self, capsys, tmp_path, monkeypatch):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert run(capsys, *self.ARGS, "--workers", "1", "--out", str(a))[0] == 0
        monkeypatch.setenv("DMTLAB_WORKERS", "4")
        assert run(capsys, *self.ARGS, "--out", str(b))[0] == 0
        assert a.read_bytes() == b.read_bytes()

    def test_json(self, capsys):
        code, out, _ = run(capsys, *self.ARGS, "--format", "json")
        doc = json.loads(out)
        assert code == 0 and doc["meta"]["seed"] == 17 and len(doc["rows"]) == 3
        assert doc["reference"]["d"] == pytest.approx(0.8)

    def test_too_few_points(self, capsys):
        code, _, err = run(capsys, "simulate", "--protocol", "no-feedback-csir", "--m", "2", "--n", "2",
                           "--r", "0.1", "--trials", "500")
        assert code == 5 and "outages" in err

    def test_unbounded_reference(self, capsys):
        code, out, _ = run(capsys, "simulate", "--protocol", "tdd-noisy-training", "--k", "2", "--m", "1",
                           "--n", "1", "--r", "0.2", "--snr-db", "5:15:5", "--trials", "100000")
        assert code == 0 and rows_of(out)[-1]["p_out"] == "inf"

    def test_bad_sweep(self, capsys):
        assert run(capsys, "simulate", "--protocol", "no-feedback-csir", "--r", "0.1", "--snr-db", "10:15:5")[0] == 2
        assert run(capsys, "simulate", "--protocol", "no-feedback-csir", "--r", "0.1", "--snr-db", "10-20")[0] == 1

    def test_config_file(self, capsys, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"protocol": "no-feedback-csir", "m": 1, "n": 1, "r": 0.2,
                                   "snr-db": "10:20:5", "trials": 200000, "seed": 17}))
        code, out, _ = run(capsys, "--config", str(cfg), "simulate")
        assert code == 0
        code2, out2, _ = run(capsys, *self.ARGS)
        assert out == out2
        # Flags override the file.
        _, out3, _ = run(capsys, "--config", str(cfg), "simulate", "--seed", "18")
        assert out3 != out

    def test_config_errors(self, capsys, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        assert run(capsys, "--config", str(bad), "table", "--r", "0")[0] == 6
        assert run(capsys, "--config", str(tmp_path / "none.json"), "table", "--r", "0")[0] == 4


class TestFit:
    def write(self, path, rows):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(SIMULATE_COLUMNS)
            for db, trials, outages in rows:
                w.writerow(["x", 1, 1, 1, 0.1, db, trials, outages, outages / trials, "", "", 1])

    def test_synthetic_square_law(self, capsys, tmp_path):
        path = tmp_path / "s.csv"
        self.write(path, [(10, 10**9, 10**7), (20, 10**9, 10**5), (30, 10**9, 10**3)])
        code, out, _ = run(capsys, "fit", str(path))
        assert code == 0 and float(rows_of(out)[0]["diversity"]) == pytest.approx(2.0, abs=1e-12)

    def test_two_usable_rows(self, capsys, tmp_path):
        path = tmp_path / "s.csv"
        self.write(path, [(10, 10**6, 10**4), (20, 10**6, 10**2), (30, 10**6, 1)])
        assert run(capsys, "fit", str(path))[0] == 5

    def test_malformed(self, capsys, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("snr_db,trials,outages\n10,abc,3\n")
        assert run(capsys, "fit", str(path))[0] == 6
        path.write_text("just,some,columns\n1,2,3\n")
        assert run(capsys, "fit", str(path))[0] == 6

    def test_missing_file(self, capsys, tmp_path):
        assert run(capsys, "fit", str(tmp_path / "nope.csv"))[0] == 4


def test_format_number():
    assert format_number(4.0) == "4"
    assert format_number(float("inf")) == "inf"
    assert format_number(0.1) == "0.1"
    assert format_number(None) == ""
    assert parse_number("inf") == float("inf")
    x = 1 / 3
    assert parse_number(format_number(x)) == x


def test_sweep_points():
    assert sweep_points(10, 30, 5) == [10, 15, 20, 25, 30]
    with pytest.raises(DomainError):
        sweep_points(10, 10, 1)
