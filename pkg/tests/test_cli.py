import io
import json
import time

import pytest

from kanbench.cli import main


def run_cli(*argv):
    out = io.StringIO()
    code = main(list(argv), stream=out)
    return code, out.getvalue()


class TestGenData:
    def test_writes_expected_line_count(self, tmp_path):
        path = tmp_path / "a.csv"
        code, _ = run_cli("gen-data", "--n", "1000", "--seed", "1", "--out", str(path))
        assert code == 0
        assert len(path.read_text().strip().splitlines()) == 1001

    def test_dataset_b_size(self, tmp_path):
        path = tmp_path / "b.csv"
        code, _ = run_cli("gen-data", "--n", "100", "--seed", "1", "--out", str(path))
        assert code == 0
        assert len(path.read_text().strip().splitlines()) == 101

    def test_same_flags_same_bytes(self, tmp_path):
        p1, p2 = tmp_path / "x.csv", tmp_path / "y.csv"
        run_cli("gen-data", "--n", "48", "--seed", "3", "--out", str(p1))
        run_cli("gen-data", "--n", "48", "--seed", "3", "--out", str(p2))
        assert p1.read_bytes() == p2.read_bytes()

    def test_bad_n_exits_2(self, tmp_path):
        code, _ = run_cli("gen-data", "--n", "7", "--seed", "1", "--out", str(tmp_path / "z.csv"))
        assert code == 2


class TestBench:
    def test_smoke_run_under_ten_seconds(self, tmp_path):
        path = tmp_path / "r.json"
        started = time.monotonic()
        code, text = run_cli(
            "bench", "--model", "mlp", "--data", "synthetic-b", "--depths", "1",
            "--reps", "1", "--seed", "0", "--out", str(path),
        )
        assert code == 0
        assert time.monotonic() - started < 10
        doc = json.loads(path.read_text())
        assert len(doc["runs"]) == 1
        assert "depth" in text and "median" in text

    def test_spline_flags_with_mlp_exit_2(self, tmp_path):
        code, _ = run_cli(
            "bench", "--model", "mlp", "--data", "synthetic-b", "--order", "3",
            "--out", str(tmp_path / "r.json"),
        )
        assert code == 2

    def test_missing_csv_exits_3(self, tmp_path):
        code, _ = run_cli(
            "bench", "--model", "mlp", "--data", str(tmp_path / "nope.csv"),
            "--schema", "generic", "--out", str(tmp_path / "r.json"),
        )
        assert code == 3

    def test_path_without_schema_exits_2(self, tmp_path):
        code, _ = run_cli(
            "bench", "--model", "mlp", "--data", str(tmp_path / "d.csv"),
            "--out", str(tmp_path / "r.json"),
        )
        assert code == 2

    def test_csv_out(self, tmp_path):
        code, _ = run_cli(
            "bench", "--model", "kan", "--data", "synthetic-b", "--depths", "1",
            "--reps", "2", "--epochs", "2", "--out", str(tmp_path / "r.json"),
            "--csv-out", str(tmp_path / "r.csv"),
        )
        assert code == 0
        lines = (tmp_path / "r.csv").read_text().strip().splitlines()
        assert len(lines) == 3

    def test_printer_table_shows_goldens(self, tmp_path):
        code, text = run_cli(
            "bench", "--model", "mlp", "--data", "printer-like", "--depths", "1,2,3",
            "--reps", "1", "--epochs", "1", "--out", str(tmp_path / "r.json"),
        )
        assert code == 0
        for count in ("27", "35", "43"):
            assert count in text

    def test_determinism_and_parallel_identity(self, tmp_path):
        def normalized(path):
            doc = json.loads(path.read_text())
            for run in doc["runs"]:
                for r in run["results"]:
                    r["wall_time_ms"] = None
            return json.dumps(doc, indent=2)

        paths = [tmp_path / f"{name}.json" for name in ("a", "b", "c")]
        for path, jobs in zip(paths, ("1", "1", "2")):
            code, _ = run_cli(
                "bench", "--model", "mlp", "--data", "synthetic-b", "--depths", "1,2",
                "--reps", "3", "--epochs", "2", "--seed", "5", "--jobs", jobs,
                "--out", str(path),
            )
            assert code == 0
        assert normalized(paths[0]) == normalized(paths[1]) == normalized(paths[2])


class TestOrderSweep:
    def test_full_sweep_structure(self, tmp_path):
        path = tmp_path / "orders.json"
        code, text = run_cli(
            "order-sweep", "--data", "printer-like", "--reps", "1", "--epochs", "1",
            "--out", str(path),
        )
        assert code == 0
        doc = json.loads(path.read_text())
        assert len(doc["runs"]) == 5
        counts = [run["results"][0]["param_count"] for run in doc["runs"]]
        assert all(b > a for a, b in zip(counts, counts[1:]))

    def test_out_of_range_order_exits_2(self, tmp_path):
        code, _ = run_cli(
            "order-sweep", "--data", "printer-like", "--orders", "6",
            "--out", str(tmp_path / "r.json"),
        )
        assert code == 2

    def test_non_default_depth_exits_2(self, tmp_path):
        code, _ = run_cli(
            "order-sweep", "--data", "printer-like", "--depth", "3",
            "--out", str(tmp_path / "r.json"),
        )
        assert code == 2

    def test_single_order_matches_bench(self, tmp_path):
        sweep_path, bench_path = tmp_path / "s.json", tmp_path / "b.json"
        run_cli("order-sweep", "--data", "synthetic-b", "--orders", "3", "--reps", "2",
                "--epochs", "2", "--seed", "9", "--out", str(sweep_path))
        run_cli("bench", "--model", "kan", "--data", "synthetic-b", "--depths", "2",
                "--reps", "2", "--epochs", "2", "--seed", "9", "--out", str(bench_path))
        sweep = json.loads(sweep_path.read_text())["runs"][0]
        bench = json.loads(bench_path.read_text())["runs"][0]
        assert [r["test_accuracy"] for r in sweep["results"]] == [
            r["test_accuracy"] for r in bench["results"]
        ]


class TestCountParams:
    def test_synthetic_golden(self):
        code, text = run_cli("count-params", "--input-dim", "2", "--depths", "3")
        assert code == 0
        lines = text.strip().splitlines()
        assert lines[-1].split() == ["3", "27", "112"]

    def test_printer_goldens(self):
        code, text = run_cli("count-params", "--input-dim", "7", "--classes", "3")
        assert code == 0
        rows = [line.split() for line in text.strip().splitlines()[1:]]
        assert [r[1] for r in rows] == ["27", "35", "43"]

    def test_kan_at_least_four_times_mlp(self):
        for dim, classes in ((2, 2), (7, 3), (30, 2)):
            code, text = run_cli(
                "count-params", "--input-dim", str(dim), "--classes", str(classes)
            )
            assert code == 0
            for line in text.strip().splitlines()[1:]:
                _, mlp, kan = line.split()
                assert int(kan) >= 4 * int(mlp)


class TestHelp:
    def test_bench_help_lists_protocol_flags(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["bench", "--help"])
        assert exc.value.code == 0
        text = capsys.readouterr().out
        for flag in ("--model", "--data", "--depths", "--width", "--reps", "--test-frac",
                     "--epochs", "--lr", "--grid", "--order", "--seed", "--standardize",
                     "--jobs", "--out"):
            assert flag in text
        # paper defaults visible in help
        for default in ("25", "0.3", "20", "0.05"):
            assert default in text

    def test_unknown_flag_exits_2(self):
        with pytest.raises(SystemExit) as exc:
            main(["bench", "--model", "mlp", "--data", "synthetic-b", "--out", "x", "--bogus"])
        assert exc.value.code == 2
