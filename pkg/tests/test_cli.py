"""CLI surface: exit codes, determinism, file outputs, parse-back."""

import json
import hashlib

import numpy as np
import pytest

from qsep.cli import main
from qsep.harness import read_trials_csv
from qsep.oracle import FunctionInstance, read_instance, write_instance
from qsep.svg import parse_chart


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out.splitlines(), captured.err


def last_json(lines):
    return json.loads(lines[-1])


def digest(path):
    return hashlib.sha256(path.read_bytes()).hexdigest()


class TestGen:
    def test_collision_three_files_and_rerun_digests(self, tmp_path, capsys):
        args = ("gen", "--construction", "collision-fn", "--n", "4096",
                "--scales", "2..5", "--c", "0.3", "--seed", "7")
        d1, d2 = tmp_path / "a", tmp_path / "b"
        code, lines, _ = run_cli(capsys, *args, "--out-dir", str(d1))
        assert code == 0
        assert lines[0].startswith("capacity ")
        rec = last_json(lines)
        assert set(rec["files"]) == {"instance", "certificate", "meta"}
        code, _, _ = run_cli(capsys, *args, "--out-dir", str(d2))
        assert code == 0
        for name in ("instance", "certificate", "meta"):
            f = f"collision-fn.{name}.json"
            assert digest(d1 / f) == digest(d2 / f)

    def test_files_carry_config_hash(self, tmp_path, capsys):
        code, lines, _ = run_cli(
            capsys, "gen", "--construction", "starpath", "--n", "1024",
            "--k", "4", "--seed", "1", "--out-dir", str(tmp_path))
        assert code == 0
        h = last_json(lines)["config-hash"]
        for name in ("instance", "certificate", "meta"):
            doc = json.loads(
                (tmp_path / f"starpath-graph.{name}.json").read_text())
            assert doc["config_hash"] == h

    def test_prime_shortage_exits_2_with_widening_hint(self, tmp_path, capsys):
        code, _, err = run_cli(
            capsys, "gen", "--construction", "fixedpoint", "--n", "65536",
            "--alpha", "3", "--out-dir", str(tmp_path))
        assert code == 2
        assert "primes" in err and "--widen-primes" in err

    def test_capacity_error_names_the_inequality(self, tmp_path, capsys):
        code, _, err = run_cli(
            capsys, "gen", "--construction", "collision-fn", "--n", "64",
            "--scales", "2..9", "--out-dir", str(tmp_path))
        assert code == 2
        assert "needs" in err and "> n = 64" in err

    def test_star_triangle_declares_one_clique(self, tmp_path, capsys):
        code, lines, _ = run_cli(
            capsys, "gen", "--construction", "star", "--n", "4096",
            "--H", "triangle", "--seed", "3", "--out-dir", str(tmp_path))
        assert code == 0
        assert last_json(lines)["witnesses"] == 1

    def test_qsep_seed_env_is_the_default(self, tmp_path, capsys, monkeypatch):
        d1, d2 = tmp_path / "env", tmp_path / "flag"
        monkeypatch.setenv("QSEP_SEED", "99")
        run_cli(capsys, "gen", "--construction", "collision-fn", "--n", "1024",
                "--scales", "2..4", "--out-dir", str(d1))
        monkeypatch.delenv("QSEP_SEED")
        run_cli(capsys, "gen", "--construction", "collision-fn", "--n", "1024",
                "--scales", "2..4", "--seed", "99", "--out-dir", str(d2))
        f = "collision-fn.instance.json"
        assert digest(d1 / f) == digest(d2 / f)


@pytest.fixture()
def collision_files(tmp_path_factory):
    out = tmp_path_factory.mktemp("inst")
    main(["gen", "--construction", "collision-fn", "--n", "4096",
          "--scales", "2..5", "--seed", "7", "--out-dir", str(out)])
    return (out / "collision-fn.instance.json",
            out / "collision-fn.certificate.json")


class TestRun:
    def test_cert_collision_found_and_valid(self, collision_files, capsys):
        inst, cert = collision_files
        capsys.readouterr()
        code, lines, _ = run_cli(
            capsys, "run", "--instance", str(inst), "--cert", str(cert),
            "--detector", "cert-collision", "--seed", "3")
        assert code == 0
        rec = last_json(lines)
        assert rec["status"] == "Found" and rec["valid"] is True
        assert {"detector", "instance-ref", "seed", "status", "queries",
                "attempts", "wall-ms"} <= set(rec)

    def test_corrupt_cert_never_invalid(self, collision_files, capsys):
        inst, cert = collision_files
        capsys.readouterr()
        for seed in range(6):
            code, lines, _ = run_cli(
                capsys, "run", "--instance", str(inst), "--cert", str(cert),
                "--detector", "cert-collision", "--seed", str(seed),
                "--corrupt-cert", "--scales", "2..5",
                "--max-attempts", "400")
            assert code == 0
            rec = last_json(lines)
            assert rec["status"] != "Found" or rec["valid"] is True

    def test_path_k_on_identity_file_exhausts(self, tmp_path, capsys):
        inst = FunctionInstance(n=64, succ=np.arange(64), meta=None, info={})
        path = tmp_path / "identity.json"
        write_instance(inst, path)
        code, lines, _ = run_cli(
            capsys, "run", "--instance", str(path), "--detector", "path-k",
            "--k", "1", "--seed", "1")
        assert code == 0
        rec = last_json(lines)
        assert rec["status"] == "Exhausted" and rec["witness"] is None

    def test_graph_detector_on_function_instance_exits_3(
            self, collision_files, capsys):
        inst, cert = collision_files
        capsys.readouterr()
        code, _, err = run_cli(
            capsys, "run", "--instance", str(inst), "--cert", str(cert),
            "--detector", "cert-claw", "--seed", "1")
        assert code == 3 and "function oracle" in err

    def test_missing_instance_exits_4(self, tmp_path, capsys):
        code, _, err = run_cli(
            capsys, "run", "--instance", str(tmp_path / "missing.json"),
            "--detector", "path-k", "--seed", "1")
        assert code == 4 and "error:" in err


SEP_BATTERY = {
    "kind": "separation",
    "master_seed": 11,
    "trials": 5,
    "budget_factor": 50.0,
    "pilot_trials": 4,
    "points": [
        {"x": 2, "n": 4096, "generator": "collision-fn",
         "gen_kwargs": {"params": {"i_min": 2, "i_max": 4, "c": 0.3}},
         "baseline_kwargs": {"i_min": 2, "i_max": 4}},
        {"x": 3, "n": 4096, "generator": "collision-fn",
         "gen_kwargs": {"params": {"i_min": 2, "i_max": 5, "c": 0.3}},
         "baseline_kwargs": {"i_min": 2, "i_max": 5}},
        {"x": 4, "n": 4096, "generator": "collision-fn",
         "gen_kwargs": {"params": {"i_min": 2, "i_max": 6, "c": 0.3}},
         "baseline_kwargs": {"i_min": 2, "i_max": 6}},
    ],
}

SLOPE_BATTERY = {
    "kind": "slope",
    "master_seed": 3,
    "series": [
        {"label": "walks", "generator": "fixedpoint-fn",
         "detector": "cert-fixedpoint", "gen_kwargs": {},
         "det_kwargs": {"C": 2.0}, "ns": [4096, 16384, 65536], "trials": 3},
    ],
}


class TestBench:
    def test_separation_report_rows_and_determinism(self, tmp_path, capsys):
        spec = tmp_path / "sep.json"
        spec.write_text(json.dumps(SEP_BATTERY))
        d1, d2 = tmp_path / "a", tmp_path / "b"
        code, lines, _ = run_cli(capsys, "bench", "--battery", str(spec),
                                 "--out-dir", str(d1), "--threads", "2")
        assert code == 0
        report = json.loads((d1 / "separation.report.json").read_text())
        assert len(report["rows"]) == 3
        assert all(r["ratio"] > 0 for r in report["rows"])
        code, _, _ = run_cli(capsys, "bench", "--battery", str(spec),
                             "--out-dir", str(d2), "--threads", "1")
        assert code == 0
        assert digest(d1 / "separation.trials.csv") == \
            digest(d2 / "separation.trials.csv")
        assert digest(d1 / "separation.report.json") == \
            digest(d2 / "separation.report.json")

    def test_csv_carries_config_hash_header(self, tmp_path, capsys):
        spec = tmp_path / "sep.json"
        spec.write_text(json.dumps(SEP_BATTERY))
        code, lines, _ = run_cli(capsys, "bench", "--battery", str(spec),
                                 "--out-dir", str(tmp_path), "--threads", "1")
        assert code == 0
        h = last_json(lines)["config-hash"]
        first = (tmp_path / "separation.trials.csv").read_text().splitlines()[0]
        assert first == f"# config {h}"
        # reader skips the header
        rows = read_trials_csv(tmp_path / "separation.trials.csv")
        assert len(rows) == 2 * 3 * 5

    def test_slope_plot_parses_back_to_report_rows(self, tmp_path, capsys):
        spec = tmp_path / "slope.json"
        spec.write_text(json.dumps(SLOPE_BATTERY))
        code, _, _ = run_cli(capsys, "bench", "--battery", str(spec),
                             "--out-dir", str(tmp_path), "--threads", "1",
                             "--plot")
        assert code == 0
        series = parse_chart((tmp_path / "slope.svg").read_text())
        report = json.loads((tmp_path / "slope.report.json").read_text())
        xs, ys = series["walks"]
        assert xs == [float(r["n"]) for r in report["rows"]]
        assert ys == [r["mean_queries"] for r in report["rows"]]

    def test_bad_battery_kind_exits_2(self, tmp_path, capsys):
        spec = tmp_path / "bad.json"
        spec.write_text(json.dumps({"kind": "nope"}))
        code, _, err = run_cli(capsys, "bench", "--battery", str(spec),
                               "--out-dir", str(tmp_path))
        assert code == 2 and "separation|slope" in err


class TestVerify:
    def test_fresh_instance_passes_with_count_line(self, collision_files,
                                                   capsys):
        inst, cert = collision_files
        capsys.readouterr()
        code, lines, _ = run_cli(capsys, "verify", "--instance", str(inst),
                                 "--cert", str(cert))
        assert code == 0
        assert any("expected / " in ln and " found" in ln for ln in lines)
        assert last_json(lines)["ok"] is True

    def test_corrupted_succ_fails_partition(self, collision_files, tmp_path,
                                            capsys):
        inst_path, _ = collision_files
        inst = read_instance(inst_path)
        # break one interior arrow of the first multi-element structure
        for kind, _, members in inst.meta.structures():
            if len(members) >= 2:
                inst.succ[int(members[0])] = int(members[0])
                break
        bad = tmp_path / "bad.json"
        write_instance(inst, bad)
        capsys.readouterr()
        code, lines, _ = run_cli(capsys, "verify", "--instance", str(bad))
        assert code == 1
        assert any(ln.startswith("FAIL partition") for ln in lines)

    def test_star_degree_uniqueness_line(self, tmp_path, capsys):
        main(["gen", "--construction", "star", "--n", "4096", "--H",
              "triangle", "--seed", "3", "--out-dir", str(tmp_path)])
        capsys.readouterr()
        code, lines, _ = run_cli(
            capsys, "verify",
            "--instance", str(tmp_path / "star-graph.instance.json"),
            "--cert", str(tmp_path / "star-graph.certificate.json"))
        assert code == 0
        assert any(ln.startswith("degree-uniqueness: ok") for ln in lines)

    def test_oversize_instance_exits_2(self, tmp_path, capsys):
        main(["gen", "--construction", "collision-fn", "--n", "16384",
              "--scales", "2..5", "--seed", "1", "--out-dir", str(tmp_path)])
        capsys.readouterr()
        code, _, err = run_cli(
            capsys, "verify",
            "--instance", str(tmp_path / "collision-fn.instance.json"))
        assert code == 2 and "brute-force guard" in err


class TestAdversaryAndReport:
    def test_adversary_transcript_consistent(self, tmp_path, capsys):
        code, lines, _ = run_cli(
            capsys, "adversary-test", "--n", "1024", "--scales", "2..4",
            "--seed", "5", "--probes", "400", "--out-dir", str(tmp_path))
        assert code == 0
        rec = last_json(lines)
        assert rec["consistent"] is True
        assert (tmp_path / "adversary.trace.jsonl").exists()
        summary = json.loads((tmp_path / "adversary.summary.json").read_text())
        assert summary["consistent"] is True and "config_hash" in summary

    def test_report_aggregates_and_plots(self, tmp_path, capsys):
        spec = tmp_path / "slope.json"
        spec.write_text(json.dumps(SLOPE_BATTERY))
        main(["bench", "--battery", str(spec), "--out-dir", str(tmp_path),
              "--threads", "1"])
        capsys.readouterr()
        code, lines, _ = run_cli(
            capsys, "report", "--csv", str(tmp_path / "slope.trials.csv"),
            "--out-dir", str(tmp_path), "--plot")
        assert code == 0
        assert any(ln.startswith("group ") for ln in lines)
        assert (tmp_path / "report.json").exists()
        series = parse_chart((tmp_path / "report.svg").read_text())
        assert "fixedpoint-fn/cert-fixedpoint" in series
