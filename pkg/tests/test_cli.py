import json
import math
import os

import numpy as np
import pytest

from hqc import serde, validate_state
from hqc.cli import main
from hqc.families import paper_filter_rho_m, rho_m, rho_qd

from conftest import singlet_matrix, werner_matrix


def run_cli(capsys, *argv: str) -> tuple[int, dict]:
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out)


@pytest.fixture
def singlet_file(tmp_path):
    path = tmp_path / "singlet.json"
    serde.dump_state_json(validate_state(singlet_matrix()), str(path))
    return str(path)


class TestAnalyze:
    def test_singlet_report(self, capsys, singlet_file):
        code, doc = run_cli(capsys, "analyze", singlet_file)
        assert code == 0
        assert doc["report"]["b"] == pytest.approx(math.sqrt(2), abs=1e-10)
        assert doc["report"]["flags"] == []
        assert doc["ellipsoid_b"]["semiaxes"] == pytest.approx([1, 1, 1], abs=1e-10)

    def test_quasi_distillable_case5(self, capsys, tmp_path):
        path = tmp_path / "qd.json"
        serde.dump_state_json(rho_qd(0.4), str(path))
        code, doc = run_cli(capsys, "analyze", str(path))
        assert code == 0
        flags = set(doc["report"]["flags"])
        assert {"MAXIMAL_HIDDEN_CHSH", "AB_INACCESSIBLE_CHSH"} <= flags

    def test_rcsv_format(self, capsys, tmp_path):
        from hqc import to_r_picture

        path = tmp_path / "state.rcsv"
        path.write_text(serde.rmatrix_to_csv(to_r_picture(rho_qd(0.4))))
        code, doc = run_cli(capsys, "analyze", str(path), "--format", "rcsv")
        assert code == 0
        assert doc["report"]["c_a"] == pytest.approx(0.75, abs=1e-9)

    def test_malformed_input_exits_2(self, capsys, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{this is not json")
        code, doc = run_cli(capsys, "analyze", str(path))
        assert code == 2
        assert doc["error"]["type"] == "ParseError"

    def test_unphysical_state_exits_2(self, capsys, tmp_path):
        bad = np.diag([1.2, -0.2, 0.0, 0.0]).astype(complex)
        doc = {"dim": [2, 2], "matrix": [[{"re": z.real, "im": z.imag} for z in row] for row in bad]}
        path = tmp_path / "bad_state.json"
        path.write_text(json.dumps(doc))
        code, out = run_cli(capsys, "analyze", str(path))
        assert code == 2
        assert out["error"]["type"] == "NotPositive"

    def test_missing_file_exits_2(self, capsys):
        code, doc = run_cli(capsys, "analyze", "/nonexistent/state.json")
        assert code == 2


class TestCertify:
    def test_quasi_distillable(self, capsys, tmp_path):
        path = tmp_path / "qd.json"
        serde.dump_state_json(rho_qd(0.5), str(path))
        code, doc = run_cli(capsys, "certify", str(path), "--party", "A", "--objective", "chsh")
        assert code == 0
        assert doc["certified_inaccessible"] is True
        assert doc["witness_centre"] == "c_b"
        assert doc["witness_centre_magnitude"] == pytest.approx(2 / 3, abs=1e-9)
        assert doc["conjecture_conditional"] is True

    def test_singlet_not_certified(self, capsys, singlet_file):
        code, doc = run_cli(capsys, "certify", singlet_file, "--party", "B", "--objective", "f3")
        assert code == 0
        assert doc["certified_inaccessible"] is False


class TestScan:
    def test_qd_scan_with_boundaries(self, capsys, tmp_path):
        out = tmp_path / "qd.csv"
        code, doc = run_cli(capsys, "scan", "qd", "--p", "0.01:0.99:99", "--out", str(out))
        assert code == 0
        assert doc["boundaries"]["chsh_inaccessible_below_p"] == pytest.approx(2 / 3, abs=1e-6)
        assert doc["boundaries"]["f3_inaccessible_below_p"] == pytest.approx(0.5075, abs=1e-4)
        lines = out.read_text().strip().split("\n")
        assert lines[0].startswith("theta,p,B,F3")
        assert len(lines) == 100

    def test_mm_scan(self, capsys, tmp_path):
        out = tmp_path / "mm.csv"
        code, doc = run_cli(capsys, "scan", "mm", "--theta", "0:0.785:5", "--p", "0:1:5", "--out", str(out))
        assert code == 0
        assert doc["rows"] == 25

    def test_bad_grid_exits_2(self, capsys, tmp_path):
        code, doc = run_cli(capsys, "scan", "qd", "--p", "0.1:0.9:0", "--out", str(tmp_path / "x.csv"))
        assert code == 2
        assert doc["error"]["type"] == "DomainError"

    def test_deterministic_output(self, capsys, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        run_cli(capsys, "scan", "qd", "--p", "0.1:0.9:9", "--out", str(a))
        run_cli(capsys, "scan", "qd", "--p", "0.1:0.9:9", "--out", str(b))
        assert a.read_bytes() == b.read_bytes()


class TestSweep:
    def test_small_sweep(self, capsys, tmp_path):
        prefix = str(tmp_path / "run_")
        code, doc = run_cli(capsys, "sweep", "--n", "3000", "--seed", "42", "--out-prefix", prefix)
        assert code == 0
        assert doc["violations"] == 0
        assert doc["seed_source"] == "flag"
        csv_path = prefix + "envelope.csv"
        assert os.path.exists(csv_path)
        with open(csv_path) as fh:
            assert fh.readline().strip() == "c_mid,max_B,max_F3,count"

    def test_byte_identical_reruns(self, capsys, tmp_path):
        p1, p2 = str(tmp_path / "a_"), str(tmp_path / "b_")
        run_cli(capsys, "sweep", "--n", "3000", "--seed", "7", "--out-prefix", p1)
        run_cli(capsys, "sweep", "--n", "3000", "--seed", "7", "--out-prefix", p2)
        with open(p1 + "envelope.csv", "rb") as f1, open(p2 + "envelope.csv", "rb") as f2:
            assert f1.read() == f2.read()

    def test_zero_samples(self, capsys, tmp_path):
        prefix = str(tmp_path / "zero_")
        code, doc = run_cli(capsys, "sweep", "--n", "0", "--out-prefix", prefix)
        assert code == 0
        with open(prefix + "envelope.csv") as fh:
            assert fh.read() == "c_mid,max_B,max_F3,count\n"

    def test_env_seed_flagged(self, capsys, tmp_path, monkeypatch):
        monkeypatch.setenv("HQC_SEED", "99")
        prefix = str(tmp_path / "env_")
        code, doc = run_cli(capsys, "sweep", "--n", "1000", "--out-prefix", prefix)
        assert code == 0
        assert doc["seed"] == 99
        assert doc["seed_source"] == "env:HQC_SEED"

    def test_flag_overrides_env(self, capsys, tmp_path, monkeypatch):
        monkeypatch.setenv("HQC_SEED", "99")
        prefix = str(tmp_path / "flag_")
        _, doc = run_cli(capsys, "sweep", "--n", "1000", "--seed", "3", "--out-prefix", prefix)
        assert doc["seed"] == 3
        assert doc["seed_source"] == "flag"

    def test_rank_mix_parsed(self, capsys, tmp_path):
        prefix = str(tmp_path / "mix_")
        code, doc = run_cli(
            capsys, "sweep", "--n", "1000", "--out-prefix", prefix, "--rank-mix", "1:0.25,2:0.25,3:0.25,4:0.25"
        )
        assert code == 0
        assert doc["metadata"]["rank_mix"]["1"] == 0.25


class TestSweepCounterexamplePath:
    def test_exit_3_and_dump_on_violation(self, capsys, tmp_path, monkeypatch):
        # wiring test: a (synthetic) recorded violation must produce exit
        # code 3 and a full-precision state dump
        import hqc.cli as cli_mod
        from hqc.montecarlo import SideBins, SweepSummary, Violation

        state = np.eye(4, dtype=complex) / 4

        def fake_run_sweep(config):
            side = SideBins(np.full(config.bins, -np.inf), np.full(config.bins, -np.inf),
                            np.zeros(config.bins, dtype=np.int64), 0)
            violation = Violation(index=5, b=1.5, f3=1.6, c_a=0.7, c_b=0.7,
                                  reasons=("chsh_bound_cB",), state=state)
            return SweepSummary(config=config, vs_cb=side, vs_ca=side,
                                violations=(violation,), metadata={}, runtime_seconds=0.0)

        monkeypatch.setattr(cli_mod, "run_sweep", fake_run_sweep)
        prefix = str(tmp_path / "v_")
        code = main(["sweep", "--n", "10", "--out-prefix", prefix])
        doc = json.loads(capsys.readouterr().out)
        assert code == 3
        assert doc["violations"] == 1
        dump_path = os.path.join(str(tmp_path), "states", "violation_5.json")
        assert os.path.exists(dump_path)
        with open(dump_path) as fh:
            dumped = json.load(fh)
        assert dumped["violation"]["reasons"] == ["chsh_bound_cB"]
        assert dumped["matrix"][0][0]["re"] == pytest.approx(0.25)


class TestKernelSelection:
    def test_env_flag_forces_numpy_path(self):
        import subprocess
        import sys

        out = subprocess.run(
            [sys.executable, "-c", "from hqc.kernels import ACTIVE_KERNEL; print(ACTIVE_KERNEL)"],
            env={**os.environ, "HQC_DISABLE_NUMBA": "1"},
            capture_output=True,
            text=True,
            check=True,
        )
        assert out.stdout.strip() == "numpy"


class TestFilter:
    def test_identity_default(self, capsys, tmp_path):
        path = tmp_path / "w.json"
        serde.dump_state_json(validate_state(werner_matrix(0.5)), str(path))
        code, doc = run_cli(capsys, "filter", str(path))
        assert code == 0
        assert doc["success_probability"] == pytest.approx(1.0, abs=1e-12)
        assert doc["after"]["b"] == pytest.approx(doc["before"]["b"], abs=1e-12)

    def test_paper_filter_file(self, capsys, tmp_path):
        theta, p = math.pi / 6, 0.5
        state_path = tmp_path / "m.json"
        serde.dump_state_json(rho_m(theta, p), str(state_path))
        fa, _ = paper_filter_rho_m(theta)
        filter_path = tmp_path / "fa.json"
        filter_path.write_text(json.dumps(serde.filter_to_dict(fa)))
        code, doc = run_cli(capsys, "filter", str(state_path), "--filter-a", str(filter_path))
        assert code == 0
        assert doc["after"]["b"] == pytest.approx(doc["before"]["hb_star"], abs=1e-8)

    def test_optimize_werner_pinned(self, capsys, tmp_path):
        path = tmp_path / "w.json"
        serde.dump_state_json(validate_state(werner_matrix(0.5)), str(path))
        code, doc = run_cli(
            capsys, "filter", str(path), "--optimize", "A", "chsh", "--starts", "4", "--max-iters", "200"
        )
        assert code == 0
        assert doc["optimizer"]["value"] == pytest.approx(0.5 * math.sqrt(2), abs=1e-6)
        assert doc["optimizer"]["party"] == "A"

    def test_optimize_excludes_filter_files(self, capsys, tmp_path):
        path = tmp_path / "w.json"
        serde.dump_state_json(validate_state(werner_matrix(0.5)), str(path))
        code, doc = run_cli(
            capsys, "filter", str(path), "--optimize", "A", "chsh", "--filter-a", str(path)
        )
        assert code == 2

    def test_filtered_state_written(self, capsys, tmp_path):
        path = tmp_path / "w.json"
        out = tmp_path / "filtered.json"
        serde.dump_state_json(validate_state(werner_matrix(0.5)), str(path))
        code, doc = run_cli(capsys, "filter", str(path), "--out", str(out))
        assert code == 0
        serde.load_state_json(str(out))

    def test_bad_optimize_party(self, capsys, tmp_path):
        path = tmp_path / "w.json"
        serde.dump_state_json(validate_state(werner_matrix(0.5)), str(path))
        code, doc = run_cli(capsys, "filter", str(path), "--optimize", "C", "chsh")
        assert code == 2
        assert doc["error"]["type"] == "DomainError"
