import csv
import hashlib
import json
from dataclasses import replace

import pytest

from unlimited_sampling.errors import ParameterError
from unlimited_sampling.harness import (
    RESULT_KEYS,
    SAMPLES_HEADER,
    SWEEP_HEADER,
    ExperimentConfig,
    ExperimentResult,
    emit_report,
    run_experiment,
    sweep,
    write_sweep,
)
from unlimited_sampling.signals import CRITICAL_PERIOD

DEMO = ExperimentConfig(seed=1, lam=1 / 20, beta_g=1.0, N=3, K=512)


def digest(path):
    return hashlib.sha256(path.read_bytes()).hexdigest()


class TestConfig:
    def test_defaults(self):
        cfg = ExperimentConfig()
        assert cfg.resolved_N() == 5
        assert cfg.output_dir is None

    def test_dict_round_trip(self):
        d = DEMO.to_dict()
        assert d["lambda"] == 0.05 and "lam" not in d
        assert ExperimentConfig.from_dict(d) == DEMO

    def test_json_file(self, tmp_path):
        p = tmp_path / "cfg.json"
        p.write_text(json.dumps({"lambda": 0.1, "N": 4, "seed": 9}))
        cfg = ExperimentConfig.from_json(p)
        assert (cfg.lam, cfg.N, cfg.seed) == (0.1, 4, 9)

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"lam": 0.0},
            {"beta_g": -1.0},
            {"oversample_factor": 0.5},
            {"N": -1},
            {"N": "three"},
            {"K": 1},
        ],
    )
    def test_rejects(self, kwargs):
        with pytest.raises(ParameterError):
            ExperimentConfig(**kwargs)

    def test_unknown_key(self):
        with pytest.raises(ParameterError):
            ExperimentConfig.from_dict({"lamda": 0.1})


class TestRunExperiment:
    def test_demo(self):
        r = run_experiment(DEMO)
        assert r.success
        assert r.mse <= 1e-20
        assert (r.N_used, r.J_used) == (3, 120)
        assert len(r.kappa) == 2
        assert not r.guaranteed

    def test_threshold_above_amplitude(self):
        r = run_experiment(ExperimentConfig(lam=1.5, beta_g=1.0))
        assert r.success and r.N_used == 0
        assert r.max_abs_err == 0.0

    def test_two_hundred_fold_range(self):
        cfg = ExperimentConfig(lam=1 / 200, K=1300)
        assert cfg.resolved_N() == 8
        r = run_experiment(cfg)
        assert r.success and r.J_used == 1200

    def test_success_implies_mse_bound(self):
        for seed in range(5):
            r = run_experiment(ExperimentConfig(seed=seed))
            assert r.mse >= 0
            if r.success:
                assert r.mse <= r.max_abs_err**2

    def test_failure_is_a_result(self):
        r = run_experiment(ExperimentConfig(N=1))
        assert not r.success
        assert r.recovery_flagged and r.failure_reasons

    def test_files(self, tmp_path):
        run_experiment(ExperimentConfig(output_dir=str(tmp_path)))
        with open(tmp_path / "samples.csv") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == SAMPLES_HEADER
        assert len(rows) == 513
        res = json.loads((tmp_path / "result.json").read_text())
        assert set(RESULT_KEYS) <= set(res)
        assert res["runtime_ms"] is None
        assert json.loads((tmp_path / "config.json").read_text())["lambda"] == 0.05

    def test_record_runtime(self, tmp_path):
        cfg = ExperimentConfig(output_dir=str(tmp_path), record_runtime=True)
        run_experiment(cfg)
        assert json.loads((tmp_path / "result.json").read_text())["runtime_ms"] > 0

    def test_files_deterministic(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        run_experiment(replace(DEMO, output_dir=str(a)))
        run_experiment(replace(DEMO, output_dir=str(b)))
        # config.json records output_dir, which differs here by design
        for name in ("samples.csv", "result.json"):
            assert digest(a / name) == digest(b / name)


class TestEmitReport:
    @pytest.fixture
    def result(self):
        return run_experiment(DEMO)

    def test_json_round_trip(self, result, tmp_path):
        p = emit_report(result, "json", tmp_path / "r.json")
        assert ExperimentResult.from_dict(json.loads(p.read_text())) == result

    def test_csv_header(self, result, tmp_path):
        p = emit_report(result, "csv", tmp_path / "r.csv")
        header = p.read_text().splitlines()[0]
        assert header == (
            "mse,max_abs_err,success,N_used,J_used,kappa,runtime_ms,"
            "offset_multiple,recovery_flagged,guaranteed,failure_reasons"
        )

    def test_checksum_stable(self, tmp_path):
        paths = []
        for i in range(2):
            r = run_experiment(DEMO)
            paths.append(emit_report(r, "json", tmp_path / f"{i}.json", include_runtime=False))
        assert digest(paths[0]) == digest(paths[1])

    def test_bad_format(self, result, tmp_path):
        with pytest.raises(ParameterError):
            emit_report(result, "xml", tmp_path / "r.xml")

    def test_unwritable(self, result, tmp_path):
        with pytest.raises(OSError):
            emit_report(result, "json", tmp_path / "missing" / "r.json")


class TestSweep:
    def test_order_axis(self):
        rows = sweep(ExperimentConfig(), "N", [1, 2, 3, 4, 5, 6], 50)
        rates = {int(r["value"]): r["success_rate"] for r in rows}
        assert all(rates[n] == 1.0 for n in range(3, 7))
        assert all(r["undetected"] == 0 for r in rows)

    def test_zero_trials(self):
        assert sweep(ExperimentConfig(), "N", [1, 2], 0) == []

    def test_bad_axis(self):
        with pytest.raises(ParameterError):
            sweep(ExperimentConfig(), "frequency", [1.0], 2)

    def test_noise_axis_recorded(self):
        lam = 0.05
        rows = sweep(ExperimentConfig(N=1), "noise", [0, lam / 100, lam / 10], 10)
        rates = [r["success_rate"] for r in rows]
        assert rates == sorted(rates, reverse=True)
        assert all(r["undetected"] == 0 for r in rows)

    def test_noise_amplified_by_order(self):
        # 2**5 * lam/10 exceeds lam, so auto order cannot absorb this noise
        rows = sweep(ExperimentConfig(), "noise", [0, 0.0005, 0.005], 10)
        assert [r["success_rate"] for r in rows] == [1.0, 1.0, 0.0]
        assert rows[2]["flagged"] == 10

    @pytest.mark.parametrize("ratio", [20, 50])
    def test_lambda_ratio_axis(self, ratio):
        (row,) = sweep(ExperimentConfig(), "lambda-ratio", [ratio], 5)
        assert row["success_rate"] == 1.0

    def test_fast_rate_axis_flags_failures(self):
        rows = sweep(ExperimentConfig(N=5), "T", [CRITICAL_PERIOD, 1.5 * CRITICAL_PERIOD], 10)
        assert rows[0]["success_rate"] == 1.0
        assert all(r["undetected"] == 0 for r in rows)

    def test_parallel_matches_serial(self):
        serial = sweep(ExperimentConfig(), "N", [2, 3], 6)
        parallel = sweep(ExperimentConfig(), "N", [2, 3], 6, workers=2)
        assert serial == parallel

    def test_write(self, tmp_path):
        rows = sweep(ExperimentConfig(), "N", [3], 2)
        p = write_sweep(rows, tmp_path / "s.csv")
        lines = p.read_text().splitlines()
        assert lines[0] == ",".join(SWEEP_HEADER)
        assert lines[1].startswith("N,3,2,2,1,")
