import json

import numpy as np
import pytest

from gssdecon.cli import main
from tests.conftest import draw_contaminated


def write_w_csv(path, w):
    path.write_text("w\n" + "\n".join(repr(float(v)) for v in w) + "\n")


@pytest.fixture
def sample_csv(tmp_path):
    w, _, err = draw_contaminated("pi2", "laplace", 0.2, 250, 100)
    path = tmp_path / "w.csv"
    write_w_csv(path, w)
    return path, err


class TestDeconvolve:
    def test_happy_path(self, sample_csv, tmp_path):
        path, err = sample_csv
        prefix = tmp_path / "out"
        rc = main([
            "deconvolve", "--input", str(path), "--error", "laplace",
            "--error-var", repr(err.variance), "--bandwidth", "mise",
            "--select", "phase", "--output-prefix", str(prefix),
        ])
        assert rc == 0
        report = json.loads((tmp_path / "out_report.json").read_text())
        assert report["candidates"], "candidate list must be present"
        for cand in report["candidates"]:
            assert set(cand) >= {"xi", "omega", "d_value", "bandwidth", "score"}
        dens = (tmp_path / "out_density.csv").read_text().splitlines()
        assert dens[0] == "x,f_gss"
        assert len(dens) == 1 + report["config"]["grid_points"]
        # report JSON round-trips losslessly
        assert json.loads(json.dumps(report)) == report

    def test_zero_error_variance_degenerates(self, tmp_path, rng):
        w = rng.normal(size=200)
        path = tmp_path / "w.csv"
        write_w_csv(path, w)
        rc = main([
            "deconvolve", "--input", str(path), "--error", "normal",
            "--error-var", "0.0", "--output-prefix", str(tmp_path / "o"),
        ])
        assert rc == 0

    def test_with_np_column(self, sample_csv, tmp_path):
        path, err = sample_csv
        rc = main([
            "deconvolve", "--input", str(path), "--error", "laplace",
            "--error-var", repr(err.variance), "--with-np",
            "--output-prefix", str(tmp_path / "c"),
        ])
        assert rc == 0
        header = (tmp_path / "c_density.csv").read_text().splitlines()[0]
        assert header == "x,f_gss,f_np"

    def test_malformed_csv_exits_2(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("w\n1.0\nnot-a-number\n")
        rc = main(["deconvolve", "--input", str(bad), "--error", "normal", "--error-var", "1.0",
                   "--output-prefix", str(tmp_path / "x")])
        assert rc == 2
        assert not (tmp_path / "x_report.json").exists()

    def test_bad_moments_exits_4(self, sample_csv, tmp_path):
        path, err = sample_csv
        rc = main(["deconvolve", "--input", str(path), "--error", "laplace",
                   "--error-var", repr(err.variance), "--moments", "9",
                   "--output-prefix", str(tmp_path / "x")])
        assert rc == 4

    def test_deterministic_outputs(self, sample_csv, tmp_path):
        path, err = sample_csv
        args = ["deconvolve", "--input", str(path), "--error", "laplace",
                "--error-var", repr(err.variance), "--seed", "7"]
        assert main(args + ["--output-prefix", str(tmp_path / "a")]) == 0
        assert main(args + ["--output-prefix", str(tmp_path / "b")]) == 0
        for suffix in ("_report.json", "_density.csv"):
            one = (tmp_path / f"a{suffix}").read_bytes()
            two = (tmp_path / f"b{suffix}").read_bytes()
            # the report embeds the prefix-dependent file name; normalize it
            assert one.replace(b"a_density", b"_density") == two.replace(b"b_density", b"_density")


class TestSimulate:
    def test_tiny_run_and_determinism(self, tmp_path):
        config = {
            "table": "table1",
            "configs": [{"skew": "pi1", "error_family": "normal", "nsr": 0.2, "n": 60, "replicates": 2, "seed": 3}],
            "m_values": [2],
        }
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps(config))
        rc = main(["simulate", "--config", str(cfg_path), "--output-prefix", str(tmp_path / "s")])
        assert rc == 0
        first = (tmp_path / "s_00_summary.json").read_bytes(), (tmp_path / "s_00_replicates.csv").read_bytes()
        rc = main(["simulate", "--config", str(cfg_path), "--output-prefix", str(tmp_path / "s")])
        assert rc == 0
        second = (tmp_path / "s_00_summary.json").read_bytes(), (tmp_path / "s_00_replicates.csv").read_bytes()
        assert first == second

    def test_invalid_config_exits_4(self, tmp_path):
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps({"table": "table9", "configs": []}))
        assert main(["simulate", "--config", str(cfg_path), "--output-prefix", str(tmp_path / "s")]) == 4
        cfg_path.write_text("{not json")
        assert main(["simulate", "--config", str(cfg_path), "--output-prefix", str(tmp_path / "s")]) == 4

    def test_unknown_config_field_exits_4(self, tmp_path):
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps({"table": "table1", "configs": [{"skew": "pi0", "bogus": 1}]}))
        assert main(["simulate", "--config", str(cfg_path), "--output-prefix", str(tmp_path / "s")]) == 4


class TestIngest:
    def test_paired_mode(self, tmp_path, rng):
        x = rng.normal(200.0, 30.0, size=120)
        w1 = x + 10.0 * rng.standard_normal(120)
        w2 = 59.5 + 0.68 * (x + 10.0 * rng.standard_normal(120))
        path = tmp_path / "pairs.csv"
        path.write_text("w1,w2\n" + "\n".join(f"{float(a)!r},{float(b)!r}" for a, b in zip(w1, w2)) + "\n")
        rc = main(["ingest", "--input", str(path), "--mode", "paired", "--output-prefix", str(tmp_path / "p")])
        assert rc == 0
        est = json.loads((tmp_path / "p_estimates.json").read_text())
        assert {"mu_hat", "sigma_hat", "sigma_eps2", "nsr", "n"} <= set(est)
        series = (tmp_path / "p_w.csv").read_text().splitlines()
        assert series[0] == "w" and len(series) == 121

    def test_replicate_mode_four_columns(self, tmp_path, rng):
        x = rng.normal(4.4, 0.2, size=200)
        reps = 50.0 + np.exp(x[:, None] + 0.1 * rng.standard_normal((200, 4)))
        path = tmp_path / "reps.csv"
        path.write_text("a,b,c,d\n" + "\n".join(",".join(repr(float(v)) for v in row) for row in reps) + "\n")
        rc = main(["ingest", "--input", str(path), "--mode", "replicate", "--output-prefix", str(tmp_path / "r")])
        assert rc == 0
        est = json.loads((tmp_path / "r_estimates.json").read_text())
        assert est["sigma_x"] > 0 and est["sigma_u"] > 0

    def test_wrong_columns_exit_4(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("a,b,c\n1.0,2.0,3.0\n4.0,5.0,6.0\n7.0,8.0,9.0\n")
        assert main(["ingest", "--input", str(path), "--mode", "replicate", "--output-prefix", str(tmp_path / "x")]) == 4
