import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

from fracdev.harness import (
    ExperimentConfig,
    LlnRow,
    builtin_config,
    decreasing_in_t,
    draw_scaled,
    run_lln_decay,
    run_md_tail,
    run_scaled_mean,
    run_weak_convergence,
    wilson_interval,
)
from fracdev.jumps import Degenerate
from fracdev.output import format_rows, write_output


def small_config(**overrides):
    d = {
        "nu": 0.5,
        "lambda": 1.0,
        "jump": {"kind": "deg", "params": [1.0]},
        "seed": 5,
        "n_samples": 4000,
        "t_grid": [4.0, 16.0],
        "beta": 0.5,
        "x_grid": [-0.5, 0.0, 1.0],
        "theta_grid": [0.1, -0.1, 0.0],
    }
    d.update(overrides)
    return ExperimentConfig.from_dict(d, workers=overrides.pop("workers", None))


class TestConfig:
    def test_round_trip(self, tmp_path):
        cfg = small_config()
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(cfg.to_dict()))
        assert ExperimentConfig.load(path) == cfg
        assert cfg.jump == Degenerate(1.0)
        assert cfg.alpha == 0.5 and cfg.mu == 1.0

    @pytest.mark.parametrize("name", ["weak_mu0", "weak_mu1", "md_tail", "lln", "lln_nu1"])
    def test_builtins_load(self, name):
        cfg = ExperimentConfig.load(builtin_config(name))
        assert cfg.n_samples == 1_000_000

    def test_unknown_builtin(self):
        with pytest.raises(FileNotFoundError):
            builtin_config("nope")

    @pytest.mark.parametrize(
        "override",
        [{"n_samples": 0}, {"t_grid": []}, {"t_grid": [-1.0]}, {"beta": 1.0}, {"workers": 0}],
    )
    def test_validation(self, override):
        with pytest.raises(ValueError):
            small_config(**override)

    def test_missing_key(self):
        d = small_config().to_dict()
        del d["seed"]
        with pytest.raises(ValueError, match="seed"):
            ExperimentConfig.from_dict(d)

    def test_workers_env(self, monkeypatch):
        monkeypatch.setenv("FRACDEV_WORKERS", "3")
        assert small_config().workers == 3
        assert ExperimentConfig.from_dict(small_config().to_dict(), workers=2).workers == 2


class TestWilson:
    @given(st.integers(1, 10_000), st.data())
    def test_brackets_estimate(self, n, data):
        hits = data.draw(st.integers(0, n))
        lo, hi = wilson_interval(hits, n)
        assert 0.0 <= lo <= hits / n <= hi <= 1.0

    def test_reference_value(self):
        # Wilson score interval from the scipy binomial test
        ci = stats.binomtest(37, 200).proportion_ci(0.95, method="wilson")
        lo, hi = wilson_interval(37, 200)
        assert lo == pytest.approx(ci.low, rel=1e-9)
        assert hi == pytest.approx(ci.high, rel=1e-9)

    def test_zero_hits(self):
        lo, hi = wilson_interval(0, 10**6)
        assert lo == 0.0 and 0 < hi < 1e-5


class TestDraws:
    def test_worker_count_changes_stream_but_not_law(self):
        one = draw_scaled(small_config(n_samples=20_000), 16.0, 1.0)
        four = draw_scaled(small_config(n_samples=20_000, workers=4), 16.0, 1.0)
        assert one.size == four.size == 20_000
        assert not np.array_equal(one, four)
        assert stats.ks_2samp(one, four).pvalue > 1e-4

    def test_deterministic_per_worker_count(self):
        cfg = small_config(workers=3)
        assert np.array_equal(draw_scaled(cfg, 4.0, 2.0), draw_scaled(cfg, 4.0, 2.0))


class TestExperiments:
    def test_weak_rows(self):
        rows = run_weak_convergence(small_config())
        assert [r.theta for r in rows] == [-0.1, 0.0, 0.1]
        zero = rows[1]
        assert zero.empirical_mgf == 1.0 and zero.limit_mgf == 1.0 and zero.z_score == 0.0
        for r in rows:
            if r.theta != 0:
                assert r.std_err > 0
                assert r.z_score == pytest.approx((r.empirical_mgf - r.limit_mgf) / r.std_err)

    def test_weak_overflow_flagged(self):
        rows = run_weak_convergence(small_config(theta_grid=[800.0]))
        assert rows[0].overflow

    def test_weak_needs_theta(self):
        with pytest.raises(ValueError):
            run_weak_convergence(small_config(theta_grid=[]))

    def test_md_rows(self):
        rows = run_md_tail(small_config())
        assert len(rows) == 6
        for r in rows:
            assert 0.0 <= r.ci_low <= r.p_hat <= r.ci_high <= 1.0
            assert r.a_t == pytest.approx(r.t**-0.5)
            assert r.tail == ("lower" if r.x < 0 else "upper")
            if r.hits:
                assert r.empirical_rate == pytest.approx(-r.a_t * math.log(r.p_hat)) or r.p_hat == 1
                assert r.empirical_rate >= 0
            else:
                assert r.empirical_rate is None
        assert {r.model_rate for r in rows if r.x == -0.5} == {math.inf}
        # with a degenerate jump the count is >= 0, so every draw sits in the upper tail of 0
        assert all(r.p_hat == 1.0 and r.empirical_rate == 0.0 for r in rows if r.x == 0)

    def test_lln_rows_and_large_eps(self):
        rows = run_lln_decay(small_config(x_grid=[0.5, 1e6]))
        assert all(r.center == 0.0 for r in rows)
        assert all(r.hits == 0 for r in rows if r.eps == 1e6)

    def test_lln_classical_centre(self):
        cfg = small_config(nu=1.0, **{"lambda": 2.0}, x_grid=[0.5])
        assert all(r.center == 2.0 for r in run_lln_decay(cfg))

    def test_scaled_mean(self):
        row = run_scaled_mean(small_config(n_samples=20_000, t_grid=[100.0]))
        assert row.limit_mean == pytest.approx(1 / math.gamma(1.5))
        assert abs(row.z_score) < 5


class TestTrend:
    def row(self, t, eps, p):
        return LlnRow(t, eps, 0.0, 10, 0, p, 0.0, 1.0)

    def test_decreasing(self):
        rows = [self.row(1, 0.5, 0.3), self.row(2, 0.5, 0.1), self.row(3, 0.5, 0.1), self.row(1, 1, 0.2), self.row(2, 1, 0.4)]
        assert decreasing_in_t(rows, "eps", "p_hat") == {0.5: True, 1: False}
        assert decreasing_in_t(rows, "eps", "p_hat", strict=True)[0.5] is False

    def test_none_handling(self):
        rows = [self.row(1, 0.5, None), self.row(2, 0.5, None), self.row(1, 1, 0.2), self.row(2, 1, None)]
        assert decreasing_in_t(rows, "eps", "p_hat") == {1: False}


class TestOutput:
    rows = [{"a": 1.5, "b": None, "c": math.inf, "d": "x,y"}, {"a": math.nan, "b": True, "c": -math.inf, "d": 'q"'}]

    def test_csv(self):
        text = format_rows(self.rows, "csv")
        assert text == 'a,b,c,d\r\n1.5,,inf,"x,y"\r\n,true,-inf,"q"""\r\n'

    def test_jsonl(self):
        lines = format_rows(self.rows, "jsonl").splitlines()
        assert json.loads(lines[0]) == {"a": 1.5, "b": None, "c": "inf", "d": "x,y"}
        assert json.loads(lines[1])["a"] is None

    def test_column_selection_and_file(self, tmp_path):
        path = tmp_path / "o.csv"
        write_output(self.rows, "csv", path, columns=["d", "a"])
        assert path.read_bytes().startswith(b"d,a\r\n")

    def test_unknown_format(self):
        with pytest.raises(ValueError):
            format_rows(self.rows, "xml")
