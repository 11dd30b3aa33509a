import pytest

from eala.bench import (DEFAULT_MEM_LIMIT_BYTES, MODES, BenchRecord,
                        BenchResourceError, allocation_model, bench_sweep,
                        fit_loglog_slope, records_to_csv)


class TestAllocationModel:
    def test_exact_classes(self):
        m = allocation_model("exact", 100, 8)
        assert m == {"n2": 8 * 100 * 100, "nc": 8 * 4 * 100 * 8, "c2": 0,
                     "n": 8 * 100, "c": 0}

    def test_quadratic_keeps_one_square_buffer(self):
        m = allocation_model("eala-quadratic", 64, 16)
        assert m["n2"] == 8 * 64 * 64
        assert m["c2"] == 8 * 16 * 16

    def test_linear_has_no_square_class(self):
        for n in (1, 64, 4096, 1 << 16):
            m = allocation_model("eala-linear", n, 32)
            assert m["n2"] == 0
            assert m["c2"] == 8 * 2 * 32 * 32

    def test_square_class_is_exactly_one_buffer(self):
        # both n^2 modes hold a single n*n float64 buffer at peak
        for mode in ("exact", "eala-quadratic"):
            for n in (2, 33, 1024):
                assert allocation_model(mode, n, 4)["n2"] == 8 * n * n

    def test_linear_peak_is_subquadratic(self):
        n = 1 << 16
        lin = sum(allocation_model("eala-linear", n, 64).values())
        sq = sum(allocation_model("exact", n, 64).values())
        assert lin < sq / 100

    def test_keys_and_nonnegativity(self):
        for mode in MODES:
            m = allocation_model(mode, 5, 3)
            assert list(m.keys()) == ["n2", "nc", "c2", "n", "c"]
            assert all(isinstance(v, int) and v >= 0 for v in m.values())

    def test_validation(self):
        with pytest.raises(ValueError):
            allocation_model("softmax", 4, 4)
        with pytest.raises(ValueError):
            allocation_model("exact", 0, 4)
        with pytest.raises(ValueError):
            allocation_model("exact", 4, 0)


class TestBenchSweep:
    def test_smoke_run_fields(self):
        recs = bench_sweep("eala-linear", [32, 64, 128], c=8, repeats=2, seed=1)
        assert [r.n for r in recs] == [32, 64, 128]
        for r in recs:
            assert r.mode == "eala-linear" and r.c == 8
            assert r.wall_time > 0.0
            assert r.analytic_peak_bytes == sum(
                allocation_model("eala-linear", r.n, 8).values())

    def test_exact_mode_runs(self):
        recs = bench_sweep("exact", [16, 32], c=4, repeats=1, seed=0)
        assert len(recs) == 2 and all(r.wall_time > 0.0 for r in recs)

    def test_ascending_n_enforced(self):
        with pytest.raises(ValueError):
            bench_sweep("exact", [64, 32], c=4)
        with pytest.raises(ValueError):
            bench_sweep("exact", [32, 32], c=4)
        with pytest.raises(ValueError):
            bench_sweep("exact", [], c=4)

    def test_repeats_validated(self):
        with pytest.raises(ValueError):
            bench_sweep("exact", [16], c=4, repeats=0)

    def test_mode_validated(self):
        with pytest.raises(ValueError):
            bench_sweep("fast", [16], c=4)

    def test_memory_budget_refusal_names_size(self):
        with pytest.raises(BenchResourceError, match="n=65536"):
            bench_sweep("exact", [65536], c=4, mem_limit_bytes=1 << 30)

    def test_budget_checked_before_any_allocation(self):
        # the first size already busts the budget; nothing should run
        with pytest.raises(BenchResourceError):
            bench_sweep("exact", [1 << 17, 1 << 18], c=4,
                        mem_limit_bytes=1 << 20)

    def test_linear_mode_passes_budget_where_exact_refuses(self):
        n = 1 << 16
        limit = 256 << 20
        with pytest.raises(BenchResourceError):
            bench_sweep("exact", [n], c=4, mem_limit_bytes=limit, repeats=1)
        recs = bench_sweep("eala-linear", [n], c=4, mem_limit_bytes=limit,
                           repeats=1)
        assert recs[0].analytic_peak_bytes <= limit

    def test_default_budget_is_4gib(self):
        assert DEFAULT_MEM_LIMIT_BYTES == 4 << 30


class TestFitLoglogSlope:
    def fake(self, ns, exponent, scale=1e-6):
        return [BenchRecord("exact", n, 4, scale * n ** exponent, 0)
                for n in ns]

    def test_recovers_exact_power_laws(self):
        for expo in (1.0, 2.0, 3.0):
            slope = fit_loglog_slope(self.fake([64, 128, 256, 512], expo))
            assert abs(slope - expo) <= 1e-9

    def test_constant_times_give_zero_slope(self):
        slope = fit_loglog_slope(self.fake([64, 128, 256], 0.0))
        assert abs(slope) <= 1e-9

    def test_needs_three_distinct_sizes(self):
        with pytest.raises(ValueError):
            fit_loglog_slope(self.fake([64, 128], 2.0))
        recs = self.fake([64, 64, 64], 2.0)
        with pytest.raises(ValueError):
            fit_loglog_slope(recs)

    def test_rejects_nonpositive_times(self):
        recs = self.fake([64, 128, 256], 2.0)
        recs[1].wall_time = 0.0
        with pytest.raises(ValueError):
            fit_loglog_slope(recs)


class TestRecordsToCsv:
    def test_schema_and_values(self):
        recs = [BenchRecord("exact", 64, 8, 0.125, 40960),
                BenchRecord("eala-linear", 128, 8, 0.0625, 53248)]
        lines = records_to_csv(recs).split("\n")
        assert lines[0] == "mode,n,c,wall_time,analytic_peak_bytes"
        assert lines[1] == "exact,64,8,0.125,40960"
        assert lines[2] == "eala-linear,128,8,0.0625,53248"
        assert lines[3] == ""

    def test_float_cells_roundtrip(self):
        t = 0.0123456789012345678
        line = records_to_csv([BenchRecord("exact", 4, 4, t, 0)]).split("\n")[1]
        assert float(line.split(",")[3]) == t
