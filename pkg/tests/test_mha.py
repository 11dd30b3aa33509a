import numpy as np
import pytest

from eala.core import EalaConfig
from eala.mha import MhaParams, mha_forward, mha_init
from eala.numerics import gaussian_matrix
from eala.oracle import exact_attention


class TestMhaInit:
    def test_shapes_and_echoed_fields(self):
        p = mha_init(12, 3, seed=9)
        assert p.heads == 3 and p.model_dim == 12 and p.seed == 9
        for w in (p.w_query, p.w_key, p.w_value, p.w_output):
            assert w.shape == (12, 12) and w.dtype == np.float64

    def test_deterministic_and_seed_sensitive(self):
        a = mha_init(8, 2, seed=4)
        b = mha_init(8, 2, seed=4)
        c = mha_init(8, 2, seed=5)
        np.testing.assert_array_equal(a.w_query, b.w_query)
        np.testing.assert_array_equal(a.w_output, b.w_output)
        assert not np.array_equal(a.w_query, c.w_query)

    def test_projections_mutually_distinct(self):
        p = mha_init(8, 2, seed=11)
        mats = [p.w_query, p.w_key, p.w_value, p.w_output]
        for i in range(4):
            for j in range(i + 1, 4):
                assert not np.array_equal(mats[i], mats[j])

    def test_entry_scale(self):
        p = mha_init(64, 4, seed=0)
        std = float(np.std(p.w_query))
        assert abs(std - 1.0 / 8.0) < 0.01

    def test_divisibility_enforced(self):
        with pytest.raises(ValueError):
            mha_init(10, 3, seed=0)
        with pytest.raises(ValueError):
            mha_init(0, 1, seed=0)
        with pytest.raises(ValueError):
            mha_init(8, 0, seed=0)


class TestMhaForward:
    def test_output_shape_matches_input(self):
        p = mha_init(16, 4, seed=1)
        x = gaussian_matrix(10, 16, 2)
        for mode in ("exact", "eala"):
            assert mha_forward(p, x, mode=mode).shape == (10, 16)

    def test_single_head_reduces_to_plain_attention(self):
        p = mha_init(8, 1, seed=3)
        x = gaussian_matrix(12, 8, 4)
        got = mha_forward(p, x, mode="exact")
        q, k, v = x @ p.w_query, x @ p.w_key, x @ p.w_value
        want = exact_attention(q, k, v).output @ p.w_output
        np.testing.assert_allclose(got, want, atol=1e-12)

    def test_multi_head_matches_manual_slices(self):
        p = mha_init(12, 3, seed=5)
        x = gaussian_matrix(9, 12, 6)
        got = mha_forward(p, x, mode="exact")
        q, k, v = x @ p.w_query, x @ p.w_key, x @ p.w_value
        cols = []
        for h in range(3):
            sl = slice(4 * h, 4 * (h + 1))
            cols.append(exact_attention(q[:, sl], k[:, sl], v[:, sl]).output)
        want = np.concatenate(cols, axis=1) @ p.w_output
        np.testing.assert_allclose(got, want, atol=1e-12)

    def test_head_slice_permutation_invariance(self):
        # swapping two head-aligned column blocks in every projection, plus
        # the matching rows of the output projection, leaves the layer's
        # function unchanged: heads do not talk to each other
        p = mha_init(8, 2, seed=7)
        x = gaussian_matrix(11, 8, 8)
        perm = np.r_[4:8, 0:4]
        swapped = MhaParams(
            heads=2,
            model_dim=8,
            w_query=p.w_query[:, perm].copy(),
            w_key=p.w_key[:, perm].copy(),
            w_value=p.w_value[:, perm].copy(),
            w_output=p.w_output[perm, :].copy(),
            seed=p.seed,
        )
        for mode in ("exact", "eala"):
            base = mha_forward(p, x, mode=mode)
            alt = mha_forward(swapped, x, mode=mode)
            np.testing.assert_allclose(alt, base, atol=1e-10)

    def test_modes_agree_at_small_projection_scale(self):
        p = mha_init(8, 2, seed=9)
        x = gaussian_matrix(16, 8, 10) * 0.05
        out_exact = mha_forward(p, x, mode="exact")
        out_eala = mha_forward(p, x, mode="eala",
                               cfg=EalaConfig(entropy_source="exact"))
        denom = float(np.max(np.abs(out_exact))) + 1e-15
        assert float(np.max(np.abs(out_exact - out_eala))) / denom < 0.05

    def test_eala_cfg_controls_kernel(self):
        p = mha_init(8, 2, seed=12)
        x = gaussian_matrix(10, 8, 13)
        out_a = mha_forward(p, x, mode="eala", cfg=EalaConfig(entropy_source="approx"))
        out_x = mha_forward(p, x, mode="eala", cfg=EalaConfig(entropy_source="exact"))
        assert not np.array_equal(out_a, out_x)

    def test_forced_paths_agree_inside_layer(self):
        p = mha_init(8, 4, seed=14)
        x = gaussian_matrix(10, 8, 15)
        out_q = mha_forward(p, x, mode="eala", cfg=EalaConfig(path="quadratic"))
        out_l = mha_forward(p, x, mode="eala", cfg=EalaConfig(path="linear"))
        denom = float(np.max(np.abs(out_q))) + 1e-15
        assert float(np.max(np.abs(out_q - out_l))) / denom <= 1e-9

    def test_input_validation(self):
        p = mha_init(8, 2, seed=16)
        with pytest.raises(ValueError):
            mha_forward(p, gaussian_matrix(5, 7, 17))
        with pytest.raises(ValueError):
            mha_forward(p, np.zeros(8))
        with pytest.raises(ValueError):
            mha_forward(p, gaussian_matrix(5, 8, 18), mode="softmax")
