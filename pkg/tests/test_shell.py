import numpy as np
import numpy.testing as npt
import pytest
from hypothesis import given, strategies as st

import oystergen as og
from oystergen.rng import Rng

from oracles import polygon_is_simple, shoelace_area

ZERO_NOISE = dict(mu1=0.0, mu2=0.0, sigma1=0.0, sigma2=0.0)


class TestShellParams:
    def test_defaults_valid(self):
        p = og.ShellParams()
        assert p.layer_range == (15, 20)

    @pytest.mark.parametrize("kwargs", [
        dict(sigma1=-1.0),
        dict(sigma2=-0.1),
        dict(growth_rate=0.0),
        dict(growth_rate=1.5),
        dict(layer_depth=0.0),
        dict(layer_range=(0, 5)),
        dict(layer_range=(7, 3)),
        dict(noise_scale=0.0),
    ])
    def test_invalid_params_raise(self, kwargs):
        with pytest.raises(ValueError):
            og.ShellParams(**kwargs)


class TestCanonicalOutline:
    def test_deterministic(self):
        a = og.canonical_base_outline()
        b = og.canonical_base_outline()
        npt.assert_array_equal(a.top.control_points, b.top.control_points)
        npt.assert_array_equal(a.bottom.knots, b.bottom.knots)

    def test_shared_end_points(self):
        o = og.canonical_base_outline()
        npt.assert_array_equal(o.top.control_points[0], o.bottom.control_points[0])
        npt.assert_array_equal(o.top.control_points[-1], o.bottom.control_points[-1])

    def test_control_polygon_simple(self):
        o = og.canonical_base_outline()
        polygon = np.vstack([o.top.control_points,
                             o.bottom.control_points[::-1][1:-1]])
        assert polygon_is_simple(polygon)

    def test_enclosed_area_in_band(self):
        o = og.canonical_base_outline()
        top = og.sample_curve(o.top, 1024)
        bottom = og.sample_curve(o.bottom, 1024)
        ring = np.vstack([top, bottom[::-1][1:-1]])
        area = shoelace_area(ring)
        assert 1e5 <= area <= 6e5

    def test_counterclockwise(self):
        o = og.canonical_base_outline()
        ring = np.vstack([og.sample_curve(o.top, 64),
                          og.sample_curve(o.bottom, 64)[::-1][1:-1]])
        assert shoelace_area(ring) > 0


class TestPerturbCurve:
    def test_zero_noise_identity(self):
        o = og.canonical_base_outline()
        params = og.ShellParams(**ZERO_NOISE)
        out = og.perturb_curve(o.top, Rng(1), params)
        npt.assert_array_equal(out.control_points, o.top.control_points)
        npt.assert_array_equal(out.knots, o.top.knots)

    def test_pure_mean_shift(self):
        o = og.canonical_base_outline()
        params = og.ShellParams(mu1=150.0, mu2=0.0, sigma1=0.0, sigma2=0.0,
                                noise_scale=10.0)
        out = og.perturb_curve(o.top, Rng(1), params)
        npt.assert_array_equal(out.control_points, o.top.control_points + 15.0)
        npt.assert_array_equal(out.knots, o.top.knots)

    def test_noise_std_matches_sigma(self):
        # 10k control-coordinate deltas; sample std within 3% of sigma1/scale.
        o = og.canonical_base_outline()
        params = og.ShellParams(mu1=0.0, mu2=0.0, sigma1=150.0, sigma2=0.0,
                                noise_scale=10.0)
        rng = Rng(424242)
        deltas = []
        while len(deltas) < 10000:
            out = og.perturb_curve(o.top, rng, params)
            deltas.extend((out.control_points - o.top.control_points).ravel())
        sd = float(np.std(deltas[:10000]))
        assert abs(sd - 15.0) / 15.0 < 0.03

    def test_knots_stay_valid_under_heavy_noise(self):
        o = og.canonical_base_outline()
        rng = Rng(9)
        params = og.ShellParams(mu2=5000.0, sigma2=5000.0)
        for _ in range(50):
            out = og.perturb_curve(o.top, rng, params)
            n = out.control_points.shape[0] - 1
            assert og.validate_knots(out.knots, n, out.degree).ok
            # clamp multiplicities intact
            npt.assert_array_equal(out.knots[:4], o.top.knots[:4])
            npt.assert_array_equal(out.knots[-4:], o.top.knots[-4:])

    def test_outline_join_survives(self):
        o = og.canonical_base_outline()
        out = og.perturb_outline(o, Rng(77), og.ShellParams())
        npt.assert_array_equal(out.top.control_points[0], out.bottom.control_points[0])
        npt.assert_array_equal(out.top.control_points[-1], out.bottom.control_points[-1])


class TestBuildLayer:
    def test_r_one_zero_noise_keeps_outline(self):
        o = og.canonical_base_outline()
        params = og.ShellParams(growth_rate=1.0, layer_depth=2.5, **ZERO_NOISE)
        base = np.vstack([og.sample_curve(o.top, 16),
                          og.sample_curve(o.bottom, 16)[::-1][1:-1]])
        for alpha in (1, 3, 7):
            ring = og.build_layer(o, alpha, 16, Rng(0), params)
            npt.assert_allclose(ring.points[:, :2], base, atol=1e-12)
            assert np.all(ring.points[:, 2] == alpha * 2.5)

    def test_in_growth_scaling_exact(self):
        o = og.canonical_base_outline()
        params = og.ShellParams(growth_rate=0.9, **ZERO_NOISE)
        base = og.build_layer(o, 1, 16, Rng(0), og.ShellParams(growth_rate=1.0, **ZERO_NOISE))
        ring = og.build_layer(o, 2, 16, Rng(0), params)
        c_base = base.points[:, :2].mean(axis=0)
        c_ring = ring.points[:, :2].mean(axis=0)
        d_base = np.linalg.norm(base.points[:, :2] - c_base, axis=1)
        d_ring = np.linalg.norm(ring.points[:, :2] - c_ring, axis=1)
        npt.assert_allclose(d_ring, 0.81 * d_base, atol=1e-9)

    def test_point_count(self):
        o = og.canonical_base_outline()
        ring = og.build_layer(o, 1, 20, Rng(4), og.ShellParams())
        assert ring.points.shape == (38, 3)

    def test_preconditions(self):
        o = og.canonical_base_outline()
        with pytest.raises(ValueError):
            og.build_layer(o, 0, 16, Rng(0), og.ShellParams())
        with pytest.raises(ValueError):
            og.build_layer(o, 1, 7, Rng(0), og.ShellParams())


class TestGenerateShell:
    def test_deterministic(self):
        params = og.ShellParams(seed=123)
        a = og.generate_shell(params, 12)
        b = og.generate_shell(params, 12)
        assert len(a) == len(b)
        for ra, rb in zip(a, b):
            npt.assert_array_equal(ra.points, rb.points)

    def test_depth_law_exact(self):
        params = og.ShellParams(seed=5, layer_depth=6.0)
        for ring in og.generate_shell(params, 12):
            assert np.all(ring.points[:, 2] == ring.alpha * 6.0)

    def test_layer_count_matches_generate(self):
        for seed in range(80):
            params = og.ShellParams(seed=seed)
            assert len(og.generate_shell(params, 8)) == og.layer_count(params)

    def test_layer_count_range_and_uniformity(self):
        counts = {}
        for seed in range(10000):
            n = og.layer_count(og.ShellParams(seed=seed))
            counts[n] = counts.get(n, 0) + 1
        assert set(counts) == set(range(15, 21))
        for n, c in counts.items():
            assert abs(c / 10000 - 1 / 6) < 0.02

    def test_zero_noise_shells_scale_by_r_alpha(self):
        params = og.ShellParams(growth_rate=0.95, seed=8, **ZERO_NOISE)
        rings = og.generate_shell(params, 12)
        o = og.canonical_base_outline()
        base = np.vstack([og.sample_curve(o.top, 12),
                          og.sample_curve(o.bottom, 12)[::-1][1:-1]])
        c = base.mean(axis=0)
        base_max = np.linalg.norm(base - c, axis=1).max()
        for ring in rings:
            cc = ring.points[:, :2].mean(axis=0)
            got = np.linalg.norm(ring.points[:, :2] - cc, axis=1).max()
            assert abs(got - 0.95 ** ring.alpha * base_max) < 1e-9


class TestRingRoughness:
    def test_circle_is_zero(self):
        theta = np.linspace(0, 2 * np.pi, 64, endpoint=False)
        pts = np.column_stack([np.cos(theta), np.sin(theta), np.zeros(64)])
        ring = og.LayerRing(alpha=1, points=pts)
        assert og.ring_roughness(ring) < 1e-9

    def test_ellipse_matches_dense_sampling(self):
        def ellipse_ring(count):
            theta = np.linspace(0, 2 * np.pi, count, endpoint=False)
            pts = np.column_stack([2 * np.cos(theta), np.sin(theta), np.zeros(count)])
            return og.LayerRing(alpha=1, points=pts)

        dense = og.ring_roughness(ellipse_ring(4096))
        assert dense > 0.1
        assert abs(og.ring_roughness(ellipse_ring(512)) - dense) < 1e-3

    def test_too_few_points(self):
        pts = np.zeros((5, 3))
        with pytest.raises(ValueError):
            og.ring_roughness(og.LayerRing(alpha=1, points=pts))

    def test_monotone_in_sigma1(self):
        # Same seeds, only sigma1 differs: rougher noise, rougher rings.
        def mean_roughness(sigma):
            vals = []
            for seed in range(100):
                params = og.ShellParams(sigma1=sigma, seed=seed,
                                        layer_range=(3, 5))
                vals.extend(og.ring_roughness(r)
                            for r in og.generate_shell(params, 16))
            return float(np.mean(vals))

        assert mean_roughness(250.0) > mean_roughness(50.0)


@given(st.integers(min_value=0, max_value=2**31))
def test_property_rings_share_z_and_close(seed):
    params = og.ShellParams(seed=seed, layer_range=(2, 4))
    rings = og.generate_shell(params, 8)
    for ring in rings:
        zs = ring.points[:, 2]
        assert np.all(zs == zs[0])
        assert ring.points.shape[0] == 14
