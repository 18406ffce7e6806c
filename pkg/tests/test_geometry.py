import numpy as np
import pytest

from thzlink.errors import GeometryError, GratingLobeWarning
from thzlink.geometry import (
    ArrayConfig,
    GainModel,
    ae_positions,
    antenna_gain,
    beam_split_phase,
    beamforming_vector,
    equivalent_array_gain,
    fresnel_region,
    optimal_sa_spacing,
    rayleigh_distance,
    steering_vector,
)

C0 = 299792458.0


def make_cfg(m=4, n=4, q=2, sa=0.01, ae=None, f=3e11, **kw):
    ae = ae if ae is not None else C0 / f / 2
    return ArrayConfig(m=m, n=n, q=q, sa_spacing=sa, ae_spacing=ae,
                       carrier_frequency=f, **kw)


class TestPositions:
    def test_q1_single_point_at_sa_center(self):
        cfg = make_cfg(q=1)
        pos = ae_positions(cfg, (2, 3))
        assert pos.shape == (1, 3)
        np.testing.assert_allclose(pos[0], cfg.sa_center_world((2, 3)))

    def test_q2_unit_square(self):
        cfg = make_cfg(m=1, n=1, q=2, ae=1e-3, f=1e11)
        pos = ae_positions(cfg, (1, 1))
        assert pos.shape == (4, 3)
        d01 = np.linalg.norm(pos[0] - pos[1])
        d02 = np.linalg.norm(pos[0] - pos[2])
        assert d01 == pytest.approx(1e-3)
        assert d02 == pytest.approx(1e-3)
        assert np.linalg.norm(pos[0] - pos[3]) == pytest.approx(np.sqrt(2) * 1e-3)

    def test_adjacent_sa_centroid_spacing(self):
        cfg = make_cfg(sa=0.02)
        a = ae_positions(cfg, (1, 1)).mean(axis=0)
        b = ae_positions(cfg, (1, 2)).mean(axis=0)
        assert np.linalg.norm(a - b) == pytest.approx(0.02)

    def test_index_out_of_range(self):
        with pytest.raises(GeometryError):
            ae_positions(make_cfg(), (0, 1))
        with pytest.raises(GeometryError):
            ae_positions(make_cfg(), (5, 1))

    def test_grating_lobe_warning(self):
        with pytest.warns(GratingLobeWarning):
            make_cfg(ae=C0 / 3e11)  # a full wavelength


class TestSteering:
    def test_unit_norm_random_sweep(self, rng):
        for _ in range(50):
            q = int(rng.integers(1, 5))
            cfg = make_cfg(q=q, f=float(rng.uniform(1e11, 2e12)))
            phi = rng.uniform(-np.pi, np.pi)
            theta = rng.uniform(0, np.pi)
            v = steering_vector(cfg, (1, 1), phi, theta)
            assert np.linalg.norm(v.values) == pytest.approx(1.0, abs=1e-12)
            assert np.allclose(np.abs(v.values), 1.0 / q)

    def test_q1_unit_entry(self):
        v = steering_vector(make_cfg(q=1), (1, 1), 0.3, 1.2)
        assert abs(v.values[0]) == pytest.approx(1.0)

    def test_phase_scales_linearly_with_frequency(self):
        cfg = make_cfg(q=3)
        v1 = steering_vector(cfg, (2, 2), 0.4, 1.1, frequency=2e11)
        v2 = steering_vector(cfg, (2, 2), 0.4, 1.1, frequency=4e11)
        # doubled frequency doubles every phase (mod 2 pi)
        np.testing.assert_allclose(
            np.angle(v2.values * np.conj(v1.values) ** 2), 0.0, atol=1e-9
        )

    def test_beamforming_vector_same_construction(self):
        cfg = make_cfg()
        a = steering_vector(cfg, (1, 2), 0.2, 1.4)
        b = beamforming_vector(cfg, (1, 2), 0.2, 1.4)
        np.testing.assert_allclose(a.values, b.values)


class TestEquivalentGain:
    def test_on_target_magnitude(self, rng):
        for _ in range(10):
            m, n = int(rng.integers(1, 7)), int(rng.integers(1, 7))
            cfg = make_cfg(m=m, n=n, q=1, sa=float(rng.uniform(1e-3, 5e-2)))
            angles = (rng.uniform(-1.2, 1.2), rng.uniform(0.4, np.pi - 0.4))
            g = equivalent_array_gain(cfg, angles, angles)
            assert abs(g) == pytest.approx(np.sqrt(m * n), abs=1e-9)

    def test_single_sa_always_unity(self, rng):
        cfg = make_cfg(m=1, n=1)
        for _ in range(20):
            a = (rng.uniform(-np.pi, np.pi), rng.uniform(0, np.pi))
            b = (rng.uniform(-np.pi, np.pi), rng.uniform(0, np.pi))
            assert abs(equivalent_array_gain(cfg, a, b)) == pytest.approx(1.0)

    def test_bounded_by_sqrt_mn(self, rng):
        cfg = make_cfg(m=5, n=3)
        bound = np.sqrt(15) + 1e-9
        for _ in range(100):
            a = (rng.uniform(-np.pi, np.pi), rng.uniform(0, np.pi))
            b = (rng.uniform(-np.pi, np.pi), rng.uniform(0, np.pi))
            assert abs(equivalent_array_gain(cfg, a, b)) <= bound

    def test_global_phase_rotation_invariance(self, rng):
        """The pairwise phase differences drive the sum, so a common offset
        added to both phase sets leaves the response unchanged."""
        phases = rng.uniform(-np.pi, np.pi, 16)
        targets = rng.uniform(-np.pi, np.pi, 16)
        base = np.sum(np.exp(1j * (phases - targets))) / 4.0
        offset = rng.uniform(-np.pi, np.pi)
        shifted = np.sum(np.exp(1j * ((phases + offset) - (targets + offset)))) / 4.0
        assert abs(base - shifted) < 1e-12

    def test_scan_argmax_near_true_angle(self, rng):
        """Principal-plane cut scans: the argmax of the scanned gain lands on
        the grid point nearest the true angle (the angle-to-direction-cosine
        map is monotone along each cut, so nearest wins structurally)."""
        cfg = make_cfg(m=8, n=8, q=1, sa=C0 / 3e11 / 2)
        grid_deg = np.arange(-60.0, 60.5, 1.0)
        for trial in range(10):
            if trial % 2 == 0:  # azimuth cut at broadside elevation
                true_phi = float(rng.uniform(-59.0, 59.0))
                true = (np.deg2rad(true_phi), np.pi / 2)
                gains = [
                    abs(equivalent_array_gain(cfg, true, (np.deg2rad(p), np.pi / 2)))
                    for p in grid_deg
                ]
                assert np.argmax(gains) == np.argmin(np.abs(grid_deg - true_phi))
            else:  # elevation cut in the phi = 0 plane
                true_th = float(rng.uniform(-59.0, 59.0))
                true = (0.0, np.pi / 2 + np.deg2rad(true_th))
                gains = [
                    abs(
                        equivalent_array_gain(
                            cfg, true, (0.0, np.pi / 2 + np.deg2rad(t))
                        )
                    )
                    for t in grid_deg
                ]
                assert np.argmax(gains) == np.argmin(np.abs(grid_deg - true_th))


class TestBeamSplit:
    def test_identity_at_center(self):
        assert beam_split_phase(1.25, 3e11, 3e11) == pytest.approx(1.25)

    def test_doubling(self):
        assert beam_split_phase(1.25, 6e11, 3e11) == pytest.approx(2.5)

    def test_gain_loss_off_center_frequency(self):
        cfg = make_cfg(m=6, n=6, q=1, sa=5e-3)
        angles = (0.35, 1.3)
        matched = abs(equivalent_array_gain(cfg, angles, angles))
        assert matched == pytest.approx(6.0, abs=1e-9)
        for f_k in np.linspace(2.4e11, 3.6e11, 13):
            split = abs(
                equivalent_array_gain(
                    cfg, angles, angles, frequency=f_k, weight_frequency=3e11
                )
            )
            assert split <= matched + 1e-9


class TestAntennaGain:
    def test_paper_hpbw_value(self):
        hpbw = np.deg2rad(27.7)
        model = GainModel(mode="approximate", hpbw_az=hpbw, hpbw_el=hpbw)
        assert model.peak_gain_dbi() == pytest.approx(17.3, abs=0.05)

    def test_outside_sector_is_zero(self):
        model = GainModel(mode="sector", g0=10.0, phi_bounds=(-0.1, 0.1),
                          theta_bounds=(1.4, 1.8))
        assert antenna_gain(model, 0.0, 1.5) == pytest.approx(np.sqrt(10.0))
        assert antenna_gain(model, 0.5, 1.5) == 0.0
        assert antenna_gain(model, 0.0, 0.5) == 0.0

    def test_full_solid_angle_is_omnidirectional(self):
        model = GainModel(mode="approximate", hpbw_az=2 * np.pi, hpbw_el=2.0)
        assert model.g0 == pytest.approx(1.0)
        assert model.peak_gain_dbi() == pytest.approx(0.0, abs=1e-9)

    def test_fixed_mode_constant(self):
        model = GainModel(mode="fixed", g0=4.0)
        assert antenna_gain(model, 2.0, 0.3) == pytest.approx(2.0)


class TestSpacingRules:
    def test_rayleigh_substitution(self):
        assert rayleigh_distance(4, 4, 1e-3, 1e-3, 1e-3) == pytest.approx(4e-3)

    def test_rayleigh_wavelength_scaling(self):
        d1 = rayleigh_distance(8, 4, 2e-3, 1e-3, 1e-3)
        d2 = rayleigh_distance(8, 4, 2e-3, 1e-3, 2e-3)
        assert d1 == pytest.approx(2 * d2)

    def test_optimal_spacing_value(self):
        assert optimal_sa_spacing(1, 1.0, 1e-3, 100) == pytest.approx(
            3.1623e-3, rel=1e-4
        )

    def test_even_z_rejected(self):
        with pytest.raises(ValueError, match="odd"):
            optimal_sa_spacing(2, 1.0, 1e-3, 100)

    def test_fresnel_boundaries(self):
        d_ap, lam = 0.1, 1e-3
        upper = 2 * d_ap**2 / lam
        lower = 0.62 * np.sqrt(d_ap**3 / lam)
        assert fresnel_region(upper, d_ap, lam) == "far-field"
        assert fresnel_region(lower, d_ap, lam) == "fresnel"
        assert fresnel_region(lower * 0.99, d_ap, lam) == "near-reactive"

    def test_paper_far_field_boundary_at_point_six_thz(self):
        lam = C0 / 0.6e12
        upper = 2 * 0.1**2 / lam
        assert upper == pytest.approx(40.0, abs=0.1)
        assert fresnel_region(41.0, 0.1, lam) == "far-field"
        assert fresnel_region(39.0, 0.1, lam) == "fresnel"

    def test_fresnel_monotone_in_distance(self):
        order = {"near-reactive": 0, "fresnel": 1, "far-field": 2}
        labels = [fresnel_region(d, 0.1, 1e-3) for d in np.geomspace(1e-3, 100, 60)]
        ranks = [order[l] for l in labels]
        assert ranks == sorted(ranks)
