"""Element-level tests: actions, inverses, norm behaviour, detection."""

import math

import numpy as np
import pytest

from ifmsim import core
from ifmsim.core import (
    POL_H,
    POL_V,
    DetectionDistribution,
    DetectorMap,
    PhotonState,
    PixelPattern,
    basis_index,
    basis_state,
    make_initial_state,
    space_dim,
)


def random_state(rng, d, normalized=True):
    v = rng.normal(size=space_dim(d)) + 1j * rng.normal(size=space_dim(d))
    if normalized:
        v /= np.linalg.norm(v)
    return PhotonState.from_flat(d, v)


def all_unitaries(d, theta=0.3):
    return [
        core.beam_splitter(d),
        core.beam_splitter(d, "symmetric"),
        core.polarising_beam_splitter(d),
        core.polarisation_rotator(theta, d),
        core.oam_sorter(d),
        core.oam_sorter(d, inverse=True),
        core.oam_converter(d),
        core.oam_converter(d, inverse=True),
        core.pockels_flip(d),
        core.mirror_reflect("retro", d),
        core.mirror_reflect("plain", d),
        core.arm_mirrors(d),
    ]


class TestInitialState:
    def test_single_pixel_zeno_input(self):
        state = make_initial_state(1, "zeno-single-pixel")
        assert state.amplitude(POL_H, 0, 1) == 1.0
        assert np.count_nonzero(state.amps) == 1

    def test_multipixel_zeno_input(self):
        state = make_initial_state(4, "multipixel-zeno")
        for ell in range(4):
            assert state.amplitude(POL_H, ell, 4) == pytest.approx(0.5, abs=0)
        assert state.survival == pytest.approx(1.0, abs=1e-15)

    def test_single_pass_input(self):
        state = make_initial_state(2, "multipixel-single-pass")
        expected = 1.0 / math.sqrt(2.0)
        for ell in range(2):
            assert state.amplitude(POL_H, ell, 0) == pytest.approx(expected, abs=1e-15)
        assert state.survival == pytest.approx(1.0, abs=1e-15)

    def test_rejects_zero_dimension(self):
        with pytest.raises(ValueError):
            make_initial_state(0, "multipixel-zeno")

    def test_rejects_unknown_kind(self):
        with pytest.raises(ValueError):
            make_initial_state(2, "free-running")


class TestBeamSplitter:
    def test_splits_input_mode(self):
        d = 1
        bs = core.beam_splitter(d)
        out = bs.apply(basis_state(d, POL_H, 0, 0))
        r = 1.0 / math.sqrt(2.0)
        assert out.amplitude(POL_H, 0, 0) == pytest.approx(r, abs=1e-15)
        assert out.amplitude(POL_H, 0, 1) == pytest.approx(r, abs=1e-15)

    def test_is_an_involution(self):
        d = 3
        bs = core.beam_splitter(d)
        state = basis_state(d, POL_H, 0, 0)
        back = bs.apply(bs.apply(state))
        assert np.allclose(back.amps, state.amps, atol=1e-15)

    def test_norm_preserved_on_random_states(self):
        rng = np.random.default_rng(2)
        for d in (1, 2, 5):
            bs = core.beam_splitter(d)
            for _ in range(10):
                state = random_state(rng, d)
                assert abs(bs.apply(state).survival - 1.0) <= 1e-12

    def test_inner_modes_untouched(self):
        d = 4
        bs = core.beam_splitter(d)
        state = basis_state(d, POL_V, 2, 2)
        assert np.array_equal(bs.apply(state).amps, state.amps)


class TestPolarisingBeamSplitter:
    def test_routes_v_to_object_arm(self):
        d = 3
        pbs = core.polarising_beam_splitter(d)
        out = pbs.apply(basis_state(d, POL_V, 1, d))
        assert out.amplitude(POL_V, 1, 0) == 1.0

    def test_h_passes_through(self):
        d = 3
        pbs = core.polarising_beam_splitter(d)
        state = basis_state(d, POL_H, 2, d)
        assert np.array_equal(pbs.apply(state).amps, state.amps)

    def test_double_application_is_identity(self):
        rng = np.random.default_rng(3)
        for d in (1, 2, 4):
            pbs = core.polarising_beam_splitter(d)
            state = random_state(rng, d)
            back = pbs.apply(pbs.apply(state))
            assert np.array_equal(back.amps, state.amps)


class TestPolarisationRotator:
    def test_zero_angle_is_identity(self):
        rot = core.polarisation_rotator(0.0, 2)
        assert np.allclose(rot.matrix, np.eye(space_dim(2)), atol=0)

    def test_quarter_turn_flips_h_to_v(self):
        d = 2
        rot = core.polarisation_rotator(np.pi / 2, d)
        out = rot.apply(basis_state(d, POL_H, 1, 0))
        assert out.amplitude(POL_V, 1, 0) == pytest.approx(1.0, abs=1e-15)
        assert abs(out.amplitude(POL_H, 1, 0)) <= 1e-15

    def test_rotations_compose_additively(self):
        d = 1
        n = 7
        small = core.polarisation_rotator(np.pi / (2 * n), d)
        combined = core.compose([small] * n)
        full = core.polarisation_rotator(np.pi / 2, d)
        assert np.max(np.abs(combined.matrix - full.matrix)) <= 1e-12


class TestSorterAndConverter:
    def test_sorter_demultiplexes(self):
        d = 3
        out = core.oam_sorter(d).apply(basis_state(d, POL_H, 2, 0))
        assert out.amplitude(POL_H, 2, 2) == 1.0

    def test_sorter_leaves_reference_arm(self):
        d = 3
        state = basis_state(d, POL_H, 2, d)
        assert np.array_equal(core.oam_sorter(d).apply(state).amps, state.amps)

    def test_sorter_inverse_roundtrip(self):
        rng = np.random.default_rng(4)
        for d in (2, 3, 5):
            s, sinv = core.oam_sorter(d), core.oam_sorter(d, inverse=True)
            state = random_state(rng, d)
            assert np.array_equal(sinv.apply(s.apply(state)).amps, state.amps)

    def test_converter_resets_oam_on_matching_path(self):
        d = 4
        out = core.oam_converter(d).apply(basis_state(d, POL_H, 3, 3))
        assert out.amplitude(POL_H, 0, 3) == 1.0

    def test_converter_fixes_zero_oam_on_path_zero(self):
        d = 4
        state = basis_state(d, POL_H, 0, 0)
        assert np.array_equal(core.oam_converter(d).apply(state).amps, state.amps)

    def test_converter_inverse_roundtrip(self):
        rng = np.random.default_rng(5)
        for d in (2, 4):
            c, cinv = core.oam_converter(d), core.oam_converter(d, inverse=True)
            state = random_state(rng, d)
            assert np.array_equal(cinv.apply(c.apply(state)).amps, state.amps)


class TestSwapEquivalence:
    def test_sorter_then_converter_swaps_oam_and_path(self):
        # On input path 0 the composite must send |ell>_OAM |0> to
        # |0>_OAM |ell>, i.e. act as a literal OAM/path swap there.
        for d in range(1, 7):
            composite = core.oam_converter(d).matrix @ core.oam_sorter(d).matrix
            for pol in (POL_H, POL_V):
                actual = composite[:, [basis_index(d, pol, ell, 0) for ell in range(d)]]
                target = np.zeros_like(actual)
                for ell in range(d):
                    target[basis_index(d, pol, 0, ell), ell] = 1.0
                assert np.linalg.norm(actual - target, 2) <= 1e-12


class TestObjectAttenuator:
    def test_fully_transparent_is_identity(self):
        d = 3
        op = core.object_attenuator(PixelPattern.transparent(d), "pixel-paths")
        assert np.allclose(op.matrix, np.eye(space_dim(d)), atol=0)

    def test_opaque_pixel_absorbs_equal_superposition_share(self):
        # Equal superposition over the 2d states |ell>|ell> and |ell>|d>;
        # blocking n_abs pixel paths removes exactly n_abs/2d of the mass.
        d, n_abs = 5, 2
        pattern = PixelPattern.from_bits([1, 1, 0, 0, 0])
        amps = np.zeros((2, d, d + 1), dtype=complex)
        for ell in range(d):
            amps[POL_H, ell, ell] = 1.0 / math.sqrt(2 * d)
            amps[POL_H, ell, d] = 1.0 / math.sqrt(2 * d)
        state = PhotonState(d, amps)
        out = core.object_attenuator(pattern, "pixel-paths").apply(state)
        assert 1.0 - out.survival == pytest.approx(n_abs / (2 * d), abs=1e-15)

    def test_semitransparent_scales_amplitude(self):
        d = 1
        op = core.object_attenuator(PixelPattern((0.25,)), "pixel-paths")
        out = op.apply(basis_state(d, POL_V, 0, 0))
        assert out.amplitude(POL_V, 0, 0) == pytest.approx(0.5, abs=1e-15)

    def test_rejects_out_of_range_transmission(self):
        with pytest.raises(ValueError):
            PixelPattern((1.5,))
        with pytest.raises(ValueError):
            PixelPattern((-0.1, 0.5))

    def test_rejects_unknown_placement(self):
        with pytest.raises(ValueError):
            core.object_attenuator(PixelPattern.opaque(2), "everywhere")

    def test_contraction_on_random_states(self):
        rng = np.random.default_rng(6)
        for placement in ("pixel-paths", "oam-diagonal"):
            for _ in range(20):
                d = int(rng.integers(1, 6))
                op = core.object_attenuator(PixelPattern(tuple(rng.random(d))), placement)
                state = random_state(rng, d)
                assert op.apply(state).survival <= state.survival + 1e-12


class TestPockelsAndMirrors:
    def test_pockels_flips_polarisation(self):
        d = 3
        out = core.pockels_flip(d).apply(basis_state(d, POL_H, 1, 0))
        assert out.amplitude(POL_V, 1, 0) == 1.0

    def test_pockels_twice_is_identity(self):
        rng = np.random.default_rng(7)
        p = core.pockels_flip(2)
        state = random_state(rng, 2)
        assert np.array_equal(p.apply(p.apply(state)).amps, state.amps)

    def test_pockels_preserves_norm(self):
        rng = np.random.default_rng(8)
        p = core.pockels_flip(3)
        state = random_state(rng, 3)
        assert abs(p.apply(state).survival - 1.0) <= 1e-12

    def test_retro_mirror_keeps_oam(self):
        d = 4
        state = basis_state(d, POL_H, 2, 0)
        assert np.array_equal(core.mirror_reflect("retro", d).apply(state).amps, state.amps)

    def test_plain_mirror_fixes_zero_oam(self):
        d = 4
        state = basis_state(d, POL_H, 0, 0)
        assert np.array_equal(core.mirror_reflect("plain", d).apply(state).amps, state.amps)

    def test_plain_mirror_negates_oam_index(self):
        d = 5
        out = core.mirror_reflect("plain", d).apply(basis_state(d, POL_H, 2, 0))
        assert out.amplitude(POL_H, 3, 0) == 1.0

    def test_plain_mirror_twice_is_identity(self):
        rng = np.random.default_rng(9)
        m = core.mirror_reflect("plain", 5)
        state = random_state(rng, 5)
        assert np.array_equal(m.apply(m.apply(state)).amps, state.amps)


class TestNormProperties:
    def test_every_unitary_preserves_norm(self):
        rng = np.random.default_rng(10)
        for d in (1, 2, 3, 6):
            ops = all_unitaries(d)
            for _ in range(max(1, 100 // len(ops))):
                state = random_state(rng, d)
                for op in ops:
                    assert abs(op.apply(state).survival - state.survival) <= 1e-12

    def test_state_rejects_norm_above_one(self):
        amps = np.zeros((2, 1, 2), dtype=complex)
        amps[0, 0, 0] = 1.2
        with pytest.raises(ValueError):
            PhotonState(1, amps)

    def test_survival_probability_of_fresh_state(self):
        state = make_initial_state(3, "multipixel-zeno")
        assert core.survival_probability(state) == pytest.approx(1.0, abs=1e-15)

    def test_survival_after_object_contact(self):
        # Balanced two-arm split, then a fully opaque single pixel: half of
        # the probability mass is absorbed.
        d = 1
        state = core.beam_splitter(d).apply(make_initial_state(d, "ev-single-pass"))
        out = core.object_attenuator(PixelPattern.opaque(1), "pixel-paths").apply(state)
        assert core.survival_probability(out) == pytest.approx(0.5, abs=1e-12)

    def test_survival_after_repeated_interrogation(self):
        # Manual cycling with core elements only: rotate, sort polarisations,
        # block the object arm, merge. Survival after N cycles is
        # cos(theta)^2N.
        d, n = 1, 6
        theta = np.pi / (2 * n)
        rot = core.polarisation_rotator(theta, d)
        pbs = core.polarising_beam_splitter(d)
        obj = core.object_attenuator(PixelPattern.opaque(1), "pixel-paths")
        state = make_initial_state(d, "zeno-single-pixel")
        for _ in range(n):
            for op in (rot, pbs, obj, pbs):
                state = op.apply(state)
        assert state.survival == pytest.approx(math.cos(theta) ** (2 * n), abs=1e-12)


class TestDetection:
    def test_complete_map_sums_to_one(self):
        rng = np.random.default_rng(11)
        d = 3
        groups = {
            "A": [(p, ell, m) for p in (0, 1) for ell in range(d) for m in range(2)],
            "B": [(p, ell, m) for p in (0, 1) for ell in range(d) for m in range(2, d + 1)],
        }
        dmap = DetectorMap.from_groups(d, groups)
        # scale below unit norm so the deficit reads as absorption
        state = PhotonState(d, random_state(rng, d).amps * 0.7)
        dist = core.detection_distribution(state, dmap)
        assert abs(dist.total() - 1.0) <= 1e-12

    def test_double_assignment_rejected(self):
        with pytest.raises(ValueError, match="mapped to both"):
            DetectorMap.from_groups(1, {"A": [(0, 0, 0)], "B": [(0, 0, 0)]})

    def test_unmapped_mass_rejected(self):
        d = 1
        dmap = DetectorMap.from_groups(d, {"A": [(POL_H, 0, 0)]})
        state = basis_state(d, POL_V, 0, 1)
        with pytest.raises(ValueError, match="undetected"):
            core.detection_distribution(state, dmap)

    def test_distribution_total_validated(self):
        with pytest.raises(ValueError):
            DetectionDistribution({"A": 0.5}, 0.1)


class TestPixelPattern:
    def test_occupancy_matches_transmission(self):
        pattern = PixelPattern((0.0, 1.0, 0.5))
        assert pattern.f == (1, 0, 0)
        assert pattern.n_abs == 1
        assert not pattern.is_binary

    def test_from_bits(self):
        pattern = PixelPattern.from_bits("1010")
        assert pattern.transmissions == (0.0, 1.0, 0.0, 1.0)
        assert pattern.n_abs == 2
        assert pattern.is_binary

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            PixelPattern(())
