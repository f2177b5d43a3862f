import math
import warnings

import numpy as np
import pytest

from dfq.baselines import (apot_levels_unit, apot_spec, uniform_spec,
                           _clipped_distortion)
from dfq.distributions import DistributionModel, ModelKind, gaussian, laplace
from dfq.errors import InvalidBitWidth
from dfq.quantizer import codebook_distortion, distortion, standard_spec

GAUSS_M1_D = 0.3633802276324186569245


def is_sum_of_two_powers(x, tol=1e-12):
    """|x| == p1 + p2, each a power of two or zero."""
    x = abs(x)
    powers = [0.0] + [2.0**-e for e in range(0, 40)]
    return any(abs(x - (p + q)) < tol for p in powers for q in powers)


class TestUniform:
    def test_gaussian_m1_levels_at_half_clip(self):
        spec = uniform_spec(ModelKind.GAUSSIAN, 1)
        assert spec.levels == pytest.approx([-spec.clip / 2, spec.clip / 2])
        assert spec.boundaries == pytest.approx([-spec.clip, 0.0, spec.clip])

    def test_never_beats_optimal(self):
        spec = uniform_spec(ModelKind.GAUSSIAN, 1)
        d = codebook_distortion(ModelKind.GAUSSIAN, spec.levels)
        assert d >= GAUSS_M1_D - 1e-12

    def test_equal_interval_widths(self):
        for kind in ModelKind:
            for bits in (1, 2, 4, 6):
                spec = uniform_spec(kind, bits)
                widths = np.diff(spec.boundaries)
                expected = 2 * spec.clip / 2**bits
                assert np.max(np.abs(widths - expected)) < 1e-12

    def test_levels_are_interval_midpoints(self):
        spec = uniform_spec(ModelKind.LAPLACE, 3)
        mids = 0.5 * (spec.boundaries[:-1] + spec.boundaries[1:])
        assert spec.levels == pytest.approx(mids, abs=1e-12)

    def test_clip_is_local_minimum(self):
        for kind in ModelKind:
            spec = uniform_spec(kind, 4)
            base = _clipped_distortion(kind, 4, spec.clip)
            for factor in (0.99, 1.01):
                assert _clipped_distortion(kind, 4, spec.clip * factor) >= \
                    base - 1e-12

    def test_more_bits_never_hurt(self):
        d4 = codebook_distortion(ModelKind.LAPLACE,
                                 uniform_spec(ModelKind.LAPLACE, 4).levels)
        d8 = codebook_distortion(ModelKind.LAPLACE,
                                 uniform_spec(ModelKind.LAPLACE, 8).levels)
        assert d8 < d4

    def test_invalid_bits(self):
        with pytest.raises(InvalidBitWidth):
            uniform_spec(ModelKind.GAUSSIAN, 0)
        with pytest.raises(InvalidBitWidth):
            uniform_spec(ModelKind.GAUSSIAN, 17)

    def test_structural_invariants(self):
        for kind in ModelKind:
            spec = uniform_spec(kind, 5)
            assert (np.diff(spec.levels) > 0).all()
            assert ((spec.boundaries[:-1] < spec.levels)
                    & (spec.levels < spec.boundaries[1:])).all()


class TestApotConstruction:
    def test_m2_level_shape(self):
        # magnitudes {0, 1/2, 1, 3/2} decimate to +-1/2, +-3/2 (then scaled)
        unit, split = apot_levels_unit(2)
        assert split == (1, 1)
        assert unit == pytest.approx([-1.0, -1 / 3, 1 / 3, 1.0])

    def test_m2_spec_matches_construction(self):
        spec = apot_spec(ModelKind.GAUSSIAN, 2)
        gamma = spec.levels[-1]
        assert spec.levels == pytest.approx(
            [-gamma, -gamma / 3, gamma / 3, gamma], abs=1e-12)

    def test_counts_and_symmetry(self):
        for bits in range(2, 9):
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                unit, _ = apot_levels_unit(bits)
            assert unit.size == 2**bits
            assert (np.diff(unit) > 0).all()
            assert unit == pytest.approx(-unit[::-1])
            assert 0.0 not in unit

    def test_all_levels_are_two_power_sums(self):
        # the raw (pre-normalization) grid tops out at 2^0 + 2^-1
        raw_max = 1.5
        for bits in (2, 4, 6):
            unit, _ = apot_levels_unit(bits)
            for level in unit * raw_max:
                assert is_sum_of_two_powers(level), level

    def test_odd_bits_warns_and_splits_unevenly(self):
        with pytest.warns(UserWarning, match="odd bit width"):
            unit, split = apot_levels_unit(3)
        assert split == (2, 1)
        assert unit.size == 8

    def test_invalid_bits(self):
        with pytest.raises(InvalidBitWidth):
            apot_levels_unit(1)
        with pytest.raises(InvalidBitWidth):
            apot_levels_unit(9)

    def test_gamma_is_local_minimum(self):
        for kind in ModelKind:
            spec = apot_spec(kind, 4)
            unit, _ = apot_levels_unit(4)
            gamma = spec.levels[-1]
            base = codebook_distortion(kind, gamma * unit)
            for factor in (0.99, 1.01):
                assert codebook_distortion(kind, gamma * factor * unit) >= \
                    base - 1e-12


class TestDominance:
    @pytest.mark.parametrize("kind", list(ModelKind), ids=lambda k: k.value)
    @pytest.mark.parametrize("bits", range(2, 9))
    def test_optimal_dominates(self, kind, bits):
        model = DistributionModel(kind)
        d_opt = distortion(standard_spec(kind, bits)[0], model).total
        d_unif = codebook_distortion(kind, uniform_spec(kind, bits).levels)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            d_apot = codebook_distortion(kind, apot_spec(kind, bits).levels)
        assert d_opt <= d_unif
        assert d_opt <= d_apot

    def test_gaussian_m4_apot_example(self):
        model = gaussian()
        d_opt = distortion(standard_spec(ModelKind.GAUSSIAN, 4)[0], model).total
        d_apot = codebook_distortion(ModelKind.GAUSSIAN,
                                     apot_spec(ModelKind.GAUSSIAN, 4).levels)
        assert d_apot >= d_opt


class TestTransform:
    def test_with_transform_scales_codebook(self):
        spec = uniform_spec(ModelKind.GAUSSIAN, 2).with_transform(1.0, 2.0)
        assert spec.codebook() == pytest.approx(1.0 + 2.0 * spec.levels)
        assert spec.location_offset == 1.0 and spec.scale_factor == 2.0
