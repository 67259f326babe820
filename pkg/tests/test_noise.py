import math

import numpy as np
import pytest

from src.errors import InvalidArgumentError, OutOfRangeError
from src.models.hidden import HiddenVariable
from src.noise import DetectorParams, DisturbanceKernel, KernelKind, apply_disturbances, \
    hidden_variable_autocorrelation, no_disturbance_probability, rotate, sample_disturbance_count, \
    thermal_autocorrelation_time


class TestThermalTime:
    def test_room_temperature_detector(self):
        det = DetectorParams(1e15, 1.0, 300.0, 1e-9)
        assert thermal_autocorrelation_time(det) == pytest.approx(6.30e-8, rel=5e-3)

    def test_colder_is_slower(self):
        warm = thermal_autocorrelation_time(DetectorParams(1e15, 1.0, 300.0, 1e-9))
        cold = thermal_autocorrelation_time(DetectorParams(1e15, 1.0, 250.0, 1e-9))
        assert cold > warm

    def test_overflow_is_reported(self):
        with pytest.raises(OutOfRangeError):
            thermal_autocorrelation_time(DetectorParams(1e15, 1.0, 1.0, 1e-9))

    @pytest.mark.parametrize("field", ["n_atoms", "band_gap", "temperature", "recombination_time"])
    def test_parameters_must_be_positive(self, field):
        values = dict(n_atoms=1e15, band_gap=1.0, temperature=300.0, recombination_time=1e-9)
        values[field] = 0.0
        with pytest.raises(InvalidArgumentError):
            DetectorParams(**values)


class TestPoisson:
    def test_no_noise(self):
        assert no_disturbance_probability(5.0, math.inf) == 1.0
        assert sample_disturbance_count(5.0, math.inf, np.random.default_rng(0)) == 0

    def test_zero_interval(self):
        assert sample_disturbance_count(0.0, 1.0, np.random.default_rng(0)) == 0

    def test_survival(self):
        assert no_disturbance_probability(2.0, 10.0) == pytest.approx(math.exp(-0.2))
        assert hidden_variable_autocorrelation(2.0, 10.0) == no_disturbance_probability(2.0, 10.0)

    def test_mean_count(self):
        rng = np.random.default_rng(11)
        counts = [sample_disturbance_count(0.5, 0.25, rng) for _ in range(20000)]
        assert np.mean(counts) == pytest.approx(2.0, abs=0.05)

    def test_rejects_bad_interval(self):
        with pytest.raises(InvalidArgumentError):
            no_disturbance_probability(-1.0, 1.0)
        with pytest.raises(InvalidArgumentError):
            no_disturbance_probability(1.0, 0.0)


class TestKernels:
    def test_draw_shapes(self):
        rng = np.random.default_rng(0)
        assert DisturbanceKernel("redraw").draw(3, rng).shape == (1, 3)
        assert DisturbanceKernel("diffusion", 0.2).draw(3, rng).shape == (3, 3)
        assert DisturbanceKernel("redraw").draw(0, rng).shape == (0, 3)

    def test_rotation(self):
        rotated = rotate((0.0, 0.0, 1.0), (1.0, 0.0, 0.0), 0.0, 1.0)
        assert rotated == pytest.approx((0.0, -1.0, 0.0))

    def test_diffusion_moves_at_most_the_angle(self):
        kernel = DisturbanceKernel(KernelKind.DIFFUSION, 0.3)
        rng = np.random.default_rng(5)
        hv = HiddenVariable((0.0, 0.0, 1.0))
        for _ in range(100):
            moved = apply_disturbances(hv, 1, kernel, rng)
            assert np.linalg.norm(moved.direction) == pytest.approx(1.0)
            assert np.dot(moved.direction, hv.direction) >= math.cos(0.3) - 1e-12

    def test_redraw_is_uniform(self):
        kernel = DisturbanceKernel("redraw")
        rng = np.random.default_rng(9)
        hv = HiddenVariable((0.0, 0.0, 1.0))
        z = [apply_disturbances(hv, 2, kernel, rng).direction[2] for _ in range(20000)]
        assert np.mean(z) == pytest.approx(0.0, abs=0.02)

    def test_zero_count_keeps_lambda(self):
        hv = HiddenVariable((0.0, 1.0, 0.0))
        assert apply_disturbances(hv, 0, DisturbanceKernel(), np.random.default_rng(0)) is hv

    def test_rejects_bad_diffusion_angle(self):
        with pytest.raises(InvalidArgumentError):
            DisturbanceKernel("diffusion", 0.0)


class TestInvariants:
    @pytest.mark.parametrize("field, factor, direction", [("n_atoms", 10.0, -1), ("temperature", 1.1, -1),
                                                          ("band_gap", 1.1, 1), ("recombination_time", 10.0, 1)])
    def test_thermal_time_is_monotone(self, field, factor, direction):
        for n_atoms in (1.0, 1e10, 1e15):
            for band_gap in (0.5, 1.0):
                for temperature in (250.0, 300.0):
                    values = dict(n_atoms=n_atoms, band_gap=band_gap, temperature=temperature,
                                  recombination_time=1e-9)
                    base = thermal_autocorrelation_time(DetectorParams(**values))
                    values[field] *= factor
                    moved = thermal_autocorrelation_time(DetectorParams(**values))
                    assert (moved - base) * direction > 0

    def test_doubling_atoms_halves_the_time(self):
        single = thermal_autocorrelation_time(DetectorParams(1e15, 1.0, 300.0, 1e-9))
        assert thermal_autocorrelation_time(DetectorParams(2e15, 1.0, 300.0, 1e-9)) == pytest.approx(single / 2,
                                                                                                      rel=1e-15)

    @pytest.mark.slow
    def test_disturbance_count_is_poisson(self):
        rng = np.random.default_rng(21)
        counts = np.array([sample_disturbance_count(1.0, 0.5, rng) for _ in range(1000000)])
        assert counts.var() == pytest.approx(counts.mean(), rel=0.05)

    @pytest.mark.slow
    @pytest.mark.parametrize("kappa", [0, 1, 2, 5, 10, 20])
    def test_redraw_autocorrelation(self, kappa):
        tau, trials = 5.0, 100000
        kernel = DisturbanceKernel("redraw")
        rng = np.random.default_rng(kappa)
        start = HiddenVariable((0.0, 0.0, 1.0))
        dots = np.array([apply_disturbances(start, sample_disturbance_count(float(kappa), tau, rng), kernel,
                                            rng).direction[2] for _ in range(trials)])
        std_error = dots.std() / math.sqrt(trials)
        assert abs(dots.mean() - hidden_variable_autocorrelation(float(kappa), tau)) <= 4 * std_error + 1e-12
