"""
Handles testing of the entropy, t1 and key-rate formulas and of the
worst-case scan over D0.
"""

import math

import numpy as np
import pytest

from src.config.enums import SignalCountReading
from src.schemas.source_schema import IntensityInterval
from src.services.decoy_bounds import DecoyBounds
from src.services.key_rate import T1_CEILING, KeyRate
from src.services.source_model import SourceModel
from src.utils.exceptions import NoKeyException, NumericalDomainException


def reference_entropy(t: float) -> float:
    return -t * math.log2(t) - (1 - t) * math.log2(1 - t)


class TestBinaryEntropy:
    """Tests the binary entropy"""

    def test_limits_and_maximum(self):
        assert KeyRate.binary_entropy(0.0) == 0.0
        assert KeyRate.binary_entropy(1.0) == 0.0
        assert KeyRate.binary_entropy(0.5) == pytest.approx(1.0, abs=1e-15)

    def test_published_signal_error_rate(self):
        """H(0.0358) evaluated from the closed form."""

        assert KeyRate.binary_entropy(0.0358) == pytest.approx(0.2226917, abs=1e-6)
        assert KeyRate.binary_entropy(0.0358) == pytest.approx(reference_entropy(0.0358), rel=1e-12)

    def test_symmetry_on_dense_grid(self):
        """H(t) = H(1 - t) on 1e4 points."""

        for t in np.linspace(0.0, 1.0, 10_000):
            t = float(t)
            assert KeyRate.binary_entropy(t) == pytest.approx(
                KeyRate.binary_entropy(1.0 - t), abs=1e-12
            )

    def test_strictly_increasing_below_half(self):
        values = [KeyRate.binary_entropy(float(t)) for t in np.linspace(0.0, 0.5, 10_000)]
        assert all(a < b for a, b in zip(values, values[1:]))

    @pytest.mark.parametrize("t", [-0.1, 1.0001])
    def test_outside_unit_interval(self, t):
        with pytest.raises(NumericalDomainException):
            KeyRate.binary_entropy(t)


class TestT1Estimate:
    """Tests the single-photon QBER estimate"""

    def test_no_vacuum_correction(self, exact_bounds):
        """d0 = 0 without the fluctuation term gives t0 / delta1."""

        t1 = KeyRate.t1_estimate(0.0358, 0.0, 0.5, 1e6, exact_bounds, 0.5, 3e5, sigma_mult=0.0)
        assert t1 == pytest.approx(0.0716, rel=1e-12)

    def test_fluctuation_term(self, exact_bounds):
        """0.0716 + 10 sqrt(4 * 0.0716 / 1e6)."""

        t1 = KeyRate.t1_estimate(0.0358, 0.0, 0.5, 1e6, exact_bounds, 0.5, 3e5, sigma_mult=10.0)
        assert t1 == pytest.approx(0.0716 + 0.0053516, abs=1e-6)
        assert t1 == pytest.approx(0.0716 + 10.0 * math.sqrt(4 * 0.0716 / 1e6), rel=1e-12)

    def test_vacuum_errors_subtracted(self, exact_bounds):
        """Vacuum counts err at 1/2; the sifted reading doubles their share."""

        pp, Ns, d0 = 0.5, 329508.0, 35040.0
        share = pp * exact_bounds.ap0_lo * d0 / (2 * Ns)
        total = KeyRate.t1_estimate(
            0.0358, d0, 0.5, 1e6, exact_bounds, pp, Ns,
            sigma_mult=0.0, reading=SignalCountReading.TOTAL,
        )
        sifted = KeyRate.t1_estimate(
            0.0358, d0, 0.5, 1e6, exact_bounds, pp, Ns,
            sigma_mult=0.0, reading=SignalCountReading.SIFTED,
        )
        assert total == pytest.approx((0.0358 - share) / 0.5, rel=1e-12)
        assert sifted == pytest.approx((0.0358 - 2 * share) / 0.5, rel=1e-12)
        assert sifted < total

    def test_clamped_at_half(self, exact_bounds):
        t1 = KeyRate.t1_estimate(0.4, 0.0, 0.1, 1e6, exact_bounds, 0.5, 3e5, sigma_mult=0.0)
        assert t1 == T1_CEILING

    def test_no_single_photon_credit(self, exact_bounds):
        with pytest.raises(NoKeyException):
            KeyRate.t1_estimate(0.0358, 0.0, 0.0, 1e6, exact_bounds, 0.5, 3e5)
        with pytest.raises(NoKeyException):
            KeyRate.t1_estimate(0.0358, 0.0, 0.3, 0.0, exact_bounds, 0.5, 3e5, sigma_mult=10.0)


class TestKeyRateFormula:
    """Tests delta1[1 - H(t1)] - H(t)"""

    def test_perfect_single_photon_source(self):
        assert KeyRate.key_rate(1.0, 0.0, 0.0) == 1.0

    def test_no_single_photons(self):
        assert KeyRate.key_rate(0.0, 0.2, 0.0358) == pytest.approx(-reference_entropy(0.0358))

    def test_composition(self):
        expected = 0.5 * (1 - reference_entropy(0.0716)) - reference_entropy(0.0358)
        assert KeyRate.key_rate(0.5, 0.0716, 0.0358) == pytest.approx(expected, rel=1e-12)

    def test_t1_above_ceiling_rejected(self):
        with pytest.raises(NumericalDomainException):
            KeyRate.key_rate(0.5, 0.6, 0.0358)


class TestWorstCaseRate:
    """Tests the minimum over the D0 interval"""

    def test_zero_width_interval(self, fibre_tallies, exact_bounds):
        """Without fluctuations and with a true vacuum the D0 interval is a point."""

        coarse = KeyRate.worst_case_rate(fibre_tallies, exact_bounds, sigma_mult=0.0, grid_n=2, refine_points=0)
        fine = KeyRate.worst_case_rate(fibre_tallies, exact_bounds, sigma_mult=0.0, grid_n=101, refine_points=0)
        assert coarse.d0_worst == pytest.approx(fibre_tallies.N0 / fibre_tallies.p0, rel=1e-12)
        assert fine.key_fraction == pytest.approx(coarse.key_fraction, rel=1e-9)

    def test_argmin_no_worse_than_endpoints_and_interior(self, fibre_tallies, noisy_bounds):
        """The reported minimum is at most the key fraction at both endpoints and the midpoint."""

        report = KeyRate.worst_case_rate(fibre_tallies, noisy_bounds, sigma_mult=10.0, grid_n=51)
        intervals = DecoyBounds.expectation_intervals(fibre_tallies, 10.0, noisy_bounds)
        for d0 in (intervals.d0_lo, intervals.d0.midpoint, intervals.d0_hi):
            key_fraction, _, _ = KeyRate._evaluate(
                fibre_tallies, noisy_bounds, 10.0, d0, SignalCountReading.TOTAL, intervals
            )
            assert report.key_fraction <= key_fraction + 1e-15

    def test_nested_grids(self, fibre_tallies, noisy_bounds):
        """A grid containing another never reports a higher minimum."""

        coarse = KeyRate.worst_case_rate(fibre_tallies, noisy_bounds, sigma_mult=10.0, grid_n=11, refine_points=0)
        fine = KeyRate.worst_case_rate(fibre_tallies, noisy_bounds, sigma_mult=10.0, grid_n=21, refine_points=0)
        assert fine.key_fraction <= coarse.key_fraction + 1e-12
        assert coarse.grid_points == 11 and fine.grid_points == 21

    def test_refinement_adds_points(self, fibre_tallies, noisy_bounds):
        plain = KeyRate.worst_case_rate(fibre_tallies, noisy_bounds, sigma_mult=10.0, grid_n=11, refine_points=0)
        refined = KeyRate.worst_case_rate(fibre_tallies, noisy_bounds, sigma_mult=10.0, grid_n=11, refine_points=7)
        assert refined.grid_points == 18
        assert refined.key_fraction <= plain.key_fraction

    def test_rate_is_clamped_report(self, fibre_tallies):
        """A large QBER gives a negative key fraction but a zero rate."""

        noisy_tallies = fibre_tallies.model_copy(update={"t0_signal": 0.11})
        bounds = SourceModel.coherent_bounds(
            IntensityInterval.around(0.2, 0.03),
            IntensityInterval.around(0.6, 0.03),
            IntensityInterval(mu_lo=0.0, mu_hi=0.01),
        )
        report = KeyRate.worst_case_rate(noisy_tallies, bounds, sigma_mult=10.0, grid_n=21)
        assert report.key_fraction < 0.0
        assert report.rate == 0.0
        assert not report.has_key
        assert report.final_bits == 0.0

    def test_grid_must_have_two_points(self, fibre_tallies, exact_bounds):
        with pytest.raises(NumericalDomainException):
            KeyRate.worst_case_rate(fibre_tallies, exact_bounds, grid_n=1)
