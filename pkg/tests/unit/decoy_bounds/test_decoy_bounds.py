"""
Handles testing of the vacuum-count, D0 and D1 bounds and the single-photon
fraction bounds.
"""

import math

import pytest

from src.schemas.interval_schema import Interval
from src.schemas.source_schema import IntensityInterval, SourceBounds
from src.schemas.tally_schema import ObservedTallies
from src.services.decoy_bounds import DecoyBounds, _fluctuated_lower
from src.services.source_model import SourceModel
from src.utils.exceptions import ConditionFailureException, NumericalDomainException


class TestVacuumCountInterval:
    """Tests the expected vacuum counts of the decoy and signal sources"""

    def test_zero_d0(self, noisy_bounds):
        """D0 = 0 gives empty vacuum contributions."""

        decoy, signal = DecoyBounds.fact1_interval(0.0, noisy_bounds, 0.1, 0.4, 0.5)
        assert decoy == Interval(lo=0.0, hi=0.0)
        assert signal == Interval(lo=0.0, hi=0.0)

    def test_exact_coefficients_collapse(self, exact_bounds):
        """Zero-width a0 bounds give a degenerate interval at p a0 D0."""

        decoy, _ = DecoyBounds.fact1_interval(100.0, exact_bounds, 0.1, 0.4, 0.5)
        assert decoy.is_degenerate
        assert decoy.lo == pytest.approx(40.0 * math.exp(-0.2), rel=1e-14)

    def test_endpoints_by_direct_multiplication(self, noisy_bounds):
        """a0 in [e^-0.206, e^-0.194], p = 0.4, D0 = 1000."""

        decoy, signal = DecoyBounds.fact1_interval(1000.0, noisy_bounds, 0.1, 0.4, 0.5)
        assert decoy.lo == pytest.approx(400.0 * math.exp(-0.206), rel=1e-13)
        assert decoy.hi == pytest.approx(400.0 * math.exp(-0.194), rel=1e-13)
        assert signal.lo == pytest.approx(500.0 * math.exp(-0.618), rel=1e-13)
        assert signal.hi == pytest.approx(500.0 * math.exp(-0.582), rel=1e-13)

    def test_negative_d0_rejected(self, exact_bounds):
        """D0 is a population and cannot be negative."""

        with pytest.raises(NumericalDomainException):
            DecoyBounds.fact1_interval(-1.0, exact_bounds, 0.1, 0.4, 0.5)


class TestD0Interval:
    """Tests the certified interval for D0"""

    def test_true_vacuum_collapses_correction(self, exact_bounds):
        """b0_lo = 1 leaves [<N0>_lo / p0, <N0>_hi / p0]."""

        d0 = DecoyBounds.d0_interval(
            Interval(lo=3400.0, hi=3600.0), Interval(lo=9e4, hi=1e5), exact_bounds, 0.1, 0.4
        )
        assert d0.lo == pytest.approx(34000.0)
        assert d0.hi == pytest.approx(36000.0)

        point = DecoyBounds.d0_interval(
            Interval.point(3504.0), Interval.point(96315.0), exact_bounds, 0.1, 0.4
        )
        assert point.lo == pytest.approx(point.hi, rel=1e-12)
        assert point.hi == pytest.approx(35040.0)

    def test_weak_vacuum_source(self):
        """b0_lo = e^-0.01 with the published counts, both ends evaluated directly."""

        bounds = SourceModel.coherent_bounds(
            IntensityInterval(mu_lo=0.2, mu_hi=0.2),
            IntensityInterval(mu_lo=0.6, mu_hi=0.6),
            IntensityInterval(mu_lo=0.0, mu_hi=0.01),
        )
        d0 = DecoyBounds.d0_interval(
            Interval.point(3504.0), Interval.point(9.63e4), bounds, 0.1, 0.4
        )

        b0 = math.exp(-0.01)
        a1 = 0.2 * math.exp(-0.2)
        a0 = math.exp(-0.2)
        expected_hi = 3504.0 / (b0 * 0.1)
        expected_lo = a1 / (0.1 * (a1 - a0 * (1 - b0))) * (
            3504.0 - 0.1 * (1 - b0) / (0.4 * a1) * 9.63e4
        )
        assert d0.hi == pytest.approx(expected_hi, rel=1e-12)
        assert d0.lo == pytest.approx(expected_lo, rel=1e-12)
        assert 0.0 < d0.lo < d0.hi

    def test_no_vacuum_counts(self, noisy_bounds):
        """<N0> = 0 gives [0, 0]."""

        d0 = DecoyBounds.d0_interval(
            Interval.point(0.0), Interval.point(9.6e4), noisy_bounds, 0.1, 0.4
        )
        assert d0 == Interval(lo=0.0, hi=0.0)

    def test_non_positive_denominator(self):
        """A noisy vacuum source makes the lower bound undefined."""

        bounds = SourceBounds(
            a0_lo=0.8, a0_hi=0.82, a1_lo=0.16, a1_hi=0.17, a2_lo=0.015, a2_hi=0.017,
            ap0_lo=0.54, ap0_hi=0.56, ap1_lo=0.32, ap1_hi=0.34, ap2_lo=0.095, ap2_hi=0.1,
            b0_lo=0.5,
        )
        with pytest.raises(ConditionFailureException) as exc:
            DecoyBounds.d0_interval(Interval.point(100.0), Interval.point(1e4), bounds, 0.1, 0.4)
        assert "decoy_bounds.d0_interval" in exc.value.error_detail.details


class TestD1Lower:
    """Tests the lower bound on D1"""

    def test_identical_sources_carry_no_information(self, exact_bounds):
        """Equal source bounds zero the denominator, which the conditions reject."""

        same = exact_bounds.model_copy(
            update={
                "ap0_lo": exact_bounds.a0_lo, "ap0_hi": exact_bounds.a0_hi,
                "ap1_lo": exact_bounds.a1_lo, "ap1_hi": exact_bounds.a1_hi,
                "ap2_lo": exact_bounds.a2_lo, "ap2_hi": exact_bounds.a2_hi,
            }
        )
        with pytest.raises(ConditionFailureException):
            DecoyBounds.d1_lower(4000.0, 5000.0, 100.0, same, 0.4, 0.5)

    def test_negative_numerator_clamps_to_zero(self, exact_bounds):
        """Too few decoy counts for the signal counts give a vacuous bound of 0."""

        assert DecoyBounds.d1_lower(10.0, 1e6, 0.0, exact_bounds, 0.4, 0.5) == 0.0

    def test_published_data_gives_positive_bound(self, fibre_tallies, exact_bounds):
        """The published counts with error-free sources give a positive D1."""

        d0 = fibre_tallies.N0 / fibre_tallies.p0
        d1 = DecoyBounds.d1_lower(
            fibre_tallies.Nd, fibre_tallies.Ns, d0, exact_bounds, fibre_tallies.p, fibre_tallies.pp
        )
        assert d1 > 0.0

    def test_d1_decreases_with_d0(self, fibre_tallies, noisy_bounds):
        """More vacuum population leaves less room for single photons."""

        values = [
            DecoyBounds.d1_lower(fibre_tallies.Nd, fibre_tallies.Ns, d0, noisy_bounds, 0.4, 0.5)
            for d0 in (0.0, 1e4, 3e4)
        ]
        assert values[0] > values[1] > values[2]


class TestExpectationIntervals:
    """Tests the statistical intervals for the expected counts"""

    @staticmethod
    def tallies(N0: int, Nd: int, Ns: int) -> ObservedTallies:
        return ObservedTallies(M=100_000_000, p0=0.1, p=0.4, pp=0.5, N0=N0, Nd=Nd, Ns=Ns)

    def test_zero_sigma_gives_points(self, exact_bounds):
        """sigma_mult = 0 is the asymptotic limit."""

        intervals = DecoyBounds.expectation_intervals(self.tallies(100, 10000, 50000), 0.0, exact_bounds)
        assert intervals.nd.is_degenerate and intervals.nd_lo == 10000
        assert intervals.n0.is_degenerate and intervals.n0_lo == 100
        assert intervals.ns.is_degenerate and intervals.ns_lo == 50000
        assert intervals.d0_lo == pytest.approx(intervals.d0_hi, rel=1e-12)

    def test_ten_sigma_arithmetic(self, exact_bounds):
        """Nd = 10000, N0 = 100, Ns = 50000 with ten standard deviations."""

        intervals = DecoyBounds.expectation_intervals(self.tallies(100, 10000, 50000), 10.0, exact_bounds)
        assert (intervals.nd_lo, intervals.nd_hi) == (9000.0, 11000.0)
        assert (intervals.n0_lo, intervals.n0_hi) == (0.0, 200.0)
        assert (intervals.ns_lo, intervals.ns_hi) == (48900.0, 51100.0)
        assert intervals.d0_lo == 0.0
        assert intervals.d0_hi == pytest.approx(2000.0)

    def test_population_identity_bracketed(self, fibre_tallies, noisy_bounds):
        """The summed lower ends never exceed the observed total and the upper ends never fall below it."""

        intervals = DecoyBounds.expectation_intervals(fibre_tallies, 10.0, noisy_bounds)
        total = fibre_tallies.total_counts
        assert intervals.n0_lo + intervals.nd_lo + intervals.ns_lo <= total
        assert intervals.n0_hi + intervals.nd_hi + intervals.ns_hi >= total

    def test_negative_sigma_rejected(self, fibre_tallies, exact_bounds):
        with pytest.raises(NumericalDomainException):
            DecoyBounds.expectation_intervals(fibre_tallies, -1.0, exact_bounds)


class TestDelta1:
    """Tests the asymptotic and non-asymptotic single-photon fraction bounds"""

    def test_weak_decoy_rate_gives_zero(self, exact_bounds):
        """A decoy rate far below the signal rate leaves no single-photon credit."""

        decoy, signal = DecoyBounds.delta1_asymptotic(1e-6, 1e-5, 1e-4, exact_bounds)
        assert decoy == 0.0 and signal == 0.0

    def test_published_rates(self, fibre_tallies):
        """Published rates with a 0.5% intensity error give a fraction just below one half."""

        bounds = SourceModel.coherent_bounds(
            IntensityInterval.around(0.2, 0.005),
            IntensityInterval.around(0.6, 0.005),
            IntensityInterval(mu_lo=0.0, mu_hi=0.0),
        )
        decoy, signal = DecoyBounds.delta1_asymptotic(6.711e-6, 4.611e-5, 1.262e-4, bounds)
        assert 0.4 < signal < 0.5
        assert 0.0 < decoy <= 1.0

    def test_rates_outside_unit_interval(self, exact_bounds):
        with pytest.raises(NumericalDomainException):
            DecoyBounds.delta1_asymptotic(-1e-6, 1e-4, 1e-4, exact_bounds)

    def test_fluctuation_subtraction(self):
        """10000 expected counts lose 10 sqrt(10000) = 1000; none left stays 0."""

        assert _fluctuated_lower(10000.0, 10.0) == 9000.0
        assert _fluctuated_lower(0.0, 10.0) == 0.0
        assert _fluctuated_lower(50.0, 10.0) == 0.0

    def test_nonasymptotic_fields(self, fibre_tallies, noisy_bounds):
        """Observed single-photon counts sit ten deviations below the expected ones."""

        intervals = DecoyBounds.expectation_intervals(fibre_tallies, 10.0, noisy_bounds)
        bound = DecoyBounds.delta1_nonasymptotic(fibre_tallies, noisy_bounds, 10.0, intervals.d0_hi)

        expected = bound.n1s_expect_lo
        assert bound.n1s_obs_lo == pytest.approx(expected - 10.0 * math.sqrt(expected))
        assert bound.delta1_signal_lo == pytest.approx(bound.n1s_obs_lo / fibre_tallies.Ns)
        assert bound.n1s_obs_lo <= bound.n1s_expect_lo
        assert 0.0 < bound.delta1_signal_lo <= 1.0
        assert 0.0 < bound.delta1_decoy_lo <= 1.0

    def test_d0_outside_interval_rejected(self, fibre_tallies, noisy_bounds):
        intervals = DecoyBounds.expectation_intervals(fibre_tallies, 10.0, noisy_bounds)
        with pytest.raises(NumericalDomainException):
            DecoyBounds.delta1_nonasymptotic(
                fibre_tallies, noisy_bounds, 10.0, intervals.d0_hi * 1.01
            )

    def test_wider_source_errors_never_help(self, fibre_tallies):
        """Widening the intensity intervals never increases the signal fraction bound."""

        def fraction(delta: float) -> float:
            bounds = SourceModel.coherent_bounds(
                IntensityInterval.around(0.2, delta),
                IntensityInterval.around(0.6, delta),
                IntensityInterval(mu_lo=0.0, mu_hi=0.01),
            )
            # D0 upper end does not depend on the decoy and signal intervals
            d0 = DecoyBounds.expectation_intervals(fibre_tallies, 10.0, bounds).d0_hi
            return DecoyBounds.delta1_nonasymptotic(fibre_tallies, bounds, 10.0, d0).delta1_signal_lo

        values = [fraction(delta) for delta in (0.0, 0.005, 0.01, 0.02, 0.03)]
        assert all(a >= b for a, b in zip(values, values[1:]))

    def test_larger_sigma_never_helps(self, fibre_tallies, noisy_bounds):
        """More standard deviations never increase the signal fraction bound."""

        d0 = fibre_tallies.N0 / (noisy_bounds.b0_lo * fibre_tallies.p0)
        values = [
            DecoyBounds.delta1_nonasymptotic(fibre_tallies, noisy_bounds, sigma, d0).delta1_signal_lo
            for sigma in (0.0, 1.0, 3.0, 5.0, 10.0, 20.0)
        ]
        assert all(a >= b for a, b in zip(values, values[1:]))

    def test_worst_case_at_an_endpoint(self, fibre_tallies, noisy_bounds):
        """The worst case over D0 is no larger than the bound at any interior point."""

        signal, decoy = DecoyBounds.worst_case_fractions(fibre_tallies, noisy_bounds, 10.0)
        intervals = DecoyBounds.expectation_intervals(fibre_tallies, 10.0, noisy_bounds)
        for share in (0.25, 0.5, 0.75):
            d0 = intervals.d0_lo + share * intervals.d0.width
            interior = DecoyBounds.delta1_nonasymptotic(fibre_tallies, noisy_bounds, 10.0, d0)
            assert signal.delta1_signal_lo <= interior.delta1_signal_lo
            assert decoy.delta1_decoy_lo <= interior.delta1_decoy_lo
