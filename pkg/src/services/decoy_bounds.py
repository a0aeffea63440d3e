"""
Lower bounds on the single-photon counts of the signal and decoy sources.

The bounds are worst cases over every source-state error allowed by the
SourceBounds and over the statistical fluctuation of the observed counts.
D0 (the weighted population of counted vacuum pulses) is left as a parameter;
the key-rate service scans it over its certified interval.
"""

import math

from src.config.settings import settings
from src.logger.default_logger import get_logger
from src.schemas.interval_schema import Interval
from src.schemas.source_schema import SourceBounds
from src.schemas.tally_schema import ExpectationIntervals, FractionBound, ObservedTallies
from src.services.source_model import SourceModel
from src.utils.exceptions import ConditionFailureException, NumericalDomainException
from src.utils.helper import NumericUtil

logger = get_logger(__name__)

# d0 may sit on an interval endpoint up to rounding
D0_MEMBERSHIP_REL_TOL = 1e-12


def _fluctuated_lower(expected: float, sigma_mult: float) -> float:
    """expected - sigma_mult * sqrt(expected), clamped at 0."""

    if expected <= 0.0:
        return 0.0
    return max(expected - sigma_mult * math.sqrt(expected), 0.0)


class DecoyBounds:
    """Vacuum-count, D0 and D1 bounds and the single-photon fractions built on them."""

    # ---------------------------------------------------------------
    # Bounds on populations
    # ---------------------------------------------------------------
    @staticmethod
    def fact1_interval(
        d0: float, bounds: SourceBounds, p0: float, p: float, pp: float
    ) -> tuple[Interval, Interval]:
        """
        Expected counts caused by vacuum pulses of the decoy source and of the
        signal source, given D0.

        Returns:
            tuple[Interval, Interval]: [p a0_lo D0, p a0_hi D0] and
            [pp ap0_lo D0, pp ap0_hi D0].
        """

        if d0 < 0.0:
            raise NumericalDomainException(
                details=f"decoy_bounds.fact1_interval: d0={d0} is negative"
            )
        SourceModel.require_conditions(bounds)

        decoy_vacuum = Interval(lo=p * bounds.a0_lo * d0, hi=p * bounds.a0_hi * d0)
        signal_vacuum = Interval(lo=pp * bounds.ap0_lo * d0, hi=pp * bounds.ap0_hi * d0)
        return decoy_vacuum, signal_vacuum

    @staticmethod
    def d0_interval(
        n0_interval: Interval,
        nd_interval: Interval,
        bounds: SourceBounds,
        p0: float,
        p: float,
    ) -> Interval:
        """
        Certified interval for D0 from the expected vacuum-source and
        decoy-source counts.

        The upper end uses the largest <N0>. The lower end subtracts the
        single-photon contamination of the vacuum source, worst case at the
        smallest <N0> and the largest <Nd>, and is clamped at 0.

        Raises:
            ConditionFailureException: If a1_lo - a0_lo(1 - b0_lo) <= 0.
            NumericalDomainException: If p0 <= 0, b0_lo = 0 or the two
            ends are inconsistent.
        """

        if p0 <= 0.0:
            raise NumericalDomainException(details=f"decoy_bounds.d0_interval: p0={p0} must be positive")
        if bounds.b0_lo <= 0.0:
            raise NumericalDomainException(details="decoy_bounds.d0_interval: b0_lo must be positive")

        denominator = bounds.fact2_denominator
        if denominator <= 0.0:
            raise ConditionFailureException(
                details=(
                    f"decoy_bounds.d0_interval: a1_lo - a0_lo(1 - b0_lo) = {denominator:.6g} <= 0, "
                    "the vacuum source is too noisy for the decoy source"
                )
            )

        d0_hi = n0_interval.hi / (bounds.b0_lo * p0)

        if bounds.b1_hi == 0.0:
            correction = 0.0
        else:
            if p <= 0.0:
                raise NumericalDomainException(details=f"decoy_bounds.d0_interval: p={p} must be positive")
            correction = p0 * bounds.b1_hi / (p * bounds.a1_lo) * nd_interval.hi
        raw_lo = bounds.a1_lo / (p0 * denominator) * (n0_interval.lo - correction)
        d0_lo = NumericUtil.clamp_nonnegative(raw_lo, label="D0 lower bound")

        if d0_lo > d0_hi:
            if d0_lo - d0_hi <= D0_MEMBERSHIP_REL_TOL * max(d0_hi, 1.0):
                d0_lo = d0_hi
            else:
                raise NumericalDomainException(
                    details=(
                        f"decoy_bounds.d0_interval: lower end {d0_lo:.10g} exceeds upper end "
                        f"{d0_hi:.10g}, the counts are inconsistent with the source bounds"
                    )
                )

        return Interval(lo=d0_lo, hi=d0_hi)

    @staticmethod
    def _d1_lower_raw(
        nd: float, ns: float, d0: float, bounds: SourceBounds, p: float, pp: float
    ) -> float:
        numerator = (
            bounds.ap2_lo * nd / p
            - bounds.a2_hi * ns / pp
            - bounds.vacuum_coefficient_gap * d0
        )
        return numerator / bounds.fact3_denominator

    @staticmethod
    def d1_lower(
        nd: float, ns: float, d0: float, bounds: SourceBounds, p: float, pp: float
    ) -> float:
        """
        Lower bound on D1, the weighted population of counted single-photon
        pulses, clamped at 0.

        Args:
            nd (float): Expected decoy-source counts.
            ns (float): Expected signal-source counts.
            d0 (float): Value of D0.
            bounds (SourceBounds): Source bounds satisfying every condition.
            p (float): Decoy selection probability.
            pp (float): Signal selection probability.
        """

        if d0 < 0.0:
            raise NumericalDomainException(details=f"decoy_bounds.d1_lower: d0={d0} is negative")
        if p <= 0.0 or pp <= 0.0:
            raise NumericalDomainException(
                details=f"decoy_bounds.d1_lower: p={p} and pp={pp} must be positive"
            )
        SourceModel.require_conditions(bounds)
        return NumericUtil.clamp_nonnegative(
            DecoyBounds._d1_lower_raw(nd, ns, d0, bounds, p, pp), label="D1 lower bound"
        )

    # ---------------------------------------------------------------
    # Single-photon fractions
    # ---------------------------------------------------------------
    @staticmethod
    def delta1_asymptotic(
        S0: float, S: float, Sp: float, bounds: SourceBounds
    ) -> tuple[float, float]:
        """
        Single-photon count fractions from counting rates alone, with D0 at
        the upper end of its interval (S0 / b0_lo per pulse).

        Returns:
            tuple[float, float]: (delta1_decoy, delta1_signal), each in [0, 1].
        """

        for name, rate in (("S0", S0), ("S", S), ("Sp", Sp)):
            if not 0.0 <= rate <= 1.0:
                raise NumericalDomainException(
                    details=f"decoy_bounds.delta1_asymptotic: {name}={rate} outside [0, 1]"
                )
        if S <= 0.0 or Sp <= 0.0:
            raise NumericalDomainException(
                details="decoy_bounds.delta1_asymptotic: S and Sp must be positive"
            )
        if bounds.b0_lo <= 0.0:
            raise NumericalDomainException(
                details="decoy_bounds.delta1_asymptotic: b0_lo must be positive"
            )
        SourceModel.require_conditions(bounds)

        numerator = (
            bounds.ap2_lo * S
            - bounds.a2_hi * Sp
            - bounds.vacuum_coefficient_gap * S0 / bounds.b0_lo
        )
        denominator = bounds.fact3_denominator

        delta1_signal = NumericUtil.clamp_fraction(bounds.ap1_lo * numerator / (Sp * denominator))
        delta1_decoy = NumericUtil.clamp_fraction(bounds.a1_lo * numerator / (S * denominator))

        logger.debug(
            f"Asymptotic fractions: delta1_decoy={delta1_decoy:.6g}, delta1_signal={delta1_signal:.6g}"
        )
        return delta1_decoy, delta1_signal

    @staticmethod
    def expectation_intervals(
        tallies: ObservedTallies, sigma_mult: float, bounds: SourceBounds
    ) -> ExpectationIntervals:
        """
        Intervals for the expected counts, sigma_mult standard deviations wide.

        <Nd> and <N0> get their own intervals. <Ns> follows from the total
        population identity N0 + Nd + Ns = <N0> + <Nd> + <Ns>, so its radius is
        the sum of the other two radii. Lower endpoints are clamped at 0 and
        the D0 interval is derived from the <N0> and <Nd> intervals.
        """

        if sigma_mult < 0.0:
            raise NumericalDomainException(
                details=f"decoy_bounds.expectation_intervals: sigma_mult={sigma_mult} is negative"
            )

        radius_d = sigma_mult * math.sqrt(tallies.Nd)
        radius_0 = sigma_mult * math.sqrt(tallies.N0)

        nd = Interval(lo=tallies.Nd - radius_d, hi=tallies.Nd + radius_d).clamped_below()
        n0 = Interval(lo=tallies.N0 - radius_0, hi=tallies.N0 + radius_0).clamped_below()
        ns = Interval(
            lo=tallies.Ns - radius_d - radius_0, hi=tallies.Ns + radius_d + radius_0
        ).clamped_below()

        d0 = DecoyBounds.d0_interval(n0, nd, bounds, tallies.p0, tallies.p)

        intervals = ExpectationIntervals(
            n0_lo=n0.lo,
            n0_hi=n0.hi,
            nd_lo=nd.lo,
            nd_hi=nd.hi,
            ns_lo=ns.lo,
            ns_hi=ns.hi,
            d0_lo=d0.lo,
            d0_hi=d0.hi,
            sigma_mult=sigma_mult,
        )
        logger.debug(f"Expectation intervals: {intervals.model_dump()}")
        return intervals

    @staticmethod
    def _fraction_at(
        tallies: ObservedTallies,
        bounds: SourceBounds,
        sigma_mult: float,
        d0: float,
        intervals: ExpectationIntervals,
    ) -> FractionBound:
        d1_lo = max(
            DecoyBounds._d1_lower_raw(
                intervals.nd_lo, intervals.ns_hi, d0, bounds, tallies.p, tallies.pp
            ),
            0.0,
        )

        n1s_expect = tallies.pp * bounds.ap1_lo * d1_lo
        n1s_obs = _fluctuated_lower(n1s_expect, sigma_mult)
        n1d_expect = tallies.p * bounds.a1_lo * d1_lo
        n1d_obs = _fluctuated_lower(n1d_expect, sigma_mult)

        delta1_signal = NumericUtil.clamp_fraction(n1s_obs / tallies.Ns) if tallies.Ns else 0.0
        delta1_decoy = NumericUtil.clamp_fraction(n1d_obs / tallies.Nd) if tallies.Nd else 0.0

        return FractionBound(
            d1_lo=d1_lo,
            n1s_expect_lo=n1s_expect,
            n1s_obs_lo=n1s_obs,
            n1d_expect_lo=n1d_expect,
            n1d_obs_lo=n1d_obs,
            delta1_signal_lo=delta1_signal,
            delta1_decoy_lo=delta1_decoy,
            d0_used=d0,
        )

    @staticmethod
    def delta1_nonasymptotic(
        tallies: ObservedTallies,
        bounds: SourceBounds,
        sigma_mult: float,
        d0: float,
        intervals: ExpectationIntervals | None = None,
    ) -> FractionBound:
        """
        Lower bounds on the single-photon count fractions at one value of D0,
        accounting for statistical fluctuation.

        The expected single-photon signal counts are bounded with the smallest
        <Nd> and the largest <Ns>, then lowered by sigma_mult standard
        deviations to bound the observed number.

        Raises:
            NumericalDomainException: If d0 lies outside its certified interval.
        """

        SourceModel.require_conditions(bounds)
        if intervals is None:
            intervals = DecoyBounds.expectation_intervals(tallies, sigma_mult, bounds)

        if not intervals.d0.contains(d0, rel_tol=D0_MEMBERSHIP_REL_TOL):
            raise NumericalDomainException(
                details=(
                    f"decoy_bounds.delta1_nonasymptotic: d0={d0} outside the certified "
                    f"interval [{intervals.d0_lo}, {intervals.d0_hi}]"
                )
            )

        return DecoyBounds._fraction_at(tallies, bounds, sigma_mult, d0, intervals)

    @staticmethod
    def worst_case_fractions(
        tallies: ObservedTallies,
        bounds: SourceBounds,
        sigma_mult: float | None = None,
    ) -> tuple[FractionBound, FractionBound]:
        """
        Fraction bounds minimized over the D0 interval.

        Both fractions are non-decreasing functions of an expression linear
        in D0, so the minimum over the interval is attained at an endpoint.

        Returns:
            tuple[FractionBound, FractionBound]: the bound minimizing the
            signal fraction and the bound minimizing the decoy fraction.
        """

        sigma_mult = settings.analysis.SIGMA_MULT if sigma_mult is None else sigma_mult
        SourceModel.require_conditions(bounds)
        intervals = DecoyBounds.expectation_intervals(tallies, sigma_mult, bounds)

        candidates = [
            DecoyBounds._fraction_at(tallies, bounds, sigma_mult, d0, intervals)
            for d0 in (intervals.d0_lo, intervals.d0_hi)
        ]
        worst_signal = min(candidates, key=lambda fb: fb.delta1_signal_lo)
        worst_decoy = min(candidates, key=lambda fb: fb.delta1_decoy_lo)
        return worst_signal, worst_decoy
