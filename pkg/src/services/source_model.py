"""
Photon-number bounds of the three sources: construction from coherent-state
intensity intervals and validation of the conditions the single-photon bounds
rely on.
"""

import math

from src.config.enums import BoundOrigin, ConditionStatus
from src.config.settings import settings
from src.logger.default_logger import get_logger
from src.schemas.source_schema import (
    ConditionCheck,
    ConditionReport,
    IntensityInterval,
    SourceBounds,
)
from src.utils.exceptions import ConditionFailureException, NumericalDomainException
from src.utils.helper import NumericUtil

logger = get_logger(__name__)

# Names of the individual admissibility checks.
CHECK_FACT2_DENOMINATOR = "fact2_denominator"
CHECK_FACT3_DENOMINATOR = "fact3_denominator"
CHECK_DECOY_VACUUM_TAIL = "decoy_vacuum_tail"
CHECK_SIGNAL_DECOY_TAIL = "signal_decoy_tail"


def poisson_coefficient(mu: float, k: int) -> float:
    """mu^k e^{-mu} / k!, with 0^0 = 1."""

    if k == 0:
        return math.exp(-mu)
    return mu**k * math.exp(-mu) / math.factorial(k)


def _tail_ratio(mu_num_lo: float, mu_den_hi: float) -> float:
    """
    inf over k >= 2 of Poisson(mu_num_lo, k) / Poisson(mu_den_hi, k).

    The ratio (mu_num_lo / mu_den_hi)^k e^{mu_den_hi - mu_num_lo} is
    non-decreasing in k when mu_num_lo >= mu_den_hi, so the infimum sits at
    k = 2; otherwise it decays to 0.
    """

    if mu_den_hi == 0.0:
        return math.inf
    if mu_num_lo < mu_den_hi:
        return 0.0
    return poisson_coefficient(mu_num_lo, 2) / poisson_coefficient(mu_den_hi, 2)


class SourceModel:
    """Builds and validates SourceBounds."""

    @staticmethod
    def coherent_bounds(
        decoy: IntensityInterval,
        signal: IntensityInterval,
        vacuum: IntensityInterval,
    ) -> SourceBounds:
        """
        Bounds on the Fock coefficients of coherent sources whose intensities
        are only known to lie in the given intervals.

        For k = 1, 2 the coefficient mu^k e^{-mu}/k! is increasing on [0, 1),
        so the lower (upper) bound is evaluated at mu_lo (mu_hi). The vacuum
        coefficient is decreasing, so a0_lo = e^{-mu_hi} and a0_hi = e^{-mu_lo}.

        Args:
            decoy (IntensityInterval): Intensity interval of the decoy source.
            signal (IntensityInterval): Intensity interval of the signal source.
            vacuum (IntensityInterval): Intensity interval of the vacuum source.

        Returns:
            SourceBounds: Bounds with both tail ratios filled in.

        Raises:
            NumericalDomainException: If any intensity reaches 1.
        """

        for name, interval in (("decoy", decoy), ("signal", signal), ("vacuum", vacuum)):
            if interval.mu_hi >= 1.0:
                raise NumericalDomainException(
                    details=(
                        f"source_model.coherent_bounds: {name}.mu_hi={interval.mu_hi} >= 1, "
                        "the coherent coefficients are no longer monotone in the intensity"
                    )
                )

        if decoy.mu_hi >= signal.mu_lo:
            logger.warning(
                f"Decoy interval [{decoy.mu_lo}, {decoy.mu_hi}] overlaps signal "
                f"interval [{signal.mu_lo}, {signal.mu_hi}]"
            )

        bounds = SourceBounds(
            a0_lo=poisson_coefficient(decoy.mu_hi, 0),
            a0_hi=poisson_coefficient(decoy.mu_lo, 0),
            a1_lo=poisson_coefficient(decoy.mu_lo, 1),
            a1_hi=poisson_coefficient(decoy.mu_hi, 1),
            a2_lo=poisson_coefficient(decoy.mu_lo, 2),
            a2_hi=poisson_coefficient(decoy.mu_hi, 2),
            ap0_lo=poisson_coefficient(signal.mu_hi, 0),
            ap0_hi=poisson_coefficient(signal.mu_lo, 0),
            ap1_lo=poisson_coefficient(signal.mu_lo, 1),
            ap1_hi=poisson_coefficient(signal.mu_hi, 1),
            ap2_lo=poisson_coefficient(signal.mu_lo, 2),
            ap2_hi=poisson_coefficient(signal.mu_hi, 2),
            b0_lo=poisson_coefficient(vacuum.mu_hi, 0),
            tail_ratio_decoy=_tail_ratio(decoy.mu_lo, vacuum.mu_hi),
            tail_ratio_signal=_tail_ratio(signal.mu_lo, decoy.mu_hi),
            origin=BoundOrigin.COHERENT,
        )

        logger.debug(f"Coherent source bounds: {bounds.model_dump()}")
        return bounds

    @staticmethod
    def validate_conditions(
        bounds: SourceBounds, rel_tol: float | None = None
    ) -> ConditionReport:
        """
        Checks the conditions on the source bounds that the D0 and D1 bounds
        need. Never raises; use require_conditions to enforce the result.

        Conditions beyond two photons are only checkable through the tail
        ratios. Without them the tail checks are UNVERIFIED.
        """

        rel_tol = settings.analysis.CONDITION_REL_TOL if rel_tol is None else rel_tol
        checks: list[ConditionCheck] = []

        fact2 = bounds.fact2_denominator
        checks.append(
            ConditionCheck(
                name=CHECK_FACT2_DENOMINATOR,
                status=ConditionStatus.PASS if fact2 > 0.0 else ConditionStatus.FAIL,
                detail="" if fact2 > 0.0 else f"a1_lo - a0_lo(1 - b0_lo) = {fact2:.6g} <= 0",
            )
        )

        # a_2'^L / a_2^U > a_1'^L / a_1^U, the signal/decoy ordering
        fact3 = bounds.fact3_denominator
        checks.append(
            ConditionCheck(
                name=CHECK_FACT3_DENOMINATOR,
                status=ConditionStatus.PASS if fact3 > 0.0 else ConditionStatus.FAIL,
                detail=""
                if fact3 > 0.0
                else f"ap2_lo / a2_hi does not exceed ap1_lo / a1_hi (a1_hi ap2_lo - ap1_lo a2_hi = {fact3:.6g})",
            )
        )

        # a_k^L / b_k^U >= a_1^L / b_1^U, with b_1^U relaxed to 1 - b0_lo.
        # k = 1 holds by construction of that relaxation.
        if bounds.b1_hi == 0.0:
            checks.append(
                ConditionCheck(
                    name=CHECK_DECOY_VACUUM_TAIL,
                    status=ConditionStatus.PASS,
                    detail="vacuum source carries no photons",
                )
            )
        elif bounds.tail_ratio_decoy is None:
            checks.append(
                ConditionCheck(
                    name=CHECK_DECOY_VACUUM_TAIL,
                    status=ConditionStatus.UNVERIFIED,
                    detail="tail_ratio_decoy not supplied",
                )
            )
        else:
            lhs = bounds.tail_ratio_decoy * bounds.b1_hi
            holds = NumericUtil.geq_with_tolerance(lhs, bounds.a1_lo, rel_tol)
            checks.append(
                ConditionCheck(
                    name=CHECK_DECOY_VACUUM_TAIL,
                    status=ConditionStatus.PASS if holds else ConditionStatus.FAIL,
                    detail=""
                    if holds
                    else (
                        f"tail_ratio_decoy * (1 - b0_lo) = {lhs:.6g} < a1_lo = {bounds.a1_lo:.6g}"
                    ),
                )
            )

        # a_k'^L / a_k^U >= a_2'^L / a_2^U for k > 2
        if bounds.tail_ratio_signal is None:
            checks.append(
                ConditionCheck(
                    name=CHECK_SIGNAL_DECOY_TAIL,
                    status=ConditionStatus.UNVERIFIED,
                    detail="tail_ratio_signal not supplied",
                )
            )
        else:
            if bounds.a2_hi == 0.0:
                tail_holds = True
            else:
                tail_holds = NumericUtil.geq_with_tolerance(
                    bounds.tail_ratio_signal * bounds.a2_hi, bounds.ap2_lo, rel_tol
                )
            if tail_holds:
                detail = ""
            elif bounds.origin == BoundOrigin.COHERENT and bounds.tail_ratio_signal == 0.0:
                detail = "decoy and signal intensity intervals overlap"
            else:
                detail = (
                    f"tail_ratio_signal = {bounds.tail_ratio_signal:.6g} "
                    f"< ap2_lo / a2_hi = {bounds.ap2_lo / bounds.a2_hi:.6g}"
                )
            checks.append(
                ConditionCheck(
                    name=CHECK_SIGNAL_DECOY_TAIL,
                    status=ConditionStatus.PASS if tail_holds else ConditionStatus.FAIL,
                    detail=detail,
                )
            )

        report = ConditionReport(checks=checks)
        if report.passed:
            logger.debug("All source conditions pass")
        else:
            logger.warning(f"Source conditions not satisfied: {report.summary()}")
        return report

    @staticmethod
    def require_conditions(bounds: SourceBounds) -> ConditionReport:
        """
        Validates the bounds and raises unless every condition passes.

        Raises:
            ConditionFailureException: On any FAIL or UNVERIFIED check.
        """

        report = SourceModel.validate_conditions(bounds)
        if not report.passed:
            failures = "; ".join(
                f"{check.name}={check.status.value}" + (f" ({check.detail})" if check.detail else "")
                for check in report.failures
            )
            raise ConditionFailureException(
                details=f"source_model.validate_conditions: {failures}"
            )
        return report
