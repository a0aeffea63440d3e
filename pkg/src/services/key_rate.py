"""
Key rate from the single-photon fraction bounds: the QBER of single-photon
counts, the rate formula delta1[1 - H(t1)] - H(t), the worst case over D0 and
the sweep over intensity errors.
"""

import math

import numpy as np
from scipy.special import entr

from src.config.enums import SignalCountReading
from src.config.settings import settings
from src.logger.default_logger import get_logger
from src.schemas.rate_schema import RateReport, SweepCell, SweepTable
from src.schemas.source_schema import IntensityInterval, SourceBounds
from src.schemas.tally_schema import ExpectationIntervals, FractionBound, ObservedTallies
from src.services.decoy_bounds import DecoyBounds
from src.services.source_model import SourceModel
from src.utils.exceptions import NoKeyException, NumericalDomainException
from src.utils.helper import NumericUtil

logger = get_logger(__name__)

MAX_DELTA_M = 0.05
T1_CEILING = 0.5


class KeyRate:
    """Key-rate evaluation and worst-case scans."""

    @staticmethod
    def binary_entropy(t: float) -> float:
        """
        Binary entropy in bits, with H(0) = H(1) = 0.

        Raises:
            NumericalDomainException: If t is outside [0, 1].
        """

        if not 0.0 <= t <= 1.0:
            raise NumericalDomainException(details=f"key_rate.binary_entropy: t={t} outside [0, 1]")
        return float((entr(t) + entr(1.0 - t)) / math.log(2.0))

    @staticmethod
    def t1_estimate(
        t0: float,
        d0: float,
        delta1: float,
        n1s_obs_lo: float,
        bounds: SourceBounds,
        pp: float,
        Ns: float,
        sigma_mult: float | None = None,
        reading: SignalCountReading | None = None,
    ) -> float:
        """
        Upper estimate of the QBER of single-photon signal counts.

        Vacuum counts err with probability 1/2, so their expected errors
        pp ap0_lo D0 / 2 are removed from the signal errors before dividing by
        the single-photon fraction. A fluctuation term sigma_mult
        sqrt(4 t1' / n1s_obs_lo) is then added, and the result is clamped to
        [0, 0.5].

        Args:
            reading (SignalCountReading): TOTAL divides the vacuum errors by
            Ns, SIFTED by Ns / 2.

        Raises:
            NoKeyException: If delta1 = 0, or n1s_obs_lo = 0 while the
            fluctuation term is on.
        """

        sigma_mult = settings.analysis.SIGMA_MULT if sigma_mult is None else sigma_mult
        reading = settings.analysis.SIGNAL_COUNT_READING if reading is None else reading

        if not 0.0 <= t0 <= 1.0:
            raise NumericalDomainException(details=f"key_rate.t1_estimate: t0={t0} outside [0, 1]")
        if d0 < 0.0:
            raise NumericalDomainException(details=f"key_rate.t1_estimate: d0={d0} is negative")
        if Ns <= 0:
            raise NumericalDomainException(details=f"key_rate.t1_estimate: Ns={Ns} must be positive")
        if delta1 <= 0.0:
            raise NoKeyException(details="key_rate.t1_estimate: single-photon fraction bound is 0")
        if sigma_mult > 0.0 and n1s_obs_lo <= 0.0:
            raise NoKeyException(details="key_rate.t1_estimate: single-photon count bound is 0")

        ns_prime = Ns if reading == SignalCountReading.TOTAL else 0.5 * Ns
        vacuum_errors = pp * bounds.ap0_lo * d0 / (2.0 * ns_prime)
        t1_prime = max((t0 - vacuum_errors) / delta1, 0.0)

        t1 = t1_prime
        if sigma_mult > 0.0:
            t1 += sigma_mult * math.sqrt(4.0 * t1_prime / n1s_obs_lo)

        if t1 > T1_CEILING:
            logger.debug(f"t1={t1:.6g} clamped to {T1_CEILING}")
        return NumericUtil.clamp(t1, 0.0, T1_CEILING)

    @staticmethod
    def key_rate(delta1: float, t1: float, t: float) -> float:
        """
        Key fraction delta1[1 - H(t1)] - H(t). Negative values mean no key.
        """

        if not 0.0 <= delta1 <= 1.0:
            raise NumericalDomainException(details=f"key_rate.key_rate: delta1={delta1} outside [0, 1]")
        if not 0.0 <= t1 <= T1_CEILING:
            raise NumericalDomainException(details=f"key_rate.key_rate: t1={t1} outside [0, 0.5]")
        if not 0.0 <= t <= 1.0:
            raise NumericalDomainException(details=f"key_rate.key_rate: t={t} outside [0, 1]")
        return delta1 * (1.0 - KeyRate.binary_entropy(t1)) - KeyRate.binary_entropy(t)

    @staticmethod
    def _evaluate(
        tallies: ObservedTallies,
        bounds: SourceBounds,
        sigma_mult: float,
        d0: float,
        reading: SignalCountReading,
        intervals: ExpectationIntervals,
    ) -> tuple[float, float | None, FractionBound]:
        """Key fraction, t1 and the fraction bound at one D0."""

        fraction = DecoyBounds.delta1_nonasymptotic(
            tallies, bounds, sigma_mult, d0, intervals=intervals
        )
        t = tallies.t0_signal
        try:
            t1 = KeyRate.t1_estimate(
                tallies.t0_signal,
                d0,
                fraction.delta1_signal_lo,
                fraction.n1s_obs_lo,
                bounds,
                tallies.pp,
                tallies.Ns,
                sigma_mult=sigma_mult,
                reading=reading,
            )
        except NoKeyException:
            return -KeyRate.binary_entropy(t), None, fraction
        return KeyRate.key_rate(fraction.delta1_signal_lo, t1, t), t1, fraction

    @staticmethod
    def worst_case_rate(
        tallies: ObservedTallies,
        bounds: SourceBounds,
        sigma_mult: float | None = None,
        grid_n: int | None = None,
        reading: SignalCountReading | None = None,
        refine_points: int | None = None,
    ) -> RateReport:
        """
        Minimum of the key fraction over grid_n evenly spaced D0 values
        covering the certified D0 interval, endpoints included.

        With refine_points > 0 the neighbourhood of the grid argmin is scanned
        again on a finer grid. sigma_mult = 0 gives the asymptotic rate.

        Args:
            tallies (ObservedTallies): Observed counts and QBERs.
            bounds (SourceBounds): Source bounds satisfying every condition.
            sigma_mult (float): Standard deviations of the count intervals.
            grid_n (int): Number of D0 grid points, at least 2.
            reading (SignalCountReading): Ns' reading for t1.
            refine_points (int): Points of the argmin refinement, 0 disables it.

        Returns:
            RateReport: The worst case and the quantities attaining it.
        """

        sigma_mult = settings.analysis.SIGMA_MULT if sigma_mult is None else sigma_mult
        grid_n = settings.analysis.GRID_N if grid_n is None else grid_n
        reading = settings.analysis.SIGNAL_COUNT_READING if reading is None else reading
        refine_points = (
            settings.analysis.GRID_REFINE_POINTS if refine_points is None else refine_points
        )

        if grid_n < 2:
            raise NumericalDomainException(details=f"key_rate.worst_case_rate: grid_n={grid_n} must be at least 2")
        if tallies.Ns <= 0:
            raise NumericalDomainException(details="key_rate.worst_case_rate: no signal counts")

        SourceModel.require_conditions(bounds)
        intervals = DecoyBounds.expectation_intervals(tallies, sigma_mult, bounds)
        grid = NumericUtil.grid(intervals.d0_lo, intervals.d0_hi, grid_n)

        results = [
            KeyRate._evaluate(tallies, bounds, sigma_mult, float(d0), reading, intervals)
            for d0 in grid
        ]
        fractions = np.array([result[0] for result in results])
        best = int(np.argmin(fractions))
        worst_d0 = float(grid[best])
        worst = results[best]
        evaluated = len(grid)

        if refine_points > 0 and len(grid) > 1:
            left = float(grid[max(best - 1, 0)])
            right = float(grid[min(best + 1, len(grid) - 1)])
            for d0 in NumericUtil.grid(left, right, refine_points):
                candidate = KeyRate._evaluate(
                    tallies, bounds, sigma_mult, float(d0), reading, intervals
                )
                evaluated += 1
                if candidate[0] < worst[0]:
                    worst, worst_d0 = candidate, float(d0)

        key_fraction, t1, fraction = worst
        if t1 is not None and t1 >= T1_CEILING:
            logger.warning(f"t1 reached {T1_CEILING} at D0={worst_d0:.6g}, no key")

        kept = max(key_fraction, 0.0)
        report = RateReport(
            rate=tallies.rate_signal * kept,
            key_fraction=key_fraction,
            d0_worst=worst_d0,
            delta1_used=fraction.delta1_signal_lo,
            t1_used=t1,
            t_used=tallies.t0_signal,
            grid_points=evaluated,
            final_bits=tallies.Ns * kept,
            remaining_bits_lo=fraction.n1s_obs_lo / 4.0,
            sigma_mult=sigma_mult,
            reading=reading,
        )
        logger.info(
            f"Worst-case rate {report.rate:.6g} at D0={worst_d0:.6g} "
            f"(sigma={sigma_mult}, {evaluated} points)"
        )
        return report

    @staticmethod
    def sweep_delta_m(
        tallies: ObservedTallies,
        base_intensities: tuple[float, float],
        delta_m_list: list[float],
        vacuum_caps: list[float],
        sigma_mult: float | None = None,
        grid_n: int | None = None,
        reading: SignalCountReading | None = None,
        refine_points: int | None = None,
    ) -> SweepTable:
        """
        Worst-case rates for every relative intensity error delta_m.

        Decoy and signal intensities are taken in [mu(1 - delta_m),
        mu(1 + delta_m)] and the vacuum source in [0, cap]. Row R is the
        asymptotic rate with the first cap; rows R1..Rn are the finite rates,
        one per cap.

        Args:
            base_intensities (tuple[float, float]): Nominal (decoy, signal) intensities.
            delta_m_list (list[float]): Relative intensity errors, each in [0, 0.05].
            vacuum_caps (list[float]): Upper bounds of the vacuum intensity.
        """

        sigma_mult = settings.analysis.SIGMA_MULT if sigma_mult is None else sigma_mult

        if not vacuum_caps:
            raise NumericalDomainException(details="key_rate.sweep_delta_m: vacuum_caps is empty")
        for delta_m in delta_m_list:
            if not 0.0 <= delta_m <= MAX_DELTA_M:
                raise NumericalDomainException(
                    details=f"key_rate.sweep_delta_m: delta_m={delta_m} outside [0, {MAX_DELTA_M}]"
                )

        mu_decoy, mu_signal = base_intensities
        rows: list[tuple[str, float, float, bool]] = [("R", vacuum_caps[0], 0.0, True)]
        rows += [
            (f"R{index}", cap, sigma_mult, False) for index, cap in enumerate(vacuum_caps, start=1)
        ]

        cells: list[SweepCell] = []
        for row_name, cap, row_sigma, asymptotic in rows:
            for delta_m in delta_m_list:
                bounds = SourceModel.coherent_bounds(
                    decoy=IntensityInterval.around(mu_decoy, delta_m),
                    signal=IntensityInterval.around(mu_signal, delta_m),
                    vacuum=IntensityInterval(mu_lo=0.0, mu_hi=cap),
                )
                report = KeyRate.worst_case_rate(
                    tallies,
                    bounds,
                    sigma_mult=row_sigma,
                    grid_n=grid_n,
                    reading=reading,
                    refine_points=refine_points,
                )
                cells.append(
                    SweepCell(
                        row=row_name,
                        delta_m=delta_m,
                        vacuum_cap=cap,
                        asymptotic=asymptotic,
                        report=report,
                    )
                )

        return SweepTable(
            delta_m_list=list(delta_m_list), vacuum_caps=list(vacuum_caps), cells=cells
        )
