"""
Stores utility functions for human-readable run reports.
"""

from typing import Any

from src.config.enums import ConditionStatus
from src.logger.default_logger import get_logger
from src.schemas.rate_schema import RateReport, SweepTable
from src.schemas.simulation_schema import SimOutcome, VerificationReport
from src.schemas.source_schema import ConditionReport
from src.schemas.tally_schema import BoundSummary

logger = get_logger(__name__)


class ReportUtil:
    """Logs run results as banner-separated report sections."""

    @staticmethod
    def log_conditions(report: ConditionReport):
        """Logs every source condition check"""

        logger.info(f"{'=' * 20} SOURCE CONDITIONS {'=' * 20}")

        for check in report.checks:
            check_display = check.name.replace("_", " ").title()
            if check.status == ConditionStatus.PASS:
                logger.info(f"Condition passed: {check_display}")
            else:
                logger.warning(
                    f"Condition {check.status.value}: {check_display} {check.detail}".rstrip()
                )

    @staticmethod
    def log_bound_summary(summary: BoundSummary):
        """Logs single-photon fraction bounds and the D0 interval"""

        logger.info(f"{'=' * 20} SINGLE-PHOTON BOUNDS {'=' * 20}")
        logger.info(f"D0 interval: [{summary.d0.lo:.6g}, {summary.d0.hi:.6g}]")
        logger.info(
            f"Delta1' (signal) >= {summary.delta1_signal_lo:.6g} at D0={summary.d0_worst_signal:.6g}"
        )
        logger.info(
            f"Delta1 (decoy)   >= {summary.delta1_decoy_lo:.6g} at D0={summary.d0_worst_decoy:.6g}"
        )
        logger.info(f"Single-photon signal counts >= {summary.n1s_obs_lo:.6g}")
        logger.info(
            f"Vacuum counts, decoy source: [{summary.vacuum_counts_decoy.lo:.6g}, "
            f"{summary.vacuum_counts_decoy.hi:.6g}]"
        )
        logger.info(
            f"Vacuum counts, signal source: [{summary.vacuum_counts_signal.lo:.6g}, "
            f"{summary.vacuum_counts_signal.hi:.6g}]"
        )
        if summary.asymptotic_delta1_signal is not None:
            logger.info(
                f"Asymptotic fractions: Delta1'={summary.asymptotic_delta1_signal:.6g}, "
                f"Delta1={summary.asymptotic_delta1_decoy:.6g}"
            )

    @staticmethod
    def log_rate_report(report: RateReport):
        """Logs a worst-case key rate"""

        logger.info(f"{'=' * 20} KEY RATE {'=' * 20}")
        logger.info(f"Rate (bits per signal pulse): {report.rate:.6g}")
        logger.info(f"Key fraction: {report.key_fraction:.6g}")
        logger.info(f"Worst D0: {report.d0_worst:.6g} ({report.grid_points} points scanned)")
        logger.info(f"Delta1': {report.delta1_used:.6g}")
        if report.t1_used is None:
            logger.warning("No single-photon credit at the worst D0")
        else:
            logger.info(f"t1: {report.t1_used:.6g}, t: {report.t_used:.6g}")
        logger.info(f"Final bits: {report.final_bits:.6g}")
        logger.info(f"Single-photon bits after sifting and testing: {report.remaining_bits_lo:.6g}")

        if not report.has_key:
            logger.warning("No key can be distilled")

    @staticmethod
    def log_sweep_table(table: SweepTable):
        """Logs the sweep as one line per row, rates in units of 1e-6"""

        logger.info(f"{'=' * 20} RATE SWEEP (x1e-6) {'=' * 20}")

        header = "delta_m".ljust(8) + "".join(f"{d * 100:>9.2f}%" for d in table.delta_m_list)
        logger.info(header)
        for row_name in table.rows:
            line = row_name.ljust(8) + "".join(
                f"{cell.report.rate * 1e6:>10.4f}" for cell in table.row(row_name)
            )
            logger.info(line)

    @staticmethod
    def log_simulation(outcome: SimOutcome):
        """Logs observed tallies and the simulated truth"""

        tallies = outcome.tallies
        logger.info(f"{'=' * 20} SIMULATION {'=' * 20}")
        logger.info(f"Counts: N0={tallies.N0}, Nd={tallies.Nd}, Ns={tallies.Ns}")
        logger.info(f"QBER: signal={tallies.t0_signal:.6g}, decoy={tallies.t0_decoy:.6g}")
        logger.info(
            f"True single-photon fractions: signal={outcome.truth_delta1_signal:.6g}, "
            f"decoy={outcome.truth_delta1_decoy:.6g}"
        )

    @staticmethod
    def log_verification(report: VerificationReport):
        """Logs the bound-versus-truth verdict"""

        logger.info(f"{'=' * 20} BOUND VERIFICATION {'=' * 20}")
        logger.info(f"Bound:  {report.delta1_signal_bound:.6g}")
        logger.info(f"Truth:  {report.truth_delta1_signal:.6g}")
        logger.info(f"Margin: {report.margin:.6g}")
        if report.passed:
            logger.info(f"Verdict: {report.status.value}")
        else:
            logger.error(f"Verdict: {report.status.value}")

    @staticmethod
    def log_appendix(inputs: dict[str, Any], ratio: float):
        """Logs the yield ratio with its inputs"""

        logger.info(f"{'=' * 20} SINGLE-PHOTON YIELD RATIO {'=' * 20}")
        for key, value in inputs.items():
            logger.info(f"{key}: {value}")
        logger.info(f"Y_decoy / Y_signal = {ratio:.10g}")
