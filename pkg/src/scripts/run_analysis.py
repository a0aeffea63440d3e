"""
Analysis orchestrator that coordinates the bound, key-rate, sweep,
simulation and yield-ratio runs for the management CLI.
"""

import io
import sys
from pathlib import Path
from typing import Any, Optional, TextIO

from pydantic import ValidationError

from src.config.enums import IntensityLawKind, OutputFormat, RunMode
from src.config.run_config import write_tally_csv
from src.config.settings import settings
from src.logger.default_logger import get_logger
from src.schemas.config_schema import RunConfig
from src.schemas.interval_schema import Interval
from src.schemas.source_schema import SourceBounds
from src.schemas.tally_schema import BoundSummary, ObservedTallies
from src.services.adversary_sim import AdversarySimulator
from src.services.decoy_bounds import DecoyBounds
from src.services.key_rate import KeyRate
from src.services.source_model import SourceModel
from src.utils.exceptions import EXIT_FAILURE, EXIT_SUCCESS, ConfigException
from src.utils.report_utils import ReportUtil
from src.utils.run_output import ResultWriter

logger = get_logger(__name__)


class AnalysisOrchestrator:
    """
    Runs one configured analysis and emits its results.

    Human output is logged as a report. csv/jsonl output is written to the
    output path, or to stdout when there is none, and contains no timestamps.
    """

    def __init__(
        self,
        config: RunConfig,
        output_format: Optional[OutputFormat] = None,
        output_path: Optional[str] = None,
        stdout: Optional[TextIO] = None,
    ):
        """Initialize the orchestrator."""

        self._config = config
        self._format = (
            output_format or config.output.format or settings.output.DEFAULT_OUTPUT_FORMAT
        )
        self._output_path = output_path or config.output.path
        self._stdout = stdout or sys.stdout
        self._writer = ResultWriter(precision=settings.output.FLOAT_PRECISION)
        self._summary: dict[str, Any] = {}

    @property
    def config(self) -> RunConfig:
        """Returns the validated run configuration"""
        return self._config

    @property
    def summary(self) -> dict[str, Any]:
        """Returns the result summary of the last run, for run records"""
        return self._summary

    @property
    def sigma_mult(self) -> float:
        if self._config.sigma_mult is not None:
            return self._config.sigma_mult
        return settings.analysis.SIGMA_MULT

    # ---------------------------------------------------------------
    # Inputs
    # ---------------------------------------------------------------
    def tallies(self) -> ObservedTallies:
        try:
            return self._config.tallies.to_tallies()
        except ValidationError as e:
            problems = "; ".join(
                f"tallies.{'.'.join(str(p) for p in err['loc']) or 'counts'}: {err['msg']}"
                for err in e.errors()
            )
            raise ConfigException(details=f"cli.run: {problems}") from e

    def bounds(self) -> SourceBounds:
        source = self._config.source
        if source.is_coherent:
            return SourceModel.coherent_bounds(*source.intervals())
        return source.bounds

    # ---------------------------------------------------------------
    # Output
    # ---------------------------------------------------------------
    def _emit(self, records: list[Any]) -> None:
        if self._format == OutputFormat.HUMAN:
            return
        text = self._writer.render(records, self._format.value)
        if self._output_path:
            Path(self._output_path).write_text(text, encoding="utf-8")
            logger.info(f"Results written to {self._output_path}")
        else:
            self._stdout.write(text)
            self._stdout.flush()

    # ---------------------------------------------------------------
    # Modes
    # ---------------------------------------------------------------
    def run(self) -> int:
        """
        Runs the configured mode.

        Returns:
            int: Exit status; 1 when a simulated bound fails verification.
        """

        mode = self._config.mode
        logger.info(f"Running mode '{mode.value}'")

        handlers = {
            RunMode.BOUND: self.run_bound,
            RunMode.KEYRATE: self.run_keyrate,
            RunMode.SWEEP: self.run_sweep,
            RunMode.SIMULATE: self.run_simulate,
            RunMode.APPENDIX_DEMO: self.run_appendix_demo,
        }
        return handlers[mode]()

    def run_bound(self) -> int:
        tallies = self.tallies()
        bounds = self.bounds()

        report = SourceModel.validate_conditions(bounds)
        ReportUtil.log_conditions(report)
        SourceModel.require_conditions(bounds)

        intervals = DecoyBounds.expectation_intervals(tallies, self.sigma_mult, bounds)
        worst_signal, worst_decoy = DecoyBounds.worst_case_fractions(
            tallies, bounds, self.sigma_mult
        )
        vacuum_decoy, vacuum_signal = DecoyBounds.fact1_interval(
            worst_signal.d0_used, bounds, tallies.p0, tallies.p, tallies.pp
        )

        asymptotic_decoy = asymptotic_signal = None
        if tallies.Nd > 0 and tallies.Ns > 0:
            asymptotic_decoy, asymptotic_signal = DecoyBounds.delta1_asymptotic(
                tallies.rate_vacuum, tallies.rate_decoy, tallies.rate_signal, bounds
            )

        summary = BoundSummary(
            d0=Interval(lo=intervals.d0_lo, hi=intervals.d0_hi),
            delta1_signal_lo=worst_signal.delta1_signal_lo,
            delta1_decoy_lo=worst_decoy.delta1_decoy_lo,
            d0_worst_signal=worst_signal.d0_used,
            d0_worst_decoy=worst_decoy.d0_used,
            n1s_obs_lo=worst_signal.n1s_obs_lo,
            vacuum_counts_decoy=vacuum_decoy,
            vacuum_counts_signal=vacuum_signal,
            asymptotic_delta1_signal=asymptotic_signal,
            asymptotic_delta1_decoy=asymptotic_decoy,
            sigma_mult=self.sigma_mult,
            conditions=report.summary(),
        )
        ReportUtil.log_bound_summary(summary)
        self._emit([summary])
        self._summary = {
            "delta1_signal_lo": summary.delta1_signal_lo,
            "delta1_decoy_lo": summary.delta1_decoy_lo,
        }
        return EXIT_SUCCESS

    def run_keyrate(self) -> int:
        tallies = self.tallies()
        bounds = self.bounds()
        ReportUtil.log_conditions(SourceModel.validate_conditions(bounds))

        report = KeyRate.worst_case_rate(
            tallies,
            bounds,
            sigma_mult=self.sigma_mult,
            grid_n=self._config.grid_n,
            reading=self._config.reading,
            refine_points=self._config.refine_points,
        )
        ReportUtil.log_rate_report(report)
        self._emit([report])
        self._summary = {"rate": report.rate, "key_fraction": report.key_fraction}
        return EXIT_SUCCESS

    def run_sweep(self) -> int:
        tallies = self.tallies()
        source = self._config.source
        table = KeyRate.sweep_delta_m(
            tallies,
            (source.mu_decoy, source.mu_signal),
            self._config.sweep.delta_m_list,
            self._config.sweep.vacuum_caps,
            sigma_mult=self.sigma_mult,
            grid_n=self._config.grid_n,
            reading=self._config.reading,
            refine_points=self._config.refine_points,
        )
        ReportUtil.log_sweep_table(table)
        self._emit(table.records())
        self._summary = {"cells": len(table.cells)}
        return EXIT_SUCCESS

    def run_simulate(self) -> int:
        raw = dict(self._config.simulation)
        if self._config.seed is not None:
            raw["seed"] = self._config.seed
        scenario = AdversarySimulator.build_scenario(raw)

        outcome = AdversarySimulator.run_simulation(scenario, workers=self._config.workers)
        ReportUtil.log_simulation(outcome)

        tally_path = Path(self._output_path or settings.output.DEFAULT_TALLY_FILE)
        delta = scenario.intensity_law.delta if scenario.intensity_law.kind != IntensityLawKind.STABLE else 0.0
        buffer = io.StringIO()
        write_tally_csv(
            outcome.tallies,
            buffer,
            source_meta={
                "mu_decoy": scenario.mu_decoy,
                "mu_signal": scenario.mu_signal,
                "delta_m": delta,
                "vacuum_cap": scenario.vacuum_mu_hi,
            },
        )
        tally_path.write_text(buffer.getvalue(), encoding="utf-8")
        logger.info(f"Tallies written to {tally_path}")

        bounds = self.bounds() if self._config.source else AdversarySimulator.covering_bounds(scenario)
        verification = AdversarySimulator.verify_bound(outcome, bounds, self.sigma_mult)
        ReportUtil.log_verification(verification)

        if self._format != OutputFormat.HUMAN:
            text = self._writer.render([verification], self._format.value)
            self._stdout.write(text)
            self._stdout.flush()

        self._summary = {
            "tally_file": str(tally_path),
            "status": verification.status.value,
            "margin": verification.margin,
        }
        return EXIT_SUCCESS if verification.passed else EXIT_FAILURE

    def run_appendix_demo(self) -> int:
        inputs = self._config.appendix.model_dump()
        ratio = AdversarySimulator.appendix_yield_ratio(**inputs)
        ReportUtil.log_appendix(inputs, ratio)
        self._emit([{**inputs, "ratio": ratio}])
        self._summary = {"ratio": ratio}
        return EXIT_SUCCESS
