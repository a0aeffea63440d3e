"""
Pulse-level Monte Carlo of the three-source protocol with fluctuating source
intensities and a block-dependent channel, used as a ground-truth oracle for
the single-photon bounds, plus the closed-form single-photon yield ratio of
the strong/weak block attack.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from pydantic import ValidationError
from scipy.special import expit

from src.config.enums import ConditionStatus, IntensityLawKind, SourceName
from src.config.settings import settings
from src.logger.default_logger import get_logger
from src.schemas.interval_schema import Interval
from src.schemas.simulation_schema import (
    SOURCE_ORDER,
    SimOutcome,
    SimScenario,
    VerificationReport,
    YieldEntry,
    YieldTable,
)
from src.schemas.source_schema import IntensityInterval, SourceBounds
from src.schemas.tally_schema import ObservedTallies
from src.services.decoy_bounds import DecoyBounds
from src.services.source_model import SourceModel, poisson_coefficient
from src.utils.exceptions import (
    CoverageViolationException,
    NumericalDomainException,
    ScenarioException,
)

logger = get_logger(__name__)

COVERAGE_REL_TOL = 1e-12
N_SOURCES = len(SOURCE_ORDER)


@dataclass(frozen=True)
class BlockTally:
    """Tallies of one block; merged across blocks by summation."""

    block_index: int
    counted: np.ndarray  # (bucket, source)
    emitted: np.ndarray  # (bucket, source)
    errors: np.ndarray  # (source,)
    mu_min: np.ndarray  # (source,), +inf when the source never fired
    mu_max: np.ndarray  # (source,), -inf when the source never fired


def _block_intensities(
    scenario: SimScenario,
    block_index: int,
    sources: np.ndarray,
    rng: np.random.Generator,
) -> np.ndarray:
    """Per-pulse mean photon numbers of one block."""

    n = sources.size
    law = scenario.intensity_law
    nominal = np.array([0.0, scenario.mu_decoy, scenario.mu_signal])[sources]

    if law.kind == IntensityLawKind.BLOCK:
        factor = 1.0 + law.delta if block_index % 2 == 0 else 1.0 - law.delta
        mu = nominal * factor
    elif law.kind == IntensityLawKind.UNIFORM:
        mu = nominal * rng.uniform(1.0 - law.delta, 1.0 + law.delta, size=n)
    else:
        mu = nominal

    vacuum = sources == 0
    if scenario.vacuum_mu_hi > 0.0:
        mu[vacuum] = rng.uniform(0.0, scenario.vacuum_mu_hi, size=int(vacuum.sum()))
    return mu


def _simulate_block(scenario: SimScenario, block_index: int) -> BlockTally:
    """
    Simulates one block with its own random stream derived from
    (seed, block_index), so the result does not depend on scheduling.
    """

    rng = np.random.default_rng(np.random.SeedSequence([scenario.seed, block_index]))
    n = scenario.block_length
    bucket_max = settings.simulation.MAX_PHOTON_BUCKET

    cumulative = np.cumsum([scenario.p0, scenario.p, scenario.pp])
    sources = np.minimum(np.searchsorted(cumulative, rng.random(n), side="right"), N_SOURCES - 1)

    mu = _block_intensities(scenario, block_index, sources, rng)
    photons = rng.poisson(mu)

    eta = scenario.channel_law.eta(block_index)
    survivors = rng.binomial(photons, eta)
    dark = rng.random(n) < scenario.dark_rate
    photon_click = survivors > 0
    clicked = photon_click | dark

    # photon clicks err with the misalignment probability, dark-only clicks are random
    error_prob = np.where(photon_click, scenario.misalignment, 0.5)
    wrong = clicked & (rng.random(n) < error_prob)

    buckets = np.minimum(photons, bucket_max)
    cell = buckets * N_SOURCES + sources
    size = (bucket_max + 1) * N_SOURCES
    emitted = np.bincount(cell, minlength=size).reshape(bucket_max + 1, N_SOURCES)
    counted = np.bincount(cell[clicked], minlength=size).reshape(bucket_max + 1, N_SOURCES)
    errors = np.bincount(sources[wrong], minlength=N_SOURCES)

    mu_min = np.full(N_SOURCES, np.inf)
    mu_max = np.full(N_SOURCES, -np.inf)
    for source in range(N_SOURCES):
        drawn = mu[sources == source]
        if drawn.size:
            mu_min[source] = drawn.min()
            mu_max[source] = drawn.max()

    return BlockTally(
        block_index=block_index,
        counted=counted,
        emitted=emitted,
        errors=errors,
        mu_min=mu_min,
        mu_max=mu_max,
    )


def _qber(errors: int, counts: int) -> float:
    return min(errors / counts, 0.5) if counts else 0.0


class AdversarySimulator:
    """Runs scenarios and compares bounds with the simulated truth."""

    @staticmethod
    def build_scenario(data: dict) -> SimScenario:
        """
        Validates raw scenario fields.

        Raises:
            ScenarioException: Naming every invalid field.
        """

        try:
            return SimScenario.model_validate(data)
        except ValidationError as e:
            problems = "; ".join(
                f"{'.'.join(str(part) for part in err['loc']) or 'scenario'}: {err['msg']}"
                for err in e.errors()
            )
            raise ScenarioException(details=f"adversary_sim.build_scenario: {problems}") from e

    @staticmethod
    def covering_bounds(scenario: SimScenario) -> SourceBounds:
        """Coherent bounds that cover every intensity the scenario can draw."""

        delta = scenario.intensity_law.delta
        if scenario.intensity_law.kind == IntensityLawKind.STABLE:
            delta = 0.0
        return SourceModel.coherent_bounds(
            decoy=IntensityInterval.around(scenario.mu_decoy, delta),
            signal=IntensityInterval.around(scenario.mu_signal, delta),
            vacuum=IntensityInterval(mu_lo=0.0, mu_hi=scenario.vacuum_mu_hi),
        )

    @staticmethod
    def run_simulation(scenario: SimScenario, workers: int | None = None) -> SimOutcome:
        """
        Simulates every pulse of the scenario.

        Each pulse picks a source, draws an intensity from the intensity law and
        a Poisson photon number. It counts iff at least one photon survives the
        block transmittance or a dark count fires.

        Args:
            scenario (SimScenario): The scenario to run.
            workers (int): Processes to spread the blocks over; the outcome is
            identical for any value.

        Returns:
            SimOutcome: Observed tallies and ground truth.
        """

        workers = settings.simulation.SIM_WORKERS if workers is None else workers
        if workers < 1:
            raise ScenarioException(details=f"adversary_sim.run_simulation: workers={workers} must be at least 1")

        block_indices = range(scenario.n_blocks)
        logger.info(
            f"Simulating {scenario.M} pulses in {scenario.n_blocks} blocks "
            f"(seed={scenario.seed}, workers={workers})"
        )

        if workers == 1:
            blocks = [_simulate_block(scenario, index) for index in block_indices]
        else:
            with ProcessPoolExecutor(max_workers=workers) as executor:
                blocks = list(
                    executor.map(
                        _simulate_block,
                        [scenario] * scenario.n_blocks,
                        block_indices,
                    )
                )

        blocks.sort(key=lambda block: block.block_index)
        counted = np.sum([block.counted for block in blocks], axis=0)
        emitted = np.sum([block.emitted for block in blocks], axis=0)
        errors = np.sum([block.errors for block in blocks], axis=0)
        mu_min = np.min([block.mu_min for block in blocks], axis=0)
        mu_max = np.max([block.mu_max for block in blocks], axis=0)

        per_source = counted.sum(axis=0)
        N0, Nd, Ns = (int(value) for value in per_source)

        tallies = ObservedTallies(
            M=scenario.M,
            p0=scenario.p0,
            p=scenario.p,
            pp=scenario.pp,
            N0=N0,
            Nd=Nd,
            Ns=Ns,
            t0_signal=_qber(int(errors[2]), Ns),
            t0_decoy=_qber(int(errors[1]), Nd),
        )

        realized = {
            source: Interval(lo=float(mu_min[index]), hi=float(mu_max[index]))
            for index, source in enumerate(SOURCE_ORDER)
            if np.isfinite(mu_min[index])
        }

        outcome = SimOutcome(
            scenario=scenario,
            tallies=tallies,
            truth_counted=counted.astype(int).tolist(),
            truth_emitted=emitted.astype(int).tolist(),
            errors={source: int(errors[index]) for index, source in enumerate(SOURCE_ORDER)},
            realized_intensity=realized,
            truth_delta1_signal=counted[1, 2] / Ns if Ns else 0.0,
            truth_delta1_decoy=counted[1, 1] / Nd if Nd else 0.0,
        )
        logger.info(
            f"Simulation done: N0={N0}, Nd={Nd}, Ns={Ns}, "
            f"true delta1_signal={outcome.truth_delta1_signal:.6g}"
        )
        return outcome

    @staticmethod
    def appendix_yield_ratio(
        lambda_d: float, lambda_s: float, m: int, eps: float, eta_ratio: float
    ) -> float:
        """
        Ratio of the single-photon yields of two attenuated sources under the
        strong/weak block attack.

        An m-photon pulse is attenuated by (1 + eps)lambda in strong blocks
        and (1 - eps)lambda in weak blocks, and strong blocks see eta_ratio
        times the transmittance of weak blocks. The single-photon yield of a
        source is the transmittance averaged over its single-photon outputs,
        so the ratio does not depend on the absolute transmittance. Weights are
        combined in log space to survive very large m.

        Args:
            lambda_d (float): Attenuation of the decoy source.
            lambda_s (float): Attenuation of the signal source.
            m (int): Photon number before attenuation.
            eps (float): Relative attenuation error.
            eta_ratio (float): Strong-block over weak-block transmittance.

        Returns:
            float: Decoy single-photon yield over signal single-photon yield.
        """

        if m < 1:
            raise NumericalDomainException(details=f"adversary_sim.appendix_yield_ratio: m={m} must be at least 1")
        if not 0.0 <= eps < 1.0:
            raise NumericalDomainException(details=f"adversary_sim.appendix_yield_ratio: eps={eps} outside [0, 1)")
        if eta_ratio <= 0.0:
            raise NumericalDomainException(
                details=f"adversary_sim.appendix_yield_ratio: eta_ratio={eta_ratio} must be positive"
            )
        for name, lam in (("lambda_d", lambda_d), ("lambda_s", lambda_s)):
            if lam <= 0.0 or (1.0 + eps) * lam > 1.0:
                raise NumericalDomainException(
                    details=(
                        f"adversary_sim.appendix_yield_ratio: {name}={lam} must satisfy "
                        "0 < (1 + eps) * lambda <= 1"
                    )
                )

        def single_photon_yield(lam: float) -> float:
            log_w = []
            for sign in (1.0, -1.0):
                attenuation = (1.0 + sign * eps) * lam
                log_weight = np.log(attenuation)
                if m > 1:
                    log_weight += (m - 1) * np.log1p(-attenuation)
                log_w.append(log_weight)
            strong_share = expit(log_w[0] - log_w[1])
            return 1.0 + (eta_ratio - 1.0) * strong_share

        ratio = float(single_photon_yield(lambda_d) / single_photon_yield(lambda_s))
        logger.debug(
            f"Yield ratio for lambda_d={lambda_d}, lambda_s={lambda_s}, m={m}, "
            f"eps={eps}, eta_ratio={eta_ratio}: {ratio:.10g}"
        )
        return ratio

    @staticmethod
    def check_coverage(outcome: SimOutcome, bounds: SourceBounds) -> None:
        """
        Confirms the coefficients of every intensity the simulation drew lie
        inside the declared bounds.

        Raises:
            CoverageViolationException: Listing every escaped coefficient.
        """

        violations: list[str] = []

        def below(value: float, bound: float) -> bool:
            return value < bound - COVERAGE_REL_TOL * max(abs(bound), 1.0)

        def above(value: float, bound: float) -> bool:
            return value > bound + COVERAGE_REL_TOL * max(abs(bound), 1.0)

        for source, prefix in ((SourceName.DECOY, "a"), (SourceName.SIGNAL, "ap")):
            realized = outcome.realized_intensity.get(source)
            if realized is None:
                continue
            for k in (0, 1, 2):
                # k = 0 is decreasing in the intensity, k = 1, 2 increasing below 1
                at_lo = poisson_coefficient(realized.lo, k)
                at_hi = poisson_coefficient(realized.hi, k)
                smallest, largest = (at_hi, at_lo) if k == 0 else (at_lo, at_hi)
                lo_bound = getattr(bounds, f"{prefix}{k}_lo")
                hi_bound = getattr(bounds, f"{prefix}{k}_hi")
                if below(smallest, lo_bound) or above(largest, hi_bound):
                    violations.append(
                        f"{source.value} k={k}: realized [{smallest:.10g}, {largest:.10g}] "
                        f"outside [{lo_bound:.10g}, {hi_bound:.10g}]"
                    )
            if realized.hi >= 1.0:
                violations.append(f"{source.value}: realized intensity {realized.hi} >= 1")

        vacuum = outcome.realized_intensity.get(SourceName.VACUUM)
        if vacuum is not None and below(poisson_coefficient(vacuum.hi, 0), bounds.b0_lo):
            violations.append(
                f"vacuum: realized b0 {poisson_coefficient(vacuum.hi, 0):.10g} below b0_lo {bounds.b0_lo:.10g}"
            )

        if violations:
            raise CoverageViolationException(
                details="adversary_sim.verify_bound: " + "; ".join(violations)
            )

    @staticmethod
    def verify_bound(
        outcome: SimOutcome, bounds: SourceBounds, sigma_mult: float | None = None
    ) -> VerificationReport:
        """
        Compares the worst-case single-photon fraction bounds with the
        simulated truth. PASS iff the signal bound does not exceed the truth.

        Raises:
            CoverageViolationException: If the declared bounds do not cover the
            simulated source.
        """

        sigma_mult = settings.analysis.SIGMA_MULT if sigma_mult is None else sigma_mult
        AdversarySimulator.check_coverage(outcome, bounds)

        worst_signal, worst_decoy = DecoyBounds.worst_case_fractions(
            outcome.tallies, bounds, sigma_mult
        )

        margin = outcome.truth_delta1_signal - worst_signal.delta1_signal_lo
        decoy_margin = outcome.truth_delta1_decoy - worst_decoy.delta1_decoy_lo
        status = ConditionStatus.PASS if margin >= 0.0 else ConditionStatus.FAIL

        report = VerificationReport(
            status=status,
            delta1_signal_bound=worst_signal.delta1_signal_lo,
            truth_delta1_signal=outcome.truth_delta1_signal,
            margin=margin,
            delta1_decoy_bound=worst_decoy.delta1_decoy_lo,
            truth_delta1_decoy=outcome.truth_delta1_decoy,
            decoy_margin=decoy_margin,
            d0_worst=worst_signal.d0_used,
            sigma_mult=sigma_mult,
            tallies=outcome.tallies,
        )
        if report.passed:
            logger.info(f"Bound verified with margin {margin:.6g}")
        else:
            logger.error(
                f"Bound {worst_signal.delta1_signal_lo:.6g} exceeds true fraction "
                f"{outcome.truth_delta1_signal:.6g}"
            )
        return report

    @staticmethod
    def yield_table(outcome: SimOutcome) -> YieldTable:
        """Empirical yields counted/emitted per photon number and source."""

        entries: list[YieldEntry] = []
        for k, (counted_row, emitted_row) in enumerate(
            zip(outcome.truth_counted, outcome.truth_emitted)
        ):
            for index, source in enumerate(SOURCE_ORDER):
                emitted = emitted_row[index]
                counted = counted_row[index]
                value = counted / emitted if emitted else 0.0
                std_error = float(np.sqrt(value * (1.0 - value) / emitted)) if emitted else 0.0
                entries.append(
                    YieldEntry(
                        k=k,
                        source=source,
                        emitted=emitted,
                        counted=counted,
                        yield_value=value,
                        std_error=std_error,
                    )
                )
        return YieldTable(entries=entries)
