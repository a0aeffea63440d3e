"""
Pydantic schemas for the pulse-level simulator: scenario, outcome, yield
table and the verification report comparing a bound to the simulated truth.
"""

from typing import Annotated, Optional
from typing_extensions import Self

from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.config.enums import ConditionStatus, IntensityLawKind, SourceName
from src.config.settings import settings
from src.schemas.interval_schema import Interval
from src.schemas.tally_schema import ObservedTallies

Probability = Annotated[float, Field(ge=0.0, le=1.0)]

SOURCE_ORDER: tuple[SourceName, ...] = (SourceName.VACUUM, SourceName.DECOY, SourceName.SIGNAL)


class IntensityLaw(BaseModel):
    """
    How the decoy and signal intensities of each pulse are drawn.

    stable: the nominal intensity. block: nominal times (1 + delta) in even
    (strong) blocks and (1 - delta) in odd (weak) blocks. uniform: nominal
    times a per-pulse factor uniform in [1 - delta, 1 + delta].
    """

    model_config = ConfigDict(frozen=True)

    kind: IntensityLawKind = Field(default=IntensityLawKind.STABLE)
    delta: float = Field(default=0.0, ge=0.0, lt=1.0)


class ChannelLaw(BaseModel):
    """
    Block-dependent transmittance: eta_weak in odd blocks and
    eta_weak * eta_ratio in even blocks. eta_ratio = 1 is an honest channel.
    """

    model_config = ConfigDict(frozen=True)

    eta_weak: Probability = Field(default=0.1)
    eta_ratio: float = Field(default=1.0, gt=0.0)

    @model_validator(mode="after")
    def check_strong_transmittance(self) -> Self:
        if self.eta_weak * self.eta_ratio > 1.0:
            raise ValueError(
                f"eta_weak * eta_ratio = {self.eta_weak * self.eta_ratio} exceeds 1"
            )
        return self

    def eta(self, block_index: int) -> float:
        """Transmittance of a block."""
        return self.eta_weak * self.eta_ratio if block_index % 2 == 0 else self.eta_weak


class SimScenario(BaseModel):
    """Generative description of the pulses and of the adversarial channel."""

    model_config = ConfigDict(frozen=True)

    M: int = Field(gt=0)
    p0: Probability
    p: Probability
    pp: Probability

    mu_decoy: float = Field(gt=0.0)
    mu_signal: float = Field(gt=0.0)
    vacuum_mu_hi: float = Field(default=0.0, ge=0.0)

    intensity_law: IntensityLaw = Field(default_factory=IntensityLaw)
    channel_law: ChannelLaw = Field(default_factory=ChannelLaw)
    block_length: int = Field(
        default_factory=lambda: settings.simulation.SIM_BLOCK_LENGTH, gt=0
    )

    dark_rate: Probability = Field(default=0.0)
    misalignment: Probability = Field(default=0.0)
    seed: int = Field(default=0, ge=0)

    @model_validator(mode="after")
    def check_scenario(self) -> Self:
        total = self.p0 + self.p + self.pp
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"p0 + p + pp must equal 1, got {total!r}")
        if self.M % self.block_length != 0:
            raise ValueError(f"block_length={self.block_length} does not divide M={self.M}")
        return self

    @property
    def n_blocks(self) -> int:
        return self.M // self.block_length


class SimOutcome(BaseModel):
    """
    Observed tallies plus the ground truth the analyzer never sees.

    truth_counted[k][s] counts the counted pulses with k photons from source
    s (vacuum, decoy, signal order); truth_emitted the emitted ones. The last
    photon bucket collects every larger photon number.
    """

    scenario: SimScenario
    tallies: ObservedTallies
    truth_counted: list[list[int]]
    truth_emitted: list[list[int]]
    errors: dict[SourceName, int]
    realized_intensity: dict[SourceName, Interval]
    truth_delta1_signal: float = Field(ge=0.0, le=1.0)
    truth_delta1_decoy: float = Field(ge=0.0, le=1.0)

    @property
    def total_truth_counts(self) -> int:
        return sum(sum(row) for row in self.truth_counted)


class YieldEntry(BaseModel):
    """Empirical yield of k-photon pulses from one source."""

    k: int
    source: SourceName
    emitted: int
    counted: int
    yield_value: float
    std_error: float


class YieldTable(BaseModel):
    """Per-(k, source) empirical yields with binomial standard errors."""

    entries: list[YieldEntry] = Field(default_factory=list)

    def entry(self, k: int, source: SourceName) -> YieldEntry:
        for entry in self.entries:
            if entry.k == k and entry.source == source:
                return entry
        raise KeyError((k, source))

    def z_score(self, k: int, first: SourceName, second: SourceName) -> float:
        """|y1 - y2| / sqrt(se1^2 + se2^2); 0 when both errors vanish."""
        a = self.entry(k, first)
        b = self.entry(k, second)
        spread = (a.std_error**2 + b.std_error**2) ** 0.5
        if spread == 0.0:
            return 0.0 if a.yield_value == b.yield_value else float("inf")
        return abs(a.yield_value - b.yield_value) / spread


class VerificationReport(BaseModel):
    """Bound versus simulated truth."""

    status: ConditionStatus
    delta1_signal_bound: float
    truth_delta1_signal: float
    margin: float = Field(description="truth - bound; non-negative when the bound holds.")
    delta1_decoy_bound: float
    truth_delta1_decoy: float
    decoy_margin: float
    d0_worst: float
    sigma_mult: float
    tallies: Optional[ObservedTallies] = None

    @property
    def passed(self) -> bool:
        return self.status == ConditionStatus.PASS
