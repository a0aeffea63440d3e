"""
Pydantic schemas for the per-run configuration file.
"""

from typing import Any, Optional
from typing_extensions import Self

from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.config.enums import OutputFormat, RunMode, SignalCountReading
from src.schemas.source_schema import IntensityInterval, SourceBounds
from src.schemas.tally_schema import ObservedTallies


def find_percent_strings(data: Any, prefix: str = "") -> list[str]:
    """Dotted keys of every string value containing a percent sign."""

    found: list[str] = []
    if isinstance(data, dict):
        for key, value in data.items():
            found += find_percent_strings(value, f"{prefix}{key}.")
    elif isinstance(data, list):
        for index, value in enumerate(data):
            found += find_percent_strings(value, f"{prefix}{index}.")
    elif isinstance(data, str) and "%" in data:
        found.append(prefix.rstrip("."))
    return found


class SourceSection(BaseModel):
    """
    Either nominal intensities with a relative error delta_m and a vacuum
    intensity cap, or explicit source bounds.
    """

    model_config = ConfigDict(extra="forbid")

    mu_decoy: Optional[float] = Field(default=None, gt=0.0)
    mu_signal: Optional[float] = Field(default=None, gt=0.0)
    delta_m: float = Field(default=0.0, ge=0.0, lt=1.0)
    vacuum_cap: float = Field(default=0.0, ge=0.0)
    bounds: Optional[SourceBounds] = None

    @model_validator(mode="after")
    def check_exactly_one(self) -> Self:
        has_intensities = self.mu_decoy is not None or self.mu_signal is not None
        if has_intensities and self.bounds is not None:
            raise ValueError("give either source intensities or source.bounds, not both")
        if not has_intensities and self.bounds is None:
            raise ValueError("give source intensities (mu_decoy, mu_signal) or source.bounds")
        if has_intensities and (self.mu_decoy is None or self.mu_signal is None):
            raise ValueError("mu_decoy and mu_signal must both be given")
        return self

    @property
    def is_coherent(self) -> bool:
        return self.bounds is None

    def intervals(self) -> tuple[IntensityInterval, IntensityInterval, IntensityInterval]:
        """Decoy, signal and vacuum intensity intervals."""
        return (
            IntensityInterval.around(self.mu_decoy, self.delta_m),
            IntensityInterval.around(self.mu_signal, self.delta_m),
            IntensityInterval(mu_lo=0.0, mu_hi=self.vacuum_cap),
        )


class CountsSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    N0: int = Field(ge=0)
    Nd: int = Field(ge=0)
    Ns: int = Field(ge=0)


class RatesSection(BaseModel):
    """Counting rates S0, S, S' per pulse of each source."""

    model_config = ConfigDict(extra="forbid")

    S0: float = Field(ge=0.0, le=1.0)
    S: float = Field(ge=0.0, le=1.0)
    Sp: float = Field(ge=0.0, le=1.0)


class TalliesSection(BaseModel):
    """Observed data, given as counts or as counting rates."""

    model_config = ConfigDict(extra="forbid")

    M: int = Field(gt=0)
    p0: float = Field(ge=0.0, le=1.0)
    p: float = Field(ge=0.0, le=1.0)
    pp: float = Field(ge=0.0, le=1.0)
    t0_signal: float = Field(default=0.0, ge=0.0, le=0.5)
    t0_decoy: float = Field(default=0.0, ge=0.0, le=0.5)
    counts: Optional[CountsSection] = None
    rates: Optional[RatesSection] = None

    @model_validator(mode="after")
    def check_exactly_one(self) -> Self:
        if self.counts is not None and self.rates is not None:
            raise ValueError("give either tallies.counts or tallies.rates, not both")
        if self.counts is None and self.rates is None:
            raise ValueError("give tallies.counts or tallies.rates")
        return self

    def to_tallies(self) -> ObservedTallies:
        """Counts are canonical; rates convert as N = round(S p M)."""

        if self.counts is not None:
            N0, Nd, Ns = self.counts.N0, self.counts.Nd, self.counts.Ns
        else:
            N0 = round(self.rates.S0 * self.p0 * self.M)
            Nd = round(self.rates.S * self.p * self.M)
            Ns = round(self.rates.Sp * self.pp * self.M)
        return ObservedTallies(
            M=self.M,
            p0=self.p0,
            p=self.p,
            pp=self.pp,
            N0=N0,
            Nd=Nd,
            Ns=Ns,
            t0_signal=self.t0_signal,
            t0_decoy=self.t0_decoy,
        )


class SweepSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    delta_m_list: list[float] = Field(
        default_factory=lambda: [0.03, 0.025, 0.02, 0.015, 0.01, 0.005, 0.0]
    )
    vacuum_caps: list[float] = Field(default_factory=lambda: [0.0, 0.005, 0.01], min_length=1)


class AppendixSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    lambda_d: float = Field(default=0.01, gt=0.0, le=1.0)
    lambda_s: float = Field(default=0.05, gt=0.0, le=1.0)
    m: int = Field(default=10, ge=1)
    eps: float = Field(default=0.01, ge=0.0, lt=1.0)
    eta_ratio: float = Field(default=5.0, gt=0.0)


class OutputSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    format: Optional[OutputFormat] = None
    path: Optional[str] = None


class RunConfig(BaseModel):
    """A validated run configuration."""

    model_config = ConfigDict(extra="forbid")

    mode: RunMode = Field(default=RunMode.BOUND)
    sigma_mult: Optional[float] = Field(default=None, ge=0.0)
    grid_n: Optional[int] = Field(default=None, ge=2)
    refine_points: Optional[int] = Field(default=None, ge=0)
    reading: Optional[SignalCountReading] = None
    seed: Optional[int] = Field(default=None, ge=0)
    workers: Optional[int] = Field(default=None, ge=1)

    source: Optional[SourceSection] = None
    tallies: Optional[TalliesSection] = None
    sweep: SweepSection = Field(default_factory=SweepSection)
    simulation: Optional[dict[str, Any]] = None
    appendix: AppendixSection = Field(default_factory=AppendixSection)
    output: OutputSection = Field(default_factory=OutputSection)

    @model_validator(mode="before")
    @classmethod
    def reject_percent_signs(cls, data: Any) -> Any:
        offending = find_percent_strings(data)
        if offending:
            raise ValueError(
                "percent signs are not accepted, write fractions as plain decimals: "
                + ", ".join(offending)
            )
        return data

    @model_validator(mode="after")
    def check_mode_requirements(self) -> Self:
        required = {
            RunMode.BOUND: ("source", "tallies"),
            RunMode.KEYRATE: ("source", "tallies"),
            RunMode.SWEEP: ("source", "tallies"),
            RunMode.SIMULATE: ("simulation",),
            RunMode.APPENDIX_DEMO: (),
        }[self.mode]
        missing = [name for name in required if getattr(self, name) is None]
        if missing:
            raise ValueError(f"mode '{self.mode.value}' requires section(s): {', '.join(missing)}")
        if self.mode == RunMode.SWEEP and not self.source.is_coherent:
            raise ValueError("mode 'sweep' requires source intensities, not explicit bounds")
        return self
