"""
Pydantic schemas for observed counts, their expectation-value intervals and
the single-photon fraction bounds derived from them.
"""

import math
from typing import Annotated, Optional
from typing_extensions import Self

from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.schemas.interval_schema import Interval

Probability = Annotated[float, Field(ge=0.0, le=1.0)]
Qber = Annotated[float, Field(ge=0.0, le=0.5)]

PROBABILITY_SUM_TOL = 1e-9


class ObservedTallies(BaseModel):
    """
    Counts observed from the vacuum (N0), decoy (Nd) and signal (Ns) sources
    after M pulses, with the source selection probabilities and the observed
    QBERs of the signal and decoy sources.
    """

    model_config = ConfigDict(frozen=True)

    M: int = Field(gt=0, description="Total number of pulses sent.")
    p0: Probability = Field(description="Probability a pulse is from the vacuum source.")
    p: Probability = Field(description="Probability a pulse is from the decoy source.")
    pp: Probability = Field(description="Probability a pulse is from the signal source.")

    N0: int = Field(ge=0, description="Counts caused by vacuum-source pulses.")
    Nd: int = Field(ge=0, description="Counts caused by decoy-source pulses.")
    Ns: int = Field(ge=0, description="Counts caused by signal-source pulses.")

    t0_signal: Qber = Field(default=0.0, description="Observed QBER of signal counts.")
    t0_decoy: Qber = Field(default=0.0, description="Observed QBER of decoy counts.")

    @model_validator(mode="after")
    def check_consistency(self) -> Self:
        total = self.p0 + self.p + self.pp
        if abs(total - 1.0) > PROBABILITY_SUM_TOL:
            raise ValueError(f"p0 + p + pp must equal 1, got {total!r}")
        for count_name, prob_name in (("N0", "p0"), ("Nd", "p"), ("Ns", "pp")):
            count = getattr(self, count_name)
            expected_pulses = getattr(self, prob_name) * self.M
            # a realized pulse count can exceed p*M, allow 10 standard deviations
            slack = 10.0 * math.sqrt(max(expected_pulses, 1.0))
            if count > expected_pulses + slack:
                raise ValueError(
                    f"{count_name}={count} exceeds {prob_name}*M={expected_pulses:.6g}"
                )
        return self

    @property
    def total_counts(self) -> int:
        return self.N0 + self.Nd + self.Ns

    @property
    def rate_vacuum(self) -> float:
        """Counting rate S0 = N0 / (p0 M)."""
        return self.N0 / (self.p0 * self.M) if self.p0 > 0 else 0.0

    @property
    def rate_decoy(self) -> float:
        """Counting rate S = Nd / (p M)."""
        return self.Nd / (self.p * self.M) if self.p > 0 else 0.0

    @property
    def rate_signal(self) -> float:
        """Counting rate S' = Ns / (pp M)."""
        return self.Ns / (self.pp * self.M) if self.pp > 0 else 0.0


class ExpectationIntervals(BaseModel):
    """
    Confidence intervals for the expected counts <N0>, <Nd>, <Ns> and the
    derived interval for D0.
    """

    model_config = ConfigDict(frozen=True)

    n0_lo: float = Field(ge=0.0)
    n0_hi: float = Field(ge=0.0)
    nd_lo: float = Field(ge=0.0)
    nd_hi: float = Field(ge=0.0)
    ns_lo: float = Field(ge=0.0)
    ns_hi: float = Field(ge=0.0)
    d0_lo: float = Field(ge=0.0)
    d0_hi: float = Field(ge=0.0)
    sigma_mult: float = Field(default=10.0, ge=0.0)

    @model_validator(mode="after")
    def check_order(self) -> Self:
        for name in ("n0", "nd", "ns", "d0"):
            lo = getattr(self, f"{name}_lo")
            hi = getattr(self, f"{name}_hi")
            if lo > hi:
                raise ValueError(f"{name}_lo={lo} exceeds {name}_hi={hi}")
        return self

    @property
    def n0(self) -> Interval:
        return Interval(lo=self.n0_lo, hi=self.n0_hi)

    @property
    def nd(self) -> Interval:
        return Interval(lo=self.nd_lo, hi=self.nd_hi)

    @property
    def ns(self) -> Interval:
        return Interval(lo=self.ns_lo, hi=self.ns_hi)

    @property
    def d0(self) -> Interval:
        return Interval(lo=self.d0_lo, hi=self.d0_hi)


class FractionBound(BaseModel):
    """
    Lower bounds on the single-photon count fractions of the signal and decoy
    sources, evaluated at one value of D0.
    """

    model_config = ConfigDict(frozen=True)

    d1_lo: float = Field(ge=0.0, description="Lower bound on D1.")
    n1s_expect_lo: float = Field(ge=0.0, description="<n1s'>^L")
    n1s_obs_lo: float = Field(ge=0.0, description="Observed single-photon signal counts lower bound.")
    n1d_expect_lo: float = Field(default=0.0, ge=0.0, description="<n1d>^L")
    n1d_obs_lo: float = Field(default=0.0, ge=0.0)
    delta1_signal_lo: float = Field(ge=0.0, le=1.0)
    delta1_decoy_lo: float = Field(ge=0.0, le=1.0)
    d0_used: float = Field(ge=0.0)

    @model_validator(mode="after")
    def check_observed_below_expected(self) -> Self:
        if self.n1s_obs_lo > self.n1s_expect_lo:
            raise ValueError("n1s_obs_lo exceeds n1s_expect_lo")
        return self


class BoundSummary(BaseModel):
    """Everything the `bound` mode reports: D0 interval, worst-case fractions and expected vacuum counts."""

    d0: Interval
    delta1_signal_lo: float
    delta1_decoy_lo: float
    d0_worst_signal: float
    d0_worst_decoy: float
    n1s_obs_lo: float
    vacuum_counts_decoy: Interval = Field(
        description="Expected decoy-source vacuum counts at the worst D0."
    )
    vacuum_counts_signal: Interval = Field(
        description="Expected signal-source vacuum counts at the worst D0."
    )
    asymptotic_delta1_signal: Optional[float] = None
    asymptotic_delta1_decoy: Optional[float] = None
    sigma_mult: float
    conditions: str
