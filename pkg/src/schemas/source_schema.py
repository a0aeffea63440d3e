"""
Pydantic schemas for the photon-number bounds of the vacuum, decoy and signal
sources and for the report on their admissibility conditions.
"""

from typing import Annotated, Optional
from typing_extensions import Self

from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.config.enums import BoundOrigin, ConditionStatus

Probability = Annotated[float, Field(ge=0.0, le=1.0)]


class IntensityInterval(BaseModel):
    """Bounded mean photon number [mu_lo, mu_hi] of one source."""

    model_config = ConfigDict(frozen=True)

    mu_lo: float = Field(ge=0.0)
    mu_hi: float = Field(ge=0.0)

    @model_validator(mode="after")
    def check_order(self) -> Self:
        if self.mu_lo > self.mu_hi:
            raise ValueError(
                f"intensity lower bound {self.mu_lo} exceeds upper bound {self.mu_hi}"
            )
        return self

    @classmethod
    def around(cls, mu: float, delta: float) -> "IntensityInterval":
        """The interval [mu(1 - delta), mu(1 + delta)] for a relative error delta."""
        return cls(mu_lo=mu * (1.0 - delta), mu_hi=mu * (1.0 + delta))

    @property
    def center(self) -> float:
        return 0.5 * (self.mu_lo + self.mu_hi)


class SourceBounds(BaseModel):
    """
    Lower/upper bounds on the Fock coefficients of the three sources.

    a* are decoy-source coefficients, ap* signal-source coefficients and b0_lo
    the lower bound on the vacuum coefficient of the vacuum source. The upper
    bound on its single-photon coefficient is taken as 1 - b0_lo.

    Coefficients beyond two photons enter only through the tail ratios:
    tail_ratio_decoy certifies inf_{k>=2} a_k^L / b_k^U and tail_ratio_signal
    certifies inf_{k>=2} a_k'^L / a_k^U.
    """

    model_config = ConfigDict(frozen=True)

    a0_lo: Probability
    a0_hi: Probability
    a1_lo: Probability
    a1_hi: Probability
    a2_lo: Probability
    a2_hi: Probability

    ap0_lo: Probability
    ap0_hi: Probability
    ap1_lo: Probability
    ap1_hi: Probability
    ap2_lo: Probability
    ap2_hi: Probability

    b0_lo: Probability

    tail_ratio_decoy: Optional[float] = Field(default=None, ge=0.0)
    tail_ratio_signal: Optional[float] = Field(default=None, ge=0.0)

    origin: BoundOrigin = Field(default=BoundOrigin.EXPLICIT)

    @model_validator(mode="after")
    def check_order(self) -> Self:
        for name in ("a0", "a1", "a2", "ap0", "ap1", "ap2"):
            lo = getattr(self, f"{name}_lo")
            hi = getattr(self, f"{name}_hi")
            if lo > hi:
                raise ValueError(f"{name}_lo={lo} exceeds {name}_hi={hi}")
        return self

    @property
    def b1_hi(self) -> float:
        """Upper bound on the single-photon coefficient of the vacuum source."""
        return 1.0 - self.b0_lo

    @property
    def fact2_denominator(self) -> float:
        """a1^L - a0^L (1 - b0^L); must be strictly positive."""
        return self.a1_lo - self.a0_lo * (1.0 - self.b0_lo)

    @property
    def fact3_denominator(self) -> float:
        """a1^U a2'^L - a1'^L a2^U; must be strictly positive."""
        return self.a1_hi * self.ap2_lo - self.ap1_lo * self.a2_hi

    @property
    def vacuum_coefficient_gap(self) -> float:
        """a2'^L a0^U - a2^U a0'^L, the weight of D0 in the single-photon bound."""
        return self.ap2_lo * self.a0_hi - self.a2_hi * self.ap0_lo


class ConditionCheck(BaseModel):
    """One named admissibility check."""

    name: str
    status: ConditionStatus
    detail: str = ""


class ConditionReport(BaseModel):
    """
    Result of validating source bounds. Bound operations refuse to run unless
    every check passes; UNVERIFIED counts as not passing.
    """

    checks: list[ConditionCheck] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.status == ConditionStatus.PASS for check in self.checks)

    @property
    def failures(self) -> list[ConditionCheck]:
        return [check for check in self.checks if check.status != ConditionStatus.PASS]

    def status_of(self, name: str) -> ConditionStatus:
        for check in self.checks:
            if check.name == name:
                return check.status
        raise KeyError(name)

    def summary(self) -> str:
        return "; ".join(
            f"{check.name}={check.status.value}" + (f" ({check.detail})" if check.detail else "")
            for check in self.checks
        )
