"""
Closed real interval used for every worst-case quantity the services propagate.
"""

from typing_extensions import Self

from pydantic import BaseModel, ConfigDict, Field, model_validator


class Interval(BaseModel):
    """A closed interval [lo, hi] with lo <= hi."""

    model_config = ConfigDict(frozen=True)

    lo: float = Field(description="Lower endpoint.")
    hi: float = Field(description="Upper endpoint.")

    @model_validator(mode="after")
    def check_order(self) -> Self:
        if self.lo > self.hi:
            raise ValueError(f"interval lower endpoint {self.lo} exceeds upper {self.hi}")
        return self

    @classmethod
    def point(cls, value: float) -> "Interval":
        """Zero-width interval at value."""
        return cls(lo=value, hi=value)

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lo + self.hi)

    @property
    def is_degenerate(self) -> bool:
        return self.lo == self.hi

    def contains(self, value: float, rel_tol: float = 0.0) -> bool:
        """Membership test with a tolerance relative to the endpoint magnitudes."""
        slack = rel_tol * max(abs(self.lo), abs(self.hi), 1.0)
        return self.lo - slack <= value <= self.hi + slack

    def clamped_below(self, floor: float = 0.0) -> "Interval":
        """Raises any endpoint below floor up to floor."""
        return Interval(lo=max(self.lo, floor), hi=max(self.hi, floor))
