"""
Pydantic schemas for key-rate results and the sweep over intensity errors.
"""

from typing import Optional

from pydantic import BaseModel, ConfigDict, Field

from src.config.enums import SignalCountReading


class RateReport(BaseModel):
    """Worst-case key rate over the scanned D0 values."""

    model_config = ConfigDict(frozen=True)

    rate: float = Field(ge=0.0, description="Final bits per signal pulse, 0 when there is no key.")
    key_fraction: float = Field(
        description="Unclamped minimum of delta1[1 - H(t1)] - H(t) per signal count."
    )
    d0_worst: float = Field(ge=0.0, description="D0 value attaining the minimum.")
    delta1_used: float = Field(ge=0.0, le=1.0)
    t1_used: Optional[float] = Field(
        default=None, description="t1 at the minimum; None when there was no single-photon credit."
    )
    t_used: float = Field(ge=0.0, le=0.5)
    grid_points: int = Field(ge=1)
    final_bits: float = Field(ge=0.0, description="Ns * max(key_fraction, 0).")
    remaining_bits_lo: float = Field(
        ge=0.0, description="Single-photon signal counts kept after sifting and error testing."
    )
    sigma_mult: float = Field(ge=0.0)
    reading: SignalCountReading = Field(default=SignalCountReading.TOTAL)

    @property
    def has_key(self) -> bool:
        return self.key_fraction > 0.0


class SweepCell(BaseModel):
    """One entry of the sweep table."""

    model_config = ConfigDict(frozen=True)

    row: str = Field(description="R for the asymptotic row, R1..Rn for the finite rows.")
    delta_m: float = Field(ge=0.0)
    vacuum_cap: float = Field(ge=0.0)
    asymptotic: bool
    report: RateReport


class SweepTable(BaseModel):
    """Rates over intensity errors, one row per vacuum cap plus an asymptotic row."""

    delta_m_list: list[float]
    vacuum_caps: list[float]
    cells: list[SweepCell] = Field(default_factory=list)

    @property
    def rows(self) -> list[str]:
        names: list[str] = []
        for cell in self.cells:
            if cell.row not in names:
                names.append(cell.row)
        return names

    def row(self, name: str) -> list[SweepCell]:
        """Cells of one row ordered as delta_m_list."""
        return [cell for cell in self.cells if cell.row == name]

    def cell(self, name: str, delta_m: float) -> SweepCell:
        for cell in self.cells:
            if cell.row == name and cell.delta_m == delta_m:
                return cell
        raise KeyError((name, delta_m))

    def records(self) -> list[dict]:
        """Flat records for machine output."""
        return [
            {
                "row": cell.row,
                "delta_m": cell.delta_m,
                "vacuum_cap": cell.vacuum_cap,
                "asymptotic": cell.asymptotic,
                "rate": cell.report.rate,
                "key_fraction": cell.report.key_fraction,
                "d0_worst": cell.report.d0_worst,
                "delta1_used": cell.report.delta1_used,
                "t1_used": cell.report.t1_used,
                "grid_points": cell.report.grid_points,
            }
            for cell in self.cells
        ]
