"""
Shared fixtures: the published observed data and the coherent source bounds
used across the test suites.
"""

import pytest

from src.schemas.source_schema import IntensityInterval
from src.schemas.tally_schema import ObservedTallies
from src.services.source_model import SourceModel

FIBRE_M = 5_222_000_000
FIBRE_RATES = {"S0": 6.711e-6, "S": 4.611e-5, "Sp": 1.262e-4}
MU_DECOY = 0.2
MU_SIGNAL = 0.6


@pytest.fixture(scope="session")
def fibre_tallies() -> ObservedTallies:
    """Observed counts of the 102.7 km experiment, N = round(S p M)."""

    return ObservedTallies(
        M=FIBRE_M,
        p0=0.1,
        p=0.4,
        pp=0.5,
        N0=round(FIBRE_RATES["S0"] * 0.1 * FIBRE_M),
        Nd=round(FIBRE_RATES["S"] * 0.4 * FIBRE_M),
        Ns=round(FIBRE_RATES["Sp"] * 0.5 * FIBRE_M),
        t0_signal=0.0358,
        t0_decoy=0.09098,
    )


@pytest.fixture
def exact_bounds():
    """Error-free coherent sources at mu = 0.2, mu' = 0.6 and a true vacuum."""

    return SourceModel.coherent_bounds(
        decoy=IntensityInterval(mu_lo=MU_DECOY, mu_hi=MU_DECOY),
        signal=IntensityInterval(mu_lo=MU_SIGNAL, mu_hi=MU_SIGNAL),
        vacuum=IntensityInterval(mu_lo=0.0, mu_hi=0.0),
    )


@pytest.fixture
def noisy_bounds():
    """Coherent sources with 3% intensity error and a vacuum source below 1%."""

    return SourceModel.coherent_bounds(
        decoy=IntensityInterval.around(MU_DECOY, 0.03),
        signal=IntensityInterval.around(MU_SIGNAL, 0.03),
        vacuum=IntensityInterval(mu_lo=0.0, mu_hi=0.01),
    )
