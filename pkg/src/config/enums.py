"""
Holds application wide enums.
"""

from enum import Enum as PyEnum


class RunMode(str, PyEnum):
    """Subcommands understood by the management CLI"""

    BOUND = "bound"
    KEYRATE = "keyrate"
    SWEEP = "sweep"
    SIMULATE = "simulate"
    APPENDIX_DEMO = "appendix-demo"


class OutputFormat(str, PyEnum):
    """How run results are emitted"""

    HUMAN = "human"
    CSV = "csv"
    JSONL = "jsonl"


class ConditionStatus(str, PyEnum):
    """Outcome of a single admissibility check on the source bounds"""

    PASS = "PASS"
    FAIL = "FAIL"
    UNVERIFIED = "UNVERIFIED"


class SignalCountReading(str, PyEnum):
    """
    Which signal count enters the vacuum-error subtraction of t1'.

    TOTAL uses Ns (all signal counts), SIFTED uses Ns / 2.
    """

    TOTAL = "total"
    SIFTED = "sifted"


class IntensityLawKind(str, PyEnum):
    """Per-pulse intensity generators of the simulator"""

    STABLE = "stable"
    BLOCK = "block"
    UNIFORM = "uniform"


class BoundOrigin(str, PyEnum):
    """Where a set of source bounds came from"""

    COHERENT = "coherent"
    EXPLICIT = "explicit"


class SourceName(str, PyEnum):
    """The three sources of the protocol"""

    VACUUM = "vacuum"
    DECOY = "decoy"
    SIGNAL = "signal"
