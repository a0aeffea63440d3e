"""
This module provides utility classes for common numeric functionality shared
by the bound, key-rate and simulation services.
"""

import math

import numpy as np

from src.logger.default_logger import get_logger

logger = get_logger(__name__)


class NumericUtil:
    """Clamping, grids and tolerance helpers used throughout the services."""

    @staticmethod
    def clamp(value: float, lower: float, upper: float) -> float:
        """
        Restricts a value to [lower, upper].

        Args:
            value (float): The value to clamp.
            lower (float): Lower limit.
            upper (float): Upper limit.

        Returns:
            float: The clamped value.
        """

        return min(max(value, lower), upper)

    @staticmethod
    def clamp_nonnegative(value: float, label: str = "") -> float:
        """Clamps a bound at 0; a negative raw value is logged at DEBUG."""

        if value < 0.0:
            if label:
                logger.debug(f"{label} evaluated to {value:.6g}, clamped to 0")
            return 0.0
        return value

    @staticmethod
    def clamp_fraction(value: float) -> float:
        """Clamps a fraction to [0, 1]."""

        return NumericUtil.clamp(value, 0.0, 1.0)

    @staticmethod
    def grid(lo: float, hi: float, n: int) -> np.ndarray:
        """
        Evenly spaced points on [lo, hi] including both endpoints. A zero-width
        interval yields a single point.
        """

        if hi <= lo:
            return np.array([lo], dtype=float)
        points = np.linspace(lo, hi, n)
        # linspace can miss hi by one ulp
        points[-1] = hi
        return points

    @staticmethod
    def relative_error(value: float, reference: float) -> float:
        """|value - reference| / |reference|, or the absolute error when reference is 0."""

        if reference == 0.0:
            return abs(value)
        return abs(value - reference) / abs(reference)

    @staticmethod
    def geq_with_tolerance(lhs: float, rhs: float, rel_tol: float) -> bool:
        """lhs >= rhs up to a tolerance relative to the larger magnitude."""

        if math.isinf(lhs) and lhs > 0:
            return True
        return lhs >= rhs - rel_tol * max(abs(lhs), abs(rhs))
