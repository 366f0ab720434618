"""Numerical companion for first-order differential implications on functions with a fixed second coefficient."""

__version__ = "0.1.0"

from .bounds import (  # noqa: E402
    THEOREMS,
    TargetRegion,
    TheoremId,
    TheoremSpec,
    alpha_convex_cubic,
    alpha_marx_strohhacker,
    alpha_nunokawa,
    alpha_parabola,
    alpha_ratio,
    alpha_sqrt_derivative,
    get_theorem,
    min_m,
    nunokawa_residual,
    sigma_bound,
)
from .series import TruncatedSeries  # noqa: E402
