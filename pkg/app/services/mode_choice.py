"""
Value of travel time, generalized cost and the binary logit split AMT / air taxi.
"""
import numpy as np
from numpy.typing import ArrayLike

from app.models.schemas import ChoiceParams
from app.services.transport_options import ModeOption


def value_of_travel_time(gdp_per_capita: float, params: ChoiceParams = ChoiceParams()) -> float:
    """VTT in EUR per hour: 0.0003 * GDP - 0.3404, floored at zero."""
    return max(0.0, params.vtt_slope * gdp_per_capita + params.vtt_intercept)


def generalized_cost(option: ModeOption, vtt: float) -> float:
    """Monetary cost plus monetised travel time."""
    if not option.available:
        raise ValueError("generalized cost of an unavailable option is undefined")
    return option.cost_eur + vtt * option.time_h


def _logistic(gc_air: np.ndarray, gc_amt: np.ndarray, params: ChoiceParams) -> np.ndarray:
    u_air = params.beta_air + params.beta_gc * gc_air
    u_amt = params.beta_amt + params.beta_gc * gc_amt
    # exp overflow saturates the share to 0
    with np.errstate(over="ignore"):
        return 1.0 / (1.0 + np.exp(u_amt - u_air))


def air_taxi_share(gc_air: ArrayLike, gc_amt: ArrayLike, params: ChoiceParams = ChoiceParams()):
    """
    Logit probability of choosing the air taxi.

    Evaluated as 1 / (1 + exp(U_amt - U_air)), which equals
    exp(U_air) / (exp(U_air) + exp(U_amt)) without overflowing for large utility gaps.

    Args:
        gc_air: Generalized cost(s) of the air taxi in EUR
        gc_amt: Generalized cost(s) of the ground mode in EUR
        params: Utility coefficients

    Returns:
        Probability (or array of probabilities)
    """
    gc_air = np.asarray(gc_air, dtype=float)
    gc_amt = np.asarray(gc_amt, dtype=float)
    if not (np.all(np.isfinite(gc_air)) and np.all(np.isfinite(gc_amt))):
        raise ValueError("generalized costs must be finite")
    return _logistic(gc_air, gc_amt, params)[()]


def air_taxi_share_block(gc_air: np.ndarray, gc_amt: np.ndarray, available: np.ndarray,
                         params: ChoiceParams = ChoiceParams()) -> np.ndarray:
    """Air taxi shares for a block of OD pairs; pairs without a flight get 0."""
    safe_air = np.where(available, gc_air, 0.0)
    return np.where(available, _logistic(safe_air, gc_amt, params), 0.0)


def amt_share(gc_air: float, gc_amt: float, params: ChoiceParams = ChoiceParams()) -> float:
    """Complement of the air taxi share in the two-mode model."""
    return 1.0 - float(air_taxi_share(gc_air, gc_amt, params))


def choice_probability(air: ModeOption, amt: ModeOption, vtt: float,
                       params: ChoiceParams = ChoiceParams()) -> float:
    """Air taxi share for one OD pair; 0 when the air option is unavailable."""
    if not air.available:
        return 0.0
    return float(air_taxi_share(generalized_cost(air, vtt), generalized_cost(amt, vtt), params))
