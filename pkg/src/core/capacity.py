"""
Capacity Planning
=================
Real-valued parameter counting for dense MLPs and construction of
parameter-matched real/complex architecture pairs.

Two matching schemes:
- fixed: real width m everywhere, complex widths alternate m/2, m, m/2, ...
  giving identical per-layer parameter counts for even k and even m
- budget: constant widths solved from a total real-parameter budget

A complex weight counts as two real parameters.

Usage:
    from src.core.capacity import build_matched_pair

    real_plan, complex_plan = build_matched_pair(
        "budget", input_dim=784, output_dim=10, k=2, budget=500_000
    )
"""

import math
from typing import List, Optional, Tuple, Union

from src.models.plan import Domain, NetworkPlan, WidthMode
from src.utils.logger import log_function_call


# -----------------------------------------------------------------------------
# Exceptions
# -----------------------------------------------------------------------------

class CapacityError(Exception):
    """Base class for capacity planning errors."""
    pass


class PlanValidationError(CapacityError):
    """Raised for invalid dimensions, odd depths or odd alternating widths."""
    pass


class BudgetTooSmallError(CapacityError):
    """Raised when a budget cannot afford a single unit per layer."""
    pass


# -----------------------------------------------------------------------------
# Counting
# -----------------------------------------------------------------------------

def _domain(domain: Union[str, Domain]) -> Domain:
    try:
        return Domain(domain)
    except ValueError:
        raise PlanValidationError(f"Unknown domain '{domain}' (expected 'real' or 'complex')")


def count_dense_params(n: int, m: int, domain: Union[str, Domain], bias: bool = False) -> int:
    """
    Real-valued parameters of one n -> m dense layer.

    real: n*m (+ m); complex: 2*n*m (+ 2m)

    Raises:
        PlanValidationError: If n or m is below 1
    """
    if n < 1 or m < 1:
        raise PlanValidationError(f"Layer dimensions must be >= 1, got n={n}, m={m}")
    count = n * m + (m if bias else 0)
    return 2 * count if _domain(domain) is Domain.COMPLEX else count


def layer_param_counts(plan: NetworkPlan, bias: Optional[bool] = None) -> List[int]:
    """Per-layer real-valued parameter counts, input layer first."""
    use_bias = plan.include_bias if bias is None else bias
    return [count_dense_params(n, m, plan.domain, use_bias) for n, m in plan.layer_shapes]


def count_mlp_params(plan: NetworkPlan, bias: Optional[bool] = None) -> int:
    """Total real-valued parameters over input, hidden and output layers."""
    return sum(layer_param_counts(plan, bias))


# -----------------------------------------------------------------------------
# Fixed-width Scheme
# -----------------------------------------------------------------------------

def _check_depth(k: int) -> None:
    if k < 0 or k % 2:
        raise PlanValidationError(f"Number of hidden layers k must be even and >= 0, got {k}")


def alternating_widths(m: int, k: int, domain: Union[str, Domain]) -> List[int]:
    """
    Width list (length k + 1) for the fixed-width scheme.

    real: [m] * (k + 1); complex: [m/2, m, m/2, ..., m/2]

    Raises:
        PlanValidationError: If m is odd or below 2, or k is odd or negative
    """
    _check_depth(k)
    if m < 2 or m % 2:
        raise PlanValidationError(f"Width m must be even and >= 2, got {m}")
    if _domain(domain) is Domain.REAL:
        return [m] * (k + 1)
    return [m // 2 if i % 2 == 0 else m for i in range(k + 1)]


# -----------------------------------------------------------------------------
# Budget Scheme
# -----------------------------------------------------------------------------

def round_half_up(value: float) -> int:
    """Nearest integer, halves rounded up (Python's round() rounds to even)."""
    return int(math.floor(value + 0.5))


def solve_budget_width(
    p: int,
    n: int,
    c: int,
    k: int,
    domain: Union[str, Domain],
    rounded: bool = True,
) -> Union[int, float]:
    """
    Constant width m such that the bias-free parameter total equals p.

    The total is s * (n*m + k*m^2 + m*c) with s = 1 (real) or 2 (complex), so
    for k > 0 m is the positive root of k*m^2 + (n + c)*m - p/s = 0 and for
    k = 0 it is p / (s * (n + c)).

    Raises:
        PlanValidationError: For invalid dimensions or depth
        BudgetTooSmallError: If p < n + c or the rounded width is below 1
    """
    _check_depth(k)
    if n < 1 or c < 1:
        raise PlanValidationError(f"Input and output dimensions must be >= 1, got n={n}, c={c}")
    if p < n + c:
        raise BudgetTooSmallError(
            f"Budget {p} is below n + c = {n + c}; no width can satisfy it"
        )
    scale = 2.0 if _domain(domain) is Domain.COMPLEX else 1.0
    if k == 0:
        width = p / (scale * (n + c))
    else:
        half = (n + c) / (2.0 * k)
        width = -half + math.sqrt(half * half + p / (scale * k))
    if not rounded:
        return width
    m = round_half_up(width)
    if m < 1:
        raise BudgetTooSmallError(
            f"Budget {p} yields width {width:.3f} for the {Domain(domain).value} network; need >= 1"
        )
    return m


def budget_width_real(p: int, n: int, c: int, k: int) -> int:
    return solve_budget_width(p, n, c, k, Domain.REAL)


def budget_width_complex(p: int, n: int, c: int, k: int) -> int:
    return solve_budget_width(p, n, c, k, Domain.COMPLEX)


# -----------------------------------------------------------------------------
# Matched Pairs
# -----------------------------------------------------------------------------

@log_function_call
def build_matched_pair(
    mode: Union[str, WidthMode],
    *,
    input_dim: int,
    output_dim: int,
    k: int,
    width: Optional[int] = None,
    budget: Optional[int] = None,
) -> Tuple[NetworkPlan, NetworkPlan]:
    """
    Build a parameter-matched (real, complex) plan pair.

    Args:
        mode: "fixed" (requires width) or "budget" (requires budget)
        input_dim: Number of input features n
        output_dim: Number of classes c
        k: Even number of hidden layers
        width: Real width m for the fixed scheme
        budget: Real-valued parameter budget for the budget scheme

    Returns:
        (real plan, complex plan)

    Raises:
        PlanValidationError: Missing or invalid mode parameters
        BudgetTooSmallError: Propagated from the width solver
    """
    try:
        mode = WidthMode(mode)
    except ValueError:
        raise PlanValidationError(f"Unknown width mode '{mode}' (expected 'fixed' or 'budget')")

    if mode is WidthMode.FIXED:
        if width is None:
            raise PlanValidationError("Fixed width mode requires a width m")
        real_widths = alternating_widths(width, k, Domain.REAL)
        complex_widths = alternating_widths(width, k, Domain.COMPLEX)
        plan_budget = None
    else:
        if budget is None or budget < 1:
            raise PlanValidationError("Budget mode requires a positive budget")
        real_widths = [budget_width_real(budget, input_dim, output_dim, k)] * (k + 1)
        complex_widths = [budget_width_complex(budget, input_dim, output_dim, k)] * (k + 1)
        plan_budget = budget

    common = dict(input_dim=input_dim, output_dim=output_dim, budget=plan_budget)
    real_plan = NetworkPlan(domain=Domain.REAL, hidden_widths=real_widths, **common)
    complex_plan = NetworkPlan(domain=Domain.COMPLEX, hidden_widths=complex_widths, **common)
    return real_plan, complex_plan


__all__ = [
    "CapacityError",
    "PlanValidationError",
    "BudgetTooSmallError",
    "count_dense_params",
    "layer_param_counts",
    "count_mlp_params",
    "alternating_widths",
    "round_half_up",
    "solve_budget_width",
    "budget_width_real",
    "budget_width_complex",
    "build_matched_pair",
]
