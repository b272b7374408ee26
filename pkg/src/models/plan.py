"""
Network Plan Models
===================
Pydantic records describing dense MLP architectures and their real-valued
parameter counts.
"""

from enum import Enum
from typing import List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator


class Domain(str, Enum):
    REAL = "real"
    COMPLEX = "complex"


class WidthMode(str, Enum):
    FIXED = "fixed"
    BUDGET = "budget"


class NetworkPlan(BaseModel):
    """
    Width list of a dense MLP: input layer, k hidden layers, output layer.

    hidden_widths has k + 1 entries: the output width of the input layer
    followed by the output widths of the k hidden layers.
    """

    model_config = ConfigDict(frozen=True)

    domain: Domain
    input_dim: int = Field(..., ge=1)
    hidden_widths: List[int] = Field(..., min_length=1)
    output_dim: int = Field(..., ge=1)
    include_bias: bool = False
    budget: Optional[int] = None

    @field_validator("hidden_widths")
    @classmethod
    def _positive_widths(cls, widths: List[int]) -> List[int]:
        if any(w < 1 for w in widths):
            raise ValueError(f"All widths must be >= 1, got {widths}")
        return widths

    @property
    def k(self) -> int:
        """Number of hidden layers."""
        return len(self.hidden_widths) - 1

    @property
    def layer_shapes(self) -> List[Tuple[int, int]]:
        """(fan_in, fan_out) per dense layer, input layer first."""
        dims = [self.input_dim, *self.hidden_widths, self.output_dim]
        return list(zip(dims[:-1], dims[1:]))

    @property
    def param_count(self) -> int:
        """Real-valued parameters, honouring include_bias."""
        from src.core.capacity import count_mlp_params
        return count_mlp_params(self)

    @property
    def param_count_no_bias(self) -> int:
        from src.core.capacity import count_mlp_params
        return count_mlp_params(self, bias=False)

    @property
    def param_count_with_bias(self) -> int:
        from src.core.capacity import count_mlp_params
        return count_mlp_params(self, bias=True)

    @property
    def budget_deviation(self) -> Optional[int]:
        """Realized bias-free total minus the budget (None outside budget mode)."""
        if self.budget is None:
            return None
        return self.param_count_no_bias - self.budget

    def report(self) -> dict:
        """Serializable summary with both parameter totals."""
        return {
            "domain": self.domain.value,
            "input_dim": self.input_dim,
            "widths": list(self.hidden_widths),
            "output_dim": self.output_dim,
            "params_no_bias": self.param_count_no_bias,
            "params_with_bias": self.param_count_with_bias,
            "budget": self.budget,
            "budget_deviation": self.budget_deviation,
        }


__all__ = ["Domain", "WidthMode", "NetworkPlan"]
