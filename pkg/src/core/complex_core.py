"""
Complex Arithmetic Core
=======================
Complex scalars and split-plane complex matrices, Cartesian and polar
multiplication, the augmented 2x2 real-block representation, and a numeric
Cauchy-Riemann check.

A ComplexTensor stores two real numpy planes (re, im) of identical shape.
Every product is built from real matrix products so that backpropagation can
treat the two planes as independent real parameters.

Usage:
    from src.core.complex_core import ComplexTensor, cmatmul

    x = ComplexTensor.from_complex(np.array([[1 + 2j, 3 - 1j]]))
    W = ComplexTensor.from_complex(np.ones((2, 4)) * (0.5 + 0.5j))
    z = cmatmul(x, W)
"""

import math
from dataclasses import dataclass
from typing import Callable, Tuple, Union

import numpy as np


# -----------------------------------------------------------------------------
# Exceptions
# -----------------------------------------------------------------------------

class ComplexArithmeticError(Exception):
    """Base class for complex arithmetic errors."""
    pass


class DimensionError(ComplexArithmeticError):
    """Raised when operand shapes are incompatible."""
    pass


class EvaluationError(ComplexArithmeticError):
    """Raised when a function evaluates to a non-finite value near a probe point."""
    pass


# -----------------------------------------------------------------------------
# Scalars
# -----------------------------------------------------------------------------

@dataclass(frozen=True)
class ComplexScalar:
    """A complex number x + iy held as two floats."""

    re: float
    im: float = 0.0

    @classmethod
    def from_complex(cls, value: complex) -> "ComplexScalar":
        value = complex(value)
        return cls(value.real, value.imag)

    @classmethod
    def from_polar(cls, r: float, phi: float) -> "ComplexScalar":
        return cls(r * math.cos(phi), r * math.sin(phi))

    def to_complex(self) -> complex:
        return complex(self.re, self.im)

    def conj(self) -> "ComplexScalar":
        return ComplexScalar(self.re, -self.im)

    @property
    def magnitude(self) -> float:
        return math.hypot(self.re, self.im)

    def __neg__(self) -> "ComplexScalar":
        return ComplexScalar(-self.re, -self.im)


Polar = Tuple[float, float]


def cmul(z1: ComplexScalar, z2: ComplexScalar) -> ComplexScalar:
    """(a+ib)(c+id) = (ac - bd) + i(ad + bc)."""
    a, b = z1.re, z1.im
    c, d = z2.re, z2.im
    return ComplexScalar(a * c - b * d, a * d + b * c)


def cadd(z1: ComplexScalar, z2: ComplexScalar) -> ComplexScalar:
    return ComplexScalar(z1.re + z2.re, z1.im + z2.im)


def conj(z: ComplexScalar) -> ComplexScalar:
    return z.conj()


def magnitude(z: ComplexScalar) -> float:
    return z.magnitude


def wrap_phase(phi: float) -> float:
    """Wrap an angle into (-pi, pi]."""
    wrapped = math.remainder(phi, 2.0 * math.pi)
    if wrapped <= -math.pi:
        wrapped += 2.0 * math.pi
    return wrapped


def to_polar(z: ComplexScalar) -> Polar:
    """
    Convert to (r, phi) with phi = atan2(y, x) in (-pi, pi].

    The origin maps to (0, 0).
    """
    if z.re == 0.0 and z.im == 0.0:
        return (0.0, 0.0)
    phi = math.atan2(z.im, z.re)
    # atan2 returns -pi for (-x, -0.0); fold onto the closed end of the interval
    if phi == -math.pi:
        phi = math.pi
    return (math.hypot(z.re, z.im), phi)


def from_polar(p: Polar) -> ComplexScalar:
    r, phi = p
    return ComplexScalar.from_polar(r, phi)


def polar_mul(p1: Polar, p2: Polar) -> Polar:
    """Multiply in polar form: magnitudes multiply, phases add (wrapped)."""
    r1, phi1 = p1
    r2, phi2 = p2
    if r1 < 0 or r2 < 0:
        raise ValueError(f"Polar magnitudes must be non-negative, got {r1} and {r2}")
    return (r1 * r2, wrap_phase(phi1 + phi2))


# -----------------------------------------------------------------------------
# Split-plane Tensors
# -----------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ComplexTensor:
    """
    Matrix of complex numbers stored as paired real planes.

    Attributes:
        re: Real plane, 2-D float64 array
        im: Imaginary plane, same shape as re
    """

    re: np.ndarray
    im: np.ndarray

    def __post_init__(self) -> None:
        re = np.atleast_2d(np.asarray(self.re, dtype=np.float64))
        im = np.atleast_2d(np.asarray(self.im, dtype=np.float64))
        if re.shape != im.shape:
            raise DimensionError(
                f"Real and imaginary planes differ in shape: {re.shape} vs {im.shape}"
            )
        object.__setattr__(self, "re", re)
        object.__setattr__(self, "im", im)

    # --- construction ---------------------------------------------------------

    @classmethod
    def from_complex(cls, values) -> "ComplexTensor":
        arr = np.asarray(values, dtype=np.complex128)
        if arr.ndim == 0:
            arr = arr.reshape(1, 1)
        return cls(arr.real.copy(), arr.imag.copy())

    @classmethod
    def from_real(cls, values) -> "ComplexTensor":
        re = np.asarray(values, dtype=np.float64)
        return cls(re, np.zeros_like(re))

    @classmethod
    def from_scalar(cls, z: ComplexScalar) -> "ComplexTensor":
        return cls(np.array([[z.re]]), np.array([[z.im]]))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "ComplexTensor":
        return cls(np.zeros((rows, cols)), np.zeros((rows, cols)))

    # --- views ----------------------------------------------------------------

    @property
    def shape(self) -> Tuple[int, int]:
        return self.re.shape

    @property
    def rows(self) -> int:
        return self.re.shape[0]

    @property
    def cols(self) -> int:
        return self.re.shape[1]

    @property
    def is_real(self) -> bool:
        """True when the imaginary plane is identically zero."""
        return not self.im.any()

    def to_complex(self) -> np.ndarray:
        return self.re + 1j * self.im

    def scalar(self, row: int = 0, col: int = 0) -> ComplexScalar:
        return ComplexScalar(float(self.re[row, col]), float(self.im[row, col]))

    def conj(self) -> "ComplexTensor":
        return ComplexTensor(self.re, -self.im)

    @property
    def T(self) -> "ComplexTensor":
        return ComplexTensor(self.re.T, self.im.T)

    def abs(self) -> np.ndarray:
        return np.hypot(self.re, self.im)

    def rows_at(self, index) -> "ComplexTensor":
        """Select batch rows (fancy index or slice)."""
        return ComplexTensor(self.re[index], self.im[index])

    def copy(self) -> "ComplexTensor":
        return ComplexTensor(self.re.copy(), self.im.copy())

    # --- elementwise ----------------------------------------------------------

    def __add__(self, other: "ComplexTensor") -> "ComplexTensor":
        # numpy broadcasting covers the (1 x m) bias row against a batch
        try:
            return ComplexTensor(self.re + other.re, self.im + other.im)
        except ValueError as e:
            raise DimensionError(f"Cannot add shapes {self.shape} and {other.shape}") from e

    def __sub__(self, other: "ComplexTensor") -> "ComplexTensor":
        return ComplexTensor(self.re - other.re, self.im - other.im)

    def __neg__(self) -> "ComplexTensor":
        return ComplexTensor(-self.re, -self.im)

    def scale(self, factor: float) -> "ComplexTensor":
        return ComplexTensor(self.re * factor, self.im * factor)

    def __repr__(self) -> str:
        return f"ComplexTensor(shape={self.shape}, real={self.is_real})"


def cmatmul(x: ComplexTensor, W: ComplexTensor) -> ComplexTensor:
    """
    Complex matrix product from four real products.

    Re(xW) = Re(x)Re(W) - Im(x)Im(W)
    Im(xW) = Im(x)Re(W) + Re(x)Im(W)

    When Im(x) is identically zero the two products against it are skipped;
    the result is bit-identical because those products are exact zeros.

    Raises:
        DimensionError: If x.cols != W.rows
    """
    if x.cols != W.rows:
        raise DimensionError(
            f"Cannot multiply {x.rows}x{x.cols} by {W.rows}x{W.cols}: inner dimensions differ"
        )
    if x.is_real:
        return ComplexTensor(x.re @ W.re, x.re @ W.im)
    re = x.re @ W.re - x.im @ W.im
    im = x.im @ W.re + x.re @ W.im
    return ComplexTensor(re, im)


# -----------------------------------------------------------------------------
# Augmented Representation
# -----------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class AugmentedMatrix:
    """Real (2r x 2c) matrix holding the block [[a, -b], [b, a]] for each entry a+ib."""

    data: np.ndarray

    @property
    def shape(self) -> Tuple[int, int]:
        return self.data.shape

    def __matmul__(self, other: "AugmentedMatrix") -> "AugmentedMatrix":
        if self.data.shape[1] != other.data.shape[0]:
            raise DimensionError(
                f"Cannot multiply augmented {self.data.shape} by {other.data.shape}"
            )
        return AugmentedMatrix(self.data @ other.data)


def to_augmented(W: Union[ComplexTensor, ComplexScalar]) -> AugmentedMatrix:
    """Map each entry a+ib to the 2x2 block [[a, -b], [b, a]]."""
    if isinstance(W, ComplexScalar):
        W = ComplexTensor.from_scalar(W)
    rows, cols = W.shape
    out = np.empty((2 * rows, 2 * cols))
    out[0::2, 0::2] = W.re
    out[0::2, 1::2] = -W.im
    out[1::2, 0::2] = W.im
    out[1::2, 1::2] = W.re
    return AugmentedMatrix(out)


def from_augmented(A: AugmentedMatrix, atol: float = 0.0) -> ComplexTensor:
    """
    Recover the complex matrix from its augmented form.

    Raises:
        DimensionError: If the block structure is violated
    """
    data = A.data
    if data.ndim != 2 or data.shape[0] % 2 or data.shape[1] % 2:
        raise DimensionError(f"Augmented matrix must have even dimensions, got {data.shape}")
    a, minus_b = data[0::2, 0::2], data[0::2, 1::2]
    b, d = data[1::2, 0::2], data[1::2, 1::2]
    if not (np.allclose(a, d, rtol=0.0, atol=atol) and np.allclose(minus_b, -b, rtol=0.0, atol=atol)):
        raise DimensionError("Matrix does not have the [[a, -b], [b, a]] block structure")
    return ComplexTensor(a.copy(), b.copy())


def augmented_matmul(x: ComplexTensor, W: ComplexTensor) -> ComplexTensor:
    """Complex product computed as a product of augmented real matrices."""
    if x.cols != W.rows:
        raise DimensionError(
            f"Cannot multiply {x.rows}x{x.cols} by {W.rows}x{W.cols}: inner dimensions differ"
        )
    return from_augmented(to_augmented(x) @ to_augmented(W), atol=1e-9)


# -----------------------------------------------------------------------------
# Complex Differentiability
# -----------------------------------------------------------------------------

@dataclass(frozen=True)
class CauchyRiemannResult:
    """
    Outcome of a numeric Cauchy-Riemann check.

    Attributes:
        holds: Both residuals within tolerance
        residual_re: du/dx - dv/dy
        residual_im: du/dy + dv/dx
    """

    holds: bool
    residual_re: float
    residual_im: float

    def __bool__(self) -> bool:
        return self.holds


def _as_complex(z: Union[ComplexScalar, complex]) -> complex:
    return z.to_complex() if isinstance(z, ComplexScalar) else complex(z)


def _evaluate(f: Callable[[complex], complex], point: complex) -> complex:
    value = complex(f(point))
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise EvaluationError(f"Function is not finite at {point}: {value}")
    return value


def cauchy_riemann_check(
    f: Callable[[complex], complex],
    z: Union[ComplexScalar, complex],
    h: float = 1e-5,
    tol: float = 1e-4,
) -> CauchyRiemannResult:
    """
    Test complex differentiability of f at z with central differences.

    With f = u + iv, the Cauchy-Riemann equations require du/dx = dv/dy and
    du/dy = -dv/dx.

    Args:
        f: Function on Python complex numbers
        z: Probe point
        h: Difference step (> 0)
        tol: Maximum allowed absolute residual

    Returns:
        CauchyRiemannResult with both residuals

    Raises:
        EvaluationError: If f is non-finite at any probe point
    """
    if h <= 0:
        raise ValueError(f"Step must be positive, got {h}")
    z0 = _as_complex(z)

    fx_plus = _evaluate(f, z0 + h)
    fx_minus = _evaluate(f, z0 - h)
    fy_plus = _evaluate(f, z0 + 1j * h)
    fy_minus = _evaluate(f, z0 - 1j * h)

    d_dx = (fx_plus - fx_minus) / (2.0 * h)
    d_dy = (fy_plus - fy_minus) / (2.0 * h)
    du_dx, dv_dx = d_dx.real, d_dx.imag
    du_dy, dv_dy = d_dy.real, d_dy.imag

    residual_re = du_dx - dv_dy
    residual_im = du_dy + dv_dx
    holds = abs(residual_re) <= tol and abs(residual_im) <= tol
    return CauchyRiemannResult(holds, residual_re, residual_im)


__all__ = [
    "ComplexArithmeticError",
    "DimensionError",
    "EvaluationError",
    "ComplexScalar",
    "ComplexTensor",
    "AugmentedMatrix",
    "CauchyRiemannResult",
    "cmul",
    "cadd",
    "conj",
    "magnitude",
    "wrap_phase",
    "to_polar",
    "from_polar",
    "polar_mul",
    "to_augmented",
    "from_augmented",
    "augmented_matmul",
    "cmatmul",
    "cauchy_riemann_check",
]
