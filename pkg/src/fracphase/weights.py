"""Probability weights on (0, 1) used to average the classical energy in time.

Every weight is stored in Jacobi form

    omega(theta) = theta**left * (1 - theta)**right * regular(theta)

so that the endpoint singularities are absorbed exactly into a Gauss-Jacobi
rule and only the smooth ``regular`` part is sampled at the nodes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.special import roots_jacobi

from .errors import NegativeWeight, NonNormalized

DEFAULT_NODES = 32


def beta_reflection(alpha: float) -> float:
    """``B(alpha, 1 - alpha) = pi / sin(pi alpha)``."""
    return math.pi / math.sin(math.pi * alpha)


@lru_cache(maxsize=64)
def _jacobi_on_unit_interval(n: int, left: float, right: float) -> tuple[np.ndarray, np.ndarray]:
    # roots_jacobi integrates against (1 - x)^a (1 + x)^b on [-1, 1]
    with np.errstate(invalid="ignore", divide="ignore"):
        x, w = roots_jacobi(n, right, left)
    theta = 0.5 * (1.0 + x)
    w = w * 2.0 ** (-(left + right + 1.0))
    theta.setflags(write=False)
    w.setflags(write=False)
    return theta, w


def gauss_jacobi_rule(n: int, left: float, right: float) -> tuple[np.ndarray, np.ndarray]:
    """Nodes/weights for ``int_0^1 theta^left (1-theta)^right f(theta) dtheta``."""
    if left <= -1 or right <= -1:
        raise ValueError("Jacobi exponents must exceed -1")
    return _jacobi_on_unit_interval(int(n), float(left), float(right))


@dataclass(frozen=True)
class WeightFunction:
    kind: str
    alpha: float
    regular: Callable[[np.ndarray], np.ndarray]
    left: float = 0.0
    right: float = 0.0
    name: str = ""

    def __call__(self, theta):
        theta = np.asarray(theta, dtype=float)
        return theta**self.left * (1.0 - theta) ** self.right * self.regular(theta)

    @property
    def label(self) -> str:
        return self.name or self.kind

    def rule(self, n: int = DEFAULT_NODES) -> tuple[np.ndarray, np.ndarray]:
        """Quadrature nodes and *combined* weights: ``sum(w * f(theta)) ~ int omega f``."""
        theta, w = gauss_jacobi_rule(n, self.left, self.right)
        return theta, w * self.regular(theta)

    def integrate(self, f: Callable[[np.ndarray], np.ndarray], n: int = DEFAULT_NODES) -> float:
        theta, w = self.rule(n)
        return float(np.sum(w * f(theta)))

    def total_mass(self, n: int = DEFAULT_NODES) -> float:
        return self.integrate(np.ones_like, n)

    def admissibility_profile(self, theta):
        """``g(theta) = omega(theta) theta^(1-alpha) (1-theta)^alpha``.

        Computed by cancelling exponents rather than multiplying singular
        factors, so constant profiles stay constant to rounding.
        """
        theta = np.asarray(theta, dtype=float)
        a = self.alpha
        return (
            theta ** (self.left + 1.0 - a)
            * (1.0 - theta) ** (self.right + a)
            * self.regular(theta)
        )


def beta_weight(alpha: float) -> WeightFunction:
    """``1 / (B(alpha, 1-alpha) theta^(1-alpha) (1-theta)^alpha)``."""
    _check_alpha(alpha)
    c = 1.0 / beta_reflection(alpha)
    return WeightFunction("beta", alpha, lambda t: np.full_like(np.asarray(t, float), c),
                          left=alpha - 1.0, right=-alpha, name="beta")


def power_weight(alpha: float) -> WeightFunction:
    """``alpha / theta^(1-alpha)``.

    The profile ``theta^(alpha-1)`` normalized to unit mass; the constant in
    front does not affect admissibility.
    """
    _check_alpha(alpha)
    c = alpha
    return WeightFunction("power", alpha, lambda t: np.full_like(np.asarray(t, float), c),
                          left=alpha - 1.0, name="power")


def linear_weight(alpha: float) -> WeightFunction:
    """``omega(theta) = 2 theta``: normalized but not admissible for any alpha."""
    _check_alpha(alpha)
    return WeightFunction("linear", alpha, lambda t: 2.0 * np.ones_like(np.asarray(t, float)),
                          left=1.0, name="linear")


def tabulated_weight(
    alpha: float,
    theta: np.ndarray,
    values: np.ndarray,
    left: float = 0.0,
    right: float = 0.0,
    name: str = "tabulated",
) -> WeightFunction:
    """Weight whose regular part is given by samples and interpolated monotonically.

    ``values`` are samples of ``omega(theta) / (theta^left (1-theta)^right)``.
    Outside the sampled range the interpolant is held constant.
    """
    _check_alpha(alpha)
    theta = np.asarray(theta, dtype=float)
    values = np.asarray(values, dtype=float)
    if theta.ndim != 1 or theta.shape != values.shape or theta.size < 2:
        raise ValueError("theta and values must be 1D arrays of equal length >= 2")
    if np.any(np.diff(theta) <= 0):
        raise ValueError("theta samples must be strictly increasing")
    interp = PchipInterpolator(theta, values, extrapolate=True)
    lo, hi = theta[0], theta[-1]

    def regular(t):
        return interp(np.clip(np.asarray(t, dtype=float), lo, hi))

    return WeightFunction("tabulated", alpha, regular, left=left, right=right, name=name)


def named_weight(name: str, alpha: float) -> WeightFunction:
    try:
        factory = {"beta": beta_weight, "power": power_weight, "linear": linear_weight}[name]
    except KeyError:
        raise ValueError(f"unknown weight {name!r} (expected beta, power or linear)") from None
    return factory(alpha)


@dataclass(frozen=True)
class AdmissibilityResult:
    admissible: bool
    margin: float
    tolerance: float
    integral: float

    def __bool__(self) -> bool:
        return self.admissible


def check_weight_admissible(
    omega: WeightFunction,
    alpha: float | None = None,
    n_samples: int = 512,
    tol: float = 1e-10,
) -> AdmissibilityResult:
    """Test whether ``omega(theta) theta^(1-alpha) (1-theta)^alpha`` is nonincreasing.

    ``margin`` is the smallest step ``g(theta_i) - g(theta_{i+1})`` over the
    sample grid (negative means the profile rises somewhere); the weight is
    admissible iff ``margin >= -tol * max|g|``.
    """
    if alpha is not None and alpha != omega.alpha:
        omega = WeightFunction(omega.kind, alpha, omega.regular, omega.left, omega.right, omega.name)
    integral = omega.total_mass()
    if abs(integral - 1.0) > 1e-6:
        raise NonNormalized(f"weight {omega.label!r} integrates to {integral:.8f}, not 1")
    theta = np.linspace(0.0, 1.0, n_samples + 2)[1:-1]
    if np.any(omega(theta) < 0):
        raise NegativeWeight(f"weight {omega.label!r} is negative on (0, 1)")
    g = omega.admissibility_profile(theta)
    margin = float(np.min(g[:-1] - g[1:]))
    abs_tol = tol * float(np.max(np.abs(g)))
    return AdmissibilityResult(margin >= -abs_tol, margin, abs_tol, integral)


def _check_alpha(alpha: float) -> None:
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
