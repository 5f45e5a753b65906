"""L1 discretization of the Caputo derivative and the Mittag-Leffler oracle."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import mpmath
import numpy as np
from scipy import integrate
from scipy.special import gammaln

from .errors import LengthMismatch, OutOfRange

MP_SERIES_MAX_DIGITS = 50


@dataclass(frozen=True)
class TimeGrid:
    """Nodes ``t_k = T (k/N)^r``; ``grading = 1`` is the uniform grid."""

    t_final: float
    n_steps: int
    grading: float = 1.0

    def __post_init__(self) -> None:
        if not self.t_final > 0:
            raise ValueError(f"t_final must be positive, got {self.t_final}")
        if self.n_steps < 1:
            raise ValueError(f"n_steps must be >= 1, got {self.n_steps}")
        if not self.grading >= 1:
            raise ValueError(f"grading exponent must be >= 1, got {self.grading}")

    @classmethod
    def graded(cls, t_final: float, n_steps: int, alpha: float) -> TimeGrid:
        """Graded mesh with the default exponent ``(2 - alpha) / alpha``."""
        return cls(t_final, n_steps, (2.0 - alpha) / alpha)

    @property
    def uniform(self) -> bool:
        return self.grading == 1.0

    @cached_property
    def nodes(self) -> np.ndarray:
        k = np.arange(self.n_steps + 1) / self.n_steps
        t = self.t_final * k**self.grading
        t[-1] = self.t_final
        t.setflags(write=False)
        return t

    @cached_property
    def steps(self) -> np.ndarray:
        return np.diff(self.nodes)


def l1_weights(alpha: float, grid: TimeGrid | np.ndarray, n: int) -> np.ndarray:
    """Coefficients ``a_{n,k}``, k = 1..n, of the L1 formula at ``t_n``.

    ``D u(t_n) = sum_k a_{n,k} (u_k - u_{k-1})`` with
    ``a_{n,k} = [(t_n - t_{k-1})^(1-a) - (t_n - t_k)^(1-a)] / (Gamma(2-a) (t_k - t_{k-1}))``.
    """
    t = grid.nodes if isinstance(grid, TimeGrid) else np.asarray(grid, dtype=float)
    if not 1 <= n < t.size:
        raise IndexError(f"step index {n} outside 1..{t.size - 1}")
    beta = 1.0 - alpha
    tn = t[n]
    lag_left = tn - t[:n]
    lag_right = tn - t[1 : n + 1]
    return (lag_left**beta - lag_right**beta) / (math.gamma(2.0 - alpha) * np.diff(t[: n + 1]))


def caputo_derivative_series(samples, alpha: float, grid: TimeGrid | np.ndarray) -> np.ndarray:
    """L1 Caputo derivative at every node; the value at ``t_0`` is 0."""
    t = grid.nodes if isinstance(grid, TimeGrid) else np.asarray(grid, dtype=float)
    u = np.asarray(samples, dtype=float)
    if u.shape[0] != t.size:
        raise LengthMismatch(f"{u.shape[0]} samples for {t.size} nodes")
    du = np.diff(u, axis=0)
    out = np.zeros_like(u)
    for n in range(1, t.size):
        out[n] = l1_weights(alpha, t, n) @ du[:n]
    return out


def mittag_leffler(alpha: float, z: float) -> float:
    """``E_alpha(z) = sum_j z^j / Gamma(alpha j + 1)`` for ``-50 <= z <= 0``.

    The series is summed in double precision with Kahan compensation while its
    largest term is small, and in extended precision while the cancellation
    stays moderate. Beyond that (small alpha or large ``|z|``, where the series
    needs on the order of ``|z|^(1/alpha)`` terms) ``alpha < 1`` switches to
    the completely monotone integral representation

        E_a(-x) = sin(a pi) / (a pi) int_0^inf exp(-(x s)^(1/a)) / (s^2 + 2 s cos(a pi) + 1) ds.
    """
    if not 0.0 < alpha <= 1.0:
        raise OutOfRange(f"alpha must lie in (0, 1], got {alpha}")
    if not -50.0 <= z <= 0.0:
        raise OutOfRange(f"z must lie in [-50, 0], got {z}")
    if z == 0.0:
        return 1.0
    largest = _largest_term_log10(alpha, -z)
    if largest <= 2.0:
        return _ml_series_kahan(alpha, z)
    if largest <= MP_SERIES_MAX_DIGITS or alpha == 1.0:
        return _ml_series_mp(alpha, z, digits=int(largest) + 25)
    return _ml_integral(alpha, -z)


def _ml_integral(alpha: float, x: float) -> float:
    c = math.cos(math.pi * alpha)
    p = 1.0 / alpha

    def f(s):
        return math.exp(-((x * s) ** p)) / (s * s + 2.0 * s * c + 1.0)

    # the exponential cutoff sits near s = 1/x; split there so quad sees the scale
    cut = 1.0 / x
    head, _ = integrate.quad(f, 0.0, cut, epsabs=0.0, epsrel=1e-13, limit=200)
    tail, _ = integrate.quad(f, cut, np.inf, epsabs=0.0, epsrel=1e-13, limit=200)
    return math.sin(math.pi * alpha) / (math.pi * alpha) * (head + tail)


def _largest_term_log10(alpha: float, x: float) -> float:
    j = np.arange(0, 20000)
    logs = j * math.log(x) - gammaln(alpha * j + 1.0)
    return float(np.max(logs)) / math.log(10.0)


def _ml_series_kahan(alpha: float, z: float) -> float:
    total, comp = 0.0, 0.0
    j = 0
    while True:
        term = math.exp(j * math.log(abs(z)) - math.lgamma(alpha * j + 1.0)) if j else 1.0
        if j % 2 and z < 0:
            term = -term
        y = term - comp
        s = total + y
        comp = (s - total) - y
        total = s
        if j > 0 and abs(term) < 1e-16:
            break
        j += 1
        if j > 100000:  # pragma: no cover - unreachable for |z| <= 50
            raise OutOfRange("Mittag-Leffler series did not converge")
    return total


def _ml_series_mp(alpha: float, z: float, digits: int) -> float:
    with mpmath.workdps(digits):
        a = mpmath.mpf(alpha)
        zz = mpmath.mpf(z)
        total = mpmath.mpf(0)
        term_pow = mpmath.mpf(1)
        j = 0
        eps = mpmath.mpf(10) ** (-digits)
        while True:
            term = term_pow / mpmath.gamma(a * j + 1)
            total += term
            if j > 0 and abs(term) < eps:
                break
            term_pow *= zz
            j += 1
        return float(total)
