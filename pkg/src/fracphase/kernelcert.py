"""Constructive positive-definiteness certificates for monotone symmetric matrices.

A symmetric matrix ``S`` with positive entries is positive definite when
(0-based indices, ``i > j``):

* P1: entries do not increase going down a column below the diagonal,
  ``S[i-1, j] >= S[i, j]``;
* P2: entries strictly increase going right along a row up to the diagonal,
  ``S[i, j-1] < S[i, j]``;
* P3: the column decrement ``S[i-1, j] - S[i, j]`` does not decrease with ``j``.

Under these conditions the Cholesky factor ``L`` is entrywise positive (Q1)
and nonincreasing down each column (Q2). :func:`monotone_cholesky` builds
``L`` row by row, the same way the induction proceeds, so the certificate can
be checked line by line.

Sampled kernels are checked against the continuous analogue of P1-P3:
``d_x k <= 0``, ``d_y k > 0`` and ``d_xy k <= 0`` for ``x > y``. These
conditions are sufficient, not necessary. A kernel that fails them may still
be positive definite (``1 / ((1-x)^a (1-y)^a)`` is one), so a failed
condition check never means "not positive definite".
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from .errors import (
    DiagonalSingularity,
    DomainViolation,
    NonPositiveEntry,
    PivotFailure,
    PropertyViolation,
)
from .weights import WeightFunction

DEFAULT_TOL = 1e-12
SINGULARITY_GUARD = 1e-12


def _finite_or_none(x: float) -> float | None:
    return None if not math.isfinite(x) else float(x)


@dataclass(frozen=True)
class PropertyReport:
    """Outcome of a P1-P3 check (or of the three kernel sign conditions).

    Margins are the worst-case slack of each inequality; ``inf`` when the
    property is vacuous for the given size. P1/P3 hold at ``margin >= -tolerance``,
    P2 is strict and needs ``margin > tolerance``.
    """

    p1_holds: bool
    p2_holds: bool
    p3_holds: bool
    p1_margin: float
    p2_margin: float
    p3_margin: float
    tolerance: float

    @property
    def all_hold(self) -> bool:
        return self.p1_holds and self.p2_holds and self.p3_holds

    def to_dict(self) -> dict:
        d = asdict(self)
        for key in ("p1_margin", "p2_margin", "p3_margin"):
            d[key] = _finite_or_none(d[key])
        d["all_hold"] = self.all_hold
        return d


@dataclass(frozen=True)
class PDCertificate:
    l_factor: np.ndarray
    q1_holds: bool
    q2_holds: bool
    reconstruction_residual: float
    min_pivot: float
    scaling: np.ndarray | None = field(default=None)

    @property
    def valid(self) -> bool:
        return self.q1_holds and self.q2_holds and self.min_pivot > 0

    def factor_of_input(self) -> np.ndarray:
        """Cholesky factor of the matrix originally passed in (undoes any scaling)."""
        if self.scaling is None:
            return self.l_factor
        return self.scaling[:, None] * self.l_factor

    def to_dict(self) -> dict:
        return {
            "valid": self.valid,
            "q1_holds": self.q1_holds,
            "q2_holds": self.q2_holds,
            "reconstruction_residual": self.reconstruction_residual,
            "min_pivot": self.min_pivot,
            "l_factor": self.l_factor.tolist(),
            "scaling": None if self.scaling is None else self.scaling.tolist(),
        }


def _as_symmetric(S) -> np.ndarray:
    S = np.asarray(S, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {S.shape}")
    scale = max(float(np.max(np.abs(S))), 1.0) if S.size else 1.0
    if not np.allclose(S, S.T, rtol=0.0, atol=1e-12 * scale):
        raise ValueError("matrix is not symmetric")
    return S


def check_p_properties(S, tol: float = DEFAULT_TOL) -> PropertyReport:
    """Check P1-P3; ``tol`` is relative to ``max|S|``."""
    S = _as_symmetric(S)
    if np.any(S <= 0):
        raise NonPositiveEntry("all matrix entries must be strictly positive")
    n = S.shape[0]
    abs_tol = tol * float(np.max(S))
    i, j = np.tril_indices(n, -1)

    # P1: S[i-1, j] - S[i, j] for j < i
    p1 = S[i - 1, j] - S[i, j]
    # P2: S[i, j] - S[i, j-1] for 0 < j <= i
    i2, j2 = np.tril_indices(n)
    keep = j2 > 0
    i2, j2 = i2[keep], j2[keep]
    p2 = S[i2, j2] - S[i2, j2 - 1]
    # P3: (S[i-1, j] - S[i, j]) - (S[i-1, j-1] - S[i, j-1]) for 0 < j < i
    keep = j > 0
    i3, j3 = i[keep], j[keep]
    p3 = (S[i3 - 1, j3] - S[i3, j3]) - (S[i3 - 1, j3 - 1] - S[i3, j3 - 1])

    m1 = float(np.min(p1)) if p1.size else math.inf
    m2 = float(np.min(p2)) if p2.size else math.inf
    m3 = float(np.min(p3)) if p3.size else math.inf
    return PropertyReport(m1 >= -abs_tol, m2 > abs_tol, m3 >= -abs_tol, m1, m2, m3, abs_tol)


def monotone_cholesky(S, tol: float = DEFAULT_TOL, check: bool = True) -> PDCertificate:
    """Row-by-row Cholesky factorization with a Q1/Q2 certificate.

    For each new row the off-diagonal part solves ``L_{n-1} l = b`` by forward
    substitution and the pivot comes from ``l.l + l_nn^2 = S[n, n]``.
    """
    S = _as_symmetric(S)
    if check:
        report = check_p_properties(S, tol)
        if not report.all_hold:
            raise PropertyViolation(f"matrix fails the monotone structure: {report.to_dict()}")
    n = S.shape[0]
    scale = float(np.max(np.abs(S)))
    L = np.zeros_like(S)
    if S[0, 0] <= tol * scale:
        raise PivotFailure(f"pivot 0 is {S[0, 0]:.3e}")
    L[0, 0] = math.sqrt(S[0, 0])
    pivots = [S[0, 0]]
    for r in range(1, n):
        b = S[r, :r]
        l = np.empty(r)
        for c in range(r):
            l[c] = (b[c] - L[c, :c] @ l[:c]) / L[c, c]
        pivot_sq = S[r, r] - l @ l
        if pivot_sq <= tol * scale:
            raise PivotFailure(f"pivot {r} is {pivot_sq:.3e} (not safely positive)")
        L[r, :r] = l
        L[r, r] = math.sqrt(pivot_sq)
        pivots.append(pivot_sq)

    lower = np.tril_indices(n)
    q1 = bool(np.all(L[lower] > 0))
    i, j = np.tril_indices(n, -1)
    lscale = float(np.max(np.abs(L)))
    q2 = bool(np.all(L[i - 1, j] - L[i, j] >= -tol * lscale)) if i.size else True
    residual = float(np.max(np.abs(L @ L.T - S)))
    return PDCertificate(L, q1, q2, residual, float(min(pivots)))


def certify_scaled(K, scaling, tol: float = DEFAULT_TOL) -> tuple[PropertyReport, PDCertificate]:
    """Certify ``K = diag(c) M diag(c)`` through the monotone matrix ``M``.

    Positive diagonal scaling preserves positive definiteness, so a kernel of
    the form ``c(x) c(y) m(x, y)`` is certified by factoring ``m``. The
    returned certificate's ``factor_of_input()`` is the Cholesky factor of ``K``.
    """
    K = _as_symmetric(K)
    c = np.asarray(scaling, dtype=float)
    if c.shape != (K.shape[0],) or np.any(c <= 0):
        raise ValueError("scaling must be a positive vector matching the matrix order")
    M = K / np.outer(c, c)
    M = 0.5 * (M + M.T)
    report = check_p_properties(M, tol)
    if not report.all_hold:
        raise PropertyViolation(f"scaled matrix fails the monotone structure: {report.to_dict()}")
    cert = monotone_cholesky(M, tol, check=False)
    LK = c[:, None] * cert.l_factor
    residual = float(np.max(np.abs(LK @ LK.T - K)))
    return report, PDCertificate(cert.l_factor, cert.q1_holds, cert.q2_holds, residual,
                                 cert.min_pivot, scaling=c)


# kernels ------------------------------------------------------------------


@dataclass(frozen=True)
class KernelFn:
    """Symmetric positive kernel on an open interval ``(lo, hi)``."""

    evaluator: Callable[[float, float], float]
    lo: float = -math.inf
    hi: float = math.inf
    name: str = "kernel"

    def __call__(self, x: float, y: float) -> float:
        return self.evaluator(x, y)

    def inside(self, x: float) -> bool:
        return self.lo < x < self.hi

    def is_symmetric(self, points, rtol: float = 1e-12) -> bool:
        pts = list(points)
        for a in pts:
            for b in pts:
                if a == b:
                    continue
                u, v = self(a, b), self(b, a)
                if abs(u - v) > rtol * max(abs(u), abs(v)):
                    return False
        return True


def _lower_upper(x: float, y: float) -> tuple[float, float]:
    if abs(x - y) < SINGULARITY_GUARD:
        raise DiagonalSingularity(f"kernel evaluated on the diagonal ({x!r}, {y!r})")
    return (x, y) if x > y else (y, x)


def abel_kernel(scale: float = 1.0) -> KernelFn:
    return KernelFn(lambda x, y: math.exp(-scale * abs(x - y)), name=f"abel(scale={scale:g})")


def separable_factor_kernel(alpha: float) -> KernelFn:
    """``1 / ((1-x)^alpha (1-y)^alpha)``: PD (rank one) yet increasing in x."""
    return KernelFn(lambda x, y: ((1.0 - x) * (1.0 - y)) ** (-alpha), 0.0, 1.0,
                    name=f"separable(alpha={alpha:g})")


def mu_weighted(theta: float, eta: float, alpha: float) -> float:
    """``theta^a (1-eta)^a / (theta-eta)^a`` extended symmetrically."""
    hi, lo = _lower_upper(theta, eta)
    return (hi * (1.0 - lo) / (hi - lo)) ** alpha


def mu_energy(s: float, tau: float, t: float, alpha: float) -> float:
    """``(t-tau)^a / (s-tau)^a`` extended symmetrically."""
    hi, lo = _lower_upper(s, tau)
    return ((t - lo) / (hi - lo)) ** alpha


def mu_weighted_kernel(alpha: float) -> KernelFn:
    return KernelFn(lambda x, y: mu_weighted(x, y, alpha), 0.0, 1.0, name=f"mu_weighted(alpha={alpha:g})")


def mu_energy_kernel(alpha: float, t: float = 1.0) -> KernelFn:
    return KernelFn(lambda x, y: mu_energy(x, y, t, alpha), 0.0, t,
                    name=f"mu_energy(alpha={alpha:g}, t={t:g})")


def weighted_monotone_kernel(omega: WeightFunction, alpha: float) -> KernelFn:
    """``g(max) mu(max, min)`` with ``g`` the admissibility profile of ``omega``.

    ``kappa_weighted = c(x) c(y) * this``, with ``c(x) = (1-x)^(-alpha)``.
    """

    def ev(x: float, y: float) -> float:
        hi, _ = _lower_upper(x, y)
        return float(omega.admissibility_profile(hi)) * mu_weighted(x, y, alpha)

    return KernelFn(ev, 0.0, 1.0, name=f"g*mu[{omega.label}](alpha={alpha:g})")


def kappa_weighted(theta: float, eta: float, omega: WeightFunction, alpha: float) -> float:
    """``omega(max) max / |theta - eta|^alpha`` for the weighted-energy dissipation."""
    if not (0.0 < theta < 1.0 and 0.0 < eta < 1.0):
        raise DomainViolation("theta and eta must lie in (0, 1)")
    hi, lo = _lower_upper(theta, eta)
    return float(omega(hi)) * hi / (hi - lo) ** alpha


def kappa_energy(s: float, tau: float, t: float, alpha: float) -> float:
    """``1 / ((t - max)^alpha |s - tau|^alpha)`` for the Caputo energy dissipation."""
    if s >= t or tau >= t:
        raise DomainViolation(f"need s, tau < t = {t}, got s={s}, tau={tau}")
    hi, lo = _lower_upper(s, tau)
    return 1.0 / ((t - hi) ** alpha * (hi - lo) ** alpha)


def sample_kernel_matrix(kernel: KernelFn, points, shift: float = 0.0) -> np.ndarray:
    """Gram matrix ``[k(max(x_i,x_j) + shift, min(x_i,x_j))]``.

    ``shift > 0`` regularizes kernels that blow up on the diagonal. The
    shifted kernel still satisfies the three sign conditions whenever the
    original does, so the sampled matrix keeps the monotone structure.
    """
    x = np.asarray(points, dtype=float)
    if x.ndim != 1 or np.any(np.diff(x) <= 0):
        raise ValueError("points must be strictly increasing")
    if not kernel.inside(x[0]) or not kernel.inside(x[-1] + shift):
        raise DomainViolation(f"points (+ shift) leave the domain ({kernel.lo}, {kernel.hi})")
    n = x.size
    S = np.empty((n, n))
    for i in range(n):
        for j in range(i + 1):
            S[i, j] = S[j, i] = kernel(x[i] + shift, x[j])
    return S


def kappa_weighted_matrix(points, omega: WeightFunction, alpha: float, shift: float):
    """Sampled (diagonal-regularized) weighted kernel and its separable scaling."""
    x = np.asarray(points, dtype=float)
    M = sample_kernel_matrix(weighted_monotone_kernel(omega, alpha), x, shift)
    c = (1.0 - x) ** (-alpha)
    return np.outer(c, c) * M, c


def kappa_energy_matrix(points, t: float, alpha: float, shift: float):
    x = np.asarray(points, dtype=float)
    M = sample_kernel_matrix(mu_energy_kernel(alpha, t), x, shift)
    c = (t - x) ** (-alpha)
    return np.outer(c, c) * M, c


def generate_p_matrix(n: int, seed: int) -> np.ndarray:
    """Random matrix with strict P1-P3 margins.

    Sampled from a positive mixture of Abel kernels plus a constant at random
    sorted points; each Abel term satisfies the kernel conditions and the
    conditions are preserved under positive combinations.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    rng = np.random.default_rng(seed)
    x = np.cumsum(rng.uniform(0.05, 1.0, size=n))
    terms = int(rng.integers(1, 4))
    scales = rng.uniform(0.2, 2.0, size=terms)
    coeffs = rng.uniform(0.2, 1.0, size=terms)
    const = rng.uniform(0.0, 0.3)
    d = np.abs(x[:, None] - x[None, :])
    S = const + sum(c * np.exp(-s * d) for c, s in zip(coeffs, scales))
    return 0.5 * (S + S.T)


def verify_kernel_conditions(
    k: KernelFn,
    points,
    h_fd: float | None = None,
    tol: float = 1e-6,
) -> PropertyReport:
    """Finite-difference check of the three sign conditions at all sampled ``x > y``.

    The report's p1/p2/p3 flags correspond to ``d_x k <= 0``, ``d_y k > 0`` and
    ``d_xy k <= 0``. Margins are ``min(-d_x k)``, ``min(d_y k)`` and
    ``min(-d_xy k)``. A failed flag only says the sufficient condition failed.
    """
    x = np.asarray(points, dtype=float)
    if x.ndim != 1 or x.size < 2 or np.any(np.diff(x) <= 0):
        raise ValueError("points must be strictly increasing with at least two entries")
    if h_fd is None:
        width = (k.hi - k.lo) if math.isfinite(k.hi - k.lo) else float(x[-1] - x[0])
        h_fd = 1e-5 * width
    if np.min(np.diff(x)) <= 2 * h_fd:
        raise DomainViolation("stencil would cross the diagonal; spread the points out")
    if not (k.inside(x[0] - h_fd) and k.inside(x[-1] + h_fd)):
        raise DomainViolation(f"stencil leaves the kernel domain ({k.lo}, {k.hi})")

    dx, dy, dxy, vals = [], [], [], []
    h = h_fd
    for i in range(1, x.size):
        for j in range(i):
            a, b = x[i], x[j]
            vals.append(k(a, b))
            dx.append((k(a + h, b) - k(a - h, b)) / (2 * h))
            dy.append((k(a, b + h) - k(a, b - h)) / (2 * h))
            dxy.append((k(a + h, b + h) - k(a + h, b - h) - k(a - h, b + h) + k(a - h, b - h)) / (4 * h * h))
    abs_tol = tol * max(1.0, float(np.max(np.abs(vals))))
    m1 = float(np.min(-np.asarray(dx)))
    m2 = float(np.min(dy))
    m3 = float(np.min(-np.asarray(dxy)))
    return PropertyReport(m1 >= -abs_tol, m2 > abs_tol, m3 >= -abs_tol, m1, m2, m3, abs_tol)
