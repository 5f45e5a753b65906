"""Pseudo-spectral operators on periodic 1D/2D grids.

Fields are plain ``numpy`` arrays of shape ``grid.shape``. All operators go
through real-to-complex FFTs; only the real-space results are part of the
contract.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import GridMismatch, NonZeroMean


@dataclass(frozen=True)
class PeriodicGrid:
    """Uniform periodic lattice with ``n`` points per dimension on ``[0, length)^dim``."""

    dim: int
    n: int
    length: float = 1.0

    def __post_init__(self) -> None:
        if self.dim not in (1, 2):
            raise ValueError(f"dim must be 1 or 2, got {self.dim}")
        if self.n < 8 or self.n & (self.n - 1):
            raise ValueError(f"n must be a power of two >= 8, got {self.n}")
        if not self.length > 0:
            raise ValueError(f"length must be positive, got {self.length}")

    @property
    def h(self) -> float:
        return self.length / self.n

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n,) * self.dim

    @property
    def size(self) -> int:
        return self.n**self.dim

    @property
    def cell_volume(self) -> float:
        return self.h**self.dim

    @property
    def volume(self) -> float:
        return self.length**self.dim

    def coordinates(self) -> tuple[np.ndarray, ...]:
        """Meshgrid of node coordinates, ``indexing="ij"`` (axis 0 is x)."""
        x = np.arange(self.n) * self.h
        return tuple(np.meshgrid(*([x] * self.dim), indexing="ij"))


@dataclass
class SpectralWorkspace:
    """Cached wavenumbers and symbols for one grid.

    A workspace holds no mutable state beyond its caches, but it is meant to be
    used by one thread at a time; sweeps create one per worker.
    """

    grid: PeriodicGrid
    dealias: bool = False
    _shape_rfft: tuple[int, ...] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        g = self.grid
        self._shape_rfft = g.shape[:-1] + (g.n // 2 + 1,)

    @cached_property
    def wavenumbers(self) -> tuple[np.ndarray, ...]:
        """Per-axis angular wavenumbers broadcast to the rfft layout."""
        g = self.grid
        full = 2.0 * np.pi * np.fft.fftfreq(g.n, d=g.h)
        half = 2.0 * np.pi * np.fft.rfftfreq(g.n, d=g.h)
        axes = [full] * (g.dim - 1) + [half]
        return tuple(np.meshgrid(*axes, indexing="ij"))

    @cached_property
    def k2(self) -> np.ndarray:
        """``|k|^2``; the Laplacian symbol is ``-k2`` and is exactly 0 at k = 0."""
        out = np.zeros(self._shape_rfft)
        for k in self.wavenumbers:
            out += k * k
        return out

    @cached_property
    def _derivative_symbols(self) -> tuple[np.ndarray, ...]:
        # the Nyquist mode has no real-valued derivative, so it is dropped
        g = self.grid
        syms = []
        for k in self.wavenumbers:
            s = 1j * k
            s[np.isclose(np.abs(k), np.pi * g.n / g.length)] = 0.0
            syms.append(s)
        return tuple(syms)

    @cached_property
    def _dealias_mask(self) -> np.ndarray:
        kmax = np.pi * self.grid.n / self.grid.length
        mask = np.ones(self._shape_rfft, dtype=bool)
        for k in self.wavenumbers:
            mask &= np.abs(k) < (2.0 / 3.0) * kmax
        return mask

    # transforms -----------------------------------------------------------

    def forward(self, f: np.ndarray) -> np.ndarray:
        self._check(f)
        return np.fft.rfftn(f)

    def backward(self, f_hat: np.ndarray) -> np.ndarray:
        return np.fft.irfftn(f_hat, s=self.grid.shape, axes=tuple(range(self.grid.dim)))

    def filter_nonlinear(self, f_hat: np.ndarray) -> np.ndarray:
        """Apply the 2/3-rule mask when ``dealias`` is on; identity otherwise."""
        if not self.dealias:
            return f_hat
        return np.where(self._dealias_mask, f_hat, 0.0)

    # operators ------------------------------------------------------------

    def laplacian(self, f: np.ndarray) -> np.ndarray:
        return self.backward(-self.k2 * self.forward(f))

    def gradient(self, f: np.ndarray) -> list[np.ndarray]:
        f_hat = self.forward(f)
        return [self.backward(s * f_hat) for s in self._derivative_symbols]

    def inv_neg_laplacian_zero_mean(self, f: np.ndarray) -> np.ndarray:
        """Solve ``-Lap g = f - mean(f)`` with ``mean(g) = 0``.

        Raises :class:`NonZeroMean` if ``|mean(f)| > 1e-10 (rms(f) + 1)``: a
        nonzero mean here means mass leaked somewhere upstream.
        """
        self._check(f)
        mean = float(np.mean(f))
        rms = float(np.sqrt(np.mean(f * f)))
        if abs(mean) > 1e-10 * (rms + 1.0):
            raise NonZeroMean(f"field mean {mean:.3e} exceeds tolerance")
        f_hat = np.fft.rfftn(f)
        k2 = self.k2.copy()
        k2.flat[0] = 1.0
        g_hat = f_hat / k2
        g_hat.flat[0] = 0.0
        return self.backward(g_hat)

    def inner_product(self, f: np.ndarray, g: np.ndarray) -> float:
        """Midpoint-rule ``L^2`` inner product, exact for band-limited periodic data."""
        self._check(f)
        self._check(g)
        return float(self.grid.cell_volume * np.sum(f * g))

    def mean(self, f: np.ndarray) -> float:
        self._check(f)
        return float(np.mean(f))

    def _check(self, f: np.ndarray) -> None:
        if np.shape(f) != self.grid.shape:
            raise GridMismatch(f"expected shape {self.grid.shape}, got {np.shape(f)}")
