"""Model parameters for the time-fractional Allen-Cahn / Cahn-Hilliard problems."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

import numpy as np


class Operator(str, Enum):
    ALLEN_CAHN = "allen_cahn"
    CAHN_HILLIARD = "cahn_hilliard"


@dataclass(frozen=True)
class Potential:
    """Bulk free energy density ``F`` and its derivative."""

    name: str
    F: Callable[[np.ndarray], np.ndarray]
    dF: Callable[[np.ndarray], np.ndarray]


def _dw_F(phi):
    return 0.25 * (1.0 - phi * phi) ** 2


def _dw_dF(phi):
    return phi * phi * phi - phi


DOUBLE_WELL = Potential("double_well", _dw_F, _dw_dF)
ZERO = Potential("zero", np.zeros_like, np.zeros_like)

POTENTIALS = {p.name: p for p in (DOUBLE_WELL, ZERO)}


@dataclass(frozen=True)
class ModelParams:
    """``D_t^alpha phi = gamma G(-eps^2 Lap phi + F'(phi))`` with ``G = -1`` or ``Lap``."""

    alpha: float
    epsilon: float = 0.1
    gamma: float = 1.0
    operator: Operator = Operator.ALLEN_CAHN
    potential: Potential = field(default=DOUBLE_WELL)
    stabilizer: float = 2.0

    def __post_init__(self) -> None:
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if not self.gamma > 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        if not self.stabilizer >= 0:
            raise ValueError(f"stabilizer must be nonnegative, got {self.stabilizer}")
        object.__setattr__(self, "operator", Operator(self.operator))
        if isinstance(self.potential, str):
            try:
                object.__setattr__(self, "potential", POTENTIALS[self.potential])
            except KeyError:
                raise ValueError(f"unknown potential {self.potential!r}") from None

    @property
    def conserved(self) -> bool:
        return self.operator is Operator.CAHN_HILLIARD
