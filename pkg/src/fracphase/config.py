"""Strict JSON run configuration.

Unknown keys are rejected everywhere so that a typo cannot silently change an
experiment. Every error message starts with the dotted path of the offending key.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any

import numpy as np

from .caputo import TimeGrid
from .errors import ConfigError
from .model import POTENTIALS, ModelParams, Operator
from .spectral import PeriodicGrid
from .weights import WeightFunction, named_weight, tabulated_weight

SCHEMA_VERSION = 1


def _require_number(path: str, value: Any, integer: bool = False) -> None:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path}: expected a number, got {value!r}")
    if integer and not isinstance(value, int):
        raise ConfigError(f"{path}: expected an integer, got {value!r}")


def _take(cls, data: Any, path: str):
    """Build dataclass ``cls`` from ``data`` rejecting unknown keys."""
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: expected an object, got {type(data).__name__}")
    names = {f.name for f in fields(cls)}
    unknown = sorted(set(data) - names)
    if unknown:
        raise ConfigError(f"{path}.{unknown[0]}: unknown key")
    try:
        return cls(**data)
    except TypeError as exc:
        raise ConfigError(f"{path}: {exc}") from None


@dataclass
class ModelSection:
    alpha: float
    epsilon: float = 0.1
    gamma: float = 1.0
    operator: str = "allen_cahn"
    potential: str = "double_well"
    stabilizer: float = 2.0
    extrapolate: bool = False

    def validate(self) -> None:
        p = "model"
        for key in ("alpha", "epsilon", "gamma", "stabilizer"):
            _require_number(f"{p}.{key}", getattr(self, key))
        if not 0 < self.alpha < 1:
            raise ConfigError(f"{p}.alpha: must lie in (0, 1), got {self.alpha}")
        if not self.epsilon > 0:
            raise ConfigError(f"{p}.epsilon: must be positive, got {self.epsilon}")
        if not self.gamma > 0:
            raise ConfigError(f"{p}.gamma: must be positive, got {self.gamma}")
        if not self.stabilizer >= 0:
            raise ConfigError(f"{p}.stabilizer: must be nonnegative, got {self.stabilizer}")
        if self.operator not in {o.value for o in Operator}:
            raise ConfigError(f"{p}.operator: expected allen_cahn or cahn_hilliard, got {self.operator!r}")
        if self.potential not in POTENTIALS:
            raise ConfigError(f"{p}.potential: expected one of {sorted(POTENTIALS)}, got {self.potential!r}")
        if not isinstance(self.extrapolate, bool):
            raise ConfigError(f"{p}.extrapolate: expected true/false")

    def params(self) -> ModelParams:
        return ModelParams(self.alpha, self.epsilon, self.gamma, Operator(self.operator),
                           POTENTIALS[self.potential], self.stabilizer)


@dataclass
class GridSection:
    dim: int = 1
    n: int = 64
    length: float = 1.0
    dealias: bool = False

    def validate(self) -> None:
        _require_number("grid.dim", self.dim, integer=True)
        _require_number("grid.n", self.n, integer=True)
        _require_number("grid.length", self.length)
        if self.dim not in (1, 2):
            raise ConfigError(f"grid.dim: must be 1 or 2, got {self.dim}")
        if self.n < 8 or self.n & (self.n - 1):
            raise ConfigError(f"grid.n: must be a power of two >= 8, got {self.n}")
        if not self.length > 0:
            raise ConfigError(f"grid.length: must be positive, got {self.length}")
        if not isinstance(self.dealias, bool):
            raise ConfigError("grid.dealias: expected true/false")

    def grid(self) -> PeriodicGrid:
        return PeriodicGrid(self.dim, self.n, float(self.length))


@dataclass
class TimeSection:
    t_final: float = 1.0
    n_steps: int = 512
    grading: str = "uniform"
    grading_exponent: float | None = None

    def validate(self) -> None:
        _require_number("time.t_final", self.t_final)
        _require_number("time.n_steps", self.n_steps, integer=True)
        if not self.t_final > 0:
            raise ConfigError(f"time.t_final: must be positive, got {self.t_final}")
        if self.n_steps < 2:
            raise ConfigError(f"time.n_steps: must be >= 2, got {self.n_steps}")
        if self.grading not in ("uniform", "graded"):
            raise ConfigError(f"time.grading: expected uniform or graded, got {self.grading!r}")
        if self.grading_exponent is not None:
            _require_number("time.grading_exponent", self.grading_exponent)
            if self.grading == "uniform":
                raise ConfigError("time.grading_exponent: only allowed with grading = graded")
            if self.grading_exponent < 1:
                raise ConfigError(f"time.grading_exponent: must be >= 1, got {self.grading_exponent}")

    def time_grid(self, alpha: float) -> TimeGrid:
        if self.grading == "uniform":
            return TimeGrid(float(self.t_final), self.n_steps)
        r = self.grading_exponent if self.grading_exponent is not None else (2.0 - alpha) / alpha
        return TimeGrid(float(self.t_final), self.n_steps, float(r))


_INITIAL_KEYS = {
    "constant": {"value"},
    "single_mode": {"amplitude", "mode", "mean"},
    "random": {"seed", "amplitude", "mean"},
    "tanh": {"width"},
}


@dataclass
class InitialSection:
    kind: str = "random"
    value: float | None = None
    amplitude: float | None = None
    mean: float | None = None
    mode: list[int] | None = None
    seed: int | None = None
    width: float | None = None

    def validate(self) -> None:
        if self.kind not in _INITIAL_KEYS:
            raise ConfigError(f"initial.kind: expected one of {sorted(_INITIAL_KEYS)}, got {self.kind!r}")
        allowed = _INITIAL_KEYS[self.kind]
        for f in fields(self):
            if f.name == "kind":
                continue
            v = getattr(self, f.name)
            if v is None:
                continue
            if f.name not in allowed:
                raise ConfigError(f"initial.{f.name}: not used by kind {self.kind!r}")
            if f.name == "mode":
                if not isinstance(v, list) or not all(isinstance(m, int) and not isinstance(m, bool) for m in v):
                    raise ConfigError("initial.mode: expected a list of integers")
            else:
                _require_number(f"initial.{f.name}", v, integer=f.name == "seed")
        if self.seed is not None and self.seed < 0:
            raise ConfigError("initial.seed: must be nonnegative")
        if self.width is not None and not self.width > 0:
            raise ConfigError("initial.width: must be positive")

    def field(self, grid: PeriodicGrid, epsilon: float) -> np.ndarray:
        coords = grid.coordinates()
        L = grid.length
        if self.kind == "constant":
            return np.full(grid.shape, float(self.value if self.value is not None else 0.0))
        if self.kind == "single_mode":
            mode = self.mode or [1]
            if len(mode) != grid.dim:
                raise ConfigError(f"initial.mode: needs {grid.dim} entries")
            arg = sum(2 * np.pi * m * x / L for m, x in zip(mode, coords))
            amp = 0.1 if self.amplitude is None else self.amplitude
            return (self.mean or 0.0) + amp * np.cos(arg)
        if self.kind == "random":
            rng = np.random.Generator(np.random.Philox(self.seed or 0))
            amp = 0.1 if self.amplitude is None else self.amplitude
            return (self.mean or 0.0) + amp * rng.uniform(-1.0, 1.0, size=grid.shape)
        # tanh: band (1D) or disk (2D) of radius L/4 around the domain centre
        width = self.width if self.width is not None else epsilon
        r = np.sqrt(sum((x - L / 2) ** 2 for x in coords))
        return np.tanh((L / 4 - r) / (np.sqrt(2.0) * width))

    def to_dict(self) -> dict:
        return {k: v for k, v in asdict(self).items() if v is not None}


@dataclass
class OutputSection:
    directory: str = "out"
    report_stride: int = 16

    def validate(self) -> None:
        if not isinstance(self.directory, str) or not self.directory:
            raise ConfigError("output.directory: expected a non-empty string")
        _require_number("output.report_stride", self.report_stride, integer=True)
        if self.report_stride < 1:
            raise ConfigError("output.report_stride: must be >= 1")


def _validate_weight_entry(entry: Any, i: int) -> None:
    path = f"weights[{i}]"
    if isinstance(entry, str):
        if entry not in ("beta", "power", "linear"):
            raise ConfigError(f"{path}: unknown weight {entry!r}")
        return
    if not isinstance(entry, dict):
        raise ConfigError(f"{path}: expected a name or an object")
    allowed = {"kind", "name", "theta", "values", "left", "right"}
    unknown = sorted(set(entry) - allowed)
    if unknown:
        raise ConfigError(f"{path}.{unknown[0]}: unknown key")
    if entry.get("kind") != "tabulated":
        raise ConfigError(f"{path}.kind: only 'tabulated' objects are supported")
    for key in ("theta", "values"):
        if not isinstance(entry.get(key), list) or len(entry[key]) < 2:
            raise ConfigError(f"{path}.{key}: expected a list of at least two numbers")
    if not isinstance(entry.get("name", "tabulated"), str):
        raise ConfigError(f"{path}.name: expected a string")


@dataclass
class RunConfig:
    model: ModelSection
    grid: GridSection = field(default_factory=GridSection)
    time: TimeSection = field(default_factory=TimeSection)
    initial: InitialSection = field(default_factory=InitialSection)
    weights: list = field(default_factory=lambda: ["beta", "power"])
    output: OutputSection = field(default_factory=OutputSection)
    schema_version: int = SCHEMA_VERSION

    @classmethod
    def from_dict(cls, data: Any) -> RunConfig:
        if not isinstance(data, dict):
            raise ConfigError("config: expected a JSON object")
        allowed = {"schema_version", "model", "grid", "time", "initial", "weights", "output"}
        unknown = sorted(set(data) - allowed)
        if unknown:
            raise ConfigError(f"{unknown[0]}: unknown key")
        version = data.get("schema_version")
        if version != SCHEMA_VERSION:
            raise ConfigError(f"schema_version: expected {SCHEMA_VERSION}, got {version!r}")
        if "model" not in data:
            raise ConfigError("model: missing section")
        weights = data.get("weights", ["beta", "power"])
        if not isinstance(weights, list):
            raise ConfigError("weights: expected a list")
        cfg = cls(
            model=_take(ModelSection, data["model"], "model"),
            grid=_take(GridSection, data.get("grid", {}), "grid"),
            time=_take(TimeSection, data.get("time", {}), "time"),
            initial=_take(InitialSection, data.get("initial", {}), "initial"),
            weights=list(weights),
            output=_take(OutputSection, data.get("output", {}), "output"),
            schema_version=version,
        )
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path: str | Path) -> RunConfig:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from None
        return cls.from_dict(data)

    def validate(self) -> None:
        self.model.validate()
        self.grid.validate()
        self.time.validate()
        self.initial.validate()
        self.output.validate()
        for i, entry in enumerate(self.weights):
            _validate_weight_entry(entry, i)

    def to_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "model": asdict(self.model),
            "grid": asdict(self.grid),
            "time": asdict(self.time),
            "initial": self.initial.to_dict(),
            "weights": [w if isinstance(w, str) else dict(w) for w in self.weights],
            "output": asdict(self.output),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def hash(self) -> str:
        canon = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()

    def weight_functions(self) -> list[WeightFunction]:
        alpha = self.model.alpha
        out = []
        for entry in self.weights:
            if isinstance(entry, str):
                out.append(named_weight(entry, alpha))
            else:
                out.append(tabulated_weight(alpha, entry["theta"], entry["values"], entry.get("left", 0.0),
                                            entry.get("right", 0.0), entry.get("name", "tabulated")))
        return out
