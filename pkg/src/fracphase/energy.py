"""Classical, weighted and fractional energy diagnostics plus dissipation flags."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Sequence

import numpy as np
from scipy.interpolate import PchipInterpolator

from .caputo import caputo_derivative_series
from .errors import NonNormalized, OutOfRange
from .model import ModelParams, Operator
from .spectral import SpectralWorkspace
from .weights import WeightFunction, check_weight_admissible

if TYPE_CHECKING:
    from .solver import Trajectory

ENERGY_BOUND_TOL = 1e-8
CSV_FLAG_ENERGY = 1
CSV_FLAG_WEIGHTED = 2
CSV_FLAG_CAPUTO = 4


def classical_energy(phi: np.ndarray, params: ModelParams, workspace: SpectralWorkspace) -> float:
    """``int (eps^2/2 |grad phi|^2 + F(phi)) dx``."""
    ws = workspace
    grad = ws.gradient(phi)
    gradient_part = sum(ws.inner_product(d, d) for d in grad)
    bulk = ws.grid.cell_volume * float(np.sum(params.potential.F(phi)))
    return 0.5 * params.epsilon**2 * gradient_part + bulk


def dissipation_tolerance(e0: float) -> float:
    return 1e-6 * (abs(e0) + 1.0)


def _interpolant(traj: Trajectory) -> PchipInterpolator:
    # pchip keeps monotone stretches monotone, so it cannot invent a rise in E
    return PchipInterpolator(traj.times, traj.energies, extrapolate=False)


def weighted_energy(traj: Trajectory, omega: WeightFunction, t: float | np.ndarray, n_nodes: int = 32):
    """``E_omega(t) = int_0^1 omega(theta) E(theta t) dtheta`` by Gauss-Jacobi quadrature."""
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(t_arr > traj.t_final * (1 + 1e-14)) or np.any(t_arr < 0):
        raise OutOfRange(f"t must lie in [0, {traj.t_final}]")
    theta, w = omega.rule(n_nodes)
    interp = _interpolant(traj)
    samples = interp(np.clip(np.outer(t_arr, theta), 0.0, traj.t_final))
    out = samples @ w
    return float(out[0]) if np.ndim(t) == 0 else out


def weighted_energy_series(traj: Trajectory, omega: WeightFunction, n_nodes: int = 32) -> np.ndarray:
    return weighted_energy(traj, omega, traj.times, n_nodes)


def weighted_energy_derivative_series(traj: Trajectory, omega: WeightFunction, n_nodes: int = 32) -> np.ndarray:
    """Centered differences of ``E_omega`` on the trajectory nodes.

    Endpoints have no centered stencil and are ``nan``.
    """
    if len(traj) < 3:
        raise ValueError("need at least three nodes")
    e = weighted_energy_series(traj, omega, n_nodes)
    t = traj.times
    out = np.full(t.size, np.nan)
    out[1:-1] = (e[2:] - e[:-2]) / (t[2:] - t[:-2])
    return out


def caputo_energy_series(traj: Trajectory, alpha: float) -> np.ndarray:
    return caputo_derivative_series(traj.energies, alpha, traj.times)


def psi(traj: Trajectory, params: ModelParams, workspace: SpectralWorkspace, k: int):
    """Backward-difference ``psi`` at node ``k >= 1``.

    Allen-Cahn: ``phi'``; Cahn-Hilliard: ``grad (-Lap)^{-1} phi'`` (a list of
    components). Diagnostic only.
    """
    if traj.fields is None or not 1 <= k < traj.n_filled:
        raise IndexError(f"no field increment available at node {k}")
    dphi = (traj.fields[k] - traj.fields[k - 1]) / (traj.times[k] - traj.times[k - 1])
    if params.operator is Operator.ALLEN_CAHN:
        return dphi
    return workspace.gradient(workspace.inv_neg_laplacian_zero_mean(dphi))


@dataclass
class WeightDiagnostics:
    name: str
    admissible: bool
    admissibility_margin: float
    values: np.ndarray
    derivative: np.ndarray
    worst_derivative: float
    passed: bool | None  # None when not asserted (inadmissible weight)


@dataclass
class EnergyReport:
    times: np.ndarray
    energy: np.ndarray
    caputo: np.ndarray
    weights: list[WeightDiagnostics]
    tolerance: float
    energy_bound_margin: float
    energy_bound_passed: bool
    caputo_margin: float
    caputo_passed: bool
    raw_energy_increase_count: int
    raw_energy_max_increase: float
    mass_drift: float | None = None
    extra: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        weighted = all(w.passed for w in self.weights if w.passed is not None)
        return self.energy_bound_passed and self.caputo_passed and weighted

    def row_flags(self) -> np.ndarray:
        e0 = self.energy[0]
        flags = np.zeros(self.times.size, dtype=int)
        flags[self.energy > e0 + ENERGY_BOUND_TOL] |= CSV_FLAG_ENERGY
        for w in self.weights:
            if w.passed is not None:
                bad = np.nan_to_num(w.derivative, nan=-np.inf) > self.tolerance
                flags[bad] |= CSV_FLAG_WEIGHTED
        flags[self.caputo > self.tolerance] |= CSV_FLAG_CAPUTO
        return flags

    def columns(self) -> list[str]:
        names = [w.name for w in self.weights]
        return (["t", "E"] + [f"E_omega_{n}" for n in names] + [f"dEomega_dt_{n}" for n in names]
                + ["caputo_E", "flags"])

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns())
        flags = self.row_flags()
        for k in range(self.times.size):
            row = [self.times[k], self.energy[k]]
            row += [w.values[k] for w in self.weights]
            row += [w.derivative[k] for w in self.weights]
            row += [self.caputo[k]]
            writer.writerow([repr(float(x)) for x in row] + [int(flags[k])])
        return buf.getvalue()

    def summary(self) -> dict:
        def num(x):
            return None if x is None or not math.isfinite(x) else float(x)

        return {
            "passed": self.passed,
            "tolerance": self.tolerance,
            "energy_bound": {"passed": self.energy_bound_passed, "margin": num(self.energy_bound_margin),
                             "tolerance": ENERGY_BOUND_TOL},
            "caputo_energy": {"passed": self.caputo_passed, "margin": num(self.caputo_margin)},
            "weighted_energy": [
                {"name": w.name, "admissible": w.admissible, "admissibility_margin": num(w.admissibility_margin),
                 "asserted": w.passed is not None, "passed": w.passed,
                 "worst_derivative": num(w.worst_derivative)}
                for w in self.weights
            ],
            "raw_energy_derivative": {"asserted": False, "increase_count": self.raw_energy_increase_count,
                                      "max_increase": num(self.raw_energy_max_increase)},
            "mass_drift": num(self.mass_drift),
            "E0": float(self.energy[0]),
            "E_final": float(self.energy[-1]),
            **self.extra,
        }


def dissipation_report(
    traj: Trajectory,
    omegas: Sequence[WeightFunction],
    params: ModelParams,
    skip_first_interior: bool = False,
) -> EnergyReport:
    """Evaluate every dissipation claim on a finished trajectory.

    Asserted: ``E(t_k) <= E(0)``, ``dE_omega/dt <= 0`` for admissible weights
    and ``D^alpha E <= 0``. The sign of the raw ``dE/dt`` is recorded only.
    """
    e = traj.energies
    tol = dissipation_tolerance(e[0])
    bound_margin = float(np.min(e[0] - e))
    caputo = caputo_energy_series(traj, params.alpha)
    caputo_margin = float(np.min(-caputo[1:])) if caputo.size > 1 else math.inf
    weights = []
    first = 2 if skip_first_interior else 1
    for omega in omegas:
        try:
            adm = check_weight_admissible(omega, params.alpha)
            admissible, margin = bool(adm.admissible), adm.margin
        except NonNormalized:
            admissible, margin = False, math.nan
        values = weighted_energy_series(traj, omega)
        deriv = weighted_energy_derivative_series(traj, omega)
        interior = deriv[first:-1]
        worst = float(np.max(interior)) if interior.size else -math.inf
        weights.append(WeightDiagnostics(omega.label, admissible, margin, values, deriv, worst,
                                         bool(worst <= tol) if admissible else None))
    de = np.diff(e)
    mass_drift = None
    if traj.masses is not None:
        mass_drift = float(np.max(np.abs(traj.masses - traj.masses[0])))
    return EnergyReport(
        times=traj.times,
        energy=e,
        caputo=caputo,
        weights=weights,
        tolerance=tol,
        energy_bound_margin=bound_margin,
        energy_bound_passed=bool(bound_margin >= -ENERGY_BOUND_TOL),
        caputo_margin=caputo_margin,
        caputo_passed=bool(caputo_margin >= -tol),
        raw_energy_increase_count=int(np.sum(de > 0)),
        raw_energy_max_increase=float(np.max(de)) if de.size else -math.inf,
        mass_drift=mass_drift,
    )
