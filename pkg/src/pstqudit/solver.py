"""Coupling design for perfect state transfer and the reduced (Krylov) dynamics."""
from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from .spectral import OrthoPolySet, SpectralDistribution

INVERSE_TOL = 1e-8
FEASIBILITY_TOL = 1e-9
ROUND_TRIP_TOL = 1e-9
PST_TOL = 1e-9


class InfeasibleError(ValueError):
    """The network admits no perfect-transfer design."""


class ToleranceError(ArithmeticError):
    """A numerical identity that must hold was violated."""


@dataclass(frozen=True)
class PMatrix:
    """``P[i, j] = P_i(x_j)`` together with the quadrature weights."""

    entries: np.ndarray
    weights: np.ndarray

    @property
    def D(self) -> int:
        return self.entries.shape[0] - 1

    @property
    def W(self) -> np.ndarray:
        return np.diag(self.weights)

    @property
    def inverse(self) -> np.ndarray:
        """``W P^t``, which equals ``P^{-1}``."""
        return self.weights[:, None] * self.entries.T

    def inverse_residual(self) -> float:
        return float(np.max(np.abs(self.entries @ self.W @ self.entries.T - np.eye(self.D + 1))))


def build_p_matrix(polys: OrthoPolySet, dist: SpectralDistribution) -> PMatrix:
    if polys.D != dist.D:
        raise ValueError(f"degree mismatch: polynomials D={polys.D}, distribution D={dist.D}")
    rows = polys.eval_P_recurrence(dist.nodes)
    pm = PMatrix(np.vstack(rows), np.array(dist.weights, dtype=float))
    res = pm.inverse_residual()
    if res > INVERSE_TOL:
        raise ToleranceError(f"P W P^t deviates from identity by {res:.3e}")
    if not np.allclose(pm.entries[0], 1.0, rtol=0, atol=1e-14):
        raise ToleranceError("first row of P is not all ones")
    return pm


@dataclass(frozen=True)
class Feasibility:
    feasible: bool
    last_stratum_size: int
    max_mirror_deviation: float
    reason: str | None = None

    def __bool__(self) -> bool:
        return self.feasible


def pst_feasibility(valencies: Sequence[Any], pm: PMatrix, tol: float = FEASIBILITY_TOL) -> Feasibility:
    """Antipode must be unique and ``|P_D(x_k)| = 1`` at every node."""
    kD = valencies[-1]
    dev = float(np.max(np.abs(np.abs(pm.entries[-1]) - 1.0)))
    if kD != 1:
        return Feasibility(False, int(kD), dev, f"last stratum has {kD} vertices (kappa_D = {kD}), antipode not unique")
    if dev > tol:
        return Feasibility(False, 1, dev, f"|P_D(x_k)| deviates from 1 by {dev:.3e}")
    return Feasibility(True, 1, dev)


@dataclass(frozen=True)
class CouplingDesign:
    J: np.ndarray
    theta: float
    t0: float
    branch_l: tuple[int, ...]
    branch_f: tuple[int, ...]
    phase_factor: float = 2

    def to_document(self) -> dict[str, Any]:
        return {
            "J": [float(x) for x in self.J],
            "theta": float(self.theta),
            "t0": float(self.t0),
            "branch_l": list(self.branch_l),
            "f": list(self.branch_f),
            "phase_factor": self.phase_factor,
        }


def sign_branches(pm: PMatrix) -> tuple[int, ...]:
    return tuple(0 if v >= 0 else 1 for v in pm.inverse[:, -1])


def design_couplings(
    pm: PMatrix,
    theta: float = 0.0,
    t0: float = 1.0,
    branch_l: Sequence[int] | None = None,
    override_f: Sequence[int] | None = None,
    phase_factor: float = 2,
) -> CouplingDesign:
    """Couplings ``J_k = -1/(c t0) sum_m [theta + (2 l_m + f_m) pi] (W P^t)_{mk}``.

    With ``c = phase_factor = 2`` this is the closed form whose phases are
    ``exp(-2 i t0 sum_m J_m P_m(x_k))``.
    """
    if t0 <= 0:
        raise ValueError("t0 must be positive")
    if np.max(np.abs(np.abs(pm.entries[-1]) - 1.0)) > FEASIBILITY_TOL:
        raise InfeasibleError("|P_D(x_k)| != 1, no design realizes the transfer")
    n = pm.D + 1
    ls = tuple(int(x) for x in (branch_l if branch_l is not None else [0] * n))
    fs = tuple(int(x) for x in (override_f if override_f is not None else sign_branches(pm)))
    if len(ls) != n or len(fs) != n:
        raise ValueError(f"branch vectors must have length {n}")
    phases = theta + (2 * np.array(ls) + np.array(fs)) * math.pi
    J = -(phases @ pm.inverse) / (phase_factor * t0)
    design = CouplingDesign(J, float(theta), float(t0), ls, fs, phase_factor)
    if override_f is None:
        res = round_trip_residual(design, pm)
        if res > ROUND_TRIP_TOL:
            raise ToleranceError(f"designed couplings fail the round trip by {res:.3e}")
    return design


def spectrum_sums(J: np.ndarray, pm: PMatrix) -> np.ndarray:
    """``sum_m J_m P_m(x_k)`` for every node ``k``."""
    return np.asarray(J) @ pm.entries


def round_trip_residual(design: CouplingDesign, pm: PMatrix) -> float:
    """Max deviation of ``gamma_k exp(-i c t0 sum J P) `` from ``e^{i theta} (W P^t)_{kD}``."""
    eta = np.exp(-1j * design.phase_factor * design.t0 * spectrum_sums(design.J, pm))
    lhs = pm.weights * eta
    rhs = np.exp(1j * design.theta) * pm.inverse[:, -1]
    return float(np.max(np.abs(lhs - rhs)))


def constraint_residual(design: CouplingDesign, pm: PMatrix) -> float:
    """Residual of ``P (eta * gamma) = (0, ..., 0, e^{i theta})``."""
    eta = np.exp(-1j * design.phase_factor * design.t0 * spectrum_sums(design.J, pm))
    target = np.zeros(pm.D + 1, dtype=complex)
    target[-1] = np.exp(1j * design.theta)
    return float(np.max(np.abs(pm.entries @ (eta * pm.weights) - target)))


def reduced_hamiltonian_eigenvalues(design: CouplingDesign, pm: PMatrix) -> np.ndarray:
    return design.phase_factor * spectrum_sums(design.J, pm)


@dataclass(frozen=True)
class TransferReport:
    times: np.ndarray
    amplitudes: np.ndarray  # shape (len(times), D+1), f_i(t)
    t0: float
    fidelity_at_t0: float
    phase_at_t0: float
    max_leakage: float
    unitarity_error: float = field(default=0.0)

    @property
    def curve(self) -> np.ndarray:
        return np.abs(self.amplitudes)

    @property
    def perfect(self) -> bool:
        return self.fidelity_at_t0 >= 1 - PST_TOL and self.max_leakage <= PST_TOL

    def to_document(self) -> dict[str, Any]:
        return {
            "t0": self.t0,
            "fidelity_at_t0": self.fidelity_at_t0,
            "phase_at_t0": self.phase_at_t0,
            "max_leakage": self.max_leakage,
            "unitarity_error": self.unitarity_error,
            "perfect_transfer": self.perfect,
        }


def krylov_amplitudes(
    J: np.ndarray, pm: PMatrix, times: np.ndarray, phase_factor: float = 2
) -> np.ndarray:
    """``f_i(t) = sum_k gamma_k P_i(x_k) exp(-i E_k t)``, shape ``(len(times), D+1)``."""
    E = phase_factor * spectrum_sums(J, pm)
    phases = np.exp(-1j * np.outer(np.asarray(times, dtype=float), E))
    return phases @ (pm.weights[:, None] * pm.entries.T)


def evolve(design: CouplingDesign, pm: PMatrix, t_grid: Sequence[float]) -> TransferReport:
    times = np.asarray(t_grid, dtype=float)
    if times.size == 0:
        raise ValueError("empty time grid")
    hit = np.flatnonzero(np.isclose(times, design.t0, rtol=0, atol=1e-12))
    if hit.size == 0:
        raise ValueError(f"t0 = {design.t0} is not on the time grid")
    amps = krylov_amplitudes(design.J, pm, times, design.phase_factor)
    at = amps[hit[0]]
    norms = np.sum(np.abs(amps) ** 2, axis=1)
    return TransferReport(
        times,
        amps,
        design.t0,
        float(abs(at[-1])),
        float(np.angle(at[-1])),
        float(np.max(np.abs(at[:-1]))) if pm.D > 0 else 0.0,
        float(np.max(np.abs(norms - 1))),
    )


def curve_csv(report: TransferReport) -> str:
    """CSV with columns ``t, abs_f_0..abs_f_D, re_f_D, im_f_D`` (LF, 12 significant digits)."""
    D = report.amplitudes.shape[1] - 1
    buf = io.StringIO()
    header = ["t"] + [f"abs_f_{i}" for i in range(D + 1)] + ["re_f_D", "im_f_D"]
    buf.write(",".join(header) + "\n")
    for t, row in zip(report.times, report.amplitudes):
        vals = [t, *np.abs(row), row[-1].real, row[-1].imag]
        buf.write(",".join(fmt(v) for v in vals) + "\n")
    return buf.getvalue()


def fmt(x: float) -> str:
    x = float(x)
    if x == 0:
        x = 0.0  # drop the sign of negative zero
    return f"{x:.12g}"


def time_grid(t_min: float, t_max: float, samples: int, t0: float) -> np.ndarray:
    """Uniform grid with ``t0`` inserted if missing."""
    if samples < 2:
        raise ValueError("need at least two samples")
    grid = np.linspace(t_min, t_max, samples)
    if not np.any(np.isclose(grid, t0, rtol=0, atol=1e-12)):
        grid = np.sort(np.append(grid, t0))
    return grid
