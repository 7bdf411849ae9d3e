"""Szegő–Jacobi parameters, orthogonal polynomials and the spectral distribution.

Polynomial coefficient tables are stored lowest power first (``coeffs[i]``
multiplies ``x**i``), the convention of :mod:`numpy.polynomial`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Any, Sequence

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .graph import Graph, IntersectionNumbers, Stratification

NODE_SEPARATION = 1e-8
WEIGHT_POSITIVITY = 1e-12
RESIDUE_AGREEMENT = 1e-9

Number = Any  # Fraction in exact mode, float otherwise


class SpectralError(ValueError):
    pass


@dataclass(frozen=True)
class QDParams:
    alpha: tuple[Number, ...]
    omega: tuple[Number, ...]

    def __post_init__(self) -> None:
        if len(self.alpha) != len(self.omega) + 1:
            raise SpectralError(
                f"need len(alpha) == len(omega) + 1, got {len(self.alpha)} and {len(self.omega)}"
            )
        for l, w in enumerate(self.omega, start=1):
            if not w > 0:
                raise SpectralError(f"omega_{l} = {w} is not positive")

    @property
    def D(self) -> int:
        return len(self.omega)

    @property
    def exact(self) -> bool:
        return all(isinstance(x, Rational) for x in (*self.alpha, *self.omega))

    def jacobi_matrix(self) -> np.ndarray:
        D = self.D
        j = np.diag(np.asarray(self.alpha, dtype=float))
        off = np.sqrt(np.asarray(self.omega, dtype=float))
        j[np.arange(D), np.arange(1, D + 1)] = off
        j[np.arange(1, D + 1), np.arange(D)] = off
        return j

    def to_document(self) -> dict[str, Any]:
        return {"alpha": [_jsonable(x) for x in self.alpha], "omega": [_jsonable(x) for x in self.omega]}


def _jsonable(x: Number) -> float | int:
    if isinstance(x, Rational) and x.denominator == 1:
        return int(x)
    return float(x)


def qd_from_intersection(num: IntersectionNumbers) -> QDParams:
    """``alpha_l = a_l`` (``= kappa - b_l - c_l`` when regular), ``omega_l = b_{l-1} c_l``."""
    alpha = tuple(num.a)
    omega = tuple(num.b[l - 1] * num.c[l - 1] for l in range(1, num.diameter + 1))
    for l, w in enumerate(omega, start=1):
        if w <= 0:
            raise SpectralError(f"omega_{l} = {w}: corrupt intersection array")
    return QDParams(alpha, omega)


def qd_from_graph(g: Graph, s: Stratification) -> QDParams:
    """Jacobi parameters read off the action of ``A`` on the stratum vectors.

    Requires the span of the normalized stratum indicators to be invariant
    under the adjacency matrix, i.e. every vertex of a stratum has the same
    number of neighbours in each adjacent stratum.  Exact rationals.
    """
    level = s.level_of()
    D = s.diameter
    ks = s.valencies
    # counts[i][j][v]: neighbours of v (in stratum i) lying in stratum j
    per_vertex: dict[int, dict[int, int]] = {}
    for v in range(g.n_vertices):
        cnt: dict[int, int] = {}
        for u in g.neighbors(v):
            cnt[level[u]] = cnt.get(level[u], 0) + 1
        per_vertex[v] = cnt
    uniform: dict[tuple[int, int], int] = {}
    for i, stratum in enumerate(s.strata):
        for j in (i - 1, i, i + 1):
            if not 0 <= j <= D:
                continue
            vals = {per_vertex[v].get(j, 0) for v in stratum}
            if len(vals) != 1:
                raise SpectralError(
                    f"stratum span is not invariant: vertices of stratum {i} see "
                    f"different numbers {sorted(vals)} of neighbours in stratum {j}"
                )
            uniform[(i, j)] = vals.pop()
    alpha = tuple(Fraction(uniform[(l, l)]) for l in range(D + 1))
    # <phi_{l+1}|A|phi_l> = k_{l+1} * kminus / sqrt(k_l k_{l+1})
    omega = tuple(
        Fraction(ks[l + 1] * uniform[(l + 1, l)] ** 2, ks[l]) for l in range(D)
    )
    return QDParams(alpha, omega)


def _poly_mul_x(p: list[Number]) -> list[Number]:
    return [0 * p[0]] + list(p)


def _poly_axpy(p: list[Number], q: list[Number], s: Number) -> list[Number]:
    """Return ``p - s*q`` with zero padding."""
    n = max(len(p), len(q))
    zero = 0 * (p[0] if p else q[0])
    out = [zero] * n
    for i, x in enumerate(p):
        out[i] = out[i] + x
    for i, x in enumerate(q):
        out[i] = out[i] - s * x
    return out


def _three_term(alpha: Sequence[Number], omega: Sequence[Number], count: int, one: Number) -> list[list[Number]]:
    """Monic family ``p_{k+1} = (x - alpha[k]) p_k - omega[k] p_{k-1}``; ``omega[k]`` pairs with ``p_{k-1}``."""
    polys: list[list[Number]] = [[one]]
    if count > 1:
        polys.append([-alpha[0] * one, one])
    for k in range(1, count - 1):
        nxt = _poly_mul_x(polys[k])
        nxt = _poly_axpy(nxt, polys[k], alpha[k])
        nxt = _poly_axpy(nxt, polys[k - 1], omega[k])
        polys.append(nxt)
    return polys


@dataclass(frozen=True)
class OrthoPolySet:
    qd: QDParams
    Q: tuple[tuple[Number, ...], ...]  # Q_0..Q_{D+1}, monic
    P: tuple[tuple[float, ...], ...]  # P_0..P_D, orthonormal
    Q1: tuple[tuple[Number, ...], ...]  # first associated Q^(1)_0..Q^(1)_D
    norms: tuple[float, ...]  # sqrt(omega_1 ... omega_k)

    @property
    def D(self) -> int:
        return self.qd.D

    def eval_Q(self, k: int, x: Any) -> Any:
        return _horner(self.Q[k], x)

    def eval_P(self, k: int, x: Any) -> Any:
        return _horner(self.P[k], x)

    def eval_Q1(self, k: int, x: Any) -> Any:
        return _horner(self.Q1[k], x)

    def eval_P_recurrence(self, x: Any) -> list[Any]:
        """``P_0(x)..P_D(x)`` straight from the normalized recurrence."""
        alpha = [float(a) for a in self.qd.alpha]
        sw = [math.sqrt(float(w)) for w in self.qd.omega]
        x = np.asarray(x, dtype=float)
        vals = [np.ones_like(x)]
        if self.D >= 1:
            vals.append((x - alpha[0]) / sw[0])
        for k in range(1, self.D):
            vals.append(((x - alpha[k]) * vals[k] - sw[k - 1] * vals[k - 1]) / sw[k])
        return vals

    def Q_prime(self, k: int) -> list[Number]:
        return [i * c for i, c in enumerate(self.Q[k])][1:]


def _horner(coeffs: Sequence[Number], x: Any) -> Any:
    if isinstance(x, (int, Fraction)) and all(isinstance(c, Rational) for c in coeffs):
        acc = Fraction(coeffs[-1])
        for c in reversed(coeffs[:-1]):
            acc = acc * x + c
        return acc
    return np.polynomial.polynomial.polyval(x, [float(c) for c in coeffs])


def build_polynomials(qd: QDParams) -> OrthoPolySet:
    D = qd.D
    if qd.exact:
        one: Number = Fraction(1)
        alpha = [Fraction(a) for a in qd.alpha]
        omega_shift = [Fraction(0)] + [Fraction(w) for w in qd.omega]
    else:
        one = 1.0
        alpha = [float(a) for a in qd.alpha]
        omega_shift = [0.0] + [float(w) for w in qd.omega]
    # Q_{k+1} = (x - alpha_k) Q_k - omega_k Q_{k-1}
    Q = _three_term(alpha, omega_shift, D + 2, one)
    # Q^(1): same recurrence with indices shifted by one
    Q1 = _three_term(alpha[1:] + [one * 0], omega_shift[1:] + [one * 0], D + 1, one)
    norms = [1.0]
    for w in qd.omega:
        norms.append(norms[-1] * math.sqrt(float(w)))
    P = [tuple(float(c) / norms[k] for c in Q[k]) for k in range(D + 1)]
    return OrthoPolySet(
        qd,
        tuple(tuple(q) for q in Q),
        tuple(P),
        tuple(tuple(q) for q in Q1),
        tuple(norms[: D + 1]),
    )


@dataclass(frozen=True)
class SpectralDistribution:
    nodes: np.ndarray
    weights: np.ndarray
    ordering: str = "descending"
    # residue-formula weights in the same order, kept as the cross-check
    residue_weights: np.ndarray | None = None

    @property
    def D(self) -> int:
        return len(self.nodes) - 1

    def permuted(self, perm: Sequence[int], tag: str) -> "SpectralDistribution":
        """Reorder so that entry ``i`` is old entry ``perm[i]``."""
        perm = list(perm)
        if sorted(perm) != list(range(len(self.nodes))):
            raise ValueError(f"{perm} is not a permutation")
        rw = None if self.residue_weights is None else self.residue_weights[perm]
        return SpectralDistribution(self.nodes[perm], self.weights[perm], tag, rw)

    def moments(self, m_max: int) -> np.ndarray:
        return np.array([np.sum(self.weights * self.nodes**m) for m in range(m_max + 1)])


def residue_weights(polys: OrthoPolySet, nodes: np.ndarray) -> np.ndarray:
    """Partial-fraction weights ``Q^(1)_D(x_l) / Q'_{D+1}(x_l)``."""
    D = polys.D
    num = np.array([float(c) for c in polys.Q1[D]])
    den = np.array([float(c) for c in polys.Q_prime(D + 1)])
    return np.polynomial.polynomial.polyval(nodes, num) / np.polynomial.polynomial.polyval(nodes, den)


def spectral_distribution(qd: QDParams, polys: OrthoPolySet | None = None) -> SpectralDistribution:
    """Gauss quadrature of the spectral measure via the Jacobi-matrix eigenproblem."""
    diag = np.asarray(qd.alpha, dtype=float)
    off = np.sqrt(np.asarray(qd.omega, dtype=float))
    if qd.D == 0:
        vals, vecs = diag.copy(), np.ones((1, 1))
    else:
        vals, vecs = eigh_tridiagonal(diag, off)
    order = np.argsort(-vals, kind="stable")
    nodes = vals[order]
    weights = vecs[0, order] ** 2
    if np.any(np.diff(-nodes) <= NODE_SEPARATION):
        raise SpectralError("quadrature nodes are not separated; Jacobi input is invalid")
    if np.any(weights <= WEIGHT_POSITIVITY):
        raise SpectralError("non-positive quadrature weight")
    polys = polys or build_polynomials(qd)
    rw = residue_weights(polys, nodes)
    if np.max(np.abs(rw - weights)) > RESIDUE_AGREEMENT:
        raise SpectralError(
            f"Golub-Welsch and residue weights disagree by {np.max(np.abs(rw - weights)):.3e}"
        )
    return SpectralDistribution(nodes, weights, "descending", rw)


def stieltjes_eval(qd: QDParams, z: complex, tol: float = 1e-10) -> complex:
    """Finite continued fraction ``1/(z - a_0 - w_1/(z - a_1 - ...))``."""
    nodes = np.linalg.eigvalsh(qd.jacobi_matrix())
    if np.min(np.abs(z - nodes)) <= tol:
        raise SpectralError(f"z = {z} is within {tol} of a pole")
    alpha = [complex(a) for a in qd.alpha]
    omega = [complex(w) for w in qd.omega]
    acc = z - alpha[qd.D]
    for l in range(qd.D, 0, -1):
        acc = z - alpha[l - 1] - omega[l - 1] / acc
    return 1 / acc


def exact_moments(qd: QDParams, m_max: int) -> list[Number]:
    """``<phi_0|J^m|phi_0>`` for ``m = 0..m_max`` in exact arithmetic.

    Uses the tridiagonal matrix similar to the Jacobi matrix with ones below
    the diagonal and ``omega`` above it, so no square roots appear.
    """
    D = qd.D
    vec = [Fraction(0)] * (D + 1) if qd.exact else [0.0] * (D + 1)
    vec[0] = vec[0] + 1
    out = [vec[0]]
    for _ in range(m_max):
        new = [0 * vec[0]] * (D + 1)
        for i in range(D + 1):
            acc = qd.alpha[i] * vec[i]
            if i > 0:
                acc += vec[i - 1]
            if i < D:
                acc += qd.omega[i] * vec[i + 1]
            new[i] = acc
        vec = new
        out.append(vec[0])
    return out


def exact_spectral_distribution(qd: QDParams) -> tuple[list[Any], list[Any]]:
    """Nodes and weights as sympy expressions (roots of Q_{D+1}, residues).

    Only meaningful for rational Jacobi parameters; nodes are sorted
    descending to match :func:`spectral_distribution`.
    """
    import sympy as sp

    if not qd.exact:
        raise SpectralError("exact spectrum needs rational Jacobi parameters")
    x = sp.Symbol("x")
    polys = build_polynomials(qd)
    q_next = sum(sp.Rational(c.numerator, c.denominator) * x**i for i, c in enumerate(polys.Q[qd.D + 1]))
    q1 = sum(sp.Rational(c.numerator, c.denominator) * x**i for i, c in enumerate(polys.Q1[qd.D]))
    roots = sp.roots(sp.Poly(q_next, x))
    if sum(roots.values()) != qd.D + 1:
        roots = {r: 1 for r in sp.Poly(q_next, x).all_roots()}
    nodes = sorted(roots, key=lambda r: -float(sp.N(r, 30)))
    dq = sp.diff(q_next, x)
    weights = [sp.nsimplify(sp.simplify(q1.subs(x, r) / dq.subs(x, r))) for r in nodes]
    return nodes, weights


def spectral_report(qd: QDParams, polys: OrthoPolySet, dist: SpectralDistribution) -> dict[str, Any]:
    return {
        **qd.to_document(),
        "nodes": [float(x) for x in dist.nodes],
        "weights": [float(w) for w in dist.weights],
        "Q": [[_jsonable(c) for c in q] for q in polys.Q],
        "P": [[float(c) for c in p] for p in polys.P],
    }
