"""Glue from a graph or intersection array to the PST design objects."""
from __future__ import annotations

from dataclasses import dataclass

from .graph import (
    Graph,
    GraphError,
    IntersectionNumbers,
    PdrReport,
    Stratification,
    array_valencies,
    check_consistency,
    intersection_numbers,
    stratify,
)
from .solver import Feasibility, PMatrix, build_p_matrix, pst_feasibility
from .spectral import (
    OrthoPolySet,
    QDParams,
    SpectralDistribution,
    build_polynomials,
    qd_from_intersection,
    spectral_distribution,
)


@dataclass(frozen=True)
class Network:
    name: str | None
    graph: Graph | None
    stratification: Stratification | None
    report: PdrReport | None
    numbers: IntersectionNumbers
    valencies: tuple
    qd: QDParams
    polys: OrthoPolySet
    dist: SpectralDistribution
    pm: PMatrix
    feasibility: Feasibility


class NotPseudoDistanceRegular(GraphError):
    def __init__(self, report: PdrReport):
        k, b1, b2 = report.witness
        super().__init__(
            f"not pseudo-distance-regular: vertices {b1} and {b2} of stratum {k} have different local numbers"
        )
        self.report = report


def analyze(obj: Graph | IntersectionNumbers, reference: int = 0) -> Network:
    if isinstance(obj, Graph):
        strat = stratify(obj, reference)
        report = intersection_numbers(obj, strat)
        if not report.is_pseudo_distance_regular:
            raise NotPseudoDistanceRegular(report)
        numbers = report.numbers
        valencies = strat.valencies
        name = obj.name
    else:
        strat, report, numbers = None, None, obj
        if not check_consistency(numbers):
            raise GraphError("intersection array violates the counting relations")
        valencies = tuple(int(k) for k in array_valencies(numbers))
        name = numbers.name
    qd = qd_from_intersection(numbers)
    polys = build_polynomials(qd)
    dist = spectral_distribution(qd, polys)
    pm = build_p_matrix(polys, dist)
    feas = pst_feasibility(valencies, pm)
    return Network(name, obj if isinstance(obj, Graph) else None, strat, report, numbers,
                   valencies, qd, polys, dist, pm, feas)
