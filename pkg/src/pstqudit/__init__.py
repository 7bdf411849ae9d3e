"""Coupling design for perfect qudit transfer over pseudo-distance-regular networks."""
from .graph import (
    Graph,
    GraphError,
    IntersectionNumbers,
    PdrReport,
    Stratification,
    check_consistency,
    distances,
    intersection_numbers,
    load_array,
    load_graph,
    stratify,
)
from .pipeline import Network, analyze
from .solver import (
    CouplingDesign,
    PMatrix,
    TransferReport,
    build_p_matrix,
    design_couplings,
    evolve,
    pst_feasibility,
    reduced_hamiltonian_eigenvalues,
)
from .spectral import (
    OrthoPolySet,
    QDParams,
    SpectralDistribution,
    build_polynomials,
    qd_from_graph,
    qd_from_intersection,
    spectral_distribution,
    stieltjes_eval,
)

__version__ = "0.1.0"
