import math

import numpy as np
import pytest

from pstqudit import catalog
from pstqudit.solver import (
    InfeasibleError,
    build_p_matrix,
    constraint_residual,
    curve_csv,
    design_couplings,
    evolve,
    krylov_amplitudes,
    pst_feasibility,
    reduced_hamiltonian_eigenvalues,
    round_trip_residual,
    sign_branches,
    spectrum_sums,
    time_grid,
)
from conftest import network

PST = list(catalog.PST_NETWORKS)
PRINTED = [n for n in catalog.PUBLISHED_NETWORKS if catalog.get(n).p_matrix is not None]


@pytest.mark.parametrize("name", list(catalog.CATALOG))
def test_p_matrix_inverse(name):
    pm = network(name).pm
    assert pm.inverse_residual() < 1e-10
    assert np.max(np.abs(pm.inverse @ pm.entries - np.eye(pm.D + 1))) < 1e-10
    np.testing.assert_allclose(pm.entries[0], 1, atol=1e-14)


def test_k2_p_matrix():
    np.testing.assert_allclose(network("K2").pm.entries, [[1, 1], [1, -1]], atol=1e-14)


@pytest.mark.parametrize("name", PRINTED)
def test_p_matrix_matches_published(name):
    e = catalog.get(name)
    pm = network(name).pm
    order = list(e.published_order)
    mine = pm.entries[:, order]
    rows = [0, 1, 4] if name == "modified_G2" else range(pm.D + 1)
    for i in rows:
        np.testing.assert_allclose(mine[i], e.p_matrix[i], atol=max(e.golden_tol, 1e-12))
    if e.inverse_matrix is not None:
        np.testing.assert_allclose(pm.inverse[order, :], e.inverse_matrix, atol=1e-12)


def test_modified_g2_published_middle_rows_disagree_with_polynomials():
    # the printed rows 2 and 3 are not P_2, P_3 at the printed nodes; P_2(3) = (9 - 3)/sqrt(6)
    e = catalog.get("modified_G2")
    mine = network("modified_G2").pm.entries[:, list(e.published_order)]
    assert mine[2, 1] == pytest.approx(6 / math.sqrt(6), abs=1e-12)
    assert e.p_matrix[2, 1] == 0


@pytest.mark.parametrize("name", PST)
def test_feasible_networks(name):
    n = network(name)
    f = pst_feasibility(n.valencies, n.pm)
    assert f.feasible and f.max_mirror_deviation < 1e-9
    np.testing.assert_allclose(np.abs(n.pm.entries[-1]), 1, atol=1e-9)


def test_k3_infeasible():
    n = network("K3")
    f = pst_feasibility(n.valencies, n.pm)
    assert not f and f.last_stratum_size == 2 and "antipode" in f.reason
    with pytest.raises(InfeasibleError):
        design_couplings(n.pm)


def test_modified_g2_infeasible():
    n = network("modified_G2")
    f = n.feasibility
    assert not f and f.last_stratum_size == 1
    assert f.max_mirror_deviation == pytest.approx(1.0, abs=1e-9)  # P_4(3) = 2
    with pytest.raises(InfeasibleError):
        design_couplings(n.pm)


def test_c4_mirror_row():
    np.testing.assert_allclose(network("C4").pm.entries[-1], [1, -1, 1], atol=1e-14)
    assert sign_branches(network("C4").pm) == (0, 1, 0)


def test_g2_default_design():
    pm = network("G2").pm
    t0 = 1.3
    d = design_couplings(pm, theta=0.0, t0=t0)
    # last column of W P^t is (1, -sqrt3, 2, -sqrt3, 1)/12
    assert d.branch_f == (0, 1, 0, 1, 0)
    assert d.J[0] == pytest.approx(-math.pi / (4 * t0), abs=1e-14)


@pytest.mark.parametrize("name", PST)
def test_eta_signs_match_mirror_row(name):
    pm = network(name).pm
    d = design_couplings(pm, theta=0.0, t0=1.0)
    eta = np.exp(-2j * spectrum_sums(d.J, pm))
    np.testing.assert_allclose(eta, np.sign(pm.entries[-1]), atol=1e-12)


@pytest.mark.parametrize("name", [n for n in PST if catalog.get(n).couplings is not None])
@pytest.mark.parametrize("theta,t0", [(0.0, 1.0), (0.3, 1.7), (-1.1, 0.4)])
def test_published_couplings_round_trip(name, theta, t0):
    e = catalog.get(name)
    pm = network(name).pm
    J = e.couplings(theta, t0)
    eta = np.exp(-2j * t0 * spectrum_sums(J, pm))
    np.testing.assert_allclose(pm.weights * eta, np.exp(1j * theta) * pm.inverse[:, -1], atol=1e-12)
    amps = krylov_amplitudes(J, pm, [t0])
    assert abs(amps[0, -1]) == pytest.approx(1, abs=1e-12)
    assert np.angle(amps[0, -1] * np.exp(-1j * theta)) == pytest.approx(0, abs=1e-12)


def test_modified_g2_published_couplings_miss_transfer():
    e = catalog.get("modified_G2")
    pm = network("modified_G2").pm
    amps = krylov_amplitudes(e.couplings(0.0, 1.0), pm, [1.0])
    assert abs(amps[0, -1]) < 0.95


@pytest.mark.parametrize("name", PST)
def test_reduced_eigenvalues_and_constraints(name):
    pm = network(name).pm
    d = design_couplings(pm, theta=0.7, t0=2.0)
    E = reduced_hamiltonian_eigenvalues(d, pm)
    phases = np.exp(-1j * d.t0 * E)
    np.testing.assert_allclose(phases, np.exp(1j * 0.7) * np.sign(pm.entries[-1]), atol=1e-12)
    assert constraint_residual(d, pm) < 1e-12
    assert round_trip_residual(d, pm) < 1e-12


def test_constant_coupling_gives_flat_spectrum():
    pm = network("G2").pm
    J = np.zeros(5)
    J[0] = 0.37
    d = design_couplings(pm)
    from dataclasses import replace

    E = reduced_hamiltonian_eigenvalues(replace(d, J=J), pm)
    np.testing.assert_allclose(E, 2 * 0.37, atol=1e-15)


@pytest.mark.parametrize("name", PST)
def test_evolve_properties(name):
    pm = network(name).pm
    d = design_couplings(pm, theta=0.3, t0=1.7)
    rep = evolve(d, pm, time_grid(0, 4, 81, 1.7))
    np.testing.assert_allclose(rep.amplitudes[0], np.eye(pm.D + 1)[0], atol=1e-14)
    assert rep.unitarity_error < 1e-12
    assert rep.perfect
    assert rep.fidelity_at_t0 == pytest.approx(1, abs=1e-12)
    assert rep.max_leakage < 1e-12
    assert rep.phase_at_t0 == pytest.approx(0.3, abs=1e-12)


def test_evolve_requires_t0_on_grid():
    pm = network("C4").pm
    with pytest.raises(ValueError):
        evolve(design_couplings(pm, t0=1.0), pm, [0.0, 0.5])


@pytest.mark.parametrize("name", PST)
def test_branch_invariance(name):
    pm = network(name).pm
    rng = np.random.default_rng(20261019)
    for _ in range(10):
        ls = rng.integers(-3, 4, size=pm.D + 1)
        d = design_couplings(pm, theta=0.2, t0=1.1, branch_l=ls)
        amp = krylov_amplitudes(d.J, pm, [1.1])[0, -1]
        assert abs(amp) == pytest.approx(1, abs=1e-12)
        assert np.angle(amp) == pytest.approx(0.2, abs=1e-9)


@pytest.mark.parametrize("name", PST)
@pytest.mark.parametrize("s", [0.5, 2.0, 7.0])
def test_time_scaling(name, s):
    pm = network(name).pm
    base = design_couplings(pm, theta=0.4, t0=1.0)
    scaled = design_couplings(pm, theta=0.4, t0=s)
    np.testing.assert_allclose(scaled.J, base.J / s, atol=1e-14)
    ts = np.linspace(0, 2, 9)
    np.testing.assert_allclose(
        krylov_amplitudes(scaled.J, pm, ts * s), krylov_amplitudes(base.J, pm, ts), atol=1e-11
    )


def test_phase_factor_one_design():
    pm = network("hypercube4").pm
    d1 = design_couplings(pm, theta=0.1, t0=1.0, phase_factor=1)
    d2 = design_couplings(pm, theta=0.1, t0=1.0)
    np.testing.assert_allclose(d1.J, 2 * d2.J, atol=1e-14)
    assert abs(krylov_amplitudes(d1.J, pm, [1.0], phase_factor=1)[0, -1]) == pytest.approx(1, abs=1e-12)


def test_curve_csv_format():
    pm = network("C4").pm
    rep = evolve(design_couplings(pm, t0=1.0), pm, [0.0, 0.5, 1.0])
    text = curve_csv(rep)
    lines = text.split("\n")
    assert lines[0] == "t,abs_f_0,abs_f_1,abs_f_2,re_f_D,im_f_D"
    assert lines[-1] == "" and "\r" not in text
    assert len(lines) == 5
    first = [float(v) for v in lines[1].split(",")]
    assert first[:2] == [0, 1]
    assert max(abs(v) for v in first[2:4]) < 1e-14
    assert all(len(v.lstrip("-").replace(".", "").split("e")[0].lstrip("0")) <= 12 for l in lines[1:-1] for v in l.split(","))


def test_time_grid_inserts_t0():
    g = time_grid(0, 1, 3, 0.3)
    assert list(g) == [0, 0.3, 0.5, 1]
    with pytest.raises(ValueError):
        time_grid(0, 1, 1, 0.5)


def test_build_p_matrix_degree_mismatch():
    with pytest.raises(ValueError):
        build_p_matrix(network("C4").polys, network("G2").dist)
