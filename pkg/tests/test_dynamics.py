"""Tests for the drift-matrix assembly and steady-state solver."""

import math

import numpy as np
import pytest

from hnsense import (
    DriveSpec,
    PerturbationSpec,
    SingularError,
    chain_from_gain,
    derive_params,
)
from hnsense import dynamics, oracle

KAPPA = 1.0


def _chain(N=3, A=0.0, J=1.0, kappa=KAPPA):
    if A == 0.0:
        return derive_params(N, J, 0.0, kappa)
    return chain_from_gain(N, J, A, kappa)


# ---------------------------------------------------------------------------
# single-quadrature block
# ---------------------------------------------------------------------------

def test_h_block_hand_value():
    ch = derive_params(3, 1.0, 0.0, 2.0)
    h = dynamics.build_h_block(ch, 1)
    expected = np.array([
        [-1.0, -1.0, 0.0],
        [1.0, 0.0, -1.0],
        [0.0, 1.0, 0.0],
    ])
    np.testing.assert_array_equal(h, expected)


@pytest.mark.parametrize("N, m", [(3, 1), (3, 3), (5, 3), (7, 7)])
def test_h_block_antisymmetric_up_to_damping(N, m):
    ch = derive_params(N, 1.3, 0.5, 0.7)
    h = dynamics.build_h_block(ch, m)
    sym = h + h.T
    expected = np.zeros((N, N))
    expected[m - 1, m - 1] = -ch.kappa
    np.testing.assert_allclose(sym, expected, atol=1e-15)


# ---------------------------------------------------------------------------
# full drift matrix
# ---------------------------------------------------------------------------

def test_htilde_block_diagonal_without_perturbation():
    # the squeezed frame maps both quadrature chains onto the same block
    ch = _chain(N=5, A=0.4)
    pert = PerturbationSpec(kind="nhse", epsilon=0.0)
    H = dynamics.build_htilde(ch, pert, 1).data
    h = dynamics.build_h_block(ch, 1)
    N = ch.N
    np.testing.assert_array_equal(H[:N, :N], h)
    np.testing.assert_array_equal(H[N:, N:], h)
    assert np.all(H[:N, N:] == 0.0)
    assert np.all(H[N:, :N] == 0.0)


def test_htilde_boundary_entries_hand_value():
    # g = A(N-1) = 2 ln 2, so e^g = 4; entry (1,N) carries eps*sin(phi)*e^g
    ch = chain_from_gain(3, 1.0, math.log(2.0), 1.0)
    pert = PerturbationSpec(kind="nhse", epsilon=0.01, varphi=math.pi / 2)
    H = dynamics.build_htilde(ch, pert, 3).data
    np.testing.assert_allclose(H[0, 2], 0.04, rtol=1e-12)
    np.testing.assert_allclose(H[2, 0], -0.0025, rtol=1e-12)


def test_htilde_sin_entries_vanish_at_phase_zero():
    ch = _chain(N=5, A=0.3)
    N = ch.N
    pert = PerturbationSpec(kind="nhse", epsilon=0.2, varphi=0.0)
    H = dynamics.build_htilde(ch, pert, 1).data
    for r, c in [(0, N - 1), (N - 1, 0), (N, 2 * N - 1), (2 * N - 1, N)]:
        assert H[r, c] == 0.0
    # the cos(phi) couplings survive
    assert H[0, 2 * N - 1] != 0.0
    assert H[N - 1, N] != 0.0


def test_perturbation_entries_empty_at_zero_eps():
    ch = _chain(N=3)
    for kind in ("nhse", "localn"):
        pert = PerturbationSpec(kind=kind, epsilon=0.0)
        assert dynamics.perturbation_entries(ch, pert) == []


def test_localn_entries():
    ch = chain_from_gain(3, 1.0, math.log(2.0), 1.0)  # e^{2g} = 16
    pert = PerturbationSpec(kind="localn", epsilon=0.5)
    entries = dict(
        ((r, c), v) for r, c, v in dynamics.perturbation_entries(ch, pert)
    )
    N = ch.N
    np.testing.assert_allclose(entries[(N - 1, 2 * N - 1)], 0.5 / 16.0, rtol=1e-12)
    np.testing.assert_allclose(entries[(2 * N - 1, N - 1)], -0.5 * 16.0, rtol=1e-12)
    assert len(entries) == 2


# ---------------------------------------------------------------------------
# inversion
# ---------------------------------------------------------------------------

def test_invert_round_trip():
    ch = _chain(N=5, A=0.5)
    pert = PerturbationSpec(kind="nhse", epsilon=0.1, varphi=math.pi / 4)
    H = dynamics.build_htilde(ch, pert, 5)
    Hinv = dynamics.invert(H)
    np.testing.assert_allclose(Hinv.data @ H.data, np.eye(2 * ch.N), atol=1e-12)


def test_invert_corner_element_hand_value():
    # resolvent of the bare chain: (Ht^-1)[0,0] = -2/kappa
    ch = _chain(N=3)
    pert = PerturbationSpec(kind="nhse", epsilon=0.0)
    Hinv = dynamics.invert(dynamics.build_htilde(ch, pert, 1))
    np.testing.assert_allclose(Hinv.data[0, 0], -2.0, rtol=1e-13)


def test_invert_keeps_blocks_exactly_zero():
    # partial pivoting never mixes the decoupled quadrature blocks
    ch = _chain(N=7, A=0.4)
    pert = PerturbationSpec(kind="localn", epsilon=0.0)
    Hinv = dynamics.invert(dynamics.build_htilde(ch, pert, 3))
    N = ch.N
    assert np.all(Hinv.data[:N, N:] == 0.0)
    assert np.all(Hinv.data[N:, :N] == 0.0)


def test_invert_singular_matrix_raises():
    rank_one = dynamics.DynMatrix(n=1, data=np.array([[1.0, 1.0], [1.0, 1.0]]))
    with pytest.raises(SingularError):
        dynamics.invert(rank_one)


def test_matrix_is_write_locked():
    ch = _chain(N=3)
    H = dynamics.build_htilde(ch, PerturbationSpec(kind="nhse", epsilon=0.0), 1)
    with pytest.raises(ValueError):
        H.data[0, 0] = 99.0


# ---------------------------------------------------------------------------
# steady state
# ---------------------------------------------------------------------------

def test_steady_x_only_for_x_drive():
    ch = _chain(N=3, A=0.2)
    drive = DriveSpec(beta_abs=10.0, theta=0.0, m=1)
    pert = PerturbationSpec(kind="nhse", epsilon=0.0)
    means = dynamics.steady_means(ch, drive, pert)
    np.testing.assert_array_equal(means.pt, np.zeros(ch.N))
    np.testing.assert_array_equal(means.p, np.zeros(ch.N))
    # odd sites carry the response; even sites sit on the zero tail
    assert np.all(means.x[0::2] != 0.0)
    np.testing.assert_array_equal(means.x[1::2], 0.0)


def test_steady_edge_amplification():
    # undisturbed chain driven at site 1: <x_N>/<x_1> = e^{A(N-1)}
    ch = chain_from_gain(3, 1.0, 0.8, 1.0)
    drive = DriveSpec(beta_abs=5.0, theta=0.0, m=1)
    pert = PerturbationSpec(kind="nhse", epsilon=0.0)
    means = dynamics.steady_means(ch, drive, pert)
    np.testing.assert_allclose(means.x[2] / means.x[0], math.exp(1.6), rtol=1e-12)


def test_steady_scales_linearly_with_drive():
    ch = _chain(N=5, A=0.5)
    pert = PerturbationSpec(kind="nhse", epsilon=0.07, varphi=0.3)
    base = dynamics.steady_means(ch, DriveSpec(beta_abs=3.0, theta=0.9, m=5), pert)
    double = dynamics.steady_means(ch, DriveSpec(beta_abs=6.0, theta=0.9, m=5), pert)
    np.testing.assert_array_equal(double.x, 2.0 * base.x)
    np.testing.assert_array_equal(double.p, 2.0 * base.p)


def test_steady_means_internal_consistency():
    ch = _chain(N=5, A=0.6)
    drive = DriveSpec(beta_abs=2.0, theta=1.1, m=3)
    pert = PerturbationSpec(kind="localn", epsilon=0.05)
    means = dynamics.steady_means(ch, drive, pert)
    stretch = np.exp(ch.A * np.arange(ch.N))
    np.testing.assert_allclose(means.x, means.xt * stretch, rtol=1e-14)
    np.testing.assert_allclose(means.p, means.pt / stretch, rtol=1e-14)
    np.testing.assert_allclose(means.a, (means.x + 1j * means.p) / math.sqrt(2.0),
                               rtol=1e-14)


def test_steady_pair_consistent_with_direct_solves():
    ch = _chain(N=5, A=0.5)
    drive = DriveSpec(beta_abs=4.0, theta=0.4, m=5)
    pert = PerturbationSpec(kind="nhse", epsilon=0.08, varphi=0.0)
    m_eps, m_zero, m_delta = dynamics.steady_pair(ch, drive, pert)
    direct_eps = dynamics.steady_means(ch, drive, pert)
    zero = PerturbationSpec(kind="nhse", epsilon=0.0)
    direct_zero = dynamics.steady_means(ch, drive, zero)
    np.testing.assert_allclose(m_eps.x, direct_eps.x, rtol=1e-10)
    np.testing.assert_allclose(m_zero.x, direct_zero.x, rtol=1e-13)
    np.testing.assert_allclose(m_delta.x, m_eps.x - m_zero.x, rtol=1e-9, atol=1e-15)


def test_steady_pair_resolves_tiny_shifts():
    # the difference solve keeps full relative precision at eps/kappa = 1e-12,
    # where naive subtraction of the two steady states loses every digit
    ch = chain_from_gain(3, 1.0, 1.0, 1.0)
    drive = DriveSpec(beta_abs=1e3, theta=0.0, m=3)
    eps = 1e-12
    pert = PerturbationSpec(kind="nhse", epsilon=eps, varphi=0.0)
    _, _, m_delta = dynamics.steady_pair(ch, drive, pert)
    half = PerturbationSpec(kind="nhse", epsilon=eps / 2.0, varphi=0.0)
    _, _, m_half = dynamics.steady_pair(ch, drive, half)
    # the x drive shifts p at first order and x only at second order;
    # both orders survive halving to ~1e-9 relative
    np.testing.assert_allclose(m_half.p, 0.5 * m_delta.p, rtol=1e-9)
    np.testing.assert_allclose(m_half.x, 0.25 * m_delta.x, rtol=1e-9)


@pytest.mark.parametrize(
    "kind, eps, varphi",
    [("nhse", 0.05, 0.0), ("localn", 0.29, 0.0)],
)
def test_steady_matches_time_integration(kind, eps, varphi):
    ch = chain_from_gain(5, 1.0, 0.5, 1.0)
    drive = DriveSpec(beta_abs=10.0, theta=0.0, m=5)
    pert = PerturbationSpec(kind=kind, epsilon=eps, varphi=varphi)
    means = dynamics.steady_means(ch, drive, pert)
    H = dynamics.build_htilde(ch, pert, drive.m).data
    rate = -float(np.max(np.linalg.eigvals(H).real))
    assert rate > 0.0
    run = oracle.integrate_means(ch, drive, pert, t_end=30.0 / rate)
    assert run.converged
    q_ss = np.concatenate([means.xt, means.pt])
    scale = float(np.max(np.abs(q_ss)))
    np.testing.assert_allclose(run.final, q_ss, atol=1e-8 * scale)


# ---------------------------------------------------------------------------
# output fluctuation coefficients
# ---------------------------------------------------------------------------

def test_output_coeffs_unperturbed():
    ch = _chain(N=5, A=0.7)
    drive = DriveSpec(beta_abs=1.0, theta=0.0, m=5)
    pert = PerturbationSpec(kind="nhse", epsilon=0.0)
    co = dynamics.output_fluct_coeffs(ch, drive, pert)
    assert (co.cxx, co.cxp, co.cpx, co.cpp) == (-1.0, 0.0, 0.0, -1.0)


def test_output_coeffs_match_forced_response():
    """Static input offsets pushed through the ODE reproduce the coefficients.

    A mean offset u on the input X quadrature shifts the output means by
    (cxx*u, cpx*u); an offset on P shifts them by (cxp*u, cpp*u). The offsets
    map onto a modified coherent drive, so the coefficients can be measured
    from three converged time integrations.
    """
    ch = chain_from_gain(3, 1.0, math.log(2.0), 1.0)
    m = 1
    pert = PerturbationSpec(kind="localn", epsilon=0.01)
    co = dynamics.output_fluct_coeffs(ch, DriveSpec(beta_abs=8.0, theta=0.0, m=m), pert)

    H = dynamics.build_htilde(ch, pert, m).data
    rate = -float(np.max(np.linalg.eigvals(H).real))
    t_end = 32.0 / rate

    B, u = 8.0, 0.5

    def out_means(beta_abs, theta):
        drive = DriveSpec(beta_abs=beta_abs, theta=theta, m=m)
        run = oracle.integrate_means(ch, drive, pert, t_end=t_end)
        assert run.converged
        # m = 1 carries no squeezing factor, so the raw vector is (x_1, p_1)
        return run.final[m - 1], run.final[ch.N + m - 1]

    x0, p0 = out_means(B, 0.0)
    # input <X> offset u: |beta| -> B + u/sqrt(2) at theta = 0
    x1, p1 = out_means(B + u / math.sqrt(2.0), 0.0)
    # input <P> offset u: beta -> B + i u/sqrt(2)
    x2, p2 = out_means(math.hypot(B, u / math.sqrt(2.0)),
                       math.atan2(u / math.sqrt(2.0), B))

    root_k = math.sqrt(ch.kappa)
    np.testing.assert_allclose((u + root_k * (x1 - x0)) / u, co.cxx, atol=1e-6)
    np.testing.assert_allclose(root_k * (p1 - p0) / u, co.cpx, atol=1e-6)
    np.testing.assert_allclose(root_k * (x2 - x0) / u, co.cxp, atol=1e-6)
    np.testing.assert_allclose((u + root_k * (p2 - p0)) / u, co.cpp, atol=1e-6)
