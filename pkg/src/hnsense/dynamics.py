"""Squeezed-basis dynamical matrix, its inverse, and steady-state moments.

The mean-field equations of the driven chain close on the 2N-vector

    q = (xt_1 .. xt_N, pt_1 .. pt_N),     dq/dt = Ht[eps] q + b,

where xt_n = exp(-A(n-1)) x_n and pt_n = exp(A(n-1)) p_n are the squeezed
quadratures.  In this basis the unperturbed matrix is block-diagonal with two
copies of an N x N block h whose entries are O(J, kappa); exponentials enter
only through the explicit boundary/drive factors.  Everything downstream
(signal, noise, photon budget) is a function of Ht[eps]^-1.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgWarning, lu_factor, lu_solve

from .errors import SingularError
from .model import LOCALN, NHSE, ChainParams, DriveSpec, PerturbationSpec, check_site

_PIVOT_FLOOR = 1e-300


@dataclass(frozen=True)
class DynMatrix:
    """Dense 2N x 2N real matrix in the squeezed basis.

    Rows/columns 1..N address xt_1..xt_N and N+1..2N address pt_1..pt_N
    (stored 0-indexed).  The payload is write-locked after construction.
    """

    n: int
    data: np.ndarray

    def __post_init__(self):
        self.data.setflags(write=False)


@dataclass(frozen=True)
class SteadyMeans:
    """First moments of the steady state, squeezed and unsqueezed."""

    xt: np.ndarray
    pt: np.ndarray
    x: np.ndarray
    p: np.ndarray
    a: np.ndarray  # complex amplitudes (x + i p)/sqrt(2)


@dataclass(frozen=True)
class OutputCoeffs:
    """Zero-frequency map from input quadrature noise to the output field."""

    cxx: float
    cxp: float
    cpx: float
    cpp: float


def build_h_block(chain: ChainParams, m: int) -> np.ndarray:
    """N x N block h: antisymmetric hopping +J/-J plus damping -kappa/2 at m.

    h[n+1, n] = +J and h[n, n+1] = -J (1-based), h[m, m] = -kappa/2; all
    other entries vanish.
    """
    check_site(chain, m)
    N, J = chain.N, chain.J
    h = np.zeros((N, N))
    for i in range(N - 1):
        h[i + 1, i] = J
        h[i, i + 1] = -J
    h[m - 1, m - 1] -= chain.kappa / 2.0
    return h


def perturbation_entries(chain: ChainParams, pert: PerturbationSpec):
    """Sparse entries ((row, col, value), 0-indexed) added by the perturbation.

    NHSE: eight boundary couplings mixing sites 1 and N of both quadrature
    chains, weighted by eps*sin(varphi) / eps*cos(varphi) and squeezing
    factors exp(+-A(N-1)).  LOCALN: two entries coupling xt_N and pt_N.
    """
    N = chain.N
    eps = pert.epsilon
    if eps == 0.0:
        return []
    g = chain.A * (N - 1)
    ep, em = math.exp(g), math.exp(-g)
    if pert.kind == NHSE:
        s, c = math.sin(pert.varphi), math.cos(pert.varphi)
        return [
            (0, N - 1, eps * s * ep),
            (0, 2 * N - 1, eps * c * em),
            (N - 1, 0, -eps * s * em),
            (N - 1, N, eps * c * em),
            (N, N - 1, -eps * c * ep),
            (N, 2 * N - 1, eps * s * em),
            (2 * N - 1, 0, -eps * c * ep),
            (2 * N - 1, N, -eps * s * ep),
        ]
    if pert.kind == LOCALN:
        return [
            (N - 1, 2 * N - 1, eps * math.exp(-2.0 * g)),
            (2 * N - 1, N - 1, -eps * math.exp(2.0 * g)),
        ]
    raise AssertionError(f"unreachable perturbation kind {pert.kind!r}")


def build_htilde(chain: ChainParams, pert: PerturbationSpec, m: int) -> DynMatrix:
    """Full squeezed-basis matrix: blockdiag(h, h) plus perturbation entries."""
    N = chain.N
    h = build_h_block(chain, m)
    data = np.zeros((2 * N, 2 * N))
    data[:N, :N] = h
    data[N:, N:] = h
    for r, c, v in perturbation_entries(chain, pert):
        data[r, c] += v
    if not np.all(np.isfinite(data)):
        raise OverflowError("non-finite entry in dynamical matrix")
    return DynMatrix(n=N, data=data)


def _factor(a: np.ndarray):
    """LU-factor with partial pivoting; reject effectively-zero pivots."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", LinAlgWarning)
        lu, piv = lu_factor(a)
    if np.min(np.abs(np.diag(lu))) < _PIVOT_FLOOR:
        raise SingularError("pivot below 1e-300: dynamical matrix is singular")
    return lu, piv


def invert(mat: DynMatrix) -> DynMatrix:
    """Dense inverse via LU with partial pivoting.

    Raises SingularError on an effectively-zero pivot or if the result fails
    the residual contract ||M M^-1 - I||_max <= 1e-10 ||M^-1||_max.
    """
    lu, piv = _factor(mat.data)
    inv = lu_solve((lu, piv), np.eye(mat.data.shape[0]))
    resid = np.max(np.abs(mat.data @ inv - np.eye(mat.data.shape[0])))
    if resid > 1e-10 * np.max(np.abs(inv)):
        raise SingularError("inverse failed residual check; matrix near-singular")
    return DynMatrix(n=mat.n, data=inv)


def drive_vector(chain: ChainParams, drive: DriveSpec) -> np.ndarray:
    """Inhomogeneous term b of dq/dt = Ht q + b in the squeezed basis.

    Only the injection-site components are nonzero:
    b_m = -sqrt(2 kappa) |beta| cos(theta) exp(-A(m-1)) on the xt chain and
    the sin(theta) analogue with exp(+A(m-1)) on the pt chain.
    """
    m = check_site(chain, drive.m)
    N = chain.N
    amp = math.sqrt(2.0 * chain.kappa) * drive.beta_abs
    b = np.zeros(2 * N)
    b[m - 1] = -amp * math.cos(drive.theta) * math.exp(-chain.A * (m - 1))
    b[N + m - 1] = -amp * math.sin(drive.theta) * math.exp(chain.A * (m - 1))
    return b


def _means_from_q(chain: ChainParams, q: np.ndarray) -> SteadyMeans:
    N = chain.N
    xt, pt = q[:N].copy(), q[N:].copy()
    stretch = np.exp(chain.A * np.arange(N))
    x = xt * stretch
    p = pt / stretch
    return SteadyMeans(xt=xt, pt=pt, x=x, p=p, a=(x + 1j * p) / math.sqrt(2.0))


def steady_means(chain: ChainParams, drive: DriveSpec, pert: PerturbationSpec) -> SteadyMeans:
    """Steady first moments q_ss = -Ht[eps]^-1 b, unsqueezed per site."""
    H = build_htilde(chain, pert, drive.m)
    lu = _factor(H.data)
    q = lu_solve(lu, -drive_vector(chain, drive))
    return _means_from_q(chain, q)


def steady_pair(chain: ChainParams, drive: DriveSpec, pert: PerturbationSpec):
    """Steady means at eps and at 0 plus their difference, without cancellation.

    The difference solves Ht[eps] dq = -V q0 exactly (V is the sparse
    perturbation part), so tiny eps yields dq to full relative precision
    instead of losing it to subtraction of near-equal means.

    Returns (means_eps, means_zero, means_delta).
    """
    m = drive.m
    zero = PerturbationSpec(kind=pert.kind, epsilon=0.0, varphi=pert.varphi)
    H0 = build_htilde(chain, zero, m)
    q0 = lu_solve(_factor(H0.data), -drive_vector(chain, drive))

    entries = perturbation_entries(chain, pert)
    if not entries:
        dq = np.zeros_like(q0)
    else:
        rhs = np.zeros_like(q0)
        for r, c, v in entries:
            rhs[r] -= v * q0[c]
        Heps = build_htilde(chain, pert, m)
        dq = lu_solve(_factor(Heps.data), rhs)
    return (
        _means_from_q(chain, q0 + dq),
        _means_from_q(chain, q0),
        _means_from_q(chain, dq),
    )


def output_fluct_coeffs(chain: ChainParams, drive: DriveSpec, pert: PerturbationSpec) -> OutputCoeffs:
    """Zero-frequency output-noise coefficients at the drive/readout site.

    cxx = 1 + kappa*Hinv[m,m], cpp = 1 + kappa*Hinv[m+N,m+N], and the cross
    terms carry the un-squeezing factors exp(+-2A(m-1)); at eps = 0 the
    coefficients are exactly (-1, 0, 0, -1).
    """
    m = check_site(chain, drive.m)
    N, kappa = chain.N, chain.kappa
    H = build_htilde(chain, pert, m)
    lu = _factor(H.data)
    ex = np.zeros(2 * N)
    ex[m - 1] = 1.0
    col_x = lu_solve(lu, ex)  # column m of the inverse
    ep = np.zeros(2 * N)
    ep[N + m - 1] = 1.0
    col_p = lu_solve(lu, ep)  # column N+m
    scale = math.exp(2.0 * chain.A * (m - 1))
    return OutputCoeffs(
        cxx=1.0 + kappa * col_x[m - 1],
        cxp=kappa * col_p[m - 1] * scale,
        cpx=kappa * col_x[N + m - 1] / scale,
        cpp=1.0 + kappa * col_p[N + m - 1],
    )
