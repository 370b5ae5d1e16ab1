"""Analytic fast paths and cross-check formulas for the inverse matrices.

Three layers, in increasing order of specialisation:

* ``h_inverse_column`` -- any column of h^-1 by back-substitution through the
  sparse antisymmetric-tridiagonal structure (no factorization),
* ``dyson_first_order`` -- selected elements of Ht[eps]^-1 to first order in
  the perturbation, assembled purely from h^-1 columns,
* ``htilde_inverse_exact_first_column`` -- the exact all-orders first column
  of Ht[eps]^-1 for the boundary-tunneling perturbation with the damped site
  at the far end (m = N), as four closed rational families.

All formulas are validated against the dense solver in the test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateError
from .model import NHSE, ChainParams, PerturbationSpec, check_site
from .dynamics import perturbation_entries


@dataclass(frozen=True)
class ColumnPattern:
    """Three-class structure of the first column of h^-1.

    Odd rows all share one value (-2/kappa), even rows below the damped site
    share another (-1/J), and even rows above it vanish identically.
    zero_tail gives that (first, last) even-row range, 1-based and inclusive;
    it is empty when m = N.
    """

    odd_value: float
    even_low_value: float
    zero_tail: tuple[int, int]
    full: np.ndarray


def h_inverse_column(chain: ChainParams, m: int, j: int) -> np.ndarray:
    """Column j of h^-1 for the block with damping at odd site m.

    Solves h v = e_j by two sweeps of back-substitution: odd rows pin the
    even-indexed unknowns from both ends, the damped row then yields v_m,
    and the even rows propagate the remaining odd-indexed unknowns outward
    from site m.  O(N), no factorization.
    """
    check_site(chain, m)
    N, J, kappa = chain.N, chain.J, chain.kappa
    if not 1 <= j <= N:
        raise ValueError(f"column index j={j} outside 1..{N}")

    def delta(i: int) -> float:
        return 1.0 if i == j else 0.0

    v = np.zeros(N)
    # Even-indexed unknowns below m, from the top boundary equation upward.
    if m > 1:
        v[1] = -delta(1) / J
        for i in range(3, m, 2):  # odd rows strictly between 1 and m
            v[i] = v[i - 2] - delta(i) / J
    # Even-indexed unknowns above m, from the bottom boundary equation downward.
    if m < N:
        v[N - 2] = delta(N) / J
        for i in range(N - 2, m, -2):  # odd rows strictly between m and N
            v[i - 2] = v[i] + delta(i) / J
    # The damped row fixes v_m.
    acc = -delta(m)
    if m > 1:
        acc += J * v[m - 2]
    if m < N:
        acc -= J * v[m]
    v[m - 1] = 2.0 * acc / kappa
    # Odd-indexed unknowns propagate outward from v_m via the even rows.
    for i in range(m + 1, N, 2):
        v[i] = v[i - 2] - delta(i) / J
    for i in range(m - 1, 1, -2):
        v[i - 2] = v[i] + delta(i) / J
    return v


def damped_column_pattern(chain: ChainParams, m: int) -> ColumnPattern:
    """The exact three-class pattern of column 1 of h^-1 (any odd m)."""
    tail = (m + 1, chain.N - 1) if m < chain.N else (chain.N + 1, chain.N)
    return ColumnPattern(
        odd_value=-2.0 / chain.kappa,
        even_low_value=-1.0 / chain.J,
        zero_tail=tail,
        full=h_inverse_column(chain, m, 1),
    )


def dyson_first_order(chain: ChainParams, pert: PerturbationSpec, rows_cols, m: int):
    """Selected elements of Ht[eps]^-1 to first order in the perturbation.

    Evaluates Ht1^-1 - Ht1^-1 Hpert Ht1^-1 element-wise using h^-1 columns
    only (the unperturbed inverse is block-diagonal, so cross-block elements
    of Ht1^-1 vanish).  rows_cols is an iterable of 1-based (row, col) pairs
    in 1..2N; returns {(row, col): value}.
    """
    check_site(chain, m)
    N = chain.N
    cols: dict[int, np.ndarray] = {}

    def hcol(jj: int) -> np.ndarray:
        if jj not in cols:
            cols[jj] = h_inverse_column(chain, m, jj)
        return cols[jj]

    def h1inv(a: int, b: int) -> float:
        # element (a, b) of the block-diagonal unperturbed inverse, 1-based
        if a <= N and b <= N:
            return hcol(b)[a - 1]
        if a > N and b > N:
            return hcol(b - N)[a - N - 1]
        return 0.0

    entries = perturbation_entries(chain, pert)
    out = {}
    for (i, j) in rows_cols:
        if not (1 <= i <= 2 * N and 1 <= j <= 2 * N):
            raise ValueError(f"element ({i},{j}) outside 1..{2 * N}")
        val = h1inv(i, j)
        for r, c, v in entries:
            val -= h1inv(i, r + 1) * v * h1inv(c + 1, j)
        out[(i, j)] = val
    return out


@dataclass(frozen=True)
class ExactFirstColumn:
    """The four closed-form families of column 1 of Ht[eps]^-1 (NHSE, m=N).

    Row membership (1-based): xt_odd covers rows 1, 3, ..., N; xt_even rows
    2, 4, ..., N-1; pt_even rows N+2, N+4, ..., 2N-1; pt_odd rows N+1,
    N+3, ..., 2N.
    """

    xt_odd: float
    xt_even: float
    pt_even: float
    pt_odd: float


def htilde_inverse_exact_first_column(
    chain: ChainParams, epsilon: float, varphi: float
) -> ExactFirstColumn:
    """Exact first column of Ht[eps]^-1 for boundary tunneling with m = N.

    The column collapses onto four values -- one per (chain, parity) class --
    given by rational functions of (kappa, J, eps, varphi, eta) with
    eta = exp(A(N-1)) and the shared denominator

        D = -eta^2 kappa^2 - 16 eta^2 eps^2 cos^2(varphi)
            + 4 (eta^2 - 1)^2 eps^2 sin^2(varphi).

    Raises DegenerateError when |D| < 1e-14 kappa^2, i.e. when the perturbed
    system is exactly singular (possible only for sin(varphi) != 0).
    """
    kappa, J = chain.kappa, chain.J
    eps = float(epsilon)
    if eps < 0.0:
        raise ValueError("epsilon must be >= 0")
    eta = math.exp(chain.A * (chain.N - 1))
    s, c = math.sin(varphi), math.cos(varphi)
    e2 = eta * eta

    D = -e2 * kappa**2 - 16.0 * e2 * eps**2 * c**2 + 4.0 * (e2 - 1.0) ** 2 * eps**2 * s**2
    if abs(D) < 1e-14 * kappa**2:
        raise DegenerateError("closed-form denominator vanished (singular system)")

    xt_odd = (2.0 * kappa * e2 + 4.0 * eta * (e2 - 1.0) * eps * s) / D
    xt_even = (
        e2 * kappa**2
        + 8.0 * e2 * eps**2 * c**2
        + 2.0 * eta * e2 * kappa * eps * s
        + 4.0 * (e2 - 1.0) * eps**2 * s**2
    ) / (J * D)
    pt_odd = -8.0 * eta * e2 * eps * c / D
    pt_even = -2.0 * e2 * eps * c * (eta * kappa + 2.0 * (1.0 + e2) * eps * s) / (J * D)
    return ExactFirstColumn(xt_odd=xt_odd, xt_even=xt_even, pt_even=pt_even, pt_odd=pt_odd)
