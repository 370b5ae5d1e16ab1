"""Independent verification paths for the algebraic engine.

Two deliberately different routes to the same answers:

* ``integrate_means`` steps the mean-field equations dq/dt = Ht q + b to
  steady state with a fixed-step classical 4th-order integrator, certifying
  the algebraic steady state (and detecting dynamical instability, which a
  matrix inverse alone cannot see);
* ``column_solve_inverse`` inverts a matrix by hand-rolled Gaussian
  elimination with full pivoting, column by column -- an elimination ordering
  independent of the dense LU route used by dynamics.invert.

Shipped as a public module so results can be re-verified downstream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import dynamics
from .errors import DivergenceError, SingularError, StepSizeError
from .model import ChainParams, DriveSpec, PerturbationSpec

_DIVERGENCE_NORM = 1.0e12
_PIVOT_FLOOR = 1e-300


@dataclass(frozen=True)
class OdeRun:
    """Result of one fixed-step integration to (near) steady state."""

    t_end: float
    dt: float
    trajectory: np.ndarray  # sampled mean vectors, final state in the last row
    converged: bool
    residual: float  # max-norm of dq/dt at the final time

    @property
    def final(self) -> np.ndarray:
        return self.trajectory[-1]


def stable_step(chain: ChainParams, pert: PerturbationSpec) -> float:
    """Largest dt honouring the explicit-stability heuristic."""
    rate = max(
        chain.J * math.exp(chain.A),
        chain.kappa,
        pert.epsilon * math.exp(chain.A * (chain.N - 1)),
    )
    return 0.05 / rate


def integrate_means(
    chain: ChainParams,
    drive: DriveSpec | None,
    pert: PerturbationSpec,
    t_end: float,
    dt: float | None = None,
) -> OdeRun:
    """Integrate dq/dt = Ht q + b from q(0) = 0 with classic RK4 steps.

    drive=None integrates the undriven chain (b = 0, port at site 1).

    Preconditions (StepSizeError otherwise): dt within the explicit-stability
    bound 0.05/max(J e^A, kappa, eps e^{A(N-1)}), and t_end >= 20/kappa.
    A trajectory whose max-norm exceeds 1e12 aborts with DivergenceError --
    the configuration is dynamically unstable.
    """
    if dt is None:
        dt = 0.8 * stable_step(chain, pert)
    if dt <= 0.0 or dt > stable_step(chain, pert):
        raise StepSizeError(
            f"dt={dt} violates the stability bound {stable_step(chain, pert):.3e}"
        )
    if t_end < 20.0 / chain.kappa:
        raise StepSizeError(f"t_end={t_end} shorter than 20/kappa")

    port = 1 if drive is None else drive.m
    H = dynamics.build_htilde(chain, pert, port).data
    if drive is None:
        b = np.zeros(2 * chain.N)
    else:
        b = dynamics.drive_vector(chain, drive)
    n_steps = int(math.ceil(t_end / dt))
    stride = max(1, n_steps // 256)

    q = np.zeros(2 * chain.N)
    samples = [q.copy()]
    for step in range(n_steps):
        k1 = H @ q + b
        k2 = H @ (q + 0.5 * dt * k1) + b
        k3 = H @ (q + 0.5 * dt * k2) + b
        k4 = H @ (q + dt * k3) + b
        q = q + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(q)) or np.max(np.abs(q)) > _DIVERGENCE_NORM:
            raise DivergenceError(
                f"trajectory norm exceeded {_DIVERGENCE_NORM:.0e} at t={(step + 1) * dt:.3g}"
            )
        if (step + 1) % stride == 0:
            samples.append(q.copy())
    if (n_steps % stride) != 0:
        samples.append(q.copy())

    residual = float(np.max(np.abs(H @ q + b)))
    beta_abs = 0.0 if drive is None else drive.beta_abs
    scale = chain.kappa * float(np.max(np.abs(q))) + math.sqrt(2.0 * chain.kappa) * beta_abs
    return OdeRun(
        t_end=n_steps * dt,
        dt=dt,
        trajectory=np.array(samples),
        converged=residual <= 1e-10 * scale,
        residual=residual,
    )


def column_solve_inverse(matrix) -> np.ndarray:
    """Inverse by Gaussian elimination with full pivoting, one column at a time.

    Accepts a plain square array or a dynamics.DynMatrix.  Independent of the
    scipy LU path: different pivoting strategy, hand-rolled substitution.
    Raises SingularError when the full pivot drops below 1e-300.
    """
    a = np.array(getattr(matrix, "data", matrix), dtype=float)
    n = a.shape[0]
    if a.ndim != 2 or a.shape != (n, n):
        raise ValueError("matrix must be square")

    row_perm = list(range(n))
    col_perm = list(range(n))
    for k in range(n):
        sub = np.abs(a[k:, k:])
        i_rel, j_rel = divmod(int(np.argmax(sub)), n - k)
        if sub[i_rel, j_rel] < _PIVOT_FLOOR:
            raise SingularError("full pivot below 1e-300: matrix is singular")
        ip, jp = k + i_rel, k + j_rel
        if ip != k:
            a[[k, ip], :] = a[[ip, k], :]
            row_perm[k], row_perm[ip] = row_perm[ip], row_perm[k]
        if jp != k:
            a[:, [k, jp]] = a[:, [jp, k]]
            col_perm[k], col_perm[jp] = col_perm[jp], col_perm[k]
        a[k + 1 :, k] /= a[k, k]
        a[k + 1 :, k + 1 :] -= np.outer(a[k + 1 :, k], a[k, k + 1 :])

    # PAQ = LU; for each unit vector solve LU z = P e_j, then x = Q z.
    inv = np.empty((n, n))
    for j in range(n):
        e = np.zeros(n)
        e[j] = 1.0
        z = e[row_perm]
        for i in range(1, n):
            z[i] -= a[i, :i] @ z[:i]
        x = np.zeros(n)
        for i in range(n - 1, -1, -1):
            x[i] = (z[i] - a[i, i + 1 :] @ x[i + 1 :]) / a[i, i]
        out = np.zeros(n)
        for k in range(n):
            out[col_perm[k]] = x[k]
        inv[:, j] = out
    return inv
