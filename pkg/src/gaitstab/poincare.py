"""Generalized/composed Poincare maps, fixed points, and reduced Jacobians.

The return-map Jacobian is computed in an orthonormal chart of the section
(tangent to the constraint manifold intersected with the guard level set),
which removes the spurious unit/zero eigenvalues of constraint and guard
directions and reproduces the dominant spectrum of the full-order map.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import EigenFailure, NoConvergence, StepFailure
from .mechanics import GeneralizedState, impact_map, project_to_manifold
from .simulate import IntegrationLimits, integrate_to_guard, _guard_evaluator

DEFAULT_FD_STEP = 1e-6
CHART_ORTHO_TOL = 1e-12


@dataclass(frozen=True)
class SectionChart:
    """Orthonormal basis for the section tangent space at a base point."""

    vertex: str
    base: np.ndarray          # ambient col(q, qd)
    basis: np.ndarray         # (2 n_q, n_r), columns orthonormal

    @property
    def n_r(self):
        return self.basis.shape[1]

    def lift(self, z):
        return self.base + self.basis @ np.asarray(z, dtype=float)

    def reduce(self, x):
        return self.basis.T @ (np.asarray(x, dtype=float) - self.base)


@dataclass(frozen=True)
class PoincareJacobian:
    psi: np.ndarray
    eigenvalues: np.ndarray
    spectral_radius: float
    xi: Optional[np.ndarray] = None
    eigvec_condition: float = np.nan
    fd_step: float = np.nan


@dataclass(frozen=True)
class SensitivityMatrix:
    """First-order dependence of Psi on the active parameter block.

    psibar has shape (n_r, n_r * p); block j (columns j*p:(j+1)*p) is the
    Jacobian of column j of Psi with respect to xi, so that
    psi_hat(xi, dxi) = psi + psibar (I kron dxi).
    """

    psibar: np.ndarray
    p: int
    active_domain: str
    xi0: np.ndarray
    fd_step: np.ndarray

    def taylor(self, psi, dxi):
        dxi = np.asarray(dxi, dtype=float)
        n_r = psi.shape[0]
        out = np.array(psi, dtype=float, copy=True)
        for j in range(n_r):
            out[:, j] += self.psibar[:, j * self.p:(j + 1) * self.p] @ dxi
        return out


def spectral_radius(matrix):
    """Maximum eigenvalue magnitude of a square real matrix."""
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise EigenFailure("spectral radius needs a square matrix")
    try:
        eig = np.linalg.eigvals(matrix)
    except np.linalg.LinAlgError as exc:
        raise EigenFailure(f"eigendecomposition failed: {exc}")
    return float(np.max(np.abs(eig)))


def _fd_rows(fn, x, h):
    """Central-difference gradient row of scalar fn at ambient x."""
    n = x.shape[0]
    grad = np.zeros(n)
    for i in range(n):
        step = h * (1.0 + abs(x[i]))
        xp = x.copy()
        xm = x.copy()
        xp[i] += step
        xm[i] -= step
        grad[i] = (fn(xp) - fn(xm)) / (2.0 * step)
    return grad


def build_section_chart(model, graph, controllers, v, x, fd_h=1e-7):
    """Chart on the guard section of domain v at ambient state x.

    Basis columns are annihilated by the stacked constraint gradients
    (position and velocity level) and the guard gradient.
    """
    x = np.asarray(x, dtype=float)
    n = model.n_q
    q, qd = x[:n], x[n:]
    cs = model.constraint_set(v)
    rows = []
    if cs.n_v:
        j = cs.jacobian(q)
        rows.append(np.hstack([j, np.zeros_like(j)]))
        # gradient of J(q) qd with respect to (q, qd)
        djqd = np.zeros((cs.n_v, n))
        for i in range(n):
            step = fd_h * (1.0 + abs(q[i]))
            qp = q.copy()
            qm = q.copy()
            qp[i] += step
            qm[i] -= step
            djqd[:, i] = (cs.jacobian(qp) @ qd - cs.jacobian(qm) @ qd) / (2 * step)
        rows.append(np.hstack([djqd, j]))
    guard_fn, _ = _guard_evaluator(model, graph, controllers, v)
    rows.append(_fd_rows(guard_fn, x, fd_h)[None, :])
    stacked = np.vstack(rows)
    u, s, vt = np.linalg.svd(stacked)
    rank = int(np.sum(s > 1e-9 * max(s[0], 1.0)))
    basis = vt[rank:].T
    return SectionChart(vertex=v, base=x.copy(), basis=basis)


def generalized_map(model, graph, controllers, v, x, limits=None):
    """Reset into domain v, then flow to its guard (map P_v)."""
    edge = graph.in_edge(v)
    x_state = x if isinstance(x, GeneralizedState) else \
        GeneralizedState.from_concat(np.asarray(x, dtype=float))
    x_plus = impact_map(model, edge, x_state)
    q, qd = project_to_manifold(model, v, x_plus.q, x_plus.qd)
    traj = integrate_to_guard(model, graph, v, np.concatenate([q, qd]),
                              controllers, limits)
    return traj.x_minus.concat(), traj


def cycle_from_section(model, graph, controllers, v1, x, limits=None):
    """One full traversal starting from a pre-reset state on v1's section."""
    order = graph.cycle_from(v1)
    visit = order[1:] + [v1]
    trajs = []
    cur = np.asarray(x, dtype=float)
    for v in visit:
        cur, traj = generalized_map(model, graph, controllers, v, cur, limits)
        trajs.append((v, traj))
    return cur, trajs


def return_map(model, graph, controllers, x, v1=None, limits=None):
    """Composition of the generalized maps along the cycle (map P)."""
    v1 = v1 or graph.vertices[0].id
    out, _ = cycle_from_section(model, graph, controllers, v1, x, limits)
    return out


def refine_fixed_point(model, graph, controllers, x_guess, v1=None,
                       limits=None, tol=1e-10, max_iter=20):
    """Damped Newton for P(x)=x in chart coordinates; rebuilds the chart.

    Returns (fixed point, SectionChart at the solution).
    """
    v1 = v1 or graph.vertices[0].id
    x = np.asarray(x_guess, dtype=float).copy()
    n = model.n_q
    q, qd = project_to_manifold(model, v1, x[:n], x[n:])
    x = np.concatenate([q, qd])
    residual_norm = np.inf
    for it in range(max_iter):
        chart = build_section_chart(model, graph, controllers, v1, x)
        r0_amb = return_map(model, graph, controllers, x, v1, limits) - x
        r0 = chart.basis.T @ r0_amb
        residual_norm = float(np.max(np.abs(r0)))
        if residual_norm <= tol:
            return x, chart
        n_r = chart.n_r
        jac = np.empty((n_r, n_r))
        h = DEFAULT_FD_STEP * (1.0 + float(np.max(np.abs(x))))
        for jcol in range(n_r):
            zp = np.zeros(n_r)
            zp[jcol] = h
            xp = return_map(model, graph, controllers, chart.lift(zp), v1, limits)
            xm = return_map(model, graph, controllers, chart.lift(-zp), v1, limits)
            jac[:, jcol] = chart.basis.T @ (xp - xm) / (2 * h)
        try:
            dz = np.linalg.solve(jac - np.eye(n_r), -r0)
        except np.linalg.LinAlgError:
            dz = np.linalg.lstsq(jac - np.eye(n_r), -r0, rcond=None)[0]
        # backtracking on the chart residual
        alpha = 1.0
        for _ in range(8):
            x_try = chart.lift(alpha * dz)
            q, qd = project_to_manifold(model, v1, x_try[:n], x_try[n:])
            x_try = np.concatenate([q, qd])
            r_try = chart.basis.T @ (
                return_map(model, graph, controllers, x_try, v1, limits) - x_try)
            if np.max(np.abs(r_try)) < residual_norm:
                x = x_try
                break
            alpha *= 0.5
        else:
            x = chart.lift(dz)
            q, qd = project_to_manifold(model, v1, x[:n], x[n:])
            x = np.concatenate([q, qd])
    raise NoConvergence(
        f"fixed-point refinement stalled at residual {residual_norm:.3e}",
        residual=residual_norm, iterations=max_iter)


def jacobian(model, graph, controllers, x_fixed, chart, limits=None,
             fd_step=DEFAULT_FD_STEP, xi=None, jobs=None):
    """Reduced return-map Jacobian by central differences in the chart."""
    x_fixed = np.asarray(x_fixed, dtype=float)
    n_r = chart.n_r
    h = fd_step * (1.0 + float(np.max(np.abs(x_fixed))))

    def column(jcol):
        zp = np.zeros(n_r)
        zp[jcol] = h
        try:
            xp = return_map(model, graph, controllers, chart.lift(zp),
                            chart.vertex, limits)
            xm = return_map(model, graph, controllers, chart.lift(-zp),
                            chart.vertex, limits)
        except Exception as exc:
            raise StepFailure(
                f"difference step {jcol} left the basin: {exc}")
        return chart.basis.T @ (xp - xm) / (2 * h)

    if jobs and jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            cols = list(pool.map(column, range(n_r)))
    else:
        cols = [column(j) for j in range(n_r)]
    psi = np.column_stack(cols)
    try:
        eigvals, eigvecs = np.linalg.eig(psi)
    except np.linalg.LinAlgError as exc:
        raise EigenFailure(f"eigendecomposition failed: {exc}")
    cond = float(np.linalg.cond(eigvecs))
    return PoincareJacobian(
        psi=psi, eigenvalues=eigvals,
        spectral_radius=float(np.max(np.abs(eigvals))),
        xi=None if xi is None else np.asarray(xi, dtype=float),
        eigvec_condition=cond, fd_step=h)


def sensitivity(model, graph, controllers, x_fixed, chart, active_domain,
                limits=None, fd_step=DEFAULT_FD_STEP, param_step=1e-5,
                jobs=None):
    """Per-parameter central differences of Psi for one H2v block.

    The fixed point is held fixed across parameter probes (fixed-point
    invariance with respect to the controller parameters).
    """
    params = controllers.params
    xi0 = params.xi(active_domain)
    p = xi0.shape[0]
    n_r = chart.n_r
    steps = param_step * (1.0 + np.abs(xi0))
    psibar = np.zeros((n_r, n_r * p))
    for i in range(p):
        delta = np.zeros(p)
        delta[i] = steps[i]
        ctrl_p = controllers.with_params(params.with_delta(active_domain, delta))
        ctrl_m = controllers.with_params(params.with_delta(active_domain, -delta))
        psi_p = jacobian(model, graph, ctrl_p, x_fixed, chart, limits,
                         fd_step, jobs=jobs).psi
        psi_m = jacobian(model, graph, ctrl_m, x_fixed, chart, limits,
                         fd_step, jobs=jobs).psi
        dpsi = (psi_p - psi_m) / (2 * steps[i])
        for j in range(n_r):
            psibar[:, j * p + i] = dpsi[:, j]
    return SensitivityMatrix(psibar=psibar, p=p, active_domain=active_domain,
                             xi0=xi0.copy(), fd_step=steps)
