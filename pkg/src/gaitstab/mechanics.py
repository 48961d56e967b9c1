"""Constrained floating-base dynamics, contact forces, and impact resets.

A mechanical model supplies evaluators for the mass matrix D(q), the bias
C(q,qd)qd + G(q), a constant input matrix B, and per-domain holonomic contact
maps eta(q) with Jacobian J(q) and the curvature term (d/dt J) qd.  Everything
here is a pure function of its inputs; models are immutable after
construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
import scipy.linalg

from .errors import RankDeficientConstraint, SingularMassMatrix

GRAM_RANK_RTOL = 1e-9


@dataclass(frozen=True)
class GeneralizedState:
    """Configuration and velocity of a mechanical system."""

    q: np.ndarray
    qd: np.ndarray

    def __post_init__(self):
        q = np.atleast_1d(np.asarray(self.q, dtype=float))
        qd = np.atleast_1d(np.asarray(self.qd, dtype=float))
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "qd", qd)
        if q.shape != qd.shape or q.ndim != 1:
            raise ValueError("q and qd must be 1-d arrays of equal length")
        if not (np.all(np.isfinite(q)) and np.all(np.isfinite(qd))):
            raise ValueError("state entries must be finite")

    @property
    def n_q(self):
        return self.q.shape[0]

    def concat(self):
        return np.concatenate([self.q, self.qd])

    @staticmethod
    def from_concat(x):
        x = np.asarray(x, dtype=float)
        n = x.shape[0] // 2
        return GeneralizedState(x[:n], x[n:])


@dataclass(frozen=True)
class ConstraintSet:
    """Holonomic contact constraints active in one domain.

    row_labels pairs each constraint row with (contact_id, component) so
    force-based guards can address individual multiplier components.
    """

    n_v: int
    eta: Callable[[np.ndarray], np.ndarray]
    jacobian: Callable[[np.ndarray], np.ndarray]
    jdot_qdot: Callable[[np.ndarray, np.ndarray], np.ndarray]
    row_labels: Sequence[tuple] = ()

    def row_index(self, contact_id, component):
        for i, (cid, comp) in enumerate(self.row_labels):
            if cid == contact_id and comp == component:
                return i
        raise KeyError(f"no constraint row for contact {contact_id!r}/{component!r}")


def empty_constraint_set(n_q):
    return ConstraintSet(
        n_v=0,
        eta=lambda q: np.zeros(0),
        jacobian=lambda q: np.zeros((0, n_q)),
        jdot_qdot=lambda q, qd: np.zeros(0),
        row_labels=(),
    )


@dataclass(frozen=True)
class MechanicalModel:
    """Floating-base model with per-domain contact constraint sets.

    Evaluators for built-in robots are generated offline in closed form;
    custom models may pass any callables with matching shapes.
    """

    name: str
    n_q: int
    n_u: int
    mass_matrix: Callable[[np.ndarray], np.ndarray]
    bias: Callable[[np.ndarray, np.ndarray], np.ndarray]
    input_matrix: np.ndarray
    constraints: dict  # domain id -> ConstraintSet
    potential: Optional[Callable[[np.ndarray], float]] = None
    # planar contact-point geometry keyed by contact id, used by guards and
    # gait seeding: point(q) -> (x, z)
    contact_points: dict = field(default_factory=dict)
    # phasing quantity c(q) (forward base displacement) and derivatives
    base_x: Optional[Callable] = None
    base_x_grad: Optional[Callable] = None
    base_x_hess: Optional[Callable] = None
    coord_names: Sequence[str] = ()
    params: object = None

    def constraint_set(self, domain):
        try:
            return self.constraints[domain]
        except KeyError:
            raise KeyError(f"model {self.name!r} has no domain {domain!r}")

    def kinetic_energy(self, q, qd):
        return 0.5 * float(qd @ self.mass_matrix(q) @ qd)

    def total_energy(self, q, qd):
        if self.potential is None:
            raise ValueError(f"model {self.name!r} has no potential evaluator")
        return self.kinetic_energy(q, qd) + float(self.potential(q))


@dataclass(frozen=True)
class DomainDynamicsTerms:
    """Terms of the constraint-eliminated dynamics D qdd + F_v = T_v u."""

    f_v: np.ndarray
    t_v: np.ndarray
    proj: np.ndarray
    # data sufficient to recover lambda from (q, qd, u)
    lambda_bias: np.ndarray   # lambda = lambda_bias + lambda_gain @ u
    lambda_gain: np.ndarray


def _cholesky_spd(d):
    try:
        return scipy.linalg.cho_factor(d, lower=True)
    except scipy.linalg.LinAlgError as exc:
        raise SingularMassMatrix(f"mass matrix not positive definite: {exc}")


def _gram_solve(gram, rhs, scale):
    """Solve the n_v x n_v Gram system with a rank guard."""
    sv = np.linalg.svd(gram, compute_uv=False)
    if sv[-1] <= GRAM_RANK_RTOL * max(sv[0], scale):
        raise RankDeficientConstraint(
            f"constraint Gram matrix rank deficient (sigma_min={sv[-1]:.3e})",
            smallest_singular_value=sv[-1])
    cho = scipy.linalg.cho_factor(gram, lower=True)
    return scipy.linalg.cho_solve(cho, rhs)


def constrained_dynamics_terms(model, domain, q, qd):
    """Projector, effective bias, and input map of the constrained dynamics.

    proj_v = I - J^T (J D^-1 J^T)^-1 J D^-1,
    F_v    = proj_v F + J^T (J D^-1 J^T)^-1 (d/dt J) qd,
    T_v    = proj_v B,
    computed through factorizations only (no explicit inverse of D).
    """
    q = np.asarray(q, dtype=float)
    qd = np.asarray(qd, dtype=float)
    cs = model.constraint_set(domain)
    d = model.mass_matrix(q)
    f = model.bias(q, qd)
    b = np.asarray(model.input_matrix, dtype=float)
    n = model.n_q
    if cs.n_v == 0:
        eye = np.eye(n)
        return DomainDynamicsTerms(
            f_v=f, t_v=b.copy(), proj=eye,
            lambda_bias=np.zeros(0), lambda_gain=np.zeros((0, model.n_u)))
    j = cs.jacobian(q)
    jdqd = cs.jdot_qdot(q, qd)
    cho_d = _cholesky_spd(d)
    dinv_jt = scipy.linalg.cho_solve(cho_d, j.T)          # D^-1 J^T
    gram = j @ dinv_jt                                    # J D^-1 J^T
    scale = float(np.max(np.abs(gram))) if gram.size else 1.0
    gram_inv_j_dinv = _gram_solve(gram, dinv_jt.T, scale)  # (JD^-1J^T)^-1 J D^-1
    proj = np.eye(n) - j.T @ gram_inv_j_dinv
    f_v = proj @ f + j.T @ _gram_solve(gram, jdqd, scale)
    t_v = proj @ b
    # first-row multipliers: lambda = (JD^-1J^T)^-1 (J D^-1 (F - B u) - Jdot qd)
    lam_bias = _gram_solve(gram, dinv_jt.T @ f - jdqd, scale)
    lam_gain = -_gram_solve(gram, dinv_jt.T @ b, scale)
    return DomainDynamicsTerms(
        f_v=f_v, t_v=t_v, proj=proj,
        lambda_bias=lam_bias, lambda_gain=lam_gain)


def forward_dynamics(model, domain, q, qd, u):
    """Accelerations and contact forces; solves the index-1 KKT system."""
    q = np.asarray(q, dtype=float)
    qd = np.asarray(qd, dtype=float)
    u = np.atleast_1d(np.asarray(u, dtype=float))
    cs = model.constraint_set(domain)
    d = model.mass_matrix(q)
    rhs = model.input_matrix @ u - model.bias(q, qd)
    cho_d = _cholesky_spd(d)
    if cs.n_v == 0:
        return scipy.linalg.cho_solve(cho_d, rhs), np.zeros(0)
    j = cs.jacobian(q)
    jdqd = cs.jdot_qdot(q, qd)
    dinv_rhs = scipy.linalg.cho_solve(cho_d, rhs)
    dinv_jt = scipy.linalg.cho_solve(cho_d, j.T)
    gram = j @ dinv_jt
    scale = float(np.max(np.abs(gram))) if gram.size else 1.0
    # D qdd + F = B u + J^T lam  with  J qdd + Jdot qd = 0
    lam = -_gram_solve(gram, j @ dinv_rhs + jdqd, scale)
    qdd = dinv_rhs + dinv_jt @ lam
    return qdd, lam


def contact_force(model, domain, q, qd, u):
    """Lagrange multipliers only (for force-based guards)."""
    _, lam = forward_dynamics(model, domain, q, qd, u)
    return lam


def impact_map(model, edge, x_minus):
    """Reset law for one edge.

    Contact-break edges preserve position and velocity (pure relabel when
    one is declared).  Contact-add edges solve the plastic impact in the
    source frame, D (qd_mid - qd-) = J^T dlam with J qd_mid = 0, where J is
    the target domain's constraint Jacobian (or the edge's transient impact
    set); the relabel permutation is applied afterwards, when the contacts
    involved are stationary.
    """
    if not isinstance(x_minus, GeneralizedState):
        x_minus = GeneralizedState.from_concat(np.asarray(x_minus, dtype=float))
    q = x_minus.q
    qd = x_minus.qd
    if edge.kind == "contact-break":
        if edge.relabel is None:
            return x_minus
        r = np.asarray(edge.relabel, dtype=float)
        return GeneralizedState(r @ q, r @ qd)
    if edge.kind != "contact-add":
        raise ValueError(f"unknown edge kind {edge.kind!r}")
    cs = model.constraint_set(edge.impact_constraints or edge.target)
    if cs.n_v:
        d = model.mass_matrix(q)
        j = cs.jacobian(q)
        cho_d = _cholesky_spd(d)
        dinv_jt = scipy.linalg.cho_solve(cho_d, j.T)
        gram = j @ dinv_jt
        scale = float(np.max(np.abs(gram))) if gram.size else 1.0
        dlam = _gram_solve(gram, -(j @ qd), scale)
        qd = qd + dinv_jt @ dlam
    if edge.relabel is not None:
        r = np.asarray(edge.relabel, dtype=float)
        q = r @ q
        qd = r @ qd
    return GeneralizedState(q, qd)


def constraint_residual(model, domain, x):
    """(position, velocity) infinity-norm residuals of the domain manifold."""
    if not isinstance(x, GeneralizedState):
        x = GeneralizedState.from_concat(np.asarray(x, dtype=float))
    cs = model.constraint_set(domain)
    if cs.n_v == 0:
        return 0.0, 0.0
    eta = cs.eta(x.q)
    jv = cs.jacobian(x.q) @ x.qd
    return float(np.max(np.abs(eta))), float(np.max(np.abs(jv)))


def project_to_manifold(model, domain, q, qd, max_iter=3, tol=1e-12):
    """Gauss-Newton projection of (q, qd) onto {eta=0, J qd=0}."""
    q = np.array(q, dtype=float, copy=True)
    qd = np.array(qd, dtype=float, copy=True)
    cs = model.constraint_set(domain)
    if cs.n_v == 0:
        return q, qd
    for _ in range(max_iter):
        eta = cs.eta(q)
        if np.max(np.abs(eta)) <= tol:
            break
        j = cs.jacobian(q)
        dq = j.T @ np.linalg.solve(j @ j.T, eta)
        q -= dq
    j = cs.jacobian(q)
    qd = qd - j.T @ np.linalg.solve(j @ j.T, j @ qd)
    return q, qd
