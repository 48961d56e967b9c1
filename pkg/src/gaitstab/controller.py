"""Parameterized virtual-constraint outputs and I-O linearizing feedback.

Multi-contact domains regulate one velocity output (base forward speed
against its reference) plus m2v holonomic outputs H2v (q - q*(tau)); the
feedback is the minimum-norm right inverse of the decoupling matrix.
Single-contact domains regulate m holonomic outputs with an exact inverse.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np
import scipy.linalg

from . import bezier
from .errors import DecouplingSingular, NonMonotonePhase
from .mechanics import GeneralizedState, constrained_dynamics_terms

DECOUPLING_RANK_RTOL = 1e-8


@dataclass(frozen=True)
class PhasingSpec:
    """Holonomic phasing quantity and its per-domain normalization range."""

    kind: str = "horizontal-displacement"
    ranges: dict = field(default_factory=dict)  # domain -> (c0, c1)
    custom: Optional[Callable] = None  # (model, q) -> (c, grad, hess)

    def with_range(self, domain, c0, c1):
        ranges = dict(self.ranges)
        ranges[domain] = (float(c0), float(c1))
        return replace(self, ranges=ranges)

    def raw(self, model, q):
        if self.kind == "horizontal-displacement":
            return (float(model.base_x(q)), model.base_x_grad(q),
                    model.base_x_hess(q))
        if self.kind == "custom":
            return self.custom(model, q)
        raise ValueError(f"unknown phasing kind {self.kind!r}")


@dataclass(frozen=True)
class DesiredEvolution:
    """Per-domain Bezier references over normalized tau in [0, 1]."""

    phasing: PhasingSpec
    q_coeffs: dict = field(default_factory=dict)  # domain -> (deg+1, n_q)
    s_coeffs: dict = field(default_factory=dict)  # domain -> (deg+1,)
    _deriv_cache: dict = field(default_factory=dict, repr=False, compare=False)

    def _derivs(self, table, v):
        key = (id(table), v)
        hit = self._deriv_cache.get(key)
        if hit is None:
            c1 = bezier.bezier_derivative_coeffs(table[v])
            c2 = bezier.bezier_derivative_coeffs(c1)
            hit = (c1, c2)
            self._deriv_cache[key] = hit
        return hit

    def q_star(self, v, tau):
        return bezier.bezier_value(self.q_coeffs[v], tau)

    def q_star_d(self, v, tau):
        return bezier.bezier_value(self._derivs(self.q_coeffs, v)[0], tau)

    def q_star_dd(self, v, tau):
        return bezier.bezier_value(self._derivs(self.q_coeffs, v)[1], tau)

    def s_star(self, v, tau):
        return float(bezier.bezier_value(self.s_coeffs[v], tau))

    def s_star_d(self, v, tau):
        return float(bezier.bezier_value(self._derivs(self.s_coeffs, v)[0], tau))

    def with_q_coeffs(self, v, coeffs):
        qc = dict(self.q_coeffs)
        qc[v] = np.asarray(coeffs, dtype=float)
        return replace(self, q_coeffs=qc)

    def with_s_coeffs(self, v, coeffs):
        sc = dict(self.s_coeffs)
        sc[v] = np.asarray(coeffs, dtype=float)
        return replace(self, s_coeffs=sc)

    def with_phasing(self, phasing):
        return replace(self, phasing=phasing)


@dataclass(frozen=True)
class VirtualConstraintParams:
    """Output matrices H2v per domain, vectorized as xi_v = vec(H2v)."""

    h2: dict  # domain -> (m2v, n_q)
    nominal: Optional[dict] = None

    def __post_init__(self):
        h2 = {v: np.asarray(m, dtype=float) for v, m in self.h2.items()}
        object.__setattr__(self, "h2", h2)
        if self.nominal is None:
            object.__setattr__(
                self, "nominal", {v: m.copy() for v, m in h2.items()})

    def m2(self, v):
        return self.h2[v].shape[0]

    def xi(self, v):
        return self.h2[v].flatten(order="F")

    def p(self, v):
        return self.h2[v].size

    def xi_stacked(self, domains=None):
        domains = list(self.h2) if domains is None else domains
        return np.concatenate([self.xi(v) for v in domains])

    def with_xi(self, v, xi_v):
        m2v, n_q = self.h2[v].shape
        h2 = dict(self.h2)
        h2[v] = np.asarray(xi_v, dtype=float).reshape((m2v, n_q), order="F")
        return replace(self, h2=h2)

    def with_delta(self, v, delta):
        return self.with_xi(v, self.xi(v) + np.asarray(delta, dtype=float))

    def check_rank(self, v, tol=1e-8):
        sv = np.linalg.svd(self.h2[v], compute_uv=False)
        return sv[-1] > tol


@dataclass(frozen=True)
class GainSpec:
    kp: float = 100.0
    kd: float = 20.0


def eval_phasing(model, spec, x, v, warn_nonmonotone=True):
    """Normalized phase tau in [0, 1] (clamped) and its time derivative."""
    if not isinstance(x, GeneralizedState):
        x = GeneralizedState.from_concat(np.asarray(x, dtype=float))
    c, grad, _ = spec.raw(model, x.q)
    c0, c1 = spec.ranges[v]
    dc = c1 - c0
    tau_raw = (c - c0) / dc
    tau = min(max(tau_raw, 0.0), 1.0)
    taudot = float(grad @ x.qd) / dc
    if warn_nonmonotone and taudot <= 0.0 and 0.0 < tau_raw < 1.0:
        warnings.warn(
            f"phase rate {taudot:.3e} <= 0 inside domain {v!r}",
            NonMonotonePhase)
    return tau, taudot


@dataclass(frozen=True)
class _AffineDynamics:
    """qdd = drift + binv u and lam = lambda_bias + lambda_gain u."""

    drift: np.ndarray
    binv: np.ndarray
    lambda_bias: np.ndarray
    lambda_gain: np.ndarray


def _affine_dynamics(model, domain, q, qd):
    """One-factorization evaluation of the constrained affine dynamics."""
    cs = model.constraint_set(domain)
    d = model.mass_matrix(q)
    f = model.bias(q, qd)
    b = model.input_matrix
    cho = scipy.linalg.cho_factor(d, lower=True, check_finite=False)
    rhs = np.column_stack([f, b])
    sol = scipy.linalg.cho_solve(cho, rhs, check_finite=False)
    dinv_f, dinv_b = sol[:, 0], sol[:, 1:]
    if cs.n_v == 0:
        return _AffineDynamics(
            drift=-dinv_f, binv=dinv_b,
            lambda_bias=np.zeros(0), lambda_gain=np.zeros((0, model.n_u)))
    j = cs.jacobian(q)
    jdqd = cs.jdot_qdot(q, qd)
    dinv_jt = scipy.linalg.cho_solve(cho, j.T, check_finite=False)
    gram = j @ dinv_jt
    gram_cho = scipy.linalg.cho_factor(gram, lower=True, check_finite=False)
    lam = scipy.linalg.cho_solve(
        gram_cho, np.column_stack([j @ dinv_f - jdqd, -(j @ dinv_b)]),
        check_finite=False)
    lam_bias, lam_gain = lam[:, 0], lam[:, 1:]
    drift = -dinv_f + dinv_jt @ lam_bias
    binv = dinv_b + dinv_jt @ lam_gain
    return _AffineDynamics(drift=drift, binv=binv,
                           lambda_bias=lam_bias, lambda_gain=lam_gain)


@dataclass(frozen=True)
class _OutputData:
    """Intermediate quantities shared by output/decoupling/control evals."""

    tau: float
    taudot: float
    y1: Optional[float]
    y2: np.ndarray
    y2dot: np.ndarray
    a_mat: np.ndarray
    b_vec: np.ndarray
    dyn: _AffineDynamics


def _assemble(model, params, desired, x, v, multi):
    if not isinstance(x, GeneralizedState):
        x = GeneralizedState.from_concat(np.asarray(x, dtype=float))
    q, qd = x.q, x.qd
    spec = desired.phasing
    c, grad, hess = spec.raw(model, q)
    c0, c1 = spec.ranges[v]
    dc = c1 - c0
    tau = min(max((c - c0) / dc, 0.0), 1.0)
    taudot = float(grad @ qd) / dc
    h2 = params.h2[v]
    qs = desired.q_star(v, tau)
    qs_d = desired.q_star_d(v, tau)
    qs_dd = desired.q_star_dd(v, tau)
    y2 = h2 @ (q - qs)
    y2dot = h2 @ (qd - qs_d * taudot)
    dyn = _affine_dynamics(model, v, q, qd)
    qd_hess_qd = float(qd @ hess @ qd)
    # rows of ydd2 = m2 @ qdd - h (q*'' taudot^2 + q*' qd'H qd / dc)
    m2 = h2 - np.outer(h2 @ qs_d, grad / dc)
    b2 = m2 @ dyn.drift - (h2 @ qs_dd) * taudot ** 2 \
        - (h2 @ qs_d) * (qd_hess_qd / dc)
    a2 = m2 @ dyn.binv
    if multi:
        s_val = float(grad @ qd)
        y1 = s_val - desired.s_star(v, tau)
        b1 = qd_hess_qd + float(grad @ dyn.drift) \
            - desired.s_star_d(v, tau) * taudot
        a1 = grad @ dyn.binv
        a_mat = np.vstack([a1[None, :], a2])
        b_vec = np.concatenate([[b1], b2])
    else:
        y1 = None
        a_mat = a2
        b_vec = b2
    return x, _OutputData(tau=tau, taudot=taudot, y1=y1, y2=y2, y2dot=y2dot,
                          a_mat=a_mat, b_vec=b_vec, dyn=dyn)


def eval_outputs_multi(model, params, desired, x, v):
    """(y1, y2, y2dot) for a multi-contact domain."""
    _, data = _assemble(model, params, desired, x, v, multi=True)
    return data.y1, data.y2, data.y2dot


def eval_outputs_single(model, params, desired, x, v):
    """(y2, y2dot) for a single-contact domain."""
    _, data = _assemble(model, params, desired, x, v, multi=False)
    return data.y2, data.y2dot


def eval_decoupling_multi(model, params, desired, x, v):
    """Decoupling matrix A_v (1+m2v, m) and drift b_v of the output dynamics."""
    _, data = _assemble(model, params, desired, x, v, multi=True)
    _require_rank(data.a_mat, data.a_mat.shape[0], v)
    return data.a_mat, data.b_vec


def _require_rank(a_mat, need, v):
    sv = np.linalg.svd(a_mat, compute_uv=False)
    if sv.shape[0] < need or sv[need - 1] <= DECOUPLING_RANK_RTOL * max(sv[0], 1.0):
        raise DecouplingSingular(
            f"decoupling matrix rank below {need} in domain {v!r} "
            f"(singular values {sv})", singular_values=sv)


def control_multi(model, params, desired, gains, x, v, square_reduction=None):
    """Min-norm I-O linearizing feedback for a multi-contact domain."""
    u, _ = control_multi_full(model, params, desired, gains, x, v,
                              square_reduction=square_reduction)
    return u


def control_multi_full(model, params, desired, gains, x, v,
                       square_reduction=None):
    x, data = _assemble(model, params, desired, x, v, multi=True)
    w = np.concatenate([[gains.kp * data.y1],
                        gains.kp * data.y2 + gains.kd * data.y2dot])
    rhs = data.b_vec + w
    a_mat = data.a_mat
    if square_reduction is not None:
        frozen_idx, u_frozen_fn = square_reduction
        u_f = float(u_frozen_fn(data.tau))
        keep = [j for j in range(a_mat.shape[1]) if j != frozen_idx]
        a_red = a_mat[:, keep]
        _require_rank(a_red, a_red.shape[0], v)
        u_red = np.linalg.solve(a_red, -(rhs + a_mat[:, frozen_idx] * u_f))
        u = np.zeros(a_mat.shape[1])
        u[frozen_idx] = u_f
        u[keep] = u_red
        return u, data
    _require_rank(a_mat, a_mat.shape[0], v)
    gram = a_mat @ a_mat.T
    u = -a_mat.T @ np.linalg.solve(gram, rhs)
    return u, data


def control_single(model, params, desired, gains, x, v):
    """Exact-inverse I-O linearizing feedback for a single-contact domain."""
    u, _ = control_single_full(model, params, desired, gains, x, v)
    return u


def control_single_full(model, params, desired, gains, x, v):
    x, data = _assemble(model, params, desired, x, v, multi=False)
    _require_rank(data.a_mat, data.a_mat.shape[0], v)
    rhs = data.b_vec + gains.kp * data.y2 + gains.kd * data.y2dot
    u = np.linalg.solve(data.a_mat, -rhs)
    return u, data


def zero_dynamics_residual(model, params, desired, x, v, multi=None):
    """Distance proxy to the zero-dynamics manifold: max |output|."""
    if multi is None:
        multi = params.m2(v) < model.n_u
    _, data = _assemble(model, params, desired, x, v, multi=multi)
    parts = [data.y2, data.y2dot]
    if multi:
        parts.insert(0, np.atleast_1d(data.y1))
    return float(np.max(np.abs(np.concatenate(parts))))


@dataclass(frozen=True)
class DomainControllers:
    """Closed-loop control laws for every vertex of a hybrid graph."""

    graph: object
    params: VirtualConstraintParams
    desired: DesiredEvolution
    gains: GainSpec = GainSpec()
    # domain -> (frozen input index, feedforward tau -> u_frozen)
    square_reduction: dict = field(default_factory=dict)

    def is_multi(self, v):
        return self.graph.vertex(v).contact_kind == "multi"

    def control(self, model, v, x):
        if self.is_multi(v):
            return control_multi(
                model, self.params, self.desired, self.gains, x, v,
                square_reduction=self.square_reduction.get(v))
        return control_single(model, self.params, self.desired, self.gains, x, v)

    def closed_loop(self, model, v, x):
        """(u, qdd, lam) in one dynamics evaluation."""
        if self.is_multi(v):
            u, data = control_multi_full(
                model, self.params, self.desired, self.gains, x, v,
                square_reduction=self.square_reduction.get(v))
        else:
            u, data = control_single_full(
                model, self.params, self.desired, self.gains, x, v)
        qdd = data.dyn.drift + data.dyn.binv @ u
        lam = data.dyn.lambda_bias + data.dyn.lambda_gain @ u
        return u, qdd, lam

    def with_params(self, params):
        return replace(self, params=params)

    def with_desired(self, desired):
        return replace(self, desired=desired)

    def with_square_reduction(self, sq):
        return replace(self, square_reduction=dict(sq))
