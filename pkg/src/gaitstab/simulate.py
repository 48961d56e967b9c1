"""Event-detected integration of closed-loop domains and hybrid execution.

Integration uses an adaptive Dormand-Prince pair (scipy RK45) with dense
output.  Constraint drift is corrected by projection onto {eta=0, J qd=0}
after each accepted step; guard zeros are located by bracketing on the dense
output and polished with Brent's method.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
from scipy.integrate import RK45
from scipy.optimize import brentq

from .errors import (GuardNotReached, IntegrationFailure, SimulationError,
                     ZenoSuspected)
from .hybrid_graph import next_domain
from .mechanics import (GeneralizedState, constraint_residual, impact_map,
                        project_to_manifold)

GUARD_TIME_TOL = 1e-12
GUARD_VALUE_TOL = 1e-10


@dataclass(frozen=True)
class IntegrationLimits:
    max_time: float = 10.0
    min_dwell: float = 1e-6
    rtol: float = 1e-10
    atol: float = 1e-12
    max_step: float = np.inf
    record: bool = True
    subsamples: int = 8


@dataclass
class DomainTrajectory:
    vertex: str
    times: np.ndarray
    states: np.ndarray        # rows are col(q, qd)
    controls: np.ndarray
    guards: np.ndarray
    duration: float
    x_minus: GeneralizedState

    @property
    def terminal_guard(self):
        return float(self.guards[-1])


@dataclass
class HybridExecution:
    steps: List[Tuple[str, DomainTrajectory, GeneralizedState]] = field(
        default_factory=list)
    switching_times: List[float] = field(default_factory=list)

    @property
    def total_time(self):
        return self.switching_times[-1] if self.switching_times else 0.0

    def section_states(self, vertex):
        """Pre-reset states collected each time `vertex` finishes."""
        return [traj.x_minus for v, traj, _ in self.steps if v == vertex]


def _guard_evaluator(model, graph, controllers, v):
    spec = graph.vertex(v).guard
    if spec is None:
        raise ValueError(f"vertex {v!r} has no guard")
    if spec.kind == "foot-height":
        point = model.contact_points[spec.contact]
        n = model.n_q

        def value(x):
            return float(point(x[:n])[1])
    elif spec.kind == "phase-threshold":
        n = model.n_q

        def value(x):
            return float(model.base_x(x[:n])) - spec.threshold
    elif spec.kind == "normal-force":
        cs = model.constraint_set(v)
        row = cs.row_index(spec.contact, "z")

        def value(x):
            _, _, lam = controllers.closed_loop(model, v, x)
            return float(lam[row])
    else:
        raise ValueError(f"unknown guard kind {spec.kind!r}")
    return value, spec.direction


def _crossed(direction, g_prev, g_new):
    if direction < 0:
        return g_prev >= 0.0 and g_new < 0.0
    return g_prev <= 0.0 and g_new > 0.0


def integrate_to_guard(model, graph, v, x0, controllers, limits=None):
    """Flow the closed-loop domain v from x0 until its guard crosses zero.

    Returns a DomainTrajectory whose terminal state sits on the guard to
    GUARD_VALUE_TOL.  Raises GuardNotReached, ZenoSuspected, or
    IntegrationFailure.
    """
    limits = limits or IntegrationLimits()
    n = model.n_q
    if isinstance(x0, GeneralizedState):
        x0 = x0.concat()
    x0 = np.asarray(x0, dtype=float)
    guard_fn, direction = _guard_evaluator(model, graph, controllers, v)

    def rhs(t, x):
        _, qdd, _ = controllers.closed_loop(model, v, x)
        return np.concatenate([x[n:], qdd])

    def project(x):
        q, qd = project_to_manifold(model, v, x[:n], x[n:])
        return np.concatenate([q, qd])

    x0 = project(x0)
    g0 = guard_fn(x0)
    times = [0.0]
    states = [x0]
    guards = [g0]
    t = 0.0
    x = x0
    g_prev = g0
    step_hint = None
    while t < limits.max_time:
        if step_hint is not None:
            step_hint = min(step_hint, max(limits.max_time - t, 1e-14))
        solver = RK45(rhs, t, x, t_bound=limits.max_time,
                      rtol=limits.rtol, atol=limits.atol,
                      max_step=limits.max_step, first_step=step_hint)
        try:
            solver.step()
        except (ValueError, ArithmeticError) as exc:
            raise IntegrationFailure(f"integrator failed in {v!r}: {exc}")
        if solver.status == "failed":
            raise IntegrationFailure(f"integrator failed in {v!r} at t={t:.6g}")
        dense = solver.dense_output()
        t_new = solver.t
        x_new = solver.y
        if not np.all(np.isfinite(x_new)):
            raise IntegrationFailure(f"non-finite state in {v!r} at t={t_new:.6g}")
        # bracket the first directed crossing inside this step
        sub_ts = np.linspace(t, t_new, limits.subsamples + 2)[1:]
        g_lo = g_prev
        t_lo = t
        hit = None
        for ts in sub_ts:
            g_hi = guard_fn(dense(ts))
            if _crossed(direction, g_lo, g_hi):
                hit = (t_lo, ts)
                break
            t_lo, g_lo = ts, g_hi
        if hit is not None:
            t_star = _polish_crossing(guard_fn, dense, hit)
            if t_star < limits.min_dwell:
                raise ZenoSuspected(
                    f"guard of {v!r} crossed at t={t_star:.3e} s, below the "
                    f"minimum dwell {limits.min_dwell:.1e} s")
            x_star = project(dense(t_star))
            g_star = guard_fn(x_star)
            if abs(g_star) > GUARD_VALUE_TOL:
                # projection moved the state off the root: redo the polish on
                # the projected guard value
                t_star = float(brentq(
                    lambda tt: guard_fn(project(dense(tt))),
                    hit[0], hit[1], xtol=GUARD_TIME_TOL, rtol=1e-15))
                x_star = project(dense(t_star))
            times.append(t_star)
            states.append(x_star)
            guards.append(guard_fn(x_star))
            traj = _make_traj(model, graph, controllers, v, times, states,
                              guards, limits)
            return traj
        # accepted step without crossing: project drift away and continue
        x_proj = project(x_new)
        times.append(t_new)
        states.append(x_proj)
        guards.append(guard_fn(x_proj))
        g_prev = guards[-1]
        t = t_new
        x = x_proj
        # h_abs holds the proposed size of the *next* step; feeding back the
        # accepted size instead would freeze the step at its smallest value
        step_hint = float(getattr(solver, "h_abs", solver.step_size))
    raise GuardNotReached(
        f"guard of {v!r} not reached within {limits.max_time} s "
        f"(last value {g_prev:.3e})")


def _polish_crossing(guard_fn, dense, bracket):
    t_lo, t_hi = bracket

    def f(tt):
        return guard_fn(dense(tt))

    return float(brentq(f, t_lo, t_hi, xtol=GUARD_TIME_TOL, rtol=1e-15))


def _make_traj(model, graph, controllers, v, times, states, guards, limits):
    times = np.asarray(times)
    states = np.asarray(states)
    guards = np.asarray(guards)
    if limits.record:
        controls = np.array([
            controllers.control(model, v, x) for x in states])
    else:
        controls = np.zeros((len(times), 0))
    x_minus = GeneralizedState(states[-1][:model.n_q], states[-1][model.n_q:])
    return DomainTrajectory(
        vertex=v, times=times, states=states, controls=controls,
        guards=guards, duration=float(times[-1]), x_minus=x_minus)


def hybrid_step(model, graph, v, x0, controllers, limits=None):
    """One domain flow plus the edge reset.

    Returns (next vertex, post-reset state, DomainTrajectory).
    """
    traj = integrate_to_guard(model, graph, v, x0, controllers, limits)
    edge = graph.out_edge(v)
    x_plus = impact_map(model, edge, traj.x_minus)
    q, qd = project_to_manifold(model, edge.target, x_plus.q, x_plus.qd)
    return edge.target, GeneralizedState(q, qd), traj


def run_execution(model, graph, x0, controllers, n_steps, start_vertex=None,
                  limits=None):
    """n_steps full cycle traversals of the hybrid graph.

    Raises SimulationError carrying the partial execution log on failure.
    """
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    v = start_vertex or graph.vertices[0].id
    cycle = graph.cycle_from(v)
    execution = HybridExecution()
    x = x0 if isinstance(x0, GeneralizedState) else \
        GeneralizedState.from_concat(np.asarray(x0, dtype=float))
    t_abs = 0.0
    for k in range(n_steps):
        for v_cur in cycle:
            try:
                v_next, x_next, traj = hybrid_step(
                    model, graph, v_cur, x, controllers, limits)
            except Exception as exc:
                raise SimulationError(
                    f"execution failed in domain {v_cur!r} on cycle {k}: {exc}",
                    vertex=v_cur, step_index=k, partial=execution, cause=exc)
            t_abs += traj.duration
            execution.steps.append((v_cur, traj, x_next))
            execution.switching_times.append(t_abs)
            x = x_next
    return execution


def manifold_residual_along(model, traj):
    """Max (position, velocity) constraint residuals over stored samples."""
    worst = (0.0, 0.0)
    for row in traj.states:
        r = constraint_residual(model, traj.vertex,
                                GeneralizedState.from_concat(row))
        worst = (max(worst[0], r[0]), max(worst[1], r[1]))
    return worst
