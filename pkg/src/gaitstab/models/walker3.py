"""Three-link planar walker in a stance-anchored chart.

Coordinates q = (z, f1, ft, f3): hip height, stance-leg angle, torso angle,
swing-leg angle.  Leg angles are measured from the vertical, positive when
the hip is ahead of the foot; the stance foot sits at the horizontal origin,
so the hip x position is leg_len*sin(f1) and forward translation is
quotiented out of the state.  Two hip torques act between the torso and each
leg.  The single domain ends on a phase threshold; the step reset swaps the
leg roles (pure permutation) and applies the plastic impact at the fresh
stance contact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..controller import DesiredEvolution, GainSpec, PhasingSpec
from ..gait import GaitSeed
from ..hybrid_graph import DomainSpec, EdgeSpec, GuardSpec, HybridGraph
from ..mechanics import ConstraintSet, MechanicalModel, project_to_manifold
from .. import bezier
from . import _walker3_dyn as dyn


@dataclass(frozen=True)
class Walker3Params:
    leg_len: float = 1.0
    leg_mass: float = 5.0
    leg_com: float = 0.5        # distance of the leg COM from the hip
    leg_inertia: float = 0.4
    torso_mass: float = 10.0
    torso_com: float = 0.3      # distance of the torso COM above the hip
    torso_inertia: float = 0.3
    hip_mass: float = 0.0
    step_nominal: float = 2.0 * float(np.sin(0.25))  # anchor of the impact set
    g: float = 9.81


N_Q = 4
# reset permutation: swap the leg angles (z, f1, ft, f3) -> (z, f3, ft, f1)
RELABEL = np.array([
    [1.0, 0.0, 0.0, 0.0],
    [0.0, 0.0, 0.0, 1.0],
    [0.0, 0.0, 1.0, 0.0],
    [0.0, 1.0, 0.0, 0.0],
])
# hip torques act on the relative angles (f1 - ft) and (f3 - ft)
INPUT_MATRIX = np.array([
    [0.0, 0.0],
    [1.0, 0.0],
    [-1.0, -1.0],
    [0.0, 1.0],
])


def build_walker3(p=None):
    p = p or Walker3Params()

    def eta(q):
        return dyn.contact_pos_c1(q, p)[1:2]

    def jac(q):
        return dyn.contact_jac_c1(q, p)[1:2, :]

    def jdqd(q, qd):
        return dyn.contact_jacdot_qdot_c1(q, qd, p)[1:2]

    ss = ConstraintSet(n_v=1, eta=eta, jacobian=jac, jdot_qdot=jdqd,
                       row_labels=(("c1", "z"),))

    # touchdown impulse acts through the full pin of the landing foot; the
    # old anchor keeps only its structural horizontal pin and is free to
    # lift, so the post-impulse leg swap is an exact permutation
    def eta_imp(q):
        c2 = dyn.contact_pos_c2(q, p)
        return np.array([c2[0] - p.step_nominal, c2[1]])

    def jac_imp(q):
        return dyn.contact_jac_c2(q, p)

    def jdqd_imp(q, qd):
        return dyn.contact_jacdot_qdot_c2(q, qd, p)

    impact = ConstraintSet(
        n_v=2, eta=eta_imp, jacobian=jac_imp, jdot_qdot=jdqd_imp,
        row_labels=(("c2", "x"), ("c2", "z")))
    return MechanicalModel(
        name="walker3", n_q=N_Q, n_u=2,
        mass_matrix=lambda q: dyn.mass_matrix(q, p),
        bias=lambda q, qd: dyn.bias(q, qd, p),
        input_matrix=INPUT_MATRIX,
        constraints={"ss": ss, "impact": impact},
        potential=lambda q: dyn.potential(q, p),
        contact_points={
            "c1": lambda q: dyn.contact_pos_c1(q, p),
            "c2": lambda q: dyn.contact_pos_c2(q, p),
        },
        base_x=lambda q: dyn.base_x(q, p),
        base_x_grad=lambda q: dyn.base_x_grad(q, p),
        base_x_hess=lambda q: dyn.base_x_hess(q, p),
        coord_names=("z", "f1", "ft", "f3"), params=p)


def walker3_cycle(model, step_half_angle=0.25):
    """Single-vertex cycle: step reset triggers at a phase threshold."""
    # base_x = leg_len sin(f1); touchdown once the hip passes leg_len sin(a)
    threshold = _leg_len(model) * float(np.sin(step_half_angle))
    guard = GuardSpec(kind="phase-threshold", direction=1, threshold=threshold)
    vertices = [DomainSpec(id="ss", constraint_set=("c1",),
                           contact_kind="single", guard=guard)]
    edges = [EdgeSpec(source="ss", target="ss", kind="contact-add",
                      relabel=RELABEL, impact_constraints="impact")]
    return HybridGraph(vertices=vertices, edges=edges)


def _leg_len(model):
    # recover leg_len from the chart: base_x(q) = leg_len * sin(f1)
    probe = np.zeros(N_Q)
    probe[1] = np.pi / 2
    return float(model.base_x(probe))


def walker3_nominal_h2():
    """Outputs: the two actuated relative angles (f1 - ft, f3 - ft)."""
    return {"ss": np.array([
        [0.0, 1.0, -1.0, 0.0],
        [0.0, 0.0, -1.0, 1.0],
    ])}


def walker3_seed(model, graph, speed=0.55, torso_lean=0.08,
                 gains=None):
    """Kinematic seed: symmetric step between mirrored leg configurations."""
    ell = _leg_len(model)
    threshold = graph.vertex("ss").guard.threshold
    alpha = float(np.arcsin(threshold / ell))
    c1 = threshold
    c0 = -c1
    dc = c1 - c0
    taus = np.linspace(0.0, 1.0, 15)
    f1 = np.arcsin((c0 + taus * dc) / ell)
    z = ell * np.cos(f1)
    ft = np.full_like(taus, torso_lean)
    f3 = np.arcsin((c0 + (1.0 - taus) * dc) / ell)
    q_samples = np.column_stack([z, f1, ft, f3])
    q_coeffs = bezier.fit_bezier(taus, q_samples, degree=6)
    phasing = PhasingSpec(kind="horizontal-displacement",
                          ranges={"ss": (c0, c1)})
    desired = DesiredEvolution(phasing=phasing, q_coeffs={"ss": q_coeffs},
                               s_coeffs={})
    taudot = speed / dc
    q_end = bezier.bezier_value(q_coeffs, 1.0)
    qd_end = bezier.bezier_deriv(q_coeffs, 1.0) * taudot
    q_end, qd_end = project_to_manifold(model, "ss", q_end, qd_end)
    x0 = np.concatenate([q_end, qd_end])
    return GaitSeed(
        start_vertex="ss", x0=x0, desired=desired,
        h2=walker3_nominal_h2(), gains=gains or GainSpec(),
        speed_target=speed, speed_hard=False,
        free_channels={"ss": (1, 2, 3)},
        duration_hint=dc / speed)
