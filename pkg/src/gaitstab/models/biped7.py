"""Five-link planar biped (torso, two thighs, two shanks), stance-anchored.

Coordinates q = (z, ft, f1t, f1s, f2t, f2s): hip height, torso angle, and
thigh/shank angles of both legs measured from the downward vertical
(positive forward).  Leg 1 is the anchored stance leg; its foot sits at the
horizontal origin, which removes forward translation from the state.  Four
actuators drive the hip and knee of each leg.  The cycle alternates a
single-support domain (guard: swing-foot height) and a double-support
domain (guard: rear-foot normal force); the touchdown reset swaps the leg
roles and applies the plastic impact at the new contact set.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..controller import DesiredEvolution, GainSpec, PhasingSpec
from ..gait import GaitSeed
from ..hybrid_graph import DomainSpec, EdgeSpec, GuardSpec, HybridGraph
from ..mechanics import ConstraintSet, MechanicalModel, project_to_manifold
from .. import bezier
from . import _biped7_dyn as dyn


@dataclass(frozen=True)
class Biped7Params:
    thigh_len: float = 0.4
    shank_len: float = 0.4
    thigh_mass: float = 6.8
    shank_mass: float = 3.2
    torso_mass: float = 16.0
    thigh_com: float = 0.16     # below the hip along the thigh
    shank_com: float = 0.16     # below the knee along the shank
    torso_com: float = 0.24     # above the hip
    thigh_inertia: float = 0.09
    shank_inertia: float = 0.05
    torso_inertia: float = 0.5
    hip_mass: float = 0.0
    step_length: float = 0.36
    g: float = 9.81


N_Q = 6
# touchdown reset: swap the leg coordinate blocks
RELABEL = np.array([
    [1, 0, 0, 0, 0, 0],
    [0, 1, 0, 0, 0, 0],
    [0, 0, 0, 0, 1, 0],
    [0, 0, 0, 0, 0, 1],
    [0, 0, 1, 0, 0, 0],
    [0, 0, 0, 1, 0, 0],
], dtype=float)
# u = (hip1, knee1, hip2, knee2) acting on relative angles
INPUT_MATRIX = np.array([
    [0.0, 0.0, 0.0, 0.0],
    [-1.0, 0.0, -1.0, 0.0],
    [1.0, -1.0, 0.0, 0.0],
    [0.0, 1.0, 0.0, 0.0],
    [0.0, 0.0, 1.0, -1.0],
    [0.0, 0.0, 0.0, 1.0],
])


def build_biped7(p=None):
    p = p or Biped7Params()

    def eta_ss(q):
        return dyn.contact_pos_c1(q, p)[1:2]

    def jac_ss(q):
        return dyn.contact_jac_c1(q, p)[1:2, :]

    def jdqd_ss(q, qd):
        return dyn.contact_jacdot_qdot_c1(q, qd, p)[1:2]

    def eta_ds(q):
        c1 = dyn.contact_pos_c1(q, p)
        c2 = dyn.contact_pos_c2(q, p)
        # lead foot pinned one nominal step length ahead of the anchor
        return np.array([c1[1], c2[0] - p.step_length, c2[1]])

    def jac_ds(q):
        j1 = dyn.contact_jac_c1(q, p)
        j2 = dyn.contact_jac_c2(q, p)
        return np.vstack([j1[1:2, :], j2[0:1, :], j2[1:2, :]])

    def jdqd_ds(q, qd):
        a1 = dyn.contact_jacdot_qdot_c1(q, qd, p)
        a2 = dyn.contact_jacdot_qdot_c2(q, qd, p)
        return np.array([a1[1], a2[0], a2[1]])

    ss = ConstraintSet(n_v=1, eta=eta_ss, jacobian=jac_ss, jdot_qdot=jdqd_ss,
                       row_labels=(("c1", "z"),))
    ds = ConstraintSet(n_v=3, eta=eta_ds, jacobian=jac_ds, jdot_qdot=jdqd_ds,
                       row_labels=(("c1", "z"), ("c2", "x"), ("c2", "z")))
    return MechanicalModel(
        name="biped7", n_q=N_Q, n_u=4,
        mass_matrix=lambda q: dyn.mass_matrix(q, p),
        bias=lambda q, qd: dyn.bias(q, qd, p),
        input_matrix=INPUT_MATRIX,
        constraints={"ss": ss, "ds": ds},
        potential=lambda q: dyn.potential(q, p),
        contact_points={
            "c1": lambda q: dyn.contact_pos_c1(q, p),
            "c2": lambda q: dyn.contact_pos_c2(q, p),
        },
        base_x=lambda q: dyn.base_x(q, p),
        base_x_grad=lambda q: dyn.base_x_grad(q, p),
        base_x_hess=lambda q: dyn.base_x_hess(q, p),
        coord_names=("z", "ft", "f1t", "f1s", "f2t", "f2s"), params=p)


def biped7_cycle(model):
    """SS ends when the swing foot lands ahead; the impact pins it with the
    rear anchor still in place.  DS ends when the rear (anchor) foot's
    normal force vanishes; that edge drops the rear contact and swaps the
    leg roles so the chart re-anchors on the lead foot, which is exact: both
    feet are stationary and one step length apart at lift-off."""
    vertices = [
        DomainSpec(id="ss", constraint_set=("c1",), contact_kind="single",
                   guard=GuardSpec(kind="foot-height", contact="c2",
                                   direction=-1)),
        DomainSpec(id="ds", constraint_set=("c1", "c2"), contact_kind="multi",
                   guard=GuardSpec(kind="normal-force", contact="c1",
                                   direction=-1)),
    ]
    edges = [
        EdgeSpec(source="ss", target="ds", kind="contact-add"),
        EdgeSpec(source="ds", target="ss", kind="contact-break",
                 relabel=RELABEL),
    ]
    return HybridGraph(vertices=vertices, edges=edges)


def biped7_nominal_h2():
    """SS tracks all four actuated relative angles; DS drops the fresh
    stance leg's rows and keeps the rear hip and knee."""
    hip1 = [0.0, -1.0, 1.0, 0.0, 0.0, 0.0]
    knee1 = [0.0, 0.0, -1.0, 1.0, 0.0, 0.0]
    hip2 = [0.0, -1.0, 0.0, 0.0, 1.0, 0.0]
    knee2 = [0.0, 0.0, 0.0, 0.0, -1.0, 1.0]
    return {
        "ss": np.array([hip1, knee1, hip2, knee2]),
        "ds": np.array([hip2, knee2]),
    }


def leg_ik(p, hip, foot):
    """Thigh/shank angles for a foot target, knee-forward branch."""
    w = np.asarray(foot, dtype=float) - np.asarray(hip, dtype=float)
    d = float(np.hypot(w[0], w[1]))
    lt, ls = p.thigh_len, p.shank_len
    d = min(d, (lt + ls) * (1.0 - 1e-9))
    chord = np.arctan2(w[0], -w[1])
    cos_hip = (d * d + lt * lt - ls * ls) / (2.0 * d * lt)
    gamma = np.arccos(np.clip(cos_hip, -1.0, 1.0))
    theta_t = chord + gamma
    cos_knee = (d * d - lt * lt - ls * ls) / (2.0 * lt * ls)
    knee = np.arccos(np.clip(cos_knee, -1.0, 1.0))
    theta_s = theta_t - knee
    return float(theta_t), float(theta_s)


def biped7_seed(model, graph, speed=0.5, hip_height=0.76, torso_lean=0.06,
                clearance=0.05, touchdown_frac=0.55, liftoff_frac=-0.28,
                gains=None):
    """Keyframe seed: hip glides level while the swing foot clears ground."""
    p = model.params
    d_star = p.step_length
    x_td = touchdown_frac * d_star
    x_lo = liftoff_frac * d_star
    # DS keeps the rear anchor: the hip continues from x_td and hands over
    # to the new anchor (one step ahead) at x_lo + d_star
    ranges = {"ss": (x_lo, x_td), "ds": (x_td, x_lo + d_star)}
    taus = np.linspace(0.0, 1.0, 17)

    def ss_frame(tau):
        hip = np.array([x_lo + tau * (x_td - x_lo), hip_height])
        sw_x = -d_star + (2.0 * d_star) * (3 * tau ** 2 - 2 * tau ** 3)
        sw_z = clearance * np.sin(np.pi * tau)
        f1t, f1s = leg_ik(p, hip, np.array([0.0, 0.0]))
        f2t, f2s = leg_ik(p, hip, np.array([sw_x, sw_z]))
        return np.array([hip[1], torso_lean, f1t, f1s, f2t, f2s])

    def ds_frame(tau):
        c0, c1 = ranges["ds"]
        hip = np.array([c0 + tau * (c1 - c0), hip_height])
        f1t, f1s = leg_ik(p, hip, np.array([0.0, 0.0]))
        f2t, f2s = leg_ik(p, hip, np.array([d_star, 0.0]))
        return np.array([hip[1], torso_lean, f1t, f1s, f2t, f2s])

    q_ss = np.array([ss_frame(t) for t in taus])
    q_ds = np.array([ds_frame(t) for t in taus])
    ss_coeffs = bezier.fit_bezier(taus, q_ss, degree=6)
    ds_coeffs = bezier.fit_bezier(taus, q_ds, degree=6)
    s_coeffs = np.full(7, speed)
    phasing = PhasingSpec(kind="horizontal-displacement", ranges=ranges)
    desired = DesiredEvolution(
        phasing=phasing,
        q_coeffs={"ss": ss_coeffs, "ds": ds_coeffs},
        s_coeffs={"ds": s_coeffs})
    dc_ss = x_td - x_lo
    taudot = speed / dc_ss
    q_end = bezier.bezier_value(ss_coeffs, 1.0)
    qd_end = bezier.bezier_deriv(ss_coeffs, 1.0) * taudot
    q_end, qd_end = project_to_manifold(model, "ss", q_end, qd_end)
    x0 = np.concatenate([q_end, qd_end])
    return GaitSeed(
        start_vertex="ss", x0=x0, desired=desired,
        h2=biped7_nominal_h2(), gains=gains or GainSpec(),
        speed_target=speed, speed_hard=True,
        free_channels={"ss": (1, 2, 3, 4, 5), "ds": (1, 4, 5)},
        duration_hint=d_star / speed)
