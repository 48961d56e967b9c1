"""Offline symbolic derivation of the built-in planar models.

Emits closed-form evaluator modules under src/gaitstab/models/ so the
library has no sympy runtime dependency.  Re-run after changing kinematics:

    python tools/generate_models.py
"""

import pathlib
import textwrap

import sympy as sp

OUT_DIR = pathlib.Path(__file__).resolve().parents[1] / "src" / "gaitstab" / "models"


def planar_link_energy(com, angle, mass, inertia, q, qd, g):
    """Kinetic and potential energy of one rigid planar link."""
    vel = sp.Matrix([sum(sp.diff(com[i], q[j]) * qd[j] for j in range(len(q)))
                     for i in range(2)])
    omega = sum(sp.diff(angle, q[j]) * qd[j] for j in range(len(q)))
    ke = sp.Rational(1, 2) * mass * (vel.T * vel)[0, 0] \
        + sp.Rational(1, 2) * inertia * omega ** 2
    pe = mass * g * com[1]
    return ke, pe


def derive(q, qd, links, params, base_x, contacts):
    """links: list of (com(2), angle, mass, inertia); contacts: {id: pos(2)}."""
    n = len(q)
    ke = sp.S.Zero
    pe = sp.S.Zero
    g = params["g"]
    for com, ang, m, iz in links:
        k, p = planar_link_energy(com, ang, m, iz, q, qd, g)
        ke += k
        pe += p
    ke = sp.expand(sp.trigsimp(ke))
    mass = sp.Matrix(n, n, lambda i, j: sp.diff(sp.diff(ke, qd[i]), qd[j]))
    mass = sp.simplify(mass)
    # bias_i = d/dt(dKE/dqd_i)|_{qdd=0} - dKE/dq_i + dV/dq_i
    bias = sp.Matrix([
        sum(sp.diff(sp.diff(ke, qd[i]), q[j]) * qd[j] for j in range(n))
        - sp.diff(ke, q[i]) + sp.diff(pe, q[i])
        for i in range(n)])
    grad_bx = sp.Matrix([sp.diff(base_x, q[j]) for j in range(n)])
    hess_bx = sp.Matrix(n, n, lambda i, j: sp.diff(base_x, q[i], q[j]))
    out = {
        "mass_matrix": ("q", mass),
        "bias": ("qqd", sp.simplify(bias)),
        "potential": ("q", sp.Matrix([pe])),
        "base_x": ("q", sp.Matrix([base_x])),
        "base_x_grad": ("q", grad_bx),
        "base_x_hess": ("q", hess_bx),
    }
    for cid, pos in contacts.items():
        pos = sp.Matrix(pos)
        jac = pos.jacobian(sp.Matrix(q))
        jdot_qd = sp.Matrix([
            sum(sp.diff((jac * sp.Matrix(qd))[i], q[j]) * qd[j] for j in range(n))
            for i in range(2)])
        out[f"contact_pos_{cid}"] = ("q", pos)
        out[f"contact_jac_{cid}"] = ("q", jac)
        out[f"contact_jacdot_qdot_{cid}"] = ("qqd", jdot_qd)
    return out


def emit_function(name, kind, expr_matrix, q, qd, param_names):
    rows, cols = expr_matrix.shape
    exprs = [expr_matrix[i, j] for i in range(rows) for j in range(cols)]
    repl, reduced = sp.cse(exprs, optimizations="basic")
    args = "q, p" if kind == "q" else "q, qd, p"
    lines = [f"def {name}({args}):"]
    used = set().union(*[e.free_symbols for e in exprs]) if exprs else set()
    for r, _ in repl:
        used |= set().union(*[e.free_symbols for _, e in repl])
        break
    sym_names = {str(s) for s in used}
    for _, e in repl:
        sym_names |= {str(s) for s in e.free_symbols}
    for i, s in enumerate(q):
        if str(s) in sym_names:
            lines.append(f"    {s} = q[{i}]")
    if kind == "qqd":
        for i, s in enumerate(qd):
            if str(s) in sym_names:
                lines.append(f"    {s} = qd[{i}]")
    for pn in param_names:
        if pn in sym_names:
            lines.append(f"    {pn} = p.{pn}")
    for sym, e in repl:
        lines.append(f"    {sym} = {sp.pycode(e)}")
    body = ", ".join(sp.pycode(e) for e in reduced)
    if rows == 1 and cols == 1:
        lines.append(f"    return {body}")
    elif cols == 1 or rows == 1:
        lines.append(f"    return np.array([{body}])")
    else:
        lines.append(
            f"    return np.array([{body}]).reshape({rows}, {cols})")
    return "\n".join(lines)


def emit_module(path, q, qd, param_names, functions):
    header = textwrap.dedent('''\
        """Generated by tools/generate_models.py -- do not edit by hand."""
        # flake8: noqa
        import math
        from math import sin, cos

        import numpy as np

        ''')
    parts = [header]
    for name, (kind, mat) in functions.items():
        parts.append(emit_function(name, kind, mat, q, qd, param_names))
        parts.append("\n\n")
    path.write_text("".join(parts).rstrip() + "\n")
    print(f"wrote {path}")


def gen_walker3():
    # chart: q = (z, f1, ft, f3); stance foot anchored at the origin so the
    # hip x position is leg_len*sin(f1); f measured from vertical, positive
    # when the hip is ahead of the foot
    q = sp.symbols("z f1 ft f3")
    qd = sp.symbols("dz df1 dft df3")
    pn = ["leg_len", "leg_mass", "leg_com", "leg_inertia",
          "torso_mass", "torso_com", "torso_inertia", "hip_mass", "g"]
    p = {n: sp.Symbol(n) for n in pn}
    z, f1, ft, f3 = q
    hip = sp.Matrix([p["leg_len"] * sp.sin(f1), z])
    # legs: hip -> foot direction is -(sin f, cos f)
    def leg_com(f):
        return hip - p["leg_com"] * sp.Matrix([sp.sin(f), sp.cos(f)])
    def foot(f):
        return hip - p["leg_len"] * sp.Matrix([sp.sin(f), sp.cos(f)])
    torso_com = hip + p["torso_com"] * sp.Matrix([sp.sin(ft), sp.cos(ft)])
    links = [
        (leg_com(f1), f1, p["leg_mass"], p["leg_inertia"]),
        (leg_com(f3), f3, p["leg_mass"], p["leg_inertia"]),
        (torso_com, ft, p["torso_mass"], p["torso_inertia"]),
        (hip, sp.S.Zero, p["hip_mass"], sp.S.Zero),
    ]
    contacts = {"c1": foot(f1), "c2": foot(f3)}
    funcs = derive(list(q), list(qd), links, p, hip[0], contacts)
    emit_module(OUT_DIR / "_walker3_dyn.py", q, qd, pn, funcs)


def gen_biped7():
    # chart: q = (z, ft, f1t, f1s, f2t, f2s); stance (leg 1) foot anchored at
    # the origin; thigh/shank angles measured from the downward vertical,
    # positive forward
    q = sp.symbols("z ft f1t f1s f2t f2s")
    qd = sp.symbols("dz dft df1t df1s df2t df2s")
    pn = ["thigh_len", "shank_len", "thigh_mass", "shank_mass", "torso_mass",
          "thigh_com", "shank_com", "torso_com", "thigh_inertia",
          "shank_inertia", "torso_inertia", "hip_mass", "step_length", "g"]
    p = {n: sp.Symbol(n) for n in pn}
    z, ft, f1t, f1s, f2t, f2s = q

    def down(a):
        return sp.Matrix([sp.sin(a), -sp.cos(a)])

    x_h = -(p["thigh_len"] * sp.sin(f1t) + p["shank_len"] * sp.sin(f1s))
    hip = sp.Matrix([x_h, z])
    knee1 = hip + p["thigh_len"] * down(f1t)
    knee2 = hip + p["thigh_len"] * down(f2t)
    foot1 = knee1 + p["shank_len"] * down(f1s)
    foot2 = knee2 + p["shank_len"] * down(f2s)
    torso_com = hip + p["torso_com"] * sp.Matrix([sp.sin(ft), sp.cos(ft)])
    links = [
        (hip + p["thigh_com"] * down(f1t), f1t, p["thigh_mass"], p["thigh_inertia"]),
        (hip + p["thigh_com"] * down(f2t), f2t, p["thigh_mass"], p["thigh_inertia"]),
        (knee1 + p["shank_com"] * down(f1s), f1s, p["shank_mass"], p["shank_inertia"]),
        (knee2 + p["shank_com"] * down(f2s), f2s, p["shank_mass"], p["shank_inertia"]),
        (torso_com, ft, p["torso_mass"], p["torso_inertia"]),
        (hip, sp.S.Zero, p["hip_mass"], sp.S.Zero),
    ]
    contacts = {"c1": foot1, "c2": foot2}
    funcs = derive(list(q), list(qd), links, p, x_h, contacts)
    emit_module(OUT_DIR / "_biped7_dyn.py", q, qd, pn, funcs)


if __name__ == "__main__":
    OUT_DIR.mkdir(parents=True, exist_ok=True)
    gen_walker3()
    gen_biped7()
