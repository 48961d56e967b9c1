"""Generated by tools/generate_models.py -- do not edit by hand."""
# flake8: noqa
import math
from math import sin, cos

import numpy as np

def mass_matrix(q, p):
    f1 = q[1]
    ft = q[2]
    f3 = q[3]
    leg_len = p.leg_len
    leg_mass = p.leg_mass
    leg_com = p.leg_com
    leg_inertia = p.leg_inertia
    torso_mass = p.torso_mass
    torso_com = p.torso_com
    torso_inertia = p.torso_inertia
    hip_mass = p.hip_mass
    x0 = 2*leg_mass
    x1 = leg_com*leg_mass
    x2 = x1*math.sin(f1)
    x3 = torso_com*torso_mass
    x4 = -x3*math.sin(ft)
    x5 = x1*math.sin(f3)
    x6 = math.cos(f1)
    x7 = x6**2
    x8 = leg_len**2*x7
    x9 = leg_com**2*leg_mass + leg_inertia
    x10 = leg_len*x6
    x11 = x10*x3*math.cos(ft)
    x12 = -x1*x10*math.cos(f3)
    return np.array([hip_mass + torso_mass + x0, x2, x4, x5, x2, hip_mass*x8 - leg_com*leg_len*x0*x7 + torso_mass*x8 + x0*x8 + x9, x11, x12, x4, x11, torso_com**2*torso_mass + torso_inertia, 0, x5, x12, 0, x9]).reshape(4, 4)

def bias(q, qd, p):
    f1 = q[1]
    ft = q[2]
    f3 = q[3]
    df1 = qd[1]
    dft = qd[2]
    df3 = qd[3]
    leg_len = p.leg_len
    leg_mass = p.leg_mass
    leg_com = p.leg_com
    torso_mass = p.torso_mass
    torso_com = p.torso_com
    hip_mass = p.hip_mass
    g = p.g
    x0 = math.cos(f1)
    x1 = df1**2
    x2 = leg_com*leg_mass
    x3 = math.cos(f3)
    x4 = df3**2
    x5 = math.cos(ft)
    x6 = torso_com*torso_mass
    x7 = dft**2*x6
    x8 = math.sin(f1)
    x9 = math.sin(ft)
    x10 = math.sin(2*f1)
    x11 = leg_len**2*x1*x10
    x12 = math.sin(f3)
    x13 = (1/2)*x11
    x14 = leg_len*x1*x8
    return np.array([g*hip_mass + 2*g*leg_mass + g*torso_mass + x0*x1*x2 + x2*x3*x4 - x5*x7, g*leg_com*leg_mass*x8 - hip_mass*x13 + leg_com*leg_len*leg_mass*x0*x12*x4 + leg_com*leg_len*leg_mass*x1*x10 - leg_len*x0*x7*x9 - leg_mass*x11 - torso_mass*x13, -x6*(g*x9 + x14*x5), x2*(g*x12 + x14*x3)])

def potential(q, p):
    z = q[0]
    f1 = q[1]
    ft = q[2]
    f3 = q[3]
    leg_mass = p.leg_mass
    leg_com = p.leg_com
    torso_mass = p.torso_mass
    torso_com = p.torso_com
    hip_mass = p.hip_mass
    g = p.g
    x0 = -z
    return g*(hip_mass*z - leg_mass*(leg_com*math.cos(f1) + x0) - leg_mass*(leg_com*math.cos(f3) + x0) + torso_mass*(torso_com*math.cos(ft) + z))

def base_x(q, p):
    f1 = q[1]
    leg_len = p.leg_len
    return leg_len*math.sin(f1)

def base_x_grad(q, p):
    f1 = q[1]
    leg_len = p.leg_len
    return np.array([0, leg_len*math.cos(f1), 0, 0])

def base_x_hess(q, p):
    f1 = q[1]
    leg_len = p.leg_len
    return np.array([0, 0, 0, 0, 0, -leg_len*math.sin(f1), 0, 0, 0, 0, 0, 0, 0, 0, 0, 0]).reshape(4, 4)

def contact_pos_c1(q, p):
    z = q[0]
    f1 = q[1]
    leg_len = p.leg_len
    return np.array([0, -leg_len*math.cos(f1) + z])

def contact_jac_c1(q, p):
    f1 = q[1]
    leg_len = p.leg_len
    return np.array([0, 0, 0, 0, 1, leg_len*math.sin(f1), 0, 0]).reshape(2, 4)

def contact_jacdot_qdot_c1(q, qd, p):
    f1 = q[1]
    df1 = qd[1]
    leg_len = p.leg_len
    return np.array([0, df1**2*leg_len*math.cos(f1)])

def contact_pos_c2(q, p):
    z = q[0]
    f1 = q[1]
    f3 = q[3]
    leg_len = p.leg_len
    return np.array([leg_len*(math.sin(f1) - math.sin(f3)), -leg_len*math.cos(f3) + z])

def contact_jac_c2(q, p):
    f1 = q[1]
    f3 = q[3]
    leg_len = p.leg_len
    return np.array([0, leg_len*math.cos(f1), 0, -leg_len*math.cos(f3), 1, 0, 0, leg_len*math.sin(f3)]).reshape(2, 4)

def contact_jacdot_qdot_c2(q, qd, p):
    f1 = q[1]
    f3 = q[3]
    df1 = qd[1]
    df3 = qd[3]
    leg_len = p.leg_len
    x0 = df3**2
    return np.array([leg_len*(-df1**2*math.sin(f1) + x0*math.sin(f3)), leg_len*x0*math.cos(f3)])
