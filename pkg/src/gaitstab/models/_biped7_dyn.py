"""Generated by tools/generate_models.py -- do not edit by hand."""
# flake8: noqa
import math
from math import sin, cos

import numpy as np

def mass_matrix(q, p):
    ft = q[1]
    f1t = q[2]
    f1s = q[3]
    f2t = q[4]
    f2s = q[5]
    thigh_len = p.thigh_len
    shank_len = p.shank_len
    thigh_mass = p.thigh_mass
    shank_mass = p.shank_mass
    torso_mass = p.torso_mass
    thigh_com = p.thigh_com
    shank_com = p.shank_com
    torso_com = p.torso_com
    thigh_inertia = p.thigh_inertia
    shank_inertia = p.shank_inertia
    torso_inertia = p.torso_inertia
    hip_mass = p.hip_mass
    x0 = 2*shank_mass
    x1 = 2*thigh_mass
    x2 = torso_com*torso_mass
    x3 = -x2*math.sin(ft)
    x4 = math.sin(f1t)
    x5 = shank_mass*thigh_len
    x6 = thigh_com*thigh_mass
    x7 = x5 + x6
    x8 = x4*x7
    x9 = math.sin(f1s)
    x10 = shank_com*shank_mass
    x11 = x10*x9
    x12 = x7*math.sin(f2t)
    x13 = x10*math.sin(f2s)
    x14 = math.cos(f1t)
    x15 = thigh_len*x14
    x16 = x2*math.cos(ft)
    x17 = -x15*x16
    x18 = math.cos(f1s)
    x19 = shank_len*x18
    x20 = -x16*x19
    x21 = thigh_len**2
    x22 = x14**2
    x23 = x21*x22
    x24 = shank_mass*x21 + thigh_com**2*thigh_mass + thigh_inertia
    x25 = x15*x19
    x26 = shank_com*x5
    x27 = x14*x19
    x28 = hip_mass*x25 + torso_mass*x25 + x1*x25 + x26*x4*x9 + x27*x5 - x27*x6
    x29 = x7*math.cos(f2t)
    x30 = -x15*x29
    x31 = math.cos(f2s)
    x32 = -x14*x26*x31
    x33 = x18**2
    x34 = shank_len**2*x33
    x35 = shank_com**2*shank_mass + shank_inertia
    x36 = -x19*x29
    x37 = -x10*x19*x31
    x38 = x26*math.cos(f2s - f2t)
    return np.array([hip_mass + torso_mass + x0 + x1, x3, x8, x11, x12, x13, x3, torso_com**2*torso_mass + torso_inertia, x17, x20, 0, 0, x8, x17, hip_mass*x23 - thigh_com*thigh_len*x1*x22 + torso_mass*x23 + x1*x23 + x24, x28, x30, x32, x11, x20, x28, hip_mass*x34 - shank_com*shank_len*x0*x33 + torso_mass*x34 + x0*x34 + x1*x34 + x35, x36, x37, x12, 0, x30, x36, x24, x38, x13, 0, x32, x37, x38, x35]).reshape(6, 6)

def bias(q, qd, p):
    ft = q[1]
    f1t = q[2]
    f1s = q[3]
    f2t = q[4]
    f2s = q[5]
    dft = qd[1]
    df1t = qd[2]
    df1s = qd[3]
    df2t = qd[4]
    df2s = qd[5]
    thigh_len = p.thigh_len
    shank_len = p.shank_len
    thigh_mass = p.thigh_mass
    shank_mass = p.shank_mass
    torso_mass = p.torso_mass
    thigh_com = p.thigh_com
    shank_com = p.shank_com
    torso_com = p.torso_com
    hip_mass = p.hip_mass
    g = p.g
    x0 = 2*g
    x1 = math.cos(f1s)
    x2 = df1s**2
    x3 = shank_com*shank_mass
    x4 = math.cos(f2s)
    x5 = df2s**2
    x6 = math.cos(ft)
    x7 = dft**2
    x8 = torso_com*torso_mass
    x9 = x7*x8
    x10 = shank_mass*thigh_len
    x11 = thigh_com*thigh_mass
    x12 = x10 + x11
    x13 = df1t**2
    x14 = math.cos(f1t)
    x15 = math.cos(f2t)
    x16 = df2t**2
    x17 = math.sin(ft)
    x18 = math.sin(f1s)
    x19 = shank_len*x18*x2
    x20 = math.sin(f1t)
    x21 = thigh_len*x13
    x22 = x20*x21
    x23 = g*x20
    x24 = math.sin(2*f1t)
    x25 = shank_com*x10
    x26 = x1*x20
    x27 = x14*x19
    x28 = math.sin(f2s)
    x29 = x25*x5
    x30 = thigh_len*x16
    x31 = math.sin(f2t)
    x32 = x14*x31
    x33 = thigh_len**2
    x34 = thigh_len*x27
    x35 = 2*thigh_mass
    x36 = x13*x33
    x37 = x24*x36
    x38 = (1/2)*x37
    x39 = shank_len*x1*x22
    x40 = math.sin(2*f1s)
    x41 = shank_len**2*x2*x40
    x42 = (1/2)*x41
    x43 = g*x31
    x44 = x15*x19
    x45 = math.sin(f2s - f2t)
    return np.array([g*hip_mass + g*torso_mass + shank_mass*x0 + thigh_mass*x0 + x1*x2*x3 + x12*x13*x14 + x12*x15*x16 + x3*x4*x5 - x6*x9, x8*(-g*x17 + x19*x6 + x22*x6), -hip_mass*x34 - hip_mass*x38 + shank_mass*x16*x32*x33 + thigh_len*x14*x17*x9 - thigh_mass*x37 - torso_mass*x34 - torso_mass*x38 + x10*x23 - x10*x27 + x11*x21*x24 + x11*x23 + x11*x27 + x11*x30*x32 + x14*x28*x29 + x2*x25*x26 - x34*x35, g*shank_com*shank_mass*x18 - hip_mass*x39 - hip_mass*x42 + shank_com*shank_len*shank_mass*x1*x28*x5 + shank_com*shank_len*shank_mass*x2*x40 + shank_com*shank_mass*thigh_len*x13*x14*x18 + shank_len*shank_mass*thigh_len*x1*x16*x31 + shank_len*thigh_com*thigh_mass*x1*x13*x20 + shank_len*thigh_com*thigh_mass*x1*x16*x31 + shank_len*torso_com*torso_mass*x1*x17*x7 - shank_len*x10*x13*x26 - shank_mass*x41 - thigh_mass*x41 - torso_mass*x39 - torso_mass*x42 - x35*x39, shank_mass*x15*x20*x36 + x10*x43 + x10*x44 + x11*x15*x22 + x11*x43 + x11*x44 - x29*x45, x3*(g*x28 + x19*x4 + x22*x4 + x30*x45)])

def potential(q, p):
    z = q[0]
    ft = q[1]
    f1t = q[2]
    f1s = q[3]
    f2t = q[4]
    f2s = q[5]
    thigh_len = p.thigh_len
    thigh_mass = p.thigh_mass
    shank_mass = p.shank_mass
    torso_mass = p.torso_mass
    thigh_com = p.thigh_com
    shank_com = p.shank_com
    torso_com = p.torso_com
    hip_mass = p.hip_mass
    g = p.g
    x0 = -z
    x1 = math.cos(f1t)
    x2 = math.cos(f2t)
    return g*(hip_mass*z - shank_mass*(shank_com*math.cos(f1s) + thigh_len*x1 + x0) - shank_mass*(shank_com*math.cos(f2s) + thigh_len*x2 + x0) - thigh_mass*(thigh_com*x1 + x0) - thigh_mass*(thigh_com*x2 + x0) + torso_mass*(torso_com*math.cos(ft) + z))

def base_x(q, p):
    f1t = q[2]
    f1s = q[3]
    thigh_len = p.thigh_len
    shank_len = p.shank_len
    return -shank_len*math.sin(f1s) - thigh_len*math.sin(f1t)

def base_x_grad(q, p):
    f1t = q[2]
    f1s = q[3]
    thigh_len = p.thigh_len
    shank_len = p.shank_len
    return np.array([0, 0, -thigh_len*math.cos(f1t), -shank_len*math.cos(f1s), 0, 0])

def base_x_hess(q, p):
    f1t = q[2]
    f1s = q[3]
    thigh_len = p.thigh_len
    shank_len = p.shank_len
    return np.array([0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, thigh_len*math.sin(f1t), 0, 0, 0, 0, 0, 0, shank_len*math.sin(f1s), 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0]).reshape(6, 6)

def contact_pos_c1(q, p):
    z = q[0]
    f1t = q[2]
    f1s = q[3]
    thigh_len = p.thigh_len
    shank_len = p.shank_len
    return np.array([0, -shank_len*math.cos(f1s) - thigh_len*math.cos(f1t) + z])

def contact_jac_c1(q, p):
    f1t = q[2]
    f1s = q[3]
    thigh_len = p.thigh_len
    shank_len = p.shank_len
    return np.array([0, 0, 0, 0, 0, 0, 1, 0, thigh_len*math.sin(f1t), shank_len*math.sin(f1s), 0, 0]).reshape(2, 6)

def contact_jacdot_qdot_c1(q, qd, p):
    f1t = q[2]
    f1s = q[3]
    df1t = qd[2]
    df1s = qd[3]
    thigh_len = p.thigh_len
    shank_len = p.shank_len
    return np.array([0, df1s**2*shank_len*math.cos(f1s) + df1t**2*thigh_len*math.cos(f1t)])

def contact_pos_c2(q, p):
    z = q[0]
    f1t = q[2]
    f1s = q[3]
    f2t = q[4]
    f2s = q[5]
    thigh_len = p.thigh_len
    shank_len = p.shank_len
    return np.array([-shank_len*math.sin(f1s) + shank_len*math.sin(f2s) - thigh_len*math.sin(f1t) + thigh_len*math.sin(f2t), -shank_len*math.cos(f2s) - thigh_len*math.cos(f2t) + z])

def contact_jac_c2(q, p):
    f1t = q[2]
    f1s = q[3]
    f2t = q[4]
    f2s = q[5]
    thigh_len = p.thigh_len
    shank_len = p.shank_len
    return np.array([0, 0, -thigh_len*math.cos(f1t), -shank_len*math.cos(f1s), thigh_len*math.cos(f2t), shank_len*math.cos(f2s), 1, 0, 0, 0, thigh_len*math.sin(f2t), shank_len*math.sin(f2s)]).reshape(2, 6)

def contact_jacdot_qdot_c2(q, qd, p):
    f1t = q[2]
    f1s = q[3]
    f2t = q[4]
    f2s = q[5]
    df1t = qd[2]
    df1s = qd[3]
    df2t = qd[4]
    df2s = qd[5]
    thigh_len = p.thigh_len
    shank_len = p.shank_len
    x0 = df2s**2*shank_len
    x1 = df2t**2*thigh_len
    return np.array([df1s**2*shank_len*math.sin(f1s) + df1t**2*thigh_len*math.sin(f1t) - x0*math.sin(f2s) - x1*math.sin(f2t), x0*math.cos(f2s) + x1*math.cos(f2t)])
