"""Generated by tools/gen_kernels.py; do not edit by hand."""
import numpy as np
from numpy import pi, sqrt


def kelvin(x, y, lam, mu):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    x1, x2, x3 = x[..., 0], x[..., 1], x[..., 2]
    y1, y2, y3 = y[..., 0], y[..., 1], y[..., 2]
    out = np.zeros(np.broadcast_shapes(x.shape[:-1], y.shape[:-1]) + (3, 3))
    t0 = x1 - y1
    t1 = t0**2
    t2 = x2 - y2
    t3 = t2**2
    t4 = x3 - y3
    t5 = t4**2
    t6 = t1 + t3 + t5
    t7 = lam + mu
    t8 = t7/t6
    t9 = lam + 3*mu
    t10 = (1/8)/(pi*mu*(lam + 2*mu))
    t11 = t10/sqrt(t6)
    t12 = t6**(-3/2)
    t13 = t0*t10*t12*t7
    t14 = t13*t2
    t15 = t13*t4
    t16 = t10*t12*t2*t4*t7
    out[..., 0, 0] = t11*(t1*t8 + t9)
    out[..., 0, 1] = t14
    out[..., 0, 2] = t15
    out[..., 1, 0] = t14
    out[..., 1, 1] = t11*(t3*t8 + t9)
    out[..., 1, 2] = t16
    out[..., 2, 0] = t15
    out[..., 2, 1] = t16
    out[..., 2, 2] = t11*(t5*t8 + t9)
    return out


def kelvin_d1(x, y, lam, mu):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    x1, x2, x3 = x[..., 0], x[..., 1], x[..., 2]
    y1, y2, y3 = y[..., 0], y[..., 1], y[..., 2]
    out = np.zeros(np.broadcast_shapes(x.shape[:-1], y.shape[:-1]) + (3, 3, 3))
    t0 = x1 - y1
    t1 = t0**2
    t2 = x2 - y2
    t3 = t2**2
    t4 = x3 - y3
    t5 = t4**2
    t6 = t1 + t3 + t5
    t7 = t6**(-1.0)
    t8 = t1*t7
    t9 = lam + mu
    t10 = 2*t9
    t11 = t8*t9
    t12 = lam + 3*mu
    t13 = pi**(-1.0)
    t14 = mu**(-1.0)
    t15 = (lam + 2*mu)**(-1.0)
    t16 = t0*t13*t14*t15
    t17 = (1/8)/t6**(3/2)
    t18 = t16*t17
    t19 = t13*t14*t15*t17
    t20 = t19*(3*t11 + t12)
    t21 = t19*t2
    t22 = t9*(3*t8 - 1)
    t23 = t21*t22
    t24 = t3*t7
    t25 = 3*t24
    t26 = t25 - 1
    t27 = t18*t9
    t28 = t26*t27
    t29 = (3/8)*t16*t2*t4*t9/t6**(5/2)
    t30 = t19*t4
    t31 = t22*t30
    t32 = t5*t7
    t33 = 3*t32
    t34 = t33 - 1
    t35 = t27*t34
    t36 = t12 + t25*t9
    t37 = t26*t30*t9
    t38 = t21*t34*t9
    t39 = t12 + t33*t9
    out[..., 0, 0, 0] = t18*(t10*(t8 - 1) + t11 + t12)
    out[..., 0, 0, 1] = t2*t20
    out[..., 0, 0, 2] = t20*t4
    out[..., 0, 1, 0] = t23
    out[..., 0, 1, 1] = t28
    out[..., 0, 1, 2] = t29
    out[..., 0, 2, 0] = t31
    out[..., 0, 2, 1] = t29
    out[..., 0, 2, 2] = t35
    out[..., 1, 0, 0] = t23
    out[..., 1, 0, 1] = t28
    out[..., 1, 0, 2] = t29
    out[..., 1, 1, 0] = t18*t36
    out[..., 1, 1, 1] = t21*(t10*(t24 - 1) + t12 + t24*t9)
    out[..., 1, 1, 2] = t30*t36
    out[..., 1, 2, 0] = t29
    out[..., 1, 2, 1] = t37
    out[..., 1, 2, 2] = t38
    out[..., 2, 0, 0] = t31
    out[..., 2, 0, 1] = t29
    out[..., 2, 0, 2] = t35
    out[..., 2, 1, 0] = t29
    out[..., 2, 1, 1] = t37
    out[..., 2, 1, 2] = t38
    out[..., 2, 2, 0] = t18*t39
    out[..., 2, 2, 1] = t21*t39
    out[..., 2, 2, 2] = t30*(t10*(t32 - 1) + t12 + t32*t9)
    return out


def kelvin_d2(x, y, lam, mu):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    x1, x2, x3 = x[..., 0], x[..., 1], x[..., 2]
    y1, y2, y3 = y[..., 0], y[..., 1], y[..., 2]
    out = np.zeros(np.broadcast_shapes(x.shape[:-1], y.shape[:-1]) + (3, 3, 3, 3))
    t0 = lam + mu
    t1 = x1 - y1
    t2 = t1**2
    t3 = x2 - y2
    t4 = t3**2
    t5 = x3 - y3
    t6 = t5**2
    t7 = t2 + t4 + t6
    t8 = t7**(-1.0)
    t9 = t2*t8
    t10 = 5*t9
    t11 = t7**(-2.0)
    t12 = 4*t11
    t13 = t0*t9
    t14 = lam + 3*mu
    t15 = t13 + t14
    t16 = t9 - 1
    t17 = 1/(pi*mu*(lam + 2*mu))
    t18 = (1/8)*t17
    t19 = t18/t7**(3/2)
    t20 = t7**(-5/2)
    t21 = t20*t3
    t22 = t18*t21
    t23 = 2*t0
    t24 = -lam + 5*mu
    t25 = t1*(13*t13 + t16*t23 + t24)
    t26 = t20*t5
    t27 = t18*t26
    t28 = -12*t0*t11*t2*t4
    t29 = 3*t13 + t14
    t30 = (3/8)*t17
    t31 = t21*t30
    t32 = t31*t5
    t33 = -12*t0*t11*t2*t6
    t34 = t10 - 3
    t35 = t1*t31
    t36 = t0*t35
    t37 = t34*t36
    t38 = t4*t8
    t39 = 3*t38
    t40 = -t39
    t41 = 15*t11*t2
    t42 = 1 - 3*t9
    t43 = t0*t19
    t44 = t43*(t4*t41 + t40 + t42)
    t45 = t0*t32
    t46 = t45*(t10 - 1)
    t47 = 5*t38
    t48 = t47 - 3
    t49 = t36*t48
    t50 = t1*t26*t30
    t51 = t0*t50
    t52 = t51*(t47 - 1)
    t53 = t6*t8
    t54 = 5*t53
    t55 = t36*(t54 - 1)
    t56 = t34*t51
    t57 = 3*t53
    t58 = -t57
    t59 = t43*(t41*t6 + t42 + t58)
    t60 = t54 - 3
    t61 = t51*t60
    t62 = t0*t38
    t63 = t14 + t62
    t64 = t0*t39 + t14
    t65 = t0*t47
    t66 = t38 - 1
    t67 = t23*t66
    t68 = 4*t0
    t69 = 3*lam + 9*mu
    t70 = t22*t5
    t71 = -12*t0*t11*t4*t6
    t72 = t45*t48
    t73 = t43*(15*t11*t4*t6 + t40 + t58 + 1)
    t74 = t45*t60
    t75 = t0*t53 + t14
    t76 = t0*t57 + t14
    t77 = t0*t54
    t78 = t53 - 1
    t79 = t23*t78 - t68*(1 - 2*t53) + t69 + t77
    out[..., 0, 0, 0, 0] = t19*(4*t0*t16*t2*t8 + 2*t0*(t1**4*t12 - t10 + 1) + 3*t15*t2*t8 - t15)
    out[..., 0, 0, 0, 1] = t22*t25
    out[..., 0, 0, 0, 2] = t25*t27
    out[..., 0, 0, 1, 1] = t19*(3*t15*t4*t8 - t28 - t29)
    out[..., 0, 0, 1, 2] = t32*(t0*t10 + t14)
    out[..., 0, 0, 2, 2] = t19*(3*t15*t6*t8 - t29 - t33)
    out[..., 0, 1, 0, 0] = t37
    out[..., 0, 1, 0, 1] = t44
    out[..., 0, 1, 0, 2] = t46
    out[..., 0, 1, 1, 1] = t49
    out[..., 0, 1, 1, 2] = t52
    out[..., 0, 1, 2, 2] = t55
    out[..., 0, 2, 0, 0] = t56
    out[..., 0, 2, 0, 1] = t46
    out[..., 0, 2, 0, 2] = t59
    out[..., 0, 2, 1, 1] = t52
    out[..., 0, 2, 1, 2] = t55
    out[..., 0, 2, 2, 2] = t61
    out[..., 1, 0, 0, 0] = t37
    out[..., 1, 0, 0, 1] = t44
    out[..., 1, 0, 0, 2] = t46
    out[..., 1, 0, 1, 1] = t49
    out[..., 1, 0, 1, 2] = t52
    out[..., 1, 0, 2, 2] = t55
    out[..., 1, 1, 0, 0] = t19*(3*t2*t63*t8 - t28 - t64)
    out[..., 1, 1, 0, 1] = t1*t22*(t65 + t67 - t68*(1 - 2*t38) + t69)
    out[..., 1, 1, 0, 2] = t50*(t14 + t65)
    out[..., 1, 1, 1, 1] = t19*(4*t0*t4*t66*t8 + 2*t0*(t12*t3**4 - t47 + 1) + 3*t4*t63*t8 - t63)
    out[..., 1, 1, 1, 2] = t70*(t24 + 13*t62 + t67)
    out[..., 1, 1, 2, 2] = t19*(3*t6*t63*t8 - t64 - t71)
    out[..., 1, 2, 0, 0] = t46
    out[..., 1, 2, 0, 1] = t52
    out[..., 1, 2, 0, 2] = t55
    out[..., 1, 2, 1, 1] = t72
    out[..., 1, 2, 1, 2] = t73
    out[..., 1, 2, 2, 2] = t74
    out[..., 2, 0, 0, 0] = t56
    out[..., 2, 0, 0, 1] = t46
    out[..., 2, 0, 0, 2] = t59
    out[..., 2, 0, 1, 1] = t52
    out[..., 2, 0, 1, 2] = t55
    out[..., 2, 0, 2, 2] = t61
    out[..., 2, 1, 0, 0] = t46
    out[..., 2, 1, 0, 1] = t52
    out[..., 2, 1, 0, 2] = t55
    out[..., 2, 1, 1, 1] = t72
    out[..., 2, 1, 1, 2] = t73
    out[..., 2, 1, 2, 2] = t74
    out[..., 2, 2, 0, 0] = t19*(3*t2*t75*t8 - t33 - t76)
    out[..., 2, 2, 0, 1] = t35*(t14 + t77)
    out[..., 2, 2, 0, 2] = t1*t27*t79
    out[..., 2, 2, 1, 1] = t19*(3*t4*t75*t8 - t71 - t76)
    out[..., 2, 2, 1, 2] = t70*t79
    out[..., 2, 2, 2, 2] = t19*(4*t0*t6*t78*t8 + 2*t0*(t12*t5**4 - t54 + 1) + 3*t6*t75*t8 - t75)
    out[..., 0, 0, 1, 0] = out[..., 0, 0, 0, 1]
    out[..., 0, 0, 2, 0] = out[..., 0, 0, 0, 2]
    out[..., 0, 0, 2, 1] = out[..., 0, 0, 1, 2]
    out[..., 0, 1, 1, 0] = out[..., 0, 1, 0, 1]
    out[..., 0, 1, 2, 0] = out[..., 0, 1, 0, 2]
    out[..., 0, 1, 2, 1] = out[..., 0, 1, 1, 2]
    out[..., 0, 2, 1, 0] = out[..., 0, 2, 0, 1]
    out[..., 0, 2, 2, 0] = out[..., 0, 2, 0, 2]
    out[..., 0, 2, 2, 1] = out[..., 0, 2, 1, 2]
    out[..., 1, 0, 1, 0] = out[..., 1, 0, 0, 1]
    out[..., 1, 0, 2, 0] = out[..., 1, 0, 0, 2]
    out[..., 1, 0, 2, 1] = out[..., 1, 0, 1, 2]
    out[..., 1, 1, 1, 0] = out[..., 1, 1, 0, 1]
    out[..., 1, 1, 2, 0] = out[..., 1, 1, 0, 2]
    out[..., 1, 1, 2, 1] = out[..., 1, 1, 1, 2]
    out[..., 1, 2, 1, 0] = out[..., 1, 2, 0, 1]
    out[..., 1, 2, 2, 0] = out[..., 1, 2, 0, 2]
    out[..., 1, 2, 2, 1] = out[..., 1, 2, 1, 2]
    out[..., 2, 0, 1, 0] = out[..., 2, 0, 0, 1]
    out[..., 2, 0, 2, 0] = out[..., 2, 0, 0, 2]
    out[..., 2, 0, 2, 1] = out[..., 2, 0, 1, 2]
    out[..., 2, 1, 1, 0] = out[..., 2, 1, 0, 1]
    out[..., 2, 1, 2, 0] = out[..., 2, 1, 0, 2]
    out[..., 2, 1, 2, 1] = out[..., 2, 1, 1, 2]
    out[..., 2, 2, 1, 0] = out[..., 2, 2, 0, 1]
    out[..., 2, 2, 2, 0] = out[..., 2, 2, 0, 2]
    out[..., 2, 2, 2, 1] = out[..., 2, 2, 1, 2]
    return out


def kelvin_d3_33(x, y, lam, mu):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    x1, x2, x3 = x[..., 0], x[..., 1], x[..., 2]
    y1, y2, y3 = y[..., 0], y[..., 1], y[..., 2]
    out = np.zeros(np.broadcast_shapes(x.shape[:-1], y.shape[:-1]) + (3, 3, 3))
    t0 = x1 - y1
    t1 = t0**2
    t2 = x2 - y2
    t3 = t2**2
    t4 = x3 - y3
    t5 = t4**2
    t6 = t1 + t3 + t5
    t7 = t6**(-1.0)
    t8 = t1*t7
    t9 = 2*t8
    t10 = t6**(-2.0)
    t11 = t10*t5
    t12 = t1*t11
    t13 = t5*t7
    t14 = 1 - 4*t13
    t15 = lam + mu
    t16 = (1/2)*t15
    t17 = t8 - 1
    t18 = (1/4)*t15
    t19 = t15*t8
    t20 = lam + 3*mu
    t21 = t19 + t20
    t22 = (15/8)*t13
    t23 = t13*t15
    t24 = (3/4)*t23
    t25 = t12*t15
    t26 = (9/8)*mu
    t27 = (3/8)*lam
    t28 = -t26 - t27
    t29 = pi**(-1.0)
    t30 = mu**(-1.0)
    t31 = (lam + 2*mu)**(-1.0)
    t32 = t29*t30*t31/t6**(5/2)
    t33 = t0*t32
    t34 = 5*t13
    t35 = -t21*t34 - 30*t25
    t36 = t2*t32
    t37 = (3/8)*t36
    t38 = 3*lam + 9*mu
    t39 = t32*t4
    t40 = (3/8)*t39
    t41 = 35*t12
    t42 = -t34
    t43 = t42 + 1
    t44 = t15*t37
    t45 = t44*(t41 + t43 - 5*t8)
    t46 = t3*t7
    t47 = 5*t46
    t48 = t11*t3
    t49 = 35*t48
    t50 = (3/8)*t33
    t51 = t15*t50
    t52 = t51*(t43 - t47 + t49)
    t53 = (15/8)*t0*t15*t2*t29*t30*t31*t4*(7*t13 - 3)/t6**(7/2)
    t54 = t42 + 3
    t55 = t15*t40
    t56 = t55*(t41 + t54 - 15*t8)
    t57 = t10*t4**4
    t58 = -30*t13 + 35*t57 + 3
    t59 = t51*t58
    t60 = t15*t46
    t61 = t20 + t60
    t62 = t15*t48
    t63 = -t34*t61 - 30*t62
    t64 = 2*t46
    t65 = t46 - 1
    t66 = t55*(-15*t46 + t49 + t54)
    t67 = t44*t58
    t68 = t13 - 1
    t69 = t43 + 4*t57
    t70 = t13*(t20 + t23)
    t71 = (1/8)*lam - 5/8*mu + (35/4)*t15*t57 + (1/4)*t15*t69 + (3/2)*t23*t68 - 53/8*t23 + (15/8)*t70
    out[..., 0, 0, 0] = t33*(t16*(12*t12 + t14 - t9) - t17*t18 + t17*t24 - 5/8*t19 + t21*t22 + t23*(t9 - 1) + (5/2)*t25 + t28)
    out[..., 0, 0, 1] = -t37*(5*t19 + t20 + t35)
    out[..., 0, 0, 2] = -t40*(15*t19 + t35 + t38)
    out[..., 0, 1, 0] = t45
    out[..., 0, 1, 1] = t52
    out[..., 0, 1, 2] = t53
    out[..., 0, 2, 0] = t56
    out[..., 0, 2, 1] = t53
    out[..., 0, 2, 2] = t59
    out[..., 1, 0, 0] = t45
    out[..., 1, 0, 1] = t52
    out[..., 1, 0, 2] = t53
    out[..., 1, 1, 0] = -t50*(t15*t47 + t20 + t63)
    out[..., 1, 1, 1] = t36*(t16*(t14 + 12*t48 - t64) - t18*t65 + t22*t61 + t23*(t64 - 1) + t24*t65 + t28 - 5/8*t60 + (5/2)*t62)
    out[..., 1, 1, 2] = -t40*(t38 + 15*t60 + t63)
    out[..., 1, 2, 0] = t53
    out[..., 1, 2, 1] = t66
    out[..., 1, 2, 2] = t67
    out[..., 2, 0, 0] = t56
    out[..., 2, 0, 1] = t53
    out[..., 2, 0, 2] = t59
    out[..., 2, 1, 0] = t53
    out[..., 2, 1, 1] = t66
    out[..., 2, 1, 2] = t67
    out[..., 2, 2, 0] = t33*t71
    out[..., 2, 2, 1] = t36*t71
    out[..., 2, 2, 2] = -3*t39*(-t15*(-3*t13 + 2*t57 + 1) + t18*t68 - t18*t69 + (3/8)*t23 - t24*t68 + t26 + t27 - 5/8*t70)
    return out


def mindlin(x, y, lam, mu):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    x1, x2, x3 = x[..., 0], x[..., 1], x[..., 2]
    y1, y2, y3 = y[..., 0], y[..., 1], y[..., 2]
    out = np.zeros(np.broadcast_shapes(x.shape[:-1], y.shape[:-1]) + (3, 3))
    t0 = x1 - y1
    t1 = t0**2
    t2 = x3 - y3
    t3 = t2**2
    t4 = x2 - y2
    t5 = t4**2
    t6 = t1 + t5
    t7 = t3 + t6
    t8 = t7**(-3/2)
    t9 = lam/(lam + mu)
    t10 = 2*t9 - 3
    t11 = x3 + y3
    t12 = t11**2
    t13 = t12 + t6
    t14 = t13**(-3/2)
    t15 = t10*t14
    t16 = sqrt(t13)
    t17 = t16**(-1.0)
    t18 = t11 - t16
    t19 = -t17/t18
    t20 = t9 - 2
    t21 = 2*t20*(t9 - 1)
    t22 = t21/t18
    t23 = 3/t13
    t24 = x3*y3
    t25 = 2*t24
    t26 = t14*t25
    t27 = t10/sqrt(t7)
    t28 = -t17 + t27
    t29 = (1/16)/(pi*mu*((1/2)*t9 - 1))
    t30 = 6*t24/t13**(5/2)
    t31 = t0*t29*t4*(t15 + t17*t21/t18**2 + t30 - t8)
    t32 = t2*t8
    t33 = t15*t2
    t34 = t11*t30 - t17*t22
    t35 = t29*(t32 - t33 + t34)
    t36 = t29*(-t32 + t33 + t34)
    out[..., 0, 0] = t29*(t1*t15 - t1*t8 - t22*(t1*t19 - 1) + t26*(t1*t23 - 1) + t28)
    out[..., 0, 1] = t31
    out[..., 0, 2] = -t0*t35
    out[..., 1, 0] = t31
    out[..., 1, 1] = t29*(t15*t5 - t22*(t19*t5 - 1) + t26*(t23*t5 - 1) + t28 - t5*t8)
    out[..., 1, 2] = -t35*t4
    out[..., 2, 0] = t0*t36
    out[..., 2, 1] = t36*t4
    out[..., 2, 2] = -t29*(t12*t30 - t14*(t10*t12 + t25) + t17*(t10 + 2*t20**2) - t27 + t3*t8)
    return out


def mindlin_d1(x, y, lam, mu):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    x1, x2, x3 = x[..., 0], x[..., 1], x[..., 2]
    y1, y2, y3 = y[..., 0], y[..., 1], y[..., 2]
    out = np.zeros(np.broadcast_shapes(x.shape[:-1], y.shape[:-1]) + (3, 3, 3))
    t0 = x1 - y1
    t1 = x3 + y3
    t2 = t1**2
    t3 = t0**2
    t4 = x2 - y2
    t5 = t4**2
    t6 = t3 + t5
    t7 = t2 + t6
    t8 = t7**(-3/2)
    t9 = t0*t8
    t10 = x3 - y3
    t11 = t10**2
    t12 = t11 + t6
    t13 = t12**(-3/2)
    t14 = 2*t13
    t15 = t0**3
    t16 = t12**(-5/2)
    t17 = 3*t16
    t18 = lam/(lam + mu)
    t19 = 2*t18 - 3
    t20 = t13*t19
    t21 = t7**(-5/2)
    t22 = 3*t21
    t23 = t19*t22
    t24 = t7**(-1.0)
    t25 = t21*x3
    t26 = 12*t25*y3
    t27 = 3*t24
    t28 = t27*t3 - 1
    t29 = 6*t25
    t30 = t29*y3
    t31 = t28*t30
    t32 = sqrt(t7)
    t33 = t1 - t32
    t34 = -t33
    t35 = t34**(-1.0)
    t36 = t32**(-1.0)
    t37 = t3*t36
    t38 = 2*t36
    t39 = t18 - 1
    t40 = t18 - 2
    t41 = t39*t40
    t42 = t41/t33**2
    t43 = t38*t42
    t44 = t43*(t35*t37 - 1)
    t45 = -t0
    t46 = t24*t35
    t47 = t33**(-1.0)
    t48 = t41*t47
    t49 = 2*t48
    t50 = t35*t49
    t51 = 1/(pi*mu)
    t52 = (1/16)*t51/((1/2)*t18 - 1)
    t53 = t17*t3
    t54 = t23*t3
    t55 = x3*y3/t7**(7/2)
    t56 = 12*t55
    t57 = t3*t56
    t58 = 2*t42
    t59 = t58*(-t24*t47 + t8)
    t60 = t20 - t8
    t61 = t4*t52
    t62 = 2*x3
    t63 = t62*t8
    t64 = t1*t36 - 1
    t65 = t58*t64
    t66 = t43*(t1*t24 - t47*t64)
    t67 = t1*t8
    t68 = t10*t20
    t69 = -t67 - t68
    t70 = 30*t55
    t71 = t33**(-3.0)
    t72 = 2*t8
    t73 = 3*t16 - t23 + 4*t24*t39*t40*t71 - t42*t72 - t70
    t74 = -t19
    t75 = t30 - t74*t8 - 1/(t10**2 + t6)**(3/2) + t38*t39*t40/t34**2
    t76 = (1/8)*t51/t40
    t77 = -t4*t76*(t3*t73 + t75)
    t78 = -t0*t76*(t5*t73 + t75)
    t79 = t1*t23
    t80 = t10*t17
    t81 = t1*t70
    t82 = t80 + t81
    t83 = t0*t61
    t84 = t83*(6*t21*x3 + 4*t36*t39*t40*t64*t71 - t58*t67 - t79 - t82)
    t85 = t24*t58 - t48*t72
    t86 = -3*t10*t19*t21 + t82 + t85
    t87 = -t86
    t88 = t38*t48
    t89 = t1*t30
    t90 = t10*t13
    t91 = t19*t8
    t92 = -t10*t91 + t90
    t93 = -t88 + t89 + t92
    t94 = -t83*t86
    t95 = t11*t17
    t96 = t1*t29
    t97 = t2*t70
    t98 = t43*t64
    t99 = t49*t67
    t100 = t10*t79 - t13 + t91
    t101 = t100 + t30 + t95 + t96 - t97 - t98 + t99
    t102 = t0*t52
    t103 = t27*t5 - 1
    t104 = t103*t30
    t105 = t5*t56
    t106 = t36*t5
    t107 = t43*(t106*t35 - 1)
    t108 = t4**3
    t109 = -t4
    t110 = t10*t23 - t80 + t81 + t85
    t111 = t88 - t89 + t92
    t112 = t110*t83
    t113 = t95 + t97
    t114 = t100 + t113 - t30 - t96 + t98 - t99
    t115 = t19 + 2*t40**2
    t116 = t62*y3
    t117 = t113 + t115*t8 - t20 - t22*(t116 + t19*t2)
    out[..., 0, 0, 0] = t52*(t0*t14 + t0*t20 + t0*t31 + t0*t44 - t15*t17 + t15*t23 - 2*t19*t9 + t26*(t15*t24 - x1 + y1) - t50*(t15*t8 - t3*t45*t46 + t38*t45) - t9)
    out[..., 0, 0, 1] = t61*(t3*t59 + t31 + t44 - t53 + t54 + t57 + t60)
    out[..., 0, 0, 2] = -t52*(t1*t31 + t1*t54 + t1*t57 + t10*t53 - t28*t63 + t3*t66 - t65*(t37*t47 + 1) + t69)
    out[..., 0, 1, 0] = t77
    out[..., 0, 1, 1] = t78
    out[..., 0, 1, 2] = t84
    out[..., 0, 2, 0] = t76*(t3*t87 + t93)
    out[..., 0, 2, 1] = t94
    out[..., 0, 2, 2] = -t101*t102
    out[..., 1, 0, 0] = t77
    out[..., 1, 0, 1] = t78
    out[..., 1, 0, 2] = t84
    out[..., 1, 1, 0] = t102*(t104 + t105 + t107 - t17*t5 + t23*t5 + t5*t59 + t60)
    out[..., 1, 1, 1] = t52*(t104*t4 + t107*t4 - t108*t17 + t108*t23 + t14*t4 + t20*t4 + t26*(t108*t24 - x2 + y2) - t4*t8 - 2*t4*t91 - t50*(t108*t8 + t109*t38 - t109*t46*t5))
    out[..., 1, 1, 2] = -t52*(t1*t105 - t103*t63 + t103*t89 + t5*t66 + t5*t79 + t5*t80 - t65*(t106*t47 + 1) + t69)
    out[..., 1, 2, 0] = t94
    out[..., 1, 2, 1] = t76*(t5*t87 + t93)
    out[..., 1, 2, 2] = -t101*t61
    out[..., 2, 0, 0] = t76*(t110*t3 + t111)
    out[..., 2, 0, 1] = t112
    out[..., 2, 0, 2] = -t102*t114
    out[..., 2, 1, 0] = t112
    out[..., 2, 1, 1] = t76*(t110*t5 + t111)
    out[..., 2, 1, 2] = -t114*t61
    out[..., 2, 2, 0] = -t102*t117
    out[..., 2, 2, 1] = -t117*t61
    out[..., 2, 2, 2] = t52*(t1**3*t70 - t1*t22*(t116 - t2*t74) - t1*t26 - t10**3*t17 + t115*t67 - t2*t29 + t68 + t72*(-t1*t74 + x3) + 2*t90)
    return out


def mindlin_d1_3(x, y, lam, mu):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    x1, x2, x3 = x[..., 0], x[..., 1], x[..., 2]
    y1, y2, y3 = y[..., 0], y[..., 1], y[..., 2]
    out = np.zeros(np.broadcast_shapes(x.shape[:-1], y.shape[:-1]) + (3, 3, 3))
    t0 = x3 + y3
    t1 = x1 - y1
    t2 = t0**2
    t3 = t1**2
    t4 = x2 - y2
    t5 = t4**2
    t6 = t3 + t5
    t7 = t2 + t6
    t8 = t7**(-5/2)
    t9 = x3 - y3
    t10 = t9**2
    t11 = t10 + t6
    t12 = t11**(-5/2)
    t13 = t1**3
    t14 = t7**(-9/2)
    t15 = x3*y3
    t16 = t14*t15
    t17 = t0*t16
    t18 = 36*t17
    t19 = t11**(-7/2)
    t20 = 15*t19
    t21 = t20*t9
    t22 = lam/(lam + mu)
    t23 = 2*t22 - 3
    t24 = t0*t23
    t25 = t7**(-7/2)
    t26 = 15*t25
    t27 = t24*t26
    t28 = t7**(-1.0)
    t29 = t13*t28
    t30 = -x1 + y1
    t31 = t29 + t30
    t32 = 3*t28
    t33 = t3*t32 - 1
    t34 = t25*x3
    t35 = t0*t34*y3
    t36 = 36*t35
    t37 = 24*t0
    t38 = t34*t37
    t39 = t38*y3
    t40 = 30*t34
    t41 = t40*y3
    t42 = t0*t41
    t43 = t33*t42
    t44 = sqrt(t7)
    t45 = t0 - t44
    t46 = -t45
    t47 = t46**(-1.0)
    t48 = t44**(-1.0)
    t49 = t3*t48
    t50 = t47*t49 - 1
    t51 = t7**(-3/2)
    t52 = 2*t0
    t53 = t51*t52
    t54 = t45**(-2.0)
    t55 = t22 - 1
    t56 = t22 - 2
    t57 = t55*t56
    t58 = t54*t57
    t59 = t53*t58
    t60 = t50*t59
    t61 = t0*t48 - 1
    t62 = t45**(-3.0)
    t63 = t0*t28
    t64 = -t61
    t65 = t47*t64 - t63
    t66 = -t1
    t67 = 2*t48
    t68 = t66*t67
    t69 = t13*t51
    t70 = t28*t47
    t71 = t3*t66
    t72 = 2*t54
    t73 = t47*t57
    t74 = t61*t72*t73
    t75 = 3*t8
    t76 = t0*t75
    t77 = t7**(-2.0)
    t78 = t47*t52*t77
    t79 = t47*t64
    t80 = 2*t28*t64/t46**2
    t81 = t45**(-1.0)
    t82 = 2*t81
    t83 = t73*t82
    t84 = 1/(pi*mu)
    t85 = t84/((1/2)*t22 - 1)
    t86 = (1/16)*t85
    t87 = t8*x3
    t88 = 6*t87
    t89 = t33*t88
    t90 = 12*t34
    t91 = t3*t90
    t92 = 120*t3
    t93 = t28*t61
    t94 = 2*t0*t77*t81 + t51*t61*t81 - t72*t93 - t76
    t95 = t57*t72
    t96 = t3*t95
    t97 = t28*t81
    t98 = 2*t57*t61*t62*(t51 - t97)
    t99 = 4*t62
    t100 = t57*t61*t99
    t101 = t100*t48
    t102 = t65*t70
    t103 = 3*t12
    t104 = t103*t9
    t105 = t104*t23 + t76
    t106 = t4*t86
    t107 = t23*t75
    t108 = t10*t20
    t109 = t2*t23
    t110 = t109*t26
    t111 = 12*t87
    t112 = t0*t111
    t113 = t16*t2
    t114 = t2*t41
    t115 = t49*t81 + 1
    t116 = t61**2
    t117 = t116*t57
    t118 = t117*t99
    t119 = -t2*t28 + 1
    t120 = t54*t67
    t121 = t2*t75
    t122 = t121 - t51
    t123 = 2*t0*t51*t61*t81 - t116*t120 - t119*t97 - t122
    t124 = t120*t57
    t125 = t119*t124
    t126 = t100*(-t61*t81 + t63)
    t127 = t11**(-3/2)
    t128 = t10*t103
    t129 = t127*t23 - t128*t23
    t130 = t122 + t129
    t131 = 210*t16
    t132 = t0*t8
    t133 = 6*t132
    t134 = 12/t45**4
    t135 = t57*t93
    t136 = -t0*t131 + 8*t0*t55*t56*t62*t77 - t133*t58 - t134*t135 - t21 + 30*t25*x3 - t27 + 4*t51*t55*t56*t61*t62
    t137 = t24*t75
    t138 = -t101 + t104 + t137 + t42 + t59 - t88
    t139 = (1/8)*t84/t56
    t140 = t139*t4*(t136*t3 + t138)
    t141 = t1*t139*(t136*t5 + t138)
    t142 = 60*t34
    t143 = t51*t57
    t144 = t143*t72
    t145 = t119*t28
    t146 = 6*t8
    t147 = t146*t2
    t148 = t0*t143*t61
    t149 = t131*t2
    t150 = t149 - t41
    t151 = t1*t106
    t152 = t151*(-t0*t142 + t103 - t107 - t108 + t110 + t117*t134*t48 - t144 + t145*t57*t99 + t147*t58 - 8*t148*t62 + t150)
    t153 = t0*t40
    t154 = 4*t0*t58*t77
    t155 = t144*t61
    t156 = t135*t99
    t157 = t57*t81
    t158 = t133*t157
    t159 = t107 + t108 - 3*t12 + t27*t9
    t160 = -t149 + t153 - t154 - t155 + t156 + t158 + t159 + t41
    t161 = -t160
    t162 = t88*y3
    t163 = t0*t88
    t164 = t124*t61
    t165 = t157*t53
    t166 = t23*t51
    t167 = -t127 + t128 + t137*t9 + t166
    t168 = -t114 + t162 + t163 - t164 + t165 + t167
    t169 = -t151*t160
    t170 = t142*t2
    t171 = t0**3
    t172 = 90*t35
    t173 = t145*t95
    t174 = t118*t48
    t175 = t147*t157
    t176 = t9**3
    t177 = t12*t9
    t178 = -t107*t9 + t110*t9 + t146*t24 - t176*t20 + 9*t177
    t179 = 4*t0*t51*t54*t55*t56*t61 + 210*t14*t171*x3*y3 - t170 - t172 - t173 - t174 - t175 - t178 + 2*t51*t55*t56*t81 + 12*t8*x3
    t180 = t1*t86
    t181 = t32*t5 - 1
    t182 = t5*t90
    t183 = 120*t5
    t184 = t181*t42
    t185 = t5*t95
    t186 = t48*t5
    t187 = t186*t47 - 1
    t188 = t187*t59
    t189 = t4**3
    t190 = t189*t28
    t191 = -x2 + y2
    t192 = t190 + t191
    t193 = -t4
    t194 = t193*t67
    t195 = t189*t51
    t196 = t193*t5
    t197 = t186*t81 + 1
    t198 = t150 - t153 + t154 + t155 - t156 - t158 + t159
    t199 = -t198
    t200 = t114 - t162 - t163 + t164 - t165 + t167
    t201 = -t151*t198
    t202 = t111 + t131*t171 + t143*t82 + 4*t148*t54 - t170 - t172 - t173 - t174 - t175 + t178
    t203 = t2*t34
    t204 = -t23
    t205 = 2*t15
    t206 = t23 + 2*t56**2
    t207 = (3/16)*t85*(-5*t0*t25*(-t2*t204 + t205) + t132*t206 + 70*t16*t171 - 5*t176*t19 + t177*t23 + 2*t177 - 10*t203 - 20*t35 + 2*t8*(-t0*t204 + x3))
    t208 = t109 + t205
    out[..., 0, 0, 0] = t86*(6*t0*t1*t23*t8 + 3*t0*t1*t8 + 3*t1*t12*t23*t9 + 6*t1*t12*t9 + 6*t1*t33*t8*x3 - t1*t43 + 4*t1*t48*t50*t55*t56*t61*t62 - t1*t60 - t13*t18 - t13*t21 - t13*t27 + 2*t13*t28*t47*t54*t55*t56*t65 - t31*t36 + 12*t31*t8*x3 - t39*(2*t29 + t30) - t74*(t68 + t69 - t70*t71) - t83*(-t13*t76 - t53*t66 + t68*t79 + t69*t79 + t71*t78 - t71*t80))
    out[..., 0, 0, 1] = t106*(t101*t50 + t102*t96 + t105 - t17*t92 - t21*t3 - t27*t3 + t3*t98 - t43 - t60 + t89 + t91 + t94*t96)
    out[..., 0, 0, 2] = -t86*(-t103*t3 + t107*t3 + t108*t3 - t110*t3 + t112*t33 - t113*t92 - t114*t33 - t115*t118 - t115*t125 + t123*t96 + t126*t49 + t130 + t3*t38 + t89*y3 + t91*y3)
    out[..., 0, 1, 0] = t140
    out[..., 0, 1, 1] = t141
    out[..., 0, 1, 2] = t152
    out[..., 0, 2, 0] = t139*(t161*t3 + t168)
    out[..., 0, 2, 1] = t169
    out[..., 0, 2, 2] = -t179*t180
    out[..., 1, 0, 0] = t140
    out[..., 1, 0, 1] = t141
    out[..., 1, 0, 2] = t152
    out[..., 1, 1, 0] = t180*(t101*t187 + t102*t185 + t105 - t17*t183 + t181*t88 + t182 - t184 + t185*t94 - t188 - t21*t5 - t27*t5 + t5*t98)
    out[..., 1, 1, 1] = t86*(6*t0*t23*t4*t8 + 3*t0*t4*t8 + 3*t12*t23*t4*t9 + 6*t12*t4*t9 - t18*t189 + 6*t181*t4*t8*x3 - t184*t4 + 4*t187*t4*t48*t55*t56*t61*t62 - t188*t4 - t189*t21 - t189*t27 + 2*t189*t28*t47*t54*t55*t56*t65 - t192*t36 + 12*t192*t8*x3 - t39*(2*t190 + t191) - t74*(t194 + t195 - t196*t70) - t83*(-t189*t76 - t193*t53 + t194*t79 + t195*t79 + t196*t78 - t196*t80))
    out[..., 1, 1, 2] = -t86*(-t103*t5 + t107*t5 + t108*t5 - t110*t5 + t112*t181 - t113*t183 - t114*t181 - t118*t197 + t123*t185 - t125*t197 + t126*t186 + t130 + t162*t181 + t182*y3 + t38*t5)
    out[..., 1, 2, 0] = t169
    out[..., 1, 2, 1] = t139*(t161*t5 + t168)
    out[..., 1, 2, 2] = -t106*t179
    out[..., 2, 0, 0] = t139*(t199*t3 + t200)
    out[..., 2, 0, 1] = t201
    out[..., 2, 0, 2] = t180*t202
    out[..., 2, 1, 0] = t201
    out[..., 2, 1, 1] = t139*(t199*t5 + t200)
    out[..., 2, 1, 2] = t106*t202
    out[..., 2, 2, 0] = t1*t207
    out[..., 2, 2, 1] = t207*t4
    out[..., 2, 2, 2] = -t86*(t0**4*t131 - 15*t10*t12 + t111*y3 + t121*t206 + 2*t127 + t129 + 12*t132*(t24 + x3) - t142*t171 - 2*t166 - t2*t208*t26 + t20*t9**4 - 150*t203*y3 - t206*t51 + t208*t75 + t37*t87)
    return out
