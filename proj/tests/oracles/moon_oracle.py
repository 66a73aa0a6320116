"""High-precision reference values for the harmonic field u and its tree integrals.

Run once with mpmath (50 significant digits); the printed values are frozen
into tests/unit/test_trees.cpp and tests/acceptance/acceptance.cpp.
"""
import mpmath as mp

mp.mp.dps = 50
PI = mp.pi


def u(x1, x2):
    r = mp.sqrt(x1 * x1 + x2 * x2)
    th = mp.atan2(x2, x1)
    if th <= 0:
        th += 2 * PI
    lr = mp.log(r)
    return -mp.e ** (lr * lr - th * th) * mp.sin(2 * th * lr)


def leg_end(a, ang):
    d = (mp.cos(ang), mp.sin(ang))
    ad = -a * d[0]
    t = -ad + mp.sqrt(ad * ad - a * a + 1)
    return (-a + t * d[0], t * d[1]), t


def leg_integral(a, ang, weight_inv_rho):
    d = (mp.cos(ang), mp.sin(ang))
    _, L = leg_end(a, ang)
    if weight_inv_rho:
        f = lambda s: u(-a + s * d[0], s * d[1]) / s
    else:
        f = lambda s: u(-a + s * d[0], s * d[1])
    # split at many points; the integrand oscillates in log(r)
    pts = [mp.mpf(0)] + [L * mp.mpf(2) ** (-k) for k in range(60, 0, -1)] + [L]
    return mp.quad(f, pts)


def aa2_t(K):
    c = 1 / (2 * PI * mp.e ** (PI * PI))
    g = lambda t: -mp.e ** (t * t / (4 * PI * PI) + t / (2 * PI)) * mp.sin(t)
    pts = [-2 * PI * K + k * PI for k in range(2 * K + 1)]
    return c * mp.quad(g, pts)


def phi(a, x1, x2):
    ang = mp.atan2(x2, x1 + a) - PI / 3
    while ang < 0:
        ang += 2 * PI
    return ang


def arcs(a):
    p1, _ = leg_end(a, PI / 3)
    th1 = mp.atan2(p1[1], p1[0])
    th3 = 2 * PI - th1
    f1 = lambda th: phi(a, mp.cos(th), mp.sin(th)) * mp.e ** (-th * th) * 2 * th
    f3 = lambda th: (4 * PI / 3 - phi(a, mp.cos(th), mp.sin(th))) * mp.e ** (-th * th) * 2 * th
    return mp.quad(f1, [th1, PI]), mp.quad(f3, [PI, th3])


for K in range(1, 11):
    a = mp.e ** (-K)
    I2 = leg_integral(a, PI, False)
    I2t = aa2_t(K)
    I1 = leg_integral(a, PI / 3, False)
    I3 = leg_integral(a, 5 * PI / 3, False)
    J1 = leg_integral(a, PI / 3, True)
    J2 = leg_integral(a, PI, True)
    J3 = leg_integral(a, 5 * PI / 3, True)
    c1, c3 = arcs(a)
    lit_rhs = 2 * I2 + c1 + c3
    cor_rhs = 2 * J2 + c1 + c3
    print(f"K={K}")
    print(f"  aa2 (ds)          = {mp.nstr(I2, 20)}   via t: {mp.nstr(I2t, 20)}")
    print(f"  legs 1,3 (ds)     = {mp.nstr(I1, 20)} {mp.nstr(I3, 20)}")
    print(f"  tree (ds)         = {mp.nstr(I1 + I2 + I3, 20)}")
    print(f"  arcs              = {mp.nstr(c1, 20)} {mp.nstr(c3, 20)}")
    print(f"  literal rhs       = {mp.nstr(lit_rhs, 20)}  lhs={mp.nstr(I1 + I3, 20)}")
    print(f"  ds/rho: lhs={mp.nstr(J1 + J3, 20)} rhs={mp.nstr(cor_rhs, 20)} aa2/rho={mp.nstr(J2, 20)}")
