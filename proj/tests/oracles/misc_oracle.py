"""Reference values for unit tests outside the tree integrals (mpmath, 40 digits)."""
import mpmath as mp

mp.mp.dps = 40
PI = mp.pi

# u at r = e^{-1/4}, theta = pi/2
r, th = mp.e ** mp.mpf(-0.25), PI / 2
print("u(e^-1/4, pi/2) =", mp.nstr(-mp.e ** (mp.log(r) ** 2 - th * th) * mp.sin(2 * th * mp.log(r)), 25))

# radial derivative at theta = pi, by differentiating the closed form
f = lambda rr: -mp.e ** (mp.log(rr) ** 2 - PI * PI) * mp.sin(2 * PI * mp.log(rr))
print("u_r(1, pi) =", mp.nstr(mp.diff(f, 1), 25))

# Steiner tree with a = 0.5: legs found by a root finder on |A + t d| = 1
a = mp.mpf("0.5")
total = 1 - a
for ang in (PI / 3, -PI / 3):
    d = (mp.cos(ang), mp.sin(ang))
    t = mp.findroot(lambda t: (-a + t * d[0]) ** 2 + (t * d[1]) ** 2 - 1, 1)
    total += t
print("tree length a=0.5 =", mp.nstr(total, 25))

# unnormalised mollifier mass over the unit disc
m = mp.quad(lambda s: mp.e ** (-1 / (1 - s * s)) * 2 * PI * s, [0, 1])
print("bump mass (delta=1) =", mp.nstr(m, 25))

# radial Laplacian of exp(-1/(r - 1/n)) at n = 2, r = 0.8
n, rr = 2, mp.mpf("0.8")
g = lambda x: mp.e ** (-1 / (x - mp.mpf(1) / n))
print("cutoff laplacian n=2 r=0.8 =", mp.nstr(mp.diff(g, rr, 2) + mp.diff(g, rr) / rr, 25))
