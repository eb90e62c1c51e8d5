#!/usr/bin/env python3
"""Reference values for the C++ test suite, computed with mpmath.

Every constant frozen into tests/unit/*.cpp comes from here, along routes
that never touch the library's own code paths: root isolation by bisection,
periods by mpmath's AGM and by direct quadrature of dx/sqrt(|cubic|), and
wp values through the Jacobi sn parameterization (rectangular lattices) or
through quadrature inversion pairs (rhombic ones).

Run:  python3 tests/oracle/gen_reference.py
"""

import mpmath as mp

mp.mp.dps = 40


def cubic(g2, g3):
    return lambda x: 4 * x**3 - g2 * x - g3


def roots_by_bisection(g2, g3, brackets):
    f = cubic(g2, g3)
    out = []
    for lo, hi in brackets:
        lo, hi = mp.mpf(lo), mp.mpf(hi)
        assert f(lo) * f(hi) < 0, (lo, hi)
        for _ in range(200):
            mid = (lo + hi) / 2
            if f(lo) * f(mid) <= 0:
                hi = mid
            else:
                lo = mid
        out.append((lo + hi) / 2)
    return out


def omega1_quad(g2, g3, e_top):
    f = lambda x: 2 / mp.sqrt(4 * x**3 - g2 * x - g3)
    return mp.quad(f, [e_top, e_top + 1, mp.inf])


def show(name, v):
    print(f"{name:34s} = {mp.nstr(v, 25)}")


print("== classical g2=4, g3=0 (lemniscatic) ==")
e = roots_by_bisection(4, 0, [(-1.5, -0.5), (-0.5, 0.5), (0.5, 1.5)])
for i, r in enumerate(e):
    show(f"root[{i}]", r)
w1 = mp.pi / mp.agm(mp.sqrt(2), 1)
show("omega1 (agm)", w1)
show("omega1 (quad)", omega1_quad(4, 0, e[2]))
show("gap integral (|omega2|)", mp.quad(lambda x: 2 / mp.sqrt(-(4 * x**3 - 4 * x)), [0, 0.5, 1]))
show("q = exp(-2 pi)", mp.exp(-2 * mp.pi))

# wp via Jacobi sn: wp(z) = e3 + (e1-e3)/sn(z*sqrt(e1-e3), m)^2 with
# descending e1 >= e2 >= e3 and m = (e2-e3)/(e1-e3).  Trustworthy on the real
# axis only; the shifted row is done by quadrature inversion instead (the
# complex quasi-period shuffle of sn is too easy to get wrong, and did go
# wrong here once: a doubling-law check caught it).
def wp_sn(z, e_desc):
    e1, e2, e3 = e_desc
    m = (e2 - e3) / (e1 - e3)
    u = z * mp.sqrt(e1 - e3)
    sn = mp.ellipfun("sn", u, m=m)
    return e3 + (e1 - e3) / sn**2


# bounded-row inversion: find X in (e_lo, e_hi) with
# int_{e_lo}^X dx/sqrt(cubic) = t * omega1.  The u^2 substitution is folded
# in analytically: cubic = 4 (x - e_lo)(x - e_mid)(x - e_top).
def wp_shifted_quad(t, e_roots, e_lo, e_hi, w1):
    e0, e1, e2 = e_roots
    target = t * w1

    def z_of(X):
        u_hi = mp.sqrt(X - e_lo)
        g = lambda u: 2 / mp.sqrt(4 * (e1 - e0 - u * u) * (e2 - e0 - u * u))
        return mp.quad(g, [0, u_hi])

    lo, hi = e_lo + mp.mpf("1e-30"), e_hi - mp.mpf("1e-30")
    for _ in range(140):
        mid = (lo + hi) / 2
        if z_of(mid) < target:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


e_desc = (e[2], e[1], e[0])
for t in ("0.1", "0.25", "0.4"):
    t = mp.mpf(t)
    show(f"wp(axis t={t})", mp.re(wp_sn(t * w1, e_desc)))
w2 = mp.mpc(0, 1) * mp.pi / mp.agm(mp.sqrt(2), mp.sqrt(2))  # sqrt(e3-e1), sqrt(e2-e1)
show("Im omega2 (agm)", mp.im(w2))
for t in ("0.1", "0.25"):
    t = mp.mpf(t)
    show(f"wp(shifted t={t})", wp_shifted_quad(t, e, e[0], e[1], w1))

print()
print("== E37a long (0,0,1,-1,0): g2=4, g3=-1 ==")
e = roots_by_bisection(4, -1, [(-2, -0.5), (0, 0.5), (0.5, 1.5)])
for i, r in enumerate(e):
    show(f"root[{i}]", r)
w1 = mp.pi / mp.agm(mp.sqrt(e[2] - e[0]), mp.sqrt(e[2] - e[1]))
show("omega1 (agm)", w1)
show("omega1 (quad)", omega1_quad(4, -1, e[2]))
show(
    "omega1 (bounded loop quad)",
    mp.quad(lambda x: 2 / mp.sqrt(4 * x**3 - 4 * x + 1), [e[0], (e[0] + e[1]) / 2, e[1]]),
)
w2im = mp.pi / mp.agm(mp.sqrt(e[2] - e[0]), mp.sqrt(e[1] - e[0]))
show("Im omega2 (agm)", w2im)
show(
    "Im omega2 (quad)",
    mp.quad(lambda x: 2 / mp.sqrt(-(4 * x**3 - 4 * x + 1)), [e[1], (e[1] + e[2]) / 2, e[2]]),
)
e_desc = (e[2], e[1], e[0])
for t in ("0.1", "0.3"):
    t = mp.mpf(t)
    show(f"wp(axis t={t})", mp.re(wp_sn(t * w1, e_desc)))
    show(f"wp(shifted t={t})", wp_shifted_quad(t, e, e[0], e[1], w1))
# torus coordinate of P=(0,0) -> canonical (0,1): bounded row, y>0 branch
zP = mp.quad(lambda x: 1 / mp.sqrt(4 * x**3 - 4 * x + 1), [e[0], -0.5, 0])
show("t of canonical (0,1)", zP / w1)

print()
print("== E37a short: y^2 = x^3 - 16x + 16, g2=64, g3=-64 ==")
e = roots_by_bisection(64, -64, [(-5, -4), (1, 1.2), (3, 3.5)])
for i, r in enumerate(e):
    show(f"root[{i}]", r)
w1 = mp.pi / mp.agm(mp.sqrt(e[2] - e[0]), mp.sqrt(e[2] - e[1]))
show("omega1 (agm)", w1)
show("omega1 (quad)", omega1_quad(64, -64, e[2]))

print()
print("== short a=0, b=1 (y^2 = x^3 + 1): g2=0, g3=-4, rhombic ==")
e = roots_by_bisection(0, -4, [(-1.5, -0.5)])
show("root[0]", e[0])
w1q = omega1_quad(0, -4, e[0])
show("omega1 (quad)", w1q)
A = mp.sqrt(3 * e[0] ** 2 - 0)
w1 = mp.pi / (mp.sqrt(A) * mp.agm(1, mp.sqrt(mp.mpf(1) / 2 + 3 * e[0] / (4 * A))))
show("omega1 (agm)", w1)
w2im = mp.pi / (2 * mp.sqrt(A) * mp.agm(1, mp.sqrt(mp.mpf(1) / 2 - 3 * e[0] / (4 * A))))
show("Im omega2 (agm)", w2im)
show("q (= -exp(-2 pi Im w2/w1))", -mp.exp(-2 * mp.pi * w2im / w1))
# inversion pairs (t, X): z(X) = int_X^inf dx/sqrt(4x^3+4), t = z/omega1
for X in ("-0.9", "0", "2", "25"):
    X = mp.mpf(X)
    z = mp.quad(lambda x: 1 / mp.sqrt(4 * x**3 + 4), [X, X + 1, mp.inf])
    show(f"t with wp(t)={X} (axis)", z / w1)
# Fig-style base point x=-0.406, y>0
x0 = mp.mpf("-0.406")
y0 = mp.sqrt(1 + x0**3)  # short-form y
show("y0 (short form) at x=-0.406", y0)
z = mp.quad(lambda x: 1 / mp.sqrt(4 * x**3 + 4), [x0, 1, mp.inf])
show("t of (x0, +y0)", 1 - z / w1)

print()
print("== misc ==")
show("phi frac check {8 phi}", 9 - 4 * mp.sqrt(5))
show("{5 sqrt2} dist", 5 * mp.sqrt(2) - 7)
show("1/(sqrt5*5)", 1 / (mp.sqrt(5) * 5))
show("agm(sqrt2,1)", mp.agm(mp.sqrt(2), 1))
show("int_0^inf x^-1/2/(1+x^2)", mp.pi / mp.sqrt(2))

print()
print("== diophantine ==")
# Weyl average in closed form: (1/N) sum_{n=1..N} e^{2 pi i n t}
#   = (1/N) e^{pi i (N+1) t} sin(pi N t) / sin(pi t)
def weyl_closed(t, N):
    t = mp.mpf(t)
    num = mp.sin(mp.pi * N * t)
    den = mp.sin(mp.pi * t)
    phase = mp.exp(mp.pi * 1j * (N + 1) * t)
    return phase * num / den / N

wa = weyl_closed(mp.sqrt(2), 10**5)
show("weyl sqrt2 N=1e5 re", wa.real)
show("weyl sqrt2 N=1e5 im", wa.imag)
show("weyl sqrt2 N=1e5 |avg|", abs(wa))
show("weyl sqrt2 bound 1/(N sin(pi d))", 1 / (10**5 * mp.sin(mp.pi * (mp.sqrt(2) - 1.0))))
wb = weyl_closed(mp.sqrt(2), 8)
show("weyl sqrt2 N=8 re", wb.real)
show("weyl sqrt2 N=8 im", wb.imag)
# dist {n phi} for the continued-fraction tests
phi = (1 + mp.sqrt(5)) / 2
for n in (8, 13, 21):
    d = mp.fabs(n * phi - mp.nint(n * phi))
    show(f"{{{n} phi}} * sqrt5 * {n}", d * mp.sqrt(5) * n)
