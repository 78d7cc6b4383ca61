"""Small toolkit used once to curate the bundled curve dataset.

Curves are long Weierstrass models [a1, a2, a3, a4, a6] over Q. The checks
here are independent of the Rust crate: brute-force point counts, Velu
isogenies from rational kernels, minimal/reduced models, and a numerical
functional-equation test that pins down the conductor.
"""

from fractions import Fraction as Fr
from math import gcd, isqrt
import itertools

import mpmath
from sympy import factorint, primerange


def invariants(a):
    a1, a2, a3, a4, a6 = a
    b2 = a1 * a1 + 4 * a2
    b4 = 2 * a4 + a1 * a3
    b6 = a3 * a3 + 4 * a6
    b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
    c4 = b2 * b2 - 24 * b4
    c6 = -b2 ** 3 + 36 * b2 * b4 - 216 * b6
    disc = -b2 * b2 * b8 - 8 * b4 ** 3 - 27 * b6 * b6 + 9 * b2 * b4 * b6
    return dict(b2=b2, b4=b4, b6=b6, b8=b8, c4=c4, c6=c6, disc=disc)


def j_invariant(a):
    inv = invariants(a)
    return Fr(inv["c4"] ** 3, inv["disc"])


def count_points(a, p):
    """#E(F_p) of the (possibly singular) reduction, including infinity."""
    a1, a2, a3, a4, a6 = (x % p for x in a)
    n = 1
    for x in range(p):
        rhs = (x * x * x + a2 * x * x + a4 * x + a6) % p
        for y in range(p):
            if (y * y + a1 * x * y + a3 * y - rhs) % p == 0:
                n += 1
    return n


def ap(a, p):
    return p + 1 - count_points(a, p)


def transform(a, u, r, s, t):
    """Apply the standard change of variables; returns Fractions."""
    a1, a2, a3, a4, a6 = (Fr(x) for x in a)
    u = Fr(u)
    a1n = (a1 + 2 * s) / u
    a2n = (a2 - s * a1 + 3 * r - s * s) / u ** 2
    a3n = (a3 + r * a1 + 2 * t) / u ** 3
    a4n = (a4 - s * a3 + 2 * r * a2 - (t + r * s) * a1 + 3 * r * r - 2 * s * t) / u ** 4
    a6n = (a6 + r * a4 + r * r * a2 + r ** 3 - t * a3 - t * t - r * t * a1) / u ** 6
    return [a1n, a2n, a3n, a4n, a6n]


def _integral(v):
    return all(x.denominator == 1 for x in v)


def minimal_model(a):
    """Globally minimal model by repeated descent at primes with p^12 | disc."""
    a = [int(x) for x in a]
    changed = True
    while changed:
        changed = False
        disc = invariants(a)["disc"]
        for p in factorint(abs(disc)):
            if abs(disc) % p ** 12:
                continue
            for r in range(p * p):
                for s in range(p):
                    for t in range(p ** 3):
                        b = transform(a, p, r, s, t)
                        if _integral(b):
                            a = [int(x) for x in b]
                            changed = True
                            break
                    if changed:
                        break
                if changed:
                    break
            if changed:
                break
    return reduced_model(a)


def reduced_model(a):
    """Cremona/Kraus normalisation a1, a3 in {0,1}, a2 in {-1,0,1}."""
    a1, a2, a3, a4, a6 = a
    # choose s with a1 + 2s in {0,1}
    s = (-(a1 - a1 % 2)) // 2
    b = transform(a, 1, 0, s, 0)
    a1n = int(b[0])
    # choose r with a2 - s a1 + 3r - s^2 in {-1,0,1}
    a2c = int(b[1])
    r = -round(a2c / 3)
    while not (-1 <= a2c + 3 * r - 0 <= 1):
        r += 1 if a2c + 3 * r < -1 else -1
    b = transform([int(x) for x in b], 1, r, 0, 0)
    # choose t with a3 + 2t in {0,1}
    a3c = int(b[2])
    t = (-(a3c - a3c % 2)) // 2
    b = transform([int(x) for x in b], 1, 0, 0, t)
    assert _integral(b)
    out = [int(x) for x in b]
    assert out[0] in (0, 1) and out[2] in (0, 1) and out[1] in (-1, 0, 1), out
    assert invariants(out)["c4"] == invariants(a)["c4"]
    return out


# ---------------------------------------------------------------- Q-points


def on_curve(a, P):
    a1, a2, a3, a4, a6 = a
    x, y = P
    return y * y + a1 * x * y + a3 * y == x ** 3 + a2 * x * x + a4 * x + a6


def neg(a, P):
    if P is None:
        return None
    a1, a2, a3, a4, a6 = a
    x, y = P
    return (x, -y - a1 * x - a3)


def add(a, P, Q):
    if P is None:
        return Q
    if Q is None:
        return P
    a1, a2, a3, a4, a6 = a
    x1, y1 = P
    x2, y2 = Q
    if x1 == x2 and y1 + y2 + a1 * x2 + a3 == 0:
        return None
    if x1 == x2:
        lam = (3 * x1 * x1 + 2 * a2 * x1 + a4 - a1 * y1) / (2 * y1 + a1 * x1 + a3)
    else:
        lam = (y2 - y1) / (x2 - x1)
    nu = y1 - lam * x1
    x3 = lam * lam + a1 * lam - a2 - x1 - x2
    y3 = -(lam + a1) * x3 - nu - a3
    return (x3, y3)


def two_torsion(a):
    """Rational points of order 2."""
    from sympy import Rational, Symbol, roots

    inv = invariants(a)
    X = Symbol("x")
    poly = 4 * X ** 3 + inv["b2"] * X ** 2 + 2 * inv["b4"] * X + inv["b6"]
    pts = []
    for rt in roots(poly, X, filter="Q"):
        x = Fr(int(Rational(rt).p), int(Rational(rt).q))
        y = -(a[0] * x + a[2]) / 2
        pts.append((x, y))
    return pts


def torsion_points(a, bound=2000):
    """Brute search for rational torsion points with x*4 integral."""
    found = []
    a1, a2, a3, a4, a6 = a
    for num in range(-4 * bound, 4 * bound + 1):
        x = Fr(num, 4)
        # solve y^2 + (a1 x + a3) y - rhs = 0
        bq = a1 * x + a3
        rhs = x ** 3 + a2 * x * x + a4 * x + a6
        d = bq * bq + 4 * rhs
        if d < 0:
            continue
        dn, dd = d.numerator, d.denominator
        sn, sd = isqrt(dn), isqrt(dd)
        if sn * sn != dn or sd * sd != dd:
            continue
        for sign in (1, -1):
            y = (-bq + sign * Fr(sn, sd)) / 2
            P = (x, y)
            o = order(a, P, 16)
            if o is not None and P not in [q for q, _ in found]:
                found.append((P, o))
    return found


def order(a, P, cap):
    Q = P
    for k in range(1, cap + 1):
        if Q is None:
            return k
        Q = add(a, Q, P)
        if k == cap:
            return None
    return None


def velu(a, kernel_gen):
    """Codomain of the isogeny whose kernel is generated by a rational point."""
    a1, a2, a3, a4, a6 = (Fr(x) for x in a)
    pts = []
    Q = kernel_gen
    while Q is not None:
        pts.append(Q)
        Q = add(a, Q, kernel_gen)
    # representatives: order-2 points, and one of each {Q, -Q}
    reps = []
    for Q in pts:
        nq = neg(a, Q)
        if nq == Q:
            reps.append((Q, True))
        elif nq not in [r for r, _ in reps]:
            reps.append((Q, False))
    t = Fr(0)
    w = Fr(0)
    for (x, y), two in reps:
        gx = 3 * x * x + 2 * a2 * x + a4 - a1 * y
        gy = -2 * y - a1 * x - a3
        tq = gx if two else 2 * gx - a1 * gy
        uq = gy * gy
        t += tq
        w += uq + x * tq
    b2 = a1 * a1 + 4 * a2
    out = [a1, a2, a3, a4 - 5 * t, a6 - b2 * t - 7 * w]
    # clear denominators by scaling (u = 1/k)
    k = 1
    while not all((x * Fr(k) ** w_).denominator == 1 for x, w_ in zip(out, (1, 2, 3, 4, 6))):
        k += 1
    out = [x * Fr(k) ** w_ for x, w_ in zip(out, (1, 2, 3, 4, 6))]
    return minimal_model([int(x) for x in out])


def twist_short(a, d):
    """Quadratic twist by d, returned as a minimal reduced model."""
    inv = invariants(a)
    A, B = -27 * inv["c4"], -54 * inv["c6"]
    return minimal_model([0, 0, 0, d * d * A, d ** 3 * B])


# ------------------------------------------------------- conductor check


def an_list(a, N, nmax):
    aps = {}
    for p in primerange(2, nmax + 1):
        aps[p] = ap(a, p) if p < 200 or N % p == 0 else None
    return aps


def coefficients(a, N, nmax):
    """a_n for n <= nmax from Euler factors of the minimal model."""
    an = [0] * (nmax + 1)
    an[1] = 1
    ppow = {}
    for p in primerange(2, nmax + 1):
        app = ap(a, p)
        vals = [1, app]
        pk = p
        while pk * p <= nmax:
            if N % p == 0:
                vals.append(app * vals[-1])
            else:
                vals.append(app * vals[-1] - p * vals[-2])
            pk *= p
        ppow[p] = vals
    for n in range(2, nmax + 1):
        f = factorint(n)
        v = 1
        for p, e in f.items():
            v *= ppow[p][e]
        an[n] = v
    return an


def functional_equation_residual(a, N, nmax=None):
    """max over test points of min_eps |g(1/t) - eps t^2 g(t)| / |g(t)|."""
    mpmath.mp.dps = 30
    if nmax is None:
        nmax = int(12 * isqrt(N) + 60)
    an = coefficients(a, N, nmax)
    sN = mpmath.sqrt(N)

    def g(t):
        return mpmath.fsum(an[n] * mpmath.e ** (-2 * mpmath.pi * n * t / sN) for n in range(1, nmax + 1))

    worst = 0
    sign = None
    for t in (mpmath.mpf("1.1"), mpmath.mpf("1.25"), mpmath.mpf("1.4")):
        lhs, rhs = g(1 / t), t * t * g(t)
        res = {e: abs(lhs - e * rhs) / abs(rhs) for e in (1, -1)}
        e = min(res, key=res.get)
        sign = e if sign is None else sign
        worst = max(worst, res[sign])
    return float(worst), sign


def traces_agree(a, b, primes):
    return all(ap(a, p) == ap(b, p) for p in primes)
