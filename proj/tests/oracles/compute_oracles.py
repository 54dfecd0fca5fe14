"""Independent reference values frozen into the C++ unit tests.

Everything here is computed with numpy/scipy using methods unrelated to
the library's adaptive quadrature (tensor grids, plain Gauss-Legendre on
fixed panels, direct Poisson sums). Run once; paste the printed values.
"""
import math

import numpy as np
from scipy.special import digamma, gammaincc
from scipy.stats import poisson


def upsilon_midpoint(r_w, s, R, alpha, n=2000):
    """Midpoint tensor grid for (1/(pi R^2)) int int r dphi dr / (1 + s r^a d^-a)."""
    r = (np.arange(n) + 0.5) * R / n
    w = (np.arange(n) + 0.5) * 2 * np.pi / n
    rr, ww = np.meshgrid(r, w, indexing="ij")
    d2 = r_w**2 + rr**2 + 2 * r_w * rr * np.cos(ww)
    f = rr / (1 + s * rr**alpha * d2 ** (-alpha / 2))
    return f.sum() * (R / n) * (2 * np.pi / n) / (np.pi * R**2)


def one_minus_upsilon_gl(r_w, s, R, alpha, n=240):
    """1 - Upsilon via Gauss-Legendre, radial split at r_w, omega on [0, pi] x2."""
    x, wt = np.polynomial.legendre.leggauss(n)
    pieces = [(0.0, R)] if not (0 < r_w < R) else [(0.0, r_w), (r_w, R)]
    # omega split near pi where the distance can vanish
    om_pieces = [(0.0, 0.9 * np.pi), (0.9 * np.pi, 0.99 * np.pi), (0.99 * np.pi, np.pi)]
    total = 0.0
    for a, b in pieces:
        r = 0.5 * (b - a) * x + 0.5 * (a + b)
        wr = 0.5 * (b - a) * wt
        for oa, ob in om_pieces:
            om = 0.5 * (ob - oa) * x + 0.5 * (oa + ob)
            wo = 0.5 * (ob - oa) * wt
            rr, ww = np.meshgrid(r, om, indexing="ij")
            d2 = r_w**2 + rr**2 + 2 * r_w * rr * np.cos(ww)
            xx = s * rr**alpha * d2 ** (-alpha / 2)
            f = rr * xx / (1 + xx)
            total += 2 * (wr[:, None] * wo[None, :] * f).sum()
    return total / (np.pi * R**2)


def rrs_exact_laplace(s, lam, R, alpha, c):
    """exp(2 pi lam int r (sum c_u Ups^u - 1) dr) on geometric GL panels + power tail."""
    x, wt = np.polynomial.legendre.leggauss(40)
    edges = [0.0, R / 4, R / 2, R, 1.5 * R, 2 * R]
    while edges[-1] < 2e5:
        edges.append(edges[-1] * 1.5)
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        r = 0.5 * (b - a) * x + 0.5 * (a + b)
        vals = []
        for rw in r:
            om = one_minus_upsilon_gl(rw, s, R, alpha, n=120 if rw > 3 * R else 240)
            vals.append(-sum(cu * (1 - (1 - om) ** u) for u, cu in enumerate(c)))
        total += (0.5 * (b - a) * wt * r * np.array(vals)).sum()
    cbar = sum(u * cu for u, cu in enumerate(c))
    m_alpha = 2 * R**alpha / (alpha + 2)
    rmax = edges[-1]
    total -= cbar * s * m_alpha * rmax ** (2 - alpha) / (alpha - 2)
    return math.exp(2 * math.pi * lam * total)


def occupancy_mixture(N, L, m):
    c = [0.0] * (L + 1)
    kmax = int(m + 40 * math.sqrt(m + 1) + 50)
    for k in range(kmax):
        p = poisson.pmf(k, m)
        if k >= N * L:
            c[L] += p
            continue
        f, fr = k // N, k / N - k // N
        c[f] += (1 - fr) * p
        if fr > 0:
            c[f + 1] += fr * p
    return c


def kmax(m, tau):
    k = 0
    while not gammaincc(k + 1, m) > 1 - tau:
        k += 1
    return k


if __name__ == "__main__":
    print("upsilon(100,1,40,3.6) midpoint2000 =", repr(upsilon_midpoint(100, 1, 40, 3.6)))
    print("1-upsilon GL (100,1,40,3.6)        =", repr(one_minus_upsilon_gl(100, 1, 40, 3.6)))
    print("1-upsilon GL (20,5,40,3.6)         =", repr(one_minus_upsilon_gl(20, 5, 40, 3.6)))
    print("occupancy(4,2,6) =", [repr(v) for v in occupancy_mixture(4, 2, 6)])
    print("occupancy(30,2,60) =", [repr(v) for v in occupancy_mixture(30, 2, 60)])
    print("kmax(30,1e-5) =", kmax(30, 1e-5), " kmax(60,1e-5) =", kmax(60, 1e-5))
    a1 = 2 * (digamma(41) - digamma(31)) / (3 * digamma(41) - digamma(1) - 2 * digamma(31))
    print("a1(i=1,K=40,N=30,theta=1,mu=0,delta=1) =", repr(a1))
    lam = 10**-4.4
    for alpha in (3.0, 3.6, 5.0):
        print("rrs_exact c2=1 s=1 alpha", alpha, "=", repr(rrs_exact_laplace(1.0, lam, 40, alpha, [0, 0, 1])))
    print("rrs_exact c1=1 s=1 alpha 3.6 =", repr(rrs_exact_laplace(1.0, lam, 40, 3.6, [0, 1, 0])))
    c_default = occupancy_mixture(30, 2, 60)
    for s in (1.0, 2.0):
        print("rrs_exact default pmf s", s, "=", repr(rrs_exact_laplace(s, lam, 40, 3.6, c_default)))
