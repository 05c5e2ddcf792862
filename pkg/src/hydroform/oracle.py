"""
Brute-force checks that do not go through the P coefficients.

* ``radial_quadrature`` integrates the radial integral directly with
  composite Gauss-Legendre panels at working precision.
* ``s3_quadrature`` integrates a function over the unit 3-sphere with a
  product rule that is exact for low-degree polynomials.
* ``expansion_check`` compares q^-4 C_nlm(x) with the truncated multipole
  expansion in harmonics of y.
* ``laplace_fd_check`` applies a central-difference 4D Laplacian to the
  two harmonic functions p^-2 C_n(y) and q^-2 C_n(x).
"""
from collections import namedtuple
from functools import lru_cache
import math

import gmpy2
from gmpy2 import mpc, mpfr, mpq

from .errors import DegenerateQ, NoConvergence, SingularPoint
from .exactmath import (PrecisionContext, _to_mpfr, clebsch3d,
                        kummer_coefficients, solid_harmonic, spherical_bessel_table)
from .fockgeom import UnitVec4, hsh_evaluate, kinematics_of, project_4
from .formfactor import allowed_l2, coeff_B
from .pcoeff import PIndex

GL_ORDER = 16
MAX_REFINEMENTS = 4

OracleResult = namedtuple("OracleResult", "value scale floor R panels converged")


@lru_cache(maxsize=None)
def _gauss_legendre(n, bits):
    ctx = PrecisionContext(bits=bits + 32)
    nodes, weights = [], []
    with ctx.local():
        pi = gmpy2.const_pi()
        eps = mpfr(2) ** (-(bits + 24))
        for i in range(1, n // 2 + 1):
            x = gmpy2.cos(pi * (i - mpfr("0.25")) / (n + mpfr("0.5")))
            for _ in range(100):
                p0, p1 = mpfr(1), x
                for k in range(2, n + 1):
                    p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
                dp = n * (x * p1 - p0) / (x * x - 1)
                dx = p1 / dp
                x -= dx
                if abs(dx) < eps:
                    break
            p0, p1 = mpfr(1), x
            for k in range(2, n + 1):
                p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
            dp = n * (x * p1 - p0) / (x * x - 1)
            wgt = 2 / ((1 - x * x) * dp * dp)
            nodes += [x, -x]
            weights += [wgt, wgt]
        if n % 2:
            p0, p1 = mpfr(1), mpfr(0)
            for k in range(2, n + 1):
                p0, p1 = p1, -(k - 1) * p0 / k
            dp = n * (0 - p0) / (-1)
            nodes.append(mpfr(0))
            weights.append(2 / (dp * dp))
    out = PrecisionContext(bits=bits)
    with out.local():
        return tuple(mpfr(x) for x in nodes), tuple(mpfr(w) for w in weights)


def gauss_legendre(n, ctx=PrecisionContext()):
    """Gauss-Legendre nodes and weights on [-1, 1] at working precision."""
    return _gauss_legendre(n, ctx.bits)


def _radial_poly(alpha, beta, n, l, nf, lf, exact):
    """Coefficients a_p of r^(l+lf+2) Phi(lf-nf, 2lf+2; 2 beta r) Phi(l-n, 2l+2; 2 alpha r)."""
    ci = kummer_coefficients(n - l, 2 * l + 2)
    cf = kummer_coefficients(nf - lf, 2 * lf + 2)
    ai = [c * (2 * alpha) ** j for j, c in enumerate(ci)]
    af = [c * (2 * beta) ** j for j, c in enumerate(cf)]
    shift = l + lf + 2
    out = [mpq(0) if exact else mpfr(0)] * (shift + len(ai) + len(af) - 1)
    for i, a in enumerate(ai):
        for j, b in enumerate(af):
            out[shift + i + j] += a * b
    return out


def _tail_bound(absco, c, R):
    # int_R^inf e^{-c r} sum |a_p| r^p dr, with the incomplete gamma in closed form
    total = mpfr(0)
    cR = c * R
    e = gmpy2.exp(-cR)
    for p, a in enumerate(absco):
        if a == 0:
            continue
        s, term = mpfr(0), mpfr(1)
        for j in range(p + 1):
            if j:
                term = term * cR / j
            s += term
        total += a * math.factorial(p) * e * s / c ** (p + 1)
    return total


def _scale(absco, c):
    return gmpy2.fsum([a * math.factorial(p) / c ** (p + 1) for p, a in enumerate(absco)])


class _Moments:
    """M[l2][p] = sum_i w_i e^{-c r_i} j_l2(k r_i) r_i^p on a panel set."""

    def __init__(self, c, k, l2max, pmax, ctx):
        self.c, self.k, self.l2max, self.pmax, self.ctx = c, k, l2max, pmax, ctx
        self.nodes, self.weights = gauss_legendre(GL_ORDER, ctx)

    def integrate(self, edges):
        l2max, pmax, k, c = self.l2max, self.pmax, self.k, self.c
        M = [[mpfr(0)] * (pmax + 1) for _ in range(l2max + 1)]
        for a, b in zip(edges, edges[1:]):
            half, mid = (b - a) / 2, (a + b) / 2
            for x, wt in zip(self.nodes, self.weights):
                r = mid + half * x
                base = wt * half * gmpy2.exp(-c * r)
                js = spherical_bessel_table(l2max, k * r, self.ctx) if k != 0 else None
                rp = [mpfr(1)]
                for _ in range(pmax):
                    rp.append(rp[-1] * r)
                for l2 in range(l2max + 1):
                    if js is None:
                        if l2:
                            continue
                        f = base
                    else:
                        f = base * js[l2]
                    row = M[l2]
                    for p in range(pmax + 1):
                        row[p] += f * rp[p]
        return M


def _panel_edges(R, h, levels):
    npan = max(1, int(gmpy2.ceil(R / h)))
    npan *= 2 ** levels
    step = R / npan
    return [step * i for i in range(npan + 1)]


def radial_quadrature_batch(channel, n, nf, kmag, ctx=PrecisionContext(), target=12, pairs=None):
    """Quadrature of every radial integral for initial shell n and final shell nf.

    Returns {(l, lf, l2): OracleResult} for all l <= n, lf <= nf and
    0 <= l2 <= l + lf + 1 (or only the (l, lf, l2) listed in ``pairs``).

    ``scale`` bounds the L1 norm of the integrand from above.  Estimates
    whose magnitude is below ``floor`` = scale * 2^(-bits/2) cannot be
    resolved relative to their own size and are compared absolutely
    against the floor.
    """
    with ctx.local():
        exact = channel.exact
        alpha = mpq(channel.alpha.numerator, channel.alpha.denominator) if exact else channel.alpha_hp(ctx)
        beta = mpq(channel.beta.numerator, channel.beta.denominator) if exact else channel.beta_hp(ctx)
        c = mpfr(alpha + beta)
        k = _to_mpfr(kmag)
        if not c > 0:
            raise ValueError("alpha + beta must be positive")
        if pairs is None:
            pairs = [(l, lf, l2) for l in range(n + 1) for lf in range(nf + 1) for l2 in range(l + lf + 2)]
        polys = {}
        for l, lf, _ in pairs:
            if (l, lf) not in polys:
                polys[(l, lf)] = [mpfr(a) for a in _radial_poly(alpha, beta, n, l, nf, lf, exact)]
        pmax = max(len(p) for p in polys.values()) - 1
        l2max = max(l2 for _, _, l2 in pairs)
        tol = mpfr(10) ** (-target)
        half_bits = mpfr(2) ** (-ctx.bits // 2)
        absco = {key: [abs(a) for a in p] for key, p in polys.items()}
        scales = {key: _scale(a, c) for key, a in absco.items()}
        # truncation point: tail bound below 1% of the tolerance at the floor
        R = mpfr(1) / c
        for key, a in absco.items():
            need = tol * half_bits * scales[key] / 100
            while _tail_bound(a, c, R) > need:
                R *= mpfr("1.25")
        h = 2 / c
        if k > 0:
            h = min(h, gmpy2.const_pi() / (2 * k))
        mom = _Moments(c, k, l2max, pmax, ctx)
        prev = None
        for level in range(MAX_REFINEMENTS + 1):
            edges = _panel_edges(R, h, level)
            M = mom.integrate(edges)
            vals = {}
            for l, lf, l2 in pairs:
                poly = polys[(l, lf)]
                vals[(l, lf, l2)] = gmpy2.fsum([a * M[l2][p] for p, a in enumerate(poly) if a != 0])
            if prev is not None:
                ok = True
                for key, v in vals.items():
                    floor = scales[key[:2]] * half_bits
                    if abs(v - prev[key]) > tol * max(abs(v), floor):
                        ok = False
                        break
                if ok:
                    return {key: OracleResult(v, scales[key[:2]], scales[key[:2]] * half_bits, R,
                                              len(edges) - 1, True)
                            for key, v in vals.items()}
            prev = vals
        raise NoConvergence("radial quadrature did not settle after %d refinements" % MAX_REFINEMENTS)


def radial_quadrature_detail(t, l2, kmag, ctx=PrecisionContext(), target=12):
    n, l, nf, lf = t.initial.n, t.initial.l, t.final.n, t.final.l
    return radial_quadrature_batch(t.channel, n, nf, kmag, ctx, target, pairs=[(l, lf, l2)])[(l, lf, l2)]


def radial_quadrature(t, l2, kmag, ctx=PrecisionContext(), target=12):
    """Direct quadrature of the radial integral for transition ``t`` and multipole l2."""
    return radial_quadrature_detail(t, l2, kmag, ctx, target).value


def _chebyshev_u_rule(N, ctx):
    # int_{-1}^{1} g(t) sqrt(1 - t^2) dt, exact for polynomials of degree <= 2N - 1
    with ctx.local():
        pi = gmpy2.const_pi()
        out = []
        for j in range(1, N + 1):
            a = j * pi / (N + 1)
            out.append((gmpy2.cos(a), pi / (N + 1) * gmpy2.sin(a) ** 2))
        return out


def s3_rule(nmax=4, ctx=PrecisionContext()):
    """Nodes (UnitVec4) and weights of the product rule used by s3_quadrature.

    Gauss-Chebyshev (second kind) in cos chi, Gauss-Legendre in cos theta
    and the trapezoid rule in phi, exact for polynomials in the components
    of degree <= 2 nmax + 2.
    """
    N = nmax + 2
    Nphi = 2 * nmax + 3
    chi_rule = _chebyshev_u_rule(N, ctx)
    xs, ws = gauss_legendre(N, ctx)
    nodes, weights = [], []
    with ctx.local():
        pi = gmpy2.const_pi()
        wphi = 2 * pi / Nphi
        trig = [(gmpy2.cos(2 * pi * j / Nphi), gmpy2.sin(2 * pi * j / Nphi)) for j in range(Nphi)]
        for y0, wc in chi_rule:
            s = gmpy2.sqrt(1 - y0 * y0)
            for ct, wt in zip(xs, ws):
                st = gmpy2.sqrt(1 - ct * ct)
                for cp, sp in trig:
                    nodes.append(UnitVec4(s * st * cp, s * st * sp, s * ct, y0))
                    weights.append(wc * wt * wphi)
    return nodes, weights


def s3_quadrature(f, nmax=4, ctx=PrecisionContext()):
    """Integral of f over the unit 3-sphere (total measure 2 pi^2)."""
    nodes, weights = s3_rule(nmax, ctx)
    with ctx.local():
        total = mpc(0)
        for y, wt in zip(nodes, weights):
            total += wt * f(y)
        return total


def _four(vec3, p0):
    return tuple(vec3) + (p0,)


def expansion_check(n, l, m, ch, kvec, pvec, n3_max, ctx=PrecisionContext(), backend="series"):
    """Left side q^-4 C_nlm(x) and the multipole sum truncated at n3 <= n3_max.

    The sum runs over n3, l3 <= n3, multipoles l2 with l + l2 + l3 even and
    |l - l3| <= l2 <= l + l3, and m2 + m3 = m.  With the harmonics of this
    package (no i^l factor in C_nlm) each term carries the real phase
    i^(l + l2 - l3).
    """
    with ctx.local():
        alpha, beta = ch.alpha_hp(ctx), ch.beta_hp(ctx)
        k = tuple(_to_mpfr(c) for c in kvec)
        p = tuple(_to_mpfr(c) for c in pvec)
        P4 = _four(p, beta)
        K4 = _four(k, beta - alpha)
        Q4 = tuple(a - b for a, b in zip(P4, K4))
        q2 = sum(c * c for c in Q4)
        if q2 == 0:
            raise DegenerateQ("q = p - k vanishes")
        p2 = sum(c * c for c in P4)
        x = project_4(Q4, alpha, ctx)
        y = project_4(P4, beta, ctx)
        lhs = hsh_evaluate(n, l, m, x, ctx) / (q2 * q2)
        kin = kinematics_of(ch, k, ctx)
        kmag = kin.kmag
        khat = tuple(c / kmag for c in k) if kmag != 0 else (mpfr(0), mpfr(0), mpfr(1))
        total = mpc(0)
        for n3 in range(n3_max + 1):
            sgn3 = -1 if n3 % 2 else 1
            for l3 in range(n3 + 1):
                hy = {m3: hsh_evaluate(n3, l3, m3, y, ctx) for m3 in range(-l3, l3 + 1)}
                for l2 in allowed_l2(l, l3):
                    cg1 = clebsch3d(l, 0, l2, 0, l3, 0, ctx)
                    if cg1 == 0:
                        continue
                    B = coeff_B(PIndex(n, l, n3, l3, l2), kin, kin.u, ctx, backend)
                    if B == 0:
                        continue
                    ang = mpc(0)
                    for m2 in range(-l2, l2 + 1):
                        m3 = m - m2
                        if abs(m3) > l3:
                            continue
                        cg2 = clebsch3d(l2, m2, l3, m3, l, m, ctx)
                        if cg2 == 0:
                            continue
                        ang += cg2 * solid_harmonic(l2, m2, *khat, ctx) * hy[m3]
                    # l + l2 - l3 is even, so the phase is real
                    phase = -1 if ((l + l2 - l3) // 2) % 2 else 1
                    total += sgn3 * phase * B * cg1 * ang
        rhs = (-1) ** n * total / (2 * alpha * alpha * p2)
        return lhs, rhs


def _harmonic_pair(n, l, m, P4, K4, alpha, beta, ctx):
    """(p^-2 C_n(y), q^-2 C_n(x)) at the four-vector P4."""
    p2 = sum(c * c for c in P4)
    Q4 = tuple(a - b for a, b in zip(P4, K4))
    q2 = sum(c * c for c in Q4)
    f = hsh_evaluate(n, l, m, project_4(P4, beta, ctx), ctx) / p2
    g = hsh_evaluate(n, l, m, project_4(Q4, alpha, ctx), ctx) / q2
    return f, g


def laplace_fd_check(n, l, m, ch, kvec, pvec, h, p0=None, ctx=PrecisionContext()):
    """Largest |central-difference 4D Laplacian| of p^-2 C_n(y) and q^-2 C_n(x).

    The evaluation point is P = (pvec, p0) with p0 defaulting to beta.
    """
    with ctx.local():
        alpha, beta = ch.alpha_hp(ctx), ch.beta_hp(ctx)
        h = _to_mpfr(h)
        if not h > 0:
            raise ValueError("step must be positive")
        P4 = _four([_to_mpfr(c) for c in pvec], beta if p0 is None else _to_mpfr(p0))
        K4 = _four([_to_mpfr(c) for c in kvec], beta - alpha)
        pn = gmpy2.sqrt(sum(c * c for c in P4))
        qn = gmpy2.sqrt(sum((a - b) ** 2 for a, b in zip(P4, K4)))
        if pn <= 4 * h or qn <= 4 * h:
            raise SingularPoint("stencil reaches p = 0 or q = 0")
        f0, g0 = _harmonic_pair(n, l, m, P4, K4, alpha, beta, ctx)
        lap_f, lap_g = -8 * f0, -8 * g0
        for mu in range(4):
            for s in (1, -1):
                Ps = list(P4)
                Ps[mu] += s * h
                f, g = _harmonic_pair(n, l, m, tuple(Ps), K4, alpha, beta, ctx)
                lap_f += f
                lap_g += g
        return max(abs(lap_f), abs(lap_g)) / (h * h)
