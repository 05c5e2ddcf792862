"""
Fock stereographic projections, kinematic scalars and four-dimensional
hyperspherical harmonics.

Three-momenta are plain 3-tuples.  A point of the unit 3-sphere is a
:class:`UnitVec4` with components (y1, y2, y3, y0), where y0 is the
component along the fourth axis e.
"""
from dataclasses import dataclass
from fractions import Fraction
import math

import gmpy2
from gmpy2 import mpfr, mpq

from .errors import BadQuantumNumbers
from .exactmath import (PrecisionContext, _to_mpfr, as_rational, gegenbauer_table,
                        solid_harmonic)


@dataclass(frozen=True)
class Channel:
    """Screening parameters of the initial (alpha) and final (beta) states.

    Rational inputs (ints, Fractions, decimal strings) are kept exact so
    that u = alpha/beta is exact in hydrogen mode.
    """
    alpha: object
    beta: object

    def __post_init__(self):
        for name in ("alpha", "beta"):
            val = getattr(self, name)
            r = as_rational(val)
            if r is not None:
                object.__setattr__(self, name, Fraction(int(r.numerator), int(r.denominator)))
                val = r
            if not (val > 0) or not gmpy2.is_finite(mpfr(val)):
                raise ValueError("%s must be finite and positive, got %r" % (name, getattr(self, name)))

    @classmethod
    def hydrogen(cls, Z, n_initial, n_final):
        """alpha = Z/ni, beta = Z/nf from principal quantum numbers ni, nf >= 1."""
        if n_initial < 1 or n_final < 1:
            raise BadQuantumNumbers("principal quantum numbers start at 1")
        return cls(Fraction(Z) / n_initial, Fraction(Z) / n_final)

    @property
    def exact(self):
        return isinstance(self.alpha, Fraction) and isinstance(self.beta, Fraction)

    @property
    def u(self):
        """alpha/beta, exact (a Fraction) whenever both parameters are rational."""
        return self.alpha / self.beta

    def u_hp(self, ctx=PrecisionContext()):
        if self.exact:
            return ctx.real(self.u)
        with ctx.local():
            return _to_mpfr(self.alpha) / _to_mpfr(self.beta)

    def alpha_hp(self, ctx=PrecisionContext()):
        return ctx.real(self.alpha)

    def beta_hp(self, ctx=PrecisionContext()):
        return ctx.real(self.beta)


@dataclass(frozen=True)
class UnitVec4:
    y1: object
    y2: object
    y3: object
    y0: object

    def components(self):
        return (self.y1, self.y2, self.y3, self.y0)

    def norm(self):
        return gmpy2.sqrt(sum(c * c for c in self.components()))


@dataclass(frozen=True)
class Kinematics:
    """Derived scalars for one momentum transfer in one channel.

    ``xv`` is the product x_geg * v, which stays finite when v = 0 and is
    what the closed forms actually need.  ``degenerate`` flags the point
    alpha = beta, k = 0 where theta0 is undefined and (cos, sin) = (1, 0)
    is used by convention.
    """
    kvec: tuple
    kmag: object
    k4: object
    u: object
    v: object
    w: object
    cos_theta0: object
    sin_theta0: object
    x_geg: object
    xv: object
    theta: object
    phi: object
    degenerate: bool = False


def _vec(p, ctx):
    if len(p) != 3:
        raise ValueError("expected a 3-vector")
    return tuple(_to_mpfr(c) for c in p)


def project_y(pvec, beta, ctx=PrecisionContext()):
    """Fock projection of p onto the unit 3-sphere with scale beta."""
    with ctx.local():
        p = _vec(pvec, ctx)
        beta = _to_mpfr(beta)
        if beta <= 0:
            raise ValueError("beta must be positive")
        if any(gmpy2.is_infinite(c) for c in p):
            return UnitVec4(mpfr(0), mpfr(0), mpfr(0), mpfr(-1))
        p2 = sum(c * c for c in p)
        den = beta * beta + p2
        return UnitVec4(2 * beta * p[0] / den, 2 * beta * p[1] / den, 2 * beta * p[2] / den,
                        (beta * beta - p2) / den)


def project_x(pvec, kvec, alpha, ctx=PrecisionContext()):
    """Projection of p - k with scale alpha."""
    with ctx.local():
        p = _vec(pvec, ctx)
        k = _vec(kvec, ctx)
        return project_y(tuple(a - b for a, b in zip(p, k)), alpha, ctx)


def project_4(pvec4, scale, ctx=PrecisionContext()):
    """Compact form -e + 2*scale*P/|P|^2 for a four-vector P = (p1, p2, p3, p0)."""
    with ctx.local():
        P = tuple(_to_mpfr(c) for c in pvec4)
        s = _to_mpfr(scale)
        n2 = sum(c * c for c in P)
        f = 2 * s / n2
        return UnitVec4(f * P[0], f * P[1], f * P[2], f * P[3] - 1)


def kinematics_of(ch, kvec, ctx=PrecisionContext()):
    """All kinematic scalars for channel ``ch`` and momentum transfer ``kvec``."""
    with ctx.local():
        k = _vec(kvec, ctx)
        alpha, beta = ch.alpha_hp(ctx), ch.beta_hp(ctx)
        u = ch.u_hp(ctx)
        k2 = sum(c * c for c in k)
        kmag = gmpy2.sqrt(k2)
        k4 = gmpy2.sqrt((beta - alpha) ** 2 + k2)
        v = k4 / (2 * beta)
        w = gmpy2.sqrt((alpha + beta) ** 2 + k2) / (2 * beta)
        degenerate = False
        if k4 == 0:
            cos0, sin0 = mpfr(1), mpfr(0)
            degenerate = True
        elif k2 == 0:
            cos0, sin0 = mpfr(1 if beta > alpha else -1), mpfr(0)
        else:
            cos0, sin0 = (beta - alpha) / k4, kmag / k4
        xv = (w * w - (u + 1) / 2) / w
        x_geg = xv / v if v != 0 else None
        if k2 == 0:
            theta, phi = mpfr(0), mpfr(0)
        else:
            theta = gmpy2.acos(k[2] / kmag)
            phi = gmpy2.atan2(k[1], k[0])
        return Kinematics(k, kmag, k4, u, v, w, cos0, sin0, x_geg, xv, theta, phi, degenerate)


def polar_k(kmag):
    """Momentum transfer of magnitude kmag along the polar axis."""
    return (0, 0, kmag)


def _check_nlm(n, l, m):
    if not (0 <= l <= n) or abs(m) > l:
        raise BadQuantumNumbers("need 0 <= l <= n and |m| <= l, got (n, l, m) = (%d, %d, %d)" % (n, l, m))


def _hsh_norm(n, l):
    # (2l)!! sqrt((2l+1)(n-l)!/(n+l+1)!) as an exact square
    dfac = 1
    for j in range(2, 2 * l + 1, 2):
        dfac *= j
    return dfac, mpq((2 * l + 1) * math.factorial(n - l), math.factorial(n + l + 1))


def hsh_evaluate(n, l, m, y, ctx=PrecisionContext()):
    """Renormalized hyperspherical harmonic C_{nlm}(y).

    sin^l(chi) C_lm(theta3, phi3) is the solid harmonic of the first three
    components, so no angle is ever formed.
    """
    _check_nlm(n, l, m)
    with ctx.local():
        y1, y2, y3, y0 = (_to_mpfr(c) for c in y.components())
        dfac, sq = _hsh_norm(n, l)
        geg = gegenbauer_table(l + 1, n - l, y0, ctx)[n - l]
        return dfac * gmpy2.sqrt(mpfr(sq)) * geg * solid_harmonic(l, m, y1, y2, y3, ctx)


def hsh_normalized(n, l, m, y, ctx=PrecisionContext()):
    """Unit-normalized harmonic Y_{nlm} = (-1)^(n-l) sqrt((n+1)/(2 pi^2)) C_{nlm}."""
    c = hsh_evaluate(n, l, m, y, ctx)
    with ctx.local():
        pi = gmpy2.const_pi()
        return (-1) ** (n - l) * gmpy2.sqrt((n + 1) / (2 * pi * pi)) * c


def hsh_homogeneous(n, l, m, P, ctx=PrecisionContext()):
    """|P|^n C_{nlm}(P/|P|) for a four-vector P = (p1, p2, p3, p0).

    This is a harmonic polynomial of degree n in the components.
    """
    _check_nlm(n, l, m)
    with ctx.local():
        p1, p2, p3, p0 = (_to_mpfr(c) for c in P)
        r2 = p1 * p1 + p2 * p2 + p3 * p3 + p0 * p0
        dfac, sq = _hsh_norm(n, l)
        # |P|^(n-l) C^{l+1}_{n-l}(p0/|P|) via the homogeneous recurrence
        lam = l + 1
        d = n - l
        g_prev, g_cur = mpfr(1), 2 * lam * p0
        if d == 0:
            g = g_prev
        else:
            for j in range(2, d + 1):
                g_prev, g_cur = g_cur, (2 * (j + lam - 1) * p0 * g_cur - (j + 2 * lam - 2) * r2 * g_prev) / j
            g = g_cur
        return dfac * gmpy2.sqrt(mpfr(sq)) * g * solid_harmonic(l, m, p1, p2, p3, ctx)


def surface_jacobian(pvec, beta, ctx=PrecisionContext()):
    """Surface-element factor (2 beta/(beta^2 + p^2))^3."""
    with ctx.local():
        p = _vec(pvec, ctx)
        beta = _to_mpfr(beta)
        return (2 * beta / (beta * beta + sum(c * c for c in p))) ** 3
