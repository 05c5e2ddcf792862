"""
Physical matrix elements assembled from the P coefficients.

Bound states are labelled (n, l, m) with n = principal - 1.  The form
factor F = <final| exp(i k.r) |initial> is the sum over multipoles l2 of

    sqrt(alpha (n+1) / (beta (n'+1))) (-i)^l2 <l 0 l2 0|l' 0>
        <l2 m2 l' m'|l m> C_{l2 m2}(k_hat) B^(l2)_{n,l;n',l'}

with m2 = m - m'.  The phase (-i)^l2 is the one that reproduces the
partial-wave expansion of exp(i k.r) (checked against direct radial
quadrature and a three-dimensional integral).
"""
from collections import namedtuple
from dataclasses import dataclass, field
from fractions import Fraction
import math

import gmpy2
from gmpy2 import mpc, mpfr, mpq

from .errors import BadQuantumNumbers, ConvergenceRegionViolated, IndexViolation
from .exactmath import (PrecisionContext, _to_mpfr, as_rational, clebsch3d,
                        hyp3f2_terminating, solid_harmonic)
from .fockgeom import Channel, Kinematics, kinematics_of, polar_k
from .pcoeff import PIndex, p_1s, p_value


@dataclass(frozen=True)
class BoundLabel:
    """Quantum numbers with n = principal - 1."""
    n: int
    l: int
    m: int = 0

    def __post_init__(self):
        if self.n < 0:
            raise BadQuantumNumbers("n must be >= 0 (it is principal - 1), got %d" % self.n)
        if self.l < 0 or self.l > self.n:
            raise BadQuantumNumbers("l exceeds n: need 0 <= l <= n, got l=%d, n=%d" % (self.l, self.n))
        if abs(self.m) > self.l:
            raise BadQuantumNumbers("|m| exceeds l: got m=%d, l=%d" % (self.m, self.l))

    @classmethod
    def from_principal(cls, principal, l, m=0):
        if principal < 1:
            raise BadQuantumNumbers("principal quantum number must be >= 1")
        if l > principal - 1:
            raise BadQuantumNumbers("l exceeds n - 1: got l=%d for principal n=%d" % (l, principal))
        return cls(principal - 1, l, m)

    @property
    def principal(self):
        return self.n + 1


@dataclass(frozen=True)
class TransitionSpec:
    initial: BoundLabel
    final: BoundLabel
    channel: Channel
    mode: str = "sturmian"

    def __post_init__(self):
        if self.mode not in ("hydrogen", "sturmian"):
            raise ValueError("mode must be 'hydrogen' or 'sturmian'")
        if self.mode == "hydrogen":
            expected = Fraction(self.final.n + 1, self.initial.n + 1)
            if not self.channel.exact or self.channel.u != expected:
                raise ValueError("hydrogen mode needs u = (n'+1)/(n+1) = %s" % expected)

    @classmethod
    def hydrogen(cls, Z, initial, final):
        ch = Channel.hydrogen(Z, initial.n + 1, final.n + 1)
        return cls(initial, final, ch, "hydrogen")

    @classmethod
    def sturmian(cls, alpha, beta, initial, final):
        return cls(initial, final, Channel(alpha, beta), "sturmian")


@dataclass(frozen=True)
class FormFactor:
    value: object
    transition: TransitionSpec
    kin: Kinematics
    l2_terms: list = field(default_factory=list)

    @property
    def abs2(self):
        return gmpy2.norm(self.value)


def _k_over_beta(kin):
    # k/beta = 2 v sin(theta0) (both vanish together at k = 0)
    return 2 * kin.v * kin.sin_theta0


def coeff_B(idx, kin, u=None, ctx=PrecisionContext(), backend="series"):
    """B^(l2) coefficient: P times (k/beta)^l2 and factorial normalization."""
    idx = idx if isinstance(idx, PIndex) else PIndex(*idx)
    idx.validate()
    n, l, n3, l3, l2 = idx.as_tuple()
    with ctx.local():
        if u is None:
            u = kin.u
        kb = _k_over_beta(kin)
        if l2 > 0 and kb == 0:
            return mpfr(0)
        P = p_value(idx, u, kin.w, ctx, backend).value
        f = math.factorial
        norm = gmpy2.sqrt(mpfr(mpq(f(n + l + 1) * f(n3 + l3 + 1), f(n - l) * f(n3 - l3))))
        return -kb ** l2 * mpq(f(l2) * (2 * l2 + 1), 2 * (n + 1)) * norm * P


def allowed_l2(l, lf):
    """Multipoles l2 in [|l - lf|, l + lf] with l + l2 + lf even."""
    return [l2 for l2 in range(abs(l - lf), l + lf + 1) if (l + l2 + lf) % 2 == 0]


_MINUS_I_POW = [(1, 0), (0, -1), (-1, 0), (0, 1)]


def form_factor(t, kvec, ctx=PrecisionContext(), backend="series"):
    """m-resolved form factor for transition ``t`` at momentum transfer ``kvec``."""
    ini, fin = t.initial, t.final
    kin = kinematics_of(t.channel, kvec, ctx)
    with ctx.local():
        alpha, beta = t.channel.alpha_hp(ctx), t.channel.beta_hp(ctx)
        pref = gmpy2.sqrt(alpha * (ini.n + 1) / (beta * (fin.n + 1)))
        m2 = ini.m - fin.m
        khat = tuple(c / kin.kmag for c in kin.kvec) if kin.kmag != 0 else (mpfr(0), mpfr(0), mpfr(1))
        terms = []
        total = mpc(0)
        for l2 in allowed_l2(ini.l, fin.l):
            if abs(m2) > l2:
                continue
            cg1 = clebsch3d(ini.l, 0, l2, 0, fin.l, 0, ctx)
            cg2 = clebsch3d(l2, m2, fin.l, fin.m, ini.l, ini.m, ctx)
            if cg1 == 0 or cg2 == 0:
                continue
            idx = PIndex(ini.n, ini.l, fin.n, fin.l, l2)
            B = coeff_B(idx, kin, kin.u, ctx, backend)
            if B == 0:
                part = mpc(0)
            else:
                harm = solid_harmonic(l2, m2, *khat, ctx)
                re, im = _MINUS_I_POW[l2 % 4]
                part = mpc(re, im) * harm * (pref * cg1 * cg2 * B)
            terms.append((l2, part))
            total += part
        return FormFactor(total, t, kin, terms)


def radial_matrix_element(t, l2, kmag, ctx=PrecisionContext(), backend="series"):
    """Closed-form value of the radial integral

        int_0^inf r^(l+l'+2) e^-(alpha+beta) r j_l2(k r)
              Phi(l'-n', 2l'+2; 2 beta r) Phi(l-n, 2l+2; 2 alpha r) dr

    through the P coefficient, without quadrature.
    """
    n, l, nf, lf = t.initial.n, t.initial.l, t.final.n, t.final.l
    idx = PIndex(n, l, nf, lf, l2).validate()
    with ctx.local():
        alpha, beta = t.channel.alpha_hp(ctx), t.channel.beta_hp(ctx)
        k = _to_mpfr(kmag)
        w = gmpy2.sqrt((alpha + beta) ** 2 + k * k) / (2 * beta)
        P = p_value(idx, t.channel.u_hp(ctx), w, ctx, backend).value
        f = math.factorial
        sign = -1 if (l + l2 + lf + 1) % 2 else 1
        pre = sign * f(l2) * f(2 * l + 1) * f(2 * lf + 1) / ((2 * alpha) ** (l + 1) * (2 * beta) ** (lf + 2))
        return pre * (k / beta) ** l2 * P


def form_factor_1s(n3, l3, ch, kmag, ctx=PrecisionContext()):
    """Radial form factor from the ground state of scale alpha to (n3, l3) of scale beta."""
    if not 0 <= l3 <= n3:
        raise IndexViolation("need 0 <= l3 <= n3")
    with ctx.local():
        alpha, beta = ch.alpha_hp(ctx), ch.beta_hp(ctx)
        k = _to_mpfr(kmag)
        w = gmpy2.sqrt((alpha + beta) ** 2 + k * k) / (2 * beta)
        p = p_1s(n3, l3, ch.u_hp(ctx), w, ctx).value
        f = math.factorial
        norm = gmpy2.sqrt(alpha * f(n3 + l3 + 1) / (beta * (n3 + 1) * f(n3 - l3)))
        return -mpq(f(l3), 2) * (k / beta) ** l3 * norm * p


def _D_prefactor(n, n2, n3, l, l3, l2, beta):
    f = math.factorial
    sq = mpq(f(n + l + 1) * f(n - l) * (2 * l2 + 1), f(n3 + l3 + 1) * f(n3 - l3) * f(n2 + l2 + 1) * f(n2 - l2))
    return (-1) ** l2 * (2 * beta) ** (-n2) * gmpy2.sqrt(mpfr(sq))


def _check_D(n, n2, n3, l, l3, l2, ch, kmag, ctx):
    if not (0 <= l <= n and 0 <= l3 <= n3 and 0 <= l2 <= n2):
        raise IndexViolation("need l <= n, l3 <= n3, l2 <= n2")
    alpha, beta = ch.alpha_hp(ctx), ch.beta_hp(ctx)
    k = _to_mpfr(kmag)
    if not abs(alpha) < abs(beta):
        raise ConvergenceRegionViolated("need |alpha| < |beta|")
    if not abs((alpha - beta) ** 2 + k * k) < 2 * abs(beta):
        raise ConvergenceRegionViolated("need |(alpha - beta)^2 + k^2| < 2|beta|")
    return alpha, beta


def coeff_D_sum(n, n2, n3, l, l3, l2, ch, kmag=0, ctx=PrecisionContext()):
    """D coefficient as the finite sum over n1 (l <= n1 <= n)."""
    with ctx.local():
        alpha, beta = _check_D(n, n2, n3, l, l3, l2, ch, kmag, ctx)
        u = alpha / beta
        f = math.factorial
        total = mpfr(0)
        for n1 in range(l, n + 1):
            if n1 + n2 - n3 < 0 or n1 + n2 - l3 < 0:
                continue
            total += mpq(f(n1 + n2 + l3 + 1) * f(n1 + n2 - l3),
                         f(n - n1) * f(n1 + n2 - n3) * f(n1 + l + 1) * f(n1 - l)) * u ** n1
        return _D_prefactor(n, n2, n3, l, l3, l2, beta) * total


def coeff_D(n, n2, n3, l, l3, l2, ch, kmag=0, ctx=PrecisionContext()):
    """D coefficient in closed 3F2 form.

    Requires n2 - n3 + l >= 0 so that the lower parameter n2 - n3 + l + 1
    is positive; use :func:`coeff_D_sum` otherwise.
    """
    with ctx.local():
        alpha, beta = _check_D(n, n2, n3, l, l3, l2, ch, kmag, ctx)
        if n2 - n3 + l < 0:
            raise IndexViolation("closed form needs n2 - n3 + l >= 0")
        f = math.factorial
        ru = as_rational(ch.u) if ch.exact else None
        u = ru if ru is not None else alpha / beta
        h = hyp3f2_terminating(l - n, n2 + l - l3 + 1, n2 + l + l3 + 2, n2 - n3 + l + 1, 2 * l + 2, -u, ctx)
        pre = mpq(f(n2 + l + l3 + 1) * f(n2 + l - l3), f(n2 - n3 + l) * f(n - l) * f(2 * l + 1))
        return _D_prefactor(n, n2, n3, l, l3, l2, beta) * pre * mpfr(u) ** l * h


GosRow = namedtuple("GosRow", "lnk k absF2 partials")


def gos_scan(t, lnk_grid, ctx=PrecisionContext(), backend="series"):
    """|F|^2 summed over final m' on a grid of ln|k| (k along the polar axis).

    ``partials[j]`` is the incoherent contribution sum_m' |term_{l2=j}|^2
    for j = 0 .. l + l'; entries for excluded multipoles are zero.
    """
    grid = list(lnk_grid)
    if not grid:
        raise ValueError("empty grid")
    ini, fin = t.initial, t.final
    rows = []
    with ctx.local():
        grid = [_to_mpfr(x) for x in grid]
        for a, b in zip(grid, grid[1:]):
            if not b > a:
                raise ValueError("grid must be strictly increasing")
        for x in grid:
            k = gmpy2.exp(x)
            absF2 = mpfr(0)
            partials = [mpfr(0)] * (ini.l + fin.l + 1)
            for mf in range(-fin.l, fin.l + 1):
                tt = TransitionSpec(ini, BoundLabel(fin.n, fin.l, mf), t.channel, t.mode)
                F = form_factor(tt, polar_k(k), ctx, backend)
                absF2 += gmpy2.norm(F.value)
                for l2, part in F.l2_terms:
                    partials[l2] += gmpy2.norm(part)
            rows.append(GosRow(x, k, absF2, partials))
    return rows
