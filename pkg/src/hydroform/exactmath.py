"""
Exact combinatorics and special functions in configurable precision.

Real arithmetic uses gmpy2 ``mpfr`` numbers (correctly rounded, round to
nearest) and complex arithmetic uses ``mpc``.  Every routine takes an
explicit :class:`PrecisionContext`; nothing depends on a global setting,
so the same inputs and context always give bit-identical results.

Integer ingredients (factorials, binomials, Pochhammer ratios) are kept
exact, and when all arguments of a terminating hypergeometric sum are
rational the whole sum is carried out in exact rational arithmetic and
rounded once at the end.
"""
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
import math
import numbers
import os

import gmpy2
from gmpy2 import mpfr, mpc, mpq

from .errors import DegenerateDenominator, NonTerminating

DEFAULT_BITS = 128
PRECISION_ENV = "HYDROFORM_PRECISION_BITS"


@dataclass(frozen=True)
class PrecisionContext:
    """Working precision for all real and complex arithmetic.

    Parameters
    ----------
    bits : int
        Significand precision in bits (at least 64).
    series_guard : int
        Extra terms or nodes added beyond analytic truncation bounds by
        routines that need a safety margin.
    """
    bits: int = DEFAULT_BITS
    series_guard: int = 4

    def __post_init__(self):
        if int(self.bits) != self.bits or self.bits < 64:
            raise ValueError("precision bits must be an integer >= 64, got %r" % (self.bits,))
        if int(self.series_guard) != self.series_guard or self.series_guard < 0:
            raise ValueError("series_guard must be a nonnegative integer")

    @classmethod
    def from_env(cls, default=DEFAULT_BITS):
        """Context whose bits come from HYDROFORM_PRECISION_BITS if set."""
        raw = os.environ.get(PRECISION_ENV)
        return cls(bits=int(raw) if raw else default)

    def local(self):
        """Context manager switching gmpy2 to this precision."""
        return gmpy2.context(gmpy2.get_context(), precision=self.bits,
                             real_prec=self.bits, imag_prec=self.bits)

    def doubled(self):
        return PrecisionContext(bits=2 * self.bits, series_guard=self.series_guard)

    def real(self, x):
        """Round ``x`` to an mpfr at this precision.

        Integers, fractions and decimal strings are converted exactly
        before the single rounding step.
        """
        with self.local():
            return _to_mpfr(x)

    def complex(self, re, im=0):
        with self.local():
            return mpc(_to_mpfr(re), _to_mpfr(im))

    def tol(self, fraction):
        """The tolerance 2**(-bits*fraction) used by the validation suites."""
        with self.local():
            return mpfr(2) ** (-self.bits * fraction)


def _to_mpfr(x):
    # assumes the caller has entered the wanted gmpy2 context
    if isinstance(x, str):
        return mpfr(mpq(Fraction(x)))
    if isinstance(x, Fraction):
        return mpfr(mpq(x.numerator, x.denominator))
    if isinstance(x, (type(mpq()),)):
        return mpfr(x)
    if isinstance(x, type(mpc())):
        raise TypeError("complex value where a real one is required")
    return mpfr(x)


def as_rational(x):
    """Exact mpq for integers, fractions and decimal strings, else None."""
    if isinstance(x, bool):
        return mpq(int(x))
    if isinstance(x, numbers.Integral):
        return mpq(int(x))
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    if isinstance(x, type(mpq())):
        return x
    if isinstance(x, str):
        try:
            f = Fraction(x)
        except ValueError:
            return None
        return mpq(f.numerator, f.denominator)
    return None


def factorial_exact(n):
    """Exact n! as a Python integer."""
    if n < 0:
        raise ValueError("factorial of a negative integer")
    return math.factorial(n)


def binomial_exact(n, k):
    """Exact binomial coefficient, zero when k is outside [0, n]."""
    if n < 0:
        raise ValueError("binomial with negative n")
    if k < 0 or k > n:
        return 0
    return math.comb(n, k)


def gegenbauer(lam, q, x, ctx=PrecisionContext()):
    """Gegenbauer polynomial C^lam_q(x) by the three-term recurrence in q."""
    return gegenbauer_table(lam, q, x, ctx)[q]


def gegenbauer_table(lam, qmax, x, ctx=PrecisionContext()):
    """List [C^lam_0(x), ..., C^lam_qmax(x)]."""
    if lam < 1 or int(lam) != lam:
        raise ValueError("lambda must be a positive integer")
    if qmax < 0:
        raise ValueError("degree must be nonnegative")
    with ctx.local():
        x = _to_mpfr(x)
        out = [mpfr(1)]
        if qmax >= 1:
            out.append(2 * lam * x)
        for k in range(2, qmax + 1):
            out.append((2 * (k + lam - 1) * x * out[k - 1] - (k + 2 * lam - 2) * out[k - 2]) / k)
        return out


def _termination_order(uppers):
    """Smallest N with some upper parameter equal to -N, or None."""
    orders = []
    for a in uppers:
        r = as_rational(a)
        if r is not None and r.denominator == 1 and r <= 0:
            orders.append(int(-r))
    return min(orders) if orders else None


def _hyp_terminating(uppers, lowers, z, ctx):
    first = as_rational(uppers[0])
    if first is None or first.denominator != 1 or first > 0:
        raise NonTerminating("first upper parameter must be a nonpositive integer, got %r" % (uppers[0],))
    nterm = _termination_order(uppers)
    exact = [as_rational(a) for a in list(uppers) + list(lowers) + [z]]
    rational = all(e is not None for e in exact)
    with ctx.local():
        if rational:
            ups = exact[:len(uppers)]
            lows = exact[len(uppers):-1]
            zz = exact[-1]
        else:
            ups = [_to_mpfr(a) for a in uppers]
            lows = [_to_mpfr(b) for b in lowers]
            zz = _to_mpfr(z)
        term = mpq(1) if rational else mpfr(1)
        total = term
        for j in range(nterm):
            den = 1
            for b in lows:
                den = den * (b + j)
            if den == 0:
                raise DegenerateDenominator("lower parameter Pochhammer vanishes at term %d" % (j + 1))
            num = 1
            for a in ups:
                num = num * (a + j)
            term = term * num * zz / (den * (j + 1))
            total = total + term
        return mpfr(total)


def hyp2f1_terminating(a, b, c, z, ctx=PrecisionContext()):
    """Terminating Gauss series 2F1(a, b; c; z) with a a nonpositive integer."""
    return _hyp_terminating([a, b], [c], z, ctx)


def hyp3f2_terminating(a1, a2, a3, b1, b2, z, ctx=PrecisionContext()):
    """Terminating 3F2(a1, a2, a3; b1, b2; z) with a1 a nonpositive integer."""
    return _hyp_terminating([a1, a2, a3], [b1, b2], z, ctx)


def kummer_bound(m, c, x, ctx=PrecisionContext()):
    """Confluent function Phi(-m, c; x) for the bound-state case m >= 0."""
    if m < 0 or int(m) != m:
        raise NonTerminating("Kummer polynomial needs a nonnegative integer m")
    return _hyp_terminating([-int(m)], [c], x, ctx)


def kummer_coefficients(m, c):
    """Exact power-series coefficients of Phi(-m, c; x) in x (c rational)."""
    c = as_rational(c)
    coeffs = [mpq(1)]
    for j in range(m):
        if c + j == 0:
            raise DegenerateDenominator("lower parameter Pochhammer vanishes")
        coeffs.append(coeffs[-1] * (j - m) / ((c + j) * (j + 1)))
    return coeffs


def spherical_bessel(l, x, ctx=PrecisionContext()):
    """Spherical Bessel function j_l(x) for x >= 0."""
    return spherical_bessel_table(l, x, ctx)[l]


def spherical_bessel_table(lmax, x, ctx=PrecisionContext()):
    """List [j_0(x), ..., j_lmax(x)] for x >= 0.

    Small arguments use the ascending series.  For x above lmax the
    upward recurrence is stable and is used; in between, a downward
    (Miller) recurrence is normalized with the sum rule
    sum (2k+1) j_k^2 = 1.
    """
    if lmax < 0:
        raise ValueError("order must be nonnegative")
    with ctx.local():
        x = _to_mpfr(x)
        if x < 0:
            raise ValueError("spherical_bessel needs x >= 0")
        if x == 0:
            return [mpfr(1)] + [mpfr(0)] * lmax
        if x < 1:
            return [_bessel_series(l, x, ctx.bits) for l in range(lmax + 1)]
        if x > lmax:
            s, c = gmpy2.sin(x), gmpy2.cos(x)
            out = [s / x]
            if lmax >= 1:
                out.append(s / (x * x) - c / x)
            for l in range(1, lmax):
                out.append((2 * l + 1) / x * out[l] - out[l - 1])
            return out
        return _bessel_miller(lmax, x, ctx.bits)


def _bessel_series(l, x, bits):
    # j_l(x) = x^l/(2l+1)!! * sum_k (-x^2/2)^k / (k! (2l+3)(2l+5)...(2l+2k+1))
    lead = x ** l / mpfr(_double_factorial(2 * l + 1))
    y = -x * x / 2
    term = mpfr(1)
    total = term
    eps = mpfr(2) ** (-bits - 8)
    k = 0
    while True:
        k += 1
        term = term * y / (k * (2 * l + 2 * k + 1))
        total += term
        if abs(term) < eps * abs(total):
            break
    return lead * total


def _bessel_miller(lmax, x, bits):
    # start high enough that the ratio j_{N}/j_lmax is far below 2^-bits
    start = lmax + int(x) + 20 + bits // 3
    vals = [mpfr(0)] * (start + 2)
    vals[start] = mpfr(2) ** (-bits)
    for l in range(start, 0, -1):
        vals[l - 1] = (2 * l + 1) / x * vals[l] - vals[l + 1]
        if abs(vals[l - 1]) > mpfr(2) ** (bits // 2):
            # rescale to keep magnitudes tame
            scale = vals[l - 1]
            for j in range(l - 1, start + 1):
                vals[j] /= scale
    norm = gmpy2.fsum([(2 * k + 1) * vals[k] ** 2 for k in range(start + 1)])
    norm = gmpy2.sqrt(norm)
    j0 = gmpy2.sin(x) / x
    j1 = gmpy2.sin(x) / (x * x) - gmpy2.cos(x) / x
    ref, idx = (j0, 0) if abs(j0) >= abs(j1) else (j1, 1)
    sign = 1 if (vals[idx] > 0) == (ref > 0) else -1
    return [sign * vals[k] / norm for k in range(lmax + 1)]


def _double_factorial(n):
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


@lru_cache(maxsize=None)
def _clebsch_exact(l1, m1, l2, m2, l, m):
    """Sign and exact square of a Clebsch-Gordan coefficient (Racah formula)."""
    if m1 + m2 != m:
        return 0, mpq(0)
    if abs(m1) > l1 or abs(m2) > l2 or abs(m) > l:
        return 0, mpq(0)
    if l < abs(l1 - l2) or l > l1 + l2:
        return 0, mpq(0)
    f = math.factorial
    total = mpq(0)
    kmin = max(0, l2 - l - m1, l1 - l + m2)
    kmax = min(l1 + l2 - l, l1 - m1, l2 + m2)
    for k in range(kmin, kmax + 1):
        den = (f(k) * f(l1 + l2 - l - k) * f(l1 - m1 - k) * f(l2 + m2 - k)
               * f(l - l2 + m1 + k) * f(l - l1 - m2 + k))
        total += mpq((-1) ** k, den)
    if total == 0:
        return 0, mpq(0)
    tri = mpq((2 * l + 1) * f(l1 + l2 - l) * f(l1 - l2 + l) * f(-l1 + l2 + l), f(l1 + l2 + l + 1))
    facs = f(l1 + m1) * f(l1 - m1) * f(l2 + m2) * f(l2 - m2) * f(l + m) * f(l - m)
    return (1 if total > 0 else -1), tri * facs * total * total


def clebsch3d(l1, m1, l2, m2, l, m, ctx=PrecisionContext()):
    """Clebsch-Gordan coefficient <l1 m1 l2 m2 | l m>.

    Selection rules are checked and give an exact zero when violated.
    The square of the coefficient is formed exactly and the square root
    is taken once at working precision.
    """
    sign, sq = _clebsch_exact(int(l1), int(m1), int(l2), int(m2), int(l), int(m))
    with ctx.local():
        if sign == 0:
            return mpfr(0)
        return sign * gmpy2.sqrt(mpfr(sq))


def solid_harmonic(l, m, x, y, z, ctx=PrecisionContext()):
    """Racah-normalized regular solid harmonic r^l C_lm evaluated at (x, y, z).

    Uses the Condon-Shortley phase and recurrences in l that never form
    angles, so the result is a polynomial in the Cartesian components.
    """
    if abs(m) > l:
        raise ValueError("|m| exceeds l")
    with ctx.local():
        x, y, z = _to_mpfr(x), _to_mpfr(y), _to_mpfr(z)
        am = abs(m)
        # Q_am^am = (-1)^am (2am-1)!! (x + i y)^am
        xy = mpc(x, y)
        q_prev = None
        q_cur = (-1) ** am * _double_factorial(2 * am - 1) * xy ** am
        r2 = x * x + y * y + z * z
        for ll in range(am, l):
            if q_prev is None:
                q_next = (2 * am + 1) * z * q_cur
            else:
                q_next = ((2 * ll + 1) * z * q_cur - (ll + am) * r2 * q_prev) / (ll - am + 1)
            q_prev, q_cur = q_cur, q_next
        norm = gmpy2.sqrt(mpfr(mpq(math.factorial(l - am), math.factorial(l + am))))
        val = norm * q_cur
        if m < 0:
            val = (-1) ** am * val.conjugate()
        return val


def racah_harmonic(l, m, theta, phi, ctx=PrecisionContext()):
    """Racah-normalized spherical harmonic C_lm(theta, phi) = sqrt(4pi/(2l+1)) Y_lm."""
    with ctx.local():
        theta, phi = _to_mpfr(theta), _to_mpfr(phi)
        st = gmpy2.sin(theta)
        return solid_harmonic(l, m, st * gmpy2.cos(phi), st * gmpy2.sin(phi), gmpy2.cos(theta), ctx)
