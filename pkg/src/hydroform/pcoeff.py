"""
Multipole coefficients P^(l2)_{n,l;n3,l3}(u, w).

Two general backends are provided and are required to agree:

* ``p_series`` extracts a mixed Taylor coefficient with truncated
  bivariate power series (:class:`BiSeries`);
* ``p_gegenbauer`` sums Gegenbauer polynomials in -(u+1)/(2w) weighted by
  the polynomials C_q(u).

Closed forms cover the ground-state row (``p_1s``) and the two dipole
cases at w = (u+1)/2 (``p_dipole0``, ``p_dipole1``).

When u and w are both rational (ints, Fractions, decimal strings) the
backends run in exact rational arithmetic and round once at the end.
"""
from dataclasses import dataclass, field
from functools import lru_cache
import math

from gmpy2 import mpfr, mpq

from .errors import BackendDisagreement, DegenerateU, IndexViolation
from .exactmath import (PrecisionContext, _to_mpfr, as_rational, binomial_exact,
                        gegenbauer_table)

BACKENDS = ("series", "gegenbauer", "closed_1s", "closed_dipole", "recurrence")


@dataclass(frozen=True)
class PIndex:
    n: int
    l: int
    n3: int
    l3: int
    l2: int

    def __post_init__(self):
        for name in ("n", "l", "n3", "l3", "l2"):
            val = getattr(self, name)
            try:
                ok = int(val) == val
            except (TypeError, ValueError):
                ok = False
            if not ok:
                raise IndexViolation("%s must be an integer" % name)
            object.__setattr__(self, name, int(val))

    @property
    def L(self):
        """Order of the tau derivative, l - l2 + l3 + 1."""
        return self.l - self.l2 + self.l3 + 1

    @property
    def qmax(self):
        return self.n + self.n3 - self.l - self.l3

    def is_valid(self):
        return (min(self.n, self.l, self.n3, self.l3, self.l2) >= 0
                and self.l <= self.n and self.l3 <= self.n3 and self.L >= 0)

    def validate(self):
        if min(self.n, self.l, self.n3, self.l3, self.l2) < 0:
            raise IndexViolation("indices must be nonnegative: %s" % (self,))
        if self.l > self.n:
            raise IndexViolation("l exceeds n in %s" % (self,))
        if self.l3 > self.n3:
            raise IndexViolation("l3 exceeds n3 in %s" % (self,))
        if self.L < 0:
            raise IndexViolation("l - l2 + l3 + 1 < 0 in %s" % (self,))
        return self

    def is_physical(self):
        """Triangle and parity rule needed when the index enters a form factor."""
        return (self.is_valid() and abs(self.l - self.l3) <= self.l2 <= self.l + self.l3
                and (self.l + self.l2 + self.l3) % 2 == 0)

    def swapped(self):
        return PIndex(self.n3, self.l3, self.n, self.l, self.l2)

    def as_tuple(self):
        return (self.n, self.l, self.n3, self.l3, self.l2)


@dataclass(frozen=True)
class PValue:
    index: PIndex
    u: object
    w: object
    value: object
    backend: str
    bits: int = 0
    steps: int = 0
    note: str = field(default="", compare=False)


def admissible_indices(n_max, n3_max=None, physical=False):
    """All valid PIndex tuples with n <= n_max, n3 <= n3_max in a fixed order."""
    if n3_max is None:
        n3_max = n_max
    out = []
    for n in range(n_max + 1):
        for l in range(n + 1):
            for n3 in range(n3_max + 1):
                for l3 in range(n3 + 1):
                    for l2 in range(l + l3 + 2):
                        idx = PIndex(n, l, n3, l3, l2)
                        if physical and not idx.is_physical():
                            continue
                        out.append(idx)
    return out


def _as_index(idx):
    if isinstance(idx, PIndex):
        return idx.validate()
    return PIndex(*idx).validate()


def _numbers(u, w, ctx):
    """Exact mpq pair when both are rational, else mpfr pair (inside ctx)."""
    ru, rw = as_rational(u), as_rational(w)
    if ru is not None and rw is not None:
        return ru, rw, True
    return _to_mpfr(u), _to_mpfr(w), False


class BiSeries:
    """Truncated power series in (tau, t).

    ``c[i][j]`` is the coefficient of tau^i t^j for i <= tau_order and
    j <= t_order.  All operations are exact up to those orders.
    """

    def __init__(self, coeffs, tau_order, t_order):
        self.tau_order = tau_order
        self.t_order = t_order
        self.c = coeffs

    @classmethod
    def zeros(cls, tau_order, t_order, zero=0):
        return cls([[zero] * (t_order + 1) for _ in range(tau_order + 1)], tau_order, t_order)

    @classmethod
    def from_univariate_sum(cls, g, tau_order, t_order):
        """Series of g(tau + t) from the coefficients g[k] of g(s)."""
        need = tau_order + t_order
        if len(g) <= need:
            raise ValueError("univariate series too short for the requested orders")
        rows = []
        for i in range(tau_order + 1):
            rows.append([math.comb(i + j, i) * g[i + j] for j in range(t_order + 1)])
        return cls(rows, tau_order, t_order)

    @classmethod
    def tau_poly(cls, coeffs, tau_order, t_order, zero=0):
        out = cls.zeros(tau_order, t_order, zero)
        for i, a in enumerate(coeffs[:tau_order + 1]):
            out.c[i][0] = a
        return out

    @classmethod
    def t_poly(cls, coeffs, tau_order, t_order, zero=0):
        out = cls.zeros(tau_order, t_order, zero)
        for j, a in enumerate(coeffs[:t_order + 1]):
            out.c[0][j] = a
        return out

    def coeff(self, i, j):
        if i > self.tau_order or j > self.t_order or i < 0 or j < 0:
            return 0
        return self.c[i][j]

    def __add__(self, other):
        T, S = min(self.tau_order, other.tau_order), min(self.t_order, other.t_order)
        return BiSeries([[self.c[i][j] + other.c[i][j] for j in range(S + 1)] for i in range(T + 1)], T, S)

    def __mul__(self, other):
        if not isinstance(other, BiSeries):
            return BiSeries([[a * other for a in row] for row in self.c], self.tau_order, self.t_order)
        T, S = min(self.tau_order, other.tau_order), min(self.t_order, other.t_order)
        out = [[0] * (S + 1) for _ in range(T + 1)]
        nz_other = [(i, j, other.c[i][j]) for i in range(T + 1) for j in range(S + 1) if other.c[i][j] != 0]
        for i1 in range(T + 1):
            row = self.c[i1]
            for j1 in range(S + 1):
                a = row[j1]
                if a == 0:
                    continue
                for i2, j2, b in nz_other:
                    if i1 + i2 <= T and j1 + j2 <= S:
                        out[i1 + i2][j1 + j2] = out[i1 + i2][j1 + j2] + a * b
        return BiSeries(out, T, S)

    __rmul__ = __mul__

    def diff_tau(self, k=1):
        """k-th derivative in tau; the tau order drops by k."""
        T = self.tau_order - k
        if T < 0:
            raise ValueError("derivative order exceeds truncation order")
        rows = []
        for i in range(T + 1):
            fall = math.perm(i + k, k)
            rows.append([fall * a for a in self.c[i + k]])
        return BiSeries(rows, T, self.t_order)

    def diff_t(self, k=1):
        S = self.t_order - k
        if S < 0:
            raise ValueError("derivative order exceeds truncation order")
        rows = [[math.perm(j + k, k) * row[j + k] for j in range(S + 1)] for row in self.c]
        return BiSeries(rows, self.tau_order, S)

    def value_at_zero(self):
        return self.c[0][0]

    def derivative_at_zero(self, i, j):
        """d^i/dtau^i d^j/dt^j at the origin."""
        return math.factorial(i) * math.factorial(j) * self.coeff(i, j)


def _power_series_coeffs(b, alpha, order):
    """Coefficients of b(s)**alpha for a quadratic b = b0 + b1 s + b2 s^2.

    Uses the power recurrence k b0 f_k = sum_j (j(alpha+1) - k) b_j f_{k-j}.
    """
    b0, b1, b2 = b
    f = [b0 ** alpha]
    for k in range(1, order + 1):
        acc = (alpha + 1 - k) * b1 * f[k - 1]
        if k >= 2:
            acc += (2 * (alpha + 1) - k) * b2 * f[k - 2]
        f.append(acc / (k * b0))
    return f


_G_CACHE = {}
_G_CACHE_SIZE = 256


def _generating_coeffs(w2, b1, l2, order, bits):
    """Cached coefficients of (w2 + b1 s + s^2)^(-l2-1) up to ``order``.

    The recurrence is sequential, so a longer list extends a shorter one
    without changing its entries.  Keyed on the exact values and precision.
    """
    key = (type(w2), w2, b1, l2, bits)
    g = _G_CACHE.get(key)
    if g is None or len(g) <= order:
        if len(_G_CACHE) >= _G_CACHE_SIZE:
            _G_CACHE.clear()
        g = _power_series_coeffs((w2, b1, 1), -(l2 + 1), max(order, 2 * (len(g) if g else 0)))
        _G_CACHE[key] = g
    return g


def p_series(idx, u, w, ctx=PrecisionContext()):
    """P by mixed-derivative extraction with bivariate series arithmetic."""
    idx = _as_index(idx)
    n, l, n3, l3, l2 = idx.as_tuple()
    with ctx.local():
        u_, w_, exact = _numbers(u, w, ctx)
        if u_ == 0:
            raise DegenerateU("u = 0")
        zero = mpq(0) if exact else mpfr(0)
        L = idx.L
        tau_order = (n - l) + L
        t_order = n3 - l3
        g = _generating_coeffs(w_ * w_, 1 + u_, l2, tau_order + t_order, ctx.bits)
        G = BiSeries.from_univariate_sum(g, tau_order, t_order)
        H = G.diff_tau(L)
        n1 = n + l + 1
        upow = [math.comb(n1, i) * u_ ** (n1 - i) for i in range(n - l + 1)]
        tpow = [math.comb(n3 + l3 + 1, j) for j in range(n3 - l3 + 1)]
        # only the (n-l, n3-l3) coefficient of upow(tau) tpow(t) H is needed
        acc = zero
        for i, a in enumerate(upow):
            row = H.c[n - l - i]
            for j, b in enumerate(tpow):
                acc = acc + a * b * row[t_order - j]
        val = math.factorial(n - l) * math.factorial(t_order) * acc
        val = val / (u_ ** l * math.factorial(n + l + 1) * math.factorial(n3 + l3 + 1))
        return PValue(idx, u, w, mpfr(val), "series", ctx.bits)


@lru_cache(maxsize=None)
def c_q_coefficients(idx, q):
    """Exact coefficients of C_q(u) as a polynomial in u (index m holds u^m)."""
    n, l, n3, l3, l2 = idx.as_tuple()
    if q < 0 or q > idx.qmax:
        raise IndexViolation("q = %d outside 0..%d" % (q, idx.qmax))
    f = math.factorial
    top = f(idx.L + q)
    out = []
    for m in range(0, min(q, n - l) + 1):
        if q - m > n3 - l3:
            out.append(mpq(0))
            continue
        out.append(mpq(binomial_exact(n - l, m) * binomial_exact(n3 - l3, q - m) * top,
                       f(2 * l + 1 + m) * f(2 * l3 + q + 1 - m)))
    return tuple(out)


def _horner(coeffs, x):
    acc = 0
    for a in reversed(coeffs):
        acc = acc * x + a
    return acc


def c_q(idx, q, u, ctx=PrecisionContext()):
    """The polynomial C_q(u) from its exact coefficients."""
    idx = _as_index(idx)
    coeffs = c_q_coefficients(idx, q)
    with ctx.local():
        ru = as_rational(u)
        return mpfr(_horner(coeffs, ru if ru is not None else _to_mpfr(u)))


def c_q_hypergeometric(idx, q, u, ctx=PrecisionContext()):
    """C_q(u) through its 3F2 representations (two ranges of q)."""
    from .exactmath import hyp3f2_terminating
    idx = _as_index(idx)
    n, l, n3, l3, l2 = idx.as_tuple()
    if q < 0 or q > idx.qmax:
        raise IndexViolation("q outside range")
    f = math.factorial
    with ctx.local():
        ru = as_rational(u)
        uu = ru if ru is not None else _to_mpfr(u)
        if q <= n3 - l3:
            pre = mpq(binomial_exact(n3 - l3, q) * f(idx.L + q), f(2 * l3 + q + 1) * f(2 * l + 1))
            h = hyp3f2_terminating(-q, l - n, -q - 2 * l3 - 1, 2 * l + 2, n3 - l3 - q + 1, -uu, ctx)
            return pre * h
        s = q - n3 + l3
        pre = mpq(binomial_exact(n - l, s) * f(idx.L + q), f(2 * l + 1 + s) * f(n3 + l3 + 1))
        # second lower parameter is 2l + 2 + s (term ratio of the shifted sum)
        h = hyp3f2_terminating(l + l3 - n - n3 + q, l3 - n3, -l3 - n3 - 1, s + 1, 2 * l + 2 + s, -uu, ctx)
        return pre * uu ** s * h


def p_gegenbauer(idx, u, w, ctx=PrecisionContext()):
    """P as a finite sum of Gegenbauer polynomials weighted by C_q(u)."""
    idx = _as_index(idx)
    n, l, n3, l3, l2 = idx.as_tuple()
    with ctx.local():
        u_, w_, exact = _numbers(u, w, ctx)
        if u_ == 0:
            raise DegenerateU("u = 0")
        xi = -(u_ + 1) / (2 * w_)
        L = idx.L
        qmax = idx.qmax
        geg = _gegenbauer_exact(l2 + 1, L + qmax, xi) if exact else gegenbauer_table(l2 + 1, L + qmax, xi, ctx)
        total = 0
        winv = 1 / w_
        wq = 1
        for q in range(qmax + 1):
            total = total + wq * _horner(c_q_coefficients(idx, q), u_) * geg[L + q]
            wq = wq * winv
        val = u_ ** (l + 1) * total / w_ ** (l + l2 + l3 + 3)
        return PValue(idx, u, w, mpfr(val), "gegenbauer", ctx.bits)


def _gegenbauer_exact(lam, qmax, x):
    out = [mpq(1)]
    if qmax >= 1:
        out.append(2 * lam * x)
    for k in range(2, qmax + 1):
        out.append((2 * (k + lam - 1) * x * out[k - 1] - (k + 2 * lam - 2) * out[k - 2]) / k)
    return out


def _rel_diff(a, b, floor):
    den = max(abs(a), abs(b), floor)
    return abs(a - b) / den


def p_value(idx, u, w, ctx=PrecisionContext(), backend="auto", max_doublings=3):
    """P from the chosen backend.

    ``auto`` evaluates both general backends and requires relative
    agreement within 2**(-bits/2) (floored at 1e-30 in magnitude).  On
    disagreement the pair is recomputed at doubled precision, up to
    ``max_doublings`` times, before raising BackendDisagreement.
    """
    if backend == "series":
        return p_series(idx, u, w, ctx)
    if backend == "gegenbauer":
        return p_gegenbauer(idx, u, w, ctx)
    if backend != "auto":
        raise ValueError("unknown backend %r" % (backend,))
    target = ctx.tol(0.5)
    floor = ctx.real("1e-30")
    work = ctx
    for attempt in range(max_doublings + 1):
        a = p_series(idx, u, w, work)
        b = p_gegenbauer(idx, u, w, work)
        with work.local():
            diff = _rel_diff(a.value, b.value, floor)
        if diff <= target:
            return PValue(a.index, u, w, ctx.real(a.value), "series", work.bits,
                          note="agrees with gegenbauer to %.3e" % float(diff))
        work = work.doubled()
    raise BackendDisagreement("series and gegenbauer backends differ by %.3e for %s" % (float(diff), idx))


def p_1s(n3, l3, u, w, ctx=PrecisionContext()):
    """Closed form for the index (0, 0; n3, l3) with l2 = l3.

    Written with D_j = v^j C^{l3+1}_j(x), which obeys a recurrence in the
    finite products x*v and v^2 = w^2 - u, so v = 0 needs no special case.
    """
    idx = PIndex(0, 0, n3, l3, l3).validate()
    with ctx.local():
        u_, w_, exact = _numbers(u, w, ctx)
        lam = l3 + 1
        d = n3 - l3
        xv = (w_ * w_ - (u_ + 1) / 2) / w_
        v2 = w_ * w_ - u_
        D = [1, 2 * lam * xv]
        for j in range(2, d + 1):
            D.append((2 * (j + lam - 1) * xv * D[j - 1] - (j + 2 * lam - 2) * v2 * D[j - 2]) / j)
        term = -2 * (n3 + 1) * (w_ - xv) * D[d]
        if d >= 1:
            term = term + (n3 + l3 + 1) * u_ * D[d - 1]
        val = mpq(math.factorial(d), math.factorial(n3 + l3 + 1)) * u_ * term / w_ ** (2 * l3 + 3 + d)
        return PValue(idx, u, w, mpfr(val), "closed_1s", ctx.bits)


# Laurent polynomials in e = (u - 1)/2 with exact coefficients, stored as
# {exponent: mpq}.  With u = 1 + 2e and w = (u+1)/2 = 1 + e, the dipole
# closed forms become Laurent polynomials in e divided by a power of w,
# and the apparent pole at u = 1 cancels exactly.

def _lp_mul(a, b):
    out = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            out[ea + eb] = out.get(ea + eb, 0) + ca * cb
    return {e: c for e, c in out.items() if c != 0}


def _lp_add(a, b):
    out = dict(a)
    for e, c in b.items():
        out[e] = out.get(e, 0) + c
    return {e: c for e, c in out.items() if c != 0}


def _lp_pow(a, k):
    out = {0: mpq(1)}
    for _ in range(k):
        out = _lp_mul(out, a)
    return out


_U = {0: mpq(1), 1: mpq(2)}


def _hyp2f1_coeffs(a, b, c):
    """Exact coefficients of the terminating 2F1(a, b; c; Z) in powers of Z."""
    out = [mpq(1)]
    nterm = min(x for x in (-a, -b) if x >= 0) if (a <= 0 or b <= 0) else None
    for j in range(nterm):
        out.append(out[-1] * (a + j) * (b + j) / ((c + j) * (j + 1)))
    return out


@lru_cache(maxsize=None)
def _dipole0_laurent(n, l, n3):
    # u^{n+1}/(2l+1)! (w-1)^{n3-n-1} w^{-(n+n3+3)} [n3-n+2(n+1)(1-w)] z^{l-n} 2F1(l-n, l-n3; 2l+2; z)
    # with z = u/((w-u)(w-1)) = -u/e^2; the w power is applied by the caller.
    coeffs = _hyp2f1_coeffs(l - n, l - n3, 2 * l + 2)
    bracket = {0: mpq(n3 - n), 1: mpq(-2 * (n + 1))}
    total = {}
    for j, cj in enumerate(coeffs):
        # z^{l-n+j} = (-1)^{n-l-j} u^{-(n-l-j)} e^{2(n-l-j)}
        p = n - l - j
        term = {n3 - n - 1 + 2 * p: cj * (-1) ** p}
        term = _lp_mul(term, _lp_pow(_U, n + 1 - p))
        total = _lp_add(total, term)
    total = _lp_mul(total, bracket)
    f = mpq(1, math.factorial(2 * l + 1))
    return {e: c * f for e, c in total.items()}


@lru_cache(maxsize=None)
def _dipole1_laurent(n, l, n1):
    # 2(-1)^{n1}/(3(2l+1)!) Z^{l+1} r^{n+n1} sum_k a_k f_k, with
    # r = (1-u)/(1+u) = -e/w, Z = -4u/(1-u)^2 = -u/e^2 and
    # f_k = r^{2-k} ((n+1)u - n1 - 2 + k)/(1+u)^2 2F1(l-n, l-1-n1+k; 2l+2; Z).
    # Multiplying by w^{n+n1+4} clears every power of w.
    a = [(n1 + l + 1) * (n1 + l + 2), 2 * (n1 + l + 1) * (n1 - l + 1), (n1 - l + 1) * (n1 - l)]
    W = {0: mpq(1), 1: mpq(1)}
    total = {}
    for k in range(3):
        if a[k] == 0:
            continue
        coeffs = _hyp2f1_coeffs(l - n, l - 1 - n1 + k, 2 * l + 2)
        lin = {0: mpq(n - n1 - 1 + k), 1: mpq(2 * (n + 1))}   # (n+1)u - n1 - 2 + k
        rp = n + n1 + 2 - k
        base = _lp_mul(lin, _lp_pow(W, k))
        base = {e + rp: c * (-1) ** rp / 4 for e, c in base.items()}
        for j, cj in enumerate(coeffs):
            zp = l + 1 + j
            term = {-2 * zp: cj * (-1) ** zp * a[k]}
            term = _lp_mul(term, _lp_pow(_U, zp))
            total = _lp_add(total, _lp_mul(term, base))
    f = mpq(2 * (-1) ** n1, 3 * math.factorial(2 * l + 1))
    return {e: c * f for e, c in total.items()}


def _eval_laurent(poly, e):
    if not poly:
        return 0
    if min(poly) < 0:
        if e == 0:
            raise DegenerateU("closed form has an uncancelled pole at u = 1")
    total = 0
    for ex, c in poly.items():
        total = total + c * e ** ex
    return total


def p_dipole0(n, l, n3, u, ctx=PrecisionContext()):
    """P^(0)_{n,l;n3,l} at w = (u+1)/2.

    At u = 1 the removable singularity of the closed form cancels exactly
    and the Kronecker-delta limit is returned.
    """
    idx = PIndex(n, l, n3, l, 0).validate()
    if l > min(n, n3):
        raise IndexViolation("need l <= min(n, n3)")
    with ctx.local():
        ru = as_rational(u)
        uu = ru if ru is not None else _to_mpfr(u)
        if uu <= 0:
            raise DegenerateU("u must be positive")
        e = (uu - 1) / 2
        w = (uu + 1) / 2
        val = _eval_laurent(_dipole0_laurent(n, l, n3), e) / w ** (n + n3 + 3)
        return PValue(idx, u, mpfr(w), mpfr(val), "closed_dipole", ctx.bits)


def p_dipole0_gauss(n, l, n3, u, ctx=PrecisionContext()):
    """The same object in the Gauss-function arrangement with Z = -4u/(1-u)^2.

    Singular at u = 1 (raises DegenerateU); used as an independent check.
    """
    from .exactmath import hyp2f1_terminating
    PIndex(n, l, n3, l, 0).validate()
    with ctx.local():
        ru = as_rational(u)
        uu = ru if ru is not None else _to_mpfr(u)
        if uu == 1:
            raise DegenerateU("u = 1 makes the argument of the Gauss function infinite")
        Z = -4 * uu / (1 - uu) ** 2
        val = (4 * (-1) ** n3 * Z ** (l + 1) * ((1 - uu) / (1 + uu)) ** (n + n3 + 1)
               * (n3 + 1 - (n + 1) * uu) / (1 + uu) ** 2 / math.factorial(2 * l + 1))
        return mpfr(val) * hyp2f1_terminating(l - n, l - n3, 2 * l + 2, Z, ctx)


def dipole_f(k, n, l, n1, u, ctx=PrecisionContext()):
    """The coefficient f_k (k = 0, 1, 2) of the l2 = 1 dipole bracket."""
    from .exactmath import hyp2f1_terminating
    if k not in (0, 1, 2):
        raise IndexViolation("k must be 0, 1 or 2")
    with ctx.local():
        ru = as_rational(u)
        uu = ru if ru is not None else _to_mpfr(u)
        if uu == 1:
            raise DegenerateU("f_k is singular at u = 1")
        Z = -4 * uu / (1 - uu) ** 2
        pre = ((1 - uu) / (1 + uu)) ** (2 - k) * ((n + 1) * uu - n1 - 2 + k) / (1 + uu) ** 2
        if pre == 0:
            return mpfr(0)
        return mpfr(pre) * hyp2f1_terminating(l - n, l - 1 - n1 + k, 2 * l + 2, Z, ctx)


def p_dipole1(n, l, n1, u, ctx=PrecisionContext()):
    """P^(1)_{n,l;n1,l-1} at w = (u+1)/2 from the three-term f_k bracket."""
    if l < 1 or l > n or l - 1 > n1:
        raise IndexViolation("need 1 <= l <= n and l - 1 <= n1")
    idx = PIndex(n, l, n1, l - 1, 1).validate()
    with ctx.local():
        ru = as_rational(u)
        uu = ru if ru is not None else _to_mpfr(u)
        if uu <= 0:
            raise DegenerateU("u must be positive")
        e = (uu - 1) / 2
        w = (uu + 1) / 2
        val = _eval_laurent(_dipole1_laurent(n, l, n1), e) / w ** (n + n1 + 4)
        return PValue(idx, u, mpfr(w), mpfr(val), "closed_dipole", ctx.bits)


def p_symmetry_map(idx, u, w, ctx=PrecisionContext()):
    """Swap map: P(idx, u, w) = multiplier * P(swapped, 1/u, w/u).

    Substituting t -> u tau, tau -> u t in the generating derivative gives
    the multiplier u^-(l2+1).
    """
    idx = _as_index(idx)
    with ctx.local():
        ru, rw = as_rational(u), as_rational(w)
        if (ru if ru is not None else _to_mpfr(u)) == 0:
            raise DegenerateU("u = 0")
        if ru is not None and rw is not None:
            return idx.swapped(), 1 / ru, rw / ru, mpfr(ru ** -(idx.l2 + 1))
        uu, ww = _to_mpfr(u), _to_mpfr(w)
        return idx.swapped(), 1 / uu, ww / uu, uu ** -(idx.l2 + 1)
