from fractions import Fraction
import math

import pytest
import sympy
from gmpy2 import mpfr, mpq
from hypothesis import given, settings, strategies as st

from hydroform.errors import BackendDisagreement, DegenerateU, IndexViolation
from hydroform.exactmath import PrecisionContext
from hydroform.pcoeff import (BiSeries, PIndex, admissible_indices, c_q, c_q_coefficients,
                              c_q_hypergeometric, dipole_f, p_1s, p_dipole0, p_dipole0_gauss,
                              p_dipole1, p_gegenbauer, p_series, p_symmetry_map, p_value)


def rel(a, b, ctx, floor="1e-30"):
    with ctx.local():
        return abs(a - b) / max(abs(a), abs(b), mpfr(floor))


# oracle: the defining derivative formula evaluated symbolically

def _p_symbolic(n, l, n3, l3, l2, u, w):
    t, tau = sympy.symbols("t tau")
    L = l - l2 + l3 + 1
    g = (u + tau) ** (n + l + 1) * (1 + t) ** (n3 + l3 + 1) \
        * sympy.diff((w ** 2 + (1 + u) * (t + tau) + (t + tau) ** 2) ** (-l2 - 1), tau, L)
    d = sympy.diff(g, tau, n - l, t, n3 - l3).subs({t: 0, tau: 0})
    return sympy.nsimplify(d / (u ** l * math.factorial(n + l + 1) * math.factorial(n3 + l3 + 1)))


@pytest.mark.parametrize("idx", [(0, 0, 0, 0, 0), (1, 0, 1, 1, 1), (2, 1, 1, 0, 1), (2, 2, 1, 1, 3), (3, 1, 2, 2, 0)])
def test_series_matches_symbolic_definition(ctx, idx):
    u, w = sympy.Rational(7, 10), sympy.Rational(11, 10)
    ref = _p_symbolic(*idx, u, w)
    val = p_series(PIndex(*idx), "0.7", "1.1", ctx).value
    with ctx.local():
        assert abs(val - mpfr(mpq(int(ref.p), int(ref.q)))) <= ctx.tol(0.95) * max(1, abs(val))


def test_laguerre_product_identity():
    x = sympy.symbols("x")
    u = sympy.Rational(3, 5)
    for (n, l, n3, l3, l2) in [(3, 1, 2, 0, 1), (4, 0, 3, 2, 2), (2, 2, 4, 1, 1)]:
        idx = PIndex(n, l, n3, l3, l2)
        prod = sympy.expand(sympy.assoc_laguerre(n - l, 2 * l + 1, u * x) * sympy.assoc_laguerre(n3 - l3, 2 * l3 + 1, x))
        const = sympy.Rational(math.factorial(n - l) * math.factorial(n3 - l3),
                               math.factorial(n + l + 1) * math.factorial(n3 + l3 + 1))
        for q in range(idx.qmax + 1):
            coef = prod.coeff(x, q)
            expected = (-1) ** q * math.factorial(idx.L + q) * const * coef
            got = sum(sympy.Rational(int(c.numerator), int(c.denominator)) * u ** m
                      for m, c in enumerate(c_q_coefficients(idx, q)))
            assert got == expected


# frozen values (computed once, agreed by both backends at 256 bits)

FROZEN = {
    (2, 1, 1, 0, 1): ("0.7", "1.1"),
    (1, 0, 3, 2, 2): ("2", "1.4"),
    (5, 3, 4, 2, 1): ("1.3", "1.8"),
}


def test_frozen_values(ctx):
    ctx2 = PrecisionContext(bits=256)
    for idx, (u, w) in FROZEN.items():
        a = p_series(PIndex(*idx), u, w, ctx2).value
        b = p_gegenbauer(PIndex(*idx), u, w, ctx2).value
        assert rel(a, b, ctx2) < ctx2.tol(0.9)
    with ctx.local():
        assert abs(p_series(PIndex(2, 1, 1, 0, 1), "0.7", "1.1", ctx).value
                   - mpfr("0.04388161511183541785492064294920061918500")) < mpfr("1e-38")


# spec examples

def test_p_examples(ctx):
    with ctx.local():
        for backend in (p_series, p_gegenbauer):
            assert backend(PIndex(0, 0, 0, 0, 0), 1, 1, ctx).value == -2
            # the off-diagonal zero sits on the dipole line u = 1/2, w = 3/4
            assert backend(PIndex(1, 0, 0, 0, 0), "0.5", "0.75", ctx).value == 0
            assert backend(PIndex(1, 0, 0, 0, 0), 1, 1, ctx).value == 1
    a = p_series(PIndex(2, 1, 1, 0, 1), "0.7", "1.1", ctx).value
    b = p_gegenbauer(PIndex(2, 1, 1, 0, 1), "0.7", "1.1", ctx).value
    assert rel(a, b, ctx) <= ctx.tol(0.5)


def test_p_1s_examples(ctx):
    for n3 in range(6):
        for l3 in range(n3 + 1):
            a = p_1s(n3, l3, "0.8", "1.05", ctx).value
            b = p_series(PIndex(0, 0, n3, l3, l3), "0.8", "1.05", ctx).value
            c = p_gegenbauer(PIndex(0, 0, n3, l3, l3), "0.8", "1.05", ctx).value
            assert rel(a, b, ctx) <= ctx.tol(0.5)
            assert rel(a, c, ctx) <= ctx.tol(0.5)
    with ctx.local():
        assert p_1s(0, 0, 1, 1, ctx).value == -2


def test_c_q_examples(ctx):
    f = math.factorial
    for idx in [PIndex(2, 0, 2, 0, 0), PIndex(3, 1, 2, 1, 1), PIndex(4, 2, 3, 0, 2)]:
        with ctx.local():
            expected = mpfr(mpq(f(idx.L), f(2 * idx.l + 1) * f(2 * idx.l3 + 1)))
            assert c_q(idx, 0, "0.37", ctx) == expected
        for q in range(idx.qmax + 1):
            a = c_q(idx, q, "0.5", ctx)
            b = c_q_hypergeometric(idx, q, "0.5", ctx)
            assert rel(a, b, ctx) <= ctx.tol(0.9)
    with pytest.raises(IndexViolation):
        c_q(PIndex(1, 0, 1, 0, 0), 5, "0.5", ctx)


def test_dipole0_examples(ctx):
    f = math.factorial
    for n in range(5):
        for n3 in range(5):
            u = Fraction(n3 + 1, n + 1)
            for l in range(min(n, n3) + 1):
                val = p_dipole0(n, l, n3, u, ctx).value
                with ctx.local():
                    if n == n3:
                        assert val == mpfr(mpq(-2 * (n + 1) * f(n - l), f(n + l + 1)))
                    else:
                        assert val == 0
    a = p_dipole0(3, 1, 2, "0.6", ctx).value
    b = p_series(PIndex(3, 1, 2, 1, 0), "0.6", "0.8", ctx).value
    c = p_dipole0_gauss(3, 1, 2, "0.6", ctx)
    assert rel(a, b, ctx) <= ctx.tol(0.9)
    assert rel(a, c, ctx) <= ctx.tol(0.8)
    with pytest.raises(DegenerateU):
        p_dipole0_gauss(2, 0, 2, 1, ctx)
    with pytest.raises(IndexViolation):
        p_dipole0(1, 2, 3, "0.5", ctx)


def test_dipole1_examples(ctx):
    a = p_dipole1(2, 1, 1, "0.5", ctx).value
    b = p_series(PIndex(2, 1, 1, 0, 1), "0.5", "0.75", ctx).value
    assert rel(a, b, ctx) <= ctx.tol(0.9)
    for n in range(1, 6):
        for n1 in range(6):
            if n1 == n:
                continue
            u = Fraction(n1 + 1, n + 1)
            for l in range(1, n + 1):
                if l - 1 <= n1:
                    assert dipole_f(1, n, l, n1, u, ctx) == 0
    # the closed form needs no special case at u = 1
    a = p_dipole1(3, 2, 3, 1, ctx).value
    b = p_series(PIndex(3, 2, 3, 1, 1), 1, 1, ctx).value
    assert rel(a, b, ctx) <= ctx.tol(0.9)
    with pytest.raises(IndexViolation):
        p_dipole1(2, 0, 1, "0.5", ctx)


def test_dipole_symmetry_exponent(ctx):
    # P^(1)_{n,l;n',l'}(u) = u^(-2) P^(1)_{n',l';n,l}(1/u) at w = (u+1)/2
    u = Fraction(3, 7)
    for n, l, n1 in [(2, 1, 1), (3, 2, 4), (4, 1, 2)]:
        left = p_dipole1(n, l, n1, u, ctx).value
        right = p_series(PIndex(n1, l - 1, n, l, 1), 1 / u, (1 / u + 1) / 2, ctx).value
        with ctx.local():
            assert abs(left - mpfr(mpq(u.denominator, u.numerator)) ** 2 * right) <= ctx.tol(0.9) * abs(left)
            naive = mpfr(mpq(u.numerator, u.denominator)) ** (n + n1 + 2 * (l - 1) + 2) * right
            assert abs(left - naive) > mpfr("1e-3") * abs(left)


def test_symmetry_examples(ctx):
    idx, u, w, mult = p_symmetry_map(PIndex(0, 0, 0, 0, 0), 1, 1, ctx)
    assert (idx, u, w) == (PIndex(0, 0, 0, 0, 0), 1, 1) and mult == 1
    for index, u, w in [((2, 1, 1, 0, 1), "0.7", "1.1"), ((1, 0, 3, 2, 2), "2", "1.4")]:
        left = p_series(PIndex(*index), u, w, ctx).value
        sidx, su, sw, mult = p_symmetry_map(PIndex(*index), u, w, ctx)
        right = p_series(sidx, su, sw, ctx).value
        with ctx.local():
            assert rel(left, mult * right, ctx) <= ctx.tol(0.5)
    with pytest.raises(DegenerateU):
        p_symmetry_map(PIndex(1, 0, 1, 0, 0), 0, 1, ctx)


def test_index_violations(ctx):
    with pytest.raises(IndexViolation):
        p_series(PIndex(1, 0, 1, 0, 3), "0.5", 1, ctx)
    with pytest.raises(IndexViolation):
        p_gegenbauer(PIndex(1, 2, 1, 0, 0), "0.5", 1, ctx)
    with pytest.raises(IndexViolation):
        PIndex(0, 0, 0, 0, "0.5")
    assert not PIndex(0, 0, 0, 0, 2).is_valid()
    assert PIndex(1, 1, 1, 0, 1).is_physical()
    assert not PIndex(1, 1, 1, 0, 2).is_physical()


def test_degenerate_u(ctx):
    with pytest.raises(DegenerateU):
        p_gegenbauer(PIndex(0, 0, 0, 0, 0), 0, 1, ctx)
    with pytest.raises(DegenerateU):
        p_dipole0(1, 0, 1, 0, ctx)


def test_admissible_count():
    # l2 runs over 0..l+l3+1 for every (n, l, n3, l3)
    count = sum(l + l3 + 2 for n in range(3) for l in range(n + 1) for n3 in range(3) for l3 in range(n3 + 1))
    assert len(admissible_indices(2, 2)) == count == 120
    assert len(admissible_indices(8, 8)) == 14850


def test_auto_backend(ctx):
    pv = p_value(PIndex(3, 1, 2, 0, 1), "0.9", "1.3", ctx, "auto")
    assert pv.backend == "series" and "agrees" in pv.note
    with pytest.raises(ValueError):
        p_value(PIndex(0, 0, 0, 0, 0), 1, 1, ctx, "bogus")


def test_auto_backend_doubles_then_gives_up(ctx, monkeypatch):
    import hydroform.pcoeff as pc
    calls = []
    real = pc.p_gegenbauer

    def skewed(idx, u, w, c):
        calls.append(c.bits)
        pv = real(idx, u, w, c)
        with c.local():
            return pc.PValue(pv.index, u, w, pv.value * (1 + mpfr(2) ** -40), "gegenbauer", c.bits)

    monkeypatch.setattr(pc, "p_gegenbauer", skewed)
    with pytest.raises(BackendDisagreement):
        pc.p_value(PIndex(1, 0, 1, 0, 0), "0.5", 1, ctx, "auto", max_doublings=2)
    assert calls == [128, 256, 512]


def test_biseries_arithmetic():
    a = BiSeries.tau_poly([1, 2], 3, 2)
    b = BiSeries.t_poly([3, 1], 3, 2)
    c = a * b
    assert c.coeff(1, 1) == 2 and c.coeff(0, 0) == 3
    assert (a + b).coeff(0, 0) == 4
    assert c.derivative_at_zero(1, 1) == 2
    assert c.diff_tau().coeff(0, 1) == 2


# properties

uw = st.tuples(st.fractions(Fraction(1, 5), 3, max_denominator=60), st.fractions(Fraction(1, 5), 3, max_denominator=60))


@settings(max_examples=25, deadline=None)
@given(data=st.data(), pair=uw)
def test_backends_agree(data, pair):
    ctx = PrecisionContext()
    u, w = (str(x.numerator / x.denominator) for x in pair)
    idx = data.draw(st.sampled_from(admissible_indices(5, 5)))
    a = p_series(idx, u, w, ctx).value
    b = p_gegenbauer(idx, u, w, ctx).value
    assert rel(a, b, ctx) <= ctx.tol(0.5)


@settings(max_examples=25, deadline=None)
@given(data=st.data(), pair=uw)
def test_symmetry_property(data, pair):
    ctx = PrecisionContext()
    u, w = pair
    idx = data.draw(st.sampled_from(admissible_indices(4, 4)))
    left = p_series(idx, u, w, ctx).value
    sidx, su, sw, mult = p_symmetry_map(idx, u, w, ctx)
    right = p_series(sidx, su, sw, ctx).value
    with ctx.local():
        assert rel(left, mult * right, ctx) <= ctx.tol(0.5)


@settings(max_examples=20, deadline=None)
@given(n=st.integers(0, 5), n3=st.integers(0, 5), data=st.data(), u=st.fractions(Fraction(1, 4), 4, max_denominator=40))
def test_dipole_reductions(n, n3, data, u):
    ctx = PrecisionContext()
    l = data.draw(st.integers(0, min(n, n3)))
    a = p_dipole0(n, l, n3, u, ctx).value
    b = p_series(PIndex(n, l, n3, l, 0), u, (u + 1) / 2, ctx).value
    assert rel(a, b, ctx) <= ctx.tol(0.9)
    if 1 <= n and n3 >= 0:
        l1 = data.draw(st.integers(1, n))
        if l1 - 1 <= n3:
            a = p_dipole1(n, l1, n3, u, ctx).value
            b = p_series(PIndex(n, l1, n3, l1 - 1, 1), u, (u + 1) / 2, ctx).value
            assert rel(a, b, ctx) <= ctx.tol(0.9)
