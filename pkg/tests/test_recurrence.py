from fractions import Fraction
import warnings

import pytest
from gmpy2 import mpfr
from hypothesis import given, settings, strategies as st

from hydroform.errors import AmplificationWarning, IndexViolation, InsufficientSeeds
from hydroform.exactmath import PrecisionContext
from hydroform.pcoeff import PIndex, p_series
from hydroform.recurrence import (RESIDUALS, propagate_lattice, relation_applies, residual_fixed_angular,
                                  residual_l2_step, residual_rec1_first, residual_rec1_second, sweep_points)


@pytest.mark.parametrize("fn,idx,u,w", [
    (residual_rec1_first, (2, 0, 2, 1, 1), "0.9", "1.2"),
    (residual_rec1_first, (3, 1, 2, 1, 0), "1.5", "2.0"),
    (residual_rec1_second, (2, 1, 2, 0, 1), "0.8", "1.3"),
    (residual_rec1_second, (4, 2, 3, 1, 1), "1.1", "1.7"),
    (residual_l2_step, (2, 1, 2, 1, 0), "0.7", "1.1"),
    (residual_fixed_angular, (2, 1, 2, 1, 1), "0.9", "1.2"),
    (residual_fixed_angular, (5, 2, 4, 2, 0), "1.3", "1.8"),
])
def test_residual_examples(ctx, fn, idx, u, w):
    assert fn(*idx, u, w, ctx) <= ctx.tol(0.5)


def test_l2_step_needs_l2_plus_one():
    # (3,0,3,0,1) would need l2 = 2 > l + l3 + 1 = 1, which is outside the index range
    assert not relation_applies("l2_step", 3, 0, 3, 0, 1)
    with pytest.raises(IndexViolation):
        residual_l2_step(3, 0, 3, 0, 1, "1.2", "1.6")
    assert residual_l2_step(3, 0, 3, 0, 0, "1.2", "1.6") <= PrecisionContext().tol(0.5)


@pytest.mark.parametrize("fn", list(RESIDUALS.values()))
def test_invalid_tuple(fn):
    with pytest.raises(IndexViolation):
        fn(1, 2, 1, 0, 0, "0.5", "1")


def test_residual_is_sensitive(ctx, monkeypatch):
    # a perturbed P must show up in the residual, so the check is not vacuous
    import hydroform.recurrence as rec
    real = rec.p_series

    def bumped(idx, u, w, c):
        pv = real(idx, u, w, c)
        if idx.as_tuple() == (2, 1, 2, 1, 1):
            with c.local():
                return pv.__class__(pv.index, pv.u, pv.w, pv.value * (1 + mpfr("1e-8")), pv.backend, pv.bits)
        return pv

    monkeypatch.setattr(rec, "p_series", bumped)
    assert residual_fixed_angular(2, 1, 2, 1, 1, "0.9", "1.2", ctx) > mpfr("1e-12")


def test_sweep_shape():
    groups = list(sweep_points(2))
    us = {u for u, w, _ in groups}
    assert Fraction(1, 2) in us and Fraction(2) in us and Fraction(1, 3) in us
    for u, w, idxs in groups:
        assert all(PIndex(*i).is_valid() for i in idxs)


def _seeds(pairs, l, l3, l2, u, w, ctx):
    return [p_series(PIndex(a, l, b, l3, l2), u, w, ctx) for a, b in pairs]


def test_propagate_seed_is_returned(ctx):
    seeds = _seeds([(1, 1)], 0, 0, 0, "0.8", "1.1", ctx)
    out = propagate_lattice(seeds, PIndex(1, 0, 1, 0, 0), "0.8", "1.1", ctx)
    assert out.value == seeds[0].value and out.steps == 0


def test_propagate_to_3_3(ctx):
    target = PIndex(3, 0, 3, 0, 0)
    strip = [(a, b) for a in range(3) for b in range(7)]
    out = propagate_lattice(_seeds(strip, 0, 0, 0, "0.8", "1.1", ctx), target, "0.8", "1.1", ctx)
    ref = p_series(target, "0.8", "1.1", ctx).value
    with ctx.local():
        assert abs(out.value - ref) <= ctx.tol(0.25) * abs(ref)
    assert out.steps > 0 and out.backend == "recurrence"


def test_propagate_square_seeds_insufficient(ctx):
    # the five-term stencil reaches two steps in n3, so a 3x3 square does not close
    square = [(a, b) for a in range(3) for b in range(3)]
    with pytest.raises(InsufficientSeeds):
        propagate_lattice(_seeds(square, 0, 0, 0, "0.8", "1.1", ctx), PIndex(3, 0, 3, 0, 0), "0.8", "1.1", ctx)
    with pytest.raises(InsufficientSeeds):
        propagate_lattice([], PIndex(3, 0, 3, 0, 0), "0.8", "1.1", ctx)


def test_propagate_mismatched_seed(ctx):
    seeds = _seeds([(1, 1)], 1, 0, 0, "0.8", "1.1", ctx)
    with pytest.raises(IndexViolation):
        propagate_lattice(seeds, PIndex(2, 0, 2, 0, 0), "0.8", "1.1", ctx)


def test_propagate_long_path_at_large_u(ctx):
    strip = [(a, b) for a in range(3) for b in range(12)]
    target = PIndex(5, 0, 5, 0, 0)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        out = propagate_lattice(_seeds(strip, 0, 0, 0, "2.5", "1.8", ctx), target, "2.5", "1.8", ctx)
    assert out.steps >= 10
    amplified = any(issubclass(c.category, AmplificationWarning) for c in caught)
    if not amplified:
        ref = p_series(target, "2.5", "1.8", ctx).value
        with ctx.local():
            assert abs(out.value - ref) <= ctx.tol(0.25) * abs(ref)


@settings(max_examples=30, deadline=None)
@given(n=st.integers(0, 5), n3=st.integers(0, 5), data=st.data(),
       u=st.fractions(Fraction(1, 3), 3, max_denominator=30), w=st.fractions(Fraction(1, 2), 3, max_denominator=30))
def test_residuals_vanish(n, n3, data, u, w):
    ctx = PrecisionContext()
    l = data.draw(st.integers(0, n))
    l3 = data.draw(st.integers(0, n3))
    l2 = data.draw(st.integers(0, l + l3 + 1))
    for name, fn in RESIDUALS.items():
        if relation_applies(name, n, l, n3, l3, l2):
            assert fn(n, l, n3, l3, l2, u, w, ctx) <= ctx.tol(0.5)
