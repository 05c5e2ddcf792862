"""The ten acceptance criteria, each at its stated tolerance.

Every test prints one PASS/FAIL line; the lines are also collected and
shown in the terminal summary.
"""
import csv
from fractions import Fraction
from pathlib import Path
import time

from gmpy2 import mpfr, mpq

from conftest import ACCEPTANCE_LINES
from hydroform import suites
from hydroform.exactmath import PrecisionContext
from hydroform.formfactor import BoundLabel, TransitionSpec, form_factor, gos_scan

FIXTURE = Path(__file__).parent / "fixtures" / "fig2a_1s_5l.csv"


def report(number, title, ok, detail):
    line = "%s  criterion %2d  %-34s %s" % ("PASS" if ok else "FAIL", number, title, detail)
    print(line)
    ACCEPTANCE_LINES.append(line)
    return ok


def checks_ok(checks):
    return all(c.passed for c in checks)


def describe(checks, elapsed, limit=None):
    worst = "; ".join("%s: %.2e <= %.2e (%d)" % (c.name, c.residual, c.threshold, c.count) for c in checks)
    budget = "" if limit is None else " / %d s" % limit
    return "%s [%.1f s%s]" % (worst, elapsed, budget)


def timed(fn, *args):
    t0 = time.perf_counter()
    out = fn(*args)
    return out, time.perf_counter() - t0


def test_criterion_01_orthogonality():
    checks, dt = timed(suites.orthogonality, 8, PrecisionContext())
    ok = checks_ok(checks) and dt < 60
    assert report(1, "orthogonality at k = 0", ok, describe(checks, dt, 60))


def test_criterion_02_backends():
    checks, dt = timed(suites.backends, 8, PrecisionContext())
    ok = checks_ok(checks) and dt < 120
    assert report(2, "series vs gegenbauer", ok, describe(checks, dt, 120))


def test_criterion_03_oracle():
    checks, dt = timed(suites.oracle, 5, PrecisionContext())
    ok = checks_ok(checks) and dt < 600
    assert report(3, "closed form vs radial quadrature", ok, describe(checks, dt, 600))


def test_criterion_04_recurrences():
    checks, dt = timed(suites.recurrences, 7, PrecisionContext())
    ok = checks_ok(checks) and dt < 120
    assert report(4, "recurrence residuals", ok, describe(checks, dt, 120))


def test_criterion_05_symmetry():
    checks, dt = timed(suites.symmetry, 7, PrecisionContext())
    assert report(5, "u -> 1/u symmetry", checks_ok(checks), describe(checks, dt))


def test_criterion_06_dipole():
    checks, dt = timed(suites.dipole, 8, PrecisionContext())
    assert report(6, "dipole delta and vanishing f1", checks_ok(checks), describe(checks, dt))


def test_criterion_07_elastic():
    ctx = PrecisionContext()
    t = TransitionSpec.hydrogen(1, BoundLabel(0, 0), BoundLabel(0, 0))
    worst = mpfr(0)
    for k in ("0", "0.5", "1", "2", "5"):
        F = form_factor(t, (0, 0, k), ctx).value
        with ctx.local():
            kk = mpfr(mpq(Fraction(k)))
            exact = 16 / (kk * kk + 4) ** 2
            worst = max(worst, abs(F - exact) / exact)
    ok = worst <= mpfr("1e-10")
    assert report(7, "1s -> 1s equals 16/(k^2+4)^2", ok, "worst relative %.2e <= 1e-10" % float(worst))


def _single_interior_peak(f):
    top = f.index(max(f))
    rising = all(a < b for a, b in zip(f[:top], f[1:top + 1]))
    falling = all(a > b for a, b in zip(f[top:-1], f[top + 1:]))
    decays = f[0] < 1e-2 * f[top] and f[-1] < 1e-2 * f[top]
    return 0 < top < len(f) - 1 and rising and falling and decays


def test_criterion_08_figure_2a():
    ctx = PrecisionContext()
    with FIXTURE.open() as fh:
        rows = list(csv.reader(fh))[1:]
    grid = [Fraction(-3) + Fraction(6 * i, 199) for i in range(200)]
    t0 = time.perf_counter()
    worst_fixture, shapes = 0.0, []
    for l in range(5):
        t = TransitionSpec.hydrogen(1, BoundLabel(0, 0), BoundLabel(4, l))
        scan = gos_scan(t, grid, ctx)
        f = [float(r.absF2) for r in scan]
        ref = [float(r[2 + l]) for r in rows]
        worst_fixture = max(worst_fixture, max(abs(a - b) / b for a, b in zip(f, ref)))
        shapes.append(_single_interior_peak(f))
    dt = time.perf_counter() - t0
    ok = all(shapes) and worst_fixture < 1e-15 and dt < 30
    detail = "single interior maximum for l=0..4: %s; fixture drift %.1e [%.1f s / 30 s]" % (
        all(shapes), worst_fixture, dt)
    assert report(8, "figure 2(a) 1s -> 5l scan", ok, detail)


def test_criterion_09_expansion_and_laplace():
    ctx = PrecisionContext()
    exp_checks, dt1 = timed(suites.expansion, 3, ctx)
    lap_checks, dt2 = timed(suites.laplace, ctx)
    checks = exp_checks + lap_checks
    assert report(9, "expansion truncation, FD order", checks_ok(checks), describe(checks, dt1 + dt2))


def test_criterion_10_d_coefficients():
    checks, dt = timed(suites.dcoeff, PrecisionContext())
    assert report(10, "D coefficient sum vs 3F2", checks_ok(checks), describe(checks, dt))
