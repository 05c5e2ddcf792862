"""
Recurrence relations among the P coefficients.

The four ``residual_*`` functions evaluate every participating P with the
series backend and return |LHS - RHS| divided by the largest participating
|P|.  ``propagate_lattice`` uses the five-term relation at fixed angular
indices to generate new values in the (n, n3) plane from seeds.

Terms whose coefficient vanishes identically (for example (n3 - l3) at
n3 = l3) are dropped, so the index they would carry need not exist.
"""
import warnings

from gmpy2 import mpfr

from .errors import AmplificationWarning, IndexViolation, InsufficientSeeds
from .exactmath import PrecisionContext, _to_mpfr, as_rational
from .pcoeff import PIndex, PValue, p_series

AMPLIFICATION_LIMIT = 10 ** 6


def _uw(u, w):
    ru, rw = as_rational(u), as_rational(w)
    if ru is not None and rw is not None:
        return ru, rw
    return _to_mpfr(u), _to_mpfr(w)


class _PCache:
    """Memoized series-backend values for one (u, w) point."""

    def __init__(self, u, w, ctx):
        self.u, self.w, self.ctx = u, w, ctx
        self.store = {}

    def __call__(self, n, l, n3, l3, l2):
        key = (n, l, n3, l3, l2)
        if key not in self.store:
            self.store[key] = p_series(PIndex(*key), self.u, self.w, self.ctx).value
        return self.store[key]


def _scaled(lhs, rhs, values):
    big = max(abs(v) for v in values)
    diff = abs(lhs - rhs)
    return diff / big if big != 0 else diff


def _require(idx, why):
    if not idx.is_valid():
        raise IndexViolation("%s: %s" % (why, idx))


def _base(n, l, n3, l3, l2):
    idx = PIndex(n, l, n3, l3, l2)
    _require(idx, "base index invalid")
    return idx


def residual_rec1_first(n, l, n3, l3, l2, u, w, ctx=PrecisionContext(), P=None):
    """(n3+l3+1) P_{n3,l3} - (n3-l3) P_{n3-1,l3} = P_{n3,l3-1} - P_{n3-1,l3-1}."""
    _base(n, l, n3, l3, l2)
    _require(PIndex(n, l, n3, l3 - 1, l2), "lowered l3 leaves the admissible range")
    with ctx.local():
        P = P or _PCache(*_uw(u, w), ctx)
        vals = [P(n, l, n3, l3, l2), P(n, l, n3, l3 - 1, l2), P(n, l, n3 - 1, l3 - 1, l2)]
        lhs = (n3 + l3 + 1) * vals[0]
        if n3 > l3:
            vals.append(P(n, l, n3 - 1, l3, l2))
            lhs -= (n3 - l3) * vals[-1]
        rhs = vals[1] - vals[2]
        return _scaled(lhs, rhs, vals)


def residual_rec1_second(n, l, n3, l3, l2, u, w, ctx=PrecisionContext(), P=None):
    """(n+l+1) P_{n,l} - (n-l) P_{n-1,l} = P_{n,l-1} - P_{n-1,l-1}."""
    _base(n, l, n3, l3, l2)
    _require(PIndex(n, l - 1, n3, l3, l2), "lowered l leaves the admissible range")
    with ctx.local():
        P = P or _PCache(*_uw(u, w), ctx)
        vals = [P(n, l, n3, l3, l2), P(n, l - 1, n3, l3, l2), P(n - 1, l - 1, n3, l3, l2)]
        lhs = (n + l + 1) * vals[0]
        if n > l:
            vals.append(P(n - 1, l, n3, l3, l2))
            lhs -= (n - l) * vals[-1]
        rhs = vals[1] - vals[2]
        return _scaled(lhs, rhs, vals)


def residual_l2_step(n, l, n3, l3, l2, u, w, ctx=PrecisionContext(), P=None):
    """Relation between multipole orders l2 and l2 + 1 (suppressed indices held fixed)."""
    _base(n, l, n3, l3, l2)
    _require(PIndex(n, l, n3, l3, l2 + 1), "raised l2 leaves the admissible range")
    with ctx.local():
        uu, ww = _uw(u, w)
        P = P or _PCache(uu, ww, ctx)
        a = l2 + 1
        vals = [P(n + 1, l, n3, l3, l2), P(n, l, n3, l3, l2),
                P(n + 1, l, n3, l3, a), P(n, l, n3, l3, a), P(n, l, n3 + 1, l3, a)]
        lhs = (n + l + 2) * vals[0] - 2 * (n + 1) * vals[1]
        rhs = ((n + l + 2) * (1 - uu) * vals[2] + 2 * (uu * (n3 + l2 + 2) - n - 1) * vals[3]
               - 2 * (n3 + l3 + 2) * uu * vals[4])
        if n > l:
            lo, lo_a = P(n - 1, l, n3, l3, l2), P(n - 1, l, n3, l3, a)
            vals += [lo, lo_a]
            lhs += (n - l) * lo
            rhs += (n - l) * (1 + uu) * lo_a
        rhs = (l2 + 1) * rhs
        return _scaled(lhs, rhs, vals)


def _fixed_terms(n, l, n3, l3, u):
    """(coefficient, (n, n3)) pairs of the five-term relation centred at (n, n3)."""
    terms = [((n3 + l3 + 2) * u, (n, n3 + 1)),
             (-(n + l + 2), (n + 1, n3)),
             (2 * (n + 1 - u * (n3 + 1)), (n, n3))]
    if n3 > l3:
        terms.append(((n3 - l3) * u, (n, n3 - 1)))
    if n > l:
        terms.append((-(n - l), (n - 1, n3)))
    return terms


def residual_fixed_angular(n, l, n3, l3, l2, u, w, ctx=PrecisionContext(), P=None):
    """Five-term relation in (n, n3) at fixed l, l3, l2."""
    _base(n, l, n3, l3, l2)
    with ctx.local():
        uu, ww = _uw(u, w)
        P = P or _PCache(uu, ww, ctx)
        pos, neg, vals = 0, 0, []
        for coef, (a, b) in _fixed_terms(n, l, n3, l3, uu):
            val = P(a, l, b, l3, l2)
            vals.append(val)
            if coef >= 0:
                pos += coef * val
            else:
                neg -= coef * val
        return _scaled(pos, neg, vals)


RESIDUALS = {
    "rec1_first": residual_rec1_first,
    "rec1_second": residual_rec1_second,
    "l2_step": residual_l2_step,
    "fixed_angular": residual_fixed_angular,
}


def relation_applies(name, n, l, n3, l3, l2):
    """True when every participating index of relation ``name`` is admissible."""
    if not PIndex(n, l, n3, l3, l2).is_valid():
        return False
    if name == "rec1_first":
        return PIndex(n, l, n3, l3 - 1, l2).is_valid()
    if name == "rec1_second":
        return PIndex(n, l - 1, n3, l3, l2).is_valid()
    if name == "l2_step":
        return PIndex(n, l, n3, l3, l2 + 1).is_valid()
    if name == "fixed_angular":
        return True
    raise KeyError(name)


def sweep_points(n_max=7):
    """The standard (index, u, w) sweep: n, n3 <= n_max, every admissible
    (l, l3, l2), u in {1/2, 1, (n3+1)/(n+1), 2} and w in {9/10, (u+1)/2, 3/2}.

    Yields (u, w, [index tuples]) groups with exact rational u and w.
    """
    from fractions import Fraction
    groups = {}
    for n in range(n_max + 1):
        for n3 in range(n_max + 1):
            us = {Fraction(1, 2), Fraction(1), Fraction(n3 + 1, n + 1), Fraction(2)}
            for u in sorted(us):
                for w in sorted({Fraction(9, 10), (u + 1) / 2, Fraction(3, 2)}):
                    groups.setdefault((u, w), []).append((n, n3))
    for (u, w), pairs in sorted(groups.items()):
        idxs = []
        for n, n3 in pairs:
            for l in range(n + 1):
                for l3 in range(n3 + 1):
                    for l2 in range(l + l3 + 2):
                        idxs.append((n, l, n3, l3, l2))
        yield u, w, idxs


def propagate_lattice(seeds, target, u, w, ctx=PrecisionContext(), max_steps=10000):
    """Generate P at ``target`` from seed values with the fixed-angular relation.

    All seeds must share the target's (l, l3, l2) and the point (u, w).
    Each step solves one five-term relation that has exactly one unknown
    participant.  Raises InsufficientSeeds if the target is never reached
    and emits AmplificationWarning if any generated value exceeds the
    largest seed magnitude by more than a factor 1e6.
    """
    target = target if isinstance(target, PIndex) else PIndex(*target)
    target.validate()
    n_t, l, n3_t, l3, l2 = target.as_tuple()
    with ctx.local():
        uu, ww = _uw(u, w)
        if uu == 0:
            raise IndexViolation("u = 0")
        known = {}
        for s in seeds:
            si = s.index
            if (si.l, si.l3, si.l2) != (l, l3, l2):
                raise IndexViolation("seed %s does not share (l, l3, l2) with the target" % (si,))
            known[(si.n, si.n3)] = _to_mpfr(s.value)
        if (n_t, n3_t) in known:
            return PValue(target, u, w, known[(n_t, n3_t)], "recurrence", ctx.bits, 0)
        if not known:
            raise InsufficientSeeds("no seeds given")
        seed_scale = max(abs(v) for v in known.values())
        n_hi = max(max(k[0] for k in known), n_t) + 1
        n3_hi = max(max(k[1] for k in known), n3_t) + 1
        steps = 0
        warned = False
        progress = True
        while progress and (n_t, n3_t) not in known:
            progress = False
            for n in range(l, n_hi):
                for n3 in range(l3, n3_hi):
                    terms = [(c, p) for c, p in _fixed_terms(n, l, n3, l3, uu) if c != 0]
                    unknown = [(c, p) for c, p in terms if p not in known]
                    if len(unknown) != 1:
                        continue
                    cu, pu = unknown[0]
                    if pu[0] > n_hi or pu[1] > n3_hi:
                        continue
                    rest = sum(c * known[p] for c, p in terms if p != pu)
                    known[pu] = mpfr(-rest / cu)
                    steps += 1
                    progress = True
                    if not warned and seed_scale != 0 and abs(known[pu]) > AMPLIFICATION_LIMIT * seed_scale:
                        warnings.warn("forward recursion amplified values by more than 1e6 at (n, n3) = %s" % (pu,),
                                      AmplificationWarning, stacklevel=2)
                        warned = True
                    if steps > max_steps:
                        raise InsufficientSeeds("step limit reached")
        if (n_t, n3_t) not in known:
            raise InsufficientSeeds("seeds do not determine (n, n3) = (%d, %d)" % (n_t, n3_t))
        return PValue(target, u, w, known[(n_t, n3_t)], "recurrence", ctx.bits, steps)
