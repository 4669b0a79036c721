"""Stunted regular cyclic polytopes and certified convexity checks.

The vertex data of every polytope here is exact integer combinatorics:
residues e mod m standing for the point (zeta_m^(e*n))_n indexed by the
weight set.  Geometry appears only in the convexity tests.  The origin
check finds a candidate separating functional by exact LP over dyadic
midpoint approximations of the vertices and then certifies it with
interval enclosures of the root-of-unity coordinates.  The divisor
summand checks need exact answers on the feasible side, so they run the
LP in the rational coordinates of the cyclotomic field instead of using
intervals; their verdicts carry precision_bits 0, meaning exact.
"""

from __future__ import annotations

from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations

import mpmath

from .errors import PreconditionViolation, WeightOutOfRange
from .homlinalg import feasibility_certificate, lp_optimize, lp_separate
from .semigroup import Params, bezout, is_member, weights

HOLDS = "HOLDS"
FAILS_CANDIDATE = "FAILS_CANDIDATE"
UNDECIDED = "UNDECIDED"
UNSUPPORTED = "UNSUPPORTED"

DEFAULT_PRECISION = 128
MAX_PRECISION = 1024


@dataclass(frozen=True)
class Verdict:
    """Outcome of one conjecture statement at one weight.

    HOLDS carries a verification witness (a certified separator, the
    exact intersection points, or the edge coverage).  FAILS_CANDIDATE
    carries the data that pinned the violation; for the interval-based
    origin check this is a candidate, not a certified refutation.
    UNDECIDED invites a retry at higher precision.
    """

    status: str
    precision_bits: int
    witness: object = None

    def to_json(self) -> dict:
        return {"status": self.status, "precision_bits": self.precision_bits,
                "witness": self.witness}


@dataclass(frozen=True)
class IndexFunction:
    """One periodic increment pattern at a given weight.

    The word lists the increments of one period in order, alpha copies
    of a and beta copies of b, and g0 fixes the starting residue.  The
    vertex exponents are the partial sums mod m; the underlying map g
    then satisfies g(t) - g(t-1) in {a, b} and gains m per period.
    """

    weight: int
    alpha: int
    beta: int
    word: tuple
    g0: int
    vertex_exponents: tuple


@dataclass(frozen=True)
class ExponentPolytope:
    """Convex hull of the points (zeta_m^(e*n))_n for e in the exponent set."""

    m: int
    weights: tuple
    vertex_exponents: tuple


def _necklaces(alpha: int, beta: int, a: int, b: int) -> list:
    """Distinct cyclic words with alpha a-increments and beta b-increments."""
    slots = alpha + beta
    seen = set()
    for apos in combinations(range(slots), alpha):
        word = [b] * slots
        for i in apos:
            word[i] = a
        canon = min(tuple(word[k:] + word[:k]) for k in range(slots))
        seen.add(canon)
    return sorted(seen)


def index_functions(p: Params, m: int, weight: int) -> list:
    """All index functions of the given weight, rotations deduplicated.

    The increment counts are alpha = d*m - b*weight and beta =
    a*weight - c*m; they are non-negative exactly when the weight lies
    in the closed admissible interval, and a*alpha + b*beta = m.  Each
    cyclic word is returned once per starting residue g0.
    """
    data = weights(p, m)
    if weight not in data.entries:
        raise WeightOutOfRange(f"weight {weight} is not admissible for "
                               f"(a,b,m)=({p.a},{p.b},{m})")
    entry = data.entries[weight]
    alpha, beta = entry.i, entry.j
    out = []
    for word in _necklaces(alpha, beta, p.a, p.b):
        assert sum(word) == m
        for g0 in range(m):
            exps = [g0 % m]
            for step in word[:-1]:
                exps.append((exps[-1] + step) % m)
            out.append(IndexFunction(weight=weight, alpha=alpha, beta=beta,
                                     word=word, g0=g0,
                                     vertex_exponents=tuple(exps)))
    return out


def q_union(p: Params, m: int) -> list:
    """The polytopes whose union is the image of the gap subcomplex.

    One entry per distinct vertex-exponent set across all weights; empty
    exactly when m is not representable, since the admissible weight
    interval contains an integer if and only if m = a*u + b*v has a
    non-negative solution.
    """
    data = weights(p, m)
    J = data.closed_weights
    seen = {}
    for w in J:
        for fn in index_functions(p, m, w):
            key = frozenset(fn.vertex_exponents)
            if key not in seen:
                seen[key] = ExponentPolytope(m=m, weights=J,
                                             vertex_exponents=tuple(sorted(key)))
    return sorted(seen.values(), key=lambda q: q.vertex_exponents)


# ---------------------------------------------------------------------------
# interval geometry


@contextmanager
def _interval_prec(bits: int):
    old = mpmath.iv.prec
    mpmath.iv.prec = bits
    try:
        yield mpmath.iv
    finally:
        mpmath.iv.prec = old


def _dyadic(x, bits: int) -> Fraction:
    # round x to the nearest multiple of 2^-bits
    return Fraction(int(mpmath.nint(mpmath.ldexp(x, bits))), 1 << bits)


def _midpoint_vertex(m: int, e: int, ws, bits: int) -> list:
    """Dyadic approximation of the vertex with exponent e, flattened to reals."""
    coords = []
    with mpmath.workprec(bits + 8):
        for n in ws:
            k = (e * n) % m
            angle = 2 * mpmath.pi * k / m
            coords.append(_dyadic(mpmath.cos(angle), bits))
            coords.append(_dyadic(mpmath.sin(angle), bits))
    return coords


def _iv_fraction(f: Fraction):
    return mpmath.iv.mpf(f.numerator) / mpmath.iv.mpf(f.denominator)


def _iv_vertex(m: int, e: int, ws) -> list:
    coords = []
    for n in ws:
        k = (e * n) % m
        angle = 2 * mpmath.iv.pi * k / m
        coords.append(mpmath.iv.cos(angle))
        coords.append(mpmath.iv.sin(angle))
    return coords


def _max_margin_separator(mids):
    """Best box-normalized separating functional for the midpoint vertices.

    Maximizes delta subject to h . v >= delta for every midpoint v and
    |h_j| <= 1, via the exact simplex in standard form (h split into
    positive parts, one slack per point, one box slack per coordinate).
    Returns (delta, h); delta > 0 certifies midpoint separation with the
    fattest margin the box allows, which keeps the interval step robust.
    """
    npts, dim = len(mids), len(mids[0])
    rows = npts + dim
    cols = []
    for sign in (1, -1):
        for j in range(dim):
            col = [Fraction(sign) * mids[i][j] for i in range(npts)]
            col += [Fraction(1 if k == j else 0) for k in range(dim)]
            cols.append(col)
    cols.append([Fraction(-1)] * npts + [Fraction(0)] * dim)
    cols.append([Fraction(1)] * npts + [Fraction(0)] * dim)
    for i in range(npts):
        col = [Fraction(0)] * rows
        col[i] = Fraction(-1)
        cols.append(col)
    for j in range(dim):
        col = [Fraction(0)] * rows
        col[npts + j] = Fraction(1)
        cols.append(col)
    rhs = [Fraction(0)] * npts + [Fraction(1)] * dim
    objective = [Fraction(0)] * len(cols)
    objective[2 * dim] = Fraction(1)
    objective[2 * dim + 1] = Fraction(-1)
    status, value, lam = lp_optimize(cols, rhs, objective, maximize=True)
    assert status == "optimal", "margin LP is feasible and bounded"
    h = [lam[j] - lam[dim + j] for j in range(dim)]
    return value, h


def _separate_origin(Q: ExponentPolytope, bits: int):
    """Certify that the origin avoids one polytope.

    Returns ("holds", witness), ("candidate", witness) or ("undecided",
    note).  The separator is exact rational data; only its margin over
    the vertices is interval arithmetic.
    """
    m, ws, exps = Q.m, Q.weights, Q.vertex_exponents
    dim = 2 * len(ws)
    mids = [_midpoint_vertex(m, e, ws, bits) for e in exps]
    delta, h = _max_margin_separator(mids)
    if delta > 0:
        with _interval_prec(bits):
            hv = [_iv_fraction(v) for v in h]
            margin = None
            for e in exps:
                dot = mpmath.iv.mpf(0)
                for hi, ci in zip(hv, _iv_vertex(m, e, ws)):
                    dot += hi * ci
                if margin is None or dot.a < margin:
                    margin = dot.a
        if margin > 0:
            return "holds", {"vertices": list(exps),
                             "functional": [str(v) for v in h],
                             "margin": str(margin)}
        return "undecided", {"vertices": list(exps),
                             "reason": "separator margin not certified"}
    # the midpoints place the origin inside or on the hull; enclose the
    # true image of an exact convex combination
    res = lp_separate(mids, [Fraction(0)] * dim)
    if res.kind == "separator":
        return "undecided", {"vertices": list(exps),
                             "reason": "origin on the midpoint hull boundary"}
    eps = Fraction(1, 1 << (bits // 2))
    with _interval_prec(bits):
        points = [_iv_vertex(m, e, ws) for e in exps]
        worst = None
        for j in range(dim):
            acc = mpmath.iv.mpf(0)
            for lam, pt in zip(res.coefficients, points):
                if lam:
                    acc += _iv_fraction(lam) * pt[j]
            bound = max(abs(acc.a), abs(acc.b))
            if worst is None or bound > worst:
                worst = bound
        if worst < _iv_fraction(eps).a:
            return "candidate", {"vertices": list(exps),
                                 "coefficients": [str(v) for v in res.coefficients],
                                 "norm_bound": str(worst)}
    return "undecided", {"vertices": list(exps),
                         "reason": "combination not pinned to the origin"}


def check_c1(p: Params, m: int, precision: int = DEFAULT_PRECISION) -> Verdict:
    """Statement one: the union polytope avoids the origin.

    Vacuous for non-representable m, where the union is empty.  Runs one
    certification pass per polytope at the given precision; see escalate
    for the doubling driver.
    """
    if m < 1:
        raise ValueError("m must be positive")
    if not is_member(p, m):
        return Verdict(HOLDS, 0, witness={"vacuous": "m is not representable"})
    separators = []
    undecided = []
    for Q in q_union(p, m):
        state, detail = _separate_origin(Q, precision)
        if state == "candidate":
            return Verdict(FAILS_CANDIDATE, precision, witness=detail)
        if state == "undecided":
            undecided.append(detail)
        else:
            separators.append(detail)
    if undecided:
        return Verdict(UNDECIDED, precision, witness={"unresolved": undecided})
    return Verdict(HOLDS, precision, witness={"separators": separators})


def escalate(check, p: Params, m: int, start: int = DEFAULT_PRECISION,
             cap: int = MAX_PRECISION, **kw) -> Verdict:
    """Run an interval check, doubling the precision while it is undecided."""
    bits = start
    while True:
        verdict = check(p, m, precision=bits, **kw)
        if verdict.status != UNDECIDED or bits >= cap:
            return verdict
        bits = min(2 * bits, cap)


# ---------------------------------------------------------------------------
# exact cyclotomic arithmetic


def _polydiv_exact(num: list, den: list) -> list:
    """Exact division of integer polynomials, ascending coefficients."""
    num = list(num)
    dn, dd = len(num) - 1, len(den) - 1
    assert den[dd] == 1
    out = [0] * (dn - dd + 1)
    for k in range(dn - dd, -1, -1):
        c = num[k + dd]
        out[k] = c
        if c:
            for i in range(dd + 1):
                num[k + i] -= c * den[i]
    assert not any(num), "division must be exact"
    return out


@lru_cache(maxsize=None)
def _cyclotomic(m: int) -> tuple:
    """Coefficients of the m-th cyclotomic polynomial, ascending."""
    poly = [-1] + [0] * (m - 1) + [1]
    for d in range(1, m):
        if m % d == 0:
            poly = _polydiv_exact(poly, list(_cyclotomic(d)))
    return tuple(poly)


@lru_cache(maxsize=None)
def _zeta_powers(m: int) -> tuple:
    """zeta_m^j for 0 <= j < m as integer vectors in the power basis."""
    phi = _cyclotomic(m)
    deg = len(phi) - 1
    rows = []
    row = [1] + [0] * (deg - 1)
    for _ in range(m):
        rows.append(tuple(row))
        row = [0] + row
        lead = row.pop()
        if lead:
            row = [row[k] - lead * phi[k] for k in range(deg)]
    return tuple(rows)


def _divisor_statement(p: Params, m: int, div: int):
    """Exact check that the union meets one divisor summand in its roots.

    div is a or b; the summand is the weight c*m/a resp. d*m/b.  For each
    polytope the points with vanishing coordinates outside the summand
    form a rational LP; when feasible, the image in the summand is pinned
    coordinate by coordinate and compared exactly against the div-th
    roots of unity.  Returns a status and a witness dictionary.
    """
    a, b = p.a, p.b
    bz = bezout(p)
    n0 = bz.c * m // a if div == a else bz.d * m // b
    data = weights(p, m)
    J = data.closed_weights
    assert n0 in data.entries
    table = _zeta_powers(m)
    deg = len(table[0])
    others = [n for n in J if n != n0]
    roots = {(k * (m // div)) % m: k for k in range(div)}
    found = {}
    for Q in q_union(p, m):
        exps = Q.vertex_exponents
        columns = []
        for e in exps:
            col = []
            for n in others:
                col.extend(table[(e * n) % m])
            col.append(1)
            columns.append([Fraction(v) for v in col])
        rhs = [Fraction(0)] * (deg * len(others)) + [Fraction(1)]
        status, _ = feasibility_certificate(columns, rhs)
        if status == "infeasible":
            continue
        point = []
        for k in range(deg):
            objective = [Fraction(table[(e * n0) % m][k]) for e in exps]
            s_hi, hi, _ = lp_optimize(columns, rhs, objective, maximize=True)
            s_lo, lo, _ = lp_optimize(columns, rhs, objective, maximize=False)
            assert s_hi == s_lo == "optimal"
            if hi != lo:
                return FAILS_CANDIDATE, {
                    "vertices": list(exps), "coordinate": k,
                    "spread": [str(lo), str(hi)],
                    "reason": "intersection with the summand is not a point"}
            point.append(hi)
        hit = next((je for je in roots
                    if all(Fraction(table[je][k]) == point[k] for k in range(deg))),
                   None)
        if hit is None:
            return FAILS_CANDIDATE, {
                "vertices": list(exps), "point": [str(v) for v in point],
                "reason": "intersection point is not a root of the summand"}
        found.setdefault(roots[hit], list(exps))
    missing = sorted(set(roots.values()) - set(found))
    if missing:
        return FAILS_CANDIDATE, {"missing_roots": missing,
                                 "reason": "roots of the summand not reached"}
    return HOLDS, {"summand_weight": n0,
                   "intersections": {str(k): found[k] for k in sorted(found)}}


def check_c2_c3(p: Params, m: int, precision: int = 0) -> Verdict:
    """Statements two and three, whichever divisibilities apply.

    Exact over the cyclotomic field, so the precision argument is kept
    only for interface parity and the verdict reports precision_bits 0.
    """
    del precision
    parts = {}
    if m % p.a == 0:
        parts["a"] = _divisor_statement(p, m, p.a)
    if m % p.b == 0:
        parts["b"] = _divisor_statement(p, m, p.b)
    if not parts:
        raise PreconditionViolation("neither a nor b divides m")
    status = HOLDS
    if any(s == FAILS_CANDIDATE for s, _ in parts.values()):
        status = FAILS_CANDIDATE
    witness = {key: {"status": s, **detail} for key, (s, detail) in parts.items()}
    return Verdict(status, 0, witness=witness)


def check_c4(p: Params, m: int) -> Verdict:
    """Statement four: the polygon boundary lies inside the union.

    Supported exactly in the one-weight case, where the hull is a regular
    polygon and an edge is covered precisely when both endpoints appear
    in a common polytope; coverage is then pure residue arithmetic.  A
    missed edge here is an exact violation, still reported as
    FAILS_CANDIDATE for uniformity.
    """
    if m % p.a == 0 or m % p.b == 0:
        raise PreconditionViolation("m must be divisible by neither a nor b")
    if not is_member(p, m):
        return Verdict(HOLDS, 0, witness={"vacuous": "m is not representable"})
    data = weights(p, m)
    J = data.closed_weights
    if len(J) != 1:
        return Verdict(UNSUPPORTED, 0,
                       witness={"reason": f"hull has dimension {2 * len(J)}",
                                "weights": list(J)})
    entry = data.entries[J[0]]
    mp_, np_ = entry.m_prime, entry.n_prime
    assert mp_ >= 3, "hull must be full-dimensional in the plane"
    coverage = {}
    for Q in q_union(p, m):
        ks = {(e * np_) % mp_ for e in Q.vertex_exponents}
        for k in ks:
            if (k + 1) % mp_ in ks:
                coverage.setdefault(k, list(Q.vertex_exponents))
    missing = sorted(set(range(mp_)) - set(coverage))
    if missing:
        return Verdict(FAILS_CANDIDATE, 0,
                       witness={"missing_edges": missing,
                                "reason": "boundary edges not covered"})
    return Verdict(HOLDS, 0,
                   witness={"edges": {str(k): coverage[k] for k in sorted(coverage)}})


def run_conjecture_checks(p: Params, m: int,
                          precision: int = DEFAULT_PRECISION,
                          cap: int = MAX_PRECISION) -> dict:
    """All statements applicable at this weight, keyed c1 through c4."""
    out = {"c1": escalate(check_c1, p, m, start=precision, cap=cap)}
    if m % p.a == 0:
        status, detail = _divisor_statement(p, m, p.a)
        out["c2"] = Verdict(status, 0, witness=detail)
    if m % p.b == 0:
        status, detail = _divisor_statement(p, m, p.b)
        out["c3"] = Verdict(status, 0, witness=detail)
    if m % p.a and m % p.b:
        out["c4"] = check_c4(p, m)
    return out
