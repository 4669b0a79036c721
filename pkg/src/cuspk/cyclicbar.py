"""Weight-graded cyclic homology models for the monoid ring of <a, b>.

Three routes to the same relative homology are implemented, so they can
be played against each other:

* the relative cyclic bar complex in weight m: normalized tuples
  (m_0, ..., m_q) with m_0 >= 0, interior entries >= 1 and total m,
  modulo the subcomplex of tuples all of whose entries lie in <a, b>;

* a small curve-vs-line model: the Koszul-style complex on generators
  x, y, dx, dy and divided powers z^[r] of the relation (weight ab,
  degree 2), mapped to the two-term weight-m complex of a polynomial
  line by x -> t^a, y -> t^b; the relative homology is the mapping cone;

* a closed form assembled from up to four corner complexes indexed by
  the integral members of {m/ab, m/a, m/b, m}, each contributing Z in
  degrees 2l and 2l+1 with l = ell(a, b, m), glued as an iterated cone.

On top of the first two sit degree-raising Connes-type operators (the
cyclic B operator, and the de Rham differential of the small model); the
induced map from H_{2l} to H_{2l+1} is multiplication by +-m whenever
neither a nor b divides m.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations

from cuspk.errors import PreconditionViolation, ResourceBound, TheoremViolation
from cuspk.homlinalg import (
    ChainComplex,
    ChainMap,
    HomologyEngine,
    HomologySummary,
    SparseIntMatrix,
    homology,
    mapping_cone,
    smith_normal_form,
)
from cuspk.semigroup import Params, ell, is_member

BAR_WEIGHT_LIMIT = 16


def _compositions(total: int, parts: int):
    """Tuples of `parts` positive integers summing to `total`."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    for cuts in combinations(range(1, total), parts - 1):
        prev = 0
        out = []
        for c in cuts + (total,):
            out.append(c - prev)
            prev = c
        yield tuple(out)


def _all_representable(p: Params, t: tuple) -> bool:
    return all(is_member(p, e) for e in t)


@lru_cache(maxsize=None)
def bar_basis(p: Params, m: int) -> dict:
    """Degree -> sorted tuples (m_0, ..., m_q), m_0 >= 0, rest >= 1,
    summing to m and not entirely inside <a, b>."""
    if m < 1:
        raise ValueError("weight must be positive")
    if m > BAR_WEIGHT_LIMIT:
        raise ResourceBound(
            f"bar complex in weight {m} has 2^{m} chains; limit is {BAR_WEIGHT_LIMIT}")
    out: dict[int, list] = {}
    for q in range(m + 1):
        lbls = []
        for m0 in range(m - q + 1):
            for rest in _compositions(m - m0, q):
                t = (m0,) + rest
                if not _all_representable(p, t):
                    lbls.append(t)
        if lbls:
            out[q] = sorted(lbls)
    return out


def _bar_faces(t: tuple):
    """Hochschild faces of (m_0, ..., m_q); the last one is cyclic."""
    q = len(t) - 1
    for i in range(q):
        yield i, t[:i] + (t[i] + t[i + 1],) + t[i + 2:]
    yield q, (t[q] + t[0],) + t[1:q]


@lru_cache(maxsize=None)
def relative_bar_complex(p: Params, m: int) -> ChainComplex:
    basis = bar_basis(p, m)
    boundaries = {}
    for q in basis:
        if q - 1 not in basis:
            continue
        index = {lbl: i for i, lbl in enumerate(basis[q - 1])}
        entries: dict[tuple, int] = {}
        for c, t in enumerate(basis[q]):
            for i, face in _bar_faces(t):
                r = index.get(face)
                if r is None:  # face lies in the subcomplex
                    continue
                key = (r, c)
                entries[key] = entries.get(key, 0) + (-1) ** i
        boundaries[q] = SparseIntMatrix(len(basis[q - 1]), len(basis[q]),
                                        {k: v for k, v in entries.items() if v})
    return ChainComplex(basis, boundaries)


def connes_matrix(p: Params, m: int, q: int) -> SparseIntMatrix:
    """The cyclic operator B : C_q -> C_{q+1} on the relative bar complex.

    B(x) = sum_i (-1)^{qi} (0, x_i, ..., x_q, x_0, ..., x_{i-1}); terms
    with a unit in an interior slot are degenerate and dropped, which
    kills everything when x_0 = 0.
    """
    basis = bar_basis(p, m)
    rows = basis.get(q + 1, [])
    cols = basis.get(q, [])
    index = {lbl: i for i, lbl in enumerate(rows)}
    entries: dict[tuple, int] = {}
    for c, t in enumerate(cols):
        if t[0] == 0:
            continue
        for i in range(q + 1):
            rot = (0,) + t[i:] + t[:i]
            r = index.get(rot)
            if r is None:
                continue
            key = (r, c)
            entries[key] = entries.get(key, 0) + (-1) ** (q * i)
    return SparseIntMatrix(len(rows), len(cols),
                           {k: v for k, v in entries.items() if v})


# ---------------------------------------------------------------------------
# small model


def _monomial(p: Params, w: int):
    """The unique (i, j) with ai + bj = w, 0 <= i < b, j >= 0, if any."""
    if w < 0:
        return None
    i = (w * pow(p.a, -1, p.b)) % p.b
    j, rem = divmod(w - p.a * i, p.b)
    assert rem == 0
    return (i, j) if j >= 0 else None


def _reduce_x(p: Params, i: int, j: int) -> tuple:
    """Rewrite x^i y^j into the basis range 0 <= i < b using x^b = y^a."""
    if i >= p.b:
        return i - p.b, j + p.a
    return i, j


@lru_cache(maxsize=None)
def curve_basis(p: Params, m: int) -> dict:
    """Degree -> labels (i, j, ex, ey, r) of weight ai+bj+a*ex+b*ey+ab*r = m."""
    if m < 1:
        raise ValueError("weight must be positive")
    out: dict[int, list] = {}
    for r in range(m // (p.a * p.b) + 1):
        for ex in (0, 1):
            for ey in (0, 1):
                w = m - p.a * ex - p.b * ey - p.a * p.b * r
                mono = _monomial(p, w)
                if mono is None:
                    continue
                deg = ex + ey + 2 * r
                out.setdefault(deg, []).append((mono[0], mono[1], ex, ey, r))
    return {q: sorted(lbls) for q, lbls in sorted(out.items())}


def _koszul_image(p: Params, lbl: tuple) -> dict:
    """Peeling one divided power off z^[r] multiplies by the relation
    differential b x^{b-1} dx - a y^{a-1} dy."""
    i, j, ex, ey, r = lbl
    if r == 0:
        return {}
    out: dict[tuple, int] = {}
    if (ex, ey) == (0, 0):
        xi, xj = _reduce_x(p, i + p.b - 1, j)
        out[(xi, xj, 1, 0, r - 1)] = p.b
        out[(i, j + p.a - 1, 0, 1, r - 1)] = -p.a
    elif (ex, ey) == (1, 0):
        out[(i, j + p.a - 1, 1, 1, r - 1)] = p.a
    elif (ex, ey) == (0, 1):
        xi, xj = _reduce_x(p, i + p.b - 1, j)
        out[(xi, xj, 1, 1, r - 1)] = p.b
    return out


def _de_rham_image(p: Params, lbl: tuple) -> dict:
    """The degree-raising de Rham operator of the small model."""
    i, j, ex, ey, r = lbl
    out: dict[tuple, int] = {}
    if (ex, ey) == (0, 0):
        if i >= 1:
            out[(i - 1, j, 1, 0, r)] = i + p.b * r
        if j >= 1:
            out[(i, j - 1, 0, 1, r)] = j
    elif (ex, ey) == (1, 0):
        if j >= 1:
            out[(i, j - 1, 1, 1, r)] = -j
    elif (ex, ey) == (0, 1):
        if i >= 1:
            out[(i - 1, j, 1, 1, r)] = i + p.b * r
    return out


def _matrix_of(images: dict, rows: list, cols: list) -> SparseIntMatrix:
    index = {lbl: i for i, lbl in enumerate(rows)}
    entries = {}
    for c, lbl in enumerate(cols):
        for tgt, coeff in images[lbl].items():
            entries[(index[tgt], c)] = coeff
    return SparseIntMatrix(len(rows), len(cols), entries)


@lru_cache(maxsize=None)
def small_complex_curve(p: Params, m: int) -> ChainComplex:
    basis = curve_basis(p, m)
    boundaries = {}
    for q in basis:
        if q - 1 not in basis:
            continue
        images = {lbl: _koszul_image(p, lbl) for lbl in basis[q]}
        boundaries[q] = _matrix_of(images, basis[q - 1], basis[q])
    return ChainComplex(basis, boundaries)


@lru_cache(maxsize=None)
def small_complex_line(p: Params, m: int) -> ChainComplex:
    if m < 1:
        raise ValueError("weight must be positive")
    return ChainComplex({0: [("t", m)], 1: [("dt", m - 1)]}, {})


def de_rham_matrix(p: Params, m: int, q: int) -> SparseIntMatrix:
    """Matrix of the de Rham operator from curve degree q to q + 1."""
    basis = curve_basis(p, m)
    rows = basis.get(q + 1, [])
    cols = basis.get(q, [])
    row_set = set(rows)
    images = {lbl: {t: c for t, c in _de_rham_image(p, lbl).items() if t in row_set}
              for lbl in cols}
    return _matrix_of(images, rows, cols)


def line_de_rham_matrix(p: Params, m: int, q: int) -> SparseIntMatrix:
    """t^m -> m t^{m-1} dt in degree 0; zero above."""
    line = small_complex_line(p, m)
    entries = {(0, 0): m} if q == 0 else {}
    return SparseIntMatrix(line.dim(q + 1), line.dim(q), entries)


@lru_cache(maxsize=None)
def parametrization_map(p: Params, m: int) -> ChainMap:
    """f : curve model -> line model; x^i y^j -> t^m, the dx and dy
    one-forms -> a resp. b times t^{m-1} dt, everything else -> 0."""
    curve = small_complex_curve(p, m)
    line = small_complex_line(p, m)
    maps = {}
    if 0 in curve.basis:
        entries = {(0, c): 1 for c, (i, j, ex, ey, r) in enumerate(curve.basis[0])
                   if r == 0}
        maps[0] = SparseIntMatrix(1, curve.dim(0), entries)
    if 1 in curve.basis:
        entries = {}
        for c, (i, j, ex, ey, r) in enumerate(curve.basis[1]):
            if r == 0:
                entries[(0, c)] = p.a if ex else p.b
        maps[1] = SparseIntMatrix(1, curve.dim(1), entries)
    return ChainMap(curve, line, maps)


@lru_cache(maxsize=None)
def relative_cone(p: Params, m: int) -> ChainComplex:
    return mapping_cone(parametrization_map(p, m))


# ---------------------------------------------------------------------------
# expected answer, two ways


def _corner_complex(tag: int, low: int, high: int) -> ChainComplex:
    return ChainComplex({low: [("x", tag)], high: [("y", tag)]}, {})


def _zero_complex() -> ChainComplex:
    return ChainComplex({}, {})


def _corner_map(dom: ChainComplex, cod: ChainComplex, ratio: int) -> ChainMap:
    """x -> x and y -> ratio * y between corner complexes."""
    maps = {}
    for q in dom.degrees:
        (letter, _tag), = dom.basis[q]
        coeff = 1 if letter == "x" else ratio
        maps[q] = SparseIntMatrix(cod.dim(q), 1, {(0, 0): coeff})
    return ChainMap(dom, cod, maps)


def _induced_cone_map(top: ChainComplex, bot: ChainComplex, coeff_by_letter: dict,
                      retag: dict) -> ChainMap:
    """Blockwise map cone(W->U) -> cone(V->Z) from an exactly commuting
    square; labels are (side, (letter, tag))."""
    maps = {}
    for q in top.degrees:
        index = {lbl: i for i, lbl in enumerate(bot.basis.get(q, []))}
        entries = {}
        for c, (side, (letter, _tag)) in enumerate(top.basis[q]):
            target = (side, (letter, retag[side]))
            entries[(index[target], c)] = coeff_by_letter[letter]
        maps[q] = SparseIntMatrix(bot.dim(q), top.dim(q), entries)
    return ChainMap(top, bot, maps)


def expected_ty_homology(p: Params, m: int) -> HomologySummary:
    """The predicted relative homology in weight m.

    Closed form: with l = ell(a, b, m), the answer is Z in degrees 2l and
    2l+1 when neither a nor b divides m, Z/a (resp. Z/b) in degree 2l+1
    when exactly a (resp. b) divides m, and 0 when ab divides m.  The
    same groups are recomputed as an iterated mapping cone over the
    corners {m/ab, m/a, m/b, m} and the two answers are compared.
    """
    if m < 1:
        raise ValueError("weight must be positive")
    a, b = p.a, p.b
    l = ell(p, m)
    if m % a == 0 and m % b == 0:
        closed = HomologySummary.of({})
    elif m % a == 0:
        closed = HomologySummary.of({2 * l + 1: (0, (a,))})
    elif m % b == 0:
        closed = HomologySummary.of({2 * l + 1: (0, (b,))})
    else:
        closed = HomologySummary.of({2 * l: (1, ()), 2 * l + 1: (1, ())})

    low, high = 2 * l, 2 * l + 1
    Z = _corner_complex(m, low, high)
    W = _corner_complex(m // (a * b), low, high) if m % (a * b) == 0 else _zero_complex()
    U = _corner_complex(m // a, low, high) if m % a == 0 else _zero_complex()
    V = _corner_complex(m // b, low, high) if m % b == 0 else _zero_complex()
    top = mapping_cone(_corner_map(W, U, b))
    bot = mapping_cone(_corner_map(V, Z, b))
    # vertical maps multiply y by a; the square commutes exactly since ab = ba
    induced = _induced_cone_map(top, bot, {"x": 1, "y": a},
                                {"dom": m // b if m % b == 0 else 0, "cod": m})
    cone_answer = homology(mapping_cone(induced))
    assert cone_answer == closed, (cone_answer, closed)
    return closed


@lru_cache(maxsize=None)
def relative_homology_bar(p: Params, m: int) -> HomologySummary:
    return homology(relative_bar_complex(p, m))


@lru_cache(maxsize=None)
def relative_homology_small(p: Params, m: int) -> HomologySummary:
    return homology(relative_cone(p, m))


def ty_agreement_check(p: Params, m: int) -> HomologySummary:
    """Assert the bar model, the small cone model and the closed form
    agree in weight m; returns the common answer."""
    want = expected_ty_homology(p, m)
    bar = relative_homology_bar(p, m)
    if bar != want:
        raise TheoremViolation(
            f"bar homology {bar} != expected {want} at (a,b,m)=({p.a},{p.b},{m})")
    small = relative_homology_small(p, m)
    if small != want:
        raise TheoremViolation(
            f"cone homology {small} != expected {want} at (a,b,m)=({p.a},{p.b},{m})")
    return want


# ---------------------------------------------------------------------------
# Connes operator factor


@lru_cache(maxsize=None)
def bar_engine(p: Params, m: int) -> HomologyEngine:
    return HomologyEngine(relative_bar_complex(p, m))


@lru_cache(maxsize=None)
def curve_engine(p: Params, m: int) -> HomologyEngine:
    return HomologyEngine(small_complex_curve(p, m))


@lru_cache(maxsize=None)
def line_engine(p: Params, m: int) -> HomologyEngine:
    return HomologyEngine(small_complex_line(p, m))


@lru_cache(maxsize=None)
def cone_engine(p: Params, m: int) -> HomologyEngine:
    return HomologyEngine(relative_cone(p, m))


def _require_nondivisible(p: Params, m: int) -> None:
    if m % p.a == 0 or m % p.b == 0:
        raise PreconditionViolation(
            f"the factor statement needs a and b both prime to m, got ({p.a},{p.b},{m})")


def _single_free_generator(eng: HomologyEngine, q: int):
    gens = eng.generators(q)
    if [o for o, _ in gens] != [0]:
        raise TheoremViolation(
            f"H_{q} = {eng.group(q)} is not infinite cyclic as required")
    return gens[0][1]


def connes_factor_bar(p: Params, m: int) -> int:
    """Apply the cyclic B operator to the generator of H_{2l} of the
    relative bar complex and express it in the generator of H_{2l+1};
    the coefficient must be +-m."""
    _require_nondivisible(p, m)
    l = ell(p, m)
    C = relative_bar_complex(p, m)
    eng = bar_engine(p, m)
    g = _single_free_generator(eng, 2 * l)
    B = connes_matrix(p, m, 2 * l)
    img = C.chain_from_vector(2 * l + 1, B.matvec(C.vector_from_chain(2 * l, g)))
    _single_free_generator(eng, 2 * l + 1)
    (c,) = eng.coordinates(2 * l + 1, img)
    if abs(c) != m:
        raise TheoremViolation(f"cyclic operator factor {c}, expected +-{m}")
    return c


def _kernel_generator(M: SparseIntMatrix):
    """Generator of the rank-one kernel of an integer matrix."""
    res = smith_normal_form(M, transforms=True)
    null = M.ncols - res.rank
    if null != 1:
        raise TheoremViolation(f"kernel rank {null}, expected 1")
    return [res.V.row(r).get(M.ncols - 1, 0) for r in range(M.ncols)]


def connes_factor_small(p: Params, m: int) -> int:
    """Same factor, read off the small model.

    For l = ell(a, b, m) >= 1: the kernel of the parametrization map on
    H_{2l-1} of the curve model is infinite cyclic; pushing its generator
    through the de Rham operator lands in H_{2l} with coefficient +-m.
    For l = 0 the weight is a gap, the curve model is empty in low
    degrees, and the factor is read off the line model t^m -> m t^{m-1}dt
    inside the cone.
    """
    _require_nondivisible(p, m)
    l = ell(p, m)
    if l == 0:
        cone = relative_cone(p, m)
        eng = cone_engine(p, m)
        g = _single_free_generator(eng, 0)
        img = {}
        for (side, lbl), coeff in g.items():
            if side == "cod":
                vec = line_de_rham_matrix(p, m, 0).matvec(
                    small_complex_line(p, m).vector_from_chain(0, {lbl: coeff}))
                for tgt, v in small_complex_line(p, m).chain_from_vector(1, vec).items():
                    img[("cod", tgt)] = img.get(("cod", tgt), 0) - v
            else:
                raise TheoremViolation("curve model unexpectedly nonempty for a gap weight")
        _single_free_generator(eng, 1)
        (c,) = eng.coordinates(1, img)
        if abs(c) != m:
            raise TheoremViolation(f"de Rham factor {c}, expected +-{m}")
        return c

    curve = small_complex_curve(p, m)
    eng_a = curve_engine(p, m)
    eng_b = line_engine(p, m)
    q = 2 * l - 1
    gens_a = eng_a.generators(q)
    if any(o for o, _ in gens_a):
        raise TheoremViolation(f"H_{q} of the curve model has unexpected torsion")
    gens_b = eng_b.generators(q)
    f = parametrization_map(p, m)
    entries = {}
    for c_idx, (_, chain) in enumerate(gens_a):
        vec = f.matrix(q).matvec(curve.vector_from_chain(q, chain))
        coords = eng_b.coordinates(q, small_complex_line(p, m).chain_from_vector(q, vec))
        for r_idx, v in enumerate(coords):
            if v:
                entries[(r_idx, c_idx)] = v
    M = SparseIntMatrix(len(gens_b), len(gens_a), entries)
    kernel = _kernel_generator(M)
    z = {}
    for coeff, (_, chain) in zip(kernel, gens_a):
        for lbl, v in chain.items():
            z[lbl] = z.get(lbl, 0) + coeff * v
    z = {lbl: v for lbl, v in z.items() if v}
    dz_vec = de_rham_matrix(p, m, q).matvec(curve.vector_from_chain(q, z))
    dz = curve.chain_from_vector(q + 1, dz_vec)
    _single_free_generator(eng_a, q + 1)
    (c,) = eng_a.coordinates(q + 1, dz)
    if abs(c) != m:
        raise TheoremViolation(f"de Rham factor {c}, expected +-{m}")
    return c
