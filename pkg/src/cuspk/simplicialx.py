"""Gap-type simplicial complexes on the cyclic group and quotient homology.

For a weight m the simplex spanned by C_m carries the subcomplex generated
by the faces all of whose cyclic gaps are representable; the quotient space
is analysed through its relative chain complex.  The module also houses the
closed-form homology of the comparison space, the fixed-point bijection for
subgroups of C_m, and the explicit degree-2 generator used in the rank-one
regime.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from math import comb

from .cyclicbar import expected_ty_homology, relative_homology_bar
from .errors import PreconditionViolation, ResourceBound, TheoremViolation
from .homlinalg import ChainComplex, HomologySummary, SparseIntMatrix, homology
from .semigroup import Params, ell, is_member, weights

# Faces are bitmasks over the exponents {0, ..., m-1}; enumeration work is
# capped at this many subsets unless the caller raises the budget.
DEFAULT_BUDGET = 1 << 19


def mask_vertices(mask: int) -> tuple[int, ...]:
    """Exponents of a face mask, ascending."""
    out = []
    e = 0
    while mask:
        if mask & 1:
            out.append(e)
        mask >>= 1
        e += 1
    return tuple(out)


def vertices_mask(vertices) -> int:
    mask = 0
    for e in vertices:
        mask |= 1 << e
    return mask


def rotate_mask(mask: int, m: int, k: int = 1) -> int:
    """Add k to every exponent mod m."""
    k %= m
    full = (1 << m) - 1
    return ((mask << k) | (mask >> (m - k))) & full if k else mask


def cyclic_gaps(mask: int, m: int) -> tuple[int, ...]:
    """Successive differences of the exponents, read cyclically.

    A single vertex has the one gap m; the gaps of any face sum to m.
    """
    vs = mask_vertices(mask)
    if not vs:
        raise ValueError("empty face has no gaps")
    return tuple(vs[i + 1] - vs[i] for i in range(len(vs) - 1)) + (m - vs[-1] + vs[0],)


@dataclass(frozen=True)
class CmComplex:
    """A rotation-invariant simplicial complex on the vertex set C_m."""

    m: int
    faces: frozenset

    def __contains__(self, mask: int) -> bool:
        return mask in self.faces

    def __len__(self) -> int:
        return len(self.faces)

    def faces_of_dim(self, q: int) -> list:
        return sorted(f for f in self.faces if f.bit_count() == q + 1)

    def check_invariants(self) -> None:
        """Assert subset closure and rotation invariance, exhaustively."""
        for f in self.faces:
            if rotate_mask(f, self.m) not in self.faces:
                raise AssertionError(f"face {bin(f)} breaks rotation invariance")
            if f.bit_count() > 1:
                # dropping one vertex at a time reaches every subset
                for e in mask_vertices(f):
                    if f ^ (1 << e) not in self.faces:
                        raise AssertionError(f"face {bin(f)} breaks subset closure")


@lru_cache(maxsize=None)
def _member_table(p: Params, m: int) -> tuple:
    return tuple(is_member(p, g) for g in range(m + 1))


def face_in_sigma(p: Params, m: int, mask: int) -> bool:
    """Whether every cyclic gap of the face is representable."""
    rep = _member_table(p, m)
    return all(rep[g] for g in cyclic_gaps(mask, m))


@lru_cache(maxsize=None)
def build_sigma(p: Params, m: int, budget: int = DEFAULT_BUDGET) -> CmComplex:
    """The subcomplex of faces whose cyclic gaps all lie in the semigroup.

    Rotation-invariant and subset-closed by construction: rotating a face
    permutes its gaps, and dropping a vertex merges two gaps into their sum.
    Nonempty exactly when m itself is representable (single vertices).
    """
    if m < 1:
        raise ValueError("m must be positive")
    if 1 << m > budget:
        raise ResourceBound(f"2^{m} subsets exceed the budget of {budget}")
    rep = _member_table(p, m)
    faces = []
    for mask in range(1, 1 << m):
        if all(rep[g] for g in cyclic_gaps(mask, m)):
            faces.append(mask)
    return CmComplex(m=m, faces=frozenset(faces))


def _relative_complex(p: Params, m: int, degrees, budget: int) -> ChainComplex:
    """Chain complex of the quotient of the full simplex by the gap subcomplex.

    Degree-q basis: the (q+1)-element subsets of C_m outside the subcomplex.
    Boundary faces that land in the subcomplex are dropped.  Only the listed
    degrees are materialised, so generator checks at large m stay cheap.
    """
    degrees = sorted(degrees)
    cost = sum(comb(m, q + 1) for q in degrees)
    if cost > budget:
        raise ResourceBound(f"{cost} basis faces exceed the budget of {budget}")
    rep = _member_table(p, m)

    def outside(vs):
        vs = list(vs)
        gaps = [vs[i + 1] - vs[i] for i in range(len(vs) - 1)]
        gaps.append(m - vs[-1] + vs[0])
        return not all(rep[g] for g in gaps)

    basis = {}
    index = {}
    for q in degrees:
        faces = [vertices_mask(c) for c in combinations(range(m), q + 1)
                 if outside(c)]
        faces.sort()
        basis[q] = faces
        index[q] = {f: i for i, f in enumerate(faces)}
    boundaries = {}
    for q in degrees:
        if q - 1 not in index:
            continue
        rows = index[q - 1]
        entries = {}
        for col, mask in enumerate(basis[q]):
            for i, e in enumerate(mask_vertices(mask)):
                face = mask ^ (1 << e)
                r = rows.get(face)
                if r is not None:
                    entries[(r, col)] = -1 if i % 2 else 1
        boundaries[q] = SparseIntMatrix(len(basis[q - 1]), len(basis[q]), entries)
    return ChainComplex(basis, boundaries)


@lru_cache(maxsize=None)
def x_complex(p: Params, m: int, budget: int = DEFAULT_BUDGET) -> ChainComplex:
    if m < 1:
        raise ValueError("m must be positive")
    if 1 << m > budget:
        raise ResourceBound(f"2^{m} subsets exceed the budget of {budget}")
    return _relative_complex(p, m, range(m), budget)


@lru_cache(maxsize=None)
def x_homology(p: Params, m: int, budget: int = DEFAULT_BUDGET) -> HomologySummary:
    """Reduced homology of the quotient space at weight m."""
    return homology(x_complex(p, m, budget))


def expected_y_homology(p: Params, m: int) -> HomologySummary:
    """Closed-form reduced homology of the comparison space.

    Concentrated in a single degree determined by the lattice count and the
    divisibility of m by a and b.
    """
    a, b = p.a, p.b
    r = ell(p, m)
    if m % a == 0 and m % b == 0:
        return HomologySummary.of({2 * r + 2: ((a - 1) * (b - 1), ())})
    if m % a == 0:
        return HomologySummary.of({2 * r + 1: (a - 1, ())})
    if m % b == 0:
        return HomologySummary.of({2 * r + 1: (b - 1, ())})
    return HomologySummary.of({2 * r: (1, ())})


@dataclass(frozen=True)
class ConjectureBReport:
    """Homology comparison of the two candidate models at one weight.

    The agreement flag is evidence, not a verdict: matching groups are
    necessary for the conjectured equivalence but never sufficient.
    """

    a: int
    b: int
    m: int
    x_summary: HomologySummary
    y_summary: HomologySummary
    agree: bool

    def to_json(self) -> dict:
        return {
            "a": self.a,
            "b": self.b,
            "m": self.m,
            "x": self.x_summary.to_json(),
            "y": self.y_summary.to_json(),
            "evidence": self.agree,
        }


def conjecture_b_homology_check(p: Params, m: int,
                                budget: int = DEFAULT_BUDGET) -> ConjectureBReport:
    """Compare quotient-space homology against the closed form.

    Two layers with different standing.  The circle-level pipeline must
    reproduce the closed form: a mismatch there contradicts a theorem and
    raises.  The space-level comparison is recorded as evidence; callers
    surface a disagreement as a finding rather than an error.
    """
    want = expected_ty_homology(p, m)
    bar = relative_homology_bar(p, m)
    if bar != want:
        raise TheoremViolation(
            f"circle-level homology at (a,b,m)=({p.a},{p.b},{m}): "
            f"pipeline gave {bar}, closed form says {want}")
    x = x_homology(p, m, budget)
    y = expected_y_homology(p, m)
    return ConjectureBReport(a=p.a, b=p.b, m=m, x_summary=x, y_summary=y,
                             agree=x == y)


def fixed_point_check(p: Params, m: int, s: int,
                      budget: int = DEFAULT_BUDGET) -> bool:
    """Verify the fixed-point description of the gap complex under C_s.

    Roots of order s: the s-th power map sends the C_s-fixed faces at
    weight m onto the full complex at weight t = m/s, and the inverse
    replicates each face across the s blocks of residues mod t.  Checks
    that the replication map is a bijection onto the fixed faces and that
    it repeats each gap sequence s times.  Returns True; a mismatch raises
    TheoremViolation.
    """
    if s < 1 or m % s != 0:
        raise PreconditionViolation("s must be a positive divisor of m")
    t = m // s
    sigma_t = build_sigma(p, t, budget)
    sigma_m = build_sigma(p, m, budget)
    fixed = {f for f in sigma_m.faces if rotate_mask(f, m, t) == f}
    lifted = set()
    for g in sigma_t.faces:
        lift = 0
        for block in range(s):
            lift |= g << (block * t)
        lifted.add(lift)
        if sorted(cyclic_gaps(lift, m)) != sorted(cyclic_gaps(g, t) * s):
            raise TheoremViolation(
                f"lift of face {bin(g)} at (a,b,m,s)=({p.a},{p.b},{m},{s}) "
                "does not repeat the gap sequence")
    if lifted != fixed:
        raise TheoremViolation(
            f"fixed faces at (a,b,m,s)=({p.a},{p.b},{m},{s}) are not the "
            f"lifts: {len(fixed)} fixed vs {len(lifted)} lifted")
    return True


def generator_cycle(p: Params, m: int, budget: int = DEFAULT_BUDGET) -> dict:
    """Explicit degree-2 cycle generating the top homology, rank-one case.

    Requires exactly one interior lattice point and m divisible by neither
    a nor b.  The chain is supported on the triangles (0, t1, t2) with
    t2 < m' and t2 - t1 congruent to l or -l mod m', signed by which
    congruence holds; triangles lying in the gap subcomplex vanish in the
    quotient and are omitted from the returned mask-to-sign mapping.

    Asserts that the chain is a cycle and that its class generates the
    degree-2 homology, which is checked to be free of rank one.
    """
    a, b = p.a, p.b
    if ell(p, m) != 1:
        raise PreconditionViolation(f"need exactly one interior weight, "
                                    f"got {ell(p, m)} at m={m}")
    if m % a == 0 or m % b == 0:
        raise PreconditionViolation("m must be divisible by neither a nor b")
    data = weights(p, m)
    assert len(data.open_weights) == 1
    entry = data.entries[data.open_weights[0]]
    mp, l = entry.m_prime, entry.l
    assert a <= l <= mp - b
    chain = {}
    for t1 in range(1, mp):
        for t2 in range(t1 + 1, mp):
            diff = (t2 - t1) % mp
            if diff != l and diff != mp - l:
                continue
            mask = vertices_mask((0, t1, t2))
            if not face_in_sigma(p, m, mask):
                chain[mask] = 1 if diff == l else -1
    C = _relative_complex(p, m, (1, 2, 3), budget)
    vec = [0] * C.dim(2)
    for mask, sign in chain.items():
        vec[C.basis[2].index(mask)] = sign
    if any(C.boundary(2).matvec(vec)):
        raise TheoremViolation(f"generator chain at (a,b,m)=({a},{b},{m}) "
                               "is not a cycle")
    if homology(C).group(2) != (1, ()):
        raise TheoremViolation(f"degree-2 homology at (a,b,m)=({a},{b},{m}) "
                               "is not free of rank one")
    # quotient by the chain: append it as an extra degree-3 column and
    # demand that degree-2 homology dies
    aug = dict(C.boundary(3).entries())
    extra = C.dim(3)
    for r, v in enumerate(vec):
        if v:
            aug[(r, extra)] = v
    basis = {1: C.basis[1], 2: C.basis[2], 3: list(C.basis[3]) + ["cycle"]}
    bounds = {2: C.boundary(2),
              3: SparseIntMatrix(C.dim(2), extra + 1, aug)}
    if homology(ChainComplex(basis, bounds)).group(2) != (0, ()):
        raise TheoremViolation(f"chain at (a,b,m)=({a},{b},{m}) does not "
                               "generate the degree-2 homology")
    return chain
