"""Big Witt vectors on truncation sets.

Two regimes are implemented.  Over the prime field F_p the Witt group
W_S(F_p) decomposes along orbits: writing each m in S uniquely as e * p^i
with p not dividing e, the group is the product over such e of Z/p^{n_e}
with n_e the number of powers p^i for which e * p^i stays in S.  The
Verschiebung, Frobenius and restriction operators become integer matrices
between these products, and the relative K-groups of interest are
cokernels of stacked Verschiebung matrices, computed exactly via Smith
form.

Over the integers, Witt vectors are handled through ghost coordinates
w_n(x) = sum_{d | n} d * x_d^{n/d}; sums and products are computed
ghostwise and pulled back, with every inverse step checked for exact
divisibility.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

from cuspk.errors import IntegralityViolation, TheoremViolation
from cuspk.homlinalg import HomologySummary, SparseIntMatrix, snf_diagonal
from cuspk.semigroup import Params, TruncationSet, divide_set, truncation_S


def _split_prime(n: int, p: int) -> tuple[int, int]:
    """n = p^v * n' with p not dividing n'; returns (v, n')."""
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v, n


@dataclass(frozen=True)
class PTypicalProfile:
    """Orbit decomposition of W_S(F_p): orbits (e, n_e) with p not dividing e.

    The group is the product of Z/p^{n_e}; the total p-length equals the
    cardinality of S because m = e * p^i is unique.
    """

    prime: int
    orbits: tuple

    @property
    def orders(self) -> tuple:
        return tuple(self.prime ** n for _, n in self.orbits)

    @property
    def length(self) -> int:
        return sum(n for _, n in self.orbits)

    def index(self, e: int) -> int:
        for i, (ee, _) in enumerate(self.orbits):
            if ee == e:
                return i
        raise KeyError(f"no orbit {e}")


def profile(S: TruncationSet, prime: int) -> PTypicalProfile:
    orbits = []
    for e in S:
        if e % prime:
            n_e = 0
            pw = 1
            while e * pw in S:
                n_e += 1
                pw *= prime
            orbits.append((e, n_e))
    prof = PTypicalProfile(prime=prime, orbits=tuple(sorted(orbits)))
    assert prof.length == len(S)
    return prof


@dataclass(frozen=True)
class AbelianMap:
    """Homomorphism between products of cyclic groups, as an integer matrix.

    dom and cod list the cyclic orders; the matrix acts on column vectors
    of residues.  Well-definedness (each entry times the domain order
    vanishing in the codomain factor) is checked on construction.
    """

    dom: tuple
    cod: tuple
    matrix: SparseIntMatrix

    def __post_init__(self):
        if (self.matrix.nrows, self.matrix.ncols) != (len(self.cod), len(self.dom)):
            raise ValueError("matrix shape does not match orders")
        for (r, c), v in self.matrix.entries():
            if (v * self.dom[c]) % self.cod[r]:
                raise ValueError(f"entry at ({r},{c}) is not a homomorphism")

    def compose(self, other: "AbelianMap") -> "AbelianMap":
        """self о other."""
        if other.cod != self.dom:
            raise ValueError("composition mismatch")
        return AbelianMap(dom=other.dom, cod=self.cod,
                          matrix=self.matrix @ other.matrix)

    def is_zero(self) -> bool:
        return all(v % self.cod[r] == 0 for (r, c), v in self.matrix.entries())


def verschiebung(S: TruncationSet, n: int, prime: int) -> AbelianMap:
    """V_n : W_{S/n}(F_p) -> W_S(F_p) on p-typical coordinates.

    With n = p^v * n', the orbit e of S/n maps to the orbit n'e of S by
    multiplication by n (the factor n' twists, p^v is the p-typical
    Verschiebung, which is multiplication by p^v into the longer cyclic
    group).
    """
    v, n_prime = _split_prime(n, prime)
    dom_prof = profile(divide_set(S, n), prime)
    cod_prof = profile(S, prime)
    entries = {}
    for j, (e, ln) in enumerate(dom_prof.orbits):
        i = cod_prof.index(n_prime * e)
        assert cod_prof.orbits[i][1] == ln + v
        entries[(i, j)] = n
    return AbelianMap(dom=dom_prof.orders, cod=cod_prof.orders,
                      matrix=SparseIntMatrix(len(cod_prof.orbits),
                                             len(dom_prof.orbits), entries))


def frobenius(S: TruncationSet, n: int, prime: int) -> AbelianMap:
    """F_n : W_S(F_p) -> W_{S/n}(F_p) on p-typical coordinates.

    The orbit e of S with n' | e and e*p^v still relevant maps to orbit
    e/n' of S/n by reduction; everything else is annihilated.
    """
    v, n_prime = _split_prime(n, prime)
    dom_prof = profile(S, prime)
    cod_prof = profile(divide_set(S, n), prime)
    entries = {}
    for j, (e, ln) in enumerate(dom_prof.orbits):
        if e % n_prime == 0 and ln > v:
            i = cod_prof.index(e // n_prime)
            assert cod_prof.orbits[i][1] == ln - v
            entries[(i, j)] = 1
    return AbelianMap(dom=dom_prof.orders, cod=cod_prof.orders,
                      matrix=SparseIntMatrix(len(cod_prof.orbits),
                                             len(dom_prof.orbits), entries))


def restriction(S: TruncationSet, T: TruncationSet, prime: int) -> AbelianMap:
    """R^S_T : W_S(F_p) -> W_T(F_p) for T a subset of S."""
    if not set(T.members) <= set(S.members):
        raise ValueError("T must be contained in S")
    dom_prof = profile(S, prime)
    cod_prof = profile(T, prime)
    entries = {}
    for i, (e, _) in enumerate(cod_prof.orbits):
        entries[(i, dom_prof.index(e))] = 1
    return AbelianMap(dom=dom_prof.orders, cod=cod_prof.orders,
                      matrix=SparseIntMatrix(len(cod_prof.orbits),
                                             len(dom_prof.orbits), entries))


def cokernel_factors(orders, maps) -> list:
    """Invariant factors (> 1) of coker of the given maps into prod Z/orders."""
    n = len(orders)
    entries = {(i, i): orders[i] for i in range(n)}
    col = n
    for mp in maps:
        for (r, c), v in mp.matrix.entries():
            entries[(r, col + c)] = v
        col += len(mp.dom)
    stacked = SparseIntMatrix(n, col, entries)
    diag = snf_diagonal(stacked)
    assert len(diag) == n, "orders block forces full rank"
    return [d for d in diag if d > 1]


@dataclass(frozen=True)
class KGroupResult:
    """Relative K-group in one even degree, as a finite abelian group."""

    a: int
    b: int
    prime: int
    q: int
    invariant_factors: tuple
    length: int
    expected_length: int
    perfect_field_only: bool

    @property
    def group(self) -> HomologySummary:
        return HomologySummary.of({self.q: (0, self.invariant_factors)})

    def to_json(self) -> dict:
        return {
            "a": self.a, "b": self.b, "p": self.prime, "q": self.q,
            "invariant_factors": list(self.invariant_factors),
            "length": self.length,
            "expected_length": self.expected_length,
            "perfect_field_only": self.perfect_field_only,
        }


def relative_k_group(p: Params, prime: int, q: int) -> KGroupResult:
    """The degree-q relative K-group over F_p as an abelian group.

    For q = 2r >= 0 this is the cokernel of [V_a | V_b] on W_{S(a,b,r)},
    which the restriction map identifies with W_T(F_p) for T the members
    of S(a,b,r) divisible by neither a nor b.  Odd and negative degrees
    are trivial.  The identification and the length formula
    (2r+1)(a-1)(b-1)/2 are re-verified; failure raises TheoremViolation.
    When the prime divides a*b the group is still computed, but the
    K-theoretic reading assumes a perfect base field of characteristic p,
    so the result is flagged.
    """
    if q < 0 or q % 2 == 1:
        return KGroupResult(a=p.a, b=p.b, prime=prime, q=q,
                            invariant_factors=(), length=0, expected_length=0,
                            perfect_field_only=(p.a * p.b) % prime == 0)
    r = q // 2
    S = truncation_S(p, r)
    prof = profile(S, prime)
    Va = verschiebung(S, p.a, prime)
    Vb = verschiebung(S, p.b, prime)
    factors = cokernel_factors(prof.orders, [Va, Vb])

    T = TruncationSet(m for m in S if m % p.a and m % p.b)
    t_orders = sorted(profile(T, prime).orders)
    expected = (2 * r + 1) * (p.a - 1) * (p.b - 1) // 2
    length = sum(_p_length(d, prime) for d in factors)

    if sorted(factors) != [d for d in t_orders if d > 1]:
        raise TheoremViolation(
            f"cokernel factors {sorted(factors)} differ from W_T orders {t_orders}")
    rest = restriction(S, T, prime)
    if not rest.compose(Va).is_zero() or not rest.compose(Vb).is_zero():
        raise TheoremViolation("restriction does not annihilate the Verschiebung images")
    if length != expected:
        raise TheoremViolation(f"length {length} != expected {expected}")

    return KGroupResult(a=p.a, b=p.b, prime=prime, q=q,
                        invariant_factors=tuple(sorted(factors)),
                        length=length, expected_length=expected,
                        perfect_field_only=(p.a * p.b) % prime == 0)


def _p_length(d: int, prime: int) -> int:
    n = 0
    while d % prime == 0:
        d //= prime
        n += 1
    if d != 1:
        raise TheoremViolation(f"cokernel factor {d * prime ** n} is not a {prime}-power")
    return n


# ---------------------------------------------------------------------------
# ghost arithmetic over the integers


@dataclass(frozen=True)
class GhostWittElement:
    """A Witt vector over Z on a truncation set, in Witt coordinates."""

    S: TruncationSet
    coords: tuple

    @classmethod
    def of(cls, S: TruncationSet, mapping: dict) -> "GhostWittElement":
        coords = tuple((n, int(mapping.get(n, 0))) for n in S)
        return cls(S=S, coords=coords)

    def coord(self, n: int) -> int:
        for m, v in self.coords:
            if m == n:
                return v
        raise KeyError(n)

    def as_dict(self) -> dict:
        return dict(self.coords)


def ghost(x: GhostWittElement) -> dict:
    """Ghost coordinates w_n = sum over divisors d of n of d * x_d^{n/d}."""
    xd = x.as_dict()
    out = {}
    for n in x.S:
        out[n] = sum(d * xd[d] ** (n // d) for d in x.S if n % d == 0)
    return out


def unghost(S: TruncationSet, w: dict) -> GhostWittElement:
    """Invert the ghost map over Z; raises IntegralityViolation when the
    required divisions are not exact."""
    coords: dict[int, int] = {}
    for n in S:  # ascending order makes divisors available
        acc = w[n]
        for d in S:
            if d < n and n % d == 0:
                acc -= d * coords[d] ** (n // d)
        if acc % n:
            raise IntegralityViolation(f"coordinate {n} needs {acc}/{n}")
        coords[n] = acc // n
    return GhostWittElement.of(S, coords)


def witt_zero(S: TruncationSet) -> GhostWittElement:
    return GhostWittElement.of(S, {})


def teichmuller(S: TruncationSet, a: int) -> GhostWittElement:
    """[a] = (a, 0, 0, ...); its ghost coordinates are (a^n)_n."""
    return GhostWittElement.of(S, {1: a} if 1 in S else {})


def witt_add(x: GhostWittElement, y: GhostWittElement) -> GhostWittElement:
    if x.S != y.S:
        raise ValueError("mismatched truncation sets")
    gx, gy = ghost(x), ghost(y)
    return unghost(x.S, {n: gx[n] + gy[n] for n in x.S})


def witt_mul(x: GhostWittElement, y: GhostWittElement) -> GhostWittElement:
    if x.S != y.S:
        raise ValueError("mismatched truncation sets")
    gx, gy = ghost(x), ghost(y)
    return unghost(x.S, {n: gx[n] * gy[n] for n in x.S})


def witt_neg(x: GhostWittElement) -> GhostWittElement:
    gx = ghost(x)
    return unghost(x.S, {n: -gx[n] for n in x.S})


def witt_V(S: TruncationSet, n: int, x: GhostWittElement) -> GhostWittElement:
    """V_n : W_{S/n} -> W_S; in Witt coordinates (V_n x)_m = x_{m/n} when
    n divides m and 0 otherwise."""
    if x.S != divide_set(S, n):
        raise ValueError("x must live on S/n")
    xd = x.as_dict()
    return GhostWittElement.of(S, {m: xd[m // n] for m in S if m % n == 0})


def witt_F(S: TruncationSet, n: int, x: GhostWittElement) -> GhostWittElement:
    """F_n : W_S -> W_{S/n}, characterised by w_m(F_n x) = w_{mn}(x)."""
    if x.S != S:
        raise ValueError("x must live on S")
    gx = ghost(x)
    Sn = divide_set(S, n)
    return unghost(Sn, {m: gx[m * n] for m in Sn})


def witt_restrict(T: TruncationSet, x: GhostWittElement) -> GhostWittElement:
    if not set(T.members) <= set(x.S.members):
        raise ValueError("T must be contained in the truncation set of x")
    xd = x.as_dict()
    return GhostWittElement.of(T, {n: xd[n] for n in T})
