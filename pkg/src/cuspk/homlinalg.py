"""Exact linear algebra over the integers and the rationals.

Provides the machinery every homology computation in the toolkit runs on:
sparse integer matrices, Smith normal form with optional unimodular
transforms, chain complexes with integral homology (ranks, torsion and
generator lifts), mapping cones, and an exact rational simplex used for
convex separation certificates.

No floating point enters this module; torsion results are exact and the
LP certificates can be re-verified by direct substitution.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

from cuspk.errors import ComplexInvalid, DimensionMismatch, NotAChainMap


class SparseIntMatrix:
    """Immutable sparse integer matrix stored row-major."""

    __slots__ = ("nrows", "ncols", "_rows")

    def __init__(self, nrows: int, ncols: int, entries=None):
        if nrows < 0 or ncols < 0:
            raise DimensionMismatch("negative dimensions")
        rows = [dict() for _ in range(nrows)]
        if entries:
            for (r, c), v in entries.items():
                if not (0 <= r < nrows and 0 <= c < ncols):
                    raise DimensionMismatch(f"entry ({r},{c}) outside {nrows}x{ncols}")
                if v:
                    rows[r][c] = int(v)
        self.nrows = nrows
        self.ncols = ncols
        self._rows = rows

    @classmethod
    def _from_rows(cls, nrows, ncols, rows):
        m = cls.__new__(cls)
        m.nrows, m.ncols, m._rows = nrows, ncols, rows
        return m

    @classmethod
    def from_dense(cls, dense) -> "SparseIntMatrix":
        nrows = len(dense)
        ncols = len(dense[0]) if nrows else 0
        entries = {(r, c): v for r, row in enumerate(dense)
                   for c, v in enumerate(row) if v}
        return cls(nrows, ncols, entries)

    @classmethod
    def identity(cls, n: int) -> "SparseIntMatrix":
        return cls(n, n, {(i, i): 1 for i in range(n)})

    @classmethod
    def diagonal(cls, diag, nrows: int, ncols: int) -> "SparseIntMatrix":
        return cls(nrows, ncols, {(i, i): d for i, d in enumerate(diag) if d})

    def row(self, r: int) -> dict:
        return self._rows[r]

    def entries(self):
        for r, row in enumerate(self._rows):
            for c, v in row.items():
                yield (r, c), v

    @property
    def nnz(self) -> int:
        return sum(len(row) for row in self._rows)

    def transpose(self) -> "SparseIntMatrix":
        rows = [dict() for _ in range(self.ncols)]
        for r, row in enumerate(self._rows):
            for c, v in row.items():
                rows[c][r] = v
        return SparseIntMatrix._from_rows(self.ncols, self.nrows, rows)

    def __matmul__(self, other: "SparseIntMatrix") -> "SparseIntMatrix":
        if self.ncols != other.nrows:
            raise DimensionMismatch(f"{self.nrows}x{self.ncols} @ {other.nrows}x{other.ncols}")
        rows = []
        orows = other._rows
        for row in self._rows:
            acc: dict[int, int] = {}
            for c, v in row.items():
                for c2, v2 in orows[c].items():
                    acc[c2] = acc.get(c2, 0) + v * v2
            rows.append({c: v for c, v in acc.items() if v})
        return SparseIntMatrix._from_rows(self.nrows, other.ncols, rows)

    def matvec(self, x) -> list:
        if len(x) != self.ncols:
            raise DimensionMismatch("vector length != ncols")
        out = []
        for row in self._rows:
            out.append(sum(v * x[c] for c, v in row.items()))
        return out

    def column_vector(self, c: int) -> list:
        return [row.get(c, 0) for row in self._rows]

    def is_zero(self) -> bool:
        return all(not row for row in self._rows)

    def to_dense(self) -> list:
        return [[row.get(c, 0) for c in range(self.ncols)] for row in self._rows]

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseIntMatrix):
            return NotImplemented
        return (self.nrows, self.ncols) == (other.nrows, other.ncols) and \
            self._rows == other._rows

    def __repr__(self) -> str:
        return f"SparseIntMatrix({self.nrows}x{self.ncols}, nnz={self.nnz})"


@dataclass
class SNFResult:
    """U @ M @ V == D with U, V unimodular and D = diag(invariant factors).

    diag holds the nonzero invariant factors d_1 | d_2 | ... (positive).
    The transforms and their inverses are None when the factor-only mode
    was requested.
    """

    diag: list
    nrows: int
    ncols: int
    U: SparseIntMatrix | None = None
    Uinv: SparseIntMatrix | None = None
    V: SparseIntMatrix | None = None
    Vinv: SparseIntMatrix | None = None

    @property
    def rank(self) -> int:
        return len(self.diag)

    @property
    def D(self) -> SparseIntMatrix:
        return SparseIntMatrix.diagonal(self.diag, self.nrows, self.ncols)

    def __iter__(self):
        return iter((self.U, self.D, self.V))


class _SnfWork:
    """Mutable elimination state; transforms tracked in op-friendly layouts."""

    def __init__(self, matrix: SparseIntMatrix, transforms: bool):
        self.m, self.n = matrix.nrows, matrix.ncols
        self.rows = [dict(row) for row in matrix._rows]
        self.cols: dict[int, set] = {}
        for r, row in enumerate(self.rows):
            for c in row:
                self.cols.setdefault(c, set()).add(r)
        self.transforms = transforms
        if transforms:
            self.U = [{i: 1} for i in range(self.m)]    # row-major
            self.Uic = [{i: 1} for i in range(self.m)]  # Uinv, column-major
            self.Vc = [{i: 1} for i in range(self.n)]   # V, column-major
            self.Vir = [{i: 1} for i in range(self.n)]  # Vinv, row-major

    # -- primitive operations; every mutation of the matrix goes through these

    def row_add(self, r1: int, r2: int, t: int) -> None:
        # row r1 += t * row r2
        row2 = self.rows[r2]
        row1 = self.rows[r1]
        cols = self.cols
        for c, v in row2.items():
            nv = row1.get(c, 0) + t * v
            if nv:
                if c not in row1:
                    cols[c].add(r1)
                row1[c] = nv
            elif c in row1:
                del row1[c]
                cols[c].discard(r1)
        if self.transforms:
            u1, u2 = self.U[r1], self.U[r2]
            for c, v in u2.items():
                nv = u1.get(c, 0) + t * v
                if nv:
                    u1[c] = nv
                elif c in u1:
                    del u1[c]
            # Uinv: column r2 -= t * column r1
            c1, c2 = self.Uic[r1], self.Uic[r2]
            for rr, v in c1.items():
                nv = c2.get(rr, 0) - t * v
                if nv:
                    c2[rr] = nv
                elif rr in c2:
                    del c2[rr]

    def col_add(self, c1: int, c2: int, t: int) -> None:
        # col c1 += t * col c2
        rows = self.rows
        cols = self.cols
        for r in list(self.cols.get(c2, ())):
            v = rows[r][c2]
            nv = rows[r].get(c1, 0) + t * v
            if nv:
                if c1 not in rows[r]:
                    cols.setdefault(c1, set()).add(r)
                rows[r][c1] = nv
            elif c1 in rows[r]:
                del rows[r][c1]
                cols[c1].discard(r)
        if self.transforms:
            v1, v2 = self.Vc[c1], self.Vc[c2]
            for rr, v in v2.items():
                nv = v1.get(rr, 0) + t * v
                if nv:
                    v1[rr] = nv
                elif rr in v1:
                    del v1[rr]
            # Vinv: row c2 -= t * row c1
            r1, r2 = self.Vir[c1], self.Vir[c2]
            for cc, v in r1.items():
                nv = r2.get(cc, 0) - t * v
                if nv:
                    r2[cc] = nv
                elif cc in r2:
                    del r2[cc]

    def row_negate(self, r: int) -> None:
        self.rows[r] = {c: -v for c, v in self.rows[r].items()}
        if self.transforms:
            self.U[r] = {c: -v for c, v in self.U[r].items()}
            self.Uic[r] = {rr: -v for rr, v in self.Uic[r].items()}


def _snf_work_run(work: _SnfWork):
    """Eliminate to diagonal form; returns list of (row, col, value) pivots."""
    rows, cols = work.rows, work.cols
    heap = [(len(row), r) for r, row in enumerate(rows) if row]
    heapq.heapify(heap)
    pivots = []

    def push(r):
        if rows[r]:
            heapq.heappush(heap, (len(rows[r]), r))

    def pop_min_row(skip):
        # smallest-fill active row not in skip; lazy heap entries
        stash = []
        got = None
        while heap:
            nnz, r = heapq.heappop(heap)
            if not rows[r] or len(rows[r]) != nnz:
                if rows[r]:
                    heapq.heappush(heap, (len(rows[r]), r))
                continue
            if r in skip:
                stash.append((nnz, r))
                continue
            got = r
            break
        for item in stash:
            heapq.heappush(heap, item)
        return got

    def eliminate(r0, c0):
        v = rows[r0][c0]
        if v < 0:
            work.row_negate(r0)
            v = -v
        for r in list(cols[c0]):
            if r != r0:
                work.row_add(r, r0, -(rows[r][c0] // v))
        # with |v| == 1 all column entries clear exactly; then clear the row
        if all(r == r0 for r in cols[c0]):
            for c in list(rows[r0]):
                if c != c0:
                    work.col_add(c, c0, -(rows[r0][c] // v))
            return all(c == c0 for c in rows[r0])
        return False

    while True:
        skip = set()
        r0 = pop_min_row(skip)
        if r0 is None:
            break
        # prefer a unit pivot; hunt through rows by increasing fill
        unit = None
        while r0 is not None:
            best = None
            for c, v in rows[r0].items():
                if v == 1 or v == -1:
                    k = len(cols[c])
                    if best is None or k < best[0]:
                        best = (k, c)
            if best is not None:
                unit = (r0, best[1])
                break
            skip.add(r0)
            r0 = pop_min_row(skip)
        for r in skip:
            push(r)
        if unit is not None:
            r0, c0 = unit
            isolated = eliminate(r0, c0)
            assert isolated  # unit pivots always clear their row and column
            v = rows[r0].pop(c0)
            cols[c0].discard(r0)
            pivots.append((r0, c0, abs(v)))
            push(r0)
            continue
        # no unit entries anywhere: general phase on smallest-magnitude entry
        r0, c0, v0 = None, None, None
        for r, row in enumerate(rows):
            for c, v in row.items():
                if v0 is None or abs(v) < v0:
                    r0, c0, v0 = r, c, abs(v)
        while True:
            if eliminate(r0, c0):
                # pivot isolated; enforce divisibility into the rest
                v = abs(rows[r0][c0])
                offender = None
                for r, row in enumerate(rows):
                    if r == r0:
                        continue
                    for c, w in row.items():
                        if w % v:
                            offender = r
                            break
                    if offender is not None:
                        break
                if offender is None:
                    pivots.append((r0, c0, v))
                    del rows[r0][c0]
                    cols[c0].discard(r0)
                    break
                work.row_add(r0, offender, 1)
            # pivot position may no longer hold the smallest entry; rescan
            r0, c0, v0 = None, None, None
            for r, row in enumerate(rows):
                for c, v in row.items():
                    if v0 is None or abs(v) < v0:
                        r0, c0, v0 = r, c, abs(v)
        heap = [(len(row), r) for r, row in enumerate(rows) if row]
        heapq.heapify(heap)
    return pivots


def _pairwise_normalize(diag: list) -> list:
    d = [abs(x) for x in diag]
    changed = True
    while changed:
        changed = False
        for i in range(len(d)):
            for j in range(i + 1, len(d)):
                if d[j] % d[i]:
                    g = gcd(d[i], d[j])
                    d[i], d[j] = g, d[i] // g * d[j]
                    changed = True
    return sorted(d)


def smith_normal_form(matrix: SparseIntMatrix, transforms: bool = False) -> SNFResult:
    """Smith normal form over the integers.

    With transforms=True the result satisfies U @ M @ V == D exactly, with
    U, V unimodular, and carries the inverses as well.  Factor-only mode
    skips all transform bookkeeping and is considerably faster; it returns
    the same invariant factors.
    """
    work = _SnfWork(matrix, transforms)
    pivots = _snf_work_run(work)
    if not transforms:
        return SNFResult(diag=_pairwise_normalize([v for _, _, v in pivots]),
                         nrows=matrix.nrows, ncols=matrix.ncols)

    # permute pivots to the leading diagonal, non-unit values last so the
    # divisibility fixes stay among trailing entries
    pivots.sort(key=lambda p: p[2])
    m, n = work.m, work.n
    row_perm = {}
    col_perm = {}
    k = 0
    for r, c, v in pivots:
        row_perm[r] = k
        col_perm[c] = k
        k += 1
    rest = k
    for r in range(m):
        if r not in row_perm:
            row_perm[r] = rest
            rest += 1
    rest = k
    for c in range(n):
        if c not in col_perm:
            col_perm[c] = rest
            rest += 1

    diag = [v for _, _, v in pivots]
    U = [work.U[r] for r in sorted(range(m), key=lambda r: row_perm[r])]
    Uic_cols = [work.Uic[r] for r in sorted(range(m), key=lambda r: row_perm[r])]
    Vc_cols = [work.Vc[c] for c in sorted(range(n), key=lambda c: col_perm[c])]
    Vir = [work.Vir[c] for c in sorted(range(n), key=lambda c: col_perm[c])]

    Umat = SparseIntMatrix(m, m, {(i, c): v for i, row in enumerate(U)
                                  for c, v in row.items()})
    Uinv = SparseIntMatrix(m, m, {(r, j): v for j, col in enumerate(Uic_cols)
                                  for r, v in col.items()})
    Vmat = SparseIntMatrix(n, n, {(r, j): v for j, col in enumerate(Vc_cols)
                                  for r, v in col.items()})
    Vinv = SparseIntMatrix(n, n, {(i, c): v for i, row in enumerate(Vir)
                                  for c, v in row.items()})

    res = SNFResult(diag=diag, nrows=m, ncols=n,
                    U=Umat, Uinv=Uinv, V=Vmat, Vinv=Vinv)
    _fix_divisibility(res)
    return res


def _fix_divisibility(res: SNFResult) -> None:
    """Restore d_i | d_{i+1} among the pivot diagonal, updating transforms."""
    diag = res.diag
    k = len(diag)
    if k < 2:
        return
    # operate on the k x k leading block with fresh dense work; sizes here
    # are the pivot count, and the block is diagonal so ops stay local
    changed = True
    while changed:
        changed = False
        for i in range(k):
            for j in range(i + 1, k):
                if diag[j] % diag[i]:
                    _fix_pair(res, i, j)
                    changed = True


def _fix_pair(res: SNFResult, i: int, j: int) -> None:
    # replace diag positions (p, q) by (gcd, lcm) via unimodular ops
    p, q = res.diag[i], res.diag[j]
    g = gcd(p, q)
    # extended gcd: alpha*p + beta*q = g
    alpha, beta = _bezout_coeffs(p, q)
    lcm = p // g * q
    # 2x2 transformation: [[alpha, beta], [-q/g, p/g]] @ diag(p, q) @
    #   [[1, -beta*q/g], [1, alpha*p/g]] = diag(g, lcm)
    L = [[alpha, beta], [-(q // g), p // g]]
    R = [[1, -beta * (q // g)], [1, alpha * (p // g)]]
    assert L[0][0] * L[1][1] - L[0][1] * L[1][0] == 1
    assert R[0][0] * R[1][1] - R[0][1] * R[1][0] == 1
    # check the product is the target diagonal
    M = [[L[0][0] * p * R[0][0] + L[0][1] * q * R[1][0],
          L[0][0] * p * R[0][1] + L[0][1] * q * R[1][1]],
         [L[1][0] * p * R[0][0] + L[1][1] * q * R[1][0],
          L[1][0] * p * R[0][1] + L[1][1] * q * R[1][1]]]
    assert M == [[g, 0], [0, lcm]], M
    res.diag[i], res.diag[j] = g, lcm
    _apply_two_by_two(res, i, j, L, R)


def _bezout_coeffs(p: int, q: int) -> tuple:
    old_r, r = p, q
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        quo = old_r // r
        old_r, r = r, old_r - quo * r
        old_s, s = s, old_s - quo * s
        old_t, t = t, old_t - quo * t
    assert old_r == gcd(p, q)
    return old_s, old_t


def _apply_two_by_two(res: SNFResult, i: int, j: int, L, R) -> None:
    # U <- L' U (rows i, j), Uinv <- Uinv L'^{-1} (cols), V <- V R (cols),
    # Vinv <- R^{-1} Vinv (rows); inverses of unimodular 2x2 are adjugates.
    def rows_combine(mat: SparseIntMatrix, i, j, T):
        ri = dict(mat._rows[i])
        rj = dict(mat._rows[j])
        new_i: dict[int, int] = {}
        new_j: dict[int, int] = {}
        for c in set(ri) | set(rj):
            a, b = ri.get(c, 0), rj.get(c, 0)
            vi = T[0][0] * a + T[0][1] * b
            vj = T[1][0] * a + T[1][1] * b
            if vi:
                new_i[c] = vi
            if vj:
                new_j[c] = vj
        mat._rows[i] = new_i
        mat._rows[j] = new_j

    def cols_combine(mat: SparseIntMatrix, i, j, T):
        # columns i, j <- (col_i, col_j) @ T
        rows = mat._rows
        for r in range(mat.nrows):
            a = rows[r].get(i, 0)
            b = rows[r].get(j, 0)
            if a == 0 and b == 0:
                continue
            vi = a * T[0][0] + b * T[1][0]
            vj = a * T[0][1] + b * T[1][1]
            for c, v in ((i, vi), (j, vj)):
                if v:
                    rows[r][c] = v
                elif c in rows[r]:
                    del rows[r][c]

    Linv = [[L[1][1], -L[0][1]], [-L[1][0], L[0][0]]]
    Rinv = [[R[1][1], -R[0][1]], [-R[1][0], R[0][0]]]
    rows_combine(res.U, i, j, L)
    cols_combine(res.Uinv, i, j, Linv)
    cols_combine(res.V, i, j, R)
    rows_combine(res.Vinv, i, j, Rinv)


def snf_diagonal(matrix: SparseIntMatrix) -> list:
    """Invariant factors only (positive, each dividing the next)."""
    return smith_normal_form(matrix, transforms=False).diag


def rank(matrix: SparseIntMatrix) -> int:
    return len(snf_diagonal(matrix))


# ---------------------------------------------------------------------------
# chain complexes


class ChainComplex:
    """A bounded complex of free Z-modules with labelled bases.

    basis maps a degree q to the list of basis labels of C_q; boundaries
    maps q to the matrix of d_q : C_q -> C_{q-1} in those bases.  Degrees
    not present are zero.  Construction checks d о d = 0.
    """

    def __init__(self, basis: dict, boundaries: dict, check: bool = True):
        self.basis = {q: list(lbls) for q, lbls in basis.items() if lbls}
        self.boundaries = {}
        for q, mat in boundaries.items():
            want = (self.dim(q - 1), self.dim(q))
            if (mat.nrows, mat.ncols) != want:
                raise DimensionMismatch(
                    f"boundary at degree {q} is {mat.nrows}x{mat.ncols}, expected {want}")
            self.boundaries[q] = mat
        if check:
            for q in list(self.boundaries):
                upper = self.boundaries.get(q + 1)
                if upper is not None and not (self.boundaries[q] @ upper).is_zero():
                    raise ComplexInvalid(f"d_{q} о d_{q + 1} != 0")

    def dim(self, q: int) -> int:
        return len(self.basis.get(q, ()))

    @property
    def degrees(self) -> list:
        return sorted(self.basis)

    def boundary(self, q: int) -> SparseIntMatrix:
        mat = self.boundaries.get(q)
        if mat is None:
            mat = SparseIntMatrix(self.dim(q - 1), self.dim(q))
        return mat

    def euler_characteristic(self) -> int:
        return sum((-1) ** q * self.dim(q) for q in self.basis)

    def vector_from_chain(self, q: int, chain: dict) -> list:
        index = {lbl: i for i, lbl in enumerate(self.basis.get(q, ()))}
        vec = [0] * self.dim(q)
        for lbl, coeff in chain.items():
            if lbl not in index:
                raise KeyError(f"label {lbl!r} not in degree {q} basis")
            vec[index[lbl]] = coeff
        return vec

    def chain_from_vector(self, q: int, vec) -> dict:
        lbls = self.basis.get(q, ())
        return {lbls[i]: v for i, v in enumerate(vec) if v}


@dataclass(frozen=True)
class HomologySummary:
    """Homology groups by degree: degree -> (free rank, torsion orders).

    Torsion orders are > 1 and sorted by divisibility.  Degrees with
    trivial homology are omitted; equality ignores such degrees.
    """

    groups: tuple

    @classmethod
    def of(cls, mapping: dict) -> "HomologySummary":
        items = []
        for q, (r, tors) in sorted(mapping.items()):
            tors = tuple(t for t in tors if t > 1)
            if r or tors:
                items.append((q, (r, tors)))
        return cls(groups=tuple(items))

    def as_dict(self) -> dict:
        return {q: g for q, g in self.groups}

    def group(self, q: int) -> tuple:
        return self.as_dict().get(q, (0, ()))

    def nonzero_degrees(self) -> list:
        return [q for q, _ in self.groups]

    def euler_characteristic(self) -> int:
        return sum((-1) ** q * r for q, (r, _) in self.groups)

    def __str__(self) -> str:
        if not self.groups:
            return "0"
        parts = []
        for q, (r, tors) in self.groups:
            gens = ["Z"] * r + [f"Z/{t}" for t in tors]
            parts.append(f"H_{q}=" + "+".join(gens))
        return ", ".join(parts)

    def to_json(self) -> dict:
        return {str(q): {"rank": r, "torsion": list(tors)}
                for q, (r, tors) in self.groups}


def homology(C: ChainComplex) -> HomologySummary:
    """Integral homology of C: ranks and torsion, no generators.

    H_q has free rank dim C_q - rank d_q - rank d_{q+1} and torsion the
    invariant factors > 1 of d_{q+1}: the factors of the inclusion of the
    image into the kernel are those of the matrix itself.
    """
    snf_rank: dict[int, list] = {}
    for q in list(C.basis):
        for qq in (q, q + 1):
            if qq not in snf_rank:
                snf_rank[qq] = snf_diagonal(C.boundary(qq))
    out = {}
    for q in C.basis:
        r = C.dim(q) - len(snf_rank[q]) - len(snf_rank[q + 1])
        out[q] = (r, tuple(t for t in snf_rank[q + 1] if t > 1))
    return HomologySummary.of(out)


class HomologyEngine:
    """Homology with generator lifts and coordinates, degree by degree.

    Heavier than :func:`homology` because it tracks unimodular transforms;
    use it only at the degrees where explicit cycles are needed.
    """

    def __init__(self, C: ChainComplex):
        self.C = C
        self._deg: dict[int, dict] = {}

    def _data(self, q: int) -> dict:
        if q in self._deg:
            return self._deg[q]
        C = self.C
        lower = smith_normal_form(C.boundary(q), transforms=True)
        r = lower.rank
        k = C.dim(q) - r  # kernel rank
        # kernel basis: columns r.. of V
        kernel_cols = [lower.V.column_vector(r + i) for i in range(k)]
        # image of d_{q+1} in kernel coordinates
        upper = C.boundary(q + 1)
        rel_entries = {}
        for jcol in range(upper.ncols):
            col = upper.column_vector(jcol)
            coords = lower.Vinv.matvec(col)
            # d_q о d_{q+1} = 0 forces the non-kernel coordinates to vanish
            if any(coords[i] for i in range(r)):
                raise ComplexInvalid("boundary image is not a cycle")
            for i in range(k):
                v = coords[r + i]
                if v:
                    rel_entries[(i, jcol)] = v
        B = SparseIntMatrix(k, upper.ncols, rel_entries)
        rel = smith_normal_form(B, transforms=True)
        gens = []
        for i in range(k):
            order = rel.diag[i] if i < rel.rank else 0
            if order == 1:
                continue
            coeffs = rel.Uinv.column_vector(i)
            vec = [0] * C.dim(q)
            for t, cval in enumerate(coeffs):
                if cval:
                    for rowi, kval in enumerate(kernel_cols[t]):
                        vec[rowi] += cval * kval
            gens.append((order, vec))
        gens.sort(key=lambda g: (g[0] == 0, g[0]))
        data = {"lower": lower, "rel": rel, "rank_lower": r, "kernel_rank": k,
                "generators": gens}
        self._deg[q] = data
        return data

    def group(self, q: int) -> tuple:
        data = self._data(q)
        free = sum(1 for order, _ in data["generators"] if order == 0)
        tors = tuple(sorted(order for order, _ in data["generators"] if order > 1))
        return free, tors

    def generators(self, q: int) -> list:
        """List of (order, chain) pairs; order 0 means infinite."""
        data = self._data(q)
        return [(order, self.C.chain_from_vector(q, vec))
                for order, vec in data["generators"]]

    def coordinates(self, q: int, chain: dict) -> list:
        """Coordinates of a cycle in the generator basis of H_q.

        Torsion coordinates are reduced into [0, order).  Raises if the
        chain is not a cycle.
        """
        C = self.C
        vec = C.vector_from_chain(q, chain)
        if any(C.boundary(q).matvec(vec)):
            raise ValueError("chain is not a cycle")
        data = self._data(q)
        lower, rel = data["lower"], data["rel"]
        r, k = data["rank_lower"], data["kernel_rank"]
        coords_full = lower.Vinv.matvec(vec)
        assert all(coords_full[i] == 0 for i in range(r)), "cycle has image in nonkernel part"
        kc = coords_full[r:]
        y = rel.U.matvec(kc) if k else []
        # align with generators(): same (order, position) sort
        coords = []
        for i in range(k):
            order = rel.diag[i] if i < rel.rank else 0
            if order == 1:
                continue
            coords.append((order, y[i] % order if order else y[i]))
        coords.sort(key=lambda g: (g[0] == 0, g[0]))
        return [v for _, v in coords]

    def summary(self) -> HomologySummary:
        return HomologySummary.of({q: self.group(q) for q in self.C.basis})


@dataclass
class ChainMap:
    """Degreewise matrices commuting with the boundaries."""

    dom: ChainComplex
    cod: ChainComplex
    maps: dict

    def __post_init__(self):
        for q in set(self.dom.basis) | set(self.maps):
            f_q = self.matrix(q)
            want = (self.cod.dim(q), self.dom.dim(q))
            if (f_q.nrows, f_q.ncols) != want:
                raise DimensionMismatch(f"map at degree {q} is {f_q.nrows}x{f_q.ncols},"
                                        f" expected {want}")
        for q in set(self.dom.basis):
            left = self.matrix(q - 1) @ self.dom.boundary(q)
            right = self.cod.boundary(q) @ self.matrix(q)
            if left != right:
                raise NotAChainMap(f"square at degree {q} does not commute")

    def matrix(self, q: int) -> SparseIntMatrix:
        mat = self.maps.get(q)
        if mat is None:
            mat = SparseIntMatrix(self.cod.dim(q), self.dom.dim(q))
        return mat


def mapping_cone(f: ChainMap) -> ChainComplex:
    """Cone(f)_q = A_{q-1} + B_q with d(a, b) = (-dA a, dB b - f a).

    Labels are ("dom", original label) for the shifted copy of the domain
    and ("cod", original label) for the codomain.  The convention makes
    cone(identity) acyclic and cone(Z --n--> Z in degree k) have homology
    Z/n in degree k.
    """
    A, B = f.dom, f.cod
    degs = set(q + 1 for q in A.basis) | set(B.basis)
    basis = {}
    for q in degs:
        basis[q] = [("dom", lbl) for lbl in A.basis.get(q - 1, ())] + \
                   [("cod", lbl) for lbl in B.basis.get(q, ())]
    boundaries = {}
    for q in degs:
        na, nb = A.dim(q - 1), B.dim(q)
        rows_a, rows_b = A.dim(q - 2), B.dim(q - 1)
        entries = {}
        dA = A.boundary(q - 1)
        for (r, c), v in dA.entries():
            entries[(r, c)] = -v
        fq = f.matrix(q - 1)
        for (r, c), v in fq.entries():
            entries[(rows_a + r, c)] = entries.get((rows_a + r, c), 0) - v
        dB = B.boundary(q)
        for (r, c), v in dB.entries():
            entries[(rows_a + r, na + c)] = v
        boundaries[q] = SparseIntMatrix(rows_a + rows_b, na + nb, entries)
    return ChainComplex(basis, boundaries)


# ---------------------------------------------------------------------------
# exact rational linear programming


@dataclass(frozen=True)
class SeparationResult:
    """Outcome of a convex separation query.

    kind == "combination": coefficients are barycentric weights expressing
    the target as a convex combination of the points.
    kind == "separator": functional h and level delta with h.p >= delta
    for every point p and h.target < delta.
    """

    kind: str
    coefficients: tuple | None = None
    functional: tuple | None = None
    delta: Fraction | None = None


def _simplex_phase1(columns, rhs):
    """Find lam >= 0 with sum lam_j col_j = rhs, or a Farkas certificate.

    Returns ("feasible", lam) or ("infeasible", y) where y satisfies
    y . col_j <= 0 for every column and y . rhs > 0.  Dense tableau with
    Bland's rule; all arithmetic in Fraction.
    """
    m = len(rhs)
    n = len(columns)
    for col in columns:
        if len(col) != m:
            raise DimensionMismatch("column length mismatch")
    flip = [-1 if rhs[i] < 0 else 1 for i in range(m)]
    # rows of the tableau: n real columns, m artificial columns, rhs
    T = []
    for i in range(m):
        row = [Fraction(columns[j][i] * flip[i]) for j in range(n)]
        row += [Fraction(1) if k == i else Fraction(0) for k in range(m)]
        row.append(Fraction(rhs[i] * flip[i]))
        T.append(row)
    basis = [n + i for i in range(m)]
    ncols = n + m

    def zeta():
        # price vector: sum of rows whose basic variable costs 1
        z = [Fraction(0)] * (ncols + 1)
        for i in range(m):
            if basis[i] >= n:
                row = T[i]
                for j in range(ncols + 1):
                    if row[j]:
                        z[j] += row[j]
        return z

    while True:
        z = zeta()
        enter = -1
        for j in range(ncols):
            cost = Fraction(0) if j < n else Fraction(1)
            if cost - z[j] < 0:
                enter = j
                break
        if enter < 0:
            break
        leave, best = -1, None
        for i in range(m):
            if T[i][enter] > 0:
                ratio = T[i][ncols] / T[i][enter]
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    leave, best = i, ratio
        assert leave >= 0, "phase-1 objective is bounded below"
        _pivot(T, basis, leave, enter)

    z = zeta()
    value = sum(T[i][ncols] for i in range(m) if basis[i] >= n)
    if value == 0:
        lam = [Fraction(0)] * n
        for i in range(m):
            if basis[i] < n:
                lam[basis[i]] = T[i][ncols]
        return "feasible", lam
    y = [z[n + i] * flip[i] for i in range(m)]
    return "infeasible", y


def _pivot(T, basis, leave, enter):
    ncols = len(T[0]) - 1
    piv = T[leave][enter]
    T[leave] = [v / piv for v in T[leave]]
    for i in range(len(T)):
        if i != leave and T[i][enter]:
            f = T[i][enter]
            row, prow = T[i], T[leave]
            T[i] = [row[j] - f * prow[j] for j in range(ncols + 1)]
    basis[leave] = enter


def feasibility_certificate(columns, rhs):
    """Exact feasibility of { lam >= 0 : sum lam_j col_j = rhs }.

    Returns ("feasible", lam) with an exact solution, or ("infeasible", y)
    with an exact Farkas functional: y . col_j <= 0 for all j, y . rhs > 0.
    Both certificates are re-verified before returning.
    """
    status, data = _simplex_phase1(columns, rhs)
    m = len(rhs)
    if status == "feasible":
        lam = data
        assert all(v >= 0 for v in lam)
        for i in range(m):
            assert sum(lam[j] * columns[j][i] for j in range(len(columns))) == rhs[i]
        return status, lam
    y = data
    for col in columns:
        assert sum(y[i] * col[i] for i in range(m)) <= 0
    assert sum(y[i] * rhs[i] for i in range(m)) > 0
    return status, y


def lp_separate(points, target) -> SeparationResult:
    """Decide whether target lies in the convex hull of the points.

    Exact over the rationals.  Returns a convex combination when it does,
    and otherwise a separating functional (h, delta) with h.p >= delta for
    every point and h.target < delta.
    """
    points = [list(map(Fraction, p)) for p in points]
    target = list(map(Fraction, target))
    d = len(target)
    for p in points:
        if len(p) != d:
            raise DimensionMismatch("point dimension mismatch")
    if not points:
        return SeparationResult(kind="separator",
                                functional=tuple([Fraction(0)] * d),
                                delta=Fraction(1))
    columns = [p + [Fraction(1)] for p in points]
    rhs = target + [Fraction(1)]
    status, data = feasibility_certificate(columns, rhs)
    if status == "feasible":
        lam = data
        assert sum(lam) == 1
        return SeparationResult(kind="combination", coefficients=tuple(lam))
    y = data
    g, gamma = y[:d], y[d]
    h = [-v for v in g]
    delta = gamma
    for p in points:
        assert sum(h[i] * p[i] for i in range(d)) >= delta
    assert sum(h[i] * target[i] for i in range(d)) < delta
    return SeparationResult(kind="separator", functional=tuple(h), delta=delta)


def lp_optimize(columns, rhs, objective, maximize=False):
    """Optimize objective . lam over { lam >= 0 : sum lam_j col_j = rhs }.

    Returns ("optimal", value, lam), ("infeasible", None, None) or
    ("unbounded", None, None).  Exact rational arithmetic throughout.
    """
    m, n = len(rhs), len(columns)
    status, data = _simplex_phase1(columns, rhs)
    if status == "infeasible":
        return "infeasible", None, None
    # rebuild a tableau from scratch at the feasible basis is fiddly; run
    # phase 1 again keeping the tableau, then drive artificials out
    flip = [-1 if rhs[i] < 0 else 1 for i in range(m)]
    T = []
    for i in range(m):
        row = [Fraction(columns[j][i] * flip[i]) for j in range(n)]
        row += [Fraction(1) if k == i else Fraction(0) for k in range(m)]
        row.append(Fraction(rhs[i] * flip[i]))
        T.append(row)
    basis = [n + i for i in range(m)]
    ncols = n + m
    cost1 = [Fraction(0)] * n + [Fraction(1)] * m
    while True:
        enter = -1
        for j in range(ncols):
            # reduced cost c_j - z_j with z_j = sum_i cost1[basis[i]] * T[i][j]
            zj = sum(cost1[basis[i]] * T[i][j] for i in range(m))
            if cost1[j] - zj < 0:
                enter = j
                break
        if enter < 0:
            break
        leave, best = -1, None
        for i in range(m):
            if T[i][enter] > 0:
                ratio = T[i][ncols] / T[i][enter]
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    leave, best = i, ratio
        assert leave >= 0
        _pivot(T, basis, leave, enter)
    drop_rows = []
    for i in range(m):
        if basis[i] >= n:
            assert T[i][ncols] == 0, "phase 1 said feasible"
            pivot_col = next((j for j in range(n) if T[i][j] != 0), None)
            if pivot_col is None:
                drop_rows.append(i)
            else:
                _pivot(T, basis, i, pivot_col)
    keep = [i for i in range(m) if i not in drop_rows]
    T = [T[i] for i in keep]
    basis = [basis[i] for i in keep]
    mm = len(T)
    cost2 = list(map(Fraction, objective)) + [Fraction(0)] * m
    if maximize:
        cost2 = [-c for c in cost2]
    while True:
        enter = -1
        for j in range(n):  # artificials never re-enter
            zj = sum(cost2[basis[i]] * T[i][j] for i in range(mm))
            if cost2[j] - zj < 0:
                enter = j
                break
        if enter < 0:
            break
        leave, best = -1, None
        for i in range(mm):
            if T[i][enter] > 0:
                ratio = T[i][ncols] / T[i][enter]
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    leave, best = i, ratio
        if leave < 0:
            return "unbounded", None, None
        _pivot(T, basis, leave, enter)
    lam = [Fraction(0)] * n
    for i in range(mm):
        if basis[i] < n:
            lam[basis[i]] = T[i][ncols]
    value = sum(Fraction(objective[j]) * lam[j] for j in range(n))
    return "optimal", value, lam
