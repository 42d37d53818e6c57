"""Exact dense linear algebra over the rationals.

Everything here is deterministic: row reduction always takes the first
nonzero entry as pivot (no magnitude heuristics, which would be meaningless
over Q anyway), so ranks, kernels, preimages and complements are reproducible
across runs and platforms.  Matrices are small throughout the package, so a
dense list-of-lists representation with `fractions.Fraction` entries is the
right tool; no floating point appears anywhere.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

Q = Fraction

Vector = list[Fraction]


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


class RatMatrix:
    """A rows x cols matrix of Fractions.

    Args:
        rows: number of rows, >= 0.
        cols: number of columns, >= 0.
        entries: optional row-major iterable of iterables; defaults to zero.
    """

    __slots__ = ("rows", "cols", "data")

    def __init__(self, rows: int, cols: int, entries: Iterable[Iterable] | None = None):
        assert rows >= 0 and cols >= 0
        self.rows = rows
        self.cols = cols
        if entries is None:
            self.data = [[Q(0)] * cols for _ in range(rows)]
        else:
            self.data = [[_frac(x) for x in row] for row in entries]
            assert len(self.data) == rows
            assert all(len(r) == cols for r in self.data)

    @classmethod
    def identity(cls, n: int) -> "RatMatrix":
        m = cls(n, n)
        for i in range(n):
            m.data[i][i] = Q(1)
        return m

    @classmethod
    def from_columns(cls, cols: Sequence[Vector], rows: int) -> "RatMatrix":
        m = cls(rows, len(cols))
        for j, c in enumerate(cols):
            assert len(c) == rows
            for i in range(rows):
                m.data[i][j] = _frac(c[i])
        return m

    def column(self, j: int) -> Vector:
        return [self.data[i][j] for i in range(self.rows)]

    def columns(self) -> list[Vector]:
        return [self.column(j) for j in range(self.cols)]

    def copy(self) -> "RatMatrix":
        return RatMatrix(self.rows, self.cols, self.data)

    def transpose(self) -> "RatMatrix":
        t = RatMatrix(self.cols, self.rows)
        for i in range(self.rows):
            for j in range(self.cols):
                t.data[j][i] = self.data[i][j]
        return t

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, RatMatrix)
            and self.rows == other.rows
            and self.cols == other.cols
            and self.data == other.data
        )

    def __repr__(self) -> str:
        return f"RatMatrix({self.rows}x{self.cols}, {self.data!r})"

    def __add__(self, other: "RatMatrix") -> "RatMatrix":
        assert self.rows == other.rows and self.cols == other.cols
        out = RatMatrix(self.rows, self.cols)
        for i in range(self.rows):
            for j in range(self.cols):
                out.data[i][j] = self.data[i][j] + other.data[i][j]
        return out

    def __sub__(self, other: "RatMatrix") -> "RatMatrix":
        return self + other.scale(Q(-1))

    def scale(self, c) -> "RatMatrix":
        c = _frac(c)
        out = RatMatrix(self.rows, self.cols)
        for i in range(self.rows):
            for j in range(self.cols):
                out.data[i][j] = c * self.data[i][j]
        return out

    def __matmul__(self, other: "RatMatrix") -> "RatMatrix":
        assert self.cols == other.rows, (self.cols, other.rows)
        out = RatMatrix(self.rows, other.cols)
        for i in range(self.rows):
            row = self.data[i]
            for k in range(self.cols):
                a = row[k]
                if a == 0:
                    continue
                brow = other.data[k]
                orow = out.data[i]
                for j in range(other.cols):
                    if brow[j] != 0:
                        orow[j] += a * brow[j]
        return out

    def apply(self, v: Sequence) -> Vector:
        """Matrix times column vector."""
        assert len(v) == self.cols, (len(v), self.cols)
        out = [Q(0)] * self.rows
        for j, x in enumerate(v):
            x = _frac(x)
            if x == 0:
                continue
            for i in range(self.rows):
                if self.data[i][j] != 0:
                    out[i] += x * self.data[i][j]
        return out

    def is_zero(self) -> bool:
        return all(x == 0 for row in self.data for x in row)

    def rref(self) -> tuple["RatMatrix", list[int]]:
        """Reduced row echelon form.

        Returns:
            (R, pivot_cols) where R is the RREF and pivot_cols lists the pivot
            column of each nonzero row, in order.  Pivoting is deterministic:
            the first row with a nonzero entry in the current column wins.
        """
        r = self.copy()
        pivot_cols: list[int] = []
        prow = 0
        for col in range(r.cols):
            if prow >= r.rows:
                break
            sel = -1
            for i in range(prow, r.rows):
                if r.data[i][col] != 0:
                    sel = i
                    break
            if sel < 0:
                continue
            if sel != prow:
                r.data[prow], r.data[sel] = r.data[sel], r.data[prow]
            pv = r.data[prow][col]
            if pv != 1:
                r.data[prow] = [x / pv for x in r.data[prow]]
            for i in range(r.rows):
                if i != prow and r.data[i][col] != 0:
                    c = r.data[i][col]
                    r.data[i] = [a - c * b for a, b in zip(r.data[i], r.data[prow])]
            pivot_cols.append(col)
            prow += 1
        return r, pivot_cols


def rank(m: RatMatrix) -> int:
    _, piv = m.rref()
    return len(piv)


def kernel_basis(m: RatMatrix) -> list[Vector]:
    """Basis of the right kernel {v : m v = 0}.

    Free variables are the non-pivot columns; each basis vector sets one free
    variable to 1 and the others to 0, in column order, so the result is
    canonical for a given matrix.
    """
    r, piv = m.rref()
    pivset = set(piv)
    free = [j for j in range(m.cols) if j not in pivset]
    basis = []
    for f in free:
        v = [Q(0)] * m.cols
        v[f] = Q(1)
        for row_i, pcol in enumerate(piv):
            v[pcol] = -r.data[row_i][f]
        basis.append(v)
    return basis


def preimage(m: RatMatrix, target: Sequence) -> Vector | None:
    """One solution v of m v = target, or None when target is not in the image.

    The solution is the canonical one with all free variables set to zero.
    """
    assert len(target) == m.rows
    aug = RatMatrix(m.rows, m.cols + 1)
    for i in range(m.rows):
        aug.data[i][: m.cols] = [x for x in m.data[i]]
        aug.data[i][m.cols] = _frac(target[i])
    r, piv = aug.rref()
    if m.cols in piv:
        return None
    v = [Q(0)] * m.cols
    for row_i, pcol in enumerate(piv):
        v[pcol] = r.data[row_i][m.cols]
    return v


def column_space_basis(m: RatMatrix) -> list[Vector]:
    """Columns of m forming a basis of the image, chosen greedily in order."""
    kept: list[Vector] = []
    cur = RatMatrix(m.rows, 0)
    cur_rank = 0
    for j in range(m.cols):
        cand = RatMatrix(m.rows, cur.cols + 1)
        for i in range(m.rows):
            cand.data[i][: cur.cols] = cur.data[i]
            cand.data[i][cur.cols] = m.data[i][j]
        rk = rank(cand)
        if rk > cur_rank:
            kept.append(m.column(j))
            cur = cand
            cur_rank = rk
    return kept


def complement_basis(inside: RatMatrix, ambient_dim: int) -> list[Vector]:
    """Standard basis vectors completing the columns of `inside` to all of Q^n.

    Greedy over the standard basis in index order, so the choice is canonical.
    `inside` columns must be independent vectors in Q^ambient_dim (they are
    not re-checked here beyond what the greedy extension sees).
    """
    assert inside.rows == ambient_dim
    base_rank = rank(inside)
    cur = inside.copy()
    cur_rank = base_rank
    out: list[Vector] = []
    for j in range(ambient_dim):
        if cur_rank == ambient_dim:
            break
        cand = RatMatrix(ambient_dim, cur.cols + 1)
        for i in range(ambient_dim):
            cand.data[i][: cur.cols] = cur.data[i]
            cand.data[i][cur.cols] = Q(1) if i == j else Q(0)
        rk = rank(cand)
        if rk > cur_rank:
            v = [Q(0)] * ambient_dim
            v[j] = Q(1)
            out.append(v)
            cur = cand
            cur_rank = rk
    assert cur_rank == ambient_dim
    return out


def complement_within(sub: RatMatrix, ambient: RatMatrix) -> list[Vector]:
    """Columns of `ambient` extending the span of `sub` to span(ambient).

    Both matrices share the row dimension; the result is the greedy choice of
    ambient columns, in order, whose classes are independent modulo span(sub).
    """
    assert sub.rows == ambient.rows
    cur = sub.copy()
    cur_rank = rank(cur)
    out: list[Vector] = []
    for j in range(ambient.cols):
        cand = RatMatrix(cur.rows, cur.cols + 1)
        for i in range(cur.rows):
            cand.data[i][: cur.cols] = cur.data[i]
            cand.data[i][cur.cols] = ambient.data[i][j]
        rk = rank(cand)
        if rk > cur_rank:
            out.append(ambient.column(j))
            cur = cand
            cur_rank = rk
    return out


def solve_matrix(m: RatMatrix, rhs: RatMatrix) -> RatMatrix | None:
    """Solve m X = rhs column by column; None when any column has no solution."""
    cols = []
    for j in range(rhs.cols):
        v = preimage(m, rhs.column(j))
        if v is None:
            return None
        cols.append(v)
    return RatMatrix.from_columns(cols, m.cols)


def inverse(m: RatMatrix) -> RatMatrix | None:
    """Inverse of a square matrix, or None when singular."""
    if m.rows != m.cols:
        return None
    inv = solve_matrix(m, RatMatrix.identity(m.rows))
    return inv


def in_span(vectors: Sequence[Vector], v: Sequence, dim: int) -> bool:
    """Whether v lies in the span of `vectors` inside Q^dim."""
    m = RatMatrix.from_columns(list(vectors), dim)
    return preimage(m, v) is not None


def express_in_basis(basis: Sequence[Vector], v: Sequence, dim: int) -> Vector | None:
    """Coordinates of v in the given (independent) spanning set, or None."""
    m = RatMatrix.from_columns(list(basis), dim)
    return preimage(m, v)


def signature_of_symmetric(m: RatMatrix) -> tuple[int, int]:
    """Signature (n_plus, n_minus) of a symmetric rational matrix.

    Computed exactly by congruence diagonalization (simultaneous row and
    column operations), handling zero diagonals with the standard
    hyperbolic-pair move.  No eigenvalues, no floats.
    """
    assert m.rows == m.cols
    a = m.copy()
    n = a.rows
    assert a == a.transpose(), "signature requires a symmetric matrix"
    pos = neg = 0
    i = 0
    while i < n:
        if a.data[i][i] == 0:
            # find j > i with a[j][i] != 0; if none, the row/col is dead
            j = next((k for k in range(i + 1, n) if a.data[k][i] != 0), None)
            if j is None:
                i += 1
                continue
            # row_i += row_j, col_i += col_j turns the diagonal nonzero
            for k in range(n):
                a.data[i][k] += a.data[j][k]
            for k in range(n):
                a.data[k][i] += a.data[k][j]
        d = a.data[i][i]
        if d > 0:
            pos += 1
        else:
            neg += 1
        for j in range(i + 1, n):
            c = a.data[j][i] / d
            if c == 0:
                continue
            for k in range(n):
                a.data[j][k] -= c * a.data[i][k]
            for k in range(n):
                a.data[k][j] -= c * a.data[k][i]
        i += 1
    return pos, neg
