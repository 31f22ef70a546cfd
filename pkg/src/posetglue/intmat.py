"""Dense integer matrices with explicit shapes, plus exact rank computation.

Shapes are carried explicitly because zero-row and zero-column matrices occur
all over the place here (empty index sets, zero stalks) and nested tuples
alone cannot represent an n x 0 matrix. All entries are Python ints; rank is
computed exactly (fraction-free Bareiss over the rationals, Gaussian
elimination over a prime field).
"""
from __future__ import annotations

from .errors import ShapeMismatch


class Mat:
    __slots__ = ("nrows", "ncols", "rows")

    def __init__(self, nrows, ncols, rows):
        rows = tuple(tuple(int(v) for v in r) for r in rows)
        if len(rows) != nrows or any(len(r) != ncols for r in rows):
            raise ShapeMismatch(f"expected {nrows}x{ncols}, got {[len(r) for r in rows]}")
        self.nrows = nrows
        self.ncols = ncols
        self.rows = rows

    @classmethod
    def from_rows(cls, rows):
        rows = [list(r) for r in rows]
        return cls(len(rows), len(rows[0]) if rows else 0, rows)

    @classmethod
    def zero(cls, nrows, ncols):
        return cls(nrows, ncols, [[0] * ncols for _ in range(nrows)])

    @classmethod
    def identity(cls, n):
        return cls(n, n, [[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def diag(cls, entries):
        entries = list(entries)
        n = len(entries)
        return cls(n, n, [[entries[i] if i == j else 0 for j in range(n)] for i in range(n)])

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other):
        return (
            isinstance(other, Mat)
            and self.nrows == other.nrows
            and self.ncols == other.ncols
            and self.rows == other.rows
        )

    def __hash__(self):
        return hash((self.nrows, self.ncols, self.rows))

    def __repr__(self):
        return f"Mat({self.nrows}x{self.ncols}, {list(map(list, self.rows))})"

    def is_zero(self):
        return all(v == 0 for r in self.rows for v in r)

    def tolist(self):
        return [list(r) for r in self.rows]

    def transpose(self):
        return Mat(self.ncols, self.nrows,
                   [[self.rows[i][j] for i in range(self.nrows)] for j in range(self.ncols)])

    def scale(self, c):
        c = int(c)
        return Mat(self.nrows, self.ncols, [[c * v for v in r] for r in self.rows])

    def neg(self):
        return self.scale(-1)

    def add(self, other):
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            raise ShapeMismatch(f"add {self.nrows}x{self.ncols} vs {other.nrows}x{other.ncols}")
        return Mat(self.nrows, self.ncols,
                   [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(self.rows, other.rows)])

    def sub(self, other):
        return self.add(other.neg())

    def mul(self, other):
        if self.ncols != other.nrows:
            raise ShapeMismatch(f"mul {self.nrows}x{self.ncols} by {other.nrows}x{other.ncols}")
        out = [[0] * other.ncols for _ in range(self.nrows)]
        orows = other.rows
        for i, row in enumerate(self.rows):
            oi = out[i]
            for k, a in enumerate(row):
                if a:
                    rk = orows[k]
                    for j, b in enumerate(rk):
                        if b:
                            oi[j] += a * b
        return Mat(self.nrows, other.ncols, out)


def block(parts, row_sizes, col_sizes):
    """Assemble a block matrix. parts[(i, j)] is a Mat or absent (= zero)."""
    nrows = sum(row_sizes)
    ncols = sum(col_sizes)
    out = [[0] * ncols for _ in range(nrows)]
    row_off = [0]
    for s in row_sizes:
        row_off.append(row_off[-1] + s)
    col_off = [0]
    for s in col_sizes:
        col_off.append(col_off[-1] + s)
    for (bi, bj), m in parts.items():
        if m is None:
            continue
        if (m.nrows, m.ncols) != (row_sizes[bi], col_sizes[bj]):
            raise ShapeMismatch(
                f"block ({bi},{bj}) is {m.nrows}x{m.ncols}, "
                f"slot is {row_sizes[bi]}x{col_sizes[bj]}"
            )
        r0, c0 = row_off[bi], col_off[bj]
        for i, r in enumerate(m.rows):
            oi = out[r0 + i]
            for j, v in enumerate(r):
                if v:
                    oi[c0 + j] = v
    return Mat(nrows, ncols, out)


def hstack(mats):
    mats = list(mats)
    return block({(0, j): m for j, m in enumerate(mats)},
                 [mats[0].nrows], [m.ncols for m in mats])


def vstack(mats):
    mats = list(mats)
    return block({(i, 0): m for i, m in enumerate(mats)},
                 [m.nrows for m in mats], [mats[0].ncols])


def rank_exact(m: Mat) -> int:
    """Rank over the rationals, by fraction-free (Bareiss) elimination."""
    a = [list(r) for r in m.rows]
    nr, nc = m.nrows, m.ncols
    rank = 0
    prev = 1
    row = 0
    for col in range(nc):
        piv = None
        for r in range(row, nr):
            if a[r][col]:
                piv = r
                break
        if piv is None:
            continue
        a[row], a[piv] = a[piv], a[row]
        pv = a[row][col]
        for r in range(row + 1, nr):
            f = a[r][col]
            ar, arow = a[r], a[row]
            for c in range(col + 1, nc):
                # Exact division: standard Bareiss invariant.
                ar[c] = (pv * ar[c] - f * arow[c]) // prev
            ar[col] = 0
        prev = pv
        row += 1
        rank += 1
        if row == nr:
            break
    return rank


def rank_mod(m: Mat, p: int) -> int:
    """Rank over the prime field with p elements."""
    a = [[v % p for v in r] for r in m.rows]
    nr, nc = m.nrows, m.ncols
    rank = 0
    row = 0
    for col in range(nc):
        piv = None
        for r in range(row, nr):
            if a[r][col]:
                piv = r
                break
        if piv is None:
            continue
        a[row], a[piv] = a[piv], a[row]
        inv = pow(a[row][col], p - 2, p)
        arow = a[row]
        for c in range(col, nc):
            arow[c] = arow[c] * inv % p
        for r in range(row + 1, nr):
            f = a[r][col]
            if f:
                ar = a[r]
                for c in range(col, nc):
                    ar[c] = (ar[c] - f * arow[c]) % p
        row += 1
        rank += 1
        if row == nr:
            break
    return rank
