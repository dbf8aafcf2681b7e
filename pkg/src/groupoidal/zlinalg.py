"""Exact integer linear algebra.

Smith normal form with unimodular transforms, integer kernels, solving
A*x = v over the integers, and the homology ker(d_out)/im(d_in) of a
composable pair of integer matrices, reported as a finitely generated
abelian group in invariant-factor normal form.

Everything runs on Python ints, so intermediate entries may grow without
overflow.  Matrices are stored densely; the elimination engine works on a
sparse copy and keeps transform matrices sparse until they are read out,
which is what makes the large-but-very-sparse boundary matrices cheap.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Iterable, Optional, Sequence


class LinAlgError(Exception):
    """Base class for exact-linear-algebra failures."""


class DimensionMismatch(LinAlgError):
    pass


class CompositionNonzero(LinAlgError):
    """d_out * d_in is not the zero matrix."""


class BadModulus(LinAlgError):
    pass


class IntMatrix:
    """Dense matrix of Python ints."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, rows: int, cols: int, data: Optional[list] = None):
        if rows < 0 or cols < 0:
            raise DimensionMismatch("negative matrix dimension")
        self.rows = rows
        self.cols = cols
        if data is None:
            self.data = [[0] * cols for _ in range(rows)]
        else:
            if len(data) != rows or any(len(r) != cols for r in data):
                raise DimensionMismatch("data shape does not match (rows, cols)")
            self.data = [list(r) for r in data]

    @classmethod
    def from_rows(cls, data: Sequence[Sequence[int]], cols: Optional[int] = None) -> "IntMatrix":
        rows = len(data)
        if rows == 0:
            if cols is None:
                cols = 0
            return cls(0, cols)
        width = len(data[0])
        return cls(rows, width, [list(r) for r in data])

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        m = cls(n, n)
        for i in range(n):
            m.data[i][i] = 1
        return m

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls(rows, cols)

    @classmethod
    def column(cls, entries: Sequence[int]) -> "IntMatrix":
        return cls(len(entries), 1, [[v] for v in entries])

    @property
    def shape(self) -> tuple:
        return (self.rows, self.cols)

    def copy(self) -> "IntMatrix":
        return IntMatrix(self.rows, self.cols, self.data)

    def transpose(self) -> "IntMatrix":
        t = IntMatrix(self.cols, self.rows)
        for i, row in enumerate(self.data):
            for j, v in enumerate(row):
                if v:
                    t.data[j][i] = v
        return t

    def col(self, j: int) -> list:
        return [row[j] for row in self.data]

    def column_list(self) -> list:
        return [self.col(j) for j in range(self.cols)]

    def is_zero(self) -> bool:
        return all(v == 0 for row in self.data for v in row)

    def __eq__(self, other) -> bool:
        if not isinstance(other, IntMatrix):
            return NotImplemented
        return (self.rows, self.cols) == (other.rows, other.cols) and self.data == other.data

    def __hash__(self):
        return hash((self.rows, self.cols, tuple(tuple(r) for r in self.data)))

    def __add__(self, other: "IntMatrix") -> "IntMatrix":
        if self.shape != other.shape:
            raise DimensionMismatch(f"add {self.shape} vs {other.shape}")
        return IntMatrix(self.rows, self.cols,
                         [[a + b for a, b in zip(r1, r2)]
                          for r1, r2 in zip(self.data, other.data)])

    def __sub__(self, other: "IntMatrix") -> "IntMatrix":
        if self.shape != other.shape:
            raise DimensionMismatch(f"sub {self.shape} vs {other.shape}")
        return IntMatrix(self.rows, self.cols,
                         [[a - b for a, b in zip(r1, r2)]
                          for r1, r2 in zip(self.data, other.data)])

    def __neg__(self) -> "IntMatrix":
        return IntMatrix(self.rows, self.cols, [[-v for v in r] for r in self.data])

    def scaled(self, c: int) -> "IntMatrix":
        return IntMatrix(self.rows, self.cols, [[c * v for v in r] for r in self.data])

    def __mul__(self, other: "IntMatrix") -> "IntMatrix":
        if not isinstance(other, IntMatrix):
            return NotImplemented
        if self.cols != other.rows:
            raise DimensionMismatch(f"mul {self.shape} by {other.shape}")
        out = IntMatrix(self.rows, other.cols)
        odata = out.data
        bdata = other.data
        for i, arow in enumerate(self.data):
            orow = odata[i]
            for k, a in enumerate(arow):
                if a:
                    brow = bdata[k]
                    for j, b in enumerate(brow):
                        if b:
                            orow[j] += a * b
        return out

    def apply(self, vec: Sequence[int]) -> list:
        if len(vec) != self.cols:
            raise DimensionMismatch(f"apply {self.shape} to vector of length {len(vec)}")
        out = [0] * self.rows
        for i, row in enumerate(self.data):
            s = 0
            for a, x in zip(row, vec):
                if a and x:
                    s += a * x
            out[i] = s
        return out

    def hstack(self, other: "IntMatrix") -> "IntMatrix":
        if self.rows != other.rows:
            raise DimensionMismatch("hstack row mismatch")
        return IntMatrix(self.rows, self.cols + other.cols,
                         [r1 + r2 for r1, r2 in zip(self.data, other.data)])

    def submatrix_rows(self, start: int, stop: int) -> "IntMatrix":
        return IntMatrix(stop - start, self.cols, self.data[start:stop])

    def __repr__(self):
        if self.rows * self.cols <= 36:
            return f"IntMatrix({self.data})"
        return f"IntMatrix({self.rows}x{self.cols})"


def _round_div(a: int, b: int) -> int:
    """Integer nearest to a/b; remainder magnitude is at most |b|/2."""
    q, r = divmod(a, b)
    if 2 * abs(r) > abs(b):
        q += 1
    return q


class _Smith:
    """Sparse Smith normal form engine.

    Maintains A = U * S * V while S is reduced in place; only the transform
    factors named in `need` ("U", "Uinv", "V", "Vinv") are tracked.  U and
    Vinv are kept column-major, Uinv and V row-major, so kernels and solves
    read straight out of the sparse dictionaries.
    """

    def __init__(self, A: IntMatrix, need: Iterable[str] = ()):
        self.m, self.n = A.rows, A.cols
        self.rows = [dict() for _ in range(self.m)]
        self.colidx = [set() for _ in range(self.n)]
        for i, row in enumerate(A.data):
            ri = self.rows[i]
            for j, v in enumerate(row):
                if v:
                    ri[j] = v
                    self.colidx[j].add(i)
        need = set(need)
        self.U_cols = [{i: 1} for i in range(self.m)] if "U" in need else None
        self.Uinv_rows = [{i: 1} for i in range(self.m)] if "Uinv" in need else None
        self.V_rows = [{j: 1} for j in range(self.n)] if "V" in need else None
        self.Vinv_cols = [{j: 1} for j in range(self.n)] if "Vinv" in need else None
        self.rank = 0
        self._reduce()

    # -- elementary operations; each keeps A = U S V true ------------------

    @staticmethod
    def _sparse_add(target: dict, source: dict, q: int):
        for k, v in source.items():
            new = target.get(k, 0) + q * v
            if new:
                target[k] = new
            else:
                target.pop(k, None)

    def _row_add(self, i: int, j: int, q: int):
        # S: row_i += q * row_j
        ri = self.rows[i]
        for col, v in self.rows[j].items():
            new = ri.get(col, 0) + q * v
            if new:
                ri[col] = new
                self.colidx[col].add(i)
            else:
                ri.pop(col, None)
                self.colidx[col].discard(i)
        if self.U_cols is not None:  # U: col_j -= q * col_i
            self._sparse_add(self.U_cols[j], self.U_cols[i], -q)
        if self.Uinv_rows is not None:  # Uinv: row_i += q * row_j
            self._sparse_add(self.Uinv_rows[i], self.Uinv_rows[j], q)

    def _row_swap(self, i: int, j: int):
        if i == j:
            return
        for col in self.rows[i].keys() | self.rows[j].keys():
            s = self.colidx[col]
            has_i, has_j = i in s, j in s
            if has_i != has_j:
                if has_i:
                    s.discard(i)
                    s.add(j)
                else:
                    s.discard(j)
                    s.add(i)
        self.rows[i], self.rows[j] = self.rows[j], self.rows[i]
        if self.U_cols is not None:
            self.U_cols[i], self.U_cols[j] = self.U_cols[j], self.U_cols[i]
        if self.Uinv_rows is not None:
            self.Uinv_rows[i], self.Uinv_rows[j] = self.Uinv_rows[j], self.Uinv_rows[i]

    def _row_neg(self, i: int):
        self.rows[i] = {k: -v for k, v in self.rows[i].items()}
        if self.U_cols is not None:
            self.U_cols[i] = {k: -v for k, v in self.U_cols[i].items()}
        if self.Uinv_rows is not None:
            self.Uinv_rows[i] = {k: -v for k, v in self.Uinv_rows[i].items()}

    def _col_add(self, j: int, k: int, q: int):
        # S: col_j += q * col_k
        for i in list(self.colidx[k]):
            ri = self.rows[i]
            new = ri.get(j, 0) + q * ri[k]
            if new:
                ri[j] = new
                self.colidx[j].add(i)
            else:
                ri.pop(j, None)
                self.colidx[j].discard(i)
        if self.V_rows is not None:  # V: row_k -= q * row_j
            self._sparse_add(self.V_rows[k], self.V_rows[j], -q)
        if self.Vinv_cols is not None:  # Vinv: col_j += q * col_k
            self._sparse_add(self.Vinv_cols[j], self.Vinv_cols[k], q)

    def _col_swap(self, j: int, k: int):
        if j == k:
            return
        for i in self.colidx[j] | self.colidx[k]:
            ri = self.rows[i]
            vj, vk = ri.pop(j, None), ri.pop(k, None)
            if vk is not None:
                ri[j] = vk
            if vj is not None:
                ri[k] = vj
        self.colidx[j], self.colidx[k] = self.colidx[k], self.colidx[j]
        if self.V_rows is not None:
            self.V_rows[j], self.V_rows[k] = self.V_rows[k], self.V_rows[j]
        if self.Vinv_cols is not None:
            self.Vinv_cols[j], self.Vinv_cols[k] = self.Vinv_cols[k], self.Vinv_cols[j]

    def _col_neg(self, j: int):
        for i in self.colidx[j]:
            self.rows[i][j] = -self.rows[i][j]
        if self.V_rows is not None:
            self.V_rows[j] = {k: -v for k, v in self.V_rows[j].items()}
        if self.Vinv_cols is not None:
            self.Vinv_cols[j] = {k: -v for k, v in self.Vinv_cols[j].items()}

    # -- reduction ---------------------------------------------------------

    def _select_pivot(self, t: int):
        best = None
        best_key = None
        for j in range(t, self.n):
            cidx = self.colidx[j]
            if not cidx:
                continue
            clen = len(cidx)
            for i in cidx:
                if i < t:
                    continue
                v = self.rows[i][j]
                key = (abs(v), (len(self.rows[i]) - 1) * (clen - 1), i, j)
                if best_key is None or key < best_key:
                    best_key = key
                    best = (i, j)
        return best

    def _clean_pivot(self, t: int):
        while True:
            pivot = self.rows[t][t]
            # clear column t with row operations
            dirty = False
            for i in sorted(self.colidx[t]):
                if i == t:
                    continue
                v = self.rows[i].get(t, 0)
                if not v:
                    continue
                q = _round_div(v, pivot)
                if q:
                    self._row_add(i, t, -q)
                if self.rows[i].get(t, 0):
                    # remainder is a strictly smaller pivot candidate
                    self._row_swap(i, t)
                    dirty = True
                    break
            if dirty:
                continue
            # clear row t with column operations (cannot refill column t)
            pivot = self.rows[t][t]
            for j in sorted(self.rows[t]):
                if j == t:
                    continue
                v = self.rows[t].get(j, 0)
                if not v:
                    continue
                q = _round_div(v, pivot)
                if q:
                    self._col_add(j, t, -q)
                if self.rows[t].get(j, 0):
                    self._col_swap(j, t)
                    dirty = True
                    break
            if dirty:
                continue
            if len(self.colidx[t]) == 1 and len(self.rows[t]) == 1:
                return

    def _reduce(self):
        t = 0
        bound = min(self.m, self.n)
        while t < bound:
            found = self._select_pivot(t)
            if found is None:
                break
            i, j = found
            self._row_swap(i, t)
            self._col_swap(j, t)
            self._clean_pivot(t)
            t += 1
        self.rank = t
        for i in range(t):
            if self.rows[i][i] < 0:
                self._row_neg(i)
        self._fix_divisibility()

    def _fix_divisibility(self):
        r = self.rank
        while True:
            fixed = False
            for i in range(r - 1):
                a = self.rows[i][i]
                b = self.rows[i + 1][i + 1]
                if b % a == 0:
                    continue
                # fold the pair (a, b) into (gcd, lcm) with unimodular moves
                self._col_add(i, i + 1, 1)
                while True:
                    a = self.rows[i][i]
                    c = self.rows[i + 1].get(i, 0)
                    if not c:
                        break
                    q = _round_div(c, a)
                    if q:
                        self._row_add(i + 1, i, -q)
                    if self.rows[i + 1].get(i, 0):
                        self._row_swap(i, i + 1)
                g = self.rows[i][i]
                u = self.rows[i].get(i + 1, 0)
                if u:
                    self._col_add(i + 1, i, -(u // g))
                if self.rows[i][i] < 0:
                    self._row_neg(i)
                if self.rows[i + 1][i + 1] < 0:
                    self._row_neg(i + 1)
                fixed = True
            if not fixed:
                return

    # -- read-out ----------------------------------------------------------

    def diagonal(self) -> list:
        return [self.rows[i][i] for i in range(self.rank)]

    def s_matrix(self) -> IntMatrix:
        S = IntMatrix(self.m, self.n)
        for i in range(self.rank):
            S.data[i][i] = self.rows[i][i]
        return S

    def u_matrix(self) -> IntMatrix:
        U = IntMatrix(self.m, self.m)
        for c, coldict in enumerate(self.U_cols):
            for r, v in coldict.items():
                U.data[r][c] = v
        return U

    def uinv_matrix(self) -> IntMatrix:
        M = IntMatrix(self.m, self.m)
        for r, rowdict in enumerate(self.Uinv_rows):
            for c, v in rowdict.items():
                M.data[r][c] = v
        return M

    def v_matrix(self) -> IntMatrix:
        V = IntMatrix(self.n, self.n)
        for r, rowdict in enumerate(self.V_rows):
            for c, v in rowdict.items():
                V.data[r][c] = v
        return V

    def vinv_matrix(self) -> IntMatrix:
        M = IntMatrix(self.n, self.n)
        for c, coldict in enumerate(self.Vinv_cols):
            for r, v in coldict.items():
                M.data[r][c] = v
        return M


@dataclass(frozen=True)
class SnfDecomposition:
    """A = U * S * V with U, V unimodular and S in Smith normal form."""

    U: IntMatrix
    S: IntMatrix
    V: IntMatrix
    U_inv: IntMatrix
    V_inv: IntMatrix

    @property
    def rank(self) -> int:
        return sum(1 for i in range(min(self.S.rows, self.S.cols)) if self.S.data[i][i])

    def diagonal(self) -> list:
        return [self.S.data[i][i] for i in range(self.rank)]


def snf(A: IntMatrix) -> SnfDecomposition:
    """Smith normal form A = U*S*V; S nonnegative diagonal, d_i | d_{i+1}."""
    eng = _Smith(A, need=("U", "Uinv", "V", "Vinv"))
    return SnfDecomposition(eng.u_matrix(), eng.s_matrix(), eng.v_matrix(),
                            eng.uinv_matrix(), eng.vinv_matrix())


def rank(A: IntMatrix) -> int:
    return _Smith(A).rank


def invariant_factors(A: IntMatrix) -> list:
    """Nonzero diagonal of the Smith form, in divisibility order."""
    return _Smith(A).diagonal()


def _normalize_column_sign(col: list) -> list:
    for v in col:
        if v:
            return col if v > 0 else [-x for x in col]
    return col


def kernel_basis(A: IntMatrix) -> IntMatrix:
    """Basis of the saturated integer kernel lattice, as matrix columns."""
    eng = _Smith(A, need=("Vinv",))
    r = eng.rank
    cols = []
    for j in range(r, eng.n):
        coldict = eng.Vinv_cols[j]
        col = [0] * eng.n
        for i, v in coldict.items():
            col[i] = v
        cols.append(_normalize_column_sign(col))
    out = IntMatrix(eng.n, len(cols))
    for j, col in enumerate(cols):
        for i, v in enumerate(col):
            if v:
                out.data[i][j] = v
    return out


class LinearSystem:
    """Factorization of A reusable for many exact solves of A*x = v."""

    def __init__(self, A: IntMatrix):
        self.A = A
        self._eng = _Smith(A, need=("Uinv", "Vinv"))

    @property
    def rank(self) -> int:
        return self._eng.rank

    def solve(self, v: Sequence[int]) -> Optional[list]:
        eng = self._eng
        if len(v) != eng.m:
            raise DimensionMismatch(f"solve: vector length {len(v)} vs {eng.m} rows")
        w = [0] * eng.m
        for i, rowdict in enumerate(eng.Uinv_rows):
            s = 0
            for j, c in rowdict.items():
                if v[j]:
                    s += c * v[j]
            w[i] = s
        y = [0] * eng.n
        for i in range(eng.rank):
            d = eng.rows[i][i]
            q, rem = divmod(w[i], d)
            if rem:
                return None
            y[i] = q
        for i in range(eng.rank, eng.m):
            if w[i]:
                return None
        x = [0] * eng.n
        for i in range(eng.rank):
            if y[i]:
                for r, c in eng.Vinv_cols[i].items():
                    x[r] += y[i] * c
        return x


def solve_in_image(A: IntMatrix, v: Sequence[int]) -> Optional[list]:
    """Some x with A*x = v, or None when v is not in the image lattice."""
    return LinearSystem(A).solve(v)


def det(A: IntMatrix) -> int:
    """Determinant by fraction-free (Bareiss) elimination."""
    if A.rows != A.cols:
        raise DimensionMismatch("determinant of a non-square matrix")
    n = A.rows
    if n == 0:
        return 1
    m = [row[:] for row in A.data]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k]:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


# -- finitely generated abelian groups -------------------------------------


def _factorint(n: int) -> dict:
    out = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


@dataclass(frozen=True)
class FgAbGroup:
    """Isomorphism type of a finitely generated abelian group.

    `torsion` is the invariant-factor chain t_1 | t_2 | ... with each
    t_i >= 2, so equality of groups is equality of fields.
    """

    free_rank: int = 0
    torsion: tuple = ()

    def __post_init__(self):
        if self.free_rank < 0:
            raise ValueError("negative free rank")
        object.__setattr__(self, "torsion", tuple(int(t) for t in self.torsion))
        prev = 1
        for t in self.torsion:
            if t < 2:
                raise ValueError("invariant factors must be >= 2")
            if t % prev:
                raise ValueError(f"invariant factors {self.torsion} violate divisibility")
            prev = t

    @classmethod
    def trivial(cls) -> "FgAbGroup":
        return cls(0, ())

    @classmethod
    def free(cls, r: int) -> "FgAbGroup":
        return cls(r, ())

    @classmethod
    def cyclic(cls, m: int) -> "FgAbGroup":
        if m == 0:
            return cls(1, ())
        return cls.from_orders([m])

    @classmethod
    def from_invariant_factors(cls, factors: Iterable[int], free_rank: int = 0) -> "FgAbGroup":
        fac = [f for f in factors if f != 1]
        zero = sum(1 for f in fac if f == 0)
        return cls(free_rank + zero, tuple(sorted(f for f in fac if f)))

    @classmethod
    def from_orders(cls, orders: Iterable[int], free_rank: int = 0) -> "FgAbGroup":
        """Normalize arbitrary cyclic orders into an invariant-factor chain."""
        by_prime = {}
        rank = free_rank
        for m in orders:
            m = abs(int(m))
            if m == 0:
                rank += 1
                continue
            if m == 1:
                continue
            for p, e in _factorint(m).items():
                by_prime.setdefault(p, []).append(e)
        width = max((len(v) for v in by_prime.values()), default=0)
        factors = []
        for k in range(width):
            f = 1
            for p, exps in by_prime.items():
                exps_sorted = sorted(exps, reverse=True)
                if k < len(exps_sorted):
                    f *= p ** exps_sorted[k]
            factors.append(f)
        return cls(rank, tuple(sorted(factors)))

    @property
    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    def direct_sum(self, *others: "FgAbGroup") -> "FgAbGroup":
        orders = list(self.torsion)
        rank = self.free_rank
        for g in others:
            rank += g.free_rank
            orders.extend(g.torsion)
        return FgAbGroup.from_orders(orders, rank)

    def tensor_cyclic(self, m: int) -> "FgAbGroup":
        orders = [m] * self.free_rank + [gcd(t, m) for t in self.torsion]
        return FgAbGroup.from_orders(orders)

    def tor_cyclic(self, m: int) -> "FgAbGroup":
        return FgAbGroup.from_orders([gcd(t, m) for t in self.torsion])

    def __str__(self) -> str:
        parts = []
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append(f"Z^{self.free_rank}")
        parts.extend(f"Z/{t}" for t in self.torsion)
        return " + ".join(parts) if parts else "0"


def homology_at(d_out: IntMatrix, d_in: IntMatrix) -> FgAbGroup:
    """ker(d_out)/im(d_in) for a composable pair with d_out*d_in = 0.

    The kernel lattice of d_out is saturated in the ambient Z^m, so the
    torsion of the quotient equals the torsion of Z^m/im(d_in); only the
    rank of d_out and the Smith diagonal of d_in are needed.
    """
    if d_out.cols != d_in.rows:
        raise DimensionMismatch(
            f"cols(d_out)={d_out.cols} must equal rows(d_in)={d_in.rows}")
    if not (d_out * d_in).is_zero():
        raise CompositionNonzero("d_out * d_in != 0")
    m = d_out.cols
    facs = invariant_factors(d_in)
    free = m - rank(d_out) - len(facs)
    return FgAbGroup.from_invariant_factors(facs, free_rank=free)


def coefficients_via_uct(h_n: FgAbGroup, h_nm1: FgAbGroup, m: int) -> FgAbGroup:
    """Homology with Z/m coefficients from two integral homology groups."""
    if m < 2:
        raise BadModulus(f"modulus must be >= 2, got {m}")
    return h_n.tensor_cyclic(m).direct_sum(h_nm1.tor_cyclic(m))


# -- presentations and induced maps -----------------------------------------


class ChainHomologyPresentation:
    """ker(d_out)/im(d_in) with explicit generators and coordinates.

    Heavier than homology_at: tracks a saturated cycle basis and the Smith
    transforms of the relation matrix, so homology classes of ambient
    vectors and induced maps of chain maps can be computed exactly.
    """

    def __init__(self, d_out: IntMatrix, d_in: IntMatrix):
        if d_out.cols != d_in.rows:
            raise DimensionMismatch("presentation: shape mismatch")
        if not (d_out * d_in).is_zero():
            raise CompositionNonzero("d_out * d_in != 0")
        self.ambient = d_out.cols
        eng_out = _Smith(d_out, need=("V", "Vinv"))
        self._cycle_rank = self.ambient - eng_out.rank
        self._v_rows = eng_out.V_rows  # y = V x; kernel coords are y[rank:]
        self._out_rank = eng_out.rank
        self.cycle_basis = IntMatrix(self.ambient, self._cycle_rank)
        for j in range(self._cycle_rank):
            for i, v in eng_out.Vinv_cols[eng_out.rank + j].items():
                self.cycle_basis.data[i][j] = v
        # relation matrix: coordinates of the boundary columns
        rel = IntMatrix(self._cycle_rank, d_in.cols)
        for c in range(d_in.cols):
            coords = self._kernel_coords(d_in.col(c))
            for i, v in enumerate(coords):
                rel.data[i][c] = v
        eng_rel = _Smith(rel, need=("U", "Uinv"))
        self._rel_uinv = eng_rel.Uinv_rows
        diag = eng_rel.diagonal()
        k = self._cycle_rank
        orders_by_index = [diag[i] if i < len(diag) else 0 for i in range(k)]
        self._canon_indices = ([i for i in range(k) if orders_by_index[i] == 0]
                               + [i for i in range(k) if orders_by_index[i] >= 2])
        self.orders = [orders_by_index[i] for i in self._canon_indices]
        self.group = FgAbGroup.from_invariant_factors(diag, free_rank=k - len(diag))
        # generator lifts: ambient cycles realizing each canonical generator
        u_cols = eng_rel.U_cols
        self.generators = []
        for i in self._canon_indices:
            coords = [0] * k
            for r, v in u_cols[i].items():
                coords[r] = v
            self.generators.append(self.cycle_basis.apply(coords))

    def _kernel_coords(self, vec: Sequence[int]) -> list:
        y = [0] * self.ambient
        for i, rowdict in enumerate(self._v_rows):
            s = 0
            for j, c in rowdict.items():
                if vec[j]:
                    s += c * vec[j]
            y[i] = s
        if any(y[i] for i in range(self._out_rank)):
            raise LinAlgError("vector is not a cycle")
        return y[self._out_rank:]

    def coords(self, vec: Sequence[int]) -> list:
        """Canonical coordinates of the homology class of an ambient cycle."""
        c = self._kernel_coords(vec)
        y = [0] * self._cycle_rank
        for i, rowdict in enumerate(self._rel_uinv):
            s = 0
            for j, u in rowdict.items():
                if c[j]:
                    s += u * c[j]
            y[i] = s
        out = []
        for idx, d in zip(self._canon_indices, self.orders):
            out.append(y[idx] % d if d else y[idx])
        return out

    @property
    def n_generators(self) -> int:
        return len(self.orders)


def homology_presentation(d_out: IntMatrix, d_in: IntMatrix) -> ChainHomologyPresentation:
    return ChainHomologyPresentation(d_out, d_in)


def induced_on_homology(chain_map: IntMatrix,
                        source: ChainHomologyPresentation,
                        target: ChainHomologyPresentation) -> IntMatrix:
    """Matrix of the induced map on canonical generators.

    chain_map must send source cycles to target cycles and boundaries to
    boundaries; entries hitting a torsion generator are reduced mod its
    order.
    """
    if chain_map.cols != source.ambient or chain_map.rows != target.ambient:
        raise DimensionMismatch("chain map shape does not match presentations")
    out = IntMatrix(target.n_generators, source.n_generators)
    for j, gen in enumerate(source.generators):
        coords = target.coords(chain_map.apply(gen))
        for i, v in enumerate(coords):
            out.data[i][j] = v
    return out


def quotient_group(target: ChainHomologyPresentation, map_matrix: IntMatrix) -> FgAbGroup:
    """target.group / (subgroup generated by the columns of map_matrix).

    Columns are in the target's canonical coordinates.
    """
    if map_matrix.rows != target.n_generators:
        raise DimensionMismatch("quotient: coordinate mismatch")
    rel_cols = []
    for j in range(map_matrix.cols):
        rel_cols.append(map_matrix.col(j))
    for i, d in enumerate(target.orders):
        if d:
            col = [0] * target.n_generators
            col[i] = d
            rel_cols.append(col)
    rel = IntMatrix(target.n_generators, len(rel_cols))
    for j, col in enumerate(rel_cols):
        for i, v in enumerate(col):
            rel.data[i][j] = v
    facs = invariant_factors(rel)
    return FgAbGroup.from_invariant_factors(facs, free_rank=target.n_generators - len(facs))


def kernel_group(map_matrix: IntMatrix, source_orders: Sequence[int],
                 target_orders: Sequence[int]) -> FgAbGroup:
    """Kernel of a homomorphism between presented abelian groups.

    The map is given in canonical coordinates (order 0 means a free
    generator).  The preimage of the target relation lattice is computed
    as the projection of an integer kernel, then presented modulo the
    source relations.
    """
    ks, kt = len(source_orders), len(target_orders)
    if map_matrix.shape != (kt, ks):
        raise DimensionMismatch("kernel: coordinate mismatch")
    torsion_idx = [i for i, d in enumerate(target_orders) if d]
    stacked = IntMatrix(kt, ks + len(torsion_idx))
    for i in range(kt):
        for j in range(ks):
            stacked.data[i][j] = map_matrix.data[i][j]
    for c, i in enumerate(torsion_idx):
        stacked.data[i][ks + c] = -target_orders[i]
    pre = kernel_basis(stacked)
    lattice_gens = IntMatrix(ks, pre.cols)
    for j in range(pre.cols):
        for i in range(ks):
            lattice_gens.data[i][j] = pre.data[i][j]
    # reduce the projected generators to a lattice basis
    dec = snf(lattice_gens)
    r = dec.rank
    basis = IntMatrix(ks, r)
    us = dec.U * dec.S
    for j in range(r):
        for i in range(ks):
            basis.data[i][j] = us.data[i][j]
    if r == 0:
        return FgAbGroup.trivial()
    # source relations expressed in the kernel-lattice basis
    sys = LinearSystem(basis)
    rel_cols = []
    for i, d in enumerate(source_orders):
        if not d:
            continue
        col = [0] * ks
        col[i] = d
        coords = sys.solve(col)
        if coords is None:
            raise LinAlgError("induced map is not well defined on the quotient")
        rel_cols.append(coords)
    rel = IntMatrix(r, len(rel_cols))
    for j, col in enumerate(rel_cols):
        for i, v in enumerate(col):
            rel.data[i][j] = v
    facs = invariant_factors(rel)
    return FgAbGroup.from_invariant_factors(facs, free_rank=r - len(facs))
