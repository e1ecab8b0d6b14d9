"""Exact linear algebra over Z and residue rings.

Everything downstream (module homs, homology, Ext/Tor, obstruction solving)
reduces to integer matrices: Smith normal form with unimodular transforms,
solving linear systems modulo a vector of "orders" (one modulus per row,
0 meaning Z), kernels of such systems, and subquotient presentations of
finitely generated abelian groups with explicit representatives.

All arithmetic is arbitrary-precision; matrices are immutable tuples once
wrapped in IntMatrix, plain lists of lists internally.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

__all__ = [
    "IntMatrix",
    "SmithForm",
    "AbGroup",
    "smith_normal_form",
    "solve_int",
    "kernel_int",
    "solve_mod",
    "kernel_mod",
    "solve_with_orders",
    "kernel_with_orders",
    "lattice_contains",
    "Subquotient",
    "normalize_vector",
]


class IntMatrix:
    """Immutable integer matrix; entries stored row-major.

    Empty shapes (0 x n, m x 0) are legal as long as the dimensions are
    passed explicitly; they show up as matrices of zero maps.
    """

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, entries: Sequence[Sequence[int]], rows: int | None = None,
                 cols: int | None = None):
        data = tuple(tuple(int(x) for x in row) for row in entries)
        if rows is None:
            rows = len(data)
        if cols is None:
            cols = len(data[0]) if data else 0
        if len(data) != rows or any(len(r) != cols for r in data):
            raise ValueError("ragged or mis-sized entry data")
        super().__setattr__("rows", rows)
        super().__setattr__("cols", cols)
        super().__setattr__("entries", data)

    def __setattr__(self, name, value):
        raise AttributeError("IntMatrix is immutable")

    @staticmethod
    def identity(n: int) -> "IntMatrix":
        return IntMatrix([[1 if i == j else 0 for j in range(n)] for i in range(n)], n, n)

    @staticmethod
    def zeros(rows: int, cols: int) -> "IntMatrix":
        return IntMatrix([[0] * cols for _ in range(rows)], rows, cols)

    @staticmethod
    def from_columns(cols: Sequence[Sequence[int]], dim: int | None = None) -> "IntMatrix":
        if not cols:
            if dim is None:
                raise ValueError("need ambient dimension for an empty column set")
            return IntMatrix([[] for _ in range(dim)], dim, 0)
        n = len(cols[0])
        return IntMatrix([[c[i] for c in cols] for i in range(n)], n, len(cols))

    def column(self, j: int) -> list[int]:
        return [self.entries[i][j] for i in range(self.rows)]

    def tolists(self) -> list[list[int]]:
        return [list(r) for r in self.entries]

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def __eq__(self, other):
        return (isinstance(other, IntMatrix) and self.rows == other.rows
                and self.cols == other.cols and self.entries == other.entries)

    def __hash__(self):
        return hash((self.rows, self.cols, self.entries))

    def __mul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError("dimension mismatch in matrix product")
        a, b = self.entries, other.entries
        out = [[sum(a[i][k] * b[k][j] for k in range(self.cols))
                for j in range(other.cols)] for i in range(self.rows)]
        return IntMatrix(out, self.rows, other.cols)

    def apply(self, vec: Sequence[int]) -> list[int]:
        if len(vec) != self.cols:
            raise ValueError("vector length mismatch")
        return [sum(row[j] * vec[j] for j in range(self.cols)) for row in self.entries]

    def __repr__(self):
        return f"IntMatrix({[list(r) for r in self.entries]!r})"


@dataclass(frozen=True)
class SmithForm:
    """U*A*V = D with U, V unimodular and D diagonal (d_i | d_{i+1}, d_i >= 0)."""

    D: IntMatrix
    U: IntMatrix
    V: IntMatrix
    U_inv: IntMatrix
    V_inv: IntMatrix

    @property
    def invariant_factors(self) -> tuple[int, ...]:
        d = self.D
        return tuple(d[i, i] for i in range(min(d.rows, d.cols)) if d[i, i] != 0)


@dataclass(frozen=True)
class AbGroup:
    """Finitely generated abelian group in invariant-factor form.

    factors: torsion invariant factors (each >= 2, each dividing the next);
    free_rank: rank of the free part.
    """

    factors: tuple[int, ...] = ()
    free_rank: int = 0

    def __post_init__(self):
        fs = tuple(self.factors)
        object.__setattr__(self, "factors", fs)
        if any(f < 2 for f in fs):
            raise ValueError("invariant factors must be >= 2")
        if any(fs[i + 1] % fs[i] != 0 for i in range(len(fs) - 1)):
            raise ValueError("invariant factors must form a divisibility chain")
        if self.free_rank < 0:
            raise ValueError("negative free rank")

    def order(self) -> Optional[int]:
        """Group order; None if infinite."""
        if self.free_rank:
            return None
        n = 1
        for f in self.factors:
            n *= f
        return n

    def is_trivial(self) -> bool:
        return not self.factors and not self.free_rank

    def __str__(self):
        parts = [f"Z/{f}" for f in self.factors] + ["Z"] * self.free_rank
        return " + ".join(parts) if parts else "0"


def normalize_vector(vec: Sequence[int], orders: Sequence[int]) -> tuple[int, ...]:
    """Reduce each coordinate modulo its order (order 0 = no reduction)."""
    return tuple(v % o if o else v for v, o in zip(vec, orders))


# ---------------------------------------------------------------------------
# Smith normal form
# ---------------------------------------------------------------------------

def _snf_inplace(a: list[list[int]], m: int, n: int):
    """Diagonalize a by unimodular row/col ops; return (U, Uinv, V, Vinv).

    Pivoting picks the smallest nonzero absolute value in the remaining
    submatrix, which keeps intermediate entries modest at desk scale.
    """
    U = [[1 if i == j else 0 for j in range(m)] for i in range(m)]
    Uinv = [[1 if i == j else 0 for j in range(m)] for i in range(m)]
    V = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    Vinv = [[1 if i == j else 0 for j in range(n)] for i in range(n)]

    def swap_rows(i, j):
        if i == j:
            return
        a[i], a[j] = a[j], a[i]
        U[i], U[j] = U[j], U[i]
        for r in Uinv:  # column swap on the inverse
            r[i], r[j] = r[j], r[i]

    def swap_cols(i, j):
        if i == j:
            return
        for r in a:
            r[i], r[j] = r[j], r[i]
        for r in V:
            r[i], r[j] = r[j], r[i]
        Vinv[i], Vinv[j] = Vinv[j], Vinv[i]

    def add_row(src, dst, q):
        # row dst += q * row src   (Uinv: col src -= q * col dst)
        if q == 0:
            return
        ra, rs = a[dst], a[src]
        for k in range(n):
            ra[k] += q * rs[k]
        ru, rsu = U[dst], U[src]
        for k in range(m):
            ru[k] += q * rsu[k]
        for r in Uinv:
            r[src] -= q * r[dst]

    def add_col(src, dst, q):
        if q == 0:
            return
        for r in a:
            r[dst] += q * r[src]
        for r in V:
            r[dst] += q * r[src]
        rv, rdv = Vinv[src], Vinv[dst]
        for k in range(n):
            rv[k] -= q * rdv[k]

    def negate_row(i):
        a[i] = [-x for x in a[i]]
        U[i] = [-x for x in U[i]]
        for r in Uinv:
            r[i] = -r[i]

    t = 0
    while t < min(m, n):
        piv = None
        best = None
        for i in range(t, m):
            row = a[i]
            for j in range(t, n):
                v = row[j]
                if v and (best is None or abs(v) < best):
                    best = abs(v)
                    piv = (i, j)
                    if best == 1:
                        break
            if best == 1:
                break
        if piv is None:
            break
        swap_rows(t, piv[0])
        swap_cols(t, piv[1])
        while True:
            dirty = False
            for i in range(t + 1, m):
                if a[i][t]:
                    q = a[i][t] // a[t][t]
                    add_row(t, i, -q)
                    if a[i][t]:  # nonzero remainder became a smaller pivot
                        swap_rows(t, i)
                        dirty = True
            for j in range(t + 1, n):
                if a[t][j]:
                    q = a[t][j] // a[t][t]
                    add_col(t, j, -q)
                    if a[t][j]:
                        swap_cols(t, j)
                        dirty = True
            if dirty:
                continue
            if any(a[i][t] for i in range(t + 1, m)) or any(a[t][j] for j in range(t + 1, n)):
                continue
            # divisibility sweep: pivot must divide the trailing submatrix
            offender = None
            for i in range(t + 1, m):
                row = a[i]
                for j in range(t + 1, n):
                    if row[j] % a[t][t]:
                        offender = i
                        break
                if offender is not None:
                    break
            if offender is None:
                break
            add_row(offender, t, 1)
        if a[t][t] < 0:
            negate_row(t)
        t += 1
    return U, Uinv, V, Vinv


def smith_normal_form(A) -> SmithForm:
    """Smith normal form with transforms: U*A*V = D exactly.

    Total function: any integer matrix (including empty and zero) is accepted.
    """
    A = A if isinstance(A, IntMatrix) else IntMatrix(A)
    a = A.tolists()
    U, Uinv, V, Vinv = _snf_inplace(a, A.rows, A.cols)
    form = SmithForm(IntMatrix(a, A.rows, A.cols),
                     IntMatrix(U, A.rows, A.rows), IntMatrix(V, A.cols, A.cols),
                     IntMatrix(Uinv, A.rows, A.rows), IntMatrix(Vinv, A.cols, A.cols))
    assert form.U * A * form.V == form.D
    assert form.U * form.U_inv == IntMatrix.identity(A.rows)
    assert form.V * form.V_inv == IntMatrix.identity(A.cols)
    return form


# ---------------------------------------------------------------------------
# Solving and kernels
# ---------------------------------------------------------------------------

def _coerce(A) -> IntMatrix:
    return A if isinstance(A, IntMatrix) else IntMatrix(A)


def solve_int(A, b: Sequence[int]) -> Optional[list[int]]:
    """One solution of A x = b over Z, or None if no integer solution exists."""
    A = _coerce(A)
    m, n = A.rows, A.cols
    b = [int(x) for x in b]
    if len(b) != m:
        raise ValueError("dimension mismatch")
    if m == 0:
        return [0] * n
    if n == 0:
        return [] if all(x == 0 for x in b) else None
    sf = smith_normal_form(A)
    c = sf.U.apply(b)
    y = [0] * n
    for i in range(min(m, n)):
        d = sf.D[i, i]
        if d == 0:
            if c[i] != 0:
                return None
        else:
            if c[i] % d:
                return None
            y[i] = c[i] // d
    if any(c[i] != 0 for i in range(min(m, n), m)):
        return None
    return sf.V.apply(y)


def kernel_int(A) -> list[list[int]]:
    """Basis (as a list of vectors) of {x in Z^n : A x = 0}."""
    A = _coerce(A)
    m, n = A.rows, A.cols
    if m == 0:
        return [[1 if i == j else 0 for i in range(n)] for j in range(n)]
    sf = smith_normal_form(A)
    out = []
    for j in range(n):
        if j >= min(m, n) or sf.D[j, j] == 0:
            out.append(sf.V.column(j))
    return out


def solve_mod(A, b: Sequence[int], n: int) -> Optional[list[int]]:
    """One solution of A x = b (mod n); n = 0 solves over the integers.

    Absence is certified: None is returned only when the Smith-form
    solvability criterion fails for the augmented integer system.
    """
    if n < 0:
        raise ValueError("modulus must be >= 0")
    A = _coerce(A)
    if len(b) != A.rows:
        raise ValueError("dimension mismatch")
    sol = solve_with_orders(A, b, [n] * A.rows)
    if sol is None:
        return None
    return [x % n for x in sol] if n else sol


def kernel_mod(A, n: int) -> list[list[int]]:
    """Generators of {x : A x = 0 (mod n)} over Z/n (over Z when n = 0)."""
    if n < 0:
        raise ValueError("modulus must be >= 0")
    A = _coerce(A)
    if n == 0:
        return kernel_int(A)
    gens = kernel_with_orders(A, [n] * A.rows, col_orders=[n] * A.cols)
    return [list(normalize_vector(g, [n] * A.cols)) for g in gens]


def solve_with_orders(A, b: Sequence[int], row_orders: Sequence[int]) -> Optional[list[int]]:
    """Solve A x = b where congruence in row i is taken mod row_orders[i]."""
    A = _coerce(A)
    m, n = A.rows, A.cols
    if len(b) != m or len(row_orders) != m:
        raise ValueError("dimension mismatch")
    if m == 0:
        return [0] * n
    extra = [i for i in range(m) if row_orders[i]]
    aug_rows = [list(A.entries[i]) + [row_orders[i] if i == k else 0 for k in extra]
                for i in range(m)]
    sol = solve_int(IntMatrix(aug_rows, m, n + len(extra)), b)
    if sol is None:
        return None
    return sol[:n]


def kernel_with_orders(A, row_orders: Sequence[int],
                       col_orders: Sequence[int] | None = None) -> list[list[int]]:
    """Generators of {x : A x = 0 mod row_orders}, as integer vectors.

    When col_orders is given, the order lattice of the source is adjoined so
    the result generates the kernel subgroup of prod Z/col_orders.
    """
    A = _coerce(A)
    m, n = A.rows, A.cols
    if len(row_orders) != m:
        raise ValueError("dimension mismatch")
    if m == 0:
        gens = [[1 if i == j else 0 for i in range(n)] for j in range(n)]
    else:
        extra = [i for i in range(m) if row_orders[i]]
        aug_rows = [list(A.entries[i]) + [row_orders[i] if i == k else 0 for k in extra]
                    for i in range(m)]
        gens = [v[:n] for v in kernel_int(IntMatrix(aug_rows, m, n + len(extra)))]
    if col_orders is not None:
        if len(col_orders) != n:
            raise ValueError("dimension mismatch")
        for j, o in enumerate(col_orders):
            if o:
                gens.append([o if i == j else 0 for i in range(n)])
    return gens


def lattice_contains(gens: Sequence[Sequence[int]], v: Sequence[int]) -> bool:
    """Is v an integer combination of the given generator vectors?"""
    if not gens:
        return all(x == 0 for x in v)
    return solve_int(IntMatrix.from_columns(gens), v) is not None


# ---------------------------------------------------------------------------
# Subquotients with representatives
# ---------------------------------------------------------------------------

class Subquotient:
    """(span(numerator) + order lattice) / (span(denominator) + order lattice).

    Lives inside the ambient group prod_i Z/orders[i] (order 0 = Z).  Keeps
    explicit generator representatives, a classifying map for elements of the
    numerator, and lifts of classes back to the ambient group.  This is the
    common engine behind homology, hom groups, Ext and Tor.
    """

    def __init__(self, ambient_orders: Sequence[int],
                 numerator: Sequence[Sequence[int]],
                 denominator: Sequence[Sequence[int]]):
        self.ambient_orders = tuple(int(o) for o in ambient_orders)
        n = len(self.ambient_orders)
        order_cols = [[o if i == j else 0 for i in range(n)]
                      for j, o in enumerate(self.ambient_orders) if o]
        num = [list(map(int, v)) for v in numerator] + [c[:] for c in order_cols]
        den = [list(map(int, v)) for v in denominator] + [c[:] for c in order_cols]
        for v in num + den:
            if len(v) != n:
                raise ValueError("vector length mismatch")

        # basis of the numerator lattice, via SNF of its generator matrix
        if num:
            sf = smith_normal_form(IntMatrix.from_columns(num, dim=n))
            rank = len(sf.invariant_factors)
            basis = [[sf.U_inv[i, k] * sf.D[k, k] for i in range(n)] for k in range(rank)]
            self._numer_sf = sf
        else:
            basis = []
            self._numer_sf = None
        self._basis = basis
        r = len(basis)

        # denominator generators in numerator-basis coordinates
        rel = []
        for v in den:
            coords = self._basis_coords(v)
            if coords is None:
                raise ValueError("denominator not contained in numerator")
            rel.append(coords)
        if r and rel:
            sfr = smith_normal_form(IntMatrix.from_columns(rel, dim=r))
            diag = [sfr.D[i, i] for i in range(min(r, len(rel)))]
            diag += [0] * (r - len(diag))
            self._rel_sf = sfr
            ur_inv = sfr.U_inv
        else:
            diag = [0] * r
            self._rel_sf = None
            ur_inv = IntMatrix.identity(r)

        kept = [i for i in range(r) if diag[i] != 1]
        self._kept = kept
        self._diag = diag
        gens = []
        orders = []
        for i in kept:
            vec = [sum(ur_inv[k, i] * basis[k][t] for k in range(r)) for t in range(n)]
            gens.append(normalize_vector(vec, self.ambient_orders))
            orders.append(diag[i])
        self.reps = gens                      # ambient representatives
        self.rep_orders = tuple(orders)       # 0 = infinite order
        tor = tuple(o for o in orders if o)
        free = sum(1 for o in orders if o == 0)
        self.group = AbGroup(tor, free)

    def _basis_coords(self, v) -> Optional[list[int]]:
        """Coordinates of v in the numerator-lattice basis, or None."""
        if self._numer_sf is None:
            return [] if all(x == 0 for x in v) else None
        sf = self._numer_sf
        c = sf.U.apply(list(v))
        r = len(self._basis)
        coords = []
        for i in range(r):
            d = sf.D[i, i]
            if c[i] % d:
                return None
            coords.append(c[i] // d)
        if any(c[i] != 0 for i in range(r, len(c))):
            return None
        return coords

    def contains(self, v) -> bool:
        return self._basis_coords(list(v)) is not None

    def classify(self, v) -> tuple[int, ...]:
        """Class of an ambient vector lying in the numerator subgroup."""
        coords = self._basis_coords(list(v))
        if coords is None:
            raise ValueError("vector not in the numerator subgroup")
        r = len(self._basis)
        if self._rel_sf is not None:
            x = [sum(self._rel_sf.U[i, k] * coords[k] for k in range(r)) for i in range(r)]
        else:
            x = coords
        out = []
        for i in self._kept:
            d = self._diag[i]
            out.append(x[i] % d if d else x[i])
        return tuple(out)

    def lift(self, cls: Sequence[int]) -> tuple[int, ...]:
        """An ambient representative of the given class tuple."""
        if len(cls) != len(self.reps):
            raise ValueError("class tuple length mismatch")
        n = len(self.ambient_orders)
        v = [0] * n
        for c, g in zip(cls, self.reps):
            for t in range(n):
                v[t] += c * g[t]
        return normalize_vector(v, self.ambient_orders)

    def is_zero_class(self, v) -> bool:
        return all(c == 0 for c in self.classify(v))

    def enumerate_classes(self, limit: int = 100000) -> list[tuple[int, ...]]:
        """All class tuples; raises if the group is infinite or too large."""
        if self.group.free_rank:
            raise ValueError("cannot enumerate an infinite group")
        total = self.group.order()
        if total > limit:
            raise ValueError(f"group of order {total} exceeds enumeration limit")
        from itertools import product
        return [tuple(t) for t in product(*[range(o) for o in self.rep_orders])]
