"""Finitely generated modules over finite rings and bounded chain complexes.

Modules are additive generator systems with action structure constants;
maps are integer matrices on additive coordinates, reduced modulo the target
generator orders.  Complexes are degree-indexed with differentials lowering
degree.  Sign conventions, fixed once for the whole artifact:

    shift:  (X[k])_i = X_(i-k),  d_X[k] = (-1)^k d_X
    cone:   cone(f)_k = X_(k-1) (+) Y_k,  d = [[-d_X, 0], [-f, d_Y]]
    fiber:  fiber(f) = cone(f)[-1]
    chain homotopy: f - g = d h + h d  with h of degree +1
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import gcd, lcm
from typing import Optional, Sequence

from .algebra import (
    AlgebraMap,
    Bimodule,
    FiniteAlgebra,
    IllDefined,
    NotAssociative,
    NotUnital,
    Vec,
    enumerate_vectors,
    vadd,
    vscale,
    vzero,
    zmod,
)
from .exactlin import (
    AbGroup,
    IntMatrix,
    Subquotient,
    kernel_with_orders,
    lattice_contains,
    normalize_vector,
    solve_with_orders,
)

__all__ = [
    "FinModule", "ModuleMap", "FreeModule", "ChainComplex", "ChainMap",
    "Homotopy", "HomologyGroup", "hom_group", "tensor_over", "TensorModule",
    "restrict_scalars", "restrict_bimodule", "homology", "induced_on_homology",
    "cone", "shift", "fiber", "quasi_iso", "underlying_Z", "direct_sum",
    "zero_module", "free_module", "quotient_module", "module_as_complex",
    "ses_boundary_map", "verify_les_exact", "bimodule_as_left_module",
    "left_module_as_bimodule",
]


class FinModule:
    """Left module over a FiniteAlgebra, as generators + action constants.

    action[p][j] = coordinates of g_p . m_j.  Verification (well-definedness,
    unit law, associativity against the algebra's structure constants) runs
    on generators, which bilinearity makes sufficient.
    """

    def __init__(self, algebra: FiniteAlgebra, orders: Sequence[int],
                 action: Sequence[Sequence[Sequence[int]]], name: str = "",
                 check: bool = True):
        self.algebra = algebra
        self.orders: Vec = tuple(int(o) for o in orders)
        t = len(self.orders)
        if len(action) != algebra.ngens:
            raise ValueError("one action row per algebra generator")
        self.action = tuple(tuple(normalize_vector(action[p][j], self.orders)
                                  for j in range(t))
                            for p in range(algebra.ngens))
        self.name = name or f"mod{self.orders}"
        self._gen_mats: list[IntMatrix] | None = None
        if check:
            self._verify()

    @property
    def ngens(self) -> int:
        return len(self.orders)

    def zero(self) -> Vec:
        return vzero(self.orders)

    def gen(self, j: int) -> Vec:
        return tuple(1 if k == j else 0 for k in range(self.ngens))

    def gen_matrix(self, p: int) -> IntMatrix:
        if self._gen_mats is None:
            self._gen_mats = [
                IntMatrix.from_columns([list(self.action[q][j]) for j in range(self.ngens)],
                                       dim=self.ngens)
                for q in range(self.algebra.ngens)]
        return self._gen_mats[p]

    def act(self, a: Vec, m: Vec) -> Vec:
        out = [0] * self.ngens
        for p, ap in enumerate(a):
            if ap:
                col = self.gen_matrix(p).apply(list(m))
                for t in range(self.ngens):
                    out[t] += ap * col[t]
        return normalize_vector(out, self.orders)

    def act_matrix(self, a: Vec) -> IntMatrix:
        """Matrix of m |-> a.m for a ring element a."""
        rows = self.ngens
        out = [[0] * rows for _ in range(rows)]
        for p, ap in enumerate(a):
            if ap:
                mat = self.gen_matrix(p)
                for i in range(rows):
                    for j in range(rows):
                        out[i][j] += ap * mat[i, j]
        return IntMatrix([[out[i][j] % self.orders[i] if self.orders[i] else out[i][j]
                           for j in range(rows)] for i in range(rows)], rows, rows)

    def elements(self):
        return (tuple(v) for v in enumerate_vectors(self.orders))

    def size(self) -> Optional[int]:
        if any(o == 0 for o in self.orders):
            return None
        n = 1
        for o in self.orders:
            n *= o
        return n

    def group(self) -> AbGroup:
        """Underlying abelian group in invariant-factor form."""
        sq = Subquotient(self.orders,
                         [list(self.gen(j)) for j in range(self.ngens)], [])
        return sq.group

    def _verify(self):
        A = self.algebra
        t = self.ngens
        for p in range(A.ngens):
            for j in range(t):
                v = self.action[p][j]
                if A.orders[p] and vscale(A.orders[p], v, self.orders) != self.zero():
                    raise IllDefined(p, j)
                if self.orders[j] and vscale(self.orders[j], v, self.orders) != self.zero():
                    raise IllDefined(p, j)
        for j in range(t):
            if self.act(A.unit, self.gen(j)) != self.gen(j):
                raise NotUnital(j)
        for p in range(A.ngens):
            for q in range(A.ngens):
                prod = A.mul[p][q]
                for j in range(t):
                    if self.act(prod, self.gen(j)) != self.act(A.gen(p), self.action[q][j]):
                        raise NotAssociative(p, q, j)

    def __repr__(self):
        return f"FinModule({self.name}, orders={self.orders}, over={self.algebra.name})"


def zero_module(A: FiniteAlgebra) -> FinModule:
    return FinModule(A, [], [[] for _ in range(A.ngens)], name="0")


def bimodule_as_left_module(B: Bimodule) -> FinModule:
    return FinModule(B.left_algebra, B.orders,
                     [[B.left[p][j] for j in range(B.ngens)]
                      for p in range(B.left_algebra.ngens)],
                     name=B.name, check=False)


def left_module_as_bimodule(M: FinModule) -> Bimodule:
    """Commutative algebras only: reuse the left action on the right."""
    if not M.algebra.is_commutative():
        raise ValueError("needs a commutative algebra")
    return Bimodule(M.algebra, M.algebra, M.orders,
                    [[M.action[p][j] for j in range(M.ngens)]
                     for p in range(M.algebra.ngens)],
                    [[M.action[q][j] for q in range(M.algebra.ngens)]
                     for j in range(M.ngens)],
                    name=M.name)


class ModuleMap:
    """A-linear map between modules over the same algebra, as an IntMatrix."""

    def __init__(self, source: FinModule, target: FinModule, matrix,
                 check: bool = True):
        if source.algebra is not target.algebra:
            raise ValueError("algebra mismatch")
        self.source = source
        self.target = target
        m = matrix if isinstance(matrix, IntMatrix) else IntMatrix(
            matrix, target.ngens, source.ngens)
        if (m.rows, m.cols) != (target.ngens, source.ngens):
            raise ValueError("matrix shape mismatch")
        self.matrix = IntMatrix(
            [[m[i, j] % target.orders[i] if target.orders[i] else m[i, j]
              for j in range(m.cols)] for i in range(m.rows)], m.rows, m.cols)
        if check:
            self._verify()

    def apply(self, v: Vec) -> Vec:
        return normalize_vector(self.matrix.apply(list(v)), self.target.orders)

    def compose(self, inner: "ModuleMap") -> "ModuleMap":
        """self o inner."""
        if inner.target is not self.source:
            raise ValueError("composition mismatch")
        return ModuleMap(inner.source, self.target, self.matrix * inner.matrix,
                         check=False)

    def add(self, other: "ModuleMap") -> "ModuleMap":
        entries = [[self.matrix[i, j] + other.matrix[i, j]
                    for j in range(self.matrix.cols)] for i in range(self.matrix.rows)]
        return ModuleMap(self.source, self.target,
                         IntMatrix(entries, self.matrix.rows, self.matrix.cols),
                         check=False)

    def negate(self) -> "ModuleMap":
        entries = [[-self.matrix[i, j] for j in range(self.matrix.cols)]
                   for i in range(self.matrix.rows)]
        return ModuleMap(self.source, self.target,
                         IntMatrix(entries, self.matrix.rows, self.matrix.cols),
                         check=False)

    def is_zero(self) -> bool:
        return all(self.matrix[i, j] % self.target.orders[i] == 0
                   if self.target.orders[i] else self.matrix[i, j] == 0
                   for i in range(self.matrix.rows) for j in range(self.matrix.cols))

    def equals(self, other: "ModuleMap") -> bool:
        return self.matrix == other.matrix

    def _verify(self):
        # additive well-definedness, then A-linearity, on generators
        src, tgt = self.source, self.target
        for j in range(src.ngens):
            o = src.orders[j]
            if o:
                col = vscale(o, tuple(self.matrix.column(j)), tgt.orders)
                if col != tgt.zero():
                    raise IllDefined(-1, j)
        for p in range(src.algebra.ngens):
            lhs = self.matrix * src.gen_matrix(p)
            rhs = tgt.gen_matrix(p) * self.matrix
            for i in range(tgt.ngens):
                o = tgt.orders[i]
                for j in range(src.ngens):
                    if (lhs[i, j] - rhs[i, j]) % o if o else (lhs[i, j] != rhs[i, j]):
                        raise NotAssociative(p, i, j)

    @staticmethod
    def zero(source: FinModule, target: FinModule) -> "ModuleMap":
        return ModuleMap(source, target,
                         IntMatrix.zeros(target.ngens, source.ngens), check=False)

    @staticmethod
    def identity(M: FinModule) -> "ModuleMap":
        return ModuleMap(M, M, IntMatrix.identity(M.ngens), check=False)

    def __repr__(self):
        return f"ModuleMap({self.source.name} -> {self.target.name})"


# ---------------------------------------------------------------------------
# free modules and matrices over the ring
# ---------------------------------------------------------------------------

class FreeModule:
    """S^n with its chosen basis; coordinates are slot-major.

    Carries conversion between tuples of ring elements and additive
    coordinates, and realizes matrices over S as additive maps.  For left
    modules a matrix T acts by x |-> (sum_j x_j * T_ij)_i, so the additive
    block (i, j) is right multiplication by T_ij.
    """

    def __init__(self, algebra: FiniteAlgebra, rank: int, name: str = ""):
        self.algebra = algebra
        self.rank = rank
        r = algebra.ngens
        orders = list(algebra.orders) * rank
        action = []
        for p in range(r):
            rows = []
            lm = algebra.left_mult_matrix(algebra.gen(p))
            for slot in range(rank):
                for q in range(r):
                    col = lm.column(q)
                    vec = [0] * (rank * r)
                    for a in range(r):
                        vec[slot * r + a] = col[a]
                    rows.append(tuple(vec))
            action.append(rows)
        self.module = FinModule(algebra, orders, action,
                                name=name or f"{algebra.name}^{rank}", check=False)

    def flatten(self, elems: Sequence[Vec]) -> Vec:
        assert len(elems) == self.rank
        out = []
        for e in elems:
            out.extend(e)
        return tuple(out)

    def split(self, coords: Sequence[int]) -> list[Vec]:
        r = self.algebra.ngens
        return [normalize_vector(coords[s * r:(s + 1) * r], self.algebra.orders)
                for s in range(self.rank)]

    def basis_element(self, slot: int) -> Vec:
        return self.flatten([self.algebra.unit if s == slot else self.algebra.zero()
                             for s in range(self.rank)])


def free_module(A: FiniteAlgebra, rank: int, name: str = "") -> FreeModule:
    return FreeModule(A, rank, name=name)


def smatrix_to_additive(src: FreeModule, tgt: FreeModule,
                        entries: Sequence[Sequence[Vec]]) -> IntMatrix:
    """Additive realization of a matrix over the ring (left-module maps)."""
    A = src.algebra
    r = A.ngens
    m, n = tgt.rank, src.rank
    if len(entries) != m or any(len(row) != n for row in entries):
        raise ValueError("entry shape mismatch")
    rows = m * r
    cols = n * r
    out = [[0] * cols for _ in range(rows)]
    for i in range(m):
        for j in range(n):
            rm = A.right_mult_matrix(entries[i][j])
            for a in range(r):
                for b in range(r):
                    out[i * r + a][j * r + b] = rm[a, b]
    return IntMatrix(out, rows, cols)


def compose_smatrix(A: FiniteAlgebra, first: Sequence[Sequence[Vec]],
                    second: Sequence[Sequence[Vec]]) -> list[list[Vec]]:
    """Matrix of (second o first); entries multiply as first * second in A.

    With left modules and basis-column conventions the composite's (k, j)
    entry is sum_i first[i][j] * second[k][i], products taken in A in that
    order (matrices over the opposite ring compose with a twist).
    """
    n_mid = len(first)
    n_src = len(first[0]) if n_mid else 0
    n_tgt = len(second)
    out = [[A.zero() for _ in range(n_src)] for _ in range(n_tgt)]
    for k in range(n_tgt):
        for j in range(n_src):
            acc = A.zero()
            for i in range(n_mid):
                acc = A.add(acc, A.mul_elems(first[i][j], second[k][i]))
            out[k][j] = acc
    return out


# ---------------------------------------------------------------------------
# chain complexes
# ---------------------------------------------------------------------------

class ChainComplex:
    """Bounded complex; differentials lower degree and square to zero."""

    def __init__(self, algebra: FiniteAlgebra, terms: dict[int, FinModule],
                 diffs: dict[int, ModuleMap], name: str = "", check: bool = True):
        self.algebra = algebra
        self.terms = dict(terms)
        self.diffs = dict(diffs)
        degs = sorted(self.terms)
        self.lo = degs[0] if degs else 0
        self.hi = degs[-1] if degs else 0
        self.name = name or "complex"
        self._zero = zero_module(algebra)
        if check:
            self.validate()

    def term(self, k: int) -> FinModule:
        return self.terms.get(k, self._zero)

    def diff(self, k: int) -> ModuleMap:
        d = self.diffs.get(k)
        if d is None:
            return ModuleMap.zero(self.term(k), self.term(k - 1))
        return d

    def degrees(self):
        return range(self.lo, self.hi + 1)

    def validate(self):
        for k, d in self.diffs.items():
            if d.source is not self.term(k) or d.target is not self.term(k - 1):
                raise ValueError(f"differential at degree {k} has wrong endpoints")
        for k in self.degrees():
            if k + 1 in self.diffs and k in self.diffs:
                if not self.diff(k).compose(self.diff(k + 1)).is_zero():
                    raise ValueError(f"d^2 != 0 at degree {k + 1}")

    def __repr__(self):
        ranks = {k: self.term(k).ngens for k in self.degrees()}
        return f"ChainComplex({self.name}, gens={ranks})"


def module_as_complex(M: FinModule, degree: int = 0, name: str = "") -> ChainComplex:
    return ChainComplex(M.algebra, {degree: M}, {}, name=name or M.name)


class ChainMap:
    """Degreewise maps commuting with the differentials."""

    def __init__(self, source: ChainComplex, target: ChainComplex,
                 comps: dict[int, ModuleMap], check: bool = True):
        self.source = source
        self.target = target
        self.comps = dict(comps)
        if check:
            self.validate()

    def comp(self, k: int) -> ModuleMap:
        c = self.comps.get(k)
        if c is None:
            return ModuleMap.zero(self.source.term(k), self.target.term(k))
        return c

    def validate(self):
        for k, c in self.comps.items():
            if c.source is not self.source.term(k) or c.target is not self.target.term(k):
                raise ValueError(f"component at degree {k} has wrong endpoints")
        lo = min(self.source.lo, self.target.lo)
        hi = max(self.source.hi, self.target.hi)
        for k in range(lo, hi + 1):
            lhs = self.target.diff(k).compose(self.comp(k))
            rhs = self.comp(k - 1).compose(self.source.diff(k))
            if not lhs.add(rhs.negate()).is_zero():
                raise ValueError(f"not a chain map at degree {k}")

    @staticmethod
    def identity(X: ChainComplex) -> "ChainMap":
        return ChainMap(X, X, {k: ModuleMap.identity(X.term(k)) for k in X.degrees()},
                        check=False)

    @staticmethod
    def zero(X: ChainComplex, Y: ChainComplex) -> "ChainMap":
        return ChainMap(X, Y, {}, check=False)


class Homotopy:
    """h with f - g = d h + h d; components raise degree by one."""

    def __init__(self, f: ChainMap, g: ChainMap, comps: dict[int, ModuleMap],
                 check: bool = True):
        self.f = f
        self.g = g
        self.comps = dict(comps)
        if check:
            self.validate()

    def comp(self, k: int) -> ModuleMap:
        c = self.comps.get(k)
        if c is None:
            return ModuleMap.zero(self.f.source.term(k), self.f.target.term(k + 1))
        return c

    def validate(self):
        X, Y = self.f.source, self.f.target
        lo = min(X.lo, Y.lo) - 1
        hi = max(X.hi, Y.hi) + 1
        for k in range(lo, hi + 1):
            want = self.f.comp(k).add(self.g.comp(k).negate())
            got = Y.diff(k + 1).compose(self.comp(k)).add(
                self.comp(k - 1).compose(X.diff(k)))
            if not want.add(got.negate()).is_zero():
                raise ValueError(f"homotopy identity fails at degree {k}")


# ---------------------------------------------------------------------------
# direct sums, cones, shifts
# ---------------------------------------------------------------------------

@dataclass
class SumData:
    module: FinModule
    inclusions: list[ModuleMap]
    projections: list[ModuleMap]


def direct_sum(mods: Sequence[FinModule], name: str = "") -> SumData:
    A = mods[0].algebra if mods else None
    orders: list[int] = []
    offsets = []
    for M in mods:
        if M.algebra is not A:
            raise ValueError("algebra mismatch in direct sum")
        offsets.append(len(orders))
        orders.extend(M.orders)
    total = len(orders)
    action = []
    for p in range(A.ngens):
        rows = []
        for M, off in zip(mods, offsets):
            for j in range(M.ngens):
                vec = [0] * total
                col = M.action[p][j]
                for t in range(M.ngens):
                    vec[off + t] = col[t]
                rows.append(tuple(vec))
        action.append(rows)
    S = FinModule(A, orders, action, name=name or "(+)".join(m.name for m in mods),
                  check=False)
    incs, projs = [], []
    for M, off in zip(mods, offsets):
        inc = [[1 if (i == off + j) else 0 for j in range(M.ngens)]
               for i in range(total)]
        proj = [[1 if (j == off + i) else 0 for j in range(total)]
                for i in range(M.ngens)]
        incs.append(ModuleMap(M, S, IntMatrix(inc, total, M.ngens), check=False))
        projs.append(ModuleMap(S, M, IntMatrix(proj, M.ngens, total), check=False))
    return SumData(S, incs, projs)


def shift(X: ChainComplex, k: int, name: str = "") -> ChainComplex:
    """(X[k])_i = X_(i-k) with differential (-1)^k d."""
    sign = -1 if k % 2 else 1
    terms = {i + k: X.term(i) for i in X.degrees() if X.term(i).ngens}
    diffs = {}
    for i, d in X.diffs.items():
        diffs[i + k] = d if sign == 1 else d.negate()
    return ChainComplex(X.algebra, terms, diffs, name=name or f"{X.name}[{k}]",
                        check=False)


def cone(f: ChainMap, name: str = "") -> ChainComplex:
    """cone(f)_k = X_(k-1) (+) Y_k with d = [[-d_X, 0], [-f, d_Y]]."""
    X, Y = f.source, f.target
    lo = min(X.lo + 1, Y.lo)
    hi = max(X.hi + 1, Y.hi)
    sums: dict[int, SumData] = {}
    terms = {}
    for k in range(lo, hi + 1):
        sd = direct_sum([X.term(k - 1), Y.term(k)], name=f"cone_{k}")
        sums[k] = sd
        terms[k] = sd.module
    diffs = {}
    for k in range(lo + 1, hi + 1):
        src, tgt = sums[k], sums[k - 1]
        dx = X.diff(k - 1)
        dy = Y.diff(k)
        fk = f.comp(k - 1)
        m = tgt.inclusions[0].compose(dx.negate()).compose(src.projections[0]) \
            .add(tgt.inclusions[1].compose(fk.negate()).compose(src.projections[0])) \
            .add(tgt.inclusions[1].compose(dy).compose(src.projections[1]))
        diffs[k] = m
    cx = ChainComplex(X.algebra, terms, diffs, name=name or f"cone({X.name}->{Y.name})")
    cx.sum_data = sums  # inclusion/projection bookkeeping for callers
    return cx


def fiber(f: ChainMap, name: str = "") -> ChainComplex:
    return shift(cone(f), -1, name=name or f"fib({f.source.name})")


# ---------------------------------------------------------------------------
# homology
# ---------------------------------------------------------------------------

class HomologyGroup:
    """H_k with explicit cycle representatives and a classifying map."""

    def __init__(self, X: ChainComplex, k: int):
        self.complex = X
        self.degree = k
        term = X.term(k)
        self.term = term
        out = X.diff(k)
        if out.source.ngens and out.matrix.rows:
            cycles = kernel_with_orders(out.matrix, list(out.target.orders),
                                        col_orders=list(term.orders))
        else:
            cycles = [list(term.gen(j)) for j in range(term.ngens)]
        inc = X.diff(k + 1)
        bounds = [inc.matrix.column(j) for j in range(inc.matrix.cols)]
        self.subq = Subquotient(term.orders, cycles, bounds)
        reps = self.subq.reps
        # homology is again a module: the algebra acts on representatives
        action = []
        for p in range(X.algebra.ngens):
            mat = term.gen_matrix(p)
            rows = [self.subq.classify(mat.apply(list(rep))) for rep in reps]
            action.append(rows)
        self.module = FinModule(X.algebra, self.subq.rep_orders, action,
                                name=f"H_{k}({X.name})", check=False)

    @property
    def group(self) -> AbGroup:
        return self.subq.group

    def classify(self, cycle: Sequence[int]) -> Vec:
        return self.subq.classify(list(cycle))

    def rep(self, cls: Sequence[int]) -> Vec:
        return self.subq.lift(cls)


def homology(X: ChainComplex, k: int) -> HomologyGroup:
    """H_k = ker d_k / im d_(k+1), with representative lifting."""
    return HomologyGroup(X, k)


def induced_on_homology(f: ChainMap, k: int, hx: HomologyGroup | None = None,
                        hy: HomologyGroup | None = None) -> ModuleMap:
    hx = hx or homology(f.source, k)
    hy = hy or homology(f.target, k)
    fk = f.comp(k)
    cols = [list(hy.classify(fk.apply(rep))) for rep in hx.subq.reps]
    return ModuleMap(hx.module, hy.module,
                     IntMatrix.from_columns(cols, dim=hy.module.ngens), check=False)


def _map_bijective_mod_orders(mat: IntMatrix, src_orders, tgt_orders) -> bool:
    for t in range(len(tgt_orders)):
        e = [1 if i == t else 0 for i in range(len(tgt_orders))]
        if solve_with_orders(mat, e, list(tgt_orders)) is None:
            return False
    if mat.cols:
        gens = kernel_with_orders(mat, list(tgt_orders), col_orders=None)
        zero_latt = [[o if i == j else 0 for i in range(len(src_orders))]
                     for j, o in enumerate(src_orders) if o]
        for g in gens:
            if not lattice_contains(zero_latt, g):
                return False
    return True


def quasi_iso(f: ChainMap) -> bool:
    """True iff the induced homology maps are bijective in every degree."""
    lo = min(f.source.lo, f.target.lo)
    hi = max(f.source.hi, f.target.hi)
    for k in range(lo, hi + 1):
        hx = homology(f.source, k)
        hy = homology(f.target, k)
        ind = induced_on_homology(f, k, hx, hy)
        if not _map_bijective_mod_orders(ind.matrix, hx.module.orders, hy.module.orders):
            return False
    return True


# ---------------------------------------------------------------------------
# hom groups
# ---------------------------------------------------------------------------

@dataclass
class HomGroup:
    group: AbGroup
    basis: list[ModuleMap]
    subq: Subquotient  # ambient: matrix entries of maps, row-major


def hom_group(M: FinModule, N: FinModule) -> HomGroup:
    """The group of A-linear maps M -> N, by solving linearity over Z."""
    if M.algebra is not N.algebra:
        raise ValueError("algebra mismatch")
    s, t = M.ngens, N.ngens
    nvars = s * t  # unknowns T[i][j], i < t rows, j < s cols, row-major

    rows = []
    row_orders = []
    # well-definedness: o_j(M) * T[:, j] = 0 mod orders(N)
    for j in range(s):
        o = M.orders[j]
        if o:
            for i in range(t):
                vec = [0] * nvars
                vec[i * s + j] = o
                rows.append(vec)
                row_orders.append(N.orders[i])
    # A-linearity: T L_p - LN_p T = 0 mod orders(N)
    for p in range(M.algebra.ngens):
        lm = M.gen_matrix(p)
        ln = N.gen_matrix(p)
        for i in range(t):
            for j in range(s):
                vec = [0] * nvars
                for k in range(s):
                    vec[i * s + k] += lm[k, j]
                for k in range(t):
                    vec[k * s + j] -= ln[i, k]
                rows.append(vec)
                row_orders.append(N.orders[i])
    if rows:
        sols = kernel_with_orders(IntMatrix(rows, len(rows), nvars), row_orders)
    else:
        sols = [[1 if a == b else 0 for a in range(nvars)] for b in range(nvars)]
    # maps are identified modulo N's orders entry-row-wise
    entry_orders = [N.orders[i] for i in range(t) for _ in range(s)]
    sq = Subquotient(entry_orders, sols, [])
    basis = []
    for rep in sq.reps:
        mat = [[rep[i * s + j] for j in range(s)] for i in range(t)]
        basis.append(ModuleMap(M, N, IntMatrix(mat, t, s)))
    return HomGroup(sq.group, basis, sq)


# ---------------------------------------------------------------------------
# tensor products
# ---------------------------------------------------------------------------

class TensorModule:
    """M (x)_B N for a (A,B)-bimodule M and left B-module N.

    Presented on pure tensors m_i (x) n_j with order and balancing relations,
    reduced to invariant factors by Smith form.  Retains the classifying map
    from the presentation space, so pure tensors and induced maps are
    computable.
    """

    def __init__(self, M: Bimodule, N: FinModule, name: str = ""):
        if M.right_algebra is not N.algebra:
            raise ValueError("middle algebra mismatch")
        self.M, self.N = M, N
        A = M.left_algebra
        B = M.right_algebra
        tm, tn = M.ngens, N.ngens
        nvars = tm * tn  # index (i, j) -> i*tn + j

        rels = []
        for i in range(tm):
            for j in range(tn):
                if M.orders[i]:
                    vec = [0] * nvars
                    vec[i * tn + j] = M.orders[i]
                    rels.append(vec)
                if N.orders[j]:
                    vec = [0] * nvars
                    vec[i * tn + j] = N.orders[j]
                    rels.append(vec)
        for q in range(B.ngens):
            for i in range(tm):
                mb = M.right[i][q]     # m_i . b_q in M coordinates
                for j in range(tn):
                    bn = N.action[q][j]  # b_q . n_j in N coordinates
                    vec = [0] * nvars
                    for k in range(tm):
                        vec[k * tn + j] += mb[k]
                    for l in range(tn):
                        vec[i * tn + l] -= bn[l]
                    rels.append(vec)
        full = [[1 if a == b else 0 for a in range(nvars)] for b in range(nvars)]
        self.subq = Subquotient([0] * nvars, full, rels)
        reps = self.subq.reps
        action = []
        for p in range(A.ngens):
            rows = []
            lm = M.left_gen_matrix(p)
            for rep in reps:
                img = [0] * nvars
                for i in range(tm):
                    for j in range(tn):
                        c = rep[i * tn + j]
                        if c:
                            col = lm.column(i)
                            for k in range(tm):
                                img[k * tn + j] += c * col[k]
                rows.append(self.subq.classify(img))
            action.append(rows)
        self.module = FinModule(A, self.subq.rep_orders, action,
                                name=name or f"{M.name}(x){N.name}", check=False)

    def pure(self, m: Vec, n: Vec) -> Vec:
        tm, tn = self.M.ngens, self.N.ngens
        vec = [0] * (tm * tn)
        for i in range(tm):
            if m[i]:
                for j in range(tn):
                    if n[j]:
                        vec[i * tn + j] += m[i] * n[j]
        return self.subq.classify(vec)

    def induced_from_right(self, f: ModuleMap, target: "TensorModule") -> ModuleMap:
        """id_M (x) f for f: N -> N'."""
        if f.source is not self.N or target.N is not f.target or target.M is not self.M:
            raise ValueError("endpoint mismatch")
        tm, tn = self.M.ngens, self.N.ngens
        tn2 = f.target.ngens
        cols = []
        for rep in self.subq.reps:
            img = [0] * (tm * tn2)
            for i in range(tm):
                for j in range(tn):
                    c = rep[i * tn + j]
                    if c:
                        col = f.matrix.column(j)
                        for l in range(tn2):
                            img[i * tn2 + l] += c * col[l]
            cols.append(list(target.subq.classify(img)))
        return ModuleMap(self.module, target.module,
                         IntMatrix.from_columns(cols, dim=target.module.ngens),
                         check=False)


def tensor_over(M, N: FinModule, name: str = "") -> TensorModule:
    """M (x)_B N; M may be a Bimodule or (over commutative B) a FinModule."""
    if isinstance(M, FinModule):
        M = left_module_as_bimodule(M)
    return TensorModule(M, N, name=name)


def tensor_complex(M: Bimodule, X: ChainComplex, name: str = "") -> tuple[ChainComplex, dict[int, TensorModule]]:
    """Levelwise M (x)_B X with differentials id (x) d."""
    tens = {k: TensorModule(M, X.term(k)) for k in X.degrees()}
    terms = {k: tens[k].module for k in X.degrees()}
    diffs = {}
    for k in X.degrees():
        if k == X.lo:
            continue
        diffs[k] = tens[k].induced_from_right(X.diff(k), tens[k - 1])
    cx = ChainComplex(M.left_algebra, terms, diffs,
                      name=name or f"{M.name}(x){X.name}")
    return cx, tens


# ---------------------------------------------------------------------------
# restriction of scalars and the underlying-group functor
# ---------------------------------------------------------------------------

def restrict_scalars(f: AlgebraMap, M: FinModule, name: str = "") -> FinModule:
    """M viewed over the source of f; the action is precomposed with f."""
    if f.target is not M.algebra:
        raise ValueError("f must land in M's algebra")
    B = f.source
    action = []
    for q in range(B.ngens):
        mat = M.act_matrix(f.images[q])
        action.append([tuple(mat.column(j)) for j in range(M.ngens)])
    return FinModule(B, M.orders, action, name=name or f"res({M.name})")


def restrict_bimodule(f: AlgebraMap, g: AlgebraMap, M: Bimodule,
                      name: str = "") -> Bimodule:
    """(f,g)-restriction: left action through f, right action through g."""
    if f.target is not M.left_algebra or g.target is not M.right_algebra:
        raise ValueError("restriction endpoints mismatch")
    left = []
    for p in range(f.source.ngens):
        mat = M.left_act_matrix(f.images[p])
        left.append([tuple(mat.column(j)) for j in range(M.ngens)])
    right = []
    for j in range(M.ngens):
        right.append([M.act_right(M.gen(j), g.images[q])
                      for q in range(g.source.ngens)])
    return Bimodule(f.source, g.source, M.orders, left, right,
                    name=name or f"res({M.name})")


def restrict_complex(f: AlgebraMap, X: ChainComplex, name: str = "") -> ChainComplex:
    terms = {k: restrict_scalars(f, X.term(k)) for k in X.degrees()}
    diffs = {}
    for k, d in X.diffs.items():
        diffs[k] = ModuleMap(terms[k], terms[k - 1], d.matrix, check=False)
    return ChainComplex(f.source, terms, diffs, name=name or f"res({X.name})")


def underlying_Z(X: ChainComplex, name: str = "") -> ChainComplex:
    """Forget the module structure to Z/exponent (0 = Z)."""
    exp = 1
    for k in X.degrees():
        for o in X.term(k).orders:
            if o == 0:
                exp = 0
                break
            exp = lcm(exp, o)
        if exp == 0:
            break
    Zx = zmod(exp)
    terms = {}
    for k in X.degrees():
        M = X.term(k)
        action = [[M.gen(j) for j in range(M.ngens)]]
        terms[k] = FinModule(Zx, M.orders, action, name=f"und({M.name})", check=False)
    diffs = {k: ModuleMap(terms[k], terms[k - 1], d.matrix, check=False)
             for k, d in X.diffs.items()}
    return ChainComplex(Zx, terms, diffs, name=name or f"und({X.name})")


# ---------------------------------------------------------------------------
# short exact sequences and the long exact homology sequence
# ---------------------------------------------------------------------------

def ses_levelwise_exact(i: ChainMap, p: ChainMap) -> Optional[str]:
    """Check 0 -> A -> B -> C -> 0 levelwise; None if exact, else a reason."""
    A, B, C = i.source, i.target, p.target
    if p.source is not B:
        return "maps do not compose"
    lo = min(A.lo, B.lo, C.lo)
    hi = max(A.hi, B.hi, C.hi)
    for k in range(lo, hi + 1):
        ik, pk = i.comp(k), p.comp(k)
        # injectivity of i_k
        gens = kernel_with_orders(ik.matrix, list(B.term(k).orders),
                                  col_orders=list(A.term(k).orders)) \
            if A.term(k).ngens else []
        zero_latt = [[o if a == b else 0 for a in range(A.term(k).ngens)]
                     for b, o in enumerate(A.term(k).orders) if o]
        for g in gens:
            if not lattice_contains(zero_latt, g):
                return f"i not injective at degree {k}"
        # surjectivity of p_k
        for t in range(C.term(k).ngens):
            e = [1 if a == t else 0 for a in range(C.term(k).ngens)]
            if solve_with_orders(pk.matrix, e, list(C.term(k).orders)) is None:
                return f"p not surjective at degree {k}"
        # im(i) = ker(p)
        if not p.comp(k).compose(i.comp(k)).is_zero():
            return f"p o i != 0 at degree {k}"
        kerp = kernel_with_orders(pk.matrix, list(C.term(k).orders),
                                  col_orders=list(B.term(k).orders)) \
            if B.term(k).ngens else []
        im_gens = [ik.matrix.column(j) for j in range(ik.matrix.cols)]
        im_latt = im_gens + [[o if a == b else 0 for a in range(B.term(k).ngens)]
                             for b, o in enumerate(B.term(k).orders) if o]
        for g in kerp:
            if not lattice_contains(im_latt, g):
                return f"ker(p) exceeds im(i) at degree {k}"
    return None


def ses_boundary_map(i: ChainMap, p: ChainMap, k: int,
                     hc: HomologyGroup | None = None,
                     ha: HomologyGroup | None = None) -> ModuleMap:
    """Connecting map H_k(C) -> H_(k-1)(A): lift, differentiate, pull back."""
    A, B, C = i.source, i.target, p.target
    hc = hc or homology(C, k)
    ha = ha or homology(A, k - 1)
    cols = []
    for rep in hc.subq.reps:
        x = solve_with_orders(p.comp(k).matrix, list(rep), list(C.term(k).orders))
        assert x is not None, "levelwise surjectivity failed during boundary"
        dx = B.diff(k).apply(normalize_vector(x, B.term(k).orders))
        a = solve_with_orders(i.comp(k - 1).matrix, list(dx), list(B.term(k - 1).orders))
        assert a is not None, "boundary element escaped the subcomplex"
        cols.append(list(ha.classify(normalize_vector(a, A.term(k - 1).orders))))
    return ModuleMap(hc.module, ha.module,
                     IntMatrix.from_columns(cols, dim=ha.module.ngens), check=False)


def _exact_at(in_mat: IntMatrix, in_src_orders, grp_orders, out_mat: IntMatrix,
              out_tgt_orders) -> bool:
    """Exactness of P -> G -> Q at G, all maps on invariant coordinates."""
    comp_zero = True
    if in_mat.cols and out_mat.rows:
        prod = out_mat * in_mat
        comp_zero = all(
            (prod[i, j] % out_tgt_orders[i] == 0 if out_tgt_orders[i] else prod[i, j] == 0)
            for i in range(prod.rows) for j in range(prod.cols))
    if not comp_zero:
        return False
    n = len(grp_orders)
    latt = [in_mat.column(j) for j in range(in_mat.cols)]
    latt += [[o if a == b else 0 for a in range(n)] for b, o in enumerate(grp_orders) if o]
    ker = kernel_with_orders(out_mat, list(out_tgt_orders), col_orders=list(grp_orders)) \
        if n else []
    return all(lattice_contains(latt, g) for g in ker)


def verify_les_exact(i: ChainMap, p: ChainMap) -> Optional[str]:
    """Exactness of the long homology sequence of a levelwise s.e.s."""
    reason = ses_levelwise_exact(i, p)
    if reason:
        return reason
    A, B, C = i.source, i.target, p.target
    lo = min(A.lo, B.lo, C.lo) - 1
    hi = max(A.hi, B.hi, C.hi) + 1
    H = {}
    for k in range(lo - 1, hi + 2):
        H[("A", k)] = homology(A, k)
        H[("B", k)] = homology(B, k)
        H[("C", k)] = homology(C, k)
    for k in range(lo, hi + 1):
        ik = induced_on_homology(i, k, H[("A", k)], H[("B", k)])
        pk = induced_on_homology(p, k, H[("B", k)], H[("C", k)])
        dk1 = ses_boundary_map(i, p, k + 1, H[("C", k + 1)], H[("A", k)])
        dk = ses_boundary_map(i, p, k, H[("C", k)], H[("A", k - 1)])
        # ... -> H_k+1(C) -d-> H_k(A) -i-> H_k(B) -p-> H_k(C) -d-> H_k-1(A) -> ...
        if not _exact_at(dk1.matrix, H[("C", k + 1)].module.orders,
                         H[("A", k)].module.orders, ik.matrix,
                         H[("B", k)].module.orders):
            return f"LES not exact at H_{k}(A)"
        if not _exact_at(ik.matrix, H[("A", k)].module.orders,
                         H[("B", k)].module.orders, pk.matrix,
                         H[("C", k)].module.orders):
            return f"LES not exact at H_{k}(B)"
        if not _exact_at(pk.matrix, H[("B", k)].module.orders,
                         H[("C", k)].module.orders, dk.matrix,
                         H[("A", k - 1)].module.orders):
            return f"LES not exact at H_{k}(C)"
    return None


# ---------------------------------------------------------------------------
# standard module builders
# ---------------------------------------------------------------------------

def quotient_module(S: FiniteAlgebra, ideal_elems: Sequence[Sequence[int]],
                    name: str = "") -> FinModule:
    """S / (left ideal generated by the given elements)."""
    rels = []
    for x in ideal_elems:
        x = normalize_vector(x, S.orders)
        for p in range(S.ngens):
            rels.append(list(S.mul_elems(S.gen(p), x)))
    full = [[1 if a == b else 0 for a in range(S.ngens)] for b in range(S.ngens)]
    sq = Subquotient(S.orders, full, rels)
    action = []
    for p in range(S.ngens):
        lm = S.left_mult_matrix(S.gen(p))
        action.append([sq.classify(lm.apply(list(rep))) for rep in sq.reps])
    return FinModule(S, sq.rep_orders, action, name=name or f"{S.name}/ideal")
