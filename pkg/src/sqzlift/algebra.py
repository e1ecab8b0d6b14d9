"""Finite associative unital rings, bimodules, and square-zero extensions.

Rings are stored as structure constants on a chosen generating set of the
additive group.  Every axiom is checked exhaustively on generators, which is
sound because bilinearity reduces the general identity to generator tuples.
Square-zero data bundle a verified surjection pi: R -> S, the kernel J with
its induced (S,S)-actions, and an element-wise preimage table for pi.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from math import gcd, lcm
from typing import Callable, Optional, Sequence

from .exactlin import (
    IntMatrix,
    Subquotient,
    kernel_with_orders,
    normalize_vector,
    solve_with_orders,
)

__all__ = [
    "AlgebraCheckError", "IllDefined", "NotAssociative", "NotUnital",
    "NotSurjective", "KernelNotSquareZero", "NotACocycle", "NotNormalized",
    "FiniteAlgebra", "AlgebraMap", "Bimodule", "SquareZeroDatum",
    "check_algebra", "check_square_zero", "split_square_zero",
    "extension_from_cocycle", "zmod", "trunc_poly", "product_ring",
    "find_ring_isomorphism",
]

Vec = tuple[int, ...]


class AlgebraCheckError(Exception):
    """An algebraic axiom failed; args carry the witness."""


class IllDefined(AlgebraCheckError):
    """Structure constant incompatible with generator orders at pair (i, j)."""


class NotAssociative(AlgebraCheckError):
    """Associativity fails at generator triple (i, j, k)."""


class NotUnital(AlgebraCheckError):
    """Unit law fails at generator i."""


class NotSurjective(AlgebraCheckError):
    pass


class KernelNotSquareZero(AlgebraCheckError):
    """Witness pair (x, y) in ker(pi) with x*y != 0."""


class NotACocycle(AlgebraCheckError):
    """Cochain table does not define a ring; args carry the failing identity."""


class NotNormalized(AlgebraCheckError):
    """Cochain table is not normalized on the zero row/column."""


# ---------------------------------------------------------------------------
# coordinate helpers
# ---------------------------------------------------------------------------

def vadd(a: Vec, b: Vec, orders: Vec) -> Vec:
    return normalize_vector([x + y for x, y in zip(a, b)], orders)


def vsub(a: Vec, b: Vec, orders: Vec) -> Vec:
    return normalize_vector([x - y for x, y in zip(a, b)], orders)


def vscale(k: int, a: Vec, orders: Vec) -> Vec:
    return normalize_vector([k * x for x in a], orders)


def vzero(orders: Sequence[int]) -> Vec:
    return (0,) * len(orders)


def element_additive_order(vec: Vec, orders: Vec) -> int:
    """Order of vec in prod Z/orders; 0 means infinite."""
    n = 1
    for v, o in zip(vec, orders):
        if o == 0:
            if v != 0:
                return 0
            continue
        v %= o
        if v:
            n = lcm(n, o // gcd(o, v))
    return n


def enumerate_vectors(orders: Sequence[int]):
    if any(o == 0 for o in orders):
        raise ValueError("cannot enumerate an infinite group")
    return itertools.product(*[range(o) for o in orders])


# ---------------------------------------------------------------------------
# finite algebras
# ---------------------------------------------------------------------------

class FiniteAlgebra:
    """Associative unital ring on additive generators with structure constants.

    orders[i] is the additive order of generator g_i (0 encodes Z, used only
    for the initial ring of integers); mul[i][j] holds the coordinates of
    g_i * g_j; unit is the coordinate vector of 1.
    """

    def __init__(self, orders: Sequence[int], mul: Sequence[Sequence[Sequence[int]]],
                 unit: Sequence[int], name: str = "", check: bool = True):
        self.orders: Vec = tuple(int(o) for o in orders)
        if any(o < 0 for o in self.orders):
            raise ValueError("orders must be >= 0")
        r = len(self.orders)
        self.mul: tuple[tuple[Vec, ...], ...] = tuple(
            tuple(normalize_vector(mul[i][j], self.orders) for j in range(r))
            for i in range(r))
        self.unit: Vec = normalize_vector(unit, self.orders)
        self.name = name or f"ring{self.orders}"
        self._left_mats: dict[Vec, IntMatrix] = {}
        if check:
            self._verify()

    # -- element arithmetic --

    @property
    def ngens(self) -> int:
        return len(self.orders)

    def zero(self) -> Vec:
        return vzero(self.orders)

    def gen(self, i: int) -> Vec:
        return tuple(1 if k == i else 0 for k in range(self.ngens))

    def add(self, a: Vec, b: Vec) -> Vec:
        return vadd(a, b, self.orders)

    def sub(self, a: Vec, b: Vec) -> Vec:
        return vsub(a, b, self.orders)

    def neg(self, a: Vec) -> Vec:
        return vscale(-1, a, self.orders)

    def mul_elems(self, a: Vec, b: Vec) -> Vec:
        out = [0] * self.ngens
        for i, ai in enumerate(a):
            if not ai:
                continue
            for j, bj in enumerate(b):
                if not bj:
                    continue
                m = self.mul[i][j]
                for t in range(self.ngens):
                    out[t] += ai * bj * m[t]
        return normalize_vector(out, self.orders)

    def left_mult_matrix(self, a: Vec) -> IntMatrix:
        """Matrix of x |-> a*x on additive coordinates."""
        a = normalize_vector(a, self.orders)
        cached = self._left_mats.get(a)
        if cached is None:
            cols = [self.mul_elems(a, self.gen(j)) for j in range(self.ngens)]
            cached = IntMatrix.from_columns(cols, dim=self.ngens)
            self._left_mats[a] = cached
        return cached

    def right_mult_matrix(self, a: Vec) -> IntMatrix:
        cols = [self.mul_elems(self.gen(j), a) for j in range(self.ngens)]
        return IntMatrix.from_columns(cols, dim=self.ngens)

    def elements(self):
        return (tuple(v) for v in enumerate_vectors(self.orders))

    def size(self) -> Optional[int]:
        if any(o == 0 for o in self.orders):
            return None
        n = 1
        for o in self.orders:
            n *= o
        return n

    def is_finite(self) -> bool:
        return all(o > 0 for o in self.orders)

    def is_commutative(self) -> bool:
        r = self.ngens
        return all(self.mul[i][j] == self.mul[j][i] for i in range(r) for j in range(r))

    # -- verification --

    def _verify(self):
        r = self.ngens
        for i in range(r):
            for j in range(r):
                m = self.mul[i][j]
                if self.orders[i] and vscale(self.orders[i], m, self.orders) != self.zero():
                    raise IllDefined(i, j)
                if self.orders[j] and vscale(self.orders[j], m, self.orders) != self.zero():
                    raise IllDefined(i, j)
        for i in range(r):
            gi = self.gen(i)
            if self.mul_elems(self.unit, gi) != gi or self.mul_elems(gi, self.unit) != gi:
                raise NotUnital(i)
        for i in range(r):
            for j in range(r):
                ij = self.mul[i][j]
                for k in range(r):
                    lhs = self.mul_elems(ij, self.gen(k))
                    rhs = self.mul_elems(self.gen(i), self.mul[j][k])
                    if lhs != rhs:
                        raise NotAssociative(i, j, k)

    def __repr__(self):
        return f"FiniteAlgebra({self.name}, orders={self.orders})"


def check_algebra(candidate) -> FiniteAlgebra:
    """Verify all ring axioms; the raised error names the first failing tuple."""
    if isinstance(candidate, FiniteAlgebra):
        candidate._verify()
        return candidate
    orders, mul, unit = candidate
    return FiniteAlgebra(orders, mul, unit)


# -- common constructors --

def zmod(n: int, name: str = "") -> FiniteAlgebra:
    """Z/n (n = 0 gives the integers)."""
    return FiniteAlgebra([n], [[[1]]], [1], name or (f"Z/{n}" if n else "Z"))


def trunc_poly(n: int, k: int, name: str = "") -> FiniteAlgebra:
    """(Z/n)[x] / (x^k), generators 1, x, ..., x^(k-1)."""
    if k < 1 or n < 0:
        raise ValueError("need k >= 1, n >= 0")
    mul = [[[1 if t == i + j else 0 for t in range(k)] if i + j < k else [0] * k
            for j in range(k)] for i in range(k)]
    unit = [1] + [0] * (k - 1)
    return FiniteAlgebra([n] * k, mul, unit, name or f"Z/{n}[x]/x^{k}")


def product_ring(A: FiniteAlgebra, B: FiniteAlgebra, name: str = "") -> FiniteAlgebra:
    ra, rb = A.ngens, B.ngens
    orders = A.orders + B.orders
    zero = [0] * (ra + rb)

    def emb_a(v):
        return list(v) + [0] * rb

    def emb_b(v):
        return [0] * ra + list(v)

    mul = [[None] * (ra + rb) for _ in range(ra + rb)]
    for i in range(ra + rb):
        for j in range(ra + rb):
            if i < ra and j < ra:
                mul[i][j] = emb_a(A.mul[i][j])
            elif i >= ra and j >= ra:
                mul[i][j] = emb_b(B.mul[i - ra][j - ra])
            else:
                mul[i][j] = zero[:]
    unit = emb_a(A.unit)
    for t in range(rb):
        unit[ra + t] = B.unit[t]
    return FiniteAlgebra(orders, mul, unit, name or f"{A.name} x {B.name}")


# ---------------------------------------------------------------------------
# algebra maps
# ---------------------------------------------------------------------------

class AlgebraMap:
    """Ring homomorphism given by generator images; verified on construction."""

    def __init__(self, source: FiniteAlgebra, target: FiniteAlgebra,
                 images: Sequence[Sequence[int]], check: bool = True):
        self.source = source
        self.target = target
        self.images: tuple[Vec, ...] = tuple(
            normalize_vector(v, target.orders) for v in images)
        if len(self.images) != source.ngens:
            raise ValueError("one image per source generator required")
        if check:
            self._verify()

    def matrix(self) -> IntMatrix:
        return IntMatrix.from_columns([list(v) for v in self.images],
                                      dim=self.target.ngens)

    def apply(self, a: Vec) -> Vec:
        out = [0] * self.target.ngens
        for i, ai in enumerate(a):
            if ai:
                for t in range(self.target.ngens):
                    out[t] += ai * self.images[i][t]
        return normalize_vector(out, self.target.orders)

    def _verify(self):
        src, tgt = self.source, self.target
        for i in range(src.ngens):
            o = src.orders[i]
            if o and vscale(o, self.images[i], tgt.orders) != tgt.zero():
                raise IllDefined(i, i)
        if self.apply(src.unit) != tgt.unit:
            raise NotUnital(-1)
        for i in range(src.ngens):
            for j in range(src.ngens):
                lhs = self.apply(src.mul[i][j])
                rhs = tgt.mul_elems(self.images[i], self.images[j])
                if lhs != rhs:
                    raise NotAssociative(i, j, -1)

    def is_surjective(self) -> bool:
        mat = self.matrix()
        for t in range(self.target.ngens):
            e = [1 if k == t else 0 for k in range(self.target.ngens)]
            if solve_with_orders(mat, e, self.target.orders) is None:
                return False
        return True

    @staticmethod
    def identity(A: FiniteAlgebra) -> "AlgebraMap":
        return AlgebraMap(A, A, [A.gen(i) for i in range(A.ngens)], check=False)

    def compose(self, inner: "AlgebraMap") -> "AlgebraMap":
        """self o inner."""
        if inner.target is not self.source:
            raise ValueError("composition mismatch")
        return AlgebraMap(inner.source, self.target,
                          [self.apply(v) for v in inner.images], check=False)


# ---------------------------------------------------------------------------
# bimodules
# ---------------------------------------------------------------------------

class Bimodule:
    """(A,B)-bimodule on additive generators with action structure constants.

    left[p][j] = coordinates of a_p . m_j, right[j][q] = coordinates of
    m_j . b_q.  Both actions are verified to be well defined, unital,
    associative, and mutually commuting, all on generators.
    """

    def __init__(self, left_algebra: FiniteAlgebra, right_algebra: FiniteAlgebra,
                 orders: Sequence[int], left: Sequence[Sequence[Sequence[int]]],
                 right: Sequence[Sequence[Sequence[int]]], name: str = "",
                 check: bool = True):
        self.left_algebra = left_algebra
        self.right_algebra = right_algebra
        self.orders: Vec = tuple(int(o) for o in orders)
        t = len(self.orders)
        self.left = tuple(tuple(normalize_vector(left[p][j], self.orders)
                                for j in range(t))
                          for p in range(left_algebra.ngens))
        self.right = tuple(tuple(normalize_vector(right[j][q], self.orders)
                                 for q in range(right_algebra.ngens))
                           for j in range(t))
        self.name = name or f"bimod{self.orders}"
        if check:
            self._verify()

    @property
    def ngens(self) -> int:
        return len(self.orders)

    def zero(self) -> Vec:
        return vzero(self.orders)

    def gen(self, j: int) -> Vec:
        return tuple(1 if k == j else 0 for k in range(self.ngens))

    def left_gen_matrix(self, p: int) -> IntMatrix:
        return IntMatrix.from_columns([list(self.left[p][j]) for j in range(self.ngens)],
                                      dim=self.ngens)

    def right_gen_matrix(self, q: int) -> IntMatrix:
        return IntMatrix.from_columns([list(self.right[j][q]) for j in range(self.ngens)],
                                      dim=self.ngens)

    def act_left(self, a: Vec, m: Vec) -> Vec:
        out = [0] * self.ngens
        for p, ap in enumerate(a):
            if ap:
                col = self.left_gen_matrix(p).apply(list(m))
                for t in range(self.ngens):
                    out[t] += ap * col[t]
        return normalize_vector(out, self.orders)

    def act_right(self, m: Vec, b: Vec) -> Vec:
        out = [0] * self.ngens
        for q, bq in enumerate(b):
            if bq:
                col = self.right_gen_matrix(q).apply(list(m))
                for t in range(self.ngens):
                    out[t] += bq * col[t]
        return normalize_vector(out, self.orders)

    def left_act_matrix(self, a: Vec) -> IntMatrix:
        """Matrix of m |-> a.m on coordinates."""
        cols = [self.act_left(a, self.gen(j)) for j in range(self.ngens)]
        return IntMatrix.from_columns(cols, dim=self.ngens)

    def right_act_matrix(self, b: Vec) -> IntMatrix:
        cols = [self.act_right(self.gen(j), b) for j in range(self.ngens)]
        return IntMatrix.from_columns(cols, dim=self.ngens)

    def elements(self):
        return (tuple(v) for v in enumerate_vectors(self.orders))

    def size(self) -> Optional[int]:
        if any(o == 0 for o in self.orders):
            return None
        n = 1
        for o in self.orders:
            n *= o
        return n

    def _verify(self):
        A, B = self.left_algebra, self.right_algebra
        t = self.ngens
        for p in range(A.ngens):
            for j in range(t):
                v = self.left[p][j]
                if A.orders[p] and vscale(A.orders[p], v, self.orders) != self.zero():
                    raise IllDefined(p, j)
                if self.orders[j] and vscale(self.orders[j], v, self.orders) != self.zero():
                    raise IllDefined(p, j)
        for j in range(t):
            for q in range(B.ngens):
                v = self.right[j][q]
                if B.orders[q] and vscale(B.orders[q], v, self.orders) != self.zero():
                    raise IllDefined(j, q)
                if self.orders[j] and vscale(self.orders[j], v, self.orders) != self.zero():
                    raise IllDefined(j, q)
        for j in range(t):
            g = self.gen(j)
            if self.act_left(A.unit, g) != g:
                raise NotUnital(j)
            if self.act_right(g, B.unit) != g:
                raise NotUnital(j)
        for p in range(A.ngens):
            for q in range(A.ngens):
                prod = A.mul[p][q]
                for j in range(t):
                    lhs = self.act_left(prod, self.gen(j))
                    rhs = self.act_left(A.gen(p), self.left[q][j])
                    if lhs != rhs:
                        raise NotAssociative(p, q, j)
        for j in range(t):
            for p in range(B.ngens):
                for q in range(B.ngens):
                    prod = B.mul[p][q]
                    lhs = self.act_right(self.gen(j), prod)
                    rhs = self.act_right(self.right[j][p], B.gen(q))
                    if lhs != rhs:
                        raise NotAssociative(j, p, q)
        # left and right actions commute
        for p in range(A.ngens):
            for j in range(t):
                for q in range(B.ngens):
                    lhs = self.act_right(self.left[p][j], B.gen(q))
                    rhs = self.act_left(A.gen(p), self.right[j][q])
                    if lhs != rhs:
                        raise NotAssociative(p, j, q)

    def __repr__(self):
        return f"Bimodule({self.name}, orders={self.orders})"


def bimodule_from_tables(left_algebra, right_algebra, orders,
                         left_fn: Callable[[int, int], Sequence[int]],
                         right_fn: Callable[[int, int], Sequence[int]],
                         name: str = "") -> Bimodule:
    t = len(orders)
    left = [[left_fn(p, j) for j in range(t)] for p in range(left_algebra.ngens)]
    right = [[right_fn(j, q) for q in range(right_algebra.ngens)] for j in range(t)]
    return Bimodule(left_algebra, right_algebra, orders, left, right, name=name)


def algebra_as_bimodule(A: FiniteAlgebra) -> Bimodule:
    """A as an (A,A)-bimodule by multiplication."""
    return bimodule_from_tables(
        A, A, A.orders,
        lambda p, j: A.mul[p][j],
        lambda j, q: A.mul[j][q],
        name=f"{A.name} as bimodule")


# ---------------------------------------------------------------------------
# square-zero data
# ---------------------------------------------------------------------------

@dataclass
class SquareZeroDatum:
    """Verified surjection pi: R -> S with square-zero kernel J.

    J carries its induced (S,S)-bimodule structure; j_embed maps J
    coordinates to R coordinates; section is an element-wise preimage table
    for pi (element tables on purpose: pi need not admit an additive
    section, as Z/4 -> Z/2 shows).
    """

    R: FiniteAlgebra
    S: FiniteAlgebra
    pi: AlgebraMap
    J: Bimodule
    j_embed: IntMatrix
    section: dict[Vec, Vec]
    label: str = ""

    def section_of(self, s: Vec) -> Vec:
        return self.section[normalize_vector(s, self.S.orders)]

    def j_to_r(self, j: Vec) -> Vec:
        return normalize_vector(self.j_embed.apply(list(j)), self.R.orders)

    def r_to_j(self, r: Vec) -> Optional[Vec]:
        """Express an element of R lying in J in J-coordinates; None if outside."""
        sol = solve_with_orders(self.j_embed, list(r), self.R.orders)
        if sol is None:
            return None
        return normalize_vector(sol, self.J.orders)

    def verify(self):
        """Replay every datum invariant; raises on the first failure."""
        S, R, J = self.S, self.R, self.J
        if not self.pi.is_surjective():
            raise NotSurjective(self.label)
        for s, r in self.section.items():
            if self.pi.apply(r) != s:
                raise AlgebraCheckError("section does not split pi", s)
        if S.is_finite() and len(self.section) != S.size():
            raise AlgebraCheckError("section table incomplete")
        # J embeds in ker(pi) and J.J = 0, exhaustively
        jelems = [self.j_to_r(j) for j in J.elements()]
        for x in jelems:
            if self.pi.apply(x) != S.zero():
                raise AlgebraCheckError("J does not map into ker(pi)", x)
        for x in jelems:
            for y in jelems:
                if R.mul_elems(x, y) != R.zero():
                    raise KernelNotSquareZero((x, y))
        # bimodule actions agree with R-multiplication through the section
        for p in range(S.ngens):
            rp = self.section_of(S.gen(p))
            for t in range(J.ngens):
                jt = self.j_to_r(J.gen(t))
                if self.j_to_r(J.left[p][t]) != R.mul_elems(rp, jt):
                    raise AlgebraCheckError("left J-action mismatch", (p, t))
                if self.j_to_r(J.right[t][p]) != R.mul_elems(jt, rp):
                    raise AlgebraCheckError("right J-action mismatch", (t, p))

    def with_section_seed(self, seed: int) -> "SquareZeroDatum":
        """Same datum with preimages perturbed by seeded elements of J."""
        rng = random.Random(seed)
        jelems = [self.j_to_r(j) for j in self.J.elements()]
        section = {}
        for s, r in sorted(self.section.items()):
            section[s] = self.R.add(r, rng.choice(jelems))
        out = SquareZeroDatum(self.R, self.S, self.pi, self.J, self.j_embed,
                              section, label=self.label + f"@seed{seed}")
        out.verify()
        return out


def _kernel_generators(pi: AlgebraMap) -> Subquotient:
    mat = pi.matrix()
    gens = kernel_with_orders(mat, list(pi.target.orders),
                              col_orders=list(pi.source.orders))
    return Subquotient(pi.source.orders, gens, [])


def check_square_zero(pi: AlgebraMap, section: dict[Vec, Vec] | None = None,
                      label: str = "") -> SquareZeroDatum:
    """Verify pi is a square-zero extension and assemble the datum.

    Checks surjectivity and J*J = 0 (exhaustively, with witness on failure),
    equips J = ker(pi) with its (S,S)-actions through preimages, and fills
    in an element-wise section table if none is supplied.
    """
    R, S = pi.source, pi.target
    if not R.is_finite() or not S.is_finite():
        raise ValueError("square-zero data require finite rings")
    if not pi.is_surjective():
        raise NotSurjective(label or pi)
    ker = _kernel_generators(pi)
    jorders = ker.rep_orders
    j_embed = IntMatrix.from_columns([list(v) for v in ker.reps], dim=R.ngens)

    def to_j(rvec: Vec) -> Vec:
        sol = solve_with_orders(j_embed, list(rvec), R.orders)
        assert sol is not None, "kernel element escaped its own generators"
        return normalize_vector(sol, jorders)

    # exhaustive J*J = 0 with witness
    jelems_r = []
    for coeffs in enumerate_vectors(jorders):
        v = [0] * R.ngens
        for c, g in zip(coeffs, ker.reps):
            for t in range(R.ngens):
                v[t] += c * g[t]
        jelems_r.append(normalize_vector(v, R.orders))
    for x in jelems_r:
        for y in jelems_r:
            if R.mul_elems(x, y) != R.zero():
                raise KernelNotSquareZero((x, y))

    if section is None:
        section = {}
        mat = pi.matrix()
        for s in S.elements():
            pre = solve_with_orders(mat, list(s), S.orders)
            assert pre is not None  # surjectivity established above
            section[s] = normalize_vector(pre, R.orders)
    else:
        section = {normalize_vector(k, S.orders): normalize_vector(v, R.orders)
                   for k, v in section.items()}

    # induced S-actions on J via arbitrary preimages; independent of the
    # choice because J*J = 0
    jgens_r = [normalize_vector(v, R.orders) for v in ker.reps]

    def left_fn(p, t):
        return to_j(R.mul_elems(section[S.gen(p)], jgens_r[t]))

    def right_fn(t, q):
        return to_j(R.mul_elems(jgens_r[t], section[S.gen(q)]))

    J = bimodule_from_tables(S, S, jorders, left_fn, right_fn,
                             name=f"ker({R.name}->{S.name})")
    datum = SquareZeroDatum(R, S, pi, J, j_embed, section,
                            label=label or f"{R.name}->{S.name}")
    datum.verify()
    return datum


def split_square_zero(S: FiniteAlgebra, I: Bimodule, label: str = "") -> SquareZeroDatum:
    """The split extension R = S (+) I with (a,m)(a',m') = (aa', a.m' + m.a')."""
    if I.left_algebra is not S or I.right_algebra is not S:
        raise ValueError("I must be an (S,S)-bimodule")
    rs, ri = S.ngens, I.ngens
    orders = S.orders + I.orders

    def emb_s(v):
        return list(v) + [0] * ri

    def emb_i(v):
        return [0] * rs + list(v)

    mul = [[None] * (rs + ri) for _ in range(rs + ri)]
    for i in range(rs + ri):
        for j in range(rs + ri):
            if i < rs and j < rs:
                mul[i][j] = emb_s(S.mul[i][j])
            elif i < rs:
                mul[i][j] = emb_i(I.left[i][j - rs])
            elif j < rs:
                mul[i][j] = emb_i(I.right[i - rs][j])
            else:
                mul[i][j] = [0] * (rs + ri)
    R = FiniteAlgebra(orders, mul, emb_s(S.unit), name=f"{S.name}|x{I.name}")
    pi = AlgebraMap(R, S, [S.gen(i) for i in range(rs)] + [S.zero()] * ri)
    section = {s: tuple(emb_s(s)) for s in S.elements()}
    datum = check_square_zero(pi, section=section,
                              label=label or f"split({S.name};{I.name})")
    return datum


# ---------------------------------------------------------------------------
# cocycle-presented extensions
# ---------------------------------------------------------------------------

def _set_group_decomposition(elems: list, add: Callable, zero):
    """Greedy invariant-factor decomposition of a finite abelian set-group.

    Returns (generators, orders, coordinate map).  Picking a maximal-order
    element of the quotient at each step yields orders d_1 >= d_2 >= ...
    with d_(i+1) | d_i.
    """
    elems = sorted(elems)
    span = {zero}
    gens, orders = [], []
    while len(span) < len(elems):
        best, best_ord = None, 0
        for e in elems:
            if e in span:
                continue
            k, acc = 1, e
            while acc not in span:
                acc = add(acc, e)
                k += 1
            if k > best_ord:
                best, best_ord = e, k
        gens.append(best)
        orders.append(best_ord)
        new_span = set()
        for s in span:
            acc = s
            for _ in range(best_ord):
                new_span.add(acc)
                acc = add(acc, best)
        span = new_span
    coord_of = {}
    for coeffs in itertools.product(*[range(o) for o in orders]):
        acc = zero
        for c, g in zip(coeffs, gens):
            for _ in range(c):
                acc = add(acc, g)
        coord_of.setdefault(acc, tuple(coeffs))
    assert len(coord_of) == len(elems), "generator decomposition not bijective"
    return gens, orders, coord_of


def extension_from_cocycle(S: FiniteAlgebra, I: Bimodule, f, f_add=None,
                           label: str = "") -> SquareZeroDatum:
    """Square-zero extension presented by a normalized 2-cochain table.

    f is a table on element pairs of S with values in I, twisting both the
    addition and the multiplication of the underlying set S x I:

        (s,j) + (s',j') = (s+s', j+j'+f(s,s'))
        (s,j) * (s',j') = (ss', s.j' + j.s' + f(s,s'))

    Twisting the addition as well is what lets additively non-split
    extensions such as Z/4 -> Z/2 arise (f(1,1) = 1 there).  The table is
    accepted exactly when the resulting operations satisfy every ring axiom;
    the first failing instance is reported.  A zero row/column is required
    (NotNormalized); the unit is located by search, since a nonzero f(1,1)
    moves it off (1_S, 0).  A separate additive twist may be passed as
    f_add (section transport produces such pairs).
    """
    if I.left_algebra is not S or I.right_algebra is not S:
        raise ValueError("I must be an (S,S)-bimodule")
    if not S.is_finite() or any(o == 0 for o in I.orders):
        raise ValueError("cocycle extensions require finite S and I")

    def read_table(fn_or_map):
        table = {}
        for a in S.elements():
            for b in S.elements():
                v = fn_or_map(a, b) if callable(fn_or_map) else fn_or_map[(a, b)]
                table[(a, b)] = normalize_vector(v, I.orders)
        return table

    fmul = read_table(f)
    fadd = fmul if f_add is None else read_table(f_add)
    szero, izero = S.zero(), vzero(I.orders)
    for a in S.elements():
        for tab in (fmul, fadd):
            if tab[(a, szero)] != izero or tab[(szero, a)] != izero:
                raise NotNormalized(a)

    elems = [(tuple(s), tuple(j)) for s in S.elements()
             for j in enumerate_vectors(I.orders)]
    zero = (szero, izero)

    def eadd(x, y):
        (s, j), (s2, j2) = x, y
        return (S.add(s, s2), vadd(vadd(j, j2, I.orders), fadd[(s, s2)], I.orders))

    def emul(x, y):
        (s, j), (s2, j2) = x, y
        out = vadd(I.act_left(s, j2), I.act_right(j, s2), I.orders)
        return (S.mul_elems(s, s2), vadd(out, fmul[(s, s2)], I.orders))

    # precompute operation tables once; the axiom sweep is cubic in |S x I|
    add_t = {(x, y): eadd(x, y) for x in elems for y in elems}
    mul_t = {(x, y): emul(x, y) for x in elems for y in elems}

    for x in elems:
        for y in elems:
            if add_t[(x, y)] != add_t[(y, x)]:
                raise NotACocycle(("addition not commutative", x, y))
    for x in elems:
        for y in elems:
            xy_a, xy_m = add_t[(x, y)], mul_t[(x, y)]
            for z in elems:
                if add_t[(xy_a, z)] != add_t[(x, add_t[(y, z)])]:
                    raise NotACocycle(("addition not associative", x, y, z))
                if mul_t[(xy_m, z)] != mul_t[(x, mul_t[(y, z)])]:
                    raise NotACocycle(("multiplication not associative", x, y, z))
                if mul_t[(x, add_t[(y, z)])] != add_t[(mul_t[(x, y)], mul_t[(x, z)])]:
                    raise NotACocycle(("left distributivity fails", x, y, z))
                if mul_t[(xy_a, z)] != add_t[(mul_t[(x, z)], mul_t[(y, z)])]:
                    raise NotACocycle(("right distributivity fails", x, y, z))
    units = [u for u in elems
             if all(mul_t[(u, x)] == x and mul_t[(x, u)] == x for x in elems)]
    if len(units) != 1:
        raise NotACocycle(("unit missing or not unique", len(units)))
    unit = units[0]
    eadd = lambda x, y: add_t[(x, y)]  # noqa: E731  (decomposition uses the table)
    emul = lambda x, y: mul_t[(x, y)]  # noqa: E731

    gens, orders, coord_of = _set_group_decomposition(elems, eadd, zero)
    mul = [[coord_of[emul(gi, gj)] for gj in gens] for gi in gens]
    R = FiniteAlgebra(orders, mul, coord_of[unit],
                      name=f"{S.name}~{I.name}(cocycle)")

    # pi drops the twisted fiber coordinate; express on the chosen generators
    elem_of = {c: e for e, c in coord_of.items()}

    def pi_of(coords):
        return elem_of[coords][0]

    pi = AlgebraMap(R, S, [pi_of(tuple(1 if k == i else 0 for k in range(len(gens))))
                           for i in range(len(gens))])
    # the section s |-> (s, 0) is exact for pi by construction
    section = {s: coord_of[(s, izero)] for s in S.elements()}
    return check_square_zero(pi, section=section,
                             label=label or f"cocycle({S.name};{I.name})")


# ---------------------------------------------------------------------------
# brute-force ring isomorphism search (shared by tests and the oracle)
# ---------------------------------------------------------------------------

def find_ring_isomorphism(A: FiniteAlgebra, B: FiniteAlgebra,
                          budget: int = 2_000_000):
    """A ring isomorphism A -> B as a generator-image tuple, or None.

    Backtracks over additive generator images with matching additive orders,
    pruning on additivity, then checks unitality and multiplicativity.
    """
    if A.size() is None or B.size() is None or A.size() != B.size():
        return None
    belems = list(B.elements())
    cand = [[b for b in belems
             if element_additive_order(b, B.orders) == A.orders[i]]
            for i in range(A.ngens)]
    total = 1
    for c in cand:
        total *= max(1, len(c))
    if total > budget:
        raise ValueError("isomorphism search budget exceeded")

    bsize = B.size()

    def extend(images):
        # bijectivity on the additive level: injectivity on all of A suffices
        seen = set()
        for a in A.elements():
            out = [0] * B.ngens
            for i, ai in enumerate(a):
                for t in range(B.ngens):
                    out[t] += ai * images[i][t]
            img = normalize_vector(out, B.orders)
            if img in seen:
                return False
            seen.add(img)
        return len(seen) == bsize

    def apply(images, a):
        out = [0] * B.ngens
        for i, ai in enumerate(a):
            for t in range(B.ngens):
                out[t] += ai * images[i][t]
        return normalize_vector(out, B.orders)

    for images in itertools.product(*cand):
        if not extend(images):
            continue
        if apply(images, A.unit) != B.unit:
            continue
        ok = True
        for i in range(A.ngens):
            for j in range(A.ngens):
                if apply(images, A.mul[i][j]) != B.mul_elems(images[i], images[j]):
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return images
    return None
