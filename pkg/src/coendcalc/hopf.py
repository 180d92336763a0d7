"""Finite-dimensional Hopf algebras by structure constants, and their modules.

Presents the category C = H-mod concretely: algebras are multiplication /
comultiplication tensors over Q, modules are lists of action matrices, and
Hom-spaces are intertwiner solution spaces.  Everything is exact.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from .linalg import (
    Matrix,
    ZERO,
    ONE,
    kernel_basis,
    kronecker,
    inverse,
    solve,
    SpanAccumulator,
)


class AlgebraMismatchError(ValueError):
    """Operands live over different algebras."""


class StructureError(ValueError):
    """Structure constants violate a required axiom."""


def _frac_grid3(t):
    return [[[x if type(x) is Fraction else Fraction(x) for x in row] for row in face] for face in t]


def _frac_vec(v):
    return [x if type(x) is Fraction else Fraction(x) for x in v]


@dataclass(eq=False)
class AlgebraData:
    """A finite-dimensional associative unital algebra: e_i e_j = sum_k mult[i][j][k] e_k."""

    name: str
    dim: int
    mult: list
    unit: list

    def __post_init__(self):
        self.mult = _frac_grid3(self.mult)
        self.unit = _frac_vec(self.unit)
        self._mult_sparse = None

    def mult_sparse(self):
        """dict (i, j) -> {k: coeff} over nonzero products."""
        if self._mult_sparse is None:
            d = {}
            for i in range(self.dim):
                for j in range(self.dim):
                    row = {k: c for k, c in enumerate(self.mult[i][j]) if c}
                    if row:
                        d[(i, j)] = row
            self._mult_sparse = d
        return self._mult_sparse

    def mult_vec(self, a, b):
        """Product of two coefficient vectors."""
        out = [ZERO] * self.dim
        ms = self.mult_sparse()
        for i, ca in enumerate(a):
            if ca:
                for j, cb in enumerate(b):
                    if cb:
                        for k, c in ms.get((i, j), {}).items():
                            out[k] += ca * cb * c
        return out

    def left_mult_matrix(self, a) -> Matrix:
        """Matrix of x -> a x on coefficient vectors."""
        out = [[ZERO] * self.dim for _ in range(self.dim)]
        ms = self.mult_sparse()
        for i, ca in enumerate(a):
            if ca:
                for j in range(self.dim):
                    for k, c in ms.get((i, j), {}).items():
                        out[k][j] += ca * c
        return Matrix(self.dim, self.dim, out)

    def is_associative(self) -> bool:
        ms = self.mult_sparse()
        n = self.dim
        for i in range(n):
            for j in range(n):
                ij = ms.get((i, j), {})
                for l in range(n):
                    lhs = {}
                    for k, c in ij.items():
                        for p, c2 in ms.get((k, l), {}).items():
                            lhs[p] = lhs.get(p, ZERO) + c * c2
                    rhs = {}
                    for k, c in ms.get((j, l), {}).items():
                        for p, c2 in ms.get((i, k), {}).items():
                            rhs[p] = rhs.get(p, ZERO) + c * c2
                    if {k: v for k, v in lhs.items() if v} != {k: v for k, v in rhs.items() if v}:
                        return False
        return True

    def is_unital(self) -> bool:
        n = self.dim
        ident = Matrix.identity(n)
        u = self.unit
        for j in range(n):
            ej = [ONE if t == j else ZERO for t in range(n)]
            if self.mult_vec(u, ej) != ej or self.mult_vec(ej, u) != ej:
                return False
        del ident
        return True


@dataclass(eq=False)
class HopfAlgebraData(AlgebraData):
    """Hopf algebra structure constants; r_matrix and pivot are optional."""

    comult: list = None  # Delta(e_i) = sum comult[i][j][k] e_j (x) e_k
    counit: list = None
    antipode: Matrix = None  # S(e_i) = column i
    basis: list = None  # labels
    r_matrix: list = None  # length dim^2, coeff of e_i (x) e_j at i*dim + j
    pivot: list = None

    def __post_init__(self):
        super().__post_init__()
        self.comult = _frac_grid3(self.comult)
        self.counit = _frac_vec(self.counit)
        if not isinstance(self.antipode, Matrix):
            self.antipode = Matrix.from_rows(self.antipode)
        if self.basis is None:
            self.basis = ["e%d" % i for i in range(self.dim)]
        if self.r_matrix is not None:
            self.r_matrix = _frac_vec(self.r_matrix)
        if self.pivot is not None:
            self.pivot = _frac_vec(self.pivot)
        self._comult_sparse = None
        self._pivot_inverse = None

    def comult_sparse(self):
        """dict i -> {(j, k): coeff}."""
        if self._comult_sparse is None:
            d = {}
            for i in range(self.dim):
                terms = {}
                for j in range(self.dim):
                    for k, c in enumerate(self.comult[i][j]):
                        if c:
                            terms[(j, k)] = c
                d[i] = terms
            self._comult_sparse = d
        return self._comult_sparse

    def comult_vec(self, v):
        """Sparse dict (j, k) -> coeff for Delta(v)."""
        cs = self.comult_sparse()
        out = {}
        for i, c in enumerate(v):
            if c:
                for jk, c2 in cs[i].items():
                    nv = out.get(jk, ZERO) + c * c2
                    if nv:
                        out[jk] = nv
                    else:
                        out.pop(jk, None)
        return out

    def iterated_comult_vec(self, v, legs: int):
        """Delta^(legs-1)(v) as a sparse dict tuple -> coeff."""
        assert legs >= 1
        out = {(i,): c for i, c in enumerate(v) if c}
        cs = self.comult_sparse()
        while len(next(iter(out), ())) < legs:
            nxt = {}
            for key, c in out.items():
                last = key[-1]
                for (j, k), c2 in cs[last].items():
                    nk = key[:-1] + (j, k)
                    nv = nxt.get(nk, ZERO) + c * c2
                    if nv:
                        nxt[nk] = nv
                    else:
                        nxt.pop(nk, None)
            out = nxt
        return out

    def counit_vec(self, v) -> Fraction:
        return sum((c * self.counit[i] for i, c in enumerate(v) if c), ZERO)

    def antipode_vec(self, v):
        return (self.antipode * Matrix.column(v)).col(0)

    def r_sparse(self):
        assert self.r_matrix is not None
        n = self.dim
        return {
            (i, j): c
            for (i, j) in itertools.product(range(n), range(n))
            if (c := self.r_matrix[i * n + j])
        }

    def pivot_inverse(self):
        if self._pivot_inverse is None:
            assert self.pivot is not None
            L = self.left_mult_matrix(self.pivot)
            X = solve(L, Matrix.column(self.unit))
            if X is None:
                raise StructureError("pivot element is not invertible")
            self._pivot_inverse = X.col(0)
        return self._pivot_inverse

    def unit_element_index(self):
        """Index i when the unit is a single basis vector e_i, else None."""
        hits = [i for i, c in enumerate(self.unit) if c]
        if len(hits) == 1 and self.unit[hits[0]] == ONE:
            return hits[0]
        return None

    def drinfeld_element(self):
        """u = sum S(R2) R1; implements the square of the antipode."""
        assert self.r_matrix is not None
        u = [ZERO] * self.dim
        for (i, j), c in self.r_sparse().items():
            prod = self.mult_vec(self.antipode.col(j), [ONE if t == i else ZERO for t in range(self.dim)])
            for t, v in enumerate(prod):
                u[t] += c * v
        return u

    def ribbon_element(self):
        """v = u g^{-1} with g the pivot; the twist of the ribbon structure."""
        assert self.r_matrix is not None and self.pivot is not None
        return self.mult_vec(self.drinfeld_element(), self.pivot_inverse())


# ---------------------------------------------------------------------------
# axiom checking

@dataclass
class AxiomReport:
    algebra: str
    entries: list  # (axiom name, bool)

    @property
    def passed(self) -> bool:
        return all(ok for _, ok in self.entries)

    def failures(self):
        return [name for name, ok in self.entries if not ok]


def _tensor_mult(alg: AlgebraData, x: dict, y: dict) -> dict:
    """Componentwise product of sparse elements of H^(x)m."""
    ms = alg.mult_sparse()
    out = {}

    def leg_products(a, b):
        return ms.get((a, b), {})

    for ka, ca in x.items():
        for kb, cb in y.items():
            partial = [({}, ca * cb)]
            terms = [(ka[i], kb[i]) for i in range(len(ka))]
            # expand leg by leg
            acc = {(): ca * cb}
            for (a, b) in terms:
                nxt = {}
                prods = leg_products(a, b)
                if not prods:
                    acc = {}
                    break
                for key, c in acc.items():
                    for r, cr in prods.items():
                        nk = key + (r,)
                        nv = nxt.get(nk, ZERO) + c * cr
                        if nv:
                            nxt[nk] = nv
                        else:
                            nxt.pop(nk, None)
                acc = nxt
            for key, c in acc.items():
                nv = out.get(key, ZERO) + c
                if nv:
                    out[key] = nv
                else:
                    out.pop(key, None)
            del partial
    return out


def _unit_tensor(alg: AlgebraData, legs: int) -> dict:
    out = {(): ONE}
    for _ in range(legs):
        nxt = {}
        for key, c in out.items():
            for i, u in enumerate(alg.unit):
                if u:
                    nxt[key + (i,)] = c * u
        out = nxt
    return out


def check_axioms(h: HopfAlgebraData) -> AxiomReport:
    """Exact pass/fail for every Hopf (and quasitriangular / pivotal) axiom."""
    entries = []
    n = h.dim
    cs = h.comult_sparse()

    entries.append(("associativity", h.is_associative()))
    entries.append(("unit", h.is_unital()))

    ok = True
    for i in range(n):
        lhs, rhs = {}, {}
        for (j, k), c in cs[i].items():
            for (a, b), c2 in cs[j].items():
                key = (a, b, k)
                lhs[key] = lhs.get(key, ZERO) + c * c2
            for (a, b), c2 in cs[k].items():
                key = (j, a, b)
                rhs[key] = rhs.get(key, ZERO) + c * c2
        if {k: v for k, v in lhs.items() if v} != {k: v for k, v in rhs.items() if v}:
            ok = False
            break
    entries.append(("coassociativity", ok))

    ok = True
    for i in range(n):
        left = [ZERO] * n
        right = [ZERO] * n
        for (j, k), c in cs[i].items():
            left[k] += c * h.counit[j]
            right[j] += c * h.counit[k]
        target = [ONE if t == i else ZERO for t in range(n)]
        if left != target or right != target:
            ok = False
            break
    entries.append(("counit", ok))

    ms = h.mult_sparse()
    ok = True
    for i in range(n):
        for j in range(n):
            lhs = {}
            for k, c in ms.get((i, j), {}).items():
                for key, c2 in cs[k].items():
                    lhs[key] = lhs.get(key, ZERO) + c * c2
            rhs = {}
            for (a, b), c1 in cs[i].items():
                for (p, q), c2 in cs[j].items():
                    for r, c3 in ms.get((a, p), {}).items():
                        for s, c4 in ms.get((b, q), {}).items():
                            key = (r, s)
                            rhs[key] = rhs.get(key, ZERO) + c1 * c2 * c3 * c4
            if {k: v for k, v in lhs.items() if v} != {k: v for k, v in rhs.items() if v}:
                ok = False
                break
        if not ok:
            break
    entries.append(("comult_is_algebra_map", ok))

    du = h.comult_vec(h.unit)
    uu = {(i, j): a * b for i, a in enumerate(h.unit) if a for j, b in enumerate(h.unit) if b}
    ok = du == uu
    ok = ok and h.counit_vec(h.unit) == ONE
    eps_mult = True
    for i in range(n):
        for j in range(n):
            lhs = sum((c * h.counit[k] for k, c in ms.get((i, j), {}).items()), ZERO)
            if lhs != h.counit[i] * h.counit[j]:
                eps_mult = False
                break
        if not eps_mult:
            break
    entries.append(("counit_and_unit_compatibility", ok and eps_mult))

    ok = True
    for i in range(n):
        left = [ZERO] * n
        right = [ZERO] * n
        for (j, k), c in cs[i].items():
            sj = h.antipode.col(j)
            ek = [ONE if t == k else ZERO for t in range(n)]
            for t, v in enumerate(h.mult_vec(sj, ek)):
                left[t] += c * v
            sk = h.antipode.col(k)
            ej = [ONE if t == j else ZERO for t in range(n)]
            for t, v in enumerate(h.mult_vec(ej, sk)):
                right[t] += c * v
        target = [h.counit[i] * u for u in h.unit]
        if left != target or right != target:
            ok = False
            break
    entries.append(("antipode", ok))

    if h.r_matrix is not None:
        R = {k: v for k, v in h.r_sparse().items()}
        # invertibility: solve (left multiplication by R) x = 1 (x) 1
        n2 = n * n
        M = [[ZERO] * n2 for _ in range(n2)]
        for (a, b), c in R.items():
            for p in range(n):
                for r, cr in ms.get((a, p), {}).items():
                    for q in range(n):
                        for s, cq in ms.get((b, q), {}).items():
                            M[r * n + s][p * n + q] += c * cr * cq
        unit2 = _unit_tensor(h, 2)
        rhsv = [ZERO] * n2
        for (i, j), c in unit2.items():
            rhsv[i * n + j] = c
        X = solve(Matrix(n2, n2, M), Matrix.column(rhsv))
        r_inv_ok = False
        if X is not None:
            rinv = {(i // n, i % n): c for i, c in enumerate(X.col(0)) if c}
            r_inv_ok = _tensor_mult(h, rinv, R) == unit2
        entries.append(("r_invertible", r_inv_ok))

        ok = True
        for t in range(n):
            delta = {k: v for k, v in cs[t].items()}
            delta_op = {(b, a): v for (a, b), v in delta.items()}
            if _tensor_mult(h, delta_op, R) != _tensor_mult(h, R, delta):
                ok = False
                break
        entries.append(("r_intertwines_coproduct", ok))

        lhs = {}
        for (i, j), c in R.items():
            for (a, b), c2 in cs[i].items():
                key = (a, b, j)
                lhs[key] = lhs.get(key, ZERO) + c * c2
        lhs = {k: v for k, v in lhs.items() if v}
        r13 = {}
        r23 = {}
        for (i, j), c in R.items():
            for u, cu in enumerate(h.unit):
                if cu:
                    r13[(i, u, j)] = c * cu
                    r23[(u, i, j)] = c * cu
        entries.append(("r_hexagon_1", lhs == _tensor_mult(h, r13, r23)))

        lhs = {}
        for (i, j), c in R.items():
            for (a, b), c2 in cs[j].items():
                key = (i, a, b)
                lhs[key] = lhs.get(key, ZERO) + c * c2
        lhs = {k: v for k, v in lhs.items() if v}
        r12 = {}
        for (i, j), c in R.items():
            for u, cu in enumerate(h.unit):
                if cu:
                    r12[(i, j, u)] = c * cu
        entries.append(("r_hexagon_2", lhs == _tensor_mult(h, r13, r12)))

    if h.pivot is not None:
        g = h.pivot
        dg = h.comult_vec(g)
        gg = {
            (i, j): a * b
            for i, a in enumerate(g)
            if a
            for j, b in enumerate(g)
            if b
        }
        grouplike = dg == gg and h.counit_vec(g) == ONE
        entries.append(("pivot_grouplike", grouplike))
        try:
            ginv = h.pivot_inverse()
            entries.append(("pivot_invertible", True))
        except StructureError:
            ginv = None
            entries.append(("pivot_invertible", False))
        if ginv is not None:
            ok = True
            for t in range(n):
                et = [ONE if s == t else ZERO for s in range(n)]
                s2 = h.antipode_vec(h.antipode_vec(et))
                conj = h.mult_vec(h.mult_vec(g, et), ginv)
                if s2 != conj:
                    ok = False
                    break
            entries.append(("pivot_implements_antipode_square", ok))

    if h.r_matrix is not None and h.pivot is not None:
        v = h.ribbon_element()
        central = all(
            h.mult_vec(v, [ONE if s == t else ZERO for s in range(n)])
            == h.mult_vec([ONE if s == t else ZERO for s in range(n)], v)
            for t in range(n)
        )
        s_fixed = h.antipode_vec(v) == v
        eps_one = h.counit_vec(v) == ONE
        # Delta(v) (R21 R) = v (x) v
        R = h.r_sparse()
        r21 = {(j, i): c for (i, j), c in R.items()}
        mono = _tensor_mult(h, r21, R)
        dv = h.comult_vec(v)
        lhs = _tensor_mult(h, dv, mono)
        vv = {
            (i, j): a * b
            for i, a in enumerate(v)
            if a
            for j, b in enumerate(v)
            if b
        }
        entries.append(("ribbon_element", central and s_fixed and eps_one and lhs == vv))

    return AxiomReport(h.name, entries)


# ---------------------------------------------------------------------------
# modules

@dataclass(eq=False)
class ModuleRep:
    """A finite-dimensional module: action[i] is the matrix of e_i."""

    algebra: HopfAlgebraData
    dim: int
    action: list
    name: str = ""

    def act(self, v) -> Matrix:
        out = Matrix.zeros(self.dim, self.dim)
        for i, c in enumerate(v):
            if c:
                out = out + self.action[i].scale(c)
        return out

    def check(self) -> bool:
        alg = self.algebra
        if self.act(alg.unit) != Matrix.identity(self.dim):
            return False
        ms = alg.mult_sparse()
        for i in range(alg.dim):
            for j in range(alg.dim):
                prod = self.action[i] * self.action[j]
                expect = Matrix.zeros(self.dim, self.dim)
                for k, c in ms.get((i, j), {}).items():
                    expect = expect + self.action[k].scale(c)
                if prod != expect:
                    return False
        return True

    def same_as(self, other: "ModuleRep") -> bool:
        return (
            self.dim == other.dim
            and self.algebra is other.algebra
            and all(a == b for a, b in zip(self.action, other.action))
        )

    def __repr__(self):
        return "ModuleRep(%s, dim=%d)" % (self.name or "?", self.dim)


def trivial_module(h: HopfAlgebraData) -> ModuleRep:
    return ModuleRep(h, 1, [Matrix(1, 1, [[h.counit[i]]]) for i in range(h.dim)], "triv")


def regular_module(h: HopfAlgebraData) -> ModuleRep:
    mats = []
    ms = h.mult_sparse()
    for i in range(h.dim):
        m = [[ZERO] * h.dim for _ in range(h.dim)]
        for j in range(h.dim):
            for k, c in ms.get((i, j), {}).items():
                m[k][j] = c
        mats.append(Matrix(h.dim, h.dim, m))
    return ModuleRep(h, h.dim, mats, "reg")


def free_module(h: HopfAlgebraData, d: int, name: str = "") -> ModuleRep:
    """Only sensible over the ground field: d copies of the trivial action."""
    triv = trivial_module(h)
    mats = [kronecker(triv.action[i], Matrix.identity(d)) for i in range(h.dim)]
    return ModuleRep(h, d, mats, name or "k%d" % d)


def tensor_module(m: ModuleRep, n: ModuleRep) -> ModuleRep:
    if m.algebra is not n.algebra:
        raise AlgebraMismatchError("tensor of modules over different algebras")
    h = m.algebra
    cs = h.comult_sparse()
    mats = []
    for i in range(h.dim):
        acc = Matrix.zeros(m.dim * n.dim, m.dim * n.dim)
        for (j, k), c in cs[i].items():
            acc = acc + kronecker(m.action[j], n.action[k]).scale(c)
        mats.append(acc)
    name = "(%s(x)%s)" % (m.name or "?", n.name or "?")
    return ModuleRep(h, m.dim * n.dim, mats, name)


def tensor_chain(h: HopfAlgebraData, factors) -> ModuleRep:
    """Right-associated tensor product; empty chain is the trivial module."""
    factors = list(factors)
    if not factors:
        return trivial_module(h)
    out = factors[0]
    for f in factors[1:]:
        out = tensor_module(out, f)
    return out


def dual_module(m: ModuleRep) -> ModuleRep:
    h = m.algebra
    mats = []
    for i in range(h.dim):
        s = h.antipode.col(i)
        acc = Matrix.zeros(m.dim, m.dim)
        for j, c in enumerate(s):
            if c:
                acc = acc + m.action[j].scale(c)
        mats.append(acc.transpose())
    return ModuleRep(h, m.dim, mats, (m.name or "?") + "^")


def direct_sum_module(m: ModuleRep, n: ModuleRep) -> ModuleRep:
    if m.algebra is not n.algebra:
        raise AlgebraMismatchError("direct sum over different algebras")
    mats = []
    for i in range(m.algebra.dim):
        a, b = m.action[i], n.action[i]
        grid = [[ZERO] * (m.dim + n.dim) for _ in range(m.dim + n.dim)]
        for r in range(m.dim):
            for c in range(m.dim):
                grid[r][c] = a.data[r][c]
        for r in range(n.dim):
            for c in range(n.dim):
                grid[m.dim + r][m.dim + c] = b.data[r][c]
        mats.append(Matrix(m.dim + n.dim, m.dim + n.dim, grid))
    return ModuleRep(m.algebra, m.dim + n.dim, mats, "(%s(+)%s)" % (m.name, n.name))


def submodule_from_basis(m: ModuleRep, basis: Matrix, name: str = "") -> ModuleRep:
    """Restrict the action to the span of the given independent columns."""
    mats = []
    for i in range(m.algebra.dim):
        im = m.action[i] * basis
        coords = solve(basis, im)
        if coords is None or basis * coords != im:
            raise StructureError("given basis does not span an invariant subspace")
        mats.append(coords)
    return ModuleRep(m.algebra, basis.cols, mats, name)


def cyclic_submodule(m: ModuleRep, vec, name: str = "") -> ModuleRep:
    """Submodule generated by one vector, with the canonical RREF basis."""
    acc = SpanAccumulator(m.dim)
    frontier = [_frac_vec(vec)]
    acc.add({i: c for i, c in enumerate(frontier[0]) if c})
    while frontier:
        nxt = []
        for v in frontier:
            col = Matrix.column(v)
            for a in m.action:
                w = (a * col).col(0)
                if acc.add({i: c for i, c in enumerate(w) if c}):
                    nxt.append(w)
        frontier = nxt
    pivots = acc.pivots()
    cols = []
    for p in pivots:
        row = acc.rows[p]
        cols.append([row.get(i, ZERO) for i in range(m.dim)])
    basis = Matrix.from_rows(cols).transpose()
    return submodule_from_basis(m, basis, name)


# ---------------------------------------------------------------------------
# intertwiners

@dataclass(eq=False)
class IntertwinerSpace:
    """Basis of Hom(source, target) inside the matrix space."""

    source: ModuleRep
    target: ModuleRep
    basis: list  # list of target.dim x source.dim matrices

    def __post_init__(self):
        self._basis_matrix = None
        self._coordinatizer = None

    @property
    def dim(self) -> int:
        return len(self.basis)

    def basis_matrix(self) -> Matrix:
        """Columns are row-major vectorized basis elements."""
        if self._basis_matrix is None:
            N = self.target.dim * self.source.dim
            data = [[ZERO] * self.dim for _ in range(N)]
            for a, X in enumerate(self.basis):
                for r in range(X.rows):
                    for c in range(X.cols):
                        v = X.data[r][c]
                        if v:
                            data[r * X.cols + c][a] = v
            self._basis_matrix = Matrix(N, self.dim, data)
        return self._basis_matrix

    def coordinatizer(self) -> Matrix:
        if self._coordinatizer is None:
            B = self.basis_matrix()
            Ct = solve(B.transpose(), Matrix.identity(self.dim))
            assert Ct is not None, "intertwiner basis is not independent"
            self._coordinatizer = Ct.transpose()
        return self._coordinatizer

    def coords(self, mat: Matrix) -> Matrix:
        """Column of coordinates; raises when mat is outside the span."""
        v = Matrix.column([mat.data[r][c] for r in range(mat.rows) for c in range(mat.cols)])
        out = self.coordinatizer() * v
        if self.basis_matrix() * out != v:
            raise ValueError("matrix is not in the intertwiner span")
        return out

    def from_coords(self, col: Matrix) -> Matrix:
        acc = Matrix.zeros(self.target.dim, self.source.dim)
        for a, X in enumerate(self.basis):
            c = col.data[a][0]
            if c:
                acc = acc + X.scale(c)
        return acc


def hom_space(m: ModuleRep, n: ModuleRep) -> IntertwinerSpace:
    """All X with X rho_m(a) = rho_n(a) X, by iterated kernel intersection."""
    if m.algebra is not n.algebra:
        raise AlgebraMismatchError("hom between modules over different algebras")
    dm, dn = m.dim, n.dim
    K = Matrix.identity(dn * dm)
    Idm = Matrix.identity(dm)
    Idn = Matrix.identity(dn)
    for i in range(m.algebra.dim):
        L = kronecker(n.action[i], Idm) - kronecker(Idn, m.action[i].transpose())
        M = L * K
        if M.is_zero():
            continue
        kb = kernel_basis(M)
        if kb.cols == K.cols:
            continue
        K = K * kb
        if K.cols == 0:
            break
    basis = []
    for j in range(K.cols):
        v = K.col(j)
        basis.append(Matrix(dn, dm, [[v[r * dm + c] for c in range(dm)] for r in range(dn)]))
    return IntertwinerSpace(m, n, basis)


# ---------------------------------------------------------------------------
# rigid / braided structure

def flip_matrix(dm: int, dn: int) -> Matrix:
    """m (x) n -> n (x) m on basis vectors."""
    out = [[ZERO] * (dm * dn) for _ in range(dm * dn)]
    for a in range(dm):
        for b in range(dn):
            out[b * dm + a][a * dn + b] = ONE
    return Matrix(dm * dn, dm * dn, out)


class MissingRMatrixError(ValueError):
    pass


class MissingPivotError(ValueError):
    pass


def braiding(m: ModuleRep, n: ModuleRep) -> Matrix:
    """c_{m,n}: m (x) n -> n (x) m, the flip after acting with R."""
    h = m.algebra
    if h.r_matrix is None:
        raise MissingRMatrixError("algebra %s carries no R-matrix" % h.name)
    acc = Matrix.zeros(m.dim * n.dim, m.dim * n.dim)
    for (i, j), c in h.r_sparse().items():
        acc = acc + kronecker(m.action[i], n.action[j]).scale(c)
    return flip_matrix(m.dim, n.dim) * acc


def braiding_inverse(m: ModuleRep, n: ModuleRep) -> Matrix:
    inv = inverse(braiding(m, n))
    assert inv is not None, "braiding is not invertible"
    return inv


def evaluation(m: ModuleRep) -> Matrix:
    """d_m: m_dual (x) m -> triv."""
    d = m.dim
    row = [ZERO] * (d * d)
    for i in range(d):
        row[i * d + i] = ONE
    return Matrix(1, d * d, [row])


def coevaluation(m: ModuleRep) -> Matrix:
    """b_m: triv -> m (x) m_dual."""
    d = m.dim
    col = [[ZERO] for _ in range(d * d)]
    for i in range(d):
        col[i * d + i][0] = ONE
    return Matrix(d * d, 1, col)


def pivot_action(m: ModuleRep) -> Matrix:
    h = m.algebra
    if h.pivot is None:
        raise MissingPivotError("algebra %s carries no pivot" % h.name)
    return m.act(h.pivot)


def pivot_action_inverse(m: ModuleRep) -> Matrix:
    h = m.algebra
    if h.pivot is None:
        raise MissingPivotError("algebra %s carries no pivot" % h.name)
    return m.act(h.pivot_inverse())


def pivot_iso(m: ModuleRep) -> Matrix:
    """pi_m: m -> m_dual_dual (double transpose carrier), the pivot action."""
    return pivot_action(m)


def pivot_evaluation(m: ModuleRep) -> Matrix:
    """ev'_m: m (x) m_dual -> triv, v (x) phi -> phi(g v)."""
    g = pivot_action(m)
    d = m.dim
    row = [ZERO] * (d * d)
    for j in range(d):
        for i in range(d):
            v = g.data[i][j]
            if v:
                row[j * d + i] = v
    return Matrix(1, d * d, [row])


def pivot_coevaluation(m: ModuleRep) -> Matrix:
    """coev'_m: triv -> m_dual (x) m, 1 -> sum e^i (x) g^-1 e_i."""
    gi = pivot_action_inverse(m)
    d = m.dim
    col = [[ZERO] for _ in range(d * d)]
    for i in range(d):
        for j in range(d):
            v = gi.data[j][i]
            if v:
                col[i * d + j][0] = v
    return Matrix(d * d, 1, col)


def dual_morphism(f: Matrix) -> Matrix:
    """f_dual: b_dual -> a_dual for f: a -> b; the transpose."""
    return f.transpose()


def tensor_dual_flip(da: int, db: int) -> Matrix:
    """(a (x) b)_dual -> b_dual (x) a_dual, the canonical index flip."""
    return flip_matrix(da, db)


# ---------------------------------------------------------------------------
# groups and the Drinfeld double

def cyclic_group_table(n: int):
    return [[(i + j) % n for j in range(n)] for i in range(n)]


def symmetric_group_table(n: int):
    perms = sorted(itertools.permutations(range(n)))
    index = {p: i for i, p in enumerate(perms)}
    table = []
    for p in perms:
        row = []
        for q in perms:
            comp = tuple(p[q[i]] for i in range(n))
            row.append(index[comp])
        table.append(row)
    return table


class InvalidGroupTableError(ValueError):
    pass


def _validate_group_table(table):
    n = len(table)
    if n == 0 or any(len(row) != n for row in table):
        raise InvalidGroupTableError("table is not square")
    if any(x not in range(n) for row in table for x in row):
        raise InvalidGroupTableError("entries outside 0..n-1")
    ident = None
    for e in range(n):
        if all(table[e][j] == j and table[j][e] == j for j in range(n)):
            ident = e
            break
    if ident is None:
        raise InvalidGroupTableError("no identity element")
    inv = [None] * n
    for i in range(n):
        for j in range(n):
            if table[i][j] == ident and table[j][i] == ident:
                inv[i] = j
                break
        if inv[i] is None:
            raise InvalidGroupTableError("element %d has no inverse" % i)
    for i in range(n):
        for j in range(n):
            for k in range(n):
                if table[table[i][j]][k] != table[i][table[j][k]]:
                    raise InvalidGroupTableError("table is not associative")
    return ident, inv


def group_algebra(table, name: str, labels=None, with_r: bool = True) -> HopfAlgebraData:
    """k[G] with Delta(g) = g (x) g; R = 1 (x) 1 and pivot 1 when requested."""
    ident, inv = _validate_group_table(table)
    n = len(table)
    mult = [[[ONE if table[i][j] == k else ZERO for k in range(n)] for j in range(n)] for i in range(n)]
    unit = [ONE if i == ident else ZERO for i in range(n)]
    comult = [
        [[ONE if (j == i and k == i) else ZERO for k in range(n)] for j in range(n)]
        for i in range(n)
    ]
    counit = [ONE] * n
    antipode = Matrix.from_rows(
        [[ONE if inv[j] == i else ZERO for j in range(n)] for i in range(n)]
    )
    r = None
    if with_r:
        r = [ZERO] * (n * n)
        r[ident * n + ident] = ONE
    return HopfAlgebraData(
        name=name,
        dim=n,
        mult=mult,
        unit=unit,
        comult=comult,
        counit=counit,
        antipode=antipode,
        basis=labels or ["g%d" % i for i in range(n)],
        r_matrix=r,
        pivot=list(unit),
    )


def double(table, name: str = "") -> HopfAlgebraData:
    """Drinfeld double D(k[G]) on basis e_a (x) h, with its canonical R and pivot."""
    ident, inv = _validate_group_table(table)
    n = len(table)
    N = n * n

    def idx(a, h):
        return a * n + h

    mult = [[[ZERO] * N for _ in range(N)] for _ in range(N)]
    for a in range(n):
        for h in range(n):
            for b in range(n):
                for k in range(n):
                    if a == table[table[h][b]][inv[h]]:
                        mult[idx(a, h)][idx(b, k)][idx(a, table[h][k])] = ONE
    unit = [ZERO] * N
    for a in range(n):
        unit[idx(a, ident)] = ONE
    comult = [[[ZERO] * N for _ in range(N)] for _ in range(N)]
    for a in range(n):
        for h in range(n):
            for a1 in range(n):
                for a2 in range(n):
                    if table[a1][a2] == a:
                        comult[idx(a, h)][idx(a1, h)][idx(a2, h)] += ONE
    counit = [ONE if a == ident else ZERO for a in range(n) for _ in [0]] and [
        ONE if (i // n) == ident else ZERO for i in range(N)
    ]
    antipode = Matrix.zeros(N, N)
    for a in range(n):
        for h in range(n):
            target = idx(table[table[inv[h]][inv[a]]][h], inv[h])
            antipode.data[target][idx(a, h)] = ONE
    r = [ZERO] * (N * N)
    for g in range(n):
        for b in range(n):
            r[idx(g, ident) * N + idx(b, g)] = ONE
    return HopfAlgebraData(
        name=name or "double",
        dim=N,
        mult=mult,
        unit=unit,
        comult=comult,
        counit=counit,
        antipode=antipode,
        basis=["d(%d;%d)" % (a, h) for a in range(n) for h in range(n)],
        r_matrix=r,
        pivot=list(unit),
    )
