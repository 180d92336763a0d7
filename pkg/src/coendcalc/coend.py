"""Coends and ends over finite generating subcategories.

A coend is computed as the coequalizer of the two maps out of the coproduct
over basis morphisms (s_f = G(f, id), t_f = G(id, f)); an end as the dual
equalizer.  The machinery is generic over a small diagram protocol so the
same engine serves module subcategories and product subcategories.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

from .linalg import (
    Matrix,
    ZERO,
    ONE,
    SpanAccumulator,
    QuotientSpace,
    quotient_by_span,
    kernel_basis,
    kronecker,
    block_diag,
    solve,
    inverse,
)
from .hopf import (
    ModuleRep,
    IntertwinerSpace,
    HopfAlgebraData,
    AlgebraData,
    hom_space,
    tensor_module,
    dual_module,
    trivial_module,
    regular_module,
    AlgebraMismatchError,
)


class PresentationError(ValueError):
    """A functor presentation violates functoriality."""


class FactorizationError(ValueError):
    """No mediating map exists for the given family."""


class NotDinaturalError(ValueError):
    """The given family fails the dinaturality equations."""


@dataclass(frozen=True)
class Morphism:
    src: int
    tgt: int
    mat: Matrix


def matrix_hash(m: Matrix) -> str:
    payload = "%d,%d;" % (m.rows, m.cols) + ";".join(
        ",".join(str(x) for x in row) for row in m.data
    )
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


# ---------------------------------------------------------------------------
# diagrams

class GeneratingSubcategory:
    """A finite full subcategory of H-mod: objects plus solved hom bases."""

    def __init__(self, algebra, objects, names=None, identity_only=False,
                 regular_index=None):
        self.algebra = algebra
        self.objects = list(objects)
        self.names = list(names) if names else [m.name or ("x%d" % i) for i, m in enumerate(self.objects)]
        self.identity_only = identity_only
        self.regular_index = regular_index
        self._homs = {}
        self.morphisms = []
        self._positions = {}
        for i in range(len(self.objects)):
            for j in range(len(self.objects)):
                space = self._make_hom(i, j)
                self._homs[(i, j)] = space
                self._positions[(i, j)] = []
                for b in space.basis:
                    self._positions[(i, j)].append(len(self.morphisms))
                    self.morphisms.append(Morphism(i, j, b))

    def _make_hom(self, i, j):
        if self.identity_only:
            basis = [Matrix.identity(self.objects[i].dim)] if i == j else []
            return IntertwinerSpace(self.objects[i], self.objects[j], basis)
        return hom_space(self.objects[i], self.objects[j])

    @property
    def n_objects(self):
        return len(self.objects)

    def hom(self, i, j) -> IntertwinerSpace:
        return self._homs[(i, j)]

    def morphism_positions(self, i, j):
        """Global indices into self.morphisms of the Hom(i, j) basis."""
        return self._positions[(i, j)]

    def identity(self, i) -> Morphism:
        return Morphism(i, i, Matrix.identity(self.objects[i].dim))

    def compose(self, g: Morphism, f: Morphism) -> Morphism:
        assert f.tgt == g.src
        return Morphism(f.src, g.tgt, g.mat * f.mat)

    def index_of(self, m: ModuleRep):
        for i, o in enumerate(self.objects):
            if o is m or o.same_as(m):
                return i
        return None

    def composable_pairs(self):
        for f in self.morphisms:
            for g in self.morphisms:
                if f.tgt == g.src:
                    yield g, f  # composite g о f


def default_sub(h: HopfAlgebraData, extra=()) -> GeneratingSubcategory:
    """The default generating subcategory: the regular module (a projective
    generator), optionally extended by further objects."""
    objs = [regular_module(h)] + list(extra)
    return GeneratingSubcategory(h, objs, regular_index=0)


def vect_truncation(dims=(1, 2, 3)) -> GeneratingSubcategory:
    """Finite chunk of Vect realized as free modules over the ground field."""
    from .catalog import ground_field
    from .hopf import free_module

    k = ground_field()
    objs = [free_module(k, d) for d in dims]
    return GeneratingSubcategory(k, objs, names=["k%d" % d for d in dims],
                                 regular_index=dims.index(1) if 1 in dims else None)


@dataclass(frozen=True)
class ProductMorphism:
    src: int
    tgt: int
    f1: Morphism
    f2: Morphism


class ProductDiagram:
    """The product category of two generating subcategories; morphism basis
    is the set of pairs of basis morphisms (their relations span everything
    by bilinearity of the coequalizer relations)."""

    def __init__(self, sub1, sub2):
        self.sub1 = sub1
        self.sub2 = sub2
        self.n2 = sub2.n_objects
        self.objects = [(i, j) for i in range(sub1.n_objects) for j in range(sub2.n_objects)]
        self.morphisms = []
        for f in sub1.morphisms:
            for g in sub2.morphisms:
                self.morphisms.append(
                    ProductMorphism(self.pair_index(f.src, g.src), self.pair_index(f.tgt, g.tgt), f, g)
                )

    def pair_index(self, i, j):
        return i * self.n2 + j

    @property
    def n_objects(self):
        return len(self.objects)

    def identity(self, k) -> ProductMorphism:
        i, j = self.objects[k]
        return ProductMorphism(k, k, self.sub1.identity(i), self.sub2.identity(j))

    def compose(self, g: ProductMorphism, f: ProductMorphism) -> ProductMorphism:
        assert f.tgt == g.src
        return ProductMorphism(f.src, g.tgt, self.sub1.compose(g.f1, f.f1), self.sub2.compose(g.f2, f.f2))


# ---------------------------------------------------------------------------
# bifunctor presentations

class Bifunctor:
    """G: D^op x D -> Vect (or -> C when module() returns a ModuleRep).

    map(f, g) is the matrix G(tgt f, src g) -> G(src f, tgt g); the first
    argument acts contravariantly, the second covariantly.
    """

    def dim(self, i, j) -> int:
        raise NotImplementedError

    def module(self, i, j):
        return None

    def map(self, f, g) -> Matrix:
        raise NotImplementedError

    def is_module_valued(self) -> bool:
        return self.module(0, 0) is not None


def check_bifunctor(diagram, G, max_pairs=400):
    """Functoriality on basis morphisms: identities, interchange, and
    per-slot composition.  Deterministically sampled above max_pairs."""
    n = diagram.n_objects
    ids = [diagram.identity(i) for i in range(n)]
    for i in range(n):
        for j in range(n):
            if G.map(ids[i], ids[j]) != Matrix.identity(G.dim(i, j)):
                raise PresentationError("identity law fails at (%d, %d)" % (i, j))
    pairs = [(f, g) for f in diagram.morphisms for g in diagram.morphisms]
    stride = max(1, len(pairs) // max_pairs)
    for f, g in pairs[::stride]:
        combined = G.map(f, g)
        first = G.map(f, ids[g.tgt]) * G.map(ids[f.tgt], g)
        second = G.map(ids[f.src], g) * G.map(f, ids[g.src])
        if combined != first or combined != second:
            raise PresentationError("interchange law fails")
    comp = [(g, f) for f in diagram.morphisms for g in diagram.morphisms if f.tgt == g.src]
    stride = max(1, len(comp) // max_pairs)
    for g, f in comp[::stride]:
        gf = diagram.compose(g, f)
        for y in range(n):
            if G.map(gf, ids[y]) != G.map(f, ids[y]) * G.map(g, ids[y]):
                raise PresentationError("contravariant slot composition fails")
            if G.map(ids[y], gf) != G.map(ids[y], g) * G.map(ids[y], f):
                raise PresentationError("covariant slot composition fails")


def _induced_hom_map(src_space: IntertwinerSpace, tgt_space: IntertwinerSpace,
                     post: Matrix, pre: Matrix) -> Matrix:
    """Coordinates of X -> post о X о pre between two hom spaces."""
    mid = kronecker(post, pre.transpose())
    return tgt_space.coordinatizer() * (mid * src_space.basis_matrix())


class HomBifunctor(Bifunctor):
    """G(a, b) = Hom(a, b) with G(f, g): X -> g о X о f."""

    def __init__(self, sub):
        self.sub = sub

    def dim(self, i, j):
        return self.sub.hom(i, j).dim

    def map(self, f, g):
        return _induced_hom_map(
            self.sub.hom(f.tgt, g.src), self.sub.hom(f.src, g.tgt), g.mat, f.mat
        )


class InnerHomBifunctor(Bifunctor):
    """G(a, b) = b (x) a_dual (ordering "x_xdual") or a_dual (x) b
    (ordering "xdual_x"); module-valued."""

    def __init__(self, sub, ordering="x_xdual"):
        assert ordering in ("x_xdual", "xdual_x")
        self.sub = sub
        self.ordering = ordering
        self.duals = [dual_module(m) for m in sub.objects]
        self._modules = {}

    def module(self, i, j):
        key = (i, j)
        if key not in self._modules:
            if self.ordering == "x_xdual":
                self._modules[key] = tensor_module(self.sub.objects[j], self.duals[i])
            else:
                self._modules[key] = tensor_module(self.duals[i], self.sub.objects[j])
        return self._modules[key]

    def dim(self, i, j):
        return self.sub.objects[i].dim * self.sub.objects[j].dim

    def map(self, f, g):
        fd = f.mat.transpose()
        if self.ordering == "x_xdual":
            return kronecker(g.mat, fd)
        return kronecker(fd, g.mat)


class CentralObjectBifunctor(Bifunctor):
    """G(a, b) = a_dual (x) c (x) b, the integrand of the central object."""

    def __init__(self, sub, c: ModuleRep):
        self.sub = sub
        self.c = c
        self.duals = [dual_module(m) for m in sub.objects]
        self._modules = {}

    def module(self, i, j):
        key = (i, j)
        if key not in self._modules:
            self._modules[key] = tensor_module(
                self.duals[i], tensor_module(self.c, self.sub.objects[j])
            )
        return self._modules[key]

    def dim(self, i, j):
        return self.sub.objects[i].dim * self.c.dim * self.sub.objects[j].dim

    def map(self, f, g):
        return kronecker(f.mat.transpose(), kronecker(Matrix.identity(self.c.dim), g.mat))


class TensorHomBifunctor(Bifunctor):
    """G(a, b) = Hom(u, v (x) b (x) a_dual): the blocks of the left-exact coend."""

    def __init__(self, sub, u: ModuleRep, v: ModuleRep):
        self.sub = sub
        self.u = u
        self.v = v
        self.duals = [dual_module(m) for m in sub.objects]
        self._spaces = {}

    def space(self, i, j) -> IntertwinerSpace:
        key = (i, j)
        if key not in self._spaces:
            carrier = tensor_module(self.v, tensor_module(self.sub.objects[j], self.duals[i]))
            self._spaces[key] = hom_space(self.u, carrier)
        return self._spaces[key]

    def dim(self, i, j):
        return self.space(i, j).dim

    def map(self, f, g):
        post = kronecker(
            Matrix.identity(self.v.dim), kronecker(g.mat, f.mat.transpose())
        )
        return _induced_hom_map(
            self.space(f.tgt, g.src), self.space(f.src, g.tgt),
            post, Matrix.identity(self.u.dim),
        )


# ---------------------------------------------------------------------------
# coend / end

@dataclass(eq=False)
class CoendResult:
    diagram: object
    bifunctor: object
    quotient: QuotientSpace
    components: list  # iota_x: G(x, x) -> object
    offsets: list
    module: ModuleRep = None

    @property
    def dim(self) -> int:
        return self.quotient.quotient_dim


@dataclass(eq=False)
class EndResult:
    diagram: object
    bifunctor: object
    inclusion: Matrix  # E -> direct sum of G(x, x)
    components: list  # pi_x: E -> G(x, x)
    offsets: list

    @property
    def dim(self) -> int:
        return self.inclusion.cols


def coend(diagram, G: Bifunctor, check=True) -> CoendResult:
    """The coequalizer of s_f = G(f, id) and t_f = G(id, f) over all basis
    morphisms, with its dinatural family."""
    if check:
        check_bifunctor(diagram, G)
    n = diagram.n_objects
    dims = [G.dim(i, i) for i in range(n)]
    offsets = [0]
    for d in dims:
        offsets.append(offsets[-1] + d)
    total = offsets[-1]
    acc = SpanAccumulator(total)
    for f in diagram.morphisms:
        a, b = f.src, f.tgt
        s = G.map(f, diagram.identity(a))
        t = G.map(diagram.identity(b), f)
        for col in range(G.dim(b, a)):
            vec = {}
            for r in range(s.rows):
                v = s.data[r][col]
                if v:
                    vec[offsets[a] + r] = v
            for r in range(t.rows):
                v = t.data[r][col]
                if v:
                    key = offsets[b] + r
                    nv = vec.get(key, ZERO) - v
                    if nv:
                        vec[key] = nv
                    else:
                        vec.pop(key, None)
            if vec:
                acc.add(vec)
    q = quotient_by_span(total, acc)
    components = [q.projection.cols_slice(offsets[i], offsets[i + 1]) for i in range(n)]
    module = None
    if G.is_module_valued():
        alg = G.module(0, 0).algebra
        mats = []
        for t_idx in range(alg.dim):
            big = block_diag([G.module(i, i).action[t_idx] for i in range(n)])
            mats.append(q.projection * (big * q.section))
        module = ModuleRep(alg, q.quotient_dim, mats, "coend")
    return CoendResult(diagram, G, q, components, offsets, module)


def end(diagram, G: Bifunctor, check=True) -> EndResult:
    """The equalizer dual to `coend`: sections compatible with both actions."""
    if check:
        check_bifunctor(diagram, G)
    n = diagram.n_objects
    dims = [G.dim(i, i) for i in range(n)]
    offsets = [0]
    for d in dims:
        offsets.append(offsets[-1] + d)
    total = offsets[-1]
    K = Matrix.identity(total)
    for f in diagram.morphisms:
        a, b = f.src, f.tgt
        A = G.map(diagram.identity(a), f)  # G(a,a) -> G(a,b)
        B = G.map(f, diagram.identity(b))  # G(b,b) -> G(a,b)
        Ka = K.rows_slice(offsets[a], offsets[a + 1])
        Kb = K.rows_slice(offsets[b], offsets[b + 1])
        M = A * Ka - B * Kb
        if M.is_zero():
            continue
        kb = kernel_basis(M)
        if kb.cols == K.cols:
            continue
        K = K * kb
        if K.cols == 0:
            break
    components = [K.rows_slice(offsets[i], offsets[i + 1]) for i in range(n)]
    return EndResult(diagram, G, K, components, offsets)


def check_dinatural(diagram, G: Bifunctor, family) -> bool:
    """family[x]: G(x, x) -> W; dinaturality on every basis morphism."""
    for f in diagram.morphisms:
        a, b = f.src, f.tgt
        left = family[a] * G.map(f, diagram.identity(a))
        right = family[b] * G.map(diagram.identity(b), f)
        if left != right:
            return False
    return True


def check_end_dinatural(diagram, G: Bifunctor, family) -> bool:
    """family[x]: W -> G(x, x); the dual equations."""
    for f in diagram.morphisms:
        a, b = f.src, f.tgt
        left = G.map(diagram.identity(a), f) * family[a]
        right = G.map(f, diagram.identity(b)) * family[b]
        if left != right:
            return False
    return True


def factor_through_coend(c: CoendResult, family, check=True) -> Matrix:
    """The unique mediating map m with m о iota_x = family[x] for all x."""
    if check and not check_dinatural(c.diagram, c.bifunctor, family):
        raise NotDinaturalError("input family is not dinatural")
    J = Matrix.hstack(family)
    X = solve(c.quotient.projection.transpose(), J.transpose())
    if X is None:
        raise FactorizationError("family does not factor through the coend")
    m = X.transpose()
    if m * c.quotient.projection != J:
        raise FactorizationError("family does not factor through the coend")
    return m


def factor_through_end(e: EndResult, family, check=True) -> Matrix:
    """The unique m with pi_x о m = family[x]; family[x]: W -> G(x, x)."""
    if check and not check_end_dinatural(e.diagram, e.bifunctor, family):
        raise NotDinaturalError("input family is not end-dinatural")
    J = Matrix.vstack(family)
    m = solve(e.inclusion, J)
    if m is None or e.inclusion * m != J:
        raise FactorizationError("family does not factor through the end")
    return m


def factor_through_joint(carrier_dim: int, blocks) -> Matrix:
    """Mediating map through a jointly surjective family.

    blocks: iterable of (A, B) with A: block -> carrier and B: block -> target;
    returns the unique M with M о A = B for every block.
    """
    blocks = list(blocks)
    acc = SpanAccumulator(carrier_dim)
    sel_cols = []
    sel_rhs = []
    target_rows = blocks[0][1].rows
    for A, B in blocks:
        for j in range(A.cols):
            col = {i: A.data[i][j] for i in range(A.rows) if A.data[i][j]}
            if acc.add(col):
                sel_cols.append(A.col(j))
                sel_rhs.append(B.col(j))
            if len(sel_cols) == carrier_dim:
                break
        if len(sel_cols) == carrier_dim:
            break
    if len(sel_cols) < carrier_dim:
        raise FactorizationError("family is not jointly surjective")
    Asel = Matrix.from_rows(sel_cols).transpose()
    Bsel = Matrix.from_rows(sel_rhs).transpose()
    Ainv = inverse(Asel)
    assert Ainv is not None
    M = Bsel * Ainv
    for A, B in blocks:
        if M * A != B:
            raise FactorizationError("family is inconsistent with the joint family")
    return M


# ---------------------------------------------------------------------------
# natural transformation spaces

class CovFunctorPresentation:
    """A covariant functor sub -> C given on objects and basis morphisms."""

    def __init__(self, sub, images, morphism_images):
        self.sub = sub
        self.images = list(images)  # ModuleRep per object
        self.morphism_images = list(morphism_images)  # Matrix per basis morphism

    @classmethod
    def identity(cls, sub):
        return cls(sub, sub.objects, [f.mat for f in sub.morphisms])

    def image_of(self, f: Morphism) -> Matrix:
        """Linear extension of the stored basis images to any intertwiner."""
        coords = self.sub.hom(f.src, f.tgt).coords(f.mat)
        acc = Matrix.zeros(self.images[f.tgt].dim, self.images[f.src].dim)
        for pos, k in enumerate(self.sub.morphism_positions(f.src, f.tgt)):
            c = coords.data[pos][0]
            if c:
                acc = acc + self.morphism_images[k].scale(c)
        return acc


class NatHomBifunctor(Bifunctor):
    """G(a, b) = Hom(F a, G b) for two presented functors."""

    def __init__(self, sub, F: CovFunctorPresentation, G: CovFunctorPresentation):
        self.sub = sub
        self.F = F
        self.G = G
        self._spaces = {}

    def space(self, i, j):
        key = (i, j)
        if key not in self._spaces:
            self._spaces[key] = hom_space(self.F.images[i], self.G.images[j])
        return self._spaces[key]

    def dim(self, i, j):
        return self.space(i, j).dim

    def map(self, f, g):
        return _induced_hom_map(
            self.space(f.tgt, g.src), self.space(f.src, g.tgt),
            self.G.image_of(g), self.F.image_of(f),
        )


def nat_space(F: CovFunctorPresentation, G: CovFunctorPresentation, sub):
    """Nat(F, G) as the end of Hom(F-, G-): (dimension, components, EndResult)."""
    if F.sub is not sub or G.sub is not sub:
        raise PresentationError("functors are presented on a different subcategory")
    B = NatHomBifunctor(sub, F, G)
    e = end(sub, B)
    # components of each basis natural transformation, as matrices
    nats = []
    for col in range(e.dim):
        comps = []
        for i in range(sub.n_objects):
            coord_col = Matrix.column([e.components[i].data[r][col] for r in range(e.components[i].rows)])
            comps.append(B.space(i, i).from_coords(coord_col))
        nats.append(comps)
    return e.dim, nats, e


# ---------------------------------------------------------------------------
# end from coend via a non-degenerate pairing

class DegeneratePairingError(ValueError):
    pass


def end_from_coend(c: CoendResult, pairing: Matrix, ordering="x_xdual"):
    """Lemma-style end structure on the object of an inner-Hom coend.

    pairing: 1 x dim(D)^2 matrix, the morphism D (x) D -> 1.  Returns
    (family, end_result, mediating, invertible) where family[x]: D -> G(x,x)
    is built from the pairing, the coevaluation of x (x) x_dual and the
    inverse pivot, and mediating is the unique map into the equalizer end.
    """
    from .hopf import pivot_action_inverse

    G = c.bifunctor
    sub = c.diagram
    D = c.dim
    pmat = Matrix(D, D, [[pairing.data[0][i * D + j] for j in range(D)] for i in range(D)])
    from .linalg import rank as _rank

    if _rank(pmat) != D:
        raise DegeneratePairingError("pairing is degenerate: rank %d < %d" % (_rank(pmat), D))
    family = []
    for i in range(sub.n_objects):
        x = sub.objects[i]
        d = x.dim
        iota = c.components[i]
        pinv = pivot_action_inverse(x)
        # coevaluation of the block y = x (x) x_dual (resp. x_dual (x) x),
        # with y_dual realized with flipped legs
        col = [[ZERO] for _ in range(d ** 4)]
        if ordering == "x_xdual":
            # entry at (i0, j0, j0, i0) in x, xd, xdd, xd
            for a in range(d):
                for b in range(d):
                    col[((a * d + b) * d + b) * d + a][0] = ONE
        else:
            # y = x_dual (x) x; y_dual = x_dual (x) x_dual_dual; entry (j,i,i,j)
            for a in range(d):
                for b in range(d):
                    col[((b * d + a) * d + a) * d + b][0] = ONE
        bvec = Matrix(d ** 4, 1, col)
        step1 = kronecker(Matrix.identity(D), bvec)  # D -> D (x) d^4
        step2 = kronecker(Matrix.identity(D), kronecker(iota, Matrix.identity(d * d)))
        if ordering == "x_xdual":
            last = kronecker(pairing, kronecker(pinv, Matrix.identity(d)))
        else:
            last = kronecker(pairing, kronecker(Matrix.identity(d), pinv))
        family.append(last * (step2 * step1))
    if not check_end_dinatural(sub, G, family):
        raise NotDinaturalError("constructed end family is not dinatural")
    e = end(sub, G, check=False)
    mediating = factor_through_end(e, family, check=False)
    invertible = mediating.rows == mediating.cols and inverse(mediating) is not None
    return family, e, mediating, invertible


# ---------------------------------------------------------------------------
# Fubini interchange

class QuadFunctor:
    """F: C1^op x C1 x C2^op x C2 -> Vect on two generating subcategories."""

    def dim(self, uc, uv, xc, xv) -> int:
        raise NotImplementedError

    def map(self, fc, fv, gc, gv) -> Matrix:
        raise NotImplementedError


class _ProductBifunctor(Bifunctor):
    def __init__(self, diagram: ProductDiagram, F: QuadFunctor):
        self.diagram = diagram
        self.F = F

    def dim(self, i, j):
        a1, a2 = self.diagram.objects[i]
        b1, b2 = self.diagram.objects[j]
        return self.F.dim(a1, b1, a2, b2)

    def map(self, f: ProductMorphism, g: ProductMorphism):
        return self.F.map(f.f1, g.f1, f.f2, g.f2)


class _InnerSliceBifunctor(Bifunctor):
    """Fix the outer pair (uc, uv); the remaining bifunctor in the inner slot."""

    def __init__(self, sub_outer, sub_inner, F, uc, uv, outer_first):
        self.sub_outer = sub_outer
        self.sub_inner = sub_inner
        self.F = F
        self.uc = uc
        self.uv = uv
        self.outer_first = outer_first

    def dim(self, i, j):
        if self.outer_first:
            return self.F.dim(self.uc, self.uv, i, j)
        return self.F.dim(i, j, self.uc, self.uv)

    def map(self, f, g):
        idc = self.sub_outer.identity(self.uc)
        idv = self.sub_outer.identity(self.uv)
        if self.outer_first:
            return self.F.map(idc, idv, f, g)
        return self.F.map(f, g, idc, idv)


class _OuterQuotientBifunctor(Bifunctor):
    """The bifunctor (uc, uv) -> inner coend, with factored induced maps."""

    def __init__(self, sub_outer, sub_inner, F, inner, outer_first):
        self.sub_outer = sub_outer
        self.sub_inner = sub_inner
        self.F = F
        self.inner = inner  # dict (uc, uv) -> CoendResult
        self.outer_first = outer_first

    def dim(self, i, j):
        return self.inner[(i, j)].dim

    def map(self, f, g):
        src = self.inner[(f.tgt, g.src)]
        tgt = self.inner[(f.src, g.tgt)]
        fam = []
        for x in range(self.sub_inner.n_objects):
            idx = self.sub_inner.identity(x)
            if self.outer_first:
                blockmap = self.F.map(f, g, idx, idx)
            else:
                blockmap = self.F.map(idx, idx, f, g)
            fam.append(tgt.components[x] * blockmap)
        return factor_through_coend(src, fam, check=False)


def iterated_coend(sub_outer, sub_inner, F: QuadFunctor, outer_first: bool):
    """Coend over the inner variable first, then over the outer one.

    outer_first says whether the outer subcategory occupies the first
    (C1) slot pair of F.  Returns (outer CoendResult, inner dict, composite
    family keyed by (u, x))."""
    inner = {}
    for i in range(sub_outer.n_objects):
        for j in range(sub_outer.n_objects):
            B = _InnerSliceBifunctor(sub_outer, sub_inner, F, i, j, outer_first)
            inner[(i, j)] = coend(sub_inner, B, check=False)
    OB = _OuterQuotientBifunctor(sub_outer, sub_inner, F, inner, outer_first)
    outer = coend(sub_outer, OB, check=False)
    composite = {}
    for u in range(sub_outer.n_objects):
        for x in range(sub_inner.n_objects):
            composite[(u, x)] = outer.components[u] * inner[(u, u)].components[x]
    return outer, inner, composite


@dataclass
class FubiniReport:
    records: list  # (claim, bool, witness dict)

    @property
    def passed(self):
        return all(ok for _, ok, _ in self.records)


def fubini_check(sub1, sub2, F: QuadFunctor, check=True) -> FubiniReport:
    """Computes the u-then-x, x-then-u and product-category coends and checks
    that the canonical mediating maps are mutually inverse isomorphisms."""
    records = []
    prod_diag = ProductDiagram(sub1, sub2)
    PB = _ProductBifunctor(prod_diag, F)
    if check:
        check_bifunctor(prod_diag, PB)
    c_prod = coend(prod_diag, PB, check=False)

    out_ux, inner_ux, comp_ux = iterated_coend(sub1, sub2, F, outer_first=True)
    out_xu, inner_xu, comp_xu = iterated_coend(sub2, sub1, F, outer_first=False)

    dims = {
        "product": c_prod.dim,
        "u_then_x": out_ux.dim,
        "x_then_u": out_xu.dim,
    }
    records.append(
        ("all three coend orders have equal dimension",
         c_prod.dim == out_ux.dim == out_xu.dim, dict(dims))
    )

    def compare(outer, inner, composite, swap):
        # phi: product -> iterated via the composite family
        fam = []
        for k in range(prod_diag.n_objects):
            i, j = prod_diag.objects[k]
            fam.append(composite[(i, j) if not swap else (j, i)])
        phi = factor_through_coend(c_prod, fam, check=False)
        # psi: iterated -> product
        psis = []
        n_out = outer.diagram.n_objects
        for u in range(n_out):
            fam_u = []
            for x in range(inner[(u, u)].diagram.n_objects):
                if not swap:
                    k = prod_diag.pair_index(u, x)
                else:
                    k = prod_diag.pair_index(x, u)
                fam_u.append(c_prod.components[k])
            psis.append(factor_through_coend(inner[(u, u)], fam_u, check=False))
        psi = factor_through_coend(outer, psis, check=False)
        ok = (
            phi * psi == Matrix.identity(outer.quotient.quotient_dim)
            and psi * phi == Matrix.identity(c_prod.dim)
        )
        return phi, psi, ok

    phi1, psi1, ok1 = compare(out_ux, inner_ux, comp_ux, swap=False)
    records.append(
        ("product <-> u-then-x mediators are mutually inverse", ok1,
         {"phi": matrix_hash(phi1), "psi": matrix_hash(psi1)})
    )
    phi2, psi2, ok2 = compare(out_xu, inner_xu, comp_xu, swap=True)
    records.append(
        ("product <-> x-then-u mediators are mutually inverse", ok2,
         {"phi": matrix_hash(phi2), "psi": matrix_hash(psi2)})
    )
    chi = phi2 * psi1
    chi_inv = phi1 * psi2
    ok3 = (
        chi * chi_inv == Matrix.identity(out_xu.dim)
        and chi_inv * chi == Matrix.identity(out_ux.dim)
    )
    records.append(
        ("iterated orders are connected by a unique isomorphism", ok3,
         {"chi": matrix_hash(chi)})
    )
    return FubiniReport(records)


# ---------------------------------------------------------------------------
# relative tensor product

@dataclass(eq=False)
class RightModuleRep:
    """Right module: action[i] is the matrix of (- . e_i); anti-multiplicative."""

    algebra: AlgebraData
    dim: int
    action: list
    name: str = ""

    def check(self) -> bool:
        alg = self.algebra
        acc = Matrix.zeros(self.dim, self.dim)
        for i, c in enumerate(alg.unit):
            if c:
                acc = acc + self.action[i].scale(c)
        if acc != Matrix.identity(self.dim):
            return False
        ms = alg.mult_sparse()
        for i in range(alg.dim):
            for j in range(alg.dim):
                expect = Matrix.zeros(self.dim, self.dim)
                for k, c in ms.get((i, j), {}).items():
                    expect = expect + self.action[k].scale(c)
                if self.action[j] * self.action[i] != expect:
                    return False
        return True


def right_module_from_regular(alg: AlgebraData) -> RightModuleRep:
    mats = []
    ms = alg.mult_sparse()
    for i in range(alg.dim):
        m = [[ZERO] * alg.dim for _ in range(alg.dim)]
        for j in range(alg.dim):
            for k, c in ms.get((j, i), {}).items():
                m[k][j] = c
        mats.append(Matrix(alg.dim, alg.dim, m))
    return RightModuleRep(alg, alg.dim, mats, "reg_r")


class ModuleAxiomError(ValueError):
    pass


def relative_tensor(ring: AlgebraData, n: RightModuleRep, m) -> tuple:
    """N (x)_R M as the coend over the one-object category with endomorphisms
    R: the coequalizer of the two R-actions on N (x) M.

    Returns (dimension, QuotientSpace)."""
    if not n.check():
        raise ModuleAxiomError("right module axioms fail")
    mod_check = m.check() if hasattr(m, "check") else False
    if not mod_check:
        raise ModuleAxiomError("left module axioms fail")
    total = n.dim * m.dim
    acc = SpanAccumulator(total)
    In = Matrix.identity(n.dim)
    Im = Matrix.identity(m.dim)
    for i in range(ring.dim):
        rel = kronecker(n.action[i], Im) - kronecker(In, m.action[i])
        acc.add_matrix_columns(rel)
    q = quotient_by_span(total, acc)
    return q.quotient_dim, q


# ---------------------------------------------------------------------------
# stabilization

@dataclass
class StabilizationReport:
    claim: str
    stable: bool
    small_dim: int
    large_dim: int
    mediator_hash: str


def stabilization_check(sub_small, sub_large, bifunctor_factory) -> StabilizationReport:
    """Coend over sub_small vs sub_large; stable when the canonical mediating
    map between them is an isomorphism."""
    mapping = []
    for obj in sub_small.objects:
        idx = sub_large.index_of(obj)
        if idx is None:
            raise ValueError("sub_small is not contained in sub_large")
        mapping.append(idx)
    c_small = coend(sub_small, bifunctor_factory(sub_small), check=False)
    c_large = coend(sub_large, bifunctor_factory(sub_large), check=False)
    family = [c_large.components[mapping[i]] for i in range(sub_small.n_objects)]
    mediator = factor_through_coend(c_small, family, check=False)
    stable = (
        mediator.rows == mediator.cols
        and inverse(mediator) is not None
    ) if c_small.dim == c_large.dim else False
    return StabilizationReport(
        "coend stabilizes from %d to %d objects" % (sub_small.n_objects, sub_large.n_objects),
        stable,
        c_small.dim,
        c_large.dim,
        matrix_hash(mediator),
    )
