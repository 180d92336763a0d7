"""Built-in example algebras and their named modules.

The catalog ships as data files (see algfile); the constructors here are the
source the files were generated from and what the tests pin them against.
Everything is split over Q by design.
"""

from __future__ import annotations

from fractions import Fraction

from .hopf import (
    HopfAlgebraData,
    ModuleRep,
    Matrix,
    cyclic_group_table,
    symmetric_group_table,
    group_algebra,
    double,
    trivial_module,
    regular_module,
    free_module,
    cyclic_submodule,
    submodule_from_basis,
)

HALF = Fraction(1, 2)
ONE = Fraction(1)
ZERO = Fraction(0)

CATALOG_NAMES = ("k", "z2", "s3", "sweedler", "double-z2")

GROUP_TABLES = {
    "trivial": [[0]],
    "z2": cyclic_group_table(2),
    "z3": cyclic_group_table(3),
    "z4": cyclic_group_table(4),
    "s3": symmetric_group_table(3),
}


def ground_field() -> HopfAlgebraData:
    return HopfAlgebraData(
        name="k",
        dim=1,
        mult=[[[ONE]]],
        unit=[ONE],
        comult=[[[ONE]]],
        counit=[ONE],
        antipode=Matrix.identity(1),
        basis=["1"],
        r_matrix=[ONE],
        pivot=[ONE],
    )


def z2_group_algebra() -> HopfAlgebraData:
    return group_algebra(GROUP_TABLES["z2"], "z2", ["1", "s"])


def s3_group_algebra() -> HopfAlgebraData:
    return group_algebra(GROUP_TABLES["s3"], "s3")


def sweedler() -> HopfAlgebraData:
    """The 4-dimensional Sweedler algebra, basis (1, g, x, gx).

    Relations g^2 = 1, x^2 = 0, xg = -gx; Delta(x) = x (x) 1 + g (x) x;
    R is the standard one-parameter family at parameter 0 (triangular limit);
    pivot is the grouplike g.
    """
    n = 4
    mult = [[[ZERO] * n for _ in range(n)] for _ in range(n)]

    def put(i, j, k, c):
        mult[i][j][k] = Fraction(c)

    # 1 = e0, g = e1, x = e2, gx = e3
    for j in range(n):
        put(0, j, j, 1)
        put(j, 0, j, 1)
    put(1, 1, 0, 1)   # g g = 1
    put(1, 2, 3, 1)   # g x = gx
    put(1, 3, 2, 1)   # g gx = x
    put(2, 1, 3, -1)  # x g = -gx
    put(3, 1, 2, -1)  # gx g = -x
    # x x = x gx = gx x = gx gx = 0

    comult = [[[ZERO] * n for _ in range(n)] for _ in range(n)]
    comult[0][0][0] = ONE
    comult[1][1][1] = ONE
    comult[2][2][0] = ONE  # x (x) 1
    comult[2][1][2] = ONE  # g (x) x
    comult[3][3][1] = ONE  # gx (x) g
    comult[3][0][3] = ONE  # 1 (x) gx

    counit = [ONE, ONE, ZERO, ZERO]
    antipode = Matrix.from_rows(
        [
            [1, 0, 0, 0],
            [0, 1, 0, 0],
            [0, 0, 0, 1],
            [0, 0, -1, 0],
        ]
    )
    r = [ZERO] * (n * n)
    r[0 * n + 0] = HALF
    r[0 * n + 1] = HALF
    r[1 * n + 0] = HALF
    r[1 * n + 1] = -HALF
    pivot = [ZERO, ONE, ZERO, ZERO]
    return HopfAlgebraData(
        name="sweedler",
        dim=n,
        mult=mult,
        unit=[ONE, ZERO, ZERO, ZERO],
        comult=comult,
        counit=counit,
        antipode=antipode,
        basis=["1", "g", "x", "gx"],
        r_matrix=r,
        pivot=pivot,
    )


def double_z2() -> HopfAlgebraData:
    return double(GROUP_TABLES["z2"], "double-z2")


def catalog_constructors():
    return {
        "k": ground_field,
        "z2": z2_group_algebra,
        "s3": s3_group_algebra,
        "sweedler": sweedler,
        "double-z2": double_z2,
    }


def catalog():
    """The built-in algebras, loaded from the shipped data files."""
    from . import algfile

    return [algfile.load_builtin(name) for name in CATALOG_NAMES]


def catalog_algebra(name: str) -> HopfAlgebraData:
    from . import algfile

    if name not in CATALOG_NAMES:
        raise KeyError("unknown catalog algebra %r" % name)
    return algfile.load_builtin(name)


# ---------------------------------------------------------------------------
# named modules

def _character_module(h, values, name):
    return ModuleRep(h, 1, [Matrix(1, 1, [[Fraction(v)]]) for v in values], name)


def _s3_std(h) -> ModuleRep:
    perms = sorted(__import__("itertools").permutations(range(3)))
    mats = []
    for p in perms:
        grid = [[ZERO] * 3 for _ in range(3)]
        for i in range(3):
            grid[p[i]][i] = ONE
        mats.append(Matrix(3, 3, grid))
    perm_mod = ModuleRep(h, 3, mats, "perm")
    basis = Matrix.from_rows([[1, 0], [-1, 1], [0, -1]])
    return submodule_from_basis(perm_mod, basis, "std")


def _sweedler_signs(h):
    sign = _character_module(h, [1, -1, 0, 0], "sign")
    e_plus = [HALF, HALF, ZERO, ZERO]
    e_minus = [HALF, -HALF, ZERO, ZERO]
    reg = regular_module(h)
    pplus = cyclic_submodule(reg, e_plus, "proj+")
    pminus = cyclic_submodule(reg, e_minus, "proj-")
    return sign, pplus, pminus


def module_registry(h: HopfAlgebraData) -> dict:
    """Named modules for the catalog algebras, keyed by CLI-facing names."""
    reg = regular_module(h)
    triv = trivial_module(h)
    out = {"reg": reg, "triv": triv}
    if h.name == "k":
        for d in (1, 2, 3):
            out["k%d" % d] = free_module(h, d)
    elif h.name == "z2":
        out["triv+"] = triv
        out["triv-"] = _character_module(h, [1, -1], "triv-")
    elif h.name == "s3":
        sgn = [1 if sorted(__import__("itertools").permutations(range(3)))[i] in
               [(0, 1, 2), (1, 2, 0), (2, 0, 1)] else -1 for i in range(6)]
        out["sign"] = _character_module(h, sgn, "sign")
        out["std"] = _s3_std(h)
    elif h.name == "sweedler":
        sign, pplus, pminus = _sweedler_signs(h)
        out["sign"] = sign
        out["proj+"] = pplus
        out["proj-"] = pminus
    elif h.name == "double-z2":
        # characters (flux b, charge theta) on basis e_a (x) h with index 2a + h
        def chi(b, theta):
            vals = []
            for a in range(2):
                for t in range(2):
                    vals.append((1 if a == b else 0) * (theta if t == 1 else 1))
            return vals

        out["e"] = _character_module(h, chi(0, -1), "e")
        out["m"] = _character_module(h, chi(1, 1), "m")
        out["em"] = _character_module(h, chi(1, -1), "em")
    return out


def split_simples(h: HopfAlgebraData):
    """The simple modules split over Q, in a fixed order."""
    reg_names = {
        "k": ["triv"],
        "z2": ["triv+", "triv-"],
        "s3": ["triv", "sign", "std"],
        "sweedler": ["triv", "sign"],
        "double-z2": ["triv", "e", "m", "em"],
    }
    registry = module_registry(h)
    return [registry[n] for n in reg_names[h.name]]


def projective_covers(h: HopfAlgebraData):
    """Projective covers of the split simples (the simples themselves when
    the algebra is semisimple)."""
    if h.name == "sweedler":
        registry = module_registry(h)
        return [registry["proj+"], registry["proj-"]]
    return split_simples(h)


def is_semisimple_catalog(name: str) -> bool:
    return name in ("k", "z2", "s3", "double-z2")
