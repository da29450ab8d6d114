"""Shared instances used by the test suite, the docs, and the CLI demos.

Everything here is built through the public constructors, so the corpus
doubles as a usage gallery.  The table-backed four-element instance with
a non-idempotent meet is the unique such table on a four-chain (the
exhaustive search lives in the tests); the five-element instance is also
derivable from three plane lines through the subspace-lattice closure.
"""

from . import hilbert
from .core import SkewTopology
from .dynamics import AccessibleString, DynSystem, TimeLine
from .sheaves import DynPresheaf, Presheaf
from .spectral import Filtration, GammaChain


def ch2():
    return SkewTopology.chain(["0", "1"], name="CH2")


def ch3():
    return SkewTopology.chain(["0", "a", "1"], name="CH3")


def b2():
    return SkewTopology.lattice_from_pairs(
        ["0", "u", "v", "1"],
        [("0", "u"), ("0", "v"), ("u", "1"), ("v", "1")], name="B2")


def m3():
    return SkewTopology.lattice_from_pairs(
        ["0", "a", "b", "c", "1"],
        [("0", "a"), ("0", "b"), ("0", "c"),
         ("a", "1"), ("b", "1"), ("c", "1")], name="M3")


def nc4():
    # meet sends every pair from {u, v} to u; v fails idempotency
    leq = [[i <= j for j in range(4)] for i in range(4)]
    meet = [[0, 0, 0, 0],
            [0, 1, 1, 1],
            [0, 1, 1, 2],
            [0, 1, 2, 3]]
    join = [[max(i, j) for j in range(4)] for i in range(4)]
    return SkewTopology.build(("0", "u", "v", "1"), leq, meet, join,
                              name="NC4")


def m3_from_lines():
    """The five-element shape again, as an honest subspace lattice."""
    return hilbert.sublattice_closure(
        [hilbert.line([1, 0]), hilbert.line([0, 1]), hilbert.line([1, 1])],
        names=("a", "b", "c"), name="M3/lines")


# ---------------------------------------------------------------------------
# dynamical systems
# ---------------------------------------------------------------------------

def dyn_const():
    """Three instants of the five-element lattice glued by identities."""
    space = m3()
    ident = tuple(range(space.n))
    return DynSystem.from_steps(TimeLine((0, 1, 2)), (space, space, space),
                                (ident, ident), point_kind="minimal",
                                name="DYN_CONST")


def dyn_collapse():
    """Middle element absorbed into the top at the last step."""
    a, b = ch3(), ch3()
    c = ch2()
    return DynSystem.from_steps(TimeLine((0, 1, 2)), (a, b, c),
                                ((0, 1, 2), (0, 1, 1)), name="DYN_COLLAPSE")


def dyn_block():
    """Two instants; the only interior element jumps straight to the top."""
    return DynSystem.from_steps(TimeLine((0, 1)), (ch3(), ch2()),
                                ((0, 1, 1),), name="DYN_BLOCK")


# ---------------------------------------------------------------------------
# presheaves
# ---------------------------------------------------------------------------

def psh_const(base=None, dim=1):
    return Presheaf.constant(base or ch3(), dim, name="PSH_CONST")


def psh_proj():
    """Plane of sections over the top, a line below, projection between."""
    base = ch3()
    a, one = base.index("a"), base.top
    return Presheaf(base, {a: 1, one: 2}, {(a, one): [[1, 0]]},
                    name="PSH_PROJ")


def psh_b2_ns():
    """Nonzero section over the top dies on the two-sided cover."""
    base = b2()
    u, v, one = base.index("u"), base.index("v"), base.top
    return Presheaf(base, {u: 0, v: 0, one: 1},
                    {(u, one): [], (v, one): []}, name="PSH_B2_NS")


def dpsh_const(system=None):
    return DynPresheaf.constant(system or dyn_const(), 1, name="DPSH_CONST")


def dpsh_scalar():
    """One-dimensional values with non-identity comparison scalars.

    The collapsing step sends both nonzero elements to the same target,
    so the comparison scalar must agree across them; 3 then 6 compose to
    18 over the full span.
    """
    system = dyn_collapse()
    sheets = [Presheaf.constant(sp, 1) for sp in system.spaces]
    def level(sp, k):
        return {lam: [[k]] for lam in sp.site()}
    cmp = {(0, 1): level(sheets[0], 3),
           (1, 2): level(sheets[1], 6),
           (0, 2): level(sheets[0], 18)}
    return DynPresheaf(system, sheets, cmp, name="DPSH_SCALAR")


def dpsh_blocked():
    """All comparisons zero: sections cannot follow points forward."""
    system = dyn_collapse()
    sheets = [Presheaf.constant(sp, 1) for sp in system.spaces]
    def zeros(sp):
        return {lam: [[0]] for lam in sp.site()}
    cmp = {(0, 1): zeros(sheets[0]), (1, 2): zeros(sheets[1]),
           (0, 2): zeros(sheets[0])}
    return DynPresheaf(system, sheets, cmp, name="DPSH_BLOCKED")


# ---------------------------------------------------------------------------
# filtrations
# ---------------------------------------------------------------------------

def sf_ch():
    base = ch3()
    return Filtration(base, GammaChain((1, 2)),
                      (base.index("a"), base.top), name="SF_CH")


def sf_m3():
    base = m3()
    return Filtration(base, GammaChain((1, 2)),
                      (base.index("a"), base.top), name="SF_M3")


def sf_nc4():
    base = nc4()
    return Filtration(base, GammaChain((1, 2)),
                      (base.index("v"), base.top), name="SF_NC4")


def sf_b2():
    base = b2()
    return Filtration(base, GammaChain((1, 2, 3)),
                      (base.bottom, base.index("u"), base.top), name="SF_B2")


def sf_partial():
    # single level below the top: the join condition fails by design
    base = ch3()
    return Filtration(base, GammaChain((1,)), (base.index("a"),),
                      name="SF_PARTIAL")


# ---------------------------------------------------------------------------
# operators
# ---------------------------------------------------------------------------

def hilb_diag():
    return hilbert.spectral_family_of(hilbert.diagonal_operator([1, 2]),
                                      name="HILB_DIAG")


def hilb_rotated():
    op = hilbert.conjugated_diagonal(
        [1, 2, 5], [(0, 1, (3, 4, 5)), (1, 2, (5, 12, 13))])
    return hilbert.spectral_family_of(op, name="HILB_ROT")


# ---------------------------------------------------------------------------
# strings over the shipped systems
# ---------------------------------------------------------------------------

def const_level_strings():
    """Constant strings through the middle element and the top."""
    space = m3()
    a, one = space.index("a"), space.top
    return (AccessibleString(1, (0, 1, 2), (a, a, a)),
            AccessibleString(1, (0, 1, 2), (one, one, one)))


def collapse_level_strings():
    a = ch3().index("a")
    return (AccessibleString(0, (0, 1, 2), (a, a, 1)),
            AccessibleString(0, (0, 1, 2), (2, 2, 1)))


def build_registry():
    """Everything by name, grouped the way the reports group them."""
    return {
        "topologies": {
            "CH2": ch2(), "CH3": ch3(), "B2": b2(), "M3": m3(), "NC4": nc4(),
        },
        "systems": {
            "DYN_CONST": dyn_const(),
            "DYN_COLLAPSE": dyn_collapse(),
            "DYN_BLOCK": dyn_block(),
        },
        "presheaves": {
            "PSH_CONST": psh_const(),
            "PSH_PROJ": psh_proj(),
            "PSH_B2_NS": psh_b2_ns(),
        },
        "dyn_presheaves": {
            "DPSH_CONST": dpsh_const(),
            "DPSH_SCALAR": dpsh_scalar(),
            "DPSH_BLOCKED": dpsh_blocked(),
        },
        "filtrations": {
            "SF_CH": sf_ch(), "SF_M3": sf_m3(), "SF_NC4": sf_nc4(),
            "SF_B2": sf_b2(), "SF_PARTIAL": sf_partial(),
        },
        "hilbert": {
            "HILB_DIAG": hilb_diag(),
            "HILB_ROT": hilb_rotated(),
        },
    }
