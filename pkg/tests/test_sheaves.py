"""Presheaves, stalks, separatedness, moment sheaves, stalk matching.

Random directed diagrams are built over rooted-tree index orders: the
path between related indices is unique, so composites are consistent by
construction and the engine's functoriality check must accept them.
"""

from fractions import Fraction
import random

import pytest

from nct.errors import (DimensionMismatch, InconsistentDiagram,
                        PreconditionFailed)
from nct.fixtures import (dpsh_blocked, dpsh_const, dpsh_scalar, dyn_collapse,
                          psh_b2_ns, psh_const, psh_proj)
from nct.sheaves import (bottom_section, check_ltf, colimit, identify_stalks,
                         is_separated, moment_presheaf, sheafify, stalk,
                         validate_dyn_presheaf, validate_presheaf)


def test_static_presheaves_validate():
    for make in (psh_const, psh_proj, psh_b2_ns):
        rep = validate_presheaf(make())
        assert rep.composition.holds, make.__name__


def test_dynamical_presheaves_validate():
    for make in (dpsh_const, dpsh_scalar, dpsh_blocked):
        rep = validate_dyn_presheaf(make())
        assert rep is not None, make.__name__


def test_stalk_at_the_point_of_a_chain_site():
    p = psh_proj()
    pt = p.base.index("a")
    r = stalk(p, pt)
    assert r.dim == 1
    assert r.quotient.certified.holds
    assert r.cofinal.holds
    assert r.via_minimum == r.dim


def test_bottom_section_of_projection_presheaf_is_one_dimensional():
    r = bottom_section(psh_proj())
    assert r.dim == 1
    assert r.certified.holds
    assert r.directed


def test_separated_holds_for_chain_presheaf():
    rep = is_separated(psh_proj())
    assert rep.separated


def test_non_separated_square_witnessed_at_the_top():
    rep = is_separated(psh_b2_ns())
    assert not rep.separated
    # the witness names the covered element, the cover, and a section
    lam, cover, section = rep.witness
    assert lam == 3
    assert tuple(sorted(cover)) == (1, 2)


# --- colimit oracle: rooted-tree diagrams with unique paths ---


def _random_tree_diagram(rng, max_index=6, max_dim=5):
    n = rng.randint(1, max_index)
    parent = [None] * n
    # node n-1 is the root; each other node attaches above it somewhere
    for i in range(n - 1):
        parent[i] = rng.randint(i + 1, n - 1)
    dims = [rng.randint(1, max_dim) for _ in range(n)]

    def rmat(r, c):
        return [[Fraction(rng.randint(-3, 3)) for _ in range(c)]
                for _ in range(r)]

    edge = {}
    for i in range(n - 1):
        edge[i] = rmat(dims[parent[i]], dims[i])
    pairs = []
    maps = {}
    for i in range(n):
        j = i
        acc = None
        while parent[j] is not None:
            m = edge[j]
            if acc is None:
                acc = m
            else:
                acc = _mul(m, acc)
            j = parent[j]
            pairs.append((i, j))
            maps[(i, j)] = [row[:] for row in acc] if acc else []
    return dims, pairs, maps


def _mul(a, b):
    if not a:
        return []
    if not b:
        return [[] for _ in a] if not b else []
    ra, ca = len(a), len(a[0]) if a else 0
    rb = len(b)
    cb = len(b[0]) if b and b[0] else 0
    assert ca == rb
    return [[sum(a[i][k] * b[k][j] for k in range(ca)) for j in range(cb)]
            for i in range(ra)]


def test_colimit_quotient_equals_maximum_evaluation_on_random_diagrams():
    rng = random.Random(88)
    for _ in range(100):
        dims, pairs, maps = _random_tree_diagram(rng)
        r = colimit(dims, pairs, maps)
        assert r.directed
        assert r.certified.holds, (dims, pairs)
        assert r.dim == r.shortcut_dim


def test_colimit_rejects_inconsistent_composites():
    dims = [1, 1, 1]
    pairs = [(0, 1), (1, 2), (0, 2)]
    maps = {(0, 1): [[Fraction(2)]], (1, 2): [[Fraction(3)]],
            (0, 2): [[Fraction(5)]]}       # 5 != 3*2
    with pytest.raises(InconsistentDiagram):
        colimit(dims, pairs, maps)


def test_colimit_rejects_shape_mismatches():
    with pytest.raises(DimensionMismatch):
        colimit([1, 2], [(0, 1)], {(0, 1): [[Fraction(1)]]})


# --- moment presheaves and stalk identification ---


def test_moment_presheaf_builds_at_every_instant():
    dp = dpsh_scalar()
    for t in dp.system.timeline.times():
        mp = moment_presheaf(dp, t)
        assert mp.moment.anchor == t


def test_sheafification_satisfies_gluing_and_functoriality():
    dp = dpsh_scalar()
    for t in dp.system.timeline.times():
        r = sheafify(moment_presheaf(dp, t))
        assert r.gluing.holds
        assert r.functorial.holds


def test_sheafified_separated_even_when_strings_overlap():
    dp = dpsh_scalar()
    r = sheafify(moment_presheaf(dp, 0))
    assert is_separated(r.sheaf).separated


def test_ltf_holds_on_the_scalar_fixture_at_every_instant():
    dp = dpsh_scalar()
    checked = []
    for t in dp.system.timeline.times():
        rep = check_ltf(dp, t)
        assert rep.holds, t
        checked.append(rep.checked)
    assert checked == [17, 6, 1]


def test_ltf_fails_on_the_blocked_fixture_with_witnesses():
    rep = check_ltf(dpsh_blocked(), 0)
    assert not rep.holds
    assert len(rep.failures) == 9


def test_stalk_identification_invertible_on_constant_presheaf():
    dp = dpsh_const()
    for t in dp.system.timeline.times():
        rep = identify_stalks(dp, t)
        assert rep.ltf.holds
        assert rep.identifications, t
        for pi in rep.identifications:
            assert pi.moment_dim == pi.fiber_dim
            assert pi.invertible
            assert pi.compatible.holds


def test_stalk_identification_matrix_inverts_the_scalars():
    rep = identify_stalks(dpsh_scalar(), 1)
    by_point = {pi.point: pi for pi in rep.identifications}
    assert set(by_point) == {(1, 1), (2, 1)}
    for pi in rep.identifications:
        assert pi.invertible
        assert pi.moment_dim == pi.fiber_dim == 1


def test_blocked_comparison_maps_fail_the_precondition():
    with pytest.raises(PreconditionFailed):
        identify_stalks(dpsh_blocked(), 0)


def test_separated_fibers_give_separated_moment_presheaf():
    dp = dpsh_scalar()
    for t in dp.system.timeline.times():
        for sheet in dp.sheets:
            assert is_separated(sheet).separated
        assert is_separated(moment_presheaf(dp, t)).separated
