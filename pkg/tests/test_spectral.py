"""Filtrations, observables, gamma points, commutative blocks, and the
stringwise families over dynamical systems.

The observable tables are re-derived here by scanning the order relation
directly, and the sigma inequalities are rechecked pairwise from scratch
rather than read off the report, so the engine's tabulation has an
independent witness.
"""

import math
import random

import pytest

from conftest import random_valid_topology
from nct.core import SkewTopology, validate_skew
from nct.dynamics import AccessibleString
from nct.errors import (CapExceeded, JoinNotTop, MalformedTable, NotAccessible,
                        NotMonotone, NotRightBounded)
from nct.fixtures import (build_registry, collapse_level_strings,
                          const_level_strings, dyn_collapse, dyn_const, m3,
                          sf_b2, sf_ch, sf_m3, sf_nc4, sf_partial)
from nct.completion import completion
from nct.spectral import (Filtration, GammaChain, INF, abelian_sublattices,
                          dynamical_spectral, gamma_points, level_meet_law,
                          observable, observable_completion,
                          restrict_filtration, validate_filtration)

FILTRATIONS = build_registry()["filtrations"]

# per fixture: monotone, top-join, separated, idempotent levels, bounds
EXPECTED_FLAGS = {
    "SF_CH": (True, True, False, True, True, False),
    "SF_M3": (True, True, False, True, True, False),
    "SF_NC4": (True, True, False, False, True, False),
    "SF_B2": (True, True, True, True, True, True),
    "SF_PARTIAL": (True, False, False, True, False, False),
}


def test_filtration_flags_across_the_registry():
    for name, f in FILTRATIONS.items():
        r = validate_filtration(f, strict=False)
        got = (r.monotone.holds, r.top_join.holds, r.separated.holds,
               r.idempotent, r.right_bounded, r.left_bounded)
        assert got == EXPECTED_FLAGS[name], name
        assert r.spectral == (name == "SF_B2")
        assert r.levels_directed.holds, name


def test_strict_validation_raises_when_the_levels_join_below_the_top():
    with pytest.raises(JoinNotTop):
        validate_filtration(sf_partial())
    r = validate_filtration(sf_partial(), strict=False)
    assert r.top_join.witness == (sf_partial().base.index("a"),)


def test_strict_validation_raises_on_descending_levels():
    base = m3()
    f = Filtration(base, GammaChain((1, 2)), (base.top, base.index("a")))
    with pytest.raises(NotMonotone):
        validate_filtration(f)
    r = validate_filtration(f, strict=False)
    assert r.monotone.witness == (1, 2)


def test_level_count_and_chain_labels_are_checked():
    base = m3()
    with pytest.raises(MalformedTable):
        validate_filtration(Filtration(base, GammaChain((1, 2)), (base.top,)))
    with pytest.raises(MalformedTable):
        GammaChain((1, 1))


def test_level_meet_law_holds_on_every_registered_family():
    for name, f in FILTRATIONS.items():
        r = level_meet_law(f)
        assert r.law.holds, name
        assert r.pairs_checked == f.gamma.n * (f.gamma.n - 1)
    nc = level_meet_law(sf_nc4())
    assert nc.shadow_family.holds
    assert "not idempotent" in nc.shadow_family.note
    # the diamond family sits in the shadow but is not separated there
    assert not level_meet_law(sf_m3()).shadow_family.holds


def test_level_meet_law_detects_incomparable_levels():
    base = m3()
    a, b = base.index("a"), base.index("b")
    r = level_meet_law(Filtration(base, GammaChain((1, 2)), (a, b)))
    assert not r.law.holds
    assert r.law.witness == (2, 1, base.bottom, a)


EXPECTED_SIGMA = {
    "SF_CH": (1, 1, 2),
    "SF_M3": (1, 1, 2, 2, 2),
    "SF_NC4": (1, 1, 1, 2),
    "SF_B2": (1, 2, 3, 3),
    "SF_PARTIAL": (1, 1, INF),
}


def test_observable_tables_match_the_frozen_values():
    for name, f in FILTRATIONS.items():
        r = observable(f)
        assert r.observable.sigma == EXPECTED_SIGMA[name], name


def _brute_sigma(f):
    out = []
    for x in f.base.elements():
        hits = [f.gamma.labels[k] for k in range(f.gamma.n)
                if f.base.le(x, f.levels[k])]
        out.append(min(hits) if hits else INF)
    return tuple(out)


def test_observable_laws_recomputed_pairwise_on_every_family():
    for name, f in FILTRATIONS.items():
        base = f.base
        r = observable(f)
        sigma = r.observable.sigma
        assert sigma == _brute_sigma(f), name
        for x in base.elements():
            for y in base.elements():
                assert sigma[base.mt(x, y)] <= min(sigma[x], sigma[y]), \
                    (name, x, y)
                assert sigma[base.jn(x, y)] <= max(sigma[x], sigma[y]), \
                    (name, x, y)
        assert r.meet_law.holds and r.join_law.holds
        assert r.domain_is_union.holds


def test_observable_laws_on_randomized_two_level_families():
    rng = random.Random(29)
    seen = 0
    while seen < 40:
        base = random_valid_topology(rng, max_n=7)
        if base is None:
            continue
        for x in base.elements():
            f = Filtration(base, GammaChain((1, 2)), (x, base.top))
            assert level_meet_law(f).law.holds, (base.meet, x)
            r = observable(f)
            assert r.meet_law.holds and r.join_law.holds, (base.meet, x)
            seen += 1


def test_partial_family_leaves_the_top_unmeasured():
    f = sf_partial()
    r = observable(f)
    assert r.observable.value(f.base.top) == INF
    assert r.observable.domain == frozenset({0, 1})
    assert r.observable.domain != frozenset(f.base.elements())
    assert r.domain_is_union.holds


def test_observable_transports_to_the_completion():
    for f in (sf_ch(), sf_b2(), sf_m3()):
        r = observable_completion(f)
        assert r.cross_check.holds, f.name
        assert r.strictness.holds, f.name
        comp = completion(f.base)
        sigma = observable(f).observable.sigma
        for x in f.base.elements():
            assert r.sigma_hat[comp.canonical[x]] == sigma[x], (f.name, x)
        assert r.report.spectral == validate_filtration(f, strict=False).spectral
        assert r.filtration.name == f.name + "^"


def test_gamma_point_of_the_chain_family_is_a_point_in_both_senses():
    g = gamma_points(sf_ch())
    assert g.filter == frozenset({1, 2})
    assert g.directed.holds
    assert g.in_irreducible and g.in_minimal and g.in_strong


def test_gamma_point_of_the_diamond_family_is_minimal_but_not_prime():
    g = gamma_points(sf_m3())
    base = m3()
    assert g.filter == frozenset({base.index("a"), base.top})
    assert g.in_minimal and not g.in_irreducible and not g.in_strong


def test_gamma_point_with_a_bottom_level_is_the_improper_class():
    g = gamma_points(sf_b2())
    assert g.filter == frozenset(sf_b2().base.elements())
    assert g.completion_index == 0
    assert not g.in_irreducible and not g.in_minimal


def test_restriction_to_the_interior_of_the_chain():
    f = sf_ch()
    a = f.base.index("a")
    r = restrict_filtration(f, a)
    assert r.levels == (a, a)
    assert r.closed.holds
    assert r.restricted.name == "SF_CH|a"
    # the restricted family keeps monotonicity and the top join but was
    # never separated, and restriction cannot create separation
    assert r.report.monotone.holds and r.report.top_join.holds
    assert not r.report.separated.holds
    assert r.centralizer_case and r.idempotent_case
    assert r.centralizers == tuple(f.base.elements())


def test_restriction_across_the_square_preserves_spectrality():
    f = sf_b2()
    for mu in f.base.elements():
        r = restrict_filtration(f, mu)
        assert r.closed.holds and r.report is not None, mu
        assert r.report.spectral, mu
        assert r.centralizer_case and r.idempotent_case, mu


def test_restriction_by_a_non_idempotent_element():
    f = sf_nc4()
    base = f.base
    r = restrict_filtration(f, base.index("v"))
    # v ^ v falls to u, so the restricted levels start strictly lower
    assert r.levels == (base.index("u"), base.index("v"))
    assert r.closed.holds and not r.report.separated.holds
    assert not r.centralizer_case and not r.idempotent_case
    assert r.centralizers == tuple(base.elements())


def test_restriction_requires_a_level_at_the_top():
    with pytest.raises(NotRightBounded):
        restrict_filtration(sf_partial(), 0)


def test_commutative_tables_are_their_own_single_block():
    reg = build_registry()["topologies"]
    for name in ("CH3", "B2", "M3", "NC4"):
        top = reg[name]
        rep = abelian_sublattices(top)
        assert rep.sublattices == (frozenset(top.elements()),), name
    rep = abelian_sublattices(reg["CH3"], families=(sf_ch(),))
    assert rep.containments == (0,)
    with pytest.raises(CapExceeded):
        abelian_sublattices(reg["M3"], cap=4)


# six-element table with one non-commuting pair, found by randomized
# search over validated meet mutations and frozen here
NC6_LEQ = [[True, True, True, True, True, True],
           [False, True, True, True, False, True],
           [False, False, True, True, False, True],
           [False, False, False, True, False, True],
           [False, True, True, True, True, True],
           [False, False, False, False, False, True]]
NC6_MEET = [[0, 0, 0, 0, 0, 0],
            [0, 1, 1, 1, 4, 1],
            [0, 1, 1, 1, 4, 2],
            [0, 1, 2, 3, 4, 3],
            [0, 4, 4, 4, 4, 4],
            [0, 1, 2, 3, 4, 5]]
NC6_JOIN = [[0, 1, 2, 3, 4, 5],
            [1, 1, 2, 3, 1, 5],
            [2, 2, 2, 3, 2, 5],
            [3, 3, 3, 3, 3, 5],
            [4, 1, 2, 3, 4, 5],
            [5, 5, 5, 5, 5, 5]]


def test_noncommuting_table_splits_into_proper_blocks():
    top = SkewTopology.build(tuple("abcdef"), NC6_LEQ, NC6_MEET, NC6_JOIN,
                             name="NC6")
    assert validate_skew(top).valid
    assert top.mt(2, 3) != top.mt(3, 2)
    rep = abelian_sublattices(top)
    assert rep.sublattices == (frozenset({0, 1, 2, 4, 5}),
                               frozenset({0, 1, 3, 4, 5}))
    for block in rep.sublattices:
        assert block < frozenset(top.elements())
        for x in block:
            for y in block:
                assert top.mt(x, y) == top.mt(y, x)
    assert frozenset(top.elements()) == rep.sublattices[0] | rep.sublattices[1]


def test_stringwise_family_over_the_constant_system():
    r = dynamical_spectral(dyn_const(), 1, GammaChain((1, 2)),
                           const_level_strings())
    assert r.common_support == (0, 1, 2)
    assert r.monotone.holds
    assert r.point_sets[0] < r.point_sets[1]
    assert len(r.point_sets[1]) == 3
    for tq, rep in r.fiber_reports:
        assert rep.monotone.holds and rep.top_join.holds
    # a ^ 1 = a in every fiber, so no instant separates
    assert r.failures == ((0, "not-separated"), (1, "not-separated"),
                          (2, "not-separated"))


def test_stringwise_family_over_the_collapsing_system():
    r = dynamical_spectral(dyn_collapse(), 0, GammaChain((1, 2)),
                           collapse_level_strings())
    assert r.common_support == (0, 1, 2)
    assert r.monotone.holds
    assert r.point_sets[0] <= r.point_sets[1]
    assert all(reason == "not-separated" for _, reason in r.failures)
    assert len(r.failures) == 3


def test_stringwise_levels_must_be_accessible_and_counted():
    bad = AccessibleString(0, (0, 1, 2), (1, 1, 0))
    with pytest.raises(NotAccessible):
        dynamical_spectral(dyn_collapse(), 0, GammaChain((1,)), (bad,))
    with pytest.raises(MalformedTable):
        dynamical_spectral(dyn_collapse(), 0, GammaChain((1, 2, 3)),
                           collapse_level_strings())
