"""Completions, filters, pattern topologies, spectra.

The oracle here is brute force: filters enumerated straight from the
definition (nonempty, downward directed, upward closed) over the power
set, then compared with what the engine produces.
"""

import random
from itertools import combinations

import pytest

from nct.errors import NotDirected
from nct.completion import (all_filters, completion, filter_closure,
                            filter_minimum, is_directed, minimal_point_filters,
                            pattern_topologies, point_set_laws, point_sets,
                            principal_filter, shadow_completion_exchange,
                            spectrum, stone_topology)
from nct.core import validate_skew
from nct.fixtures import b2, ch2, ch3, m3, nc4

from conftest import random_valid_topology


def _subsets(n):
    items = list(range(n))
    for r in range(1, n + 1):
        for c in combinations(items, r):
            yield frozenset(c)


def brute_filters(top):
    """Filters from the definition, with no engine machinery."""
    out = set()
    for s in _subsets(top.n):
        directed = all(
            any(top.le(z, x) and top.le(z, y) for z in s)
            for x in s for y in s)
        upward = all(top.le(x, y) <= (y in s)
                     for x in s for y in range(top.n))
        upward = all((y in s) for x in s for y in range(top.n)
                     if top.le(x, y))
        if directed and upward:
            out.add(s)
    return out


def test_engine_filters_match_brute_force_on_all_fixtures():
    for make in (ch2, ch3, b2, m3, nc4):
        top = make()
        assert set(all_filters(top)) == brute_filters(top), make.__name__


def test_completion_classes_biject_with_filters():
    for make in (ch3, b2, m3, nc4):
        top = make()
        comp = completion(top)
        # distinct classes correspond to distinct filter closures
        closures = {frozenset(cl) for cl in comp.classes}
        assert closures == brute_filters(top)
        assert comp.canonical_bijective.holds


def test_canonical_map_sends_elements_to_principal_filters():
    top = nc4()
    comp = completion(top)
    for x in range(top.n):
        cl = comp.classes[comp.canonical[x]]
        assert frozenset(cl) == principal_filter(top, x)


def test_canonical_map_preserves_both_operations():
    for make in (ch3, b2, m3, nc4):
        comp = completion(make())
        assert comp.canonical_hom.holds, make.__name__
        assert comp.idempotent_transport.holds, make.__name__


def test_completion_has_same_axiom_profile_as_parent():
    for make in (ch3, b2, m3, nc4):
        top = make()
        pr = validate_skew(top, require_axiom_v=True)
        cr = validate_skew(completion(top).space, require_axiom_v=True)
        for name in ("i", "ii", "iii", "iv", "v"):
            assert pr.status(name).holds == cr.status(name).holds, \
                (make.__name__, name)


def test_filter_closure_is_upward_closure_of_directed_sets_only():
    top = m3()
    a, b = top.index("a"), top.index("b")
    cl = filter_closure(top, {a})
    assert cl == principal_filter(top, a)
    with pytest.raises(NotDirected):
        filter_closure(top, {a, b})
    cl2 = filter_closure(top, {top.index("0"), a, b})
    assert cl2 == frozenset(range(top.n))
    assert cl2 in brute_filters(top)


def test_directedness_detects_incomparable_pairs_without_lower_bound():
    top = m3()
    a, b = top.index("a"), top.index("b")
    assert not is_directed(top, {a, b})
    assert is_directed(top, {a, b, top.index("0")})


def test_minimal_points_of_m3_are_the_three_principal_ultrafilters():
    top = m3()
    pts = minimal_point_filters(top)
    expect = {frozenset({top.index(x), top.index("1")}) for x in "abc"}
    assert set(pts) == expect


def test_spectrum_spaces_carry_the_stone_basis():
    for make in (ch3, b2, m3):
        top = make()
        sp = spectrum(top, "minimal")
        n_pts = len(sp.point_filters)
        # every basis entry is an open set of the point topology
        for lam, pts in sp.basis:
            assert pts <= frozenset(range(n_pts))
            assert pts in sp.space.opens


def test_point_sets_are_join_additive_where_certified():
    for make in (ch3, b2, m3):
        laws = point_set_laws(make())
        assert laws.meet_multiplicative.holds, make.__name__
        if not laws.join_failures:
            assert laws.join_additive.holds


def test_stone_topology_basis_generates_the_opens():
    rep = stone_topology(ch3())
    assert rep.inclusion_laws.holds
    for b_ in rep.basis:
        assert b_[1] in rep.space.opens


def test_pattern_topologies_agree_between_base_and_completion():
    for make in (ch3, b2, nc4):
        rep = pattern_topologies(make())
        assert rep.pattern_restriction.holds, make.__name__


def test_shadow_and_completion_exchange_on_lattices():
    for make in (ch2, ch3, b2):
        rep = shadow_completion_exchange(make())
        assert rep.agree.holds, make.__name__


def test_filter_minimum_picks_the_least_element_when_principal():
    top = b2()
    for x in range(top.n):
        assert filter_minimum(top, principal_filter(top, x)) == x


def test_random_topologies_complete_consistently():
    rng = random.Random(3)
    for _ in range(10):
        top = random_valid_topology(rng, max_n=6)
        comp = completion(top)
        assert comp.canonical_bijective.holds
        assert comp.canonical_hom.holds
        assert {frozenset(cl) for cl in comp.classes} == brute_filters(top)
