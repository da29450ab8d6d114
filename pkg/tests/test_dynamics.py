"""Dynamical systems: transition clauses, observed truth, moment spaces.

The moment-space closure checks are re-derived here by plain set
algebra over string point sets, independently of the report the engine
attaches to the space.
"""

import pytest

from nct.dynamics import (accessible_strings, dnt_report, moment_space,
                          observed_truth, string_member, temporal_points,
                          validate_system)
from nct.errors import UnknownPredicate
from nct.fixtures import dyn_block, dyn_collapse, dyn_const


def test_fixture_systems_validate_and_satisfy_all_clauses():
    for make in (dyn_const, dyn_collapse, dyn_block):
        system = make()
        validate_system(system)
        rep = dnt_report(system)
        assert all(c.holds for c in rep.clauses), \
            (make.__name__, [c.name for c in rep.clauses if not c.holds])


def test_observed_truth_gives_open_interval_around_every_instant():
    for make in (dyn_const, dyn_collapse):
        system = make()
        for t0 in system.timeline.times():
            tr = observed_truth(system, "shadow-is-DVT", t0)
            assert tr is not None, (make.__name__, t0)
            lo, hi = tr.bounds
            assert lo < t0 < hi
            assert t0 in tr.members
            assert tr.pointwise.holds


def test_unknown_predicate_is_rejected():
    with pytest.raises(UnknownPredicate):
        observed_truth(dyn_const(), "no-such-statement", 0)


def test_temporal_points_cover_both_directions_on_the_collapse():
    tp = temporal_points(dyn_collapse(), 1)
    assert tp.temporally_pointed
    kinds = {(p.element, p.kind) for p in tp.points}
    assert (1, "past") in kinds and (1, "future") in kinds
    # the collapsed top of the later fiber reaches back as a future point
    assert (2, "future") in kinds
    assert tp.sc.sc1.holds and tp.sc.sc2.holds
    assert tp.sc.sc3.holds and tp.sc.sc4.holds


def _string_points(system, ms, s):
    return frozenset(i for i, p in enumerate(ms.points)
                     if string_member(system, s, p))


def _independent_family(system, ms):
    return {_string_points(system, ms, s) for s in ms.strings}


def _family_opens(ms):
    # family entries pair each open with a realizing string
    return {u for u, _ in ms.family}


def test_string_opens_rebuild_the_reported_family():
    for make in (dyn_const, dyn_collapse, dyn_block):
        system = make()
        for t in system.timeline.times():
            ms = moment_space(system, t)
            fam = _independent_family(system, ms)
            assert fam == _family_opens(ms), (make.__name__, t)


def test_family_closed_under_pairwise_intersection_everywhere():
    # recomputed by set algebra; empty intersections need no realizer
    for make in (dyn_const, dyn_collapse, dyn_block):
        system = make()
        for t in system.timeline.times():
            ms = moment_space(system, t)
            fam = _family_opens(ms)
            for u in fam:
                for v in fam:
                    w = u & v
                    assert w in fam or not w, (make.__name__, t, u, v)
            for u, v, tag, _ in ms.report.intersections:
                assert tag == "exact"


def test_collapse_unions_all_realized_exactly():
    for make in (dyn_collapse, dyn_block):
        system = make()
        for t in system.timeline.times():
            ms = moment_space(system, t)
            assert ms.report.union_gaps == ()
            for _, tag, realizer in ms.report.unions:
                assert tag == "exact"
                assert realizer is not None


def test_const_unions_have_precisely_the_pairwise_gaps():
    # the three two-atom unions are only covered, never hit exactly
    system = dyn_const()
    for t in system.timeline.times():
        ms = moment_space(system, t)
        gaps = {frozenset(g) for g in ms.report.union_gaps}
        assert gaps == {frozenset({0, 1}), frozenset({0, 2}),
                        frozenset({1, 2})}
        covered = [opens for opens, tag, _ in ms.report.unions
                   if tag == "covers"]
        assert len(covered) == 3


def test_const_gap_unions_are_not_in_the_independent_family():
    system = dyn_const()
    ms = moment_space(system, 0)
    fam = _independent_family(system, ms)
    assert frozenset({0, 1}) not in fam
    assert frozenset({0, 1, 2}) in fam


def test_every_reported_realizer_is_an_accessible_string():
    for make in (dyn_const, dyn_collapse):
        system = make()
        for t in system.timeline.times():
            ms = moment_space(system, t)
            keys = {s.key() for s in accessible_strings(system, t,
                                                        ms.interval)}
            for _, tag, realizer in ms.report.unions:
                if realizer is not None:
                    assert tuple(realizer[0]) == realizer[0]
                    assert (realizer[0], realizer[1]) in keys


def test_moment_points_are_nearby_fiber_elements():
    system = dyn_collapse()
    ms = moment_space(system, 1)
    assert ms.interval == (1, 2)
    assert ms.points == ((1, 1), (2, 1))
    assert ms.space.points == ("1:a", "2:1")


def test_string_opens_shrink_as_the_collapse_progresses():
    system = dyn_collapse()
    assert len(moment_space(system, 0).family) == 3
    assert len(moment_space(system, 1).family) == 2
    assert len(moment_space(system, 2).family) == 1
