"""Axiom engine: validation, expression evaluation, commutative shadow."""

import random
from itertools import product

import pytest

from nct.core import (SkewTopology, commutative_shadow, eval_expr,
                      idempotents, join_power_reaches_top,
                      meet_power_reaches_bottom, recheck_axiom, validate_skew)
from nct.errors import MalformedTable, UnknownLabel
from nct.fixtures import b2, ch2, ch3, m3, nc4

from conftest import random_valid_topology


def test_lattice_fixtures_pass_all_axioms():
    for make in (ch2, ch3, b2):
        rep = validate_skew(make(), require_axiom_v=True)
        assert rep.valid, (make.__name__, rep.failing())


def test_m3_fails_only_the_cover_axiom():
    rep = validate_skew(m3(), require_axiom_v=True)
    assert rep.failing() == ("v",)
    # witness: element c, cover 1 = a | b
    assert rep.status("v").witness == ("v", 3, (1, 2))
    assert validate_skew(m3()).valid     # i-iv alone pass


def test_nc4_passes_all_axioms_including_cover():
    rep = validate_skew(nc4(), require_axiom_v=True)
    assert rep.valid, rep.failing()


def test_nc4_has_exactly_one_non_idempotent():
    t = nc4()
    assert [t.labels[i] for i in idempotents(t)] == ["0", "u", "1"]
    v = t.index("v")
    assert t.mt(v, v) == t.index("u")


def test_nc4_meet_is_commutative_despite_non_idempotency():
    t = nc4()
    for x in range(t.n):
        for y in range(t.n):
            assert t.mt(x, y) == t.mt(y, x)


def _chain4_candidates():
    """All meet tables on the chain 0<u<v<1 that keep 0 and 1 neutral.

    Only the u,v block is free; meets against 0 and 1 are forced by the
    axioms.  Candidate values are constrained to lie under the smaller
    argument, which the validator would force anyway.
    """
    leq = [[i <= j for j in range(4)] for i in range(4)]
    jn = [[max(i, j) for j in range(4)] for i in range(4)]
    out = []
    for uu, uv, vu, vv in product((0, 1), (0, 1), (0, 1), (0, 1, 2)):
        mt = [[0, 0, 0, 0],
              [0, uu, uv, 1],
              [0, vu, vv, 2],
              [0, 1, 2, 3]]
        out.append((uu, uv, vu, vv,
                    SkewTopology.build(("0", "u", "v", "1"), leq, mt, jn)))
    return out


def test_chain4_table_search_finds_one_non_idempotent_table():
    # independent search: the only valid table with a broken idempotent
    # is u.u=u, u.v=v.u=v.v=u, and it is commutative
    valid_non_idem = []
    for uu, uv, vu, vv, cand in _chain4_candidates():
        if not validate_skew(cand, require_axiom_v=True).valid:
            continue
        if any(not cand.is_idempotent(i) for i in range(4)):
            valid_non_idem.append((uu, uv, vu, vv))
    assert valid_non_idem == [(1, 1, 1, 1)]


def test_chain4_table_search_finds_the_plain_chain():
    plain = [(uu, uv, vu, vv) for uu, uv, vu, vv, cand in _chain4_candidates()
             if validate_skew(cand, require_axiom_v=True).valid
             and all(cand.is_idempotent(i) for i in range(4))]
    assert plain == [(1, 1, 1, 2)]


def test_axiom_witness_reproduces_failure():
    # break monotonicity of the meet on B2 and replay the witness
    t = b2()
    n = t.n
    leq = [[t.le(i, j) for j in range(n)] for i in range(n)]
    mt = [[t.mt(i, j) for j in range(n)] for i in range(n)]
    jn = [[t.jn(i, j) for j in range(n)] for i in range(n)]
    mt[t.index("u")][t.index("1")] = t.index("1")     # u.1 = 1 > u
    bad = SkewTopology.build(t.labels, leq, mt, jn)
    rep = validate_skew(bad)
    assert not rep.valid
    name = rep.failing()[0]
    status = rep.status(name)
    assert status.witness is not None
    assert recheck_axiom(bad, status.witness) is True
    # the same witness replayed on the unbroken table does not reproduce
    assert recheck_axiom(t, status.witness) is False


def test_meet_powers_reach_bottom_exactly_at_bottom():
    # the power clauses of the first and third axioms, stated directly
    for make in (nc4, m3, b2):
        t = make()
        for x in range(t.n):
            assert meet_power_reaches_bottom(t, x) == (x == t.bottom)
            assert join_power_reaches_top(t, x) == (x == t.top)


def test_eval_expr_handles_nesting_and_rejects_unknowns():
    t = m3()
    assert t.labels[eval_expr(t, "(a ^ b) | c")] == "c"
    assert t.labels[eval_expr(t, "a | (b ^ c)")] == "a"
    assert t.labels[eval_expr(t, "(a | b) ^ (a | c)")] == "1"
    with pytest.raises(UnknownLabel):
        eval_expr(t, "a ^ q")


def test_chain_and_pair_constructors_agree_on_ch3():
    a = SkewTopology.chain(("0", "a", "1"))
    b = ch3()
    assert a.labels == b.labels
    for i in range(3):
        for j in range(3):
            assert a.mt(i, j) == b.mt(i, j)
            assert a.jn(i, j) == b.jn(i, j)


def test_malformed_tables_are_rejected():
    leq = [[True, True], [False, True]]
    with pytest.raises(MalformedTable):
        SkewTopology.build(("0", "1"), leq, [[0, 0]], [[0, 1], [1, 1]])


def test_shadow_of_nc4_is_the_three_chain():
    sh = commutative_shadow(nc4())
    st = sh.as_topology()
    assert st.labels == ("0", "u", "1")
    assert st.is_lattice()
    assert sh.modular.holds and sh.closed.holds and sh.laws.holds


def test_shadow_of_lattice_is_itself():
    t = m3()
    sh = commutative_shadow(t)
    assert len(sh.carrier) == t.n
    assert sh.modular.holds


def test_shadow_meet_on_nc4_lands_in_idempotents():
    # shadow tables are indexed by carrier position and valued the same way
    t = nc4()
    sh = commutative_shadow(t)
    for a in range(sh.n):
        for b in range(sh.n):
            assert t.is_idempotent(sh.carrier[sh.meet[a][b]])
            assert sh.meet[a][b] == sh.meet[b][a]


def test_random_topologies_validate_and_have_modular_shadows():
    rng = random.Random(11)
    for _ in range(25):
        t = random_valid_topology(rng)
        assert validate_skew(t).valid
        sh = commutative_shadow(t)
        assert sh.modular.holds and sh.closed.holds
