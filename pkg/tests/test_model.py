"""The text model format: parsing, diagnostics, and the serializer.

Every shipped fixture file is a serializer fixpoint, so the round trip
is tested as byte equality, not just structural equality.  The parsed
documents are then compared against the programmatic registry, table by
table, which keeps the two fixture sources from drifting apart.
"""

import glob
import os

import pytest

from nct import fixtures as fx
from nct.errors import (AmbiguousDefaultTable, ModelSyntaxError,
                        UnknownReference)
from nct.model import parse_model, serialize_model

FIXDIR = os.path.join(os.path.dirname(__file__), "..", "fixtures")


def fixture_texts():
    paths = sorted(glob.glob(os.path.join(FIXDIR, "*.nct")))
    assert len(paths) == 15
    return [(os.path.basename(p), open(p).read()) for p in paths]


def test_every_fixture_file_is_a_serializer_fixpoint():
    for name, text in fixture_texts():
        doc = parse_model(text)
        out = serialize_model(doc)
        assert out == text, name
        assert serialize_model(parse_model(out)) == out, name


def test_declaration_order_is_preserved():
    doc = parse_model(open(os.path.join(FIXDIR, "dyn_collapse.nct")).read())
    assert doc.order == (("poset", "CH3"), ("poset", "CH2"),
                         ("system", "DYN_COLLAPSE"),
                         ("presheaf", "DPSH_SCALAR"),
                         ("filtration", "DSF_COLLAPSE"))
    kind, top = doc.block("CH3")
    assert kind == "poset" and top.n == 3
    with pytest.raises(UnknownReference):
        doc.block("NOPE")


def test_parsed_tables_agree_with_the_programmatic_registry():
    doc = parse_model(open(os.path.join(FIXDIR, "m3.nct")).read())
    top, ref = doc.posets["M3"], fx.m3()
    assert top.labels == ref.labels
    assert top.meet == ref.meet and top.join == ref.join
    doc = parse_model(open(os.path.join(FIXDIR, "nc4.nct")).read())
    nc, ref = doc.posets["NC4"], fx.nc4()
    assert nc.meet == ref.meet and nc.join == ref.join
    assert not nc.is_idempotent(nc.index("v"))


def test_parsed_system_reproduces_the_transition_maps():
    doc = parse_model(open(os.path.join(FIXDIR, "dyn_collapse.nct")).read())
    sys_, ref = doc.systems["DYN_COLLAPSE"], fx.dyn_collapse()
    assert sys_.phi(0, 1) == ref.phi(0, 1)
    assert sys_.phi(1, 2) == ref.phi(1, 2)
    assert sys_.phi(0, 2) == ref.phi(0, 2)
    p = doc.presheaves["DPSH_SCALAR"]
    refp = fx.dpsh_scalar()
    assert [s.dims for s in p.sheets] == [s.dims for s in refp.sheets]
    assert p.cmp[(0, 2)] == refp.cmp[(0, 2)]
    spec = doc.filtrations["DSF_COLLAPSE"]
    assert spec.at == 0
    assert [s.key() for s in spec.strings] == \
        [s.key() for s in fx.collapse_level_strings()]


def test_parsed_hilbert_block():
    doc = parse_model(open(os.path.join(FIXDIR, "hilb_diag.nct")).read())
    spec = doc.hilberts["HDIAG"]
    assert spec.dim == 2
    assert spec.operator == ((1, 0), (0, 2))
    assert spec.lines == ((1, 0), (0, 1))
    assert spec.generators == ()


def _expect(text, exc, fragment):
    with pytest.raises(exc) as caught:
        parse_model(text)
    assert fragment in str(caught.value), caught.value
    return caught.value


def test_block_level_diagnostics():
    e = _expect("poset P {\n  elements: 0 1\n  order: 0<1\n",
                ModelSyntaxError, "never closed")
    assert e.line == 1
    _expect("junk here\n", ModelSyntaxError, "expected a block header")
    _expect("po P {\n}\n", ModelSyntaxError, "unknown block kind")
    _expect("poset P {\n  elements: 0 1\n}\nposet P {\n  elements: 0 1\n}\n",
            ModelSyntaxError, "duplicate block name")


def test_poset_diagnostics():
    _expect("poset P {\n  elements 0 1\n}\n",
            ModelSyntaxError, "unknown poset entry")
    e = _expect("poset P {\n  elements: 0 1\n  order: 0-1\n}\n",
                ModelSyntaxError, "order pairs look like x<y")
    assert e.line == 3
    _expect("poset P {\n  elements: 0 1\n  order: 0<q\n}\n",
            UnknownReference, "unknown element")
    _expect("poset P {\n  elements: 0 0\n}\n",
            ModelSyntaxError, "duplicate element label")
    _expect("poset P {\n  elements: 0 1\n  meet: explicit\n}\n",
            ModelSyntaxError, "missing meet row")
    _expect("poset P {\n  elements: 0 1\n  order: 0<1\n  meet 0 1 -> 2\n}\n",
            UnknownReference, "unknown element")


def test_incomparable_covers_make_the_default_table_ambiguous():
    text = """poset AMB {
  elements: 0 x y z w 1
  order: 0<x 0<y x<z x<w y<z y<w z<1 w<1
}
"""
    with pytest.raises(AmbiguousDefaultTable) as caught:
        parse_model(text)
    assert caught.value.witness == ("z", "w")


def test_system_diagnostics():
    _expect("system S {\n  timeline: t0 t1\n  spaces: CH3 CH3\n}\n",
            UnknownReference, "unknown poset")
    base = "poset CH2 {\n  elements: 0 1\n  order: 0<1\n}\n"
    _expect(base + "system S {\n  timeline: t0 t1\n  spaces: CH2 CH2\n}\n",
            ModelSyntaxError, "missing map")
    _expect(base + "system S {\n  timeline: t0 t1\n  spaces: CH2 CH2\n"
            "  map t0->t1: 0->0\n}\n",
            ModelSyntaxError, "misses element")


def test_filtration_and_hilbert_diagnostics():
    base = ("poset CH3 {\n  elements: 0 a 1\n  order: 0<a a<1\n}\n"
            "filtration F {\n  base: CH3\n  gamma: 1 2\n  levels: a\n}\n")
    _expect(base, ModelSyntaxError, "one level per gamma label")
    sys_base = ("poset CH2 {\n  elements: 0 1\n  order: 0<1\n}\n"
                "system S {\n  timeline: t0 t1\n  spaces: CH2 CH2\n"
                "  map t0->t1: 0->0 1->1\n}\n")
    _expect(sys_base + "filtration F {\n  system: S\n  at: t9\n"
            "  gamma: 1\n  string 1: t0:1 t1:1\n}\n",
            UnknownReference, "unknown instant")
    _expect(sys_base + "filtration F {\n  system: S\n  at: t0\n"
            "  gamma: 1 2\n  string 1: t0:1 t1:1\n}\n",
            ModelSyntaxError, "missing string for gamma label 2")
    _expect("hilbert H {\n  dim: 2\n  operator: [1 0] [0]\n}\n",
            ModelSyntaxError, "ragged matrix")
    _expect("hilbert H {\n  operator: [1]\n}\n",
            ModelSyntaxError, "hilbert needs `dim:`")
    _expect("hilbert H {\n  dim: 1\n}\n",
            ModelSyntaxError, "hilbert needs `operator:` or `generators:`")
