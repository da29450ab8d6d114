"""Deterministic rendering of result payloads.

Three output forms share one intermediate representation: a payload is a
plain dict built by the caller, and ``to_jsonable`` normalizes whatever
values ended up inside it (fractions, frozensets, dataclass reports,
core objects).  JSON output is sorted and indented, so equal payloads
render byte-identically.  Text output is a flat key/value listing of the
same tree.  DOT output only exists for graph-shaped payloads and is
produced by the dedicated helpers below.
"""

from __future__ import annotations

import dataclasses
import json
import math
from fractions import Fraction

from .completion import FiniteSpace
from .core import SkewTopology
from .dynamics import AccessibleString, DynSystem, MomentSpace
from .errors import MalformedTable

SCHEMA = 1


def to_jsonable(obj):
    """Normalize ``obj`` into JSON-serializable primitives."""
    if obj is None or isinstance(obj, (bool, int, str)):
        return obj
    if isinstance(obj, float):
        if math.isinf(obj):
            return "inf"
        # floats only ever appear as the infinity sentinel
        return obj
    if isinstance(obj, Fraction):
        if obj.denominator == 1:
            return obj.numerator
        return "%d/%d" % (obj.numerator, obj.denominator)
    if isinstance(obj, SkewTopology):
        return {"name": obj.name or None, "size": obj.n,
                "elements": list(obj.labels)}
    if isinstance(obj, DynSystem):
        return {"name": obj.name or None,
                "timeline": [str(l) for l in obj.timeline.labels]}
    if isinstance(obj, FiniteSpace):
        return {"points": list(obj.points),
                "opens": sorted(
                    (sorted(obj.points[i] for i in o) for o in obj.opens),
                    key=lambda names: (len(names), names))}
    if isinstance(obj, MomentSpace):
        return {"anchor": obj.anchor,
                "interval": list(obj.interval),
                "points": [list(p) for p in obj.points],
                "space": to_jsonable(obj.space)}
    if isinstance(obj, AccessibleString):
        return {"anchor": obj.anchor,
                "support": list(obj.support),
                "components": {str(t): obj.components[i]
                               for i, t in enumerate(obj.support)}}
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name))
                for f in dataclasses.fields(obj)}
    if isinstance(obj, (frozenset, set)):
        items = [to_jsonable(x) for x in obj]
        return sorted(items, key=lambda x: json.dumps(x, sort_keys=True))
    if isinstance(obj, dict):
        return {_key(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(x) for x in obj]
    raise MalformedTable("cannot serialize %r" % type(obj).__name__)


def _key(k):
    if isinstance(k, str):
        return k
    if isinstance(k, (int, Fraction)):
        return str(to_jsonable(k))
    if isinstance(k, tuple):
        return ",".join(str(to_jsonable(x)) for x in k)
    return str(k)


def payload(command, body):
    """Wrap a result body with the schema and command envelope."""
    out = {"schema": SCHEMA, "command": command}
    out.update(body)
    return out


def render_json(data):
    return json.dumps(to_jsonable(data), indent=2, sort_keys=True) + "\n"


def render_text(data):
    lines = []
    _text_walk(to_jsonable(data), "", lines)
    return "\n".join(lines) + "\n"


def _scalar(v):
    return v is None or isinstance(v, (bool, int, float, str))


def _fmt_scalar(v):
    if v is None:
        return "-"
    if isinstance(v, bool):
        return "yes" if v else "no"
    return str(v)


def _text_walk(node, prefix, lines):
    if isinstance(node, dict):
        for k in sorted(node):
            v = node[k]
            path = "%s.%s" % (prefix, k) if prefix else str(k)
            _text_walk(v, path, lines)
    elif isinstance(node, list):
        if all(_scalar(x) for x in node):
            lines.append("%s: [%s]" % (prefix,
                                       ", ".join(_fmt_scalar(x) for x in node)))
        else:
            for i, x in enumerate(node):
                _text_walk(x, "%s[%d]" % (prefix, i), lines)
    else:
        lines.append("%s: %s" % (prefix, _fmt_scalar(node)))


def topology_body(top):
    """Full table dump of a skew topology, labels throughout."""
    lab = top.labels
    return {
        "name": top.name or None,
        "elements": list(lab),
        "order": [[lab[i], lab[j]] for i in range(top.n)
                  for j in range(top.n) if i != j and top.le(i, j)],
        "covers": [[lab[i], lab[j]] for i, j in top.covers()],
        "meet": {"%s,%s" % (lab[i], lab[j]): lab[top.mt(i, j)]
                 for i in range(top.n) for j in range(top.n)},
        "join": {"%s,%s" % (lab[i], lab[j]): lab[top.jn(i, j)]
                 for i in range(top.n) for j in range(top.n)},
        "idempotents": [lab[i] for i in top.idempotent_indices()],
    }


def dot_hasse(top, graph_name="hasse"):
    """DOT digraph of the cover relation, bottom drawn lowest."""
    lines = ["digraph %s {" % _dot_id(graph_name), "  rankdir=BT;",
             "  node [shape=box, fontname=\"monospace\"];"]
    for i, lab in enumerate(top.labels):
        extra = ""
        if not top.is_idempotent(i):
            extra = ", style=dashed"
        lines.append("  %s [label=\"%s\"%s];" % (_dot_id("n%d" % i), lab, extra))
    for i, j in top.covers():
        lines.append("  %s -> %s;" % (_dot_id("n%d" % i), _dot_id("n%d" % j)))
    lines.append("}")
    return "\n".join(lines) + "\n"


def specialization_pairs(fs):
    """Pairs (i, j) with every open set containing i also containing j."""
    pairs = []
    for i in range(len(fs.points)):
        for j in range(len(fs.points)):
            if i == j:
                continue
            if all(j in o for o in fs.opens if i in o):
                pairs.append((i, j))
    return pairs


def dot_space(fs, graph_name="space"):
    """DOT digraph of the specialization relation of a finite space.

    An edge x -> y states that every open set containing x contains y.
    Transitive edges are dropped when a shorter route exists.
    """
    rel = set(specialization_pairs(fs))
    reduced = []
    for i, j in sorted(rel):
        if any((i, k) in rel and (k, j) in rel for k in range(len(fs.points))
               if k != i and k != j):
            continue
        reduced.append((i, j))
    lines = ["digraph %s {" % _dot_id(graph_name), "  rankdir=BT;",
             "  node [shape=ellipse, fontname=\"monospace\"];"]
    for i, p in enumerate(fs.points):
        lines.append("  %s [label=\"%s\"];" % (_dot_id("p%d" % i), p))
    for i, j in reduced:
        lines.append("  %s -> %s;" % (_dot_id("p%d" % i), _dot_id("p%d" % j)))
    lines.append("}")
    return "\n".join(lines) + "\n"


def _dot_id(s):
    return "".join(ch if ch.isalnum() or ch == "_" else "_" for ch in s)
