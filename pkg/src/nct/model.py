"""Text format for models: posets, systems, presheaves, filtrations.

Line-oriented blocks::

    poset M3 {
      elements: 0 a b c 1
      order: 0<a 0<b 0<c a<1 b<1 c<1
      meet: default
      join: default
    }

Entries may also be separated by ``;`` on one line.  ``meet: default``
derives the table from the order as unique greatest lower bounds; rows
``meet x y -> z`` override single entries (a table may also be fully
explicit with ``meet: explicit`` plus one row per pair).  Matrices are
bracketed rows of rationals, ``[1 0] [0 1/2]``.  Timelines are ordered
label lists; transition maps are given per consecutive pair.

The serializer emits a canonical text that reparses to the same
document; fixture files in the repository are its output.
"""

from dataclasses import dataclass
from fractions import Fraction

from .core import SkewTopology, order_from_pairs
from .dynamics import AccessibleString, DynSystem, TimeLine
from .errors import (
    AmbiguousDefaultTable,
    MalformedTable,
    ModelSyntaxError,
    UnknownReference,
)
from .sheaves import DynPresheaf, Presheaf
from .spectral import Filtration, GammaChain

_KINDS = ("poset", "system", "presheaf", "filtration", "hilbert")
_FORBIDDEN = set("{}:;#[]<>")


@dataclass(frozen=True)
class DynFiltrationSpec:
    """Stringwise levels over a system, waiting for the spectral engine."""

    system_name: str
    system: DynSystem
    at: int
    gamma: GammaChain
    strings: tuple               # AccessibleString per label


@dataclass(frozen=True)
class HilbertSpec:
    dim: int
    operator: tuple              # matrix rows, or () when closure-only
    generators: tuple            # vectors for closure
    lines: tuple                 # vectors for the pseudo-place


@dataclass
class ModelDocument:
    order: tuple                 # (kind, name) in file order
    posets: dict
    systems: dict
    presheaves: dict             # Presheaf or DynPresheaf
    filtrations: dict            # Filtration or DynFiltrationSpec
    hilberts: dict

    def block(self, name):
        for kind, n in self.order:
            if n == name:
                return kind, getattr(self, kind_attr(kind))[name]
        raise UnknownReference("no block named %r" % name)


def kind_attr(kind):
    return {"poset": "posets", "system": "systems",
            "presheaf": "presheaves", "filtration": "filtrations",
            "hilbert": "hilberts"}[kind]


# ---------------------------------------------------------------------------
# tokenizing
# ---------------------------------------------------------------------------

def _entries(text):
    """Yield (line_number, header_or_None, tokens) per block structure."""
    blocks = []
    current = None
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        while line:
            if current is None:
                # expect: kind NAME {  [entries...]  maybe on one line
                if "{" not in line:
                    raise ModelSyntaxError("expected a block header", line=ln)
                head, line = line.split("{", 1)
                parts = head.split()
                if len(parts) != 2:
                    raise ModelSyntaxError(
                        "block header needs `kind NAME {`", line=ln)
                kind, name = parts
                if kind not in _KINDS:
                    raise ModelSyntaxError("unknown block kind %r" % kind,
                                           line=ln)
                if any(c in _FORBIDDEN for c in name):
                    raise ModelSyntaxError("bad character in name %r" % name,
                                           line=ln)
                current = {"kind": kind, "name": name, "line": ln,
                           "entries": []}
                line = line.strip()
                continue
            if line.startswith("}"):
                blocks.append(current)
                current = None
                line = line[1:].strip()
                continue
            piece, _, line = line.partition(";")
            piece = piece.strip()
            line = line.strip()
            if piece.endswith("}"):
                piece, line = piece[:-1].strip(), "}" + line
            if piece:
                current["entries"].append((ln, piece))
    if current is not None:
        raise ModelSyntaxError("block %r never closed" % current["name"],
                               line=current["line"])
    return blocks


def _split_entry(ln, piece):
    if ":" not in piece:
        raise ModelSyntaxError("entry needs `key: values`: %r" % piece,
                               line=ln)
    key, _, val = piece.partition(":")
    return key.split(), val.split()


def _frac(tok, ln):
    try:
        return Fraction(tok)
    except (ValueError, ZeroDivisionError):
        raise ModelSyntaxError("bad rational %r" % tok, line=ln)


def _int(tok, ln):
    try:
        return int(tok)
    except ValueError:
        raise ModelSyntaxError("expected integer, got %r" % tok, line=ln)


def _matrix(tokens, ln):
    """Bracketed rows: [1 0] [0 1/2]; [] is the empty (0-row) matrix."""
    rows = []
    cur = None
    for tok in tokens:
        while tok:
            if cur is None:
                if not tok.startswith("["):
                    raise ModelSyntaxError("matrix rows start with [",
                                           line=ln)
                cur = []
                tok = tok[1:]
                continue
            if "]" in tok:
                head, _, tok = tok.partition("]")
                if head:
                    cur.append(_frac(head, ln))
                rows.append(cur)
                cur = None
                continue
            if tok:
                cur.append(_frac(tok, ln))
                tok = ""
    if cur is not None:
        raise ModelSyntaxError("unterminated matrix row", line=ln)
    width = {len(r) for r in rows if r}
    if len(width) > 1:
        raise ModelSyntaxError("ragged matrix", line=ln)
    # `[]` stands for the matrix with no rows; empty rows never survive
    return [r for r in rows if r]


# ---------------------------------------------------------------------------
# block builders
# ---------------------------------------------------------------------------

def _unique_glb(leq, n, x, y, lower=True):
    rel = (lambda i, j: leq[i][j]) if lower else (lambda i, j: leq[j][i])
    bounds = [z for z in range(n) if rel(z, x) and rel(z, y)]
    best = [z for z in bounds if all(rel(w, z) for w in bounds)]
    return best[0] if len(best) == 1 else None


def _build_poset(block):
    elements = None
    orderpairs = []
    meet_mode = join_mode = None
    overrides = {"meet": {}, "join": {}}
    ln0 = block["line"]
    for ln, piece in block["entries"]:
        toks = piece.split()
        if ":" not in piece:
            # bare rows: `meet x y -> z`
            if (len(toks) == 5 and toks[0] in ("meet", "join")
                    and toks[3] == "->"):
                overrides[toks[0]][(toks[1], toks[2])] = (toks[4], ln)
                continue
            raise ModelSyntaxError("unknown poset entry %r" % piece, line=ln)
        key, val = _split_entry(ln, piece)
        if key == ["elements"]:
            elements = val
        elif key == ["order"]:
            for pair in val:
                if "<" not in pair:
                    raise ModelSyntaxError("order pairs look like x<y",
                                           line=ln)
                a, _, b = pair.partition("<")
                orderpairs.append((a, b, ln))
        elif key in (["meet"], ["join"]):
            mode = val[0] if val else ""
            if mode not in ("default", "explicit"):
                raise ModelSyntaxError(
                    "%s: wants `default` or `explicit`" % key[0], line=ln)
            if key == ["meet"]:
                meet_mode = mode
            else:
                join_mode = mode
        elif key in (["bottom"], ["top"]):
            pass                  # redundant; derived from the order
        else:
            raise ModelSyntaxError("unknown poset entry %r" % piece, line=ln)
    if elements is None:
        raise ModelSyntaxError("poset needs `elements:`", line=ln0)
    for e in elements:
        if any(c in _FORBIDDEN for c in e):
            raise ModelSyntaxError("bad character in element %r" % e,
                                   line=ln0)
    index = {e: k for k, e in enumerate(elements)}
    if len(index) != len(elements):
        raise ModelSyntaxError("duplicate element label", line=ln0)
    for a, b, ln in orderpairs:
        for e in (a, b):
            if e not in index:
                raise UnknownReference("unknown element %r in order" % e,
                                       line=ln)
    try:
        leq = order_from_pairs(elements, [(a, b) for a, b, _ in orderpairs])
    except MalformedTable as exc:
        raise ModelSyntaxError(str(exc), line=ln0)
    n = len(elements)

    def table(which, mode, lower):
        rows = [[None] * n for _ in range(n)]
        for (xa, ya), (za, ln) in overrides[which].items():
            for e in (xa, ya, za):
                if e not in index:
                    raise UnknownReference("unknown element %r" % e, line=ln)
            rows[index[xa]][index[ya]] = index[za]
        for x in range(n):
            for y in range(n):
                if rows[x][y] is not None:
                    continue
                if mode == "explicit":
                    raise ModelSyntaxError(
                        "missing %s row for %s %s"
                        % (which, elements[x], elements[y]), line=ln0)
                z = _unique_glb(leq, n, x, y, lower)
                if z is None:
                    raise AmbiguousDefaultTable(
                        "no unique %s for %s, %s"
                        % ("glb" if lower else "lub", elements[x],
                           elements[y]),
                        witness=(elements[x], elements[y]))
                rows[x][y] = z
        return rows

    meet = table("meet", meet_mode or "default", True)
    join = table("join", join_mode or "default", False)
    return SkewTopology.build(elements, leq, meet, join, name=block["name"])


def _build_system(block, posets):
    timeline = None
    spaces = None
    kind = "minimal"
    step_rows = {}
    ln0 = block["line"]
    for ln, piece in block["entries"]:
        key, val = _split_entry(ln, piece)
        if key == ["timeline"]:
            timeline = val
        elif key == ["spaces"]:
            spaces = [(v, ln) for v in val]
        elif key == ["points"]:
            if val not in (["minimal"], ["irreducible"]):
                raise ModelSyntaxError("points: minimal or irreducible",
                                       line=ln)
            kind = val[0]
        elif key[0] == "map" and len(key) == 2:
            if "->" not in key[1]:
                raise ModelSyntaxError("map key looks like `map t0->t1`",
                                       line=ln)
            a, _, b = key[1].partition("->")
            step_rows[(a, b)] = (val, ln)
        else:
            raise ModelSyntaxError("unknown system entry %r" % piece, line=ln)
    if timeline is None or spaces is None:
        raise ModelSyntaxError("system needs `timeline:` and `spaces:`",
                               line=ln0)
    if len(spaces) != len(timeline):
        raise ModelSyntaxError("one space per instant", line=ln0)
    tpos = {t: k for k, t in enumerate(timeline)}
    if len(tpos) != len(timeline):
        raise ModelSyntaxError("duplicate timeline label", line=ln0)
    resolved = []
    for name, ln in spaces:
        if name not in posets:
            raise UnknownReference("unknown poset %r" % name, line=ln)
        resolved.append(posets[name])
    steps = []
    for k in range(len(timeline) - 1):
        a, b = timeline[k], timeline[k + 1]
        if (a, b) not in step_rows:
            raise ModelSyntaxError("missing map %s->%s" % (a, b), line=ln0)
        val, ln = step_rows.pop((a, b))
        src, dst = resolved[k], resolved[k + 1]
        step = [None] * src.n
        for pair in val:
            if "->" not in pair:
                raise ModelSyntaxError("map entries look like x->y", line=ln)
            xa, _, ya = pair.partition("->")
            if xa not in src.labels:
                raise UnknownReference("unknown element %r" % xa, line=ln)
            if ya not in dst.labels:
                raise UnknownReference("unknown element %r" % ya, line=ln)
            step[src.index(xa)] = dst.index(ya)
        if any(s is None for s in step):
            missing = src.labels[step.index(None)]
            raise ModelSyntaxError("map %s->%s misses element %s"
                                   % (a, b, missing), line=ln)
        steps.append(tuple(step))
    if step_rows:
        (a, b), (_, ln) = next(iter(step_rows.items()))
        raise ModelSyntaxError(
            "map %s->%s is not a consecutive pair" % (a, b), line=ln)
    return DynSystem.from_steps(TimeLine(tuple(timeline)), resolved, steps,
                                point_kind=kind, name=block["name"])


def _build_presheaf(block, posets, systems):
    base = system = None
    dims = {}
    rhos = {}
    cmps = {}
    classical = None
    ln0 = block["line"]
    for ln, piece in block["entries"]:
        key, val = _split_entry(ln, piece)
        if key == ["base"]:
            if val[0] not in posets:
                raise UnknownReference("unknown poset %r" % val[0], line=ln)
            base = posets[val[0]]
        elif key == ["system"]:
            if val[0] not in systems:
                raise UnknownReference("unknown system %r" % val[0], line=ln)
            system = systems[val[0]]
        elif key[0] == "dim":
            dims[tuple(key[1:])] = (_int(val[0], ln), ln)
        elif key[0] == "rho":
            rhos[tuple(key[1:])] = (_matrix(val, ln), ln)
        elif key[0] == "cmp" and len(key) == 3:
            a, _, b = key[1].partition("->")
            cmps[(a, b, key[2])] = (_matrix(val, ln), ln)
        elif key == ["classical"]:
            classical = (val, ln)
        else:
            raise ModelSyntaxError("unknown presheaf entry %r" % piece,
                                   line=ln)
    if (base is None) == (system is None):
        raise ModelSyntaxError(
            "presheaf needs exactly one of `base:` or `system:`", line=ln0)
    if base is not None:
        d = {}
        for key, (v, ln) in dims.items():
            if len(key) != 1 or key[0] not in base.labels:
                raise UnknownReference("unknown element %r" % (key,), line=ln)
            d[base.index(key[0])] = v
        r = {}
        for key, (m, ln) in rhos.items():
            if len(key) != 2:
                raise ModelSyntaxError("rho key is `rho small big`", line=ln)
            for e in key:
                if e not in base.labels:
                    raise UnknownReference("unknown element %r" % e, line=ln)
            r[(base.index(key[0]), base.index(key[1]))] = m
        cls = None
        if classical is not None:
            val, ln = classical
            for e in val:
                if e not in base.labels:
                    raise UnknownReference("unknown element %r" % e, line=ln)
            cls = [base.index(e) for e in val]
        return Presheaf(base, d, r, classical=cls, name=block["name"])
    # dynamical: per-instant sheets plus comparison maps
    tl = system.timeline
    tpos = {str(t): k for k, t in enumerate(tl.labels)}
    sheet_dims = [dict() for _ in tl.times()]
    sheet_rhos = [dict() for _ in tl.times()]
    for key, (v, ln) in dims.items():
        if len(key) != 2 or key[0] not in tpos:
            raise UnknownReference("dim key is `dim t element`", line=ln)
        k = tpos[key[0]]
        sp = system.spaces[k]
        if key[1] not in sp.labels:
            raise UnknownReference("unknown element %r" % key[1], line=ln)
        sheet_dims[k][sp.index(key[1])] = v
    for key, (m, ln) in rhos.items():
        if len(key) != 3 or key[0] not in tpos:
            raise UnknownReference("rho key is `rho t small big`", line=ln)
        k = tpos[key[0]]
        sp = system.spaces[k]
        for e in key[1:]:
            if e not in sp.labels:
                raise UnknownReference("unknown element %r" % e, line=ln)
        sheet_rhos[k][(sp.index(key[1]), sp.index(key[2]))] = m
    sheets = [Presheaf(system.spaces[k], sheet_dims[k], sheet_rhos[k])
              for k in tl.times()]
    cmp = {}
    for (a, b, lam), (m, ln) in cmps.items():
        if a not in tpos or b not in tpos:
            raise UnknownReference("unknown instant in cmp key", line=ln)
        i, j = tpos[a], tpos[b]
        sp = system.spaces[i]
        if lam not in sp.labels:
            raise UnknownReference("unknown element %r" % lam, line=ln)
        cmp.setdefault((i, j), {})[sp.index(lam)] = m
    return DynPresheaf(system, sheets, cmp, name=block["name"])


def _build_filtration(block, posets, systems):
    base = system_name = None
    gamma = None
    levels = None
    at = None
    strings = {}
    ln0 = block["line"]
    for ln, piece in block["entries"]:
        key, val = _split_entry(ln, piece)
        if key == ["base"]:
            if val[0] not in posets:
                raise UnknownReference("unknown poset %r" % val[0], line=ln)
            base = posets[val[0]]
        elif key == ["system"]:
            if val[0] not in systems:
                raise UnknownReference("unknown system %r" % val[0], line=ln)
            system_name = val[0]
        elif key == ["gamma"]:
            gamma = GammaChain(tuple(_int(t, ln) for t in val))
        elif key == ["levels"]:
            levels = (val, ln)
        elif key == ["at"]:
            at = (val[0], ln)
        elif key[0] == "string" and len(key) == 2:
            strings[_int(key[1], ln)] = (val, ln)
        else:
            raise ModelSyntaxError("unknown filtration entry %r" % piece,
                                   line=ln)
    if gamma is None:
        raise ModelSyntaxError("filtration needs `gamma:`", line=ln0)
    if base is not None:
        if levels is None:
            raise ModelSyntaxError("filtration needs `levels:`", line=ln0)
        val, ln = levels
        if len(val) != gamma.n:
            raise ModelSyntaxError("one level per gamma label", line=ln)
        idx = []
        for e in val:
            if e not in base.labels:
                raise UnknownReference("unknown element %r" % e, line=ln)
            idx.append(base.index(e))
        return Filtration(base, gamma, tuple(idx), name=block["name"])
    if system_name is None:
        raise ModelSyntaxError(
            "filtration needs `base:` or `system:`", line=ln0)
    system = systems[system_name]
    tl = system.timeline
    tpos = {str(t): k for k, t in enumerate(tl.labels)}
    if at is None:
        raise ModelSyntaxError("stringwise filtration needs `at:`", line=ln0)
    atval, atln = at
    if atval not in tpos:
        raise UnknownReference("unknown instant %r" % atval, line=atln)
    anchor = tpos[atval]
    built = []
    for label in gamma.labels:
        if label not in strings:
            raise ModelSyntaxError("missing string for gamma label %s"
                                   % label, line=ln0)
        val, ln = strings.pop(label)
        support = []
        comps = []
        for tok in val:
            if ":" not in tok:
                raise ModelSyntaxError("string entries look like t:element",
                                       line=ln)
            ta, _, ea = tok.partition(":")
            if ta not in tpos:
                raise UnknownReference("unknown instant %r" % ta, line=ln)
            k = tpos[ta]
            sp = system.spaces[k]
            if ea not in sp.labels:
                raise UnknownReference("unknown element %r" % ea, line=ln)
            support.append(k)
            comps.append(sp.index(ea))
        built.append(AccessibleString(anchor, tuple(support), tuple(comps)))
    if strings:
        raise ModelSyntaxError("string label %s not in gamma"
                               % next(iter(strings)), line=ln0)
    return DynFiltrationSpec(system_name, system, anchor, gamma,
                             tuple(built))


def _build_hilbert(block):
    dim = None
    operator = ()
    generators = ()
    lines = ()
    ln0 = block["line"]
    for ln, piece in block["entries"]:
        key, val = _split_entry(ln, piece)
        if key == ["dim"]:
            dim = _int(val[0], ln)
        elif key == ["operator"]:
            operator = tuple(tuple(r) for r in _matrix(val, ln))
        elif key == ["generators"]:
            generators = tuple(tuple(r) for r in _matrix(val, ln))
        elif key == ["lines"]:
            lines = tuple(tuple(r) for r in _matrix(val, ln))
        else:
            raise ModelSyntaxError("unknown hilbert entry %r" % piece,
                                   line=ln)
    if dim is None:
        raise ModelSyntaxError("hilbert needs `dim:`", line=ln0)
    for rows, what in ((operator, "operator"), (generators, "generators"),
                       (lines, "lines")):
        for r in rows:
            if len(r) != dim:
                raise ModelSyntaxError("%s rows must have %d entries"
                                       % (what, dim), line=ln0)
    if not operator and not generators:
        raise ModelSyntaxError("hilbert needs `operator:` or `generators:`",
                               line=ln0)
    return HilbertSpec(dim, operator, generators, lines)


def parse_model(text):
    blocks = _entries(text)
    doc = ModelDocument((), {}, {}, {}, {}, {})
    seen = set()
    order = []
    for block in blocks:
        if block["name"] in seen:
            raise ModelSyntaxError("duplicate block name %r" % block["name"],
                                   line=block["line"])
        seen.add(block["name"])
        order.append((block["kind"], block["name"]))
    for block in blocks:
        kind, name = block["kind"], block["name"]
        if kind == "poset":
            doc.posets[name] = _build_poset(block)
        elif kind == "system":
            doc.systems[name] = _build_system(block, doc.posets)
        elif kind == "presheaf":
            doc.presheaves[name] = _build_presheaf(block, doc.posets,
                                                   doc.systems)
        elif kind == "filtration":
            doc.filtrations[name] = _build_filtration(block, doc.posets,
                                                      doc.systems)
        else:
            doc.hilberts[name] = _build_hilbert(block)
    doc.order = tuple(order)
    return doc


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def _fmt_frac(x):
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else "%d/%d" % (
        x.numerator, x.denominator)


def _fmt_matrix(m):
    if not m:
        return "[]"
    return " ".join("[" + " ".join(_fmt_frac(x) for x in row) + "]"
                    for row in m)


def _covers(top):
    out = []
    for a in top.elements():
        for b in top.elements():
            if a == b or not top.le(a, b):
                continue
            if any(top.lt(a, c) and top.lt(c, b) for c in top.elements()):
                continue
            out.append((a, b))
    return out


def _serialize_poset(name, top):
    lines = ["poset %s {" % name,
             "  elements: " + " ".join(top.labels),
             "  order: " + " ".join("%s<%s" % (top.labels[a], top.labels[b])
                                    for a, b in _covers(top))]
    for which, lower in (("meet", True), ("join", False)):
        table = top.meet if which == "meet" else top.join
        overrides = []
        explicit = False
        for x in top.elements():
            for y in top.elements():
                d = _unique_glb(top.leq, top.n, x, y, lower)
                if d is None:
                    explicit = True
                elif table[x][y] != d:
                    overrides.append((x, y))
        if explicit:
            lines.append("  %s: explicit" % which)
            for x in top.elements():
                for y in top.elements():
                    lines.append("  %s %s %s -> %s"
                                 % (which, top.labels[x], top.labels[y],
                                    top.labels[table[x][y]]))
        else:
            lines.append("  %s: default" % which)
            for x, y in overrides:
                lines.append("  %s %s %s -> %s"
                             % (which, top.labels[x], top.labels[y],
                                top.labels[table[x][y]]))
    lines.append("}")
    return lines


def _space_names(doc, system):
    names = []
    for sp in system.spaces:
        found = None
        for n, p in doc.posets.items():
            if p is sp or p == sp:
                found = n
                break
        if found is None:
            raise UnknownReference(
                "system %r uses a poset that has no block" % system.name)
        names.append(found)
    return names


def _serialize_system(doc, name, system):
    tl = system.timeline
    labels = [str(t) for t in tl.labels]
    lines = ["system %s {" % name,
             "  timeline: " + " ".join(labels),
             "  spaces: " + " ".join(_space_names(doc, system)),
             "  points: " + system.point_kind]
    for k in range(tl.n - 1):
        step = system.maps[(k, k + 1)]
        src, dst = system.spaces[k], system.spaces[k + 1]
        pairs = " ".join("%s->%s" % (src.labels[x], dst.labels[step[x]])
                         for x in src.elements())
        lines.append("  map %s->%s: %s" % (labels[k], labels[k + 1], pairs))
    lines.append("}")
    return lines


def _serialize_presheaf(doc, name, p):
    if isinstance(p, Presheaf):
        base_name = next(n for n, q in doc.posets.items() if q == p.base)
        lines = ["presheaf %s {" % name, "  base: " + base_name]
        for e in sorted(p.site()):
            lines.append("  dim %s: %d" % (p.base.labels[e], p.dims[e]))
        for (mu, lam) in sorted(p.res):
            lines.append("  rho %s %s: %s"
                         % (p.base.labels[mu], p.base.labels[lam],
                            _fmt_matrix(p.res[(mu, lam)])))
        if p.classical != frozenset(p.site()):
            lines.append("  classical: " + " ".join(
                p.base.labels[e] for e in sorted(p.classical)))
        lines.append("}")
        return lines
    system = p.system
    sys_name = next(n for n, s in doc.systems.items() if s is system)
    labels = [str(t) for t in system.timeline.labels]
    lines = ["presheaf %s {" % name, "  system: " + sys_name]
    for k in system.timeline.times():
        sheet = p.sheets[k]
        sp = system.spaces[k]
        for e in sorted(sheet.site()):
            lines.append("  dim %s %s: %d" % (labels[k], sp.labels[e],
                                              sheet.dims[e]))
        for (mu, lam) in sorted(sheet.res):
            lines.append("  rho %s %s %s: %s"
                         % (labels[k], sp.labels[mu], sp.labels[lam],
                            _fmt_matrix(sheet.res[(mu, lam)])))
    for (i, j) in sorted(p.cmp):
        if i == j:
            continue
        for lam in sorted(p.cmp[(i, j)]):
            lines.append("  cmp %s->%s %s: %s"
                         % (labels[i], labels[j],
                            system.spaces[i].labels[lam],
                            _fmt_matrix(p.cmp[(i, j)][lam])))
    lines.append("}")
    return lines


def _serialize_filtration(doc, name, f):
    if isinstance(f, Filtration):
        base_name = next(n for n, q in doc.posets.items() if q == f.base)
        return ["filtration %s {" % name,
                "  base: " + base_name,
                "  gamma: " + " ".join(str(g) for g in f.gamma.labels),
                "  levels: " + " ".join(f.base.labels[l] for l in f.levels),
                "}"]
    system = f.system
    labels = [str(t) for t in system.timeline.labels]
    lines = ["filtration %s {" % name,
             "  system: " + f.system_name,
             "  at: " + labels[f.at],
             "  gamma: " + " ".join(str(g) for g in f.gamma.labels)]
    for g, s in zip(f.gamma.labels, f.strings):
        toks = " ".join("%s:%s" % (labels[t],
                                   system.spaces[t].labels[s.component(t)])
                        for t in s.support)
        lines.append("  string %s: %s" % (g, toks))
    lines.append("}")
    return lines


def _serialize_hilbert(name, h):
    lines = ["hilbert %s {" % name, "  dim: %d" % h.dim]
    if h.operator:
        lines.append("  operator: " + _fmt_matrix(h.operator))
    if h.generators:
        lines.append("  generators: " + _fmt_matrix(h.generators))
    if h.lines:
        lines.append("  lines: " + _fmt_matrix(h.lines))
    lines.append("}")
    return lines


def serialize_model(doc):
    out = []
    for kind, name in doc.order:
        if kind == "poset":
            out.extend(_serialize_poset(name, doc.posets[name]))
        elif kind == "system":
            out.extend(_serialize_system(doc, name, doc.systems[name]))
        elif kind == "presheaf":
            out.extend(_serialize_presheaf(doc, name, doc.presheaves[name]))
        elif kind == "filtration":
            out.extend(_serialize_filtration(doc, name,
                                             doc.filtrations[name]))
        else:
            out.extend(_serialize_hilbert(name, doc.hilberts[name]))
        out.append("")
    return "\n".join(out).rstrip() + "\n"
