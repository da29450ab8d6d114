"""Command line driver.

``nct <command> <model-file> [options]`` parses a model document and
dispatches to the engine.  Commands operate on every block of the
relevant kind, in document order; ``--name`` narrows to one block.

Exit codes: 0 when the requested validation succeeds, 1 when it fails
(the report still prints, with witnesses), 2 on malformed input or a
command/document mismatch.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import figures, report
from .completion import completion, filter_minimum, spectrum
from .core import commutative_shadow, validate_skew
from .dynamics import dnt_report, moment_space, observed_truth, validate_system
from .errors import (EngineError, IrrationalSpectrum, PreconditionFailed,
                     UnknownReference)
from .hilbert import (line, op_spec, pseudo_place_laws, reconstruct_filtration,
                      register_lines, spectral_family_of, sublattice_closure)
from .model import DynFiltrationSpec, HilbertSpec, parse_model, serialize_model
from .sheaves import (DynPresheaf, Presheaf, bottom_section, check_ltf,
                      identify_stalks, is_separated, moment_presheaf, sheafify,
                      stalk, validate_presheaf)
from .spectral import (Filtration, dynamical_spectral, gamma_points,
                       level_meet_law, observable, observable_completion,
                       validate_filtration)

COMMANDS = ("check", "shadow", "complete", "spectrum", "dnt", "observe",
            "moment", "stalks", "separated", "sheafify", "ltf", "theorem34",
            "spectralfam", "observable", "hilbert", "export")


def _parse_args(argv):
    ap = argparse.ArgumentParser(
        prog="nct",
        description="finite skew topologies: validation, completion, "
                    "dynamics, sheaves, spectral families")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("model", help="model document file")
    ap.add_argument("--name", help="operate on a single named block")
    ap.add_argument("--at", help="instant (timeline label or index)")
    ap.add_argument("--point-kind", choices=("minimal", "irreducible"),
                    default="minimal")
    ap.add_argument("--strict", action="store_true",
                    help="also require the optional axiom or flag "
                         "(cover axiom; separatedness; closure gaps)")
    ap.add_argument("--format", choices=("json", "text", "dot"),
                    default="json")
    ap.add_argument("--cap", type=int, default=2000,
                    help="search cap for closure constructions")
    ap.add_argument("--figures", metavar="DIR",
                    help="render figures into DIR and list them in the report")
    ap.add_argument("--predicate", default="shadow-is-DVT",
                    help="statement name for the observe command")
    return ap.parse_args(argv)


def _pick(mapping, doc, kind, ns):
    """Blocks of one kind in document order, optionally narrowed by name."""
    if ns.name is not None:
        if ns.name not in mapping:
            raise UnknownReference("no %s block named %r" % (kind, ns.name),
                                   witness=(ns.name,))
        return [(ns.name, mapping[ns.name])]
    out = [(nm, mapping[nm]) for k, nm in doc.order
           if k == kind and nm in mapping]
    if not out:
        raise UnknownReference("document has no %s block" % kind)
    return out


def _resolve_at(system, raw):
    if raw is None:
        return 0
    labels = [str(l) for l in system.timeline.labels]
    if raw in labels:
        return labels.index(raw)
    try:
        t = int(raw)
    except ValueError:
        raise UnknownReference("unknown instant %r" % raw, witness=(raw,))
    if not 0 <= t < len(labels):
        raise UnknownReference("instant %r outside the timeline" % raw,
                               witness=(raw,))
    return t


def _holds(status):
    return bool(getattr(status, "holds", status))


# --- handlers: each returns (body, ok, figure jobs, dot texts) ---


def _cmd_check(doc, ns):
    body, ok, figs, dots = {}, True, [], []
    for name, top in _pick(doc.posets, doc, "poset", ns):
        rep = validate_skew(top, require_axiom_v=ns.strict)
        body[name] = {"axioms": rep, "valid": rep.valid}
        ok = ok and rep.valid
        figs.append(("check_%s.png" % name,
                     lambda p, t=top, n=name: figures.hasse_figure(t, p, n)))
        dots.append(report.dot_hasse(top, name))
    return body, ok, figs, dots


def _cmd_shadow(doc, ns):
    body, ok, figs, dots = {}, True, [], []
    for name, top in _pick(doc.posets, doc, "poset", ns):
        sh = commutative_shadow(top)
        st = sh.as_topology()
        body[name] = {
            "idempotents": [top.labels[i] for i in sh.carrier],
            "modular": sh.modular,
            "laws": sh.laws,
            "closed": sh.closed,
            "shadow": report.topology_body(st),
        }
        ok = ok and _holds(sh.modular) and _holds(sh.closed)
        figs.append(("shadow_%s.png" % name,
                     lambda p, t=st, n=name: figures.hasse_figure(
                         t, p, "shadow of %s" % n)))
        dots.append(report.dot_hasse(st, "shadow_%s" % name))
    return body, ok, figs, dots


def _cmd_complete(doc, ns):
    body, ok, figs, dots = {}, True, [], []
    for name, top in _pick(doc.posets, doc, "poset", ns):
        c = completion(top)
        body[name] = {
            "classes": [sorted(top.labels[i] for i in cl) for cl in c.classes],
            "canonical": {top.labels[i]: c.canonical[i]
                          for i in range(top.n)},
            "strong": list(c.strong),
            "canonical_bijective": c.canonical_bijective,
            "canonical_hom": c.canonical_hom,
            "idempotent_transport": c.idempotent_transport,
            "completion": report.topology_body(c.space),
        }
        ok = (ok and _holds(c.canonical_hom) and _holds(c.canonical_bijective)
              and _holds(c.idempotent_transport))
        figs.append(("complete_%s.png" % name,
                     lambda p, t=c.space, n=name: figures.hasse_figure(
                         t, p, "C(%s)" % n)))
        dots.append(report.dot_hasse(c.space, "completion_%s" % name))
    return body, ok, figs, dots


def _cmd_spectrum(doc, ns):
    body, figs, dots = {}, [], []
    for name, top in _pick(doc.posets, doc, "poset", ns):
        sp = spectrum(top, ns.point_kind)
        body[name] = {
            "kind": sp.kind,
            "points": [sorted(top.labels[i] for i in f)
                       for f in sp.point_filters],
            "strong": list(sp.strong),
            "space": sp.space,
        }
        figs.append(("spectrum_%s.png" % name,
                     lambda p, s=sp.space, n=name: figures.space_figure(
                         s, p, "%s points of %s" % (ns.point_kind, n))))
        dots.append(report.dot_space(sp.space, "spectrum_%s" % name))
    return body, True, figs, dots


def _cmd_dnt(doc, ns):
    body, ok = {}, True
    for name, system in _pick(doc.systems, doc, "system", ns):
        validate_system(system)
        rep = dnt_report(system)
        body[name] = {"clauses": rep.clauses}
        ok = ok and all(c.holds for c in rep.clauses)
    return body, ok, [], []


def _cmd_observe(doc, ns):
    body, ok = {}, True
    for name, system in _pick(doc.systems, doc, "system", ns):
        t0 = _resolve_at(system, ns.at)
        tr = observed_truth(system, ns.predicate, t0)
        if tr is None:
            body[name] = {"predicate": ns.predicate, "t0": t0,
                          "interval": None}
            ok = False
        else:
            body[name] = {"predicate": tr.predicate, "t0": tr.t0,
                          "interval": list(tr.bounds),
                          "members": list(tr.members),
                          "pointwise": tr.pointwise}
    return body, ok, [], []


def _cmd_moment(doc, ns):
    body, ok, figs, dots = {}, True, [], []
    for name, system in _pick(doc.systems, doc, "system", ns):
        t = _resolve_at(system, ns.at)
        ms = moment_space(system, t)
        body[name] = {"moment": ms, "strings": list(ms.strings),
                      "opens": len(ms.family), "report": ms.report}
        if ns.strict:
            ok = (ok and _holds(ms.report.intersections)
                  and _holds(ms.report.monotone) and not ms.report.union_gaps)
        figs.append(("moment_%s_t%d.png" % (name, t),
                     lambda p, s=ms.space, n=name, tt=t:
                     figures.space_figure(s, p, "Spec(%s, t=%d)" % (n, tt))))
        figs.append(("strings_%s_t%d.png" % (name, t),
                     lambda p, sy=system, st=ms.strings, n=name:
                     figures.timeline_figure(sy, st, p, "strings of %s" % n)))
        dots.append(report.dot_space(ms.space, "moment_%s" % name))
    return body, ok, figs, dots


def _static_presheaves(doc, ns):
    return [(n, p) for n, p in _pick(doc.presheaves, doc, "presheaf", ns)
            if isinstance(p, Presheaf)]


def _dyn_presheaves(doc, ns):
    return [(n, p) for n, p in _pick(doc.presheaves, doc, "presheaf", ns)
            if isinstance(p, DynPresheaf)]


def _cmd_stalks(doc, ns):
    picked = _static_presheaves(doc, ns)
    if not picked:
        raise UnknownReference("stalks needs a presheaf block over a poset")
    body, ok, figs = {}, True, []
    for name, p in picked:
        validate_presheaf(p)
        base = p.base
        pts = sorted(filter_minimum(base, f)
                     for f in spectrum(base, ns.point_kind).point_filters)
        results = [stalk(p, pt, ns.point_kind) for pt in pts]
        body[name] = {
            "points": [base.labels[pt] for pt in pts],
            "stalks": [{"point": base.labels[r.point], "dim": r.dim,
                        "iso": r.iso, "cofinal": r.cofinal} for r in results],
            "bottom_section": bottom_section(p),
        }
        ok = ok and all(_holds(r.iso) and _holds(r.cofinal) for r in results)
        figs.append(("stalks_%s.png" % name,
                     lambda pth, t=base, n=name: figures.hasse_figure(
                         t, pth, "site of %s" % n)))
    return body, ok, figs, []


def _cmd_separated(doc, ns):
    body, ok, figs = {}, True, []
    for name, p in _pick(doc.presheaves, doc, "presheaf", ns):
        if isinstance(p, Presheaf):
            validate_presheaf(p)
            rep = is_separated(p)
            body[name] = {"separated": rep}
        else:
            t = _resolve_at(p.system, ns.at)
            mp = moment_presheaf(p, t)
            rep = is_separated(mp)
            body[name] = {"at": t, "separated": rep}
        ok = ok and rep.separated
    return body, ok, figs, []


def _cmd_sheafify(doc, ns):
    picked = _dyn_presheaves(doc, ns)
    if not picked:
        raise UnknownReference(
            "sheafify needs a presheaf block over a system")
    body, ok, figs = {}, True, []
    for name, dp in picked:
        t = _resolve_at(dp.system, ns.at)
        mp = moment_presheaf(dp, t)
        r = sheafify(mp)
        opens = sorted(mp.moment.space.opens, key=lambda o: (len(o), sorted(o)))
        dims = {",".join(sorted(mp.moment.space.points[i] for i in o)) or "-":
                r.sheaf.dims[o] for o in opens}
        body[name] = {"at": t, "dims": dims, "gluing": r.gluing,
                      "functorial": r.functorial}
        ok = ok and _holds(r.gluing) and _holds(r.functorial)
        figs.append(("sheafify_%s_t%d.png" % (name, t),
                     lambda p, s=mp.moment.space, n=name:
                     figures.space_figure(s, p, "moment space of %s" % n)))
    return body, ok, figs, []


def _cmd_ltf(doc, ns):
    picked = _dyn_presheaves(doc, ns)
    if not picked:
        raise UnknownReference("ltf needs a presheaf block over a system")
    body, ok = {}, True
    for name, dp in picked:
        t = _resolve_at(dp.system, ns.at)
        rep = check_ltf(dp, t)
        body[name] = {"at": t, "report": rep}
        ok = ok and rep.holds
    return body, ok, [], []


def _cmd_theorem34(doc, ns):
    picked = _dyn_presheaves(doc, ns)
    if not picked:
        raise UnknownReference(
            "theorem34 needs a presheaf block over a system")
    body, ok = {}, True
    for name, dp in picked:
        t = _resolve_at(dp.system, ns.at)
        try:
            rep = identify_stalks(dp, t)
        except PreconditionFailed as e:
            body[name] = {"at": t, "precondition_failed": str(e),
                          "witness": list(e.witness or ())}
            ok = False
            continue
        body[name] = {"at": t, "ltf": rep.ltf,
                      "identifications": rep.identifications}
        ok = ok and all(_holds(pi.invertible) and _holds(pi.compatible)
                        for pi in rep.identifications)
    return body, ok, [], []


def _cmd_spectralfam(doc, ns):
    body, ok, figs = {}, True, []
    for name, f in _pick(doc.filtrations, doc, "filtration", ns):
        if isinstance(f, Filtration):
            rep = validate_filtration(f, strict=False)
            body[name] = {"report": rep,
                          "level_meet": level_meet_law(f),
                          "gamma_point": gamma_points(f)}
            ok = ok and _holds(rep.monotone) and _holds(rep.top_join)
            if ns.strict:
                ok = ok and rep.spectral
            figs.append(("spectralfam_%s.png" % name,
                         lambda p, ff=f, n=name: figures.levels_figure(
                             ff, p, n)))
        else:
            t = f.at if ns.at is None else _resolve_at(f.system, ns.at)
            rep = dynamical_spectral(f.system, t, f.gamma, f.strings)
            body[name] = {"at": t, "report": rep}
            ok = ok and _holds(rep.monotone)
            if ns.strict:
                ok = ok and not rep.failures
    return body, ok, figs, []


def _cmd_observable(doc, ns):
    body, ok, figs = {}, True, []
    statics = [(n, f) for n, f in _pick(doc.filtrations, doc,
                                        "filtration", ns)
               if isinstance(f, Filtration)]
    if not statics:
        raise UnknownReference(
            "observable needs a filtration block over a poset")
    for name, f in statics:
        obs = observable(f)
        body[name] = {"observable": obs,
                      "completion": observable_completion(f)}
        ok = (ok and _holds(obs.meet_law) and _holds(obs.domain_is_union))
        figs.append(("observable_%s.png" % name,
                     lambda p, o=obs.observable, t=f.base, n=name:
                     figures.sigma_figure(o, t, p, "sigma of %s" % n)))
    return body, ok, figs, []


def _cmd_hilbert(doc, ns):
    body, ok, figs, dots = {}, True, [], []
    for name, spec in _pick(doc.hilberts, doc, "hilbert", ns):
        if not spec.operator:
            gens = [line(v) for v in spec.generators]
            names = tuple("g%d" % i for i in range(len(gens)))
            cl = sublattice_closure(gens, cap=ns.cap, names=names, name=name)
            rep = validate_skew(cl.topology, require_axiom_v=ns.strict)
            body[name] = {"size": len(cl.subspaces),
                          "elements": list(cl.topology.labels),
                          "axioms": rep, "valid": rep.valid}
            ok = ok and rep.valid
            figs.append(("hilbert_%s.png" % name,
                         lambda p, t=cl.topology, n=name:
                         figures.hasse_figure(t, p, n)))
            dots.append(report.dot_hasse(cl.topology, "hilbert_%s" % name))
            continue
        try:
            op = op_spec(spec.operator)
        except IrrationalSpectrum as e:
            body[name] = {"irrational_spectrum": str(e),
                          "witness": list(e.witness or ())}
            ok = False
            continue
        fam = spectral_family_of(op, cap=ns.cap, name=name)
        vectors = spec.lines or [tuple(row) for lv in _eigen_rows(op, fam)
                                 for row in lv]
        pp = register_lines(fam, vectors)
        join_law, meet_law = pseudo_place_laws(fam, fam.closure.subspaces)
        recon = reconstruct_filtration(pp, fam, cap=ns.cap)
        body[name] = {
            "eigenvalues": list(op.eigenvalues),
            "multiplicities": list(op.multiplicities),
            "charpoly": list(op.charpoly),
            "gamma": [str(g) for g in fam.gamma.labels],
            "level_dims": [lv.rank for lv in fam.levels],
            "closure_size": len(fam.closure.subspaces),
            "place_values": list(pp.values),
            "spanning": pp.spanning,
            "join_law": join_law,
            "meet_law": meet_law,
            "reconstruction": {"matches": recon.matches,
                               "unique_maximum": recon.unique_maximum},
        }
        ok = (ok and _holds(pp.spanning) and _holds(recon.matches)
              and _holds(join_law) and _holds(meet_law))
        figs.append(("hilbert_%s.png" % name,
                     lambda p, f=fam, n=name: figures.dims_figure(
                         f, p, "levels of %s" % n)))
    return body, ok, figs, dots


def _eigen_rows(op, fam):
    from .hilbert import eigenspace
    return [eigenspace(op, ev).rows for ev in op.eigenvalues]


def _cmd_export(doc, ns):
    text = serialize_model(doc)
    body = {"text": text,
            "blocks": [{"kind": k, "name": n} for k, n in doc.order]}
    figs, dots = [], []
    for name, top in doc.posets.items():
        figs.append(("export_%s.png" % name,
                     lambda p, t=top, n=name: figures.hasse_figure(t, p, n)))
        dots.append(report.dot_hasse(top, name))
    return body, True, figs, dots


_HANDLERS = {
    "check": _cmd_check, "shadow": _cmd_shadow, "complete": _cmd_complete,
    "spectrum": _cmd_spectrum, "dnt": _cmd_dnt, "observe": _cmd_observe,
    "moment": _cmd_moment, "stalks": _cmd_stalks,
    "separated": _cmd_separated, "sheafify": _cmd_sheafify,
    "ltf": _cmd_ltf, "theorem34": _cmd_theorem34,
    "spectralfam": _cmd_spectralfam, "observable": _cmd_observable,
    "hilbert": _cmd_hilbert, "export": _cmd_export,
}


def main(argv=None):
    ns = _parse_args(argv)
    try:
        with open(ns.model, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        print("error: %s" % e, file=sys.stderr)
        return 2
    try:
        doc = parse_model(text)
        body, ok, figs, dots = _HANDLERS[ns.command](doc, ns)
    except EngineError as e:
        loc = getattr(e, "line", None)
        where = " (line %d)" % loc if loc else ""
        print("error: %s%s" % (e, where), file=sys.stderr)
        return 2
    if ns.command == "export" and ns.format == "text":
        sys.stdout.write(body["text"])
        return 0
    if ns.format == "dot":
        if not dots:
            print("error: %s has no dot rendering" % ns.command,
                  file=sys.stderr)
            return 2
        sys.stdout.write("\n".join(dots))
        return 0 if ok else 1
    payload = report.payload(ns.command, body)
    if ns.figures:
        os.makedirs(ns.figures, exist_ok=True)
        written = []
        for fname, job in figs:
            path = os.path.join(ns.figures, fname)
            job(path)
            written.append(path)
        payload["figures"] = written
    if ns.format == "json":
        sys.stdout.write(report.render_json(payload))
    else:
        sys.stdout.write(report.render_text(payload))
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
