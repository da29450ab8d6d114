"""Time-indexed systems of topologies and their moment spaces.

A system is a finite chain of instants, one validated topology per
instant, and transition maps for every ordered pair of instants.  On top
of that sit the five dynamical axioms (DNT.1-5), observed truths over
open time intervals, temporal points with their minimal support interval,
the space-continuum conditions SC.1-4, accessible strings, and the
spectral topology those strings generate on the moment space.

Open intervals of the finite chain use strict index bounds with -1 and
len(T) admitted as sentinels, so one-sided and whole-line intervals are
open; in particular every singleton {t} = ]t-1, t+1[ is open.  Without
that, statements quantified over open neighbourhoods would be unsatisfiable
at the endpoints of a finite chain.
"""

from dataclasses import dataclass, field

from .completion import filter_minimum, spectrum, topology_from_basis, FiniteSpace
from .core import AxiomStatus, commutative_shadow, validate_skew
from .errors import (
    BrokenComposition,
    NonPreserving,
    NoSupportInterval,
    UnknownPredicate,
)


# ---------------------------------------------------------------------------
# timeline
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TimeLine:
    """Strict finite chain of instants; intervals are index pairs."""

    labels: tuple

    def __post_init__(self):
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("duplicate time labels")

    @property
    def n(self):
        return len(self.labels)

    def index(self, label):
        return self.labels.index(label)

    def times(self):
        return range(self.n)

    def closed_members(self, lo, hi):
        """[lo, hi] inclusive; empty when hi < lo."""
        return tuple(range(max(lo, 0), min(hi, self.n - 1) + 1))

    def open_members(self, lo, hi):
        """]lo, hi[ strict; lo = -1 and hi = n act as unbounded ends."""
        return tuple(k for k in range(self.n) if lo < k < hi)

    def open_intervals_containing(self, t):
        """All (lo, hi) with lo < t < hi, sentinels included."""
        out = []
        for lo in range(-1, t):
            for hi in range(t + 1, self.n + 1):
                out.append((lo, hi))
        return out

    def closed_intervals_containing(self, t):
        out = []
        for lo in range(0, t + 1):
            for hi in range(t, self.n):
                out.append((lo, hi))
        return out

    @staticmethod
    def interval_le(a, b):
        """Componentwise order on interval bounds: lower and upper both move right."""
        return a[0] <= b[0] and a[1] <= b[1]


def is_contiguous(times):
    ts = sorted(times)
    return all(b - a == 1 for a, b in zip(ts, ts[1:]))


# ---------------------------------------------------------------------------
# systems
# ---------------------------------------------------------------------------

class DynSystem:
    """Spaces per instant plus transition tables for every pair t <= t'.

    ``maps[(i, j)]`` sends element indices of space i to indices of space
    j.  ``from_steps`` builds all composites from the consecutive maps,
    which by construction satisfy the composition law; explicitly supplied
    full map families are validated instead.
    """

    def __init__(self, timeline, spaces, maps, point_kind="minimal", name=""):
        self.timeline = timeline
        self.spaces = tuple(spaces)
        self.maps = dict(maps)
        self.point_kind = point_kind
        self.name = name
        if len(self.spaces) != timeline.n:
            raise ValueError("one space per instant required")
        for i in timeline.times():
            self.maps.setdefault((i, i), tuple(range(self.spaces[i].n)))

    @classmethod
    def from_steps(cls, timeline, spaces, steps, point_kind="minimal", name=""):
        maps = {}
        for i in timeline.times():
            maps[(i, i)] = tuple(range(spaces[i].n))
        for i, step in enumerate(steps):
            maps[(i, i + 1)] = tuple(step)
        for span in range(2, timeline.n):
            for i in range(timeline.n - span):
                j = i + span
                prev = maps[(i, j - 1)]
                last = maps[(j - 1, j)]
                maps[(i, j)] = tuple(last[v] for v in prev)
        return cls(timeline, spaces, maps, point_kind, name)

    def phi(self, i, j):
        return self.maps[(i, j)]

    def apply(self, i, j, x):
        return self.maps[(i, j)][x]

    def space(self, i):
        return self.spaces[i]

    def sub_system(self, times, shadow=False, name=""):
        """Restriction to a subset of instants, optionally on the shadows."""
        times = tuple(sorted(times))
        if shadow:
            shadows = [commutative_shadow(self.spaces[i]) for i in times]
            spaces = [sh.as_topology() for sh in shadows]
            pos = [
                {e: k for k, e in enumerate(sh.carrier)} for sh in shadows
            ]
            maps = {}
            for a, i in enumerate(times):
                for b, j in enumerate(times):
                    if i > j:
                        continue
                    tbl = []
                    for e in shadows[a].carrier:
                        img = self.apply(i, j, e)
                        if img not in pos[b]:
                            raise NonPreserving(
                                "idempotent %s maps to non-idempotent %s"
                                % (self.spaces[i].labels[e],
                                   self.spaces[j].labels[img]),
                                witness=(i, j, e))
                        tbl.append(pos[b][img])
                    maps[(a, b)] = tuple(tbl)
        else:
            spaces = [self.spaces[i] for i in times]
            maps = {}
            for a, i in enumerate(times):
                for b, j in enumerate(times):
                    if i <= j:
                        maps[(a, b)] = self.maps[(i, j)]
        sub_line = TimeLine(tuple(self.timeline.labels[i] for i in times))
        return DynSystem(sub_line, spaces, maps, self.point_kind,
                         name or self.name)


@dataclass(frozen=True)
class SystemReport:
    """Functoriality plus the structural consequences that follow from it.

    ``directed_forward`` checks that images of principal directed sets are
    directed; ``idempotently_directed_forward`` the same with idempotent
    cofinal parts; ``pattern_restriction`` that every transition maps the
    pattern part into the pattern part, so restriction yields a system
    again.
    """

    space_reports: tuple
    identity: AxiomStatus
    composition: AxiomStatus
    preservation: AxiomStatus
    idempotents_forward: AxiomStatus
    directed_forward: AxiomStatus
    idempotently_directed_forward: AxiomStatus
    pattern_restriction: AxiomStatus

    @property
    def valid(self):
        return all(st.holds for st in (
            self.identity, self.composition, self.preservation,
            self.idempotents_forward, self.directed_forward,
            self.idempotently_directed_forward, self.pattern_restriction))


def validate_system(system, check_spaces=True):
    """Certify the system laws; hard violations raise with a witness."""
    tl = system.timeline
    space_reports = tuple(
        validate_skew(sp) if check_spaces else None for sp in system.spaces)

    for i in tl.times():
        tbl = system.phi(i, i)
        if tuple(tbl) != tuple(range(system.spaces[i].n)):
            raise BrokenComposition("map at (%s, %s) is not the identity"
                                    % (tl.labels[i], tl.labels[i]),
                                    witness=(i, i))
    for i in tl.times():
        for j in tl.times():
            if i > j:
                continue
            if (i, j) not in system.maps:
                raise BrokenComposition(
                    "missing map %s -> %s" % (tl.labels[i], tl.labels[j]),
                    witness=(i, j))
            tbl = system.phi(i, j)
            if len(tbl) != system.spaces[i].n or not all(
                    0 <= v < system.spaces[j].n for v in tbl):
                raise BrokenComposition(
                    "map %s -> %s has wrong carrier" % (tl.labels[i], tl.labels[j]),
                    witness=(i, j))
    for i in tl.times():
        for j in tl.times():
            for k in tl.times():
                if not i <= j <= k:
                    continue
                ab = system.phi(i, j)
                bc = system.phi(j, k)
                ac = system.phi(i, k)
                for x in range(system.spaces[i].n):
                    if bc[ab[x]] != ac[x]:
                        raise BrokenComposition(
                            "composite %s->%s->%s disagrees with %s->%s at %s"
                            % (tl.labels[i], tl.labels[j], tl.labels[k],
                               tl.labels[i], tl.labels[k],
                               system.spaces[i].labels[x]),
                            witness=(i, j, k, x))

    for i in tl.times():
        for j in tl.times():
            if i > j:
                continue
            src, dst = system.spaces[i], system.spaces[j]
            f = system.phi(i, j)
            if f[src.bottom] != dst.bottom or f[src.top] != dst.top:
                raise NonPreserving("map %s -> %s moves a bound"
                                    % (tl.labels[i], tl.labels[j]),
                                    witness=(i, j))
            for x in src.elements():
                for y in src.elements():
                    if src.le(x, y) and not dst.le(f[x], f[y]):
                        raise NonPreserving(
                            "order broken along %s -> %s at (%s, %s)"
                            % (tl.labels[i], tl.labels[j],
                               src.labels[x], src.labels[y]),
                            witness=(i, j, x, y, "order"))
                    if f[src.mt(x, y)] != dst.mt(f[x], f[y]):
                        raise NonPreserving(
                            "meet broken along %s -> %s at (%s, %s)"
                            % (tl.labels[i], tl.labels[j],
                               src.labels[x], src.labels[y]),
                            witness=(i, j, x, y, "meet"))
                    if f[src.jn(x, y)] != dst.jn(f[x], f[y]):
                        raise NonPreserving(
                            "join broken along %s -> %s at (%s, %s)"
                            % (tl.labels[i], tl.labels[j],
                               src.labels[x], src.labels[y]),
                            witness=(i, j, x, y, "join"))

    idem = _idempotents_forward(system)
    directed = _directed_forward(system, idempotent=False)
    idirected = _directed_forward(system, idempotent=True)
    pattern = _pattern_restriction(system)
    return SystemReport(space_reports, AxiomStatus(True), AxiomStatus(True),
                        AxiomStatus(True), idem, directed, idirected, pattern)


def _idempotents_forward(system):
    tl = system.timeline
    for i in tl.times():
        for j in tl.times():
            if i > j:
                continue
            f = system.phi(i, j)
            for x in system.spaces[i].idempotent_indices():
                if not system.spaces[j].is_idempotent(f[x]):
                    return AxiomStatus(False, (i, j, x))
    return AxiomStatus(True)


def _directed_forward(system, idempotent):
    """Images of principal directed sets stay directed (with idempotent
    cofinal parts when asked).  Principal sets suffice: every finite
    directed set has a minimum."""
    tl = system.timeline
    for i in tl.times():
        src = system.spaces[i]
        for j in tl.times():
            if i > j:
                continue
            dst = system.spaces[j]
            f = system.phi(i, j)
            for m in src.elements():
                if idempotent and not src.is_idempotent(m):
                    continue
                img = {f[x] for x in src.uppers(m)}
                for a in img:
                    for b in img:
                        if not any(dst.le(c, a) and dst.le(c, b) for c in img):
                            return AxiomStatus(False, (i, j, m, a, b))
                if idempotent:
                    # cofinal idempotent part: some idempotent member below each
                    for a in img:
                        if not any(dst.le(c, a) and dst.is_idempotent(c)
                                   for c in img):
                            return AxiomStatus(False, (i, j, m, a, "no-idem"))
    return AxiomStatus(True)


def _pattern_restriction(system):
    from .completion import pattern_topology
    tl = system.timeline
    pats = []
    for sp in system.spaces:
        pat = pattern_topology(sp)
        pats.append(frozenset(sp.index(l) for l in pat.labels))
    for i in tl.times():
        for j in tl.times():
            if i > j:
                continue
            f = system.phi(i, j)
            for x in pats[i]:
                if f[x] not in pats[j]:
                    return AxiomStatus(False, (i, j, x))
    return AxiomStatus(True)


# ---------------------------------------------------------------------------
# DNT axioms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ClauseReport:
    """One dynamical axiom: overall verdict plus per-configuration data.

    ``witnesses`` pairs each universally quantified configuration with the
    discovered existential witness (a time, or an interval).  ``vacuous``
    lists configurations declared true only because the chain ends where a
    strictly earlier/later instant was demanded.  ``notes`` carries
    side information such as the one-sided preimage cases of DNT.4.
    """

    name: str
    holds: bool
    witnesses: tuple = ()
    failures: tuple = ()
    vacuous: tuple = ()
    notes: tuple = ()


@dataclass(frozen=True)
class DNTReport:
    clauses: tuple

    def clause(self, name):
        for c in self.clauses:
            if c.name == name:
                return c
        raise KeyError(name)

    @property
    def valid(self):
        return all(c.holds for c in self.clauses)


def _strict_chains(space, length):
    """Strict chains 0 < x1 < ... < x_{length} in one space."""
    def extend(chain):
        last = chain[-1]
        if len(chain) == length + 1:
            yield tuple(chain[1:])
            return
        for nxt in space.elements():
            if space.lt(last, nxt):
                yield from extend(chain + [nxt])
    yield from extend([space.bottom])


def _fiber(space_from, f, value):
    return [x for x in space_from.elements() if f[x] == value]


def dnt_report(system):
    tl = system.timeline
    clauses = [
        _dnt1(system), _dnt2(system), _dnt3(system, unique=False),
        _dnt4(system, unique=False), _dnt5(system)]
    return DNTReport(tuple(clauses))


def _dnt1(system):
    tl = system.timeline
    for i in tl.times():
        for j in tl.times():
            if i > j:
                continue
            f = system.phi(i, j)
            src, dst = system.spaces[i], system.spaces[j]
            if f[src.bottom] != dst.bottom:
                return ClauseReport("DNT.1", False, failures=((i, j, "0"),))
            if f[src.top] != dst.top:
                return ClauseReport("DNT.1", False, failures=((i, j, "1"),))
    return ClauseReport("DNT.1", True)


def _dnt2(system):
    tl = system.timeline
    for i in tl.times():
        if tuple(system.phi(i, i)) != tuple(range(system.spaces[i].n)):
            return ClauseReport("DNT.2", False, failures=((i, "identity"),))
    for i in tl.times():
        for j in tl.times():
            for k in tl.times():
                if not i <= j <= k:
                    continue
                ab, bc, ac = system.phi(i, j), system.phi(j, k), system.phi(i, k)
                for x in range(system.spaces[i].n):
                    if bc[ab[x]] != ac[x]:
                        return ClauseReport(
                            "DNT.2", False, failures=((i, j, k, x, "composite"),))
    for i in tl.times():
        for j in tl.times():
            if i > j:
                continue
            f = system.phi(i, j)
            src, dst = system.spaces[i], system.spaces[j]
            for x in src.elements():
                for y in src.elements():
                    if f[src.mt(x, y)] != dst.mt(f[x], f[y]):
                        return ClauseReport(
                            "DNT.2", False, failures=((i, j, x, y, "meet"),))
                    if f[src.jn(x, y)] != dst.jn(f[x], f[y]):
                        return ClauseReport(
                            "DNT.2", False, failures=((i, j, x, y, "join"),))
    return ClauseReport("DNT.2", True)


def _dnt3_body(system, t, x, y, t1, unique):
    """All strictly intermediate z1 at t1 pull back into ]x, y[ at t."""
    src = system.spaces[t]
    dst = system.spaces[t1]
    f = system.phi(t, t1)
    for z1 in dst.elements():
        if not (dst.lt(f[x], z1) and dst.lt(z1, f[y])):
            continue
        fiber = [z for z in _fiber(src, f, z1) if src.lt(x, z) and src.lt(z, y)]
        if not fiber:
            return False
        if unique and len(_fiber(src, f, z1)) != 1:
            return False
    return True


def _dnt3(system, unique):
    name = "DNT.5(3)" if unique else "DNT.3"
    tl = system.timeline
    witnesses, failures, vacuous = [], [], []
    for t in tl.times():
        src = system.spaces[t]
        for x, y in _strict_chains(src, 2):
            config = (t, x, y)
            later = [t1 for t1 in tl.times() if t1 > t]
            if not later:
                vacuous.append(config)
                continue
            found = None
            for t1 in later:
                if _dnt3_body(system, t, x, y, t1, unique):
                    found = t1
                    break
            if found is None:
                failures.append(config)
            else:
                witnesses.append((config, found))
    return ClauseReport(name, not failures, tuple(witnesses),
                        tuple(failures), tuple(vacuous))


def _dnt4_interval_candidates(system, t):
    """Bounds t1 < t < t2; a missing side falls back to the sentinel and is
    flagged endpoint-vacuous by the caller."""
    tl = system.timeline
    lows = [t1 for t1 in tl.times() if t1 < t] or [-1]
    highs = [t2 for t2 in tl.times() if t2 > t] or [tl.n]
    cands = [(lo, hi) for lo in lows for hi in highs]
    cands.sort(key=lambda b: (-(b[1] - b[0]), b[0]))
    return cands


def _dnt4_body(system, t, x, z, y, lo, hi, unique, one_sided):
    tl = system.timeline
    src = system.spaces[t]
    for tp in tl.open_members(lo, hi):
        if tp >= t:
            f = system.phi(t, tp)
            dst = system.spaces[tp]
            if not (dst.lt(f[x], f[z]) and dst.lt(f[z], f[y])):
                return False
            if unique:
                for v in (x, z, y):
                    if len(_fiber(src, f, f[v])) != 1:
                        return False
        else:
            g = system.phi(tp, t)
            there = system.spaces[tp]
            xs = _fiber(there, g, x)
            ys = _fiber(there, g, y)
            if bool(xs) != bool(ys):
                one_sided.append((t, x, z, y, tp, "x" if xs else "y"))
            for xp in xs:
                for yp in ys:
                    if not there.lt(xp, yp):
                        continue
                    ok = any(there.lt(xp, zp) and there.lt(zp, yp)
                             and g[zp] == z for zp in there.elements())
                    if not ok:
                        return False
            if unique:
                for v, pre in (("x", xs), ("y", ys), ("z", _fiber(there, g, z))):
                    if len(pre) > 1:
                        return False
    return True


def _dnt4(system, unique):
    name = "DNT.5(4)" if unique else "DNT.4"
    tl = system.timeline
    witnesses, failures, vacuous, notes = [], [], [], []
    one_sided = []
    for t in tl.times():
        src = system.spaces[t]
        endpoint = (t == 0) or (t == tl.n - 1)
        for x, z, y in _strict_chains(src, 3):
            config = (t, x, z, y)
            found = None
            for lo, hi in _dnt4_interval_candidates(system, t):
                if _dnt4_body(system, t, x, z, y, lo, hi, unique, one_sided):
                    found = (lo, hi)
                    break
            if found is None:
                failures.append(config)
            else:
                witnesses.append((config, found))
                if endpoint:
                    vacuous.append(config)
    if one_sided:
        notes.append(("one-sided-preimages", tuple(sorted(set(one_sided)))))
    return ClauseReport(name, not failures, tuple(witnesses),
                        tuple(failures), tuple(vacuous), tuple(notes))


def _dnt5(system):
    three = _dnt3(system, unique=True)
    four = _dnt4(system, unique=True)
    witnesses = tuple((("3",) + cfg, w) for cfg, w in three.witnesses) + \
        tuple((("4",) + cfg, w) for cfg, w in four.witnesses)
    failures = tuple(("3",) + cfg for cfg in three.failures) + \
        tuple(("4",) + cfg for cfg in four.failures)
    vacuous = tuple(("3",) + cfg for cfg in three.vacuous) + \
        tuple(("4",) + cfg for cfg in four.vacuous)
    return ClauseReport("DNT.5", not failures, witnesses, failures,
                        vacuous, four.notes)


# ---------------------------------------------------------------------------
# observed truth
# ---------------------------------------------------------------------------

def _shadow_sub(system, times):
    try:
        return system.sub_system(times, shadow=True)
    except NonPreserving:
        return None


def _pred_shadow_is_dvt(system, times):
    sub = _shadow_sub(system, times)
    if sub is None:
        return False
    try:
        validate_system(sub, check_spaces=False)
    except (BrokenComposition, NonPreserving):
        return False
    for sp in sub.spaces:
        if not validate_skew(sp).valid:
            return False
    return dnt_report(sub).valid


def _pred_shadow_preserves_meet(system, times):
    shadows = {i: commutative_shadow(system.spaces[i]) for i in times}
    pos = {i: {e: k for k, e in enumerate(sh.carrier)}
           for i, sh in shadows.items()}
    for i in times:
        for j in times:
            if i > j:
                continue
            f = system.phi(i, j)
            shi, shj = shadows[i], shadows[j]
            for a, xa in enumerate(shi.carrier):
                for b, xb in enumerate(shi.carrier):
                    lhs = f[shi.carrier[shi.meet[a][b]]]
                    fa, fb = f[xa], f[xb]
                    if fa not in pos[j] or fb not in pos[j] or lhs not in pos[j]:
                        return False
                    rhs = shj.carrier[shj.meet[pos[j][fa]][pos[j][fb]]]
                    if lhs != rhs:
                        return False
    return True


def _shadow_dnt_clause(k):
    def pred(system, times):
        sub = _shadow_sub(system, times)
        if sub is None:
            return False
        try:
            validate_system(sub, check_spaces=False)
        except (BrokenComposition, NonPreserving):
            return False
        return dnt_report(sub).clause("DNT.%d" % k).holds
    return pred


PREDICATES = {
    "shadow-is-DVT": _pred_shadow_is_dvt,
    "shadow-preserves-meet": _pred_shadow_preserves_meet,
    "shadow-preserves-∧̲": _pred_shadow_preserves_meet,
}
for _k in range(1, 6):
    PREDICATES["shadow-satisfies-DNT.%d" % _k] = _shadow_dnt_clause(_k)


@dataclass(frozen=True)
class ObservedTruth:
    predicate: str
    t0: int
    bounds: tuple          # (lo, hi) strict
    members: tuple
    pointwise: AxiomStatus


def observed_truth(system, predicate, t0):
    """Largest open interval around t0 on which the predicate holds.

    Candidates are scanned largest first; the chosen interval is re-checked
    pointwise on singletons, which the registered interval-monotone
    predicates always pass.  Returns None when even {t0} fails.
    """
    if predicate not in PREDICATES:
        raise UnknownPredicate("no predicate %r registered" % (predicate,),
                               witness=(predicate,))
    pred = PREDICATES[predicate]
    tl = system.timeline
    cands = tl.open_intervals_containing(t0)
    cands.sort(key=lambda b: (-(b[1] - b[0]), b[0]))
    for lo, hi in cands:
        members = tl.open_members(lo, hi)
        if pred(system, members):
            pw = AxiomStatus(True)
            for m in members:
                if not pred(system, (m,)):
                    pw = AxiomStatus(False, (m,))
                    break
            return ObservedTruth(predicate, t0, (lo, hi), members, pw)
    return None


# ---------------------------------------------------------------------------
# temporal points
# ---------------------------------------------------------------------------

def point_elements(space, kind):
    """Minima of the point filters, as carrier elements."""
    spec = spectrum(space, kind)
    return tuple(sorted(filter_minimum(space, f) for f in spec.point_filters))


@dataclass(frozen=True)
class TemporalPoint:
    t: int
    element: int
    kind: str              # "future" | "past"
    witness: tuple         # (t', point element)
    interval: tuple        # open bounds covering both instants


@dataclass(frozen=True)
class SCReport:
    sc1: AxiomStatus
    sc2: AxiomStatus
    sc3: AxiomStatus
    sc4: AxiomStatus
    minimal_intervals: tuple
    collapsed: tuple       # strict-descent-degenerate directed elements

    @property
    def valid(self):
        return all(s.holds for s in (self.sc1, self.sc2, self.sc3, self.sc4))


@dataclass(frozen=True)
class TemporalReport:
    t: int
    points: tuple                  # TemporalPoint records
    elements: tuple                # distinct temporal-point elements at t
    temporally_pointed: bool
    pointed_witnesses: tuple       # (element, join subset) pairs
    pointed_failure: tuple
    interval: tuple                # chosen I_t, closed bounds
    spec_points: tuple             # ((t', p) ...) the minimal spectrum
    sc: SCReport
    non_idempotent_kinds: AxiomStatus


def _temporal_point_records(system, t):
    tl = system.timeline
    src = system.spaces[t]
    recs = []
    for tp in tl.times():
        pts = point_elements(system.spaces[tp], system.point_kind)
        lo, hi = min(t, tp) - 1, max(t, tp) + 1
        if tp >= t:
            f = system.phi(t, tp)
            for lam in src.elements():
                if lam != src.bottom and f[lam] in pts:
                    recs.append(TemporalPoint(t, lam, "future",
                                              (tp, f[lam]), (lo, hi)))
        if tp <= t:
            g = system.phi(tp, t)
            for p in pts:
                lam = g[p]
                if lam != src.bottom:
                    recs.append(TemporalPoint(t, lam, "past",
                                              (tp, p), (lo, hi)))
    return tuple(recs)


def _support_intervals(system, t, records):
    """Inclusion-minimal closed intervals around t supporting every element."""
    tl = system.timeline
    elements = sorted({r.element for r in records})
    wit = {e: sorted({r.witness[0] for r in records if r.element == e})
           for e in elements}
    good = []
    for lo, hi in tl.closed_intervals_containing(t):
        if all(any(lo <= w <= hi for w in wit[e]) for e in elements):
            good.append((lo, hi))
    minimal = [iv for iv in good
               if not any(o != iv and iv[0] <= o[0] and o[1] <= iv[1]
                          for o in good)]
    minimal.sort()
    return tuple(minimal)


def _interval_of(system, t):
    """I_t, or None when the instant has no temporal points."""
    recs = _temporal_point_records(system, t)
    if not recs:
        return None
    mins = _support_intervals(system, t, recs)
    return mins[0] if mins else None


def temporal_points(system, t):
    tl = system.timeline
    src = system.spaces[t]
    recs = _temporal_point_records(system, t)
    if not recs:
        raise NoSupportInterval(
            "no temporal points at %s" % (tl.labels[t],), witness=(t,))
    elements = tuple(sorted({r.element for r in recs}))

    pointed = True
    pointed_wit = []
    pointed_fail = None
    for lam in src.elements():
        if lam == src.bottom:
            continue
        cands = [e for e in elements if src.le(e, lam)]
        found = None
        for mask in range(1, 1 << len(cands)):
            subset = [cands[k] for k in range(len(cands)) if mask >> k & 1]
            if src.fold_join(subset) == lam:
                found = tuple(subset)
                break
        if found is None:
            pointed = False
            pointed_fail = (lam,)
            break
        pointed_wit.append((lam, found))

    minimal = _support_intervals(system, t, recs)
    interval = minimal[0]
    sc1 = AxiomStatus(True, None,
                      "unique" if len(minimal) == 1 else "ties broken by order")

    members = tl.closed_members(*interval)
    spec_pts = sorted({
        (r.witness[0], r.witness[1]) for r in recs
        if interval[0] <= r.witness[0] <= interval[1]})

    sc2 = _sc2(system, t, interval)
    sc3 = _sc3(system)
    sc4, collapsed = _sc4(system, t, members)
    sc = SCReport(sc1, sc2, sc3, sc4, minimal, collapsed)

    non_idem = _non_idempotent_kinds(system, recs)
    return TemporalReport(t, recs, elements, pointed, tuple(pointed_wit),
                          pointed_fail, interval, tuple(spec_pts), sc, non_idem)


def _sc2(system, t, interval):
    """For every open I beyond I_t some open around t keeps all I_{t'} in I."""
    tl = system.timeline
    lo, hi = interval
    for olo, ohi in [(a, b) for a in range(-1, tl.n)
                     for b in range(a + 1, tl.n + 1)]:
        members = tl.open_members(olo, ohi)
        if not set(tl.closed_members(lo, hi)) <= set(members):
            continue
        star = None
        for slo, shi in sorted(tl.open_intervals_containing(t),
                               key=lambda b: (b[1] - b[0], b[0])):
            ok = True
            for tp in tl.open_members(slo, shi):
                ivp = _interval_of(system, tp)
                if ivp is None or not set(tl.closed_members(*ivp)) <= set(members):
                    ok = False
                    break
            if ok:
                star = (slo, shi)
                break
        if star is None:
            return AxiomStatus(False, ((olo, ohi),))
    return AxiomStatus(True)


def _sc3(system):
    tl = system.timeline
    ivs = {t: _interval_of(system, t) for t in tl.times()}
    for a in tl.times():
        for b in tl.times():
            if a > b or ivs[a] is None or ivs[b] is None:
                continue
            if not TimeLine.interval_le(ivs[a], ivs[b]):
                return AxiomStatus(False, (a, b, ivs[a], ivs[b]))
    return AxiomStatus(True)


def _sc4(system, t, members):
    """Directed-set preservation in its finite-degenerate reading.

    Clause one asks that members admitting a strict descent under the map
    be cofinal in each principal directed set; a finite principal set is
    anchored by its minimum, which never strictly descends, so the clause
    holds through the minimum and the elements whose strict descents all
    collapse are reported instead.  Clause two demands a preimage for the
    minimum of every principal set at each earlier instant of I_t.
    """
    collapsed = []
    # clause 1: scan pairs t <= t' inside I_t
    for a in members:
        for b in members:
            if not (a <= b):
                continue
            src = system.spaces[a]
            f = system.phi(a, b)
            dst = system.spaces[b]
            for m in src.elements():
                ups = src.uppers(m)
                for g in ups:
                    if g == m:
                        continue
                    has_descent = any(
                        src.lt(xi, g) and dst.lt(f[xi], f[g]) for xi in ups)
                    if not has_descent:
                        collapsed.append((a, b, m, g))
    # clause 2: minima pull back along every earlier instant
    for b in members:
        if b > t:
            continue
        g = system.phi(b, t)
        src = system.spaces[t]
        there = system.spaces[b]
        for m in src.elements():
            if not any(g[p] == m for p in there.elements()):
                return AxiomStatus(False, (b, t, m, "no-preimage")), tuple(collapsed)
    return AxiomStatus(True), tuple(sorted(set(collapsed)))


def _non_idempotent_kinds(system, recs):
    """Non-idempotent temporal points must all be future points; moreover a
    future point maps forward onto an idempotent (its witness point)."""
    for r in recs:
        src = system.spaces[r.t]
        if not src.is_idempotent(r.element) and r.kind == "past":
            tp, p = r.witness
            # a past point is the image of a point, hence idempotent
            return AxiomStatus(False, (r.t, r.element, r.witness))
        if r.kind == "future":
            tp, p = r.witness
            if not system.spaces[tp].is_idempotent(p):
                return AxiomStatus(False, (r.t, r.element, r.witness, "image"))
    return AxiomStatus(True)


# ---------------------------------------------------------------------------
# accessible strings and the moment space
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AccessibleString:
    anchor: int
    support: tuple
    components: tuple          # aligned with support

    def component(self, t):
        return self.components[self.support.index(t)]

    def key(self):
        return (self.support, self.components)


def relative_opens_around(timeline, interval, t):
    """Distinct J = I_t int ]lo,hi[ with t in J, as member tuples."""
    members = timeline.closed_members(*interval)
    seen = set()
    out = []
    for lo, hi in timeline.open_intervals_containing(t):
        j = tuple(k for k in members if lo < k < hi)
        if j and t in j and j not in seen:
            seen.add(j)
            out.append(j)
    out.sort(key=lambda j: (len(j), j))
    return out


def accessible_strings(system, t, interval):
    """All strings with relative-open support around t and compatible
    nonzero components."""
    out = []
    for support in relative_opens_around(system.timeline, interval, t):
        comps = [None] * len(support)

        def fill(k):
            if k == len(support):
                out.append(AccessibleString(t, support, tuple(comps)))
                return
            sp = system.spaces[support[k]]
            for e in sp.elements():
                if e == sp.bottom:
                    continue
                ok = True
                for prev in range(k):
                    f = system.phi(support[prev], support[k])
                    if not sp.le(f[comps[prev]], e):
                        ok = False
                        break
                if ok:
                    comps[k] = e
                    fill(k + 1)

        fill(0)
    return out


def string_member(system, string, point):
    """The membership clause for a point (t', p) against a string.

    Needs an open time interval J1 inside the support around t' where the
    point transports forward below the components and admits backward
    representatives below the components.
    """
    tp, p = point
    if tp not in string.support:
        return False
    tl = system.timeline
    sup = set(string.support)
    for lo, hi in tl.open_intervals_containing(tp):
        members = tl.open_members(lo, hi)
        if not members or not set(members) <= sup:
            continue
        ok = True
        for t2 in members:
            x2 = string.component(t2)
            sp2 = system.spaces[t2]
            if tp <= t2:
                f = system.phi(tp, t2)
                if not sp2.le(f[p], x2):
                    ok = False
                    break
            else:
                g = system.phi(t2, tp)
                if not any(g[q] == p and sp2.le(q, x2)
                           for q in sp2.elements()):
                    ok = False
                    break
        if ok:
            return True
    return False


@dataclass(frozen=True)
class MomentReport:
    intersections: tuple     # (open a, open b, status, string key or None)
    unions: tuple            # (subset of opens, status, string key or None)
    monotone: AxiomStatus
    union_gaps: tuple        # generated opens equal to no U(x)


@dataclass(frozen=True)
class MomentSpace:
    anchor: int
    interval: tuple
    points: tuple            # (time index, point element) pairs
    space: FiniteSpace
    strings: tuple
    family: tuple            # (open frozenset, representative string)
    report: MomentReport

    def point_label(self, k):
        return self.space.points[k]


def _string_open(system, string, points):
    return frozenset(k for k, q in enumerate(points)
                     if string_member(system, string, q))


def moment_space(system, t):
    told = temporal_points(system, t)
    tl = system.timeline
    points = tuple(told.spec_points)
    strings = accessible_strings(system, t, told.interval)

    family = {}
    for s in strings:
        u = _string_open(system, s, points)
        if u not in family:
            family[u] = s
    fam = sorted(family.items(), key=lambda kv: (len(kv[0]), tuple(sorted(kv[0]))))

    opens = topology_from_basis(len(points), [u for u, _ in fam])
    labels = tuple("%s:%s" % (tl.labels[tq], system.spaces[tq].labels[p])
                   for tq, p in points)
    space = FiniteSpace(labels, opens, tuple(u for u, _ in fam))

    inter, unions, gaps = _closure_report(system, t, points, fam, family)
    mono = _monotone_report(system, strings, points)
    report = MomentReport(inter, unions, mono, gaps)
    return MomentSpace(t, told.interval, points, space, tuple(strings),
                       tuple(fam), report)


def _meet_string(system, t, a, b):
    common = [x for x in a.support if x in b.support]
    comps, support = [], []
    for tq in common:
        sp = system.spaces[tq]
        w = sp.mt(a.component(tq), b.component(tq))
        if w != sp.bottom:
            support.append(tq)
            comps.append(w)
    if t not in support or not is_contiguous(support):
        return None
    s = AccessibleString(t, tuple(support), tuple(comps))
    return s if _is_accessible(system, s) else None


def _join_string(system, t, strings):
    support = sorted({tq for s in strings for tq in s.support})
    comps = []
    for tq in support:
        sp = system.spaces[tq]
        parts = [s.component(tq) for s in strings if tq in s.support]
        comps.append(sp.fold_join(parts))
    if t not in support or not is_contiguous(support):
        return None
    s = AccessibleString(t, tuple(support), tuple(comps))
    return s if _is_accessible(system, s) else None


def _is_accessible(system, string):
    for i, ta in enumerate(string.support):
        for tb in string.support[i + 1:]:
            f = system.phi(ta, tb)
            sp = system.spaces[tb]
            if not sp.le(f[string.component(ta)], string.component(tb)):
                return False
        if string.component(ta) == system.spaces[ta].bottom:
            return False
    return True


def _closure_report(system, t, points, fam, family):
    inter = []
    for i, (ua, sa) in enumerate(fam):
        for ub, sb in fam[i:]:
            target = ua & ub
            w = _meet_string(system, t, sa, sb)
            if w is None:
                status = "exact" if target == frozenset() else "no-string"
                inter.append((ua, ub, status, None))
                continue
            uw = _string_open(system, w, points)
            status = "exact" if uw == target else "mismatch"
            inter.append((ua, ub, status, w.key()))

    unions = []
    gaps = set()
    n = len(fam)
    for mask in range(1, 1 << n):
        subset = [fam[k] for k in range(n) if mask >> k & 1]
        target = frozenset().union(*[u for u, _ in subset])
        w = _join_string(system, t, [s for _, s in subset])
        if w is None:
            unions.append((tuple(u for u, _ in subset), "no-string", None))
            if target not in family:
                gaps.add(target)
            continue
        uw = _string_open(system, w, points)
        if uw == target:
            status = "exact"
        elif uw >= target:
            status = "covers"
            if target not in family:
                gaps.add(target)
        else:
            status = "mismatch"
        unions.append((tuple(u for u, _ in subset), status, w.key()))
    return tuple(inter), tuple(unions), tuple(sorted(gaps, key=sorted))


def _monotone_report(system, strings, points):
    by_support = {}
    for s in strings:
        by_support.setdefault(s.support, []).append(s)
    for sup, group in by_support.items():
        for a in group:
            for b in group:
                le = all(system.spaces[tq].le(a.component(tq), b.component(tq))
                         for tq in sup)
                if le:
                    ua = _string_open(system, a, points)
                    ub = _string_open(system, b, points)
                    if not ua <= ub:
                        return AxiomStatus(False, (a.key(), b.key()))
    return AxiomStatus(True)
