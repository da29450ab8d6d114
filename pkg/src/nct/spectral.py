"""Filtrations indexed by a finite chain, observables, and their spectra.

A filtration picks a level element per index, monotonely, with the levels
joining to 1; a spectral family is additionally separated (levels meet to
0).  From a filtration come the observable function on elements, its
transport to the completion, restriction to down-sets, the class of the
level chain as a completion element, and stringwise families over a
dynamical system whose induced fiber families are validated one instant
at a time.

The index chain uses integer labels with an explicit infinity sentinel
ordered above everything; only the order of the chain is ever used.
"""

import math
from dataclasses import dataclass

from .completion import (
    completion,
    filter_closure,
    is_directed,
    spectrum,
)
from .core import AxiomStatus, SkewTopology, commutative_shadow, idempotents
from .dynamics import moment_space, _is_accessible, _string_open
from .errors import (
    CapExceeded,
    JoinNotTop,
    MalformedTable,
    NotAccessible,
    NotMonotone,
    NotRightBounded,
)

INF = math.inf


@dataclass(frozen=True)
class GammaChain:
    """Strictly increasing integer labels; infinity handled by the caller."""

    labels: tuple

    def __post_init__(self):
        if any(b <= a for a, b in zip(self.labels, self.labels[1:])):
            raise MalformedTable("index chain not strictly increasing",
                                 witness=tuple(self.labels))

    @property
    def n(self):
        return len(self.labels)

    def position(self, label):
        return self.labels.index(label)


@dataclass(frozen=True)
class Filtration:
    base: SkewTopology
    gamma: GammaChain
    levels: tuple            # element index per chain label
    name: str = ""

    def level(self, k):
        return self.levels[k]


@dataclass(frozen=True)
class FiltrationReport:
    monotone: AxiomStatus
    top_join: AxiomStatus
    separated: AxiomStatus
    idempotent: bool
    right_bounded: bool
    left_bounded: bool
    levels_directed: AxiomStatus
    indiscreteness: str

    @property
    def spectral(self):
        return (self.monotone.holds and self.top_join.holds
                and self.separated.holds)


def validate_filtration(f, strict=True):
    """Certify the filtration laws; the spectral flag rides on separation.

    ``strict`` raises on broken monotonicity or a level join below the
    top; pass False to get the full report for a broken family instead.
    Separation over a finite chain is the meet-of-levels test; matching
    of arbitrary infima is automatic on chains and recorded as such.
    """
    base = f.base
    if len(f.levels) != f.gamma.n:
        raise MalformedTable("one level per chain label required",
                             witness=(len(f.levels), f.gamma.n))
    mono = AxiomStatus(True)
    for i in range(f.gamma.n):
        for j in range(i + 1, f.gamma.n):
            if not base.le(f.levels[i], f.levels[j]):
                mono = AxiomStatus(False, (f.gamma.labels[i],
                                           f.gamma.labels[j]))
                if strict:
                    raise NotMonotone(
                        "levels at %s, %s out of order"
                        % (f.gamma.labels[i], f.gamma.labels[j]),
                        witness=mono.witness)
    j = base.fold_join(f.levels)
    top_join = AxiomStatus(j == base.top, None if j == base.top else (j,))
    if strict and not top_join.holds:
        raise JoinNotTop("levels join to %s, not the top" % base.labels[j],
                         witness=(j,))
    m = base.fold_meet(f.levels)
    separated = AxiomStatus(
        m == base.bottom, None if m == base.bottom else (m,),
        "infima matching automatic on a finite chain")
    idem = all(base.is_idempotent(l) for l in f.levels)
    right = any(l == base.top for l in f.levels)
    left = any(l == base.bottom for l in f.levels)
    directed = AxiomStatus(is_directed(base, set(f.levels)))
    if f.gamma.n <= 1:
        note = "chain too small to be discrete or not"
    else:
        note = ("chain with %d labels is not indiscrete; "
                "idempotency-from-indiscreteness vacuously satisfied"
                % f.gamma.n)
    return FiltrationReport(mono, top_join, separated, idem, right, left,
                            directed, note)


# ---------------------------------------------------------------------------
# the level meet law and the shadow containment
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LevelMeetReport:
    law: AxiomStatus             # both products equal the lower level
    pairs_checked: int
    shadow_family: AxiomStatus   # idempotent families validate in the shadow


def level_meet_law(f):
    """Both meets of two levels equal the level at the smaller index.

    Checked over distinct index pairs only; at equal indices the claim
    would force idempotency, which a level need not have.  Idempotent
    families are additionally re-validated inside the commutative shadow.
    """
    base = f.base
    law = AxiomStatus(True)
    pairs = 0
    for i in range(f.gamma.n):
        for j in range(f.gamma.n):
            if i == j:
                continue
            pairs += 1
            lo = f.levels[min(i, j)]
            a, b = f.levels[i], f.levels[j]
            if base.mt(a, b) != lo or base.mt(b, a) != lo:
                law = AxiomStatus(False, (f.gamma.labels[i],
                                          f.gamma.labels[j],
                                          base.mt(a, b), lo))
    shadow_status = AxiomStatus(True, None, "family not idempotent; skipped")
    if all(base.is_idempotent(l) for l in f.levels):
        sh = commutative_shadow(base)
        carrier = set(sh.carrier)
        if not set(f.levels) <= carrier:
            shadow_status = AxiomStatus(False, tuple(set(f.levels) - carrier))
        else:
            sub = sh.as_topology()
            pos = {e: k for k, e in enumerate(sh.carrier)}
            g = Filtration(sub, f.gamma, tuple(pos[l] for l in f.levels))
            rep = validate_filtration(g, strict=False)
            shadow_status = AxiomStatus(
                rep.spectral, None if rep.spectral else ("shadow-family",))
    return LevelMeetReport(law, pairs, shadow_status)


# ---------------------------------------------------------------------------
# restriction to a down-set
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RestrictionReport:
    mu: int
    levels: tuple                 # mu ^ level, as base elements
    closed: AxiomStatus           # down-set closed under both tables
    restricted: object            # Filtration on the down-set, or None
    report: object                # its FiltrationReport, or None
    centralizer_case: bool        # mu idempotent and commuting with levels
    idempotent_case: bool         # every mu ^ level idempotent
    centralizers: tuple           # all elements commuting with every level


def restrict_filtration(f, mu):
    base = f.base
    if not any(l == base.top for l in f.levels):
        raise NotRightBounded("no level reaches the top", witness=(mu,))
    levels = tuple(base.mt(mu, l) for l in f.levels)
    down = sorted(x for x in base.elements() if base.le(x, mu))
    closed = AxiomStatus(True)
    for x in down:
        for y in down:
            if base.mt(x, y) not in down:
                closed = AxiomStatus(False, (x, y, "meet"))
            if base.jn(x, y) not in down:
                closed = AxiomStatus(False, (x, y, "join"))
    restricted = None
    rep = None
    if closed.holds and all(l in down for l in levels):
        sub = base.restrict(down)
        pos = {e: k for k, e in enumerate(down)}
        restricted = Filtration(sub, f.gamma, tuple(pos[l] for l in levels),
                                name=f.name and f.name + "|" + base.labels[mu])
        rep = validate_filtration(restricted, strict=False)
    case_a = base.is_idempotent(mu) and all(
        base.mt(mu, l) == base.mt(l, mu) for l in f.levels)
    case_b = all(base.is_idempotent(base.mt(mu, l)) for l in f.levels)
    centralizers = tuple(
        x for x in base.elements()
        if all(base.mt(x, l) == base.mt(l, x) for l in f.levels))
    return RestrictionReport(mu, levels, closed, restricted, rep,
                             case_a, case_b, centralizers)


# ---------------------------------------------------------------------------
# observables
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Observable:
    gamma: GammaChain
    sigma: tuple                 # per element: chain label or INF
    domain: frozenset

    def value(self, e):
        return self.sigma[e]


@dataclass(frozen=True)
class ObservableReport:
    observable: Observable
    meet_law: AxiomStatus        # sigma(x^y) <= min
    join_law: AxiomStatus        # sigma(xvy) <= max
    domain_is_union: AxiomStatus


def observable(f):
    """Tabulate the least index whose level dominates each element."""
    base = f.base
    sigma = []
    for x in base.elements():
        val = INF
        for k in range(f.gamma.n):
            if base.le(x, f.levels[k]):
                val = f.gamma.labels[k]
                break
        sigma.append(val)
    domain = frozenset(x for x in base.elements() if sigma[x] != INF)
    union = set()
    for l in f.levels:
        union.update(x for x in base.elements() if base.le(x, l))
    dom_check = AxiomStatus(domain == frozenset(union),
                            None if domain == frozenset(union)
                            else tuple(domain ^ frozenset(union)))
    obs = Observable(f.gamma, tuple(sigma), domain)
    meet_law = AxiomStatus(True)
    join_law = AxiomStatus(True)
    for x in base.elements():
        for y in base.elements():
            if sigma[base.mt(x, y)] > min(sigma[x], sigma[y]):
                meet_law = AxiomStatus(False, (x, y))
            if sigma[base.jn(x, y)] > max(sigma[x], sigma[y]):
                join_law = AxiomStatus(False, (x, y))
    return ObservableReport(obs, meet_law, join_law, dom_check)


@dataclass(frozen=True)
class CompletionObservableReport:
    filtration: Filtration       # levels are the principal classes
    report: FiltrationReport
    sigma_hat: tuple             # per completion class
    cross_check: AxiomStatus     # membership formula agrees with the order one
    strictness: AxiomStatus      # whether the class ever sits strictly below


def observable_completion(f):
    """The filtration carried into the completion, with its observable.

    The level at each index becomes the class of its principal up-set.
    The observable is computed once through the completion's order and
    once through membership of the level in the filter; both must agree.
    The strict comparison between the principal class and the level's
    class never holds here, and the report says so rather than assuming.
    """
    base = f.base
    comp = completion(base)
    lifted = Filtration(comp.space, f.gamma,
                        tuple(comp.canonical[l] for l in f.levels),
                        name=f.name and f.name + "^")
    rep = validate_filtration(lifted, strict=False)
    obs = observable(lifted)
    via_membership = []
    for k, filt in enumerate(comp.classes):
        val = INF
        for i in range(f.gamma.n):
            if f.levels[i] in filt:
                val = f.gamma.labels[i]
                break
        via_membership.append(val)
    agree = tuple(via_membership) == obs.observable.sigma
    cross = AxiomStatus(agree, None if agree else tuple(via_membership))
    strict_any = any(
        comp.space.lt(comp.canonical[f.levels[i]], lifted.levels[i])
        for i in range(f.gamma.n))
    strictness = AxiomStatus(
        not strict_any, None,
        "principal class equals the level class on finite carriers")
    return CompletionObservableReport(lifted, rep, obs.observable.sigma,
                                      cross, strictness)


# ---------------------------------------------------------------------------
# the class of the level chain
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GammaPointReport:
    filter: frozenset
    completion_index: int
    directed: AxiomStatus
    in_irreducible: bool
    in_minimal: bool
    in_strong: bool


def gamma_points(f):
    """The level set's filter class and where it sits among the points."""
    base = f.base
    level_set = frozenset(f.levels)
    directed = AxiomStatus(is_directed(base, level_set))
    filt = filter_closure(base, level_set)
    comp = completion(base)
    idx = comp.classes.index(filt)
    sp = spectrum(base, "irreducible")
    qsp = spectrum(base, "minimal")
    in_sp = filt in sp.point_filters
    in_qsp = filt in qsp.point_filters
    strong = in_sp and sp.point_filters.index(filt) in sp.strong
    return GammaPointReport(filt, idx, directed, in_sp, in_qsp, strong)


# ---------------------------------------------------------------------------
# maximal commutative sublattices
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AbelianReport:
    sublattices: tuple           # frozensets of element indices
    containments: tuple          # per family: index of a containing member


def abelian_sublattices(top, cap=12, families=()):
    """All maximal op-closed sub-carriers with commuting meet.

    Exhaustive over subsets, so the carrier size is capped.  For each
    supplied filtration the report records a containing sublattice,
    certifying that its levels live inside one commutative block.
    """
    n = top.n
    if n > cap:
        raise CapExceeded("carrier size %d over the cap %d" % (n, cap),
                          witness=(n, cap))
    good = []
    for mask in range(1, 1 << n):
        elems = [i for i in range(n) if mask >> i & 1]
        ok = True
        for x in elems:
            for y in elems:
                if (top.mt(x, y) != top.mt(y, x)
                        or not mask >> top.mt(x, y) & 1
                        or not mask >> top.jn(x, y) & 1):
                    ok = False
                    break
            if not ok:
                break
        if ok:
            good.append(frozenset(elems))
    good.sort(key=lambda s: (-len(s), tuple(sorted(s))))
    maximal = []
    for s in good:
        if not any(s < m for m in maximal):
            maximal.append(s)
    containments = []
    for f in families:
        levels = frozenset(f.levels)
        hit = next((k for k, m in enumerate(maximal) if levels <= m), None)
        containments.append(hit)
    return AbelianReport(tuple(maximal), tuple(containments))


# ---------------------------------------------------------------------------
# dynamical families over a system
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DynSpectralReport:
    t: int
    gamma: GammaChain
    common_support: tuple
    monotone: AxiomStatus
    point_sets: tuple            # per index: frozenset of moment points
    fiber_reports: tuple         # (t'', FiltrationReport) for t'' in support
    failures: tuple              # (t'', reason) where the fiber family breaks


def dynamical_spectral(system, t, gamma, level_strings):
    """Stringwise levels: point sets at t and fiber families per instant.

    Every level must be an accessible string; levels must ascend
    componentwise over the common support, which must still be a relative
    open around t.  Each instant of the common support yields an induced
    filtration in its fiber, validated on its own; the ways a fiber family
    can fail are collected rather than asserted away.
    """
    ms = moment_space(system, t)
    known = {s.key() for s in ms.strings}
    for s in level_strings:
        if s.key() not in known and not _is_accessible(system, s):
            raise NotAccessible("level string %s is not accessible"
                                % (s.key(),), witness=s.key())
    if len(level_strings) != gamma.n:
        raise MalformedTable("one level string per chain label",
                             witness=(len(level_strings), gamma.n))
    common = sorted(set.intersection(*[set(s.support)
                                       for s in level_strings]))
    mono = AxiomStatus(True)
    if t not in common:
        mono = AxiomStatus(False, ("anchor outside common support",))
    for i in range(gamma.n):
        for j in range(i + 1, gamma.n):
            for tq in common:
                a = level_strings[i].component(tq)
                b = level_strings[j].component(tq)
                if not system.spaces[tq].le(a, b):
                    mono = AxiomStatus(False, (gamma.labels[i],
                                               gamma.labels[j], tq))
    point_sets = tuple(_string_open(system, s, ms.points)
                       for s in level_strings)
    fibers = []
    failures = []
    for tq in common:
        sp = system.spaces[tq]
        levels = tuple(s.component(tq) for s in level_strings)
        g = Filtration(sp, gamma, levels)
        rep = validate_filtration(g, strict=False)
        fibers.append((tq, rep))
        if not rep.spectral:
            reason = ("not-monotone" if not rep.monotone.holds else
                      "join-not-top" if not rep.top_join.holds else
                      "not-separated")
            failures.append((tq, reason))
    return DynSpectralReport(t, gamma, tuple(common), mono, point_sets,
                             tuple(fibers), tuple(failures))
