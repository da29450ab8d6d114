"""Filter completion, pattern topologies and point spectra.

A subset is directed if any two members have a member below both; a filter
is a directed up-set.  On a finite carrier every directed set has a
minimum, so every filter is a principal up-set and the completion C is
canonically in bijection with the carrier.  The order on C is reverse
inclusion of filters, and the operations are induced elementwise:

    [A] ^ [B] = [ {a ^ b} ]      [A] v [B] = [ {a v b} ]

None of this is taken on faith: the construction runs on actual filter
sets and the canonical-map properties are certified in the result.
"""

from dataclasses import dataclass

from .core import AxiomStatus, SkewTopology
from .errors import HypothesisNotMet, MalformedTable, NotDirected


# ---------------------------------------------------------------------------
# filters
# ---------------------------------------------------------------------------

def is_directed(top, subset):
    s = tuple(subset)
    for x in s:
        for y in s:
            if not any(top.le(z, x) and top.le(z, y) for z in s):
                return False
    return bool(s)


def directedness_witness(top, subset):
    s = tuple(subset)
    for x in s:
        for y in s:
            if not any(top.le(z, x) and top.le(z, y) for z in s):
                return (x, y)
    return None


def is_filter(top, subset):
    """Directed and upward closed."""
    s = frozenset(subset)
    if not s or not is_directed(top, s):
        return False
    for x in s:
        for y in top.elements():
            if top.le(x, y) and y not in s:
                return False
    return True


def filter_closure(top, subset):
    """Upward closure of a directed set; the filter its class is named by."""
    s = frozenset(subset)
    if not s:
        raise MalformedTable("empty set has no filter closure")
    w = directedness_witness(top, s)
    if w is not None:
        raise NotDirected(
            "no member below both %s and %s"
            % (top.labels[w[0]], top.labels[w[1]]),
            witness=w)
    out = set()
    for a in s:
        out.update(top.uppers(a))
    return frozenset(out)


def principal_filter(top, m):
    return frozenset(top.uppers(m))


def all_filters(top):
    """Every filter, sorted by member tuple.

    Candidates are the principal up-sets; each is verified against the
    definition rather than assumed, and on a finite carrier no other
    filter can exist (a finite directed set has a minimum).
    """
    out = set()
    for m in top.elements():
        cand = principal_filter(top, m)
        if is_filter(top, cand):
            out.add(cand)
    return tuple(sorted(out, key=lambda f: tuple(sorted(f))))


def filter_minimum(top, filt):
    """The order-minimum a finite filter is the up-set of."""
    for m in filt:
        if all(top.le(m, x) for x in filt):
            return m
    raise MalformedTable("set has no minimum", witness=tuple(sorted(filt)))


# ---------------------------------------------------------------------------
# completion
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Completion:
    """C as a skew topology plus the dictionary between classes and filters.

    ``classes`` lists the filter behind each completion element, index
    aligned with ``space`` labels.  ``canonical`` maps parent indices to
    completion indices through principal filters.  ``strong`` marks the
    classes of idempotently directed sets (minimum idempotent).
    """

    parent: SkewTopology
    space: SkewTopology
    classes: tuple
    canonical: tuple
    strong: frozenset
    canonical_bijective: AxiomStatus
    canonical_hom: AxiomStatus
    idempotent_transport: AxiomStatus

    def class_of(self, subset):
        gen = filter_closure(self.parent, subset)
        for k, f in enumerate(self.classes):
            if f == gen:
                return k
        raise HypothesisNotMet("set does not generate a known filter",
                               witness=tuple(sorted(subset)))


def _filter_label(top, filt):
    return "[" + ",".join(top.labels[i] for i in sorted(filt)) + "]"


def completion(top):
    """Build C with reverse-inclusion order and elementwise operations."""
    filts = all_filters(top)
    n = len(filts)
    idx = {f: k for k, f in enumerate(filts)}

    leq = [[filts[j] <= filts[i] for j in range(n)] for i in range(n)]

    meet = [[0] * n for _ in range(n)]
    join = [[0] * n for _ in range(n)]
    for i, fa in enumerate(filts):
        for j, fb in enumerate(filts):
            melts = {top.mt(a, b) for a in fa for b in fb}
            jelts = {top.jn(a, b) for a in fa for b in fb}
            meet[i][j] = idx[filter_closure(top, melts)]
            join[i][j] = idx[filter_closure(top, jelts)]

    labels = [_filter_label(top, f) for f in filts]
    space = SkewTopology.build(labels, leq, meet, join,
                               name=(top.name and top.name + "-completion"))

    canonical = tuple(idx[principal_filter(top, m)] for m in top.elements())
    strong = frozenset(k for k, f in enumerate(filts)
                       if top.is_idempotent(filter_minimum(top, f)))

    bij = AxiomStatus(len(set(canonical)) == n and len(canonical) == n,
                      None if len(set(canonical)) == n else ("not-bijective",))
    hom = _canonical_hom(top, space, canonical)
    transport = _idempotent_transport(top, space, filts)
    return Completion(top, space, filts, canonical, strong, bij, hom, transport)


def _canonical_hom(top, space, canonical):
    """Order, meet and join preservation of m |-> [up-set of m]."""
    for x in top.elements():
        for y in top.elements():
            cx, cy = canonical[x], canonical[y]
            if top.le(x, y) != space.le(cx, cy):
                return AxiomStatus(False, ("order", x, y))
            if space.mt(cx, cy) != canonical[top.mt(x, y)]:
                return AxiomStatus(False, ("meet", x, y))
            if space.jn(cx, cy) != canonical[top.jn(x, y)]:
                return AxiomStatus(False, ("join", x, y))
    return AxiomStatus(True)


def _idempotent_transport(top, space, filts):
    """Idempotent classes of C are exactly the classes of idempotent minima."""
    for k, f in enumerate(filts):
        m = filter_minimum(top, f)
        if space.is_idempotent(k) != top.is_idempotent(m):
            return AxiomStatus(False, ("transport", k, m))
    return AxiomStatus(True)


# ---------------------------------------------------------------------------
# pattern topologies
# ---------------------------------------------------------------------------

def _op_closure(top, seed):
    cur = frozenset(seed)
    while True:
        nxt = set(cur)
        for x in cur:
            for y in cur:
                nxt.add(top.mt(x, y))
                nxt.add(top.jn(x, y))
        nxt = frozenset(nxt)
        if nxt == cur:
            return cur
        cur = nxt


def pattern_topology(top):
    """Closure of the idempotents under bracketed meet/join expressions.

    Finite bracketed expressions reduce to iterated binary applications,
    so closing the idempotent set under the two tables is exhaustive.
    """
    closed = _op_closure(top, top.idempotent_indices())
    return top.restrict(sorted(closed),
                        name=(top.name and top.name + "-pattern"))


def strong_pattern(comp):
    """Closure of the strongly idempotent classes inside the completion."""
    closed = _op_closure(comp.space, sorted(comp.strong))
    return comp.space.restrict(sorted(closed),
                               name=(comp.parent.name and
                                     comp.parent.name + "-strong-pattern"))


@dataclass(frozen=True)
class PatternReport:
    """T(base), the strong pattern of C(base), and their exchange law.

    ``pattern_restriction`` certifies that the strong pattern computed in
    the completion of the base equals the one computed in the completion
    of the base's own pattern, compared through filter minima.
    """

    base_pattern: SkewTopology
    completion_pattern: SkewTopology
    pattern_restriction: AxiomStatus


def pattern_topologies(top):
    base_pat = pattern_topology(top)
    comp_pat = strong_pattern(completion(top))
    other = strong_pattern(completion(base_pat))
    status = _min_label_iso(top, comp_pat, other)
    return PatternReport(base_pat, comp_pat, status)


def _order_min_label(top, names):
    """Order-minimum of a label set, under the base topology's order."""
    idxs = [top.index(n) for n in names]
    for m in idxs:
        if all(top.le(m, x) for x in idxs):
            return top.labels[m]
    return min(names)      # no minimum: fall back to a deterministic key


def _min_label_iso(top, a, b):
    """Compare two completion-flavoured spaces through filter minima.

    Elements of either space are classes of filters whose members carry
    base labels; the key is the label of each filter's order-minimum,
    which names the class independently of the carrier it was formed in.
    """
    ka = [_order_min_label(top, l.strip("[]").split(",")) for l in a.labels]
    kb = [_order_min_label(top, l.strip("[]").split(",")) for l in b.labels]
    if sorted(ka) != sorted(kb):
        return AxiomStatus(False, ("carrier", tuple(sorted(ka)), tuple(sorted(kb))))
    pa = {k: i for i, k in enumerate(ka)}
    pb = {k: i for i, k in enumerate(kb)}
    for m1 in pa:
        for m2 in pa:
            i1, i2 = pa[m1], pa[m2]
            j1, j2 = pb[m1], pb[m2]
            if a.le(i1, i2) != b.le(j1, j2):
                return AxiomStatus(False, ("order", m1, m2))
            if ka[a.mt(i1, i2)] != kb[b.mt(j1, j2)]:
                return AxiomStatus(False, ("meet", m1, m2))
            if ka[a.jn(i1, i2)] != kb[b.jn(j1, j2)]:
                return AxiomStatus(False, ("join", m1, m2))
    return AxiomStatus(True)


# ---------------------------------------------------------------------------
# Stone topology and spectra
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FiniteSpace:
    """Plain finite topological space: labelled points, opens as frozensets."""

    points: tuple
    opens: tuple            # frozensets of point indices
    basis: tuple = ()

    def is_open(self, s):
        return frozenset(s) in set(self.opens)

    def minimal_open_containing(self, p):
        best = None
        for o in self.opens:
            if p in o and (best is None or o < best):
                best = o
        return best


def topology_from_basis(n_points, basis_sets):
    """Close the basis under binary intersections and unions to a fixpoint."""
    opens = {frozenset(), frozenset(range(n_points))}
    opens.update(frozenset(b) for b in basis_sets)
    changed = True
    while changed:
        changed = False
        cur = list(opens)
        for i, a in enumerate(cur):
            for b in cur[i:]:
                for c in (a & b, a | b):
                    if c not in opens:
                        opens.add(c)
                        changed = True
    return tuple(sorted(opens, key=lambda s: (len(s), tuple(sorted(s)))))


@dataclass(frozen=True)
class StoneReport:
    space: FiniteSpace
    filters: tuple
    basis: tuple                 # (element index, frozenset of point indices)
    inclusion_laws: AxiomStatus  # O_{x^y} within O_x & O_y; O_{xvy} beyond O_x | O_y


def stone_topology(top):
    """Basic opens O_l = the classes whose filter contains l."""
    filts = all_filters(top)
    basis = [(l, frozenset(k for k, f in enumerate(filts) if l in f))
             for l in top.elements()]
    opens = topology_from_basis(len(filts), [b for _, b in basis])
    points = tuple(_filter_label(top, f) for f in filts)
    space = FiniteSpace(points, opens, tuple(b for _, b in basis))
    laws = _stone_laws(top, dict(basis))
    return StoneReport(space, filts, tuple(basis), laws)


def _stone_laws(top, basis):
    for x in top.elements():
        for y in top.elements():
            if not basis[top.mt(x, y)] <= basis[x] & basis[y]:
                return AxiomStatus(False, ("meet-basis", x, y))
            if not basis[top.jn(x, y)] >= basis[x] | basis[y]:
                return AxiomStatus(False, ("join-basis", x, y))
    return AxiomStatus(True)


def minimal_point_filters(top):
    """Maximal proper filters; the minimal nonzero classes of C."""
    filts = all_filters(top)
    full = frozenset(top.elements())
    proper = [f for f in filts if f != full]
    out = []
    for f in proper:
        if not any(f < g for g in proper):
            out.append(f)
    return tuple(sorted(out, key=lambda f: tuple(sorted(f))))


def irreducible_point_filters(top):
    """Filters prime against joins: x v y in the filter forces x or y in.

    Binary joins suffice; family joins follow since v is associative and
    commutative here.  The class of bottom (the whole carrier) is not a
    point and is excluded.
    """
    filts = all_filters(top)
    full = frozenset(top.elements())
    out = []
    for f in filts:
        if f == full:
            continue
        prime = True
        for x in top.elements():
            for y in top.elements():
                if top.jn(x, y) in f and x not in f and y not in f:
                    prime = False
                    break
            if not prime:
                break
        if prime:
            out.append(f)
    return tuple(sorted(out, key=lambda f: tuple(sorted(f))))


@dataclass(frozen=True)
class Spectrum:
    """Point classes of the completion for one notion of point.

    ``kind`` is "minimal" (maximal proper filters, QSp) or "irreducible"
    (join-prime filters, Sp).  ``strong`` is the index sub-tuple of points
    with idempotent minimum, the intersection with the strong idempotents.
    """

    kind: str
    point_filters: tuple
    strong: tuple
    space: FiniteSpace          # point topology with basis p(l)
    basis: tuple                # (element, frozenset of point indices)

    @property
    def size(self):
        return len(self.point_filters)


def spectrum(top, kind="minimal"):
    if kind == "minimal":
        pts = minimal_point_filters(top)
    elif kind == "irreducible":
        pts = irreducible_point_filters(top)
    else:
        raise ValueError("unknown point kind %r" % (kind,))
    strong = tuple(k for k, f in enumerate(pts)
                   if top.is_idempotent(filter_minimum(top, f)))
    basis = [(l, frozenset(k for k, f in enumerate(pts) if l in f))
             for l in top.elements()]
    opens = topology_from_basis(len(pts), [b for _, b in basis])
    space = FiniteSpace(tuple(_filter_label(top, f) for f in pts), opens,
                        tuple(b for _, b in basis))
    return Spectrum(kind, pts, strong, space, tuple(basis))


def point_sets(top, kind="minimal"):
    """p(l) = points whose filter contains l (minimum below l)."""
    spec = spectrum(top, kind)
    return {l: s for l, s in spec.basis}, spec


@dataclass(frozen=True)
class PointSetLaws:
    """How p(-) interacts with the tables, checked pairwise.

    Join additivity p(x v y) = p(x) | p(y) is asserted only for the
    irreducible kind, where primality supplies it; for minimal points the
    failing pairs are reported, not judged.  The meet law uses the strong
    point sets P(-): P(x ^ y) = P(x) & P(y), which the idempotency of
    strong minima gives for either kind.
    """

    kind: str
    join_additive: AxiomStatus
    meet_multiplicative: AxiomStatus
    join_failures: tuple


def point_set_laws(top, kind="minimal"):
    psets, spec = point_sets(top, kind)
    strong_idx = frozenset(spec.strong)
    ssets = {l: psets[l] & strong_idx for l in top.elements()}

    join_fail = []
    for x in top.elements():
        for y in top.elements():
            if psets[top.jn(x, y)] != psets[x] | psets[y]:
                join_fail.append((x, y))
    join_status = AxiomStatus(True)
    if join_fail and kind == "irreducible":
        join_status = AxiomStatus(False, ("join-additive",) + tuple(join_fail[0]))

    meet_status = AxiomStatus(True)
    for x in top.elements():
        for y in top.elements():
            if ssets[top.mt(x, y)] != ssets[x] & ssets[y]:
                meet_status = AxiomStatus(False, ("meet-mult", x, y))
                break
        if not meet_status.holds:
            break

    return PointSetLaws(kind, join_status, meet_status, tuple(join_fail))


def join_irreducible_elements(top):
    """Nonzero x that are not a join of two strictly smaller elements.

    Exposed alongside the irreducible point filters so the two notions can
    be compared on any instance; no equality is asserted either way.
    """
    out = []
    for x in top.elements():
        if x == top.bottom:
            continue
        if any(top.jn(a, b) == x
               for a in top.elements() if top.lt(a, x)
               for b in top.elements() if top.lt(b, x)):
            continue
        out.append(x)
    return tuple(out)


# ---------------------------------------------------------------------------
# shadow / completion exchange
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExchangeReport:
    """Strong shadow of the pattern against completion of the shadow.

    ``strong_shadow`` is the lattice induced on the strongly idempotent
    classes inside the completion; ``shadow_completion`` is the completion
    of the base's shadow.  ``agree`` certifies they coincide through
    filter-minimum labels.
    """

    strong_shadow: SkewTopology
    shadow_completion: SkewTopology
    agree: AxiomStatus


def shadow_completion_exchange(top):
    """Both routes from a topology to the completed shadow, compared.

    Requires the full axiom package with the table join equal to the
    supremum; anything less and the identity is not claimed, so the gate
    raises with the failing clauses listed.
    """
    from .core import commutative_shadow, validate_skew
    rep = validate_skew(top, require_axiom_v=True)
    missing = list(rep.failing())
    if not rep.vee_complete_as_sup.holds:
        missing.append("vee-complete")
    if not rep.join_commutative.holds:
        missing.append("join-commutative")
    if missing:
        raise HypothesisNotMet(
            "hypothesis needs axioms (i)-(v) with supremum join; failing: %s"
            % ", ".join(missing), witness=tuple(missing))

    comp = completion(top)
    pat = strong_pattern(comp)
    sh_of_pat = commutative_shadow(pat)
    route_strong = sh_of_pat.as_topology()

    sh = commutative_shadow(top)
    route_completion = completion(sh.as_topology()).space

    status = _min_label_iso(top, route_strong, route_completion)
    return ExchangeReport(route_strong, route_completion, status)
