"""Finite skew topologies and their exhaustive axiom checks.

A skew topology is a finite bounded poset carrying total meet and join
tables.  The meet need not be commutative or idempotent; the join is
required to be commutative here.  Nothing is proved: every law is checked
by enumeration over the carrier, and every failure is returned with a
witness tuple that reproduces it.

Axioms, in the validator's labelling:

  i    x ^ y is a lower bound of x and y; 0 and 1 act as zero and unit for
       ^; the meet powers x, x^x, (x^x)^x, ... reach 0 exactly when x = 0.
  ii   ^ is associative and monotone in both arguments.
  iii  the order-dual package for v (upper bound, unit 0, absorber 1,
       associative, monotone, join powers reach 1 exactly at x = 1).
  iv   for ^-idempotent x and any z with x <= z:
           x v (x ^ z) <= (x v x) ^ z   and   x v (z ^ x) <= (x v z) ^ x.
  v    whenever 1 = l1 v ... v ln, every x equals (x^l1) v ... v (x^ln)
       and (l1^x) v ... v (ln^x); covers range over subsets of the carrier.

A separate flag records whether the join table is the supremum of the
order (`vee_complete_as_sup`); a table join that is not the supremum is
legal and simply reported.
"""

from dataclasses import dataclass, field
from itertools import combinations, product

from .errors import (
    EmptyExpression,
    JoinNotCommutative,
    MalformedTable,
    NoBottomTop,
    UnknownLabel,
)


@dataclass(frozen=True)
class SkewTopology:
    """Carrier with order and total meet/join tables.

    Elements are dense indices 0..n-1; ``labels[i]`` is the display name.
    ``leq[i][j]`` holds iff i <= j.  ``meet[i][j]`` / ``join[i][j]`` are
    element indices.
    """

    labels: tuple
    leq: tuple
    meet: tuple
    join: tuple
    bottom: int
    top: int
    name: str = ""

    # -- construction -------------------------------------------------------

    @classmethod
    def build(cls, labels, leq, meet, join, name=""):
        labels = tuple(labels)
        n = len(labels)
        if len(set(labels)) != n:
            raise MalformedTable("duplicate labels", witness=tuple(labels))
        leq = tuple(tuple(bool(x) for x in row) for row in leq)
        meet = tuple(tuple(int(x) for x in row) for row in meet)
        join = tuple(tuple(int(x) for x in row) for row in join)
        for tbl, what in ((leq, "leq"), (meet, "meet"), (join, "join")):
            if len(tbl) != n or any(len(row) != n for row in tbl):
                raise MalformedTable("%s table is not %dx%d" % (what, n, n))
        for tbl, what in ((meet, "meet"), (join, "join")):
            for i in range(n):
                for j in range(n):
                    if not 0 <= tbl[i][j] < n:
                        raise MalformedTable(
                            "%s[%s,%s] out of range" % (what, labels[i], labels[j]),
                            witness=(i, j))
        _check_partial_order(labels, leq)
        bottom = _unique_extreme(leq, lambda i, j: leq[i][j])
        top = _unique_extreme(leq, lambda i, j: leq[j][i])
        if bottom is None or top is None:
            raise NoBottomTop("order has no global bottom/top")
        return cls(labels, leq, meet, join, bottom, top, name)

    @classmethod
    def lattice_from_order(cls, labels, leq, name=""):
        """Derive meet/join tables as unique glb/lub of the given order."""
        from .errors import AmbiguousDefaultTable
        labels = tuple(labels)
        n = len(labels)
        leq = tuple(tuple(bool(x) for x in row) for row in leq)
        _check_partial_order(labels, leq)
        meet = [[0] * n for _ in range(n)]
        join = [[0] * n for _ in range(n)]
        for i in range(n):
            for j in range(n):
                glb = _unique_bound(leq, i, j, lower=True)
                lub = _unique_bound(leq, i, j, lower=False)
                if glb is None or lub is None:
                    raise AmbiguousDefaultTable(
                        "pair (%s, %s) has no unique glb/lub"
                        % (labels[i], labels[j]),
                        witness=(labels[i], labels[j]))
                meet[i][j] = glb
                join[i][j] = lub
        return cls.build(labels, leq, meet, join, name)

    @classmethod
    def lattice_from_pairs(cls, labels, pairs, name=""):
        """Same, but the order arrives as strict pairs of labels."""
        return cls.lattice_from_order(labels, order_from_pairs(labels, pairs),
                                      name)

    @classmethod
    def chain(cls, labels, name=""):
        n = len(labels)
        leq = [[i <= j for j in range(n)] for i in range(n)]
        return cls.lattice_from_order(labels, leq, name)

    # -- basic queries -------------------------------------------------------

    @property
    def n(self):
        return len(self.labels)

    def index(self, label):
        try:
            return self.labels.index(label)
        except ValueError:
            raise UnknownLabel("no element %r" % (label,), witness=(label,))

    def label(self, i):
        return self.labels[i]

    def le(self, i, j):
        return self.leq[i][j]

    def lt(self, i, j):
        return i != j and self.leq[i][j]

    def mt(self, i, j):
        return self.meet[i][j]

    def jn(self, i, j):
        return self.join[i][j]

    def elements(self):
        return range(self.n)

    def fold_meet(self, seq):
        it = iter(seq)
        acc = next(it)
        for x in it:
            acc = self.meet[acc][x]
        return acc

    def fold_join(self, seq):
        it = iter(seq)
        acc = next(it)
        for x in it:
            acc = self.join[acc][x]
        return acc

    def is_idempotent(self, i):
        return self.meet[i][i] == i

    def idempotent_indices(self):
        return tuple(i for i in self.elements() if self.is_idempotent(i))

    def atoms(self):
        """Elements covering bottom."""
        out = []
        for x in self.elements():
            if x == self.bottom or not self.le(self.bottom, x):
                continue
            if all(not (self.lt(self.bottom, y) and self.lt(y, x))
                   for y in self.elements()):
                out.append(x)
        return tuple(out)

    def covers(self):
        """Cover pairs (i, j) with i covered by j, for diagrams."""
        out = []
        for i in self.elements():
            for j in self.elements():
                if not self.lt(i, j):
                    continue
                if any(self.lt(i, k) and self.lt(k, j) for k in self.elements()):
                    continue
                out.append((i, j))
        return tuple(out)

    def uppers(self, i):
        return tuple(j for j in self.elements() if self.le(i, j))

    def lowers(self, i):
        return tuple(j for j in self.elements() if self.le(j, i))

    def join_primes(self):
        """Nonzero p with p <= x v y implying p <= x or p <= y."""
        out = []
        for p in self.elements():
            if p == self.bottom:
                continue
            ok = True
            for x in self.elements():
                for y in self.elements():
                    if self.le(p, self.jn(x, y)) and not (
                            self.le(p, x) or self.le(p, y)):
                        ok = False
                        break
                if not ok:
                    break
            if ok:
                out.append(p)
        return tuple(out)

    def restrict(self, subset, name=""):
        """Sub-structure on ``subset`` (must be closed under both tables)."""
        sub = sorted(set(subset))
        pos = {x: k for k, x in enumerate(sub)}
        for x in sub:
            for y in sub:
                if self.meet[x][y] not in pos or self.join[x][y] not in pos:
                    raise MalformedTable(
                        "subset not closed under the tables",
                        witness=(self.labels[x], self.labels[y]))
        labels = [self.labels[x] for x in sub]
        leq = [[self.leq[x][y] for y in sub] for x in sub]
        meet = [[pos[self.meet[x][y]] for y in sub] for x in sub]
        join = [[pos[self.join[x][y]] for y in sub] for x in sub]
        return SkewTopology.build(labels, leq, meet, join, name)

    def is_lattice(self):
        """Commutative idempotent tables with absorption, i.e. a real lattice."""
        for x in self.elements():
            if self.meet[x][x] != x or self.join[x][x] != x:
                return False
            for y in self.elements():
                if self.meet[x][y] != self.meet[y][x]:
                    return False
                if self.join[x][y] != self.join[y][x]:
                    return False
                if self.meet[x][self.join[x][y]] != x:
                    return False
                if self.join[x][self.meet[x][y]] != x:
                    return False
        return True


def _check_partial_order(labels, leq):
    n = len(labels)
    for i in range(n):
        if not leq[i][i]:
            raise MalformedTable("order not reflexive at %s" % (labels[i],),
                                 witness=(i,))
        for j in range(n):
            if i != j and leq[i][j] and leq[j][i]:
                raise MalformedTable(
                    "order not antisymmetric on (%s, %s)" % (labels[i], labels[j]),
                    witness=(i, j))
            for k in range(n):
                if leq[i][j] and leq[j][k] and not leq[i][k]:
                    raise MalformedTable(
                        "order not transitive on (%s, %s, %s)"
                        % (labels[i], labels[j], labels[k]),
                        witness=(i, j, k))


def order_from_pairs(labels, pairs):
    """Reflexive-transitive closure of strict label pairs as a leq matrix."""
    labels = tuple(labels)
    n = len(labels)
    pos = {l: i for i, l in enumerate(labels)}
    leq = [[i == j for j in range(n)] for i in range(n)]
    for a, b in pairs:
        if a not in pos or b not in pos:
            raise UnknownLabel("order pair uses unknown label %r"
                               % (a if a not in pos else b,),
                               witness=(a, b))
        leq[pos[a]][pos[b]] = True
    for k in range(n):
        for i in range(n):
            if leq[i][k]:
                row_k = leq[k]
                row_i = leq[i]
                for j in range(n):
                    if row_k[j]:
                        row_i[j] = True
    return tuple(tuple(row) for row in leq)


def _unique_extreme(leq, below):
    n = len(leq)
    found = None
    for i in range(n):
        if all(below(i, j) for j in range(n)):
            if found is not None:
                return None
            found = i
    return found


def _unique_bound(leq, i, j, lower):
    n = len(leq)
    if lower:
        cands = [k for k in range(n) if leq[k][i] and leq[k][j]]
        best = [k for k in cands if all(leq[m][k] for m in cands)]
    else:
        cands = [k for k in range(n) if leq[i][k] and leq[j][k]]
        best = [k for k in cands if all(leq[k][m] for m in cands)]
    return best[0] if len(best) == 1 else None


# ---------------------------------------------------------------------------
# axiom validation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AxiomStatus:
    holds: bool
    witness: tuple = None
    note: str = ""


@dataclass(frozen=True)
class AxiomReport:
    """Per-axiom statuses plus the two side flags.

    ``axioms`` maps "i".."v" to AxiomStatus.  ``vee_complete_as_sup`` is
    certified separately; a topology may be perfectly valid with a table
    join that is not the supremum.
    """

    axioms: tuple                      # ordered ((name, AxiomStatus), ...)
    vee_complete_as_sup: AxiomStatus
    join_commutative: AxiomStatus
    require_axiom_v: bool

    def status(self, name):
        for key, st in self.axioms:
            if key == name:
                return st
        raise KeyError(name)

    @property
    def valid(self):
        needed = ["i", "ii", "iii", "iv"] + (["v"] if self.require_axiom_v else [])
        return all(self.status(k).holds for k in needed)

    def failing(self):
        return tuple(k for k, st in self.axioms if not st.holds)


def validate_skew(top, require_axiom_v=False):
    """Exhaustively check axioms (i)-(v); first witness wins, in index order."""
    checks = (
        ("i", _axiom_i),
        ("ii", _axiom_ii),
        ("iii", _axiom_iii),
        ("iv", _axiom_iv),
        ("v", _axiom_v),
    )
    axioms = []
    for nm, fn in checks:
        axioms.append((nm, fn(top)))
    return AxiomReport(
        axioms=tuple(axioms),
        vee_complete_as_sup=_vee_sup_status(top),
        join_commutative=_join_comm_status(top),
        require_axiom_v=require_axiom_v,
    )


def meet_power_reaches_bottom(top, x):
    """Does the sequence x, x^x, (x^x)^x, ... ever hit bottom?

    The carrier is finite, so the left-associated powers cycle after at
    most n steps; detection stops at the first repeat.
    """
    seen = set()
    cur = x
    while cur not in seen:
        if cur == top.bottom:
            return True
        seen.add(cur)
        cur = top.meet[cur][x]
    return cur == top.bottom


def join_power_reaches_top(top, x):
    seen = set()
    cur = x
    while cur not in seen:
        if cur == top.top:
            return True
        seen.add(cur)
        cur = top.join[cur][x]
    return cur == top.top


def _axiom_i(top):
    b, t = top.bottom, top.top
    for x in top.elements():
        for y in top.elements():
            m = top.mt(x, y)
            if not (top.le(m, x) and top.le(m, y)):
                return AxiomStatus(False, ("i-lower", x, y))
        if top.mt(x, t) != x or top.mt(t, x) != x:
            return AxiomStatus(False, ("i-unit", x))
        if top.mt(x, b) != b or top.mt(b, x) != b:
            return AxiomStatus(False, ("i-zero", x))
        reaches = meet_power_reaches_bottom(top, x)
        if reaches != (x == b):
            return AxiomStatus(False, ("i-power", x))
    return AxiomStatus(True)


def _axiom_ii(top):
    for x in top.elements():
        for y in top.elements():
            for z in top.elements():
                if top.mt(top.mt(x, y), z) != top.mt(x, top.mt(y, z)):
                    return AxiomStatus(False, ("ii-assoc", x, y, z))
    for x in top.elements():
        for y in top.elements():
            if not top.le(x, y):
                continue
            for z in top.elements():
                if not top.le(top.mt(z, x), top.mt(z, y)):
                    return AxiomStatus(False, ("ii-mono-right", x, y, z))
                if not top.le(top.mt(x, z), top.mt(y, z)):
                    return AxiomStatus(False, ("ii-mono-left", x, y, z))
    return AxiomStatus(True)


def _axiom_iii(top):
    b, t = top.bottom, top.top
    for x in top.elements():
        for y in top.elements():
            j = top.jn(x, y)
            if not (top.le(x, j) and top.le(y, j)):
                return AxiomStatus(False, ("iii-upper", x, y))
        if top.jn(x, b) != x or top.jn(b, x) != x:
            return AxiomStatus(False, ("iii-unit", x))
        if top.jn(x, t) != t or top.jn(t, x) != t:
            return AxiomStatus(False, ("iii-one", x))
        reaches = join_power_reaches_top(top, x)
        if reaches != (x == t):
            return AxiomStatus(False, ("iii-power", x))
    for x in top.elements():
        for y in top.elements():
            for z in top.elements():
                if top.jn(top.jn(x, y), z) != top.jn(x, top.jn(y, z)):
                    return AxiomStatus(False, ("iii-assoc", x, y, z))
    for x in top.elements():
        for y in top.elements():
            if not top.le(x, y):
                continue
            for z in top.elements():
                if not top.le(top.jn(z, x), top.jn(z, y)):
                    return AxiomStatus(False, ("iii-mono-right", x, y, z))
                if not top.le(top.jn(x, z), top.jn(y, z)):
                    return AxiomStatus(False, ("iii-mono-left", x, y, z))
    return AxiomStatus(True)


def _axiom_iv(top):
    for x in top.elements():
        if not top.is_idempotent(x):
            continue
        for z in top.elements():
            if not top.le(x, z):
                continue
            lhs1 = top.jn(x, top.mt(x, z))
            rhs1 = top.mt(top.jn(x, x), z)
            if not top.le(lhs1, rhs1):
                return AxiomStatus(False, ("iv-1", x, z))
            lhs2 = top.jn(x, top.mt(z, x))
            rhs2 = top.mt(top.jn(x, z), x)
            if not top.le(lhs2, rhs2):
                return AxiomStatus(False, ("iv-2", x, z))
    return AxiomStatus(True)


def covers_of_top(top):
    """Subsets of the carrier whose iterated join is the top element.

    Subsets are enumerated in ascending bitmask order, which fixes which
    witness a failing axiom (v) reports.
    """
    n = top.n
    out = []
    for mask in range(1, 1 << n):
        subset = tuple(i for i in range(n) if mask >> i & 1)
        if top.fold_join(subset) == top.top:
            out.append(subset)
    return out


def _axiom_v(top):
    for cover in covers_of_top(top):
        for x in top.elements():
            right = top.fold_join([top.mt(x, l) for l in cover])
            if right != x:
                return AxiomStatus(False, ("v", x, cover))
            left = top.fold_join([top.mt(l, x) for l in cover])
            if left != x:
                return AxiomStatus(False, ("v-left", x, cover))
    return AxiomStatus(True)


def _vee_sup_status(top):
    for x in top.elements():
        for y in top.elements():
            j = top.jn(x, y)
            if not (top.le(x, j) and top.le(y, j)):
                return AxiomStatus(False, ("not-upper", x, y))
            for u in top.elements():
                if top.le(x, u) and top.le(y, u) and not top.le(j, u):
                    return AxiomStatus(False, ("not-least", x, y, u))
    return AxiomStatus(True)


def _join_comm_status(top):
    for x in top.elements():
        for y in top.elements():
            if top.jn(x, y) != top.jn(y, x):
                return AxiomStatus(False, ("join-comm", x, y))
    return AxiomStatus(True)


def recheck_axiom(top, witness):
    """Re-evaluate a witness tuple; True means the failure is reproduced."""
    kind = witness[0]
    if kind == "i-lower":
        _, x, y = witness
        m = top.mt(x, y)
        return not (top.le(m, x) and top.le(m, y))
    if kind == "i-unit":
        x = witness[1]
        return top.mt(x, top.top) != x or top.mt(top.top, x) != x
    if kind == "i-zero":
        x = witness[1]
        return top.mt(x, top.bottom) != top.bottom or top.mt(top.bottom, x) != top.bottom
    if kind == "i-power":
        x = witness[1]
        return meet_power_reaches_bottom(top, x) != (x == top.bottom)
    if kind == "ii-assoc":
        _, x, y, z = witness
        return top.mt(top.mt(x, y), z) != top.mt(x, top.mt(y, z))
    if kind == "ii-mono-right":
        _, x, y, z = witness
        return top.le(x, y) and not top.le(top.mt(z, x), top.mt(z, y))
    if kind == "ii-mono-left":
        _, x, y, z = witness
        return top.le(x, y) and not top.le(top.mt(x, z), top.mt(y, z))
    if kind == "iii-upper":
        _, x, y = witness
        j = top.jn(x, y)
        return not (top.le(x, j) and top.le(y, j))
    if kind == "iii-unit":
        x = witness[1]
        return top.jn(x, top.bottom) != x or top.jn(top.bottom, x) != x
    if kind == "iii-one":
        x = witness[1]
        return top.jn(x, top.top) != top.top or top.jn(top.top, x) != top.top
    if kind == "iii-power":
        x = witness[1]
        return join_power_reaches_top(top, x) != (x == top.top)
    if kind == "iii-assoc":
        _, x, y, z = witness
        return top.jn(top.jn(x, y), z) != top.jn(x, top.jn(y, z))
    if kind == "iii-mono-right":
        _, x, y, z = witness
        return top.le(x, y) and not top.le(top.jn(z, x), top.jn(z, y))
    if kind == "iii-mono-left":
        _, x, y, z = witness
        return top.le(x, y) and not top.le(top.jn(x, z), top.jn(y, z))
    if kind == "iv-1":
        _, x, z = witness
        return not top.le(top.jn(x, top.mt(x, z)), top.mt(top.jn(x, x), z))
    if kind == "iv-2":
        _, x, z = witness
        return not top.le(top.jn(x, top.mt(z, x)), top.mt(top.jn(x, z), x))
    if kind == "v":
        _, x, cover = witness
        return top.fold_join([top.mt(x, l) for l in cover]) != x
    if kind == "v-left":
        _, x, cover = witness
        return top.fold_join([top.mt(l, x) for l in cover]) != x
    if kind == "not-upper":
        _, x, y = witness
        j = top.jn(x, y)
        return not (top.le(x, j) and top.le(y, j))
    if kind == "not-least":
        _, x, y, u = witness
        return top.le(x, u) and top.le(y, u) and not top.le(top.jn(x, y), u)
    if kind == "join-comm":
        _, x, y = witness
        return top.jn(x, y) != top.jn(y, x)
    raise ValueError("unknown witness kind %r" % (kind,))


def idempotents(top):
    """The set id_^ = {x : x ^ x = x} as a frozenset of indices."""
    return frozenset(top.idempotent_indices())


# ---------------------------------------------------------------------------
# commutative shadow
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ShadowLattice:
    """Idempotent carrier with the shadow meet and inherited join.

    The shadow meet of s, t is the join of all idempotents below s ^ t.
    ``carrier`` holds parent indices; the tables are indexed by carrier
    position.  ``modular`` certifies x v (y ^| z) <= (x v y) ^| z for all
    x <= z (^| is the shadow meet); ``laws`` certifies that both
    operations are commutative, associative and idempotent on the carrier.
    """

    parent: SkewTopology
    carrier: tuple
    meet: tuple
    join: tuple
    modular: AxiomStatus
    laws: AxiomStatus
    closed: AxiomStatus

    @property
    def n(self):
        return len(self.carrier)

    def as_topology(self, name=""):
        pos = {x: k for k, x in enumerate(self.carrier)}
        labels = [self.parent.labels[x] for x in self.carrier]
        leq = [[self.parent.le(x, y) for y in self.carrier] for x in self.carrier]
        return SkewTopology.build(labels, leq, self.meet, self.join,
                                  name or (self.parent.name and self.parent.name + "-shadow"))


def shadow_meet(top, s, t):
    """Join of every idempotent below s ^ t (ascending index fold)."""
    m = top.mt(s, t)
    below = [g for g in top.idempotent_indices() if top.le(g, m)]
    return top.fold_join(below)


def commutative_shadow(top):
    """The idempotent part with the shadow meet; laws checked, not assumed."""
    comm = _join_comm_status(top)
    if not comm.holds:
        x, y = comm.witness[1], comm.witness[2]
        raise JoinNotCommutative(
            "join(%s, %s) != join(%s, %s)"
            % (top.labels[x], top.labels[y], top.labels[y], top.labels[x]),
            witness=comm.witness)
    carrier = top.idempotent_indices()
    pos = {x: k for k, x in enumerate(carrier)}

    closed = AxiomStatus(True)
    meet_tbl = [[0] * len(carrier) for _ in carrier]
    join_tbl = [[0] * len(carrier) for _ in carrier]
    for a, x in enumerate(carrier):
        for b, y in enumerate(carrier):
            sm = shadow_meet(top, x, y)
            jj = top.jn(x, y)
            if sm not in pos or jj not in pos:
                bad = sm if sm not in pos else jj
                closed = AxiomStatus(False, ("not-closed", x, y, bad))
                sm = sm if sm in pos else x
                jj = jj if jj in pos else x
            meet_tbl[a][b] = pos.get(sm, 0)
            join_tbl[a][b] = pos.get(jj, 0)

    laws = _shadow_laws(top, carrier, meet_tbl, join_tbl)
    modular = _shadow_modular(top, carrier, meet_tbl, join_tbl)
    return ShadowLattice(top, carrier, tuple(map(tuple, meet_tbl)),
                         tuple(map(tuple, join_tbl)), modular, laws, closed)


def _shadow_laws(top, carrier, meet_tbl, join_tbl):
    k = len(carrier)
    for tbl, tag in ((meet_tbl, "shadow-meet"), (join_tbl, "shadow-join")):
        for a in range(k):
            if tbl[a][a] != a:
                return AxiomStatus(False, (tag + "-idem", carrier[a]))
            for b in range(k):
                if tbl[a][b] != tbl[b][a]:
                    return AxiomStatus(False, (tag + "-comm", carrier[a], carrier[b]))
                for c in range(k):
                    if tbl[tbl[a][b]][c] != tbl[a][tbl[b][c]]:
                        return AxiomStatus(
                            False, (tag + "-assoc", carrier[a], carrier[b], carrier[c]))
    return AxiomStatus(True)


def _shadow_modular(top, carrier, meet_tbl, join_tbl):
    k = len(carrier)
    for a in range(k):
        for c in range(k):
            if not top.le(carrier[a], carrier[c]):
                continue
            for b in range(k):
                lhs = join_tbl[a][meet_tbl[b][c]]
                rhs = meet_tbl[join_tbl[a][b]][c]
                if not top.le(carrier[lhs], carrier[rhs]):
                    return AxiomStatus(
                        False, ("modular", carrier[a], carrier[b], carrier[c]))
    return AxiomStatus(True)


# ---------------------------------------------------------------------------
# expression evaluation
# ---------------------------------------------------------------------------

_MEET_OPS = {"∧", "&", "^"}
_JOIN_OPS = {"∨", "|"}


def _tokenize_expr(text):
    tokens = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch in "()":
            tokens.append(ch)
            i += 1
            continue
        if ch in _MEET_OPS or ch in _JOIN_OPS:
            tokens.append(ch)
            i += 1
            continue
        j = i
        while j < len(text) and not text[j].isspace() \
                and text[j] not in "()" \
                and text[j] not in _MEET_OPS and text[j] not in _JOIN_OPS:
            j += 1
        tokens.append(text[i:j])
        i = j
    return tokens


def eval_expr(top, text):
    """Evaluate a bracketed meet/join expression over element labels.

    Unbracketed chains of a single operator are folded left to right,
    which associativity licenses; mixing the two operators without
    brackets is rejected rather than guessed at.
    """
    tokens = _tokenize_expr(text)
    if not tokens:
        raise EmptyExpression("empty expression")
    pos = 0

    def parse_atom():
        nonlocal pos
        if pos >= len(tokens):
            raise EmptyExpression("expression ends early")
        tok = tokens[pos]
        if tok == "(":
            pos += 1
            val = parse_expr()
            if pos >= len(tokens) or tokens[pos] != ")":
                raise EmptyExpression("unbalanced parenthesis")
            pos += 1
            return val
        if tok == ")" or tok in _MEET_OPS or tok in _JOIN_OPS:
            raise EmptyExpression("operator %r where an element was expected" % tok)
        pos += 1
        return top.index(tok)

    def parse_expr():
        nonlocal pos
        acc = parse_atom()
        op_kind = None
        while pos < len(tokens) and tokens[pos] not in (")",):
            tok = tokens[pos]
            if tok in _MEET_OPS:
                kind = "meet"
            elif tok in _JOIN_OPS:
                kind = "join"
            else:
                raise EmptyExpression("missing operator before %r" % tok)
            if op_kind is None:
                op_kind = kind
            elif op_kind != kind:
                raise EmptyExpression(
                    "mixed meet/join without brackets; add parentheses")
            pos += 1
            rhs = parse_atom()
            acc = top.mt(acc, rhs) if kind == "meet" else top.jn(acc, rhs)
        return acc

    result = parse_expr()
    if pos != len(tokens):
        raise EmptyExpression("trailing tokens from %r" % (tokens[pos],))
    return result
