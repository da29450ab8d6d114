"""Presheaves of rational vector spaces over topologies and systems.

Values live in finite-dimensional vector spaces over the rationals with
exact arithmetic, so every colimit, stalk, kernel and gluing question
reduces to row reduction.  The site of a topology is its carrier without
the bottom element; the section object at bottom, when wanted, is the
colimit of the whole diagram of classical elements.

On a dynamical system the fiberwise presheaves are tied together by
comparison maps that commute with restrictions.  Accessible strings then
carry section spaces (compatible tuples of fiber sections), which form a
presheaf on the moment space; separatedness, sheafification and the stalk
comparison against the fiber stalks live here.
"""

from dataclasses import dataclass

from . import linalg
from .completion import spectrum, filter_minimum
from .core import AxiomStatus
from .dynamics import (
    moment_space,
    string_member,
    _join_string,
    _string_open,
)
from .errors import (
    DimensionMismatch,
    InconsistentDiagram,
    MalformedTable,
    NonCommutingSquare,
    NotAPoint,
    NotDirected,
    PreconditionFailed,
)


def _transpose(m):
    r, c = linalg.shape(m)
    return [[m[i][j] for i in range(r)] for j in range(c)]


def _right_inverse(m):
    """Columns solving m @ s_k = e_k; exists for surjective m."""
    r, c = linalg.shape(m)
    cols = []
    for k in range(r):
        e = [linalg.frac(1 if i == k else 0) for i in range(r)]
        x = linalg.solve(m, e)
        if x is None:
            return None
        cols.append(x)
    return [[cols[k][j] for k in range(r)] for j in range(c)]


def _solve_factor(p, b):
    """Matrix a with a @ p = b, or None; p need not be square."""
    if not p:
        # factoring through the zero space needs b = 0
        if all(x == 0 for row in b for x in row):
            return [[] for _ in b]
        return None
    pt = _transpose(p)
    rows = []
    for brow in b:
        y = linalg.solve(pt, list(brow))
        if y is None:
            return None
        rows.append(y)
    return rows


# ---------------------------------------------------------------------------
# presheaves on a single topology
# ---------------------------------------------------------------------------

class Presheaf:
    """Sections and restrictions over the nonbottom elements.

    ``dims`` maps element index to fiber dimension; ``restrictions`` maps
    pairs (mu, lam) with mu < lam to the matrix of the restriction from
    the lam-sections down to the mu-sections.  Identity restrictions are
    implied.  ``classical`` marks the elements whose diagram computes the
    bottom section; by default every site element is classical.
    """

    def __init__(self, base, dims, restrictions, classical=None, name=""):
        self.base = base
        self.dims = dict(dims)
        self.res = {tuple(k): linalg.matrix(v)
                    for k, v in restrictions.items()}
        self.name = name
        site = self.site()
        if classical is None:
            classical = site
        self.classical = frozenset(classical)
        for e in site:
            if e not in self.dims or self.dims[e] < 0:
                raise MalformedTable("missing or negative dimension at %s"
                                     % base.labels[e], witness=(e,))

    def site(self):
        return tuple(e for e in self.base.elements() if e != self.base.bottom)

    def dim(self, e):
        return self.dims[e]

    def rho(self, mu, lam):
        """Restriction from lam down to mu, for mu <= lam in the site."""
        if mu == lam:
            return linalg.identity(self.dims[lam])
        if (mu, lam) not in self.res:
            raise MalformedTable(
                "no restriction %s <= %s" % (self.base.labels[mu],
                                             self.base.labels[lam]),
                witness=(mu, lam))
        return self.res[(mu, lam)]

    @classmethod
    def constant(cls, base, dim=1, name=""):
        dims = {}
        res = {}
        site = [e for e in base.elements() if e != base.bottom]
        for e in site:
            dims[e] = dim
        for mu in site:
            for lam in site:
                if mu != lam and base.le(mu, lam):
                    res[(mu, lam)] = linalg.identity(dim)
        return cls(base, dims, res, name=name)


@dataclass(frozen=True)
class PresheafReport:
    shapes: AxiomStatus
    composition: AxiomStatus

    @property
    def valid(self):
        return self.shapes.holds and self.composition.holds


def validate_presheaf(p):
    base = p.base
    site = p.site()
    for mu in site:
        for lam in site:
            if not base.le(mu, lam):
                continue
            m = p.rho(mu, lam)
            # 0-row matrices carry no column count; only check what exists
            good = len(m) == p.dim(mu) and (not m or len(m[0]) == p.dim(lam))
            if not good:
                raise DimensionMismatch(
                    "restriction %s <= %s has shape %s, wanted (%d, %d)"
                    % (base.labels[mu], base.labels[lam], linalg.shape(m),
                       p.dim(mu), p.dim(lam)))
    for nu in site:
        for mu in site:
            for lam in site:
                if not (base.le(nu, mu) and base.le(mu, lam)):
                    continue
                left = linalg.mat_mul(p.rho(nu, mu), p.rho(mu, lam))
                direct = p.rho(nu, lam)
                defect = linalg.mat_sub(left, direct)
                if not linalg.is_zero_matrix(defect):
                    raise NonCommutingSquare(
                        "restrictions %s <= %s <= %s do not compose"
                        % (base.labels[nu], base.labels[mu], base.labels[lam]),
                        witness=(nu, mu, lam, defect))
    return PresheafReport(AxiomStatus(True), AxiomStatus(True))


# ---------------------------------------------------------------------------
# colimits of finite diagrams
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ColimitResult:
    """Quotient colimit plus, on directed indices, the top-object shortcut.

    ``projection`` maps the direct sum onto the colimit; ``cocone[i]`` is
    the leg from object i.  When the index is directed it has a greatest
    element and the colimit is that object on the nose: ``iso`` realizes
    the certified isomorphism.
    """

    dims: tuple
    offsets: tuple
    dim: int
    projection: list
    cocone: tuple
    directed: bool
    max_index: int
    shortcut_dim: int
    iso: list
    certified: AxiomStatus


def colimit(dims, pairs, maps):
    """Colimit of a finite poset-indexed diagram of rational spaces.

    ``pairs`` lists (i, j) for every comparable i <= j of the index;
    ``maps[(i, j)]`` is the matrix of the transition.  Identity loops may
    be omitted.  Functoriality failures raise InconsistentDiagram.
    """
    n = len(dims)
    rel = {(i, i) for i in range(n)} | {tuple(p) for p in pairs}
    table = {}
    for (i, j) in rel:
        if i == j:
            table[(i, j)] = linalg.identity(dims[i])
            continue
        if (i, j) not in maps:
            raise InconsistentDiagram("no map for pair %s" % ((i, j),),
                                      witness=(i, j))
        m = linalg.matrix(maps[(i, j)])
        if linalg.shape(m) != (dims[j], dims[i]):
            raise DimensionMismatch("map %s is %s, wanted (%d, %d)"
                                    % ((i, j), linalg.shape(m),
                                       dims[j], dims[i]))
        table[(i, j)] = m
    for (i, j) in rel:
        for (j2, k) in rel:
            if j2 != j:
                continue
            if (i, k) not in rel:
                if i != k and not (i == j or j == k):
                    raise InconsistentDiagram(
                        "index relation not transitive at %s" % ((i, j, k),),
                        witness=(i, j, k))
                continue
            comp = linalg.mat_mul(table[(j, k)], table[(i, j)])
            if not linalg.mat_eq(comp, table[(i, k)]):
                raise InconsistentDiagram(
                    "triangle %s does not commute" % ((i, j, k),),
                    witness=(i, j, k,
                             linalg.mat_sub(comp, table[(i, k)])))

    offsets = []
    total = 0
    for d in dims:
        offsets.append(total)
        total += d
    relations = []
    for (i, j) in rel:
        if i == j:
            continue
        f = table[(i, j)]
        for b in range(dims[i]):
            v = [linalg.frac(0)] * total
            v[offsets[i] + b] += 1
            for r in range(dims[j]):
                v[offsets[j] + r] -= f[r][b]
            relations.append(v)
    dim, projection = linalg.quotient(total, relations)
    cocone = []
    for i in range(n):
        leg = [[projection[r][offsets[i] + c] for c in range(dims[i])]
               for r in range(dim)]
        cocone.append(leg)

    directed = all(
        any((i, k) in rel and (j, k) in rel for k in range(n))
        for i in range(n) for j in range(n))
    max_index, shortcut_dim, iso = -1, -1, []
    certified = AxiomStatus(False, None, "index not directed")
    if directed and n:
        for k in range(n):
            if all((i, k) in rel for i in range(n)):
                max_index = k
                break
        shortcut_dim = dims[max_index]
        blocks = [[linalg.frac(0)] * total for _ in range(shortcut_dim)]
        for i in range(n):
            f = table[(i, max_index)]
            for r in range(shortcut_dim):
                for c in range(dims[i]):
                    blocks[r][offsets[i] + c] = f[r][c]
        iso = _solve_factor(projection, blocks)
        ok = (iso is not None and dim == shortcut_dim
              and linalg.is_invertible(iso)
              and linalg.mat_eq(linalg.mat_mul(iso, projection), blocks))
        certified = AxiomStatus(bool(ok), None if ok else (max_index,))
    return ColimitResult(tuple(dims), tuple(offsets), dim, projection,
                         tuple(cocone), directed, max_index, shortcut_dim,
                         iso, certified)


def bottom_section(p):
    """Section object at bottom: colimit over the classical elements."""
    idx = sorted(p.classical)
    pairs = []
    maps = {}
    for a, ea in enumerate(idx):
        for b, eb in enumerate(idx):
            # maps run from bigger elements down to smaller ones
            if ea != eb and p.base.le(eb, ea):
                pairs.append((a, b))
                maps[(a, b)] = p.rho(eb, ea)
    return colimit([p.dim(e) for e in idx], pairs, maps)


# ---------------------------------------------------------------------------
# stalks
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StalkResult:
    point: int
    dim: int
    via_minimum: int
    quotient: ColimitResult
    iso: list
    cofinal: AxiomStatus


def stalk(p, point, kind="minimal"):
    """Stalk at a point of the base, computed two independent ways.

    The index is the classical part of the up-set of the point; on it the
    restriction diagram is directed toward the point, so the value at the
    point is the whole colimit.  The generic quotient is computed anyway
    and the agreement certified.
    """
    base = p.base
    pts = {filter_minimum(base, f)
           for f in spectrum(base, kind).point_filters}
    if point not in pts:
        raise NotAPoint("%s is not a %s point" % (base.labels[point], kind),
                        witness=(point, kind))
    up = [e for e in p.site() if base.le(point, e)]
    cof = AxiomStatus(True)
    for e in up:
        if not any(c in p.classical and base.le(point, c) and base.le(c, e)
                   for c in up):
            cof = AxiomStatus(False, (e,))
    idx = [e for e in up if e in p.classical]
    if not idx:
        raise NotAPoint("no classical elements above %s" % base.labels[point],
                        witness=(point, "classical"))
    pairs = []
    maps = {}
    for a, ea in enumerate(idx):
        for b, eb in enumerate(idx):
            if ea != eb and base.le(eb, ea):
                pairs.append((a, b))
                maps[(a, b)] = p.rho(eb, ea)
    co = colimit([p.dim(e) for e in idx], pairs, maps)
    via_min = p.dim(point) if point in idx else co.shortcut_dim
    return StalkResult(point, co.dim, via_min, co, co.iso, cof)


# ---------------------------------------------------------------------------
# dynamical presheaves
# ---------------------------------------------------------------------------

class DynPresheaf:
    """One presheaf per instant plus comparison maps along the system.

    ``cmp[(i, j)][lam]`` is the matrix from the lam-sections at instant i
    to the sections at the transported element at instant j.  Pairs whose
    transported element is bottom fall outside the site and carry no map
    and no constraint.
    """

    def __init__(self, system, sheets, cmp, name=""):
        self.system = system
        self.sheets = tuple(sheets)
        self.cmp = {k: {e: linalg.matrix(m) for e, m in d.items()}
                    for k, d in cmp.items()}
        self.name = name
        for i in system.timeline.times():
            self.cmp.setdefault((i, i), {})

    def cmpmap(self, i, j, lam):
        if i == j:
            return linalg.identity(self.sheets[i].dim(lam))
        tgt = self.system.apply(i, j, lam)
        if tgt == self.system.spaces[j].bottom:
            return None
        d = self.cmp.get((i, j), {})
        if lam not in d:
            raise MalformedTable(
                "no comparison map at %s for %s -> %s"
                % (self.system.spaces[i].labels[lam], i, j),
                witness=(i, j, lam))
        return d[lam]

    @classmethod
    def constant(cls, system, dim=1, name=""):
        sheets = [Presheaf.constant(sp, dim) for sp in system.spaces]
        cmp = {}
        tl = system.timeline
        for i in tl.times():
            for j in tl.times():
                if i >= j:
                    continue
                d = {}
                for lam in sheets[i].site():
                    if system.apply(i, j, lam) != system.spaces[j].bottom:
                        d[lam] = linalg.identity(dim)
                cmp[(i, j)] = d
        return cls(system, sheets, cmp, name=name)


@dataclass(frozen=True)
class DynPresheafReport:
    sheet_reports: tuple
    identity: AxiomStatus
    composition: AxiomStatus
    squares: AxiomStatus

    @property
    def valid(self):
        return all(s.holds for s in (self.identity, self.composition,
                                     self.squares))


def validate_dyn_presheaf(dp):
    sys_ = dp.system
    tl = sys_.timeline
    sheet_reports = tuple(validate_presheaf(s) for s in dp.sheets)

    for i in tl.times():
        for j in tl.times():
            if i > j:
                continue
            src = dp.sheets[i]
            dst = dp.sheets[j]
            for lam in src.site():
                m = dp.cmpmap(i, j, lam)
                if m is None:
                    continue
                tgt = sys_.apply(i, j, lam)
                want = (dst.dim(tgt), src.dim(lam))
                if linalg.shape(m) != want:
                    raise DimensionMismatch(
                        "comparison at %s for %d -> %d has shape %s, wanted %s"
                        % (sys_.spaces[i].labels[lam], i, j,
                           linalg.shape(m), want))

    for i in tl.times():
        for j in tl.times():
            for k in tl.times():
                if not i <= j <= k:
                    continue
                for lam in dp.sheets[i].site():
                    mid = sys_.apply(i, j, lam)
                    if mid == sys_.spaces[j].bottom:
                        continue
                    end = sys_.apply(j, k, mid)
                    if end == sys_.spaces[k].bottom:
                        continue
                    left = linalg.mat_mul(dp.cmpmap(j, k, mid),
                                          dp.cmpmap(i, j, lam))
                    direct = dp.cmpmap(i, k, lam)
                    defect = linalg.mat_sub(left, direct)
                    if not linalg.is_zero_matrix(defect):
                        raise NonCommutingSquare(
                            "comparisons at %s do not compose over (%d,%d,%d)"
                            % (sys_.spaces[i].labels[lam], i, j, k),
                            witness=(i, j, k, lam, defect))

    for i in tl.times():
        for j in tl.times():
            if i > j:
                continue
            src = dp.sheets[i]
            dst = dp.sheets[j]
            for lam in src.site():
                for mu in src.site():
                    if mu == lam or not sys_.spaces[i].le(mu, lam):
                        continue
                    a = sys_.apply(i, j, lam)
                    b = sys_.apply(i, j, mu)
                    if b == sys_.spaces[j].bottom:
                        continue
                    left = linalg.mat_mul(dst.rho(b, a), dp.cmpmap(i, j, lam))
                    right = linalg.mat_mul(dp.cmpmap(i, j, mu),
                                           src.rho(mu, lam))
                    defect = linalg.mat_sub(left, right)
                    if not linalg.is_zero_matrix(defect):
                        raise NonCommutingSquare(
                            "square at %s <= %s over %d -> %d"
                            % (sys_.spaces[i].labels[mu],
                               sys_.spaces[i].labels[lam], i, j),
                            witness=(i, j, lam, mu, defect))
    return DynPresheafReport(sheet_reports, AxiomStatus(True),
                             AxiomStatus(True), AxiomStatus(True))


# ---------------------------------------------------------------------------
# string section spaces
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StringSpace:
    """Solution space of the compatibility system along one string.

    A section is one fiber section per support instant; for every earlier
    instant the comparison image, restricted down onto the later component,
    must match the later section.  ``basis`` lists spanning vectors of the
    solution subspace of the direct sum.
    """

    key: tuple
    times: tuple
    comps: tuple
    dims: tuple
    offsets: tuple
    total: int
    dim: int
    basis: tuple

    def block(self, vector, k):
        return vector[self.offsets[k]:self.offsets[k] + self.dims[k]]


def string_space(dp, string):
    sys_ = dp.system
    times = string.support
    comps = string.components
    dims = tuple(dp.sheets[tq].dim(x) for tq, x in zip(times, comps))
    offsets, total = [], 0
    for d in dims:
        offsets.append(total)
        total += d
    rows = []
    for a, ta in enumerate(times):
        for b in range(a + 1, len(times)):
            tb = times[b]
            w = sys_.apply(ta, tb, comps[a])
            if w == sys_.spaces[tb].bottom:
                continue
            cmp_m = dp.cmpmap(ta, tb, comps[a])
            rho = dp.sheets[tb].rho(w, comps[b])
            nrows = len(rho)
            for r in range(nrows):
                v = [linalg.frac(0)] * total
                for c in range(dims[b]):
                    v[offsets[b] + c] += rho[r][c]
                for c in range(dims[a]):
                    v[offsets[a] + c] -= cmp_m[r][c]
                rows.append(v)
    if rows:
        basis = linalg.solution_space(rows)
    else:
        basis = [list(row) for row in linalg.identity(total)]
    return StringSpace(string.key(), times, comps, dims, tuple(offsets),
                       total, len(basis), tuple(tuple(v) for v in basis))


def string_le(system, a, b):
    """a <= b in the string order: support shrinks, components descend."""
    if not set(a.support) <= set(b.support):
        return False
    for tq in a.support:
        if not system.spaces[tq].le(a.component(tq), b.component(tq)):
            return False
    return True


def string_restriction(dp, small, big):
    """Matrix of the section restriction from the big string to the small."""
    sys_ = dp.system
    cols = []
    for v in big.basis:
        w = []
        for k, tq in enumerate(small.times):
            kb = big.times.index(tq)
            rho = dp.sheets[tq].rho(small.comps[k], big.comps[kb])
            w.extend(linalg.mat_vec(rho, list(big.block(list(v), kb))))
        coords = linalg.coordinates(w, [list(x) for x in small.basis])
        if coords is None:
            raise InconsistentDiagram(
                "restricted section leaves the solution space",
                witness=(big.key, small.key))
        cols.append(coords)
    return [[cols[c][r] for c in range(len(cols))]
            for r in range(small.dim)] if cols else linalg.zeros(small.dim, 0)


# ---------------------------------------------------------------------------
# the string presheaf on the moment space
# ---------------------------------------------------------------------------

class MomentPresheaf:
    """Section spaces keyed by the opens the strings carve out.

    Each distinct open gets a canonical representative string, the
    componentwise join of all strings carving that open; the section space
    is the representative's.  ``rep_flags`` records opens where the join
    escapes the open or where two representatives disagree in dimension.
    ``maps[(small, big)]`` is the restriction between basis opens when the
    canonical representatives are comparable; pairs without comparable
    representatives land in ``missing``.
    """

    def __init__(self, dyn, t, moment, reps, spaces, maps, missing, rep_flags):
        self.dyn = dyn
        self.t = t
        self.moment = moment
        self.reps = reps
        self.spaces = spaces
        self.maps = maps
        self.missing = tuple(missing)
        self.rep_flags = tuple(rep_flags)

    def opens(self):
        return tuple(sorted(self.spaces, key=lambda u: (len(u), sorted(u))))

    def space_of(self, u):
        return self.spaces[u]


def moment_presheaf(dp, t):
    sys_ = dp.system
    ms = moment_space(sys_, t)
    groups = {}
    for s in ms.strings:
        u = _string_open(sys_, s, ms.points)
        groups.setdefault(u, []).append(s)

    reps, spaces, rep_flags = {}, {}, []
    for u, group in groups.items():
        rep = _join_string(sys_, t, group) if len(group) > 1 else group[0]
        if rep is None or _string_open(sys_, rep, ms.points) != u:
            rep_flags.append((u, "join-escapes"))
            rep = group[0]
        reps[u] = rep
        spaces[u] = string_space(dp, rep)
        for s in group:
            other = string_space(dp, s)
            if other.dim != spaces[u].dim:
                rep_flags.append((u, "representative-dimension", s.key(),
                                  other.dim, spaces[u].dim))

    maps, missing = {}, []
    opens = sorted(spaces, key=lambda x: (len(x), sorted(x)))
    for usm in opens:
        for ubg in opens:
            if usm == ubg or not usm <= ubg:
                continue
            if string_le(sys_, reps[usm], reps[ubg]):
                maps[(usm, ubg)] = string_restriction(
                    dp, spaces[usm], spaces[ubg])
            else:
                missing.append((usm, ubg))
    return MomentPresheaf(dp, t, ms, reps, spaces, maps, missing, rep_flags)


# ---------------------------------------------------------------------------
# separatedness
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SeparatedReport:
    separated: bool
    witness: tuple
    missing: tuple = ()


def _joint_kernel(dims_and_maps, source_dim):
    rows = []
    for m in dims_and_maps:
        rows.extend(m)
    if not rows:
        return [list(v) for v in linalg.identity(source_dim)]
    return linalg.nullspace(rows)


def is_separated(obj):
    """Injectivity of joint restriction along every cover.

    For a presheaf on a topology, a cover of an element is a subset of its
    lower set whose ascending fold-join recovers it.  On a moment presheaf
    the covers are families of basis opens with union the covered open.
    """
    if isinstance(obj, Presheaf):
        return _separated_presheaf(obj)
    if isinstance(obj, FullPresheaf):
        return _separated_full(obj)
    return _separated_moment(obj)


def _separated_presheaf(p):
    base = p.base
    for lam in p.site():
        lows = [m for m in p.site() if base.le(m, lam)]
        for mask in range(1, 1 << len(lows)):
            sub = [lows[k] for k in range(len(lows)) if mask >> k & 1]
            if base.fold_join(sub) != lam:
                continue
            maps = [p.rho(m, lam) for m in sub]
            ker = _joint_kernel(maps, p.dim(lam))
            if ker:
                return SeparatedReport(False, (lam, tuple(sub), tuple(ker[0])))
    return SeparatedReport(True, ())


def _separated_full(fp):
    # covers drawn from strictly smaller opens; a cover containing the
    # open itself restricts along an identity and can never witness
    for u in fp.all_opens:
        if not u:
            continue
        inside = [v for v in fp.all_opens if v and v < u]
        for mask in range(1, 1 << len(inside)):
            sub = [inside[k] for k in range(len(inside)) if mask >> k & 1]
            if frozenset().union(*sub) != u:
                continue
            maps = [fp.rho(v, u) for v in sub]
            ker = _joint_kernel(maps, fp.dim(u))
            if ker:
                return SeparatedReport(False, (u, tuple(sub), tuple(ker[0])))
    return SeparatedReport(True, ())


def _separated_moment(mp):
    opens = mp.opens()
    for u in opens:
        if not u:
            continue
        inside = [v for v in opens if v and v <= u]
        usable = [v for v in inside if v == u or (v, u) in mp.maps]
        for mask in range(1, 1 << len(usable)):
            sub = [usable[k] for k in range(len(usable)) if mask >> k & 1]
            if frozenset().union(*sub) != u:
                continue
            maps = [linalg.identity(mp.spaces[u].dim) if v == u
                    else mp.maps[(v, u)] for v in sub]
            ker = _joint_kernel(maps, mp.spaces[u].dim)
            if ker:
                return SeparatedReport(False, (u, tuple(sub), tuple(ker[0])),
                                       tuple(mp.missing))
    return SeparatedReport(True, (), tuple(mp.missing))


# ---------------------------------------------------------------------------
# sheafification on the finite moment topology
# ---------------------------------------------------------------------------

class FullPresheaf:
    """Presheaf with a value on every open of a finite topology.

    ``dims[o]`` and ``res[(sub, sup)]`` for every pair of nested opens.
    Everything is plain matrices; composition is re-validated post hoc.
    """

    def __init__(self, opens, dims, res):
        self.all_opens = tuple(opens)
        self.dims = dict(dims)
        self.res = dict(res)

    def dim(self, o):
        return self.dims[o]

    def rho(self, sub, sup):
        if sub == sup:
            return linalg.identity(self.dims[sup])
        return self.res[(sub, sup)]

    def validate(self):
        for a in self.all_opens:
            for b in self.all_opens:
                for c in self.all_opens:
                    if a <= b <= c and not (a == b or b == c):
                        left = linalg.mat_mul(self.rho(a, b), self.rho(b, c))
                        if not linalg.mat_eq(left, self.rho(a, c)):
                            return AxiomStatus(False, (a, b, c))
        return AxiomStatus(True)


def _match_space(fp, members):
    """Matching families over a family of opens: agree on all overlaps."""
    members = list(members)
    offsets, total = [], 0
    for v in members:
        offsets.append(total)
        total += fp.dim(v)
    rows = []
    for a in range(len(members)):
        for b in range(a + 1, len(members)):
            ov = members[a] & members[b]
            ra = fp.rho(ov, members[a])
            rb = fp.rho(ov, members[b])
            for r in range(fp.dim(ov)):
                v = [linalg.frac(0)] * total
                for c in range(fp.dim(members[a])):
                    v[offsets[a] + c] += ra[r][c]
                for c in range(fp.dim(members[b])):
                    v[offsets[b] + c] -= rb[r][c]
                rows.append(v)
    basis = (linalg.solution_space(rows) if rows
             else [list(r) for r in linalg.identity(total)])
    return members, offsets, total, basis


def _restrict_into_match(fp, o, members, offsets, total, basis):
    """Canonical map value(o) -> matching families of a cover of o."""
    cols = []
    for k in range(fp.dim(o)):
        e = [linalg.frac(1 if i == k else 0) for i in range(fp.dim(o))]
        w = [linalg.frac(0)] * total
        for m, v in enumerate(members):
            img = linalg.mat_vec(fp.rho(v, o), e)
            for c, x in enumerate(img):
                w[offsets[m] + c] = x
        coords = linalg.coordinates(w, basis)
        if coords is None:
            return None
        cols.append(coords)
    return ([[cols[c][r] for c in range(len(cols))]
             for r in range(len(basis))]
            if cols else linalg.zeros(len(basis), 0))


def extend_to_topology(mp):
    """Value on every generated open: matching families of basis sections.

    Returns the full presheaf together with the canonical comparison from
    each basis section space into its extended value.
    """
    opens = mp.moment.space.opens
    basis_opens = [u for u in mp.opens() if u]
    store = {}
    for o in opens:
        inside = [v for v in basis_opens if v <= o]
        offsets, total = [], 0
        for v in inside:
            offsets.append(total)
            total += mp.spaces[v].dim
        rows = []
        for a in range(len(inside)):
            for b in range(len(inside)):
                va, vb = inside[a], inside[b]
                if va == vb or not va <= vb or (va, vb) not in mp.maps:
                    continue
                m = mp.maps[(va, vb)]
                for r in range(mp.spaces[va].dim):
                    vec = [linalg.frac(0)] * total
                    vec[offsets[a] + r] -= 1
                    for c in range(mp.spaces[vb].dim):
                        vec[offsets[b] + c] += m[r][c]
                    rows.append(vec)
        basis = (linalg.solution_space(rows) if rows
                 else [list(r) for r in linalg.identity(total)])
        store[o] = (inside, offsets, total, basis)

    dims = {o: len(store[o][3]) for o in opens}
    res = {}
    for o in opens:
        for o2 in opens:
            if o2 == o or not o2 <= o:
                continue
            inside, offsets, total, basis = store[o]
            inside2, offsets2, total2, basis2 = store[o2]
            cols = []
            for v in basis:
                w = [linalg.frac(0)] * total2
                for m2, v2 in enumerate(inside2):
                    a = inside.index(v2)
                    blk = list(v)[offsets[a]:offsets[a] + mp.spaces[v2].dim]
                    for c, x in enumerate(blk):
                        w[offsets2[m2] + c] = x
                coords = linalg.coordinates(w, basis2)
                if coords is None:
                    raise InconsistentDiagram(
                        "projection misses the matching space",
                        witness=(o2, o))
                cols.append(coords)
            res[(o2, o)] = ([[cols[c][r] for c in range(len(cols))]
                             for r in range(dims[o2])]
                            if cols else linalg.zeros(dims[o2], 0))
    fp = FullPresheaf(opens, dims, res)

    to_ext = {}
    for u in basis_opens:
        inside, offsets, total, basis = store[u]
        if any(v != u and (v, u) not in mp.maps for v in inside):
            to_ext[u] = None
            continue
        d = mp.spaces[u].dim
        cols = []
        for i in range(d):
            e = [linalg.frac(1 if c == i else 0) for c in range(d)]
            w = [linalg.frac(0)] * total
            for m, v2 in enumerate(inside):
                img = e if v2 == u else linalg.mat_vec(mp.maps[(v2, u)], e)
                for c, x in enumerate(img):
                    w[offsets[m] + c] = x
            coords = linalg.coordinates(w, basis)
            if coords is None:
                cols = None
                break
            cols.append(coords)
        if cols is None:
            to_ext[u] = None
        else:
            to_ext[u] = ([[cols[c][r] for c in range(len(cols))]
                          for r in range(dims[u])]
                         if cols else linalg.zeros(dims[u], 0))
    return fp, to_ext


def _minimal_open_cover(space, o):
    cover = []
    for q in sorted(o):
        mo = space.minimal_open_containing(q)
        if mo not in cover:
            cover.append(mo)
    return cover


def plus(fp, space):
    """One step of the matching-families construction, with the map in."""
    opens = fp.all_opens
    store = {}
    for o in opens:
        if not o:
            store[o] = ([], [], 0, [])
            continue
        members = _minimal_open_cover(space, o)
        store[o] = _match_space(fp, members)
    dims = {o: len(store[o][3]) for o in opens}
    res = {}
    for o in opens:
        for o2 in opens:
            if o2 == o or not o2 <= o:
                continue
            members, offsets, total, basis = store[o]
            members2, offsets2, total2, basis2 = store[o2]
            cols = []
            for v in basis:
                w = [linalg.frac(0)] * total2
                for m2, u2 in enumerate(members2):
                    # each minimal open of o2 is a minimal open of o as well
                    a = members.index(u2)
                    blk = list(v)[offsets[a]:offsets[a] + fp.dim(u2)]
                    for c, x in enumerate(blk):
                        w[offsets2[m2] + c] = x
                coords = linalg.coordinates(w, basis2)
                if coords is None:
                    raise InconsistentDiagram(
                        "matching family does not restrict",
                        witness=(o2, o))
                cols.append(coords)
            res[(o2, o)] = ([[cols[c][r] for c in range(len(cols))]
                             for r in range(dims[o2])]
                            if cols else linalg.zeros(dims[o2], 0))
    out = FullPresheaf(opens, dims, res)
    to_plus = {}
    for o in opens:
        if not o:
            to_plus[o] = linalg.zeros(0, fp.dim(o))
            continue
        members, offsets, total, basis = store[o]
        m = _restrict_into_match(fp, o, members, offsets, total, basis)
        if m is None:
            raise InconsistentDiagram("section restricts outside matching",
                                      witness=(o,))
        to_plus[o] = m
    return out, to_plus


@dataclass(frozen=True)
class SheafifyResult:
    sheaf: FullPresheaf
    extended: FullPresheaf
    to_extended: dict          # basis open -> matrix (string space into P0)
    to_sheaf: dict             # open -> matrix (P0 into the sheaf)
    kernels: dict              # basis open -> kernel dimension of the composite
    gluing: AxiomStatus
    functorial: AxiomStatus


def sheafify(mp):
    """Sheaf on the moment topology via two matching-family steps.

    The canonical composite from each basis section space is reported with
    its kernel; the sheaf axioms are then certified over every finite open
    cover of every open.
    """
    space = mp.moment.space
    fp, to_ext = extend_to_topology(mp)
    p1, m1 = plus(fp, space)
    p2, m2 = plus(p1, space)
    to_sheaf = {o: linalg.mat_mul(m2[o], m1[o]) for o in fp.all_opens}
    kernels = {}
    for u in mp.opens():
        if not u or to_ext.get(u) is None:
            continue
        comp = linalg.mat_mul(to_sheaf[u], to_ext[u])
        kernels[u] = mp.spaces[u].dim - linalg.rank(comp)
    gluing = _sheaf_axioms(p2, space)
    return SheafifyResult(p2, fp, to_ext, to_sheaf, kernels, gluing,
                          p2.validate())


def _sheaf_axioms(fp, space):
    """Identity and gluing as one iso condition per open cover."""
    opens = [o for o in fp.all_opens if o]
    for o in opens:
        inside = [v for v in opens if v <= o]
        for mask in range(1, 1 << len(inside)):
            members = [inside[k] for k in range(len(inside)) if mask >> k & 1]
            if frozenset().union(*members) != o:
                continue
            ms, offsets, total, basis = _match_space(fp, members)
            m = _restrict_into_match(fp, o, ms, offsets, total, basis)
            if m is None:
                return AxiomStatus(False, (o, tuple(members), "outside"))
            if len(basis) != fp.dim(o) or not linalg.is_invertible(m):
                return AxiomStatus(False, (o, tuple(members), "not-iso"))
    return AxiomStatus(True)


# ---------------------------------------------------------------------------
# local temporal flabbiness
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LTFReport:
    t: int
    holds: bool
    checked: int
    witnesses: tuple
    failures: tuple


def check_ltf(dp, t):
    """Every fiber section through a member point extends to a string.

    For each accessible string, member point and spanning fiber section,
    search the strings below (the string itself admitted) for a section
    whose component at the point's instant is the restricted section.
    """
    sys_ = dp.system
    ms = moment_space(sys_, t)
    checked = 0
    witnesses, failures = [], []
    spaces = {}

    def space_for(s):
        if s.key() not in spaces:
            spaces[s.key()] = string_space(dp, s)
        return spaces[s.key()]

    for x in ms.strings:
        members = [q for q in ms.points if string_member(sys_, x, q)]
        if not members:
            continue
        below = [y for y in ms.strings if string_le(sys_, y, x)]
        below.sort(key=lambda y: (-len(y.support), y.key()))
        for (tp, p) in members:
            xt = x.component(tp)
            d = dp.sheets[tp].dim(xt)
            for bvec in range(d):
                checked += 1
                found = None
                for y in below:
                    if not string_member(sys_, y, (tp, p)):
                        continue
                    sp = space_for(y)
                    k = y.support.index(tp)
                    rho = dp.sheets[tp].rho(y.component(tp), xt)
                    target = [rho[r][bvec] for r in range(len(rho))]
                    # solve: section in the solution space with pinned block
                    sel = []
                    for r in range(sp.dims[k]):
                        row = [linalg.frac(0)] * sp.dim
                        for c, bv in enumerate(sp.basis):
                            row[c] = bv[sp.offsets[k] + r]
                        sel.append(row)
                    sol = linalg.solve(sel, target)
                    if sol is not None:
                        found = (y.key(), tuple(sol))
                        break
                if found is None:
                    failures.append((x.key(), (tp, p), bvec))
                else:
                    witnesses.append(((x.key(), (tp, p), bvec), found))
    return LTFReport(t, not failures, checked, tuple(witnesses),
                     tuple(failures))


# ---------------------------------------------------------------------------
# stalks of the moment presheaf against fiber stalks
# ---------------------------------------------------------------------------

def moment_stalk(mp, point_index):
    """Colimit of the string sections over the basis opens at one point."""
    opens = [u for u in mp.opens() if u and point_index in u]
    if not opens:
        raise NotAPoint("moment point %d lies in no basis open"
                        % point_index, witness=(point_index,))
    pairs = []
    maps = {}
    for a, ua in enumerate(opens):
        for b, ub in enumerate(opens):
            if ua == ub:
                continue
            if ub <= ua:
                if (ub, ua) not in mp.maps:
                    raise NotDirected(
                        "no restriction between nested opens",
                        witness=(ub, ua))
                pairs.append((a, b))
                maps[(a, b)] = mp.maps[(ub, ua)]
    dims = [mp.spaces[u].dim for u in opens]
    return opens, colimit(dims, pairs, maps)


@dataclass(frozen=True)
class PointIdentification:
    point: tuple
    moment_dim: int
    fiber_dim: int
    matrix: list
    invertible: bool
    compatible: AxiomStatus


@dataclass(frozen=True)
class StalkMatchReport:
    t: int
    ltf: LTFReport
    identifications: tuple

    @property
    def all_invertible(self):
        return all(pi.invertible for pi in self.identifications)


def identify_stalks(dp, t, require_ltf=True):
    """Match each moment-space stalk with the fiber stalk at its point.

    The comparison sends a string section to its component at the point's
    instant, restricted onto the point.  With flabbiness the matrix is
    invertible at every point; without it the failure is refused rather
    than guessed at.
    """
    ltf = check_ltf(dp, t)
    if require_ltf and not ltf.holds:
        raise PreconditionFailed(
            "flabbiness fails at %d; first witness %s"
            % (t, ltf.failures[0],), witness=ltf.failures[0])
    mp = moment_presheaf(dp, t)
    sys_ = dp.system
    out = []
    for k, (tp, p) in enumerate(mp.moment.points):
        opens, co = moment_stalk(mp, k)
        fiber = stalk(dp.sheets[tp], p, kind=sys_.point_kind)
        fdim = dp.sheets[tp].dim(p)
        blocks = [[linalg.frac(0)] * sum(mp.spaces[u].dim for u in opens)
                  for _ in range(fdim)]
        compat = AxiomStatus(True)
        for a, u in enumerate(opens):
            sp = mp.spaces[u]
            kk = sp.times.index(tp)
            rho = dp.sheets[tp].rho(p, sp.comps[kk])
            leg = []
            for v in sp.basis:
                leg.append(linalg.mat_vec(rho, list(sp.block(list(v), kk))))
            off = co.offsets[a]
            for c, w in enumerate(leg):
                for r in range(fdim):
                    blocks[r][off + c] = w[r]
        pi = _solve_factor(co.projection, blocks)
        if pi is None:
            compat = AxiomStatus(False, (k, "no-factorization"))
            pi = linalg.zeros(fdim, co.dim)
        inv = (compat.holds and co.dim == fdim and fiber.dim == fdim
               and linalg.is_invertible(pi))
        out.append(PointIdentification((tp, p), co.dim, fiber.dim,
                                       pi, bool(inv), compat))
    return StalkMatchReport(t, ltf, tuple(out))
