"""Exact subspace lattices of rational vector spaces and operator spectra.

Subspaces are kept in reduced row-echelon form, so equality is table
lookup and the lattice operations (intersection, sum) are exact.  Finite
families generate genuine skew-topology instances by closing under both
operations; planes with three pairwise-incomparable lines reproduce the
five-element modular non-distributive shape.

Symmetric matrices whose characteristic polynomial splits over the
rationals yield spectral families: the level at an eigenvalue is the span
of all eigenvectors up to it.  The pseudo-place of a subspace is the
first level containing it; on a registered spanning set of lines it
determines the family, and the reconstruction here re-derives every
level and certifies the round trip.
"""

from dataclasses import dataclass
from fractions import Fraction

from . import linalg
from .core import AxiomStatus, SkewTopology
from .errors import CapExceeded, DimensionMismatch, IrrationalSpectrum, MalformedTable
from .spectral import INF, Filtration, GammaChain


def _canon(rows):
    red, _ = linalg.rref([list(r) for r in rows])
    return tuple(tuple(x) for x in red if any(x))


@dataclass(frozen=True)
class RationalSubspace:
    """Row space in reduced echelon form; one canonical value per subspace."""

    dim: int
    rows: tuple

    @classmethod
    def span(cls, dim, vectors):
        vectors = [list(map(Fraction, v)) for v in vectors]
        for v in vectors:
            if len(v) != dim:
                raise DimensionMismatch("vector length %d in ambient %d"
                                        % (len(v), dim), witness=tuple(v))
        return cls(dim, _canon(vectors))

    @classmethod
    def zero(cls, dim):
        return cls(dim, ())

    @classmethod
    def full(cls, dim):
        return cls(dim, tuple(tuple(linalg.identity(dim)[i])
                              for i in range(dim)))

    @property
    def rank(self):
        return len(self.rows)

    def contains_vector(self, v):
        v = list(map(Fraction, v))
        if not self.rows:
            return not any(v)
        return linalg.in_row_space(v, [list(r) for r in self.rows])

    def le(self, other):
        if self.dim != other.dim:
            raise DimensionMismatch("ambient %d vs %d" % (self.dim, other.dim))
        return all(other.contains_vector(r) for r in self.rows)


def line(vector):
    return RationalSubspace.span(len(vector), [vector])


def subspace_join(u, v):
    if u.dim != v.dim:
        raise DimensionMismatch("ambient %d vs %d" % (u.dim, v.dim))
    return RationalSubspace(u.dim, _canon(list(u.rows) + list(v.rows)))


def subspace_meet(u, v):
    """Intersection: match coefficient vectors of both row spaces."""
    if u.dim != v.dim:
        raise DimensionMismatch("ambient %d vs %d" % (u.dim, v.dim))
    if not u.rows or not v.rows:
        return RationalSubspace.zero(u.dim)
    # columns: coefficients on u's rows, then on v's rows; rows: ambient coords
    cols = u.rank + v.rank
    system = []
    for k in range(u.dim):
        row = [u.rows[i][k] for i in range(u.rank)]
        row += [-v.rows[j][k] for j in range(v.rank)]
        system.append(row)
    vectors = []
    for sol in linalg.nullspace(system):
        vec = [Fraction(0)] * u.dim
        for i in range(u.rank):
            for k in range(u.dim):
                vec[k] += sol[i] * u.rows[i][k]
        vectors.append(vec)
    return RationalSubspace(u.dim, _canon(vectors))


# ---------------------------------------------------------------------------
# closure into a skew topology
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ClosureResult:
    subspaces: tuple             # index-aligned with topology elements
    topology: SkewTopology
    generators: tuple            # indices of the generators


def sublattice_closure(generators, cap=2000, names=(), name=""):
    """Close under meet and join, adjoin 0 and the ambient, export tables."""
    gens = list(generators)
    if not gens:
        raise MalformedTable("no generators")
    d = gens[0].dim
    for g in gens:
        if g.dim != d:
            raise DimensionMismatch("mixed ambient dimensions")
    pool = [RationalSubspace.zero(d), RationalSubspace.full(d)]
    for g in gens:
        if g not in pool:
            pool.append(g)
    grown = True
    while grown:
        grown = False
        snapshot = list(pool)
        for u in snapshot:
            for v in snapshot:
                for w in (subspace_meet(u, v), subspace_join(u, v)):
                    if w not in pool:
                        pool.append(w)
                        grown = True
                        if len(pool) > cap:
                            raise CapExceeded(
                                "closure passed %d subspaces" % cap,
                                witness=(cap,))
    # sort by rank then rows for a stable element order
    pool.sort(key=lambda s: (s.rank, s.rows))
    labels = []
    derived = 0
    for s in pool:
        if s.rank == 0:
            labels.append("0")
        elif s.rank == d:
            labels.append("1")
        elif s in gens and names:
            labels.append(names[gens.index(s)])
        elif s in gens:
            labels.append("g%d" % (gens.index(s) + 1))
        else:
            derived += 1
            labels.append("s%d" % derived)
    idx = {s: k for k, s in enumerate(pool)}
    n = len(pool)
    leq = [[pool[i].le(pool[j]) for j in range(n)] for i in range(n)]
    meet = [[idx[subspace_meet(pool[i], pool[j])] for j in range(n)]
            for i in range(n)]
    join = [[idx[subspace_join(pool[i], pool[j])] for j in range(n)]
            for i in range(n)]
    top = SkewTopology.build(labels, leq, meet, join, name=name)
    return ClosureResult(tuple(pool), top, tuple(idx[g] for g in gens))


def check_modular(subspaces):
    """u >= w forces u ^ (v + w) = (u ^ v) + w, checked pairwise."""
    for u in subspaces:
        for v in subspaces:
            for w in subspaces:
                if not w.le(u):
                    continue
                left = subspace_meet(u, subspace_join(v, w))
                right = subspace_join(subspace_meet(u, v), w)
                if left != right:
                    return AxiomStatus(False, (u.rows, v.rows, w.rows))
    return AxiomStatus(True)


# ---------------------------------------------------------------------------
# operators with rational spectrum
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OperatorSpec:
    matrix: tuple
    eigenvalues: tuple           # sorted distinct
    multiplicities: tuple        # aligned with eigenvalues
    charpoly: tuple              # monic, constant term first


def _trace(m):
    return sum(m[i][i] for i in range(len(m)))

def _charpoly(a):
    """Coefficients of det(xI - a), constant first, by trace iteration."""
    d = len(a)
    m = linalg.identity(d)
    coeffs = [Fraction(0)] * d + [Fraction(1)]
    for k in range(1, d + 1):
        am = linalg.mat_mul(a, m)
        c = -_trace(am) / k
        coeffs[d - k] = c
        m = [[am[i][j] + (c if i == j else 0) for j in range(d)]
             for i in range(d)]
    return coeffs


def _divisors(n):
    n = abs(n)
    out = []
    k = 1
    while k * k <= n:
        if n % k == 0:
            out.append(k)
            if k != n // k:
                out.append(n // k)
        k += 1
    return sorted(out)


def _rational_roots(coeffs):
    """Roots with multiplicity by candidate testing and deflation."""
    poly = list(coeffs)
    roots = []
    while len(poly) > 1:
        while poly[0] == 0:
            roots.append(Fraction(0))
            poly = poly[1:]
            if len(poly) == 1:
                return roots, poly
        denom_lcm = 1
        for c in poly:
            denom_lcm = denom_lcm * c.denominator // __import__("math").gcd(
                denom_lcm, c.denominator)
        ints = [int(c * denom_lcm) for c in poly]
        found = None
        for p in _divisors(ints[0]):
            for q in _divisors(ints[-1]):
                for cand in (Fraction(p, q), Fraction(-p, q)):
                    if sum(c * cand ** k for k, c in enumerate(poly)) == 0:
                        found = cand
                        break
                if found is not None:
                    break
            if found is not None:
                break
        if found is None:
            return roots, poly
        # synthetic division by (x - found), highest degree first
        rev = poly[::-1]
        out = [rev[0]]
        for c in rev[1:]:
            out.append(c + found * out[-1])
        if out[-1] != 0:
            return roots, poly
        poly = out[:-1][::-1]
        roots.append(found)
    return roots, poly


def op_spec(matrix):
    a = [[Fraction(x) for x in row] for row in matrix]
    d = len(a)
    if any(len(row) != d for row in a):
        raise MalformedTable("operator matrix not square")
    for i in range(d):
        for j in range(d):
            if a[i][j] != a[j][i]:
                raise MalformedTable("operator not symmetric",
                                     witness=(i, j))
    coeffs = _charpoly(a)
    roots, residue = _rational_roots(coeffs)
    if len(residue) > 1:
        raise IrrationalSpectrum(
            "characteristic polynomial has a factor of degree %d without "
            "rational roots" % (len(residue) - 1),
            witness=tuple(residue))
    distinct = sorted(set(roots))
    mults = tuple(roots.count(v) for v in distinct)
    shown = tuple(int(v) if v.denominator == 1 else v for v in distinct)
    return OperatorSpec(tuple(tuple(r) for r in a), shown, mults,
                        tuple(coeffs))


def diagonal_operator(entries):
    d = len(entries)
    return op_spec([[Fraction(entries[i]) if i == j else Fraction(0)
                     for j in range(d)] for i in range(d)])


def rotation_matrix(d, i, j, triple=(3, 4, 5)):
    """Orthogonal rational plane rotation from a Pythagorean triple."""
    p, q, r = triple
    if p * p + q * q != r * r:
        raise MalformedTable("not a Pythagorean triple", witness=triple)
    m = linalg.identity(d)
    m[i][i] = Fraction(p, r)
    m[j][j] = Fraction(p, r)
    m[i][j] = Fraction(-q, r)
    m[j][i] = Fraction(q, r)
    return m


def conjugated_diagonal(entries, rotations):
    """Rotate a diagonal matrix; the spectrum survives, the basis moves."""
    d = len(entries)
    a = [[Fraction(entries[i]) if i == j else Fraction(0) for j in range(d)]
         for i in range(d)]
    for (i, j, triple) in rotations:
        qm = rotation_matrix(d, i, j, triple)
        qt = [[qm[c][r] for c in range(d)] for r in range(d)]
        a = linalg.mat_mul(linalg.mat_mul(qm, a), qt)
    return op_spec(a)


# ---------------------------------------------------------------------------
# spectral families and the pseudo-place
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HilbertFamily:
    operator: OperatorSpec
    gamma: GammaChain
    levels: tuple                # RationalSubspace per label, ascending
    closure: ClosureResult
    filtration: Filtration


def eigenspace(op, value):
    d = len(op.matrix)
    system = [[op.matrix[i][j] - (value if i == j else 0) for j in range(d)]
              for i in range(d)]
    return RationalSubspace(d, _canon(linalg.nullspace(system)))


def spectral_family_of(op, cap=2000, name=""):
    """Level at an eigenvalue: span of all eigenvectors up to it."""
    d = len(op.matrix)
    spaces = [eigenspace(op, v) for v in op.eigenvalues]
    if sum(s.rank for s in spaces) != d:
        raise IrrationalSpectrum("eigenspaces do not fill the space",
                                 witness=tuple(s.rank for s in spaces))
    levels = []
    acc = RationalSubspace.zero(d)
    for s in spaces:
        acc = subspace_join(acc, s)
        levels.append(acc)
    closure = sublattice_closure(
        levels, cap=cap,
        names=tuple("F%s" % v for v in op.eigenvalues), name=name)
    pos = {s: k for k, s in enumerate(closure.subspaces)}
    gamma = GammaChain(tuple(op.eigenvalues))
    filt = Filtration(closure.topology, gamma,
                      tuple(pos[s] for s in levels), name=name)
    return HilbertFamily(op, gamma, tuple(levels), closure, filt)


def pseudo_place(fam, u):
    """First level containing the subspace; infinity when none does."""
    for k, lev in enumerate(fam.levels):
        if u.le(lev):
            return fam.gamma.labels[k]
    return INF


def pseudo_place_laws(fam, subspaces):
    """Sum and intersection stay under max and min of the places."""
    join_law = AxiomStatus(True)
    meet_law = AxiomStatus(True)
    for u in subspaces:
        for v in subspaces:
            pu, pv = pseudo_place(fam, u), pseudo_place(fam, v)
            if pseudo_place(fam, subspace_join(u, v)) > max(pu, pv):
                join_law = AxiomStatus(False, (u.rows, v.rows))
            if pseudo_place(fam, subspace_meet(u, v)) > min(pu, pv):
                meet_law = AxiomStatus(False, (u.rows, v.rows))
    return join_law, meet_law


@dataclass(frozen=True)
class PseudoPlace:
    gamma: GammaChain
    lines: tuple
    values: tuple
    spanning: AxiomStatus


def register_lines(fam, vectors):
    lines = tuple(line(v) for v in vectors)
    values = tuple(pseudo_place(fam, l) for l in lines)
    joined = RationalSubspace.zero(lines[0].dim)
    for l in lines:
        joined = subspace_join(joined, l)
    spanning = AxiomStatus(joined.rank == joined.dim,
                           None if joined.rank == joined.dim
                           else (joined.rank,))
    return PseudoPlace(fam.gamma, lines, values, spanning)


@dataclass(frozen=True)
class ReconstructionReport:
    levels: tuple                # recovered subspace per label
    matches: AxiomStatus         # equality with the family's levels
    unique_maximum: AxiomStatus  # the candidate scan had one top per label
    closure: ClosureResult


def reconstruct_filtration(pp, fam, cap=2000):
    """Per label, the largest lattice member whose lines all sit that low.

    The scan runs over the lattice generated by the registered lines; a
    member qualifies when every registered line inside it has a value at
    most the label.  Qualifying members must have a unique maximum, which
    is then compared with the family's own level.
    """
    closure = sublattice_closure(list(pp.lines), cap=cap)
    recovered = []
    unique = AxiomStatus(True)
    matches = AxiomStatus(True)
    for k, label in enumerate(pp.gamma.labels):
        candidates = []
        for s in closure.subspaces:
            ok = all(val <= label
                     for l, val in zip(pp.lines, pp.values) if l.le(s))
            if ok:
                candidates.append(s)
        best = max(candidates, key=lambda s: s.rank)
        if not all(c.le(best) for c in candidates):
            unique = AxiomStatus(False, (label,))
        recovered.append(best)
        if best != fam.levels[k]:
            matches = AxiomStatus(False, (label,))
    return ReconstructionReport(tuple(recovered), matches, unique, closure)
