"""Shared helpers: random order generators used by several suites.

The generators gate everything through validate_skew, so tests receive
only structures the engine itself certifies.  Seeds are fixed by the
callers; nothing here draws from global randomness.
"""

import random

from nct.core import SkewTopology, validate_skew


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    # roll-up lines collected by the acceptance suite, if it ran
    try:
        from test_acceptance import LINES
    except ImportError:      # pragma: no cover
        return
    if LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(LINES):
            terminalreporter.write_line(line)


def random_bounded_lattice(rng, n):
    """A random lattice on n elements, or None when the draw fails.

    Random order: element 0 forced bottom, n-1 forced top, each middle
    pair related with probability 1/3, then transitively closed.  The
    draw is rejected unless every pair has a unique glb and lub.
    """
    leq = [[i == j for j in range(n)] for i in range(n)]
    for i in range(n):
        leq[0][i] = True
        leq[i][n - 1] = True
    for i in range(1, n - 1):
        for j in range(1, n - 1):
            if i != j and not leq[j][i] and rng.random() < 1 / 3:
                leq[i][j] = True
    for k in range(n):
        for i in range(n):
            for j in range(n):
                if leq[i][k] and leq[k][j]:
                    leq[i][j] = True
    for i in range(1, n - 1):
        for j in range(1, n - 1):
            if i != j and leq[i][j] and leq[j][i]:
                return None

    def bound(x, y, above):
        cand = [z for z in range(n)
                if (leq[x][z] and leq[y][z] if above
                    else leq[z][x] and leq[z][y])]
        best = [z for z in cand
                if all(leq[z][w] if above else leq[w][z] for w in cand)]
        return best[0] if len(best) == 1 else None

    mt = [[None] * n for _ in range(n)]
    jn = [[None] * n for _ in range(n)]
    for x in range(n):
        for y in range(n):
            mt[x][y] = bound(x, y, above=False)
            jn[x][y] = bound(x, y, above=True)
            if mt[x][y] is None or jn[x][y] is None:
                return None
    labels = tuple("e%d" % i for i in range(n))
    return SkewTopology.build(labels, leq, mt, jn)


def random_valid_topology(rng, max_n=8, tries=40):
    """A validated skew topology, possibly with a mutated meet table.

    Starts from a random lattice and attempts a few single-entry meet
    mutations; each candidate is re-validated and kept only when the
    axioms still hold, so some results are honestly noncommutative or
    non-idempotent while others are plain lattices.
    """
    top = None
    while top is None:
        top = random_bounded_lattice(rng, rng.randint(2, max_n))
    if not validate_skew(top).valid:          # pragma: no cover
        raise AssertionError("lattice fixture failed validation")
    n = top.n
    for _ in range(tries):
        x = rng.randrange(n)
        y = rng.randrange(n)
        glb = top.mt(x, y)
        lower = [z for z in range(n) if top.le(z, glb)]
        z = rng.choice(lower)
        if z == glb:
            continue
        mt = [[top.mt(i, j) for j in range(n)] for i in range(n)]
        mt[x][y] = z
        leq = [[top.le(i, j) for j in range(n)] for i in range(n)]
        jn = [[top.jn(i, j) for j in range(n)] for i in range(n)]
        cand = SkewTopology.build(top.labels, leq, mt, jn)
        if validate_skew(cand).valid:
            top = cand
    return top
