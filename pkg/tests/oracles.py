"""Independent reference computations used to freeze expected test values.

Everything here deliberately avoids the production code paths: matrix
arithmetic over SL2(Z) for the amalgam word problem, breadth-first searches
over explicitly materialised graphs for tree distances and projections, and
first-principles recounts of separating walls and Dirac supports.
"""

from __future__ import annotations

from collections import deque
from fractions import Fraction


# ---------------------------------------------------------------------------
# SL2(Z) as the Z/4 * Z/6 amalgam over Z/2: a -> S, b -> S T


def mat2_mul(a, b):
    return (
        (a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]),
        (a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]),
    )


SL2_ID = ((1, 0), (0, 1))
SL2_S = ((0, -1), (1, 0))
SL2_U = ((0, -1), (1, 1))


def mat2_pow(a, k):
    out = SL2_ID
    for _ in range(k):
        out = mat2_mul(out, a)
    return out


def sl2_of_letters(letters):
    """Matrix of a word in the letters ('L', a^k) and ('R', b^k)."""
    out = SL2_ID
    for side, x in letters:
        out = mat2_mul(out, mat2_pow(SL2_S, x) if side == "L" else mat2_pow(SL2_U, x))
    return out


# ---------------------------------------------------------------------------
# brute-force Bass-Serre geometry


def bfs_tree_vertices(tree, radius):
    """All vertices within the given tree distance of the base, via explicit
    neighbour generation (multiplying by every factor element)."""
    am = tree.am
    seen = {tree.base_vertex: 0}
    queue = deque([tree.base_vertex])
    while queue:
        v = queue.popleft()
        if seen[v] >= radius:
            continue
        side, word = v
        if side == "L":
            neighbours = {
                tree.vertex_of_word("R", am.mul(word, am.letter_word("L", g)))
                for g in range(am.left.size)
            }
        else:
            neighbours = {
                tree.vertex_of_word("L", am.mul(word, am.letter_word("R", h)))
                for h in range(am.right.size)
            }
        for n in neighbours:
            if n not in seen:
                seen[n] = seen[v] + 1
                queue.append(n)
    return seen


def bfs_tree_distance(tree, v, w, cap=40):
    """Tree distance by breadth-first search from v, independent of the
    syllable walk used in production."""
    am = tree.am
    seen = {v: 0}
    queue = deque([v])
    while queue:
        u = queue.popleft()
        if u == w:
            return seen[u]
        if seen[u] > cap:
            break
        side, word = u
        if side == "L":
            neighbours = (
                tree.vertex_of_word("R", am.mul(word, am.letter_word("L", g)))
                for g in range(am.left.size)
            )
        else:
            neighbours = (
                tree.vertex_of_word("L", am.mul(word, am.letter_word("R", h)))
                for h in range(am.right.size)
            )
        for n in neighbours:
            if n not in seen:
                seen[n] = seen[u] + 1
                queue.append(n)
    raise AssertionError("vertices not connected within cap")


def brute_projection_sum_energy(tree, struct_gc, struct_hc, q, x, y, radius=12):
    """Orbital energy by summing quotient energies of projections over every
    vertex in a large ball, plus the tree distance, with no support shortcut."""
    from labparts.core import q_energy

    structs = {"L": struct_gc, "R": struct_hc}
    total = Fraction(0)
    for v in bfs_tree_vertices(tree, radius):
        px = tree.project(v, x)
        py = tree.project(v, y)
        if px != py:
            struct = structs[v[0]]
            total += q_energy(struct.norm, struct.diff(tree.side_point(v, px), tree.side_point(v, py)))
    total += bfs_tree_distance(tree, x.vertex, y.vertex)
    return total


# ---------------------------------------------------------------------------
# free-group Cayley tree, first principles


def free_first_step(free, a, x):
    """First vertex after a on the path to x, found by breadth-first search
    over the Cayley graph restricted to a ball (not by word arithmetic)."""
    if a == x:
        return a
    letters = [(i,) for i in range(1, free.rank + 1)] + [(-i,) for i in range(1, free.rank + 1)]
    seen = {a: None}
    queue = deque([a])
    while queue:
        u = queue.popleft()
        for s in letters:
            v = free.mul(u, s)
            if v not in seen:
                seen[v] = u
                queue.append(v)
            if v == x:
                # walk back to the step leaving a
                node = v
                while seen[node] != a:
                    node = seen[node]
                return node
    raise AssertionError("unreachable")


def mineyev_disjoint_count(free, x, y, radius):
    """Number of base points a (in a ball) whose Dirac masses toward x and y
    sit at different vertices."""
    from labparts.groups import ball_enumerate

    count = 0
    for a, _ in ball_enumerate(free, radius):
        if free_first_step(free, a, x) != free_first_step(free, a, y):
            count += 1
    return count


def mineyev_brute_energy(free, x, y, radius, q_int):
    """Separation energy recomputed label by label over all pairs (a, b)
    with b in the closed unit ball around a."""
    from labparts.groups import ball_enumerate

    total = 0
    for a, _ in ball_enumerate(free, radius):
        bx = free_first_step(free, a, x)
        by = free_first_step(free, a, y)
        if bx != by:
            total += 2  # two labels, values +-1, |v|^q = 1
    return total


# ---------------------------------------------------------------------------
# metrics


def random_rational_metric(rng, n):
    """A random exact metric: random positive rational weights, then the
    shortest-path closure, which satisfies the triangle inequality exactly."""
    d = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            d[i][j] = d[j][i] = Fraction(rng.randrange(1, 40), rng.randrange(1, 7))
    for k in range(n):
        for i in range(n):
            for j in range(n):
                if d[i][k] + d[k][j] < d[i][j]:
                    d[i][j] = d[i][k] + d[k][j]
    return tuple(tuple(row) for row in d)


def l1_distance(x, y):
    return sum(abs(a - b) for a, b in zip(x, y))
