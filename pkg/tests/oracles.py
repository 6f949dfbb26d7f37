"""Independent reference implementations used to freeze and cross-check expectations.

Nothing here imports the package's engine code; the point is to compute the
same answers by a different route.
"""

from __future__ import annotations

import itertools
import math
from collections import deque

# -- propositional formulas as nested tuples -------------------------------------
# ("var", name) | ("not", f) | ("and", f, g) | ("or", f, g) | ("imp", f, g)


def truth_mask(f, names, cache=None) -> int:
    """Truth table of ``f`` as a bitmask over the 2**n valuations.

    Bit ``i`` is the value under valuation ``i``, where valuation ``i`` assigns
    ``names[k]`` the bit ``n-1-k`` of ``i`` (first name most significant).
    """
    n = len(names)
    full = (1 << (1 << n)) - 1
    if cache is not None and f in cache:
        return cache[f]
    op = f[0]
    if op == "var":
        k = names.index(f[1])
        shift = n - 1 - k
        out = 0
        for i in range(1 << n):
            if (i >> shift) & 1:
                out |= 1 << i
    elif op == "not":
        out = full & ~truth_mask(f[1], names, cache)
    else:
        a = truth_mask(f[1], names, cache)
        b = truth_mask(f[2], names, cache)
        if op == "and":
            out = a & b
        elif op == "or":
            out = a | b
        else:
            out = (full & ~a) | b
    if cache is not None:
        cache[f] = out
    return out


def oracle_valid(premise_masks, conclusion_mask, n: int):
    """(valid, index of the first counterexample valuation or None)."""
    full = (1 << (1 << n)) - 1
    support = full
    for m in premise_masks:
        support &= m
    bad = support & ~conclusion_mask & full
    if not bad:
        return True, None
    return False, (bad & -bad).bit_length() - 1


def formulas_by_connectives(names, limit):
    """``levels[k]`` lists every formula over ``names`` with exactly ``k`` connectives."""
    levels = [[("var", v) for v in names]]
    for k in range(1, limit + 1):
        out = [("not", f) for f in levels[k - 1]]
        for i in range(k):
            for a in levels[i]:
                for b in levels[k - 1 - i]:
                    for op in ("and", "or", "imp"):
                        out.append((op, a, b))
        levels.append(out)
    return levels


def render(f) -> str:
    op = f[0]
    if op == "var":
        return f[1]
    if op == "not":
        return f"~{render(f[1])}"
    sym = {"and": "&", "or": "|", "imp": "->"}[op]
    return f"({render(f[1])} {sym} {render(f[2])})"


def valuation_of(index: int, names) -> dict[str, bool]:
    n = len(names)
    return {name: bool((index >> (n - 1 - k)) & 1) for k, name in enumerate(names)}


# -- grids ------------------------------------------------------------------------


def circle_cells_parametric(cx: float, cy: float, scale: float, samples: int = 200_000):
    """Cells the curve passes through, found by walking the curve itself."""
    hit = set()
    for k in range(samples):
        t = 2 * math.pi * k / samples
        x = cx + scale * math.cos(t)
        y = cy + scale * math.sin(t)
        hit.add((math.floor(x), math.floor(y)))
    return hit


def circle_cells_pointwise(cx: float, cy: float, scale: float, width: int, height: int,
                           per_side: int = 40):
    """Cells holding points on both sides of the circle, by dense sampling."""
    hit = set()
    for x in range(width):
        for y in range(height):
            inside = outside = False
            for i in range(per_side + 1):
                for j in range(per_side + 1):
                    px = (x + i / per_side - cx) / scale
                    py = (y + j / per_side - cy) / scale
                    r = px * px + py * py
                    inside |= r <= 1.0
                    outside |= r >= 1.0
            if inside and outside:
                hit.add((x, y))
    return hit


def unify_cells(left: dict, right: dict):
    """Cell-by-cell merge of two ``{coord: {attr: value}}`` maps, or the clash set."""
    out = {c: dict(a) for c, a in left.items()}
    clash = set()
    for coord, assignment in right.items():
        slot = out.setdefault(coord, {})
        for attr, value in assignment.items():
            if attr in slot and slot[attr] != value:
                clash.add((coord, attr))
            else:
                slot[attr] = value
    return clash or {c: a for c, a in out.items() if a}


# -- graphs ------------------------------------------------------------------------


def bfs_distance(edges, start, goal):
    adj = {}
    for a, b in edges:
        adj.setdefault(a, set()).add(b)
        adj.setdefault(b, set()).add(a)
    seen = {start: 0}
    queue = deque([start])
    while queue:
        n = queue.popleft()
        for m in sorted(adj.get(n, ())):
            if m not in seen:
                seen[m] = seen[n] + 1
                queue.append(m)
    return seen.get(goal)


def all_shortest_paths(edges, start, goal, max_len=10):
    """Every simple path of minimal length, by brute force."""
    nodes = sorted({n for e in edges for n in e})
    adj = {n: set() for n in nodes}
    for a, b in edges:
        adj[a].add(b)
        adj[b].add(a)
    for length in range(max_len + 1):
        found = []
        for middle in itertools.permutations([n for n in nodes if n not in (start, goal)], max(length - 1, 0)):
            path = (start, *middle, goal) if length else (start,)
            if length == 0 and start != goal:
                continue
            if all(path[i + 1] in adj[path[i]] for i in range(len(path) - 1)):
                found.append(path)
        if found:
            return found
    return []


def components(nodes, edges):
    nodes = set(nodes)
    adj = {n: set() for n in nodes}
    for a, b in edges:
        adj[a].add(b)
        adj[b].add(a)
    out, seen = [], set()
    for n in sorted(nodes):
        if n in seen:
            continue
        comp, stack = set(), [n]
        while stack:
            m = stack.pop()
            if m in comp:
                continue
            comp.add(m)
            stack.extend(adj[m] - comp)
        seen |= comp
        out.append(frozenset(comp))
    return out
