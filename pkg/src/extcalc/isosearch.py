"""Backtracking search for extension morphisms with fixed endpoints.

Searches for xi: X1 -> X2 with xi . k1 = k2 and q2 . xi = q1, optionally
bijective. Works for any variety: candidates come from base fibers, and
every operation instance is checked as soon as all of its participating
elements have images. Used as an oracle against the canonical-form route
and as the edge relation for connectivity-based equivalence.
"""

from __future__ import annotations

import itertools

from .errors import EndpointMismatchError
from .limits import Limits, NodeBudget, default_limits
from .ses import ShortExactSeq


def find_endpoint_morphism(
    e1: ShortExactSeq,
    e2: ShortExactSeq,
    iso: bool = True,
    limits: Limits | None = None,
) -> tuple[int, ...] | None:
    """First morphism of extensions in deterministic order, or None."""
    if e1.kernel_object != e2.kernel_object or e1.base != e2.base:
        raise EndpointMismatchError("sequences do not share endpoint objects")
    limits = limits if limits is not None else default_limits()
    budget = NodeBudget(limits.max_nodes)
    X1, X2 = e1.middle, e2.middle
    if iso and X1.size != X2.size:
        return None
    n1 = X1.size
    fibers2 = e2.q.fibers()

    xi: list[int | None] = [None] * n1
    for u, x in enumerate(e1.k.map):
        xi[x] = e2.k.map[u]
    forced = [x for x in range(n1) if xi[x] is not None]
    free = [x for x in range(n1) if xi[x] is None]
    # assign fiber by fiber so partial products close early
    free.sort(key=lambda x: (e1.q.map[x], x))

    binary_ops = [
        (X1.tables[name], X2.tables[name])
        for name, arity in X1.variety.signature.ops
        if arity == 2
    ]
    unary_ops = [
        (X1.tables[name], X2.tables[name])
        for name, arity in X1.variety.signature.ops
        if arity == 1
    ]
    # preimage lists: which argument pairs produce each element
    pair_preimages: list[list[tuple[int, int, int]]] = [[] for _ in range(n1)]
    for oi, (t1, _) in enumerate(binary_ops):
        for a in range(n1):
            for b in range(n1):
                pair_preimages[t1[a * n1 + b]].append((oi, a, b))
    unary_preimages: list[list[tuple[int, int]]] = [[] for _ in range(n1)]
    for oi, (t1, _) in enumerate(unary_ops):
        for a in range(n1):
            unary_preimages[t1[a]].append((oi, a))

    n2 = X2.size

    def consistent(x: int) -> bool:
        gx = xi[x]
        for oi, (t1, t2) in enumerate(unary_ops):
            y = t1[x]
            if xi[y] is not None and t2[gx] != xi[y]:
                return False
        for oi, a in unary_preimages[x]:
            ga = xi[a]
            if ga is not None and unary_ops[oi][1][ga] != gx:
                return False
        for oi, (t1, t2) in enumerate(binary_ops):
            for other in range(n1):
                go = xi[other]
                if go is None:
                    continue
                z = t1[x * n1 + other]
                if xi[z] is not None and t2[gx * n2 + go] != xi[z]:
                    return False
                z = t1[other * n1 + x]
                if xi[z] is not None and t2[go * n2 + gx] != xi[z]:
                    return False
        for oi, a, b in pair_preimages[x]:
            ga, gb = xi[a], xi[b]
            if ga is not None and gb is not None:
                if binary_ops[oi][1][ga * n2 + gb] != gx:
                    return False
        return True

    for x in forced:
        if not consistent(x):
            return None

    used = set(y for y in xi if y is not None) if iso else set()
    if iso and len(used) != len(forced):
        return None

    def extend(i: int) -> bool:
        if i == len(free):
            return True
        x = free[i]
        for y in fibers2[e1.q.map[x]]:
            if iso and y in used:
                continue
            budget.spend()
            xi[x] = y
            if consistent(x):
                if iso:
                    used.add(y)
                if extend(i + 1):
                    return True
                if iso:
                    used.discard(y)
            xi[x] = None
        return False

    if extend(0):
        return tuple(xi)  # type: ignore[arg-type]
    return None


def equivalence_classes_by_morphism(
    sequences: list[ShortExactSeq],
    directed: bool = True,
    limits: Limits | None = None,
) -> list[list[int]]:
    """Connected components under "some morphism either way exists".

    For one-step extensions in a semi-abelian variety every such morphism
    is an isomorphism, so a single direction suffices; with directed=True
    both directions are still probed to keep the relation symmetric for
    structures (like monoid extensions) where morphisms need not invert.
    """
    n = len(sequences)
    parent = list(range(n))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i, j in itertools.combinations(range(n), 2):
        if find(i) == find(j):
            continue
        hit = find_endpoint_morphism(sequences[i], sequences[j], iso=False, limits=limits)
        if hit is None and directed:
            hit = find_endpoint_morphism(sequences[j], sequences[i], iso=False, limits=limits)
        if hit is not None:
            parent[find(j)] = find(i)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return sorted(groups.values())
