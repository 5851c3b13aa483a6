"""Utilities for finite modules over Z/m: spans, free covers, lifts.

Everything works through the module's own operation tables (addition and
the scalar operations s_0..s_{m-1}), so the functions stay valid for any
algebra in a modules variety regardless of how its carrier is numbered.
"""

from __future__ import annotations

import itertools

from .algebra import FiniteAlgebra, Homomorphism, make_hom, power, power_coords
from .errors import UnsupportedVarietyError, ValidationError
from .varieties import module_modulus, module_variety, variety_kind


def require_modules(algebra: FiniteAlgebra) -> int:
    """Return the ring modulus, rejecting non-module varieties."""
    if variety_kind(algebra.variety) != "modules":
        raise UnsupportedVarietyError(
            f"operation needs a Z/m-module, got variety {algebra.variety.name!r}"
        )
    return module_modulus(algebra.variety)


def scalar(M: FiniteAlgebra, c: int, x: int) -> int:
    """c * x using the module's scalar tables; c taken mod m."""
    m = module_modulus(M.variety)
    return M.tables[f"s{c % m}"][x]


def module_span(M: FiniteAlgebra, gens) -> frozenset[int]:
    """Submodule generated by ``gens``: closure of {0} under + and scalars.

    Scalars are generated by addition, so closing under + on the scalar
    multiples of the generators is enough.
    """
    m = module_modulus(M.variety)
    plus = M.tables["+"]
    n = M.size
    span = {0}
    for g in gens:
        for c in range(m):
            span.add(scalar(M, c, g))
    frontier = True
    while frontier:
        frontier = False
        for a in tuple(span):
            for b in tuple(span):
                s = plus[a * n + b]
                if s not in span:
                    span.add(s)
                    frontier = True
    return frozenset(span)


def additive_order(M: FiniteAlgebra, x: int) -> int:
    plus = M.tables["+"]
    n = M.size
    acc, k = x, 1
    while acc != 0:
        acc = plus[acc * n + x]
        k += 1
    return k


def minimal_generators(M: FiniteAlgebra, tie: str = "min") -> tuple[int, ...]:
    """Greedy generating set: repeatedly the maximal-order element outside
    the current span. Ties go to the least carrier index, or the greatest
    with tie="max" (used to draw a second, independent free cover)."""
    require_modules(M)
    if tie not in ("min", "max"):
        raise ValidationError(f"unknown tie rule {tie!r}")
    gens: list[int] = []
    span = module_span(M, gens)
    while len(span) < M.size:
        best, best_order = -1, 0
        for x in range(M.size):
            if x in span:
                continue
            o = additive_order(M, x)
            if o > best_order or (o == best_order and tie == "max"):
                best, best_order = x, o
        gens.append(best)
        span = module_span(M, gens)
    return tuple(gens)


def free_module(m: int, rank: int, name: str = "") -> FiniteAlgebra:
    """(Z/m)^rank with the product module structure; rank 0 is the zero
    module. Element index i has coordinates power_coords(i, m, rank)."""
    from .varieties import cyclic_module

    base = cyclic_module(m, m)
    alg, _ = power(base, rank, name=name or f"free({m})^{rank}")
    return alg


def free_rank(P: FiniteAlgebra, m: int) -> int:
    rank = 0
    size = P.size
    while m**rank < size:
        rank += 1
    if m**rank != size and size != 1:
        raise ValidationError("carrier size is not a power of the modulus")
    return rank if size > 1 else 0


def generator_elements(m: int, rank: int) -> tuple[int, ...]:
    """Carrier indices of the standard basis of free_module(m, rank)."""
    return tuple(m**j for j in range(rank))


def hom_from_generator_images(
    P: FiniteAlgebra, target: FiniteAlgebra, images, check: bool = True
) -> Homomorphism:
    """The unique module map out of a free module with the given images."""
    m = require_modules(P)
    rank = free_rank(P, m)
    images = tuple(images)
    if len(images) != rank:
        raise ValidationError(f"expected {rank} generator images, got {len(images)}")
    plus = target.tables["+"]
    nt = target.size
    out = []
    for idx in range(P.size):
        coords = power_coords(idx, m, rank)
        acc = 0
        for c, img in zip(coords, images):
            acc = plus[acc * nt + scalar(target, c, img)]
        out.append(acc)
    return make_hom(P, target, tuple(out), check=check)


def min_preimages(h: Homomorphism, targets) -> tuple[int, ...]:
    """For each target value the least preimage under h; h must hit them."""
    table: dict[int, int] = {}
    for x, y in enumerate(h.map):
        if y not in table:
            table[y] = x
    out = []
    for t in targets:
        if t not in table:
            raise ValidationError(f"value {t} has no preimage")
        out.append(table[t])
    return tuple(out)


def all_hom_tuples(rank: int, target_size: int):
    """Every choice of generator images, lexicographically."""
    return itertools.product(range(target_size), repeat=rank)


def apply_matrix_to_images(
    matrix: tuple[tuple[int, ...], ...], images, K: FiniteAlgebra
) -> tuple[int, ...]:
    """Compose a hom given by generator ``images`` on P_i with the boundary
    P_{i+1} -> P_i given by a row-major coefficient ``matrix`` (rows index
    P_i generators, columns P_{i+1} generators). Returns the images of the
    P_{i+1} generators, i.e. the tuple of sum_k matrix[k][j] * images[k]."""
    rows = len(matrix)
    cols = len(matrix[0]) if rows else 0
    plus = K.tables["+"]
    nk = K.size
    out = []
    for j in range(cols):
        acc = 0
        for k in range(rows):
            acc = plus[acc * nk + scalar(K, matrix[k][j], images[k])]
        out.append(acc)
    return tuple(out)


def module_from_ring(m: int) -> FiniteAlgebra:
    """Z/m as a module over itself."""
    from .varieties import cyclic_module

    return cyclic_module(m, m)


def zero_module(m: int) -> FiniteAlgebra:
    from .algebra import trivial_algebra

    return trivial_algebra(module_variety(m))
