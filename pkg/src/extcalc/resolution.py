"""Free resolutions over Z/m and the cohomological Ext oracle.

This layer is deliberately independent of the extension-enumeration code:
it classifies length-n extensions by resolutions and cochain arithmetic
only, so it can serve as a cross-check for the splice/syzygy route.

A resolution ... -> P_2 -> P_1 -> P_0 -> Q -> 0 is built from greedy
minimal generating sets; each P_i is the standard free module (Z/m)^r
whose generator j is the carrier element m**j. Boundaries are stored both
as homomorphisms and as row-major coefficient matrices (rows indexed by
P_i generators, columns by P_{i+1} generators).

Hom(P_i, K) is identified with K^{r_i} through generator images, which
keeps every cochain computation at tuple level: the coboundary of phi is
phi composed with the next boundary matrix, cocycles and coboundaries are
enumerated exhaustively, and Ext^n = Z^n / B^n is reported as the group
order together with the lexicographically least representative of each
coset.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .algebra import FiniteAlgebra, Homomorphism, compose, kernel, power_coords
from .errors import ValidationError
from .varieties import module_modulus
from .zmodlin import (
    all_hom_tuples,
    apply_matrix_to_images,
    free_module,
    generator_elements,
    hom_from_generator_images,
    min_preimages,
    minimal_generators,
    require_modules,
)

Matrix = tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class Resolution:
    """A finite depth free resolution of ``target`` over Z/modulus."""

    modulus: int
    target: FiniteAlgebra
    modules: tuple[FiniteAlgebra, ...]
    ranks: tuple[int, ...]
    augmentation: Homomorphism
    boundaries: tuple[Homomorphism, ...]
    matrices: tuple[Matrix, ...]

    @property
    def depth(self) -> int:
        return len(self.boundaries)


def _matrix_of(images, m: int, rank_cod: int) -> Matrix:
    """Row-major coefficients of a free-module map from generator images."""
    cols = [power_coords(img, m, rank_cod) for img in images]
    return tuple(tuple(col[k] for col in cols) for k in range(rank_cod))


def build_resolution(
    Q: FiniteAlgebra, depth: int, rng: random.Random | None = None
) -> Resolution:
    """Resolve Q to the given boundary depth.

    ``rng`` optionally shuffles each level's generating set; the resolved
    ranks and every Ext computed from the result must not depend on it.
    """
    m = require_modules(Q)
    if depth < 0:
        raise ValidationError("resolution depth must be >= 0")
    gens = list(minimal_generators(Q))
    if rng is not None:
        rng.shuffle(gens)
    P0 = free_module(m, len(gens))
    augmentation = hom_from_generator_images(P0, Q, gens, check=False)
    modules = [P0]
    ranks = [len(gens)]
    boundaries: list[Homomorphism] = []
    matrices: list[Matrix] = []
    prev = augmentation
    for _ in range(depth):
        incl = kernel(prev)
        zgens = list(minimal_generators(incl.dom))
        if rng is not None:
            rng.shuffle(zgens)
        P_next = free_module(m, len(zgens))
        images = tuple(incl.map[g] for g in zgens)
        d = hom_from_generator_images(P_next, modules[-1], images, check=False)
        if any(v != 0 for v in compose(prev, d).map):
            raise ValidationError("resolution boundary composite is nonzero")
        modules.append(P_next)
        ranks.append(len(zgens))
        boundaries.append(d)
        matrices.append(_matrix_of(images, m, ranks[-2]))
        prev = d
    return Resolution(
        modulus=m,
        target=Q,
        modules=tuple(modules),
        ranks=tuple(ranks),
        augmentation=augmentation,
        boundaries=tuple(boundaries),
        matrices=tuple(matrices),
    )


def _check_coefficient_module(res: Resolution, K: FiniteAlgebra) -> None:
    if require_modules(K) != res.modulus:
        raise ValidationError("coefficient module is over a different ring")


def add_tuples(a, b, K: FiniteAlgebra) -> tuple[int, ...]:
    plus = K.tables["+"]
    n = K.size
    return tuple(plus[x * n + y] for x, y in zip(a, b))


def cocycles(res: Resolution, K: FiniteAlgebra, n: int) -> list[tuple[int, ...]]:
    """Z^n: generator-image tuples killed by the next boundary."""
    if res.depth < n + 1:
        raise ValidationError(f"resolution depth {res.depth} too shallow for n={n}")
    out = []
    for t in all_hom_tuples(res.ranks[n], K.size):
        if all(v == 0 for v in apply_matrix_to_images(res.matrices[n], t, K)):
            out.append(t)
    return out


def coboundaries(res: Resolution, K: FiniteAlgebra, n: int) -> list[tuple[int, ...]]:
    """B^n: images of the previous coboundary map, deduplicated, sorted."""
    if n < 1:
        raise ValidationError("coboundaries start at degree 1")
    found = {
        apply_matrix_to_images(res.matrices[n - 1], t, K)
        for t in all_hom_tuples(res.ranks[n - 1], K.size)
    }
    return sorted(found)


def coset_key(t, B, K: FiniteAlgebra) -> tuple[int, ...]:
    """Least member of t + B; equal keys mean equal cohomology classes."""
    return min(add_tuples(t, b, K) for b in B)


def ext_via_resolution(
    Q: FiniteAlgebra,
    K: FiniteAlgebra,
    n: int,
    resolution: Resolution | None = None,
) -> tuple[int, list[tuple[int, ...]]]:
    """Order of Ext^n(Q, K) plus sorted least coset representatives."""
    require_modules(Q)
    if n < 1:
        raise ValidationError("ext degree must be >= 1")
    res = resolution if resolution is not None else build_resolution(Q, n + 1)
    _check_coefficient_module(res, K)
    Z = cocycles(res, K, n)
    B = coboundaries(res, K, n)
    reps = sorted({coset_key(t, B, K) for t in Z})
    if len(reps) * len(B) != len(Z):
        raise ValidationError("coset partition is inconsistent")
    return len(reps), reps


def yoneda_class_of(e, resolution: Resolution | None = None) -> tuple[int, ...]:
    """Cohomology class of a validated length-n module exact sequence.

    Lifts the resolution of the base through the sequence one junction at
    a time: phi_0 lifts the augmentation along f_1, each phi_i lifts
    phi_{i-1} d_i through the image factorization of f_{i+1}, and the top
    composite phi_{n-1} d_n lands in the embedded copy of K, giving the
    cochain. Lifts pick least preimages on free generators; the returned
    coset key does not depend on those choices.
    """
    Q = e.base
    K = e.kernel_object
    m = require_modules(Q)
    _ = require_modules(K)
    n = e.n
    res = resolution if resolution is not None else build_resolution(Q, n + 1)
    _check_coefficient_module(res, K)
    if res.target != Q:
        raise ValidationError("resolution resolves a different base")
    if res.depth < n + 1:
        raise ValidationError(f"resolution depth {res.depth} too shallow for n={n}")

    f1 = e.maps[-1]
    gens = generator_elements(m, res.ranks[0])
    images = min_preimages(f1, tuple(res.augmentation.map[g] for g in gens))
    phi = hom_from_generator_images(res.modules[0], f1.dom, images, check=False)
    for i in range(1, n):
        lifted = compose(phi, res.boundaries[i - 1])
        epi = e.epis[n - i]
        mono = e.monos[n - i]
        back = {y: s for s, y in enumerate(mono.map)}
        gens_i = generator_elements(m, res.ranks[i])
        try:
            targets = tuple(back[lifted.map[g]] for g in gens_i)
        except KeyError as err:  # exactness guarantees the membership
            raise ValidationError("chain lift left the kernel image") from err
        phi = hom_from_generator_images(
            res.modules[i], epi.dom, min_preimages(epi, targets), check=False
        )

    top = compose(phi, res.boundaries[n - 1])
    back = {y: s for s, y in enumerate(e.maps[0].map)}
    gens_n = generator_elements(m, res.ranks[n])
    try:
        chi = tuple(back[top.map[g]] for g in gens_n)
    except KeyError as err:
        raise ValidationError("chain lift left the kernel image") from err
    if any(v != 0 for v in apply_matrix_to_images(res.matrices[n], chi, K)):
        raise ValidationError("lifted cochain is not a cocycle")
    return coset_key(chi, coboundaries(res, K, n), K)
