"""3x3 diagrams of short exact sequences and their reduction to one step.

A diagram is a grid

    K    -> X2'  -> I2'
    |       |       |
    X2   -> Y    -> X1'
    |       |       |
    I2   -> X1  -> Q

whose three rows and three columns are short exact sequences and whose
four squares commute. Such a diagram packages a pair of two-step
extensions from K to Q glued along the center object Y.

The structural results implemented here: the bottom-right square of a
valid diagram is a regular pushout (the comparison Y -> X1 x_Q X1' is
surjective), and the whole diagram is determined by the bottom row, the
right column, and the short exact sequence 0 -> K -> Y -> X1 x_Q X1' -> 0
over the canonical pullback. decompose_3x3 / reconstruct_3x3 are inverse
bijections along that description, which reduces questions about
two-step data to the one-step machinery.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .algebra import (
    FiniteAlgebra,
    Homomorphism,
    Pullback,
    compose,
    kernel,
    make_hom,
    pullback,
)
from .errors import EndpointMismatchError, ValidationError
from .limits import Limits
from .ses import ShortExactSeq, pullback_ses, split_ses, transport_ses, validate_ses
from .varieties import (
    cyclic_abelian,
    cyclic_group,
    cyclic_module,
    klein_abelian,
    klein_group,
)
from .zmodlin import (
    free_rank,
    generator_elements,
    hom_from_generator_images,
    min_preimages,
    minimal_generators,
    require_modules,
)

RowPair = tuple[Homomorphism, Homomorphism]


@dataclass(frozen=True)
class ThreeByThree:
    """Nine objects and twelve maps; rows and cols run left/top to right/bottom."""

    rows: tuple[RowPair, RowPair, RowPair]
    cols: tuple[RowPair, RowPair, RowPair]

    def object_at(self, i: int, j: int) -> FiniteAlgebra:
        first, second = self.rows[i]
        return (first.dom, first.cod, second.cod)[j]


def make_3x3(rows, cols) -> ThreeByThree:
    """Assemble a shape-checked diagram; exactness is validate_3x3's job."""
    rows = tuple(tuple(r) for r in rows)
    cols = tuple(tuple(c) for c in cols)
    if len(rows) != 3 or len(cols) != 3 or any(len(p) != 2 for p in rows + cols):
        raise ValidationError("a 3x3 diagram needs 3 rows and 3 cols of 2 maps")
    d = ThreeByThree(rows=rows, cols=cols)
    for i in range(3):
        if rows[i][0].cod != rows[i][1].dom:
            raise EndpointMismatchError(f"row {i} maps do not compose")
    for j in range(3):
        if cols[j][0].cod != cols[j][1].dom:
            raise EndpointMismatchError(f"col {j} maps do not compose")
        if (
            cols[j][0].dom != d.object_at(0, j)
            or cols[j][0].cod != d.object_at(1, j)
            or cols[j][1].cod != d.object_at(2, j)
        ):
            raise EndpointMismatchError(f"col {j} does not match the grid objects")
    return d


def validate_3x3(d: ThreeByThree) -> tuple[str, ...]:
    """All exactness and commutativity failures, empty when valid."""
    failures = []
    for i, (a, b) in enumerate(d.rows):
        try:
            validate_ses(a, b)
        except ValidationError as err:
            failures.append(f"row {i}: {err}")
    for j, (a, b) in enumerate(d.cols):
        try:
            validate_ses(a, b)
        except ValidationError as err:
            failures.append(f"col {j}: {err}")
    for i in range(2):
        for j in range(2):
            down_then_right = compose(d.rows[i + 1][j], d.cols[j][i])
            right_then_down = compose(d.cols[j + 1][i], d.rows[i][j])
            if down_then_right.map != right_then_down.map:
                failures.append(f"square ({i},{j}): does not commute")
    return tuple(failures)


def _comparison(d: ThreeByThree) -> tuple[Pullback, Homomorphism]:
    """The canonical pullback of the bottom-right cospan and Y's map to it."""
    to_x1 = d.cols[1][1]
    to_x1p = d.rows[1][1]
    f = d.rows[2][1]
    fp = d.cols[2][1]
    if compose(f, to_x1).map != compose(fp, to_x1p).map:
        raise ValidationError("bottom-right square does not commute")
    pb = pullback(f, fp)
    c = make_hom(
        to_x1.dom,
        pb.algebra,
        tuple(
            pb.position_of(to_x1.map[y], to_x1p.map[y])
            for y in range(to_x1.dom.size)
        ),
        check=False,
    )
    return pb, c


def is_regular_pushout(d: ThreeByThree) -> bool:
    """Whether the comparison from Y onto the bottom-right pullback is onto."""
    pb, c = _comparison(d)
    return len(set(c.map)) == pb.algebra.size


@dataclass(frozen=True)
class Decomposition:
    """The two data determining a valid diagram: the bottom-right cospan's
    exact sequences and the extension of the comparison pullback by K."""

    bottom: ShortExactSeq
    right: ShortExactSeq
    middle: ShortExactSeq
    pb: Pullback


def decompose_3x3(d: ThreeByThree) -> Decomposition:
    failures = validate_3x3(d)
    if failures:
        raise ValidationError("; ".join(failures))
    pb, c = _comparison(d)
    if len(set(c.map)) != pb.algebra.size:
        raise ValidationError("comparison to the pullback is not surjective")
    bottom = validate_ses(*d.rows[2])
    right = validate_ses(*d.cols[2])
    k_to_y = compose(d.rows[1][0], d.cols[0][0])
    middle = validate_ses(k_to_y, c)
    return Decomposition(bottom=bottom, right=right, middle=middle, pb=pb)


def reconstruct_3x3(dec: Decomposition) -> ThreeByThree:
    """Rebuild the diagram; inverse to decompose_3x3 on its image."""
    b1, b2 = dec.bottom.k, dec.bottom.q
    r1, r2 = dec.right.k, dec.right.q
    if b2.cod != r2.cod:
        raise EndpointMismatchError("bottom and right sequences must share Q")
    pb = pullback(b2, r2)
    if dec.middle.q.cod != pb.algebra:
        raise EndpointMismatchError("middle sequence must end at the pullback")
    c = dec.middle.q
    kY = dec.middle.k
    to_x1 = compose(pb.to_left, c)
    to_x1p = compose(pb.to_right, c)

    kx2 = kernel(to_x1p)
    kx2p = kernel(to_x1)
    back_b = {y: i for i, y in enumerate(b1.map)}
    back_r = {y: i for i, y in enumerate(r1.map)}
    x2_to_i2 = make_hom(
        kx2.dom,
        b1.dom,
        tuple(back_b[to_x1.map[kx2.map[x]]] for x in range(kx2.dom.size)),
        check=False,
    )
    x2p_to_i2p = make_hom(
        kx2p.dom,
        r1.dom,
        tuple(back_r[to_x1p.map[kx2p.map[x]]] for x in range(kx2p.dom.size)),
        check=False,
    )
    pos_x2 = {y: i for i, y in enumerate(kx2.map)}
    pos_x2p = {y: i for i, y in enumerate(kx2p.map)}
    K = kY.dom
    k_to_x2 = make_hom(
        K, kx2.dom, tuple(pos_x2[kY.map[t]] for t in range(K.size)), check=False
    )
    k_to_x2p = make_hom(
        K, kx2p.dom, tuple(pos_x2p[kY.map[t]] for t in range(K.size)), check=False
    )
    d = make_3x3(
        rows=((k_to_x2p, x2p_to_i2p), (kx2, to_x1p), (b1, b2)),
        cols=((k_to_x2, x2_to_i2), (kx2p, to_x1), (r1, r2)),
    )
    failures = validate_3x3(d)
    if failures:
        raise ValidationError("; ".join(failures))
    return d


def assemble_3x3(
    bottom: ShortExactSeq, right: ShortExactSeq, middle: ShortExactSeq
) -> ThreeByThree:
    """Build the diagram over a middle extension of the canonical pullback."""
    pb = pullback(bottom.q, right.q)
    return reconstruct_3x3(
        Decomposition(bottom=bottom, right=right, middle=middle, pb=pb)
    )


# ---------------------------------------------------------------------------
# double syzygies and the reduction of two-step data


@dataclass(frozen=True)
class DoubleSyzygy:
    """Two independently chosen free covers of Q and their pullback."""

    P: FiniteAlgebra
    p: Homomorphism
    P2: FiniteAlgebra
    p2: Homomorphism
    pb: Pullback


def double_syzygy(Q: FiniteAlgebra) -> DoubleSyzygy:
    from .zmodlin import free_module

    m = require_modules(Q)
    gens = minimal_generators(Q, tie="min")
    gens2 = minimal_generators(Q, tie="max")
    P = free_module(m, len(gens))
    P2 = free_module(m, len(gens2))
    p = hom_from_generator_images(P, Q, gens, check=False)
    p2 = hom_from_generator_images(P2, Q, gens2, check=False)
    return DoubleSyzygy(P=P, p=p, P2=P2, p2=p2, pb=pullback(p, p2))


def reduce_2ext(d: ThreeByThree, ds: DoubleSyzygy) -> ShortExactSeq:
    """Pull the middle extension back over the double syzygy square.

    Lifts both free covers through the bottom-right cospan (least
    preimages on free generators) and pulls the decomposition's middle
    sequence back along the induced map of pullbacks, yielding a short
    exact sequence from d's kernel object to P x_Q P2.
    """
    m = require_modules(ds.p.cod)
    dec = decompose_3x3(d)
    if dec.bottom.base != ds.p.cod:
        raise EndpointMismatchError("double syzygy does not cover the diagram base")

    def lift(cover: Homomorphism, along: Homomorphism) -> Homomorphism:
        gens = generator_elements(m, free_rank(cover.dom, m))
        images = min_preimages(along, tuple(cover.map[g] for g in gens))
        lifted = hom_from_generator_images(cover.dom, along.dom, images, check=False)
        if compose(along, lifted).map != cover.map:
            raise ValidationError("projective lift failed")
        return lifted

    alpha = lift(ds.p, dec.bottom.q)
    alpha2 = lift(ds.p2, dec.right.q)
    eta = make_hom(
        ds.pb.algebra,
        dec.pb.algebra,
        tuple(
            dec.pb.position_of(
                alpha.map[ds.pb.to_left.map[i]], alpha2.map[ds.pb.to_right.map[i]]
            )
            for i in range(ds.pb.algebra.size)
        ),
    )
    return pullback_ses(dec.middle, eta)


# ---------------------------------------------------------------------------
# randomized valid diagrams


def _ses_pool(variety: str) -> list[ShortExactSeq]:
    """Small catalog of short exact sequences ending at a 2 element base."""
    if variety == "modules":
        Z2, Z4 = cyclic_module(4, 2), cyclic_module(4, 4)
        nonsplit = validate_ses(
            make_hom(Z2, Z4, (0, 2)), make_hom(Z4, Z2, (0, 1, 0, 1))
        )
        return [split_ses(Z2, Z2), nonsplit]
    if variety == "abelian":
        Z2, Z4 = cyclic_abelian(2), cyclic_abelian(4)
        nonsplit = validate_ses(
            make_hom(Z2, Z4, (0, 2)), make_hom(Z4, Z2, (0, 1, 0, 1))
        )
        return [split_ses(Z2, Z2), nonsplit, split_ses(klein_abelian(), Z2)]
    Z2, Z4 = cyclic_group(2), cyclic_group(4)
    nonsplit = validate_ses(make_hom(Z2, Z4, (0, 2)), make_hom(Z4, Z2, (0, 1, 0, 1)))
    return [split_ses(Z2, Z2), nonsplit, split_ses(klein_group(), Z2)]


def _kernel_pool(variety: str) -> list[FiniteAlgebra]:
    if variety == "modules":
        return [cyclic_module(4, 1), cyclic_module(4, 2)]
    if variety == "abelian":
        return [cyclic_abelian(1), cyclic_abelian(2), cyclic_abelian(3)]
    return [cyclic_group(1), cyclic_group(2), cyclic_group(3)]


def random_diagram(rng: random.Random, limits: Limits | None = None) -> ThreeByThree:
    """A valid diagram built from catalog sequences and a random middle.

    Bottom and right sequences are drawn from a per-variety catalog (with
    a random middle-object relabeling for variety of carriers), the
    kernel object from a small pool, and the middle extension is split or
    a relabeled transport of it. Diagrams are redrawn until the nine
    carriers total at most 64; validity holds by construction and is
    rechecked by assemble_3x3.
    """
    while True:
        variety = rng.choice(["modules", "abelian", "groups"])
        pool = _ses_pool(variety)

        def draw() -> ShortExactSeq:
            e = rng.choice(pool)
            n = e.middle.size
            perm = [0] + rng.sample(range(1, n), n - 1)
            return transport_ses(e, tuple(perm))

        bottom, right = draw(), draw()
        pb = pullback(bottom.q, right.q)
        fits = [a for a in _kernel_pool(variety) if a.size * pb.algebra.size <= 32]
        K = rng.choice(fits)
        middle = split_ses(K, pb.algebra)
        if K.size > 1 and rng.random() < 0.5:
            n = middle.middle.size
            perm = [0] + rng.sample(range(1, n), n - 1)
            middle = transport_ses(middle, tuple(perm))
        d = assemble_3x3(bottom, right, middle)
        total = sum(d.object_at(i, j).size for i in range(3) for j in range(3))
        if total <= 64:
            return d


def enumerate_middle_classes(
    bottom: ShortExactSeq,
    right: ShortExactSeq,
    K: FiniteAlgebra,
    limits: Limits | None = None,
):
    """Canonical forms of all middle extensions over the canonical pullback."""
    from .enumext import enumerate_ext1

    pb = pullback(bottom.q, right.q)
    return pb, enumerate_ext1(pb.algebra, K, limits=limits)
