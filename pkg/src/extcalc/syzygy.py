"""Syzygies of finite Z/m-modules, pullback reduction, classification.

The constructive heart of the length-n story: every length n+1 exact
sequence pulls back along a syzygy presentation of its base to a length n
one, and conversely splicing syzygy sequences on top of one-step
extensions reaches every class. classify_extn walks the second direction
and buckets the results with the resolution oracle's class keys.
"""

from __future__ import annotations

from dataclasses import dataclass

from .algebra import FiniteAlgebra, Homomorphism, compose, kernel, make_hom, pullback
from .canonical import CanonicalForm
from .enumext import enumerate_ext1
from .errors import EndpointMismatchError, ValidationError
from .limits import Limits
from .longexact import ExactSequence, sequence_from_ses, splice, validate_exact_sequence
from .resolution import Resolution, build_resolution, yoneda_class_of
from .ses import ShortExactSeq, split_ses, validate_ses
from .varieties import variety_kind
from .zmodlin import (
    free_module,
    free_rank,
    generator_elements,
    hom_from_generator_images,
    min_preimages,
    minimal_generators,
    require_modules,
)


@dataclass(frozen=True)
class Syzygy:
    """A free presentation 0 -> Omega -> P -> Q -> 0 of a module Q."""

    P: FiniteAlgebra
    p: Homomorphism
    w: Homomorphism
    Omega: FiniteAlgebra
    generators: tuple[int, ...]


def syzygy(Q: FiniteAlgebra) -> Syzygy:
    """Present Q by the free module on a greedy minimal generating set."""
    m = require_modules(Q)
    gens = minimal_generators(Q)
    P = free_module(m, len(gens))
    p = hom_from_generator_images(P, Q, gens, check=False)
    w = kernel(p)
    s = Syzygy(P=P, p=p, w=w, Omega=w.dom, generators=gens)
    validate_ses(s.w, s.p)
    return s


def syzygy_ses(s: Syzygy) -> ShortExactSeq:
    return validate_ses(s.w, s.p)


def pullback_reduce(e: ExactSequence, s: Syzygy) -> ExactSequence:
    """Trade the last two maps of e for a pullback over the syzygy kernel.

    Given e of length n+1 ending at Q and a syzygy 0 -> Omega -> P -> Q,
    lift p through f_1 on free generators (least preimages), restrict the
    lift to a map Omega -> I_2 into the image interface of f_2, and pull
    e_2 back along it. The result is a validated length n sequence from
    the same kernel object to Omega.
    """
    m = require_modules(e.base)
    if s.p.cod != e.base:
        raise EndpointMismatchError("syzygy does not present the sequence's base")
    if len(e.maps) < 3:
        raise ValidationError("reduction needs length >= 2")

    f1 = e.maps[-1]
    gens = generator_elements(m, free_rank(s.P, m))
    alift = min_preimages(f1, tuple(s.p.map[g] for g in gens))
    alpha1 = hom_from_generator_images(s.P, f1.dom, alift, check=False)
    if compose(f1, alpha1).map != s.p.map:
        raise ValidationError("projective lift failed")

    e2 = e.epis[-2]
    m2 = e.monos[-2]
    back = {y: i for i, y in enumerate(m2.map)}
    abar1 = make_hom(
        s.Omega,
        e2.cod,
        tuple(back[alpha1.map[s.w.map[o]]] for o in range(s.Omega.size)),
        check=False,
    )
    pb = pullback(e2, abar1)
    g1 = pb.to_right
    f3 = e.maps[-3]
    g2 = make_hom(
        f3.dom,
        pb.algebra,
        tuple(pb.position_of(f3.map[x], 0) for x in range(f3.dom.size)),
        check=False,
    )
    return validate_exact_sequence(e.maps[:-3] + (g2, g1))


@dataclass(frozen=True)
class ClassifyResult:
    """Representatives of length-n extension classes of Q by K.

    ``complete`` is True when the list provably holds exactly one
    representative per equivalence class (module varieties, or n=1 where
    canonical forms decide equivalence outright). ``class_keys`` aligns
    with representatives in the module case and is None otherwise.
    """

    representatives: tuple[ExactSequence, ...]
    class_keys: tuple[tuple[int, ...], ...] | None
    complete: bool

    def __len__(self) -> int:
        return len(self.representatives)


def _ext1_sequences(Q, K, limits) -> list[tuple[CanonicalForm, ExactSequence]]:
    forms = enumerate_ext1(Q, K, limits=limits)
    return [(f, sequence_from_ses(f.to_ses())) for f in forms]


def classify_extn(
    Q: FiniteAlgebra,
    K: FiniteAlgebra,
    n: int,
    limits: Limits | None = None,
) -> ClassifyResult:
    """One representative per length-n extension class, where decidable.

    Module varieties: enumerate one-step extensions of the (n-1)-th
    syzygy kernel of Q by K, splice the syzygy sequences back on top to
    reach length n, and bucket by resolution class key; the syzygy
    surjection guarantees every class is reached. Other varieties: n=1 is
    decided by canonical forms; for n >= 2 the spliced split-tower
    representatives are returned with ``complete=False`` since
    equivalence of longer sequences is not decided there.
    """
    if n < 1:
        raise ValidationError("extension length must be >= 1")
    if Q.variety != K.variety:
        raise ValidationError("Q and K must share a variety")
    kind = variety_kind(Q.variety)

    if n == 1:
        pairs = _ext1_sequences(Q, K, limits)
        keys = None
        if kind == "modules":
            res = build_resolution(Q, 2)
            keys = tuple(yoneda_class_of(seq, res) for _, seq in pairs)
        return ClassifyResult(
            representatives=tuple(seq for _, seq in pairs),
            class_keys=keys,
            complete=True,
        )

    if kind == "modules":
        return _classify_modules(Q, K, n, limits)

    pairs = _ext1_sequences(Q, K, limits)
    pad = sequence_from_ses(split_ses(K, K))
    tower = pad
    for _ in range(n - 2):
        tower = splice(tower, pad)
    reps = tuple(splice(tower, seq) for _, seq in pairs)
    return ClassifyResult(representatives=reps, class_keys=None, complete=False)


def _classify_modules(Q, K, n, limits) -> ClassifyResult:
    towers: list[Syzygy] = []
    omega = Q
    for _ in range(n - 1):
        s = syzygy(omega)
        towers.append(s)
        omega = s.Omega

    res = build_resolution(Q, n + 1)
    found: dict[tuple[int, ...], ExactSequence] = {}
    for _, seq in _ext1_sequences(omega, K, limits):
        for s in reversed(towers):
            seq = splice(seq, sequence_from_ses(syzygy_ses(s)))
        key = yoneda_class_of(seq, res)
        found.setdefault(key, seq)
    keys = tuple(sorted(found))
    return ClassifyResult(
        representatives=tuple(found[k] for k in keys),
        class_keys=keys,
        complete=True,
    )
