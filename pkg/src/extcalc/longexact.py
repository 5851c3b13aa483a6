"""Exact sequences of arbitrary finite length and their splicing.

A length-n exact sequence

    0 -> K -f_{n+1}-> X_n -f_n-> ... -> X_1 -f_1-> Q -> 0

is stored as the map chain longest-subscript first. Validation factors
every map through its normal image and checks that each junction
(m_{i+1}, e_i) at X_i forms a short exact sequence; the two end
conditions are injectivity of f_{n+1} and surjectivity of f_1.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .algebra import FiniteAlgebra, Homomorphism, compose, normal_image_factorization
from .errors import ArityError, EndpointMismatchError, NotExactError, NotNormalError
from .ses import ShortExactSeq, validate_ses


@dataclass(frozen=True)
class ExactSequence:
    """Validated exact sequence; construct through validate_exact_sequence.

    ``maps`` lists f_{n+1}, ..., f_1. ``epis``/``monos`` cache the normal
    image factorization f_i = monos[j] . epis[j] at the same list position
    j = n+1-i, and ``junctions`` the n short exact sequences at the middle
    objects, X_n end first.
    """

    maps: tuple[Homomorphism, ...]
    epis: tuple[Homomorphism, ...] = field(compare=False, repr=False)
    monos: tuple[Homomorphism, ...] = field(compare=False, repr=False)
    junctions: tuple[ShortExactSeq, ...] = field(compare=False, repr=False)

    @property
    def n(self) -> int:
        return len(self.maps) - 1

    @property
    def kernel_object(self) -> FiniteAlgebra:
        return self.maps[0].dom

    @property
    def base(self) -> FiniteAlgebra:
        return self.maps[-1].cod

    def middle_objects(self) -> tuple[FiniteAlgebra, ...]:
        """X_n, ..., X_1."""
        return tuple(h.cod for h in self.maps[:-1])

    def map_by_subscript(self, i: int) -> Homomorphism:
        """f_i for i in 1..n+1."""
        if not 1 <= i <= len(self.maps):
            raise IndexError(f"no map f_{i} in a length-{self.n} sequence")
        return self.maps[len(self.maps) - i]


def validate_exact_sequence(maps) -> ExactSequence:
    """Check exactness of a composable chain and cache the factorizations.

    Error positions use the f_i subscript: the map at list position j is
    f_{n+1-j}, junction failures at X_i report position i.
    """
    maps = tuple(maps)
    if len(maps) < 2:
        raise ArityError("an exact sequence needs at least two maps (length >= 1)")
    n = len(maps) - 1
    for j in range(len(maps) - 1):
        if maps[j].cod != maps[j + 1].dom:
            raise EndpointMismatchError(
                f"map f_{n + 1 - j} lands in a different object than f_{n - j} leaves"
            )
    if not maps[0].is_injective():
        raise NotExactError("f_{n+1} is not injective", position=n + 1)
    if not maps[-1].is_surjective():
        raise NotExactError("f_1 is not surjective", position=1)
    epis, monos = [], []
    for j, h in enumerate(maps):
        fact = normal_image_factorization(h)
        if fact is None:
            raise NotNormalError(
                f"map f_{n + 1 - j} has no normal image factorization",
                position=n + 1 - j,
            )
        epis.append(fact[0])
        monos.append(fact[1])
    junctions = []
    for j in range(len(maps) - 1):
        # junction at the codomain of maps[j]: image of f_{i+1} into X_i,
        # then X_i onto the image of f_i, with i = n - j
        try:
            junctions.append(validate_ses(monos[j], epis[j + 1]))
        except NotExactError as err:
            raise NotExactError(
                f"sequence is not exact at X_{n - j}", position=n - j
            ) from err
    return ExactSequence(maps=maps, epis=tuple(epis), monos=tuple(monos), junctions=tuple(junctions))


def sequence_from_ses(e: ShortExactSeq) -> ExactSequence:
    """A short exact sequence as a length-1 exact sequence."""
    return validate_exact_sequence((e.k, e.q))


def splice(a: ExactSequence, b: ExactSequence) -> ExactSequence:
    """Join a: K -> R and b: R -> Q into a length a.n + b.n sequence.

    The junction map is b's kernel inclusion composed with a's final
    surjection; the interface object R must be the identical algebra.
    """
    if a.base != b.kernel_object:
        raise EndpointMismatchError(
            "the base of the first sequence must equal the kernel object of the second"
        )
    junction = compose(b.maps[0], a.maps[-1])
    return validate_exact_sequence(a.maps[:-1] + (junction,) + b.maps[1:])
