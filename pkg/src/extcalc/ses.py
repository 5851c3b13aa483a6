"""Short exact sequences and the section-indexed retract onto K^l x Q.

A short exact sequence is a pair (k, q) with k = ker(q) and q = coker(k).
Validation checks the two defining conditions together with the equivalent
normal-mono / normal-epi characterisations and insists they agree.

Given a pointed section s of q and a semi-abelian witness, the maps

    phi(k1, .., kl, y) = beta(k(k1), .., k(kl), s(y))
    psi(x)             = (alpha_1(x, s(q(x))), .., alpha_l(x, s(q(x))), q(x))

exhibit the middle object as a retract of K^l x Q. retract_maps builds both
directions and checks the five identities that make the pair usable.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace

from .algebra import (
    FiniteAlgebra,
    Homomorphism,
    compose,
    congruence_closure,
    is_normal_epi,
    is_normal_mono,
    make_hom,
    pair_index,
    partition_key,
    power_coords,
    power_index,
    product,
    pullback,
)
from .errors import (
    EndpointMismatchError,
    NotExactError,
    UnsupportedVarietyError,
    ValidationError,
    WitnessError,
)
from .limits import Limits, default_limits
from .terms import SemiAbelianWitness, eval_term, verify_witness
from .varieties import variety_kind


@dataclass(frozen=True)
class ShortExactSeq:
    k: Homomorphism
    q: Homomorphism

    @property
    def kernel_object(self) -> FiniteAlgebra:
        return self.k.dom

    @property
    def middle(self) -> FiniteAlgebra:
        return self.k.cod

    @property
    def base(self) -> FiniteAlgebra:
        return self.q.cod


def validate_ses(k: Homomorphism, q: Homomorphism) -> ShortExactSeq:
    """Check exactness of 0 -> K -k-> X -q-> Q -> 0 and return the sequence.

    The three equivalent characterisations (k = ker q and q = coker k;
    k normal mono and q = coker k; k = ker q and q normal epi) are all
    evaluated; disagreement would be a bug, not bad input.
    """
    if k.cod != q.dom:
        raise EndpointMismatchError("kernel map codomain differs from quotient domain")
    if not k.is_injective():
        raise NotExactError("kernel map is not injective", position="k")
    if not q.is_surjective():
        raise NotExactError("quotient map is not surjective", position="q")
    k_is_ker_q = set(k.map) == set(q.kernel_set())
    cong = congruence_closure(q.dom, [(x, 0) for x in k.map])
    q_is_coker_k = partition_key(q.fibers()) == partition_key(cong.blocks)
    via_defs = k_is_ker_q and q_is_coker_k
    via_mono = is_normal_mono(k) and q_is_coker_k
    via_epi = k_is_ker_q and is_normal_epi(q)
    assert via_defs == via_mono == via_epi, "exactness characterisations disagree"
    if not via_defs:
        if not k_is_ker_q:
            raise NotExactError("image of k is not the kernel of q", position="k")
        raise NotExactError("q is not the cokernel of k", position="q")
    return ShortExactSeq(k, q)


def split_ses(kernel_object: FiniteAlgebra, base: FiniteAlgebra) -> ShortExactSeq:
    """The product extension K -> K x Q -> Q."""
    prod, _, p2 = product(kernel_object, base)
    k = make_hom(
        kernel_object, prod, tuple(pair_index(u, 0, kernel_object.size) for u in range(kernel_object.size)),
        check=False,
    )
    return validate_ses(k, p2)


def transport_ses(e: ShortExactSeq, perm: tuple[int, ...]) -> ShortExactSeq:
    """Relabel the middle object along a permutation fixing 0.

    Produces an equivalent sequence with the same endpoint objects.
    """
    from .algebra import relabel

    middle = relabel(e.middle, perm)
    inv = [0] * len(perm)
    for old, new in enumerate(perm):
        inv[new] = old
    k = Homomorphism(e.kernel_object, middle, tuple(perm[x] for x in e.k.map))
    q = Homomorphism(middle, e.base, tuple(e.q.map[inv[x]] for x in range(len(perm))))
    return validate_ses(k, q)


# ---------------------------------------------------------------------------
# sections


@dataclass(frozen=True)
class Section:
    """A pointed set-section of the quotient map: q(s(v)) = v, s(0) = 0."""

    owner: ShortExactSeq
    map: tuple[int, ...]


def sections_of(e: ShortExactSeq):
    """Yield every pointed section, lexicographically by the map tuple."""
    fibers = e.q.fibers()
    if any(not f for f in fibers):
        raise NotExactError("quotient map is not surjective", position="q")
    choices = [(0,)] + [fibers[v] for v in range(1, e.base.size)]
    for combo in itertools.product(*choices):
        yield Section(e, tuple(combo))


# ---------------------------------------------------------------------------
# retract maps


@dataclass(frozen=True)
class RetractPair:
    """Mutually inverse-on-one-side maps between X and K^l x Q.

    ``phi`` is indexed by the ambient K^l x Q carrier (little-endian mixed
    radix, kernel coordinates fastest); ``psi`` by the middle carrier.
    """

    phi: tuple[int, ...]
    psi: tuple[int, ...]
    ell: int
    kernel_size: int
    base_size: int

    def ambient_size(self) -> int:
        return self.kernel_size**self.ell * self.base_size

    def ambient_index(self, coords: tuple[int, ...], y: int) -> int:
        return power_index(coords, self.kernel_size) + self.kernel_size**self.ell * y

    def ambient_decode(self, idx: int) -> tuple[tuple[int, ...], int]:
        block = self.kernel_size**self.ell
        return power_coords(idx % block, self.kernel_size, self.ell), idx // block


def _witness_for(e: ShortExactSeq, witness: SemiAbelianWitness | None) -> SemiAbelianWitness:
    w = witness if witness is not None else e.middle.variety.witness
    if w is None:
        raise WitnessError(
            f"variety {e.middle.variety.name!r} carries no semi-abelian witness"
        )
    return w


def retract_maps(
    e: ShortExactSeq, s: Section, witness: SemiAbelianWitness | None = None
) -> RetractPair:
    """Build phi and psi for one pointed section and check their identities."""
    w = _witness_for(e, witness)
    variety = replace(e.middle.variety, witness=w)
    report = verify_witness(variety, e.middle)
    if not report.ok:
        raise WitnessError(f"witness identities fail on the middle object: {report.violations[:3]}")
    if s.owner != e:
        raise ValidationError("section belongs to a different sequence")
    X, K, Q = e.middle, e.kernel_object, e.base
    nk, nq, ell = K.size, Q.size, w.ell
    kinv = {x: u for u, x in enumerate(e.k.map)}
    block = nk**ell

    psi = []
    for x in range(X.size):
        sx = s.map[e.q.map[x]]
        coords = []
        for alpha in w.alphas:
            value = eval_term(alpha, X, (x, sx))
            if value not in kinv:
                raise WitnessError(
                    f"alpha value {value} escapes the kernel image at x={x}"
                )
            coords.append(kinv[value])
        psi.append(power_index(coords, nk) + block * e.q.map[x])
    psi = tuple(psi)

    phi = []
    for idx in range(block * nq):
        coords = power_coords(idx % block, nk, ell)
        y = idx // block
        args = tuple(e.k.map[c] for c in coords) + (s.map[y],)
        phi.append(eval_term(w.beta, X, args))
    phi = tuple(phi)

    pair = RetractPair(phi, psi, ell, nk, nq)
    _check_retract_identities(e, s, pair)
    return pair


def _check_retract_identities(e: ShortExactSeq, s: Section, pair: RetractPair) -> None:
    block = pair.kernel_size**pair.ell
    for x in range(e.middle.size):
        if pair.phi[pair.psi[x]] != x:
            raise ValidationError(f"phi(psi(x)) != x at x={x}")
        if pair.psi[x] // block != e.q.map[x]:
            raise ValidationError(f"base coordinate of psi disagrees with q at x={x}")
    for idx in range(len(pair.phi)):
        if e.q.map[pair.phi[idx]] != idx // block:
            raise ValidationError(f"q(phi(t)) != base coordinate at t={idx}")
    for v in range(e.base.size):
        t = block * v  # all kernel coordinates zero
        if pair.psi[s.map[v]] != t:
            raise ValidationError(f"psi(s(v)) is not (0, .., 0, v) at v={v}")
        if pair.phi[t] != s.map[v]:
            raise ValidationError(f"phi(0, .., 0, v) != s(v) at v={v}")


# ---------------------------------------------------------------------------
# centrality and pullbacks


def is_central(e: ShortExactSeq) -> bool:
    """Whether the kernel sits centrally in the middle object.

    Supported for groups (commutation check) and for abelian groups and
    modules (always true).
    """
    kind = variety_kind(e.middle.variety)
    if kind in ("abelian", "modules"):
        return True
    if kind != "groups":
        raise UnsupportedVarietyError(
            f"centrality is not defined here for variety {e.middle.variety.name!r}"
        )
    X = e.middle
    return all(
        X.op("+", x, kx) == X.op("+", kx, x)
        for kx in e.k.map
        for x in range(X.size)
    )


def pullback_ses(e: ShortExactSeq, eta: Homomorphism) -> ShortExactSeq:
    """Pull the extension back along eta: Q' -> Q; kernel object unchanged."""
    if eta.cod != e.base:
        raise EndpointMismatchError("pullback map must land in the base object")
    pb = pullback(e.q, eta)
    positions = {amb: i for i, amb in enumerate(pb.ambient_subset)}
    k_map = []
    for u in range(e.kernel_object.size):
        amb = pair_index(e.k.map[u], 0, e.middle.size)
        k_map.append(positions[amb])
    k = make_hom(e.kernel_object, pb.algebra, tuple(k_map), check=False)
    return validate_ses(k, pb.to_right)
