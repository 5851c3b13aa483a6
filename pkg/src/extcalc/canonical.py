"""Complete invariants for one-step extensions with fixed endpoints.

For every pointed section of a valid sequence, psi transports the middle
structure onto a subset of the ambient carrier K^l x Q. Encoding each
transported structure as bytes and taking the lexicographically least one
yields a value that is equal for two sequences exactly when they are
equivalent over fixed endpoints: an equivalence xi turns the section s of
the first sequence into the section xi . s of the second and transports to
the identical subset structure, so the two candidate sets coincide.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .algebra import (
    FiniteAlgebra,
    Homomorphism,
    arg_tuples,
    make_algebra,
)
from .errors import EndpointMismatchError, ValidationError, WitnessError
from .limits import Limits, NodeBudget, default_limits
from .ses import Section, ShortExactSeq, sections_of, validate_ses
from .terms import SemiAbelianWitness, VarietyPresentation, eval_term, verify_witness
from .varieties import variety_kind


def encode_form(
    ell: int,
    kernel_size: int,
    base_size: int,
    subset: tuple[int, ...],
    tables: dict[str, tuple[int, ...]],
    kmap: tuple[int, ...],
) -> bytes:
    """Deterministic byte encoding; lexicographic byte order matches
    lexicographic order on the underlying integer sequences."""
    out = bytearray()

    def push(value: int) -> None:
        if not 0 <= value < 1 << 16:
            raise ValidationError("encoding overflow: value does not fit 16 bits")
        out.extend(value.to_bytes(2, "big"))

    for v in (ell, kernel_size, base_size, len(subset)):
        push(v)
    for v in subset:
        push(v)
    for name in sorted(tables):
        push(len(name))
        out.extend(name.encode("ascii"))
        push(len(tables[name]))
        for v in tables[name]:
            push(v)
    push(len(kmap))
    for v in kmap:
        push(v)
    return bytes(out)


@dataclass(frozen=True)
class CanonicalForm:
    """Least transported structure over all pointed sections.

    ``kernel_image`` lists the ambient K^l x Q indices of the embedded
    middle carrier, sorted ascending; ``tables`` are the transported
    operations in sorted-subset coordinates; ``kmap`` sends each kernel
    element to its subset position. ``code`` alone decides equivalence.
    """

    ell: int
    kernel_image: tuple[int, ...]
    tables: dict[str, tuple[int, ...]]
    kmap: tuple[int, ...]
    code: bytes
    kernel: FiniteAlgebra = field(compare=False)
    base: FiniteAlgebra = field(compare=False)
    variety: VarietyPresentation = field(compare=False)

    def hex(self) -> str:
        return self.code.hex()

    def to_ses(self) -> ShortExactSeq:
        """Rebuild the representative sequence between the stored endpoints."""
        block = self.kernel.size**self.ell
        middle = make_algebra(
            self.variety, len(self.kernel_image), self.tables, check=False
        )
        q = Homomorphism(middle, self.base, tuple(a // block for a in self.kernel_image))
        k = Homomorphism(self.kernel, middle, self.kmap)
        return validate_ses(k, q)


def _transport_psi(
    e: ShortExactSeq, s: Section, w: SemiAbelianWitness, kinv: dict[int, int]
) -> list[int]:
    from .algebra import power_index

    X = e.middle
    nk, ell = e.kernel_object.size, w.ell
    block = nk**ell
    psi = []
    for x in range(X.size):
        sx = s.map[e.q.map[x]]
        coords = []
        for alpha in w.alphas:
            value = eval_term(alpha, X, (x, sx))
            ku = kinv.get(value)
            if ku is None:
                raise WitnessError(f"alpha value escapes the kernel image at x={x}")
            coords.append(ku)
        psi.append(power_index(coords, nk) + block * e.q.map[x])
    if len(set(psi)) != X.size:
        raise ValidationError("transport map is not injective")
    return psi


def _transported_form(
    e: ShortExactSeq, s: Section, w: SemiAbelianWitness, kinv: dict[int, int]
):
    """Transport along psi for one section; returns (code parts) tuple."""
    psi = _transport_psi(e, s, w, kinv)
    subset = tuple(sorted(psi))
    position = {amb: i for i, amb in enumerate(subset)}
    by_position = sorted(range(e.middle.size), key=lambda x: psi[x])
    X = e.middle
    tables: dict[str, tuple[int, ...]] = {}
    n = X.size
    for opname, arity in X.variety.signature.ops:
        table = X.tables[opname]
        new_table = []
        for args in arg_tuples(n, arity):
            idx = 0
            for a in args:
                idx = idx * n + by_position[a]
            new_table.append(position[psi[table[idx]]])
        tables[opname] = tuple(new_table)
    kmap = tuple(position[psi[x]] for x in e.k.map)
    return subset, tables, kmap


def _lazy_candidate(
    e: ShortExactSeq,
    s: Section,
    w: SemiAbelianWitness,
    kinv: dict[int, int],
    best: tuple | None,
):
    """Structured candidate (subset, items, kmap) for one section, or None
    as soon as it provably cannot beat ``best``.

    ``items`` lists the transported tables in sorted op-name order, the
    same order the byte encoding uses, so structured comparison and byte
    comparison agree.
    """
    psi = _transport_psi(e, s, w, kinv)
    subset = tuple(sorted(psi))
    tied = False
    if best is not None:
        if subset > best[0]:
            return None
        tied = subset == best[0]
    position = {amb: i for i, amb in enumerate(subset)}
    by_position = sorted(range(e.middle.size), key=lambda x: psi[x])
    X = e.middle
    n = X.size
    items: list[tuple[str, tuple[int, ...]]] = []
    for oi, (opname, arity) in enumerate(sorted(X.variety.signature.ops)):
        table = X.tables[opname]
        best_table = best[1][oi][1] if tied else None
        new_table: list[int] = []
        for args in arg_tuples(n, arity):
            idx = 0
            for a in args:
                idx = idx * n + by_position[a]
            val = position[psi[table[idx]]]
            if best_table is not None:
                prior = best_table[len(new_table)]
                if val > prior:
                    return None
                if val < prior:
                    best_table = None
                    tied = False
            new_table.append(val)
        items.append((opname, tuple(new_table)))
    kmap = tuple(position[psi[x]] for x in e.k.map)
    if tied and kmap >= best[2]:
        return None
    return subset, tuple(items), kmap


def canonical_form(
    e: ShortExactSeq,
    witness: SemiAbelianWitness | None = None,
    limits: Limits | None = None,
) -> CanonicalForm:
    """Minimize the transported structure over all pointed sections."""
    from .ses import _witness_for

    limits = limits if limits is not None else default_limits()
    w = _witness_for(e, witness)
    variety = replace(e.middle.variety, witness=w)
    report = verify_witness(variety, e.middle)
    if not report.ok:
        raise WitnessError(
            f"witness identities fail on the middle object: {report.violations[:3]}"
        )
    nk, nq = e.kernel_object.size, e.base.size
    limits.check_carrier(nk**w.ell * nq, "ambient carrier")
    budget = NodeBudget(limits.max_nodes)
    kinv = {x: u for u, x in enumerate(e.k.map)}
    best: tuple | None = None
    for s in sections_of(e):
        budget.spend(e.middle.size)
        cand = _lazy_candidate(e, s, w, kinv, best)
        if cand is not None and (best is None or cand < best):
            best = cand
    assert best is not None, "a valid sequence has at least one section"
    subset, items, kmap = best
    tables = dict(items)
    form = CanonicalForm(
        ell=w.ell,
        kernel_image=subset,
        tables=tables,
        kmap=kmap,
        code=encode_form(w.ell, nk, nq, subset, tables, kmap),
        kernel=e.kernel_object,
        base=e.base,
        variety=variety,
    )
    form.to_ses()  # internal consistency: the stored data is again exact
    return form


def are_equivalent(
    e1: ShortExactSeq,
    e2: ShortExactSeq,
    witness: SemiAbelianWitness | None = None,
    limits: Limits | None = None,
) -> bool:
    """Equivalence over fixed endpoints, decided by canonical codes."""
    if e1.kernel_object != e2.kernel_object or e1.base != e2.base:
        raise EndpointMismatchError("sequences do not share endpoint objects")
    c1 = canonical_form(e1, witness, limits)
    c2 = canonical_form(e2, witness, limits)
    return c1.code == c2.code
