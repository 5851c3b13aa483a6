"""Signatures, terms, equational presentations, and semi-abelian witnesses.

A variety here is always pointed: every signature contains exactly one
constant, named "0". Terms are immutable trees over named operations and
integer variables. A semi-abelian witness packages the terms alpha_1..alpha_l
(binary) and beta ((l+1)-ary) whose identities

    alpha_i(x, x) = 0          for every i
    beta(alpha_1(x, y), ..., alpha_l(x, y), y) = x

characterise the varieties this package can do extension theory in. Those
two families imply beta(0, ..., 0, y) = y, which is checked separately as a
consistency probe.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

from .errors import ArityError, ValidationError, WitnessError

if TYPE_CHECKING:  # pragma: no cover
    from .algebra import FiniteAlgebra


# ---------------------------------------------------------------------------
# terms


@dataclass(frozen=True)
class Term:
    """A term tree: either a variable (op is None) or an operation node."""

    op: str | None
    index: int = -1
    args: tuple["Term", ...] = ()

    def __post_init__(self):
        if self.op is None:
            if self.index < 0:
                raise ArityError("variable index must be >= 0")
            if self.args:
                raise ArityError("variable terms take no arguments")
        elif self.index != -1:
            raise ArityError("operation terms carry no variable index")

    @property
    def is_var(self) -> bool:
        return self.op is None

    def variables(self) -> frozenset[int]:
        if self.is_var:
            return frozenset((self.index,))
        out: frozenset[int] = frozenset()
        for a in self.args:
            out |= a.variables()
        return out

    def __str__(self) -> str:
        if self.is_var:
            return f"x{self.index}"
        if not self.args:
            return str(self.op)
        return f"{self.op}({', '.join(str(a) for a in self.args)})"


def tvar(index: int) -> Term:
    return Term(None, index)


def tapp(op: str, *args: Term) -> Term:
    return Term(op, args=tuple(args))


# ---------------------------------------------------------------------------
# signatures


@dataclass(frozen=True)
class Signature:
    """Operation names with arities. Exactly one constant, named "0"."""

    ops: tuple[tuple[str, int], ...]

    def __post_init__(self):
        names = [name for name, _ in self.ops]
        if len(set(names)) != len(names):
            raise ValidationError("duplicate operation names in signature")
        constants = [name for name, arity in self.ops if arity == 0]
        if constants != ["0"]:
            raise ValidationError('signature needs exactly one constant, named "0"')
        for name, arity in self.ops:
            if arity < 0:
                raise ArityError(f"operation {name!r} has negative arity")

    def arity(self, name: str) -> int:
        for op, arity in self.ops:
            if op == name:
                return arity
        raise ArityError(f"unknown operation {name!r}")

    def names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.ops)


def check_term(term: Term, sig: Signature) -> frozenset[int]:
    """Validate arities throughout ``term``; return its variable set."""
    if term.is_var:
        return frozenset((term.index,))
    want = sig.arity(term.op)  # raises ArityError on unknown ops
    if len(term.args) != want:
        raise ArityError(
            f"operation {term.op!r} wants {want} arguments, got {len(term.args)}"
        )
    out: frozenset[int] = frozenset()
    for a in term.args:
        out |= check_term(a, sig)
    return out


# ---------------------------------------------------------------------------
# presentations


@dataclass(frozen=True)
class SemiAbelianWitness:
    """Terms alpha_1..alpha_l (variables 0, 1) and beta (variables 0..l).

    In beta, variables 0..l-1 stand for the alpha values and variable l for
    the final argument y.
    """

    ell: int
    alphas: tuple[Term, ...]
    beta: Term

    def __post_init__(self):
        if self.ell < 1:
            raise WitnessError("witness needs at least one alpha term")
        if len(self.alphas) != self.ell:
            raise WitnessError(f"expected {self.ell} alpha terms, got {len(self.alphas)}")


@dataclass(frozen=True)
class VarietyPresentation:
    """A finitely presented pointed variety, optionally with a witness.

    Equations are pairs (lhs, rhs). The union of the variables of both sides
    must be contiguous from 0; either side alone may use a subset (unit and
    inverse axioms are one-sided).
    """

    name: str
    signature: Signature
    equations: tuple[tuple[Term, Term], ...]
    witness: SemiAbelianWitness | None = None

    def __post_init__(self):
        for lhs, rhs in self.equations:
            used = check_term(lhs, self.signature) | check_term(rhs, self.signature)
            if used and used != frozenset(range(max(used) + 1)):
                raise ValidationError(
                    f"equation {lhs} = {rhs} has gaps in its variable numbering"
                )
        if self.witness is not None:
            for a in self.witness.alphas:
                if not check_term(a, self.signature) <= frozenset((0, 1)):
                    raise WitnessError(f"alpha term {a} must use variables 0, 1 only")
            ell = self.witness.ell
            if not check_term(self.witness.beta, self.signature) <= frozenset(range(ell + 1)):
                raise WitnessError(
                    f"beta term must use variables 0..{ell} only"
                )

    def arity(self, name: str) -> int:
        return self.signature.arity(name)


# ---------------------------------------------------------------------------
# evaluation


def eval_term(term: Term, algebra: "FiniteAlgebra", assignment: tuple[int, ...] | list[int]) -> int:
    """Evaluate ``term`` in ``algebra`` under a variable assignment."""
    if term.is_var:
        try:
            return assignment[term.index]
        except IndexError:
            raise ArityError(
                f"assignment of length {len(assignment)} lacks variable {term.index}"
            )
    args = tuple(eval_term(a, algebra, assignment) for a in term.args)
    return algebra.op(term.op, *args)


def equation_holds(algebra: "FiniteAlgebra", lhs: Term, rhs: Term) -> tuple[int, ...] | None:
    """Return a violating assignment, or None when lhs = rhs throughout."""
    used = lhs.variables() | rhs.variables()
    nvars = (max(used) + 1) if used else 0
    for assignment in itertools.product(range(algebra.size), repeat=nvars):
        if eval_term(lhs, algebra, assignment) != eval_term(rhs, algebra, assignment):
            return assignment
    return None


@dataclass(frozen=True)
class WitnessReport:
    """Outcome of verify_witness: ok flag plus per-identity violations."""

    ok: bool
    violations: tuple[tuple[str, tuple[int, ...]], ...] = field(default=())

    def __bool__(self) -> bool:  # pragma: no cover - convenience
        return self.ok


def verify_witness(variety: VarietyPresentation, algebra: "FiniteAlgebra") -> WitnessReport:
    """Check the witness identities of ``variety`` exhaustively on ``algebra``.

    Checks alpha_i(x, x) = 0, beta(alpha_1(x, y), .., alpha_l(x, y), y) = x,
    and the implied beta(0, .., 0, y) = y. Raises WitnessError when the
    variety carries no witness.
    """
    w = variety.witness
    if w is None:
        raise WitnessError(f"variety {variety.name!r} has no semi-abelian witness")
    if algebra.variety.signature != variety.signature:
        raise ValidationError("algebra does not belong to the witness's variety")
    bad: list[tuple[str, tuple[int, ...]]] = []
    n = algebra.size
    for i, alpha in enumerate(w.alphas, start=1):
        for x in range(n):
            if eval_term(alpha, algebra, (x, x)) != 0:
                bad.append((f"alpha_{i}(x, x) = 0", (x,)))
    for x in range(n):
        for y in range(n):
            vals = tuple(eval_term(a, algebra, (x, y)) for a in w.alphas)
            if eval_term(w.beta, algebra, vals + (y,)) != x:
                bad.append(("beta(alpha(x, y), y) = x", (x, y)))
    for y in range(n):
        if eval_term(w.beta, algebra, (0,) * w.ell + (y,)) != y:
            bad.append(("beta(0, .., 0, y) = y", (y,)))
    return WitnessReport(ok=not bad, violations=tuple(bad))
