"""Enumeration of one-step extensions with fixed endpoints, up to equivalence.

For the built-in quasigroup-like varieties (groups, abelian groups, modules,
loops) every extension of Q by K has middle carrier K x Q after transport,
with the kernel embedded as the first column and the projection to Q as the
quotient map. Enumeration therefore searches completions of the "+" table
under those constraints; the remaining operations are determined (inverses
by row scan, scalars by repeated addition, divisions by the Latin property)
and recomputed per leaf. Leaves that fail the variety equations or
exactness are discarded; survivors are bucketed by canonical code.
"""

from __future__ import annotations

from .algebra import make_algebra, make_hom, pair_index
from .canonical import CanonicalForm, canonical_form
from .errors import (
    LimitExceededError,
    NotExactError,
    UnsupportedVarietyError,
    ValidationError,
)
from .limits import Limits, default_limits
from .ses import ShortExactSeq, validate_ses
from .tablesearch import TableProblem, collect_tables
from .terms import SemiAbelianWitness
from .varieties import module_modulus, variety_kind

_ENUMERABLE = ("groups", "abelian", "modules", "loops")


def _extension_problem(Q, K, kind: str, normalized: bool = False) -> TableProblem:
    """Constraint problem for the "+" table of a middle object on K x Q.

    With ``normalized`` the kernel rows are prefilled as
    T[u, (u', v)] = (u + u', v). Every extension is equivalent to one of
    this shape: relabelling fiber v by u -> T[k(u), s(v)] is an
    endpoint-fixing bijection and the kernel acts freely on each fiber, so
    enumeration up to equivalence loses nothing while the search space
    collapses. Raw table counting must keep ``normalized`` off.
    """
    nk, nq = K.size, Q.size
    n = nk * nq
    fixed: list[tuple[int, int]] = []
    for t in range(n):
        fixed.append((0 * n + t, t))
        fixed.append((t * n + 0, t))
    kplus = K.tables["+"]
    for u in range(nk):
        for w in range(nk):
            fixed.append(((u) * n + w, pair_index(kplus[u * nk + w], 0, nk)))
    if normalized:
        for u in range(1, nk):
            for w in range(nk):
                for v in range(nq):
                    y = pair_index(w, v, nk)
                    fixed.append((u * n + y, pair_index(kplus[u * nk + w], v, nk)))
    qplus = Q.tables["+"]
    candidates = []
    for a in range(n):
        va = a // nk
        for b in range(n):
            vb = b // nk
            vs = qplus[va * nq + vb]
            candidates.append(tuple(pair_index(u, vs, nk) for u in range(nk)))
    rows = tuple(tuple(x * n + y for y in range(n)) for x in range(n))
    cols = tuple(tuple(x * n + y for x in range(n)) for y in range(n))
    return TableProblem(
        size=n,
        fixed=tuple(fixed),
        candidates=tuple(candidates),
        alldiff_groups=rows + cols,
        associative=kind != "loops",
        commutative=kind in ("abelian", "modules"),
    )


def _complete_tables(kind: str, variety, n: int, plus: tuple[int, ...]):
    tables: dict[str, tuple[int, ...]] = {"0": (0,), "+": plus}
    if kind in ("groups", "abelian", "modules"):
        neg = []
        for x in range(n):
            for y in range(n):
                if plus[x * n + y] == 0:
                    neg.append(y)
                    break
            else:
                return None
        tables["-"] = tuple(neg)
    if kind == "modules":
        modulus = module_modulus(variety)
        scalar = (0,) * n
        for c in range(modulus):
            if c:
                scalar = tuple(plus[x * n + scalar[x]] for x in range(n))
            tables[f"s{c}"] = scalar
    if kind == "loops":
        ldiv = [0] * (n * n)
        rdiv = [0] * (n * n)
        for x in range(n):
            for z in range(n):
                ldiv[x * n + plus[x * n + z]] = z
                rdiv[plus[z * n + x] * n + x] = z
        tables["ldiv"] = tuple(ldiv)
        tables["rdiv"] = tuple(rdiv)
    return tables


def ses_from_table(Q, K, plus: tuple[int, ...], trusted: bool = False) -> ShortExactSeq | None:
    """Assemble the extension carried by a completed "+" table, or None.

    None means the leaf fails the variety equations (a module exponent
    clash, say) or exactness; both rejections are part of the contract.
    ``trusted`` skips the full equation sweep for tables coming out of the
    constrained search, whose invariants already guarantee every equation
    except the module exponent law, which is always checked directly.
    """
    kind = variety_kind(Q.variety)
    nk, n = K.size, K.size * Q.size
    tables = _complete_tables(kind, Q.variety, n, plus)
    if tables is None:
        return None
    if kind == "modules":
        last = tables[f"s{module_modulus(Q.variety) - 1}"]
        if any(plus[x * n + last[x]] != 0 for x in range(n)):
            return None
    try:
        middle = make_algebra(
            Q.variety, n, tables, check=not trusted, equation_guard=max(n, 64)
        )
    except ValidationError:
        return None
    k = make_hom(K, middle, tuple(pair_index(u, 0, nk) for u in range(nk)))
    q = make_hom(middle, Q, tuple(i // nk for i in range(n)))
    try:
        return validate_ses(k, q)
    except NotExactError:
        return None


def enumerate_ext1(
    Q,
    K,
    witness: SemiAbelianWitness | None = None,
    limits: Limits | None = None,
    carriers=None,
) -> list[CanonicalForm]:
    """All equivalence classes of extensions of Q by K, as canonical forms,
    sorted by code.

    Supported for the built-in enumerable varieties; the optional
    ``carriers`` restricts attention to the given middle sizes (for the
    built-ins every middle has exactly |K| * |Q| elements, so other sizes
    contribute nothing).
    """
    limits = limits if limits is not None else default_limits()
    if K.variety != Q.variety:
        raise ValidationError("endpoints must live in the same variety")
    kind = variety_kind(Q.variety)
    if kind not in _ENUMERABLE:
        raise UnsupportedVarietyError(
            f"one-step enumeration supports varieties {_ENUMERABLE}, not "
            f"{Q.variety.name!r}"
        )
    n = K.size * Q.size
    limits.check_carrier(n, "middle carrier")
    if carriers is not None and n not in set(carriers):
        return []
    # kernel-row normalization needs the rows to form an action, which
    # only associativity guarantees
    problem = _extension_problem(Q, K, kind, normalized=kind != "loops")
    leaves = collect_tables(problem, limits)
    forms: dict[bytes, CanonicalForm] = {}
    for plus in leaves:
        e = ses_from_table(Q, K, plus, trusted=True)
        if e is None:
            continue
        form = canonical_form(e, witness, limits)
        forms.setdefault(form.code, form)
    return [forms[code] for code in sorted(forms)]


def count_extension_tables(Q, K, limits: Limits | None = None) -> int:
    """Number of valid completed tables (before identification); a helper
    for cross-checking enumeration against independent oracles."""
    limits = limits if limits is not None else default_limits()
    kind = variety_kind(Q.variety)
    if kind not in _ENUMERABLE:
        raise UnsupportedVarietyError(f"not enumerable: {Q.variety.name!r}")
    problem = _extension_problem(Q, K, kind)
    leaves = collect_tables(problem, limits)
    return sum(1 for plus in leaves if ses_from_table(Q, K, plus, trusted=True) is not None)
