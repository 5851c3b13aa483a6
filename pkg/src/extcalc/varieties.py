"""Built-in variety presentations and a small zoo of named algebras.

Additive notation throughout, including non-commutative groups: the binary
operation is "+", the constant "0". The built-in varieties are

* groups            0, +, -            with the usual axioms
* abelian           groups plus x + y = y + x
* modules:<m>       abelian plus unary scalars s0..s<m-1> acting as c*x
* loops             0, +, ldiv, rdiv   (quasigroup with two-sided unit)
* monoids           0, +               (no witness; used by the Schreier side)

Groups, abelian groups and modules share the witness alpha(x, y) = x + (-y),
beta(z, t) = z + t; loops use alpha(x, y) = rdiv(x, y) with the same beta.
"""

from __future__ import annotations

import functools
import itertools

from .algebra import FiniteAlgebra, make_algebra
from .errors import ParseError, ValidationError
from .terms import (
    SemiAbelianWitness,
    Signature,
    Term,
    VarietyPresentation,
    tapp,
    tvar,
)

_x, _y, _z = tvar(0), tvar(1), tvar(2)


def _plus(a: Term, b: Term) -> Term:
    return tapp("+", a, b)


_GROUP_EQUATIONS = (
    (_plus(_plus(_x, _y), _z), _plus(_x, _plus(_y, _z))),
    (_plus(_x, tapp("0")), _x),
    (_plus(tapp("0"), _x), _x),
    (_plus(_x, tapp("-", _x)), tapp("0")),
    (_plus(tapp("-", _x), _x), tapp("0")),
)

_GROUP_WITNESS = SemiAbelianWitness(
    ell=1,
    alphas=(_plus(_x, tapp("-", _y)),),
    beta=_plus(_x, _y),
)


@functools.lru_cache(maxsize=None)
def group_variety() -> VarietyPresentation:
    sig = Signature((("0", 0), ("+", 2), ("-", 1)))
    return VarietyPresentation("groups", sig, _GROUP_EQUATIONS, _GROUP_WITNESS)


@functools.lru_cache(maxsize=None)
def abelian_variety() -> VarietyPresentation:
    sig = Signature((("0", 0), ("+", 2), ("-", 1)))
    equations = _GROUP_EQUATIONS + ((_plus(_x, _y), _plus(_y, _x)),)
    return VarietyPresentation("abelian", sig, equations, _GROUP_WITNESS)


@functools.lru_cache(maxsize=None)
def module_variety(modulus: int) -> VarietyPresentation:
    """Modules over the ring of integers mod ``modulus``."""
    if modulus < 1:
        raise ValidationError("modulus must be >= 1")
    ops = [("0", 0), ("+", 2), ("-", 1)]
    ops += [(f"s{c}", 1) for c in range(modulus)]
    sig = Signature(tuple(ops))
    equations = list(_GROUP_EQUATIONS)
    equations.append((_plus(_x, _y), _plus(_y, _x)))
    equations.append((tapp("s0", _x), tapp("0")))
    if modulus >= 2:
        equations.append((tapp("s1", _x), _x))
    for c in range(2, modulus):
        equations.append((tapp(f"s{c}", _x), _plus(_x, tapp(f"s{c - 1}", _x))))
    equations.append((_plus(_x, tapp(f"s{modulus - 1}", _x)), tapp("0")))
    return VarietyPresentation(
        f"modules:{modulus}", sig, tuple(equations), _GROUP_WITNESS
    )


@functools.lru_cache(maxsize=None)
def loop_variety() -> VarietyPresentation:
    sig = Signature((("0", 0), ("+", 2), ("ldiv", 2), ("rdiv", 2)))
    equations = (
        (_plus(_x, tapp("0")), _x),
        (_plus(tapp("0"), _x), _x),
        (tapp("ldiv", _x, _plus(_x, _y)), _y),
        (_plus(_x, tapp("ldiv", _x, _y)), _y),
        (tapp("rdiv", _plus(_x, _y), _y), _x),
        (_plus(tapp("rdiv", _x, _y), _y), _x),
    )
    witness = SemiAbelianWitness(ell=1, alphas=(tapp("rdiv", _x, _y),), beta=_plus(_x, _y))
    return VarietyPresentation("loops", sig, equations, witness)


@functools.lru_cache(maxsize=None)
def monoid_variety() -> VarietyPresentation:
    sig = Signature((("0", 0), ("+", 2)))
    equations = (
        (_plus(_plus(_x, _y), _z), _plus(_x, _plus(_y, _z))),
        (_plus(_x, tapp("0")), _x),
        (_plus(tapp("0"), _x), _x),
    )
    return VarietyPresentation("monoids", sig, equations, None)


def variety_kind(v: VarietyPresentation) -> str:
    """One of groups / abelian / modules / loops / monoids / custom."""
    if v == group_variety():
        return "groups"
    if v == abelian_variety():
        return "abelian"
    if v.name.startswith("modules:"):
        try:
            if v == module_variety(int(v.name.split(":", 1)[1])):
                return "modules"
        except (ValueError, ValidationError):
            pass
    if v == loop_variety():
        return "loops"
    if v == monoid_variety():
        return "monoids"
    return "custom"


def module_modulus(v: VarietyPresentation) -> int:
    if variety_kind(v) != "modules":
        raise ValidationError(f"variety {v.name!r} is not a module variety")
    return int(v.name.split(":", 1)[1])


def variety_by_name(name: str) -> VarietyPresentation:
    """Resolve a variety label like "groups" or "modules:4"."""
    if name == "groups":
        return group_variety()
    if name == "abelian":
        return abelian_variety()
    if name == "loops":
        return loop_variety()
    if name == "monoids":
        return monoid_variety()
    if name.startswith("modules:"):
        try:
            return module_variety(int(name.split(":", 1)[1]))
        except ValueError:
            raise ParseError(f"bad module variety {name!r}")
    raise ParseError(f"unknown variety {name!r}")


# ---------------------------------------------------------------------------
# group tables


def _group_tables(n: int, add) -> dict[str, tuple[int, ...]]:
    plus = tuple(add(x, y) for x in range(n) for y in range(n))
    neg = []
    for x in range(n):
        for y in range(n):
            if add(x, y) == 0:
                neg.append(y)
                break
        else:
            raise ValidationError(f"element {x} has no inverse")
    return {"0": (0,), "+": plus, "-": tuple(neg)}


@functools.lru_cache(maxsize=None)
def cyclic_group(n: int) -> FiniteAlgebra:
    tables = _group_tables(n, lambda x, y: (x + y) % n)
    return make_algebra(group_variety(), n, tables, name=f"Z{n}")


@functools.lru_cache(maxsize=None)
def cyclic_abelian(n: int) -> FiniteAlgebra:
    tables = _group_tables(n, lambda x, y: (x + y) % n)
    return make_algebra(abelian_variety(), n, tables, name=f"Z{n}")


@functools.lru_cache(maxsize=None)
def klein_group() -> FiniteAlgebra:
    tables = _group_tables(4, lambda x, y: x ^ y)
    return make_algebra(group_variety(), 4, tables, name="Klein")


@functools.lru_cache(maxsize=None)
def klein_abelian() -> FiniteAlgebra:
    tables = _group_tables(4, lambda x, y: x ^ y)
    return make_algebra(abelian_variety(), 4, tables, name="Klein")


@functools.lru_cache(maxsize=None)
def sym3() -> FiniteAlgebra:
    """Permutations of 3 points, listed lexicographically; identity first."""
    perms = sorted(itertools.permutations(range(3)))
    index = {p: i for i, p in enumerate(perms)}

    def add(i: int, j: int) -> int:
        p, q = perms[i], perms[j]
        return index[tuple(p[q[t]] for t in range(3))]

    return make_algebra(group_variety(), 6, _group_tables(6, add), name="S3")


@functools.lru_cache(maxsize=None)
def dihedral4() -> FiniteAlgebra:
    """Symmetries of the square; element a + 4*b means rotation^a flip^b."""

    def add(i: int, j: int) -> int:
        a, b = i % 4, i // 4
        c, d = j % 4, j // 4
        rot = (a + (c if b == 0 else -c)) % 4
        return rot + 4 * (b ^ d)

    return make_algebra(group_variety(), 8, _group_tables(8, add), name="D4")


@functools.lru_cache(maxsize=None)
def quaternion8() -> FiniteAlgebra:
    """Unit quaternions; element 2*axis + sign with axes 1, i, j, k."""

    def axis_mul(a: int, b: int) -> tuple[int, int]:
        # axes: 0 = scalar, 1 = i, 2 = j, 3 = k
        if a == 0:
            return 1, b
        if b == 0:
            return 1, a
        if a == b:
            return -1, 0
        table = {(1, 2): (1, 3), (2, 3): (1, 1), (3, 1): (1, 2)}
        if (a, b) in table:
            return table[(a, b)]
        sign, axis = table[(b, a)]
        return -sign, axis

    def add(i: int, j: int) -> int:
        sa, aa = (-1 if i % 2 else 1), i // 2
        sb, ab = (-1 if j % 2 else 1), j // 2
        sign, axis = axis_mul(aa, ab)
        sign *= sa * sb
        return 2 * axis + (0 if sign > 0 else 1)

    return make_algebra(group_variety(), 8, _group_tables(8, add), name="Q8")


# ---------------------------------------------------------------------------
# modules


def module_from_abelian(modulus: int, algebra: FiniteAlgebra, name: str = "") -> FiniteAlgebra:
    """Equip an abelian-variety algebra with mod-``modulus`` scalar tables.

    Fails (through the equation check) when the exponent does not divide
    the modulus.
    """
    n = algebra.size
    plus = algebra.tables["+"]
    tables: dict[str, tuple[int, ...]] = {
        "0": (0,),
        "+": plus,
        "-": algebra.tables["-"],
    }
    # s0 = zero map, then s_c(x) = x + s_{c-1}(x)
    scalar = (0,) * n
    for c in range(modulus):
        if c:
            scalar = tuple(plus[x * n + scalar[x]] for x in range(n))
        tables[f"s{c}"] = scalar
    return make_algebra(
        module_variety(modulus), n, tables, name=name or algebra.name
    )


@functools.lru_cache(maxsize=None)
def cyclic_module(modulus: int, n: int) -> FiniteAlgebra:
    return module_from_abelian(modulus, cyclic_abelian(n), name=f"Z{n}")


@functools.lru_cache(maxsize=None)
def klein_module(modulus: int) -> FiniteAlgebra:
    return module_from_abelian(modulus, klein_abelian(), name="Klein")


# ---------------------------------------------------------------------------
# loops


def group_as_loop(g: FiniteAlgebra, name: str = "") -> FiniteAlgebra:
    """View a groups-variety algebra as a loop (divisions from inverses)."""
    n = g.size
    plus, neg = g.tables["+"], g.tables["-"]
    ldiv = tuple(plus[neg[x] * n + y] for x in range(n) for y in range(n))
    rdiv = tuple(plus[x * n + neg[y]] for x in range(n) for y in range(n))
    tables = {"0": (0,), "+": plus, "ldiv": ldiv, "rdiv": rdiv}
    return make_algebra(loop_variety(), n, tables, name=name or g.name)


_LOOP5_PLUS = (
    0, 1, 2, 3, 4,
    1, 0, 3, 4, 2,
    2, 4, 0, 1, 3,
    3, 2, 4, 0, 1,
    4, 3, 1, 2, 0,
)


@functools.lru_cache(maxsize=None)
def nonassoc_loop5() -> FiniteAlgebra:
    """The standard order-5 loop that is not a group: (1+1)+2 != 1+(1+2)."""
    n = 5
    plus = _LOOP5_PLUS
    ldiv = [0] * (n * n)
    rdiv = [0] * (n * n)
    for x in range(n):
        for z in range(n):
            ldiv[x * n + plus[x * n + z]] = z
            rdiv[plus[z * n + x] * n + x] = z
    tables = {"0": (0,), "+": plus, "ldiv": tuple(ldiv), "rdiv": tuple(rdiv)}
    return make_algebra(loop_variety(), n, tables, name="loop5")


# ---------------------------------------------------------------------------
# monoids


def monoid_from_table(n: int, plus, name: str = "") -> FiniteAlgebra:
    return make_algebra(monoid_variety(), n, {"0": (0,), "+": tuple(plus)}, name=name)


@functools.lru_cache(maxsize=None)
def cyclic_monoid(n: int) -> FiniteAlgebra:
    plus = tuple((x + y) % n for x in range(n) for y in range(n))
    return monoid_from_table(n, plus, name=f"Z{n}")


@functools.lru_cache(maxsize=None)
def semilattice2() -> FiniteAlgebra:
    """Two-element join semilattice; the unit 0 is the bottom."""
    plus = tuple(max(x, y) for x in range(2) for y in range(2))
    return monoid_from_table(2, plus, name="semilattice2")


@functools.lru_cache(maxsize=None)
def chain3() -> FiniteAlgebra:
    """Three-element chain under max, a semilattice monoid."""
    plus = tuple(max(x, y) for x in range(3) for y in range(3))
    return monoid_from_table(3, plus, name="chain3")


# ---------------------------------------------------------------------------
# name resolution for the command line


def named_algebra(name: str, variety: VarietyPresentation) -> FiniteAlgebra:
    """Resolve names like Z4, Klein, S3, semilattice2 within a variety."""
    kind = variety_kind(variety)
    if name in ("0", "trivial"):
        from .algebra import trivial_algebra

        if kind == "modules":
            return module_from_abelian(module_modulus(variety), cyclic_abelian(1), name="0")
        return trivial_algebra(variety)
    if name.startswith("Z") and name[1:].isdigit():
        n = int(name[1:])
        if kind == "groups":
            return cyclic_group(n)
        if kind == "abelian":
            return cyclic_abelian(n)
        if kind == "modules":
            return cyclic_module(module_modulus(variety), n)
        if kind == "loops":
            return group_as_loop(cyclic_group(n))
        if kind == "monoids":
            return cyclic_monoid(n)
    if name == "Klein":
        if kind == "groups":
            return klein_group()
        if kind == "abelian":
            return klein_abelian()
        if kind == "modules":
            return klein_module(module_modulus(variety))
        if kind == "loops":
            return group_as_loop(klein_group())
    if name == "S3" and kind == "groups":
        return sym3()
    if name == "D4" and kind == "groups":
        return dihedral4()
    if name == "Q8" and kind == "groups":
        return quaternion8()
    if name == "loop5" and kind == "loops":
        return nonassoc_loop5()
    if name == "semilattice2" and kind == "monoids":
        return semilattice2()
    if name == "chain3" and kind == "monoids":
        return chain3()
    raise ParseError(f"no built-in algebra {name!r} in variety {variety.name!r}")
