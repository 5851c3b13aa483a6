"""Finite algebras as operation tables, and the exactness toolkit around them.

Conventions used everywhere:

* carriers are 0..n-1 and the distinguished constant is element 0;
* an operation table of arity k is a flat tuple of length n**k in row-major
  order, first argument most significant: a binary table stores f(x, y) at
  flat index x*n + y;
* product carriers use little-endian mixed radix, first factor fastest:
  the pair (u, v) in A x B sits at index u + |A|*v.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .errors import ArityError, LimitExceededError, ValidationError
from .terms import Term, VarietyPresentation, equation_holds

EQUATION_GUARD = 64


# ---------------------------------------------------------------------------
# algebras


@dataclass(frozen=True)
class FiniteAlgebra:
    """An algebra of a finite pointed variety, given by its tables."""

    variety: VarietyPresentation
    size: int
    tables: dict[str, tuple[int, ...]]
    name: str = field(default="", compare=False)

    def op(self, name: str, *args: int) -> int:
        idx = 0
        for a in args:
            idx = idx * self.size + a
        return self.tables[name][idx]

    @property
    def zero(self) -> int:
        return 0

    def elements(self) -> range:
        return range(self.size)

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        label = self.name or f"{self.variety.name} algebra"
        return f"<{label}, size {self.size}>"


def arg_tuples(size: int, arity: int):
    """All argument tuples in flat-table order (last argument fastest)."""
    return itertools.product(range(size), repeat=arity)


def make_algebra(
    variety: VarietyPresentation,
    size: int,
    tables: dict[str, tuple[int, ...]],
    name: str = "",
    check: bool = True,
    equation_guard: int = EQUATION_GUARD,
) -> FiniteAlgebra:
    """Build a FiniteAlgebra, by default validating tables and equations.

    Constructions that preserve equations by general principle (products,
    subalgebras, quotients, transported structures) call this with
    check=False; external input always goes through the full check.
    """
    if size < 1:
        raise ValidationError("carrier must be non-empty")
    declared = dict(variety.signature.ops)
    if set(tables) != set(declared):
        raise ValidationError(
            f"tables {sorted(tables)} do not match signature {sorted(declared)}"
        )
    for opname, arity in declared.items():
        table = tables[opname]
        if len(table) != size**arity:
            raise ArityError(
                f"table for {opname!r} has length {len(table)}, want {size**arity}"
            )
        for value in table:
            if not 0 <= value < size:
                raise ValidationError(f"table for {opname!r} has out-of-range entry {value}")
    if tables["0"] != (0,):
        raise ValidationError("the constant must be element 0")
    algebra = FiniteAlgebra(variety, size, dict(tables), name=name)
    if check:
        if size > equation_guard:
            raise LimitExceededError(
                f"carrier {size} exceeds equation-check guard {equation_guard}; "
                "pass check=False or raise the guard"
            )
        for lhs, rhs in variety.equations:
            bad = equation_holds(algebra, lhs, rhs)
            if bad is not None:
                raise ValidationError(
                    f"equation {lhs} = {rhs} fails in {name or 'algebra'} at {bad}"
                )
    return algebra


def trivial_algebra(variety: VarietyPresentation, name: str = "0") -> FiniteAlgebra:
    tables = {
        opname: (0,) * (1**arity) for opname, arity in variety.signature.ops
    }
    return make_algebra(variety, 1, tables, name=name, check=False)


def relabel(algebra: FiniteAlgebra, perm: tuple[int, ...]) -> FiniteAlgebra:
    """Transport the structure along a carrier permutation with perm[0] = 0.

    ``perm[old] = new``; the result satisfies the same equations.
    """
    n = algebra.size
    if sorted(perm) != list(range(n)) or perm[0] != 0:
        raise ValidationError("relabelling must be a permutation fixing 0")
    inv = [0] * n
    for old, new in enumerate(perm):
        inv[new] = old
    tables: dict[str, tuple[int, ...]] = {}
    for opname, arity in algebra.variety.signature.ops:
        old_table = algebra.tables[opname]
        new_table = []
        for args in arg_tuples(n, arity):
            idx = 0
            for a in args:
                idx = idx * n + inv[a]
            new_table.append(perm[old_table[idx]])
        tables[opname] = tuple(new_table)
    return make_algebra(algebra.variety, n, tables, name=algebra.name, check=False)


# ---------------------------------------------------------------------------
# homomorphisms


@dataclass(frozen=True)
class Homomorphism:
    dom: FiniteAlgebra
    cod: FiniteAlgebra
    map: tuple[int, ...]

    def __call__(self, x: int) -> int:
        return self.map[x]

    def image(self) -> tuple[int, ...]:
        return tuple(sorted(set(self.map)))

    def is_injective(self) -> bool:
        return len(set(self.map)) == len(self.map)

    def is_surjective(self) -> bool:
        return len(set(self.map)) == self.cod.size

    def fibers(self) -> tuple[tuple[int, ...], ...]:
        """Preimages per codomain element, each sorted ascending."""
        out: list[list[int]] = [[] for _ in range(self.cod.size)]
        for x, y in enumerate(self.map):
            out[y].append(x)
        return tuple(tuple(f) for f in out)

    def kernel_set(self) -> tuple[int, ...]:
        return tuple(x for x, y in enumerate(self.map) if y == 0)


def homomorphism_failure(
    dom: FiniteAlgebra, cod: FiniteAlgebra, mapping: tuple[int, ...]
) -> str | None:
    """Why ``mapping`` is not a homomorphism, or None if it is one."""
    if dom.variety.signature != cod.variety.signature:
        return "signature mismatch between domain and codomain"
    if len(mapping) != dom.size:
        return f"map has length {len(mapping)}, want {dom.size}"
    for y in mapping:
        if not 0 <= y < cod.size:
            return f"map value {y} outside codomain"
    for opname, arity in dom.variety.signature.ops:
        dt, ct = dom.tables[opname], cod.tables[opname]
        n, m = dom.size, cod.size
        for args in arg_tuples(n, arity):
            di = ci = 0
            for a in args:
                di = di * n + a
                ci = ci * m + mapping[a]
            if mapping[dt[di]] != ct[ci]:
                return f"{opname} not preserved at {args}"
    return None


def is_homomorphism(dom: FiniteAlgebra, cod: FiniteAlgebra, mapping: tuple[int, ...]) -> bool:
    return homomorphism_failure(dom, cod, mapping) is None


def make_hom(
    dom: FiniteAlgebra, cod: FiniteAlgebra, mapping, check: bool = True
) -> Homomorphism:
    mapping = tuple(mapping)
    if check:
        why = homomorphism_failure(dom, cod, mapping)
        if why is not None:
            raise ValidationError(f"not a homomorphism: {why}")
    return Homomorphism(dom, cod, mapping)


def identity_hom(algebra: FiniteAlgebra) -> Homomorphism:
    return Homomorphism(algebra, algebra, tuple(range(algebra.size)))


def zero_hom(dom: FiniteAlgebra, cod: FiniteAlgebra) -> Homomorphism:
    return Homomorphism(dom, cod, (0,) * dom.size)


def compose(outer: Homomorphism, inner: Homomorphism) -> Homomorphism:
    """outer after inner."""
    if inner.cod != outer.dom:
        raise ValidationError("composition endpoints do not match")
    return Homomorphism(inner.dom, outer.cod, tuple(outer.map[x] for x in inner.map))


# ---------------------------------------------------------------------------
# subalgebras


def subalgebra(
    algebra: FiniteAlgebra, subset: tuple[int, ...], name: str = ""
) -> tuple[FiniteAlgebra, Homomorphism]:
    """The induced structure on a closed subset containing 0, plus inclusion.

    The subset is sorted, so 0 keeps position 0. Equations are inherited
    from the parent, no recheck.
    """
    subset = tuple(sorted(set(subset)))
    if not subset or subset[0] != 0:
        raise ValidationError("subalgebra carrier must contain 0")
    position = {x: i for i, x in enumerate(subset)}
    k = len(subset)
    tables: dict[str, tuple[int, ...]] = {}
    for opname, arity in algebra.variety.signature.ops:
        table = algebra.tables[opname]
        n = algebra.size
        new_table = []
        for args in itertools.product(subset, repeat=arity):
            idx = 0
            for a in args:
                idx = idx * n + a
            value = table[idx]
            if value not in position:
                raise ValidationError(
                    f"subset not closed under {opname!r} at {args} (got {value})"
                )
            new_table.append(position[value])
        tables[opname] = tuple(new_table)
    sub = make_algebra(algebra.variety, k, tables, name=name, check=False)
    inclusion = Homomorphism(sub, algebra, subset)
    return sub, inclusion


def generated_subset(algebra: FiniteAlgebra, seeds) -> tuple[int, ...]:
    """Closure of ``seeds`` + the constant under all operations."""
    current = set(seeds) | {0}
    changed = True
    while changed:
        changed = False
        members = sorted(current)
        for opname, arity in algebra.variety.signature.ops:
            if arity == 0:
                continue
            for args in itertools.product(members, repeat=arity):
                value = algebra.op(opname, *args)
                if value not in current:
                    current.add(value)
                    changed = True
    return tuple(sorted(current))


# ---------------------------------------------------------------------------
# congruences and quotients


@dataclass(frozen=True)
class Congruence:
    """A compatible partition, blocks sorted by least element."""

    algebra: FiniteAlgebra
    blocks: tuple[tuple[int, ...], ...]
    class_index: tuple[int, ...] = field(compare=False)

    def class_of(self, x: int) -> int:
        return self.class_index[x]


def _blocks_from_parent(find, size: int) -> tuple[tuple[int, ...], ...]:
    grouped: dict[int, list[int]] = {}
    for x in range(size):
        grouped.setdefault(find(x), []).append(x)
    return tuple(tuple(b) for b in sorted(grouped.values(), key=lambda b: b[0]))


def make_congruence(algebra: FiniteAlgebra, blocks) -> Congruence:
    """Validate a partition as a congruence and normalize its presentation."""
    seen: dict[int, int] = {}
    norm = tuple(tuple(sorted(b)) for b in sorted((tuple(b) for b in blocks), key=min))
    for i, block in enumerate(norm):
        for x in block:
            if x in seen:
                raise ValidationError(f"element {x} appears in two blocks")
            seen[x] = i
    if sorted(seen) != list(range(algebra.size)):
        raise ValidationError("blocks do not partition the carrier")
    class_index = tuple(seen[x] for x in range(algebra.size))
    n = algebra.size
    for opname, arity in algebra.variety.signature.ops:
        table = algebra.tables[opname]
        outcome: dict[tuple[int, ...], int] = {}
        for args in arg_tuples(n, arity):
            idx = 0
            for a in args:
                idx = idx * n + a
            key = tuple(class_index[a] for a in args)
            value = class_index[table[idx]]
            if outcome.setdefault(key, value) != value:
                raise ValidationError(
                    f"partition not compatible with {opname!r} at classes {key}"
                )
    return Congruence(algebra, norm, class_index)


def congruence_closure(algebra: FiniteAlgebra, pairs) -> Congruence:
    """Least congruence containing ``pairs``.

    Union-find plus fixpoint passes: merge outputs of argument tuples that
    are blockwise congruent, until no merge fires.
    """
    parent = list(range(algebra.size))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x: int, y: int) -> bool:
        rx, ry = find(x), find(y)
        if rx == ry:
            return False
        if ry < rx:
            rx, ry = ry, rx
        parent[ry] = rx
        return True

    for x, y in pairs:
        union(x, y)

    n = algebra.size
    op_tables = [
        (algebra.tables[opname], arity)
        for opname, arity in algebra.variety.signature.ops
        if arity > 0
    ]
    changed = True
    while changed:
        changed = False
        for table, arity in op_tables:
            buckets: dict[tuple[int, ...], int] = {}
            for idx, args in enumerate(arg_tuples(n, arity)):
                key = tuple(find(a) for a in args)
                out = table[idx]
                prev = buckets.get(key)
                if prev is None:
                    buckets[key] = out
                elif union(prev, out):
                    changed = True
    blocks = _blocks_from_parent(find, n)
    class_index_map = {block[0]: i for i, block in enumerate(blocks)}
    class_index = tuple(class_index_map[find(x)] for x in range(n))
    return Congruence(algebra, blocks, class_index)


def quotient(algebra: FiniteAlgebra, cong: Congruence) -> tuple[FiniteAlgebra, Homomorphism]:
    """Quotient algebra and projection; block of 0 becomes element 0."""
    if cong.algebra != algebra:
        raise ValidationError("congruence belongs to a different algebra")
    reps = [block[0] for block in cong.blocks]
    k = len(reps)
    tables: dict[str, tuple[int, ...]] = {}
    for opname, arity in algebra.variety.signature.ops:
        new_table = []
        for args in itertools.product(reps, repeat=arity):
            new_table.append(cong.class_index[algebra.op(opname, *args)])
        tables[opname] = tuple(new_table)
    q_algebra = make_algebra(algebra.variety, k, tables, check=False)
    proj = Homomorphism(algebra, q_algebra, cong.class_index)
    return q_algebra, proj


# ---------------------------------------------------------------------------
# kernels, cokernels, normality


def kernel(h: Homomorphism) -> Homomorphism:
    """Inclusion of the preimage of 0 into the domain."""
    sub, inclusion = subalgebra(h.dom, h.kernel_set())
    return inclusion


def cokernel(h: Homomorphism) -> Homomorphism:
    """Projection of the codomain by the closure of (image ~ 0)."""
    pairs = [(y, 0) for y in set(h.map)]
    cong = congruence_closure(h.cod, pairs)
    _, proj = quotient(h.cod, cong)
    return proj


def partition_key(fibers: tuple[tuple[int, ...], ...]) -> tuple[tuple[int, ...], ...]:
    return tuple(sorted((tuple(sorted(f)) for f in fibers if f), key=lambda b: b[0]))


def is_normal_mono(k: Homomorphism) -> bool:
    """Injective and the kernel of its own cokernel."""
    if not k.is_injective():
        return False
    coker = cokernel(k)
    return set(coker.kernel_set()) == set(k.map)


def is_normal_epi(q: Homomorphism) -> bool:
    """Surjective and the cokernel of its own kernel."""
    if not q.is_surjective():
        return False
    cong = congruence_closure(q.dom, [(x, 0) for x in q.kernel_set()])
    return partition_key(q.fibers()) == partition_key(cong.blocks)


def normal_image_factorization(h: Homomorphism) -> tuple[Homomorphism, Homomorphism] | None:
    """Factor h = m . e with e a normal epi onto the image and m a normal mono.

    Returns None when either half fails its normality test: non-normal maps
    are expected inputs while probing candidate exact sequences.
    """
    image = h.image()
    sub, m = subalgebra(h.cod, image)
    position = {x: i for i, x in enumerate(image)}
    e = Homomorphism(h.dom, sub, tuple(position[y] for y in h.map))
    if not is_normal_epi(e) or not is_normal_mono(m):
        return None
    return e, m


# ---------------------------------------------------------------------------
# products and pullbacks


def pair_index(u: int, v: int, left_size: int) -> int:
    return u + left_size * v


def unpair_index(idx: int, left_size: int) -> tuple[int, int]:
    return idx % left_size, idx // left_size


def product(
    a: FiniteAlgebra, b: FiniteAlgebra, name: str = ""
) -> tuple[FiniteAlgebra, Homomorphism, Homomorphism]:
    """Componentwise product with both projections; (u, v) -> u + |A|*v."""
    if a.variety != b.variety:
        raise ValidationError("product factors must share a variety")
    na, nb = a.size, b.size
    size = na * nb
    tables: dict[str, tuple[int, ...]] = {}
    for opname, arity in a.variety.signature.ops:
        ta, tb = a.tables[opname], b.tables[opname]
        new_table = []
        for args in arg_tuples(size, arity):
            ia = ib = 0
            for x in args:
                ia = ia * na + (x % na)
                ib = ib * nb + (x // na)
            new_table.append(pair_index(ta[ia], tb[ib], na))
        tables[opname] = tuple(new_table)
    prod = make_algebra(a.variety, size, tables, name=name, check=False)
    p1 = Homomorphism(prod, a, tuple(i % na for i in range(size)))
    p2 = Homomorphism(prod, b, tuple(i // na for i in range(size)))
    return prod, p1, p2


def power_index(coords, base: int) -> int:
    idx = 0
    for c in reversed(tuple(coords)):
        idx = idx * base + c
    return idx


def power_coords(idx: int, base: int, ell: int) -> tuple[int, ...]:
    out = []
    for _ in range(ell):
        out.append(idx % base)
        idx //= base
    return tuple(out)


def power(
    a: FiniteAlgebra, ell: int, name: str = ""
) -> tuple[FiniteAlgebra, tuple[Homomorphism, ...]]:
    """The ell-fold power with projections; coordinate 0 is fastest."""
    if ell < 0:
        raise ValidationError("power exponent must be >= 0")
    n = a.size
    size = n**ell
    tables: dict[str, tuple[int, ...]] = {}
    for opname, arity in a.variety.signature.ops:
        ta = a.tables[opname]
        new_table = []
        for args in arg_tuples(size, arity):
            coords = [power_coords(x, n, ell) for x in args]
            value = []
            for i in range(ell):
                idx = 0
                for c in coords:
                    idx = idx * n + c[i]
                value.append(ta[idx])
            new_table.append(power_index(value, n))
        tables[opname] = tuple(new_table)
    pw = make_algebra(a.variety, size, tables, name=name, check=False)
    projections = tuple(
        Homomorphism(pw, a, tuple(power_coords(i, n, ell)[j] for i in range(size)))
        for j in range(ell)
    )
    return pw, projections


@dataclass(frozen=True)
class Pullback:
    """Canonical pullback of a cospan, as a subalgebra of the product."""

    algebra: FiniteAlgebra
    to_left: Homomorphism
    to_right: Homomorphism
    ambient_subset: tuple[int, ...]  # indices into left x right, sorted

    def position_of(self, u: int, v: int) -> int:
        left_size = self.to_left.cod.size
        return self.ambient_subset.index(pair_index(u, v, left_size))


def pullback(f: Homomorphism, g: Homomorphism, name: str = "") -> Pullback:
    """Pullback of the cospan f: A -> C <- B :g."""
    if f.cod != g.cod:
        raise ValidationError("pullback cospan must share a codomain")
    prod, p1, p2 = product(f.dom, g.dom)
    subset = tuple(
        i for i in range(prod.size) if f.map[p1.map[i]] == g.map[p2.map[i]]
    )
    sub, inclusion = subalgebra(prod, subset, name=name)
    to_left = compose(p1, inclusion)
    to_right = compose(p2, inclusion)
    return Pullback(sub, to_left, to_right, subset)
