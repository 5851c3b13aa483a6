"""Schreier extensions of finite monoids.

A short exact sequence of monoids k: K -> X, q: X -> Q is Schreier when
every fiber of q contains a transversal element x_v through which each
member of the fiber factors uniquely as k(u) + x_v. Writing s(v) = x_v
and p(x) for the unique kernel coordinate, the pair (s, p) satisfies

    q(s(v)) = v,   s(0) = 0,   k(p(x)) + s(q(x)) = x,   p(k(u) + s(v)) = u,

and conversely any (s, p) with these identities exhibits the sequence as
Schreier. The factorization makes x -> (p(x), q(x)) a bijection onto
K x Q, so Schreier sequences normalize onto the product carrier with
kernel u -> (u, 0) and projection as q; enumeration and equivalence work
entirely on those normalized tables. Equivalence is connectivity in the
graph whose edges are endpoint-fixing monoid homomorphisms in either
direction; it is not assumed that every such morphism is invertible.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .algebra import FiniteAlgebra, make_algebra, make_hom
from .canonical import CanonicalForm, encode_form
from .errors import EndpointMismatchError, UnsupportedVarietyError, ValidationError
from .limits import Limits, NodeBudget, default_limits
from .ses import RetractPair, ShortExactSeq, validate_ses
from .tablesearch import TableProblem, collect_tables
from .varieties import monoid_variety, variety_kind


@dataclass(frozen=True)
class SchreierData:
    """A pointed section with its kernel retraction.

    ``section`` is indexed by the base carrier and lists the transversal
    element of each fiber; ``retraction`` is indexed by the middle
    carrier and recovers the kernel coordinate of the unique
    factorization x = k(u) + s(q(x)).
    """

    section: tuple[int, ...]
    retraction: tuple[int, ...]

    def transversal(self, v: int) -> int:
        return self.section[v]


def _require_monoid_ses(e: ShortExactSeq) -> None:
    if variety_kind(e.middle.variety) != "monoids":
        raise UnsupportedVarietyError(
            "Schreier analysis applies to the monoid variety only"
        )


def fiber_candidates(e: ShortExactSeq) -> tuple[tuple[int, ...], ...]:
    """Per base element, the fiber members usable as its transversal.

    A candidate x_v must make u -> k(u) + x_v a bijection from the
    kernel onto the whole fiber of q over v. The fiber over 0 is pinned
    to the candidate 0.
    """
    _require_monoid_ses(e)
    X, table, n = e.middle, e.middle.tables["+"], e.middle.size
    fibers = e.q.fibers()
    out = []
    for v, fiber in enumerate(fibers):
        pool = (0,) if v == 0 else fiber
        good = []
        for xv in pool:
            hit = {table[e.k.map[u] * n + xv] for u in range(e.kernel_object.size)}
            if len(hit) == e.kernel_object.size and hit == set(fiber):
                good.append(xv)
        out.append(tuple(good))
    return tuple(out)


def is_schreier(e: ShortExactSeq) -> bool:
    """Whether every fiber of q admits a Schreier transversal."""
    return all(cands for cands in fiber_candidates(e))


def _data_from_sections(e: ShortExactSeq, section: tuple[int, ...]) -> SchreierData:
    table, n = e.middle.tables["+"], e.middle.size
    retraction = [0] * n
    for v in range(e.base.size):
        for u in range(e.kernel_object.size):
            retraction[table[e.k.map[u] * n + section[v]]] = u
    return SchreierData(section=section, retraction=tuple(retraction))


def schreier_data(e: ShortExactSeq) -> SchreierData:
    """The least witness data, fibers scanned in order, candidates ascending."""
    cands = fiber_candidates(e)
    for v, pool in enumerate(cands):
        if not pool:
            raise ValidationError(f"no Schreier transversal for the fiber over {v}")
    return _data_from_sections(e, tuple(pool[0] for pool in cands))


def all_schreier_data(e: ShortExactSeq):
    """Every valid witness, in lexicographic section order."""
    cands = fiber_candidates(e)
    if not all(cands):
        raise ValidationError("sequence is not Schreier")
    for section in itertools.product(*cands):
        yield _data_from_sections(e, section)


def check_sp_characterisation(e: ShortExactSeq, d: SchreierData) -> bool:
    """Pointwise verification of the section-retraction identities."""
    _require_monoid_ses(e)
    if len(d.section) != e.base.size or len(d.retraction) != e.middle.size:
        raise ValidationError("data shapes do not match the sequence")
    table, n = e.middle.tables["+"], e.middle.size
    s, p = d.section, d.retraction
    if s[0] != 0:
        return False
    if any(e.q.map[s[v]] != v for v in range(e.base.size)):
        return False
    if any(table[e.k.map[p[x]] * n + s[e.q.map[x]]] != x for x in range(n)):
        return False
    for u in range(e.kernel_object.size):
        for v in range(e.base.size):
            if p[table[e.k.map[u] * n + s[v]]] != u:
                return False
    return True


def schreier_retract(e: ShortExactSeq, d: SchreierData | None = None) -> RetractPair:
    """The mutually inverse maps between X and K x Q induced by the data."""
    if d is None:
        d = schreier_data(e)
    elif not check_sp_characterisation(e, d):
        raise ValidationError("data does not satisfy the Schreier identities")
    nk, nq = e.kernel_object.size, e.base.size
    table, n = e.middle.tables["+"], e.middle.size
    if n != nk * nq:
        raise ValidationError("middle carrier must biject onto K x Q")
    phi = tuple(table[e.k.map[a % nk] * n + d.section[a // nk]] for a in range(nk * nq))
    psi = tuple(d.retraction[x] + nk * e.q.map[x] for x in range(n))
    assert all(phi[psi[x]] == x for x in range(n))
    assert all(psi[x] // nk == e.q.map[x] for x in range(n))
    assert all(e.q.map[phi[a]] == a // nk for a in range(nk * nq))
    assert phi[0] == 0 and psi[0] == 0
    return RetractPair(phi=phi, psi=psi, ell=1, kernel_size=nk, base_size=nq)


def _transported_table(e: ShortExactSeq, d: SchreierData) -> tuple[int, ...]:
    """The middle operation carried onto the K x Q carrier along psi."""
    nk = e.kernel_object.size
    table, n = e.middle.tables["+"], e.middle.size
    psi = [d.retraction[x] + nk * e.q.map[x] for x in range(n)]
    inv = [0] * n
    for x, a in enumerate(psi):
        inv[a] = x
    return tuple(psi[table[inv[a] * n + inv[b]]] for a in range(n) for b in range(n))


def _encode_table(table: tuple[int, ...], nk: int, nq: int) -> bytes:
    n = nk * nq
    tables = {"0": (0,), "+": table}
    return encode_form(1, nk, nq, tuple(range(n)), tables, tuple(range(nk)))


def _form_from_table(table: tuple[int, ...], K, Q) -> CanonicalForm:
    n = K.size * Q.size
    tables = {"0": (0,), "+": table}
    form = CanonicalForm(
        ell=1,
        kernel_image=tuple(range(n)),
        tables=tables,
        kmap=tuple(range(K.size)),
        code=_encode_table(table, K.size, Q.size),
        kernel=K,
        base=Q,
        variety=monoid_variety(),
    )
    form.to_ses()  # internal consistency: the stored data is again exact
    return form


def canonical_form_schreier(
    e: ShortExactSeq, limits: Limits | None = None
) -> CanonicalForm:
    """Least normalized table over all witness data; complete invariant
    for the relabeling of a single extension."""
    limits = limits if limits is not None else default_limits()
    nk, nq = e.kernel_object.size, e.base.size
    limits.check_carrier(nk * nq, "ambient carrier")
    budget = NodeBudget(limits.max_nodes)
    best = None
    for d in all_schreier_data(e):
        budget.spend(e.middle.size)
        cand = _transported_table(e, d)
        if best is None or cand < best:
            best = cand
    assert best is not None
    return _form_from_table(best, e.kernel_object, e.base)


# ---------------------------------------------------------------------------
# enumeration on the normalized carrier


def _normalized_problem(Q: FiniteAlgebra, K: FiniteAlgebra) -> TableProblem:
    """Table search for all normalized Schreier extensions of Q by K.

    Carrier K x Q indexed u + |K| v. Prefills pin the unit row and
    column, the kernel rows (u,0) + (u',v') = (u+u', v'), and with them
    the transversal column (u,0) + (0,v) = (u,v). Every remaining cell
    branches over the kernel digit only: the base digit is forced by the
    projection being a homomorphism.
    """
    nk, nq = K.size, Q.size
    n = nk * nq
    kt, qt = K.tables["+"], Q.tables["+"]
    fixed = {}
    for u in range(nk):
        for b in range(n):
            fixed[u * n + b] = kt[u * nk + b % nk] + nk * (b // nk)
    for x in range(nk, n):
        fixed[x * n] = x
    candidates = []
    for x in range(n):
        for y in range(n):
            vq = qt[(x // nk) * nq + y // nk]
            candidates.append(tuple(u + nk * vq for u in range(nk)))
    return TableProblem(
        size=n,
        fixed=tuple(sorted(fixed.items())),
        candidates=tuple(candidates),
        associative=True,
    )


def _require_monoid_pair(Q: FiniteAlgebra, K: FiniteAlgebra) -> None:
    if variety_kind(Q.variety) != "monoids" or variety_kind(K.variety) != "monoids":
        raise UnsupportedVarietyError("Schreier enumeration needs monoid endpoints")


def ses_from_normalized_table(
    table: tuple[int, ...], Q: FiniteAlgebra, K: FiniteAlgebra
) -> ShortExactSeq:
    """Rebuild the extension a normalized table denotes."""
    n = K.size * Q.size
    X = make_algebra(monoid_variety(), n, {"0": (0,), "+": table}, check=False)
    k = make_hom(K, X, tuple(range(K.size)))
    q = make_hom(X, Q, tuple(b // K.size for b in range(n)))
    return validate_ses(k, q)


def normalized_schreier_tables(
    Q: FiniteAlgebra, K: FiniteAlgebra, limits: Limits | None = None
) -> tuple[tuple[int, ...], ...]:
    """All completed normalized tables, in search order (lexicographic)."""
    _require_monoid_pair(Q, K)
    limits = limits if limits is not None else default_limits()
    limits.check_carrier(K.size * Q.size, "middle carrier")
    out = []
    for table in collect_tables(_normalized_problem(Q, K), limits):
        e = ses_from_normalized_table(table, Q, K)
        if is_schreier(e):  # holds by construction; kept as a guard
            out.append(table)
    return tuple(out)


def _morphism_exists(
    t1: tuple[int, ...], t2: tuple[int, ...], nk: int, nq: int
) -> bool:
    """An endpoint-fixing monoid homomorphism from table t1 to table t2.

    Such a map is determined by where the transversal (0,v) goes inside
    its fiber; kernel elements and the projection are fixed, so only the
    homomorphism property needs checking.
    """
    n = nk * nq
    pairs = [(x, y) for x in range(n) for y in range(n)]
    for choice in itertools.product(range(nk), repeat=nq - 1):
        c = [0] + [u + nk * (v + 1) for v, u in enumerate(choice)]
        h = [t2[(x % nk) * n + c[x // nk]] for x in range(n)]
        if all(h[t1[x * n + y]] == t2[h[x] * n + h[y]] for x, y in pairs):
            return True
    return False


def _component_labels(
    tables: tuple[tuple[int, ...], ...], nk: int, nq: int
) -> list[int]:
    """Connected components under morphisms in either direction."""
    parent = list(range(len(tables)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(len(tables)):
        for j in range(i + 1, len(tables)):
            ri, rj = find(i), find(j)
            if ri == rj:
                continue
            if _morphism_exists(tables[i], tables[j], nk, nq) or _morphism_exists(
                tables[j], tables[i], nk, nq
            ):
                parent[max(ri, rj)] = min(ri, rj)
    return [find(i) for i in range(len(tables))]


def enumerate_schreier(
    Q: FiniteAlgebra, K: FiniteAlgebra, limits: Limits | None = None
) -> tuple[CanonicalForm, ...]:
    """One canonical form per equivalence class, sorted by code."""
    limits = limits if limits is not None else default_limits()
    tables = normalized_schreier_tables(Q, K, limits)
    labels = _component_labels(tables, K.size, Q.size)
    least: dict[int, tuple[int, ...]] = {}
    for table, root in zip(tables, labels):
        if root not in least or table < least[root]:
            least[root] = table
    forms = [_form_from_table(t, K, Q) for t in least.values()]
    forms.sort(key=lambda f: f.code)
    return tuple(forms)


def are_equivalent_schreier(
    e1: ShortExactSeq, e2: ShortExactSeq, limits: Limits | None = None
) -> bool:
    """Connectivity of the two extensions in the morphism graph."""
    if e1.kernel_object != e2.kernel_object or e1.base != e2.base:
        raise EndpointMismatchError("sequences do not share endpoint objects")
    t1 = _transported_table(e1, schreier_data(e1))
    t2 = _transported_table(e2, schreier_data(e2))
    if t1 == t2:
        return True
    K, Q = e1.kernel_object, e1.base
    tables = normalized_schreier_tables(Q, K, limits)
    labels = _component_labels(tables, K.size, Q.size)
    i1, i2 = tables.index(t1), tables.index(t2)
    return labels[i1] == labels[i2]
