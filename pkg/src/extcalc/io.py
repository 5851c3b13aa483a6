"""JSON reading and writing for algebras, maps, and diagrams.

All files are UTF-8 JSON. Schema violations (wrong shapes, out-of-range
entries, unknown names) raise ParseError; inputs that fit the schema but
fail a semantic check (equations, homomorphism property, exactness) raise
the usual validation errors from the constructing operation.

Formats:

* algebra    {"variety": name-or-presentation, "size": n,
              "tables": {op: flat row-major array}}, optional "name"
* hom        {"dom": algebra, "cod": algebra, "map": array}
* ses        {"k": hom, "q": hom}
* sequence   {"maps": [hom, ...]} listed longest subscript first
* 3x3        {"objects": 3x3 grid of algebras, "rows": [[hom, hom] x3],
              "cols": [[hom, hom] x3]}

Varieties are either a registered name ("groups", "abelian", "modules:4",
"loops", "monoids") or an inline presentation {"name", "signature",
"equations", "witness"}. Terms are integers for variables and
[opname, arg, ...] lists for operation nodes. Canonical forms and
resolutions are export-only: forms carry their code as a hex string,
resolutions their boundary matrices flattened row-major under a modulus
header.
"""

from __future__ import annotations

import json

from .algebra import FiniteAlgebra, Homomorphism, make_algebra, make_hom
from .canonical import CanonicalForm
from .errors import ExtcalcError, ParseError
from .limits import Limits, default_limits
from .longexact import ExactSequence, validate_exact_sequence
from .resolution import Resolution
from .ses import ShortExactSeq, validate_ses
from .terms import SemiAbelianWitness, Signature, Term, VarietyPresentation, tapp, tvar
from .threebythree import ThreeByThree, make_3x3
from .varieties import variety_by_name


def dumps(obj) -> str:
    """Canonical text rendering: sorted keys, two-space indent."""
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def load_json(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as err:
        raise ParseError(f"cannot read {path}: {err}")
    except json.JSONDecodeError as err:
        raise ParseError(f"{path} is not valid JSON: {err}")


def _expect_object(data, what: str, keys: set[str], optional: set[str] = frozenset()):
    if not isinstance(data, dict):
        raise ParseError(f"{what} must be a JSON object")
    missing = keys - set(data)
    extra = set(data) - keys - optional
    if missing or extra:
        raise ParseError(
            f"{what} needs keys {sorted(keys)}"
            + (f", missing {sorted(missing)}" if missing else "")
            + (f", unexpected {sorted(extra)}" if extra else "")
        )


def _int_array(data, what: str) -> tuple[int, ...]:
    if not isinstance(data, list) or not all(
        isinstance(v, int) and not isinstance(v, bool) for v in data
    ):
        raise ParseError(f"{what} must be an array of integers")
    return tuple(data)


# ---------------------------------------------------------------------------
# terms and varieties


def term_to_json(t: Term):
    if t.is_var:
        return t.index
    return [t.op] + [term_to_json(a) for a in t.args]


def term_from_json(data) -> Term:
    if isinstance(data, int) and not isinstance(data, bool):
        if data < 0:
            raise ParseError(f"variable index {data} is negative")
        return tvar(data)
    if isinstance(data, list) and data and isinstance(data[0], str):
        return tapp(data[0], *(term_from_json(a) for a in data[1:]))
    raise ParseError(f"bad term {data!r}: want an integer or [opname, args...]")


def witness_to_json(w: SemiAbelianWitness | None):
    if w is None:
        return None
    return {
        "ell": w.ell,
        "alphas": [term_to_json(a) for a in w.alphas],
        "beta": term_to_json(w.beta),
    }


def witness_from_json(data) -> SemiAbelianWitness | None:
    if data is None:
        return None
    _expect_object(data, "witness", {"ell", "alphas", "beta"})
    if not isinstance(data["alphas"], list):
        raise ParseError("witness alphas must be an array of terms")
    try:
        return SemiAbelianWitness(
            ell=data["ell"],
            alphas=tuple(term_from_json(a) for a in data["alphas"]),
            beta=term_from_json(data["beta"]),
        )
    except ExtcalcError as err:
        raise ParseError(f"bad witness: {err}")


def variety_to_json(v: VarietyPresentation):
    try:
        if variety_by_name(v.name) == v:
            return v.name
    except ParseError:
        pass
    return {
        "name": v.name,
        "signature": [[name, arity] for name, arity in v.signature.ops],
        "equations": [
            [term_to_json(lhs), term_to_json(rhs)] for lhs, rhs in v.equations
        ],
        "witness": witness_to_json(v.witness),
    }


def variety_from_json(data) -> VarietyPresentation:
    if isinstance(data, str):
        return variety_by_name(data)
    _expect_object(data, "variety", {"name", "signature", "equations"}, {"witness"})
    if not isinstance(data["name"], str):
        raise ParseError("variety name must be a string")
    sig = data["signature"]
    if not isinstance(sig, list) or not all(
        isinstance(p, list) and len(p) == 2 and isinstance(p[0], str) for p in sig
    ):
        raise ParseError("variety signature must be an array of [opname, arity] pairs")
    eqs = data["equations"]
    if not isinstance(eqs, list) or not all(
        isinstance(p, list) and len(p) == 2 for p in eqs
    ):
        raise ParseError("variety equations must be an array of [lhs, rhs] pairs")
    try:
        return VarietyPresentation(
            name=data["name"],
            signature=Signature(tuple((name, arity) for name, arity in sig)),
            equations=tuple(
                (term_from_json(lhs), term_from_json(rhs)) for lhs, rhs in eqs
            ),
            witness=witness_from_json(data.get("witness")),
        )
    except ParseError:
        raise
    except ExtcalcError as err:
        # ill-formed presentation data is a schema problem, not a semantic one
        raise ParseError(f"bad variety presentation: {err}")


# ---------------------------------------------------------------------------
# algebras and homomorphisms


def algebra_to_json(a: FiniteAlgebra) -> dict:
    out = {
        "variety": variety_to_json(a.variety),
        "size": a.size,
        "tables": {name: list(table) for name, table in sorted(a.tables.items())},
    }
    if a.name:
        out["name"] = a.name
    return out


def algebra_from_json(data, limits: Limits | None = None) -> FiniteAlgebra:
    limits = limits if limits is not None else default_limits()
    _expect_object(data, "algebra", {"variety", "size", "tables"}, {"name"})
    variety = variety_from_json(data["variety"])
    size = data["size"]
    if not isinstance(size, int) or isinstance(size, bool) or size < 1:
        raise ParseError("algebra size must be a positive integer")
    limits.check_carrier(size, "algebra carrier")
    tables = data["tables"]
    if not isinstance(tables, dict):
        raise ParseError("algebra tables must be an object keyed by operation name")
    declared = dict(variety.signature.ops)
    if set(tables) != set(declared):
        raise ParseError(
            f"tables {sorted(tables)} do not match signature {sorted(declared)}"
        )
    parsed = {}
    for name, flat in tables.items():
        values = _int_array(flat, f"table {name!r}")
        if len(values) != size ** declared[name]:
            raise ParseError(
                f"table {name!r} has {len(values)} entries, "
                f"want {size ** declared[name]}"
            )
        if any(not 0 <= v < size for v in values):
            raise ParseError(f"table {name!r} has entries outside the carrier")
        parsed[name] = values
    name = data.get("name", "")
    if not isinstance(name, str):
        raise ParseError("algebra name must be a string")
    return make_algebra(variety, size, parsed, name=name)


def hom_to_json(h: Homomorphism) -> dict:
    return {
        "dom": algebra_to_json(h.dom),
        "cod": algebra_to_json(h.cod),
        "map": list(h.map),
    }


def hom_from_json(data, limits: Limits | None = None) -> Homomorphism:
    _expect_object(data, "homomorphism", {"dom", "cod", "map"})
    dom = algebra_from_json(data["dom"], limits)
    cod = algebra_from_json(data["cod"], limits)
    mapping = _int_array(data["map"], "homomorphism map")
    if len(mapping) != dom.size:
        raise ParseError(
            f"homomorphism map has {len(mapping)} entries, want {dom.size}"
        )
    if any(not 0 <= v < cod.size for v in mapping):
        raise ParseError("homomorphism map has entries outside the codomain")
    return make_hom(dom, cod, mapping)


# ---------------------------------------------------------------------------
# diagrams


def ses_to_json(e: ShortExactSeq) -> dict:
    return {"k": hom_to_json(e.k), "q": hom_to_json(e.q)}


def ses_from_json(data, limits: Limits | None = None) -> ShortExactSeq:
    _expect_object(data, "short exact sequence", {"k", "q"})
    return validate_ses(
        hom_from_json(data["k"], limits), hom_from_json(data["q"], limits)
    )


def sequence_to_json(e: ExactSequence) -> dict:
    return {"maps": [hom_to_json(h) for h in e.maps]}


def sequence_from_json(data, limits: Limits | None = None) -> ExactSequence:
    _expect_object(data, "exact sequence", {"maps"})
    if not isinstance(data["maps"], list):
        raise ParseError("exact sequence maps must be an array of homomorphisms")
    return validate_exact_sequence(
        tuple(hom_from_json(h, limits) for h in data["maps"])
    )


def threebythree_to_json(d: ThreeByThree) -> dict:
    return {
        "objects": [
            [algebra_to_json(d.object_at(i, j)) for j in range(3)] for i in range(3)
        ],
        "rows": [[hom_to_json(a), hom_to_json(b)] for a, b in d.rows],
        "cols": [[hom_to_json(a), hom_to_json(b)] for a, b in d.cols],
    }


def _hom_grid(data, what: str, limits: Limits | None):
    if not isinstance(data, list) or len(data) != 3 or not all(
        isinstance(p, list) and len(p) == 2 for p in data
    ):
        raise ParseError(f"{what} must be a 3-array of [hom, hom] pairs")
    return tuple(
        (hom_from_json(a, limits), hom_from_json(b, limits)) for a, b in data
    )


def threebythree_from_json(data, limits: Limits | None = None) -> ThreeByThree:
    _expect_object(data, "3x3 diagram", {"objects", "rows", "cols"})
    rows = _hom_grid(data["rows"], "3x3 rows", limits)
    cols = _hom_grid(data["cols"], "3x3 cols", limits)
    d = make_3x3(rows, cols)
    grid = data["objects"]
    if not isinstance(grid, list) or len(grid) != 3 or not all(
        isinstance(r, list) and len(r) == 3 for r in grid
    ):
        raise ParseError("3x3 objects must be a 3x3 grid of algebras")
    for i in range(3):
        for j in range(3):
            if algebra_from_json(grid[i][j], limits) != d.object_at(i, j):
                raise ParseError(
                    f"3x3 object at ({i},{j}) differs from the maps' endpoints"
                )
    return d


# ---------------------------------------------------------------------------
# export-only structures


def form_to_json(form: CanonicalForm) -> dict:
    return {
        "ell": form.ell,
        "subset": list(form.kernel_image),
        "tables": {name: list(t) for name, t in sorted(form.tables.items())},
        "kmap": list(form.kmap),
        "code": form.code.hex(),
    }


def resolution_to_json(res: Resolution) -> dict:
    return {
        "modulus": res.modulus,
        "ranks": list(res.ranks),
        "boundaries": [
            [entry for row in matrix for entry in row] for matrix in res.matrices
        ],
    }


# ---------------------------------------------------------------------------
# file-level helpers


def read_algebra(path: str, limits: Limits | None = None) -> FiniteAlgebra:
    return algebra_from_json(load_json(path), limits)


def read_hom(path: str, limits: Limits | None = None) -> Homomorphism:
    return hom_from_json(load_json(path), limits)


def read_ses(path: str, limits: Limits | None = None) -> ShortExactSeq:
    return ses_from_json(load_json(path), limits)


def read_sequence(path: str, limits: Limits | None = None) -> ExactSequence:
    return sequence_from_json(load_json(path), limits)


def read_3x3(path: str, limits: Limits | None = None) -> ThreeByThree:
    return threebythree_from_json(load_json(path), limits)
