"""Batch command line front end.

Every verb is a thin wrapper over one package operation: parse the input
files, call the operation with the assembled limits, and print one
deterministic report. Reports are JSON by default (sorted keys) or a flat
``--format table`` rendering; either way the bytes depend only on the
inputs and limits, never on worker count or timing. Timing goes to
stderr. Exit statuses: 0 success, 2 parse error, 3 validation failure,
4 limits exceeded.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from dataclasses import dataclass, field, replace
from typing import Mapping

from .canonical import are_equivalent, canonical_form
from .enumext import enumerate_ext1
from .errors import ExtcalcError, LimitExceededError, ParseError
from .io import (
    dumps,
    form_to_json,
    read_3x3,
    read_algebra,
    read_hom,
    read_sequence,
    read_ses,
    resolution_to_json,
    sequence_to_json,
    ses_to_json,
)
from .limits import Limits, parse_limits
from .longexact import splice
from .resolution import build_resolution, ext_via_resolution
from .schreier import (
    are_equivalent_schreier,
    canonical_form_schreier,
    enumerate_schreier,
    fiber_candidates,
    is_schreier,
    schreier_data,
    schreier_retract,
)
from .ses import is_central, pullback_ses
from .syzygy import classify_extn, pullback_reduce, syzygy, syzygy_ses
from .threebythree import (
    decompose_3x3,
    double_syzygy,
    is_regular_pushout,
    reduce_2ext,
    validate_3x3,
)
from .varieties import module_variety, named_algebra, variety_by_name

ENV_LIMITS = "EXTCALC_LIMITS"


@dataclass(frozen=True)
class Job:
    """One command invocation: verb path, file references, limits, target."""

    command: tuple[str, str]
    files: tuple[str, ...] = ()
    options: Mapping = field(default_factory=dict)
    limits: Limits = field(default_factory=Limits)
    fmt: str = "json"
    out: str | None = None


# ---------------------------------------------------------------------------
# shared helpers


def _resolve_algebra(label: str, variety, limits: Limits):
    """A named catalog algebra, or a file when the label looks like a path."""
    if os.sep in label or label.endswith(".json"):
        return read_algebra(label, limits)
    return named_algebra(label, variety)


def _option_variety(job: Job):
    ring = job.options.get("ring")
    if ring is not None:
        return module_variety(ring)
    return variety_by_name(job.options.get("variety") or "groups")


def _endpoint_pair(job: Job, variety):
    K = _resolve_algebra(job.options["K"], variety, job.limits)
    Q = _resolve_algebra(job.options["Q"], variety, job.limits)
    return K, Q


def _codes_report(forms, noun: str = "classes") -> dict:
    return {
        "count": len(forms),
        "codes": [f.code.hex() for f in forms],
        "summary": f"{len(forms)} {noun}",
    }


# ---------------------------------------------------------------------------
# verb handlers; each returns (report dict, exit status)


def _algebra_validate(job: Job):
    a = read_algebra(job.files[0], job.limits)
    return {
        "valid": True,
        "size": a.size,
        "variety": a.variety.name,
        "operations": sorted(a.tables),
        "summary": f"valid {a.variety.name} algebra of size {a.size}",
    }, 0


def _ses_validate(job: Job):
    e = read_ses(job.files[0], job.limits)
    sizes = (e.kernel_object.size, e.middle.size, e.base.size)
    return {
        "valid": True,
        "sizes": list(sizes),
        "summary": "exact with sizes {} -> {} -> {}".format(*sizes),
    }, 0


def _ses_canon(job: Job):
    form = canonical_form(read_ses(job.files[0], job.limits), limits=job.limits)
    return {
        "form": form_to_json(form),
        "summary": f"code {form.code.hex()}",
    }, 0


def _ses_equiv(job: Job):
    e1 = read_ses(job.files[0], job.limits)
    e2 = read_ses(job.files[1], job.limits)
    flag = are_equivalent(e1, e2, limits=job.limits)
    return {
        "equivalent": flag,
        "summary": "equivalent" if flag else "inequivalent",
    }, 0


def _ses_enum(job: Job):
    K, Q = _endpoint_pair(job, _option_variety(job))
    return _codes_report(enumerate_ext1(Q, K, limits=job.limits)), 0


def _ses_central(job: Job):
    flag = is_central(read_ses(job.files[0], job.limits))
    return {"central": flag, "summary": "central" if flag else "not central"}, 0


def _ses_pullback(job: Job):
    e = read_ses(job.files[0], job.limits)
    eta = read_hom(job.files[1], job.limits)
    pulled = pullback_ses(e, eta)
    return {
        "ses": ses_to_json(pulled),
        "summary": f"pullback middle size {pulled.middle.size}",
    }, 0


def _ext_validate(job: Job):
    e = read_sequence(job.files[0], job.limits)
    return {
        "valid": True,
        "length": e.n,
        "summary": f"exact sequence of length {e.n}",
    }, 0


def _ext_splice(job: Job):
    a = read_sequence(job.files[0], job.limits)
    b = read_sequence(job.files[1], job.limits)
    joined = splice(a, b)
    return {
        "sequence": sequence_to_json(joined),
        "length": joined.n,
        "summary": f"spliced to length {joined.n}",
    }, 0


def _ext_syzygy(job: Job):
    Q = _resolve_algebra(job.options["Q"], _option_variety(job), job.limits)
    s = syzygy(Q)
    return {
        "ses": ses_to_json(syzygy_ses(s)),
        "free_rank": len(s.generators),
        "summary": f"free presentation of rank {len(s.generators)}",
    }, 0


def _ext_reduce(job: Job):
    e = read_sequence(job.files[0], job.limits)
    reduced = pullback_reduce(e, syzygy(e.base))
    return {
        "sequence": sequence_to_json(reduced),
        "length": reduced.n,
        "summary": f"reduced to length {reduced.n}",
    }, 0


def _ext_classes(job: Job):
    K, Q = _endpoint_pair(job, _option_variety(job))
    result = classify_extn(Q, K, job.options["n"], limits=job.limits)
    report = {
        "classes": len(result),
        "complete": result.complete,
        "summary": f"{len(result)} classes",
    }
    if result.class_keys is not None:
        report["class_keys"] = [list(key) for key in result.class_keys]
    return report, 0


def _ext_oracle(job: Job):
    K, Q = _endpoint_pair(job, _option_variety(job))
    n = job.options["n"]
    res = build_resolution(Q, depth=n + 1)
    order, reps = ext_via_resolution(Q, K, n, resolution=res)
    return {
        "order": order,
        "representatives": [list(r) for r in reps],
        "resolution": resolution_to_json(res),
        "summary": f"Ext^{n} order {order}",
    }, 0


def _threebythree_validate(job: Job):
    failures = validate_3x3(read_3x3(job.files[0], job.limits))
    if failures:
        return {
            "valid": False,
            "failures": list(failures),
            "summary": f"{len(failures)} exactness/commutativity failures",
        }, 3
    return {"valid": True, "failures": [], "summary": "valid 3x3 diagram"}, 0


def _threebythree_pushout(job: Job):
    flag = is_regular_pushout(read_3x3(job.files[0], job.limits))
    return {
        "regular_pushout": flag,
        "summary": "regular pushout" if flag else "not a regular pushout",
    }, 0


def _threebythree_decompose(job: Job):
    dec = decompose_3x3(read_3x3(job.files[0], job.limits))
    return {
        "bottom": ses_to_json(dec.bottom),
        "right": ses_to_json(dec.right),
        "middle": ses_to_json(dec.middle),
        "pullback_size": dec.pb.algebra.size,
        "summary": f"decomposed over a pullback of size {dec.pb.algebra.size}",
    }, 0


def _threebythree_reduce(job: Job):
    d = read_3x3(job.files[0], job.limits)
    e = reduce_2ext(d, double_syzygy(d.object_at(2, 2)))
    return {
        "ses": ses_to_json(e),
        "summary": f"reduced to a one-step extension with middle size {e.middle.size}",
    }, 0


def _schreier_check(job: Job):
    e = read_ses(job.files[0], job.limits)
    cands = fiber_candidates(e)
    flag = is_schreier(e)
    return {
        "schreier": flag,
        "fiber_candidates": [list(pool) for pool in cands],
        "summary": "Schreier" if flag else "not Schreier",
    }, 0


def _schreier_maps(job: Job):
    e = read_ses(job.files[0], job.limits)
    d = schreier_data(e)
    r = schreier_retract(e, d)
    return {
        "section": list(d.section),
        "retraction": list(d.retraction),
        "phi": list(r.phi),
        "psi": list(r.psi),
        "summary": f"middle factors as K x Q with |K|={r.kernel_size}, |Q|={r.base_size}",
    }, 0


def _schreier_canon(job: Job):
    form = canonical_form_schreier(read_ses(job.files[0], job.limits), job.limits)
    return {
        "form": form_to_json(form),
        "summary": f"code {form.code.hex()}",
    }, 0


def _schreier_enum(job: Job):
    K, Q = _endpoint_pair(job, variety_by_name("monoids"))
    return _codes_report(enumerate_schreier(Q, K, job.limits)), 0


def _schreier_equiv(job: Job):
    e1 = read_ses(job.files[0], job.limits)
    e2 = read_ses(job.files[1], job.limits)
    flag = are_equivalent_schreier(e1, e2, job.limits)
    return {
        "equivalent": flag,
        "summary": "equivalent" if flag else "inequivalent",
    }, 0


_HANDLERS = {
    ("algebra", "validate"): _algebra_validate,
    ("ses", "validate"): _ses_validate,
    ("ses", "canon"): _ses_canon,
    ("ses", "equiv"): _ses_equiv,
    ("ses", "enum"): _ses_enum,
    ("ses", "central"): _ses_central,
    ("ses", "pullback"): _ses_pullback,
    ("ext", "validate"): _ext_validate,
    ("ext", "splice"): _ext_splice,
    ("ext", "syzygy"): _ext_syzygy,
    ("ext", "reduce"): _ext_reduce,
    ("ext", "classes"): _ext_classes,
    ("ext", "oracle"): _ext_oracle,
    ("threebythree", "validate"): _threebythree_validate,
    ("threebythree", "pushout"): _threebythree_pushout,
    ("threebythree", "decompose"): _threebythree_decompose,
    ("threebythree", "reduce"): _threebythree_reduce,
    ("schreier", "check"): _schreier_check,
    ("schreier", "maps"): _schreier_maps,
    ("schreier", "canon"): _schreier_canon,
    ("schreier", "enum"): _schreier_enum,
    ("schreier", "equiv"): _schreier_equiv,
}


# ---------------------------------------------------------------------------
# running a job


def _status_of(err: ExtcalcError) -> int:
    if isinstance(err, ParseError):
        return 2
    if isinstance(err, LimitExceededError):
        return 4
    return 3


def run(job: Job) -> tuple[int, dict]:
    """Execute one job; returns (exit status, report)."""
    name = ".".join(job.command)
    try:
        report, status = _HANDLERS[job.command](job)
    except ExtcalcError as err:
        status = _status_of(err)
        report = {
            "error": str(err),
            "error_kind": type(err).__name__,
            "summary": f"error: {err}",
        }
    report = {"command": name, **report}
    if job.options.get("seed") is not None:
        report["seed"] = job.options["seed"]
    return status, report


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return dumps(report)
    lines = []
    _table_lines(report, "", lines)
    return "\n".join(lines) + "\n"


def _table_lines(value, prefix: str, out: list[str]) -> None:
    if isinstance(value, dict):
        for key in sorted(value):
            _table_lines(value[key], f"{prefix}{key}." if prefix else f"{key}.", out)
    elif isinstance(value, list):
        if all(isinstance(v, (int, str, bool)) for v in value):
            joined = " ".join(str(v) for v in value)
            out.append(f"{prefix.rstrip('.')}: {joined}")
        else:
            for i, v in enumerate(value):
                _table_lines(v, f"{prefix}{i}.", out)
    else:
        out.append(f"{prefix.rstrip('.')}: {value}")


# ---------------------------------------------------------------------------
# argument parsing


def _positive(text: str) -> int:
    value = int(text)
    if value <= 0:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def _common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--limits-carrier", type=_positive, metavar="N")
    parser.add_argument("--limits-nodes", type=_positive, metavar="N")
    parser.add_argument("--workers", type=_positive, metavar="N")
    parser.add_argument("--format", choices=("json", "table"), default="json")
    parser.add_argument("--seed", type=int, metavar="N")
    parser.add_argument("--out", metavar="FILE")


def _endpoint_flags(parser: argparse.ArgumentParser, ring: bool) -> None:
    parser.add_argument("--K", required=True, metavar="NAME")
    parser.add_argument("--Q", required=True, metavar="NAME")
    if ring:
        parser.add_argument("--ring", type=_positive, metavar="M")
        parser.add_argument("--variety", metavar="NAME")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="extcalc",
        description="Deterministic batch reports over extension-theory inputs.",
    )
    groups = parser.add_subparsers(dest="group", required=True)

    def leaf(group, verb: str, files: int, names: str = "FILE"):
        sub = group.add_parser(verb)
        for i in range(files):
            sub.add_argument(f"file{i}", metavar=names)
        _common_flags(sub)
        return sub

    algebra = groups.add_parser("algebra").add_subparsers(dest="verb", required=True)
    leaf(algebra, "validate", 1)

    ses = groups.add_parser("ses").add_subparsers(dest="verb", required=True)
    leaf(ses, "validate", 1)
    leaf(ses, "canon", 1)
    leaf(ses, "equiv", 2)
    enum = leaf(ses, "enum", 0)
    _endpoint_flags(enum, ring=False)
    enum.add_argument("--variety", metavar="NAME")
    leaf(ses, "central", 1)
    leaf(ses, "pullback", 2)

    ext = groups.add_parser("ext").add_subparsers(dest="verb", required=True)
    leaf(ext, "validate", 1)
    leaf(ext, "splice", 2)
    syz = leaf(ext, "syzygy", 0)
    syz.add_argument("--Q", required=True, metavar="NAME")
    syz.add_argument("--ring", type=_positive, required=True, metavar="M")
    leaf(ext, "reduce", 1)
    classes = leaf(ext, "classes", 0)
    _endpoint_flags(classes, ring=True)
    classes.add_argument("--n", type=_positive, required=True)
    oracle = leaf(ext, "oracle", 0)
    _endpoint_flags(oracle, ring=True)
    oracle.add_argument("--n", type=_positive, required=True)

    tbt = groups.add_parser("threebythree").add_subparsers(dest="verb", required=True)
    leaf(tbt, "validate", 1)
    leaf(tbt, "pushout", 1)
    leaf(tbt, "decompose", 1)
    leaf(tbt, "reduce", 1)

    schreier = groups.add_parser("schreier").add_subparsers(dest="verb", required=True)
    leaf(schreier, "check", 1)
    leaf(schreier, "maps", 1)
    leaf(schreier, "canon", 1)
    senum = leaf(schreier, "enum", 0)
    _endpoint_flags(senum, ring=False)
    leaf(schreier, "equiv", 2)

    return parser


def _job_limits(args: argparse.Namespace) -> Limits:
    limits = parse_limits(os.environ.get(ENV_LIMITS, ""), Limits())
    if args.limits_carrier is not None:
        limits = replace(limits, max_carrier=args.limits_carrier)
    if args.limits_nodes is not None:
        limits = replace(limits, max_nodes=args.limits_nodes)
    if args.workers is not None:
        limits = replace(limits, workers=args.workers)
    return limits


def job_from_args(args: argparse.Namespace) -> Job:
    files = []
    for i in range(3):
        value = getattr(args, f"file{i}", None)
        if value is not None:
            files.append(value)
    options = {}
    for key in ("K", "Q", "ring", "variety", "n", "seed"):
        value = getattr(args, key, None)
        if value is not None:
            options[key] = value
    return Job(
        command=(args.group, args.verb),
        files=tuple(files),
        options=options,
        limits=_job_limits(args),
        fmt=args.format,
        out=args.out,
    )


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        job = job_from_args(args)
    except ParseError as err:
        # bad EXTCALC_LIMITS or malformed flag values surface before dispatch
        print(f"error: {err}", file=sys.stderr)
        return 2
    started = time.perf_counter()
    status, report = run(job)
    text = render(report, job.fmt)
    elapsed_ms = (time.perf_counter() - started) * 1000.0
    if job.out:
        try:
            with open(job.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as err:
            print(f"error: cannot write {job.out}: {err}", file=sys.stderr)
            return 2
    else:
        sys.stdout.write(text)
    print(f"timing: {'.'.join(job.command)} {elapsed_ms:.1f} ms", file=sys.stderr)
    return status


if __name__ == "__main__":
    raise SystemExit(main())
