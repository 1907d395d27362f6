"""
Command-line front end.

    python cli.py check table.txt --property quasi-affine
    python cli.py construct ext --group 2 --f 1 --d 0,1
    python cli.py iso a.txt b.txt --method auto
    python cli.py enumerate 12 --filter affine --format csv
    python cli.py epsilon --group 2,2 --f id --k 3

Results go to stdout as JSON (sorted keys); logging goes to stderr.
Exit codes: 0 holds / isomorphic, 1 does not hold, 2 input error, 3 guard exceeded.
"""
import argparse
import csv
import io
import json
import logging
import sys
import zipfile
from pathlib import Path

import numpy as np

from abelian import FiniteAbelianGroup, GroupMap
from constructions import (
    ExtensionDescriptor,
    affine_quandle,
    coerce_map,
    extension_representation,
    projection_quandle,
    semiregular_extension,
)
from core import (
    DecomposableExtension,
    GuardExceeded,
    InputError,
    NotRepresentable,
    QuandleError,
    QuandleFileError,
    resolve_guards,
)
from enumeration import enumerate_quasi_affine, epsilon
from isomorphism import ext_isomorphic
from quandle_core import brute_force_isomorphism, direct_product, validate
from recognition import PROPERTIES, check, jsonable

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_NO, EXIT_INPUT, EXIT_GUARD = 0, 1, 2, 3


def parse_quandle_file(text):
    """Header line n, then n rows of n integers; '#' lines are comments."""
    if text and not text.endswith("\n"):
        raise QuandleFileError("file must end with a newline")
    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        rows.append((lineno, stripped))
    if not rows:
        raise QuandleFileError("missing header line with the order n")
    header_line, header = rows[0]
    try:
        n = int(header)
    except ValueError:
        raise QuandleFileError(f"header must be an integer, got {header!r}", header_line)
    if n < 1:
        raise QuandleFileError("order must be at least 1", header_line)
    body = rows[1:]
    if len(body) != n:
        raise QuandleFileError(f"expected {n} rows, found {len(body)}", body[-1][0] if body else header_line)
    table = []
    for lineno, line in body:
        try:
            values = [int(v) for v in line.split()]
        except ValueError:
            raise QuandleFileError("row contains a non-integer entry", lineno)
        if len(values) != n:
            raise QuandleFileError(f"expected {n} entries, found {len(values)}", lineno)
        table.append(values)
    result = validate(np.array(table, dtype=np.int64))
    if isinstance(result, list):
        first = result[0]
        line = body[first.cells[0]][0] if first.cells else None
        raise QuandleFileError(str(first), line)
    return result


def format_quandle_file(q):
    lines = [str(q.n)] + [" ".join(str(int(v)) for v in row) for row in q.table]
    return "\n".join(lines) + "\n"


def read_quandle(path):
    try:
        text = Path(path).read_text()
    except OSError as err:
        raise InputError(f"cannot read {path}: {err.strerror}")
    return parse_quandle_file(text)


def pack_zip(tables):
    """Zip named quandle tables into a BytesIO object."""
    zip_buffer = io.BytesIO()
    with zipfile.ZipFile(zip_buffer, "w", zipfile.ZIP_DEFLATED) as zf:
        for name, q in tables.items():
            zf.writestr(name, format_quandle_file(q))
    zip_buffer.seek(0)
    return zip_buffer


def parse_group(text):
    try:
        return FiniteAbelianGroup([int(m) for m in text.split(",") if m.strip()])
    except ValueError:
        raise InputError(f"cannot read group {text!r}; expected moduli like 2,2")


def parse_map(group, text):
    """'id', a single integer (scalar), or matrix rows separated by ';'."""
    text = text.strip()
    try:
        if text == "id":
            return coerce_map(group, "id")
        if ";" not in text and "," not in text:
            return coerce_map(group, int(text))
        rows = [[int(v) for v in row.split(",")] for row in text.split(";")]
        return GroupMap(group, group, rows)
    except ValueError as err:
        raise InputError(f"cannot read map {text!r}: {err}")


def parse_elements(group, text):
    """Comma-separated elements, coordinates separated by ':'."""
    out = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        try:
            out.append(group.normalize([int(v) for v in item.split(":")]))
        except (ValueError, QuandleError):
            raise InputError(f"cannot read element {item!r} of {group}")
    return out


def emit(payload):
    print(json.dumps(jsonable(payload), sort_keys=True))


def cmd_check(args):
    try:
        q = read_quandle(args.file)
    except QuandleFileError as err:
        if args.property == "valid":
            emit({"ok": True, "property": "valid", "verdict": False, "reason": "Invalid", "witness": str(err), "line": err.line})
            return EXIT_NO
        raise
    report = check(q, args.property)
    emit({"ok": True, "property": args.property, "order": q.n, **report.to_dict()})
    return EXIT_OK if report.verdict else EXIT_NO


def cmd_construct(args):
    if args.kind == "proj":
        if args.k is None:
            raise InputError("proj needs --k")
        q = projection_quandle(args.k)
    elif args.kind == "product":
        if len(args.files) != 2:
            raise InputError("product needs exactly two table files")
        q = direct_product(read_quandle(args.files[0]), read_quandle(args.files[1]))
    else:
        if args.group is None or args.f is None:
            raise InputError(f"{args.kind} needs --group and --f")
        group = parse_group(args.group)
        f = parse_map(group, args.f)
        if args.kind == "aff":
            q = affine_quandle(group, f).quandle
        else:
            if args.d is None:
                raise InputError("ext needs --d")
            q = semiregular_extension(ExtensionDescriptor(group, f, tuple(parse_elements(group, args.d)))).quandle
    text = format_quandle_file(q)
    if args.out:
        Path(args.out).write_text(text)
        logger.info("wrote order-%d table to %s", q.n, args.out)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _extension_iso(q1, q2):
    rep1 = extension_representation(q1)
    rep2 = extension_representation(q2)
    witness = ext_isomorphic(rep1.descriptor, rep2.descriptor)
    if witness is None:
        return None
    into1 = rep1.inverse_mapping()
    across = witness.table_map()
    return [int(rep2.mapping[across[into1[x]]]) for x in range(q1.n)]


def cmd_iso(args):
    q1, q2 = read_quandle(args.file1), read_quandle(args.file2)
    method = args.method
    mapping = None
    if method in ("auto", "extension"):
        try:
            mapping = _extension_iso(q1, q2) if q1.n == q2.n else None
            method = "extension"
        except (NotRepresentable, DecomposableExtension) as err:
            if args.method == "extension":
                raise InputError(f"extension method needs quasi-affine inputs: {err}")
            method = "brute"
    if method == "brute":
        mapping = brute_force_isomorphism(q1, q2)
    emit({"ok": True, "isomorphic": mapping is not None, "method": method, "map": mapping})
    return EXIT_OK if mapping is not None else EXIT_NO


def cmd_enumerate(args):
    result = enumerate_quasi_affine(args.n, jobs=args.jobs)
    kind = args.filter
    breakdown = result.breakdown(kind)
    if args.emit_tables:
        out_dir = Path(args.emit_tables)
        out_dir.mkdir(parents=True, exist_ok=True)
        for idx, cls in enumerate(result.classes(kind)):
            table = semiregular_extension(cls.descriptor).quandle
            (out_dir / f"quandle_{args.n}_{idx:03d}.txt").write_text(format_quandle_file(table))
    if args.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["k", kind])
        for k, count in breakdown.items():
            writer.writerow([k, count])
        writer.writerow(["total", sum(breakdown.values())])
        sys.stdout.write(buf.getvalue())
    else:
        emit({
            "ok": True,
            "n": args.n,
            "filter": kind,
            "total": sum(breakdown.values()),
            "breakdown": {str(k): v for k, v in breakdown.items()},
            "cells": [c.to_dict() for c in result.cells],
        })
    return EXIT_OK


def cmd_epsilon(args):
    group = parse_group(args.group)
    f = parse_map(group, args.f)
    count = epsilon(group, f, args.k)
    emit({"ok": True, "group": list(group.moduli), "f": f.matrix.tolist(), "k": args.k, "epsilon": count})
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="quandles", description="Finite quandle toolkit")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for progress, -vv for debug")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="Test a property of a quandle table")
    p.add_argument("file")
    p.add_argument("--property", choices=sorted(PROPERTIES), default="valid")
    p.set_defaults(handler=cmd_check)

    p = sub.add_parser("construct", help="Build a quandle table")
    p.add_argument("kind", choices=["aff", "ext", "proj", "product"])
    p.add_argument("files", nargs="*", help="two table files for product")
    p.add_argument("--group", help="invariant factors, e.g. 2,2")
    p.add_argument("--f", help="'id', a unit for cyclic groups, or matrix rows like 1,1;0,1")
    p.add_argument("--d", help="elements, e.g. 0,1 or 0:1,1:0")
    p.add_argument("--k", type=int)
    p.add_argument("--out")
    p.set_defaults(handler=cmd_construct)

    p = sub.add_parser("iso", help="Decide isomorphism of two tables")
    p.add_argument("file1")
    p.add_argument("file2")
    p.add_argument("--method", choices=["auto", "brute", "extension"], default="auto")
    p.set_defaults(handler=cmd_iso)

    p = sub.add_parser("enumerate", help="Count quasi-affine quandles of order n")
    p.add_argument("n", type=int)
    p.add_argument("--filter", choices=["quasi-affine", "affine", "latin"], default="quasi-affine")
    p.add_argument("--emit-tables", metavar="DIR")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(handler=cmd_enumerate)

    p = sub.add_parser("epsilon", help="Count extensions over (A, f) with k fibres")
    p.add_argument("--group", required=True)
    p.add_argument("--f", required=True)
    p.add_argument("--k", type=int, required=True)
    p.set_defaults(handler=cmd_epsilon)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    level = {0: logging.WARNING, 1: logging.INFO}.get(args.verbose, logging.DEBUG)
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    try:
        resolve_guards()
        return args.handler(args)
    except GuardExceeded as err:
        emit({"ok": False, "error": str(err), "guard": err.guard})
        return EXIT_GUARD
    except QuandleFileError as err:
        emit({"ok": False, "error": str(err), "line": err.line})
        return EXIT_INPUT
    except (QuandleError, ValueError, OSError) as err:
        emit({"ok": False, "error": str(err)})
        return EXIT_INPUT


if __name__ == "__main__":
    raise SystemExit(main())
