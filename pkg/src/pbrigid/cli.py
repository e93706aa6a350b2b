"""Command-line front end: ``pbrigid classify|verify|homogenize|search|batch``.

Exit codes: 0 success or any verdict, 1 a map failed verification (or a
homogenized candidate did), 2 bad input.
"""

from __future__ import annotations

import argparse
import json
import sys
from itertools import product
from pathlib import Path
from typing import Sequence

from .classify import classify
from .coeffs import FieldError, make_field
from .expmap import ExpMapError, verify, verify_extended
from .formats import FormatError, dumps, map_from_dict, map_to_dict, ring_from_dict
from .grading import CandidateVerificationFailed, GradingError, homogenize_map
from .ring import InvalidRelation, InvalidTuple, make_pham_brieskorn
from .search import SearchBounds, SearchError, enumerate_maps, search_size

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INPUT = 2

DEFAULT_MAX_ROWS = 10**6
TSV_COLUMNS = ("tuple", "char", "traits", "status", "rule")


class InputError(Exception):
    pass


def _parse_ints(text: str, what: str) -> list[int]:
    try:
        out = [int(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise InputError(f"{what}: expected comma-separated integers, got {text!r}") from exc
    if not out:
        raise InputError(f"{what}: empty list")
    return out


def _parse_range(text: str) -> range:
    """``lo:hi`` inclusive, or a single integer."""
    try:
        if ":" in text:
            lo, hi = (int(t) for t in text.split(":", 1))
        else:
            lo = hi = int(text)
    except ValueError as exc:
        raise InputError(f"bad range {text!r}; use lo:hi") from exc
    if lo < 1:
        raise InputError("exponent ranges start at 1")
    return range(lo, hi + 1)


def _field(args) -> object:
    sqrt = None
    if getattr(args, "sqrt_minus_one", None) is not None:
        sqrt = args.sqrt_minus_one == "yes"
    try:
        return make_field(args.char, bool(getattr(args, "alg_closed", False)), sqrt)
    except FieldError as exc:
        raise InputError(str(exc)) from exc


def _load_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc


def _load_map(args):
    pres = ring_from_dict(_load_json(args.ring)) if getattr(args, "ring", None) else None
    return map_from_dict(_load_json(args.map), pres)


def cmd_classify(args) -> int:
    tup = _parse_ints(args.tuple, "--tuple")
    if len(tup) < 3 or min(tup) < 1:
        raise InputError("--tuple needs at least three positive integers")
    verdict = classify(tup, _field(args))
    if args.json:
        sys.stdout.write(dumps(verdict.to_dict()))
    else:
        print(f"B{tuple(tup)} over {verdict.field.describe()}: {verdict.status.value} [{verdict.rule}]")
        print(f"  {verdict.citation}")
        for note in verdict.notes:
            print(f"  note: {note}")
        if verdict.witness is not None:
            for line in verdict.witness.render():
                print(f"  {line}")
    if args.witness:
        if verdict.witness is None:
            print("no witness for this verdict; nothing written", file=sys.stderr)
        else:
            Path(args.witness).write_text(dumps(map_to_dict(verdict.witness)))
    return EXIT_OK


def cmd_verify(args) -> int:
    phi = _load_map(args)
    report = verify(phi)
    names = phi.presentation.names
    print(report.describe(names))
    if not report.ok:
        return EXIT_FAILED
    if args.extended:
        pres = phi.presentation
        sample = pres.gens() + [pres.mul(a, b) for a in pres.gens() for b in pres.gens()]
        ext = verify_extended(phi, sample)
        print(f"extended checks: {ext.checks} identities, {'ok' if ext.ok else 'VIOLATED'}")
        for v in ext.violations:
            print(f"  {v}")
        if not ext.ok:
            return EXIT_FAILED
    return EXIT_OK


def cmd_homogenize(args) -> int:
    phi = _load_map(args)
    weights = "standard" if args.weights == "standard" else _parse_ints(args.weights, "--weights")
    try:
        hat, report = homogenize_map(phi, weights)
    except CandidateVerificationFailed as exc:
        print(str(exc))
        for line in exc.candidate.render():
            print(f"  {line}")
        return EXIT_FAILED
    print(f"slope d = {report.slope}")
    print(f"achieved by (generator, U-order): {[(i + 1, j) for i, j in report.achieved_by]}")
    print(f"homogeneous: {report.homogeneous}, nontrivial: {report.nontrivial}")
    for line in hat.render():
        print(f"  {line}")
    if args.out:
        Path(args.out).write_text(dumps(map_to_dict(hat)))
    return EXIT_OK


def cmd_search(args) -> int:
    if args.ring:
        pres = ring_from_dict(_load_json(args.ring))
    elif args.tuple:
        if args.char is None:
            raise InputError("--tuple needs --char")
        pres = make_pham_brieskorn(_field(args), _parse_ints(args.tuple, "--tuple"))
    else:
        raise InputError("give --ring or --tuple")
    if args.char is not None and args.char != pres.field.characteristic:
        raise InputError("--char does not match the ring file")
    mask = tuple(i - 1 for i in _parse_ints(args.mask, "--mask")) if args.mask else None
    bounds = SearchBounds(args.max_udeg, args.max_deg, mask, args.ceiling)
    size = search_size(pres, bounds)
    print(
        f"searching {pres.describe()}: {size.unknowns_per_level} unknowns per level, "
        f"{size.levels} levels, nominal space {size.nominal}",
        file=sys.stderr,
    )

    def progress(nodes: int, level: int) -> None:
        print(f"  {nodes} nodes visited (level {level})", file=sys.stderr)

    out_dir = Path(args.out_dir) if args.out_dir else None
    if out_dir:
        out_dir.mkdir(parents=True, exist_ok=True)
    count = 0
    for phi in enumerate_maps(pres, bounds, progress):
        count += 1
        print(f"map {count}: " + "; ".join(phi.render()))
        if out_dir:
            (out_dir / f"map_{count:04d}.json").write_text(dumps(map_to_dict(phi)))
    if count:
        print(f"{count} verified nontrivial map(s) found within bounds")
    else:
        print("no map found within bounds")
    return EXIT_OK


def _traits_text(field) -> str:
    t = field.traits()
    return ";".join(f"{k}={'yes' if v else 'no'}" for k, v in t.items())


def cmd_batch(args) -> int:
    ranges = [_parse_range(args.a), _parse_range(args.b), _parse_range(args.c)]
    if args.d:
        ranges.append(_parse_range(args.d))
    chars = _parse_ints(args.chars, "--chars") if args.chars else []
    total = len(chars)
    for r in ranges:
        total *= len(r)
    if total > args.max_rows and not args.force:
        raise InputError(f"{total} rows exceeds the cap {args.max_rows}; pass --force to override")
    fields = []
    for p in chars:
        args.char = p
        fields.append(_field(args))
    rows = []
    for field in fields:
        for tup in product(*ranges):
            if args.nondecreasing and list(tup) != sorted(tup):
                continue
            v = classify(tup, field)
            rows.append((tup, field, v))
    rows.sort(key=lambda r: (r[1].characteristic, r[0]))
    if args.format == "json":
        sys.stdout.write(dumps([v.to_dict(with_witness=False) for _, _, v in rows]))
    else:
        out = sys.stdout
        out.write("\t".join(TSV_COLUMNS) + "\n")
        for tup, field, v in rows:
            out.write(
                "\t".join([",".join(map(str, tup)), str(field.characteristic), _traits_text(field), v.status.value, v.rule])
                + "\n"
            )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pbrigid", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def field_flags(sp, char_required=True):
        sp.add_argument("--char", type=int, required=char_required, help="characteristic: 0 or a prime")
        sp.add_argument("--alg-closed", action="store_true", help="work over the algebraic closure")
        sp.add_argument("--sqrt-minus-one", choices=["yes", "no"], help="declare whether k contains sqrt(-1)")

    sp = sub.add_parser("classify", help="classify B_a")
    sp.add_argument("--tuple", required=True, help="exponents a,b,c[,d...]")
    field_flags(sp)
    sp.add_argument("--json", action="store_true")
    sp.add_argument("--witness", help="write the witness map here")
    sp.set_defaults(func=cmd_classify)

    sp = sub.add_parser("verify", help="verify an exponential map")
    sp.add_argument("--ring", help="ring.json (optional when the map embeds its ring)")
    sp.add_argument("--map", required=True)
    sp.add_argument("--extended", action="store_true", help="also check Leibniz and composition identities")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("homogenize", help="homogenize a verified map")
    sp.add_argument("--ring")
    sp.add_argument("--map", required=True)
    sp.add_argument("--weights", default="standard", help="'standard' or w1,w2,...")
    sp.add_argument("--out", help="write the homogenized map here")
    sp.set_defaults(func=cmd_homogenize)

    sp = sub.add_parser("search", help="bounded exhaustive search over F_p")
    sp.add_argument("--ring")
    sp.add_argument("--tuple")
    field_flags(sp, char_required=False)
    sp.add_argument("--max-udeg", type=int, required=True)
    sp.add_argument("--max-deg", type=int, required=True)
    sp.add_argument("--mask", help="1-based generator indices allowed to move, e.g. 1,3")
    sp.add_argument("--ceiling", type=int, default=2**32)
    sp.add_argument("--out-dir", help="write each map found as JSON here")
    sp.set_defaults(func=cmd_search)

    sp = sub.add_parser("batch", help="classification table over exponent ranges")
    sp.add_argument("--a", required=True, help="range lo:hi")
    sp.add_argument("--b", required=True)
    sp.add_argument("--c", required=True)
    sp.add_argument("--d")
    sp.add_argument("--chars", required=True, help="comma-separated characteristics")
    sp.add_argument("--alg-closed", action="store_true")
    sp.add_argument("--sqrt-minus-one", choices=["yes", "no"])
    sp.add_argument("--nondecreasing", action="store_true", help="only tuples with a <= b <= c ...")
    sp.add_argument("--format", choices=["tsv", "json"], default="tsv")
    sp.add_argument("--max-rows", type=int, default=DEFAULT_MAX_ROWS)
    sp.add_argument("--force", action="store_true", help="allow more rows than --max-rows")
    sp.set_defaults(func=cmd_batch)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (
        InputError,
        FormatError,
        FieldError,
        InvalidTuple,
        InvalidRelation,
        SearchError,
        GradingError,
        ExpMapError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
