"""Batch command line: reproducible runs with JSON in, JSON or CSV out.

Verdicts travel as exit codes so shell pipelines can branch without
parsing: 0 means success (and "feasible" / "classical-compatible" where a
verdict applies), 2 malformed or inconsistent input, 3 infeasible
("violates"), 4 indeterminate.  Reports never contradict the exit code.

Floats are printed with 17 significant digits and rationals as "p/q", so
every emitted artifact parses back to exactly the values that produced
it.  Writes are atomic (temp file plus rename).  When --output names a
bare file, the PENTASPIN_OUTPUT_DIR environment variable, if set, chooses
the directory.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile

from . import biphoton as bp
from . import hv_solver as hv
from .errors import PentaspinError, ValidationError
from .pentagram_geom import (
    Pentagram,
    from_chain,
    gram_max,
    kcbs_spin_form,
    kcbs_sum,
    correlation_form,
    regular_pentagram,
    ChainParams,
)
from .search import SearchConfig, detection_scan, optimize_pentagram, regular_K
from .spin_core import Direction, SpinState, overlap

__all__ = ["main"]

OUTPUT_DIR_ENV = "PENTASPIN_OUTPUT_DIR"

EXIT_OK = 0
EXIT_BAD_INPUT = 2
EXIT_INFEASIBLE = 3
EXIT_INDETERMINATE = 4


def _f17(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        raise ValidationError("cannot serialize a non-finite float")
    return format(float(x), ".17g")


def _dumps(obj, indent: int = 0) -> str:
    """JSON text with floats at 17 significant digits."""
    pad = " " * indent
    inner = " " * (indent + 2)
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, float):
        return _f17(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = ",\n".join(
            f"{inner}{json.dumps(str(k))}: {_dumps(v, indent + 2)}"
            for k, v in obj.items()
        )
        return "{\n" + items + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = ",\n".join(f"{inner}{_dumps(v, indent + 2)}" for v in obj)
        return "[\n" + items + "\n" + pad + "]"
    raise ValidationError(f"cannot serialize {type(obj).__name__}")


def _csv_cell(v) -> str:
    return _f17(v) if isinstance(v, float) else str(v)


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_csv_cell(v) for v in row])
    return buf.getvalue()


def _resolve_output(path: str) -> str:
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and os.path.basename(path) == path:
        return os.path.join(base, path)
    return path


def _atomic_write(path: str, text: str) -> None:
    path = _resolve_output(path)
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".pentaspin.")
    try:
        with os.fdopen(fd, "w") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(args, text: str) -> None:
    if args.output:
        _atomic_write(args.output, text)
    else:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")


def _load_input(raw: str):
    if raw == "-":
        return json.load(sys.stdin)
    s = raw.strip()
    if s.startswith("{") or s.startswith("["):
        return json.loads(s)
    with open(raw) as f:
        return json.load(f)


def _parse_state(obj, normalize: bool) -> SpinState:
    if not isinstance(obj, dict) or "re" not in obj or "im" not in obj:
        raise ValidationError('state JSON needs "re" and "im" component lists')
    re_, im_ = obj["re"], obj["im"]
    if len(re_) != 3 or len(im_) != 3:
        raise ValidationError("state components must be length-3 lists")
    a = [complex(float(r), float(i)) for r, i in zip(re_, im_)]
    return SpinState(a[0], a[1], a[2], normalize=normalize)


def _parse_pentagram(obj, normalize: bool) -> Pentagram:
    if obj == "regular":
        return regular_pentagram()
    if isinstance(obj, dict) and "l1" in obj and "t" in obj:
        return from_chain(ChainParams.from_json(obj))
    if not isinstance(obj, dict) or "legs" not in obj:
        raise ValidationError(
            'pentagram JSON needs "legs", or "l1" and "t", or "regular"'
        )
    legs = obj["legs"]
    if not isinstance(legs, list) or len(legs) != 5:
        raise ValidationError("pentagram needs exactly 5 legs")
    dirs = tuple(
        Direction(float(v[0]), float(v[1]), float(v[2]), normalize=normalize)
        for v in legs
    )
    return Pentagram(dirs)


def _state_json(psi: SpinState) -> dict:
    return psi.to_json()


# ---------------------------------------------------------------- commands


def _cmd_eval(args) -> int:
    obj = _load_input(args.input)
    psi = _parse_state(obj.get("state"), args.normalize)
    pent = _parse_pentagram(obj.get("pentagram", "regular"), args.normalize)
    per_leg = [float(abs(overlap(l, psi)) ** 2) for l in pent.legs]
    k = kcbs_sum(pent, psi)
    verdict = "violates" if k > 2.0 else "classical-compatible"
    report = {
        "K": k,
        "kcbs_spin_form": kcbs_spin_form(pent, psi),
        "correlation_form": correlation_form(pent, psi),
        "per_leg": per_leg,
        "gram_max": gram_max(pent),
        "verdict": verdict,
        "state": _state_json(psi),
        "pentagram": pent.canonical().to_json(),
    }
    if args.format == "csv":
        header = ["K", "kcbs_spin_form", "correlation_form", "gram_max",
                  "verdict"] + [f"p{i+1}" for i in range(5)]
        row = [report["K"], report["kcbs_spin_form"],
               report["correlation_form"], report["gram_max"], verdict] + per_leg
        _emit(args, _csv_text(header, [row]))
    else:
        _emit(args, _dumps(report))
    return EXIT_INFEASIBLE if verdict == "violates" else EXIT_OK


def _cmd_certify(args) -> int:
    obj = _load_input(args.input)
    report = {}
    if isinstance(obj, dict) and "tables" in obj:
        model = hv.MarginalModel.from_json(obj)
    elif isinstance(obj, dict) and "state" in obj:
        psi = _parse_state(obj["state"], args.normalize)
        pent = _parse_pentagram(obj.get("pentagram", "regular"), args.normalize)
        model = hv.marginals_from_state(pent, psi)
        report["pentagram"] = pent.canonical().to_json()
        report["state"] = _state_json(psi)
    else:
        raise ValidationError(
            'certify input needs a model ("tables") or a "state" plus "pentagram"'
        )
    cert = hv.lp_feasible(model, mode=args.mode, tol=args.tol)
    report["model"] = model.to_json()
    report.update(cert.to_json())
    if args.format == "csv":
        raise ValidationError("certify reports are JSON only")
    _emit(args, _dumps(report))
    if cert.verdict == "feasible":
        return EXIT_OK
    if cert.verdict == "infeasible":
        return EXIT_INFEASIBLE
    return EXIT_INDETERMINATE


def _cmd_cone(args) -> int:
    raw = args.input
    try:
        structure = hv.builtin_structure(raw)
    except ValidationError:
        structure = hv.ContextStructure.from_json(_load_input(raw))
    rays = hv.enumerate_extremal_rays(structure)
    counts = {
        "trivial": sum(r.kind == "trivial" for r in rays),
        "nontrivial": sum(r.kind == "nontrivial" for r in rays),
        "total": len(rays),
    }
    report = {
        "structure": structure.to_json(),
        "counts": counts,
        "rays": [r.to_json() for r in rays],
    }
    if args.format == "csv":
        raise ValidationError("cone listings are JSON only")
    _emit(args, _dumps(report))
    return EXIT_OK


def _cmd_search(args) -> int:
    obj = _load_input(args.input)
    cfg_json = dict(obj.get("config", {}))
    cfg_json["seed"] = args.seed
    cfg = SearchConfig.from_json(cfg_json)
    if "concurrences" in obj:
        rows = detection_scan([float(c) for c in obj["concurrences"]], cfg)
        if args.format == "csv":
            header = ["concurrence", "phi", "best_K", "violation",
                      "violated", "regular_K"]
            _emit(args, _csv_text(
                header, [[r[h] for h in header] for r in rows]
            ))
        else:
            _emit(args, _dumps({"config": cfg.to_json(), "scan": rows}))
        return EXIT_OK
    if "state" not in obj:
        raise ValidationError('search input needs "state" or "concurrences"')
    psi = _parse_state(obj["state"], args.normalize)
    result = optimize_pentagram(psi, cfg)
    if args.format == "csv":
        raise ValidationError("search results are JSON only (scans support csv)")
    _emit(args, _dumps(result.to_json()))
    return EXIT_OK


def _cmd_biphoton(args) -> int:
    obj = _load_input(args.input)
    if args.biphoton_cmd == "plan":
        n = bp.plan_trials(
            float(obj["true_rate"]), float(obj["threshold"]),
            float(obj["confidence"]),
        )
        plan = bp.CoincidencePlan(
            float(obj["true_rate"]), float(obj["threshold"]),
            float(obj["confidence"]), n,
        )
        if args.format == "csv":
            _emit(args, _csv_text(
                ["true_rate", "threshold", "confidence", "trials"],
                [[plan.true_rate, plan.threshold, plan.confidence, plan.trials]],
            ))
        else:
            _emit(args, _dumps(plan.to_json()))
        return EXIT_OK
    if args.biphoton_cmd == "simulate":
        rate = float(obj["rate"])
        trials = int(obj["trials"])
        confidence = float(obj.get("confidence", 0.95))
        count, est, (lo, hi) = bp.simulate_counts(
            rate, trials, args.seed, confidence
        )
        report = {
            "rate": rate, "trials": trials, "seed": args.seed,
            "confidence": confidence, "coincidences": count,
            "estimate": est, "ci": [lo, hi],
        }
        if args.format == "csv":
            _emit(args, _csv_text(
                ["rate", "trials", "seed", "coincidences", "estimate",
                 "ci_lo", "ci_hi"],
                [[rate, trials, args.seed, count, est, lo, hi]],
            ))
        else:
            _emit(args, _dumps(report))
        return EXIT_OK
    if args.biphoton_cmd == "sweep":
        angles = [float(a) for a in obj["angles"]]
        trials = int(obj["trials"])
        visibility = float(obj.get("visibility", 1.0))
        confidence = float(obj.get("confidence", 0.95))
        rows = []
        for k, angle in enumerate(angles):
            predicted = bp.visibility_adjusted_rate(
                math.cos(angle) ** 2, visibility
            )
            count, est, (lo, hi) = bp.simulate_counts(
                predicted, trials, args.seed + k, confidence
            )
            rows.append({
                "angle": angle, "predicted": predicted,
                "coincidences": count, "estimate": est,
                "ci_lo": lo, "ci_hi": hi,
            })
        if args.format == "csv":
            header = ["angle", "predicted", "coincidences", "estimate",
                      "ci_lo", "ci_hi"]
            _emit(args, _csv_text(
                header, [[r[h] for h in header] for r in rows]
            ))
        else:
            _emit(args, _dumps({
                "trials": trials, "seed": args.seed,
                "visibility": visibility, "confidence": confidence,
                "sweep": rows,
            }))
        return EXIT_OK
    raise ValidationError(f"unknown biphoton subcommand {args.biphoton_cmd!r}")


def _cmd_repro(args) -> int:
    from .repro import run_all

    results = run_all()
    width = max(len(r.criterion) for r in results)
    lines = []
    for r in results:
        mark = "PASS" if r.passed else "FAIL"
        lines.append(f"{r.criterion:<{width}}  {mark}  {r.detail}")
    table = "\n".join(lines) + "\n"
    sys.stdout.write(table)
    if args.output:
        _atomic_write(args.output, _dumps({
            "results": [
                {"criterion": r.criterion, "passed": r.passed, "detail": r.detail}
                for r in results
            ],
            "all_passed": all(r.passed for r in results),
        }))
    return EXIT_OK if all(r.passed for r in results) else 1


# ------------------------------------------------------------------ parser


def _add_io_flags(p, fmt: bool = True) -> None:
    p.add_argument("--input", required=True, help=(
        "path to a JSON file, an inline JSON object, or - for stdin"
    ))
    p.add_argument("--output", help=(
        "output path (default stdout); a bare filename lands in "
        f"${OUTPUT_DIR_ENV} when that is set"
    ))
    if fmt:
        p.add_argument("--format", choices=("json", "csv"), default="json")


def _seed_value(s: str) -> int:
    v = int(s)
    if not (0 <= v < 2 ** 64):
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit word")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pentaspin",
        description=(
            "Decide whether spin-1 pentagram statistics admit a hidden "
            "joint distribution, search for violating pentagrams, and plan "
            "the photon-counting experiment."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="quantum K and verdict for a state and pentagram")
    _add_io_flags(p)
    p.add_argument("--normalize", action="store_true",
                   help="rescale input vectors to unit norm")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("certify", help="hidden-variable decision with certificate")
    _add_io_flags(p)
    p.add_argument("--mode", choices=("exact", "float"))
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--normalize", action="store_true")
    p.set_defaults(func=_cmd_certify)

    p = sub.add_parser("cone", help="extremal rays of a context structure")
    _add_io_flags(p)
    p.set_defaults(func=_cmd_cone)

    p = sub.add_parser("search", help="maximize K over pentagrams for a state")
    _add_io_flags(p)
    p.add_argument("--seed", type=_seed_value, required=True)
    p.add_argument("--normalize", action="store_true")
    p.set_defaults(func=_cmd_search)

    p = sub.add_parser("biphoton", help="coincidence predictions and planning")
    bsub = p.add_subparsers(dest="biphoton_cmd", required=True)
    q = bsub.add_parser("plan", help="trial count to certify a rate beyond threshold")
    _add_io_flags(q)
    q.set_defaults(func=_cmd_biphoton)
    q = bsub.add_parser("simulate", help="one seeded counting run with exact CI")
    _add_io_flags(q)
    q.add_argument("--seed", type=_seed_value, required=True)
    q.set_defaults(func=_cmd_biphoton)
    q = bsub.add_parser("sweep", help="rate sweep over analyzer angles")
    _add_io_flags(q)
    q.add_argument("--seed", type=_seed_value, required=True)
    q.set_defaults(func=_cmd_biphoton)

    p = sub.add_parser("repro", help="run the acceptance suite and print a table")
    p.add_argument("--output", help="also write a JSON result table")
    p.set_defaults(func=_cmd_repro)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except PentaspinError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_BAD_INPUT
    except (json.JSONDecodeError, OSError, KeyError, TypeError, ValueError) as exc:
        sys.stderr.write(f"error: bad input ({exc})\n")
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
