"""Command-line front end.

Every subcommand prints a JSON report on stdout.  Anything written with
``--out`` gets a ``<out>.manifest.json`` next to it recording the subcommand,
the full parameter set, the seed, the package version and SHA-256 digests of
the inputs and the output, so a run can be replayed and compared bit for bit.

Exit codes: 0 ok, 2 bad input, 3 mathematical precondition failed, 4 invalid
walk measure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
import warnings
from collections import Counter
from pathlib import Path

from . import __version__
from . import bounds
from . import hypgeom as hg
from . import random_model as rm
from . import walk as wk
from .construction import (
    IntersectionData,
    build_representation,
    config_graph,
    dynkin_recognize,
    gram,
    is_primitive,
    leininger_is_free,
    suff_free_check,
)
from .errors import InputError, MathPreconditionError, MeasureError
from .words import ElementClass, classify_element, cyclic_norm, cyclic_reduce, parse_word, word_norm

EXIT_OK, EXIT_INPUT, EXIT_MATH, EXIT_MEASURE = 0, 2, 3, 4
THREADS_ENV = "THURSTON_THREADS"


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for block in iter(lambda: f.read(1 << 16), b""):
            h.update(block)
    return h.hexdigest()


def write_manifest(out_path, subcommand: str, params: dict, seed, inputs: dict) -> Path:
    manifest = {
        "subcommand": subcommand,
        "params": params,
        "seed": seed,
        "version": __version__,
        "inputs": {name: {"path": str(p), "sha256": sha256_file(p)} for name, p in inputs.items() if p},
        "output": {"path": str(out_path), "sha256": sha256_file(out_path)},
    }
    path = Path(str(out_path) + ".manifest.json")
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path


def _params(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("func",)}


def _emit(report: dict, args, inputs: dict, seed=None) -> None:
    text = json.dumps(report, indent=2, default=_json_default)
    print(text)
    if getattr(args, "out", None) and args.command not in ("walk", "audit"):
        Path(args.out).write_text(text + "\n")
        write_manifest(args.out, args.command, _params(args), seed, inputs)


def _json_default(x):
    if isinstance(x, float) and not math.isfinite(x):
        return None
    if hasattr(x, "item"):
        return x.item()
    raise TypeError(f"not JSON serializable: {type(x).__name__}")


def _rep_and_data(path):
    data = IntersectionData.load(path)
    return data, build_representation(data)


# -- subcommands ---------------------------------------------------------------


def cmd_construct(args) -> dict:
    data = IntersectionData.load(args.data)
    M = gram(data)
    primitive = is_primitive(M)
    rep = build_representation(data)  # raises NotPrimitive
    dynkin = dynkin_recognize(config_graph(data))
    tr = float(hg.rep_of_word(rep, parse_word("ab")).to_array().trace())
    return {
        "mu": rep.mu,
        "mu_is_four": rep.mu_is_four,
        "primitive": primitive,
        "leininger_free": leininger_is_free(data),
        "dynkin_type": str(dynkin),
        "suff_free": suff_free_check(data),
        "K": bounds.k_constant(rep.mu) if rep.mu >= 4 else None,
        "trace_ab": tr,
    }


def cmd_classify(args) -> dict:
    w = parse_word(args.word)
    data, rep = _rep_and_data(args.data)
    cls = classify_element(w, rep.mu_is_four)
    core, conj = cyclic_reduce(w)
    out = {
        "word": str(w),
        "class": cls.value,
        "core": str(core),
        "conjugator": str(conj),
        "word_norm": word_norm(w),
        "cyclic_norm": cyclic_norm(w),
        "displacement": hg.teich_displacement(hg.rep_of_word(rep, w)),
    }
    if cls is ElementClass.IDENTITY:
        out["matrix_class"] = hg.IsomClass.IDENTITY.value
        return out
    # the core carries the conjugacy-invariant data without a long conjugator
    g = hg.rep_of_word(rep, core)
    out["matrix_class"] = hg.check_coherence(cls, g).value
    if cls is ElementClass.PSEUDO_ANOSOV:
        out["log_lambda"] = hg.log_stretch_factor(g)
        if rep.mu >= 4:
            r = bounds.audit_element(rep, w, leininger_is_free(data))
            out["bounds"] = {
                "lower": r.lower_bound,
                "upper": r.upper_bound,
                "pass_lower": r.pass_lower,
                "pass_upper": r.pass_upper,
            }
    return out


def _measure(args, rep) -> wk.MeasureSpec:
    spec = wk.MeasureSpec.load(args.measure) if args.measure else wk.uniform_measure()
    spec, warns = wk.validate_measure(spec, rep)
    for w in warns:
        warnings.warn(w)
    return spec


def _run_walk(args):
    _, rep = _rep_and_data(args.data)
    spec = _measure(args, rep)
    config = wk.WalkConfig(args.steps, args.trajectories, args.seed, args.stride)
    return wk.run_walk(rep, spec, config, threads=args.threads)


def cmd_walk(args) -> dict:
    records = _run_walk(args)
    wk.write_walk_csv(args.out, records)
    write_manifest(args.out, "walk", _params(args), args.seed, {"data": args.data, "measure": args.measure})
    return {"records": len(records), "trajectories": args.trajectories, "out": args.out}


def _records(args):
    if args.csv:
        return wk.read_walk_csv(args.csv)
    if not args.data or args.steps is None or args.seed is None:
        raise InputError("give --csv, or a data file with --steps and --seed to run the walk inline")
    return _run_walk(args)


def cmd_drift(args) -> dict:
    records = _records(args)
    drift = wk.drift_estimate(records)
    fk = wk.fk_upper_bounds(records)
    lnp = wk.last_non_pa_by_traj(records)
    out = {
        "drift": drift.value,
        "drift_std_error": drift.std_error,
        "n": drift.n_used,
        "trajectories": drift.trajectories_used,
        "fk_running_min": fk[-1].running_min,
        "fk": [{"n": p.n, "mean_n": p.mean_n, "running_min": p.running_min} for p in fk],
        "last_non_pa": dict(sorted(Counter(lnp.values()).items())),
    }
    if args.genus is not None:
        out["volume_upper_bound"] = bounds.volume_upper_bound(args.genus, max(drift.value, 0.0))
    return out


def cmd_spectral(args) -> dict:
    records = _records(args)
    drift = wk.drift_estimate(records)
    wanted = set(args.at) if args.at else None
    rows = [r for r in wk.spectral_report(records, drift.value) if wanted is None or r.n in wanted]
    return {
        "drift": drift.value,
        "rows": [{"n": r.n, "fraction_pa": r.fraction_pa, "mean_abs_deviation": r.mean_abs_deviation} for r in rows],
    }


def cmd_model(args) -> dict:
    p = rm.ModelParams(args.n, args.m, args.k)
    if args.trials and args.seed is None:
        raise InputError("--seed is required with --trials")
    return rm.model_report(p, args.trials, args.seed, args.threads)


def cmd_salem(args) -> dict:
    w = parse_word(args.word)
    data, rep = _rep_and_data(args.data)
    win = bounds.salem_power_window(args.salem_log, w, rep, leininger_is_free(data))
    return {"word": str(w), "log_salem": args.salem_log, "k_min": win.k_min, "k_max": win.k_max}


def cmd_audit(args) -> dict:
    data, rep = _rep_and_data(args.data)
    result = bounds.audit_corpus(rep, args.count, args.seed, args.max_len, leininger_is_free(data))
    if args.out:
        bounds.write_audit_csv(args.out, result.reports)
        write_manifest(args.out, "audit", _params(args), args.seed, {"data": args.data})
    out = result.summary()
    out["violating_words"] = [str(r.word) for r in result.violations]
    return out


# -- parser --------------------------------------------------------------------


def _default_threads() -> int:
    raw = os.environ.get(THREADS_ENV)
    if not raw:
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        raise InputError(f"{THREADS_ENV} must be an integer, got {raw!r}")


def _walk_args(p: argparse.ArgumentParser, inline: bool) -> None:
    if inline:
        p.add_argument("data", nargs="?", help="intersection data JSON (inline run)")
        p.add_argument("--csv", help="aggregate an existing walk CSV")
    else:
        p.add_argument("data", help="intersection data JSON")
    p.add_argument("--measure", help="measure JSON; defaults to uniform on a, A, b, B")
    p.add_argument("--steps", type=int, required=not inline)
    p.add_argument("--trajectories", type=int, default=1)
    p.add_argument("--seed", type=int, required=not inline)
    p.add_argument("--stride", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="thurston", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--threads", type=int, default=None, help=f"worker cap (env {THREADS_ENV})")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", help="mu, freeness and Dynkin type of intersection data")
    p.add_argument("data")
    p.add_argument("--out")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("classify", help="classify one word")
    p.add_argument("data")
    p.add_argument("word")
    p.add_argument("--out")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("walk", help="sample random-walk trajectories to CSV")
    _walk_args(p, inline=False)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_walk)

    for name, func in (("drift", cmd_drift), ("spectral", cmd_spectral)):
        p = sub.add_parser(name, help=f"{name} report from a walk CSV or an inline run")
        _walk_args(p, inline=True)
        p.add_argument("--out")
        if name == "drift":
            p.add_argument("--genus", type=int)
        else:
            p.add_argument("--at", type=int, nargs="*", help="only report these steps")
        p.set_defaults(func=func)

    p = sub.add_parser("model", help="random intersection-data model")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--trials", type=int, default=0)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_model)

    p = sub.add_parser("salem", help="powers of a Salem number allowed by the bounds")
    p.add_argument("data")
    p.add_argument("--salem-log", type=float, required=True)
    p.add_argument("--word", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_salem)

    p = sub.add_parser("audit", help="check the stretch-factor bounds on random words")
    p.add_argument("data")
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--max-len", type=int, default=200)
    p.add_argument("--out")
    p.set_defaults(func=cmd_audit)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.threads is None:
            args.threads = _default_threads()
        report = args.func(args)
        seed = getattr(args, "seed", None)
        inputs = {"data": getattr(args, "data", None), "measure": getattr(args, "measure", None),
                  "csv": getattr(args, "csv", None)}
        _emit(report, args, inputs, seed)
    except MeasureError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MEASURE
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except MathPreconditionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MATH
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
