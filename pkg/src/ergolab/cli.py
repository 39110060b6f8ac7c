"""Command-line front end: ``ergolab {gowers,ap,nil,cube,avg,verify}``.

Exit codes: 0 success, 1 property failure, 2 input error, 3 budget exceeded.
Numbers are printed with 17 significant digits; nothing time-dependent is
written to output files, so a fixed config and seed reproduce them bit for bit.
"""

from __future__ import annotations

import argparse
import json
import shlex
import sys
from pathlib import Path

import numpy as np

from . import averages as av
from . import cube_measures as cm
from . import gowers as gw
from . import harmonic as hm
from . import nilmanifolds as nil
from . import progressions as pg
from . import verify as vf
from .errors import BudgetExceeded, InputError, operation_budget

EXIT_OK, EXIT_PROPERTY, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3
DEFAULT_TOL = 1e-9


class PropertyFailure(Exception):
    pass


def g17(v) -> str:
    return format(float(v), ".17g")


def _cnum(z: complex) -> dict:
    return {"re": float(g17(z.real)), "im": float(g17(z.imag))}


def replay_line(argv) -> str:
    return "replay: ergolab " + shlex.join(argv)


def _emit(args, text: str) -> None:
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)


def _rows_csv(header, rows) -> str:
    lines = [",".join(header)] + [",".join(str(c) for c in r) for r in rows]
    return "\n".join(lines) + "\n"


def _ints(text: str, what: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip() != ""]
    except ValueError as exc:
        raise InputError(f"{what}: expected comma-separated integers, got {text!r}") from exc


def _floats(text: str, what: str) -> list:
    try:
        return [nil.parse_rotation(t.strip()) for t in text.split(",")]
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"{what}: cannot parse {text!r}") from exc


def _rng(args) -> np.random.Generator:
    return np.random.default_rng(args.seed)


def _need_N(args) -> int:
    if args.N is None:
        raise InputError("--N is required")
    if args.N < 1:
        raise InputError(f"--N must be >= 1, got {args.N}")
    return args.N


def _load_function(args, path=None, slot: int = 0) -> hm.GroupFunction:
    """A group function from --input, --const or a seeded random draw."""
    path = path if path is not None else args.input
    if path is not None:
        f = hm.group_function_from_csv(Path(path))
        if args.N is not None and args.N != f.N:
            raise InputError(f"{path} has {f.N} rows but --N is {args.N}")
        return f
    N = _need_N(args)
    if getattr(args, "const", None) is not None:
        return hm.GroupFunction.constant(N, complex(args.const))
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([args.seed, slot])))
    return hm.GroupFunction.random(N, rng, args.random)


# subcommands

def cmd_gowers(args) -> int:
    f = _load_function(args)
    k = args.k
    if not 1 <= k <= gw.MAX_K:
        raise InputError(f"--k must be in 1..{gw.MAX_K}")
    budget = operation_budget(args.budget)
    values = {"recursive": gw.gowers_norm_recursive(f, k),
              "closed": gw.gowers_norm_closed(f, k, budget)}
    if k == 2:
        values["fourier"] = gw.u2_via_fourier(f)
    ref = values["closed"]
    delta = max(abs(v - ref) for v in values.values())
    tol = DEFAULT_TOL if args.tol is None else args.tol
    if args.format == "json":
        out = json.dumps({"N": f.N, "k": k, "values": {m: float(g17(v)) for m, v in values.items()},
                          "max_delta": float(g17(delta)), "tol": tol}, indent=None) + "\n"
    else:
        rows = [(m, g17(v)) for m, v in values.items()] + [("max_delta", g17(delta))]
        out = _rows_csv(["method", "value"], rows)
    _emit(args, out)
    if delta > tol:
        raise PropertyFailure(f"Gowers paths disagree by {delta:.3e} > tol {tol:.0e}")
    return EXIT_OK


def cmd_ap(args) -> int:
    N = _need_N(args)
    if args.set is None:
        raise InputError("--set is required (comma-separated residues)")
    A = _ints(args.set, "--set")
    rep = pg.count_aps(A, args.ell, N)
    if args.format == "csv":
        d = rep.to_dict()
        d["lambda_value"] = g17(d["lambda_value"])
        _emit(args, _rows_csv(list(d), [list(d.values())]))
    else:
        _emit(args, rep.to_json() + "\n")
    return EXIT_OK


def _nil_system(args):
    if args.system == "skew":
        alpha = nil.parse_rotation(args.alpha)
        sysm = nil.SkewSystem(alpha, declared_ergodic=args.declared_ergodic)
        if args.start is not None:
            start = nil.SkewPoint(*_floats(args.start, "--start"))
        else:
            start = nil.SkewPoint(*_rng(args).random(2))
        return sysm, start
    t = _floats(args.t, "--t")
    if len(t) != 3:
        raise InputError("--t needs three coordinates")
    sysm = nil.HeisenbergSystem(nil.HeisenbergElement(*t), declared_ergodic=args.declared_ergodic)
    if args.start is not None:
        start = nil.HeisenbergPoint(*_floats(args.start, "--start"))
    else:
        start = nil.HeisenbergPoint(*_rng(args).random(3))
    return sysm, start


def cmd_nil(args) -> int:
    sysm, start = _nil_system(args)
    steps = args.steps if args.steps is not None else args.N
    if steps is None or steps < 1:
        raise InputError("--steps must be >= 1")
    if args.dump == "orbit":
        pts = sysm.orbit(start, steps)
        if args.format == "json":
            _emit(args, json.dumps({"metadata": sysm.metadata(),
                                    "points": [[float(g17(v)) for v in r] for r in pts.tolist()]}) + "\n")
        else:
            _emit(args, nil.orbit_to_csv(pts))
        return EXIT_OK
    if args.observable not in nil.OBSERVABLES:
        raise InputError(f"unknown observable {args.observable!r}")
    if args.observable == "e_z" and args.system == "skew":
        raise InputError("e_z needs the heisenberg system")
    s = nil.birkhoff_series(sysm, start, nil.OBSERVABLES[args.observable], steps)
    if args.format == "json":
        _emit(args, json.dumps({"metadata": s.metadata, "checkpoints": s.checkpoints.tolist(),
                                "values": [_cnum(complex(v)) for v in s.values]}) + "\n")
    else:
        _emit(args, nil.series_to_csv(s))
    return EXIT_OK


def _cyclic(args) -> cm.FiniteSystem:
    return cm.FiniteSystem.rotation(_need_N(args), args.step)


def cmd_cube(args) -> int:
    sys_ = _cyclic(args)
    k = args.k
    if k < 0:
        raise InputError("--k must be >= 0")
    if args.dump == "measure":
        cm.check_budget_explicit(sys_, k, args.budget)
        mu = cm.build_cube_measure(sys_, k)
        _emit(args, mu.to_csv())
        return EXIT_OK
    if k < 1:
        raise InputError("seminorms need --k >= 1")
    budget = operation_budget(args.budget)
    f = _load_function(args)
    mu = cm.build_cube_measure(sys_, k)
    values = {"cube_measure": cm.hk_seminorm(sys_, f.values, k, mu, budget),
              "recursive": cm.hk_seminorm_recursive(sys_, f.values, k)}
    if args.step == 1:
        values["gowers_closed"] = gw.gowers_norm_closed(f, k, budget)
    ref = values["recursive"]
    delta = max(abs(v - ref) for v in values.values())
    tol = DEFAULT_TOL if args.tol is None else args.tol
    if args.format == "json":
        _emit(args, json.dumps({"N": sys_.M, "k": k, "support_size": mu.support_size,
                                "values": {m: float(g17(v)) for m, v in values.items()},
                                "max_delta": float(g17(delta))}) + "\n")
    else:
        rows = [(m, g17(v)) for m, v in values.items()] + [("max_delta", g17(delta))]
        _emit(args, _rows_csv(["method", "value"], rows))
    if delta > tol:
        raise PropertyFailure(f"seminorm routes disagree by {delta:.3e} > tol {tol:.0e}")
    return EXIT_OK


def _parse_polys(text: str, count: int) -> list[av.IntegerPolynomial]:
    """'0,1;0,0,1' -> power-basis polynomials n and n^2."""
    polys = [av.IntegerPolynomial.from_power_coefficients(_ints(p, "--poly")) for p in text.split(";")]
    if len(polys) != count:
        raise InputError(f"--poly lists {len(polys)} polynomials for {count} functions")
    return polys


def cmd_avg(args) -> int:
    k = args.k
    if k < 1:
        raise InputError("--k must be >= 1")
    count = 2**k - 1 if args.mode == "cubic" else k
    if args.system == "cyclic":
        source = _cyclic(args)
        inputs = args.input_list or []
        if inputs and len(inputs) not in (1, count):
            raise InputError(f"give 1 or {count} --input files, got {len(inputs)}")
        if inputs:
            fs = [_load_function(args, inputs[min(i, len(inputs) - 1)]).values for i in range(count)]
        else:
            fs = [_load_function(args, slot=i).values for i in range(count)]
        steps = args.steps if args.steps is not None else source.period
    else:
        source = av.OrbitSource(*_nil_system(args))
        if args.observable not in nil.OBSERVABLES:
            raise InputError(f"unknown observable {args.observable!r}")
        fs = [nil.OBSERVABLES[args.observable]] * count
        steps = args.steps if args.steps is not None else args.N
        if steps is None:
            raise InputError("--steps (or --N) is required for orbit averages")
    if steps < 1:
        raise InputError("--steps must be >= 1")
    if args.mode == "linear":
        s = av.linear_average(source, fs, steps)
    elif args.mode == "polynomial":
        polys = _parse_polys(args.poly, count) if args.poly else \
            [av.IntegerPolynomial.from_power_coefficients([0] * (i + 1) + [1]) for i in range(count)]
        s = av.polynomial_average(source, fs, polys, steps)
    else:
        s = av.cubic_average(source, fs, steps, k)
    if args.format == "json":
        vals = s.scalar_values()
        _emit(args, json.dumps({"mode": args.mode, "k": k, "checkpoints": s.checkpoints.tolist(),
                                "values": [_cnum(complex(v)) for v in vals],
                                "l2_norms": [float(g17(v)) for v in s.l2_norms],
                                "cauchy_tail": [float(g17(v)) for v in s.cauchy_tail]}) + "\n")
    else:
        _emit(args, av.series_to_csv(s))
    return EXIT_OK


def cmd_verify(args) -> int:
    names = args.property or None
    unknown = [n for n in names or [] if n not in vf.REGISTRY]
    if unknown:
        raise InputError(f"unknown property {unknown[0]!r}; choose from {', '.join(vf.REGISTRY)}")
    results = []
    for name, p in vf.REGISTRY.items():
        if names and name not in names:
            continue
        r = vf.run_property(p, vf.Context(args.seed, args.quick, args.tol, args.case))
        print(r.line(), flush=True)
        if r.failure is not None:
            cmd = ["verify", "--seed", str(args.seed), "--property", name, "--case", str(r.failure["case"])]
            if args.quick:
                cmd.append("--quick")
            if args.tol is not None:
                cmd += ["--tol", repr(args.tol)]
            print(f"  failing instance: {vf.failure_json(r)}")
            print(f"  {replay_line(cmd)}")
        results.append(r)
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} properties passed")
    if args.output:
        report = [{"property": r.name, "passed": r.passed, "worst_gap": r.worst_gap, "cases": r.cases,
                   "tol": r.tol, "failure": r.failure} for r in results]
        Path(args.output).write_text(json.dumps(report, default=float, indent=1) + "\n")
    return EXIT_PROPERTY if failed else EXIT_OK


# parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--N", type=int, help="group order / horizon")
    common.add_argument("--k", type=int, default=2)
    common.add_argument("--ell", type=int, default=3)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tol", type=float, default=None)
    common.add_argument("--output", help="write the result here instead of stdout")
    common.add_argument("--format", choices=("csv", "json"), default=None,
                        help="output format (default: json for ap, csv otherwise)")
    common.add_argument("--quick", action="store_true")
    common.add_argument("--budget", type=int, default=None, help="operation cap (default: ERGOLAB_BUDGET or 1e9)")

    fn = argparse.ArgumentParser(add_help=False)
    fn.add_argument("--input", help="group function CSV (index,re,im)")
    fn.add_argument("--const", type=complex, default=None, help="constant function value")
    fn.add_argument("--random", choices=hm.RANDOM_KINDS, default="disk",
                    help="seeded random function when no --input/--const")

    nilp = argparse.ArgumentParser(add_help=False)
    nilp.add_argument("--alpha", default="golden", help="skew rotation: golden, p/q or a float")
    nilp.add_argument("--t", default="golden,0.7071067811865476,0.3", help="Heisenberg translation x,y,z")
    nilp.add_argument("--start", default=None, help="start point (default: seeded random)")
    nilp.add_argument("--steps", type=int, default=None)
    nilp.add_argument("--observable", default="e_y", choices=sorted(nil.OBSERVABLES))
    nilp.add_argument("--declared-ergodic", dest="declared_ergodic", action="store_true", default=None)

    parser = argparse.ArgumentParser(prog="ergolab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gowers", parents=[common, fn], help="U^k norm by every available path")
    p.set_defaults(func=cmd_gowers)

    p = sub.add_parser("ap", parents=[common], help="progression counts for a set")
    p.add_argument("--set", help="comma-separated residues")
    p.set_defaults(func=cmd_ap)

    p = sub.add_parser("nil", parents=[common, nilp], help="nilsystem orbits and Birkhoff series")
    p.add_argument("--system", choices=("skew", "heisenberg"), default="skew")
    p.add_argument("--dump", choices=("series", "orbit"), default="series")
    p.set_defaults(func=cmd_nil)

    p = sub.add_parser("cube", parents=[common, fn], help="cube measure and cube seminorms on Z/N")
    p.add_argument("--step", type=int, default=1, help="rotation step (x -> x + step)")
    p.add_argument("--dump", choices=("seminorm", "measure"), default="seminorm")
    p.set_defaults(func=cmd_cube)

    p = sub.add_parser("avg", parents=[common, nilp], help="multiple ergodic averages")
    p.add_argument("--mode", choices=("linear", "polynomial", "cubic"), default="linear")
    p.add_argument("--system", choices=("cyclic", "skew", "heisenberg"), default="cyclic")
    p.add_argument("--step", type=int, default=1)
    p.add_argument("--input", dest="input_list", action="append",
                   help="function CSV; repeat once per slot or give one for all")
    p.add_argument("--const", type=complex, default=None)
    p.add_argument("--random", choices=hm.RANDOM_KINDS, default="disk")
    p.add_argument("--poly", help="power-basis coefficients, ';' between slots, e.g. '0,1;0,0,1'")
    p.set_defaults(func=cmd_avg, input=None)

    p = sub.add_parser("verify", parents=[common], help="randomized property battery")
    p.add_argument("--property", action="append", help="run only this property (repeatable)")
    p.add_argument("--case", type=int, default=None, help="replay a single case index")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    if args.format is None:
        args.format = "json" if args.command == "ap" else "csv"
    try:
        return args.func(args)
    except PropertyFailure as exc:
        print(f"error: {exc}\n{replay_line(argv)}", file=sys.stderr)
        return EXIT_PROPERTY
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}\n{replay_line(argv)}", file=sys.stderr)
        return EXIT_BUDGET
    except (InputError, OSError) as exc:
        print(f"input error: {exc}\n{replay_line(argv)}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
