"""Command-line front end.

Exit codes: 0 success / separable-consistent, 1 input error,
2 usage error, 3 entangled verdict.
"""

from __future__ import annotations

import argparse
import csv
import io as _stringio
import json
import math
import sys
import time
from contextlib import nullcontext
from typing import Sequence

import numpy as np

from . import io
from .channels import (
    depolarizing,
    contraction_kappa,
    kraus_superop,
    phase_damping,
    transpose_superop,
)
from .checks import CHECKS, export_states, run_checks
from .config import tolerances
from .linmap import Superoperator, haar_unitary
from .separability import (
    ENTANGLED,
    default_probes,
    depolarizing_probes,
    local_superop,
    transpose_probes,
    witness_scan,
)
from .tomography import SpinDirection, reconstruct, spin_tomogram, unitary_tomogram

EXIT_OK, EXIT_INPUT, EXIT_USAGE, EXIT_ENTANGLED = 0, 1, 2, 3
MAP_NAMES = ("depolarize", "phase-damp", "transpose", "kraus")


class UsageError(Exception):
    pass


def _emit(payload: dict, fmt: str, text_lines: Sequence[str] | None = None) -> None:
    if fmt == "json":
        json.dump(payload, sys.stdout, indent=2)
        sys.stdout.write("\n")
    else:
        for line in text_lines or [f"{k}: {v}" for k, v in payload.items()]:
            print(line)


def _format(args) -> str:
    return "json" if args.json else args.format


def _tol_context(pairs: Sequence[str] | None):
    if not pairs:
        return nullcontext()
    overrides = {}
    for item in pairs:
        key, _, value = item.partition("=")
        if not value:
            key, value = "spectral", key
        if key not in ("structural", "spectral", "unitary"):
            raise UsageError(f"unknown tolerance {key!r}; use structural, spectral or unitary")
        try:
            overrides[key] = float(value)
        except ValueError:
            raise UsageError(f"tolerance value {value!r} is not a number") from None
    return tolerances(**overrides)


def _load(args, hermitian_only: bool = False):
    dims = io.parse_dims(args.dims)
    if hermitian_only:
        return io.load_state(args.state, dims, hermitian_only=True)
    rho = io.load_state(args.state, dims)
    return rho.mat, rho.dims


def cmd_witness(args) -> int:
    mat, dims = _load(args)
    if args.mode == "default":
        probes = default_probes(dims, args.eps_grid)
    else:
        probes = depolarizing_probes(dims, args.eps_grid, args.mode)
        if not args.no_transpose:
            probes += transpose_probes(dims)
    rng = np.random.default_rng(args.seed)
    t0 = time.perf_counter()
    res = witness_scan(mat, dims, probes, g_samples=args.g_samples, rng=rng, workers=args.workers)
    wall = time.perf_counter() - t0
    payload = {
        "f_max": res.f_max,
        "verdict": res.verdict,
        "argmax_eps": res.argmax_params.get("eps"),
        "argmax_params": res.argmax_params,
        "samples_used": res.samples_used,
        "evaluations": res.evaluations,
        "seed": args.seed,
        "dims": list(dims),
        "argmax_g": io.matrix_to_json(res.argmax_g),
        "wall_time_s": wall,
    }
    _emit(payload, _format(args), [
        f"f_max: {res.f_max:.15g}",
        f"verdict: {res.verdict}",
        f"argmax: {res.argmax_params}",
        f"evaluations: {res.evaluations}",
    ])
    return EXIT_ENTANGLED if res.verdict == ENTANGLED else EXIT_OK


def _group_element(args, n: int, dims):
    kind = args.g[0]
    if kind == "identity":
        return np.eye(n, dtype=complex), None
    if kind == "haar":
        return haar_unitary(n, np.random.default_rng(args.seed)), None
    if kind == "euler":
        if len(args.g) != 3:
            raise UsageError("--g euler needs two angles: THETA PHI")
        try:
            theta, phi = float(args.g[1]), float(args.g[2])
        except ValueError:
            raise UsageError("euler angles must be numbers") from None
        return None, SpinDirection(theta, phi)
    if kind == "file":
        if len(args.g) != 2:
            raise UsageError("--g file needs a path")
        return io.load_matrix(args.g[1]), None
    raise UsageError(f"unknown group element {kind!r}; use identity, haar, euler or file")


def cmd_tomogram(args) -> int:
    mat, dims = _load(args, hermitian_only=args.hermitian_only)
    g, direction = _group_element(args, mat.shape[0], dims)
    if direction is not None:
        t = spin_tomogram(mat, direction, dims)
    else:
        t = unitary_tomogram(mat, g, dims)
    fmt = _format(args)
    rows = t.rows()
    if fmt == "json":
        _emit({"dims": list(t.dims), "total": t.total(),
               "rows": [{"m": list(m), "value": v} for m, v in rows],
               "g": io.matrix_to_json(t.group_element)}, "json")
    elif fmt == "csv":
        buf = _stringio.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([f"m{k + 1}" for k in range(len(t.dims))] + ["value"])
        for m, v in rows:
            w.writerow(list(m) + [repr(v)])
        sys.stdout.write(buf.getvalue())
    else:
        for m, v in rows:
            print(" ".join(str(i) for i in m), f"{v:.15g}")
    return EXIT_OK


def _build_map(args, dims) -> Superoperator:
    name, *params = args.map
    if name not in MAP_NAMES:
        raise UsageError(f"unknown map {name!r}; valid maps: {', '.join(MAP_NAMES)}")
    n = math.prod(dims)

    def on(k, local):
        maps = [Superoperator.identity(d) for d in dims]
        maps[k] = local
        return local_superop(maps, dims)

    def subsystem(default=None):
        k = args.subsystem if args.subsystem is not None else default
        if k is None:
            return None
        if not 1 <= k <= len(dims):
            raise UsageError(f"subsystem {k} out of range 1..{len(dims)}")
        return k - 1

    def number():
        if len(params) != 1:
            raise UsageError(f"map {name} takes exactly one numeric parameter")
        try:
            return float(params[0])
        except ValueError:
            raise UsageError(f"parameter {params[0]!r} is not a number") from None

    if name == "transpose":
        if len(params) > 1:
            raise UsageError("transpose takes at most one subsystem index")
        try:
            k = int(params[0]) if params else len(dims)
        except ValueError:
            raise UsageError(f"subsystem {params[0]!r} is not an integer") from None
        if not 1 <= k <= len(dims):
            raise UsageError(f"subsystem {k} out of range 1..{len(dims)}")
        return on(k - 1, transpose_superop(dims[k - 1]))
    if name == "kraus":
        if len(params) != 1:
            raise UsageError("kraus needs a file path")
        local = kraus_superop(io.load_kraus(params[0]))
    elif name == "depolarize":
        eps = number()
        k = subsystem()
        return depolarizing(n, eps) if k is None else on(k, depolarizing(dims[k], eps))
    else:
        lam = number()
        k = subsystem()
        return phase_damping(n, lam) if k is None else on(k, phase_damping(dims[k], lam))
    k = subsystem()
    if k is None:
        if local.dim_in != n:
            raise io.InputError(f"Kraus operators act on dimension {local.dim_in}, state has {n}")
        return local
    if local.dim_in != dims[k]:
        raise io.InputError(f"Kraus operators act on dimension {local.dim_in}, subsystem has {dims[k]}")
    return on(k, local)


def cmd_channel(args) -> int:
    if args.map and args.map[0] not in MAP_NAMES:
        raise UsageError(f"unknown map {args.map[0]!r}; valid maps: {', '.join(MAP_NAMES)}")
    mat, dims = _load(args)
    L = _build_map(args, dims)
    out = L.apply(mat)
    out = (out + out.conj().T) / 2
    report = contraction_kappa(L, mat)
    payload = {
        "map": args.map,
        "kappa": report.kappa,
        "trace": report.output_trace,
        "trace_preserved": report.trace_preserved,
        "hermiticity_preserved": report.hermiticity_preserved,
        "min_eigenvalue": report.min_output_eigenvalue,
        "semigroup": report.semigroup,
    }
    if args.out:
        io.write_state_file(args.out, out, dims)
        payload["output"] = args.out
    else:
        payload["output"] = io.state_to_json(out, dims)
    _emit(payload, _format(args))
    return EXIT_OK


def cmd_reconstruct(args) -> int:
    pairs, file_dims = io.load_measurements(args.measurements)
    dims = io.parse_dims(args.dims) or file_dims
    rho = reconstruct(pairs, dims)
    payload = io.state_to_json(rho.mat, rho.dims)
    if args.out:
        io.write_state_file(args.out, rho.mat, rho.dims)
    _emit(payload, "json" if _format(args) != "text" else "text",
          [" ".join(f"{z.real:+.6f}{z.imag:+.6f}j" for z in row) for row in rho.mat])
    return EXIT_OK


def cmd_examples(args) -> int:
    if args.export_states:
        for p in export_states(args.export_states):
            print(p, file=sys.stderr)
    names = args.item or list(CHECKS)
    for n in names:
        if n not in CHECKS:
            raise UsageError(f"unknown item {n!r}; valid items: {', '.join(CHECKS)}")
    results = run_checks(names)
    if _format(args) == "json":
        _emit({"all_passed": all(r.passed for r in results),
               "items": [{"name": r.name, "passed": r.passed, "summary": r.summary,
                          "detail": r.detail} for r in results]}, "json")
    else:
        for r in results:
            print(f"{'PASS' if r.passed else 'FAIL'}  {r.name}: {r.summary}")
            if args.item and "curve" in r.detail:
                for eps, f in r.detail["curve"]:
                    print(f"    eps = {eps:+.4f}   F = {f:.15g}")
    return EXIT_OK if all(r.passed for r in results) else EXIT_INPUT


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--dims", help="subsystem dimensions, e.g. 2,2 (overrides the file)")
    common.add_argument("--seed", type=int, default=0, help="seed for Haar sampling")
    common.add_argument("--json", action="store_true", help="shorthand for --format json")
    common.add_argument("--format", choices=("json", "csv", "text"), default=None)
    common.add_argument("--tol", action="append", metavar="KEY=VALUE",
                        help="tolerance override (structural, spectral, unitary)")

    parser = argparse.ArgumentParser(prog="tomosep", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("witness", parents=[common], help="scan the tomographic witness F")
    p.add_argument("state")
    p.add_argument("--eps-grid", type=int, default=41)
    p.add_argument("--g-samples", type=int, default=0)
    p.add_argument("--mode", choices=("default", "single", "last", "product"), default="default")
    p.add_argument("--no-transpose", action="store_true")
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=cmd_witness, default_format="json")

    p = sub.add_parser("tomogram", parents=[common], help="tomogram of a state")
    p.add_argument("state")
    p.add_argument("--g", nargs="+", default=["identity"],
                   metavar="G", help="identity | haar | euler THETA PHI | file PATH")
    p.add_argument("--hermitian-only", action="store_true",
                   help="accept any Hermitian matrix, not just states")
    p.set_defaults(func=cmd_tomogram, default_format="csv")

    p = sub.add_parser("channel", parents=[common], help="apply a positive map")
    p.add_argument("state")
    p.add_argument("--map", nargs="+", required=True, metavar="MAP",
                   help="depolarize EPS | phase-damp LAMBDA | transpose K | kraus FILE")
    p.add_argument("--subsystem", type=int, default=None, help="1-based subsystem for local maps")
    p.add_argument("--out", help="write the transformed matrix to this state file")
    p.set_defaults(func=cmd_channel, default_format="json")

    p = sub.add_parser("reconstruct", parents=[common], help="linear-inversion reconstruction")
    p.add_argument("measurements")
    p.add_argument("--out")
    p.set_defaults(func=cmd_reconstruct, default_format="json")

    p = sub.add_parser("examples", parents=[common], help="run the worked-example suite")
    p.add_argument("--item", action="append", help=f"one of: {', '.join(CHECKS)}")
    p.add_argument("--export-states", metavar="DIR", help="write the bundled states to DIR")
    p.set_defaults(func=cmd_examples, default_format="text")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.format is None:
        args.format = args.default_format
    if getattr(args, "eps_grid", 1) < 1 or getattr(args, "g_samples", 0) < 0:
        parser.print_usage(sys.stderr)
        print("tomosep: error: --eps-grid must be >= 1 and --g-samples >= 0", file=sys.stderr)
        return EXIT_USAGE
    try:
        with _tol_context(args.tol):
            return args.func(args)
    except UsageError as exc:
        print(f"tomosep: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, OSError, IndexError) as exc:
        print(f"tomosep: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
