"""``bi`` command line: verify, spectrum, tridiag and cc subcommands.

Exit codes: 0 when every check passed, 1 on a mathematical failure (the
report is still written), 2 on malformed input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import connection as cc_mod
from .linalg import parse_rational
from .osp import ModuleSpec
from .relations import commutes_trivially, verify_all
from .spectral import (
    BAND_TOL,
    EIG_TOL,
    ChainAlgebra,
    SpectralError,
    joint_eigenbasis,
    tridiagonal_action,
)
from .tensor import TensorSpace, subset_elements, subset_mask


class UsageError(Exception):
    pass


# deterministic JSON: sorted keys, floats at 17 significant digits

def _fmt_float(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"non-finite value {x}")
    if x == 0:
        x = 0.0
    s = format(x, ".17g")
    if all(c in "-0123456789" for c in s):
        s += ".0"
    return s


def dumps(obj: Any, indent: int = 0, step: int = 2) -> str:
    pad = " " * (indent + step)
    end = " " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent + step, step)}"
                 for k, v in sorted(obj.items())]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(dumps(v) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + dumps(v, indent + step, step) for v in obj) + "\n" + end + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    return json.dumps(str(obj))


# argument parsing

def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in text.replace(" ", "").split(",") if t)
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}")


def _mu_list(text: str) -> list:
    try:
        return [parse_rational(t) for t in text.split(",") if t.strip()]
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise UsageError(f"bad --mu value {text!r}: {exc}")


def _perm(text: str, n: int, flag: str) -> tuple[int, ...]:
    perm = _int_list(text)
    if sorted(perm) != list(range(1, n + 1)):
        raise UsageError(f"{flag} {text!r} is not a permutation of 1..{n}")
    return perm


def build_space(args) -> TensorSpace:
    if args.config:
        try:
            obj = json.loads(Path(args.config).read_text())
            space = TensorSpace.from_json_obj(obj)
        except (OSError, ValueError, KeyError, TypeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}")
        return space
    if args.n is None or args.mu is None:
        raise UsageError("give --n and --mu, or --config FILE")
    mus = _mu_list(args.mu)
    if len(mus) != args.n:
        raise UsageError(f"--n {args.n} but {len(mus)} values in --mu")
    level = args.max_level
    if level is None:
        level = getattr(args, "level", None)
    if level is None or level < 1:
        raise UsageError("--max-level must be >= 1")
    if getattr(args, "level", None) is not None and args.level > level:
        raise UsageError(f"--level {args.level} exceeds --max-level {level}")
    try:
        return TensorSpace([ModuleSpec(m, level) for m in mus], level)
    except ValueError as exc:
        raise UsageError(str(exc))


def _level(args, space: TensorSpace) -> int:
    E = args.level
    if E is None:
        raise UsageError("--level is required")
    if not 0 <= E <= space.max_level:
        raise UsageError(f"--level must lie in 0..{space.max_level}")
    return E


def _threads() -> int:
    raw = os.environ.get("BI_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise UsageError(f"BI_THREADS must be an integer, got {raw!r}")


# subcommands; each returns (payload, csv rows or None, ok)

def cmd_verify(args) -> tuple[dict, list[list], bool]:
    space = build_space(args)
    report = verify_all(space, workers=_threads())
    payload = report.to_json_obj(include_timing=args.timing)
    rows = [["A", "B", "check", "status"]]
    for p in report.pairs + report.central:
        st = p.status()
        rows.append([" ".join(map(str, subset_elements(p.A))), " ".join(map(str, subset_elements(p.B))),
                     p.kind, st if isinstance(st, str) else json.dumps(st)])
    return payload, rows, report.passed


def _chain_payload(chain: ChainAlgebra) -> list[list[int]]:
    return [list(subset_elements(m)) for m in chain.label_subsets]


def cmd_spectrum(args) -> tuple[dict, list[list], bool]:
    space = build_space(args)
    E = _level(args, space)
    chain = ChainAlgebra(_perm(args.chain, space.n, "--chain"))
    payload: dict[str, Any] = {"chain": _chain_payload(chain), "level": E}
    try:
        basis = joint_eigenbasis(space, chain, E, tol=args.eig_tol)
    except SpectralError as exc:
        payload["error"] = str(exc)
        return payload, [["error"], [str(exc)]], False
    payload["states"] = [{"labels": basis.labels[k].tolist(), "vector": basis.vectors[:, k].tolist()}
                         for k in range(basis.size)]
    head = [f"label{i}" for i in range(basis.labels.shape[1])] + [f"v{i}" for i in range(basis.size)]
    rows = [head] + [[_fmt_float(x) for x in basis.labels[k]] + [_fmt_float(x) for x in basis.vectors[:, k]]
                     for k in range(basis.size)]
    return payload, rows, True


def cmd_tridiag(args) -> tuple[dict, list[list], bool]:
    space = build_space(args)
    E = _level(args, space)
    chain = ChainAlgebra(_perm(args.chain, space.n, "--chain"))
    op = subset_mask(_int_list(args.op))
    if op >> space.n or not op:
        raise UsageError(f"--op {args.op!r} is not a nonempty subset of 1..{space.n}")
    if args.sort_key is not None:
        key = args.sort_key
        if not 0 <= key < len(chain.label_subsets):
            raise UsageError(f"--sort-key must lie in 0..{len(chain.label_subsets) - 1}")
    else:
        clash = [g for g, m in enumerate(chain.label_subsets) if not commutes_trivially(m, op)]
        key = clash[0] if clash else 0
    payload: dict[str, Any] = {"chain": _chain_payload(chain), "level": E,
                               "op": list(subset_elements(op)), "sort_key": key}
    try:
        basis = joint_eigenbasis(space, chain, E, tol=args.eig_tol)
        tri = tridiagonal_action(space, op, basis, key, tol=math.inf)
    except SpectralError as exc:
        payload["error"] = str(exc)
        return payload, [["error"], [str(exc)]], False
    ok = tri.residual <= args.band_tol * tri.norm
    payload.update({
        "labels": tri.basis.labels.tolist(),
        "diagonal": tri.diagonal.tolist(),
        "upper": tri.upper.tolist(),
        "lower": tri.lower.tolist(),
        "groups": [list(b) for b in tri.bounds],
        "offband_residual": tri.residual,
        "relative_residual": tri.relative_residual,
        "passed": ok,
    })
    rows = [["index", "diagonal", "upper", "lower"]]
    for s in range(len(tri.diagonal)):
        up = _fmt_float(tri.upper[s]) if s < len(tri.upper) else ""
        lo = _fmt_float(tri.lower[s]) if s < len(tri.lower) else ""
        rows.append([s, _fmt_float(tri.diagonal[s]), up, lo])
    return payload, rows, ok


def cmd_cc(args) -> tuple[dict, list[list], bool]:
    space = build_space(args)
    E = _level(args, space)
    src = _perm(getattr(args, "from"), space.n, "--from")
    dst = _perm(args.to, space.n, "--to")
    payload: dict[str, Any] = {"source": list(src), "target": list(dst), "level": E}
    cache = cc_mod.BasisCache(space)
    try:
        path = cc_mod.adjacent_path(src, dst, args.strategy)
        composed = cc_mod.compose_path(space, path, E, start=src, cache=cache, tol=math.inf)
        direct = cc_mod.direct_overlap(space, src, dst, E, cache=cache, tol=math.inf)
        recurrence = 0.0
        for step in path:
            if not step.changes_chain:
                continue
            a, b = cache.get(step.before, E), cache.get(step.after, E)
            single = cc_mod.block_overlap(a, b, step, tol=math.inf)
            incoming = step.swapped[1]
            tri = tridiagonal_action(space, incoming, a, step.position - 2, tol=math.inf)
            rep = cc_mod.check_three_term(single, tri, cc_mod.label_column(b, incoming))
            recurrence = max(recurrence, rep.relative)
    except SpectralError as exc:
        payload["error"] = str(exc)
        return payload, [["error"], [str(exc)]], False
    ortho = max(composed.orthogonality_residual(), composed.offblock_residual())
    composition = float(np.max(np.abs(composed.assembled - direct.assembled), initial=0.0))
    ok = ortho < args.cc_tol and recurrence < 1e-8 and composition < 1e-8
    payload.update({
        "path": [s.position for s in path],
        "blocks": [{"common_labels": list(b.common_labels), "matrix": b.matrix.tolist()}
                   for b in composed.blocks],
        "orthogonality_residual": ortho,
        "recurrence_residual": recurrence,
        "composition_residual": composition,
        "passed": ok,
    })
    rows = [["block", "row", "col", "value"]]
    for g, b in enumerate(composed.blocks):
        for i in range(b.matrix.shape[0]):
            for j in range(b.matrix.shape[1]):
                rows.append([g, i, j, _fmt_float(b.matrix[i, j])])
    return payload, rows, ok


COMMANDS = {"verify": cmd_verify, "spectrum": cmd_spectrum, "tridiag": cmd_tridiag, "cc": cmd_cc}


def make_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, help="number of tensor factors")
    common.add_argument("--mu", help="comma-separated site parameters as p/q, e.g. 1/2,1/3")
    common.add_argument("--max-level", type=int, help="highest retained level (default: --level)")
    common.add_argument("--config", help="tensor-space JSON file (replaces --n/--mu/--max-level)")
    common.add_argument("--out", help="write output here instead of stdout")
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="format", action="store_const", const="json", default="json")
    fmt.add_argument("--csv", dest="format", action="store_const", const="csv")
    common.add_argument("--eig-tol", type=float, default=EIG_TOL,
                        help=f"eigenvalue cluster tolerance (default {EIG_TOL:g})")
    common.add_argument("--cc-tol", type=float, default=1e-9,
                        help="orthogonality tolerance for connection blocks (default 1e-09)")
    common.add_argument("--band-tol", type=float, default=BAND_TOL,
                        help=f"relative off-band tolerance (default {BAND_TOL:g})")

    p = argparse.ArgumentParser(prog="bi", description="Bannai-Ito algebra engine for osp(1,2) tensor products.")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", parents=[common], help="exact check of all anticommutation relations")
    v.add_argument("--timing", action="store_true", help="include elapsed_ms (breaks byte-determinism)")

    s = sub.add_parser("spectrum", parents=[common], help="joint eigenbasis of a chain at one level")
    s.add_argument("--chain", required=True, help="permutation, e.g. 1,2,3")
    s.add_argument("--level", type=int)

    t = sub.add_parser("tridiag", parents=[common], help="banded action of a Casimir in a chain basis")
    t.add_argument("--chain", required=True)
    t.add_argument("--level", type=int)
    t.add_argument("--op", required=True, help="subset, e.g. 2,3")
    t.add_argument("--sort-key", type=int, help="label column giving the BI order (default: auto)")

    c = sub.add_parser("cc", parents=[common], help="connection coefficients between two chains")
    c.add_argument("--from", required=True, help="source permutation")
    c.add_argument("--to", required=True, help="target permutation")
    c.add_argument("--level", type=int)
    c.add_argument("--strategy", choices=["left", "right"], default="left")
    return p


def _render(payload: dict, rows: list[list], fmt: str) -> str:
    if fmt == "csv":
        buf = io.StringIO()
        csv.writer(buf, lineterminator="\n").writerows(rows)
        return buf.getvalue()
    return dumps(payload) + "\n"


def main(argv: Sequence[str] | None = None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        payload, rows, ok = COMMANDS[args.command](args)
    except (UsageError, ValueError) as exc:
        print(f"bi {args.command}: {exc}", file=sys.stderr)
        return 2
    text = _render(payload, rows, args.format)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
