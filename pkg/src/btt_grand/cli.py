"""Command line: ``transform``, ``simulate`` and ``oracle``.

Exit status is 0 on success, 1 on an internal or check failure and 2 on a
usage or input error.
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from .code import LinearCode, bch_code, from_alist, matrix_from_text, matrix_to_text, to_alist
from .constraints import build_scheme
from .errors import (
    AnalysisError,
    ConfigurationError,
    ConstructionError,
    ParseError,
    SchemeError,
    ShapeError,
    TransformationError,
)
from .gf2 import BitMatrix, random_matrix, rank
from .oracle import MAX_N, run_suite
from .sim import ExperimentPlan, run
from .tree import BttResult, btt, identity_transform, leaf_sets, max_usable_rows

DEFAULT_SEED = 20240601
SEED_ENV = "BTT_GRAND_SEED"
CSV_HEADER = ["ebn0_db", "l", "frames", "block_errors", "bler", "bler_lo", "bler_hi",
              "avg_queries", "geomean_queries", "abandoned", "seed"]


class UsageError(Exception):
    """Bad flags or unreadable input; exit status 2."""


def resolve_seed(flag: int | None) -> int:
    if flag is not None:
        return flag
    env = os.environ.get(SEED_ENV)
    if env is None or env == "":
        return DEFAULT_SEED
    try:
        return int(env, 0)
    except ValueError:
        raise UsageError(f"{SEED_ENV}={env!r} is not an integer") from None


def parse_grid(text: str) -> tuple[float, ...]:
    """``start:stop:step`` (stop included when it lands on the grid), a single
    value, or a comma list."""
    try:
        if ":" not in text:
            return tuple(float(v) for v in text.split(","))
        parts = [float(v) for v in text.split(":")]
    except ValueError:
        raise UsageError(f"bad Eb/N0 grid {text!r}") from None
    if len(parts) != 3:
        raise UsageError(f"grid {text!r} must be start:stop:step")
    start, stop, step = parts
    if step <= 0 or stop < start:
        raise UsageError(f"grid {text!r} needs step > 0 and stop >= start")
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return tuple(round(start + i * step, 10) for i in range(count))


def parse_ells(text: str) -> tuple[int, ...]:
    try:
        ells = tuple(int(v) for v in text.split(","))
    except ValueError:
        raise UsageError(f"bad depth list {text!r}") from None
    if not ells or min(ells) < 0:
        raise UsageError(f"bad depth list {text!r}")
    return ells


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def parse_code(spec: str, seed: int = 0) -> LinearCode:
    """``bch:<n>,<k>``, ``alist:<path>`` optionally followed by
    ``+gen:<path>``, or ``random:<n>,<k>`` (drawn from ``seed``)."""
    kind, _, rest = spec.partition(":")
    try:
        if kind == "bch":
            n, k = (int(v) for v in rest.split(","))
            return bch_code(n, k)
        if kind == "random":
            n, k = (int(v) for v in rest.split(","))
            if not 0 < k < n:
                raise UsageError(f"random code needs 0 < k < n, got ({n},{k})")
            rng = np.random.default_rng((seed, 2))
            while True:
                h = random_matrix(n - k, n, rng)
                if rank(h) == n - k:
                    return LinearCode.from_parity_check(h)
        if kind == "alist":
            hpath, _, gspec = rest.partition("+")
            h = from_alist(_read(hpath))
            code = LinearCode.from_parity_check(h)
            if gspec:
                gkind, _, gpath = gspec.partition(":")
                if gkind != "gen":
                    raise UsageError(f"expected gen:<path> after '+', got {gspec!r}")
                g = matrix_from_text(_read(gpath))
                code = LinearCode(g, code.H)
            return code
    except (ValueError, ParseError, ConstructionError, ShapeError) as exc:
        raise UsageError(f"code {spec!r}: {exc}") from None
    raise UsageError(f"unknown code spec {spec!r}; use bch:<n>,<k>, alist:<path>[+gen:<path>] "
                     "or random:<n>,<k>")


def atomic_write(path: Path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def format_csv(results) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in results:
        w.writerow([repr(r.ebn0_db), r.ell, r.frames, r.block_errors, repr(r.bler),
                    repr(r.bler_lo), repr(r.bler_hi), repr(r.avg_queries),
                    repr(r.geomean_queries), r.abandoned, r.seed])
    return buf.getvalue()


def transform_report(h: BitMatrix, result: BttResult) -> str:
    layout = result.layout
    usable = max_usable_rows(layout)
    lines = [
        f"n={layout.n} m={layout.m}",
        f"attempts={result.attempts}",
        f"l_max={usable}",
        f"balance_score={result.balance_score:.4f}",
        "column_values=" + ",".join(map(str, layout.column_values)),
    ]
    for ell in range(1, min(layout.m, max(usable, 1) + 1) + 1):
        sizes = [s.size for s in leaf_sets(layout, ell)]
        lines.append(f"leaf_sizes[{ell}]=" + ",".join(map(str, sizes)))
    dense = layout.h_tree.to_dense()
    for i, frac in enumerate(dense.mean(axis=1)):
        lines.append(f"row_balance[{i + 1}]={frac:.4f}")
    if usable:
        for eq in build_scheme(layout, usable).equations():
            lines.append("equation " + eq)
    return "\n".join(lines) + "\n"


def cmd_transform(args) -> int:
    h = from_alist(_read(args.input))
    out = Path(args.out_dir)
    if not out.is_dir():
        raise UsageError(f"output directory {out} does not exist")
    if args.identity_a:
        result = identity_transform(h)
    else:
        seed = resolve_seed(args.seed)
        result = btt(h, np.random.default_rng((seed, 0)), args.target_l, args.delta,
                     args.max_attempts)
    report = transform_report(h, result)
    atomic_write(out / "h_tree.alist", to_alist(result.layout.h_tree))
    atomic_write(out / "perm.txt", " ".join(map(str, result.layout.perm.map.tolist())) + "\n")
    atomic_write(out / "a.txt", matrix_to_text(result.a))
    atomic_write(out / "report.txt", report)
    sys.stdout.write(report)
    return 0


def cmd_simulate(args) -> int:
    seed = resolve_seed(args.seed)
    code = parse_code(args.code, seed)
    plan = ExperimentPlan(
        code=code, ebn0_db=parse_grid(args.ebn0), ells=parse_ells(args.l), frames=args.frames,
        max_queries=args.max_queries, seed=seed, target_l=args.target_l,
        balance_delta=args.delta, threads=args.threads,
    )
    text = format_csv(run(plan))
    if args.out:
        atomic_write(Path(args.out), text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_oracle(args) -> int:
    seed = resolve_seed(args.seed)
    code = parse_code(args.code, seed)
    if code.n > MAX_N:
        raise UsageError(f"oracle needs n <= {MAX_N}, got n={code.n}")
    results = run_suite(code, args.l, np.random.default_rng((seed, 3)), corrupt=args.corrupt,
                        trials=args.trials)
    for r in results:
        print(r.line())
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="btt-grand", description="Balanced tree transformation "
                                "and segmented ORBGRAND decoding.")
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("transform", help="tree-sort a parity check matrix after a random transform")
    t.add_argument("--in", dest="input", required=True, help="parity check matrix (alist)")
    t.add_argument("--out-dir", default=".", help="directory for h_tree.alist, perm.txt, a.txt, report.txt")
    t.add_argument("--identity-a", action="store_true", help="skip the random transform (A = I)")
    t.add_argument("--target-l", type=int, default=1)
    t.add_argument("--delta", type=float, default=0.15)
    t.add_argument("--max-attempts", type=int, default=1000)
    t.add_argument("--seed", type=int)
    t.set_defaults(func=cmd_transform)

    s = sub.add_parser("simulate", help="BLER and query sweep, CSV output")
    s.add_argument("--code", required=True, help="bch:<n>,<k> | alist:<path>[+gen:<path>] | random:<n>,<k>")
    s.add_argument("--ebn0", required=True, help="start:stop:step in dB, stop inclusive")
    s.add_argument("--l", default="0,1", help="comma list of segmentation depths")
    s.add_argument("--frames", type=int, default=10_000)
    s.add_argument("--max-queries", type=int, default=10**6)
    s.add_argument("--target-l", type=int, help="depth the transform must support (default max --l)")
    s.add_argument("--delta", type=float, default=0.15)
    s.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    s.add_argument("--seed", type=int)
    s.add_argument("--out", help="CSV path (default stdout)")
    s.set_defaults(func=cmd_simulate)

    o = sub.add_parser("oracle", help="exhaustive checks on a small code")
    o.add_argument("--code", required=True)
    o.add_argument("--l", type=int, default=2)
    o.add_argument("--trials", type=int, default=2)
    o.add_argument("--corrupt", action="store_true", help="flip one relation bit (negative control)")
    o.add_argument("--seed", type=int)
    o.set_defaults(func=cmd_oracle)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ParseError, ConfigurationError, SchemeError) as exc:
        print(f"btt-grand: error: {exc}", file=sys.stderr)
        return 2
    except (TransformationError, AnalysisError, ConstructionError) as exc:
        print(f"btt-grand: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"btt-grand: error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        print(f"btt-grand: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
