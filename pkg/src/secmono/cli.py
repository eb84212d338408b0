"""Command-line entry point: ``secmono <command> ...``.

Exit status: 0 success, 2 usage or input error, 3 protocol incompatibility,
4 verification failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import io, locc, monotones as mono, quantum as q, verify
from .locc import ProtocolError
from .probdist import group

EXIT_USAGE = 2
EXIT_PROTOCOL = 3
EXIT_VERIFY = 4


class UsageError(Exception):
    pass


def _snap(v: float, tol: float) -> float:
    return 0.0 if abs(v) <= tol else v


def _fixed(v: float, tol: float) -> str:
    return f"{_snap(v, tol):.6f}"


def _short(v: float, tol: float) -> str:
    s = f"{_snap(v, tol):.6f}".rstrip("0").rstrip(".")
    return "0" if s in ("", "-0") else s


def _emit(args, payload: dict, text: str) -> None:
    if args.json:
        print(json.dumps(payload, indent=2))
    else:
        print(text)


def parse_partition(spec: str, labels) -> list[tuple[str, ...]]:
    """``"A|B,C"`` or ``"A|BC"`` (single-character labels) into blocks."""
    blocks = []
    for chunk in spec.split("|"):
        chunk = chunk.strip()
        if "," in chunk or chunk in labels:
            block = tuple(x.strip() for x in chunk.split(",") if x.strip())
        else:
            block = tuple(chunk)
        blocks.append(block)
    return blocks


# ---------------------------------------------------------------------------
# commands


def cmd_monotone(args) -> int:
    dist = io.load_distribution(args.file)
    tol = args.tolerance
    if args.all_five:
        fv = mono.five_vector(dist)
        names = ["S2(A:BC)", "S2(B:AC)", "S2(C:AB)", "S3", "T3"]
        _emit(args, dict(zip(names, (_snap(v, tol) for v in fv))), " ".join(_short(v, tol) for v in fv))
        return 0
    if args.group:
        blocks = parse_partition(args.group, dist.labels)
        dist = group(dist, blocks)
    if args.monotone is None:
        values = {"S_n": mono.s_n(dist), "T_n": mono.t_n(dist)}
    elif args.monotone == "s":
        values = {"S_n": mono.s_n(dist)}
    elif args.monotone == "t":
        values = {"T_n": mono.t_n(dist)}
    else:
        if args.lam is None:
            raise UsageError("--monotone mlambda needs --lambda")
        values = {f"M_lambda({args.lam})": mono.m_lambda(dist, args.lam)}
    if len(values) == 1:
        text = _fixed(next(iter(values.values())), tol)
    else:
        text = "\n".join(f"{k}\t{_fixed(v, tol)}" for k, v in values.items())
    _emit(args, {k: _snap(v, tol) for k, v in values.items()}, text)
    return 0


def cmd_run(args) -> int:
    dist = io.load_distribution(args.dist)
    if args.builtin and args.protocol:
        raise UsageError("give either a protocol file or --builtin, not both")
    if args.builtin:
        try:
            protocol = locc.builtin(args.builtin)
        except KeyError as exc:
            raise UsageError(str(exc.args[0])) from None
    elif args.protocol:
        protocol = io.load_protocol(args.protocol)
    else:
        raise UsageError("a protocol file or --builtin NAME is required")
    ens = locc.run_protocol(dist, protocol)
    tol = args.tolerance
    before = {"S_n": mono.s_n(dist), "T_n": mono.t_n(dist)}
    after = {k: locc.ensemble_monotone(ens, f) for k, f in (("S_n", mono.s_n), ("T_n", mono.t_n))}
    branches = [{"transcript": list(b.transcript), "weight": b.weight} for b in ens]
    payload = {
        "protocol": protocol.name,
        "branches": branches,
        "before": {k: _snap(v, tol) for k, v in before.items()},
        "after": {k: _snap(v, tol) for k, v in after.items()},
    }
    lines = [f"protocol {protocol.name}: {len(ens)} branch(es)"]
    for b in ens:
        lines.append(f"  branch {list(b.transcript)} weight {b.weight:.6f}")
    for k in before:
        lines.append(f"{k}: {_short(before[k], tol)} -> {_short(after[k], tol)}")
    if args.expect:
        target = io.load_distribution(args.expect)
        tv = locc.distance_to_target(ens, target)
        payload["tv_distance"] = tv
        payload["matches"] = tv < 1e-12
        lines.append(f"TV distance to target: {tv:.3g} ({'match' if tv < 1e-12 else 'no match'})")
    _emit(args, payload, "\n".join(lines))
    return 0


def cmd_quantum(args) -> int:
    tol = args.tolerance
    if args.ghz_demo is not None:
        demo = q.ghz_demo(args.ghz_demo)
        payload = {k: [_snap(v, tol) for v in demo[k]] for k in ("ghz", "z", "x")}
        lines = [
            f"GHZ: S={_short(demo['ghz'][0], tol)} T={_short(demo['ghz'][1], tol)}",
            f"z-measured: S={_short(demo['z'][0], tol)} T={_short(demo['z'][1], tol)}",
            f"x-measured: S={_short(demo['x'][0], tol)} T={_short(demo['x'][1], tol)}",
        ]
        for key in ("halving_z", "halving_x"):
            v = demo[key]
            payload[key] = {"bound": v.bound, "target_sum": v.target_sum, "satisfied": v.satisfied}
            lines.append(
                f"{key}: S+T={_short(v.target_sum, tol)} <= {_short(v.bound, tol)} "
                f"({'satisfied' if v.satisfied else 'violated'})"
            )
        _emit(args, payload, "\n".join(lines))
        return 0
    if args.state is None:
        raise UsageError("a state file is required unless --ghz-demo is given")
    state = io.load_state(args.state)
    if args.measure:
        bases = [b.strip() for b in args.measure.split(",")]
        dist = q.measure_all(state, bases)
        doc = io.distribution_to_dict(dist)
        text = "\n".join(f"{tuple(o)}\t{p:.6f}" for o, p in dist.support())
        _emit(args, doc, text)
        return 0
    rho = state.density_matrix() if isinstance(state, q.PureState) else state
    values = {"S_n": q.q_s_n(rho), "T_n": q.q_t_n(rho)}
    if isinstance(state, q.PureState):
        values["local_entropy_sum"] = sum(q.local_entropies(state))
    text = "\n".join(f"{k}\t{_fixed(v, tol)}" for k, v in values.items())
    _emit(args, {k: _snap(v, tol) for k, v in values.items()}, text)
    return 0


def cmd_verify(args) -> int:
    if args.trials is not None and args.trials < 1:
        raise UsageError("--trials must be at least 1")
    reports = verify.run_suite(args.suite, seed=args.seed, trials=args.trials)
    text = verify.reports_to_json(reports)
    if args.report:
        Path(args.report).write_text(text + "\n")
    if args.json or not args.report:
        print(text)
    else:
        for r in reports:
            flag = "optional" if r.check_name in verify.OPTIONAL_CHECKS else "required"
            print(f"{r.verdict.upper():4} {r.check_name} ({r.trials} trials, {len(r.failures)} failures, {flag})")
    return EXIT_VERIFY if verify.required_failures(reports) else 0


def cmd_decompose(args) -> int:
    dist = io.load_distribution(args.file)
    y = mono.canonical_decomposition(dist)
    tol = args.tolerance
    names = ["y1", "y2", "y3", "y4", "y5"]
    payload = {n: _snap(v, tol) for n, v in zip(names, y.as_tuple())}
    payload["feasible"] = y.feasible
    lines = [f"{n} ({target})\t{_short(v, tol)}" for n, target, v in zip(names, mono.YIELD_NAMES, y.as_tuple())]
    lines.append(f"feasible\t{'yes' if y.feasible else 'no'}")
    _emit(args, payload, "\n".join(lines))
    return 0


def cmd_bound(args) -> int:
    src = io.load_distribution(args.source)
    dst = io.load_distribution(args.target)
    yb = mono.yield_bound(src, dst)
    payload = {"bound": yb.bound, "limiting": yb.limiting, "ratios": dict(yb.ratios)}
    _emit(args, payload, f"{_fixed(yb.bound, args.tolerance)}\t(limited by {yb.limiting})")
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tolerance", type=float, default=1e-9)

    parser = argparse.ArgumentParser(prog="secmono", description="Multipartite secrecy monotones.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("monotone", parents=[common], help="evaluate monotones on a distribution")
    p.add_argument("file")
    p.add_argument("--monotone", choices=["s", "t", "mlambda"])
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--group", help='partition such as "A|B,C"')
    p.add_argument("--all-five", action="store_true", help="tripartite five-monotone row")
    p.set_defaults(func=cmd_monotone)

    p = sub.add_parser("run", parents=[common], help="run an LOCC protocol")
    p.add_argument("dist")
    p.add_argument("protocol", nargs="?")
    p.add_argument("--builtin", help=", ".join(pr.name for pr in locc.builtin_protocols()))
    p.add_argument("--expect", help="target distribution file")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("quantum", parents=[common], help="quantum monotones and measurements")
    p.add_argument("state", nargs="?")
    group_ = p.add_mutually_exclusive_group()
    group_.add_argument("--measure", help="comma-separated bases, e.g. z,z,z")
    group_.add_argument("--monotone", action="store_true")
    group_.add_argument("--ghz-demo", type=int, metavar="N")
    p.set_defaults(func=cmd_quantum)

    p = sub.add_parser("verify", parents=[common], help="randomized property suites")
    p.add_argument("--suite", choices=["classical", "eve", "quantum", "all"], default="all")
    p.add_argument("--trials", type=int)
    p.add_argument("--report", help="write the JSON report here")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("decompose", parents=[common], help="canonical decomposition of a tripartite distribution")
    p.add_argument("file")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("bound", parents=[common], help="yield upper bound")
    p.add_argument("source")
    p.add_argument("target")
    p.set_defaults(func=cmd_bound)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ProtocolError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PROTOCOL
    except (UsageError, ValueError, KeyError, *io.INPUT_ERRORS) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
