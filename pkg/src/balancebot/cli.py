"""Command line front end.

Subcommands: simulate (run an episode, write the CSV trace, print the
summary line), lqr (print the linearized model, synthesized gain, poles,
and Riccati residual), serve (live telemetry over WebSocket), bench
(compare the compiled and pure-Python kernels).

Exit codes: 0 success, 2 configuration error, 3 the robot fell,
4 I/O error, 5 gain synthesis failed.
"""

import argparse
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from balancebot import config as config_mod
from balancebot import telemetry
from balancebot.control import care_solve
from balancebot.errors import (
    BalancebotError,
    ConfigError,
    FallenOver,
    SynthesisFailed,
)
from balancebot.plant import linearize
from balancebot.simloop import run_episode, write_csv

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_FALL = 3
EXIT_IO = 4
EXIT_SYNTHESIS = 5

# flag spellings -> controller type names used in configs
_CONTROLLER_ALIASES = {"pd": "pd", "sfb": "state_feedback", "lqr": "lqr"}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="balancebot",
        description="Self-balancing robot simulation and control workbench.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run one episode and write a CSV trace")
    sim.add_argument("--config", metavar="PATH", help="YAML scenario file")
    sim.add_argument("--out", metavar="PATH", help="trace destination (overrides config)")
    sim.add_argument("--duration", type=float, metavar="S", help="episode length override")
    sim.add_argument("--seed", type=int, metavar="N", help="noise seed override")
    sim.add_argument("--controller", choices=sorted(_CONTROLLER_ALIASES),
                     help="controller override")
    sim.set_defaults(func=cmd_simulate)

    lqr = sub.add_parser("lqr", help="synthesize the optimal gain and print the report")
    lqr.add_argument("--config", metavar="PATH", help="YAML scenario file")
    lqr.set_defaults(func=cmd_lqr)

    srv = sub.add_parser("serve", help="run live and stream telemetry over WebSocket")
    srv.add_argument("--config", metavar="PATH", help="YAML scenario file")
    srv.add_argument("--port", type=int, default=telemetry.DEFAULT_PORT,
                     help=f"listen port (default {telemetry.DEFAULT_PORT})")
    srv.set_defaults(func=cmd_serve)

    ben = sub.add_parser("bench", help="compare compiled and pure-Python kernels")
    ben.add_argument("--ticks", type=int, default=200_000, help="ticks per timing pass")
    ben.add_argument("--repeats", type=int, default=3, help="passes per backend, best kept")
    ben.set_defaults(func=cmd_bench)

    return parser


def _load_document(path) -> config_mod.ConfigDocument:
    if path is None:
        return config_mod.load_document("")
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}")
    return config_mod.load_document(text)


def cmd_simulate(args) -> int:
    doc = _load_document(args.config)
    scenario = doc.scenario
    if args.duration is not None:
        scenario = replace(scenario, duration=args.duration)
    if args.seed is not None:
        scenario = replace(scenario, seed=args.seed)
    if args.controller is not None:
        ctl = replace(scenario.controller, type=_CONTROLLER_ALIASES[args.controller])
        scenario = replace(scenario, controller=ctl)

    result = run_episode(scenario)
    out_path = args.out if args.out is not None else doc.output.trace
    try:
        with open(out_path, "w", newline="") as stream:
            write_csv(result.rows, stream, doc.output.downsample)
    except OSError as exc:
        print(f"I/O error: cannot write trace {out_path}: {exc}", file=sys.stderr)
        return EXIT_IO
    print(result.summary.line())
    return EXIT_FALL if result.fell else EXIT_OK


def _matrix_lines(name: str, mat: np.ndarray) -> list:
    lines = [f"{name} ="]
    for row in np.atleast_2d(mat):
        lines.append("  " + "  ".join(f"{v:14.9f}" for v in row))
    return lines


def lqr_report(A, B, K, eigs, residual) -> str:
    """Fixed-layout synthesis report; the K line is a YAML flow list, so it
    can be pasted into a config as controller k."""
    lines = _matrix_lines("A", A)
    lines += _matrix_lines("B", B)
    lines.append("K = [" + ", ".join(f"{v:.9f}" for v in K) + "]")
    lines.append("closed-loop eigenvalues:")
    for z in sorted(eigs, key=lambda z: (z.real, z.imag)):
        lines.append(f"  {z.real:.9f} {z.imag:+.9f}j")
    lines.append(f"CARE residual = {residual:.3e}")
    return "\n".join(lines)


def cmd_lqr(args) -> int:
    doc = _load_document(args.config)
    if doc.lqr_debug is not None:
        dbg = doc.lqr_debug
        A = np.array([[dbg.a]])
        B = np.array([[dbg.b]])
        Q = np.array([[dbg.q]])
        R = np.array([[dbg.r]])
    else:
        ss = linearize(doc.scenario.plant)
        w = doc.scenario.controller.weights
        A, B = ss.A, ss.B
        Q, R = w.q_array(), np.array([[w.R]])

    P = care_solve(A, B, Q, R)
    R_inv = np.linalg.inv(R)
    K = (R_inv @ B.T @ P).reshape(-1)
    eigs = np.linalg.eigvals(A - B @ K.reshape(1, -1))
    if eigs.real.max() >= 0:
        raise SynthesisFailed(
            f"closed loop not stable: max Re(eig) = {eigs.real.max():.3e}"
        )
    residual = np.abs(A.T @ P + P @ A - P @ B @ R_inv @ B.T @ P + Q).max()
    print(lqr_report(A, B, K, eigs, residual))
    return EXIT_OK


def cmd_serve(args) -> int:
    doc = _load_document(args.config)
    try:
        telemetry.serve_scenario(doc.scenario, port=args.port)
    except KeyboardInterrupt:
        pass
    return EXIT_OK


def cmd_bench(args) -> int:
    from balancebot import bench

    bench.run_bench(ticks=args.ticks, repeats=args.repeats)
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SynthesisFailed as exc:
        print(f"synthesis failed: {exc}", file=sys.stderr)
        return EXIT_SYNTHESIS
    except FallenOver as exc:
        print(f"fell: {exc}", file=sys.stderr)
        return EXIT_FALL
    except BalancebotError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
