#
# Copyright (c) 2023-present, the ctrleq authors.
# All rights reserved.
#
# This source code is licensed under the license found in the LICENSE file in
# the root directory of this source tree.
#

"""
ctrleq <drivers|reduce|verify|simulate|optimal|report> [flags]

Exit codes: 0 success, 1 invalid input, 2 failed numeric verification,
3 I/O error.
"""

import argparse
import json
import logging
import os
import sys
from pathlib import Path
from typing import Optional, Sequence, Tuple

import numpy as np

from ctrleq import __version__
from ctrleq.core.equivalence import is_control_equivalence
from ctrleq.core.inputs import DEFAULT_BOUNDS
from ctrleq.core.partition import Partition
from ctrleq.dataset import Dataset
from ctrleq.exceptions import (
    CtrleqError,
    CtrleqIOError,
    ParseError,
    ValidationError,
    VerificationError,
)
from ctrleq.generators import make_rng, random_piecewise_control
from ctrleq.io.partition import parse_partition, write_partition
from ctrleq.io.reduced import read_reduced_system, write_reduced_system
from ctrleq.io.report import write_report
from ctrleq.io.signals import (
    read_control_signal,
    read_vector,
    write_control_signal,
    write_trajectory,
)
from ctrleq.lump import (
    ControlSignal,
    ReducedSystem,
    build_reduced_system,
    lift_control,
    project_state,
)
from ctrleq.refine import DRIVERS_SPLIT, reduce_pipeline
from ctrleq.report import run_report
from ctrleq.sim.cost import CostSpec, evaluate_cost
from ctrleq.sim.integrate import DEFAULT_DT, integrate
from ctrleq.sim.optimal import DIRECTIONS, optimal_bangbang_value
from ctrleq.sim.system import LinearSystem
from ctrleq.sim.verify import verify_trajectory_equivalence
from ctrleq.suites import SCALES, SUITES, TRAJECTORY_TOL, run_suite
from ctrleq.utils import Weight, str2bounds, x2weight

logger = logging.getLogger(__name__)

LOG_LEVEL_ENV = "CTRLEQ_LOG_LEVEL"
DEFAULT_T = 1.0
COST_KEYS = frozenset(
    (
        "final",
        "state_weight",
        "state_reference",
        "control_weight",
        "control_reference",
        "norm",
    )
)


class _Parser(argparse.ArgumentParser):
    """usage errors exit with 1, 2 is reserved for failed verifications."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(1, "{}: error: {}\n".format(self.prog, message))


def configure_logging(level: Optional[str], verbose: int) -> None:
    if level is None:
        if verbose:
            level = "DEBUG" if verbose > 1 else "INFO"
        else:
            level = os.environ.get(LOG_LEVEL_ENV, "WARNING")
    logging.basicConfig(
        level=level.upper(),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )


def _bounds(args: argparse.Namespace) -> Tuple[Weight, Weight]:
    if args.bounds is None:
        return DEFAULT_BOUNDS
    try:
        return str2bounds(args.bounds, exact=args.exact)
    except ValueError as e:
        raise ValidationError("--bounds: {}".format(e)) from e


def _tol(args: argparse.Namespace) -> Optional[Weight]:
    if args.tol is None:
        return None
    try:
        return x2weight(args.tol, exact=args.exact)
    except ValueError as e:
        raise ValidationError("--tol: {}".format(e)) from e


def _grid(args: argparse.Namespace) -> Tuple[float, float]:
    return args.T or DEFAULT_T, args.dt or DEFAULT_DT


def _dataset(args: argparse.Namespace, path: str) -> Dataset:
    return Dataset(
        path,
        format=args.format,
        drivers_path=args.drivers,
        bounds=_bounds(args),
        exact=args.exact,
        symmetrize=args.symmetrize,
        _autoload=True,
    )


def _x0(args: argparse.Namespace, n: int, reduced: Optional[ReducedSystem] = None):
    """zeros by default; a per-node x0 is lumped for reduced models."""
    if args.x0 is None:
        return np.zeros(n)
    x0 = read_vector(args.x0)
    if reduced is not None and x0.shape[0] == reduced.N != n:
        return project_state(x0, reduced.blocks).astype(float)
    if x0.shape[0] != n:
        raise ValidationError(
            "--x0 has {} values, expected {}".format(x0.shape[0], n)
        )
    return x0


def cmd_drivers(args: argparse.Namespace) -> int:
    dataset = _dataset(args, args.network)
    labels = [dataset.labels[node] for node in dataset.inputs.driver_nodes]
    print("N={} K={}".format(dataset.N, dataset.K))
    print("drivers: {}".format(" ".join(labels)))
    if args.output:
        try:
            Path(args.output).write_text(
                "".join(label + "\n" for label in labels), encoding="utf-8"
            )
        except OSError as e:
            raise CtrleqIOError(e.errno, "cannot write {}".format(args.output)) from e
    return 0


def cmd_reduce(args: argparse.Namespace) -> int:
    dataset = _dataset(args, args.network)
    drivers = dataset.inputs.driver_nodes
    if args.initial:
        initial = parse_partition(args.initial, dataset.network, drivers=drivers)
    else:
        initial = Partition.drivers_split(dataset.N, drivers)
    if args.observe:
        unknown = [l for l in args.observe if not dataset.network.has_label(l)]
        if unknown:
            raise ValidationError("--observe: unknown nodes {}".format(unknown))
        initial = initial.isolate(dataset.network.index_of(l) for l in args.observe)

    partition, reduced = reduce_pipeline(
        dataset.A,
        dataset.inputs,
        initial=initial,
        tol=_tol(args),
        strict=not args.allow_non_ce,
    )
    prefix = args.output or dataset.name
    write_partition(partition, prefix + ".partition", labels=dataset.labels)
    write_reduced_system(reduced, prefix + ".reduced.json", labels=dataset.labels)
    print("N={} n={} K={} k={}".format(reduced.N, reduced.n, reduced.K, reduced.k))
    return 0


def _verify_partition(args: argparse.Namespace) -> int:
    dataset = _dataset(args, args.network)
    partition = parse_partition(
        args.partition, dataset.network, drivers=dataset.inputs.driver_nodes
    )
    check = is_control_equivalence(dataset.A, partition, _tol(args))
    print("control equivalence: {} (residual {})".format(bool(check), check.residual))
    if check.witness is not None:
        print("witness: {}".format(check.witness))

    reduced = build_reduced_system(
        dataset.A, dataset.inputs, partition, tol=_tol(args), strict=False
    )
    T, dt = _grid(args)
    inputs = dataset.inputs
    u = random_piecewise_control(
        make_rng(args.seed), inputs.lo_array(), inputs.hi_array(), T, dt
    )
    deviation = verify_trajectory_equivalence(
        dataset.A, inputs, partition, reduced, u, _x0(args, dataset.N)
    )
    print("max trajectory deviation: {:.6g}".format(deviation))
    if not check or deviation > TRAJECTORY_TOL:
        raise VerificationError(
            "{} is not a control equivalence".format(args.partition)
        )
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    if args.network is not None:
        if args.partition is None:
            raise ValidationError("verify NETWORK needs --partition")
        return _verify_partition(args)

    failed = []
    for name in args.suite or list(SUITES):
        result = run_suite(name, scale=args.scale, seed=args.seed)
        print(
            "{:<17} {} cases={} worst={:.3g} ms={:.0f}".format(
                name,
                "PASS" if result.passed else "FAIL",
                result.cases,
                result.worst,
                result.elapsed_ms,
            )
        )
        for failure in result.failures:
            print("  " + failure)
        if not result.passed:
            failed.append(name)
    if failed:
        raise VerificationError("failed suites: {}".format(", ".join(failed)))
    return 0


def _load_model(args: argparse.Namespace):
    """(system, reduced, dataset): a reduced JSON or a network file."""
    if Path(args.model).suffix == ".json":
        reduced = read_reduced_system(args.model)
        return LinearSystem.from_reduced(reduced), reduced, None
    dataset = _dataset(args, args.model)
    return LinearSystem.original(dataset.A, dataset.inputs), None, dataset


def _control(args: argparse.Namespace, system: LinearSystem) -> ControlSignal:
    """read from --u, or held at the lower bounds over the --T/--dt grid."""
    if args.u is not None:
        return read_control_signal(args.u, system.lo, system.hi, reduced=system.reduced)
    T, dt = _grid(args)
    return ControlSignal.constant(
        system.lo, T, dt, system.lo, system.hi, reduced=system.reduced
    )


def cmd_simulate(args: argparse.Namespace) -> int:
    system, reduced, dataset = _load_model(args)
    if args.lift and reduced is None:
        raise ValidationError("--lift needs a reduced model")
    cost = None
    if args.cost:
        labels = dataset.labels if dataset is not None else None
        cost = _cost_spec(args.cost, system, reduced, labels)
    u = _control(args, system)
    x0 = _x0(args, system.n_states, reduced)
    trajectory = integrate(system, u, x0, T=args.T, dt=args.dt)
    write_trajectory(trajectory, args.output or sys.stdout)
    if args.lift:
        write_control_signal(lift_control(u, reduced), args.lift)
    if cost is not None:
        # stdout carries the trajectory unless it went to a file
        print(
            "cost = {:.12g}".format(evaluate_cost(trajectory, u, cost)),
            file=sys.stdout if args.output else sys.stderr,
        )
    return 0


def _coefficient(value, path: str) -> float:
    try:
        return float(x2weight(value))
    except (TypeError, ValueError) as e:
        raise ParseError("not a cost coefficient: {!r}".format(value), path) from e


def _read_cost_file(path: str):
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except UnicodeDecodeError as e:
        raise ParseError("not valid UTF-8 ({})".format(e.reason), path) from e
    except OSError as e:
        raise CtrleqIOError(e.errno, "cannot read {}".format(path)) from e
    except json.JSONDecodeError as e:
        raise ParseError(e.msg, path, e.lineno) from e


def _final_vector(
    final, path: str, n: int, reduced: Optional[ReducedSystem], labels
) -> np.ndarray:
    if isinstance(final, dict):
        if labels is None:
            raise ValidationError("{}: node labels need a network model".format(path))
        index = {label: i for i, label in enumerate(labels)}
        c = np.zeros(len(labels))
        for label, value in final.items():
            if label not in index:
                raise ParseError("unknown node {!r}".format(label), path)
            c[index[label]] = _coefficient(value, path)
    elif isinstance(final, list):
        c = np.asarray([_coefficient(v, path) for v in final])
    else:
        raise ParseError("expected a 'final' list or mapping", path)

    if reduced is not None and c.shape[0] == reduced.N != n:
        c_hat = np.asarray([c[block[0]] for block in reduced.blocks])
        if np.any(c != c_hat[np.asarray(reduced.blocks.assignment)]):
            raise ValidationError("{}: cost is not constant on the blocks".format(path))
        return c_hat
    if c.shape[0] != n:
        raise ValidationError(
            "{}: {} coefficients for {} states".format(path, c.shape[0], n)
        )
    return c


def _cost_vector(
    path: str, n: int, reduced: Optional[ReducedSystem], labels
) -> np.ndarray:
    """
    `{"final": [c1, ...]}` or `{"final": {"label": c}}`, one coefficient per
    state. A reduced model also takes a per-node vector, if it is constant on
    every block.
    """
    data = _read_cost_file(path)
    final = data.get("final") if isinstance(data, dict) else data
    return _final_vector(final, path, n, reduced, labels)


def _reference(
    value, path: str, n: int, reduced: Optional[ReducedSystem] = None
) -> np.ndarray:
    if not isinstance(value, list):
        raise ParseError("a reference is a list of numbers", path)
    ref = np.asarray([_coefficient(v, path) for v in value])
    if reduced is not None and ref.shape[0] == reduced.N != n:
        ref = project_state(ref, reduced.blocks).astype(float)
    if ref.shape[0] != n:
        raise ValidationError(
            "{}: reference has {} values, expected {}".format(path, ref.shape[0], n)
        )
    return ref


def _cost_spec(
    path: str, system: LinearSystem, reduced: Optional[ReducedSystem], labels
) -> CostSpec:
    """
    The `simulate --cost` file: an optional `final` as for `optimal`, plus the
    running terms `state_weight`, `state_reference`, `control_weight`,
    `control_reference` and `norm`. References are constant in time.
    """
    data = _read_cost_file(path)
    if not isinstance(data, dict):
        data = {"final": data}
    unknown = sorted(set(data) - COST_KEYS)
    if unknown:
        raise ParseError("unknown cost keys: {}".format(", ".join(unknown)), path)

    n, k = system.n_states, system.n_controls
    options = {}
    if data.get("final") is not None:
        options["final"] = _final_vector(data["final"], path, n, reduced, labels)
    for key in ("state_weight", "control_weight"):
        if key in data:
            options[key] = _coefficient(data[key], path)
    if "state_reference" in data:
        options["state_reference"] = _reference(
            data["state_reference"], path, n, reduced
        )
    if "control_reference" in data:
        options["control_reference"] = _reference(data["control_reference"], path, k)
    if "norm" in data:
        options["norm"] = data["norm"]

    if reduced is not None:
        return CostSpec.for_reduced(reduced, **options)
    return CostSpec(
        partition=Partition.singletons(n),
        control_groups=tuple((l,) for l in range(k)),
        **options
    )


def cmd_optimal(args: argparse.Namespace) -> int:
    system, reduced, dataset = _load_model(args)
    labels = dataset.labels if dataset is not None else None
    c = _cost_vector(args.cost, system.n_states, reduced, labels)
    T, dt = _grid(args)
    result = optimal_bangbang_value(
        system,
        c,
        _x0(args, system.n_states, reduced),
        T=T,
        dt=dt,
        direction=args.direction,
        keep_adjoint=False,
    )
    print("V^{} = {:.12g}".format(args.direction, result.value))
    print("switches: {}".format(len(result.switching_steps())))
    if args.control_out:
        write_control_signal(result.control, args.control_out)
    if args.output:
        write_trajectory(result.trajectory, args.output)
    return 0


def cmd_report(args: argparse.Namespace) -> int:
    rows = run_report(
        args.source,
        max_workers=args.threads,
        exact=args.exact,
        symmetrize=args.symmetrize,
        tol=_tol(args),
    )
    write_report(rows, args.output or sys.stdout, timings=args.timings)
    return 0


def _network_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--format", choices=("matrix-market", "tsv"), default=None)
    parser.add_argument(
        "--drivers", default=None, help="driver list file (default: maximum matching)"
    )
    parser.add_argument(
        "--bounds", default=None, help="control bounds 'lo,hi' (default: 0,1)"
    )
    parser.add_argument("--exact", action="store_true", help="rational arithmetic")
    parser.add_argument(
        "--symmetrize", action="store_true", help="read edges as undirected"
    )


def _grid_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--x0", default=None, help="initial state (default: zeros)")
    parser.add_argument(
        "--T", type=float, default=None, help="horizon (default: {})".format(DEFAULT_T)
    )
    parser.add_argument(
        "--dt", type=float, default=None, help="step (default: {})".format(DEFAULT_DT)
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="ctrleq", description="Control equivalences of linear network dynamics."
    )
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="count", default=0)
    parser.add_argument(
        "--log-level", default=None, choices=("DEBUG", "INFO", "WARNING", "ERROR")
    )
    subparsers = parser.add_subparsers(dest="command", parser_class=_Parser)
    subparsers.required = True

    # -- drivers --
    p_drivers = subparsers.add_parser("drivers", help="minimum driver set")
    p_drivers.add_argument("network")
    _network_flags(p_drivers)
    p_drivers.add_argument("--output", "-o", default=None, help="driver list file")
    p_drivers.set_defaults(func=cmd_drivers)

    # -- reduce --
    p_reduce = subparsers.add_parser("reduce", help="coarsest control equivalence")
    p_reduce.add_argument("network")
    _network_flags(p_reduce)
    start = p_reduce.add_mutually_exclusive_group()
    start.add_argument("--initial", default=None, help="initial partition file")
    start.add_argument(
        "--drivers-split",
        action="store_true",
        help="start from {} (the default)".format(DRIVERS_SPLIT),
    )
    p_reduce.add_argument(
        "--observe", nargs="*", default=(), help="nodes kept as singletons"
    )
    p_reduce.add_argument("--tol", default=None)
    p_reduce.add_argument("--allow-non-ce", action="store_true")
    p_reduce.add_argument(
        "--output", "-o", default=None, help="output prefix (default: network name)"
    )
    p_reduce.set_defaults(func=cmd_reduce)

    # -- verify --
    p_verify = subparsers.add_parser(
        "verify", help="acceptance suites, or check one partition"
    )
    p_verify.add_argument("network", nargs="?", default=None)
    _network_flags(p_verify)
    _grid_flags(p_verify)
    p_verify.add_argument("--partition", default=None)
    p_verify.add_argument("--suite", action="append", choices=sorted(SUITES))
    p_verify.add_argument("--scale", choices=SCALES, default="quick")
    p_verify.add_argument("--seed", type=int, default=0)
    p_verify.add_argument("--tol", default=None)
    p_verify.set_defaults(func=cmd_verify)

    # -- simulate --
    p_simulate = subparsers.add_parser("simulate", help="integrate a model")
    p_simulate.add_argument("model", help="network file or reduced system JSON")
    _network_flags(p_simulate)
    _grid_flags(p_simulate)
    p_simulate.add_argument("--u", default=None, help="control CSV")
    p_simulate.add_argument("--lift", default=None, help="lifted control CSV")
    p_simulate.add_argument(
        "--cost", default=None, help="cost JSON, prints the value of the trajectory"
    )
    p_simulate.add_argument("--output", "-o", default=None)
    p_simulate.set_defaults(func=cmd_simulate)

    # -- optimal --
    p_optimal = subparsers.add_parser("optimal", help="bang-bang optimal value")
    p_optimal.add_argument("model", help="network file or reduced system JSON")
    _network_flags(p_optimal)
    _grid_flags(p_optimal)
    p_optimal.add_argument("--cost", required=True, help="final cost JSON")
    p_optimal.add_argument("--direction", choices=DIRECTIONS, default="sup")
    p_optimal.add_argument("--control-out", default=None)
    p_optimal.add_argument("--output", "-o", default=None, help="trajectory CSV")
    p_optimal.set_defaults(func=cmd_optimal)

    # -- report --
    p_report = subparsers.add_parser("report", help="reduction report")
    p_report.add_argument("source", help="manifest CSV or dataset directory")
    p_report.add_argument("--output", "-o", default=None)
    p_report.add_argument("--timings", action="store_true")
    p_report.add_argument("--threads", type=int, default=None)
    p_report.add_argument("--exact", action="store_true")
    p_report.add_argument("--symmetrize", action="store_true")
    p_report.add_argument("--tol", default=None)
    p_report.set_defaults(func=cmd_report)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level, args.verbose)
    try:
        return args.func(args)
    except CtrleqError as e:
        logger.error("%s", e)
        return getattr(e, "exit_code", 1)
    except OSError as e:
        logger.error("%s", e)
        return CtrleqIOError.exit_code
