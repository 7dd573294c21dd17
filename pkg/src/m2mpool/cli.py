"""Command-line front end: dimensioning, CLT validation, simulation, sweeps.

Configuration precedence is flag > config file (plain key=value lines) >
per-command default > global default.  Every command resolves and validates
its whole configuration before computing anything, computes everything
before writing anything, and writes CSV atomically (temp file + rename), so
an invalid invocation never leaves partial output.  With --out the CSV goes
to that file and a short human summary to stdout; without --out the CSV
itself is stdout and the summary moves to stderr.
"""

from __future__ import annotations

import argparse
import os
import sys
import tempfile
from typing import Callable, Sequence

from .analytic import (
    OnePerRI,
    PoissonPerRI,
    SystemParams,
    demand_summary,
    dimension_capacity,
    failure_bound,
)
from .errors import (
    IndeterminateEstimateError,
    InfeasibleGeometryError,
    InfeasibleTargetError,
    ParameterError,
    UnsupportedArrivalError,
)
from .lte import QAM64_BITS_PER_RE, QPSK_BITS_PER_RE, LteProfile, build_pool_plan
from .numerics import q_function
from .sim import SchedulerPolicy, estimate_failure_prob, ks_distance, sample_demand

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INFEASIBLE_TARGET = 2
EXIT_INFEASIBLE_GEOMETRY = 3
EXIT_IO = 4

_SUBFRAME_SECONDS = 1e-3
_MODULATION_BITS = {"qpsk": QPSK_BITS_PER_RE, "qam64": QAM64_BITS_PER_RE}


def _choice(*allowed: str) -> Callable[[str], str]:
    def convert(value: str) -> str:
        if value not in allowed:
            raise ParameterError(f"expected one of {', '.join(allowed)}, got {value!r}")
        return value

    return convert


_CONVERTERS: dict[str, Callable[[str], object]] = {
    "devices": int,
    "pe": float,
    "max_attempts": int,
    "target_eps": float,
    "arrival": _choice("poisson", "one-per-ri"),
    "load": float,
    "report_bytes": int,
    "modulation": _choice("qpsk", "qam64"),
    "bandwidth_rbs": int,
    "m2m_rbs": int,
    "ri_seconds": float,
    "runs": int,
    "seed": int,
    "policy": _choice("random", "fifo"),
    "capacity": int,
}

GLOBAL_DEFAULTS: dict[str, object] = {
    "devices": 30_000,
    "pe": 0.1,
    "max_attempts": 10,
    "target_eps": 1e-3,
    "arrival": "poisson",
    "load": 1.0,
    "report_bytes": 100,
    "modulation": "qpsk",
    "bandwidth_rbs": 25,
    "m2m_rbs": None,
    "ri_seconds": 60.0,
    "runs": 100_000,
    "seed": 1,
    "policy": "random",
    "capacity": None,
}

COMMAND_DEFAULTS: dict[str, dict[str, object]] = {
    "validate-clt": {"devices": 100},
    "sweep": {"runs": 0},
}


class _Parser(argparse.ArgumentParser):
    # usage problems exit with code 1, not argparse's default 2
    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_common_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--devices", type=int, metavar="N", help="number of reporting devices")
    sub.add_argument("--pe", type=float, metavar="P", help="per-transmission reception failure probability")
    sub.add_argument("--max-attempts", type=int, metavar="L", dest="max_attempts",
                     help="retry limit per report")
    sub.add_argument("--target-eps", type=float, metavar="E", dest="target_eps",
                     help="target report-failure probability")
    sub.add_argument("--arrival", choices=["poisson", "one-per-ri"],
                     help="report arrival model per interval")
    sub.add_argument("--load", type=float, metavar="X",
                     help="mean reports per interval for the poisson model (simulation only unless 1)")
    sub.add_argument("--report-bytes", type=int, metavar="RS", dest="report_bytes",
                     help="report size in bytes")
    sub.add_argument("--modulation", choices=["qpsk", "qam64"], help="uplink modulation")
    sub.add_argument("--bandwidth-rbs", type=int, metavar="B", dest="bandwidth_rbs",
                     help="system bandwidth in RBs per subframe")
    sub.add_argument("--m2m-rbs", type=int, metavar="Y", dest="m2m_rbs",
                     help="RBs per subframe reserved for reporting (default: whole bandwidth)")
    sub.add_argument("--ri-seconds", type=float, metavar="T", dest="ri_seconds",
                     help="reporting interval length in seconds")
    sub.add_argument("--runs", type=int, metavar="R", help="simulation replications")
    sub.add_argument("--seed", type=int, metavar="S", help="master seed")
    sub.add_argument("--out", metavar="PATH", help="CSV output path (default: stdout)")
    sub.add_argument("--config", metavar="PATH", help="key=value config file")


def build_parser() -> _Parser:
    parser = _Parser(prog="m2mpool", description=__doc__.split("\n\n")[0])
    commands = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    dim = commands.add_parser("dimension", help="dimension the shared pool and lay it out")
    _add_common_flags(dim)

    clt = commands.add_parser("validate-clt", help="compare sampled demand against its Gaussian model")
    _add_common_flags(clt)

    sim = commands.add_parser("simulate", help="estimate the empirical report-failure probability")
    _add_common_flags(sim)
    sim.add_argument("--policy", choices=["random", "fifo"], help="shared-pool scheduler")
    sim.add_argument("--capacity", type=int, metavar="C",
                     help="shared-pool capacity in transmissions (default: dimensioned)")

    swp = commands.add_parser("sweep", help="dimension across a parameter range, one CSV row per point")
    _add_common_flags(swp)
    swp.add_argument("--sweep", metavar="VAR:START:STOP:STEP", dest="sweep",
                     help="axis to sweep: devices or report-bytes")
    swp.add_argument("--policy", choices=["random", "fifo"], help="scheduler for the optional simulation check")
    return parser


def _load_config(path: str) -> dict[str, str]:
    values: dict[str, str] = {}
    with open(path, encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ParameterError(f"{path}:{lineno}: expected key=value, got {raw.strip()!r}")
            key, _, value = line.partition("=")
            key = key.strip().replace("-", "_")
            if key not in _CONVERTERS:
                raise ParameterError(f"{path}:{lineno}: unknown config key {key!r}")
            values[key] = value.strip()
    return values


class _Config:
    """Fully resolved run configuration."""

    def __init__(self, args: argparse.Namespace) -> None:
        file_values = _load_config(args.config) if args.config else {}
        overrides = COMMAND_DEFAULTS.get(args.command, {})
        self.explicit: set[str] = set()
        for key, convert in _CONVERTERS.items():
            flag_value = getattr(args, key, None)
            if flag_value is not None:
                value = flag_value
                self.explicit.add(key)
            elif key in file_values:
                try:
                    value = convert(file_values[key])
                except ParameterError:
                    raise
                except (TypeError, ValueError) as exc:
                    raise ParameterError(
                        f"invalid config value {key}={file_values[key]!r}"
                    ) from exc
                self.explicit.add(key)
            elif key in overrides:
                value = overrides[key]
            else:
                value = GLOBAL_DEFAULTS[key]
            setattr(self, key, value)
        self.command: str = args.command
        self.out: str | None = args.out
        self.sweep: str | None = getattr(args, "sweep", None)

    def system_params(self, *, devices: int | None = None, pe: float | None = None) -> SystemParams:
        if self.arrival == "one-per-ri":
            arrival: PoissonPerRI | OnePerRI = OnePerRI()
        else:
            arrival = PoissonPerRI(load=self.load)
        return SystemParams(
            n_devices=self.devices if devices is None else devices,
            p_e=self.pe if pe is None else pe,
            max_attempts=self.max_attempts,
            arrival=arrival,
            target_failure=self.target_eps,
        )

    def lte_profile(self, *, report_bytes: int | None = None) -> LteProfile:
        size = self.report_bytes if report_bytes is None else report_bytes
        if size < 1:
            raise ParameterError(f"report_bytes must be positive, got {size!r}")
        ri_subframes = round(self.ri_seconds / _SUBFRAME_SECONDS)
        if ri_subframes < 1:
            raise ParameterError(f"ri_seconds too small: {self.ri_seconds!r}")
        bandwidth = self.bandwidth_rbs
        return LteProfile(
            rbs_per_subframe_total=bandwidth,
            m2m_rbs_per_subframe=self.m2m_rbs if self.m2m_rbs is not None else bandwidth,
            bits_per_re=_MODULATION_BITS[self.modulation],
            report_size_bits=8 * size,
            ri_subframes=ri_subframes,
        )

    def scheduler(self) -> SchedulerPolicy:
        return SchedulerPolicy.RANDOM_UNIFORM if self.policy == "random" else SchedulerPolicy.FIFO

    def say(self, message: str) -> None:
        print(message, file=sys.stdout if self.out else sys.stderr)


def _write_csv(path: str | None, header: Sequence[str], rows: Sequence[Sequence[str]]) -> None:
    text = "\n".join([",".join(header), *(",".join(row) for row in rows)]) + "\n"
    if path is None:
        sys.stdout.write(text)
        return
    target = os.path.abspath(path)
    fd, tmp = tempfile.mkstemp(dir=os.path.dirname(target), prefix=".m2mpool-", suffix=".csv")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            handle.write(text)
        os.replace(tmp, target)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def _fmt(value: float) -> str:
    return f"{value:.10g}"


def cmd_dimension(cfg: _Config) -> int:
    params = cfg.system_params()
    profile = cfg.lte_profile()
    summary = demand_summary(params)
    capacity = dimension_capacity(params)
    plan = build_pool_plan(params, profile, capacity)
    cfg.say(
        f"N={params.n_devices} pe={params.p_e:g} L={params.max_attempts} eps={params.target_failure:g}: "
        f"C_min={capacity}, mu={summary.mean:.1f}, sigma={summary.std:.2f}, "
        f"pool={plan.total_subframes} subframes (X_P={plan.preallocated_subframes}, "
        f"X_C={plan.common_subframes}), fraction={plan.capacity_fraction:.4f}, "
        f"worst-case delay {plan.worst_case_delay_seconds:.3f} s"
    )
    header = ["N", "pe", "L", "eps", "mu", "sigma", "C_min", "r_rbs", "alpha",
              "X_P", "X_C", "X", "fraction", "delay_s"]
    row = [
        str(params.n_devices), _fmt(params.p_e), str(params.max_attempts),
        _fmt(params.target_failure), f"{summary.mean:.6f}", f"{summary.std:.6f}",
        str(capacity), str(plan.rbs_per_report), f"{plan.alpha:.6f}",
        str(plan.preallocated_subframes), str(plan.common_subframes),
        str(plan.total_subframes), f"{plan.capacity_fraction:.6f}",
        f"{plan.worst_case_delay_seconds:.3f}",
    ]
    _write_csv(cfg.out, header, [row])
    return EXIT_OK


def _gaussian_cdf(x: float) -> float:
    return 1.0 - q_function(x)


def cmd_validate_clt(cfg: _Config) -> int:
    if cfg.runs < 1:
        raise ParameterError(f"validate-clt needs runs >= 1, got {cfg.runs!r}")
    pe_values = [cfg.pe] if "pe" in cfg.explicit else [0.1, 0.4]
    header = ["pe", "value", "empirical_pdf", "empirical_cdf", "gaussian_pdf", "gaussian_cdf"]
    rows: list[list[str]] = []
    for pe in pe_values:
        params = cfg.system_params(pe=pe)
        hist = sample_demand(params, cfg.runs, cfg.seed)
        summary = demand_summary(params)
        distance = ks_distance(hist, summary)
        cfg.say(
            f"pe={pe:g}: ks={distance:.5f}, empirical mean {hist.mean():.4f} "
            f"vs analytic {summary.mean:.4f}, runs={hist.runs}"
        )
        sigma = summary.std
        cumulative = 0
        for value in range(min(hist.counts), max(hist.counts) + 1):
            count = hist.counts.get(value, 0)
            cumulative += count
            lo = (value - 0.5 - summary.mean) / sigma
            hi = (value + 0.5 - summary.mean) / sigma
            rows.append([
                _fmt(pe), str(value), _fmt(count / hist.runs), _fmt(cumulative / hist.runs),
                _fmt(_gaussian_cdf(hi) - _gaussian_cdf(lo)), _fmt(_gaussian_cdf(hi)),
            ])
    _write_csv(cfg.out, header, rows)
    return EXIT_OK


def cmd_simulate(cfg: _Config) -> int:
    if cfg.runs < 1:
        raise ParameterError(f"simulate needs runs >= 1, got {cfg.runs!r}")
    params = cfg.system_params()
    if cfg.capacity is not None:
        capacity = cfg.capacity
    else:
        try:
            capacity = dimension_capacity(params)
        except UnsupportedArrivalError as exc:
            raise ParameterError(
                "dimensioning needs unit Poisson load; pass --capacity explicitly"
            ) from exc
    estimate = estimate_failure_prob(params, capacity, cfg.scheduler(), cfg.runs, cfg.seed)
    try:
        bound = failure_bound(capacity, demand_summary(params), params.p_e, params.max_attempts)
        bound_text = _fmt(bound)
    except UnsupportedArrivalError:
        bound_text = ""
    cfg.say(
        f"N={params.n_devices} pe={params.p_e:g} L={params.max_attempts} C={capacity} "
        f"policy={cfg.policy}: p_hat={estimate.p_hat:.6g} "
        f"ci=[{estimate.ci_low:.6g}, {estimate.ci_high:.6g}]"
        + (f" bound={bound_text}" if bound_text else "")
    )
    header = ["N", "pe", "L", "capacity", "policy", "intervals", "reports", "failures",
              "p_hat", "ci_low", "ci_high", "bound"]
    row = [
        str(params.n_devices), _fmt(params.p_e), str(params.max_attempts), str(capacity),
        cfg.policy, str(cfg.runs), str(estimate.reports_total), str(estimate.reports_failed),
        _fmt(estimate.p_hat), _fmt(estimate.ci_low), _fmt(estimate.ci_high), bound_text,
    ]
    _write_csv(cfg.out, header, [row])
    return EXIT_OK


def _parse_sweep(text: str | None) -> tuple[str, int, int, int]:
    if not text:
        raise ParameterError("sweep requires --sweep VAR:START:STOP:STEP")
    parts = text.split(":")
    if len(parts) != 4:
        raise ParameterError(f"expected VAR:START:STOP:STEP, got {text!r}")
    var = parts[0].strip().replace("_", "-")
    if var not in ("devices", "report-bytes"):
        raise ParameterError(f"sweep variable must be devices or report-bytes, got {parts[0]!r}")
    try:
        start, stop, step = (int(p) for p in parts[1:])
    except ValueError as exc:
        raise ParameterError(f"sweep bounds must be integers: {text!r}") from exc
    if step <= 0:
        raise ParameterError(f"sweep step must be positive, got {step}")
    return var, start, stop, step


def cmd_sweep(cfg: _Config) -> int:
    var, start, stop, step = _parse_sweep(cfg.sweep)
    header = ["N", "rs_bytes", "mu", "sigma", "C_min", "r_rbs", "X_P", "X_C",
              "fraction", "p_hat", "ci_high"]
    rows: list[list[str]] = []
    for value in range(start, stop + 1, step):
        devices = value if var == "devices" else None
        report_bytes = value if var == "report-bytes" else None
        params = cfg.system_params(devices=devices)
        profile = cfg.lte_profile(report_bytes=report_bytes)
        summary = demand_summary(params)
        capacity = dimension_capacity(params)
        plan = build_pool_plan(params, profile, capacity)
        p_hat_text = ci_high_text = ""
        if cfg.runs > 0:
            estimate = estimate_failure_prob(params, capacity, cfg.scheduler(), cfg.runs, cfg.seed)
            p_hat_text = _fmt(estimate.p_hat)
            ci_high_text = _fmt(estimate.ci_high)
        rows.append([
            str(params.n_devices),
            str(report_bytes if report_bytes is not None else cfg.report_bytes),
            f"{summary.mean:.6f}", f"{summary.std:.6f}", str(capacity),
            str(plan.rbs_per_report), str(plan.preallocated_subframes),
            str(plan.common_subframes), f"{plan.capacity_fraction:.6f}",
            p_hat_text, ci_high_text,
        ])
    cfg.say(f"sweep {var} {start}..{stop} step {step}: {len(rows)} points")
    _write_csv(cfg.out, header, rows)
    return EXIT_OK


_COMMANDS = {
    "dimension": cmd_dimension,
    "validate-clt": cmd_validate_clt,
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = _Config(args)
        return _COMMANDS[args.command](cfg)
    except (ParameterError, UnsupportedArrivalError, IndeterminateEstimateError) as exc:
        print(f"m2mpool: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InfeasibleTargetError as exc:
        print(f"m2mpool: infeasible reliability target: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE_TARGET
    except InfeasibleGeometryError as exc:
        print(f"m2mpool: infeasible geometry: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE_GEOMETRY
    except OSError as exc:
        print(f"m2mpool: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
