"""Command-line front end.

Every command produces one report rendered as csv, json, or pretty text.
csv and json carry 17 significant digits so values round-trip exactly;
pretty mode trims to 6.  Output metadata records the tool version, the
(post --args-from expansion) command line, and the seed, and never a
timestamp, so identical invocations give byte-identical files.

Exit codes: 0 success, 1 a quantitative check failed, 2 usage error.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import shlex
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .analysis import (
    FAMILY_NAMES,
    avg_fidelity_numeric,
    mismatch_report,
    mismatch_table,
    power_table,
    sweep,
)
from .channels import (
    ChannelSpec,
    GHZChannel,
    MSChannel,
    RawChannel,
    ThetaChannel,
    channel_from_config,
    named_channel,
    realize,
    three_tangle,
)
from .errors import ConvergenceError, CorrectionMismatchError
from .protocol import (
    ArbitraryInput,
    InputFamily,
    XYInput,
    XZInput,
    YZInput,
    controlled_teleport,
    input_state,
    ncf_ms_closed,
    ncf_theta_closed,
    unconditioned_teleport,
)
from .verify import check_channel_ct, format_report, run_all

SEED_ENV_VAR = "CTPOWER_SEED"
_CT_FIDELITY_GATE = 1.0 - 1e-9

_CHANNEL_CHOICES = ("ghz", "ms", "theta", "raw", "tetrahedral_xz", "ms_xy", "psi_yz")
_INPUT_CHOICES = ("arbitrary",) + FAMILY_NAMES


class UsageError(Exception):
    """Bad flags or parameter values; mapped to exit code 2."""


@dataclass(frozen=True)
class RunConfig:
    command: str
    seed: int
    output_format: str
    output_path: str | None
    command_line: str
    n_samples: int = 1


@dataclass
class Report:
    """Uniform shape every command renders: key-value scalars plus a table."""

    title: str
    scalars: list[tuple[str, object]] = field(default_factory=list)
    columns: list[str] = field(default_factory=list)
    rows: list[list[object]] = field(default_factory=list)


# ---------------------------------------------------------------------------
# value formatting

def _fmt_float(v: float, sig: int) -> str:
    v = float(v)
    if not math.isfinite(v):
        raise ValueError(f"non-finite value {v!r} in output")
    return format(v, f".{sig}g")


def _fmt_value(v: object, sig: int) -> str:
    if isinstance(v, bool) or isinstance(v, np.bool_):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return _fmt_float(float(v), sig)
    if isinstance(v, (complex, np.complexfloating)):
        c = complex(v)
        sign = "+" if c.imag >= 0 or math.isnan(c.imag) else "-"
        return f"{_fmt_float(c.real, sig)}{sign}{_fmt_float(abs(c.imag), sig)}j"
    return str(v)


def _json_scalar(v: object, sig: int) -> str:
    if isinstance(v, bool) or isinstance(v, np.bool_):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return _fmt_float(float(v), sig)
    if v is None:
        return "null"
    return json.dumps(_fmt_value(v, sig) if isinstance(v, complex) else str(v))


# ---------------------------------------------------------------------------
# renderers

def _render_csv(report: Report, config: RunConfig) -> str:
    import csv
    import io

    sig = 17
    buf = io.StringIO()
    buf.write(f"# tool: ctpower {__version__}\n")
    buf.write(f"# command: {config.command_line}\n")
    buf.write(f"# seed: {config.seed}\n")
    buf.write(f"# title: {report.title}\n")
    for name, value in report.scalars:
        buf.write(f"# {name}: {_fmt_value(value, sig)}\n")
    if report.columns:
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(report.columns)
        for row in report.rows:
            writer.writerow([_fmt_value(v, sig) for v in row])
    return buf.getvalue()


def _render_json(report: Report, config: RunConfig) -> str:
    sig = 17
    lines = ["{"]
    lines.append('  "meta": {')
    lines.append('    "tool": "ctpower",')
    lines.append(f'    "version": {json.dumps(__version__)},')
    lines.append(f'    "command": {json.dumps(config.command_line)},')
    lines.append(f'    "seed": {config.seed}')
    lines.append("  },")
    lines.append(f'  "title": {json.dumps(report.title)},')
    lines.append('  "scalars": {')
    for i, (name, value) in enumerate(report.scalars):
        comma = "," if i + 1 < len(report.scalars) else ""
        lines.append(f"    {json.dumps(name)}: {_json_scalar(value, sig)}{comma}")
    lines.append("  },")
    cols = ", ".join(json.dumps(c) for c in report.columns)
    lines.append(f'  "columns": [{cols}],')
    lines.append('  "rows": [')
    for i, row in enumerate(report.rows):
        cells = ", ".join(_json_scalar(v, sig) for v in row)
        comma = "," if i + 1 < len(report.rows) else ""
        lines.append(f"    [{cells}]{comma}")
    lines.append("  ]")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _render_pretty(report: Report, config: RunConfig) -> str:
    sig = 6
    lines = [report.title]
    lines.append(f"tool: ctpower {__version__}")
    lines.append(f"seed: {config.seed}")
    if report.scalars:
        lines.append("")
        width = max(len(name) for name, _ in report.scalars)
        for name, value in report.scalars:
            lines.append(f"{name.ljust(width)} = {_fmt_value(value, sig)}")
    if report.columns:
        cells = [[str(c) for c in report.columns]]
        for row in report.rows:
            cells.append([_fmt_value(v, sig) for v in row])
        widths = [max(len(r[i]) for r in cells) for i in range(len(report.columns))]
        lines.append("")
        lines.append("  ".join(c.ljust(w) for c, w in zip(cells[0], widths)))
        lines.append("  ".join("-" * w for w in widths))
        for row in cells[1:]:
            lines.append("  ".join(c.ljust(w) for c, w in zip(row, widths)))
    return "\n".join(lines) + "\n"


_RENDERERS = {"csv": _render_csv, "json": _render_json, "pretty": _render_pretty}


def _emit(text: str, config: RunConfig) -> None:
    if config.output_path:
        with open(config.output_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# argument plumbing

def _splice_args_from(argv: list[str]) -> list[str]:
    """Expand every ``--args-from FILE`` into the flags the file lists."""
    out: list[str] = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok == "--args-from" or tok.startswith("--args-from="):
            if "=" in tok:
                path = tok.partition("=")[2]
            else:
                i += 1
                if i >= len(argv):
                    raise UsageError("--args-from needs a file path")
                path = argv[i]
            try:
                with open(path, "r", encoding="utf-8") as fh:
                    raw = fh.read()
            except OSError as exc:
                raise UsageError(f"cannot read --args-from file: {exc}") from None
            for line in raw.splitlines():
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                tokens = shlex.split(line)
                if any(t == "--args-from" or t.startswith("--args-from=") for t in tokens):
                    raise UsageError("--args-from files cannot nest --args-from")
                out.extend(tokens)
        else:
            out.append(tok)
        i += 1
    return out


def parse_grid(text: str) -> list[float]:
    """``start:stop:step`` inclusive of both endpoints within half a step.

    A grid starting with a negative number must be passed as
    ``--d-grid=-1:1:0.1`` (or quoted with a leading space): bare ``-1:...``
    looks like an option to the flag parser.
    """
    parts = text.strip().split(":")
    if len(parts) != 3:
        raise UsageError(f"grid must be start:stop:step, got {text!r}")
    try:
        start, stop, step = (float(p) for p in parts)
    except ValueError:
        raise UsageError(f"grid values must be numbers, got {text!r}") from None
    if step <= 0:
        raise UsageError("grid step must be positive")
    if stop < start:
        raise UsageError("grid stop must not be below start")
    count = int(math.floor((stop - start) / step + 0.5)) + 1
    values = [start + i * step for i in range(count)]
    return [v for v in values if v <= stop + step / 2.0]


def _resolve_seed(args: argparse.Namespace) -> int:
    if getattr(args, "seed", None) is not None:
        seed = args.seed
    else:
        raw = os.environ.get(SEED_ENV_VAR)
        if raw is None:
            seed = 0
        else:
            try:
                seed = int(raw)
            except ValueError:
                raise UsageError(
                    f"{SEED_ENV_VAR} must be an integer, got {raw!r}"
                ) from None
    if not 0 <= seed < 2**64:
        raise UsageError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return seed


def _spec_from_args(args: argparse.Namespace) -> ChannelSpec:
    name = args.channel
    if name is None:
        raise UsageError("a channel is required (--channel)")
    if getattr(args, "config", None):
        try:
            with open(args.config, "r", encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise UsageError(f"cannot read channel config: {exc}") from None
        spec = channel_from_config(text)
        expected = {
            "ghz": GHZChannel, "ms": MSChannel, "theta": ThetaChannel, "raw": RawChannel,
        }.get(name)
        if expected is not None and not isinstance(spec, expected):
            raise UsageError(
                f"config file holds a {type(spec).__name__}, but --channel says {name!r}"
            )
        return spec
    if name == "raw":
        raise UsageError("raw channels need --config with an amplitude list")
    if name == "ghz":
        _reject_params(args, ("c", "d", "a", "b", "a2", "k"), "ghz")
        return GHZChannel()
    if name == "ms":
        _reject_params(args, ("a", "b", "a2", "k"), "ms")
        c, d = args.c, args.d
        if c is None and d is None:
            raise UsageError("ms channels need --c and/or --d")
        if c is None:
            if abs(d) > 1.0:
                raise UsageError(f"|d| must not exceed 1, got {d}")
            c = math.sqrt(1.0 - d * d)
        elif d is None:
            if abs(c) > 1.0:
                raise UsageError(f"|c| must not exceed 1, got {c}")
            d = math.sqrt(1.0 - c * c)
        return MSChannel(c=c, d=d)
    # theta family, by axis or by matched-family name
    _reject_params(args, ("c", "d"), name)
    a, b = _theta_amplitudes(args)
    if name == "theta":
        if args.k is None:
            raise UsageError("theta channels need --k {x,y,z}")
        return ThetaChannel(a=a, b=b, k=args.k)
    if args.k is not None:
        raise UsageError(f"--k is fixed by the named channel {name!r}")
    return named_channel(name, a, b)


def _theta_amplitudes(args: argparse.Namespace) -> tuple[float, float]:
    if args.a2 is not None:
        if args.a is not None or args.b is not None:
            raise UsageError("give either --a2 or --a/--b, not both")
        if not 0.0 <= args.a2 <= 1.0:
            raise UsageError(f"--a2 must lie in [0, 1], got {args.a2}")
        return math.sqrt(args.a2), math.sqrt(1.0 - args.a2)
    if args.a is None and args.b is None:
        raise UsageError("theta-family channels need --a2 or --a/--b")
    a, b = args.a, args.b
    if a is None:
        if abs(b) > 1.0:
            raise UsageError(f"|b| must not exceed 1, got {b}")
        a = math.sqrt(1.0 - b * b)
    elif b is None:
        if abs(a) > 1.0:
            raise UsageError(f"|a| must not exceed 1, got {a}")
        b = math.sqrt(1.0 - a * a)
    return a, b


def _reject_params(args: argparse.Namespace, names: tuple[str, ...], family: str) -> None:
    for n in names:
        if getattr(args, n, None) is not None:
            raise UsageError(f"--{n} does not apply to the {family!r} channel")


def _input_from_args(args: argparse.Namespace) -> InputFamily:
    kind = args.input
    theta, phi = args.theta, args.phi
    if kind == "arbitrary":
        return ArbitraryInput(theta=theta or 0.0, phi=phi or 0.0)
    if kind == "xz":
        if phi is not None:
            raise UsageError("--phi does not apply to the xz family")
        return XZInput(theta=theta or 0.0)
    if kind == "yz":
        if phi is not None:
            raise UsageError("--phi does not apply to the yz family")
        return YZInput(theta=theta or 0.0)
    if kind == "xy":
        if theta is not None:
            raise UsageError("--theta does not apply to the xy family")
        return XYInput(phi=phi or 0.0)
    raise UsageError(f"unknown input family {kind!r}")


def _describe_spec(spec: ChannelSpec) -> list[tuple[str, object]]:
    if isinstance(spec, GHZChannel):
        return [("channel", "ghz")]
    if isinstance(spec, MSChannel):
        return [("channel", "ms"), ("c", spec.c), ("d", spec.d)]
    if isinstance(spec, ThetaChannel):
        return [("channel", "theta"), ("a", spec.a), ("b", spec.b), ("k", spec.k)]
    return [("channel", "raw")]


def _describe_input(family: InputFamily) -> list[tuple[str, object]]:
    if isinstance(family, ArbitraryInput):
        return [("input", "arbitrary"), ("theta", family.theta), ("phi", family.phi)]
    if isinstance(family, XZInput):
        return [("input", "xz"), ("theta", family.theta)]
    if isinstance(family, YZInput):
        return [("input", "yz"), ("theta", family.theta)]
    return [("input", "xy"), ("phi", family.phi)]


# ---------------------------------------------------------------------------
# commands

def _cmd_channel(args: argparse.Namespace, config: RunConfig) -> tuple[Report, int]:
    args.channel = args.family
    spec = _spec_from_args(args)
    state = realize(spec)
    tangle = three_tangle(state)
    report = Report(title="channel state")
    report.scalars = _describe_spec(spec) + [
        ("tau", tangle.tau),
        ("meets_tangle_bound", tangle.meets_bound),
    ]
    report.columns = ["basis", "re", "im"]
    for idx, amp in enumerate(state.amps):
        report.rows.append([format(idx, "03b"), amp.real, amp.imag])
    return report, 0


def _cmd_ct(args: argparse.Namespace, config: RunConfig) -> tuple[Report, int]:
    spec = _spec_from_args(args)
    family = _input_from_args(args)
    basis = None
    if isinstance(spec, RawChannel):
        from .qcore import make_qubit

        basis = (make_qubit(1.0, 0.0), make_qubit(0.0, 1.0))
    run = controlled_teleport(spec, family, controller_basis=basis)
    report = Report(title="controlled teleportation branches")
    report.scalars = _describe_spec(spec) + _describe_input(family) + [
        ("total_probability", run.total_probability),
        ("min_fidelity", run.min_fidelity),
    ]
    report.columns = ["charlie_outcome", "bell_outcome", "probability", "fidelity"]
    for b in run.branches:
        report.rows.append(
            [b.charlie_outcome, b.bell_outcome.value, b.probability, b.fidelity]
        )
    code = 0 if run.min_fidelity >= _CT_FIDELITY_GATE else 1
    return report, code


def _cmd_ncf(args: argparse.Namespace, config: RunConfig) -> tuple[Report, int]:
    spec = _spec_from_args(args)
    family = _input_from_args(args)
    result = unconditioned_teleport(spec, family)
    report = Report(title="non-conditioned teleportation")
    report.scalars = _describe_spec(spec) + _describe_input(family) + [
        ("ncf", result.ncf),
        ("per_outcome_equal", result.per_outcome_equal),
    ]
    if isinstance(spec, (GHZChannel, MSChannel)):
        state = input_state(family)
        d = 0.0 if isinstance(spec, GHZChannel) else spec.d
        report.scalars.append(
            ("ncf_closed", ncf_ms_closed(state.amps[0], state.amps[1], d))
        )
    elif isinstance(spec, ThetaChannel):
        hi, lo = sorted((spec.a, spec.b), key=abs, reverse=True)
        report.scalars.append(
            ("ncf_closed", ncf_theta_closed(hi, lo, spec.k, family))
        )
    report.columns = ["element", "re", "im"]
    for r in range(2):
        for c in range(2):
            v = result.rho3.mat[r, c]
            report.rows.append([f"{r}{c}", v.real, v.imag])
    return report, 0


def _cmd_avg(args: argparse.Namespace, config: RunConfig) -> tuple[Report, int]:
    spec = _spec_from_args(args)
    if args.domain == "family" and args.family is None:
        raise UsageError("--domain family needs --family {xz,xy,yz}")
    if args.domain == "sphere" and args.family is not None:
        raise UsageError("--family only applies to --domain family")
    mean, stderr = avg_fidelity_numeric(
        spec,
        args.domain,
        method=args.method,
        family=args.family,
        n_samples=args.n_samples,
        seed=config.seed,
    )
    report = Report(title="averaged non-conditioned fidelity")
    report.scalars = _describe_spec(spec) + [
        ("domain", args.domain),
    ]
    if args.family is not None:
        report.scalars.append(("family", args.family))
    report.scalars += [
        ("method", args.method),
        ("mean", mean),
        ("stderr", stderr),
        ("control_power", 1.0 - mean),
    ]
    if args.method == "monte_carlo":
        report.scalars.append(("n_samples", args.n_samples))
    return report, 0


def _cmd_power_sweep(args: argparse.Namespace, config: RunConfig) -> tuple[Report, int]:
    specs: list[ChannelSpec] = []
    if args.a2_grid is not None and args.d_grid is not None:
        raise UsageError("give either --a2-grid or --d-grid, not both")
    if args.a2_grid is not None:
        if args.channel not in (None, "theta") and args.channel not in _CHANNEL_CHOICES[4:]:
            raise UsageError("--a2-grid applies to theta-family channels")
        axis = args.k
        if args.channel in _CHANNEL_CHOICES[4:]:
            if axis is not None:
                raise UsageError(f"--k is fixed by the named channel {args.channel!r}")
            axis = named_channel(args.channel, 1.0, 0.0).k
        if axis is None:
            raise UsageError("--a2-grid needs --k {x,y,z} or a named channel")
        for a2 in parse_grid(args.a2_grid):
            if not 0.0 <= a2 <= 1.0:
                raise UsageError(f"a2 grid value {a2!r} outside [0, 1]")
            specs.append(ThetaChannel(math.sqrt(a2), math.sqrt(1.0 - a2), axis))
    elif args.d_grid is not None:
        if args.channel not in (None, "ms"):
            raise UsageError("--d-grid applies to ms channels")
        for d in parse_grid(args.d_grid):
            if not -1.0 <= d <= 1.0:
                raise UsageError(f"d grid value {d!r} outside [-1, 1]")
            specs.append(MSChannel(math.sqrt(1.0 - d * d), d))
    else:
        specs.append(_spec_from_args(args))
    reports = sweep(specs, method=args.method, seed=config.seed)
    table = power_table(reports)
    out = Report(title="control power sweep")
    out.scalars = [("method", args.method), ("points", len(table))]
    out.columns = [
        "channel", "params", "f_bar", "c_bar", "tau",
        "meets_classical_bound", "meets_tangle_bound",
    ]
    for row in table:
        params = " ".join(
            f"{k}={_fmt_value(v, 17)}" for k, v in row["params"].items()
        )
        out.rows.append(
            [
                row["channel"], params, row["f_bar"], row["c_bar"], row["tau"],
                row["bounds"]["classical"], row["bounds"]["tangle"],
            ]
        )
    return out, 0


def _cmd_mismatch(args: argparse.Namespace, config: RunConfig) -> tuple[Report, int]:
    if args.a2 is None:
        raise UsageError("mismatch needs --a2")
    if not 0.0 <= args.a2 <= 1.0:
        raise UsageError(f"--a2 must lie in [0, 1], got {args.a2}")
    rep = mismatch_report(math.sqrt(args.a2), math.sqrt(1.0 - args.a2))
    out = Report(title="channel/input family mismatch")
    out.scalars = [
        ("a", rep.a),
        ("b", rep.b),
        ("a2", args.a2),
        ("max_mismatched_power", rep.max_mismatched_power),
        ("claim_power", rep.claim_power),
        ("claim_agrees", rep.claim_agrees),
    ]
    out.columns = ["channel_family", "input_family", "matched", "avg_ncf", "avg_power"]
    for row in mismatch_table(rep):
        out.rows.append(
            [
                row["channel_family"], row["input_family"], row["matched"],
                row["avg_ncf"], row["avg_power"],
            ]
        )
    return out, 0


def _cmd_verify(args: argparse.Namespace, config: RunConfig) -> int:
    started = time.monotonic()
    if args.channel is not None:
        spec = _spec_from_args(args)
        result = check_channel_ct(spec)
        text = (
            f"ctpower verification report\nversion: {__version__}\n"
            f"seed: {config.seed}\nmode: channel\n\n"
            f"{'PASS' if result.passed else 'FAIL'} {result.name}: {result.detail}\n"
        )
        passed = result.passed
    else:
        results = run_all(config.seed, quick=args.quick)
        text = format_report(results, seed=config.seed, quick=args.quick)
        passed = all(r.passed for r in results)
    if config.output_path:
        with open(config.output_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    print(f"elapsed: {time.monotonic() - started:.2f} s", file=sys.stderr)
    return 0 if passed else 1


# ---------------------------------------------------------------------------
# parser assembly

def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--format", choices=("csv", "json", "pretty"), default="pretty",
        help="output format (default pretty)",
    )
    parser.add_argument("--output", metavar="PATH", help="write the report to a file")
    parser.add_argument(
        "--seed", type=int, default=None,
        help=f"RNG seed (default: ${SEED_ENV_VAR} or 0)",
    )
    parser.add_argument(
        "--args-from", metavar="FILE",
        help="read extra flags from FILE, one flag (with value) per line",
    )


def _add_channel_flags(parser: argparse.ArgumentParser, positional: bool) -> None:
    if positional:
        parser.add_argument("family", choices=_CHANNEL_CHOICES, help="channel family")
    else:
        parser.add_argument("--channel", choices=_CHANNEL_CHOICES, default=None)
    parser.add_argument("--c", type=float, default=None, help="ms amplitude c")
    parser.add_argument("--d", type=float, default=None, help="ms amplitude d")
    parser.add_argument("--a", type=float, default=None, help="theta amplitude a")
    parser.add_argument("--b", type=float, default=None, help="theta amplitude b")
    parser.add_argument("--a2", type=float, default=None, help="theta weight a^2")
    parser.add_argument("--k", choices=("x", "y", "z"), default=None, help="theta axis")
    parser.add_argument("--config", metavar="FILE", help="channel config file")


def _add_input_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--input", choices=_INPUT_CHOICES, default="arbitrary",
        help="input state family (default arbitrary)",
    )
    parser.add_argument("--theta", type=float, default=None, help="polar/family angle")
    parser.add_argument("--phi", type=float, default=None, help="azimuthal angle")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ctpower",
        description="Controlled-teleportation simulator and control-power analysis.",
    )
    parser.add_argument("--version", action="version", version=f"ctpower {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("channel", help="print a channel state, its tangle, and bounds")
    _add_channel_flags(p, positional=True)
    _add_common(p)
    p.set_defaults(handler=_cmd_channel)

    p = sub.add_parser("ct", help="run controlled teleportation, one row per branch")
    _add_channel_flags(p, positional=False)
    _add_input_flags(p)
    _add_common(p)
    p.set_defaults(handler=_cmd_ct)

    p = sub.add_parser("ncf", help="teleport without the controller; report the NCF")
    _add_channel_flags(p, positional=False)
    _add_input_flags(p)
    _add_common(p)
    p.set_defaults(handler=_cmd_ncf)

    p = sub.add_parser("avg", help="average the NCF over a domain of inputs")
    _add_channel_flags(p, positional=False)
    p.add_argument("--domain", choices=("sphere", "family"), default="sphere")
    p.add_argument("--family", choices=FAMILY_NAMES, default=None)
    p.add_argument(
        "--method", choices=("quadrature", "monte_carlo"), default="quadrature"
    )
    p.add_argument("--n-samples", type=int, default=10**6, dest="n_samples")
    _add_common(p)
    p.set_defaults(handler=_cmd_avg)

    p = sub.add_parser("power-sweep", help="control power across a parameter grid")
    _add_channel_flags(p, positional=False)
    p.add_argument("--a2-grid", metavar="START:STOP:STEP", default=None)
    p.add_argument("--d-grid", metavar="START:STOP:STEP", default=None)
    p.add_argument(
        "--method", choices=("analytic", "quadrature", "monte_carlo"),
        default="analytic",
    )
    _add_common(p)
    p.set_defaults(handler=_cmd_power_sweep)

    p = sub.add_parser("mismatch", help="NCF for all channel/input family pairings")
    p.add_argument("--a2", type=float, default=None, help="channel weight a^2")
    _add_common(p)
    p.set_defaults(handler=_cmd_mismatch)

    p = sub.add_parser("verify", help="run the self-check suite")
    p.add_argument("--quick", action="store_true", help="skip Monte Carlo checks")
    _add_channel_flags(p, positional=False)
    _add_common(p)
    p.set_defaults(handler=_cmd_verify)

    return parser


def main(argv: list[str] | None = None) -> int:
    raw_argv = list(sys.argv[1:]) if argv is None else list(argv)
    parser = build_parser()
    try:
        full_argv = _splice_args_from(raw_argv)
        args = parser.parse_args(full_argv)
        seed = _resolve_seed(args)
        config = RunConfig(
            command=args.command,
            seed=seed,
            output_format=getattr(args, "format", "pretty"),
            output_path=getattr(args, "output", None),
            command_line="ctpower " + " ".join(shlex.quote(t) for t in full_argv),
            n_samples=max(1, getattr(args, "n_samples", 1) or 1),
        )
        if args.command == "verify":
            return _cmd_verify(args, config)
        report, code = args.handler(args, config)
        _emit(_RENDERERS[config.output_format](report, config), config)
        return code
    except (CorrectionMismatchError, ConvergenceError) as exc:
        print(f"ctpower: check failed: {exc}", file=sys.stderr)
        return 1
    except UsageError as exc:
        print(f"ctpower: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"ctpower: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
