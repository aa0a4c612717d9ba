"""Command-line front end: verification suites, transforms and round trips.

Exit codes: 0 pass, 1 verification failure, 2 configuration error,
3 numerical-environment error (quadrature failure, or truncation under
``--strict``).
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import tempfile
import time
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__ as BUILD_ID
from . import classical, quantum, special, transform
from .geometry import sample_spatial
from .quadrature import QuadratureError
from .reports import RelationRow, VerificationReport

EXIT_PASS, EXIT_FAIL, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3

COMMANDS = ("verify-classical", "verify-quantum", "transform")
DIRECTIONS = ("forward", "inverse", "roundtrip", "plancherel", "ggpath")
FORMATS = ("json", "csv", "both")

#: tolerance keys accepted by the transform command
TRANSFORM_TOLERANCES = {
    "roundtrip": 1e-2,
    "plancherel": 1e-2,
    "triangle": 1e-4,
    "gg_inverse": 5e-2,
    "spectral_tail": 1e-8,
}

#: --quad keys for the two verification suites (sampling sizes and chart rule)
CLASSICAL_QUAD = ("points", "ladder_points", "jacobi_points", "jacobi_triples", "radius_scale")
QUANTUM_QUAD = ("sphere_degree", "radial_order", "radius")

CONFIG_KEYS = ("command", "seed", "tolerance", "quad", "out", "format", "strict", "rho-grid",
               "function", "param", "direction", "input", "points")


class ConfigError(ValueError):
    """Invalid command line or configuration file."""


@dataclass
class RunConfig:
    command: str
    seed: int = 0
    tolerances: dict = field(default_factory=dict)
    quad: dict = field(default_factory=dict)
    out: Path = Path("hypersga-out")
    fmt: str = "json"
    strict: bool = False
    rho_grid: tuple | None = None
    function: str | None = None
    params: dict = field(default_factory=dict)
    direction: str = "roundtrip"
    input: Path | None = None
    points: int = 64


# -- parsing --------------------------------------------------------------------------

def _pair(text: str) -> tuple[str, str]:
    key, sep, val = text.partition("=")
    if not sep or not key.strip():
        raise ConfigError(f"expected key=value, got {text!r}")
    return key.strip(), val.strip()


def _float_list(text: str) -> tuple:
    try:
        return tuple(float(v) for v in text.replace(" ", "").replace("\u2212", "-").split(",") if v)
    except ValueError as exc:
        raise ConfigError(f"bad number list {text!r}") from exc


def read_config_file(path) -> list[tuple[str, str]]:
    """``key=value`` lines; ``#`` starts a comment; repeatable keys may recur."""
    entries = []
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, val = _pair(line)
        if key not in CONFIG_KEYS:
            raise ConfigError(f"{path}:{n}: unknown key {key!r}")
        entries.append((key, val))
    return entries


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, help="seed for all sampled points (default 0)")
    common.add_argument("--tolerance", action="append", metavar="REL=VAL",
                        help="override a relation tolerance; repeatable")
    common.add_argument("--quad", action="append", metavar="KEY=VAL",
                        help="override a quadrature or sampling size; repeatable")
    common.add_argument("--out", help="output directory (default hypersga-out)")
    common.add_argument("--format", choices=FORMATS, help="report format (default json)")
    common.add_argument("--strict", action="store_true", default=None,
                        help="treat truncation warnings as errors (exit 3)")
    common.add_argument("--rho-grid", metavar="LIST", help="comma-separated rho values")
    common.add_argument("--config", metavar="FILE", help="key=value file; flags win")

    p = argparse.ArgumentParser(
        prog="hypersga",
        description="Verification suites and spectral transforms on the hyperboloid H^3.",
        epilog="Exit codes: 0 pass, 1 verification failure, 2 configuration error, "
               "3 numerical-environment error.",
    )
    p.add_argument("--version", action="version", version=f"hypersga {BUILD_ID}")
    sub = p.add_subparsers(dest="command", metavar="COMMAND")
    qspec = transform.QuadratureSpec()
    sub.add_parser("verify-classical", parents=[common],
                   help="Dirac-bracket algebra, restrictive relations, Jacobi, Casimir",
                   description="--quad keys (defaults): points=200, ladder_points=50, jacobi_points=20, "
                   "jacobi_triples=20, radius_scale=2.0. Tolerance keys (defaults): "
                   + _defaults(classical.DEFAULT_TOLERANCES))
    sub.add_parser("verify-quantum", parents=[common],
                   help="eigenvalues, radial ODE, ladders, hermiticity, power ladder",
                   description="--quad keys (defaults): " + _defaults(vars(quantum.ChartQuadrature()))
                   + ". --rho-grid default: " + ",".join(map(str, quantum.DEFAULT_RHO_GRID))
                   + ". Tolerance keys (defaults): "
                   + _defaults({**quantum.DEFAULT_TOLERANCES, **special.DEFAULT_TOLERANCES}))
    tp = sub.add_parser("transform", parents=[common],
                        help="forward / inverse / roundtrip / plancherel / ggpath",
                        description="--quad keys (defaults): "
                        + _defaults({k: getattr(qspec, k) for k in qspec.KEYS})
                        + ". Tolerance keys (defaults): " + _defaults(TRANSFORM_TOLERANCES)
                        + ". Functions: " + ", ".join(transform.BUILTINS) + ".")
    tp.add_argument("direction", nargs="?", choices=DIRECTIONS, help="default roundtrip")
    tp.add_argument("--function", help="test function name (default radial_gaussian)")
    tp.add_argument("--param", action="append", metavar="KEY=VAL",
                    help="test function parameter (numbers or comma lists); repeatable")
    tp.add_argument("--input", help="spectral CSV for the inverse direction")
    tp.add_argument("--points", type=int, help="seeded evaluation points for inverse (default 64)")
    return p


def _defaults(table: dict) -> str:
    return ", ".join(f"{k}={'auto' if v is None else v}" for k, v in table.items())


def _param_value(text: str):
    vals = _float_list(text)
    return vals[0] if len(vals) == 1 and "," not in text else vals


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Merge the config file (if any) and the flags; flags win."""
    file_entries = read_config_file(args.config) if args.config else []
    file_single: dict[str, str] = {}
    file_multi: dict[str, list[str]] = {"tolerance": [], "quad": [], "param": []}
    for key, val in file_entries:
        if key in file_multi:
            file_multi[key].append(val)
        else:
            file_single[key] = val
    command = args.command or file_single.get("command")
    if command not in COMMANDS:
        raise ConfigError(f"command must be one of {', '.join(COMMANDS)}")
    if "command" in file_single and args.command and file_single["command"] != args.command:
        raise ConfigError("config file names a different command")
    cfg = RunConfig(command)

    def pick(flag, key):
        return flag if flag is not None else file_single.get(key)

    try:
        seed = pick(args.seed, "seed")
        if seed is not None:
            cfg.seed = int(seed)
        out = pick(args.out, "out")
        if out is not None:
            cfg.out = Path(out)
        fmt = pick(args.format, "format")
        if fmt is not None:
            if fmt not in FORMATS:
                raise ConfigError(f"format must be one of {FORMATS}")
            cfg.fmt = fmt
        strict = pick(args.strict, "strict")
        if strict is not None:
            cfg.strict = strict if isinstance(strict, bool) else str(strict).lower() in ("1", "true", "yes")
        grid = pick(args.rho_grid, "rho-grid")
        if grid is not None:
            cfg.rho_grid = _float_list(grid)
            if not cfg.rho_grid:
                raise ConfigError("empty rho grid")
        for name, flag in (("tolerance", args.tolerance), ("quad", args.quad)):
            merged = dict(_pair(t) for t in file_multi[name])
            merged.update(dict(_pair(t) for t in (flag or [])))
            target = cfg.tolerances if name == "tolerance" else cfg.quad
            for k, v in merged.items():
                target[k] = float(v) if name == "tolerance" else v
        if command == "transform":
            cfg.function = pick(args.function, "function")
            d = pick(args.direction, "direction")
            if d is not None:
                if d not in DIRECTIONS:
                    raise ConfigError(f"direction must be one of {DIRECTIONS}")
                cfg.direction = d
            inp = pick(args.input, "input")
            cfg.input = Path(inp) if inp is not None else None
            pts = pick(args.points, "points")
            if pts is not None:
                cfg.points = int(pts)
            params = dict(_pair(t) for t in file_multi["param"])
            params.update(dict(_pair(t) for t in (args.param or [])))
            cfg.params = {k: _param_value(v) for k, v in params.items()}
        else:
            stray = [k for k in ("function", "direction", "input", "points") if k in file_single]
            stray += ["param"] if file_multi["param"] else []
            if stray:
                raise ConfigError(f"keys {stray} only apply to the transform command")
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc
    return cfg


# -- output ---------------------------------------------------------------------------

def atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_report(report: VerificationReport, cfg: RunConfig, stem: str) -> list[Path]:
    written = []
    if cfg.fmt in ("json", "both"):
        p = cfg.out / f"{stem}.json"
        atomic_write(p, report.to_json() + "\n")
        written.append(p)
    if cfg.fmt in ("csv", "both"):
        p = cfg.out / f"{stem}.csv"
        atomic_write(p, report.to_csv())
        written.append(p)
    return written


def _table(header, rows) -> str:
    lines = [",".join(header)]
    lines += [",".join(repr(float(v)) if isinstance(v, (float, np.floating)) else str(v) for v in r)
              for r in rows]
    return "\n".join(lines) + "\n"


def _stamp(report: VerificationReport, cfg: RunConfig, argv) -> None:
    report.notes["command_line"] = list(argv)
    report.notes["config"] = {
        "command": cfg.command, "seed": cfg.seed, "tolerances": dict(sorted(cfg.tolerances.items())),
        "quad": dict(sorted(cfg.quad.items())), "format": cfg.fmt, "strict": cfg.strict,
        "rho_grid": list(cfg.rho_grid) if cfg.rho_grid else None,
    }
    if cfg.command == "transform":
        report.notes["config"].update(function=cfg.function, params=cfg.params, direction=cfg.direction)


def _summary(report: VerificationReport) -> str:
    lines = []
    for r in report.rows:
        lines.append(f"{'PASS' if r.passed else 'FAIL'}  {r.relation:<28} {r.tag:<20} "
                     f"residual={r.residual:.3e} tol={r.tolerance:.1e}")
    lines.append(f"{report.suite}: {'PASS' if report.passed else 'FAIL'}")
    return "\n".join(lines)


# -- commands -------------------------------------------------------------------------

def _split(tolerances: dict, *tables: dict) -> list[dict]:
    out = [{} for _ in tables]
    for k, v in tolerances.items():
        for i, t in enumerate(tables):
            if k in t:
                out[i][k] = v
                break
        else:
            raise ConfigError(f"unknown tolerance key {k!r}")
    return out


def _check_keys(overrides: dict, allowed) -> None:
    bad = sorted(set(overrides) - set(allowed))
    if bad:
        raise ConfigError(f"unknown --quad keys {bad}; allowed: {', '.join(allowed)}")


def cmd_verify_classical(cfg: RunConfig) -> VerificationReport:
    (tol,) = _split(cfg.tolerances, classical.DEFAULT_TOLERANCES)
    _check_keys(cfg.quad, CLASSICAL_QUAD)
    try:
        kw = {k: (float(v) if k == "radius_scale" else int(v)) for k, v in cfg.quad.items()}
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return classical.verify_classical(cfg.seed, tolerances=tol, **kw)


def cmd_verify_quantum(cfg: RunConfig) -> VerificationReport:
    tq, ts = _split(cfg.tolerances, quantum.DEFAULT_TOLERANCES, special.DEFAULT_TOLERANCES)
    _check_keys(cfg.quad, QUANTUM_QUAD)
    try:
        cq = quantum.ChartQuadrature(**{k: (float(v) if k == "radius" else int(v)) for k, v in cfg.quad.items()})
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    grid = cfg.rho_grid if cfg.rho_grid else quantum.DEFAULT_RHO_GRID
    if any(abs(r) < special.NEAR_POLE for r in grid):
        raise ConfigError("rho = 0 is a branch point of the ladder coefficients")
    rep = quantum.verify_quantum(cfg.seed, grid, tq, cq)
    rep.notes["rho_grid"] = list(grid)
    return rep.merge(special.verify_special(cfg.seed, ts))


def _function(cfg: RunConfig, default: str) -> transform.HyperFunction:
    name = cfg.function or default
    try:
        return transform.make_function(name, **cfg.params)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad test function {name!r}: {exc}") from exc


def cmd_transform(cfg: RunConfig, outputs: dict) -> VerificationReport:
    """Run one transform direction; extra data files are collected in ``outputs``."""
    tt = dict(TRANSFORM_TOLERANCES)
    for k, v in cfg.tolerances.items():
        if k not in tt:
            raise ConfigError(f"unknown tolerance key {k!r}")
        tt[k] = v
    try:
        quad = transform.QuadratureSpec().with_overrides(cfg.quad)
    except (KeyError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    rows: list[RelationRow] = []
    notes: dict = {"direction": cfg.direction, "quadrature": {k: getattr(quad, k) for k in quad.KEYS}}
    d = cfg.direction

    if d == "forward":
        f = _function(cfg, "radial_gaussian")
        rho = np.asarray(cfg.rho_grid) if cfg.rho_grid else None
        phi = transform.forward_transform(f, quad, rho=rho) if rho is None else \
            transform.forward_transform(f, quad, nodes=quad.sphere().nodes, rho=rho)
        if rho is not None:
            rule = quad.sphere()
            phi = transform.SpectralFunction(rule.rule_id, rule.nodes, rule.weights, phi.rho, phi.values,
                                             source_real=f.real)
        tail = transform.spectral_tail_mass(phi)
        _tail_warning(tail, tt["spectral_tail"])
        outputs[f"spectral_{f.name}.csv"] = phi
        outputs[f"rho_abs_{f.name}.csv"] = _rho_abs(phi)
        notes.update(function=f.name, spectral_tail=tail)
        rows.append(RelationRow("spectral-tail", "Eq. (3.76)", tail, tt["spectral_tail"]))

    elif d == "inverse":
        if cfg.input is None:
            raise ConfigError("inverse needs --input <spectral csv>")
        try:
            phi = transform.SpectralFunction.from_csv(cfg.input)
        except (OSError, ValueError, KeyError) as exc:
            raise ConfigError(f"cannot load {cfg.input}: {exc}") from exc
        pts = sample_spatial(cfg.points, cfg.seed, 1.0)
        rec = transform.inverse_transform(phi, pts)
        rec = np.asarray(rec, dtype=complex)
        table = [(i, *p, v.real, v.imag) for i, (p, v) in enumerate(zip(pts, rec))]
        outputs["reconstruction.csv"] = _table(["i", "x1", "x2", "x3", "re_f", "im_f"], table)
        notes.update(input=str(cfg.input), points=cfg.points)
        if cfg.function:
            f = _function(cfg, cfg.function)
            fv = f(pts)
            err = float(np.linalg.norm(rec - fv) / np.linalg.norm(fv))
            rows.append(RelationRow("pointwise-reconstruction", "Eq. (3.85)", err, tt["roundtrip"],
                                    {"function": f.name}))

    elif d == "roundtrip":
        f = _function(cfg, "radial_gaussian")
        phi = transform.forward_transform(f, quad)
        rt = transform.roundtrip_error(f, quad, phi)
        _tail_warning(rt.spectral_tail, tt["spectral_tail"])
        ref = transform.rho_refinement(f, quad)
        rows.append(RelationRow("roundtrip", "Eq. (3.76)+(3.85)", rt.rel_l2_error, tt["roundtrip"],
                                {"function": f.name, "norm": rt.norm}))
        rows.append(RelationRow("rho-order-deficit", "Eq. (3.85)", max(0.0, 2.0 - ref.min_order)
                                if ref.orders else math.inf, 1e-12,
                                {"orders": list(ref.orders), "monotone": ref.monotone}))
        outputs[f"rho_refinement_{f.name}.csv"] = _table(
            ["drho", "rel_error", "increment_to_next"],
            [(s, e, ref.increments[i] if i < len(ref.increments) else "")
             for i, (s, e) in enumerate(zip(ref.spacings, ref.errors))])
        outputs[f"rho_abs_{f.name}.csv"] = _rho_abs(phi)
        notes.update(function=f.name, spectral_tail=rt.spectral_tail,
                     rho_refinement={"spacings": list(ref.spacings), "errors": list(ref.errors),
                                     "increments": list(ref.increments), "orders": list(ref.orders)})
        print(f"relative L2 error {rt.rel_l2_error:.6e}")

    elif d == "plancherel":
        funcs = [_function(cfg, cfg.function)] if cfg.function else transform.plancherel_suite()
        res = []
        for f in funcs:
            phi = transform.forward_transform(f, quad)
            _tail_warning(transform.spectral_tail_mass(phi), tt["spectral_tail"])
            r = transform.plancherel_check(f, quad, phi)
            res.append(r)
            print(f"{r.name:<24} lhs={r.lhs:.10e} rhs={r.rhs:.10e} ratio={r.ratio:.8f}")
        ratios = np.array([r.ratio for r in res])
        spread = float((ratios.max() - ratios.min()) / ratios.mean())
        rows.append(RelationRow("plancherel-constancy", "Eq. (3.85)", spread, tt["plancherel"],
                                {"functions": [r.name for r in res]}))
        notes.update(
            measured_constant=float(ratios.mean()),
            inverse_constant=transform.INVERSE_CONSTANT,
            results=[{"function": r.name, "lhs": r.lhs, "rhs": r.rhs, "ratio": r.ratio} for r in res],
        )
        outputs["plancherel.csv"] = _table(["function", "lhs", "rhs", "ratio"],
                                           [(r.name, r.lhs, r.rhs, r.ratio) for r in res])

    elif d == "ggpath":
        f = _function(cfg, "compact_bump")
        tri = transform.consistency_triangle(f, quad)
        rows.append(RelationRow("consistency-triangle", "Eq. (3.70)+(3.74)", tri, tt["triangle"],
                                {"function": f.name}))
        pts = sample_spatial(10, cfg.seed, 0.5)
        h = transform.gg_cone_function(f, quad)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", transform.TruncationWarning)
            rec = transform.double_inverse_gg(h, pts, quad, source_real=f.real)
        for w in caught:
            warnings.warn_explicit(w.message, w.category, w.filename, w.lineno)
        fv = f(pts)
        err = float(np.max(np.abs(rec - fv)) / np.max(np.abs(fv)))
        rows.append(RelationRow("gg-double-inverse", "Eq. (3.81)", err, tt["gg_inverse"], {"points": 10}))
        notes.update(function=f.name)
    return VerificationReport(f"transform-{d}", rows, cfg.seed, notes=notes)


def _tail_warning(tail: float, tol: float) -> None:
    if tail > tol:
        warnings.warn(f"spectral tail mass {tail:.2e} exceeds {tol:.0e}", transform.TruncationWarning)


def _rho_abs(phi: transform.SpectralFunction) -> str:
    a = np.abs(phi.values)
    w = np.nan_to_num(phi.weights, nan=0.0)
    rms = np.sqrt((a**2).T @ w / max(w.sum(), 1e-300))
    return _table(["rho", "max_abs_phi", "rms_abs_phi"], zip(phi.rho, a.max(axis=0), rms))


# -- entry point ----------------------------------------------------------------------

def _config_path(argv) -> str | None:
    for i, tok in enumerate(argv):
        if tok == "--config" and i + 1 < len(argv):
            return argv[i + 1]
        if tok.startswith("--config="):
            return tok.split("=", 1)[1]
    return None


def _command_from_config(argv) -> list:
    """Prepend the config file's ``command`` when no subcommand is given."""
    if any(tok in COMMANDS for tok in argv):
        return argv
    path = _config_path(argv)
    if path is None:
        return argv
    command = dict(read_config_file(path)).get("command")
    return [command, *argv] if command in COMMANDS else argv


def run(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        argv_full = _command_from_config(argv)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        args = parser.parse_args(argv_full)
    except SystemExit as exc:
        return EXIT_PASS if exc.code == 0 else EXIT_CONFIG
    try:
        cfg = resolve_config(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    outputs: dict = {}
    t0 = time.perf_counter()
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", transform.TruncationWarning)
        try:
            if cfg.command == "verify-classical":
                report = cmd_verify_classical(cfg)
            elif cfg.command == "verify-quantum":
                report = cmd_verify_quantum(cfg)
            else:
                report = cmd_transform(cfg, outputs)
        except ConfigError as exc:
            print(f"configuration error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        except KeyError as exc:
            print(f"configuration error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        except (QuadratureError, transform.TruncationError, special.PoleError) as exc:
            print(f"numerical error: {exc}", file=sys.stderr)
            return EXIT_NUMERIC
    report.wall_time = time.perf_counter() - t0
    truncations = [w for w in caught if issubclass(w.category, transform.TruncationWarning)]
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    report.notes["truncation_warnings"] = [str(w.message) for w in truncations]
    _stamp(report, cfg, argv)

    stem = cfg.command.replace("verify-", "") if cfg.command != "transform" else f"transform_{cfg.direction}"
    written = write_report(report, cfg, stem)
    for name, payload in sorted(outputs.items()):
        path = cfg.out / name
        if isinstance(payload, transform.SpectralFunction):
            tmp = path.with_name(f".{name}.tmp")
            path.parent.mkdir(parents=True, exist_ok=True)
            payload.to_csv(tmp)
            os.replace(tmp, path)
        else:
            atomic_write(path, payload)
        written.append(path)
    print(_summary(report))
    for p in written:
        print(f"wrote {p}")
    if truncations and cfg.strict:
        return EXIT_NUMERIC
    return EXIT_PASS if report.passed else EXIT_FAIL


def main() -> None:
    sys.exit(run())
