"""Command-line front end. Configs and reports are JSON; grids are CSV."""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, ParameterSpaceError, ParseError, SchemaError, SchottkyZhuError
from .forms import QuasiformEvaluator, verify_classical, verify_expansions
from .moments import stable_cutoff
from .report import Report
from .schottky import (
    SchottkyParams,
    generator_from_canonical,
    make_generator,
    validate,
)

COMMANDS = ("eval", "partition", "npoint", "lattice", "verify")
SUITES = ("all", "ward", "genus1", "expansions", "zhu")
KINDS = ("omega", "psi1", "psi2", "omega2", "nu", "s", "theta2", "prime")
TOP_KEYS = {"generators", "command", "cutoff", "depth", "suite", "grid", "kind", "y", "index",
            "npoint", "lattice", "out", "tolerances", "adaptive"}


@dataclass
class RunSpec:
    params: SchottkyParams
    command: str
    cutoff: int = 24
    depth: int = 8
    suite: str = "all"
    grid: tuple | None = None
    kind: str = "omega"
    y: complex = 0j
    index: int = 1
    npoint: dict = field(default_factory=dict)
    lattice: dict = field(default_factory=dict)
    out: str | None = None
    tolerances: dict = field(default_factory=dict)
    adaptive: bool = True


def _complex(value, where: str) -> complex:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(value)
    if (isinstance(value, list) and len(value) == 2
            and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)):
        return complex(value[0], value[1])
    raise SchemaError(f"{where}: expected a number or [re, im], got {value!r}")


def _nat(value, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < 0:
        raise SchemaError(f"{where}: expected a non-negative integer, got {value!r}")
    return value


def _generator(entry, where: str):
    if not isinstance(entry, dict):
        raise SchemaError(f"{where}: expected an object")
    keys = set(entry)
    try:
        if keys == {"W_minus", "W_plus", "q"}:
            return make_generator(_complex(entry["W_minus"], where + ".W_minus"),
                                  _complex(entry["W_plus"], where + ".W_plus"),
                                  _complex(entry["q"], where + ".q"))
        if keys == {"w_minus", "w_plus", "rho"}:
            return generator_from_canonical(_complex(entry["w_minus"], where + ".w_minus"),
                                            _complex(entry["w_plus"], where + ".w_plus"),
                                            _complex(entry["rho"], where + ".rho"))
    except ConfigError:
        raise
    except SchottkyZhuError as exc:
        raise SchemaError(f"{where}: {exc}") from exc
    raise SchemaError(f"{where}: keys must be W_minus/W_plus/q or w_minus/w_plus/rho, got {sorted(keys)}")


def _grid(spec) -> tuple:
    parts = spec.split(",") if isinstance(spec, str) else list(spec)
    if len(parts) != 6:
        raise SchemaError("grid: expected re0,re1,im0,im1,nx,ny")
    try:
        re0, re1, im0, im1 = (float(v) for v in parts[:4])
        nx, ny = int(parts[4]), int(parts[5])
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"grid: {exc}") from exc
    if nx < 1 or ny < 1:
        raise SchemaError("grid: nx and ny must be positive")
    return re0, re1, im0, im1, nx, ny


def parse_config(data: dict, where: str = "config") -> RunSpec:
    if not isinstance(data, dict):
        raise SchemaError(f"{where}: top level must be an object")
    unknown = set(data) - TOP_KEYS
    if unknown:
        raise SchemaError(f"{where}: unknown keys {sorted(unknown)}")
    gens = data.get("generators")
    if not isinstance(gens, list) or not gens:
        raise SchemaError(f"{where}.generators: expected a non-empty list")
    params = SchottkyParams(tuple(_generator(g, f"{where}.generators[{i}]") for i, g in enumerate(gens)))
    report = validate(params)
    if not report.passed:
        bad = ", ".join(f"discs {a} and {b} (margin {m:.3g})" for a, b, m, _ in report.failures())
        raise ParameterSpaceError(f"disc condition violated: {bad}")
    command = data.get("command", "verify")
    if command not in COMMANDS:
        raise SchemaError(f"{where}.command: must be one of {COMMANDS}")
    spec = RunSpec(params, command)
    if "cutoff" in data:
        spec.cutoff = _nat(data["cutoff"], where + ".cutoff")
    if "depth" in data:
        spec.depth = _nat(data["depth"], where + ".depth")
    if "suite" in data:
        if data["suite"] not in SUITES:
            raise SchemaError(f"{where}.suite: must be one of {SUITES}")
        spec.suite = data["suite"]
    if "grid" in data:
        spec.grid = _grid(data["grid"])
    if "kind" in data:
        if data["kind"] not in KINDS:
            raise SchemaError(f"{where}.kind: must be one of {KINDS}")
        spec.kind = data["kind"]
    if "y" in data:
        spec.y = _complex(data["y"], where + ".y")
    if "index" in data:
        spec.index = _nat(data["index"], where + ".index")
    if "npoint" in data:
        spec.npoint = _npoint_section(data["npoint"], where + ".npoint")
    if "lattice" in data:
        spec.lattice = _lattice_section(data["lattice"], where + ".lattice")
    if "out" in data:
        if not isinstance(data["out"], str):
            raise SchemaError(f"{where}.out: expected a path string")
        spec.out = data["out"]
    if "tolerances" in data:
        tols = data["tolerances"]
        if not isinstance(tols, dict) or not all(isinstance(v, (int, float)) for v in tols.values()):
            raise SchemaError(f"{where}.tolerances: expected an object of numbers")
        spec.tolerances = dict(tols)
    if "adaptive" in data:
        if not isinstance(data["adaptive"], bool):
            raise SchemaError(f"{where}.adaptive: expected true or false")
        spec.adaptive = data["adaptive"]
    return spec


def _npoint_section(sec, where):
    if not isinstance(sec, dict) or set(sec) - {"h_points", "charges", "loop_charges"}:
        raise SchemaError(f"{where}: allowed keys are h_points, charges, loop_charges")
    h = [_complex(v, f"{where}.h_points[{i}]") for i, v in enumerate(sec.get("h_points", []))]
    charges = []
    for i, c in enumerate(sec.get("charges", [])):
        if not isinstance(c, list) or len(c) != 2:
            raise SchemaError(f"{where}.charges[{i}]: expected [gamma, point]")
        charges.append((_complex(c[0], f"{where}.charges[{i}][0]"), _complex(c[1], f"{where}.charges[{i}][1]")))
    loops = sec.get("loop_charges")
    if loops is not None:
        loops = [_complex(v, f"{where}.loop_charges[{i}]") for i, v in enumerate(loops)]
    return {"h_points": h, "charges": charges, "loop_charges": loops}


def _lattice_section(sec, where):
    if not isinstance(sec, dict) or set(sec) - {"gram", "radius"} or "gram" not in sec:
        raise SchemaError(f"{where}: expected {{gram, radius}}")
    from .heisenberg import LatticeSpec
    try:
        return {"spec": LatticeSpec(tuple(map(tuple, sec["gram"])), float(sec.get("radius", 6.0)))}
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"{where}: {exc}") from exc


def load_config(path: str) -> RunSpec:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return parse_config(data, where=os.path.basename(path))


# ---------------------------------------------------------------- output

def _num(x: float):
    x = float(x)
    if math.isnan(x) or math.isinf(x):
        return None
    return float(f"{x:.17g}")


def _cnum(z) -> list:
    z = complex(z)
    return [_num(z.real), _num(z.imag)]


def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


def _write_atomic(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    if os.path.exists(path) and not os.path.isfile(path):
        # devices and pipes cannot be renamed over; write straight through
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".schottky-zhu-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _report_json(rep: Report, extra: dict | None = None) -> str:
    rows = [{"equation_id": r.identity, "max_residual": _num(r.residual), "tolerance": _num(r.tolerance),
             "pass": r.passed} for r in rep.rows]
    payload = {"pass": rep.passed, "rows": rows}
    if extra:
        payload.update(extra)
    return json.dumps(payload, indent=2) + "\n"


# ---------------------------------------------------------------- commands

def _evaluator(spec: RunSpec) -> QuasiformEvaluator:
    M = stable_cutoff(spec.params, spec.cutoff) if spec.adaptive else spec.cutoff
    return QuasiformEvaluator(spec.params, M)


def _kind_function(ev: QuasiformEvaluator, spec: RunSpec):
    y, a = spec.y, spec.index
    table = {
        "omega": lambda x: ev.omega_value(x, y),
        "psi1": lambda x: ev.psi_value(1, 0, 0, x, y),
        "psi2": lambda x: ev.psi_value(2, 0, 0, x, y),
        "omega2": lambda x: ev.omega_weight_value(2, x, y),
        "nu": lambda x: ev.nu_value(a, x),
        "s": lambda x: ev.proj_conn_value(x),
        "theta2": lambda x: ev.theta_value(2, a, 0, x),
        "prime": lambda x: ev.prime_form_value(complex(x), y),
    }
    return table[spec.kind]


def cmd_eval(spec: RunSpec) -> int:
    if spec.grid is None:
        raise SchemaError("eval needs --grid re0,re1,im0,im1,nx,ny")
    ev = _evaluator(spec)
    f = _kind_function(ev, spec)
    re0, re1, im0, im1, nx, ny = spec.grid
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["re(x)", "im(x)", "re(y)", "im(y)", "re(value)", "im(value)", "kind"])
    for im in np.linspace(im0, im1, ny):
        for re in np.linspace(re0, re1, nx):
            x = complex(re, im)
            try:
                v = complex(f(x)) if spec.params.in_domain(x) else complex("nan+nanj")
            except SchottkyZhuError:
                v = complex("nan+nanj")
            w.writerow([_fmt(x.real), _fmt(x.imag), _fmt(spec.y.real), _fmt(spec.y.imag),
                        _fmt(v.real), _fmt(v.imag), spec.kind])
    _write_atomic(spec.out, buf.getvalue())
    return 0


def _record(value, ev: QuasiformEvaluator, spec: RunSpec, **extra) -> str:
    sys1 = ev.system(1)
    from .moments import BlockSystem
    doubled = BlockSystem(sys1.spec, 2 * sys1.M).logdet
    payload = {"command": spec.command, "value": _cnum(value),
               "cutoffs": {"moment_cutoff": sys1.M, "word_depth": spec.depth},
               "residual_estimates": {"truncation_logdet": _num(abs(doubled - sys1.logdet))}}
    for k, v in extra.items():
        payload["residual_estimates" if k.endswith("estimate") else k] = v
    return json.dumps(payload, indent=2) + "\n"


def cmd_partition(spec: RunSpec) -> int:
    from .heisenberg import partition_det
    ev = _evaluator(spec)
    _write_atomic(spec.out, _record(partition_det(ev), ev, spec))
    return 0


def cmd_npoint(spec: RunSpec) -> int:
    from .heisenberg import npoint
    ev = _evaluator(spec)
    sec = spec.npoint or {"h_points": [], "charges": [], "loop_charges": None}
    val = npoint(ev, sec["h_points"], sec["charges"], sec["loop_charges"])
    _write_atomic(spec.out, _record(val.value, ev, spec))
    return 0


def cmd_lattice(spec: RunSpec) -> int:
    from .heisenberg import LatticeSpec, partition_det, siegel_theta
    ev = _evaluator(spec)
    lat = spec.lattice.get("spec") or LatticeSpec(((1.0,),))
    theta = siegel_theta(ev.period_matrix(), lat)
    value = theta.value * partition_det(ev, lat.rank)
    text = _record(value, ev, spec, theta=_cnum(theta.value))
    payload = json.loads(text)
    payload["residual_estimates"]["theta_tail"] = _num(theta.tail_estimate)
    _write_atomic(spec.out, json.dumps(payload, indent=2) + "\n")
    return 0


def run_suite(spec: RunSpec) -> Report:
    ev = _evaluator(spec)
    g = spec.params.genus
    tol = spec.tolerances
    rep = Report()
    want = (lambda s: spec.suite in ("all", s))
    if want("expansions"):
        rep.extend(verify_classical(ev, {"depth": spec.depth, **tol}), "classical: ")
        rep.extend(verify_expansions(ev, tol), "expansions: ")
    if want("genus1") and g == 1:
        from .genus1 import EllipticParams, verify_genus1_suite
        gen = spec.params.generators[0]
        rep.extend(verify_genus1_suite(gen, EllipticParams(gen.q), tol), "genus1: ")
    elif spec.suite == "genus1":
        raise SchemaError("the genus1 suite needs a genus-one configuration")
    if want("zhu"):
        from .heisenberg import verify_zhu_genus0, verify_zhu_genusg
        rep.extend(verify_zhu_genus0(tol), "zhu genus 0: ")
        rep.extend(verify_zhu_genusg(ev, tol), "zhu genus g: ")
    if want("ward") and g >= 2:
        from .ward import verify_mobius_points, verify_ward_suite
        rep.extend(verify_ward_suite(ev, tol), "ward: ")
        rep.extend(verify_mobius_points(ev, tol), "ward: ")
    elif spec.suite == "ward":
        raise SchemaError("the ward suite needs genus >= 2")
    return rep


def cmd_verify(spec: RunSpec) -> int:
    rep = run_suite(spec)
    _write_atomic(spec.out, _report_json(rep, {"suite": spec.suite}))
    return 0 if rep.passed else 1


HANDLERS = {"eval": cmd_eval, "partition": cmd_partition, "npoint": cmd_npoint,
            "lattice": cmd_lattice, "verify": cmd_verify}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="schottky-zhu",
                                 description="Schottky sewing forms, Heisenberg correlators and Ward checks.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", required=True, help="JSON configuration file")
    ap.add_argument("--cutoff", type=int, help="moment cutoff M (initial value when adaptive)")
    ap.add_argument("--depth", type=int, help="word depth for the Poincare-series check")
    ap.add_argument("--out", help="output path (default: stdout)")
    ap.add_argument("--suite", choices=SUITES)
    ap.add_argument("--grid", help="re0,re1,im0,im1,nx,ny for eval")
    ap.add_argument("--kind", choices=KINDS, help="quantity for eval")
    ap.add_argument("--fixed-cutoff", action="store_true", help="disable adaptive cutoff doubling")
    return ap


def run(argv) -> int:
    ap = build_parser()
    argv = list(argv)
    # a grid starting with a negative number would otherwise parse as a flag
    for i in range(len(argv) - 1):
        if argv[i] == "--grid":
            argv[i:i + 2] = [f"--grid={argv[i + 1]}", ""]
    argv = [a for a in argv if a != ""]
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    try:
        spec = load_config(args.config)
        # flags override the config file
        spec.command = args.command
        if args.cutoff is not None:
            if args.cutoff < 1:
                raise SchemaError("--cutoff must be positive")
            spec.cutoff = args.cutoff
        if args.depth is not None:
            spec.depth = _nat(args.depth, "--depth")
        if args.out is not None:
            spec.out = args.out
        if args.suite is not None:
            spec.suite = args.suite
        if args.grid is not None:
            spec.grid = _grid(args.grid)
        if args.kind is not None:
            spec.kind = args.kind
        if args.fixed_cutoff:
            spec.adaptive = False
        return HANDLERS[spec.command](spec)
    except ConfigError as exc:
        sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n")
        return 2
    except SchottkyZhuError as exc:
        sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n")
        return 1


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
