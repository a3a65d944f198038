"""Command-line front end.

    splitq simulate SCENARIO.json [--output PATH] [--format csv|json]
    splitq spectrum --s S --t T --q Q0,Q1,Q2,Q3 [--sig coquaternion|quaternion]
    splitq sweep SWEEP.json [--output PATH] [--format csv|json]
    splitq selfcheck

Exit codes: 0 success, 1 selfcheck failure, 2 invalid input, 3 integration
error, 4 sweep grid too large. ``SPLITQ_THREADS`` sets the sweep worker count.
"""
from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .algebra import HyperComplex, Signature
from .dynamics import FlowKind, Method, energy_drift, integrate, stability
from .errors import SplitQError
from .hamiltonian import AnalyticSpec, HamiltonianSpec, PhasePoint, expand_analytic
from .selfcheck import run_selfcheck
from .spectral import (
    TwoLevelParams,
    eigenvalues,
    mode_exponents,
    mode_fixed_points,
    pt_phase,
    spectrum_arrays,
)

SCHEMA_VERSION = 1
MAX_GRID = 10**7
TRAJECTORY_COLUMNS = ("t", "x0", "p0", "x1", "p1", "H0", "H1", "H2", "H3")
SWEEP_PARAMS = ("s", "t", "q0", "q1", "q2", "q3")
SWEEP_COLUMNS = SWEEP_PARAMS + ("re_E+", "im_E+", "re_E-", "im_E-", "phase")

EXIT_SCHEMA = 2
EXIT_INTEGRATION = 3
EXIT_GUARD = 4


class SchemaError(Exception):
    """Invalid scenario or sweep document; ``field`` names the offending key."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


class GridTooLarge(Exception):
    pass


# ---------------------------------------------------------------------------
# documents


def _load_json(path: str) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise SchemaError("file", f"cannot read {path}: {exc.strerror}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError("file", f"invalid JSON ({exc.msg} at line {exc.lineno})") from None
    if not isinstance(doc, dict):
        raise SchemaError("file", "top level must be a JSON object")
    return doc


def _check_keys(doc: dict, where: str, required: set[str], optional: set[str]) -> None:
    for key in doc:
        if key not in required | optional:
            raise SchemaError(f"{where}{key}", "unknown field")
    for key in sorted(required):
        if key not in doc:
            raise SchemaError(f"{where}{key}", "missing required field")


def _number(value, field: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise SchemaError(field, f"expected a finite number, got {value!r}")
    return float(value)


def _vector(value, field: str, n: int) -> list[float]:
    if not isinstance(value, list) or len(value) != n:
        raise SchemaError(field, f"expected a list of {n} numbers")
    return [_number(v, f"{field}[{i}]") for i, v in enumerate(value)]


def _version(doc: dict) -> None:
    if doc.get("version") != SCHEMA_VERSION:
        raise SchemaError("version", f"expected {SCHEMA_VERSION}, got {doc.get('version')!r}")


def _signature(doc: dict) -> Signature:
    try:
        return Signature.parse(doc.get("signature", "coquaternion"))
    except ValueError as exc:
        raise SchemaError("signature", str(exc)) from None


@dataclass
class Scenario:
    kind: FlowKind
    hamiltonian: HamiltonianSpec
    initial: PhasePoint
    t_end: float
    dt: float
    method: Method
    sample_every: int = 1
    output: str | None = None
    format: str = "csv"


def _parse_hamiltonian(doc, sig: Signature) -> HamiltonianSpec:
    if not isinstance(doc, dict):
        raise SchemaError("hamiltonian", "expected an object")
    if "analytic" in doc:
        _check_keys(doc, "hamiltonian.", {"analytic"}, {"part"})
        if not isinstance(doc["analytic"], str):
            raise SchemaError("hamiltonian.analytic", "expected a polynomial string")
        try:
            h = expand_analytic(AnalyticSpec.parse(doc["analytic"], sig))
        except ValueError as exc:
            raise SchemaError("hamiltonian.analytic", str(exc)) from None
        part = doc.get("part", "full")
        if part not in ("full", "real"):
            raise SchemaError("hamiltonian.part", "expected 'full' or 'real'")
        return h.component(0) if part == "real" else h
    _check_keys(doc, "hamiltonian.", {"terms"}, set())
    if not isinstance(doc["terms"], list):
        raise SchemaError("hamiltonian.terms", "expected a list")
    terms = []
    for n, term in enumerate(doc["terms"]):
        where = f"hamiltonian.terms[{n}]"
        if not isinstance(term, dict):
            raise SchemaError(where, "expected an object")
        _check_keys(term, where + ".", {"coeff", "pow"}, set())
        coeff = _vector(term["coeff"], where + ".coeff", 4)
        pw = term["pow"]
        if not (isinstance(pw, list) and len(pw) == 4
                and all(isinstance(e, int) and not isinstance(e, bool) and e >= 0 for e in pw)):
            raise SchemaError(where + ".pow", "expected 4 nonnegative integers")
        terms.append((coeff, pw))
    try:
        return HamiltonianSpec(terms, sig)
    except ValueError as exc:
        raise SchemaError("hamiltonian.terms", str(exc)) from None


def parse_scenario(doc: dict) -> Scenario:
    _check_keys(
        doc, "",
        {"version", "flow", "hamiltonian", "initial", "t_end", "dt"},
        {"method", "signature", "sample_every", "output", "format", "description"},
    )
    _version(doc)
    sig = _signature(doc)
    try:
        kind = FlowKind.parse(doc["flow"])
    except ValueError as exc:
        raise SchemaError("flow", str(exc)) from None
    try:
        method = Method.parse(doc.get("method", "RK4"))
    except ValueError as exc:
        raise SchemaError("method", str(exc)) from None
    h = _parse_hamiltonian(doc["hamiltonian"], sig)
    initial = doc["initial"]
    if isinstance(initial, dict):
        _check_keys(initial, "initial.", {"x0", "p0", "x1", "p1"}, set())
        initial = [initial[k] for k in ("x0", "p0", "x1", "p1")]
    s0 = PhasePoint(*_vector(initial, "initial", 4))
    t_end = _number(doc["t_end"], "t_end")
    dt = _number(doc["dt"], "dt")
    if dt <= 0:
        raise SchemaError("dt", "must be positive")
    if t_end <= 0:
        raise SchemaError("t_end", "must be positive")
    every = doc.get("sample_every", 1)
    if isinstance(every, bool) or not isinstance(every, int) or every < 1:
        raise SchemaError("sample_every", "expected a positive integer")
    fmt = doc.get("format", "csv")
    if fmt not in ("csv", "json"):
        raise SchemaError("format", "expected 'csv' or 'json'")
    output = doc.get("output")
    if output is not None and not isinstance(output, str):
        raise SchemaError("output", "expected a path string")
    return Scenario(kind, h, s0, t_end, dt, method, every, output, fmt)


@dataclass
class SweepSpec:
    base: dict[str, float]
    axes: list[tuple[str, np.ndarray]]

    @property
    def size(self) -> int:
        return math.prod(len(v) for _, v in self.axes)


def parse_sweep(doc: dict) -> SweepSpec:
    _check_keys(doc, "", {"version", "axes"}, {"base", "signature", "output", "format", "description"})
    _version(doc)
    if _signature(doc) is not Signature.COQUATERNION:
        raise SchemaError("signature", "phase sweeps are defined for coquaternions only")
    base = {k: 0.0 for k in SWEEP_PARAMS}
    raw_base = doc.get("base", {})
    if not isinstance(raw_base, dict):
        raise SchemaError("base", "expected an object")
    _check_keys(raw_base, "base.", set(), set(SWEEP_PARAMS))
    for k, v in raw_base.items():
        base[k] = _number(v, f"base.{k}")
    if not isinstance(doc["axes"], list) or not doc["axes"]:
        raise SchemaError("axes", "expected a nonempty list")
    axes = []
    seen = set()
    for n, axis in enumerate(doc["axes"]):
        where = f"axes[{n}]"
        if not isinstance(axis, dict):
            raise SchemaError(where, "expected an object")
        _check_keys(axis, where + ".", {"param", "min", "max", "steps"}, set())
        name = axis["param"]
        if name not in SWEEP_PARAMS:
            raise SchemaError(where + ".param", f"expected one of {list(SWEEP_PARAMS)}")
        if name in seen:
            raise SchemaError(where + ".param", f"{name} appears twice")
        seen.add(name)
        lo = _number(axis["min"], where + ".min")
        hi = _number(axis["max"], where + ".max")
        steps = axis["steps"]
        if isinstance(steps, bool) or not isinstance(steps, int) or steps < 1:
            raise SchemaError(where + ".steps", "expected an integer >= 1")
        axes.append((name, lo, hi, steps))
    if doc.get("format", "csv") not in ("csv", "json"):
        raise SchemaError("format", "expected 'csv' or 'json'")
    if doc.get("output") is not None and not isinstance(doc["output"], str):
        raise SchemaError("output", "expected a path string")
    size = math.prod(a[3] for a in axes)
    if size > MAX_GRID:
        raise GridTooLarge(f"grid has {size} points, limit is {MAX_GRID}")
    return SweepSpec(base, [
        (name, np.linspace(lo, hi, steps) if steps > 1 else np.array([lo]))
        for name, lo, hi, steps in axes
    ])


# ---------------------------------------------------------------------------
# output


def _fmt(x) -> str:
    return repr(float(x))


def _write_table(columns, rows, fmt: str, out) -> None:
    if fmt == "json":
        json.dump({"columns": list(columns), "rows": rows}, out)
        out.write("\n")
        return
    out.write(",".join(columns) + "\n")
    for row in rows:
        out.write(",".join(v if isinstance(v, str) else _fmt(v) for v in row) + "\n")


def _emit(columns, rows, fmt: str, path: str | None) -> None:
    if path is None:
        _write_table(columns, rows, fmt, sys.stdout)
        return
    buf = io.StringIO()
    _write_table(columns, rows, fmt, buf)
    Path(path).write_text(buf.getvalue())


def _threads() -> int:
    env = os.environ.get("SPLITQ_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


# ---------------------------------------------------------------------------
# commands


def cmd_simulate(args) -> int:
    try:
        sc = parse_scenario(_load_json(args.scenario))
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except ValueError as exc:
        print(f"error: initial: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    try:
        traj = integrate(sc.kind, sc.hamiltonian, sc.initial, sc.t_end, sc.dt,
                         sc.method, sc.sample_every)
    except SplitQError as exc:
        print(f"error: integration failed: {exc}", file=sys.stderr)
        return EXIT_INTEGRATION

    fmt = args.format or sc.format
    path = args.output or sc.output
    rows = [
        [float(t), *map(float, s), *map(float, e)]
        for t, s, e in zip(traj.times, traj.states, traj.energy_samples)
    ]
    _emit(TRAJECTORY_COLUMNS, rows, fmt, path)
    max_abs, rel = energy_drift(traj)
    summary = {
        "flow": sc.kind.value,
        "method": sc.method.value,
        "samples": len(traj),
        "t_end": float(traj.times[-1]),
        "final": [float(v) for v in traj.states[-1]],
        "energy_max_abs_drift": max_abs,
        "energy_relative_drift": rel,
        "output": path,
    }
    print(json.dumps(summary), file=sys.stderr if path is None else sys.stdout)
    return 0


def _q_components(text: str) -> list[float]:
    parts = text.split(",")
    if len(parts) != 4:
        raise argparse.ArgumentTypeError(f"expected 4 comma-separated components, got {len(parts)}")
    try:
        vals = [float(p) for p in parts]
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot parse {text!r} as numbers") from None
    if not all(math.isfinite(v) for v in vals):
        raise argparse.ArgumentTypeError("components must be finite")
    return vals


def _finite_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot parse {text!r} as a number") from None
    if not math.isfinite(v):
        raise argparse.ArgumentTypeError("value must be finite")
    return v


def _pair(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def cmd_spectrum(args) -> int:
    sig = Signature.parse(args.sig)
    params = TwoLevelParams(args.s, args.t, HyperComplex(*args.q, sig=sig))
    e_plus, e_minus = eigenvalues(params)
    phase = pt_phase(params).value if sig is Signature.COQUATERNION else None
    b = mode_exponents(params)
    out = {
        "signature": sig.value,
        "E+": _pair(e_plus),
        "E-": _pair(e_minus),
        "phase": phase,
        "fixed_points": [c.value for c in mode_fixed_points(params)],
        "stability": [stability(x) for x in b],
    }
    print(json.dumps(out))
    return 0


def cmd_sweep(args) -> int:
    try:
        doc = _load_json(args.sweep)
        spec = parse_sweep(doc)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except GridTooLarge as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GUARD

    # row-major over the axes in file order: the first axis varies slowest
    grid = np.tile(np.array([spec.base[k] for k in SWEEP_PARAMS]), (spec.size, 1))
    mesh = np.meshgrid(*(v for _, v in spec.axes), indexing="ij")
    for (name, _), values in zip(spec.axes, mesh):
        grid[:, SWEEP_PARAMS.index(name)] = values.reshape(-1)

    chunk = max(1, math.ceil(len(grid) / (4 * _threads())))
    chunks = [grid[i:i + chunk] for i in range(0, len(grid), chunk)]
    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        results = list(pool.map(spectrum_arrays, chunks))

    rows = []
    for block, (ep, em, phases) in zip(chunks, results):
        for params, a, b, ph in zip(block, ep, em, phases):
            rows.append([*map(float, params), a.real, a.imag, b.real, b.imag, ph.value])
    _emit(SWEEP_COLUMNS, rows, args.format or doc.get("format", "csv"),
          args.output or doc.get("output"))
    return 0


def cmd_selfcheck(args) -> int:
    return run_selfcheck()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="splitq", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="integrate a scenario file")
    sim.add_argument("scenario")
    sim.add_argument("--output")
    sim.add_argument("--format", choices=("csv", "json"))
    sim.set_defaults(func=cmd_simulate)

    spec = sub.add_parser("spectrum", help="eigenvalues and PT phase of a two-level Hamiltonian")
    spec.add_argument("--s", type=_finite_float, default=0.0)
    spec.add_argument("--t", type=_finite_float, default=0.0)
    spec.add_argument("--q", type=_q_components, default=[0.0, 0.0, 0.0, 0.0],
                      help="q0,q1,q2,q3 (use --q=-1,0,0,0 for a leading minus)")
    spec.add_argument("--sig", choices=("coquaternion", "quaternion"), default="coquaternion")
    spec.set_defaults(func=cmd_spectrum)

    sw = sub.add_parser("sweep", help="PT phase diagram over a parameter grid")
    sw.add_argument("sweep")
    sw.add_argument("--output")
    sw.add_argument("--format", choices=("csv", "json"))
    sw.set_defaults(func=cmd_sweep)

    chk = sub.add_parser("selfcheck", help="run the built-in property checks")
    chk.set_defaults(func=cmd_selfcheck)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except BrokenPipeError:
        # downstream closed early (e.g. piped into head)
        sys.stdout = open(os.devnull, "w")
        return 0


if __name__ == "__main__":
    sys.exit(main())
