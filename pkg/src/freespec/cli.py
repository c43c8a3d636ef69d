"""Command-line entry point: ``freespec <command> [<action>] [options]``.

Every command prints a short human-readable summary and writes a JSON
report (plus any figures) into ``--out``.  Exit codes: 0 success, 1 an
assertion or computation failed, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
import time
from dataclasses import asdict, dataclass, field as dc_field
from enum import Enum
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ArityError, CapacityError, CatalogError, DomainError, FieldError, FreespecError, \
    NumericalFailure, UnboundedError
from .linalg import MatrixTuple, ScalarField

SCHEMA_VERSION = "1.0"
DEFAULT_OUT = "freespec-reports"
_INPUT_ERRORS = (ArityError, CatalogError, DomainError, FieldError, UnboundedError, CapacityError,
                 ValueError, KeyError, TypeError, OSError)


class InputError(Exception):
    """Bad command-line input or input file; maps to exit code 2."""


@dataclass
class RunConfig:
    tol: dict
    seed: int
    jobs: int
    level_caps: dict
    out: str
    field: str | None
    figures: bool = True


@dataclass
class Report:
    command: str
    inputs_digest: str
    config: RunConfig
    results: dict
    wall_time_s: float | None
    assertions: list = dc_field(default_factory=list)
    figures: list = dc_field(default_factory=list)
    schema_version: str = SCHEMA_VERSION

    @property
    def passed(self) -> bool:
        return all(a["passed"] for a in self.assertions)

    def to_json(self) -> dict:
        out = asdict(self)
        out["passed"] = self.passed
        out["version"] = __version__
        return out


def to_jsonable(obj):
    """Plain JSON types from numpy scalars/arrays, enums, fractions and dataclasses."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if hasattr(obj, "to_json"):
        return to_jsonable(obj.to_json())
    if hasattr(obj, "__dataclass_fields__"):
        return to_jsonable(asdict(obj))
    return obj


class _Run:
    """Per-invocation state: assertions, figures and input files."""

    def __init__(self, args, stem: str):
        self.args = args
        self.stem = stem
        self.out = Path(args.out)
        self.assertions = []
        self.figures = []
        self.input_files = {}

    def check(self, name: str, passed: bool, **detail):
        self.assertions.append({"name": name, "passed": bool(passed), **to_jsonable(detail)})

    def figure(self, name: str, fn, *a, **kw):
        if not self.args.figures:
            return None
        path = self.out / f"{self.stem}-{name}.png"
        fn(*a, path=path, **kw)
        self.figures.append(path.name)
        return path

    def load_json(self, path: str) -> dict:
        p = Path(path)
        try:
            raw = p.read_bytes()
        except OSError as e:
            raise InputError(f"cannot read {path}: {e.strerror or e}") from None
        self.input_files[p.name] = hashlib.sha256(raw).hexdigest()
        try:
            return json.loads(raw)
        except (json.JSONDecodeError, UnicodeDecodeError) as e:
            raise InputError(f"{path} is not valid JSON: {e}") from None


# ---------------------------------------------------------------------------
# input helpers


def _field(args) -> ScalarField | None:
    return ScalarField(args.field) if args.field else None


def parse_pencil(run: _Run, spec: str):
    """A pencil JSON file, or a catalog id with optional parameters: ``cube:3``, ``jewel:2,3``."""
    from .pencils import LinearPencil, catalog
    if Path(spec).suffix == ".json" or Path(spec).is_file():
        data = run.load_json(spec)
        try:
            return LinearPencil.from_json(data)
        except _INPUT_ERRORS as e:
            raise InputError(f"{spec}: invalid pencil: {e}") from None
    cid, _, params = spec.partition(":")
    try:
        vals = [int(v) for v in params.split(",")] if params else None
    except ValueError:
        raise InputError(f"catalog parameters must be integers: {spec!r}") from None
    p = vals[0] if vals and len(vals) == 1 and cid != "jewel" else (tuple(vals) if vals else None)
    try:
        return catalog(cid, p)
    except CatalogError as e:
        raise InputError(str(e)) from None


def parse_tuple(run: _Run, path: str) -> MatrixTuple:
    data = run.load_json(path)
    try:
        return MatrixTuple.from_json(data)
    except _INPUT_ERRORS as e:
        raise InputError(f"{path}: invalid matrix tuple: {e}") from None


def parse_povms(run: _Run, path: str):
    from .quantum import MeasurementSet
    data = run.load_json(path)
    try:
        return MeasurementSet.from_json(data)
    except _INPUT_ERRORS as e:
        raise InputError(f"{path}: invalid POVM file: {e}") from None


def _solver_cfg(args):
    from .sdp import SolverConfig
    kw = {}
    if args.gap_tol is not None:
        kw["gap_tol"] = args.gap_tol
    if args.feas_tol is not None:
        kw["feas_tol"] = args.feas_tol
    return SolverConfig(**kw) if kw else None


# ---------------------------------------------------------------------------
# pencil / membership


def cmd_pencil(run: _Run, args) -> dict:
    from .pencils import level1_bounded, pencil_vertices
    A = parse_pencil(run, args.pencil)
    info = A.to_json()
    if A.is_diagonal and "vertices" not in info and A.is_bounded is not False:
        try:
            info["vertices"] = pencil_vertices(A).to_json()
        except FreespecError:
            pass
    if args.action == "export":
        path = Path(args.file)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(to_jsonable(info), indent=2, sort_keys=True) + "\n")
        print(f"wrote {path}")
    bounded = A.is_bounded if A.is_bounded is not None else level1_bounded(A)
    print(f"pencil {A.catalog_id or args.pencil}: d = {A.d}, g = {A.g}, field = {A.field.value}, "
          f"diagonal = {A.is_diagonal}, bounded = {bounded}")
    return {"pencil": info, "bounded": bounded, "diagonal": A.is_diagonal}


def cmd_membership(run: _Run, args) -> dict:
    from .pencils import membership
    A = parse_pencil(run, args.pencil)
    X = parse_tuple(run, args.point)
    r = membership(A, X, args.tol)
    print(f"{r.status.value} (margin {r.margin:.3e})")
    return {"status": r.status.value, "margin": r.margin, "level": X.n}


# ---------------------------------------------------------------------------
# inclusion


def cmd_inclusion(run: _Run, args) -> dict:
    from . import inclusion as inc
    cfg = _solver_cfg(args)
    a = args.action
    if a == "test":
        A, B = parse_pencil(run, args.pencil), parse_pencil(run, args.target)
        cert = inc.hkm_inclusion(A, B, cfg)
        print(f"D_A ⊆ D_B: {cert.verdict.value} (margin {cert.margin:.3e})")
        return {"verdict": cert.verdict.value, "margin": cert.margin, "residuals": cert.residuals}
    if a == "scale":
        A, B = parse_pencil(run, args.pencil), parse_pencil(run, args.target)
        r = inc.max_inclusion_scale(A, B, cfg)
        print(f"largest s with s·D_A ⊆ D_B: {r.s:.10f} (dual bound {r.upper:.10f})")
        return {"s": r.s, "upper": r.upper, "residuals": r.residuals, "status": r.status.value}
    if a == "minball":
        A = parse_pencil(run, args.pencil)
        X = parse_tuple(run, args.point)
        if A.vertices is None:
            raise InputError("minball needs a polytope pencil with known vertices")
        r = inc.min_ball_gamma(X, A.vertices, cfg)
        print(f"gamma_X = {r.gamma:.10f} (dual bound {r.lower:.10f})")
        return {"gamma": r.gamma, "lower": r.lower, "residuals": r.residuals, "status": r.status.value}
    if a == "scan":
        return _theta_scan(run, args, args.k)
    if a == "witness":
        if args.four_lines:
            X, Y = inc.four_lines_witness()
            target = math.sqrt(13) / 2
        else:
            X, Y = inc.witness_tuples(args.k)
            target = inc.gamma_closed_form(args.k)
        val = inc.pairing_value(X, Y)
        run.check("pairing equals closed form", abs(val - target) <= args.tol, value=val, target=target)
        print(f"lambda_max = {val:.12f}, closed form {target:.12f}")
        return {"value": val, "target": target, "X": X.to_json(), "Y": Y.to_json()}
    if a == "feasible-point":
        fp = inc.feasible_point(args.k, args.theta, args.branch)
        chk = inc.verify_feasible_point(fp, args.tol)
        run.check("feasible point passes PSD and equality checks", chk.ok,
                  max_residual=chk.max_residual, min_eigenvalue=chk.min_eigenvalue)
        print(f"k = {fp.k}, theta = {fp.theta:.6f}, branch {fp.branch}: "
              f"residual {chk.max_residual:.2e}, min eigenvalue {chk.min_eigenvalue:.2e}")
        return {"k": fp.k, "theta": fp.theta, "gamma": fp.gamma, "branch": fp.branch,
                "max_residual": chk.max_residual, "min_eigenvalue": chk.min_eigenvalue,
                "blocks": fp.blocks, "lifted_ok": None if chk.lifted is None else chk.lifted.ok}
    raise InputError(f"unknown inclusion action {a!r}")


def _theta_scan(run: _Run, args, ks) -> dict:
    from . import inclusion as inc
    from . import plotting
    out = {}
    for k in (ks if isinstance(ks, list) else [ks]):
        s = inc.theta_scan(k, args.grid, jobs=args.jobs, cfg=_solver_cfg(args))
        ref = inc.gamma_closed_form(k) if k >= 2 else None
        if ref is not None:
            run.check(f"k = {k}: maximum does not exceed gamma(k)", s.best_gamma <= ref + 1e-6,
                      value=s.best_gamma, target=ref)
        run.figure(f"theta-k{k}", plotting.theta_scan_figure, s.thetas, s.gammas, gamma_ref=ref, k=k)
        print(f"k = {k}: max gamma {s.best_gamma:.10f} at theta = {s.best_theta:.6f}"
              + (f" (gamma(k) = {ref:.10f})" if ref else ""))
        out[str(k)] = s.to_json()
    return out


# ---------------------------------------------------------------------------
# extreme points


def cmd_extreme(run: _Run, args) -> dict:
    from .extremal import classify
    from .verify import extreme_sample_stats
    A = parse_pencil(run, args.pencil)
    if args.action == "classify":
        X = parse_tuple(run, args.point)
        r = classify(A, X, args.tol, _field(args), seed=args.seed)
        print(" ".join(f"{k}={getattr(r, k).value}" for k in ("euclidean", "matrix", "arveson", "free")))
        return r.to_json()
    st = extreme_sample_stats(A, args.count, args.seed, levels=(args.level,))
    run.check("free => matrix => Euclidean on every sample", st["hierarchy_ok"])
    run.check("Arveson tests agree or verdict is undecided", st["disagreements_undecided"])
    print(f"{args.count} samples at level {args.level}: Arveson agreement {st['arveson_agreement']:.3f}")
    for k, v in st["verdicts"].items():
        print(f"  euclidean/matrix/arveson/free = {k}: {v}")
    return st


# ---------------------------------------------------------------------------
# compatibility


def cmd_compat(run: _Run, args) -> dict:
    from . import plotting
    from . import quantum as q
    a = args.action
    field = _field(args)
    cfg = _solver_cfg(args)
    if a in ("check", "degree"):
        E = parse_povms(run, args.povm_file)
        if a == "check":
            r = q.is_compatible(E, field, cfg)
            print(f"compatible: {r.compatible.value} ({r.method})")
            return r.to_json()
        r = q.compatibility_degree(E, field, cfg)
        print(f"compatibility degree s = {r.s:.10f} (dual bound {r.upper:.10f})")
        return {"s": r.s, "upper": r.upper, "marginal_error": r.marginal_error, "status": r.status.value,
                "d": E.d, "ks": list(E.ks)}
    if a == "min-degree":
        ks = tuple(args.ks) if args.ks else (2,) * args.g
        r = q.min_compat_degree_seesaw(args.d, args.g, ks, restarts=args.restarts, seed=args.seed,
                                       field=field, jobs=args.jobs)
        bounds = q.known_bounds(args.d, args.g, ks)
        run.check("see-saw evidence respects the proved lower bound", r.s_upper >= bounds.lower - 1e-6,
                  value=r.s_upper, target=bounds.lower)
        run.figure("seesaw", plotting.seesaw_figure, [x.history for x in r.runs])
        print(f"see-saw: lambda_max = {r.value:.10f}, so s(d, g, k) <= {r.s_upper:.10f} (see-saw evidence); "
              f"proved bounds [{bounds.lower:.6f}, {bounds.upper:.6f}]")
        return {"seesaw_evidence": r.to_json(), "proved_bounds": bounds.to_json()}
    if a == "bounds":
        ks = tuple(args.ks) if args.ks else None
        b = q.known_bounds(args.d, args.g, ks)
        print(f"s(d = {args.d}, g = {args.g}, k = {b.ks}) in [{b.lower:.6f}, {b.upper:.6f}] (proved)")
        for e in b.entries:
            print(f"  item {e.item:2d} {e.kind:8s} {'' if e.value is None else f'{e.value:.6f}':>9s}  {e.note}")
        return b.to_json()
    if a == "witness":
        E = q.witness_measurements(args.kind, args.k)
        deg = q.compatibility_degree(E, field, cfg)
        out = {"measurements": E.to_json(), "degree": deg.s, "upper": deg.upper}
        if args.kind == "two_plus_k":
            from .inclusion import s_closed_form
            target = s_closed_form(args.k)
        else:
            target = 2 / math.sqrt(13)
        run.check("degree matches closed form", abs(deg.s - target) <= 1e-5, value=deg.s, target=target)
        out["target"] = target
        if args.kind == "four_qubit":
            out["bloch_vectors"] = q.bloch_vectors(E)
            run.figure("bloch", plotting.bloch_figure, out["bloch_vectors"])
        if args.file:
            Path(args.file).write_text(json.dumps(to_jsonable(E.to_json()), indent=2) + "\n")
            print(f"wrote {args.file}")
        print(f"{args.kind}: degree {deg.s:.10f}, closed form {target:.10f}")
        return out
    raise InputError(f"unknown compat action {a!r}")


# ---------------------------------------------------------------------------
# hierarchy


def cmd_hierarchy(run: _Run, args) -> dict:
    from . import hierarchy as h
    from . import plotting
    from .inclusion import gamma_closed_form
    from .quantum import qubit_bloch_seesaw
    if args.action == "npa":
        if args.problem != "line-simplex":
            raise InputError("npa supports --problem line-simplex")
        if args.k < 2:
            raise InputError("--k must be at least 2")
        build = lambda l: h.npa_line_simplex(args.k, l, basis_cap=args.basis_cap or h.NPA_BASIS_CAP)
        witness, label = gamma_closed_form(args.k - 1), "gamma(k - 1)"
    else:
        if args.problem != "qubits":
            raise InputError("lasserre supports --problem qubits")
        build = lambda l: h.lasserre_bloch(args.g, l, basis_cap=args.basis_cap or h.LASSERRE_BASIS_CAP)
        sw = qubit_bloch_seesaw(args.g, restarts=5, seed=args.seed)
        witness, label = sw.value, "see-saw value"
    cfg = _solver_cfg(args)
    levels = []
    for l in range(1, args.level + 1):
        r = h.solve_relaxation(build(l), cfg)
        levels.append({"level": l, "bound": r.bound, "value": r.value, "status": r.status.value,
                       "basis_size": r.basis_size, "rank_profile": r.rank_profile,
                       "min_eigenvalue": r.min_eigenvalue, "unit": r.unit})
        print(f"level {l}: value {r.value:.10f}, bound {r.bound:.10f}, basis {r.basis_size}, "
              f"ranks {r.rank_profile} [{r.status.value}]")
    vals = [x["value"] for x in levels]
    run.check("values non-increasing in level", all(b <= a + 1e-6 for a, b in zip(vals, vals[1:])), values=vals)
    run.check(f"values dominate the {label}", all(v >= witness - 1e-6 for v in vals),
              values=vals, witness=witness)
    run.check("solves optimal", all(x["status"] == "optimal" for x in levels))
    run.figure("levels", plotting.relaxation_figure, [x["level"] for x in levels], vals, witness=witness)
    top = levels[-1]
    return {"level": top["level"], "bound": top["bound"], "basis_size": top["basis_size"],
            "rank_profile": top["rank_profile"], "witness": witness, "levels": levels}


# ---------------------------------------------------------------------------
# verify-paper and experiments


def cmd_verify(run: _Run, args) -> dict:
    from .verify import run_suites
    res = run_suites(args.suite, jobs=args.jobs, seed=args.seed)
    out = {}
    for name, r in res.items():
        checks = [c.to_json() for c in r["checks"]]
        for c in checks:
            run.check(f"{name}: {c['name']}", c["passed"], value=c["value"], target=c["target"])
            print(f"{'PASS' if c['passed'] else 'FAIL'}  {name}: {c['name']}")
        out[name] = {"checks": checks}
    return out


def cmd_experiment(run: _Run, args) -> dict:
    from . import plotting
    from .verify import sample_gammas
    if args.action == "theta-scan":
        return _theta_scan(run, args, args.k)
    if args.action == "reduction-gap":
        from .inclusion import reduction_gap_experiment
        r = reduction_gap_experiment(args.k[0], args.theta, _solver_cfg(args))
        print(f"k = {r['k']}: full pencil {r['full']:.8f}, three-variable reduction {r['reduced']:.8f}")
        return r
    # sample-gamma
    k = args.k[0]
    out = {"k": k, "levels": []}
    overall = -math.inf
    for n in args.level:
        st = sample_gammas(k, n, args.count, args.seed, args.jobs)
        overall = max(overall, st["max_gamma"])
        run.check(f"level {n}: max observed gamma <= gamma(k) + 1e-6", st["max_gamma"] <= st["gamma_k"] + 1e-6,
                  value=st["max_gamma"], target=st["gamma_k"])
        run.figure(f"gamma-k{k}-n{n}", plotting.gamma_histogram, st["gammas"], gamma_ref=st["gamma_k"],
                   title=f"k = {k}, level {n}, {st['count']} samples")
        lg = st["log10_gap"]
        print(f"k = {k}, level {n}: {st['count']} samples ({st['failures']} failed), max gamma "
              f"{st['max_gamma']:.10f}, gamma(k) = {st['gamma_k']:.10f}, "
              f"log10|gamma(k) - max| = {'n/a' if lg is None else f'{lg:.2f}'}")
        out["levels"].append(st)
    g = out["levels"][0]["gamma_k"]
    out["max_gamma"] = overall
    out["gap"] = g - overall
    out["log10_gap"] = math.log10(max(abs(g - overall), 1e-16))
    return out


# ---------------------------------------------------------------------------
# argument parsing


def _common(p):
    p.add_argument("--out", default=DEFAULT_OUT, help="directory for the JSON report and figures")
    p.add_argument("--seed", type=int, default=0, help="seed for stochastic commands (default 0)")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    p.add_argument("--tol", type=float, default=1e-8, help="membership / rank / check tolerance")
    p.add_argument("--gap-tol", type=float, default=None, help="solver relative duality-gap tolerance")
    p.add_argument("--feas-tol", type=float, default=None, help="solver feasibility tolerance")
    p.add_argument("--field", choices=("real", "complex"), default=None, help="scalar field override")
    p.add_argument("--no-figures", dest="figures", action="store_false", help="skip figure rendering")
    p.add_argument("--deterministic", action="store_true",
                   help="omit wall time so reports of deterministic commands are byte-identical")


def build_parser() -> argparse.ArgumentParser:
    from .verify import SUITES
    parser = argparse.ArgumentParser(prog="freespec", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pencil", help="show or export a catalog or file pencil")
    p.add_argument("action", choices=("show", "export"))
    p.add_argument("pencil", help="catalog id (e.g. cube:3, jewel:2,3) or pencil JSON file")
    p.add_argument("--file", help="output path for export")
    _common(p)

    p = sub.add_parser("membership", help="is a matrix tuple in D_A?")
    p.add_argument("--pencil", required=True)
    p.add_argument("--point", required=True, help="matrix tuple JSON file")
    _common(p)

    p = sub.add_parser("inclusion", help="inclusion tests, scales, min-ball constants and witnesses")
    p.add_argument("action", choices=("test", "scale", "minball", "scan", "witness", "feasible-point"))
    p.add_argument("--pencil")
    p.add_argument("--target", help="containing pencil for test/scale")
    p.add_argument("--point", help="matrix tuple JSON file for minball")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--theta", type=float, default=math.pi / 2)
    p.add_argument("--grid", type=int, default=65)
    p.add_argument("--branch", choices=("low", "high"), default=None)
    p.add_argument("--four-lines", action="store_true", help="witness: the four-variable complex pair")
    _common(p)

    p = sub.add_parser("extreme", help="classify or sample extreme points")
    p.add_argument("action", choices=("classify", "sample"))
    p.add_argument("--pencil", required=True)
    p.add_argument("--point")
    p.add_argument("--level", type=int, default=2)
    p.add_argument("--count", type=int, default=100)
    _common(p)

    p = sub.add_parser("compat", help="measurement compatibility")
    p.add_argument("action", choices=("check", "degree", "min-degree", "bounds", "witness"))
    p.add_argument("--povm-file", help="JSON {d, povms: [[effect, ...], ...]} or {d, effects: [...]}")
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--g", type=int, default=2)
    p.add_argument("--ks", type=int, nargs="+", help="outcome counts, one per measurement")
    p.add_argument("--restarts", type=int, default=20)
    p.add_argument("--kind", choices=("two_plus_k", "four_qubit"), default="two_plus_k")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--file", help="witness: also write the measurements as a POVM file")
    _common(p)

    p = sub.add_parser("hierarchy", help="NPA / Lasserre moment relaxations")
    p.add_argument("action", choices=("npa", "lasserre"))
    p.add_argument("--problem", choices=("line-simplex", "qubits"), required=True)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--g", type=int, default=2)
    p.add_argument("--level", type=int, default=2, help="highest level; levels 1..level are solved")
    p.add_argument("--basis-cap", type=int, default=None)
    _common(p)

    p = sub.add_parser("verify-paper", help="run reproduction suites")
    p.add_argument("--suite", nargs="+", choices=SUITES + ("all",), default=["closed-form"])
    _common(p)

    p = sub.add_parser("experiment", help="sampling statistics and scans")
    p.add_argument("action", choices=("sample-gamma", "theta-scan", "reduction-gap"))
    p.add_argument("--k", type=int, nargs="+", default=[2])
    p.add_argument("--level", type=int, nargs="+", default=[2])
    p.add_argument("--count", type=int, default=500)
    p.add_argument("--grid", type=int, default=65)
    p.add_argument("--theta", type=float, default=math.pi / 2)
    _common(p)
    return parser


_HANDLERS = {"pencil": cmd_pencil, "membership": cmd_membership, "inclusion": cmd_inclusion,
             "extreme": cmd_extreme, "compat": cmd_compat, "hierarchy": cmd_hierarchy,
             "verify-paper": cmd_verify, "experiment": cmd_experiment}

_REQUIRED = {("inclusion", "test"): ("pencil", "target"), ("inclusion", "scale"): ("pencil", "target"),
             ("inclusion", "minball"): ("pencil", "point"), ("extreme", "classify"): ("point",),
             ("compat", "check"): ("povm_file",), ("compat", "degree"): ("povm_file",),
             ("pencil", "export"): ("file",)}


def _run_config(args) -> RunConfig:
    from .hierarchy import LASSERRE_BASIS_CAP, NPA_BASIS_CAP
    cap = getattr(args, "basis_cap", None)
    return RunConfig(tol={"tol": args.tol, "gap_tol": args.gap_tol, "feas_tol": args.feas_tol},
                     seed=args.seed, jobs=args.jobs,
                     level_caps={"npa_basis": cap or NPA_BASIS_CAP, "lasserre_basis": cap or LASSERRE_BASIS_CAP},
                     out=str(args.out), field=args.field, figures=args.figures)


def _digest(args, files: dict) -> str:
    skip = {"out", "jobs", "figures", "deterministic"}
    inputs = {k: v for k, v in sorted(vars(args).items()) if k not in skip}
    payload = json.dumps({"args": to_jsonable(inputs), "files": files}, sort_keys=True)
    return hashlib.sha256(payload.encode()).hexdigest()


def run(argv=None) -> tuple:
    """Parse ``argv``, execute, write the report; returns ``(exit_code, report or None)``."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0), None
    action = getattr(args, "action", None)
    for name in _REQUIRED.get((args.command, action), ()):
        if getattr(args, name, None) is None:
            print(f"freespec {args.command} {action}: --{name.replace('_', '-')} is required", file=sys.stderr)
            return 2, None
    if args.jobs < 1:
        print("freespec: --jobs must be at least 1", file=sys.stderr)
        return 2, None
    stem = args.command + (f"-{action}" if action else "")
    r = _Run(args, stem)
    t0 = time.perf_counter()
    code = 0
    try:
        results = _HANDLERS[args.command](r, args)
    except InputError as e:
        print(f"freespec: {e}", file=sys.stderr)
        return 2, None
    except NumericalFailure as e:
        print(f"freespec: numerical failure: {e}", file=sys.stderr)
        results, code = {"error": str(e)}, 1
        r.check("computation completed", False, error=str(e))
    except (DomainError, ArityError, FieldError, CatalogError, UnboundedError, CapacityError) as e:
        print(f"freespec: {type(e).__name__}: {e}", file=sys.stderr)
        return 2, None
    wall = None if args.deterministic else round(time.perf_counter() - t0, 3)
    report = Report(stem, _digest(args, r.input_files), _run_config(args), to_jsonable(results), wall,
                    r.assertions, r.figures)
    r.out.mkdir(parents=True, exist_ok=True)
    path = r.out / f"{stem}.json"
    path.write_text(json.dumps(to_jsonable(report.to_json()), indent=2, sort_keys=True) + "\n")
    if not report.passed:
        code = 1
    failed = sum(not a["passed"] for a in report.assertions)
    print(f"report: {path} ({len(report.assertions) - failed}/{len(report.assertions)} assertions passed)")
    return code, report


def main(argv=None) -> int:
    code, _ = run(argv)
    return code


if __name__ == "__main__":
    sys.exit(main())
