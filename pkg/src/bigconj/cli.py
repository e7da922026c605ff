"""Command-line front end.

    python3 -m bigconj verify ex52-gap --n 8
    python3 -m bigconj run --scenario ex44 --out report.json

Exit codes: 0 all verdicts pass, 1 a verdict failed, 2 a hypothesis failed,
3 bad input.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional

import numpy as np

from . import counterexamples as ce
from .errors import BigConjError, HypothesisFailed, ParseError, ValidationError
from .fitzpatrick import FitzLinearClosed, FitzNormalCone, JFunction
from .grids import GridSpec
from .relations import LinearRelation
from .sets import Subspace, set_from_dict
from .shift import MAX_N, build

__all__ = ["Scenario", "load_scenario", "run", "main", "SUITES", "SCHEMA_VERSION"]

SCHEMA_VERSION = 1
EXIT_OK, EXIT_VERDICT, EXIT_HYPOTHESIS, EXIT_INPUT = 0, 1, 2, 3
BUNDLED = ("ex44", "ex52")


@dataclass
class Scenario:
    name: str
    dimension: int
    operators: dict
    sets: dict
    grid: GridSpec
    j_slope: float
    suites: list
    source: str = ""
    extra: dict = field(default_factory=dict)


@dataclass
class Settings:
    seed: int = 0
    tol: float = ce.DEFAULT_TOL
    grid_n: Optional[int] = None
    box_radius: Optional[float] = None
    n: Optional[int] = None


# ---------------------------------------------------------------------------
# Scenario loading
# ---------------------------------------------------------------------------

def _require(d, key, where):
    if key not in d:
        raise ValidationError(f"{where}.{key}" if where else key, "missing")
    return d[key]


def _operator(decl, i, dim):
    where = f"operators[{i}]"
    if not isinstance(decl, dict):
        raise ValidationError(where, "must be an object")
    name = str(_require(decl, "name", where))
    if "shift" in decl:
        n = int(_require(decl["shift"], "n", f"{where}.shift"))
        if not 2 <= n <= MAX_N:
            raise ValidationError(f"{where}.shift.n", f"must lie in [2, {MAX_N}]")
        if n != dim:
            raise ValidationError(f"{where}.shift.n", f"is {n}, scenario dimension is {dim}")
        side = decl["shift"].get("side", "adjoint")
        ts = build(n)
        if side == "adjoint":
            return name, ts.adjoint_selection()
        if side == "primal":
            return name, ts.relation()
        raise ValidationError(f"{where}.shift.side", f"unknown side {side!r}")
    try:
        M = np.asarray(_require(decl, "matrix", where), dtype=float)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"{where}.matrix", str(exc)) from None
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValidationError(f"{where}.matrix", "must be a square matrix")
    if M.shape[0] != dim:
        raise ValidationError(f"{where}.matrix", f"is {M.shape[0]}x{M.shape[0]}, scenario dimension is {dim}")
    domain = None
    if "domain_constraints" in decl:
        rows = np.atleast_2d(np.asarray(decl["domain_constraints"], dtype=float))
        if rows.shape[1] != dim:
            raise ValidationError(f"{where}.domain_constraints", f"rows must have {dim} entries")
        domain = Subspace.from_constraints(rows, dim)
    return name, LinearRelation.from_matrix(M, domain)


def _set(decl, i, dim):
    where = f"sets[{i}]"
    if not isinstance(decl, dict):
        raise ValidationError(where, "must be an object")
    name = str(_require(decl, "name", where))
    try:
        C = set_from_dict(decl, dim)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(where, str(exc)) from None
    if C.dim != dim:
        raise ValidationError(where, f"lives in R^{C.dim}, scenario dimension is {dim}")
    return name, C


def parse_scenario(text: str, source="<string>") -> Scenario:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{source}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(data, dict):
        raise ParseError(f"{source}: top level must be an object")
    ver = _require(data, "schema_version", "")
    if ver != SCHEMA_VERSION:
        raise ValidationError("schema_version", f"unsupported version {ver!r}")
    dim = _require(data, "dimension", "")
    if not isinstance(dim, int) or dim < 1:
        raise ValidationError("dimension", "must be a positive integer")
    ops = dict(_operator(d, i, dim) for i, d in enumerate(data.get("operators", [])))
    sets = dict(_set(d, i, dim) for i, d in enumerate(data.get("sets", [])))
    g = data.get("grids", {})
    try:
        grid = GridSpec(float(g.get("R", 2.0)), int(g.get("N", 17)))
    except ValueError as exc:
        raise ValidationError("grids", str(exc)) from None
    j = data.get("j_function", {"slope": 1.0})
    slope = float(j.get("slope", 1.0))
    if slope < 0:
        raise ValidationError("j_function.slope", "must be nonnegative")
    suites = data.get("suites", [])
    if not isinstance(suites, list) or not suites:
        raise ValidationError("suites", "must be a nonempty list")
    for i, s in enumerate(suites):
        if not isinstance(s, dict):
            raise ValidationError(f"suites[{i}]", "must be an object")
        nm = _require(s, "name", f"suites[{i}]")
        if nm not in SUITES:
            raise ValidationError(f"suites[{i}].name", f"unknown suite {nm!r}")
        for key, pool in (("operator", ops), ("set", sets)):
            if key in s and s[key] not in pool:
                raise ValidationError(f"suites[{i}].{key}", f"undeclared {key} {s[key]!r}")
        for key in ("z", "zstar"):
            if key in s.get("params", {}) and len(s["params"][key]) != dim:
                raise ValidationError(f"suites[{i}].params.{key}", f"must have {dim} entries")
    return Scenario(str(data.get("name", source)), dim, ops, sets, grid, slope, suites, source)


def load_scenario(path) -> Scenario:
    """Load a scenario file; the names ``ex44`` and ``ex52`` select the bundled ones."""
    p = Path(path)
    if not p.exists() and str(path) in BUNDLED:
        text = resources.files("bigconj").joinpath("scenarios", f"{path}.json").read_text()
        return parse_scenario(text, f"bundled:{path}")
    try:
        text = p.read_text()
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror}") from None
    return parse_scenario(text, str(path))


# ---------------------------------------------------------------------------
# Suite dispatch
# ---------------------------------------------------------------------------

def _grid(sc: Optional[Scenario], st: Settings, default_n=17, default_r=2.0):
    base = sc.grid if sc is not None else GridSpec(default_r, default_n)
    return (st.box_radius or base.radius, st.grid_n or base.points)


def _op(sc, entry, default=None):
    if sc is not None and "operator" in entry:
        return sc.operators[entry["operator"]]
    if sc is not None and len(sc.operators) == 1:
        return next(iter(sc.operators.values()))
    return default


def _cset(sc, entry):
    if sc is not None and "set" in entry:
        return sc.sets[entry["set"]]
    if sc is not None and len(sc.sets) == 1:
        return next(iter(sc.sets.values()))
    return None


def _truncation(sc, entry, st, default=8):
    p = entry.get("params", {})
    if st.n is not None:
        return st.n
    if "n" in p:
        return int(p["n"])
    return sc.dimension if sc is not None and sc.dimension >= 2 else default


def _vec_param(p, key):
    return None if key not in p else np.asarray(p[key], dtype=float)


def _s_thm43(sc, entry, st, rng):
    from .sets import Ball
    A = _op(sc, entry, ce.rotation(2))
    C = _cset(sc, entry) or Ball.unit(A.n)
    R, N = _grid(sc, st)
    p = entry.get("params", {})
    return ce.theorem43_suite(A, C, JFunction(sc.j_slope if sc else 1.0), int(p.get("queries", 9)),
                              N, R, st.tol, rng, _vec_param(p, "z"), _vec_param(p, "zstar"))


def _s_ex44(sc, entry, st, rng):
    A = _op(sc, entry, ce.rotation(2))
    R, N = _grid(sc, st)
    p = entry.get("params", {})
    return ce.example44(A, _vec_param(p, "zstar"), int(p.get("samples", 1000)), N, R, st.tol, rng)


def _s_ex44_impl(sc, entry, st, rng):
    A = _op(sc, entry, ce.rotation(2))
    p = entry.get("params", {})
    return ce.implication43_check(A, JFunction(sc.j_slope if sc else 1.0),
                                  int(p.get("samples", 100_000)), int(p.get("seeded", 200)), st.tol, rng)


def _s_ex52_gap(sc, entry, st, rng):
    p = entry.get("params", {})
    return ce.example52_gap(_truncation(sc, entry, st), int(p.get("t_points", 10_001)),
                            int(p.get("samples", 1000)), st.tol, rng)


def _s_ex52_impl(sc, entry, st, rng):
    p = entry.get("params", {})
    slope = sc.j_slope if sc else 0.5
    return ce.implication52_check(_truncation(sc, entry, st), JFunction(slope),
                                  int(p.get("samples", 100_000)), int(p.get("seeded", 200)), st.tol, rng)


def _s_ex52_max(sc, entry, st, rng):
    p = entry.get("params", {})
    return ce.example52_maximality(_truncation(sc, entry, st), int(p.get("samples", 1000)),
                                   float(p.get("radius", 10.0)), st.tol, rng)


def _s_fact41(sc, entry, st, rng):
    p = entry.get("params", {})
    return ce.fact41_suite(int(p.get("m", 10_000)), int(p.get("queries", 1000)), tol=st.tol, rng=rng)


def _s_fact42(sc, entry, st, rng):
    R, N = _grid(None, st, 33, 2.0)
    return ce.fact42_suite(N, R, tol=st.tol, rng=rng)


def _s_fact51(sc, entry, st, rng):
    ns = (st.n,) if st.n else (2, 4, 8, 16, 32, 64, 128)
    return ce.fact51_suite(ns, tol=st.tol, rng=rng)


def _s_fact33(sc, entry, st, rng):
    R, N = _grid(None, st)
    return ce.fact33_suite(N, R, st.tol)


def _s_probe(sc, entry, st, rng):
    from .sets import Ball
    A = _op(sc, entry, ce.rotation(2))
    C = _cset(sc, entry) or Ball.unit(A.n)
    p = entry.get("params", {})
    z = _vec_param(p, "z")
    zs = _vec_param(p, "zstar")
    z = np.zeros(A.n) if z is None else z
    zs = np.eye(A.n)[0] if zs is None else zs
    R, N = _grid(sc, st)
    return ce.probe_probcon(FitzLinearClosed(A), FitzNormalCone(C), z, zs, GridSpec(R, N))


SUITES = {
    "thm43": _s_thm43, "ex44": _s_ex44, "ex44-implication": _s_ex44_impl,
    "ex52-gap": _s_ex52_gap, "ex52-implication": _s_ex52_impl, "ex52-maximality": _s_ex52_max,
    "fact41": _s_fact41, "fact42": _s_fact42, "fact51": _s_fact51, "fact33": _s_fact33,
    "probe-probcon": _s_probe,
}


def _write_csv(csv_dir: Path, verdicts):
    csv_dir.mkdir(parents=True, exist_ok=True)
    for v in verdicts:
        for stem, (header, rows) in v.tables.items():
            with open(csv_dir / f"{stem}.csv", "w", newline="") as fh:
                w = csv.writer(fh)
                w.writerow(header)
                for r in rows:
                    w.writerow([repr(float(x)) if isinstance(x, float) else x for x in r])


def run(scenario: Optional[Scenario], suite_filters=None, output_path=None, settings: Optional[Settings] = None,
        csv_dir=None, entries=None, stream=None) -> int:
    """Run the selected suites and write the JSON verdict array; return the exit code."""
    st = settings or Settings()
    stream = stream or sys.stdout
    if entries is None:
        entries = list(scenario.suites)
        if suite_filters:
            entries = [e for e in entries if e["name"] in suite_filters]
            if not entries:
                print(f"error: no suite in the scenario matches {list(suite_filters)}", file=sys.stderr)
                return EXIT_INPUT
    records, verdicts = [], []
    code = EXIT_OK
    first_fail = None
    for entry in entries:
        rng = np.random.default_rng(st.seed)
        try:
            v = SUITES[entry["name"]](scenario, entry, st, rng)
        except HypothesisFailed as exc:
            records.append({"name": entry["name"], "verdict": "hypothesis-failed",
                            "failed_predicate": exc.predicate, "detail": exc.detail})
            if code != EXIT_HYPOTHESIS:
                first_fail = entry["name"]
            code = EXIT_HYPOTHESIS
            continue
        verdicts.append(v)
        records.append(v.to_dict())
        if not v.passed and code == EXIT_OK:
            code, first_fail = EXIT_VERDICT, v.name
    text = json.dumps(records, indent=2, sort_keys=True) + "\n"
    if output_path:
        Path(output_path).write_text(text)
    else:
        stream.write(text)
    if csv_dir:
        _write_csv(Path(csv_dir), verdicts)
    if first_fail:
        print(f"failed: {first_fail}", file=sys.stderr)
    return code


def _parser():
    ap = argparse.ArgumentParser(prog="bigconj", description="Fitzpatrick-function verification suites")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scenario", help="scenario JSON file, or a bundled name (ex44, ex52)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tol", type=float, default=ce.DEFAULT_TOL)
    common.add_argument("--grid-n", type=int)
    common.add_argument("--box-radius", type=float)
    common.add_argument("--n", type=int, help="truncation size")
    common.add_argument("--out", help="write the JSON report here instead of stdout")
    common.add_argument("--csv-dir", help="directory for CSV tables")
    sub = ap.add_subparsers(dest="command", required=True)
    v = sub.add_parser("verify", parents=[common], help="run one suite")
    v.add_argument("suite", choices=sorted(SUITES))
    r = sub.add_parser("run", parents=[common], help="run the suites of a scenario")
    r.add_argument("--suite", nargs="+", dest="suites", help="only these suites")
    return ap


def main(argv=None) -> int:
    ap = _parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    if args.seed < 0 or args.seed >= 2 ** 64:
        print("error: --seed must be an unsigned 64-bit integer", file=sys.stderr)
        return EXIT_INPUT
    if not args.tol >= 0:
        print("error: --tol must be nonnegative", file=sys.stderr)
        return EXIT_INPUT
    if args.n is not None and not 2 <= args.n <= MAX_N:
        print(f"error: --n must lie in [2, {MAX_N}]", file=sys.stderr)
        return EXIT_INPUT
    if args.grid_n is not None and args.grid_n < 3:
        print("error: --grid-n must be at least 3", file=sys.stderr)
        return EXIT_INPUT
    if args.box_radius is not None and not args.box_radius > 0:
        print("error: --box-radius must be positive", file=sys.stderr)
        return EXIT_INPUT
    st = Settings(args.seed, args.tol, args.grid_n, args.box_radius, args.n)
    try:
        sc = load_scenario(args.scenario) if args.scenario else None
        if args.command == "run":
            if sc is None:
                print("error: run needs --scenario", file=sys.stderr)
                return EXIT_INPUT
            unknown = [s for s in (args.suites or []) if s not in SUITES]
            if unknown:
                print(f"error: unknown suite(s) {unknown}", file=sys.stderr)
                return EXIT_INPUT
            return run(sc, args.suites, args.out, st, args.csv_dir)
        return run(sc, None, args.out, st, args.csv_dir, entries=[_entry_for(sc, args.suite)])
    except (ParseError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except BigConjError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def _entry_for(sc, name):
    if sc is not None:
        for e in sc.suites:
            if e["name"] == name:
                return e
    return {"name": name}


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
