"""Command-line interface.

Subcommands: ``validate``, ``report``, ``check-derivatives``,
``uniformize``, ``convert-uf``.  All output is UTF-8 JSON on standard
output unless ``--output`` is given; floats carry 17 significant digits so
identical inputs produce byte-identical results.

Exit codes: 0 success, 2 parse/schema error, 3 validation failure,
4 derivative-check failure, 5 iteration limit, 6 infeasible target.
"""

from __future__ import annotations

import json
import math
import sys

import click
import numpy as np

from . import checks as checks_mod
from . import conformal as cf
from . import fixtures as fixtures_mod
from . import report as report_mod
from .errors import (
    DckError,
    InfeasibleTarget,
    IterationLimit,
    LineSearchFailed,
    SchemaError,
    SingularHessian,
)
from .geometry import Background
from .mesh import euler_characteristic
from .solver import SolverConfig, newton_prescribed_curvature
from .surface_io import Surface, load_surface, surface_to_dict

EXIT_PARSE = 2
EXIT_VALIDATION = 3
EXIT_CHECK_FAILED = 4
EXIT_ITERATION_LIMIT = 5
EXIT_INFEASIBLE = 6


def _emit(obj, output=None):
    text = report_mod.canonical_dumps(obj)
    if output:
        with open(output, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def _fail(code, kind, message, output=None, **extra):
    _emit({"error": kind, "message": str(message), **extra}, output)
    sys.exit(code)


def _load(input_path, output):
    try:
        return load_surface(input_path)
    except SchemaError as exc:
        _fail(EXIT_PARSE, "schema", exc, output)


def _validated(surface: Surface, output):
    """Validation report, exiting 3 if the surface fails."""
    try:
        report = report_mod.validation_report(surface)
    except DckError as exc:
        _fail(EXIT_VALIDATION, type(exc).__name__, exc, output)
    if not report["ok"]:
        _emit({"error": "validation", "report": report}, output)
        sys.exit(EXIT_VALIDATION)
    return report


@click.group()
def main():
    """Discrete conformal structures: validate, inspect, and uniformize."""


@main.command()
@click.option("--input", "input_path", required=True, type=click.Path(), help="Surface file (JSON or OBJ).")
@click.option("--output", type=click.Path(), default=None, help="Write JSON here instead of stdout.")
def validate(input_path, output):
    """Manifold, conformal-domain, and compatibility checks."""
    surface = _load(input_path, output)
    report = _validated(surface, output)
    _emit({"command": "validate", "input": str(input_path), "report": report}, output)


@main.command()
@click.option("--input", "input_path", required=True, type=click.Path())
@click.option("--output", type=click.Path(), default=None)
@click.option("--jacobian", is_flag=True, help="Include the sparse dK/du matrix.")
@click.option("--figures", "figures_dir", type=click.Path(), default=None,
              help="Render summary figures (PNG) into this directory.")
def report(input_path, output, jacobian, figures_dir):
    """Full geometry report: lengths, angles, curvatures, centers, heights."""
    surface = _load(input_path, output)
    _validated(surface, output)
    try:
        body = report_mod.geometry_report(surface, jacobian=jacobian)
    except DckError as exc:
        _fail(EXIT_VALIDATION, type(exc).__name__, exc, output)
    if figures_dir:
        from .figures import render_report_figures

        body["figures"] = render_report_figures(body, figures_dir)
    _emit({"command": "report", "input": str(input_path), "report": body}, output)


@main.command("check-derivatives")
@click.option("--input", "input_path", type=click.Path(), default=None,
              help="Single surface to check; default: every bundled fixture.")
@click.option("--output", type=click.Path(), default=None)
@click.option("--seed", type=int, default=0, show_default=True,
              help="Seed for the random perturbation points.")
def check_derivatives(input_path, output, seed):
    """Compare analytic derivatives against the finite-difference oracle."""
    if input_path is not None:
        jobs = [(str(input_path), None)]
    else:
        jobs = [
            (name, fixtures_mod.fixture_path(name))
            for name in fixtures_mod.fixture_names()
        ]
        if not jobs:
            _fail(EXIT_PARSE, "no-fixtures",
                  f"no fixtures found in {fixtures_mod.fixture_dir()}", output)

    results = []
    all_pass = True
    for label, path in jobs:
        surface = _load(path if path is not None else label, output)
        try:
            outcome = checks_mod.run_battery(surface, seed=seed)
        except DckError as exc:
            _fail(EXIT_VALIDATION, type(exc).__name__,
                  f"{label}: {exc}", output)
        outcome = {"surface": label, **outcome}
        results.append(outcome)
        all_pass = all_pass and outcome["pass"]
    _emit(
        {
            "command": "check-derivatives",
            "seed": seed,
            "surfaces": results,
            "pass": all_pass,
        },
        output,
    )
    if not all_pass:
        sys.exit(EXIT_CHECK_FAILED)


def _parse_target(selector: str, surface: Surface, t):
    chi = euler_characteristic(t)
    n = t.num_vertices
    if selector == "zero":
        return np.zeros(n)
    if selector == "uniform":
        # Equal curvature everywhere.  Euclidean surfaces must land exactly
        # on the total-curvature identity; curved ones use zero since any
        # constant total 2*pi*chi would force zero total area.
        if surface.background is Background.EUCLIDEAN:
            return np.full(n, 2.0 * math.pi * chi / n)
        return np.zeros(n)
    try:
        with open(selector, "r", encoding="utf-8") as handle:
            data = json.load(handle)
    except OSError as exc:
        raise SchemaError(f"cannot read target file {selector}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON in target file {selector}: {exc}") from exc
    if isinstance(data, dict) and "target_K" in data:
        data = data["target_K"]
    if not isinstance(data, list):
        raise SchemaError("target file must hold a list of {id, K} entries")
    by_id = {}
    for entry in data:
        if not (isinstance(entry, dict) and "id" in entry and "K" in entry):
            raise SchemaError(f"target entry {entry!r} must carry id and K")
        by_id[entry["id"]] = float(entry["K"])
    missing = [v for v in t.vertices if v not in by_id]
    if missing:
        raise SchemaError(f"target file misses vertices {missing}")
    return np.array([by_id[v] for v in t.vertices])


@main.command()
@click.option("--input", "input_path", required=True, type=click.Path())
@click.option("--output", type=click.Path(), default=None,
              help="Write the solved surface file here (trace goes to stdout).")
@click.option("--target-k", "target_spec", default=None,
              help='Target curvature: "zero", "uniform", or a JSON file; '
                   "default: the file's target_K, else zero.")
@click.option("--tolerance", type=float, default=None, help="Residual tolerance.")
@click.option("--max-iter", type=int, default=None, help="Newton iteration budget.")
@click.option("--figures", "figures_dir", type=click.Path(), default=None,
              help="Render a convergence figure into this directory.")
def uniformize(input_path, output, target_spec, tolerance, max_iter, figures_dir):
    """Solve for the conformal factors with prescribed curvature."""
    surface = _load(input_path, None)
    _validated(surface, None)
    t = surface.triangulation()
    c = surface.conformal(t)

    try:
        if target_spec is not None:
            target = _parse_target(target_spec, surface, t)
        else:
            target = surface.target_array(t)
            if target is None:
                target = np.zeros(t.num_vertices)
    except SchemaError as exc:
        _fail(EXIT_PARSE, "schema", exc)

    options = dict(surface.solver_options)
    if tolerance is not None:
        options["grad_tolerance"] = tolerance
    if max_iter is not None:
        options["max_iterations"] = max_iter
    cfg = SolverConfig(target_K=target, **options)

    chi = euler_characteristic(t)
    sums = {
        "target_total": float(target.sum()),
        "two_pi_chi": 2.0 * math.pi * chi,
    }
    try:
        solved, trace = newton_prescribed_curvature(c, cfg)
    except InfeasibleTarget as exc:
        _fail(EXIT_INFEASIBLE, "infeasible-target", exc, gauss_bonnet=sums)
    except SingularHessian as exc:
        _fail(EXIT_VALIDATION, "singular-hessian", exc)
    except (IterationLimit, LineSearchFailed) as exc:
        body = {
            "error": type(exc).__name__,
            "message": str(exc),
            "trace": report_mod.trace_report(exc.trace) if exc.trace else None,
        }
        _emit(body)
        sys.exit(EXIT_ITERATION_LIMIT)

    solved_surface = surface.with_f_array(t, solved.f)
    trace_body = report_mod.trace_report(trace)
    if figures_dir:
        from .figures import render_trace_figure

        trace_body["figures"] = render_trace_figure(trace_body, figures_dir)
    result = {
        "command": "uniformize",
        "input": str(input_path),
        "gauss_bonnet": sums,
        "trace": trace_body,
    }
    if output:
        with open(output, "w", encoding="utf-8") as handle:
            handle.write(report_mod.canonical_dumps(surface_to_dict(solved_surface)))
        result["solution_file"] = str(output)
    else:
        result["solution"] = surface_to_dict(solved_surface)
    _emit(result)


@main.command("convert-uf")
@click.option("--input", "input_path", required=True, type=click.Path())
@click.option("--output", type=click.Path(), default=None)
def convert_uf(input_path, output):
    """Report the u <-> f change of variables for every vertex."""
    surface = _load(input_path, output)
    try:
        t = surface.triangulation()
        c = surface.conformal(t)
        u = cf.u_from_f(c)
        f_back = cf.f_from_u(c.background, c.alpha, u)
    except DckError as exc:
        _fail(EXIT_VALIDATION, type(exc).__name__, exc, output)
    _emit(
        {
            "command": "convert-uf",
            "input": str(input_path),
            "background": surface.background.value,
            "vertices": [
                {
                    "id": v,
                    "alpha": float(c.alpha[n]),
                    "f": float(c.f[n]),
                    "u": float(u[n]),
                }
                for n, v in enumerate(t.vertices)
            ],
            "roundtrip_max_error": float(np.abs(f_back - c.f).max()),
        },
        output,
    )


if __name__ == "__main__":
    main()
