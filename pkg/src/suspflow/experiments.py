"""Configured experiment runs behind the command line interface.

An experiment is a JSON document with a ``kind`` key and kind-specific
inputs.  Bundled templates live under ``suspflow/templates`` and reference
bundled inputs through the ``$DATA`` path prefix.  Each run writes delimited
output plus a rendered figure into the chosen output directory and returns
an ExperimentResult whose ``success`` reflects the config's ``expect``
block (or the intrinsic pass condition when no expectations are given).

Set SUSPFLOW_THREADS to parallelize the per-level work of spectrum runs.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from . import figures
from .embedding import (
    ScalarExpFlow,
    TorusLinearFlow,
    TrigPolynomial,
    average_operator,
    derivative_obstruction_test,
    resolvent_solve,
    solve_embedding,
    torus_grid,
)
from .equivalence import (
    cocycle_flow_family,
    equivalence_pipeline,
    integral_flow_family,
    linear_flow_family,
)
from .fileio import (
    format_scalar,
    load_cocycle_matrices,
    load_flow_spec,
    load_sft,
    load_trig_polynomial,
    potential_from_dict,
    write_csv,
    write_json,
)
from .potentials import MatrixCocycle
from .pressure import gibbs_measure, pressure, topological_entropy
from .spectrum import (
    DiscreteSpectrumProblem,
    SpectrumProblem,
    SpectrumResult,
    ratio_interval,
    spectrum_sweep,
)
from .suspension import (
    CylinderFlowFunction,
    FlowInvariantMeasure,
    abramov_entropy,
    flow_pressure,
    lift,
)

KINDS = ("pressure", "suspension", "equivalence", "spectrum", "embedding")


@dataclass
class ExperimentResult:
    """Outcome of one configured run."""

    name: str
    kind: str
    success: bool
    summary: str
    values: dict = field(default_factory=dict)
    outputs: list = field(default_factory=list)
    checks: list = field(default_factory=list)


def data_root():
    return resources.files("suspflow") / "data"


def template_root():
    return resources.files("suspflow") / "templates"


def resolve_path(value, base):
    """Expand the $DATA prefix, otherwise resolve relative to the config."""
    text = str(value)
    if text.startswith("$DATA"):
        return Path(str(data_root())) / text[len("$DATA"):].lstrip("/")
    path = Path(text)
    if not path.is_absolute() and base is not None:
        path = Path(base) / path
    return path


def list_templates():
    """Bundled template names with kind and description."""
    entries = []
    for item in sorted(template_root().iterdir(), key=lambda p: p.name):
        if not item.name.endswith(".json"):
            continue
        config = json.loads(item.read_text())
        entries.append(
            (item.name[:-5], config.get("kind", "?"), config.get("description", ""))
        )
    return entries


def load_config(spec):
    """Load an experiment config from a file path or a template name.

    Returns (name, config, base_dir) where base_dir anchors relative paths.
    """
    path = Path(spec)
    if path.is_file():
        return path.stem, json.loads(path.read_text()), path.parent
    candidate = template_root() / f"{spec}.json"
    if candidate.is_file():
        return str(spec), json.loads(candidate.read_text()), None
    raise FileNotFoundError(
        f"no config file or bundled template named '{spec}'"
    )


def _require(config, keys, kind):
    for key in keys:
        if key not in config:
            raise ValueError(f"{kind} experiment config misses key '{key}'")


def validate_config(config, base=None):
    """Check structure and referenced files; raises ValueError on problems."""
    kind = config.get("kind")
    if kind not in KINDS:
        raise ValueError(
            f"unknown experiment kind {kind!r}; expected one of {', '.join(KINDS)}"
        )
    if kind == "pressure":
        _require(config, ("sft", "potential"), kind)
        load_sft(resolve_path(config["sft"], base))
    elif kind == "suspension":
        _require(config, ("flow",), kind)
        load_flow_spec(resolve_path(config["flow"], base))
    elif kind == "equivalence":
        _require(config, ("flow", "family"), kind)
        sft, flow = load_flow_spec(resolve_path(config["flow"], base))
        _family_from_spec(sft, flow, config["family"], base)
    elif kind == "spectrum":
        mode = config.get("mode", "flow")
        if mode == "flow":
            _require(config, ("flow", "numerator", "denominator", "weight"), kind)
            load_flow_spec(resolve_path(config["flow"], base))
        elif mode == "discrete":
            _require(config, ("sft", "phi_a", "phi_b", "weight"), kind)
            load_sft(resolve_path(config["sft"], base))
        else:
            raise ValueError(f"spectrum mode must be 'flow' or 'discrete', not {mode!r}")
    elif kind == "embedding":
        _require(config, ("operation", "flow", "target"), kind)
        if config["operation"] not in ("solve", "derivative", "resolvent"):
            raise ValueError(
                f"embedding operation must be solve, derivative or resolvent,"
                f" not {config['operation']!r}"
            )
        _flow_from_spec(config["flow"])
    return kind


def run_experiment(name, config, outdir, base=None):
    """Validate, run, and write outputs for one experiment."""
    kind = validate_config(config, base)
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    runner = {
        "pressure": _run_pressure,
        "suspension": _run_suspension,
        "equivalence": _run_equivalence,
        "spectrum": _run_spectrum,
        "embedding": _run_embedding,
    }[kind]
    return runner(name, config, outdir, base)


def _check(checks, label, ok):
    checks.append((label, bool(ok)))
    return bool(ok)


def _finish(name, kind, summary, values, outputs, checks, intrinsic=True):
    success = bool(intrinsic) and all(ok for _, ok in checks)
    return ExperimentResult(name, kind, success, summary, values, outputs, checks)


# -- pressure ---------------------------------------------------------------


def _run_pressure(name, config, outdir, base):
    sft = load_sft(resolve_path(config["sft"], base))
    phi = potential_from_dict(sft, config["potential"])
    tilts = config.get("tilts")
    if tilts is None:
        tilts = [0.0]
    elif isinstance(tilts, dict):
        tilts = list(
            np.linspace(tilts["lo"], tilts["hi"], int(tilts["count"]))
        )
    rows = []
    values = {"pressure": pressure(sft, phi)}
    for q in tilts:
        tilted = phi * float(q)
        p = pressure(sft, tilted)
        measure = gibbs_measure(sft, tilted)
        h = measure.entropy()
        mean_phi = measure.integrate(phi)
        rows.append((q, p, h, mean_phi))
    values["topological_entropy"] = topological_entropy(sft)

    outputs = [
        write_csv(outdir / "pressure.csv",
                  ("tilt", "pressure", "entropy", "potential_mean"), rows),
        figures.plot_pressure_sweep([r[0] for r in rows], [r[1] for r in rows],
                                    outdir / "pressure.png"),
    ]
    zero_measure = gibbs_measure(sft, phi * 0.0)
    outputs.append(write_json(outdir / "gibbs.json", {
        "stationary": {"".join(map(str, w)): v
                       for w, v in sorted(zero_measure.stationary.items())},
        "kernel": {f"{''.join(map(str, w))}>{''.join(map(str, v))}": p
                   for w, row in sorted(zero_measure.kernel.items())
                   for v, p in sorted(row.items())},
    }))

    checks = []
    expect = config.get("expect", {})
    tol = expect.get("tol", 1e-9)
    if "pressure" in expect:
        err = abs(values["pressure"] - expect["pressure"])
        values["pressure_error"] = err
        _check(checks, f"pressure of the potential within {tol:g}", err <= tol)
    if "entropy" in expect:
        err = abs(values["topological_entropy"] - expect["entropy"])
        values["entropy_error"] = err
        _check(checks, f"topological entropy within {tol:g}", err <= tol)
    # Gibbs property: pressure equals entropy plus mean potential at every tilt
    consistency = max(abs(p - h - q * m) for q, p, h, m in rows)
    values["gibbs_consistency"] = consistency
    _check(checks, "pressure = entropy + mean tilted potential", consistency <= 1e-9)

    summary = (f"pressure {format_scalar(values['pressure'])} over "
               f"{len(rows)} tilt(s)")
    return _finish(name, "pressure", summary, values, outputs, checks)


# -- suspension -------------------------------------------------------------


def _run_suspension(name, config, outdir, base):
    sft, flow = load_flow_spec(resolve_path(config["flow"], base))
    roof = flow.roof
    values = {
        "roof_inf": roof.inf,
        "roof_sup": roof.sup,
        "base_entropy": topological_entropy(sft),
    }
    zero = lift(flow, potential_from_dict(
        sft, {"depth": roof.depth, "values": {
            "".join(map(str, w)): 0.0 for w in sft.words(roof.depth)}}))
    root = flow_pressure(flow, zero)
    values["flow_entropy"] = root

    # the maximizing measure is the Gibbs state of the scaled return time
    equilibrium = gibbs_measure(sft, roof.height * (-root))
    values["abramov_at_equilibrium"] = abramov_entropy(flow, equilibrium)
    values["roof_mean_at_equilibrium"] = equilibrium.integrate(roof.height)
    values["abramov_gap"] = abs(values["abramov_at_equilibrium"] - root)

    if "observable" in config:
        table = potential_from_dict(sft, config["observable"])
        lifted = lift(flow, table)
        values["observable_pressure"] = flow_pressure(flow, lifted)
        nu = FlowInvariantMeasure(flow, equilibrium)
        values["observable_mean_at_equilibrium"] = nu.integrate(lifted)

    rows = sorted(values.items())
    outputs = [
        write_csv(outdir / "suspension.csv", ("quantity", "value"), rows),
        figures.plot_roof_profile(flow, outdir / "roof.png"),
    ]

    checks = []
    expect = config.get("expect", {})
    if "flow_entropy" in expect:
        tol = expect.get("tol", 1e-9)
        err = abs(root - expect["flow_entropy"])
        values["flow_entropy_error"] = err
        _check(checks, f"flow entropy within {tol:g}", err <= tol)
    _check(checks, "entropy-to-return-time ratio matches the root",
           values["abramov_gap"] <= 1e-9)

    summary = f"flow entropy root: {format_scalar(root)}"
    return _finish(name, "suspension", summary, values, outputs, checks)


# -- equivalence ------------------------------------------------------------


def _family_from_spec(sft, flow, spec, base):
    ftype = spec.get("type")
    label = spec.get("label", "")
    if ftype == "integral":
        table = potential_from_dict(sft, spec["table"])
        return integral_flow_family(flow, lift(flow, table), label=label)
    if ftype == "linear":
        return linear_flow_family(flow, float(spec["rate"]), label=label)
    if ftype == "cocycle":
        k, matrices = load_cocycle_matrices(resolve_path(spec["matrices"], base))
        if k != sft.k:
            raise ValueError(
                f"cocycle file has {k} symbols but the subshift has {sft.k}"
            )
        return cocycle_flow_family(flow, MatrixCocycle(sft, matrices), label=label)
    raise ValueError(
        f"family type must be integral, linear or cocycle, not {ftype!r}"
    )


def _run_equivalence(name, config, outdir, base):
    sft, flow = load_flow_spec(resolve_path(config["flow"], base))
    family = _family_from_spec(sft, flow, config["family"], base)
    horizon = config.get("horizon_factor", 64.0) * flow.roof.sup
    report, _ = equivalence_pipeline(
        flow,
        family,
        block_length=int(config.get("block_length", 8)),
        horizon=horizon,
        threshold=float(config.get("threshold", 1e-8)),
    )

    values = {
        "final_flow_defect": report.final_flow_defect,
        "pipeline_success": report.success,
        "horizon": report.horizon,
    }
    early = [d for t, d in report.flow_curve
             if abs(t - 4.0 * flow.roof.sup) <= 1e-9 * flow.roof.sup]
    if early and early[0] > 0.0:
        values["decay_ratio"] = report.final_flow_defect / early[0]

    rows = [("flow", t, d) for t, d in report.flow_curve]
    rows += [("discrete", n, d) for n, d in report.discrete_curve]
    outputs = [
        write_json(outdir / "equivalence.json", report.to_dict()),
        write_csv(outdir / "defects.csv", ("curve", "scale", "defect"), rows),
        write_csv(outdir / "candidate.csv", ("word", "value"),
                  sorted(("".join(map(str, w)), v)
                         for w, v in report.candidate_table.values.items())),
        figures.plot_defect_curves(
            [t for t, _ in report.flow_curve],
            [d for _, d in report.flow_curve],
            [n for n, _ in report.discrete_curve],
            [d for _, d in report.discrete_curve],
            outdir / "defects.png",
            title=f"Defect decay ({report.family_label})",
        ),
    ]

    checks = []
    expect = config.get("expect", {})
    intrinsic = True
    if "success" in expect:
        _check(checks, f"pipeline success is {expect['success']}",
               report.success == bool(expect["success"]))
    else:
        intrinsic = report.success
    if "max_decay_ratio" in expect:
        ratio = values.get("decay_ratio")
        _check(checks, f"defect at horizon below {expect['max_decay_ratio']:g}"
               " of the early defect",
               ratio is not None and ratio <= expect["max_decay_ratio"])

    summary = (f"family {report.family_label}: final defect "
               f"{report.final_flow_defect:.3e} at t={report.horizon:g} "
               f"({'below' if report.success else 'above'} threshold "
               f"{report.threshold:g})")
    return _finish(name, "equivalence", summary, values, outputs, checks, intrinsic)


# -- spectrum ---------------------------------------------------------------


def _weight_from_spec(sft, flow, spec):
    """Flow weight: "roof" counts elapsed time, a table reads cylinders."""
    if spec == "roof":
        return CylinderFlowFunction.constant(flow, 1.0)
    return CylinderFlowFunction(flow, potential_from_dict(sft, spec))


def _spectrum_problem(config, base):
    mode = config.get("mode", "flow")
    if mode == "discrete":
        sft = load_sft(resolve_path(config["sft"], base))
        return DiscreteSpectrumProblem(
            sft,
            potential_from_dict(sft, config["phi_a"]),
            potential_from_dict(sft, config["phi_b"]),
            potential_from_dict(sft, config["weight"]),
        )
    sft, flow = load_flow_spec(resolve_path(config["flow"], base))
    return SpectrumProblem(
        flow,
        _family_from_spec(sft, flow, config["numerator"], base),
        _family_from_spec(sft, flow, config["denominator"], base),
        _weight_from_spec(sft, flow, config["weight"]),
        block_length=int(config.get("block_length", 8)),
    )


def _alpha_grid(config, interval):
    spec = config.get("alphas", {"count": 9, "margin": 0.1})
    if isinstance(spec, list):
        return [float(a) for a in spec]
    lo, hi = interval
    pad = spec.get("margin", 0.1) * (hi - lo)
    return list(np.linspace(lo + pad, hi - pad, int(spec.get("count", 9))))


def _run_spectrum(name, config, outdir, base):
    problem = _spectrum_problem(config, base)
    interval = ratio_interval(problem)
    alphas = _alpha_grid(config, interval)

    threads = int(os.environ.get("SUSPFLOW_THREADS", "1"))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            partials = list(pool.map(
                lambda a: spectrum_sweep(problem, [a]), alphas))
        result = SpectrumResult([p.rows[0] for p in partials], interval)
    else:
        result = spectrum_sweep(problem, alphas)

    values = {
        "interval_lo": interval[0],
        "interval_hi": interval[1],
        "levels": len(result.rows),
        "empty_levels": sum(1 for r in result.rows if r.empty),
    }
    gaps = [abs(r.dim_root - r.dim_variational)
            for r in result.rows if not r.empty]
    if gaps:
        values["route_gap"] = max(gaps)

    outputs = [
        write_csv(outdir / "spectrum.csv",
                  ("alpha", "dim_root", "dim_variational", "q_star",
                   "witness_tilt", "witness_ratio", "empty"),
                  result.as_table()),
        figures.plot_spectrum([r.alpha for r in result.rows],
                              [r.dim_root for r in result.rows],
                              outdir / "spectrum.png", interval=interval),
    ]

    checks = []
    expect = config.get("expect", {})
    if expect.get("nonempty"):
        _check(checks, "every requested level is realized",
               values["empty_levels"] == 0)
    if "route_gap" in expect:
        _check(checks, f"both routes agree within {expect['route_gap']:g}",
               gaps and max(gaps) <= expect["route_gap"])
    if "binary_entropy_tol" in expect:
        tol = expect["binary_entropy_tol"]
        worst = max(
            abs(r.dim_root - (-r.alpha * math.log(r.alpha)
                              - (1 - r.alpha) * math.log(1 - r.alpha)))
            for r in result.rows if not r.empty
        )
        values["binary_entropy_error"] = worst
        _check(checks, f"matches the binary entropy curve within {tol:g}",
               worst <= tol)

    summary = (f"{values['levels']} levels on ratio interval "
               f"[{interval[0]:.6g}, {interval[1]:.6g}], "
               f"{values['empty_levels']} empty")
    return _finish(name, "spectrum", summary, values, outputs, checks)


# -- embedding --------------------------------------------------------------


class _Sawtooth:
    """Sum of weighted fractional parts; discontinuous on coordinate zeros."""

    def __init__(self, weights):
        self.weights = np.asarray(weights, dtype=float)

    def __call__(self, x):
        return float(np.dot(self.weights, np.asarray(x, dtype=float) % 1.0))

    def gap_distance(self, x):
        active = np.asarray(x)[self.weights != 0.0] % 1.0
        return float(np.min(np.minimum(active, 1.0 - active), initial=0.5))


def _flow_from_spec(spec):
    ftype = spec.get("type")
    if ftype == "torus":
        return TorusLinearFlow([float(v) for v in spec["velocity"]])
    if ftype == "scalar_exp":
        return ScalarExpFlow()
    raise ValueError(f"flow type must be torus or scalar_exp, not {ftype!r}")


def _target_from_spec(spec, base):
    if isinstance(spec, str):
        return load_trig_polynomial(resolve_path(spec, base))
    if "sawtooth" in spec:
        return _Sawtooth(spec["sawtooth"])
    target = None
    for freq in spec.get("cosine", []):
        part = TrigPolynomial.cosine(freq)
        target = part if target is None else target + part
    for freq in spec.get("sine", []):
        part = TrigPolynomial.sine(freq)
        target = part if target is None else target + part
    if "constant" in spec:
        part = TrigPolynomial.constant(
            spec["constant"], dim=target.dim if target else spec.get("dim", 1))
        target = part if target is None else target + part
    if target is None:
        raise ValueError("target spec needs cosine/sine/constant modes,"
                         " a sawtooth, or a file path")
    return target


def _coefficient_rows(poly):
    rows = []
    for n, c in sorted(poly.coefficients.items()):
        rows.append((" ".join(str(v) for v in n), c.real, c.imag))
    return rows


def _run_embedding(name, config, outdir, base):
    flow = _flow_from_spec(config["flow"])
    target = _target_from_spec(config["target"], base)
    operation = config["operation"]
    grid_n = int(config.get("grid", 21))
    expect = config.get("expect", {})
    checks = []
    values = {}
    outputs = []
    intrinsic = True

    if operation == "solve":
        result = solve_embedding(flow, target)
        values["obstruction_count"] = len(result.obstructions)
        if result.ok:
            averaged = average_operator(flow, result.solution)
            residual = averaged.coefficient_distance(target)
            grid = torus_grid(grid_n, flow.dim)
            sup_residual = max(
                abs(averaged(x) - target(x)) for x in grid) if grid else 0.0
            values["coefficient_residual"] = residual
            values["sup_residual"] = sup_residual
            outputs.append(write_csv(outdir / "solution.csv",
                                     ("frequency", "re", "im"),
                                     _coefficient_rows(result.solution)))
            outputs.append(figures.plot_residuals(
                [" ".join(map(str, n)) for n in sorted(result.solution.coefficients)],
                [abs(c) for _, c in sorted(result.solution.coefficients.items())],
                outdir / "solution.png", title="Solution mode magnitudes"))
            summary = (f"solved: coefficient residual {residual:.3e}, "
                       f"sup residual {sup_residual:.3e}")
        else:
            rows = [(" ".join(map(str, o.freq)), o.dot_velocity,
                     o.coefficient.real, o.coefficient.imag,
                     o.multiplier_magnitude) for o in result.obstructions]
            outputs.append(write_csv(
                outdir / "obstructions.csv",
                ("frequency", "dot_velocity", "re", "im", "multiplier"), rows))
            outputs.append(figures.plot_residuals(
                [r[0] for r in rows], [abs(complex(r[2], r[3])) for r in rows],
                outdir / "obstructions.png", title="Resonant mode amplitudes"))
            summary = f"{len(result.obstructions)} resonant obstruction(s)"
            intrinsic = "obstructions" in expect
        if "obstructions" in expect:
            _check(checks, f"exactly {expect['obstructions']} obstruction(s)",
                   len(result.obstructions) == int(expect["obstructions"]))
        if "max_residual" in expect and result.ok:
            _check(checks, f"residual below {expect['max_residual']:g}",
                   max(values["coefficient_residual"],
                       values["sup_residual"]) <= expect["max_residual"])

    elif operation == "derivative":
        avoid = target.gap_distance if isinstance(target, _Sawtooth) else None
        samples = torus_grid(grid_n, flow.dim, avoid=avoid, margin=0.05)
        report = derivative_obstruction_test(flow, target, samples)
        values.update(mean_derivative=report.mean, derivative_spread=report.spread,
                      obstruction=report.obstruction,
                      inconclusive=report.inconclusive)
        outputs.append(write_csv(
            outdir / "derivatives.csv", ("point", "derivative"),
            [(" ".join(f"{v:.6g}" for v in np.atleast_1d(x)), d)
             for x, d in zip(report.samples, report.derivatives)]))
        outputs.append(figures.plot_residuals(
            [str(i) for i in range(len(report.derivatives))],
            [abs(d - report.mean) + 1e-18 for d in report.derivatives],
            outdir / "derivatives.png", tol=report.constant_tol,
            title="Deviation of orbit derivatives from the mean"))
        if "obstruction" in expect:
            _check(checks, f"derivative obstruction is {expect['obstruction']}",
                   report.obstruction == bool(expect["obstruction"]))
        if "mean" in expect:
            tol = expect.get("tol", 1e-6)
            _check(checks, f"mean derivative within {tol:g}",
                   abs(report.mean - expect["mean"]) <= tol)
        summary = (f"orbit derivative mean {report.mean:.6g}, spread "
                   f"{report.spread:.2e}, obstruction={report.obstruction}")

    else:  # resolvent
        lam = float(config.get("lambda", 2.0))
        a, centered = resolvent_solve(flow, target, lam)
        grid = np.arange(grid_n) / grid_n
        averaged = average_operator(flow, a)
        residual = max(abs(averaged(x) - lam * a(x) - target(x)) for x in grid)
        values.update(resolvent_lambda=lam, identity_residual=residual,
                      centered_mean=centered.mean())
        outputs.append(write_csv(outdir / "resolvent.csv",
                                 ("frequency", "re", "im"),
                                 _coefficient_rows(a)))
        outputs.append(figures.plot_residuals(
            [" ".join(map(str, n)) for n in sorted(a.coefficients)],
            [abs(c) for _, c in sorted(a.coefficients.items())],
            outdir / "resolvent.png", title="Resolvent mode magnitudes"))
        if "max_residual" in expect:
            _check(checks, f"identity residual below {expect['max_residual']:g}",
                   residual <= expect["max_residual"])
        summary = f"resolvent at {lam:g}: identity residual {residual:.3e}"

    return _finish(name, "embedding", summary, values, outputs, checks, intrinsic)
