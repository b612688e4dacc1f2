"""Command-line front end.

Usage::

    condibeam <experiment> --config <path> [--out <path>] [--format csv|json-like]
    condibeam selftest

Configs are flat ``key = value`` documents ('#' starts a comment); unknown
keys are errors, not warnings, since a silently ignored typo in a physics
parameter is the worst failure mode here.  Complex values are written as
"re+imi" pairs (e.g. ``beta = 1.5-0.25i``); angles are radians.

Results go to stdout as a structured text document that embeds the config
byte for byte; grid payloads are written as CSV with a three-line header
(axes, ranges, resolution).  ``--format json-like`` emits one JSON document
with everything inline instead.  Identical configs reproduce identical
results.

Exit codes: 0 success, 2 config error, 3 domain error (zero probability,
truncation, ...), 4 selftest failure.
"""

import argparse
import json
import math
import sys
import time

import numpy as np
from scipy.integrate import simpson

from . import __version__, cats, conditional, fock, phasespace, twomode
from .beamsplitter import BeamSplitterParams, ReferencePrep
from .errors import ConfigError, DomainError
from .selftest import run_selftest

__all__ = ["main", "run_experiment", "parse_config"]


# --- config parsing -------------------------------------------------------

def parse_config(text):
    """Flat key = value document -> ordered dict of raw strings."""
    entries = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        key = key.strip()
        value = value.strip()
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        if key in entries:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        entries[key] = value
    return entries


def _parse_complex(text):
    try:
        return complex(text.replace("i", "j").replace(" ", ""))
    except ValueError:
        raise ConfigError(f"cannot parse complex value {text!r} (use re+imi)") from None


def _parse_value(kind, text):
    try:
        if kind == "int":
            return int(text)
        if kind == "float":
            return float(text)
        if kind == "complex":
            return _parse_complex(text)
        if kind == "str":
            return text
    except ConfigError:
        raise
    except ValueError:
        raise ConfigError(f"cannot parse {text!r} as {kind}") from None
    raise AssertionError(kind)


def _extract(entries, experiment, schema):
    """Validate keys against the schema; returns a fully defaulted dict."""
    allowed = dict(schema)
    unknown = [k for k in entries if k not in allowed and k != "experiment"]
    if unknown:
        raise ConfigError(
            f"unknown config key(s) {', '.join(sorted(unknown))!s}; "
            f"allowed: {', '.join(sorted(allowed))}")
    if "experiment" in entries and entries["experiment"] != experiment:
        raise ConfigError(
            f"config says experiment = {entries['experiment']!r}, "
            f"command line says {experiment!r}")
    out = {}
    for key, (kind, default) in allowed.items():
        if key in entries:
            out[key] = _parse_value(kind, entries[key])
        elif default is _REQUIRED:
            raise ConfigError(f"missing required key {key!r}")
        else:
            out[key] = default
    return out


_REQUIRED = object()


def _policy(params):
    return fock.TruncationPolicy(cutoff=params["cutoff"], tail_tol=params["tail_tol"])


def _bs(params):
    return BeamSplitterParams(params["theta"], params["phi_t"], params["phi_r"])


def _fmt_complex(z):
    z = complex(z)
    return f"{z.real!r}{z.imag:+}i".replace("+-", "-") if z.imag else repr(z.real)


# --- experiments ----------------------------------------------------------

_COMMON = {
    "cutoff": ("int", 48),
    "tail_tol": ("float", 1e-9),
}

_BS_KEYS = {
    "theta": ("float", math.pi / 4),
    "phi_t": ("float", 0.0),
    "phi_r": ("float", 0.0),
}


def _run_y_matrix(params):
    policy = _policy(params)
    bs = _bs(params)
    y = conditional.y_displaced_fock(params["m"], params["n"], params["alpha"],
                                     params["beta"], bs, policy)
    oracle = twomode.oracle_y(ReferencePrep.fock(params["m"], params["alpha"]),
                              ReferencePrep.fock(params["n"], params["beta"]),
                              bs, policy)
    half = policy.safe_levels
    dev = (np.linalg.norm(y.mat[:half, :half] - oracle.mat[:half, :half])
           / np.linalg.norm(oracle.mat[:half, :half]))
    sv = np.linalg.svd(y.mat, compute_uv=False)
    scalars = {
        "frobenius_norm": float(np.linalg.norm(y.mat)),
        "largest_singular_value": float(sv[0]),
        "oracle_rel_frobenius_error": float(dev),
        "ordering_parameter_s": bs.s,
    }
    return scalars, []


_Y_MATRIX_SCHEMA = {
    **_COMMON, **_BS_KEYS,
    "m": ("int", _REQUIRED),
    "n": ("int", _REQUIRED),
    "alpha": ("complex", 0j),
    "beta": ("complex", 0j),
}


def _run_scheme_a(params):
    policy = _policy(params)
    spec = cats.CatSpec(params["n"], params["beta"])
    chi = cats.chi_state(spec, policy)
    state, p = cats.scheme_a_state(spec, policy, params["phi_t"], params["phi_r"],
                                   route=params["route"])
    n_sum, p_formula = cats.cat_norm_and_prob(spec)
    scalars = {
        "probability": p,
        "probability_formula": p_formula,
        "norm_sum": n_sum,
        "fidelity_vs_chi": abs(fock.inner(chi, state)),
    }
    for k in range(spec.n + 1):
        scalars[f"amp_{k}"] = complex(chi.amps[k])
    return scalars, []


_SCHEME_A_SCHEMA = {
    **_COMMON,
    "n": ("int", _REQUIRED),
    "beta": ("complex", _REQUIRED),
    "phi_t": ("float", 0.0),
    "phi_r": ("float", 0.0),
    "route": ("str", "closed"),
}


def _run_scheme_b(params):
    policy = _policy(params)
    spec = cats.CatSpec(params["n"], params["beta"])
    state, p = cats.scheme_b_state(spec, policy, route=params["route"])
    chi = cats.chi_state(spec, policy)
    displaced = fock.apply(fock.displacement_op(spec.beta, policy), chi)
    _, p_formula = cats.cat_norm_and_prob(spec)
    scalars = {
        "probability": p,
        "probability_formula": p_formula,
        "fidelity_vs_displaced_chi": abs(fock.inner(displaced, state)),
    }
    return scalars, []


_SCHEME_B_SCHEMA = {
    **_COMMON,
    "n": ("int", _REQUIRED),
    "beta": ("complex", _REQUIRED),
    "route": ("str", "closed"),
}


def _run_multi_cat(params):
    policy = _policy(params)
    spec = cats.CatSpec(params["n"], params["beta"], params["k"])
    state = cats.multi_cat_state(spec, policy)
    scalars = {
        "log_norm": cats.multi_cat_log_norm(spec),
        "vector_norm": float(np.linalg.norm(state.amps)),
        "support_step": spec.k,
        "top_level": spec.k * spec.n,
    }
    for j in range(spec.n + 1):
        scalars[f"amp_{spec.k * j}"] = complex(state.amps[spec.k * j])
    return scalars, []


_MULTI_CAT_SCHEMA = {
    **_COMMON,
    "n": ("int", _REQUIRED),
    "k": ("int", _REQUIRED),
    "beta": ("complex", _REQUIRED),
}


def _grid_from(params, names):
    return phasespace.PhaseGrid.square(params["grid_lo"], params["grid_hi"],
                                       params["grid_points"], names=names)


_GRID_KEYS = {
    "grid_lo": ("float", -4.0),
    "grid_hi": ("float", 4.0),
    "grid_points": ("int", 81),
}


def _run_q_grid(params):
    policy = _policy(params)
    grid = _grid_from(params, ("re_alpha", "im_alpha"))
    if params["state"] == "chi":
        spec = cats.CatSpec(params["n"], params["beta"])
        state = cats.chi_state(spec, policy)
        closed = phasespace.husimi_chi_closed(spec, grid)
    elif params["state"] == "multi-cat":
        spec = cats.CatSpec(params["n"], params["beta"], params["k"])
        state = cats.multi_cat_state(spec, policy)
        closed = phasespace.husimi_multi_cat_closed(spec, grid)
    else:
        raise ConfigError(f"state must be chi or multi-cat, got {params['state']!r}")
    q = phasespace.husimi(state, grid, policy)
    peak = np.unravel_index(np.argmax(q.values), q.values.shape)
    scalars = {
        "closed_form_max_abs_dev": float(np.max(np.abs(q.values - closed.values))),
        "q_max": float(q.values[peak]),
        "q_max_re": float(grid.axis1.values[peak[0]]),
        "q_max_im": float(grid.axis2.values[peak[1]]),
    }
    return scalars, [("husimi", q)]


_Q_GRID_SCHEMA = {
    **_COMMON, **_GRID_KEYS,
    "state": ("str", "chi"),
    "n": ("int", _REQUIRED),
    "k": ("int", 1),
    "beta": ("complex", _REQUIRED),
}


def _run_wigner_grid(params):
    policy = _policy(params)
    grid = _grid_from(params, ("x", "p"))
    spec = cats.CatSpec(params["n"], params["beta"])
    scalars = {}
    grids = []
    if params["method"] in ("closed", "both"):
        closed = phasespace.wigner_cat_closed(spec, grid)
        grids = [("wigner", closed)]
    if params["method"] in ("numeric", "both"):
        state = cats.chi_state(spec, policy)
        numeric = phasespace.wigner_numeric(state, grid)
        if params["method"] == "both":
            scalars["closed_vs_numeric_max_abs_dev"] = float(
                np.max(np.abs(grids[0][1].values - numeric.values)))
        else:
            grids = [("wigner", numeric)]
    if params["method"] not in ("closed", "numeric", "both"):
        raise ConfigError(f"method must be closed, numeric or both, "
                          f"got {params['method']!r}")
    w = grids[0][1]
    step1, step2 = grid.axis1.step, grid.axis2.step
    scalars["integral"] = float(simpson(simpson(w.values, dx=step2), dx=step1))
    scalars["min_value"] = float(w.values.min())
    return scalars, grids


_WIGNER_GRID_SCHEMA = {
    **_COMMON, **_GRID_KEYS,
    "n": ("int", _REQUIRED),
    "beta": ("complex", _REQUIRED),
    "method": ("str", "both"),
}


def _run_quadrature_grid(params):
    policy = _policy(params)
    spec = cats.CatSpec(params["n"], params["beta"])
    state = cats.chi_state(spec, policy)
    x_axis = phasespace.Axis("x", params["grid_lo"], params["grid_hi"],
                             params["grid_points"])
    phi_axis = phasespace.Axis("phi", params["phi_lo"], params["phi_hi"],
                               params["phi_points"])
    values = np.empty((x_axis.points, phi_axis.points))
    dev = 0.0
    for j, phi in enumerate(phi_axis.values):
        overlap = phasespace.quadrature_dist(state, x_axis, float(phi))
        closed = phasespace.quadrature_chi_closed(spec, x_axis, float(phi))
        values[:, j] = overlap.values[:, 0]
        dev = max(dev, float(np.max(np.abs(overlap.values - closed.values))))
    grid = phasespace.PhaseGrid(x_axis, phi_axis)
    gf = phasespace.GridFunction(values, grid, "quadrature")
    scalars = {"closed_form_max_abs_dev": dev}
    return scalars, [("quadrature", gf)]


_QUADRATURE_GRID_SCHEMA = {
    **_COMMON, **_GRID_KEYS,
    "n": ("int", _REQUIRED),
    "beta": ("complex", _REQUIRED),
    "phi_lo": ("float", 0.0),
    "phi_hi": ("float", math.pi),
    "phi_points": ("int", 33),
}


def _run_prob_scan(params):
    if params["n_max"] < params["n_min"]:
        raise ConfigError("n_max must be >= n_min")
    scalars = {}
    for n in range(params["n_min"], params["n_max"] + 1):
        if params["beta_rule"] == "half-n":
            beta = math.sqrt(n / 2.0)
        elif params["beta_rule"] == "fixed":
            beta = params["beta"]
        else:
            raise ConfigError(f"beta_rule must be half-n or fixed, "
                              f"got {params['beta_rule']!r}")
        _, p = cats.cat_norm_and_prob(cats.CatSpec(n, beta))
        scalars[f"p_{n}"] = p
    return scalars, []


_PROB_SCAN_SCHEMA = {
    "n_min": ("int", 0),
    "n_max": ("int", 12),
    "beta_rule": ("str", "half-n"),
    "beta": ("complex", 0j),
}


def _run_povm_demo(params):
    policy = _policy(params)
    bs = _bs(params)
    povm = twomode.photon_counting_povm(params["eta"], policy)
    completeness = float(np.max(np.abs(povm.weights.sum(axis=0) - 1.0)))
    signal = fock.fock_state(params["signal_n"], policy)
    two = twomode.product_state(signal, fock.fock_state(0, policy))
    rho_direct, p_direct = twomode.conditional_reduce(
        two, povm.element(params["outcome"]), bs, policy)
    # same outcome through the ensemble decomposition over Fock projectors;
    # with a vacuum reference the detector never sees more than signal_n
    # photons, so the decomposition can stop there exactly
    weights = povm.weights[params["outcome"]]
    meas_ensemble = [(float(w), ReferencePrep.fock(k))
                     for k, w in enumerate(weights[: params["signal_n"] + 1])
                     if w > 0]
    rho_in1 = twomode.DensityOperator.from_pure(signal)
    rho_mixed, p_mixed = twomode.conditional_reduce_mixed(
        rho_in1, [(1.0, ReferencePrep.vacuum())], meas_ensemble, bs, policy)
    scalars = {
        "completeness_max_dev": completeness,
        "p_outcome": p_direct,
        "p_outcome_ensemble_route": p_mixed,
        "route_probability_dev": abs(p_direct - p_mixed),
        "route_state_max_dev": float(np.max(np.abs(rho_direct.mat - rho_mixed.mat))),
    }
    return scalars, []


_POVM_DEMO_SCHEMA = {
    **_COMMON, **_BS_KEYS,
    "eta": ("float", _REQUIRED),
    "signal_n": ("int", 2),
    "outcome": ("int", 1),
}


_EXPERIMENTS = {
    "y-matrix": (_Y_MATRIX_SCHEMA, _run_y_matrix),
    "scheme-a": (_SCHEME_A_SCHEMA, _run_scheme_a),
    "scheme-b": (_SCHEME_B_SCHEMA, _run_scheme_b),
    "multi-cat": (_MULTI_CAT_SCHEMA, _run_multi_cat),
    "q-grid": (_Q_GRID_SCHEMA, _run_q_grid),
    "wigner-grid": (_WIGNER_GRID_SCHEMA, _run_wigner_grid),
    "quadrature-grid": (_QUADRATURE_GRID_SCHEMA, _run_quadrature_grid),
    "prob-scan": (_PROB_SCAN_SCHEMA, _run_prob_scan),
    "povm-demo": (_POVM_DEMO_SCHEMA, _run_povm_demo),
}


# --- envelopes and serialization ------------------------------------------

def run_experiment(experiment, config_text):
    """Parse, validate and run; returns (scalars, grids, duration_s)."""
    if experiment not in _EXPERIMENTS:
        raise ConfigError(f"unknown experiment {experiment!r}; "
                          f"choose from {', '.join(sorted(_EXPERIMENTS))}")
    schema, runner = _EXPERIMENTS[experiment]
    params = _extract(parse_config(config_text), experiment, schema)
    start = time.perf_counter()
    scalars, grids = runner(params)
    return scalars, grids, time.perf_counter() - start


def _scalar_text(value):
    if isinstance(value, complex):
        return _fmt_complex(value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def render_envelope_text(experiment, config_text, scalars, duration_s):
    lines = [
        f"# condibeam {__version__}",
        f"# experiment {experiment}",
        f"# duration_s {duration_s:.3f}",
        "# config-begin",
        config_text.rstrip("\n"),
        "# config-end",
    ]
    for key, value in scalars.items():
        lines.append(f"{key} = {_scalar_text(value)}")
    return "\n".join(lines) + "\n"


def render_grid_csv(gf):
    a1, a2 = gf.grid.axis1, gf.grid.axis2
    header = [
        f"# axis1 {a1.name} {a1.lo!r} {a1.hi!r} {a1.points}",
        f"# axis2 {a2.name} {a2.lo!r} {a2.hi!r} {a2.points}",
        f"# kind {gf.kind}",
    ]
    rows = [",".join(repr(float(v)) for v in row) for row in gf.values]
    return "\n".join(header + rows) + "\n"


def render_envelope_json(experiment, config_text, scalars, grids, duration_s):
    doc = {
        "tool": "condibeam",
        "version": __version__,
        "experiment": experiment,
        "duration_s": round(duration_s, 3),
        "config": config_text,
        "results": {k: _scalar_text(v) if isinstance(v, complex) else v
                    for k, v in scalars.items()},
        "grids": {
            name: {
                "axis1": [gf.grid.axis1.name, gf.grid.axis1.lo,
                          gf.grid.axis1.hi, gf.grid.axis1.points],
                "axis2": [gf.grid.axis2.name, gf.grid.axis2.lo,
                          gf.grid.axis2.hi, gf.grid.axis2.points],
                "kind": gf.kind,
                "values": gf.values.tolist(),
            }
            for name, gf in grids
        },
    }
    return json.dumps(doc, indent=2) + "\n"


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="condibeam",
        description="conditional beam-splitter state engineering experiments")
    parser.add_argument("experiment",
                        choices=sorted(_EXPERIMENTS) + ["selftest"])
    parser.add_argument("--config", help="path to the key = value config file")
    parser.add_argument("--out", help="output path (grid CSV, or the whole "
                                      "envelope for --format json-like)")
    parser.add_argument("--format", choices=["csv", "json-like"], default="csv")
    args = parser.parse_args(argv)

    if args.experiment == "selftest":
        return 0 if run_selftest() else 4

    try:
        if not args.config:
            raise ConfigError("--config is required")
        try:
            with open(args.config, encoding="utf-8") as fh:
                config_text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
        scalars, grids, duration = run_experiment(args.experiment, config_text)
        if args.format == "json-like":
            doc = render_envelope_json(args.experiment, config_text, scalars,
                                       grids, duration)
            if args.out:
                with open(args.out, "w", encoding="utf-8") as fh:
                    fh.write(doc)
            else:
                sys.stdout.write(doc)
        else:
            if grids and not args.out:
                raise ConfigError(
                    "--out is required for grid experiments with --format csv")
            for _, gf in grids:
                with open(args.out, "w", encoding="utf-8") as fh:
                    fh.write(render_grid_csv(gf))
            sys.stdout.write(render_envelope_text(args.experiment, config_text,
                                                  scalars, duration))
        return 0
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
