"""``gravab`` command-line interface.

    gravab <phase|entropy|scenario|oracle|sweep> --config run.json
           [--output json|csv] [--cutoff codata|paper-cutoff] [--preset overstreet] [--out FILE]

stdout carries the result document (or a JSON error object), stderr the log.
Exit codes: 0 success, 2 configuration error, 3 numerical error.
"""
from __future__ import annotations

import argparse
import concurrent.futures
import csv
import io
import itertools
import json
import logging
import math
import sys
from dataclasses import asdict

from . import __version__
from .constants import CODATA2018, CUTOFF_PRESETS
from .continuum import phase_entropy_report, quoted_reproduction, QUOTED
from .errors import ConfigError, GravabError, NumericalError
from .fock_oracle import compare_with_analytic, required_truncation, analytic_amplitudes
from .geometry import ScenarioKind, causal_gating
from .config import RunConfig, apply_override, config_to_dict, load_document, parse_config, PRESETS

log = logging.getLogger("gravab")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 2, 3
PHASE_FIELDS = ("ab_phase_quantum", "ab_phase_closed", "semiclassical_phase", "action_phase")
ENTROPY_FIELDS = ("I_integral", "I_half", "I_planck_units", "linear_entropy", "linear_entropy_small", "visibility")


def _metadata(cfg: RunConfig):
    return {
        "version": __version__,
        "constants": asdict(CODATA2018),
        "cutoff_preset": cfg.cutoff_preset,
        "preset": cfg.preset,
        "units": "SI; phases in rad",
    }


def _report(cfg, gates=(1.0, 1.0)):
    return phase_entropy_report(cfg.geometry, cfg.effective_spec(), CODATA2018, gates)


def run_phase(cfg: RunConfig) -> dict:
    rep = _report(cfg)
    result = {k: getattr(rep, k) for k in PHASE_FIELDS}
    result["diagnostics"] = rep.diagnostics
    return {"command": "phase", "result": result, "metadata": _metadata(cfg)}


def run_entropy(cfg: RunConfig) -> dict:
    rep = _report(cfg)
    result = {k: getattr(rep, k) for k in ENTROPY_FIELDS}
    result["separation_m"] = cfg.geometry.separation
    result["diagnostics"] = rep.diagnostics
    if cfg.geometry.separation > 0:
        result["quoted_comparison"] = quoted_reproduction(
            cfg.geometry.separation, cfg.geometry.interaction_time, CODATA2018, cfg.mode_spec.time_factor
        )
    meta = _metadata(cfg)
    meta["quoted_linear_entropy"] = QUOTED["linear_entropy"]
    meta["quoted_I_planck_units"] = QUOTED["I_planck_units"]
    return {"command": "entropy", "result": result, "metadata": meta}


def run_scenario(cfg: RunConfig) -> dict:
    if cfg.scenario is None:
        raise ConfigError("scenario subcommand needs a 'scenario' section in the config")
    gating = causal_gating(cfg.geometry, cfg.scenario, CODATA2018)
    baseline = _report(cfg)
    gated = baseline if cfg.scenario.kind is ScenarioKind.FULL else _report(cfg, gating.gates)
    fields = PHASE_FIELDS + ENTROPY_FIELDS
    result = {
        "scenario": {"kind": cfg.scenario.kind.value, "loop_closure_time_s": cfg.scenario.loop_closure_time},
        "gating": asdict(gating),
        "gated": {k: getattr(gated, k) for k in fields},
        "baseline": {k: getattr(baseline, k) for k in fields},
        "delta": {k: getattr(gated, k) - getattr(baseline, k) for k in fields},
        "diagnostics": gated.diagnostics,
    }
    return {"command": "scenario", "result": result, "metadata": _metadata(cfg)}


def run_oracle(cfg: RunConfig, N: int | None = None) -> dict:
    oc = cfg.oracle
    N = N if N is not None else oc.truncation
    if N is None:
        alphas, _ = analytic_amplitudes(oc.params, oc.t)
        N = required_truncation(max(abs(a) for a in alphas.values()))
    from .fock_oracle import MAX_LEVELS

    if not 1 <= N <= MAX_LEVELS:
        raise ConfigError(f"truncation must lie in [1, {MAX_LEVELS}], got {N}")
    report = compare_with_analytic(oc.params, oc.t, N)
    return {"command": "oracle", "result": report.to_dict(), "metadata": _metadata(cfg)}


def _sweep_point(args):
    doc, keys, values = args
    for key, value in zip(keys, values):
        doc = apply_override(doc, key, value)
    cfg = parse_config(doc)
    rep = _report(cfg)
    row = dict(zip(keys, values))
    row.update({k: getattr(rep, k) for k in PHASE_FIELDS + ENTROPY_FIELDS})
    return row


def run_sweep(cfg: RunConfig, jobs: int = 1) -> dict:
    if not cfg.sweep:
        raise ConfigError("sweep subcommand needs a 'sweep' section in the config")
    base = config_to_dict(cfg)
    base.pop("sweep")
    keys = list(cfg.sweep)
    points = [(base, keys, combo) for combo in itertools.product(*(cfg.sweep[k] for k in keys))]
    if jobs > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_sweep_point, points))
    else:
        rows = [_sweep_point(p) for p in points]
    return {"command": "sweep", "result": {"keys": keys, "rows": rows}, "metadata": _metadata(cfg)}


# ----------------------------------------------------------------- serialization

def _clean(obj):
    """JSON-safe copy: non-finite floats -> None, complex -> {re, im}, tuples -> lists."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, complex):
        return {"im": _clean(obj.imag), "re": _clean(obj.real)}
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if hasattr(obj, "item"):  # numpy scalar
        return _clean(obj.item())
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    return str(obj)


def to_json(doc) -> str:
    return json.dumps(_clean(doc), sort_keys=True, indent=2) + "\n"


def flatten(obj, prefix=""):
    out = {}
    if isinstance(obj, dict):
        for k in sorted(obj):
            out.update(flatten(obj[k], f"{prefix}{k}."))
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            out.update(flatten(v, f"{prefix}{i}."))
    else:
        out[prefix[:-1]] = obj
    return out


def to_csv(doc) -> str:
    clean = _clean(doc)
    result = clean["result"]
    if clean["command"] == "sweep":
        rows = [flatten(r) for r in result["rows"]]
    else:
        rows = [flatten(result)]
    header = sorted(set().union(*rows))
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=header, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: "" if row.get(k) is None else repr(row[k]) if isinstance(row.get(k), float) else row.get(k)
                         for k in header})
    return buf.getvalue()


# ----------------------------------------------------------------- entry point

def build_parser():
    parser = argparse.ArgumentParser(prog="gravab", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"gravab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("phase", "AB phase: quantum (numeric + closed form), semiclassical, action"),
        ("entropy", "atom-field linear entropy, visibility and the quoted-value comparison"),
        ("scenario", "one-arm / no-arm light-cone gating with gated observables"),
        ("oracle", "truncated Fock-space check of the single-mode closed form"),
        ("sweep", "phase and entropy over a parameter grid (at most two dimensions)"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="JSON run configuration")
        p.add_argument("--output", choices=("json", "csv"), help="result format (default from config, else json)")
        p.add_argument("--cutoff", choices=CUTOFF_PRESETS, help="mode cutoff preset")
        p.add_argument("--preset", choices=sorted(PRESETS), help="built-in geometry")
        p.add_argument("--out", help="write the result document to this file instead of stdout")
        p.add_argument("-v", "--verbose", action="store_true")
        if name == "oracle":
            p.add_argument("--truncation", type=int, help="Fock truncation N (levels 0..N)")
        if name == "sweep":
            p.add_argument("--jobs", type=int, default=1, help="worker processes for grid points")
    return parser


def _emit_error(exc, code):
    sys.stdout.write(json.dumps({"error": _clean(exc.to_dict()), "exit_code": code}, sort_keys=True) + "\n")
    log.error("%s: %s", type(exc).__name__, exc)
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        if args.config is None and args.preset is None:
            raise ConfigError("either --config or --preset is required")
        doc = load_document(args.config) if args.config else {}
        if args.cutoff:
            doc["cutoff_preset"] = args.cutoff
            doc.setdefault("mode_spec", {})["k_max_per_m"] = None
        cfg = parse_config(doc, preset=args.preset)
        output = args.output or cfg.output
        log.info("running %s (cutoff %s)", args.command, cfg.cutoff_preset)
        if args.command == "phase":
            result = run_phase(cfg)
        elif args.command == "entropy":
            result = run_entropy(cfg)
        elif args.command == "scenario":
            result = run_scenario(cfg)
        elif args.command == "oracle":
            result = run_oracle(cfg, args.truncation)
        else:
            result = run_sweep(cfg, max(1, args.jobs))
        text = to_csv(result) if output == "csv" else to_json(result)
    except ConfigError as exc:
        return _emit_error(exc, EXIT_CONFIG)
    except NumericalError as exc:
        return _emit_error(exc, EXIT_NUMERICAL)
    except GravabError as exc:  # pragma: no cover - every subclass is one of the above
        return _emit_error(exc, EXIT_NUMERICAL)

    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
        log.info("wrote %s", args.out)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
