"""Command-line front end emitting machine-readable reports.

Subcommands: bounds, topology, thermal-check, figure3, figure4, verify,
oracle. Reports are JSON (curves also CSV) with floats at 12 significant
digits and infinities as the string "inf", so identical inputs produce
byte-identical output. Exit codes: 0 success, 2 validation error (the
diagnostic names the violated invariant), 1 internal failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import traceback
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import __version__
from .bounds import (
    REACH_TOL,
    SURPASS_TOL,
    band_structure,
    bounds_report,
    ckb,
    ckb_permutation,
    critical_value,
    kinematic_bounds,
    surpass_ckb,
    surpass_ckb_bandwidth_form,
    reach_qkb,
)
from .errors import TooLarge, ValidationError
from .spectra import (
    ObservableSpectrum,
    Spectrum,
    classify,
    composite,
    make_spectrum,
)
from .thermal import (
    PI_0,
    PI_1,
    SIGMA_Z,
    LevelSet,
    ThermalModel,
    figure3_curve,
    figure4_curve,
    thermal_spectrum,
    thermal_surpass,
)
from .topology import (
    count_critical_values_bruteforce,
    enumerate_critical_values,
    topology_from_table,
)
from .verifier import AscentConfig, HermitianPair, certify_bounds

OBSERVABLE_PRESETS = {"sigma_z": SIGMA_Z, "Pi0": PI_0, "Pi1": PI_1}


# ---------------------------------------------------------------------------
# canonical serialization


def format_float(x: float) -> str:
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    if math.isnan(x):
        return '"nan"'
    return format(x, ".12g")


def to_json(obj: Any, indent: int = 0) -> str:
    """Deterministic JSON: fixed field order, 12-significant-digit floats."""
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{inner}{json.dumps(str(k))}: {to_json(v, indent + 1)}' for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [f"{inner}{to_json(v, indent + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, float):
        return format_float(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    return json.dumps(obj)


def _emit(text: str, out_path: str | None) -> None:
    if out_path:
        Path(out_path).write_text(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# instance files


def parse_observable(spec: Any) -> ObservableSpectrum:
    if isinstance(spec, str):
        name = spec
    elif isinstance(spec, dict) and "preset" in spec:
        name = spec["preset"]
    else:
        name = None
    if name is not None:
        try:
            return OBSERVABLE_PRESETS[name]
        except KeyError:
            raise ValidationError(
                f"unknown observable preset {name!r}; known: {sorted(OBSERVABLE_PRESETS)}"
            ) from None
    if not isinstance(spec, dict) or "distinct" not in spec or "multiplicities" not in spec:
        raise ValidationError("observable needs 'distinct' and 'multiplicities' or a preset name")
    return ObservableSpectrum(
        tuple(float(v) for v in spec["distinct"]),
        tuple(int(m) for m in spec["multiplicities"]),
    )


def parse_party(spec: Any, who: str) -> tuple[Spectrum, dict | None]:
    """One party of an instance: a literal spectrum or a thermal descriptor.

    Returns the spectrum plus the raw thermal descriptor when present, so
    commands needing level data (thermal-check) can reuse it.
    """
    if not isinstance(spec, dict) or ("spectrum" in spec) == ("thermal" in spec):
        raise ValidationError(f"{who} needs exactly one of 'spectrum' or 'thermal'")
    if "spectrum" in spec:
        return make_spectrum([float(v) for v in spec["spectrum"]]), None
    th = spec["thermal"]
    for key in ("energies", "lambda"):
        if not isinstance(th, dict) or key not in th:
            raise ValidationError(f"{who} thermal descriptor is missing {key!r}")
    energies = tuple(float(e) for e in th["energies"])
    mults = tuple(int(m) for m in th.get("multiplicities", [1] * len(energies)))
    lam = th["lambda"]
    lam = math.inf if lam == "inf" else float(lam)
    levels = LevelSet(energies, mults)
    return thermal_spectrum(ThermalModel(levels, lam)), {"levels": levels, "lambda": lam}


def load_instance(path: str) -> tuple[Spectrum, Spectrum, ObservableSpectrum, dict]:
    try:
        raw = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ValidationError(f"cannot read instance file: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ValidationError(f"instance file is not valid JSON: {exc}") from None
    for key in ("system", "controller", "observable"):
        if key not in raw:
            raise ValidationError(f"instance file is missing {key!r}")
    sys_spec, sys_thermal = parse_party(raw["system"], "system")
    ctrl_spec, ctrl_thermal = parse_party(raw["controller"], "controller")
    obs = parse_observable(raw["observable"])
    return sys_spec, ctrl_spec, obs, {"system_thermal": sys_thermal, "controller_thermal": ctrl_thermal}


def _meta(args: argparse.Namespace, argv: Sequence[str]) -> dict:
    return {
        "version": __version__,
        "seed": int(getattr(args, "seed", 0)),
        "command": " ".join(argv),
    }


def _require_json(args: argparse.Namespace) -> None:
    if args.format != "json":
        raise ValidationError("csv output is only available for the curve commands")


def parse_grid(text: str) -> list[float]:
    """a:b:n inclusive grid; n=1 degenerates to [a]."""
    try:
        a_s, b_s, n_s = text.split(":")
        a, b, n = float(a_s), float(b_s), int(n_s)
    except ValueError:
        raise ValidationError(f"grid {text!r} must look like a:b:n") from None
    if n < 1:
        raise ValidationError(f"grid point count {n} must be >= 1")
    if n == 1:
        return [a]
    return [a + (b - a) * i / (n - 1) for i in range(n)]


# ---------------------------------------------------------------------------
# subcommands


def _cmd_bounds(args, argv) -> int:
    _require_json(args)
    sys_spec, ctrl_spec, obs, _ = load_instance(args.instance)
    report = bounds_report(sys_spec, ctrl_spec, obs)
    bands = band_structure(sys_spec, ctrl_spec, obs)
    payload = {
        "ckb_max": report.ckb_max,
        "ckb_min": report.ckb_min,
        "kin_max": report.kin_max,
        "kin_min": report.kin_min,
        "qkb_max": report.qkb_max,
        "qkb_min": report.qkb_min,
        "surpass_upper": report.surpass_upper,
        "surpass_lower": report.surpass_lower,
        "reach_upper": report.reach_upper,
        "reach_lower": report.reach_lower,
        "witness_upper": report.witness_upper,
        "witness_lower": report.witness_lower,
        "band_structure": {
            "bandwidth": bands.bandwidth,
            "gaps": list(bands.gaps),
            "mu": list(bands.mu),
            "nu": list(bands.nu),
        },
        "meta": _meta(args, argv),
    }
    _emit(to_json(payload) + "\n", args.out)
    return 0


def _cmd_topology(args, argv) -> int:
    _require_json(args)
    sys_spec, ctrl_spec, obs, _ = load_instance(args.instance)
    report = topology_from_table(
        classify(sys_spec), classify(ctrl_spec), sys_spec.dim, ctrl_spec.dim, obs
    )
    payload = {
        "n_critical": report.n_critical,
        "d_max": report.d_max,
        "case_label": list(report.case_label),
        "source": "table",
        "note": report.note,
        "meta": _meta(args, argv),
    }
    _emit(to_json(payload) + "\n", args.out)
    return 0


def _cmd_thermal_check(args, argv) -> int:
    _require_json(args)
    sys_spec, ctrl_spec, obs, extra = load_instance(args.instance)
    spectral = surpass_ckb(sys_spec, ctrl_spec, obs)
    freq: bool | None = None
    sys_th, ctrl_th = extra["system_thermal"], extra["controller_thermal"]
    if sys_th is None or ctrl_th is None:
        raise ValidationError("thermal-check needs thermal descriptors for both parties")
    if sys_th["lambda"] > 0 and ctrl_th["lambda"] > 0 and not math.isinf(sys_th["lambda"]):
        freq = thermal_surpass(
            sys_th["levels"], 1.0 / sys_th["lambda"],
            ctrl_th["levels"], 1.0 / ctrl_th["lambda"], obs,
        )
    payload = {
        "surpass_upper_spectral_form": spectral.upper,
        "surpass_upper_frequency_form": freq,
        "forms_agree": None if freq is None else freq == spectral.upper,
        "meta": _meta(args, argv),
    }
    _emit(to_json(payload) + "\n", args.out)
    return 0


def _curve_text(points, fmt: str, meta: dict) -> str:
    if fmt == "csv":
        lines = ["lambda_c,j_max,j_min,ckb_max,gap_to_ckb"]
        for pt in points:
            lines.append(
                ",".join(
                    format(v, ".12g")
                    for v in (pt.lambda_c, pt.j_max, pt.j_min, pt.ckb_max, pt.gap_to_ckb)
                )
            )
        return "\n".join(lines) + "\n"
    payload = {
        "points": [
            {
                "lambda_c": pt.lambda_c,
                "j_max": pt.j_max,
                "j_min": pt.j_min,
                "ckb_max": pt.ckb_max,
                "gap_to_ckb": pt.gap_to_ckb,
            }
            for pt in points
        ],
        "meta": meta,
    }
    return to_json(payload) + "\n"


def _cmd_figure3(args, argv) -> int:
    grid = parse_grid(args.lambda_c_grid or "0:2:400")
    points = figure3_curve(args.lambda_s, args.M, grid)
    _emit(_curve_text(points, args.format, _meta(args, argv)), args.out)
    return 0


def _cmd_figure4(args, argv) -> int:
    grid = parse_grid(args.lambda_c_grid or "0:1:400")
    if args.obs not in ("Pi0", "Pi1"):
        raise ValidationError(f"figure4 observable must be Pi0 or Pi1, got {args.obs!r}")
    points = figure4_curve(args.lambda_s, args.M, args.obs, grid)
    _emit(_curve_text(points, args.format, _meta(args, argv)), args.out)
    return 0


def _cmd_verify(args, argv) -> int:
    _require_json(args)
    sys_spec, ctrl_spec, obs, _ = load_instance(args.instance)
    hp = HermitianPair.from_composite(composite(sys_spec, ctrl_spec, obs))
    cfg = AscentConfig(grad_tol=args.grad_tol, max_iter=args.max_iter)
    report = certify_bounds(
        hp, restarts=args.restarts, rng_seed=args.seed, cfg=cfg,
        keep_traces=args.trace_out is not None,
    )
    if args.trace_out is not None:
        for idx, trace in enumerate(report.traces):
            lines = ["iter,yield,grad_norm"]
            for i, y in enumerate(trace.yields):
                gn = trace.grad_norms[i] if i < len(trace.grad_norms) else trace.grad_norms[-1]
                lines.append(f"{i},{format(y, '.12g')},{format(gn, '.12g')}")
            Path(f"{args.trace_out}_run{idx:03d}.csv").write_text("\n".join(lines) + "\n")
    payload = {
        "attained_max": report.attained_max,
        "attained_min": report.attained_min,
        "certificate": report.certificate,
        "kin_max": report.kin_max,
        "kin_min": report.kin_min,
        "violation": report.violation,
        "restarts": report.restarts,
        "converged_runs": report.converged_runs,
        "total_runs": report.total_runs,
        "meta": _meta(args, argv),
    }
    _emit(to_json(payload) + "\n", args.out)
    return 0


def _cmd_oracle(args, argv) -> int:
    _require_json(args)
    sys_spec, ctrl_spec, obs, _ = load_instance(args.instance)
    n = sys_spec.dim * ctrl_spec.dim
    if n > 10:
        raise TooLarge(f"composite dimension {n} exceeds 10")
    comp = composite(sys_spec, ctrl_spec, obs)
    kin_max, kin_min = kinematic_bounds(comp)
    ckb_max, _ = ckb(sys_spec, obs)
    crits = enumerate_critical_values(sys_spec, ctrl_spec, obs)
    checks: list[dict] = []

    def check(name: str, ok: bool, detail: str) -> None:
        checks.append({"name": name, "pass": bool(ok), "detail": detail})

    check(
        "critical_set_extremes_match_closed_form",
        abs(crits[-1] - kin_max) <= 1e-6 and abs(crits[0] - kin_min) <= 1e-6,
        f"enumerated [{crits[0]:.9g}, {crits[-1]:.9g}] vs closed form [{kin_min:.9g}, {kin_max:.9g}]",
    )
    j_sigma0 = critical_value(comp, ckb_permutation(sys_spec, ctrl_spec))
    check(
        "classical_alignment_is_critical_value",
        abs(j_sigma0 - ckb_max) <= 1e-9,
        f"blockwise alignment yield {j_sigma0:.9g} vs classical bound {ckb_max:.9g}",
    )
    surpass = surpass_ckb(sys_spec, ctrl_spec, obs)
    brute_upper = kin_max > ckb_max + SURPASS_TOL
    check(
        "surpass_predicate_matches_bruteforce",
        surpass.upper == brute_upper,
        f"predicate {surpass.upper}, brute-force comparison {brute_upper}",
    )
    band_form = surpass_ckb_bandwidth_form(sys_spec, ctrl_spec, obs)
    check(
        "surpass_predicate_forms_agree",
        (surpass.upper, surpass.lower) == band_form,
        f"product form {(surpass.upper, surpass.lower)}, bandwidth form {band_form}",
    )
    reach_up, _ = reach_qkb(sys_spec, ctrl_spec, obs)
    brute_reach = abs(kin_max - obs.distinct[-1]) <= REACH_TOL
    check(
        "reach_predicate_matches_bruteforce",
        reach_up == brute_reach,
        f"predicate {reach_up}, |kin_max - top eigenvalue| = {abs(kin_max - obs.distinct[-1]):.3g}",
    )
    n_count = count_critical_values_bruteforce(sys_spec, ctrl_spec, obs)
    sys_class, ctrl_class = classify(sys_spec), classify(ctrl_spec)
    table_entry: dict = {"name": "table_count", "bruteforce_count": n_count, "source": "bruteforce"}
    try:
        table = topology_from_table(sys_class, ctrl_class, sys_spec.dim, ctrl_spec.dim, obs)
    except ValidationError as exc:
        table_entry["status"] = "no_table_row"
        table_entry["detail"] = str(exc)
    else:
        if table.n_critical is None:
            table_entry["status"] = "no_closed_form"
            table_entry["detail"] = "tabulated count unavailable; oracle value reported only"
        elif table.note is not None:
            table_entry["status"] = "reported"
            table_entry["table_count"] = table.n_critical
            table_entry["detail"] = table.note
        else:
            table_entry["status"] = "checked"
            table_entry["table_count"] = table.n_critical
            table_entry["pass"] = bool(n_count == table.n_critical)
            table_entry["detail"] = f"bruteforce {n_count} vs table {table.n_critical}"
    checks.append(table_entry)

    if args.with_verifier:
        hp = HermitianPair.from_composite(comp)
        report = certify_bounds(hp, restarts=args.restarts, rng_seed=args.seed)
        check(
            "verifier_certificate",
            report.certificate,
            f"attained [{report.attained_min:.9g}, {report.attained_max:.9g}]",
        )

    payload = {
        "composite_dim": n,
        "checks": checks,
        "all_pass": all(c.get("pass", True) for c in checks),
        "meta": _meta(args, argv),
    }
    _emit(to_json(payload) + "\n", args.out)
    return 0


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qkbounds",
        description="Kinematic bounds on quantum control yields with quantum controllers.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, instance: bool = True) -> None:
        if instance:
            p.add_argument("--instance", required=True, help="instance JSON file")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", default=None, help="write the report here instead of stdout")

    p = sub.add_parser("bounds", help="bounds and predicates for an instance")
    common(p)
    p.set_defaults(func=_cmd_bounds)

    p = sub.add_parser("topology", help="tabulated landscape characteristics")
    common(p)
    p.set_defaults(func=_cmd_topology)

    p = sub.add_parser("thermal-check", help="frequency-form surpass test for thermal instances")
    common(p)
    p.set_defaults(func=_cmd_thermal_check)

    p = sub.add_parser("figure3", help="two-level plant vs spin-bath controller curve")
    common(p, instance=False)
    p.add_argument("--lambda-s", type=float, default=1.0)
    p.add_argument("--M", type=int, default=10)
    p.add_argument("--lambda-c-grid", default=None, help="a:b:n inclusive grid")
    p.set_defaults(func=_cmd_figure3)

    p = sub.add_parser("figure4", help="two-spin plant projector curves")
    common(p, instance=False)
    p.add_argument("--lambda-s", type=float, default=1.0)
    p.add_argument("--M", type=int, default=10)
    p.add_argument("--obs", default="Pi0", help="Pi0 or Pi1")
    p.add_argument("--lambda-c-grid", default=None, help="a:b:n inclusive grid")
    p.set_defaults(func=_cmd_figure4)

    p = sub.add_parser("verify", help="certify the bounds by gradient ascent")
    common(p)
    p.add_argument("--restarts", type=int, default=32)
    p.add_argument("--grad-tol", type=float, default=1e-8)
    p.add_argument("--max-iter", type=int, default=5000)
    p.add_argument("--trace-out", default=None, help="per-run trace CSV path prefix")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("oracle", help="exact enumeration cross-checks (composite dim <= 10)")
    common(p)
    p.add_argument("--restarts", type=int, default=8)
    p.add_argument("--with-verifier", action="store_true")
    p.set_defaults(func=_cmd_oracle)

    return parser


def run(argv: Sequence[str]) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args, list(argv))
    except ValidationError as exc:
        sys.stderr.write(f"{type(exc).__name__}: {exc}\n")
        return 2
    except Exception:
        traceback.print_exc()
        return 1


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
