"""Command-line interface.

Boundary units are bar, cm, degrees, N and N*m/rad. Exit status is 0 on
success, 1 on I/O or parse errors and 2 on domain or feasibility errors.
Data goes to stdout (or ``--out``); diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import math
import sys
import warnings
from dataclasses import dataclass, field
from typing import Any, Sequence, TextIO

from . import actuator as act
from .config import (
    KEYS,
    MODEL_KINDS,
    NUMERIC_KEYS,
    ConfigError,
    build_actuator,
    build_geometry,
    build_muscle,
    check_key,
    load_config,
    resolve,
)
from .core import BAR, DomainError, FittingError, PamError, convert
from .cubic import solve_cubic
from .datasets import DatasetError, load_curve_csv, sweep_csv_text, write_sweep_csv
from .fitting import (
    ContractionAnchor,
    WanderingWarning,
    fit_polynomial_coeffs,
    fit_rational_params,
    residual_report,
    slope_reversals,
    vandermonde_condition,
)
from .muscles import RationalFestoParams

EXIT_OK, EXIT_IO, EXIT_DOMAIN = 0, 1, 2

COMMANDS = (
    "fit-rational",
    "fit-polynomial",
    "force",
    "stiffness",
    "actuator-direct",
    "actuator-inverse",
    "sweep",
    "roots",
    "residuals",
)


class UsageError(PamError):
    pass


@dataclass
class CommandPlan:
    command: str
    params: dict[str, Any]
    settings: dict[str, Any] = field(default_factory=dict)
    config_path: str | None = None
    out_path: str | None = None


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _anchor(text: str) -> ContractionAnchor:
    try:
        p, eps = text.split(":")
        return ContractionAnchor(float(p) * BAR, float(eps))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"anchor must look like P_bar:eps_max, got {text!r} ({exc})") from None


def _add_model_options(p: argparse.ArgumentParser, kinds: Sequence[str], required: bool = True) -> None:
    p.add_argument("--model", choices=kinds, required=required)
    p.add_argument("--config", metavar="PATH", help="flat key = value model configuration file")
    group = p.add_argument_group("configuration overrides")
    for key in NUMERIC_KEYS:
        group.add_argument("--" + key.replace("_", "-"), dest=key, type=float, default=None)


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pamstat", description="Static models of pneumatic muscles and antagonist actuators.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("roots", help="real roots of x^3 + a2 x^2 + a1 x + a0")
    for name in ("--a2", "--a1", "--a0"):
        p.add_argument(name, type=float, required=True)

    p = sub.add_parser("fit-rational", help="fit (d, e) of the rational model from two anchors")
    _add_model_options(p, ("festo",), required=False)
    p.add_argument("--anchor", type=_anchor, action="append", required=True, help="P_bar:eps_max (twice)")
    p.add_argument("--c", "--c-fit-bar", dest="c_fit", type=float, default=None,
                   help="fixed c in bar (default: c_bar from the configuration, else 0)")

    p = sub.add_parser("fit-polynomial", help="fit f(eps) coefficients from eps_max anchors")
    _add_model_options(p, ("polynomial",), required=False)
    p.add_argument("--anchor", type=_anchor, action="append", required=True, help="P_bar:eps_max (repeatable)")

    for name in ("force", "stiffness"):
        p = sub.add_parser(name, help=f"muscle {name} at one operating point")
        _add_model_options(p, MODEL_KINDS)
        p.add_argument("--eps", type=float, required=True, help="contraction ratio")
        p.add_argument("--p-bar", type=float, default=None, help="pressure (default: top of the pressure box)")
        p.add_argument("--u", type=float, default=None, help="activation for --model hogan")

    p = sub.add_parser("actuator-direct", help="torque and stiffness from the control pair")
    _add_model_options(p, ("hogan", "mckibben", "festo"))
    p.add_argument("--theta-deg", type=float, required=True)
    p.add_argument("--p1-bar", type=float)
    p.add_argument("--p2-bar", type=float)
    p.add_argument("--u1", type=float)
    p.add_argument("--u2", type=float)

    p = sub.add_parser("actuator-inverse", help="control pair for a joint angle and stiffness")
    _add_model_options(p, ("hogan", "mckibben", "festo"))
    p.add_argument("--theta-deg", type=float, required=True)
    p.add_argument("--k", type=float, required=True, help="stiffness, N*m/rad")
    p.add_argument("--torque", type=float, default=0.0, help="torque, N*m (festo supports 0 only)")

    p = sub.add_parser("sweep", help="inverse model over a stiffness x angle grid, as CSV")
    _add_model_options(p, ("mckibben", "festo"))
    p.add_argument("--k-min", type=float, required=True)
    p.add_argument("--k-max", type=float, required=True)
    p.add_argument("--k-step", type=float, required=True)
    p.add_argument("--theta-max-deg", type=float, required=True)
    p.add_argument("--theta-min-deg", type=float, default=None, help="default: -theta-max")
    p.add_argument("--theta-step-deg", type=float, required=True)
    p.add_argument("--out", metavar="PATH", help="CSV destination (default stdout)")

    p = sub.add_parser("residuals", help="model vs measured force curve")
    _add_model_options(p, MODEL_KINDS)
    p.add_argument("--data", metavar="PATH", required=True, help="pressure_bar,contraction_ratio,force_N CSV")
    return parser


def _check_unit_flags(argv: Sequence[str]) -> None:
    for tok in argv:
        if not tok.startswith("--") or len(tok) < 3:
            continue
        key = tok[2:].split("=", 1)[0].replace("-", "_")
        if key in KEYS or "_" not in key:
            continue
        try:
            check_key(key)
        except ConfigError as exc:
            if "unit-suffix" in str(exc):
                raise UsageError(str(exc).replace("'", "").replace("_", "-")) from None


def parse_command(argv: Sequence[str]) -> CommandPlan:
    """Parse argv into a validated plan, loading ``--config`` and applying flag overrides."""
    argv = list(argv)
    _check_unit_flags(argv)
    ns = _build_parser().parse_args(argv)
    params = vars(ns)
    command = params.pop("command")
    config_path = params.pop("config", None)
    out_path = params.pop("out", None)
    settings: dict[str, Any] = {}
    if config_path is not None:
        try:
            settings.update(load_config(config_path))
        except OSError as exc:
            raise UsageError(f"cannot read config {config_path}: {exc.strerror or exc}") from None
        except ConfigError as exc:
            raise UsageError(str(exc)) from None
    for key in NUMERIC_KEYS:
        value = params.pop(key, None)
        if value is not None:
            settings[key] = value
    if command in ("fit-rational", "fit-polynomial") and params.get("model") is None:
        params["model"] = "festo" if command == "fit-rational" else "polynomial"
    if command == "fit-rational" and len(params["anchor"]) != 2:
        raise UsageError("fit-rational needs exactly two --anchor values")
    if command == "sweep" and params["theta_min_deg"] is None:
        params["theta_min_deg"] = -params["theta_max_deg"]
    if command == "actuator-direct":
        names = ("u1", "u2") if params["model"] == "hogan" else ("p1_bar", "p2_bar")
        missing = [n for n in names if params.get(n) is None]
        if missing:
            raise UsageError(f"actuator-direct --model {params['model']} needs " + ", ".join("--" + n.replace("_", "-") for n in missing))
    return CommandPlan(command, params, settings, config_path, out_path)


# --------------------------------------------------------------------------
# execution


def _values(plan: CommandPlan, err: TextIO) -> dict[str, Any]:
    kind = plan.params["model"]
    file_kind = plan.settings.get("model")
    values = {k: v for k, v in plan.settings.items() if k != "model"}
    if file_kind is not None and file_kind != kind:
        print(f"note: config describes model {file_kind!r}, evaluating as {kind!r}", file=err)
    return resolve(kind, values)


def _fmt(v: float) -> str:
    return f"{v:.9g}"


def _run_roots(plan, out, err):
    p = plan.params
    res = solve_cubic((p["a2"], p["a1"], p["a0"]))
    print(f"branch = {res.branch.value}", file=out)
    print(f"discriminant = {_fmt(res.discriminant)}", file=out)
    for i, x in enumerate(res.roots, start=1):
        print(f"x{i} = {_fmt(x)}", file=out)
    return EXIT_OK


def _run_fit_rational(plan, out, err):
    values = _values(plan, err)
    geom = build_geometry(values)
    a_i, a_ii = sorted(plan.params["anchor"], key=lambda an: an.pressure)
    c_bar = plan.params["c_fit"]
    if c_bar is None:
        c_bar = plan.settings.get("c_bar", 0.0)
    prm = fit_rational_params(a_i, a_ii, c_bar * BAR, geom)
    print(f"c = {prm.c / BAR:.6g} bar", file=out)
    print(f"d = {prm.d / BAR:.6g} bar", file=out)
    print(f"e = {prm.e / BAR**2:.6g} bar^2", file=out)
    for an in (a_i, a_ii):
        print(f"eps_max({an.pressure / BAR:g} bar) = {prm.eps_max_at(an.pressure):.6g}", file=out)
    return EXIT_OK


def _run_fit_polynomial(plan, out, err):
    values = _values(plan, err)
    geom = build_geometry(values)
    anchors = plan.params["anchor"]
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", WanderingWarning)
        prm = fit_polynomial_coeffs(anchors, geom)
    for i, c in enumerate(prm.coeffs):
        print(f"a{i} = {_fmt(c / BAR)} bar", file=out)
    upper = max(an.eps_max for an in anchors)
    print(f"condition = {vandermonde_condition(anchors):.6g}", file=out)
    print(f"slope_reversals = {slope_reversals(prm, upper)}", file=out)
    for w in caught:
        print(f"warning: {w.message}", file=err)
    return EXIT_OK


def _muscle_point(plan, err):
    kind = plan.params["model"]
    values = _values(plan, err)
    muscle = build_muscle(kind, values)
    if kind == "hogan":
        control = plan.params["u"] if plan.params["u"] is not None else 1.0
    else:
        p_bar = plan.params["p_bar"] if plan.params["p_bar"] is not None else values.get("p_max_bar", 5.0)
        control = p_bar * BAR
    return muscle, plan.params["eps"], control


def _run_force(plan, out, err):
    muscle, eps, control = _muscle_point(plan, err)
    print(f"F = {_fmt(muscle.force(eps, control))} N", file=out)
    return EXIT_OK


def _run_stiffness(plan, out, err):
    muscle, eps, control = _muscle_point(plan, err)
    print(f"K_M = {_fmt(muscle.stiffness(eps, control))} N/m", file=out)
    return EXIT_OK


def _run_actuator_direct(plan, out, err):
    kind = plan.params["model"]
    cfg = build_actuator(kind, _values(plan, err))
    theta = convert(plan.params["theta_deg"], "deg", "rad")
    if kind == "hogan":
        u1, u2 = plan.params["u1"], plan.params["u2"]
        ts = act.hogan_direct(u1, u2, theta, cfg)
        theta_equ = act.hogan_equilibrium(u1, u2, cfg) if u1 + u2 > 0 else math.nan
    else:
        p1, p2 = plan.params["p1_bar"] * BAR, plan.params["p2_bar"] * BAR
        if kind == "mckibben":
            ts = act.mckibben_direct(p1, p2, theta, cfg)
            theta_equ = math.nan
        else:
            ts = act.festo_direct(p1, p2, theta, cfg)
            theta_equ = act.festo_equilibrium(p1, p2, cfg)
    print(f"T = {_fmt(ts.torque)} N*m", file=out)
    print(f"K = {_fmt(ts.stiffness)} N*m/rad", file=out)
    if not math.isnan(theta_equ):
        print(f"theta_equ = {_fmt(math.degrees(theta_equ))} deg", file=out)
    return EXIT_OK


def _run_actuator_inverse(plan, out, err):
    kind = plan.params["model"]
    cfg = build_actuator(kind, _values(plan, err))
    theta = convert(plan.params["theta_deg"], "deg", "rad")
    K, torque = plan.params["k"], plan.params["torque"]
    if kind == "hogan":
        sol = act.hogan_inverse(theta, K, cfg, torque)
        print(f"u1 = {_fmt(sol.u1)}", file=out)
        print(f"u2 = {_fmt(sol.u2)}", file=out)
    else:
        if kind == "mckibben":
            sol = act.mckibben_inverse(theta, K, cfg, torque)
        else:
            if torque != 0.0:
                raise DomainError("the rational-model inverse supports torque = 0 only")
            sol = act.festo_inverse(theta, K, cfg)
        print(f"P1 = {_fmt(sol.p1 / BAR)} bar", file=out)
        print(f"P2 = {_fmt(sol.p2 / BAR)} bar", file=out)
        print(f"P1 - P2 = {_fmt((sol.p1 - sol.p2) / BAR)} bar", file=out)
        print(f"P1 + P2 = {_fmt((sol.p1 + sol.p2) / BAR)} bar", file=out)
    print(f"status = {sol.tag.value}", file=out)
    if not sol.feasible:
        print(f"infeasible: {sol.message}", file=err)
        if kind != "hogan" and isinstance(cfg.muscle, RationalFestoParams):
            lo, hi = act.stiffness_interval(cfg)
            print(f"stiffness at theta = 0 spans [{lo:.4g}, {hi:.4g}] N*m/rad over the pressure box", file=err)
        return EXIT_DOMAIN
    return EXIT_OK


def _run_sweep(plan, out, err):
    p = plan.params
    kind = p["model"]
    cfg = build_actuator(kind, _values(plan, err))
    ks = act.grid(p["k_min"], p["k_max"], p["k_step"])
    thetas = [math.radians(t) for t in act.grid(p["theta_min_deg"], p["theta_max_deg"], p["theta_step_deg"])]
    rows = act.sweep_inverse(kind, ks, thetas, cfg)
    if plan.out_path:
        write_sweep_csv(rows, plan.out_path)
    else:
        out.write(sweep_csv_text(rows))
    n_ok = sum(r.feasible for r in rows)
    print(f"{len(rows)} grid points, {n_ok} feasible", file=err)
    return EXIT_OK


def _run_residuals(plan, out, err):
    kind = plan.params["model"]
    muscle = build_muscle(kind, _values(plan, err))
    data = load_curve_csv(plan.params["data"])
    rep = residual_report(muscle, data)
    print(f"samples = {len(data)}", file=out)
    print(f"evaluated = {rep.n_evaluated}", file=out)
    print(f"rmse = {_fmt(rep.rmse)} N", file=out)
    print(f"max_abs_error = {_fmt(rep.max_abs_error)} N", file=out)
    if rep.out_of_domain_rows:
        rows = ", ".join(str(r) for r in rep.out_of_domain_rows)
        print(f"out_of_domain_rows = {rows}", file=out)
        print(f"{rep.n_out_of_domain} sample(s) outside the model domain", file=err)
    return EXIT_OK


_RUNNERS = {
    "roots": _run_roots,
    "fit-rational": _run_fit_rational,
    "fit-polynomial": _run_fit_polynomial,
    "force": _run_force,
    "stiffness": _run_stiffness,
    "actuator-direct": _run_actuator_direct,
    "actuator-inverse": _run_actuator_inverse,
    "sweep": _run_sweep,
    "residuals": _run_residuals,
}


def run(plan: CommandPlan, out: TextIO | None = None, err: TextIO | None = None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        return _RUNNERS[plan.command](plan, out, err)
    except (DatasetError, ConfigError) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_IO
    except (DomainError, FittingError) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_IO


def main(argv: Sequence[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        plan = parse_command(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_IO
    return run(plan)


if __name__ == "__main__":
    raise SystemExit(main())
