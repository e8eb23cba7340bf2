"""Command-line simulator.

Subcommands write CSV (header line, '.' decimals, '\\n' newlines) to stdout
or ``--out``.  Settings come from a JSON config (``--config`` or the
``SOFTGRIP_CONFIG`` environment variable); flags override the file.

Exit codes: 0 success, 1 usage or config error, 2 numeric failure,
3 abnormal grasp after retries, 4 episode aborted (vision endpoint down,
bad response, unclassifiable target).
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from .agent import (
    AgentConfig,
    EnhanceParams,
    GateThresholds,
    HttpVisionClient,
    Image,
    MockVisionClient,
    Mode,
    ScriptedExecutor,
    StochasticExecutor,
    enhance,
    episode_ledger,
    luminance_stats,
    run_episode,
    should_enhance,
)
from .agent.image import ImageFormatError
from .agent.vision import MissingFixture
from .agent.workflow import WorkflowError
from .config import ConfigFileError, load_config
from .ledger import LedgerError
from .mechanics import (
    RIGID,
    BeamSpec,
    LoadCase,
    TendonRouting,
    convergent_solve,
)
from .mechanics.chain import EquilibriumError, SegmentChain, calibrate_rigidity, simulate_bend
from .mechanics.oracle import ConvergenceError, DiscretizedBeam, convergence_study, discretized_solve
from .mechanics.sweep import SWEEP_COLUMNS, termination_sweep, to_csv
from .policy import (
    LEVELS,
    ConfigError,
    Lexicon,
    MaterialClass,
    OutcomeRecord,
    PretensionTable,
    UnclassifiedMaterial,
    adapt,
    classify_material,
    level_stiffness,
    level_to_pretension,
    outcome_ledger,
)
from .stability import (
    CalibrationError,
    OscillatorSpec,
    StrikeTarget,
    calibrate,
    impulse_response,
    peak_amplitude,
    settling_time,
    spec_to_dict,
)
from .svg import line_chart

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_ABNORMAL, EXIT_ABORTED = 0, 1, 2, 3, 4


class UsageError(ValueError):
    pass


# -- helpers -----------------------------------------------------------------


def _pick(flag, default):
    return default if flag is None else flag


def _stiffness(value):
    """Parse a stiffness: a non-negative number, or 'rigid'/'inf'."""
    if value is None or value is RIGID:
        return RIGID
    if isinstance(value, str):
        if value.strip().lower() in ("rigid", "inf", "infinity"):
            return RIGID
        try:
            value = float(value)
        except ValueError:
            raise UsageError(f"bad stiffness {value!r}") from None
    value = float(value)
    if math.isinf(value):
        return RIGID
    return value


def _num(x: float) -> str:
    if abs(x) < 1e-15:
        x = 0.0
    return f"{x:.12g}"


def _emit(text: str, out) -> None:
    if out and out != "-":
        Path(out).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)


def _csv(columns, rows) -> str:
    buf = io.StringIO()
    buf.write(",".join(columns) + "\n")
    for row in rows:
        buf.write(",".join(v if isinstance(v, str) else _num(v) for v in row) + "\n")
    return buf.getvalue()


def _fixtures_dir(cfg, flag=None) -> Path:
    path = _pick(flag, cfg["paths"]["fixtures"])
    if path:
        return Path(path)
    return Path(str(resources.files("softgrip.data") / "fixtures"))


def _lexicon(cfg, flag=None) -> Lexicon | None:
    path = _pick(flag, cfg["paths"]["lexicon"])
    return Lexicon.load(path) if path else None


def _pretension(cfg) -> PretensionTable:
    p = cfg["pretension"]
    return PretensionTable(tuple(p["ratios"]), float(p["actuator_gain"]))


# -- mechanics ---------------------------------------------------------------


def _beam_args(p):
    p.add_argument("--E", type=float, help="elastic modulus")
    p.add_argument("--I", type=float, help="second moment of area")
    p.add_argument("--L", type=float, help="finger length")
    p.add_argument("--F", type=float, help="tip force")
    p.add_argument("--a", type=float, help="offset slope of r(s) = a*s + b")
    p.add_argument("--b", type=float, help="root offset r(0)")
    p.add_argument("--p", type=float, help="load / termination point (default L)")
    p.add_argument("--k-t", dest="k_t", help="tendon stiffness, or 'rigid'")
    p.add_argument("--rigid", action="store_true", help="inextensible tendon")


def _beam_case(args, cfg):
    beam = BeamSpec(_pick(args.E, cfg["beam"]["E"]), _pick(args.I, cfg["beam"]["I"]),
                    _pick(args.L, cfg["beam"]["L"]))
    r = cfg["routing"]
    a, b = _pick(args.a, r["a"]), _pick(args.b, r["b"])
    p = _pick(args.p, r["p"])
    p = beam.length if p is None else p
    k_t = RIGID if args.rigid else _stiffness(_pick(args.k_t, r["k_t"]))
    load = LoadCase(_pick(args.F, cfg["load"]["F"]))
    return beam, a, b, p, k_t, load


DEFLECT_COLUMNS = ("variant", "k_t", "tip_deflection", "tip_angle", "tension", "stretch")


def cmd_deflect(args, cfg) -> int:
    beam, a, b, p, k_t, load = _beam_case(args, cfg)
    cases = [
        ("pure", TendonRouting.parallel(b, p, 0.0)),
        ("parallel", TendonRouting.parallel(b, p, k_t)),
        ("convergent", TendonRouting(a, b, p, k_t)),
        ("parallel_rigid", TendonRouting.parallel(b, p, RIGID)),
        ("convergent_rigid", TendonRouting(a, b, p, RIGID)),
    ]
    rows, chosen = [], None
    for name, routing in cases:
        sol = convergent_solve(beam, routing, load, n=args.stations)
        k = routing.tendon_stiffness
        rows.append((name, "rigid" if k is RIGID else _num(k), sol.tip_deflection, sol.tip_angle,
                     sol.tendon_tension, sol.tendon_stretch))
        if name == "convergent":
            chosen = sol
    _emit(_csv(DEFLECT_COLUMNS, rows), args.out)
    if args.profile:
        prof = zip(chosen.stations, chosen.slope_profile, chosen.deflection_profile)
        Path(args.profile).write_text(_csv(("s", "theta", "deflection"), prof), encoding="utf-8")
    return EXIT_OK


def cmd_oracle(args, cfg) -> int:
    beam, a, b, p, k_t, load = _beam_case(args, cfg)
    o = cfg["oracle"]
    d = DiscretizedBeam(beam, TendonRouting(a, b, p, k_t), load,
                        station_count=_pick(args.stations, o["stations"]),
                        tolerance=_pick(args.tolerance, o["tolerance"]))
    if args.study:
        rows = [(r.station_count, r.spacing, r.tip_deflection, r.error,
                 "" if r.ratio is None else _num(r.ratio), "" if r.order is None else _num(r.order))
                for r in convergence_study(d, _pick(args.levels, o["levels"]))]
        _emit(_csv(("stations", "spacing", "tip_deflection", "error", "ratio", "order"), rows), args.out)
        return EXIT_OK
    sol = discretized_solve(d)
    exact = convergent_solve(beam, d.routing, load, n=2)
    rows = [(name, getattr(sol, name), getattr(exact, name))
            for name in ("tip_deflection", "tip_angle", "tendon_tension", "tendon_stretch")]
    _emit(_csv(("quantity", "discretized", "closed_form"), rows), args.out)
    return EXIT_OK


def cmd_sweep(args, cfg) -> int:
    s = cfg["sweep"]
    points = _pick(args.points, s["points"])
    if points < 2:
        raise UsageError("sweep grid is empty; need --points >= 2")
    k_t = RIGID if args.k_t is None and s["k_t"] is None else _stiffness(_pick(args.k_t, s["k_t"]))
    rows = termination_sweep(points, _pick(args.slope, s["slope"]), k_t)
    _emit(to_csv(SWEEP_COLUMNS, rows), args.out)
    if args.svg:
        x = [r[0] for r in rows]
        series = [(name, x, [r[i] for r in rows]) for i, name in enumerate(SWEEP_COLUMNS[1:], 1)]
        Path(args.svg).write_text(line_chart(series, title="normalized tip deflection vs p/L"))
    return EXIT_OK


# -- stability ---------------------------------------------------------------


def _summary(series, threshold) -> dict:
    settle = settling_time(series, threshold)
    return {"peak_deg": peak_amplitude(series), "settling_s": settle, "settled": settle is not None}


def _settle_text(s: dict) -> str:
    return "not settled" if s["settling_s"] is None else f"{s['settling_s']:.4f} s"


def cmd_stability(args, cfg) -> int:
    osc = cfg["oscillator"]
    duration = _pick(args.duration, osc["duration"])
    dt = _pick(args.dt, osc["dt"])
    threshold = _pick(args.threshold, osc["threshold"])
    report: dict = {"threshold_deg": threshold, "duration_s": duration, "dt": dt}
    traces = []
    if args.calibrate:
        c = cfg["calibration"]
        targets = tuple(StrikeTarget(*map(float, t)) for t in c["targets"])
        if len(targets) != 2:
            raise UsageError("calibration needs exactly two targets (baseline, pretensioned)")
        kwargs = {"k_ratio_free": c["k_ratio_free"], "threshold": threshold, "bound": c["bound"]}
        if c["strike_gain"] is not None:
            kwargs["strike_gain"] = float(c["strike_gain"])
        base, pre, fit = calibrate(targets, **kwargs)
        report["calibration"] = fit
        for name, spec in (("baseline", base), ("pretensioned", pre)):
            traces.append((name, spec, impulse_response(spec, duration, dt)))
    else:
        spec = OscillatorSpec(
            _pick(args.inertia, osc["inertia"]), _pick(args.damping, osc["damping"]),
            _pick(args.eta, osc["stiffness_damping"]), _pick(args.stiffness, osc["stiffness"]),
            _pick(args.omega0, osc["omega0"]), threshold,
        )
        traces.append(("spec", spec, impulse_response(spec, duration, dt)))

    report["cases"] = {}
    for name, spec, series in traces:
        s = _summary(series, threshold)
        report["cases"][name] = {"spec": spec_to_dict(spec), **s}
        print(f"{name}: peak {s['peak_deg']:.4f} deg, settling {_settle_text(s)}")
    if args.calibrate:
        for key, val in report["calibration"]["residuals"].items():
            print(f"residual {key}: {val:+.4f}")
    if args.trace:
        with open(args.trace, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("case,t,theta,omega\n")
            for name, _, series in traces:
                for t, th, om in zip(series.time, series.theta, series.omega):
                    fh.write(f"{name},{_num(t)},{_num(th)},{_num(om)}\n")
    if args.report:
        Path(args.report).write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    return EXIT_OK


# -- bend --------------------------------------------------------------------


def _point(text: str) -> tuple[float, float]:
    try:
        x, y = (float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"reference point must be 'x,y', got {text!r}") from None
    return x, y


def cmd_bend(args, cfg) -> int:
    c = cfg["chain"]
    steps = _pick(args.steps, c["steps"])
    if steps < 1:
        raise UsageError("--steps must be >= 1")
    chain = SegmentChain(
        length=_pick(args.length, c["length"]),
        n_seg=_pick(args.n_seg, c["n_seg"]),
        flexural_rigidity=_pick(args.ei, c["flexural_rigidity"]),
        root_offset=_pick(args.root_offset, c["root_offset"]),
        offset_slope=_pick(args.offset_slope, c["offset_slope"]),
        tensions=tuple(np.linspace(0.0, _pick(args.t_max, c["t_max"]), steps)),
        preload=_pick(args.preload, c["preload"]),
        gravity=args.gravity or c["gravity"],
        segment_mass=_pick(args.segment_mass, c["segment_mass"]),
        base_angle=_pick(args.base_angle, c["base_angle"]),
    )
    if args.calibrate_drop is not None:
        chain = calibrate_rigidity(chain, args.calibrate_drop)
        print(f"calibrated flexural rigidity {chain.flexural_rigidity:.6g}", file=sys.stderr)
    traj = simulate_bend(chain)
    _emit(_csv(("tension", "tip_x", "tip_y", "bend_deg"), traj.rows()), args.out)
    if args.svg:
        Path(args.svg).write_text(line_chart([("tip path", list(traj.tip_x), list(traj.tip_y))],
                                             points=args.reference, title="fingertip trajectory"))
    return EXIT_OK


# -- policy ------------------------------------------------------------------


def cmd_policy(args, cfg) -> int:
    if args.action == "classify":
        level = classify_material(args.label, args.hint, _lexicon(cfg, args.lexicon))
        print(f"{args.label}: level {level} ({MaterialClass.for_level(level).value})")
        return EXIT_OK
    if args.action == "adapt":
        history = []
        if args.history:
            history = outcome_ledger(args.history).records()
        last = OutcomeRecord(args.label, args.level, "abnormal", args.failure, rigidity_cue=args.cue)
        new = adapt(history, last)
        print(f"{args.label}: level {args.level} {args.failure} -> level {new}")
        return EXIT_OK
    table = _pretension(cfg)
    spring = _stiffness(args.spring)
    tendon = _stiffness(args.tendon)
    material = _stiffness(args.material)
    rows = []
    for level in LEVELS:
        setting = level_to_pretension(level, table)
        k = level_stiffness(level, spring, tendon, material, table)
        rows.append((str(level), setting.ratio, setting.actuator_deg, "rigid" if k is RIGID else _num(k)))
    _emit(_csv(("level", "ratio", "actuator_deg", "k_total"), rows), args.out)
    return EXIT_OK


# -- agent -------------------------------------------------------------------


class _Unscripted:
    """Executor for fixtures without a script; only no-target scenes may use it."""

    def execute(self, plan, attempt):
        raise WorkflowError("no execution script for this image; pass --script or --executor stochastic")


def _agent_config(args, cfg) -> AgentConfig:
    g, e, a = cfg["gates"], cfg["enhance"], cfg["agent"]
    command = _pick(args.enhancer, e["command"])
    if isinstance(command, str):
        command = command.split()
    kwargs = {}
    if a["task"] is not None:
        kwargs["task"] = a["task"]
    return AgentConfig(
        thresholds=GateThresholds(g["low"], g["high"]),
        enhance_params=EnhanceParams(e["brighten_gamma"], e["darken_gamma"], e["equalize"]),
        pretension=_pretension(cfg),
        max_retries=_pick(args.max_retries, a["max_retries"]),
        memory_k=a["memory_k"],
        vision_retries=a["vision_retries"],
        enhancer_command=tuple(command) if command else None,
        reuse_history=a["reuse_history"],
        **kwargs,
    )


def _executor(args, image_path: Path):
    if args.executor == "stochastic":
        if args.true_level is None:
            raise UsageError("--executor stochastic needs --true-level")
        return StochasticExecutor(args.true_level, args.seed or 0)
    script = Path(args.script) if args.script else image_path.with_suffix(".script.json")
    if not script.is_file():
        if args.script:
            raise UsageError(f"script {script} not found")
        return _Unscripted()
    try:
        return ScriptedExecutor(json.loads(script.read_text(encoding="utf-8")))
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise UsageError(f"bad script {script}: {exc}") from exc


def _resolve_image(name: str, fixtures: Path) -> Path:
    path = Path(name)
    if path.is_file():
        return path
    for candidate in (fixtures / name, fixtures / f"{name}.ppm"):
        if candidate.is_file():
            return candidate
    raise UsageError(f"image {name!r} not found (also looked in {fixtures})")


def cmd_agent_run(args, cfg) -> int:
    fixtures = _fixtures_dir(cfg, args.fixtures)
    image_path = _resolve_image(args.image, fixtures)
    img = Image.load(image_path)
    config = _agent_config(args, cfg)
    if args.live:
        client = HttpVisionClient(args.live, timeout=args.timeout)
    else:
        client = MockVisionClient(fixtures)
    ledger_path = _pick(args.ledger, cfg["paths"]["ledger"])
    ledger = episode_ledger(ledger_path) if ledger_path else None
    ep = run_episode(img, config, client, _executor(args, image_path), ledger=ledger,
                     seed=args.seed, image_ref=image_path.name)

    print("stages: " + " -> ".join(name for name, _ in ep.stages))
    print(f"enhancement: {ep.enhancement.get('mode', 'none')}")
    if ep.target is not None:
        print(f"target: {ep.target['label']} box {ep.target['box']} grasp {ep.target['grasp_box']}")
    for i, att in enumerate(ep.attempts, 1):
        plan, rec = att.plan, att.record
        line = (f"attempt {i}: level {plan.level} ratio {plan.ratio:g} actuator {plan.actuator_deg:g} deg "
                f"mode {plan.mode.value} -> {rec.outcome}")
        if rec.failure != "none":
            line += f" ({rec.failure})"
        if att.revised_level is not None:
            line += f", adapt to level {att.revised_level}"
        print(line)
    if ep.status == "no-target":
        print("no target")
    print(f"status: {ep.status}" + (f" ({ep.error})" if ep.error else ""))
    if args.json:
        Path(args.json).write_text(ep.serialize() + "\n", encoding="utf-8")
    if ep.status in ("correct", "no-target"):
        return EXIT_OK
    return EXIT_ABNORMAL if ep.status == "abnormal" else EXIT_ABORTED


def cmd_enhance(args, cfg) -> int:
    img = Image.load(args.input)
    e, g = cfg["enhance"], cfg["gates"]
    params = EnhanceParams(_pick(args.brighten_gamma, e["brighten_gamma"]),
                           _pick(args.darken_gamma, e["darken_gamma"]), e["equalize"])
    stats = luminance_stats(img)
    mode = should_enhance(stats, GateThresholds(g["low"], g["high"])) if args.mode == "auto" else Mode(args.mode)
    out = enhance(img, mode, params)
    out.save(args.output)
    after = luminance_stats(out)
    print(f"mode {mode.value}: mean luma {stats.mean:.2f} -> {after.mean:.2f}")
    return EXIT_OK


# -- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="softgrip", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", help="JSON config file (default: $SOFTGRIP_CONFIG)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("deflect", help="closed-form deflection for all tendon variants")
    _beam_args(p)
    p.add_argument("--stations", type=int, default=201, help="profile stations")
    p.add_argument("--profile", help="write s,theta,deflection CSV for the convergent case")
    p.add_argument("--out", help="CSV output (default stdout)")
    p.set_defaults(func=cmd_deflect)

    p = sub.add_parser("oracle", help="discretized solve or grid convergence study")
    _beam_args(p)
    p.add_argument("--stations", type=int)
    p.add_argument("--tolerance", type=float)
    p.add_argument("--study", action="store_true", help="halve the spacing and report errors")
    p.add_argument("--levels", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("sweep-fig5", help="normalized tip deflection vs p/L")
    p.add_argument("--points", type=int)
    p.add_argument("--slope", type=float, help="convergent slope a (normalized)")
    p.add_argument("--k-t", dest="k_t", help="tendon stiffness (default rigid)")
    p.add_argument("--out")
    p.add_argument("--svg")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("stability", help="strike response of the finger oscillator")
    p.add_argument("--calibrate", action="store_true", help="fit to the calibration targets")
    p.add_argument("--inertia", type=float)
    p.add_argument("--damping", type=float, help="base damping c0")
    p.add_argument("--eta", type=float, help="stiffness-proportional damping")
    p.add_argument("--stiffness", type=float)
    p.add_argument("--omega0", type=float, help="initial angular rate, deg/s")
    p.add_argument("--threshold", type=float, help="settling band, deg")
    p.add_argument("--duration", type=float)
    p.add_argument("--dt", type=float)
    p.add_argument("--trace", help="write case,t,theta,omega CSV")
    p.add_argument("--report", help="write JSON report")
    p.set_defaults(func=cmd_stability)

    p = sub.add_parser("bend", help="segment-chain fingertip trajectory under tendon tension")
    p.add_argument("--length", type=float)
    p.add_argument("--n-seg", dest="n_seg", type=int)
    p.add_argument("--ei", type=float, help="flexural rigidity, N*mm^2")
    p.add_argument("--root-offset", dest="root_offset", type=float)
    p.add_argument("--offset-slope", dest="offset_slope", type=float)
    p.add_argument("--t-max", dest="t_max", type=float)
    p.add_argument("--steps", type=int)
    p.add_argument("--preload", type=float)
    p.add_argument("--gravity", action="store_true")
    p.add_argument("--segment-mass", dest="segment_mass", type=float)
    p.add_argument("--base-angle", dest="base_angle", type=float)
    p.add_argument("--calibrate-drop", dest="calibrate_drop", type=float,
                   help="fit the rigidity to this largest tip drop (mm)")
    p.add_argument("--reference", type=_point, action="append", default=[], help="x,y marker for the SVG")
    p.add_argument("--out")
    p.add_argument("--svg")
    p.set_defaults(func=cmd_bend)

    p = sub.add_parser("policy", help="classify, adapt dry-run, level table")
    psub = p.add_subparsers(dest="action", required=True)
    q = psub.add_parser("classify")
    q.add_argument("label")
    q.add_argument("--hint", choices=[c.value for c in MaterialClass])
    q.add_argument("--lexicon")
    q = psub.add_parser("adapt")
    q.add_argument("label")
    q.add_argument("--level", type=int, required=True)
    q.add_argument("--failure", choices=("slip", "crush"), required=True)
    q.add_argument("--cue", choices=("hard", "soft"))
    q.add_argument("--history", help="outcome ledger (JSON lines)")
    q = psub.add_parser("table")
    q.add_argument("--spring", default="1")
    q.add_argument("--tendon", default="rigid")
    q.add_argument("--material", default="rigid")
    q.add_argument("--out")
    p.set_defaults(func=cmd_policy)

    p = sub.add_parser("agent-run", help="run one grasp episode")
    p.add_argument("image", help="PPM/PGM path or fixture name")
    p.add_argument("--fixtures", help="canned-response directory for the mock client")
    p.add_argument("--live", metavar="URL", help="POST to a live vision endpoint instead of the mock")
    p.add_argument("--timeout", type=float, default=30.0)
    p.add_argument("--executor", choices=("scripted", "stochastic"), default="scripted")
    p.add_argument("--script", help="scripted outcomes (default <image>.script.json)")
    p.add_argument("--true-level", dest="true_level", type=int)
    p.add_argument("--seed", type=int, help="episode seed (also seeds the stochastic executor)")
    p.add_argument("--max-retries", dest="max_retries", type=int)
    p.add_argument("--enhancer", help="external enhancer command (PNM on stdin/stdout)")
    p.add_argument("--ledger", help="episode ledger (JSON lines), appended")
    p.add_argument("--json", help="write the serialized episode")
    p.set_defaults(func=cmd_agent_run)

    p = sub.add_parser("enhance", help="gate and enhance a PPM/PGM image")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--mode", choices=("auto", "none", "brighten", "darken"), default="auto")
    p.add_argument("--brighten-gamma", dest="brighten_gamma", type=float)
    p.add_argument("--darken-gamma", dest="darken_gamma", type=float)
    p.set_defaults(func=cmd_enhance)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config)
        return args.func(args, cfg)
    except (ConvergenceError, EquilibriumError, CalibrationError, FloatingPointError) as exc:
        print(f"softgrip: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except UnclassifiedMaterial as exc:
        print(f"softgrip: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (UsageError, ConfigFileError, ConfigError, MissingFixture, ImageFormatError,
            LedgerError, WorkflowError, ValueError, OSError) as exc:
        print(f"softgrip: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
