"""Batch command line: ``wentzell {simulate,carleman,hum,verify} --config run.json``.

Every run writes into one directory: the requested outputs plus
``manifest.json`` holding the resolved configuration and package version.
Outputs depend only on the configuration and the seed.
"""
from __future__ import annotations

import argparse
import copy
import json
import logging
import re
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .errors import (CertificationError, ConfigError, ContractError, SolverBreakdown,
                     WeightDomainError)

log = logging.getLogger("wentzell")

DEFAULTS = {
    "geometry": {"body": "circle", "radius": 1.0, "outer_radius": 2.0},
    "grid": {"Nr": 16, "Ntheta": 32, "Nt": 64, "T": 1.0},
    "coefficients": {"d": 1.0, "delta": 2.0, "preset": "zero", "params": {}},
    "simulate": {"initial": "gaussian", "n_modes": 6, "control": "none", "amplitude": 1.0},
    "carleman": {"s_grid": [2, 4, 8, 16], "lambda_grid": [0.5, 1, 2], "alpha_margin": 0.1,
                 "T": 1.0, "tests": ["bump_constant", "bump_linear", "bump_wave"],
                 "observation": "boundary", "eps": 0.25, "refine": False},
    "hum": {"target": "low_modes", "n_modes": 10, "tol": 1e-4, "max_iter": 200,
            "mu_reg": 1e-10, "cutoff": None, "mask": "full", "filtered": False,
            "observability_T": [1.0, 2.0, 4.0]},
    "verify": {"fault": None},
    "output": "runs",
}
INITIAL_KINDS = ("zero", "gaussian", "low_modes")
CONTROL_KINDS = ("none", "pulse")
TARGET_KINDS = ("zero", "low_modes")
MASK_KINDS = ("full", "none", "half")
FAULTS = (None, "flux_normal_derivative")


# ---------------------------------------------------------------------------
# configuration


def _merge(base, override):
    out = copy.deepcopy(base)
    for k, v in override.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict) and k != "params":
            out[k] = _merge(out[k], v)
        else:
            out[k] = v
    return out


@dataclass
class RunConfig:
    data: dict
    text: str = ""
    source: str = "<defaults>"

    def __getitem__(self, key):
        return self.data[key]

    def where(self, key) -> str:
        """``file:line`` of the first occurrence of ``"key"`` in the source text."""
        m = re.search(r'"%s"\s*:' % re.escape(key), self.text)
        if not m:
            return f"{self.source} (default for '{key}')"
        return f"{self.source}:{self.text.count(chr(10), 0, m.start()) + 1}"

    def fail(self, key, message):
        raise ConfigError(f"{self.where(key)}: {message}")

    @classmethod
    def load(cls, path=None, active=()):
        text, source, raw = "", "<defaults>", {}
        if path is not None:
            source = str(path)
            try:
                text = Path(path).read_text()
            except OSError as exc:
                raise ConfigError(f"{source}: cannot read config ({exc.strerror})") from exc
            try:
                raw = json.loads(text)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"{source}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
            if not isinstance(raw, dict):
                raise ConfigError(f"{source}:1: top level must be a JSON object")
        unknown = set(raw) - set(DEFAULTS)
        cfg = cls(_merge(DEFAULTS, raw), text, source)
        if unknown:
            key = sorted(unknown)[0]
            cfg.fail(key, f"unknown block '{key}'")
        active = set(active) | {k for k in ("carleman", "hum") if k in raw}
        cfg.validate(active)
        return cfg

    def validate(self, active):
        from .pde.coefficients import PRESETS

        g, grid, co = self["geometry"], self["grid"], self["coefficients"]
        if g["body"] not in ("circle", "ellipse"):
            self.fail("body", f"body must be 'circle' or 'ellipse', got {g['body']!r}")
        dims = ("radius",) if g["body"] == "circle" else ("a", "b")
        for k in dims + ("outer_radius",):
            self._positive(g, k)
        inner = g["radius"] if g["body"] == "circle" else max(g["a"], g["b"])
        if not g["outer_radius"] > inner:
            self.fail("outer_radius", "outer_radius must exceed the body size")
        for k in ("Nr", "Ntheta", "Nt"):
            low = {"Nr": 8, "Ntheta": 16, "Nt": 1}[k]
            if not isinstance(grid.get(k), int) or grid[k] < low:
                self.fail(k, f"{k} must be an integer >= {low}")
        if grid["Ntheta"] % 2:
            self.fail("Ntheta", "Ntheta must be even")
        self._positive(grid, "T")
        self._positive(co, "d")
        self._positive(co, "delta")
        if co["preset"] not in set(PRESETS) | {"gauge_example"}:
            self.fail("preset", f"unknown coefficient preset {co['preset']!r}; "
                      f"choose from {sorted(set(PRESETS) | {'gauge_example'})}")
        if not isinstance(co["params"], dict):
            self.fail("params", "coefficient params must be an object")
        if active & {"carleman", "hum"} and not co["delta"] > co["d"]:
            self.fail("delta", f"assumption delta > d violated (delta={co['delta']}, d={co['d']}); "
                      "required when the carleman or hum block is active")
        sim = self["simulate"]
        if sim["initial"] not in INITIAL_KINDS:
            self.fail("initial", f"initial must be one of {INITIAL_KINDS}")
        if sim["control"] not in CONTROL_KINDS:
            self.fail("control", f"control must be one of {CONTROL_KINDS}")
        car = self["carleman"]
        for k in ("s_grid", "lambda_grid"):
            vals = car[k]
            if not isinstance(vals, list) or len(vals) < 3 or any(
                    not isinstance(v, (int, float)) or v <= 0 for v in vals):
                self.fail(k, f"{k} must list at least three positive numbers")
        if len(car["s_grid"]) * len(car["lambda_grid"]) < 12:
            self.fail("s_grid", "the (s, lambda) grid needs at least 12 cells")
        self._positive(car, "alpha_margin")
        self._positive(car, "T")
        if car["observation"] not in ("boundary", "interior"):
            self.fail("observation", "observation must be 'boundary' or 'interior'")
        from .carleman.testfunctions import FAMILY

        if len(car["tests"]) < 3 or any(t not in FAMILY for t in car["tests"]):
            self.fail("tests", f"tests must name at least three of {sorted(FAMILY)}")
        hum = self["hum"]
        if hum["target"] not in TARGET_KINDS:
            self.fail("target", f"target must be one of {TARGET_KINDS}")
        if hum["mask"] not in MASK_KINDS:
            self.fail("mask", f"mask must be one of {MASK_KINDS}")
        self._positive(hum, "tol")
        if not isinstance(hum["max_iter"], int) or hum["max_iter"] < 1:
            self.fail("max_iter", "max_iter must be a positive integer")
        if not isinstance(hum["mu_reg"], (int, float)) or hum["mu_reg"] < 0:
            self.fail("mu_reg", "mu_reg must be nonnegative")
        n_unknowns = grid["Nr"] * grid["Ntheta"]
        if hum["cutoff"] is not None and not (isinstance(hum["cutoff"], int)
                                              and 1 <= hum["cutoff"] <= n_unknowns):
            self.fail("cutoff", f"cutoff must be an integer in 1..{n_unknowns}")
        if not isinstance(hum["n_modes"], int) or not 1 <= hum["n_modes"] <= n_unknowns:
            self.fail("n_modes", f"n_modes must be an integer in 1..{n_unknowns}")
        if any(not isinstance(v, (int, float)) or v <= 0 for v in hum["observability_T"]):
            self.fail("observability_T", "observability_T must list positive horizons")
        if self["verify"]["fault"] not in FAULTS:
            self.fail("fault", f"fault must be one of {FAULTS}")

    def _positive(self, block, key):
        v = block.get(key)
        if not isinstance(v, (int, float)) or isinstance(v, bool) or not v > 0:
            self.fail(key, f"{key} must be a positive number, got {v!r}")

    # builders -------------------------------------------------------------

    def body(self):
        from .geometry import ConvexBody

        g = self["geometry"]
        if g["body"] == "circle":
            return ConvexBody.circle(g["radius"])
        return ConvexBody.ellipse(g["a"], g["b"])

    def annulus(self):
        from .mesh import build_grid

        g = self["geometry"]
        if g["body"] != "circle":
            self.fail("body", "the solver mesh is annular: simulate/hum/verify need a circle body")
        return build_grid(g["radius"], g["outer_radius"], self["grid"]["Nr"],
                          self["grid"]["Ntheta"])

    def coefficients(self):
        from .pde.coefficients import make_preset

        co, g = self["coefficients"], self["geometry"]
        try:
            return make_preset(co["preset"], co["d"], co["delta"], g.get("radius", 1.0),
                               g["outer_radius"], **co["params"])
        except TypeError as exc:
            self.fail("params", f"bad preset parameters: {exc}")


# ---------------------------------------------------------------------------
# run directory


class RunWriter:
    """The single writer of a run directory."""

    def __init__(self, out, command, cfg: RunConfig, seed):
        self.dir = Path(out)
        self.dir.mkdir(parents=True, exist_ok=True)
        self.files = []
        self.manifest = {"command": command, "version": __version__, "seed": seed,
                         "config": cfg.data}

    def path(self, name):
        self.files.append(name)
        return self.dir / name

    def json(self, name, obj):
        self.path(name).write_text(json.dumps(obj, indent=2, sort_keys=True, default=_jsonable)
                                   + "\n")

    def close(self, extra=None):
        if extra:
            self.manifest.update(extra)
        self.manifest["files"] = sorted(set(self.files))
        (self.dir / "manifest.json").write_text(
            json.dumps(self.manifest, indent=2, sort_keys=True, default=_jsonable) + "\n")


def _jsonable(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, np.bool_):
        return bool(v)
    if isinstance(v, np.ndarray):
        return v.tolist()
    if isinstance(v, complex):
        return [v.real, v.imag]
    raise TypeError(f"cannot serialise {type(v).__name__}")


def _finite_or_str(x):
    return x if np.isfinite(x) else ("inf" if x > 0 else "nan")


# ---------------------------------------------------------------------------
# data builders


def initial_state(cfg: RunConfig, grid, rng):
    from .mesh import FieldPair, NormSuite

    kind = cfg["simulate"]["initial"]
    if kind == "zero":
        return FieldPair.zeros(grid)
    if kind == "gaussian":
        x = grid.points
        R2 = cfg["geometry"]["outer_radius"]
        r = np.hypot(x[..., 0], x[..., 1])
        c = np.array([0.5 * (grid.R1 + R2), 0.0])
        u = (R2 - r) * np.exp(-np.sum((x - c) ** 2, axis=-1) + 1j * x[..., 1])
        u[-1] = 0.0
        return FieldPair(u)
    lam, E = NormSuite(grid).modes(cfg["simulate"]["n_modes"])
    c = rng.normal(size=E.shape[1]) + 1j * rng.normal(size=E.shape[1])
    return FieldPair.from_unknowns(grid, E @ c)


def control_signal(cfg: RunConfig, grid, Nt, T, mask=None):
    from .pde.solve import ControlSignal

    mask = np.ones(grid.Ntheta, bool) if mask is None else mask
    if cfg["simulate"]["control"] == "none":
        return ControlSignal.zeros(Nt, mask)
    t = np.linspace(0.0, T, Nt + 1)
    amp = cfg["simulate"]["amplitude"]
    vals = amp * np.sin(np.pi * t / T)[:, None] ** 2 * np.cos(grid.theta)[None, :]
    return ControlSignal(vals, mask)


def gamma_mask(kind, grid):
    if kind == "full":
        return np.ones(grid.Ntheta, bool)
    if kind == "none":
        return np.zeros(grid.Ntheta, bool)
    return np.cos(grid.theta) >= 0.0


# ---------------------------------------------------------------------------
# drivers


def run_simulate(cfg: RunConfig, writer: RunWriter, seed=0, threads=1):
    from .mesh import NormSuite
    from .pde import energy_report, forward_solve, hidden_regularity_report
    from .pde.io import write_csv, write_trajectory

    grid, coeffs = cfg.annulus(), cfg.coefficients()
    Nt, T = cfg["grid"]["Nt"], float(cfg["grid"]["T"])
    rng = np.random.default_rng(seed)
    u0 = initial_state(cfg, grid, rng)
    control = control_signal(cfg, grid, Nt, T)
    traj = forward_solve(grid, coeffs, u0, control, Nt, T)
    suite = NormSuite(grid)
    report = energy_report(traj, coeffs, suite=suite)
    write_trajectory(writer.path("trajectory.wntz"), traj.frames, T)
    h0 = report.h_norm[0]
    v = report.v_norm if report.v_norm is not None else np.full_like(report.h_norm, np.nan)
    rows = [(float(t), float(h), float(vv), float(abs(h - h0) / h0) if h0 else 0.0)
            for t, h, vv in zip(report.times, report.h_norm, v)]
    write_csv(writer.path("energy.csv"), ["time", "h_norm", "v_norm", "drift"], rows)
    summary = {"h_drift": report.h_drift, "h_ratio": report.h_ratio, "v_ratio": report.v_ratio,
               "growth_bound": _finite_or_str(report.growth_bound),
               "trace_condition_ok": report.trace_condition_ok,
               "conservative": coeffs.is_conservative(grid.points)}
    if report.v_norm is not None and np.max(np.abs(control.values)) == 0.0:
        hr = hidden_regularity_report(traj, coeffs, suite=suite)
        summary["hidden_regularity"] = {"trace_norm_sq": hr.trace_norm_sq, "ratio": hr.ratio}
    writer.json("summary.json", summary)
    print(f"simulate: {Nt} steps, H drift {report.h_drift:.3e}, H ratio {report.h_ratio:.6g}")
    return 0


def run_carleman(cfg: RunConfig, writer: RunWriter, seed=0, threads=1):
    from .carleman import (BoundaryObservation, CarlemanCoefficients, InteriorObservation,
                           QuadratureResolution, carleman_sweep, make_test_function)
    from .geometry import CarlemanParams

    car, co = cfg["carleman"], cfg["coefficients"]
    R2 = cfg["geometry"]["outer_radius"]
    template = CarlemanParams.create(cfg.body(), car["lambda_grid"][0], car["s_grid"][0],
                                     car["T"], R2, alpha_margin=car["alpha_margin"])
    coeffs = CarlemanCoefficients.from_coefficient_set(cfg.coefficients())
    tests = [make_test_function(n, R2) for n in car["tests"]]
    obs = InteriorObservation(car["eps"]) if car["observation"] == "interior" \
        else BoundaryObservation()
    res = QuadratureResolution()
    sweep = carleman_sweep(template, coeffs, tests, car["s_grid"], car["lambda_grid"], obs, res,
                           workers=threads)
    sweep.write(writer.path("sweep.csv"))
    summary = sweep.summary()
    if car["refine"]:
        fine = carleman_sweep(template, coeffs, tests, car["s_grid"], car["lambda_grid"], obs,
                              res.doubled(), workers=threads)
        summary["refined_C"] = fine.C
        summary["refinement_delta"] = abs(fine.C - sweep.C) / max(abs(fine.C), 1e-300)
    writer.json("summary.json", summary)
    tag = "" if sweep.delta_gt_d else " [delta <= d: tangential term uncontrolled]"
    print(f"carleman: s0={sweep.s0:g} lambda0={sweep.lam0:g} C={sweep.C:.6g}{tag}")
    return 0


def run_hum(cfg: RunConfig, writer: RunWriter, seed=0, threads=1):
    from .hum import GramianContext, observability_constant, synthesize_control
    from .mesh import FieldPair
    from .pde.io import write_csv, write_trajectory

    grid, coeffs = cfg.annulus(), cfg.coefficients()
    Nt, T = cfg["grid"]["Nt"], float(cfg["grid"]["T"])
    hum = cfg["hum"]
    mask = gamma_mask(hum["mask"], grid)
    ctx = GramianContext(grid, coeffs, Nt, T, mu_reg=hum["mu_reg"], cutoff=hum["cutoff"],
                         mask=mask, filtered=hum["filtered"])
    rng = np.random.default_rng(seed)
    if hum["target"] == "zero":
        target = np.zeros(grid.n_unknowns, complex)
    else:
        lam, E = ctx.suite.modes(hum["n_modes"])
        target = E @ (rng.normal(size=E.shape[1]) + 1j * rng.normal(size=E.shape[1]))
    result = synthesize_control(ctx, target, tol=hum["tol"], max_iter=hum["max_iter"])

    mid = result.control.midpoints()
    tmid = (np.arange(Nt) + 0.5) * ctx.dt
    rows = [(float(grid.theta[k]), float(tmid[n]), float(mid[n, k].real), float(mid[n, k].imag))
            for n in range(Nt) for k in range(grid.Ntheta) if mask[k] and np.any(mid)]
    write_csv(writer.path("control.csv"), ["angle", "time", "re", "im"], rows)
    write_trajectory(writer.path("reached.wntz"), result.reached.bulk[None], T)
    writer.json("diagnostics.json", result.diagnostics())

    obs_rows = []
    for To in hum["observability_T"]:
        n_steps = max(1, int(round(To / ctx.dt)))
        octx = GramianContext(grid, coeffs, n_steps, float(To), mu_reg=0.0, cutoff=ctx.cutoff,
                              mask=mask, suite=ctx.suite)
        est = observability_constant(octx)
        obs_rows.append((float(To), float(est.C_obs), float(est.min_eigenvalue), est.observable,
                         est.cutoff))
    write_csv(writer.path("observability.csv"),
              ["T", "C_obs", "min_eigenvalue", "observable", "cutoff"], obs_rows)
    print(f"hum: {result.iterations} iterations, V' steering error {result.steering_error:.3e}, "
          f"converged={result.converged}")
    for r in obs_rows:
        print(f"  observability T={r[0]:g}: C_obs={r[1]:.6g}")
    return 0


@dataclass
class CheckResult:
    name: str
    value: float
    tol: float

    @property
    def passed(self):
        return bool(np.isfinite(self.value) and self.value <= self.tol)


def verification_checks(cfg: RunConfig, seed=0):
    """Named structural checks; each returns a residual compared with a tolerance."""
    from .carleman import (BumpFunction, CarlemanCoefficients, WeightedFunction,
                           bulk_operator, conjugated_decomposition)
    from .geometry import CarlemanParams
    from .mesh import FieldPair, green_residual
    from .pde import (ControlSignal, PRESETS, adjoint_solve, forward_solve, gauge_transform,
                      make_preset)

    grid = cfg.annulus()
    Nt, T = cfg["grid"]["Nt"], float(cfg["grid"]["T"])
    d, delta = cfg["coefficients"]["d"], cfg["coefficients"]["delta"]
    R1, R2 = grid.R1, grid.R2
    rng = np.random.default_rng(seed)
    fault = cfg["verify"]["fault"]
    checks = []

    def rand_field(vanish_outer=True):
        u = rng.normal(size=grid.shape) + 1j * rng.normal(size=grid.shape)
        if vanish_outer:
            u[-1] = 0.0
        return u

    # adjointness of the forward and backward steppers
    worst = 0.0
    for name in list(PRESETS) + ["gauge_example"]:
        coeffs = make_preset(name, d, delta, R1, R2)
        h = rng.normal(size=(Nt + 1, grid.Ntheta)) + 1j * rng.normal(size=(Nt + 1, grid.Ntheta))
        h[0] = 0.0
        control = ControlSignal(h, np.ones(grid.Ntheta, bool))
        terminal = FieldPair(rand_field())
        y = forward_solve(grid, coeffs, FieldPair.zeros(grid), control, Nt, T, keep="ends")
        phi = adjoint_solve(grid, coeffs, terminal, Nt, T, keep="all")
        obs = phi.flux_trace
        if fault == "flux_normal_derivative":
            obs = 0.5 * (phi.outer_trace[1:] + phi.outer_trace[:-1])
        lhs = d * phi.dt * grid.sigma_outer * np.sum(control.midpoints() * np.conj(obs))
        rhs = 1j * np.sum(grid.mass * y.final.bulk.ravel() * np.conj(terminal.bulk.ravel()))
        worst = max(worst, abs(lhs - rhs) / max(abs(lhs), abs(rhs)))
    checks.append(CheckResult("adjointness", float(worst), 1e-10))

    # conservation
    coeffs = make_preset("real_well", d, delta, R1, R2)
    traj = forward_solve(grid, coeffs, FieldPair(rand_field()), None, Nt, T, keep="all")
    h = np.sqrt(np.einsum("nij,ij->n", np.abs(traj.frames) ** 2,
                          grid.mass.reshape(grid.shape)))
    checks.append(CheckResult("conservation", float(np.max(np.abs(h - h[0])) / h[0]), 1e-10))

    # Green identity
    g = max(green_residual(grid, rand_field(False), rand_field(False)) for _ in range(5))
    checks.append(CheckResult("green_identity", float(g), 1e-12))

    # conjugation identity
    params = CarlemanParams.create(cfg.body(), 1.0, 5.0, 1.0, R2)
    cc = CarlemanCoefficients.from_coefficient_set(make_preset("rotation_drift", d, delta))
    w = BumpFunction(R2, "wave")
    ang = rng.uniform(0, 2 * np.pi, 50)
    rad = rng.uniform(R1 * 1.01, R2 * 0.99, 50)
    x = np.stack([rad * np.cos(ang), rad * np.sin(ang)], axis=-1)
    xg = R1 * np.stack([np.cos(ang), np.sin(ang)], axis=-1)
    worst = 0.0
    for t in rng.uniform(0.05, 0.95, 4):
        dec = conjugated_decomposition(params, cc, w, x, t, xg)
        lhs = bulk_operator(cc, WeightedFunction(w, params).jet(x, t), x, t)
        rhs = dec.P1 + dec.P2 + dec.R
        worst = max(worst, float(np.max(np.abs(lhs - rhs)) / np.max(np.abs(lhs))))
    checks.append(CheckResult("conjugation_identity", worst, 1e-8))

    # gauge round trip
    pi = rng.normal(size=grid.shape)
    u = rand_field(False)
    back = gauge_transform(gauge_transform(u, pi, "forward", pi[0]), pi, "inverse", pi[0])
    checks.append(CheckResult("gauge_round_trip",
                              float(np.max(np.abs(back - u)) / np.max(np.abs(u))), 1e-13))
    return checks


def run_verify(cfg: RunConfig, writer: RunWriter, seed=0, threads=1):
    from .pde.io import write_csv

    checks = verification_checks(cfg, seed)
    write_csv(writer.path("verify.csv"), ["check", "residual", "tolerance", "passed"],
              [(c.name, c.value, c.tol, c.passed) for c in checks])
    for c in checks:
        print(f"{'PASS' if c.passed else 'FAIL'} {c.name}: residual {c.value:.3e} "
              f"(tol {c.tol:.0e})")
    failed = [c.name for c in checks if not c.passed]
    if failed:
        print("failing checks: " + ", ".join(failed))
    return 0 if not failed else 1


COMMANDS = {"simulate": run_simulate, "carleman": run_carleman, "hum": run_hum,
            "verify": run_verify}


def build_parser():
    p = argparse.ArgumentParser(prog="wentzell", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", type=Path, help="JSON run configuration")
        sp.add_argument("--out", type=Path, help="run directory (overrides config 'output')")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--threads", type=int, default=1)
        sp.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    active = {args.command} & {"carleman", "hum"}
    try:
        cfg = RunConfig.load(args.config, active)
        if args.threads < 1:
            raise ConfigError("--threads must be at least 1")
        out = args.out if args.out is not None else Path(cfg["output"]) / args.command
        writer = RunWriter(out, args.command, cfg, args.seed)
        code = COMMANDS[args.command](cfg, writer, args.seed, args.threads)
        writer.close({"exit_code": code})
        return code
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (ContractError, CertificationError, WeightDomainError, SolverBreakdown,
            OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
