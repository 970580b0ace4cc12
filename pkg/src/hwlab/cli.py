"""Command-line experiment runner.

Configuration is plain text, one ``key = value`` per line, ``#`` starts a
comment.  Unknown keys, malformed lines and bad values are reported with
their line number.  Every run writes its CSV outputs, a copy of the effective
configuration (``config.txt``) and ``manifest.json`` (configuration hash,
seed, library versions, output digests and a timestamp) into the output
directory.  Passing either ``config.txt`` or ``manifest.json`` back through
``--config`` repeats the run; CSV files carry no timing data, so the repeat is
byte-identical.

Exit codes: 0 on success, 1 on configuration errors, 2 when a checked
invariant fails.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import platform
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from . import ansatz as an
from . import exponents as ex
from . import illposedness as ip
from . import norms as nm
from . import random_data as rd
from .evolve import solve_nls
from .grid import make_grid, set_workers

KINDS = ("simulate", "ladder", "exponents", "illposed", "randstats", "norms")


class ConfigError(ValueError):
    def __init__(self, message: str, line: int | None = None, source: str = "config"):
        self.line = line
        where = f"{source}:{line}: " if line is not None else f"{source}: "
        super().__init__(where + message)


class InvariantFailure(RuntimeError):
    pass


# -- configuration ---------------------------------------------------------


def _floats(text: str) -> tuple[float, ...]:
    parts = [p.strip() for p in text.split(",") if p.strip()]
    if not parts:
        raise ValueError("empty list")
    return tuple(float(p) for p in parts)


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("true", "yes", "1"):
        return True
    if t in ("false", "no", "0"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _kind(text: str) -> str:
    if text not in KINDS:
        raise ValueError(f"must be one of {', '.join(KINDS)}")
    return text


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, tuple):
        return ", ".join(_fmt(x) for x in v)
    return str(v)


_DEFAULT_PARAMS = an.AnsatzParams()

# key -> (parser, default); order fixes the canonical dump
SCHEMA: dict[str, tuple] = {
    "grid.nx": (int, 32),
    "grid.ny": (int, 8192),
    "grid.lx": (float, 12.0),
    "grid.ly": (float, 64.0),
    "time.t0": (float, 0.1),
    "time.dt": (float, 0.00125),
    "time.save_every": (int, 8),
    "physics.mu": (float, 1.0),
    "random.seed": (int, 0),
    "data.amplitude": (float, 0.1),
    "data.excess": (float, 0.4),
    "ansatz.s": (float, _DEFAULT_PARAMS.s),
    "ansatz.sigma": (float, _DEFAULT_PARAMS.sigma),
    "ansatz.sigma_p": (float, _DEFAULT_PARAMS.sigma_p),
    "ansatz.nu": (float, _DEFAULT_PARAMS.nu),
    "ansatz.alpha": (float, _DEFAULT_PARAMS.alpha),
    "ansatz.gamma": (float, _DEFAULT_PARAMS.gamma),
    "ansatz.D": (float, _DEFAULT_PARAMS.D),
    "ansatz.Dp": (float, _DEFAULT_PARAMS.Dp),
    "ansatz.n0": (int, _DEFAULT_PARAMS.N0),
    "ansatz.nmax": (int, _DEFAULT_PARAMS.Nmax),
    "exponents.gamma_step": (float, 1e-4),
    "randstats.samples": (int, 100000),
    "randstats.moments": (_floats, (2.0, 4.0, 6.0)),
    "randstats.seeds": (int, 10000),
    "illposed.rhos": (_floats, (0.2, 0.1, 0.05)),
    "illposed.s_strichartz": (_floats, (0.3, 0.5)),
    "illposed.s_inflation": (float, 0.15),
    "illposed.ns": (_floats, (4.0, 8.0, 16.0)),
    "illposed.gamma": (float, 0.1),
    "illposed.beta": (float, 0.9),
    "illposed.pde": (_bool, True),
    "experiment.kind": (_kind, "simulate"),
    "output.dir": (str, "out"),
}


@dataclass
class ExperimentConfig:
    values: dict

    def __getitem__(self, key: str):
        return self.values[key]

    @classmethod
    def defaults(cls) -> "ExperimentConfig":
        return cls({k: d for k, (_, d) in SCHEMA.items()})

    @classmethod
    def parse(cls, text: str, source: str = "config") -> "ExperimentConfig":
        values = {k: d for k, (_, d) in SCHEMA.items()}
        seen: dict[str, int] = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", lineno, source)
            key, val = (p.strip() for p in line.split("=", 1))
            if key not in SCHEMA:
                raise ConfigError(f"unknown key {key!r}", lineno, source)
            if key in seen:
                raise ConfigError(f"duplicate key {key!r} (first set on line {seen[key]})", lineno, source)
            seen[key] = lineno
            parser = SCHEMA[key][0]
            try:
                values[key] = parser(val)
            except ValueError as e:
                raise ConfigError(f"bad value for {key}: {e}", lineno, source) from None
        cfg = cls(values)
        cfg.validate(seen, source)
        return cfg

    def validate(self, lines: dict | None = None, source: str = "config") -> None:
        lines = lines or {}
        v = self.values

        def fail(key, msg, related=()):
            # a cross-key error points at the last involved line of the file
            hits = [lines[k] for k in (key, *related) if k in lines]
            raise ConfigError(f"{key}: {msg}", max(hits) if hits else None, source)

        for key in ("grid.nx", "grid.ny"):
            if v[key] < 1 or v[key] & (v[key] - 1):
                fail(key, "must be a power of two")
        for key in ("grid.lx", "grid.ly", "time.t0", "time.dt"):
            if not v[key] > 0:
                fail(key, "must be positive")
        if v["time.save_every"] < 1:
            fail("time.save_every", "must be at least 1")
        steps = v["time.t0"] / v["time.dt"]
        if abs(steps - round(steps)) > 1e-9 * max(1.0, steps):
            fail("time.t0", "must be a multiple of time.dt", ("time.dt",))
        if round(steps) % v["time.save_every"]:
            fail("time.save_every", "must divide the number of steps t0/dt", ("time.t0", "time.dt"))
        if v["random.seed"] < 0 or v["random.seed"] >= 2**64:
            fail("random.seed", "must be an unsigned 64-bit integer")
        if v["randstats.samples"] < 1 or v["randstats.seeds"] < 2:
            fail("randstats.samples", "need at least 1 sample and 2 seeds")

    def dumps(self) -> str:
        return "".join(f"{k} = {_fmt(self.values[k])}\n" for k in SCHEMA)

    def digest(self) -> str:
        return hashlib.sha256(self.dumps().encode()).hexdigest()

    def with_overrides(self, **kv) -> "ExperimentConfig":
        values = dict(self.values)
        values.update(kv)
        out = ExperimentConfig(values)
        out.validate()
        return out

    def ansatz_params(self) -> an.AnsatzParams:
        v = self.values
        return an.AnsatzParams(
            s=v["ansatz.s"], sigma=v["ansatz.sigma"], sigma_p=v["ansatz.sigma_p"], nu=v["ansatz.nu"],
            alpha=v["ansatz.alpha"], gamma=v["ansatz.gamma"], D=v["ansatz.D"], Dp=v["ansatz.Dp"],
            Dpp=v["ansatz.Dp"] + 1.0, N0=v["ansatz.n0"], Nmax=v["ansatz.nmax"], T0=v["time.t0"],
            dt=v["time.dt"], mu=v["physics.mu"], seed=v["random.seed"], save_every=v["time.save_every"],
        )


def load_config(path: str | Path) -> ExperimentConfig:
    """Read a config file, or the config embedded in a run manifest."""
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as e:
        raise ConfigError(f"cannot read: {e.strerror}", source=str(p)) from None
    if p.suffix == ".json":
        try:
            text = json.loads(text)["config"]
        except (ValueError, KeyError, TypeError):
            raise ConfigError("not a run manifest", source=str(p)) from None
    return ExperimentConfig.parse(text, source=str(p))


# -- helpers ---------------------------------------------------------------


def _csv(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in r])
    return buf.getvalue()


def _grid(cfg: ExperimentConfig, unit_resolution: bool = True):
    return make_grid(cfg["grid.nx"], cfg["grid.ny"], cfg["grid.lx"], cfg["grid.ly"],
                     unit_resolution=unit_resolution)


def _datum(cfg: ExperimentConfig):
    g = _grid(cfg)
    return rd.decaying_datum(g, cfg["ansatz.s"], cfg["data.excess"], cfg["data.amplitude"])


def _spec(cfg: ExperimentConfig, grid) -> rd.RandomSpec:
    kmax = int(min(64, math.floor(grid.eta_max - 1.0)))
    return rd.RandomSpec(cfg["random.seed"], -kmax, kmax)


class Run:
    """Collects the outputs of one experiment and writes them with a manifest."""

    def __init__(self, cfg: ExperimentConfig, out: Path):
        self.cfg = cfg
        self.out = out
        self.files: dict[str, str] = {}
        self.summary: dict = {}
        self.failures: list[str] = []

    def write(self, name: str, text: str) -> None:
        self.out.mkdir(parents=True, exist_ok=True)
        (self.out / name).write_text(text)
        self.files[name] = hashlib.sha256(text.encode()).hexdigest()

    def check(self, ok: bool, what: str) -> None:
        if not ok:
            self.failures.append(what)

    def finish(self, argv: list[str], started: float) -> None:
        self.out.mkdir(parents=True, exist_ok=True)
        (self.out / "config.txt").write_text(self.cfg.dumps())
        manifest = {
            "kind": self.cfg["experiment.kind"],
            "config": self.cfg.dumps(),
            "config_sha256": self.cfg.digest(),
            "seed": self.cfg["random.seed"],
            "versions": {"hwlab": __version__, "numpy": np.__version__, "scipy": scipy.__version__,
                         "python": platform.python_version()},
            "outputs": self.files,
            "summary": self.summary,
            "invariant_failures": self.failures,
            "argv": argv,
            "started": time.strftime("%Y-%m-%dT%H:%M:%S", time.localtime(started)),
            "elapsed_s": round(time.time() - started, 3),
        }
        (self.out / "manifest.json").write_text(json.dumps(manifest, indent=1, sort_keys=True) + "\n")


# -- experiments -----------------------------------------------------------


def cmd_simulate(run: Run) -> None:
    cfg = run.cfg
    f0 = _datum(cfg)
    u0 = rd.randomize(f0, _spec(cfg, f0.grid))
    mu = cfg["physics.mu"]
    traj = solve_nls(u0, cfg["time.t0"], cfg["time.dt"], mu, save_every=cfg["time.save_every"])
    traj.export(run.out / "trajectory")
    rows = []
    for i, t in enumerate(traj.times):
        f = traj.snapshot(i)
        rows.append([float(t), nm.mass(f), nm.energy(f, mu), nm.sobolev_aniso(f, cfg["ansatz.s"])])
    run.write("conservation.csv", _csv(["t", "mass", "energy", "Hs"], rows))
    m = np.array([r[1] for r in rows])
    drift = float(np.abs(m / m[traj.i0] - 1).max())
    run.summary.update(mass_drift=drift, blowup=bool(traj.flags.get("blowup", False)))
    run.check(drift <= 1e-10, f"relative mass drift {drift:.3e} exceeds 1e-10")
    run.check(not traj.flags.get("blowup", False), "solution reached the blow-up ceiling")


def cmd_ladder(run: Run) -> None:
    cfg = run.cfg
    p = cfg.ansatz_params()
    f0 = _datum(cfg)
    state = an.run_ladder(f0, p, spec=_spec(cfg, f0.grid))
    series_rows = []
    level_rows = []
    for N in sorted(state.levels):
        lvl = state.levels[N]
        c = lvl.cutoffs
        for i, t in enumerate(c.times):
            series_rows.append([N, float(t), lvl.series["F_S_leq"][i], lvl.series["F_S_N"][i],
                                lvl.series["w_Y"][i], c.theta_F[i], c.theta_w[i], c.theta_Fw[i]])
        loc = an.measure_localization(state, N)
        level_rows.append([N, float(lvl.series["F_S_N"][-1]), float(lvl.series["w_Y"][-1]),
                           float(loc.extras["off_band_fraction"])])
    run.write("ladder_series.csv", _csv(["N", "t", "F_S_leq", "F_S_N", "w_Y", "theta_F", "theta_w",
                                         "theta_Fw"], series_rows))
    run.write("levels.csv", _csv(["N", "F_S_N", "w_Y", "off_band_fraction"], level_rows))
    conv = an.convergence_report(state, p.s, p.sigma)
    run.write("convergence.csv", _csv(["N", "diff", "ratio"], [[r["N"], r["diff"], r["ratio"]] for r in conv]))
    run.summary.update(levels=sorted(state.levels), t_omega=state.t_omega, t_omega_empty=state.t_omega_flag)
    run.check(not state.t_omega_flag, "existence time is empty (a cutoff or norm bound fails at t = 0)")


def cmd_exponents(run: Run) -> None:
    step = run.cfg["exponents.gamma_step"]
    rows = ex.scan(step)
    run.write("exponents.csv", ex.table_csv(rows))
    best = min(rows, key=lambda t: t.s)
    exact = ex.analytic_optimum()
    at_star = ex.minimize_s(exact.gamma)
    gap = max(abs(a - b) for a, b in zip(_vec(at_star), _vec(exact)))
    run.write("optimum.csv", ex.table_csv([best, exact]))
    run.summary.update(grid_optimum=_vec(best) + [best.gamma], analytic=_vec(exact) + [exact.gamma], lp_gap=gap)
    run.check(gap <= 1e-9, f"LP at the analytic gamma misses the closed form by {gap:.3e}")


def _vec(t: ex.ExponentTuple) -> list[float]:
    return [t.s, t.sigma_p, t.sigma, t.nu]


def cmd_illposed(run: Run) -> None:
    cfg = run.cfg
    for s in cfg["illposed.s_strichartz"]:
        rep = ip.strichartz_failure(cfg["illposed.rhos"], s)
        run.write(f"strichartz_s{s!r}.csv", rep.csv())
        run.summary[f"strichartz_slope_s{s!r}"] = rep.slope
        run.check(abs(rep.slope - rep.predicted) <= 0.05,
                  f"Strichartz slope {rep.slope:.4f} at s={s} is off the prediction {rep.predicted:.4f}")
    sched = ip.InflationSchedule(tuple(cfg["illposed.ns"]), cfg["illposed.gamma"], cfg["illposed.beta"],
                                 cfg["illposed.s_inflation"])
    rows = ip.inflation_run(sched, mu=-cfg["physics.mu"], pde=cfg["illposed.pde"])
    run.write("inflation.csv", ip.inflation_csv(rows))
    growth = [r.growth for r in rows]
    run.summary.update(inflation_growth=growth, lower_ratio=[r.lower_ratio for r in rows])
    run.check(all(b > a for a, b in zip(growth, growth[1:])), "inflation growth is not increasing in n")


def cmd_randstats(run: Run) -> None:
    cfg = run.cfg
    seed = cfg["random.seed"]
    a = np.ones(16)
    results = [rd.khintchine_stats(a, int(p), cfg["randstats.samples"], seed) for p in cfg["randstats.moments"]]
    run.write("khintchine.csv", rd.khintchine_csv(results))
    for r in results:
        exact = math.gamma(1 + r.p / 2) ** (1 / r.p)
        run.check(abs(r.ratio - exact) <= max(5 * r.stderr, 1e-3),
                  f"moment ratio p={r.p}: {r.ratio:.4f} vs Gaussian {exact:.4f}")
    g = make_grid(16, 2048, cfg["grid.lx"], cfg["grid.ly"])
    f0 = rd.decaying_datum(g, cfg["ansatz.s"], cfg["data.excess"], cfg["data.amplitude"])
    blocks = [2, 4, 8, 16]
    seeds = [seed * 1_000_003 + j for j in range(cfg["randstats.seeds"])]
    C = rd.block_correlations(rd.block_norm_samples(f0, blocks, seeds))
    rows = [[blocks[i], blocks[j], C[i, j]] for i in range(len(blocks)) for j in range(i + 1, len(blocks))]
    run.write("block_correlation.csv", _csv(["N1", "N2", "correlation"], rows))
    run.summary["max_block_correlation"] = float(max(abs(r[2]) for r in rows))


def cmd_norms(run: Run) -> None:
    cfg = run.cfg
    f0 = _datum(cfg)
    u0 = rd.randomize(f0, _spec(cfg, f0.grid))
    s, mu = cfg["ansatz.s"], cfg["physics.mu"]
    y, x = nm.sobolev_components(u0, s)
    rows = [["mass", nm.mass(u0)], ["energy", nm.energy(u0, mu)], ["L2x_Hsy", y], ["H2sx_L2y", x],
            ["Hs", nm.sobolev_aniso(u0, s)]]
    for N in (2, 4, 8, 16, 32, 64):
        if 2 * N < f0.grid.eta_max:
            rows.append([f"block_{N}_L2", float(np.sqrt(nm.mass(rd.random_block(f0, _spec(cfg, f0.grid), N))))])
    run.write("norms.csv", _csv(["quantity", "value"], rows))


COMMANDS = {
    "simulate": cmd_simulate,
    "ladder": cmd_ladder,
    "exponents": cmd_exponents,
    "illposed": cmd_illposed,
    "randstats": cmd_randstats,
    "norms": cmd_norms,
}


# -- entry point -----------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hwlab", description="Experiments for the cubic half-wave Schrodinger equation.")
    ap.add_argument("kind", choices=KINDS)
    ap.add_argument("--config", help="key = value file, or a manifest.json from an earlier run")
    ap.add_argument("--out", help="output directory (overrides output.dir)")
    ap.add_argument("--seed", type=int, help="master seed (overrides random.seed)")
    ap.add_argument("--threads", type=int, default=os.cpu_count() or 1, help="FFT worker count")
    return ap


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    started = time.time()
    try:
        cfg = load_config(args.config) if args.config else ExperimentConfig.defaults()
        over = {"experiment.kind": args.kind}
        if args.out:
            over["output.dir"] = args.out
        if args.seed is not None:
            over["random.seed"] = args.seed
        cfg = cfg.with_overrides(**over)
        if args.threads < 1:
            raise ConfigError("--threads must be at least 1", source="command line")
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    set_workers(args.threads)
    run = Run(cfg, Path(cfg["output.dir"]))
    COMMANDS[args.kind](run)
    run.finish(argv, started)
    if run.failures:
        for f in run.failures:
            print(f"invariant failed: {f}", file=sys.stderr)
        return 2
    print(f"wrote {', '.join(sorted(run.files))} to {run.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
