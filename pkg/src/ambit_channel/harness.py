"""Configuration ingestion, seeded experiment orchestration and persistence.

Configs are single JSON documents; speeds may be given in km/h and carriers
in GHz, converted to SI on ingest.  Every run emits a manifest recording the
config hash, the per-realization seeds and an inventory of written files, so
a run can be checked for bit-identical reproduction.
"""
from __future__ import annotations

import copy
import csv
import hashlib
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

from . import __version__
from .ambit_sim import simulate_ambit
from .direct_sim import received_power_trace, simulate_direct
from .errors import ConfigurationError, InventoryError
from .levy_field import materialize_scatterers, sample_field
from .scene import (ChannelParams, GridSpec, SceneGeometry, TrajectoryModel,
                    max_propagation_delay_s)
from .stats import (compare_engines, doppler_psd, narrowband_gain,
                    realization_seeds, temporal_acf, write_acf_csv,
                    write_cdf_csv, write_psd_csv)

WORKERS_ENV_VAR = "AMBIT_CHANNEL_WORKERS"
ENGINES = ("direct", "ambit", "both")
FORMATS = ("csv", "binary")
GRID_POLICIES = ("all", "first", "none")


def _require(block: dict, key: str, path: str, kinds: tuple[type, ...],
             positive: bool = False, non_negative: bool = False) -> Any:
    if key not in block:
        raise ConfigurationError(f"missing required field {path}.{key}")
    val = block[key]
    if isinstance(val, bool) or not isinstance(val, kinds):
        raise ConfigurationError(f"{path}.{key} has the wrong type")
    if positive and val <= 0:
        raise ConfigurationError(f"{path}.{key} must be positive")
    if non_negative and val < 0:
        raise ConfigurationError(f"{path}.{key} must be non-negative")
    return val


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated experiment description with all quantities in SI units."""

    params: ChannelParams
    geo: SceneGeometry
    traj: TrajectoryModel
    grid: GridSpec
    engine: str
    realizations: int
    base_seed: int
    include_los: bool
    out_dir: str
    formats: tuple[str, ...]
    impulse_grids: str
    normalized: dict

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentConfig":
        if not isinstance(doc, dict):
            raise ConfigurationError("config root must be a JSON object")
        for block in ("scene", "radio", "grid", "run"):
            if block not in doc or not isinstance(doc[block], dict):
                raise ConfigurationError(f"missing config block {block}")
        scene = doc["scene"]
        radio = doc["radio"]
        grid_b = doc["grid"]
        run = doc["run"]
        out = doc.get("output", {})

        # trajectory; speed accepted as km/h or m/s
        if ("v0_kmh" in scene) == ("v0_mps" in scene):
            raise ConfigurationError(
                "scene: provide exactly one of v0_kmh or v0_mps")
        if "v0_kmh" in scene:
            v0 = _require(scene, "v0_kmh", "scene", (int, float),
                          non_negative=True) / 3.6
        else:
            v0 = _require(scene, "v0_mps", "scene", (int, float),
                          non_negative=True)
        accel = scene.get("acceleration_mps2", 0.0)
        if isinstance(accel, bool) or not isinstance(accel, (int, float)):
            raise ConfigurationError("scene.acceleration_mps2 has the wrong type")
        y_i = scene.get("initial_y_m", 0.0)
        traj = TrajectoryModel(initial_speed_m_per_s=float(v0),
                               acceleration_m_per_s2=float(accel),
                               initial_y_m=float(y_i))

        # geometry; exactly one parameterization unless both are consistent
        bs_x = _require(scene, "bs_x_m", "scene", (int, float))
        bs_y = _require(scene, "bs_y_m", "scene", (int, float))
        has_stats = "mean_path_count" in scene and "path_arrival_rate_per_s" in scene
        has_disc = "disc_radius_m" in scene and "scatterer_density_per_m2" in scene
        if not has_stats and not has_disc:
            raise ConfigurationError(
                "scene: provide (mean_path_count, path_arrival_rate_per_s) "
                "or (disc_radius_m, scatterer_density_per_m2)")
        if has_stats and not has_disc:
            geo = SceneGeometry.from_path_stats(
                float(bs_x), float(bs_y),
                _require(scene, "mean_path_count", "scene", (int, float),
                         positive=True),
                _require(scene, "path_arrival_rate_per_s", "scene", (int, float),
                         positive=True),
                traj.initial_speed_m_per_s)
        elif has_disc and not has_stats:
            geo = SceneGeometry.from_disc(
                float(bs_x), float(bs_y),
                _require(scene, "disc_radius_m", "scene", (int, float),
                         positive=True),
                _require(scene, "scatterer_density_per_m2", "scene",
                         (int, float), non_negative=True),
                traj.initial_speed_m_per_s)
        else:
            geo = SceneGeometry(
                float(bs_x), float(bs_y),
                float(scene["disc_radius_m"]),
                float(scene["scatterer_density_per_m2"]),
                float(scene["mean_path_count"]),
                float(scene["path_arrival_rate_per_s"]))
            geo.validate(traj.initial_speed_m_per_s)

        # radio
        if ("carrier_frequency_ghz" in radio) == ("carrier_frequency_hz" in radio):
            raise ConfigurationError(
                "radio: provide exactly one of carrier_frequency_ghz or "
                "carrier_frequency_hz")
        if "carrier_frequency_ghz" in radio:
            f_c = _require(radio, "carrier_frequency_ghz", "radio",
                           (int, float), positive=True) * 1e9
        else:
            f_c = _require(radio, "carrier_frequency_hz", "radio",
                           (int, float), positive=True)
        gamma = _require(radio, "path_loss_exponent", "radio", (int, float),
                         positive=True)
        ref_gain = radio.get("ref_gain", "isotropic")
        if ref_gain == "isotropic":
            params = ChannelParams.from_carrier(float(f_c), float(gamma))
        elif isinstance(ref_gain, dict):
            params = ChannelParams.from_carrier(
                float(f_c), float(gamma),
                ref_gain_scatter=_require(ref_gain, "scatter",
                                          "radio.ref_gain", (int, float),
                                          positive=True),
                ref_gain_los=_require(ref_gain, "los", "radio.ref_gain",
                                      (int, float), positive=True))
        else:
            raise ConfigurationError(
                'radio.ref_gain must be "isotropic" or {"scatter", "los"}')

        # grid; tau_max resolved from the scene geometry when absent
        dt = _require(grid_b, "dt_s", "grid", (int, float), positive=True)
        dy = _require(grid_b, "dy_m", "grid", (int, float), positive=True)
        dtau = _require(grid_b, "dtau_s", "grid", (int, float), positive=True)
        t_max = _require(grid_b, "t_max_s", "grid", (int, float), positive=True)
        tau_max = grid_b.get("tau_max_s")
        if tau_max is None:
            tau_max = resolve_tau_max(geo, traj, float(dt), float(dy),
                                      float(dtau), float(t_max))
        elif isinstance(tau_max, bool) or not isinstance(tau_max, (int, float)) \
                or tau_max <= 0:
            raise ConfigurationError("grid.tau_max_s must be positive or null")
        grid = GridSpec.build(float(dt), float(dy), float(dtau), float(tau_max),
                              float(t_max), geo.disc_radius_m,
                              traj.initial_speed_m_per_s)

        # run block
        engine = _require(run, "engine", "run", (str,))
        if engine not in ENGINES:
            raise ConfigurationError(f"run.engine must be one of {ENGINES}")
        realizations = _require(run, "realizations", "run", (int,), positive=True)
        base_seed = _require(run, "base_seed", "run", (int,), non_negative=True)
        include_los = run.get("include_los", False)
        if not isinstance(include_los, bool):
            raise ConfigurationError("run.include_los must be a boolean")

        out_dir = out.get("directory", "out")
        formats = tuple(out.get("formats", ["csv"]))
        if not formats or any(f not in FORMATS for f in formats):
            raise ConfigurationError(f"output.formats must be drawn from {FORMATS}")
        impulse_grids = out.get("impulse_grids", "first")
        if impulse_grids not in GRID_POLICIES:
            raise ConfigurationError(
                f"output.impulse_grids must be one of {GRID_POLICIES}")

        cfg = cls(params=params, geo=geo, traj=traj, grid=grid, engine=engine,
                  realizations=realizations, base_seed=base_seed,
                  include_los=include_los, out_dir=str(out_dir),
                  formats=formats, impulse_grids=impulse_grids,
                  normalized={})
        object.__setattr__(cfg, "normalized", cfg.to_dict())
        cfg.validate()
        return cfg

    def to_dict(self) -> dict:
        return {
            "scene": {
                "bs_x_m": self.geo.bs_x_m,
                "bs_y_m": self.geo.bs_y_m,
                "disc_radius_m": self.geo.disc_radius_m,
                "scatterer_density_per_m2": self.geo.scatterer_density_per_m2,
                "mean_path_count": self.geo.mean_path_count,
                "path_arrival_rate_per_s": self.geo.path_arrival_rate_per_s,
                "v0_mps": self.traj.initial_speed_m_per_s,
                "acceleration_mps2": self.traj.acceleration_m_per_s2,
                "initial_y_m": self.traj.initial_y_m,
            },
            "radio": {
                "carrier_frequency_hz": self.params.carrier_frequency_hz,
                "path_loss_exponent": self.params.path_loss_exponent,
                "ref_gain": {"scatter": self.params.ref_gain_scatter,
                             "los": self.params.ref_gain_los},
            },
            "grid": {
                "dt_s": self.grid.dt_s,
                "dy_m": self.grid.dy_m,
                "dtau_s": self.grid.dtau_s,
                "tau_max_s": self.grid.tau_max_s,
                "t_max_s": self.grid.t_max_s,
            },
            "run": {
                "engine": self.engine,
                "realizations": self.realizations,
                "base_seed": self.base_seed,
                "include_los": self.include_los,
            },
            "output": {
                "directory": self.out_dir,
                "formats": list(self.formats),
                "impulse_grids": self.impulse_grids,
            },
        }

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ExperimentConfig):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    def config_sha256(self) -> str:
        return hashlib.sha256(canonical_json(self.to_dict()).encode()).hexdigest()

    def validate(self) -> None:
        """Cross-checks that need several blocks at once."""
        self.traj.validate_horizon((self.grid.p_count - 1) * self.grid.dt_s)
        max_delay = max_propagation_delay_s(self.geo, self.traj, self.grid)
        budget = self.grid.d_count * self.grid.dtau_s
        if budget < max_delay:
            raise ConfigurationError(
                f"grid.tau_max_s: delay budget {budget:.4g} s cannot hold the "
                f"worst-case path delay {max_delay:.4g} s")
        # the accelerated trajectory must stay on the uniform backbone
        n, p = self.grid.n_half, self.grid.p_count
        v0dt = self.traj.initial_speed_m_per_s * self.grid.dt_s
        i = p - 1
        x_final = v0dt * i + 0.5 * self.traj.acceleration_m_per_s2 \
            * self.grid.dt_s ** 2 * i * (i + 1)
        span = v0dt * (n + p - 1)
        if x_final > span:
            raise ConfigurationError(
                f"grid.t_max_s: the accelerated trajectory reaches "
                f"{x_final:.4g} m but the backbone only spans {span:.4g} m; "
                "shorten the horizon or reduce the acceleration")


def resolve_tau_max(geo: SceneGeometry, traj: TrajectoryModel, dt_s: float,
                    dy_m: float, dtau_s: float, t_max_s: float) -> float:
    """Delay budget covering the worst-case path with a little headroom."""
    probe = GridSpec.build(dt_s, dy_m, dtau_s, tau_max_s=1.0, t_max_s=t_max_s,
                           disc_radius_m=geo.disc_radius_m,
                           initial_speed_m_per_s=traj.initial_speed_m_per_s)
    max_delay = max_propagation_delay_s(geo, traj, probe)
    return (math.ceil(max_delay * 1.02 / dtau_s) + 2) * dtau_s


def canonical_json(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def load_config(path: str | Path) -> ExperimentConfig:
    with Path(path).open() as f:
        try:
            doc = json.load(f)
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"config is not valid JSON: {exc}") from exc
    return ExperimentConfig.from_dict(doc)


def resolve_workers(cli_value: int | None) -> int:
    env = os.environ.get(WORKERS_ENV_VAR)
    if env is not None:
        try:
            n = int(env)
        except ValueError as exc:
            raise ConfigurationError(
                f"{WORKERS_ENV_VAR} must be an integer") from exc
        return max(1, n)
    if cli_value is not None:
        return max(1, cli_value)
    return 1


# ---------------------------------------------------------------------------
# run orchestration


def _simulate_one(payload: tuple[dict, int, int, bool]) -> dict:
    """Worker body: one seeded realization, both engines as requested."""
    normalized, index, seed, want_grid = payload
    cfg = ExperimentConfig.from_dict(normalized)
    field = sample_field(cfg.grid, cfg.geo, cfg.traj, seed)
    result: dict[str, Any] = {"index": index, "seed": seed}
    if cfg.engine in ("direct", "both"):
        scat = materialize_scatterers(field, cfg.grid, cfg.traj)
        t0 = time.perf_counter()
        h = simulate_direct(cfg.params, cfg.geo, cfg.traj, cfg.grid, scat,
                            include_los=cfg.include_los)
        result["direct_s"] = time.perf_counter() - t0
        result["direct_gains"] = narrowband_gain(h)
        result["direct_power"] = received_power_trace(h)
        if want_grid:
            result["direct_grid"] = h
    if cfg.engine in ("ambit", "both"):
        t0 = time.perf_counter()
        h = simulate_ambit(cfg.params, cfg.geo, cfg.traj, cfg.grid, field,
                           include_los=cfg.include_los)
        result["ambit_s"] = time.perf_counter() - t0
        result["ambit_gains"] = narrowband_gain(h)
        result["ambit_power"] = received_power_trace(h)
        if want_grid:
            result["ambit_grid"] = h
    return result


def run_realizations(config: ExperimentConfig, workers: int = 1) -> list[dict]:
    """All realizations, in index order regardless of worker count."""
    seeds = realization_seeds(config.base_seed, config.realizations)
    payloads = []
    for r in range(config.realizations):
        want_grid = (config.impulse_grids == "all"
                     or (config.impulse_grids == "first" and r == 0))
        payloads.append((config.normalized, r, seeds[r], want_grid))
    if workers <= 1 or config.realizations == 1:
        return [_simulate_one(p) for p in payloads]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_simulate_one, payloads))


@dataclass
class RunManifest:
    """Record of one simulation run: config hash, seeds, timings, files."""

    config_sha256: str
    toolkit_version: str
    base_seed: int
    seeds: list[int]
    engine: str
    realizations: int
    timings: dict
    files: list[dict]

    def to_dict(self) -> dict:
        return {
            "config_sha256": self.config_sha256,
            "toolkit_version": self.toolkit_version,
            "base_seed": self.base_seed,
            "seeds": self.seeds,
            "engine": self.engine,
            "realizations": self.realizations,
            "timings": self.timings,
            "files": self.files,
        }

    def write(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True))

    @classmethod
    def load(cls, path: str | Path) -> "RunManifest":
        doc = json.loads(Path(path).read_text())
        return cls(**{k: doc[k] for k in ("config_sha256", "toolkit_version",
                                          "base_seed", "seeds", "engine",
                                          "realizations", "timings", "files")})

    def verify_artifacts(self, directory: str | Path) -> None:
        missing = [f["name"] for f in self.files
                   if not (Path(directory) / f["name"]).exists()]
        if missing:
            raise InventoryError(f"missing artifacts: {', '.join(missing)}")


def _file_entry(path: Path) -> dict:
    data = path.read_bytes()
    return {"name": path.name, "bytes": len(data),
            "sha256": hashlib.sha256(data).hexdigest()}


def _write_power_csv(path: Path, powers: list[np.ndarray], dt_s: float) -> None:
    with path.open("w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["realization", "time_s", "power"])
        for r, trace in enumerate(powers):
            for k, v in enumerate(trace):
                writer.writerow([r, f"{k * dt_s:.17g}", f"{v:.17g}"])


def _write_gains_csv(path: Path, gains: list[np.ndarray], dt_s: float) -> None:
    with path.open("w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["realization", "time_s", "re", "im"])
        for r, g in enumerate(gains):
            for k, v in enumerate(g):
                writer.writerow([r, f"{k * dt_s:.17g}", f"{v.real:.17g}",
                                 f"{v.imag:.17g}"])


def _write_gains_binary(path: Path, gains: list[np.ndarray]) -> None:
    mat = np.vstack(gains)
    inter = np.empty((mat.shape[0], 2 * mat.shape[1]), dtype="<f8")
    inter[:, 0::2] = mat.real
    inter[:, 1::2] = mat.imag
    inter.tofile(path)
    sidecar = {"layout": "row_major_interleaved_re_im_float64_le",
               "realizations": int(mat.shape[0]),
               "time_steps": int(mat.shape[1])}
    path.with_suffix(path.suffix + ".json").write_text(
        json.dumps(sidecar, indent=2))


def load_gains(directory: str | Path, engine: str) -> np.ndarray:
    """Gain matrix (realizations x time steps) from run artifacts."""
    directory = Path(directory)
    bin_path = directory / f"gains_{engine}.f64"
    if bin_path.exists():
        sidecar = json.loads(
            bin_path.with_suffix(".f64.json").read_text())
        raw = np.fromfile(bin_path, dtype="<f8").reshape(
            sidecar["realizations"], 2 * sidecar["time_steps"])
        return raw[:, 0::2] + 1j * raw[:, 1::2]
    csv_path = directory / f"gains_{engine}.csv"
    if not csv_path.exists():
        raise InventoryError(f"missing artifacts: gains_{engine}.csv")
    rows = np.loadtxt(csv_path, delimiter=",", skiprows=1)
    rows = np.atleast_2d(rows)
    n_real = int(rows[:, 0].max()) + 1
    n_t = rows.shape[0] // n_real
    g = rows[:, 2] + 1j * rows[:, 3]
    return g.reshape(n_real, n_t)


def run_simulation(config: ExperimentConfig, out_dir: str | Path,
                   workers: int = 1) -> RunManifest:
    """Execute the configured run and persist all artifacts plus manifest."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    results = run_realizations(config, workers=workers)
    seeds = [r["seed"] for r in results]
    engines = []
    if config.engine in ("direct", "both"):
        engines.append("direct")
    if config.engine in ("ambit", "both"):
        engines.append("ambit")

    written: list[Path] = []
    timings: dict[str, dict] = {}
    for eng in engines:
        powers = [r[f"{eng}_power"] for r in results]
        gains = [r[f"{eng}_gains"] for r in results]
        p_path = out / f"power_{eng}.csv"
        _write_power_csv(p_path, powers, config.grid.dt_s)
        written.append(p_path)
        if "csv" in config.formats:
            g_path = out / f"gains_{eng}.csv"
            _write_gains_csv(g_path, gains, config.grid.dt_s)
            written.append(g_path)
        if "binary" in config.formats:
            g_path = out / f"gains_{eng}.f64"
            _write_gains_binary(g_path, gains)
            written.append(g_path)
            written.append(g_path.with_suffix(".f64.json"))
        for r in results:
            grid_obj = r.get(f"{eng}_grid")
            if grid_obj is None:
                continue
            if "csv" in config.formats:
                h_path = out / f"impulse_{eng}_r{r['index']}.csv"
                grid_obj.to_csv(h_path)
                written.append(h_path)
            if "binary" in config.formats:
                h_path = out / f"impulse_{eng}_r{r['index']}.f64"
                grid_obj.to_binary(h_path)
                written.append(h_path)
                written.append(h_path.with_suffix(".f64.json"))
        timings[eng] = {str(r["index"]): r[f"{eng}_s"] for r in results}

    config_path = out / "config.json"
    config_path.write_text(json.dumps(config.to_dict(), indent=2, sort_keys=True))
    written.append(config_path)

    manifest = RunManifest(
        config_sha256=config.config_sha256(),
        toolkit_version=__version__,
        base_seed=config.base_seed,
        seeds=seeds,
        engine=config.engine,
        realizations=config.realizations,
        timings=timings,
        files=[_file_entry(p) for p in written],
    )
    manifest.write(out / "manifest.json")
    return manifest


# ---------------------------------------------------------------------------
# CLI command bodies


def cli_validate(config_path: str | Path) -> int:
    cfg = load_config(config_path)
    g = cfg.grid
    print(f"config ok: engine={cfg.engine} realizations={cfg.realizations}")
    print(f"  disc radius {cfg.geo.disc_radius_m:.4g} m, density "
          f"{cfg.geo.scatterer_density_per_m2:.4g} /m^2")
    print(f"  grid: M={g.m_half} N={g.n_half} P={g.p_count} D={g.d_count}")
    print(f"  delay budget {g.d_count * g.dtau_s:.4g} s")
    return 0


def cli_simulate(config_path: str | Path, out_dir: str | Path | None = None,
                 workers: int = 1, seed: int | None = None,
                 formats: tuple[str, ...] | None = None) -> int:
    cfg = load_config(config_path)
    doc = cfg.to_dict()
    if seed is not None:
        doc["run"]["base_seed"] = seed
    if formats:
        doc["output"]["formats"] = list(formats)
    cfg = ExperimentConfig.from_dict(doc)
    target = Path(out_dir) if out_dir is not None else Path(cfg.out_dir)
    manifest = run_simulation(cfg, target, workers=workers)
    print(f"wrote {len(manifest.files)} artifacts to {target}")
    return 0


def cli_stats(manifest_path: str | Path, stats_config_path: str | Path | None,
              out_dir: str | Path | None = None) -> int:
    manifest_path = Path(manifest_path)
    run_dir = manifest_path.parent
    manifest = RunManifest.load(manifest_path)
    manifest.verify_artifacts(run_dir)

    opts = {"engine": None, "anchors_s": [0.0, 1.5, 3.0],
            "max_lag_s": 0.05, "window_s": 0.5}
    if stats_config_path is not None:
        with Path(stats_config_path).open() as f:
            opts.update(json.load(f))
    engine = opts["engine"]
    if engine is None:
        engine = "ambit" if manifest.engine in ("ambit", "both") else "direct"

    cfg_doc = json.loads((run_dir / "config.json").read_text())
    dt = cfg_doc["grid"]["dt_s"]
    t_max = cfg_doc["grid"]["t_max_s"]
    gains = load_gains(run_dir, engine)
    target = Path(out_dir) if out_dir is not None else run_dir

    summary: dict[str, Any] = {"engine": engine,
                               "realizations": manifest.realizations,
                               "anchors": {}}
    for anchor in opts["anchors_s"]:
        if anchor >= t_max:
            raise ConfigurationError(
                f"anchor {anchor} s is beyond the horizon {t_max} s")
        entry: dict[str, float] = {}
        acf = temporal_acf(gains, dt, anchor, opts["max_lag_s"])
        write_acf_csv(acf, target / f"acf_t{anchor:g}.csv")
        entry["coherence_time_s"] = acf.coherence_time_s()
        half = 0.5 * opts["window_s"]
        psd_anchor = min(max(anchor, half), t_max - dt - half)
        psd = doppler_psd(gains, dt, psd_anchor, opts["window_s"])
        write_psd_csv(psd, target / f"psd_t{anchor:g}.csv")
        entry["doppler_edge99_hz"] = psd.mass_edge_hz(0.99)
        entry["psd_anchor_s"] = psd.anchor_time_s
        summary["anchors"][f"{anchor:g}"] = entry
    (target / "stats_summary.json").write_text(
        json.dumps(summary, indent=2, sort_keys=True))
    print(f"stats for {len(opts['anchors_s'])} anchors written to {target}")
    return 0


def cli_bench(config_path: str | Path, out_dir: str | Path | None = None,
              sweep: list[float] | None = None, timing_reps: int = 3) -> int:
    cfg = load_config(config_path)
    if cfg.engine != "both":
        raise ConfigurationError("bench requires run.engine == \"both\"")
    if sweep is None:
        sweep = [100.0, 1000.0, 5000.0]
    target = Path(out_dir) if out_dir is not None else Path(cfg.out_dir)
    target.mkdir(parents=True, exist_ok=True)

    summary = {}
    print(f"{'N_s=R_s':>10} {'runtime median':>16} {'power median dB':>16}")
    for value in sweep:
        doc = cfg.to_dict()
        doc["scene"].pop("disc_radius_m", None)
        doc["scene"].pop("scatterer_density_per_m2", None)
        doc["scene"]["mean_path_count"] = value
        doc["scene"]["path_arrival_rate_per_s"] = value
        doc["grid"]["tau_max_s"] = None
        sweep_cfg = ExperimentConfig.from_dict(doc)
        comp = compare_engines(sweep_cfg.params, sweep_cfg.geo, sweep_cfg.traj,
                               sweep_cfg.grid, sweep_cfg.realizations,
                               sweep_cfg.base_seed,
                               include_los=sweep_cfg.include_los,
                               timing_reps=timing_reps)
        tag = f"{value:g}"
        write_cdf_csv(comp.runtime_ratio, target / f"bench_runtime_cdf_{tag}.csv")
        write_cdf_csv(comp.power_ratio_db, target / f"bench_power_cdf_{tag}.csv")
        summary[tag] = {
            "runtime_ratio_median": comp.runtime_ratio.median,
            "runtime_ratio_std": comp.runtime_ratio.std,
            "power_ratio_median_db": comp.power_ratio_db.median,
            "power_ratio_std_db": comp.power_ratio_db.std,
        }
        print(f"{tag:>10} {comp.runtime_ratio.median:>16.3f} "
              f"{comp.power_ratio_db.median:>16.3f}")
    (target / "bench_summary.json").write_text(
        json.dumps(summary, indent=2, sort_keys=True))
    return 0
