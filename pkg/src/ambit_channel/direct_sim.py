"""Reference engine: explicit per-scatterer geometry at every time step."""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DelayOverflowError
from .levy_field import ScattererSet
from .scene import ChannelParams, GridSpec, SceneGeometry, TrajectoryModel, mu_position


@dataclass(frozen=True)
class ImpulseResponseGrid:
    """Complex channel gains over (time step, delay bin)."""

    values: np.ndarray
    dt_s: float
    dtau_s: float
    t0_s: float = 0.0

    def __post_init__(self) -> None:
        if self.values.ndim != 2:
            raise ValueError("values must be a 2-D complex matrix")
        if not np.isfinite(self.values).all():
            raise ValueError("impulse response contains non-finite entries")

    @property
    def times_s(self) -> np.ndarray:
        return self.t0_s + self.dt_s * np.arange(self.values.shape[0])

    @property
    def delays_s(self) -> np.ndarray:
        return self.dtau_s * np.arange(self.values.shape[1])

    def to_csv(self, path: str | Path) -> None:
        """Full grid as (time_s, delay_s, re, im) rows."""
        times = self.times_s
        delays = self.delays_s
        with Path(path).open("w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(["time_s", "delay_s", "re", "im"])
            for k, t in enumerate(times):
                row_vals = self.values[k]
                for d, v in zip(delays, row_vals):
                    writer.writerow([f"{t:.17g}", f"{d:.17g}",
                                     f"{v.real:.17g}", f"{v.imag:.17g}"])

    def to_binary(self, path: str | Path) -> None:
        """Column-major dump: per delay bin, down the time axis, interleaved
        (re, im) little-endian float64.  A JSON sidecar records the layout."""
        path = Path(path)
        n_t, n_d = self.values.shape
        planes = np.empty((2 * n_t, n_d), dtype="<f8")
        planes[0::2, :] = self.values.real
        planes[1::2, :] = self.values.imag
        planes.ravel(order="F").tofile(path)
        sidecar = {
            "layout": "column_major_interleaved_re_im_float64_le",
            "time_steps": int(n_t),
            "delay_bins": int(n_d),
            "dt_s": self.dt_s,
            "dtau_s": self.dtau_s,
            "t0_s": self.t0_s,
        }
        path.with_suffix(path.suffix + ".json").write_text(
            json.dumps(sidecar, indent=2))


def delay_bin_index(distance_m: np.ndarray | float, light_speed_m_per_s: float,
                    dtau_s: float) -> np.ndarray:
    """Delay bin by floor quantization; both engines share this rule."""
    return np.floor(np.asarray(distance_m) / (light_speed_m_per_s * dtau_s)
                    ).astype(np.int64)


def simulate_direct(params: ChannelParams, geo: SceneGeometry,
                    traj: TrajectoryModel, grid: GridSpec,
                    scatterers: ScattererSet, include_los: bool = False,
                    t_start_s: float = 0.0) -> ImpulseResponseGrid:
    """Evaluate the channel by per-scatterer ray geometry at every step.

    At each time step the scatterers within one disc radius of the mobile
    are active; each contributes amplitude sqrt(G_s)*weight*d^(-gamma/2)
    with phase k*d, d being the two-leg path length.  Each leg is floor
    quantized to its delay bin separately and the bins add, the same rule
    the convolution engine applies, so the engines place every path in the
    same bin and comparisons isolate the amplitude approximation.  The
    optional line-of-sight term is a single leg with its own reference gain.
    """
    traj.validate_horizon(t_start_s + (grid.p_count - 1) * grid.dt_s)
    n_t, n_d = grid.p_count, grid.d_count
    out = np.zeros((n_t, n_d), dtype=np.complex128)

    radius = geo.disc_radius_m
    gamma = params.path_loss_exponent
    k_wave = params.wave_number_per_m
    amp_ref = np.sqrt(params.ref_gain_scatter)
    c_dtau = params.light_speed_m_per_s * grid.dtau_s

    order = np.argsort(scatterers.x_m, kind="stable")
    xs = scatterers.x_m[order]
    ys = scatterers.y_m[order]
    ws = scatterers.weight[order]
    d_bs = np.hypot(geo.bs_x_m - xs, geo.bs_y_m - ys)
    bins_bs = np.floor(d_bs / c_dtau).astype(np.int64)

    r_sq = radius * radius
    for k in range(n_t):
        t = t_start_s + k * grid.dt_s
        mu_x, mu_y = mu_position(traj, t)
        lo = np.searchsorted(xs, mu_x - radius, side="left")
        hi = np.searchsorted(xs, mu_x + radius, side="right")
        if lo == hi:
            continue
        dx = xs[lo:hi] - mu_x
        dy = ys[lo:hi] - mu_y
        dist_sq = dx * dx + dy * dy
        mask = dist_sq <= r_sq
        if not mask.any():
            continue
        d_mu = np.sqrt(dist_sq[mask])
        d_tot = d_bs[lo:hi][mask] + d_mu
        bins = bins_bs[lo:hi][mask] + np.floor(d_mu / c_dtau).astype(np.int64)
        if bins.max() >= n_d:
            raise DelayOverflowError(
                f"delay bin {int(bins.max())} >= {n_d} at time step {k} "
                f"(t = {t:.6g} s); increase tau_max_s")
        vals = (amp_ref * ws[lo:hi][mask] * d_tot ** (-0.5 * gamma)
                * np.exp(1j * (k_wave * d_tot)))
        out[k, :] = (np.bincount(bins, weights=vals.real, minlength=n_d)
                     + 1j * np.bincount(bins, weights=vals.imag, minlength=n_d))

    if include_los:
        add_los_term(out, params, geo, traj, grid, t_start_s)

    return ImpulseResponseGrid(values=out, dt_s=grid.dt_s, dtau_s=grid.dtau_s,
                               t0_s=t_start_s)


def add_los_term(values: np.ndarray, params: ChannelParams, geo: SceneGeometry,
                 traj: TrajectoryModel, grid: GridSpec,
                 t_start_s: float = 0.0) -> None:
    """Accumulate the line-of-sight path into an impulse-response matrix."""
    n_t, n_d = values.shape
    t = t_start_s + grid.dt_s * np.arange(n_t)
    mu_x = traj.initial_speed_m_per_s * t + 0.5 * traj.acceleration_m_per_s2 * t * t
    d_los = np.hypot(geo.bs_x_m - mu_x, geo.bs_y_m - traj.initial_y_m)
    bins = delay_bin_index(d_los, params.light_speed_m_per_s, grid.dtau_s)
    if bins.max() >= n_d:
        step = int(np.argmax(bins >= n_d))
        raise DelayOverflowError(
            f"line-of-sight delay bin {int(bins.max())} >= {n_d} at time step "
            f"{step}; increase tau_max_s")
    amp = np.sqrt(params.ref_gain_los) * d_los ** (-0.5 * params.path_loss_exponent)
    values[np.arange(n_t), bins] += amp * np.exp(
        1j * params.wave_number_per_m * d_los)


def received_power_trace(h: ImpulseResponseGrid) -> np.ndarray:
    """Received power per time step under unit transmit power."""
    return np.sum(np.abs(h.values) ** 2, axis=1)
