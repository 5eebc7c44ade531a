"""Channel observables: anchored temporal ACF, time-varying Doppler PSD,
and the engine-comparison CDFs (runtime ratio, power-ratio error)."""
from __future__ import annotations

import csv
import time
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.fft as sfft
from scipy.signal.windows import hann

from .ambit_sim import simulate_ambit
from .direct_sim import ImpulseResponseGrid, received_power_trace, simulate_direct
from .errors import ConfigurationError, DegenerateAnchorError
from .levy_field import materialize_scatterers, sample_field
from .scene import ChannelParams, GridSpec, SceneGeometry, TrajectoryModel


@dataclass(frozen=True)
class AcfEstimate:
    """Ensemble temporal autocorrelation anchored at one time instant,
    normalized to unity at zero lag."""

    anchor_time_s: float
    lags_s: np.ndarray
    values: np.ndarray
    realization_count: int

    def __post_init__(self) -> None:
        zero = int(np.argmin(np.abs(self.lags_s)))
        if abs(self.values[zero] - 1.0) >= 1e-12:
            raise ConfigurationError("ACF must be 1 at zero lag")
        if np.any(np.abs(self.values) > 1.0 + 1e-9):
            raise ConfigurationError("ACF magnitude exceeds 1")

    def coherence_time_s(self, threshold: float = 0.5) -> float:
        """First positive lag whose magnitude falls below the threshold
        (inf when the magnitude never does within the estimated lags)."""
        pos = self.lags_s > 0
        below = np.abs(self.values[pos]) < threshold
        if not below.any():
            return float("inf")
        return float(self.lags_s[pos][np.argmax(below)])


@dataclass(frozen=True)
class DopplerPsd:
    """Averaged tapered periodogram of the narrowband gain around an anchor."""

    anchor_time_s: float
    freqs_hz: np.ndarray
    psd: np.ndarray
    window_length_s: float

    def __post_init__(self) -> None:
        if np.any(self.psd < 0.0):
            raise ConfigurationError("PSD must be non-negative")
        if not np.allclose(self.freqs_hz, -self.freqs_hz[::-1], atol=1e-9):
            raise ConfigurationError("frequency axis must be symmetric about 0")

    def mass_edge_hz(self, mass: float = 0.99) -> float:
        """Smallest |f| such that at least the given PSD mass lies within."""
        order = np.argsort(np.abs(self.freqs_hz), kind="stable")
        cum = np.cumsum(self.psd[order])
        total = cum[-1]
        if total <= 0.0:
            raise DegenerateAnchorError("PSD carries no power")
        k = int(np.searchsorted(cum, mass * total))
        return float(np.abs(self.freqs_hz[order][min(k, order.size - 1)]))


@dataclass(frozen=True)
class EmpiricalCdf:
    """Sorted samples with cumulative probabilities and summary stats."""

    values: np.ndarray
    probabilities: np.ndarray
    median: float
    std: float

    @classmethod
    def from_samples(cls, samples: np.ndarray) -> "EmpiricalCdf":
        x = np.sort(np.asarray(samples, dtype=float))
        if x.size == 0:
            raise ConfigurationError("empty sample set")
        probs = np.arange(1, x.size + 1) / x.size
        median = float(np.percentile(x, 50.0, method="inverted_cdf"))
        return cls(values=x, probabilities=probs, median=median,
                   std=float(np.std(x)))


def narrowband_gain(h: ImpulseResponseGrid) -> np.ndarray:
    """Collapse the delay axis: g(t_k) = sum over bins of h(t_k, bin)."""
    return h.values.sum(axis=1)


def temporal_acf(gains: np.ndarray, dt_s: float, anchor_time_s: float,
                 max_lag_s: float, two_sided: bool = False) -> AcfEstimate:
    """Ensemble correlation of the narrowband gain anchored at one instant.

    rho(lag; t0) = <g(t0) conj(g(t0 + lag))> / <|g(t0)|^2>, the averages
    running across realizations.  ``gains`` is (realizations, time steps).
    """
    gains = np.atleast_2d(np.asarray(gains))
    n_real, n_t = gains.shape
    if n_real < 2:
        warnings.warn("ACF estimated from fewer than 2 realizations is "
                      "degenerate", stacklevel=2)
    anchor = int(round(anchor_time_s / dt_s))
    n_lag = int(np.floor(max_lag_s / dt_s))
    lo = -n_lag if two_sided else 0
    if anchor + n_lag >= n_t or anchor + lo < 0:
        raise ConfigurationError("anchor plus max lag falls outside the horizon")
    g0 = gains[:, anchor]
    denom = np.mean(np.abs(g0) ** 2)
    if denom <= 0.0:
        raise DegenerateAnchorError(f"zero power at anchor {anchor_time_s} s")
    lags = np.arange(lo, n_lag + 1)
    vals = np.empty(lags.size, dtype=np.complex128)
    for idx, ell in enumerate(lags):
        vals[idx] = np.mean(g0 * np.conj(gains[:, anchor + ell])) / denom
    return AcfEstimate(anchor_time_s=anchor * dt_s, lags_s=lags * dt_s,
                       values=vals, realization_count=n_real)


def doppler_psd(gains: np.ndarray, dt_s: float, anchor_time_s: float,
                window_length_s: float) -> DopplerPsd:
    """Hann-tapered periodogram centered on the anchor, ensemble averaged.

    The window is rounded to an odd number of samples so the frequency axis
    is symmetric about zero.  Normalization makes the integral of the PSD
    equal the taper-weighted mean power.
    """
    gains = np.atleast_2d(np.asarray(gains))
    n_real, n_t = gains.shape
    n_w = int(round(window_length_s / dt_s))
    if n_w % 2 == 0:
        n_w += 1
    if n_w < 3:
        raise ConfigurationError("window too short for any spectral resolution")
    anchor = int(round(anchor_time_s / dt_s))
    half = n_w // 2
    if anchor - half < 0 or anchor + half >= n_t:
        raise ConfigurationError("window does not fit inside the horizon")
    taper = hann(n_w, sym=True)
    norm = dt_s / np.sum(taper ** 2)
    seg = gains[:, anchor - half:anchor + half + 1] * taper
    spec = sfft.fftshift(sfft.fft(seg, axis=1), axes=1)
    psd = norm * np.mean(np.abs(spec) ** 2, axis=0)
    freqs = sfft.fftshift(sfft.fftfreq(n_w, d=dt_s))
    return DopplerPsd(anchor_time_s=anchor * dt_s, freqs_hz=freqs, psd=psd,
                      window_length_s=n_w * dt_s)


@dataclass(frozen=True)
class EngineComparison:
    """Paired benchmark outcome across realizations."""

    runtime_ratio: EmpiricalCdf
    power_ratio_db: EmpiricalCdf
    direct_seconds: np.ndarray
    ambit_seconds: np.ndarray


def compare_engines(params: ChannelParams, geo: SceneGeometry,
                    traj: TrajectoryModel, grid: GridSpec, realizations: int,
                    base_seed: int, include_los: bool = False,
                    timing_reps: int = 3) -> EngineComparison:
    """Run both engines on identical scatterer realizations.

    Per realization the wall-clock ratio direct/ambit is recorded (best of
    ``timing_reps`` runs each, field sampling excluded), and the per-step
    received-power ratio 10*log10(P_direct / P_ambit) is pooled across steps
    and realizations.
    """
    if realizations < 1:
        raise ConfigurationError("need at least one realization")
    ratios = np.empty(realizations)
    t_direct = np.empty(realizations)
    t_ambit = np.empty(realizations)
    pooled: list[np.ndarray] = []
    seeds = realization_seeds(base_seed, realizations)
    for r in range(realizations):
        field = sample_field(grid, geo, traj, seeds[r])
        scat = materialize_scatterers(field, grid, traj)

        best_d = np.inf
        for _ in range(timing_reps):
            t0 = time.perf_counter()
            h_d = simulate_direct(params, geo, traj, grid, scat,
                                  include_los=include_los)
            best_d = min(best_d, time.perf_counter() - t0)
        best_a = np.inf
        for _ in range(timing_reps):
            t0 = time.perf_counter()
            h_a = simulate_ambit(params, geo, traj, grid, field,
                                 include_los=include_los)
            best_a = min(best_a, time.perf_counter() - t0)

        p_d = received_power_trace(h_d)
        p_a = received_power_trace(h_a)
        both = (p_d > 0.0) & (p_a > 0.0)
        if both.any():
            pooled.append(10.0 * np.log10(p_d[both] / p_a[both]))
        t_direct[r] = best_d
        t_ambit[r] = best_a
        ratios[r] = best_d / best_a
    if not pooled:
        raise DegenerateAnchorError("no time step carried power in both engines")
    return EngineComparison(
        runtime_ratio=EmpiricalCdf.from_samples(ratios),
        power_ratio_db=EmpiricalCdf.from_samples(np.concatenate(pooled)),
        direct_seconds=t_direct,
        ambit_seconds=t_ambit,
    )


def realization_seeds(base_seed: int, count: int) -> list[int]:
    """Independent per-realization seeds derived from one base seed."""
    ss = np.random.SeedSequence(base_seed)
    return [int(child.generate_state(1, np.uint64)[0]) for child in ss.spawn(count)]


def write_acf_csv(est: AcfEstimate, path: str | Path) -> None:
    with Path(path).open("w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["lag_s", "re", "im", "abs"])
        for lag, v in zip(est.lags_s, est.values):
            writer.writerow([f"{lag:.17g}", f"{v.real:.17g}", f"{v.imag:.17g}",
                             f"{abs(v):.17g}"])


def write_psd_csv(est: DopplerPsd, path: str | Path) -> None:
    with Path(path).open("w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["freq_hz", "psd"])
        for fr, p in zip(est.freqs_hz, est.psd):
            writer.writerow([f"{fr:.17g}", f"{p:.17g}"])


def write_cdf_csv(cdf: EmpiricalCdf, path: str | Path) -> None:
    with Path(path).open("w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["value", "prob"])
        for v, p in zip(cdf.values, cdf.probabilities):
            writer.writerow([f"{v:.17g}", f"{p:.17g}"])
