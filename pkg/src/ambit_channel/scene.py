"""Physical parameters, geometry, trajectory and grid discretization.

All quantities are SI internally (meters, seconds, Hz).  Configuration
ingest converts km/h and GHz before these types are built.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConfigurationError, ParameterDomainError

#: Speed of light in vacuum, m/s.
LIGHT_SPEED_M_PER_S = 2.99792458e8


def isotropic_ref_gain(wavelength_m: float) -> float:
    """Reference power gain of an isotropic antenna pair, (wavelength/4pi)^2."""
    return (wavelength_m / (4.0 * math.pi)) ** 2


@dataclass(frozen=True)
class ChannelParams:
    """Radio constants: carrier, wave number, path loss and reference gains."""

    carrier_frequency_hz: float
    wavelength_m: float
    wave_number_per_m: float
    path_loss_exponent: float
    ref_gain_scatter: float
    ref_gain_los: float
    light_speed_m_per_s: float = LIGHT_SPEED_M_PER_S

    def __post_init__(self) -> None:
        for name in ("carrier_frequency_hz", "wavelength_m", "wave_number_per_m",
                     "path_loss_exponent", "ref_gain_scatter", "ref_gain_los",
                     "light_speed_m_per_s"):
            if getattr(self, name) <= 0.0:
                raise ParameterDomainError(f"{name} must be positive")
        lam = self.light_speed_m_per_s / self.carrier_frequency_hz
        if abs(self.wavelength_m - lam) > 1e-9 * lam:
            raise ConfigurationError("wavelength_m inconsistent with carrier frequency")
        k = 2.0 * math.pi / self.wavelength_m
        if abs(self.wave_number_per_m - k) > 1e-9 * k:
            raise ConfigurationError("wave_number_per_m inconsistent with wavelength")

    @classmethod
    def from_carrier(cls, carrier_frequency_hz: float, path_loss_exponent: float,
                     ref_gain_scatter: float | None = None,
                     ref_gain_los: float | None = None) -> "ChannelParams":
        """Build params from the carrier; gains default to the isotropic value."""
        if carrier_frequency_hz <= 0.0:
            raise ParameterDomainError("carrier_frequency_hz must be positive")
        lam = LIGHT_SPEED_M_PER_S / carrier_frequency_hz
        g_iso = isotropic_ref_gain(lam)
        return cls(
            carrier_frequency_hz=carrier_frequency_hz,
            wavelength_m=lam,
            wave_number_per_m=2.0 * math.pi / lam,
            path_loss_exponent=path_loss_exponent,
            ref_gain_scatter=g_iso if ref_gain_scatter is None else ref_gain_scatter,
            ref_gain_los=g_iso if ref_gain_los is None else ref_gain_los,
        )


@dataclass(frozen=True)
class TrajectoryModel:
    """Straight-line motion along +x with uniform acceleration.

    speed(t) = v0 + a*t, position_x(t) = v0*t + a*t^2/2, lateral position
    fixed at initial_y_m.
    """

    initial_speed_m_per_s: float
    acceleration_m_per_s2: float = 0.0
    initial_y_m: float = 0.0

    def __post_init__(self) -> None:
        if self.initial_speed_m_per_s < 0.0:
            raise ParameterDomainError("initial_speed_m_per_s must be non-negative")

    def speed(self, t: float) -> float:
        return self.initial_speed_m_per_s + self.acceleration_m_per_s2 * t

    def validate_horizon(self, t_max_s: float) -> None:
        """Reject horizons on which the speed would go negative."""
        if self.speed(0.0) < 0.0 or self.speed(t_max_s) < 0.0:
            raise ConfigurationError(
                f"speed becomes negative within the horizon [0, {t_max_s}] s")


def mu_position(traj: TrajectoryModel, t: float) -> tuple[float, float]:
    """Mobile position at time t: (v0*t + a*t^2/2, y_i)."""
    if traj.speed(0.0) < 0.0 or traj.speed(t) < 0.0:
        raise ConfigurationError(f"negative speed on [0, {t}] s")
    x = traj.initial_speed_m_per_s * t + 0.5 * traj.acceleration_m_per_s2 * t * t
    return x, traj.initial_y_m


def euclidean_distance(x1: float, y1: float, x2: float, y2: float) -> float:
    return math.hypot(x1 - x2, y1 - y2)


@dataclass(frozen=True)
class SceneGeometry:
    """Base-station location and the scattering disc statistics.

    Both parameterizations are stored: disc radius R with scatterer density,
    and the equivalent mean path count / path arrival rate.  ``validate``
    checks their consistency; it needs the initial speed, which lives in the
    trajectory.  Zero density describes the degenerate empty scene.
    """

    bs_x_m: float
    bs_y_m: float
    disc_radius_m: float
    scatterer_density_per_m2: float
    mean_path_count: float
    path_arrival_rate_per_s: float

    def __post_init__(self) -> None:
        if self.disc_radius_m <= 0.0:
            raise ParameterDomainError("disc_radius_m must be positive")
        for name in ("scatterer_density_per_m2", "mean_path_count",
                     "path_arrival_rate_per_s"):
            if getattr(self, name) < 0.0:
                raise ParameterDomainError(f"{name} must be non-negative")

    @classmethod
    def from_path_stats(cls, bs_x_m: float, bs_y_m: float, mean_path_count: float,
                        path_arrival_rate_per_s: float,
                        initial_speed_m_per_s: float) -> "SceneGeometry":
        radius, density = derive_geometry(
            mean_path_count, path_arrival_rate_per_s, initial_speed_m_per_s)
        return cls(bs_x_m, bs_y_m, radius, density,
                   mean_path_count, path_arrival_rate_per_s)

    @classmethod
    def from_disc(cls, bs_x_m: float, bs_y_m: float, disc_radius_m: float,
                  scatterer_density_per_m2: float,
                  initial_speed_m_per_s: float) -> "SceneGeometry":
        n_s = scatterer_density_per_m2 * math.pi * disc_radius_m ** 2
        r_s = 2.0 * disc_radius_m * initial_speed_m_per_s * scatterer_density_per_m2
        return cls(bs_x_m, bs_y_m, disc_radius_m, scatterer_density_per_m2, n_s, r_s)

    def validate(self, initial_speed_m_per_s: float, rel_tol: float = 1e-9) -> None:
        """Check the radius/density/count/rate cross relations."""
        if self.mean_path_count > 0.0:
            r = math.sqrt(self.mean_path_count
                          / (self.scatterer_density_per_m2 * math.pi))
            if abs(r - self.disc_radius_m) > rel_tol * self.disc_radius_m:
                raise ConfigurationError("disc radius inconsistent with path count")
        if self.path_arrival_rate_per_s > 0.0:
            lam = self.path_arrival_rate_per_s / (
                2.0 * self.disc_radius_m * initial_speed_m_per_s)
            if abs(lam - self.scatterer_density_per_m2) > \
                    rel_tol * self.scatterer_density_per_m2:
                raise ConfigurationError("density inconsistent with arrival rate")


def derive_geometry(mean_path_count: float, path_arrival_rate_per_s: float,
                    initial_speed_m_per_s: float) -> tuple[float, float]:
    """Disc radius and scatterer density from target multipath statistics.

    Solves R = sqrt(N_s / (lambda_s * pi)) together with
    lambda_s = R_s / (2 R v0), giving R = 2 N_s v0 / (pi R_s).
    """
    if mean_path_count <= 0.0 or path_arrival_rate_per_s <= 0.0 \
            or initial_speed_m_per_s <= 0.0:
        raise ParameterDomainError("mean_path_count, path_arrival_rate_per_s and "
                                   "initial_speed_m_per_s must be positive")
    radius = (2.0 * mean_path_count * initial_speed_m_per_s
              / (math.pi * path_arrival_rate_per_s))
    density = path_arrival_rate_per_s / (2.0 * radius * initial_speed_m_per_s)
    return radius, density


def propagation_distance(geo: SceneGeometry, traj: TrajectoryModel, t: float,
                         scatterer_x_m: float, scatterer_y_m: float) -> float:
    """Two-segment path length: base station to scatterer plus scatterer to MU."""
    mu_x, mu_y = mu_position(traj, t)
    return (euclidean_distance(geo.bs_x_m, geo.bs_y_m, scatterer_x_m, scatterer_y_m)
            + euclidean_distance(mu_x, mu_y, scatterer_x_m, scatterer_y_m))


def _covering_floor(ratio: float, guard: float = 1e-6) -> int:
    """floor(ratio), stepping up when ratio sits within ``guard`` below an
    integer.  Sizing index bounds with a plain floor leaves the cell at
    exactly floor(R/step)*step uncovered on one side of the symmetric offset
    range whenever the step almost divides the radius; taking the covering
    count there keeps both engines' visibility sets identical."""
    base = math.floor(ratio)
    if ratio - base > 1.0 - guard:
        return base + 1
    return base


@dataclass(frozen=True)
class GridSpec:
    """Discretization steps and derived index bounds.

    m_half lateral cells each side, n_half backbone offsets each side,
    p_count time steps and d_count delay bins, all floor expressions of the
    steps against the disc radius, horizon and delay budget.
    """

    dt_s: float
    dy_m: float
    dtau_s: float
    tau_max_s: float
    t_max_s: float
    m_half: int
    n_half: int
    p_count: int
    d_count: int

    def __post_init__(self) -> None:
        for name in ("dt_s", "dy_m", "dtau_s", "tau_max_s", "t_max_s"):
            if getattr(self, name) <= 0.0:
                raise ParameterDomainError(f"{name} must be positive")
        for name in ("m_half", "n_half", "p_count", "d_count"):
            if getattr(self, name) < 1:
                raise ConfigurationError(f"{name} must be at least 1")

    @classmethod
    def build(cls, dt_s: float, dy_m: float, dtau_s: float, tau_max_s: float,
              t_max_s: float, disc_radius_m: float,
              initial_speed_m_per_s: float) -> "GridSpec":
        if initial_speed_m_per_s <= 0.0:
            raise ParameterDomainError("initial_speed_m_per_s must be positive "
                                       "to lay out the backbone grid")
        return cls(
            dt_s=dt_s, dy_m=dy_m, dtau_s=dtau_s,
            tau_max_s=tau_max_s, t_max_s=t_max_s,
            m_half=_covering_floor(disc_radius_m / dy_m),
            n_half=_covering_floor(disc_radius_m
                                   / (initial_speed_m_per_s * dt_s)),
            p_count=math.floor(t_max_s / dt_s),
            d_count=math.floor(tau_max_s / dtau_s),
        )


def max_propagation_delay_s(geo: SceneGeometry, traj: TrajectoryModel,
                            grid: GridSpec) -> float:
    """Upper bound on any path delay realizable on the sampled strip.

    The strip of scatterer cells spans x in [0, (P-1)*v0*dt] and
    y in [y_i - M*dy, y_i + (M-1)*dy]; a contributing path adds at most one
    disc radius of MU-leg on top of the base-station leg.
    """
    v0 = traj.initial_speed_m_per_s
    x_hi = (grid.p_count - 1) * v0 * grid.dt_s
    y_lo = traj.initial_y_m - grid.m_half * grid.dy_m
    y_hi = traj.initial_y_m + (grid.m_half - 1) * grid.dy_m
    corners = [(0.0, y_lo), (0.0, y_hi), (x_hi, y_lo), (x_hi, y_hi)]
    d_bs = max(euclidean_distance(geo.bs_x_m, geo.bs_y_m, x, y) for x, y in corners)
    return (d_bs + geo.disc_radius_m) / LIGHT_SPEED_M_PER_S
