"""Poisson count field and Gaussian volatility field on the simulation grid.

Both engines consume the same realization: the convolution engine reads the
cell matrices directly, the reference engine works from the materialized
scatterer list, so any comparison between them sees an identical scattering
environment.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigurationError
from .scene import GridSpec, SceneGeometry, TrajectoryModel


@dataclass(frozen=True)
class LevyFieldRealization:
    """Per-cell Poisson counts and volatility draws.

    Matrices are indexed (time column j, lateral column c) with
    j in [0, P) mapping to x = j*dt*v0 and c in [0, 2M) mapping to the
    lateral offset (c - M)*dy relative to the mobile's track.
    """

    increments: np.ndarray
    volatilities: np.ndarray
    cell_area_m2: float
    seed: int

    def __post_init__(self) -> None:
        if self.increments.shape != self.volatilities.shape:
            raise ConfigurationError("increments and volatilities shapes differ")
        if self.increments.min(initial=0) < 0:
            raise ConfigurationError("negative Poisson increment")


@dataclass(frozen=True)
class ScattererSet:
    """Discrete scatterers at occupied cell corners.

    Cell multiplicity is folded into the weight: weight = count * volatility.
    """

    x_m: np.ndarray
    y_m: np.ndarray
    weight: np.ndarray

    def __len__(self) -> int:
        return self.x_m.size


def sample_field(grid: GridSpec, geo: SceneGeometry, traj: TrajectoryModel,
                 seed: int, volatility_std: float = 1.0) -> LevyFieldRealization:
    """Draw one field realization, deterministic given the seed.

    Counts are Poisson with mean density * v0*dt*dy per cell; volatilities
    are zero-mean Gaussian (unit std unless overridden), one draw per cell,
    independent of the counts.  A counter-based generator keyed on the seed
    keeps realizations reproducible and safe to generate concurrently.
    """
    v0 = traj.initial_speed_m_per_s
    cell_area = v0 * grid.dt_s * grid.dy_m
    if cell_area <= 0.0:
        raise ConfigurationError("cell area v0*dt*dy must be positive")
    shape = (grid.p_count, 2 * grid.m_half)
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    mean = geo.scatterer_density_per_m2 * cell_area
    increments = rng.poisson(mean, size=shape).astype(np.int64)
    volatilities = volatility_std * rng.standard_normal(shape)
    return LevyFieldRealization(increments=increments, volatilities=volatilities,
                                cell_area_m2=cell_area, seed=seed)


def materialize_scatterers(field: LevyFieldRealization, grid: GridSpec,
                           traj: TrajectoryModel) -> ScattererSet:
    """List occupied cells as point scatterers at their cell corners."""
    if field.increments.shape != (grid.p_count, 2 * grid.m_half):
        raise ConfigurationError("field shape does not match the grid")
    j_idx, c_idx = np.nonzero(field.increments)
    v0 = traj.initial_speed_m_per_s
    x = j_idx * (grid.dt_s * v0)
    y = traj.initial_y_m + (c_idx - grid.m_half) * grid.dy_m
    w = field.increments[j_idx, c_idx] * field.volatilities[j_idx, c_idx]
    return ScattererSet(x_m=x, y_m=y, weight=w)


def write_scatterers_csv(scatterers: ScattererSet, path: str | Path) -> None:
    """Debug dump of the scatterer list as (x_m, y_m, weight) rows."""
    with Path(path).open("w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["x_m", "y_m", "weight"])
        for x, y, w in zip(scatterers.x_m, scatterers.y_m, scatterers.weight):
            writer.writerow([f"{x:.17g}", f"{y:.17g}", f"{w:.17g}"])
