import math

import numpy as np
import pytest

import ambit_channel as ac

V0 = 40.0 / 3.6  # 40 km/h


@pytest.fixture(scope="session")
def params():
    return ac.ChannelParams.from_carrier(2.6e9, 1.7)


@pytest.fixture(scope="session")
def default_geo():
    return ac.SceneGeometry.from_path_stats(-100.0, 20.0, 100.0, 100.0, V0)


@pytest.fixture(scope="session")
def default_traj():
    return ac.TrajectoryModel(V0)


def small_grid(geo, t_max_s=0.5, dt_s=5e-3, dy_m=0.25, dtau_s=1e-9,
               tau_max_s=5e-7):
    return ac.GridSpec.build(dt_s, dy_m, dtau_s, tau_max_s, t_max_s,
                             geo.disc_radius_m, V0)


def single_cell_field(grid, column, lateral_index, count=1, volatility=1.0,
                      cell_area=1.0):
    inc = np.zeros((grid.p_count, 2 * grid.m_half), dtype=np.int64)
    vol = np.zeros_like(inc, dtype=float)
    inc[column, grid.m_half + lateral_index] = count
    vol[column, grid.m_half + lateral_index] = volatility
    return ac.LevyFieldRealization(inc, vol, cell_area, seed=0)


def oracle_grid_dt():
    """Backbone step placing R/(v0*dt) just under an integer so the covering
    guard makes both engines' visibility sets identical."""
    return 2.0 / (math.pi * (128.0 - 1e-8))
