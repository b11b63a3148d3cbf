"""Shared fixtures: small models reused across test modules."""

import pytest

from pathdecomp import GridModel, Model, PhysicalParams, PotentialSpec, RegionSpec


@pytest.fixture(scope="session")
def small_grid():
    return GridModel(64, -20.0, 20.0)


@pytest.fixture(scope="session")
def small_free_model(small_grid):
    return Model.build(small_grid, PhysicalParams(1.0, 1.0, 0.0))


@pytest.fixture(scope="session")
def small_harmonic_model(small_grid):
    return Model.build(
        small_grid, PhysicalParams(1.0, 1.0, 1.0), PotentialSpec("harmonic")
    )


@pytest.fixture(scope="session")
def medium_grid():
    return GridModel(256, -20.0, 20.0)


@pytest.fixture(scope="session")
def medium_free_model(medium_grid):
    return Model.build(medium_grid, PhysicalParams(1.0, 1.0, 0.0))


@pytest.fixture(scope="session")
def half_line_region():
    return RegionSpec(basis="position", boundary=0.0)
