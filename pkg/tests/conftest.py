import math

import numpy as np
import pytest

import spherecurve as sc


@pytest.fixture(scope="session")
def tol():
    # smaller grids keep the unit suite fast; acceptance re-runs at defaults
    return sc.DEFAULT_TOL.replace(default_n=256, band_k_nodes=512)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20180214)


@pytest.fixture(scope="session")
def bounds_k0():
    return sc.CurvatureBounds(0.0, math.inf)


@pytest.fixture(scope="session")
def neither_small():
    # small, fast variant of the three-lobe neither-condensed-nor-diffuse curve
    from spherecurve import factory
    return factory.neither_example(rho0=0.5, n_loops=8, dip=0.2, base_n=512)


@pytest.fixture(scope="session")
def diffuse_curve():
    from spherecurve import factory
    return factory.diffuse_example(kappa0=0.3, n_loops=24)


def random_rotation(rng):
    axis = rng.normal(size=3)
    axis /= np.linalg.norm(axis)
    angle = rng.uniform(0.0, 2.0 * math.pi)
    from spherecurve import sphere
    return sphere.rotation_about(axis, angle)
