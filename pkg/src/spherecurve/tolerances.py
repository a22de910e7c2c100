"""Single tolerance profile threaded explicitly through every module."""

from __future__ import annotations

import dataclasses
import json


@dataclasses.dataclass(frozen=True)
class ToleranceProfile:
    """All numerical knobs in one immutable value.

    The defaults are calibrated for curves sampled at ``default_n`` nodes;
    loosen ``closure`` and ``band_tol`` together if you lower the resolution.
    """

    unit_norm: float = 1e-12          # |q| - 1 after constructors
    orthonormality: float = 1e-10     # frame column defects
    feasibility_margin: float = 1e-9  # epsilon of the hemisphere LP
    closure: float = 1e-7             # frame defect allowed for `closed`
    borderline_margin: float = 1e-4   # |margin| below this => equatorial regime
    antipodal_chord: float = 1e-3     # |p + q| for an antipodal witness
    winding_residual: float = 0.05    # distance to integer turns
    band_tol: float = 5e-3            # good-band width tolerance (radians)
    lattice_size: int = 4096          # Fibonacci directions for barycenters
    default_n: int = 1024             # curve grid intervals
    band_theta_nodes: int = 64        # theta resolution of band grids
    classify_t_nodes: int = 256       # t decimation for classification clouds
    band_k_nodes: int = 2048          # covering-cylinder meridian nodes
    path_steps: int = 65              # frames per homotopy path
    graft_step: float = 0.05          # default simplex graft increment
    continuation_tol: float = 1e-12   # |G - 1| target of the Newton solve
    continuation_max_iter: int = 50
    simplex_budget: int = 2000        # random quadruples before fallback
    import_kappa_slack: float = 1e-6  # clamp width for imported curvature
    seed: int = 2018

    def replace(self, **kw) -> "ToleranceProfile":
        return dataclasses.replace(self, **kw)

    @classmethod
    def from_json(cls, path) -> "ToleranceProfile":
        with open(path) as fh:
            overrides = json.load(fh)
        known = {f.name for f in dataclasses.fields(cls)}
        bad = set(overrides) - known
        if bad:
            raise ValueError(f"unknown tolerance fields: {sorted(bad)}")
        return cls(**overrides)


DEFAULT_TOL = ToleranceProfile()
