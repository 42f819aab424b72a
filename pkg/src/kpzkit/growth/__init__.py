"""Lattice growth simulators: TASEP variants and polynuclear growth."""

from .heights import Boundary, HeightFunction, InitialCondition, make_initial
from .png import (
    DropletRegion,
    FlatRegion,
    LineEnsemble,
    NucleationSet,
    PngState,
    droplet_origin_heights,
    flat_origin_heights,
    png_droplet_sample,
    png_evolve,
    png_flat_sample,
    png_multiline,
    sample_droplet_events,
)
from .tasep import (
    Trajectory,
    particle_positions,
    tasep_ct_run,
    tasep_discrete_run,
    tasep_parallel_step,
)

__all__ = [
    "Boundary",
    "HeightFunction",
    "InitialCondition",
    "make_initial",
    "DropletRegion",
    "FlatRegion",
    "LineEnsemble",
    "NucleationSet",
    "PngState",
    "droplet_origin_heights",
    "flat_origin_heights",
    "png_droplet_sample",
    "png_evolve",
    "png_flat_sample",
    "png_multiline",
    "sample_droplet_events",
    "Trajectory",
    "particle_positions",
    "tasep_ct_run",
    "tasep_discrete_run",
    "tasep_parallel_step",
]
