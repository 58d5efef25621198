"""Deterministic proton transport solver with depth splitting.

Public surface: physics coefficients and materials, grid containers, the
beam model, the transport driver, tallies/metrics, configuration/presets
and the convergence harness.
"""

from .beam import BeamSpec, incident_field
from .config import CatastrophicSpec, RunOutputs, RunSpec, execute, load_config
from .convergence import depth_study, energy_study, observed_order
from .driver import TransportResult, run_transport
from .errors import ConfigError, DataError, DomainError, NumericalError
from .grids import (AngularGrid, DensityField, EnergyGrid, Grids,
                    PhaseSpaceField, SpatialGrid, build_density_field,
                    field_moment, make_grids)
from .physics import (AIR, BONE, WATER, Element, Material, PhysicsTables,
                      build_tables, csda_range, momentum_transfer_xs,
                      stopping_power, straggling_coefficient)
from .presets import PRESETS, get_preset
from .tally import DoseTally, depth_metrics, integrated_depth_dose, spot_sigma

__version__ = "0.1.0"

__all__ = [
    "AIR", "AngularGrid", "BONE", "BeamSpec", "CatastrophicSpec",
    "ConfigError", "DataError", "DensityField", "DomainError", "DoseTally",
    "Element", "EnergyGrid", "Grids", "Material", "NumericalError",
    "PRESETS", "PhaseSpaceField", "PhysicsTables", "RunOutputs", "RunSpec",
    "SpatialGrid", "TransportResult", "WATER", "build_density_field",
    "build_tables", "csda_range", "depth_metrics", "depth_study",
    "energy_study", "execute", "field_moment", "get_preset",
    "incident_field", "integrated_depth_dose", "load_config", "make_grids",
    "momentum_transfer_xs", "observed_order", "run_transport", "spot_sigma",
    "stopping_power", "straggling_coefficient",
]
