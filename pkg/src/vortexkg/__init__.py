"""Vortex-filament models of the wave, Schrodinger and Klein-Gordon equations."""

__version__ = "0.1.0"

from .kernels import BACKEND  # noqa: E402
from .model import (Closure, DerivedParams, HelixSpec, LedgerReport, PhysicalParams,  # noqa: E402
                    derive_params, helix_field_snapshot, mass_coefficient_ledger)
from .fields import (ComplexField, FieldState, Grid1D, KleinGordon, Schrodinger, Wave,  # noqa: E402
                     conserved_quantity, evolve, evolve_spectral, make_grid, step_fd)
from .filament import (Curve3D, discrete_geometry, evolve_lia, make_hasimoto_soliton_curve,  # noqa: E402
                       make_helix_curve, make_line, resample_arclength, step_lia_rk4)
from .induction import (FieldPoint, InducedVelocity, biot_savart_segment_sum,  # noqa: E402
                        perturbation_velocity, small_amplitude_estimate)
from .analysis import (DispersionSample, MeasurementReport, dispersion_scan,  # noqa: E402
                       linearization_consistency, measure_group_velocity, measure_mode_frequency,
                       measure_rotation_rate, measure_soliton_speed)
