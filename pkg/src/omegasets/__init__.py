"""Constructive statistical omega-limit sets, entropy bounds and shadowing on shift spaces."""

__version__ = "0.1.0"

from .birkhoff import Observable, birkhoff_bounds, irregular_witness, level_entropy
from .densities import (FinitePrefix, GeometricPattern, PeriodicPattern, density_profile,
                        is_syndetic)
from .entropy import (katok_entropy_estimate, separated_count, sft_entropy,
                      word_count_entropy, family_entropy_bound)
from .limitsets import (ALL_LABELS, CaseLabel, MeasurePolyline, classify_case, omega_limit,
                        statistical_omegas, syndetic_center, vf_limits)
from .measures import MarkovMeasure, Mixture, PeriodicMeasure, dirac, rho, weak_star_distance
from .schedule import (BlockSchedule, Marker, MarkovGenerator, PeriodicGenerator, Phase,
                       Template, schedule_prefix)
from .shadowing import (ShiftPseudoOrbit, doubling_coding, shadow_doubling, shadow_shift)
from .subshifts import SubshiftDescr, compare
from .synthesis import (SynthesisConfig, build_saturated_schedule, entropy_dense_horseshoe,
                        omega_realizer, realize_case, verify_certificate)
from .words import BlockSft, SftDescr

__all__ = [name for name in dir() if not name.startswith("_")]
