"""Geodesic flows of extended Schottky groups as suspension flows over countable Markov shifts.

Thermodynamic quantities (pressure, entropy at infinity, phase transitions,
escape of mass) computed on the symbolic model and cross-checked against
the geometry of the Poincare disk.
"""
from .config import RunConfig, load_config, parse_config, three_generator, two_generator
from .hyperbolic import (
    Isometry,
    busemann,
    classify,
    distance,
    from_halfplane,
    hyperbolic_generator,
    parabolic_generator,
)
from .kernels import BACKEND
from .poincare import (
    ExponentEstimate,
    cyclic_exponent,
    delta_p_max,
    group_exponent_bracket,
    subgroup_exponent,
    word_sum_exponent,
)
from .schottky import Arc, GeneratorSpec, SchottkyGroup, check_c5, code_point, roof, validate
from .shift import (
    FiniteSuspension,
    GroupShift,
    TauAffine,
    TruncatedAlphabet,
    gurevich_pressure,
    periodic_pressure,
    spectral_pressure,
    structural_checks,
)
from .suspension import abramov, cusp_constant, escape_sequence, flow_pressure, h_top, kac, s_infinity
from .transitions import PotentialSpecF, detect_t_prime, equilibrium_report, pressure_curve

__version__ = "0.1.0"
