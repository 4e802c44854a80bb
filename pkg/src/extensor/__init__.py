"""Multiform and extensor calculus with metric, connection and gravitation layers."""

from .algebra import (
    Algebra,
    Multiform,
    ReciprocalPair,
    algebra,
    canonical_dot,
    clifford_mul,
    commutator,
    grades_part,
    hat,
    k_part,
    left_contract,
    right_contract,
    tilde,
    wedge,
)
from .calculus import DEFAULT_FD, FDConfig, derivative, derivative_star, directional_derivative, functional_derivative
from .catalog import CATALOG_NAMES, GeometrySpec, catalog_load, chart_valid, load_config
from .errors import (
    ChartError,
    ConfigError,
    DegenerateMetricError,
    DerivativeError,
    DimensionError,
    DomainError,
    ExtensorError,
    GaugeError,
    GradeRangeError,
    InvalidPairError,
    NotSymmetricError,
    SignatureError,
    SingularExtensorError,
)
from .extensors import Extensor, adjoint, apply, compose, determinant, extension, generalization, inverse, trace
from .fields import (
    DistortionField,
    FrameSpec,
    MetricField,
    curvature_at,
    frame_coefficients,
    levi_civita_connection,
    nonmetricity_components,
    torsion_components,
)
from .gravitation import GravityConfig, Sphere, energy_integral, potentials
from .metric import Distortion, HodgeStar, MetricExtensor, eta_standard, factorize_metric, hodge

__version__ = "0.1.0"
