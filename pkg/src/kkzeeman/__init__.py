"""Kaluza-Klein bundle geodesics, projected charged dynamics, and the
charged-polygonal curve classifier."""

__version__ = "0.1.0"

from . import (
    basegeom,
    bundle,
    classifier,
    dynamics,
    gaugefield,
    io,
    liealg,
    transforms,
)
from .errors import (
    ChartDomainError,
    ConfigError,
    GeometryError,
    IntegrationError,
    InvalidInputError,
    KKError,
    LiftError,
    RejectedSegmentError,
    ScenarioError,
)
from .gaugefield import GaugeFieldConfig, scenario
from .trajectory import BundleTrajectory, Trajectory
