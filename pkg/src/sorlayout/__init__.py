"""Stress-majorization graph layout with successive over-relaxation."""

from .errors import (
    DisconnectedGraph,
    DuplicateEdge,
    InsufficientTail,
    InvalidSize,
    LayoutError,
    MissingHeader,
    NoConvergence,
    NonFiniteStress,
    ParseError,
    SelfLoop,
    SingularSystem,
    UnsupportedDimension,
)
from .graph import Graph, generate_band, generate_grid, shortest_path_distances, validate_connected
from .layout import (
    Enumerating,
    Fixed,
    IterationTrace,
    LayoutConfig,
    NonSOR,
    Probabilistic,
    choose_omega,
    init_placement,
    run_layout,
    sor_combine,
)
from .stress import default_weights, dominant_value, iteration_laplacian, stress, weight_laplacian

__version__ = "0.1.0"
