"""Transmission through equilateral quantum graphs via path-family sums."""
from .amplitudes import AmplitudePair, VertexSingularityError, delta_amplitudes, nk_amplitudes
from .composer import build_circuit, parallel, parse_circuit, resolve_source, series
from .estimators import ResonanceFinder, SuppressionBandDetector, TransmissionModel
from .graph import (
    CATALOG,
    GraphBuilder,
    GraphError,
    ScatteringGraph,
    build_named,
    degree,
    linear_chain,
    load_graph,
    validate,
)
from .linsolve import SingularMatrixError, solve_linear_system
from .rational import Polynomial, RationalFunction, gcd_reduce, rf_equal, roots
from .scattering import assemble, coefficient, reflection, transmission, transmission_rational
from .spectra import (
    Band,
    Peak,
    Resonance,
    Spectrum,
    difference,
    find_peaks,
    find_poles,
    suppression_bands,
    sweep,
    zero_crossings,
)

__version__ = "0.1.0"
