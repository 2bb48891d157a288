"""Quantum-state fidelities and their hyperbolic-triangle geometry."""

from .fidelity import a_fidelity, alt_a_fidelity, bures_fidelity, overlap_g, trace_distance
from .hyperbolic import (
    HyperbolicTriangle,
    Rapidity,
    closed_form_bures,
    closed_form_cos2_half_defect,
    einstein_add,
    geometric_a_fidelity,
    geometric_bures,
    rapidity_of,
    triangle_of,
)
from .metrics import MetricKind, check_metric_axioms, distance
from .sampling import Measure, SamplerSpec, sample_state
from .states import (
    BlochVector,
    DensityMatrix,
    bloch_from_density,
    generator_basis,
    purity,
    qubit_from_bloch,
    qunit_from_bloch,
)

__version__ = "0.1.0"
