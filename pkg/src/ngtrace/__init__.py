"""Estimating traces of density-operator powers from a few low-order moments."""
from .exact import (
    PowerSumSeries,
    Spectrum,
    SymmetricPolys,
    exact_trace_power,
    extend_series,
    newton_girard,
    power_sums,
)
from .estimation import (
    EstimateSeries,
    EstimationConfig,
    effective_rank,
    effective_rank_alt,
    required_runs,
    run_algorithm1,
    sample_trace_power,
)
from .observables import ObservableWeights, observable_power_sums, run_algorithm2
from .multistate import StatePair, cross_trace, run_algorithm3

__version__ = "0.1.0"
