"""slicesim: a deterministic flow-level simulator for end-to-end network slicing.

Model clouds, network functions, slices and services; drive timed service
consumption (slicelets) through a reproducible event engine; and export
metrics, traces and chart data for analysis.
"""

from .engine import Engine, ServiceInstance, TraceRecord, admission_check
from .errors import DeploymentError, ScenarioError, SimulationError, SimulatorError
from .managers import DeployResult, NfManager, Registry, ServiceManager, SliceManager
from .model import (
    Cloud,
    Nf,
    ResourceVector,
    Service,
    Slicelet,
    StaticSlice,
)
from .policy import CloudView, PlacementDecision
from .report import ChartData, MetricsSummary, layered_view, nf_slice_chart, summarize
from .workload import (
    ExplicitEntry,
    ExplicitWorkload,
    PoissonWorkload,
    derive_seed,
    materialize,
    materialize_all,
)

__version__ = "0.1.0"

__all__ = [
    "Cloud",
    "CloudView",
    "ChartData",
    "DeployResult",
    "DeploymentError",
    "Engine",
    "ExplicitEntry",
    "ExplicitWorkload",
    "MetricsSummary",
    "Nf",
    "NfManager",
    "PlacementDecision",
    "PoissonWorkload",
    "Registry",
    "ResourceVector",
    "ScenarioError",
    "Service",
    "ServiceInstance",
    "ServiceManager",
    "SimulationError",
    "SimulatorError",
    "SliceManager",
    "Slicelet",
    "StaticSlice",
    "TraceRecord",
    "admission_check",
    "derive_seed",
    "layered_view",
    "materialize",
    "materialize_all",
    "nf_slice_chart",
    "summarize",
]
