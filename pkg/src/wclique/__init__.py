"""Detection of a planted subset with its own edge-weight law in a weighted complete graph."""

from ._backend import get_backend, set_backend
from .detectors import (
    DETECTORS,
    Decision,
    TestVerdict,
    exact_lrt,
    interval_scan_test,
    make_detector,
    min_test,
    scan_test,
    spectral_test_T1,
    spectral_test_T2,
    support_test,
)
from .distributions import Distribution, DistributionPair, RealSet, make_pair, named_pair, parse_pair_spec
from .divergences import DivergenceReport, divergences
from .model import PlantedInstance, WeightedGraph, read_instance, sample_null, sample_planted, write_instance
from .risk import RiskEstimate, ThresholdReport, estimate_risk, exact_lrt_risk, second_moment, thresholds

__version__ = "0.1.0"

__all__ = [
    "DETECTORS",
    "Decision",
    "Distribution",
    "DistributionPair",
    "DivergenceReport",
    "PlantedInstance",
    "RealSet",
    "RiskEstimate",
    "TestVerdict",
    "ThresholdReport",
    "WeightedGraph",
    "divergences",
    "estimate_risk",
    "exact_lrt",
    "exact_lrt_risk",
    "get_backend",
    "interval_scan_test",
    "make_detector",
    "min_test",
    "named_pair",
    "parse_pair_spec",
    "read_instance",
    "sample_null",
    "sample_planted",
    "scan_test",
    "second_moment",
    "set_backend",
    "spectral_test_T1",
    "spectral_test_T2",
    "support_test",
    "thresholds",
    "write_instance",
]
