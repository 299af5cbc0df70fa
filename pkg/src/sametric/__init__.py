"""Exactly evaluated strip and disk metrics, hole-blow-ups and compactification probes."""

from .disk import DISK_D, DISK_D_TWISTED, ORIGIN, DiskPoint, d_disk, d_disk_twisted, disk_point
from .metric import AxiomReport, DomainError, MetricDescriptor, SampleConfig, check_boundedness, check_metric_axioms, eval_metric
from .registry import SPACES, get_space
from .scalar import Mode, rational
from .strip import PHI, STRIP_DX, STRIP_DX_TWISTED, StripPoint, TwistFn, d_strip, d_strip_twisted, phi

__version__ = "0.1.0"

__all__ = [
    "AxiomReport", "DISK_D", "DISK_D_TWISTED", "DiskPoint", "DomainError", "MetricDescriptor", "Mode", "ORIGIN",
    "PHI", "SPACES", "STRIP_DX", "STRIP_DX_TWISTED", "SampleConfig", "StripPoint", "TwistFn", "check_boundedness",
    "check_metric_axioms", "d_disk", "d_disk_twisted", "d_strip", "d_strip_twisted", "disk_point", "eval_metric",
    "get_space", "phi", "rational",
]
