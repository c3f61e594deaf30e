"""Streaming distribution-shift detection on topology-preserving maps.

High-dimensional samples are projected through a trained map (classic or
scale-invariant), each sample's neuron-distance matrix is summarized into a
scalar, per-chunk Gaussian fits of that scalar are compared with closed-form
KL divergence, and shifts are flagged by an alpha * sigma rule with continual
weight updates on detection.
"""

from driftmap.baseline import (PcaModel, cumulative_hist_distance, fit_pca,
                               ks_statistic, project)
from driftmap.detector import (DetectorConfig, DriftMonitor, MonitorSignal,
                               ShiftEvent, cl_update, decide, run_monitor)
from driftmap.divergence import DiscretePmf, kl_discrete, kl_gaussian
from driftmap.embedding import (GaussianSummary, MomentVector, chunk_summary,
                                compute_moments, distance_matrix,
                                sample_statistic, sample_statistics)
from driftmap.evaluate import (DetectionReport, detection_report, grid_search,
                               kappa, tolerant_align)
from driftmap.kernels import BACKEND as KERNEL_BACKEND
from driftmap.maps import (FeatureMap, GridSpec, TrainSchedule, find_winner,
                           init_map, load_map, neighborhood,
                           quantization_error, save_map, sim_update,
                           som_update, train)
from driftmap.stream import (Chunk, GroundTruth, Regime, StreamSpec,
                             generate_stream, interleave_datasets, read_chunks)

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "Chunk", "DetectionReport", "DetectorConfig", "DiscretePmf",
    "DriftMonitor", "FeatureMap", "GaussianSummary", "GridSpec", "GroundTruth",
    "KERNEL_BACKEND", "MomentVector", "MonitorSignal", "PcaModel", "Regime",
    "ShiftEvent", "StreamSpec", "TrainSchedule", "chunk_summary", "cl_update",
    "compute_moments", "cumulative_hist_distance", "decide", "detection_report",
    "distance_matrix", "find_winner", "fit_pca", "generate_stream",
    "grid_search", "init_map", "interleave_datasets", "kappa", "kl_discrete",
    "kl_gaussian", "ks_statistic", "load_map", "neighborhood", "project",
    "quantization_error", "read_chunks", "run_monitor", "sample_statistic",
    "sample_statistics", "save_map", "sim_update", "som_update",
    "tolerant_align", "train",
]
