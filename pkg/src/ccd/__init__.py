"""Consensus community detection with per-node uncertainty coefficients."""

from .benchgen import (BenchmarkInstance, InfeasibleParameters, erdos_renyi, karate,
                       lfr_like, load_benchmark, ring_of_cliques)
from .consensus import (CcdConfig, ConsensusPartition, CoOccurrenceMatrix, build_cooccurrence,
                        ccd, extract_blocks, apply_outlier_strategy, prune_by_quantile,
                        recursive_consensus)
from .detectors import DetectorConfig, detect, label_propagation, leiden, louvain, walktrap
from .graph import Graph, GraphFormatError, Permutation, permute, read_edge_list, write_edge_list
from .kernels import BACKEND
from .metrics import assess, mixing_parameter, modularity, nmi, pairwise_similarity

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "BenchmarkInstance", "CcdConfig", "CoOccurrenceMatrix", "ConsensusPartition",
    "DetectorConfig", "Graph", "GraphFormatError", "InfeasibleParameters", "Permutation",
    "apply_outlier_strategy", "assess", "build_cooccurrence", "ccd", "detect", "erdos_renyi",
    "extract_blocks", "karate", "label_propagation", "leiden", "lfr_like", "load_benchmark",
    "louvain", "mixing_parameter", "modularity", "nmi", "pairwise_similarity", "permute",
    "prune_by_quantile", "read_edge_list", "recursive_consensus", "ring_of_cliques",
    "walktrap", "write_edge_list",
]
