"""Forensic detection of CAN masquerade attacks via signal clustering similarity.

The toolkit ingests signal-translated CAN captures, resamples them onto a
common grid, clusters the signals hierarchically from their pairwise Pearson
correlations, scores dendrogram similarity between captures with an
element-centric diffusion measure, and decides benign vs. attack with a
Mann-Whitney U test on the similarity distributions.
"""

from .ingest import RawSignal, SignalCapture, SignalMatrix, parse_capture, resample
from .correlation import CorrelationMatrix, DissimilarityMatrix, pearson_matrix, to_dissimilarity
from .hierarchy import LINKAGES, Dendrogram, agglomerate, cut_at
from .clusim import ElementAffinity, HierarchyParams, SimilarityScore, affinity, level_weights, similarity
from .stats import SimilaritySample, TestResult, attack_vs_benign, benign_pairs, density_export, mann_whitney
from .synth import AttackSpec, SynthSpec, generate, inject, signal_id
from .pipeline import RunConfig, VerdictReport, run, verdict

__all__ = [
    "RawSignal", "SignalCapture", "SignalMatrix", "parse_capture", "resample",
    "CorrelationMatrix", "DissimilarityMatrix", "pearson_matrix", "to_dissimilarity",
    "LINKAGES", "Dendrogram", "agglomerate", "cut_at",
    "ElementAffinity", "HierarchyParams", "SimilarityScore", "affinity", "level_weights", "similarity",
    "SimilaritySample", "TestResult", "attack_vs_benign", "benign_pairs", "density_export", "mann_whitney",
    "AttackSpec", "SynthSpec", "generate", "inject", "signal_id",
    "RunConfig", "VerdictReport", "run", "verdict",
]

__version__ = "0.1.0"
