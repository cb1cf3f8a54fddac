"""Codec deepfake source tracing: metrics, score fusion and corpus tooling."""

from taxotrace._core import (
    TraceError,
    balanced_sample_manifest,
    compute_eer,
    confusion,
    fuse_bonafide,
    generate_corpus,
    task_classes,
    weighted_f1,
)

__all__ = [
    "TraceError",
    "balanced_sample_manifest",
    "compute_eer",
    "confusion",
    "fuse_bonafide",
    "generate_corpus",
    "task_classes",
    "weighted_f1",
]
