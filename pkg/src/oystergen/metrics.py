"""Mask statistics: binarization, IoU, per-instance pixel counts.

Binary masks are plain (H, W) boolean numpy arrays.
"""

from __future__ import annotations

import numpy as np

from .raster import MaskImage


def binarize(mask: MaskImage) -> np.ndarray:
    """Foreground/background mask: True wherever the label is nonzero."""
    return mask.labels > 0


def iou(a: np.ndarray, b: np.ndarray) -> float:
    """Intersection over union of two boolean masks.

    Defined as 1.0 when both masks are empty (perfect agreement on
    nothing); raises on shape mismatch.
    """
    a = np.asarray(a, dtype=bool)
    b = np.asarray(b, dtype=bool)
    if a.shape != b.shape:
        raise ValueError(f"mask shapes differ: {a.shape} vs {b.shape}")
    union = int(np.logical_or(a, b).sum())
    if union == 0:
        return 1.0
    return int(np.logical_and(a, b).sum()) / union


def instance_pixel_counts(mask: MaskImage) -> dict[int, int]:
    """Exact pixel count per nonzero instance label."""
    labels = mask.labels
    values, counts = np.unique(labels[labels > 0], return_counts=True)
    return {int(v): int(c) for v, c in zip(values, counts)}


def foreground_fraction(mask: MaskImage) -> float:
    """Fraction of pixels covered by any instance."""
    return float(binarize(mask).mean())
