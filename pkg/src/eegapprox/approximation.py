"""Approximation knobs for the Welch estimator.

Three knobs trade accuracy for work: the overlap between consecutive
segments, the FFT (= segment) length, and loop perforation inside each
segment. The discrete level ladder only moves the overlap knob.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from eegapprox.errors import DomainError, InsufficientDataError

FFT_LENGTHS = (256, 512, 1024, 2048)
DEFAULT_FFT_LENGTH = 1024
MAX_OVERLAP = 0.5
MAX_LEVEL = 5


@dataclass(frozen=True)
class ApproxConfig:
    overlap_fraction: float = MAX_OVERLAP
    fft_length: int = DEFAULT_FFT_LENGTH
    perforation_stride: int = 1

    def __post_init__(self):
        if not 0.0 <= self.overlap_fraction <= MAX_OVERLAP:
            raise DomainError(
                f"overlap_fraction must be in [0, {MAX_OVERLAP}], got {self.overlap_fraction}"
            )
        if self.fft_length not in FFT_LENGTHS:
            raise DomainError(f"fft_length must be one of {FFT_LENGTHS}, got {self.fft_length}")
        if int(self.perforation_stride) != self.perforation_stride or self.perforation_stride < 1:
            raise DomainError(f"perforation_stride must be an integer >= 1, got {self.perforation_stride}")


@dataclass(frozen=True)
class SegmentPlan:
    offsets: tuple[int, ...]
    segment_length: int

    def __len__(self):
        return len(self.offsets)


def level_to_config(level: int) -> ApproxConfig:
    """Map a ladder level (0 = accurate) to its configuration.

    Each level removes ten points of overlap from the 50% baseline.
    """
    if isinstance(level, bool) or int(level) != level or not 0 <= level <= MAX_LEVEL:
        raise DomainError(f"approximation level must be an integer in 0..{MAX_LEVEL}, got {level}")
    # (5 - level) / 10 yields the exact decimal literals 0.5, 0.4, ... 0.0
    return ApproxConfig(overlap_fraction=(MAX_LEVEL - int(level)) / 10)


def hop_length(segment_length: int, overlap_fraction: float) -> int:
    """Nominal hop between segment starts, rounded half-up to whole samples."""
    return max(1, int(math.floor(segment_length * (1.0 - overlap_fraction) + 0.5)))


def _check(n: int, w: int, o: float) -> None:
    if w < 1:
        raise DomainError(f"segment length must be positive, got {w}")
    if not 0.0 <= o <= MAX_OVERLAP:
        raise DomainError(f"overlap_fraction must be in [0, {MAX_OVERLAP}], got {o}")
    if n < w:
        raise InsufficientDataError(f"signal of {n} samples is shorter than one {w}-sample segment")


def num_windows(n: int, w: int, o: float) -> int:
    _check(n, w, o)
    if n == w:
        return 1
    return -(-(n - w) // hop_length(w, o)) + 1


def segment_plan(n: int, w: int, o: float) -> SegmentPlan:
    """Start offsets of the segments covering ``n`` samples.

    Offsets advance by the nominal hop; when the last nominal segment stops
    short of the end, one extra segment aligned to the end is appended.
    """
    _check(n, w, o)
    hop = hop_length(w, o)
    offsets = list(range(0, n - w + 1, hop))
    if offsets[-1] != n - w:
        offsets.append(n - w)
    return SegmentPlan(offsets=tuple(offsets), segment_length=w)


def apply_perforation(segment, stride: int) -> np.ndarray:
    """Zero every ``stride``-th sample (indices ``i % stride == stride - 1``)."""
    if int(stride) != stride or stride < 1:
        raise DomainError(f"perforation stride must be an integer >= 1, got {stride}")
    out = np.array(segment, dtype=float, copy=True)
    if stride > 1:
        out[stride - 1 :: stride] = 0.0
    return out
