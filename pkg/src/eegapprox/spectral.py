"""Windowed spectral analysis: Bartlett-Hann window, radix-2 FFT, Welch PSD,
band powers and per-application feature vectors."""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Sequence

import numpy as np

from eegapprox.approximation import ApproxConfig, apply_perforation, segment_plan
from eegapprox.errors import DomainError, InsufficientDataError, ParseError
from eegapprox.signal_io import EegRecord

BAND_NAMES = ("delta", "theta", "alpha", "beta", "gamma")


def _is_pow2(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


# ---------------------------------------------------------------- window


@dataclass(frozen=True, eq=False)
class WindowCoefficients:
    values: np.ndarray
    kind: str = "bartlett_hanning"

    def __len__(self):
        return len(self.values)


@lru_cache(maxsize=16)
def _bartlett_hanning(length: int) -> np.ndarray:
    x = np.arange(length) / (length - 1) - 0.5
    w = 0.62 - 0.48 * np.abs(x) + 0.38 * np.cos(2 * np.pi * x)
    # fold so the two halves are bit-identical
    w = 0.5 * (w + w[::-1])
    np.clip(w, 0.0, 1.0, out=w)
    w.setflags(write=False)
    return w


def bartlett_hanning(length: int) -> WindowCoefficients:
    if int(length) != length or length < 2 or not _is_pow2(int(length)):
        raise DomainError(f"window length must be a power of two >= 2, got {length}")
    return WindowCoefficients(_bartlett_hanning(int(length)))


# ---------------------------------------------------------------- FFT


@lru_cache(maxsize=32)
def _bit_reverse(n: int) -> np.ndarray:
    bits = n.bit_length() - 1
    idx = np.arange(n)
    rev = np.zeros(n, dtype=np.intp)
    for b in range(bits):
        rev |= ((idx >> b) & 1) << (bits - 1 - b)
    return rev


@lru_cache(maxsize=64)
def _twiddles(size: int, inverse: bool) -> np.ndarray:
    sign = 1.0 if inverse else -1.0
    tw = np.exp(sign * 2j * np.pi * np.arange(size // 2) / size)
    tw.setflags(write=False)
    return tw


def fft(buffer, inverse: bool = False) -> np.ndarray:
    """Iterative radix-2 decimation-in-time FFT along the last axis.

    Forward: ``X[k] = sum_n x[n] exp(-2j pi n k / N)``. The inverse applies
    the ``1/N`` scaling.
    """
    x = np.asarray(buffer, dtype=complex)
    n = x.shape[-1] if x.ndim else 0
    if not _is_pow2(n):
        raise DomainError(f"FFT length must be a power of two, got {n}")
    lead = x.shape[:-1]
    x = x[..., _bit_reverse(n)]
    size = 2
    while size <= n:
        half = size // 2
        blocks = x.reshape(*lead, n // size, size)
        even = blocks[..., :half]
        odd = blocks[..., half:] * _twiddles(size, inverse)
        x = np.concatenate((even + odd, even - odd), axis=-1).reshape(*lead, n)
        size *= 2
    if inverse:
        x = x / n
    return x


# ---------------------------------------------------------------- Welch


@dataclass(frozen=True, eq=False)
class PsdEstimate:
    bin_power: np.ndarray
    bin_width_hz: float
    segments_used: int

    @property
    def frequencies(self) -> np.ndarray:
        return np.arange(len(self.bin_power)) * self.bin_width_hz

    @property
    def nyquist_hz(self) -> float:
        return (len(self.bin_power) - 1) * self.bin_width_hz


def periodogram(segment, window: np.ndarray, sample_rate_hz: float, perforation_stride: int = 1) -> np.ndarray:
    """One-sided periodogram of a single segment, density-scaled."""
    seg = apply_perforation(segment, perforation_stride)
    spec = fft(seg * window)
    w = len(window)
    p = np.abs(spec[: w // 2 + 1]) ** 2 / (sample_rate_hz * np.dot(window, window))
    p[1:-1] *= 2.0
    return p


def welch_psd(signal, cfg: ApproxConfig, sample_rate_hz: float, executor=None) -> PsdEstimate:
    """Average of windowed, overlapped segment periodograms.

    ``executor`` (anything with an order-preserving ``map``) computes the
    per-segment periodograms; the average is taken in segment order either
    way, so the result does not depend on the pool.
    """
    x = np.asarray(signal, dtype=float)
    if x.ndim != 1:
        raise DomainError("welch_psd expects a 1-D signal")
    w = cfg.fft_length
    if x.size < w:
        raise InsufficientDataError(f"signal of {x.size} samples is shorter than one {w}-sample segment")
    plan = segment_plan(x.size, w, cfg.overlap_fraction)
    window = _bartlett_hanning(w)

    def one(offset):
        return periodogram(x[offset : offset + w], window, sample_rate_hz, cfg.perforation_stride)

    mapper = map if executor is None else executor.map
    pgrams = np.stack(list(mapper(one, plan.offsets)))
    return PsdEstimate(pgrams.mean(axis=0), sample_rate_hz / w, len(plan))


def band_mask(psd: PsdEstimate, low_hz: float, high_hz: float) -> np.ndarray:
    if not 0 <= low_hz < high_hz:
        raise DomainError(f"band needs 0 <= low < high, got [{low_hz}, {high_hz})")
    f = psd.frequencies
    return (f >= low_hz) & (f < high_hz)


def band_power(psd: PsdEstimate, low_hz: float, high_hz: float) -> float:
    """PSD mass over bins with centre frequency in ``[low_hz, high_hz)``.

    Bins only reach Nyquist, so an unbounded ``high_hz`` (``inf``) includes
    the Nyquist bin.
    """
    mask = band_mask(psd, low_hz, high_hz)
    return float(psd.bin_power[mask].sum() * psd.bin_width_hz)


# ---------------------------------------------------------------- profiles


@dataclass(frozen=True)
class Band:
    name: str
    low_hz: float
    high_hz: float  # math.inf for open-ended (">30") bands


@dataclass(frozen=True)
class BandProfile:
    application: str
    bands: tuple[Band, ...]

    def __post_init__(self):
        if len(self.bands) != len(BAND_NAMES):
            raise DomainError(f"a band profile needs exactly {len(BAND_NAMES)} bands")
        if tuple(b.name for b in self.bands) != BAND_NAMES:
            raise DomainError(f"bands must be named {', '.join(BAND_NAMES)} in that order")
        for b in self.bands:
            if not 0 <= b.low_hz < b.high_hz:
                raise DomainError(f"band {b.name}: need 0 <= low < high, got [{b.low_hz}, {b.high_hz})")
        lows = [b.low_hz for b in self.bands]
        if lows != sorted(lows):
            raise DomainError("band lower edges must be non-decreasing from delta to gamma")


def _profile(app: str, *edges: tuple[float, float]) -> BandProfile:
    return BandProfile(app, tuple(Band(n, lo, hi) for n, (lo, hi) in zip(BAND_NAMES, edges)))


# Sleep leaves (30, 31) uncovered and stress leaves (10, 14) uncovered; both
# are kept as tabulated.
PROFILES: dict[str, BandProfile] = {
    "seizure": _profile("seizure", (0.5, 2), (2, 6), (6, 8), (8, 30), (30, math.inf)),
    "sleep": _profile("sleep", (0.5, 3.5), (3.5, 7.5), (7.5, 12), (12, 30), (31, math.inf)),
    "stress": _profile("stress", (0, 3.9), (4, 7.9), (8, 10), (14, 29.9), (30, 47)),
}


def load_profile(path) -> BandProfile:
    """Read ``name,low_hz,high_hz`` lines. ``inf``, ``nyquist`` or an empty
    high edge mean the band runs up to Nyquist. ``#`` starts a comment."""
    path = Path(path)
    bands = []
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 3:
            raise ParseError(f"{path}: line {lineno}: expected name,low_hz,high_hz")
        name, lo, hi = parts
        try:
            low = float(lo)
            high = math.inf if hi.lower() in ("", "inf", "nyquist") else float(hi)
        except ValueError:
            raise ParseError(f"{path}: line {lineno}: band edges must be numbers") from None
        bands.append(Band(name.lower(), low, high))
    return BandProfile(path.stem, tuple(bands))


def get_profile(name_or_path: str) -> BandProfile:
    if name_or_path in PROFILES:
        return PROFILES[name_or_path]
    return load_profile(name_or_path)


# ---------------------------------------------------------------- features


@dataclass(frozen=True, eq=False)
class FeatureVector:
    """Band powers, one row of five (delta..gamma) per channel."""

    channel_names: tuple[str, ...]
    values: np.ndarray

    @property
    def flat(self) -> np.ndarray:
        return self.values.ravel()

    def __len__(self):
        return self.values.size


def channel_features(signal, profile: BandProfile, cfg: ApproxConfig, sample_rate_hz: float, executor=None) -> np.ndarray:
    psd = welch_psd(signal, cfg, sample_rate_hz, executor)
    return np.array([band_power(psd, b.low_hz, b.high_hz) for b in profile.bands])


def extract_features(rec: EegRecord, profile: BandProfile, cfg: ApproxConfig, executor=None) -> FeatureVector:
    """Band powers of every channel over the whole record."""
    rows = [channel_features(ch, profile, cfg, rec.sample_rate_hz, executor) for ch in rec.data]
    return FeatureVector(rec.channel_names, np.array(rows))


def epoch_features(rec: EegRecord, index: int, profile: BandProfile, cfg: ApproxConfig, executor=None) -> FeatureVector:
    a, b = rec.epochs()[index]
    rows = [channel_features(ch[a:b], profile, cfg, rec.sample_rate_hz, executor) for ch in rec.data]
    return FeatureVector(rec.channel_names, np.array(rows))


def extract_epoch_features(rec: EegRecord, profile: BandProfile, cfg: ApproxConfig, executor=None) -> list[FeatureVector]:
    """One feature vector per epoch (a single one when ``rec`` has no epochs)."""
    return [epoch_features(rec, i, profile, cfg, executor) for i in range(len(rec.epochs()))]
