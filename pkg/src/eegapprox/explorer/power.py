"""Analytic cluster power model standing in for on-board power sensors.

    P = static_w(cluster) + cores * dyn_coeff(cluster) * (freq_mhz / 1000) ** 3

The model does not see the approximation level, so power is level-invariant
by construction.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from eegapprox.errors import DomainError, ParseError

CLUSTERS = ("LITTLE", "big")
CORE_COUNTS = (1, 2, 3, 4)
FREQS_MHZ = (600, 1000, 1400)


@dataclass(frozen=True, order=True)
class PlatformConfig:
    cluster: str
    cores: int
    freq_mhz: int

    def __post_init__(self):
        if self.cluster not in CLUSTERS:
            raise DomainError(f"cluster must be one of {CLUSTERS}, got {self.cluster!r}")
        if self.cores not in CORE_COUNTS:
            raise DomainError(f"cores must be in 1..4, got {self.cores}")
        if self.freq_mhz not in FREQS_MHZ:
            raise DomainError(f"freq_mhz must be one of {FREQS_MHZ}, got {self.freq_mhz}")


@dataclass(frozen=True)
class ClusterPower:
    static_w: float
    dyn_coeff_w_per_mhz3: float  # watts per core at 1 GHz, scaled by (f / 1 GHz)^3
    residual_w: float = 0.0  # RMS calibration misfit


@dataclass(frozen=True)
class PowerModelParams:
    clusters: dict[str, ClusterPower] = field(default_factory=dict)

    def __post_init__(self):
        if set(self.clusters) != set(CLUSTERS):
            raise DomainError(f"power parameters needed for clusters {CLUSTERS}")
        for name, c in self.clusters.items():
            if c.static_w < 0 or c.dyn_coeff_w_per_mhz3 <= 0:
                raise DomainError(
                    f"{name}: need static_w >= 0 and dyn_coeff > 0, got "
                    f"{c.static_w:.4g}, {c.dyn_coeff_w_per_mhz3:.4g}"
                )
        if not self.clusters["big"].dyn_coeff_w_per_mhz3 > self.clusters["LITTLE"].dyn_coeff_w_per_mhz3:
            raise DomainError("big cluster dynamic coefficient must exceed LITTLE's")

    def __getitem__(self, cluster: str) -> ClusterPower:
        return self.clusters[cluster]

    def residuals(self) -> dict[str, float]:
        return {k: v.residual_w for k, v in self.clusters.items()}


def _load(cores: int, freq_mhz: float) -> float:
    return cores * (freq_mhz / 1000.0) ** 3


def model_power(params: PowerModelParams, p: PlatformConfig) -> float:
    c = params[p.cluster]
    return c.static_w + c.dyn_coeff_w_per_mhz3 * _load(p.cores, p.freq_mhz)


def calibrate_power(
    anchors: Sequence[tuple[PlatformConfig, float]], static_w: dict[str, float] | None = None
) -> PowerModelParams:
    """Least-squares fit of (static, dynamic) per cluster to measured anchors.

    With ``static_w`` given for a cluster only the dynamic coefficient is
    fitted, and one anchor suffices for it.
    """
    static_w = static_w or {}
    fitted = {}
    for cluster in CLUSTERS:
        pts = [(p, w) for p, w in anchors if p.cluster == cluster]
        x = np.array([_load(p.cores, p.freq_mhz) for p, _ in pts])
        y = np.array([w for _, w in pts], dtype=float)
        if cluster in static_w:
            if len(pts) < 1:
                raise DomainError(f"{cluster}: no anchors to fit the dynamic coefficient")
            s = float(static_w[cluster])
            c = float(np.dot(x, y - s) / np.dot(x, x))
        else:
            if len(pts) < 2 or len(set(p.freq_mhz for p, _ in pts)) < 2:
                raise DomainError(
                    f"{cluster}: underdetermined, need >= 2 anchors at distinct frequencies"
                )
            a = np.column_stack([np.ones_like(x), x])
            (s, c), *_ = np.linalg.lstsq(a, y, rcond=None)
            s, c = float(s), float(c)
        resid = float(np.sqrt(np.mean((s + c * x - y) ** 2)))
        fitted[cluster] = ClusterPower(s, c, resid)
    return PowerModelParams(fitted)


# Big-cluster anchors are the two quoted board readings (four A15 cores at
# 600 and 1400 MHz). No LITTLE reading is quoted; these are assumed values
# that keep LITTLE well below big at every setting.
DEFAULT_ANCHORS: tuple[tuple[PlatformConfig, float], ...] = (
    (PlatformConfig("big", 4, 600), 1.1),
    (PlatformConfig("big", 4, 1400), 3.0),
    (PlatformConfig("LITTLE", 4, 600), 0.25),
    (PlatformConfig("LITTLE", 4, 1400), 0.55),
)

DEFAULT_PARAMS = calibrate_power(DEFAULT_ANCHORS)


def load_anchors(path) -> list[tuple[PlatformConfig, float]]:
    """Read a ``cluster,cores,freq_mhz,watts`` CSV of calibration anchors."""
    out = []
    with Path(path).open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        missing = {"cluster", "cores", "freq_mhz", "watts"} - set(reader.fieldnames or ())
        if missing:
            raise ParseError(f"{path}: missing columns {sorted(missing)}")
        for lineno, row in enumerate(reader, 2):
            try:
                p = PlatformConfig(row["cluster"].strip(), int(row["cores"]), int(row["freq_mhz"]))
                out.append((p, float(row["watts"])))
            except (ValueError, TypeError) as exc:
                raise ParseError(f"{path}: row {lineno}: {exc}") from None
    return out
