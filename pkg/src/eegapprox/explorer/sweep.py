"""Design-space sweep over (cluster, cores, frequency, approximation level)."""
from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from eegapprox.approximation import level_to_config
from eegapprox.errors import DomainError, ParseError, StructureError
from eegapprox.evaluation import Classifier, approximation_accuracy
from eegapprox.explorer.heartbeat import (
    MIN_HEARTBEATS,
    MIN_REPETITIONS,
    ExtractionWorkload,
    HeartbeatPool,
)
from eegapprox.explorer.power import (
    CLUSTERS,
    CORE_COUNTS,
    FREQS_MHZ,
    PlatformConfig,
    PowerModelParams,
    model_power,
)
from eegapprox.signal_io import EegRecord
from eegapprox.spectral import BandProfile

log = logging.getLogger(__name__)

CSV_FIELDS = ("cluster", "cores", "freq_mhz", "level", "power_w", "perf_hb_s", "accuracy", "windows_processed")
REFERENCE_FREQ_MHZ = 1400
# Per-cluster throughput relative to the desk host. 4 x 0.35 > 1 keeps four
# LITTLE cores ahead of one big core.
DEFAULT_CLUSTER_SPEED = {"LITTLE": 0.35, "big": 1.0}


@dataclass(frozen=True)
class SweepRecord:
    platform: PlatformConfig
    level: int
    power_w: float
    perf_hb_s: float
    accuracy: float
    windows_processed: int

    def __post_init__(self):
        if not self.power_w > 0 or not self.perf_hb_s > 0:
            raise DomainError("power_w and perf_hb_s must be positive")
        if not 0.0 <= self.accuracy <= 1.0:
            raise DomainError(f"accuracy must be in [0, 1], got {self.accuracy}")
        if self.windows_processed < 1:
            raise DomainError("windows_processed must be positive")

    def row(self) -> list[str]:
        p = self.platform
        return [
            p.cluster,
            str(p.cores),
            str(p.freq_mhz),
            str(self.level),
            repr(float(self.power_w)),
            repr(float(self.perf_hb_s)),
            repr(float(self.accuracy)),
            str(self.windows_processed),
        ]


@dataclass(frozen=True)
class SweepSettings:
    duration_s: float = 1.0
    repetitions: int = MIN_REPETITIONS
    min_heartbeats: int = MIN_HEARTBEATS
    cluster_speed: dict[str, float] = field(default_factory=lambda: dict(DEFAULT_CLUSTER_SPEED))
    reference_freq_mhz: int = REFERENCE_FREQ_MHZ
    use_labels: bool = False


def default_platforms(
    clusters: Iterable[str] = CLUSTERS,
    cores: Iterable[int] = CORE_COUNTS,
    freqs: Iterable[int] = FREQS_MHZ,
) -> list[PlatformConfig]:
    """Frequency-major grid: for each frequency, LITTLE 1..4 then big 1..4."""
    return [PlatformConfig(c, n, f) for f in freqs for c in clusters for n in cores]


def emulated_perf(host_hb_s: float, p: PlatformConfig, settings: SweepSettings) -> float:
    """Scale a host measurement to a platform: linear in frequency, times the
    cluster speed factor. The desk host has neither DVFS nor heterogeneity."""
    return host_hb_s * (p.freq_mhz / settings.reference_freq_mhz) * settings.cluster_speed[p.cluster]


def run_sweep(
    dataset: EegRecord,
    profile: BandProfile,
    clf: Classifier,
    platforms: Sequence[PlatformConfig],
    levels: Sequence[int],
    params: PowerModelParams,
    settings: SweepSettings | None = None,
    measurements: dict | None = None,
) -> list[SweepRecord]:
    """One record per (platform, level), platform-major.

    Throughput is measured once per (cores, level) with ``cores`` workers and
    reused across clusters and frequencies through :func:`emulated_perf`.
    Measurements run one after another. Pass a dict as ``measurements`` to
    receive the raw :class:`HeartbeatResult` objects keyed by (cores, level).
    """
    settings = settings or SweepSettings()
    if not platforms or not levels:
        raise DomainError("sweep needs at least one platform and one level")
    cfgs = {lv: level_to_config(lv) for lv in levels}
    workload = ExtractionWorkload(dataset, profile)
    base = level_to_config(0)

    acc = {
        lv: approximation_accuracy(dataset, profile, clf, cfg, base, use_labels=settings.use_labels)
        for lv, cfg in cfgs.items()
    }
    windows = {lv: workload.windows_per_pass(cfg) for lv, cfg in cfgs.items()}

    host = {} if measurements is None else measurements
    for n in sorted({p.cores for p in platforms}):
        with HeartbeatPool(workload, n) as pool:
            for lv in levels:
                if (n, lv) in host:
                    continue
                host[(n, lv)] = pool.measure(
                    cfgs[lv], settings.duration_s, settings.repetitions, settings.min_heartbeats
                )
                log.info("cores=%d level=%d: %.1f Hb/s", n, lv, host[(n, lv)].perf_hb_s)

    return [
        SweepRecord(
            platform=p,
            level=lv,
            power_w=model_power(params, p),
            perf_hb_s=emulated_perf(host[(p.cores, lv)].perf_hb_s, p, settings),
            accuracy=acc[lv],
            windows_processed=windows[lv],
        )
        for p in platforms
        for lv in levels
    ]


def format_sweep_csv(records: Iterable[SweepRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for r in records:
        w.writerow(r.row())
    return buf.getvalue()


def parse_sweep_line(line: str, lineno: int = 0) -> SweepRecord:
    cells = next(csv.reader([line]))
    if len(cells) != len(CSV_FIELDS):
        raise StructureError(f"line {lineno}: expected {len(CSV_FIELDS)} columns, got {len(cells)}")
    try:
        return SweepRecord(
            PlatformConfig(cells[0], int(cells[1]), int(cells[2])),
            int(cells[3]),
            float(cells[4]),
            float(cells[5]),
            float(cells[6]),
            int(cells[7]),
        )
    except (ValueError, DomainError) as exc:
        raise ParseError(f"line {lineno}: {exc}") from None


def read_sweep_lines(text: str) -> tuple[str, list[tuple[str, SweepRecord]]]:
    """Split a sweep CSV into its header line and ``(raw_line, record)`` pairs.

    Raw lines are kept verbatim so filtered output stays byte-equal.
    """
    lines = text.splitlines(keepends=True)
    if not lines:
        raise StructureError("empty sweep file")
    header = lines[0]
    if tuple(c.strip() for c in header.strip().split(",")) != CSV_FIELDS:
        raise StructureError(f"sweep header must be {','.join(CSV_FIELDS)}")
    rows = []
    for lineno, line in enumerate(lines[1:], 2):
        if not line.strip():
            continue
        rows.append((line, parse_sweep_line(line.rstrip("\r\n"), lineno)))
    return header, rows
