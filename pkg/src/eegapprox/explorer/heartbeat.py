"""Throughput measurement in heartbeats per second.

One heartbeat fires each time a per-epoch feature vector is completed.
Worker processes stand in for the cores a workload is mapped to.
"""
from __future__ import annotations

import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from eegapprox.approximation import ApproxConfig, num_windows
from eegapprox.errors import DomainError, InsufficientMeasurementError
from eegapprox.signal_io import EegRecord
from eegapprox.spectral import BandProfile, epoch_features

MIN_HEARTBEATS = 50
MIN_REPETITIONS = 3


@dataclass(frozen=True, eq=False)
class ExtractionWorkload:
    """Per-epoch band-power extraction over a dataset."""

    record: EegRecord
    profile: BandProfile

    @property
    def n_epochs(self) -> int:
        return len(self.record.epochs())

    def run(self, index: int, cfg: ApproxConfig) -> np.ndarray:
        return epoch_features(self.record, index, self.profile, cfg).flat

    def windows_per_pass(self, cfg: ApproxConfig) -> int:
        return sum(
            num_windows(b - a, cfg.fft_length, cfg.overlap_fraction) for a, b in self.record.epochs()
        ) * self.record.n_channels


@dataclass(frozen=True)
class HeartbeatResult:
    perf_hb_s: float  # median over repetitions
    rates: tuple[float, ...]
    heartbeats: tuple[int, ...]
    workers: int


_workload: ExtractionWorkload | None = None


def _init_worker(workload: ExtractionWorkload) -> None:
    global _workload
    _workload = workload


def _timed_loop(cfg: ApproxConfig, start_at: float, duration_s: float, first: int) -> tuple[int, float, float]:
    """Extract epochs back to back from ``start_at`` until the deadline.

    Returns (heartbeats, first start, last completion) on the shared
    monotonic clock.
    """
    n = _workload.n_epochs
    while time.perf_counter() < start_at:
        time.sleep(min(0.001, max(0.0, start_at - time.perf_counter())))
    t0 = time.perf_counter()
    deadline = t0 + duration_s
    beats = 0
    i = first
    now = t0
    while now < deadline:
        _workload.run(i % n, cfg)
        beats += 1
        i += 1
        now = time.perf_counter()
    return beats, t0, now


class HeartbeatPool:
    """A warm pool of ``workers`` processes bound to one workload.

    Each worker counts its own heartbeats inside a common time slot, so no
    inter-process traffic happens per heartbeat. The rate is the total count
    over the slot from the earliest start to the latest completion.
    """

    START_DELAY_S = 0.02

    def __init__(self, workload: ExtractionWorkload, workers: int):
        if workers < 1:
            raise DomainError(f"workers must be >= 1, got {workers}")
        if workload.n_epochs < 1:
            raise DomainError("workload has no complete epoch")
        self.workload = workload
        self.workers = workers
        self._pool = ProcessPoolExecutor(workers, initializer=_init_worker, initargs=(workload,))

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def close(self):
        self._pool.shutdown(wait=True)

    def _slot(self, cfg: ApproxConfig, duration_s: float) -> tuple[int, float]:
        start_at = time.perf_counter() + self.START_DELAY_S
        stride = max(1, self.workload.n_epochs // self.workers)
        futs = [
            self._pool.submit(_timed_loop, cfg, start_at, duration_s, k * stride)
            for k in range(self.workers)
        ]
        parts = [f.result() for f in futs]
        beats = sum(p[0] for p in parts)
        elapsed = max(p[2] for p in parts) - min(p[1] for p in parts)
        return beats, elapsed

    def measure_many(
        self,
        cfgs: Sequence[ApproxConfig],
        duration_s: float,
        repetitions: int = MIN_REPETITIONS,
        min_heartbeats: int = MIN_HEARTBEATS,
        warmup_s: float = 0.05,
    ) -> list[HeartbeatResult]:
        """Measure several configs with their repetitions interleaved, so slow
        drift of the host's speed affects every config alike."""
        if repetitions < MIN_REPETITIONS:
            raise DomainError(f"need at least {MIN_REPETITIONS} repetitions, got {repetitions}")
        if not duration_s > 0:
            raise DomainError(f"duration must be positive, got {duration_s}")
        for cfg in cfgs:
            self._slot(cfg, warmup_s)
        rates = [[] for _ in cfgs]
        beats = [[] for _ in cfgs]
        for rep in range(repetitions):
            # serpentine order cancels linear drift over each pair of passes
            order = range(len(cfgs)) if rep % 2 == 0 else reversed(range(len(cfgs)))
            for k in order:
                b, elapsed = self._slot(cfgs[k], duration_s)
                if b < min_heartbeats:
                    raise InsufficientMeasurementError(
                        f"only {b} heartbeats in {elapsed:.3f} s (need >= {min_heartbeats}); "
                        "lengthen the duration or shorten the epochs"
                    )
                rates[k].append(b / elapsed)
                beats[k].append(b)
        return [
            HeartbeatResult(statistics.median(r), tuple(r), tuple(b), self.workers)
            for r, b in zip(rates, beats)
        ]

    def measure(
        self,
        cfg: ApproxConfig,
        duration_s: float,
        repetitions: int = MIN_REPETITIONS,
        min_heartbeats: int = MIN_HEARTBEATS,
    ) -> HeartbeatResult:
        return self.measure_many([cfg], duration_s, repetitions, min_heartbeats)[0]


def run_heartbeat_harness(
    workload: ExtractionWorkload,
    cfg: ApproxConfig,
    workers: int,
    duration_s: float,
    repetitions: int = MIN_REPETITIONS,
    min_heartbeats: int = MIN_HEARTBEATS,
) -> HeartbeatResult:
    with HeartbeatPool(workload, workers) as pool:
        return pool.measure(cfg, duration_s, repetitions, min_heartbeats)
