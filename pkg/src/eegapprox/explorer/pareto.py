"""Non-dominated filtering under (power down, performance up, accuracy up)."""
from __future__ import annotations

from typing import Sequence

from eegapprox.errors import DomainError


def objectives(rec) -> tuple[float, float, float]:
    return (rec.power_w, rec.perf_hb_s, rec.accuracy)


def dominates(a: Sequence[float], b: Sequence[float]) -> bool:
    """``a`` is no worse than ``b`` on every axis and differs on at least one."""
    return a[0] <= b[0] and a[1] >= b[1] and a[2] >= b[2] and tuple(a) != tuple(b)


def pareto_indices(points: Sequence[Sequence[float]]) -> list[int]:
    """Indices of the non-dominated ``(power, perf, accuracy)`` points, ascending.

    Points are visited in lexicographic order of (power, -perf, -accuracy);
    anything that dominates a point sorts before it, and by transitivity it
    is enough to test each point against the front built so far.
    """
    if len(points) == 0:
        raise DomainError("pareto front of an empty set")
    pts = [tuple(map(float, p)) for p in points]
    order = sorted(range(len(pts)), key=lambda i: (pts[i][0], -pts[i][1], -pts[i][2]))
    front: list[int] = []
    for i in order:
        p = pts[i]
        if not any(dominates(pts[j], p) for j in front):
            front.append(i)
    return sorted(front)


def pareto_front(records: Sequence) -> list:
    """Non-dominated sweep records, in their original order. Duplicates all survive."""
    return [records[i] for i in pareto_indices([objectives(r) for r in records])]
