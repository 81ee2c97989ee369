"""Non-stationary sampling estimators and total variation distances.

The estimator treats the attachment choices made during a window of
arrivals [t, t+width) as approximately iid draws from the time-t
conditional distribution, discarding choices that land outside the
vertices {1, ..., t-1} alive before the window. The resulting sparse
empirical measure is compared against a model's conditional distribution
in total variation.

Also provides the pair-counting representation of TV between two discrete
measures: group domain elements by their (p, q) probability pair and sum
N(p, q) * |p - q| / 2. It agrees with the dense formula and is the
executable form of the integral representation used in the analysis.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .models import ProbVector, Trajectory


@dataclass(frozen=True)
class EmpiricalMeasure:
    """Windowed empirical attachment measure at probe time t.

    counts maps vertex -> number of in-window edge choices that targeted
    it (vertices in {1, ..., t-1} only); denom is the total number of
    in-window choices that stayed inside {1, ..., t-1}. With denom > 0 the
    measure is v -> counts[v] / denom, exact in rational arithmetic.
    """

    t: int
    width: int
    counts: dict[int, int]
    denom: int

    def masses(self) -> dict[int, Fraction]:
        """The measure as exact rationals; requires denom > 0."""
        if self.denom == 0:
            raise ValueError("empty empirical measure")
        return {v: Fraction(c, self.denom) for v, c in self.counts.items()}


@dataclass(frozen=True)
class ProbePlan:
    """Sorted probe times r_1 <= ... <= r_M sharing one window width."""

    points: np.ndarray
    width: int

    def __post_init__(self):
        points = np.asarray(self.points, dtype=np.int64)
        object.__setattr__(self, "points", points)
        if points.ndim != 1 or points.size < 1:
            raise ValueError("plan needs at least one probe point")
        if self.width < 1:
            raise ValueError("width must be positive")
        if np.any(np.diff(points) < 0):
            raise ValueError("probe points must be sorted")
        if points[0] < 2:
            raise ValueError("probe points start at 2")

    @property
    def count(self) -> int:
        return int(self.points.size)

    def feasible_for(self, n: int) -> bool:
        return bool(self.points[-1] + self.width <= n + 1)


@dataclass(frozen=True)
class CountingFunction:
    """Sparse map (p, q) -> number of domain elements with that pair.

    Keys are exact rationals where the source measure is exact, otherwise
    floats quantized at 1e-15.
    """

    entries: dict[tuple, int]


def sample_probe_points(n: int, count: int, width: int, rng: np.random.Generator) -> ProbePlan:
    """Draw probe times uniformly with replacement from {2, ..., n+1-width}.

    The range is clipped so every window [r, r+width) fits inside the
    trajectory.
    """
    if count < 1:
        raise ValueError("need at least one probe point")
    if n < width + 2:
        raise ValueError("window exceeds horizon")
    points = np.sort(rng.integers(2, n + 2 - width, size=count))
    return ProbePlan(points=points, width=width)


def empirical_measure(traj: Trajectory, t: int, width: int) -> EmpiricalMeasure:
    """Empirical measure over the window of arrivals h in [t, t+width)."""
    if t < 2 or t + width > traj.n + 1:
        raise ValueError("window out of range")
    flat = traj.choices[t - 2 : t - 2 + width].ravel()
    kept = flat[flat <= t - 1]
    vertices, hits = np.unique(kept, return_counts=True)
    counts = {int(v): int(c) for v, c in zip(vertices, hits)}
    return EmpiricalMeasure(t=t, width=width, counts=counts, denom=int(kept.size))


def tv_distance(emp: EmpiricalMeasure, model_probs: ProbVector) -> float:
    """TV distance between a windowed empirical measure and a model distribution.

    Computed sparsely over the support of the empirical counts; an empty
    window (denom = 0) is reported as the maximal distance 1.
    """
    if emp.t != model_probs.t:
        raise ValueError(f"time mismatch: measure at {emp.t}, distribution at {model_probs.t}")
    if emp.denom == 0:
        return 1.0
    mass = model_probs.mass
    denom = emp.denom
    acc = 1.0
    for v, c in emp.counts.items():
        p = mass[v - 1]
        acc += abs(c / denom - p) - p
    return min(max(0.5 * acc, 0.0), 1.0)


def tv_dense(p: ProbVector, q: ProbVector) -> float:
    """TV distance between two distributions on the same vertex set."""
    if p.t != q.t:
        raise ValueError(f"length mismatch: {p.t - 1} vs {q.t - 1}")
    return min(max(0.5 * float(np.sum(np.abs(p.mass - q.mass))), 0.0), 1.0)


def densify(emp: EmpiricalMeasure) -> ProbVector:
    """The empirical measure as a dense distribution over {1, ..., t-1}."""
    if emp.denom == 0:
        raise ValueError("empty empirical measure")
    mass = np.zeros(emp.t - 1)
    for v, c in emp.counts.items():
        mass[v - 1] = c / emp.denom
    return ProbVector(t=emp.t, mass=mass)


def _quantize(x: float):
    return round(float(x), 15)


def counting_function(p, q: ProbVector) -> CountingFunction:
    """Count domain elements by their (p-probability, q-probability) pair.

    p may be a ProbVector or an EmpiricalMeasure on the same domain as q;
    empirical probabilities are keyed exactly as rationals.
    """
    entries: dict[tuple, int] = {}
    if isinstance(p, EmpiricalMeasure):
        if p.t != q.t:
            raise ValueError(f"domain mismatch: {p.t} vs {q.t}")
        if p.denom == 0:
            raise ValueError("empty empirical measure")
        for v in range(1, q.t):
            key = (Fraction(p.counts.get(v, 0), p.denom), _quantize(q.mass[v - 1]))
            entries[key] = entries.get(key, 0) + 1
    else:
        if p.t != q.t:
            raise ValueError(f"domain mismatch: {p.t} vs {q.t}")
        for pv, qv in zip(p.mass, q.mass):
            key = (_quantize(pv), _quantize(qv))
            entries[key] = entries.get(key, 0) + 1
    return CountingFunction(entries=entries)


def tv_via_counting(cf: CountingFunction) -> float:
    """TV distance recovered from the pair-counting representation."""
    return 0.5 * sum(n * abs(float(p) - float(q)) for (p, q), n in cf.entries.items())
