"""Growth models for dynamic random graphs.

A model is a rule for how vertex t attaches to the existing graph. The
graph starts as vertex 1 carrying m self-loops (degree 2m), and every
arrival t >= 2 draws m targets among {1, ..., t-1}, independently given
the previous snapshot. Supported mechanisms:

  pa         linear preferential attachment, P(v) = deg(v) / (2mt)
  uniform    uniform attachment, P(v) = 1/t
  affine-pa  degree plus constant shift, P(v) = (deg(v) + a) / (2mt + at)

All three factor through the degree of the candidate vertex, change at
most 2m vertex degrees per step, and have a power-law probability
spectrum, so they sit inside the model class the test targets.

A trajectory is stored as the (n-1) x m array of attachment choices; the
graph at any time is recovered by replay. Vertices are 1-indexed in all
public structures; arrays are 0-indexed internally (degrees[v-1]).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .rng import stream

KIND_PA = "pa"
KIND_UNIFORM = "uniform"
KIND_AFFINE = "affine-pa"

_KINDS = (KIND_PA, KIND_UNIFORM, KIND_AFFINE)

# Sum-to-one tolerance for conditional attachment distributions.
PROB_SUM_TOL = 1e-12


@dataclass(frozen=True)
class ModelSpec:
    """A named growth mechanism with its parameters.

    m is the number of edges per arriving vertex (all mechanisms); a is
    the additive degree shift (affine-pa only). The label is cosmetic and
    excluded from equality.
    """

    kind: str
    m: int = 1
    a: float = 0.0
    label: str = field(default="", compare=False)

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown model kind {self.kind!r}")
        if self.m < 1:
            raise ValueError("m must be a positive integer")
        if self.a < 0:
            raise ValueError("a must be nonnegative")
        if self.kind != KIND_AFFINE and self.a != 0.0:
            raise ValueError("a is only meaningful for affine-pa")
        if not self.label:
            object.__setattr__(self, "label", self._default_label())

    def _default_label(self) -> str:
        if self.kind == KIND_PA:
            return f"pa(m={self.m})"
        if self.kind == KIND_UNIFORM:
            return f"uniform(m={self.m})"
        return f"affine-pa(a={self.a:g},m={self.m})"

    @property
    def in_class_c(self) -> bool:
        """All supported mechanisms satisfy the testable model-class conditions."""
        return True

    @property
    def churn_bound(self) -> int:
        """Max vertices whose degree changes in one step (2m: m targets + arrival)."""
        return 2 * self.m


def pref_attach(m: int = 1) -> ModelSpec:
    return ModelSpec(KIND_PA, m=m)


def uniform_attach(m: int = 1) -> ModelSpec:
    return ModelSpec(KIND_UNIFORM, m=m)


def affine_pref_attach(a: float, m: int = 1) -> ModelSpec:
    return ModelSpec(KIND_AFFINE, m=m, a=a)


@dataclass
class DegreeState:
    """Degrees of the graph at time t (t vertices present).

    degrees[v-1] is the degree of vertex v. For every mechanism here the
    total degree at time t is exactly 2mt.
    """

    t: int
    degrees: np.ndarray
    total_degree: int

    def copy(self) -> "DegreeState":
        return DegreeState(self.t, self.degrees.copy(), self.total_degree)


@dataclass(frozen=True)
class ProbVector:
    """Conditional attachment distribution for the arrival at time t.

    mass[v-1] = probability that one choice of arrival t goes to vertex v,
    for v in {1, ..., t-1}.
    """

    t: int
    mass: np.ndarray

    def __post_init__(self):
        mass = np.asarray(self.mass, dtype=float)
        object.__setattr__(self, "mass", mass)
        if mass.shape != (self.t - 1,):
            raise ValueError(f"mass must have length t-1 = {self.t - 1}")
        if np.any(mass < 0):
            raise ValueError("negative probability mass")
        total = float(np.sum(mass))
        if abs(total - 1.0) > PROB_SUM_TOL:
            raise ValueError(f"mass sums to {total}, not 1")


@dataclass(frozen=True)
class Trajectory:
    """The full record of attachment choices of one growing graph.

    choices[i] holds the m targets picked by arrival t = i + 2, each in
    {1, ..., t-1}. This is the single observable the test consumes.
    """

    n: int
    m: int
    choices: np.ndarray
    model_label: str
    seed: int

    def __post_init__(self):
        choices = np.ascontiguousarray(self.choices, dtype=np.int64)
        if choices.shape != (self.n - 1, self.m):
            raise ValueError(f"choices must have shape {(self.n - 1, self.m)}")
        if self.n - 1 > 0:
            upper = np.arange(1, self.n, dtype=np.int64)[:, None]  # t-1 per row
            if np.any(choices < 1) or np.any(choices > upper):
                raise ValueError("choice targets must lie in {1, ..., t-1}")
        choices.setflags(write=False)
        object.__setattr__(self, "choices", choices)


def step_distribution(model: ModelSpec, state: DegreeState) -> ProbVector:
    """Conditional distribution of the next arrival's choices given state.

    Returns the distribution for arrival time state.t + 1, over targets
    {1, ..., state.t}.
    """
    t = state.t
    if t < 1:
        raise ValueError("empty graph")
    if model.kind == KIND_PA:
        mass = state.degrees / float(2 * model.m * t)
    elif model.kind == KIND_UNIFORM:
        mass = np.full(t, 1.0 / t)
    else:
        mass = (state.degrees + model.a) / float(2 * model.m * t + model.a * t)
    return ProbVector(t=t + 1, mass=mass)


def initial_state(m: int) -> DegreeState:
    """The one-vertex graph: vertex 1 with m self-loops (degree 2m)."""
    return DegreeState(t=1, degrees=np.array([2 * m], dtype=np.int64), total_degree=2 * m)


class IncrementalReplay:
    """Forward scan of a trajectory, exposing the state at increasing times.

    One pass over the choices, O(m) amortized per step. state() returns a
    view into the internal buffer, valid only until the next advance.
    """

    def __init__(self, traj: Trajectory):
        self.traj = traj
        self._buf = np.zeros(traj.n, dtype=np.int64)
        self._buf[0] = 2 * traj.m
        self.t = 1

    def advance(self, to_t: int) -> None:
        if to_t > self.traj.n:
            raise ValueError(f"t must be in [1, {self.traj.n}]")
        if to_t <= self.t:
            return
        hits = self.traj.choices[self.t - 1 : to_t - 1].ravel()
        self._buf[:to_t] += np.bincount(hits - 1, minlength=to_t)
        self._buf[self.t : to_t] += self.traj.m
        self.t = to_t

    def state(self) -> DegreeState:
        return DegreeState(self.t, self._buf[: self.t], 2 * self.traj.m * self.t)


def sample_trajectory(model: ModelSpec, n: int, seed: int) -> Trajectory:
    """Sample one trajectory of n vertices from the model.

    The m choices of each arrival are drawn iid from the frozen
    distribution of the previous snapshot; degrees update only after the
    whole arrival. Identical (model, n, seed) gives bit-identical output.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    m = model.m
    rng = stream(seed)
    choices = np.empty((n - 1, m), dtype=np.int64)

    if model.kind == KIND_UNIFORM:
        for t in range(2, n + 1):
            choices[t - 2] = rng.integers(1, t, size=m)
        return Trajectory(n, m, choices, model.label, seed)

    # Degree-proportional part sampled from an endpoint urn: each vertex
    # appears once per unit of degree, so a uniform pick is a size-biased pick.
    urn = np.empty(2 * m * n, dtype=np.int64)
    urn[: 2 * m] = 1
    size = 2 * m
    if model.kind == KIND_PA:
        for t in range(2, n + 1):
            targets = urn[rng.integers(0, size, size=m)]
            choices[t - 2] = targets
            urn[size : size + m] = targets
            urn[size + m : size + 2 * m] = t
            size += 2 * m
    else:
        # affine-pa is a fixed-weight mixture of the urn pick (degree part)
        # and a uniform pick: (deg+a)/((2m+a)t) = w*deg/(2mt) + (1-w)/t
        # with w = 2m/(2m+a), independent of t.
        w = 2 * m / (2 * m + model.a)
        for t in range(2, n + 1):
            from_urn = urn[rng.integers(0, size, size=m)]
            from_uniform = rng.integers(1, t, size=m)
            targets = np.where(rng.random(m) < w, from_urn, from_uniform)
            choices[t - 2] = targets
            urn[size : size + m] = targets
            urn[size + m : size + 2 * m] = t
            size += 2 * m
    return Trajectory(n, m, choices, model.label, seed)


def replay(traj: Trajectory, t: int) -> DegreeState:
    """DegreeState of the graph after arrival t (forward replay, O(t*m))."""
    if not 1 <= t <= traj.n:
        raise ValueError(f"t must be in [1, {traj.n}]")
    m = traj.m
    degrees = np.zeros(t, dtype=np.int64)
    degrees[0] = 2 * m
    if t >= 2:
        degrees[1:] = m
        hits = traj.choices[: t - 1].ravel()
        degrees += np.bincount(hits - 1, minlength=t)
    return DegreeState(t=t, degrees=degrees, total_degree=int(degrees.sum()))


# --- trajectory file format (versioned, line oriented) ---

_MAGIC = "dyngof-traj"
_VERSION = "v1"


def write_trajectory(traj: Trajectory, path: str) -> None:
    """Write the v1 text format: header, then one line of targets per arrival."""
    lines = [f"{_MAGIC} {_VERSION} n={traj.n} m={traj.m} model={traj.model_label} seed={traj.seed}"]
    for row in traj.choices:
        lines.append(" ".join(str(int(v)) for v in row))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_trajectory(path: str) -> Trajectory:
    """Parse the v1 format, rejecting malformed headers and out-of-range targets."""
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise ValueError("empty trajectory file")
    head = lines[0].split()
    if len(head) != 6 or head[0] != _MAGIC or head[1] != _VERSION:
        raise ValueError(f"bad trajectory header: {lines[0]!r}")
    fields = {}
    for token in head[2:]:
        key, _, value = token.partition("=")
        fields[key] = value
    try:
        n = int(fields["n"])
        m = int(fields["m"])
        seed = int(fields["seed"])
        label = fields["model"]
    except (KeyError, ValueError) as exc:
        raise ValueError(f"bad trajectory header: {lines[0]!r}") from exc
    body = lines[1:]
    if len(body) != n - 1:
        raise ValueError(f"expected {n - 1} choice lines, found {len(body)}")
    choices = np.empty((n - 1, m), dtype=np.int64)
    for i, line in enumerate(body):
        t = i + 2
        parts = line.split()
        if len(parts) != m:
            raise ValueError(f"arrival {t}: expected {m} targets, found {len(parts)}")
        for j, part in enumerate(parts):
            try:
                v = int(part)
            except ValueError as exc:
                raise ValueError(f"arrival {t}: non-integer target {part!r}") from exc
            if not 1 <= v <= t - 1:
                raise ValueError(f"arrival {t}: target {v} out of range")
            choices[i, j] = v
    return Trajectory(n, m, choices, label, seed)
