"""Harmony-search maximization of multilevel threshold objectives.

The improvisation loop follows the classic three-rule scheme: with
probability ``hmcr`` a dimension is drawn from harmony memory and, with
probability ``par``, pitch-adjusted by a uniform step of 1..bw up or down;
otherwise the dimension is redrawn uniformly from [1, 254]. Candidates are
repaired to strictly increasing threshold vectors before evaluation, and the
worst memory row is replaced whenever a candidate strictly improves on it,
so the worst value in memory never gets worse.

All randomness comes from numpy's PCG64 generator seeded explicitly, which
makes every search reproducible bit for bit for a given seed.
"""

from dataclasses import dataclass

import numpy as np

from .imagecore import Histogram
from .objectives import (
    MAX_LEVEL,
    MAX_THRESHOLDS,
    MIN_LEVEL,
    OBJECTIVES,
    _kapur_values,
    _otsu_values,
    _tables,
)

__all__ = ["HarmonyParams", "SearchResult", "repair", "hso_maximize", "exhaustive_best"]


@dataclass(frozen=True)
class HarmonyParams:
    """Tuning knobs for the harmony search.

    hms: harmony memory size (number of stored candidate vectors, >= 2).
    hmcr: harmony memory considering rate in [0, 1].
    par: pitch adjusting rate in [0, 1], applied to memory draws.
    bw: maximum pitch step in intensity levels (>= 1).
    max_improvisations: fixed evaluation budget after memory initialization.
    k: number of thresholds per candidate vector (1..8).
    seed: PCG64 seed; fixed seed means a fixed search trajectory.
    """

    hms: int = 20
    hmcr: float = 0.9
    par: float = 0.3
    bw: int = 2
    max_improvisations: int = 2000
    k: int = 3
    seed: int = 0

    def __post_init__(self):
        if self.hms < 2:
            raise ValueError(f"hms must be >= 2, got {self.hms}")
        if not 0.0 <= self.hmcr <= 1.0:
            raise ValueError(f"hmcr must be in [0, 1], got {self.hmcr}")
        if not 0.0 <= self.par <= 1.0:
            raise ValueError(f"par must be in [0, 1], got {self.par}")
        if self.bw < 1:
            raise ValueError(f"bw must be >= 1, got {self.bw}")
        if self.max_improvisations < 1:
            raise ValueError(f"max_improvisations must be >= 1, got {self.max_improvisations}")
        if not 1 <= self.k <= MAX_THRESHOLDS:
            raise ValueError(f"k must be in [1, {MAX_THRESHOLDS}], got {self.k}")


@dataclass(frozen=True)
class SearchResult:
    """Outcome of a threshold search.

    best_value always equals the objective re-evaluated at best; trace, when
    recorded, holds the best-so-far value after each improvisation.
    """

    best: tuple
    best_value: float
    objective: str
    evaluations: int
    trace: tuple = None


def repair(values) -> tuple:
    """Repair an arbitrary integer vector into a valid threshold vector.

    Values are clamped to [1, 254] and sorted; duplicates are resolved by
    bumping the later value up, falling back to pushing earlier values down
    when the ceiling at 254 is hit. The result is strictly increasing.
    """
    v = sorted(min(MAX_LEVEL, max(MIN_LEVEL, int(x))) for x in values)
    if len(v) > MAX_LEVEL - MIN_LEVEL + 1:
        raise ValueError("more thresholds than available levels")
    for i in range(1, len(v)):
        if v[i] <= v[i - 1]:
            v[i] = v[i - 1] + 1
    if v and v[-1] > MAX_LEVEL:
        v[-1] = MAX_LEVEL
        for i in range(len(v) - 2, -1, -1):
            if v[i] >= v[i + 1]:
                v[i] = v[i + 1] - 1
    return tuple(v)


def _resolve_objective(objective):
    """Map an objective name to its function; callables pass through."""
    if callable(objective):
        return getattr(objective, "__name__", "custom"), objective
    try:
        return objective, OBJECTIVES[objective]
    except KeyError:
        raise ValueError(
            f"unknown objective {objective!r}; expected one of {sorted(OBJECTIVES)}"
        ) from None


def _improvise(rng, memory, params: HarmonyParams) -> tuple:
    """Draw one candidate vector using the three improvisation rules."""
    cand = []
    for d in range(params.k):
        if rng.random() < params.hmcr:
            x = memory[int(rng.integers(len(memory)))][d]
            if rng.random() < params.par:
                step = int(rng.integers(1, params.bw + 1))
                if rng.random() < 0.5:
                    step = -step
                x += step
        else:
            x = int(rng.integers(MIN_LEVEL, MAX_LEVEL + 1))
        cand.append(x)
    return repair(cand)


def _consider_replacement(memory, values, worst, cand, value):
    """Replace the worst memory row when the candidate strictly improves it.

    Returns the index of the new worst row. Because replacement only happens
    on strict improvement, the worst value in memory never decreases in
    quality.
    """
    if value > values[worst]:
        memory[worst] = cand
        values[worst] = value
        worst = min(range(len(values)), key=values.__getitem__)
    return worst


def _better(value, vector, best_value, best_vector):
    """Strictly larger value wins; equal values prefer the smaller vector."""
    if value > best_value:
        return True
    return value == best_value and (best_vector is None or vector < best_vector)


def hso_maximize(hist: Histogram, objective="otsu", params: HarmonyParams = None, *, trace=False) -> SearchResult:
    """Maximize a histogram objective over threshold vectors by harmony search.

    Runs exactly ``hms + max_improvisations`` objective evaluations and
    terminates on the fixed budget. Deterministic for a fixed seed.
    """
    if params is None:
        params = HarmonyParams()
    if hist.total == 0:
        raise ValueError("empty histogram: nothing to threshold")
    name, fn = _resolve_objective(objective)
    rng = np.random.Generator(np.random.PCG64(params.seed))

    memory = []
    values = []
    best_vector = None
    best_value = -np.inf
    for _ in range(params.hms):
        cand = repair(rng.integers(MIN_LEVEL, MAX_LEVEL + 1, size=params.k))
        value = fn(hist, cand)
        memory.append(cand)
        values.append(value)
        if _better(value, cand, best_value, best_vector):
            best_vector, best_value = cand, value
    worst = min(range(len(values)), key=values.__getitem__)

    history = [] if trace else None
    for _ in range(params.max_improvisations):
        cand = _improvise(rng, memory, params)
        value = fn(hist, cand)
        worst = _consider_replacement(memory, values, worst, cand, value)
        if _better(value, cand, best_value, best_vector):
            best_vector, best_value = cand, value
        if trace:
            history.append(best_value)

    return SearchResult(
        best=best_vector,
        best_value=float(best_value),
        objective=name,
        evaluations=params.hms + params.max_improvisations,
        trace=tuple(history) if trace else None,
    )


def _scan_values(hist: Histogram, objective, cuts) -> np.ndarray:
    """Vectorized objective values for an (n, k) array of cut rows."""
    cum_p, cum_s, cum_e = _tables(hist)
    if objective == "otsu":
        return _otsu_values(cum_p, cum_s, cuts)
    return _kapur_values(cum_p, cum_e, cuts)


def exhaustive_best(hist: Histogram, objective="otsu", k=1) -> SearchResult:
    """Enumerate every strictly increasing threshold vector (k <= 3).

    Serves as the ground-truth oracle for optimizer quality: vectors are
    enumerated in lexicographic order and ties keep the first (smallest)
    argmax. The reported value is the objective re-evaluated at the argmax.
    """
    name, fn = _resolve_objective(objective)
    if callable(objective):
        raise ValueError("exhaustive_best supports the named objectives only")
    if not 1 <= k <= 3:
        raise ValueError(f"exhaustive enumeration supports k in [1, 3], got {k}")

    levels = np.arange(MIN_LEVEL, MAX_LEVEL + 1, dtype=np.int64)
    evaluations = 0
    if k == 1:
        cuts = levels[:, None]
        vals = _scan_values(hist, name, cuts)
        evaluations = len(vals)
        best = (int(levels[int(np.argmax(vals))]),)
    elif k == 2:
        i, j = np.triu_indices(len(levels), k=1)
        cuts = np.stack([levels[i], levels[j]], axis=1)
        vals = _scan_values(hist, name, cuts)
        evaluations = len(vals)
        at = int(np.argmax(vals))
        best = (int(cuts[at, 0]), int(cuts[at, 1]))
    else:
        best = None
        best_value = -np.inf
        for t1 in range(MIN_LEVEL, MAX_LEVEL - 1):
            rest = np.arange(t1 + 1, MAX_LEVEL + 1, dtype=np.int64)
            i, j = np.triu_indices(len(rest), k=1)
            cuts = np.empty((len(i), 3), dtype=np.int64)
            cuts[:, 0] = t1
            cuts[:, 1] = rest[i]
            cuts[:, 2] = rest[j]
            vals = _scan_values(hist, name, cuts)
            evaluations += len(vals)
            at = int(np.argmax(vals))
            if vals[at] > best_value:
                best_value = vals[at]
                best = (t1, int(cuts[at, 1]), int(cuts[at, 2]))

    return SearchResult(
        best=best,
        best_value=fn(hist, best),
        objective=name,
        evaluations=evaluations,
        trace=None,
    )
