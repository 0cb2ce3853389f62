"""
Correlation-matrix PCA for one disease group.

Eigenvectors come from cyclic Jacobi rotations; each one is sign-oriented
so that repeated runs give bitwise-identical loadings.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from data_ingest import StandardizedMatrix
from errors import (
    ConfigError,
    DimensionMismatch,
    NoConvergence,
    NotSymmetric,
    TooFewRows,
    ZeroVector,
)

logger = logging.getLogger(__name__)

NEGATIVE_EIGEN_TOL = 1e-9
TRACE_TOL = 1e-6

GROUP_PREFIX = {
    "communicable": "CPC",
    "noncommunicable": "NPC",
    "injury": "IPC",
}


@dataclass(frozen=True)
class SymMatrix:
    """A finite, exactly symmetric p x p matrix."""

    entries: np.ndarray

    def __post_init__(self) -> None:
        m = np.array(self.entries, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise NotSymmetric(f"expected a square matrix, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise NotSymmetric("matrix has non-finite entries")
        if not np.array_equal(m, m.T):
            raise NotSymmetric("matrix is not symmetric")
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @property
    def dim(self) -> int:
        return int(self.entries.shape[0])


@dataclass(frozen=True)
class RetentionRule:
    kind: str = "kaiser"
    value: Optional[float] = None

    def __str__(self) -> str:
        if self.kind == "kaiser":
            return "kaiser"
        if self.kind == "fixed":
            return f"fixed={int(self.value)}"
        return f"cumvar={self.value:g}"


KAISER = RetentionRule("kaiser")


@dataclass(frozen=True)
class PcaModel:
    group_id: str
    variables: Tuple[str, ...]
    eigenvalues: np.ndarray
    loadings: np.ndarray
    retained: int
    explained_fraction: np.ndarray
    cumulative_fraction: np.ndarray

    @property
    def p(self) -> int:
        return int(self.eigenvalues.shape[0])


@dataclass(frozen=True)
class ScoreSeries:
    index_id: str
    years: Tuple[int, ...]
    scores: Tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.years) != len(self.scores):
            raise DimensionMismatch(
                f"{self.index_id}: {len(self.years)} years but {len(self.scores)} scores"
            )
        if not all(math.isfinite(s) for s in self.scores):
            raise DimensionMismatch(f"{self.index_id}: non-finite score")


def parse_retention(text: Union[str, RetentionRule, None]) -> RetentionRule:
    """Parse `kaiser`, `cumvar=<f>` or `fixed=<k>`."""
    if text is None:
        return KAISER
    if isinstance(text, RetentionRule):
        return text
    rule = str(text).strip().lower()
    if rule == "kaiser":
        return KAISER
    name, _, arg = rule.partition("=")
    try:
        value = float(int(arg)) if name == "fixed" else float(arg)
    except ValueError:
        value = None
    if name == "cumvar" and value is not None:
        if not 0.0 < value <= 1.0:
            raise ConfigError(f"cumvar fraction must be in (0, 1], got {value}")
        return RetentionRule("cumvar", value)
    if name == "fixed" and value is not None:
        return RetentionRule("fixed", value)
    raise ConfigError(f"unknown retention rule '{text}' (use kaiser, cumvar=<f> or fixed=<k>)")


def correlation_matrix(z: StandardizedMatrix) -> SymMatrix:
    """R = z'z / (n - 1), symmetrized so R[i, j] == R[j, i] exactly."""
    n = z.n_rows
    if n < 3:
        raise TooFewRows(f"correlation needs at least 3 rows, got {n}")
    zz = np.asarray(z.z, dtype=float)
    r = zz.T @ zz / (n - 1)
    r = (r + r.T) / 2.0
    return SymMatrix(r)


def orient_sign(vector: Sequence[float]) -> np.ndarray:
    """Flip the vector so that its largest-magnitude entry is positive."""
    v = np.array(vector, dtype=float)
    if v.size == 0 or not np.any(v):
        raise ZeroVector("cannot orient a zero vector")
    # argmax returns the first maximum, which gives the lowest-index tie break
    i = int(np.argmax(np.abs(v)))
    if v[i] < 0:
        v = -v
    return v


def eigen_decompose(
    m: SymMatrix,
    tol: float = 1e-12,
    max_sweeps: int = 100,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Cyclic Jacobi eigendecomposition of a symmetric matrix.

    Args:
        m: symmetric input
        tol: off-diagonal convergence threshold (scaled by the matrix norm when it exceeds 1)
        max_sweeps: sweep budget

    Returns:
        (eigenvalues, eigenvectors): eigenvalues descending, eigenvectors as
        sign-oriented columns
    """
    a = np.array(m.entries, dtype=float)
    p = a.shape[0]
    v = np.eye(p)
    threshold = tol * max(1.0, float(np.linalg.norm(a)))

    def off_max() -> float:
        if p < 2:
            return 0.0
        return float(np.max(np.abs(a[np.triu_indices(p, k=1)])))

    sweeps = 0
    while off_max() >= threshold:
        if sweeps >= max_sweeps:
            raise NoConvergence(f"Jacobi did not converge within {max_sweeps} sweeps")
        sweeps += 1
        for i in range(p - 1):
            for j in range(i + 1, p):
                apq = a[i, j]
                if apq == 0.0:
                    continue
                theta = (a[j, j] - a[i, i]) / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 1.0 / (2.0 * theta)
                else:
                    t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c

                col_i = a[:, i].copy()
                col_j = a[:, j].copy()
                a[:, i] = c * col_i - s * col_j
                a[:, j] = s * col_i + c * col_j
                row_i = a[i, :].copy()
                row_j = a[j, :].copy()
                a[i, :] = c * row_i - s * row_j
                a[j, :] = s * row_i + c * row_j
                a[i, j] = a[j, i] = 0.0

                vi = v[:, i].copy()
                vj = v[:, j].copy()
                v[:, i] = c * vi - s * vj
                v[:, j] = s * vi + c * vj

    logger.debug("Jacobi converged after %d sweeps (p=%d)", sweeps, p)
    values = np.diag(a).copy()
    order = np.argsort(-values, kind="stable")
    values = values[order]
    vectors = v[:, order]
    for k in range(p):
        vectors[:, k] = orient_sign(vectors[:, k])
    return values, vectors


def explained_variance(eigenvalues: Sequence[float], p: int) -> Tuple[np.ndarray, np.ndarray]:
    lam = np.asarray(eigenvalues, dtype=float)
    fractions = lam / float(p)
    return fractions, np.cumsum(fractions)


def retain_components(
    eigenvalues: Sequence[float],
    rule: Union[RetentionRule, str, None] = KAISER,
    p: Optional[int] = None,
) -> int:
    """
    Number of components to keep.

    kaiser counts eigenvalues strictly above 1 (at least 1 is kept);
    cumvar=f keeps the smallest k reaching cumulative fraction f;
    fixed=k is clamped to [1, p].
    """
    rule = parse_retention(rule)
    lam = np.asarray(eigenvalues, dtype=float)
    p = int(p if p is not None else lam.size)
    if rule.kind == "kaiser":
        return max(1, int(np.sum(lam > 1.0)))
    if rule.kind == "fixed":
        return int(min(max(int(rule.value), 1), p))
    _, cumulative = explained_variance(lam, p)
    hits = np.nonzero(cumulative >= rule.value - 1e-12)[0]
    return int(hits[0]) + 1 if hits.size else p


def fit_pca(
    z: StandardizedMatrix,
    group_id: str,
    rule: Union[RetentionRule, str, None] = KAISER,
) -> PcaModel:
    """Run correlation-matrix PCA on one standardized group."""
    r = correlation_matrix(z)
    values, vectors = eigen_decompose(r)
    p = r.dim

    if values.size and values[-1] < -NEGATIVE_EIGEN_TOL:
        raise NoConvergence(f"{group_id}: eigenvalue {values[-1]:.3g} is negative beyond tolerance")
    values = np.where(values < 0.0, 0.0, values)

    trace = float(values.sum())
    if abs(trace - p) > TRACE_TOL:
        raise NoConvergence(f"{group_id}: eigenvalues sum to {trace:.9f}, expected {p}")

    fractions, cumulative = explained_variance(values, p)
    k = retain_components(values, rule, p)
    for arr in (values, vectors, fractions, cumulative):
        arr.setflags(write=False)

    logger.info(
        "PCA %s: p=%d, retained=%d, cumulative=%.1f%%",
        group_id, p, k, 100.0 * cumulative[k - 1],
    )
    return PcaModel(
        group_id=group_id,
        variables=tuple(z.column_names),
        eigenvalues=values,
        loadings=vectors,
        retained=k,
        explained_fraction=fractions,
        cumulative_fraction=cumulative,
    )


def index_labels(group_id: str, k: int) -> List[str]:
    """CPC1.., NPC (NPC1.. when k > 1), IPC1..; other groups use their own name."""
    prefix = GROUP_PREFIX.get(group_id, group_id.upper())
    if group_id == "noncommunicable" and k == 1:
        return [prefix]
    return [f"{prefix}{i}" for i in range(1, k + 1)]


def component_scores(
    z: StandardizedMatrix,
    model: PcaModel,
    labels: Optional[Sequence[str]] = None,
) -> List[ScoreSeries]:
    """Project standardized rows onto the retained loadings."""
    if tuple(z.column_names) != tuple(model.variables):
        raise DimensionMismatch(
            f"z columns {list(z.column_names)} do not match loading rows {list(model.variables)}"
        )
    k = model.retained
    labels = list(labels) if labels is not None else index_labels(model.group_id, k)
    if len(labels) != k:
        raise DimensionMismatch(f"{len(labels)} labels for {k} retained components")

    scores = np.asarray(z.z, dtype=float) @ model.loadings[:, :k]
    years = z.years if z.years is not None else tuple(range(1, z.n_rows + 1))
    return [
        ScoreSeries(index_id=labels[c], years=tuple(years), scores=tuple(float(s) for s in scores[:, c]))
        for c in range(k)
    ]


def scree_data(model: PcaModel) -> List[Tuple[int, float]]:
    return [(i + 1, float(lam)) for i, lam in enumerate(model.eigenvalues)]


def component_profile(model: PcaModel, k: int, threshold: float = 0.3) -> List[Tuple[str, float]]:
    """
    Causes that load on component k with |loading| >= threshold.

    Args:
        model: fitted group model
        k: 1-based component number
        threshold: minimum absolute loading

    Returns:
        list: (cause, loading) sorted by descending |loading|
    """
    if not 1 <= k <= model.p:
        raise DimensionMismatch(f"component {k} outside 1..{model.p}")
    column = model.loadings[:, k - 1]
    picked = [(i, name, float(column[i])) for i, name in enumerate(model.variables)
              if abs(column[i]) >= threshold]
    picked.sort(key=lambda item: (-abs(item[2]), item[0]))
    return [(name, value) for _, name, value in picked]
