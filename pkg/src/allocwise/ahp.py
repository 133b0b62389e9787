"""Pairwise-comparison weighting with consistency checking.

Criterion weights are derived from a positive judgment matrix via its
principal eigenvector (power iteration), then validated with the classic
CI/RI/CR test: judgments are accepted when CR < 0.1.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ConvergenceError,
    DegenerateInputError,
    InvalidMatrixError,
    OrderError,
    StructuralMatrixError,
)

# Random consistency index for matrix orders 1..10 (Saaty).
RI_TABLE = (0.0, 0.0, 0.58, 0.90, 1.12, 1.24, 1.32, 1.41, 1.45, 1.49)

MIN_ORDER = 2
MAX_ORDER = 10

# a(i,j)*a(j,i) must sit within this distance of 1 for a reciprocal pair.
RECIPROCITY_TOL = 1e-6

# The 1-9 importance scale plus all reciprocals.
SAATY_VALUES = tuple(float(k) for k in range(1, 10)) + tuple(
    1.0 / k for k in range(2, 10)
)

# Entries are accepted as scale-conforming when within this absolute
# distance of a scale value, so 3-decimal renderings of 1/3 or 1/6 pass.
SCALE_TOL = 1e-3

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 10_000

# |CI| below this is floating-point noise on a consistent matrix.
CI_CLAMP = 1e-10


def in_saaty_scale(value: float) -> bool:
    """True if ``value`` is a 1-9 scale anchor, intermediate, or reciprocal."""
    return any(abs(value - s) <= SCALE_TOL for s in SAATY_VALUES)


@dataclass(frozen=True)
class JudgmentMatrix:
    """Square positive pairwise-comparison matrix.

    Only squareness and order are enforced at construction; positivity,
    unit diagonal, reciprocity and scale conformance are checked by
    :func:`validate_matrix` so that imperfect matrices can still be
    inspected and reported on.
    """

    entries: np.ndarray
    criteria: tuple[str, ...] | None = None

    def __post_init__(self):
        arr = np.asarray(self.entries, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise StructuralMatrixError(
                f"judgment matrix must be square, got shape {arr.shape}"
            )
        n = arr.shape[0]
        if not (MIN_ORDER <= n <= MAX_ORDER):
            raise OrderError(
                f"matrix order {n} outside supported range "
                f"[{MIN_ORDER}, {MAX_ORDER}]"
            )
        if self.criteria is not None and len(self.criteria) != n:
            raise StructuralMatrixError(
                f"{len(self.criteria)} criteria labels for order-{n} matrix"
            )
        arr.flags.writeable = False
        object.__setattr__(self, "entries", arr)
        if self.criteria is not None:
            object.__setattr__(self, "criteria", tuple(self.criteria))

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def reciprocity_residuals(self) -> np.ndarray:
        """r(i,j) = |a(i,j)*a(j,i) - 1| for every pair."""
        return np.abs(self.entries * self.entries.T - 1.0)

    @property
    def is_reciprocal(self) -> bool:
        return float(self.reciprocity_residuals().max()) <= RECIPROCITY_TOL

    @classmethod
    def from_json(cls, text: str) -> "JudgmentMatrix":
        """Parse the {"criteria": [...], "entries": [[...], ...]} form."""
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise StructuralMatrixError(f"not valid JSON: {exc}") from exc
        return cls.from_dict(doc)

    @classmethod
    def from_dict(cls, doc: dict) -> "JudgmentMatrix":
        if not isinstance(doc, dict) or "entries" not in doc:
            raise StructuralMatrixError('matrix JSON needs an "entries" key')
        entries = doc["entries"]
        if not isinstance(entries, list) or not all(
            isinstance(row, list) for row in entries
        ):
            raise StructuralMatrixError('"entries" must be a list of rows')
        lengths = {len(row) for row in entries}
        if len(lengths) > 1 or (lengths and lengths != {len(entries)}):
            raise StructuralMatrixError(
                f"ragged or non-square entries: {len(entries)} rows "
                f"with lengths {sorted(lengths)}"
            )
        try:
            arr = np.array(entries, dtype=float)
        except (TypeError, ValueError) as exc:
            raise StructuralMatrixError(f"non-numeric entry: {exc}") from exc
        criteria = doc.get("criteria")
        return cls(arr, tuple(criteria) if criteria else None)

    def to_dict(self) -> dict:
        labels = self.criteria or tuple(f"C{i + 1}" for i in range(self.n))
        return {"criteria": list(labels), "entries": self.entries.tolist()}


@dataclass(frozen=True)
class WeightVector:
    """Normalized criterion weights: non-negative, summing to one."""

    weights: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.weights, dtype=float)
        if arr.ndim != 1:
            raise DegenerateInputError("weights must be a 1-d vector")
        if np.any(arr < 0):
            raise DegenerateInputError("weights must be non-negative")
        if abs(float(arr.sum()) - 1.0) > 1e-9:
            raise DegenerateInputError(
                f"weights sum to {arr.sum()!r}, expected 1 within 1e-9"
            )
        arr.flags.writeable = False
        object.__setattr__(self, "weights", arr)

    def __len__(self) -> int:
        return len(self.weights)

    def __iter__(self):
        return iter(self.weights)

    def tolist(self) -> list[float]:
        return [float(w) for w in self.weights]


@dataclass(frozen=True)
class ConsistencyReport:
    """Outcome of the CI/RI/CR test for one judgment matrix."""

    lambda_max: float
    ci: float
    ri: float
    cr: float
    passes: bool

    def to_dict(self) -> dict:
        return {
            "lambda_max": self.lambda_max,
            "ci": self.ci,
            "ri": self.ri,
            "cr": self.cr,
            "passes": self.passes,
        }


@dataclass
class ValidationReport:
    """Findings from :func:`validate_matrix`, split into two tiers.

    Positivity and diagonal findings are structural: the eigenvector
    method is meaningless without them. Reciprocity and scale findings
    are warnings by default and only block under ``strict_scale``.
    """

    n: int
    strict_scale: bool = False
    positivity_violations: list[tuple[int, int, float]] = field(default_factory=list)
    diagonal_violations: list[tuple[int, float]] = field(default_factory=list)
    reciprocity_violations: list[tuple[int, int, float]] = field(default_factory=list)
    scale_violations: list[tuple[int, int, float]] = field(default_factory=list)
    max_reciprocity_residual: float = 0.0

    @property
    def structurally_valid(self) -> bool:
        return not self.positivity_violations and not self.diagonal_violations

    @property
    def is_reciprocal(self) -> bool:
        return self.max_reciprocity_residual <= RECIPROCITY_TOL

    @property
    def is_valid(self) -> bool:
        if not self.structurally_valid:
            return False
        if self.strict_scale and (
            self.reciprocity_violations or self.scale_violations
        ):
            return False
        return True

    def error_messages(self) -> list[str]:
        msgs = [
            f"entry ({i},{j}) = {v!r} is not strictly positive"
            for i, j, v in self.positivity_violations
        ]
        msgs += [
            f"diagonal entry ({i},{i}) = {v!r}, expected exactly 1"
            for i, v in self.diagonal_violations
        ]
        if self.strict_scale:
            msgs += self.warning_messages()
        return msgs

    def warning_messages(self) -> list[str]:
        msgs = [
            f"reciprocity violated at ({i},{j}): a(i,j)*a(j,i) deviates "
            f"from 1 by {r:.6g}"
            for i, j, r in self.reciprocity_violations
        ]
        msgs += [
            f"entry ({i},{j}) = {v!r} is outside the 1-9 scale and its "
            "reciprocals"
            for i, j, v in self.scale_violations
        ]
        return msgs

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "strict_scale": self.strict_scale,
            "structurally_valid": self.structurally_valid,
            "is_reciprocal": self.is_reciprocal,
            "is_valid": self.is_valid,
            "max_reciprocity_residual": self.max_reciprocity_residual,
            "errors": self.error_messages(),
            "warnings": [] if self.strict_scale else self.warning_messages(),
        }


def validate_matrix(m: JudgmentMatrix, strict_scale: bool = False) -> ValidationReport:
    """Check positivity, diagonal, reciprocity and scale membership.

    Never mutates ``m``. Squareness and order violations raise at
    :class:`JudgmentMatrix` construction, so they never reach here.
    """
    a = m.entries
    n = m.n
    report = ValidationReport(n=n, strict_scale=strict_scale)
    for i in range(n):
        for j in range(n):
            v = float(a[i, j])
            if v <= 0:
                report.positivity_violations.append((i, j, v))
        d = float(a[i, i])
        if d != 1.0:
            report.diagonal_violations.append((i, d))

    residuals = m.reciprocity_residuals()
    report.max_reciprocity_residual = float(residuals.max())
    for i in range(n):
        for j in range(i + 1, n):
            r = float(residuals[i, j])
            if r > RECIPROCITY_TOL:
                report.reciprocity_violations.append((i, j, r))
            for (ii, jj) in ((i, j), (j, i)):
                if not in_saaty_scale(float(a[ii, jj])):
                    report.scale_violations.append((ii, jj, float(a[ii, jj])))
    return report


def principal_eigen(
    m: JudgmentMatrix,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    start: np.ndarray | None = None,
) -> tuple[float, np.ndarray]:
    """Dominant eigenpair of a positive matrix by power iteration.

    Starts from the all-ones vector so results are deterministic (pass
    ``start`` to override, e.g. for scaling-invariance checks). The
    eigenvalue estimate is the mean of the componentwise ratios
    (M.v)_i / v_i; convergence is declared when the residual
    ``max|M.v - lambda*v| / max|v|`` drops to ``tol``, and that bound
    holds for the returned pair.

    Returns:
        (lambda_max, eigvec) with the eigenvector scaled so its largest
        component is 1.

    Raises:
        InvalidMatrixError: matrix fails structural validation.
        ConvergenceError: residual still above ``tol`` after ``max_iter``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    report = validate_matrix(m)
    if not report.structurally_valid:
        raise InvalidMatrixError(
            "; ".join(report.error_messages()), report=report
        )
    a = m.entries
    if start is None:
        v = np.ones(m.n)
    else:
        v = np.asarray(start, dtype=float)
        if v.shape != (m.n,) or np.any(v <= 0):
            raise DegenerateInputError("start vector must be positive, length n")
    residual = np.inf
    for _ in range(max_iter):
        av = a @ v
        lam = float(np.mean(av / v))
        residual = float(np.max(np.abs(av - lam * v)) / np.max(np.abs(v)))
        if residual <= tol:
            return lam, v / v.max()
        v = av / av.max()
    raise ConvergenceError(
        f"power iteration did not reach tol={tol:g} within "
        f"{max_iter} iterations (last residual {residual:g})",
        residual=residual,
        iterations=max_iter,
    )


def normalize_weights(eigvec: np.ndarray) -> WeightVector:
    """Scale a non-negative vector so its elements sum to one."""
    arr = np.asarray(eigvec, dtype=float)
    if np.any(arr < 0):
        raise DegenerateInputError("eigenvector components must be >= 0")
    total = float(arr.sum())
    if total <= 0:
        raise DegenerateInputError("cannot normalize the zero vector")
    return WeightVector(arr / total)


def consistency_index(lambda_max: float, n: int) -> float:
    """CI = (lambda_max - n) / (n - 1); tiny negatives clamp to 0."""
    if n < 2:
        raise OrderError(f"consistency index undefined for n={n}")
    ci = (lambda_max - n) / (n - 1)
    if abs(ci) < CI_CLAMP:
        return 0.0
    return ci


def random_index(n: int, ri_table: tuple[float, ...] | None = None) -> float:
    """Tabulated random consistency index for order ``n``.

    ``ri_table`` overrides the built-in constants (indexed from n=1),
    which research configurations may want to swap out.
    """
    table = RI_TABLE if ri_table is None else tuple(ri_table)
    if not (1 <= n <= len(table)):
        raise OrderError(f"no random index tabulated for n={n}")
    return float(table[n - 1])


def consistency_ratio(
    ci: float, n: int, ri_table: tuple[float, ...] | None = None
) -> tuple[float, bool]:
    """CR = CI/RI with the CR < 0.1 acceptance rule.

    Any 2x2 reciprocal matrix is consistent and RI(2) = 0, so for
    n <= 2 this defines CR = 0 and passes.
    """
    if not (MIN_ORDER <= n <= MAX_ORDER):
        raise OrderError(f"order {n} outside [{MIN_ORDER}, {MAX_ORDER}]")
    if ci < -CI_CLAMP:
        raise DegenerateInputError(f"negative consistency index {ci!r}")
    ci = max(ci, 0.0)
    if n <= 2:
        return 0.0, True
    cr = ci / random_index(n, ri_table)
    return cr, cr < 0.1


def analyze(
    m: JudgmentMatrix,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    ri_table: tuple[float, ...] | None = None,
) -> tuple[WeightVector, ConsistencyReport]:
    """Weights plus consistency verdict for one judgment matrix.

    Pure composition of the eigenvector and CI/RI/CR steps; a pure
    function of the matrix and solver settings.
    """
    lam, eigvec = principal_eigen(m, tol=tol, max_iter=max_iter)
    weights = normalize_weights(eigvec)
    ci = consistency_index(lam, m.n)
    ri = random_index(m.n, ri_table) if m.n >= 2 else 0.0
    cr, passes = consistency_ratio(ci, m.n, ri_table)
    return weights, ConsistencyReport(
        lambda_max=lam, ci=ci, ri=ri, cr=cr, passes=passes
    )
