"""Facility-tier scoring and one-decimal allocation ratios.

A district's three facility tiers are scored as the dot product of the
criterion weights with the tier's feature values, the central tier pays
a crowd-gathering penalty of ``rate * NoR``, and the penalized indices
are apportioned into a one-decimal ratio triple that sums to exactly 10
via largest-remainder rounding.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .ahp import WeightVector
from .errors import AlignmentError, DegenerateInputError

# Criterion order shared by weights and tier features.
CRITERIA = ("NoR", "TC", "NoS", "Cost")

RATIO_TENTHS = 100  # ratios are apportioned in units of 0.1 out of 10.0

DEFAULT_PENALTY_RATE = 0.1


class TierKind(str, Enum):
    CentralHospital = "CenH"
    CommunityHospital = "ComH"
    HealthCenter = "HC"


# Apportionment / reporting order; also the largest-remainder tie-break order.
TIER_ORDER = (
    TierKind.CentralHospital,
    TierKind.CommunityHospital,
    TierKind.HealthCenter,
)


@dataclass(frozen=True)
class FacilityTier:
    """One facility tier's criterion values.

    NoR and NoS arrive as the log-scale scores the district tables use,
    TC as a convenience score in [0, 1], Cost as a cost score.
    """

    kind: TierKind
    features: dict[str, float]

    def __post_init__(self):
        object.__setattr__(self, "kind", TierKind(self.kind))
        feats = {k: float(v) for k, v in self.features.items()}
        missing = [c for c in CRITERIA if c not in feats]
        extra = [k for k in feats if k not in CRITERIA]
        if missing or extra:
            raise AlignmentError(
                f"tier {self.kind.value} features must be exactly "
                f"{list(CRITERIA)}; missing={missing} unexpected={extra}"
            )
        for k, v in feats.items():
            if not math.isfinite(v):
                raise AlignmentError(
                    f"tier {self.kind.value} feature {k} is not finite: {v!r}"
                )
        object.__setattr__(self, "features", feats)

    def feature_vector(self) -> np.ndarray:
        return np.array([self.features[c] for c in CRITERIA])

    def to_dict(self) -> dict:
        return {c: self.features[c] for c in CRITERIA}


@dataclass(frozen=True)
class AllocationResult:
    """Full audit trail of one district allocation."""

    raw_index: dict[str, float]  # keyed by tier kind value, may be negative
    penalized_index: dict[str, float]
    ratio: dict[str, float]  # one-decimal values summing to 10.0
    ratio_tenths: dict[str, int]  # same triple in exact units of 0.1
    penalty_rate: float
    weights: list[float]
    warnings: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "raw_index": self.raw_index,
            "penalized_index": self.penalized_index,
            "ratio": self.ratio,
            "ratio_tenths": self.ratio_tenths,
            "penalty_rate": self.penalty_rate,
            "weights": self.weights,
            "warnings": self.warnings,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def score_tier(
    weights: WeightVector, tier: FacilityTier, invert_cost: bool = False
) -> float:
    """Dot product of criterion weights with the tier's feature values.

    ``invert_cost`` flips the sign of the Cost term for sensitivity
    studies; the default keeps Cost positively weighted, matching the
    linear model the district tables feed.
    """
    if len(weights) != len(CRITERIA):
        raise AlignmentError(
            f"expected {len(CRITERIA)} weights aligned to {list(CRITERIA)}, "
            f"got {len(weights)}"
        )
    feats = tier.feature_vector()
    if invert_cost:
        feats = feats.copy()
        feats[CRITERIA.index("Cost")] *= -1.0
    return float(np.dot(weights.weights, feats))


def apply_gathering_penalty(
    index: float,
    tier: FacilityTier,
    rate: float = DEFAULT_PENALTY_RATE,
    penalty_base: str = "log",
) -> float:
    """Subtract ``rate * NoR`` from central-hospital indices.

    Community hospitals and health centers pass through unchanged. The
    penalty base defaults to the NoR value as stored (a log-scale
    score); ``penalty_base="raw"`` uses 10**NoR instead for sensitivity
    studies. Results may go negative here; clamping happens only at the
    ratio stage so raw values stay visible for audit.
    """
    if rate < 0:
        raise ValueError(f"penalty rate must be >= 0, got {rate!r}")
    if penalty_base not in ("log", "raw"):
        raise ValueError(f"unknown penalty base {penalty_base!r}")
    if tier.kind is not TierKind.CentralHospital:
        return index
    nor = tier.features["NoR"]
    base = nor if penalty_base == "log" else 10.0**nor
    return index - rate * base


def ratio_normalize(indices) -> tuple[dict[str, float], dict[str, int], list[str]]:
    """Apportion three indices into one-decimal shares of 10.0.

    Uses largest-remainder rounding in units of 0.1 so the triple sums
    to exactly 10.0; remainder ties go to the earlier tier in
    (CenH, ComH, HC) order. Negative indices are clamped to 0 with a
    warning. All-zero (after clamping) is degenerate.
    """
    vals = [float(x) for x in indices]
    if len(vals) != len(TIER_ORDER):
        raise DegenerateInputError(
            f"expected {len(TIER_ORDER)} indices, got {len(vals)}"
        )
    warnings = []
    clamped = []
    for kind, v in zip(TIER_ORDER, vals):
        if v < 0:
            warnings.append(
                f"negative index {v!r} for {kind.value} clamped to 0 "
                "for ratio computation"
            )
            clamped.append(0.0)
        else:
            clamped.append(v)
    total = sum(clamped)
    if total <= 0:
        raise DegenerateInputError("all allocation indices are zero")
    shares = [RATIO_TENTHS * v / total for v in clamped]
    floors = [int(math.floor(s)) for s in shares]
    leftover = RATIO_TENTHS - sum(floors)
    by_remainder = sorted(
        range(len(shares)), key=lambda i: (-(shares[i] - floors[i]), i)
    )
    for i in by_remainder[:leftover]:
        floors[i] += 1
    tenths = {kind.value: f for kind, f in zip(TIER_ORDER, floors)}
    ratio = {kind.value: f / 10.0 for kind, f in zip(TIER_ORDER, floors)}
    return ratio, tenths, warnings


def allocate_district(
    weights: WeightVector,
    tiers,
    penalty_rate: float = DEFAULT_PENALTY_RATE,
    invert_cost: bool = False,
    penalty_base: str = "log",
) -> AllocationResult:
    """Score, penalize and apportion one district's three tiers.

    ``tiers`` is a mapping or iterable containing exactly one
    FacilityTier of each kind. Deterministic; the result keeps every
    intermediate for audit.
    """
    if isinstance(tiers, dict):
        tier_list = list(tiers.values())
    else:
        tier_list = list(tiers)
    by_kind = {t.kind: t for t in tier_list}
    if len(tier_list) != len(TIER_ORDER) or set(by_kind) != set(TIER_ORDER):
        raise AlignmentError(
            "need exactly three tiers, one of each kind "
            f"{[k.value for k in TIER_ORDER]}"
        )
    raw = {}
    penalized = {}
    for kind in TIER_ORDER:
        tier = by_kind[kind]
        idx = score_tier(weights, tier, invert_cost=invert_cost)
        raw[kind.value] = idx
        penalized[kind.value] = apply_gathering_penalty(
            idx, tier, rate=penalty_rate, penalty_base=penalty_base
        )
    ratio, tenths, warnings = ratio_normalize(
        [penalized[kind.value] for kind in TIER_ORDER]
    )
    return AllocationResult(
        raw_index=raw,
        penalized_index=penalized,
        ratio=ratio,
        ratio_tenths=tenths,
        penalty_rate=float(penalty_rate),
        weights=weights.tolist(),
        warnings=warnings,
    )
