"""File-backed store for scenarios and datasets.

Single source of truth for every on-disk format: scenario documents,
dataset documents, CSV ingestion, and the store directory layout
(``scenarios/*.json``, ``datasets/*.json``, ``index.json``). Documents
carry ``schema_version`` 1; unknown versions are rejected.

Numeric leaves are persisted as decimal strings produced by ``repr``,
which round-trips every finite double exactly, so save/load preserves
numbers bit-for-bit. Writes go through an advisory lock plus
atomic-replace, giving a single-writer / multi-reader contract.
"""

from __future__ import annotations

import csv
import json
import os
import re
from dataclasses import dataclass
from datetime import date, datetime, timezone
from pathlib import Path

import numpy as np
from filelock import FileLock

from .ahp import JudgmentMatrix, WeightVector
from .allocation import CRITERIA, DEFAULT_PENALTY_RATE, FacilityTier, TierKind
from .data import (
    SYNTHETIC_DATASET_ID,
    bundled_matrix,
    bundled_tiers,
    synthetic_series,
)
from .diagnostics import FeatureColumn
from .errors import (
    IdConflictError,
    IntegrityError,
    NotFoundError,
    ParseError,
    SchemaValidationError,
)
from .forecasting import TimeSeries

SCHEMA_VERSION = 1

DATASET_KINDS = ("time_series", "feature_table")

_ID_RE = re.compile(r"^[a-z0-9][a-z0-9_-]*$")

# Fixed timestamp for bundled objects so reseeding is reproducible.
_BUNDLED_STAMP = "2022-12-18T00:00:00Z"


def _now() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def _enc(x: float) -> str:
    return repr(float(x))


def _dec(s) -> float:
    try:
        return float(s)
    except (TypeError, ValueError) as exc:
        raise SchemaValidationError(f"expected a decimal string, got {s!r}") from exc


def _require_id(obj_id: str):
    if not isinstance(obj_id, str) or not _ID_RE.match(obj_id):
        raise SchemaValidationError(
            f"id {obj_id!r} must be lowercase [a-z0-9_-] and non-empty"
        )


@dataclass(frozen=True)
class FeatureTable:
    """Labeled numeric table: one row per region/tier, one column per
    criterion."""

    columns: tuple[str, ...]
    labels: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != (len(self.labels), len(self.columns)):
            raise SchemaValidationError(
                f"feature table shape {vals.shape} does not match "
                f"{len(self.labels)} labels x {len(self.columns)} columns"
            )
        if not np.all(np.isfinite(vals)):
            raise SchemaValidationError("feature table contains non-finite values")
        vals.flags.writeable = False
        object.__setattr__(self, "columns", tuple(self.columns))
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "values", vals)

    def column(self, name: str) -> FeatureColumn:
        idx = self.columns.index(name)
        return FeatureColumn(name=name, values=self.values[:, idx])


@dataclass(frozen=True)
class Dataset:
    id: str
    kind: str  # one of DATASET_KINDS
    payload: object  # TimeSeries | FeatureTable

    def __post_init__(self):
        _require_id(self.id)
        if self.kind not in DATASET_KINDS:
            raise SchemaValidationError(
                f"unknown dataset kind {self.kind!r}; expected one of "
                f"{DATASET_KINDS}"
            )
        expected = TimeSeries if self.kind == "time_series" else FeatureTable
        if not isinstance(self.payload, expected):
            raise SchemaValidationError(
                f"dataset kind {self.kind!r} needs a {expected.__name__} payload"
            )


@dataclass
class Scenario:
    """One district's allocation inputs.

    Carries either a judgment matrix or explicit weights, never both.
    """

    id: str
    district: str
    tiers: dict[str, FacilityTier]
    matrix: JudgmentMatrix | None = None
    weights: WeightVector | None = None
    penalty_rate: float = DEFAULT_PENALTY_RATE
    dataset_id: str | None = None
    created: str = ""
    modified: str = ""

    def validate(self):
        _require_id(self.id)
        if not self.district or not isinstance(self.district, str):
            raise SchemaValidationError("scenario needs a district name")
        if (self.matrix is None) == (self.weights is None):
            raise SchemaValidationError(
                "scenario must carry exactly one of matrix or weights"
            )
        if self.weights is not None and len(self.weights) != len(CRITERIA):
            raise SchemaValidationError(
                f"weights must have {len(CRITERIA)} entries aligned to "
                f"{list(CRITERIA)}"
            )
        want = {k.value for k in TierKind}
        got = set(self.tiers)
        if got != want:
            raise SchemaValidationError(
                f"tiers must be exactly {sorted(want)}, got {sorted(got)}"
            )
        for key, tier in self.tiers.items():
            if tier.kind.value != key:
                raise SchemaValidationError(
                    f"tier stored under {key!r} has kind {tier.kind.value!r}"
                )
        if not (self.penalty_rate >= 0):
            raise SchemaValidationError(
                f"penalty_rate must be >= 0, got {self.penalty_rate!r}"
            )

    def __eq__(self, other):
        if not isinstance(other, Scenario):
            return NotImplemented
        return scenario_to_doc(self, numbers_as=float) == scenario_to_doc(
            other, numbers_as=float
        )


def scenario_to_doc(s: Scenario, numbers_as=float) -> dict:
    """Scenario document; ``numbers_as=str`` gives the persisted form.

    The interchange form keys the weighting source under "weights":
    either a plain 4-vector or {"matrix": {criteria, entries}}.
    """
    num = _enc if numbers_as is str else float
    if s.matrix is not None:
        weights_field = {
            "matrix": {
                "criteria": list(s.matrix.criteria or CRITERIA),
                "entries": [[num(v) for v in row] for row in s.matrix.entries],
            }
        }
    else:
        weights_field = [num(w) for w in s.weights.weights]
    return {
        "schema_version": SCHEMA_VERSION,
        "id": s.id,
        "district": s.district,
        "weights": weights_field,
        "tiers": {
            kind.value: {c: num(s.tiers[kind.value].features[c]) for c in CRITERIA}
            for kind in (TierKind.CentralHospital, TierKind.CommunityHospital, TierKind.HealthCenter)
        },
        "penalty_rate": num(s.penalty_rate),
        "dataset_id": s.dataset_id,
        "created": s.created,
        "modified": s.modified,
    }


def scenario_from_doc(doc: dict) -> Scenario:
    """Parse either the persisted (string-number) or interchange form."""
    if not isinstance(doc, dict):
        raise SchemaValidationError("scenario document must be an object")
    version = doc.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise SchemaValidationError(
            f"unsupported scenario schema_version {version!r}"
        )
    missing = [k for k in ("id", "district", "weights", "tiers") if k not in doc]
    if missing:
        raise SchemaValidationError(f"scenario document missing keys: {missing}")

    weights_field = doc["weights"]
    matrix = None
    weights = None
    if isinstance(weights_field, dict) and "matrix" in weights_field:
        m = weights_field["matrix"]
        entries = [[_dec(v) for v in row] for row in m.get("entries", [])]
        matrix = JudgmentMatrix.from_dict(
            {"criteria": m.get("criteria"), "entries": entries}
        )
    elif isinstance(weights_field, list):
        weights = WeightVector(np.array([_dec(w) for w in weights_field]))
    else:
        raise SchemaValidationError(
            '"weights" must be a 4-vector or {"matrix": {...}}'
        )

    tiers_doc = doc["tiers"]
    if not isinstance(tiers_doc, dict):
        raise SchemaValidationError('"tiers" must be an object')
    tiers = {}
    for kind, feats in tiers_doc.items():
        if not isinstance(feats, dict):
            raise SchemaValidationError(f"tier {kind!r} must be an object")
        try:
            tiers[kind] = FacilityTier(
                kind=TierKind(kind),
                features={c: _dec(v) for c, v in feats.items()},
            )
        except ValueError as exc:
            raise SchemaValidationError(f"unknown tier kind {kind!r}") from exc

    s = Scenario(
        id=doc["id"],
        district=doc["district"],
        tiers=tiers,
        matrix=matrix,
        weights=weights,
        penalty_rate=_dec(doc.get("penalty_rate", DEFAULT_PENALTY_RATE)),
        dataset_id=doc.get("dataset_id"),
        created=doc.get("created", ""),
        modified=doc.get("modified", ""),
    )
    s.validate()
    return s


def dataset_to_doc(ds: Dataset) -> dict:
    doc = {"schema_version": SCHEMA_VERSION, "id": ds.id, "kind": ds.kind}
    if ds.kind == "time_series":
        ts: TimeSeries = ds.payload
        doc["payload"] = {
            "dates": [d.isoformat() for d in ts.dates],
            "values": [_enc(v) for v in ts.values],
        }
    else:
        ft: FeatureTable = ds.payload
        doc["payload"] = {
            "columns": list(ft.columns),
            "labels": list(ft.labels),
            "values": [[_enc(v) for v in row] for row in ft.values],
        }
    return doc


def dataset_from_doc(doc: dict) -> Dataset:
    if not isinstance(doc, dict):
        raise SchemaValidationError("dataset document must be an object")
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise SchemaValidationError(
            f"unsupported dataset schema_version {doc.get('schema_version')!r}"
        )
    kind = doc.get("kind")
    payload = doc.get("payload") or {}
    if kind == "time_series":
        try:
            dates = tuple(date.fromisoformat(d) for d in payload["dates"])
        except (KeyError, ValueError) as exc:
            raise SchemaValidationError(f"bad time_series dates: {exc}") from exc
        values = np.array([_dec(v) for v in payload.get("values", [])])
        obj = TimeSeries(dates=dates, values=values)
    elif kind == "feature_table":
        obj = FeatureTable(
            columns=tuple(payload.get("columns", [])),
            labels=tuple(payload.get("labels", [])),
            values=np.array(
                [[_dec(v) for v in row] for row in payload.get("values", [])]
            ).reshape(len(payload.get("labels", [])), len(payload.get("columns", []))),
        )
    else:
        raise SchemaValidationError(f"unknown dataset kind {kind!r}")
    return Dataset(id=doc.get("id", ""), kind=kind, payload=obj)


# ---------------------------------------------------------------------------
# CSV ingestion


def _parse_time_series_csv(path: Path) -> TimeSeries:
    dates: list[date] = []
    values: list[float] = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise ParseError(f"{path}: empty file", line=1)
        if [h.strip().lower() for h in header] != ["date", "cumulative"]:
            raise ParseError(
                f"{path}: header must be 'date,cumulative', got {header!r}",
                line=1,
            )
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != 2:
                raise ParseError(
                    f"{path}: expected 2 columns, got {len(row)}", line=lineno
                )
            try:
                d = date.fromisoformat(row[0].strip())
            except ValueError as exc:
                raise ParseError(
                    f"{path}: bad ISO date {row[0]!r}: {exc}", line=lineno
                ) from exc
            try:
                v = float(row[1])
            except ValueError as exc:
                raise ParseError(
                    f"{path}: bad number {row[1]!r}", line=lineno
                ) from exc
            if dates:
                if d <= dates[-1]:
                    raise SchemaValidationError(
                        f"{path}: non-monotone date {d} at line {lineno}"
                    )
                if (d - dates[-1]).days != 1:
                    raise SchemaValidationError(
                        f"{path}: dates must be daily; gap before line {lineno}"
                    )
            dates.append(d)
            values.append(v)
    if len(dates) < 2:
        raise SchemaValidationError(f"{path}: need at least 2 data rows")
    return TimeSeries(dates=tuple(dates), values=np.array(values))


def _parse_feature_table_csv(path: Path) -> FeatureTable:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or len(header) < 2:
            raise ParseError(
                f"{path}: header must name a label column plus >= 1 "
                "numeric columns",
                line=1,
            )
        columns = [h.strip() for h in header[1:]]
        labels: list[str] = []
        rows: list[list[float]] = []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != len(header):
                raise ParseError(
                    f"{path}: expected {len(header)} columns, got {len(row)}",
                    line=lineno,
                )
            labels.append(row[0].strip())
            try:
                rows.append([float(cell) for cell in row[1:]])
            except ValueError as exc:
                raise ParseError(
                    f"{path}: non-numeric cell in row: {exc}", line=lineno
                ) from exc
    if not rows:
        raise SchemaValidationError(f"{path}: no data rows")
    return FeatureTable(
        columns=tuple(columns), labels=tuple(labels), values=np.array(rows)
    )


def dataset_id_from_path(path: Path) -> str:
    slug = re.sub(r"[^a-z0-9_-]+", "-", path.stem.lower()).strip("-")
    return slug or "dataset"


def import_csv(path, kind: str, dataset_id: str | None = None) -> Dataset:
    """Parse and validate a CSV file into a Dataset (not yet persisted)."""
    path = Path(path)
    if kind not in DATASET_KINDS:
        raise SchemaValidationError(
            f"unknown dataset kind {kind!r}; expected one of {DATASET_KINDS}"
        )
    if kind == "time_series":
        payload = _parse_time_series_csv(path)
    else:
        payload = _parse_feature_table_csv(path)
    return Dataset(
        id=dataset_id or dataset_id_from_path(path), kind=kind, payload=payload
    )


# ---------------------------------------------------------------------------
# Store


def bundled_examples() -> list[Scenario]:
    """Fresh copies of the two worked districts, sharing one matrix."""
    out = []
    for sid, district in (("gongshu", "Gongshu District, Hangzhou"),
                          ("daoli", "Daoli District, Harbin")):
        s = Scenario(
            id=sid,
            district=district,
            tiers=bundled_tiers(sid),
            matrix=bundled_matrix(),
            weights=None,
            penalty_rate=DEFAULT_PENALTY_RATE,
            dataset_id=None,
            created=_BUNDLED_STAMP,
            modified=_BUNDLED_STAMP,
        )
        s.validate()
        out.append(s)
    return out


class Store:
    """Directory-backed object store with an advisory write lock."""

    def __init__(self, root):
        self.root = Path(root)
        self.scenario_dir = self.root / "scenarios"
        self.dataset_dir = self.root / "datasets"
        self.index_path = self.root / "index.json"
        self.scenario_dir.mkdir(parents=True, exist_ok=True)
        self.dataset_dir.mkdir(parents=True, exist_ok=True)
        self._lock = FileLock(str(self.root / ".lock"))
        if not self.index_path.exists():
            with self._lock:
                if not self.index_path.exists():
                    self._write_index({"scenarios": {}, "datasets": {}})

    # -- index ----------------------------------------------------------

    def _read_index(self) -> dict:
        try:
            doc = json.loads(self.index_path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise IntegrityError(f"cannot read store index: {exc}") from exc
        if doc.get("schema_version") != SCHEMA_VERSION:
            raise SchemaValidationError(
                f"unsupported index schema_version {doc.get('schema_version')!r}"
            )
        return doc

    def _write_index(self, body: dict):
        doc = {"schema_version": SCHEMA_VERSION, **body}
        _atomic_write(self.index_path, json.dumps(doc, indent=2, sort_keys=True))

    @staticmethod
    def _atomic_json(path: Path, doc: dict):
        _atomic_write(path, json.dumps(doc, indent=2, sort_keys=True))

    # -- scenarios --------------------------------------------------------

    def list_scenarios(self) -> list[str]:
        return sorted(self._read_index()["scenarios"])

    def has_scenario(self, scenario_id: str) -> bool:
        return scenario_id in self._read_index()["scenarios"]

    def save_scenario(self, s: Scenario, overwrite: bool = True) -> Scenario:
        """Validate and persist; returns the stored copy with timestamps.

        The object file is replaced atomically before the index, so a
        failed save never leaves a half-written document visible.
        """
        s.validate()
        if s.dataset_id is not None and not self.has_dataset(s.dataset_id):
            raise IntegrityError(
                f"scenario {s.id!r} references unknown dataset {s.dataset_id!r}"
            )
        with self._lock:
            index = self._read_index()
            exists = s.id in index["scenarios"]
            if exists and not overwrite:
                raise IdConflictError(f"scenario id {s.id!r} already exists")
            now = _now()
            stored = Scenario(**dict(s.__dict__))
            stored.created = s.created or now
            stored.modified = now if exists else (s.modified or now)
            path = self.scenario_dir / f"{s.id}.json"
            self._atomic_json(path, scenario_to_doc(stored, numbers_as=str))
            index["scenarios"][s.id] = f"scenarios/{s.id}.json"
            self._write_index(
                {"scenarios": index["scenarios"], "datasets": index["datasets"]}
            )
        return stored

    def load_scenario(self, scenario_id: str) -> Scenario:
        index = self._read_index()
        rel = index["scenarios"].get(scenario_id)
        if rel is None:
            raise NotFoundError(f"no scenario with id {scenario_id!r}")
        path = self.root / rel
        try:
            doc = json.loads(path.read_text(encoding="utf-8"))
        except OSError as exc:
            raise IntegrityError(
                f"index lists {scenario_id!r} but file is unreadable: {exc}"
            ) from exc
        except json.JSONDecodeError as exc:
            raise IntegrityError(
                f"stored scenario {scenario_id!r} is corrupt: {exc}"
            ) from exc
        s = scenario_from_doc(doc)
        if s.dataset_id is not None and s.dataset_id not in index["datasets"]:
            raise IntegrityError(
                f"scenario {scenario_id!r} references unknown dataset "
                f"{s.dataset_id!r}"
            )
        return s

    # -- datasets ---------------------------------------------------------

    def list_datasets(self) -> dict[str, str]:
        return {
            k: v["kind"] for k, v in sorted(self._read_index()["datasets"].items())
        }

    def has_dataset(self, dataset_id: str) -> bool:
        return dataset_id in self._read_index()["datasets"]

    def save_dataset(self, ds: Dataset, overwrite: bool = True) -> Dataset:
        with self._lock:
            index = self._read_index()
            if ds.id in index["datasets"] and not overwrite:
                raise IdConflictError(f"dataset id {ds.id!r} already exists")
            path = self.dataset_dir / f"{ds.id}.json"
            self._atomic_json(path, dataset_to_doc(ds))
            index["datasets"][ds.id] = {
                "path": f"datasets/{ds.id}.json",
                "kind": ds.kind,
            }
            self._write_index(
                {"scenarios": index["scenarios"], "datasets": index["datasets"]}
            )
        return ds

    def load_dataset(self, dataset_id: str) -> Dataset:
        index = self._read_index()
        entry = index["datasets"].get(dataset_id)
        if entry is None:
            raise NotFoundError(f"no dataset with id {dataset_id!r}")
        path = self.root / entry["path"]
        try:
            doc = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise IntegrityError(
                f"stored dataset {dataset_id!r} is unreadable: {exc}"
            ) from exc
        return dataset_from_doc(doc)

    def import_csv(self, path, kind: str, dataset_id: str | None = None) -> Dataset:
        ds = import_csv(path, kind, dataset_id=dataset_id)
        if self.has_dataset(ds.id):
            raise IdConflictError(f"dataset id {ds.id!r} already exists")
        return self.save_dataset(ds)

    # -- bundled seeds ----------------------------------------------------

    def ensure_bundled(self):
        """Seed the worked districts and the synthetic series if absent."""
        index = self._read_index()
        if SYNTHETIC_DATASET_ID not in index["datasets"]:
            self.save_dataset(
                Dataset(
                    id=SYNTHETIC_DATASET_ID,
                    kind="time_series",
                    payload=synthetic_series(),
                )
            )
        for s in bundled_examples():
            if s.id not in index["scenarios"]:
                self.save_scenario(s)


def _atomic_write(path: Path, text: str):
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(text)
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)


__all__ = [
    "Dataset",
    "FeatureTable",
    "Scenario",
    "Store",
    "bundled_examples",
    "dataset_from_doc",
    "dataset_to_doc",
    "import_csv",
    "scenario_from_doc",
    "scenario_to_doc",
    "SCHEMA_VERSION",
    "DATASET_KINDS",
]
