"""Dataset manifests, sample CSVs and edge lists.

A manifest is JSON::

    {"variables": ["X1", "X2"],
     "regimes": [{"targets": [], "data": "regime_0.csv"},
                 {"targets": ["X2"], "data": "regime_1.csv"}],
     "options": {...}}

Data paths are resolved against the manifest's directory. Sample files are
headerless CSV, one row per sample, columns in variable order. Edge lists are
``source,target`` rows of variable names, sorted.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .citest import RegimeData
from .errors import DatasetError
from .graph import Dag, InterventionFamily


@dataclass(frozen=True)
class LoadedDataset:
    family: InterventionFamily
    data: list[RegimeData]
    names: dict[str, int]
    options: dict[str, Any] = field(default_factory=dict)

    @property
    def variables(self) -> list[str]:
        return sorted(self.names, key=self.names.__getitem__)

    def __iter__(self):
        # unpacks as (family, data, names)
        return iter((self.family, self.data, self.names))


def _read_json(path: Path) -> Any:
    try:
        text = path.read_text()
    except FileNotFoundError:
        raise DatasetError("file not found", path) from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise DatasetError(f"invalid JSON: {exc.msg}", path, exc.lineno) from None


def _parse_manifest(raw: Any, path: Path) -> tuple[list[str], list[tuple[list[str], str]], dict]:
    if not isinstance(raw, dict):
        raise DatasetError("manifest must be a JSON object", path)
    variables = raw.get("variables")
    if not isinstance(variables, list) or not variables or not all(isinstance(v, str) for v in variables):
        raise DatasetError("'variables' must be a nonempty list of names", path)
    if len(set(variables)) != len(variables):
        raise DatasetError("duplicate variable names", path)
    regimes = raw.get("regimes")
    if not isinstance(regimes, list) or not regimes:
        raise DatasetError("'regimes' must be a nonempty list", path)
    parsed = []
    for k, reg in enumerate(regimes):
        if not isinstance(reg, dict) or not isinstance(reg.get("data"), str):
            raise DatasetError(f"regime {k} needs a 'data' file path", path)
        targets = reg.get("targets", [])
        if not isinstance(targets, list) or not all(isinstance(t, str) for t in targets):
            raise DatasetError(f"regime {k}: 'targets' must be a list of names", path)
        parsed.append((targets, reg["data"]))
    options = raw.get("options", {})
    if not isinstance(options, dict):
        raise DatasetError("'options' must be an object", path)
    return variables, parsed, options


def read_samples(path: Path, n_columns: int) -> np.ndarray:
    """Headerless CSV of reals with exactly ``n_columns`` per row."""
    rows = []
    try:
        handle = open(path, newline="")
    except FileNotFoundError:
        raise DatasetError("data file not found", path) from None
    with handle:
        for line_no, row in enumerate(csv.reader(handle), start=1):
            if not row:
                continue
            if len(row) != n_columns:
                raise DatasetError(
                    f"column mismatch: expected {n_columns} values, found {len(row)}", path, line_no
                )
            try:
                values = [float(cell) for cell in row]
            except ValueError:
                bad = next(c for c in row if not _is_real(c))
                raise DatasetError(f"non-numeric cell {bad!r}", path, line_no) from None
            if not all(math.isfinite(v) for v in values):
                raise DatasetError("non-finite value", path, line_no)
            rows.append(values)
    if not rows:
        raise DatasetError("no samples", path)
    return np.array(rows, dtype=float)


def _is_real(cell: str) -> bool:
    try:
        float(cell)
    except ValueError:
        return False
    return True


def load_dataset(manifest_path: str | Path) -> LoadedDataset:
    path = Path(manifest_path)
    variables, regimes, options = _parse_manifest(_read_json(path), path)
    names = {v: i for i, v in enumerate(variables)}
    if regimes[0][0]:
        raise DatasetError(f"regime 0 must be observational but targets {regimes[0][0]}", path)
    targets = []
    for k, (tnames, _) in enumerate(regimes):
        unknown = [t for t in tnames if t not in names]
        if unknown:
            raise DatasetError(f"regime {k}: unknown target variable {unknown[0]!r}", path)
        targets.append(frozenset(names[t] for t in tnames))
    data = [
        RegimeData(read_samples(path.parent / file, len(variables))) for _, file in regimes
    ]
    return LoadedDataset(InterventionFamily(tuple(targets)), data, names, dict(options))


def write_samples(path: str | Path, samples: np.ndarray) -> None:
    # %.17g round-trips doubles exactly
    with open(path, "w", newline="") as handle:
        for row in np.asarray(samples):
            handle.write(",".join("%.17g" % v for v in row) + "\n")


def write_manifest(
    path: str | Path,
    variables: Sequence[str],
    family: InterventionFamily,
    files: Sequence[str],
    options: dict[str, Any] | None = None,
) -> None:
    doc = {
        "variables": list(variables),
        "regimes": [
            {"targets": [variables[v] for v in sorted(t)], "data": f}
            for t, f in zip(family, files)
        ],
        "options": options or {},
    }
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def write_edges(path: str | Path, dag: Dag, variables: Sequence[str]) -> None:
    rows = sorted((variables[i], variables[j]) for i, j in dag.arrows)
    with open(path, "w", newline="") as handle:
        for s, t in rows:
            handle.write(f"{s},{t}\n")


def read_edges(path: str | Path, names: dict[str, int]) -> Dag:
    path = Path(path)
    try:
        lines = path.read_text().splitlines()
    except FileNotFoundError:
        raise DatasetError("edge list not found", path) from None
    arrows = []
    for line_no, row in enumerate(csv.reader(lines), start=1):
        if not row:
            continue
        if len(row) != 2:
            raise DatasetError(f"expected 'source,target', found {len(row)} fields", path, line_no)
        for name in row:
            if name not in names:
                raise DatasetError(f"unknown variable {name!r}", path, line_no)
        arrows.append((names[row[0]], names[row[1]]))
    return Dag(len(names), frozenset(arrows))
