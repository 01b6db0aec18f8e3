"""CSV ingestion, one-hot encoding, seeded splits, and synthetic data.

Categorical columns are detected by the all-cells-parse rule (a column is
numeric only if every cell parses as a float) and expanded into indicator
columns named ``col=value`` in first-appearance order, so ingestion is fully
deterministic.  Splitting and reference sampling are driven exclusively by an
explicit seed; there is no wall-clock fallback anywhere.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, IngestionError, InvalidArgumentError


@dataclass(frozen=True)
class DataTable:
    """Named n x m matrix of real feature values."""

    names: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 2:
            raise InvalidArgumentError(f"values must be 2-D, got shape {values.shape}")
        if len(self.names) != values.shape[1]:
            raise InvalidArgumentError(
                f"{len(self.names)} names for {values.shape[1]} columns"
            )
        object.__setattr__(self, "names", tuple(self.names))
        object.__setattr__(self, "values", values)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def m(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class TabularFile:
    """A parsed delimited file: header plus raw string cells, rectangular."""

    header: tuple[str, ...]
    rows: tuple[tuple[str, ...], ...]

    @property
    def n(self) -> int:
        return len(self.rows)

    def column(self, name: str) -> list[str]:
        try:
            j = self.header.index(name)
        except ValueError:
            raise ConfigError(f"unknown column {name!r}; file has {list(self.header)}") from None
        return [row[j] for row in self.rows]


def load_csv(path) -> TabularFile:
    """RFC-4180-style CSV with a header line; rejects ragged rows."""
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise IngestionError(f"{path}: file is empty") from None
            rows = []
            for i, row in enumerate(reader):
                if len(row) != len(header):
                    raise IngestionError(
                        f"{path}: row {i} has {len(row)} cells, header has {len(header)}",
                        row=i,
                    )
                rows.append(tuple(cell.strip() for cell in row))
    except OSError as exc:
        raise IngestionError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise IngestionError(f"{path}: no data rows")
    header = tuple(h.strip() for h in header)
    if len(set(header)) != len(header):
        raise IngestionError(f"{path}: duplicate column names in header")
    return TabularFile(header=header, rows=tuple(rows))


def _try_float(cell: str) -> float | None:
    try:
        value = float(cell)
    except ValueError:
        return None
    return value if math.isfinite(value) else None


@dataclass(frozen=True)
class EncodedTable:
    """Numeric feature matrix plus target, with one-hot bookkeeping."""

    features: DataTable
    target: np.ndarray
    target_name: str
    categories: dict  # original column -> tuple of categories, encoding order


def encode_table(tab: TabularFile, target: str) -> EncodedTable:
    """Numeric columns pass through; categorical ones are one-hot encoded.

    Indicator columns are named ``col=value`` with categories ordered by first
    appearance.  The target column must parse as a float in every row.
    """
    if target not in tab.header:
        raise ConfigError(f"target column {target!r} not in header {list(tab.header)}")
    names: list[str] = []
    columns: list[np.ndarray] = []
    categories: dict = {}
    for j, name in enumerate(tab.header):
        cells = [row[j] for row in tab.rows]
        if name == target:
            continue
        parsed = [_try_float(c) for c in cells]
        if all(v is not None for v in parsed):
            names.append(name)
            columns.append(np.array(parsed, dtype=np.float64))
        else:
            seen: list[str] = []
            for c in cells:
                if c not in seen:
                    seen.append(c)
            categories[name] = tuple(seen)
            for cat in seen:
                names.append(f"{name}={cat}")
                columns.append(np.array([1.0 if c == cat else 0.0 for c in cells]))
    target_cells = tab.column(target)
    y = np.empty(len(target_cells))
    for i, cell in enumerate(target_cells):
        v = _try_float(cell)
        if v is None:
            raise IngestionError(
                f"target {target!r} has unparsable value {cell!r} at row {i}",
                row=i,
                column=target,
            )
        y[i] = v
    if not columns:
        raise IngestionError("no feature columns besides the target")
    features = DataTable(names=tuple(names), values=np.column_stack(columns))
    return EncodedTable(features=features, target=y, target_name=target, categories=categories)


def decode_one_hot(features: DataTable, column: str, categories) -> list[str]:
    """Recover the original categorical cells from their indicator columns."""
    categories = tuple(categories)
    idx = []
    for cat in categories:
        name = f"{column}={cat}"
        try:
            idx.append(features.names.index(name))
        except ValueError:
            raise InvalidArgumentError(f"indicator column {name!r} not found") from None
    block = features.values[:, idx]
    if not np.all(np.isin(block, (0.0, 1.0))) or not np.all(block.sum(axis=1) == 1.0):
        raise InvalidArgumentError(f"columns for {column!r} are not a one-hot block")
    return [categories[k] for k in np.argmax(block, axis=1)]


@dataclass(frozen=True)
class SplitPlan:
    """Row indices for the train/test split and the reference sample."""

    train: np.ndarray
    test: np.ndarray
    reference: np.ndarray


def split_and_sample(n: int, split: float, ref_size: int, seed: int) -> SplitPlan:
    """Seeded shuffle-split plus a uniform reference sample from the train rows.

    The first ceil(split * n) shuffled rows form the train set; the reference
    is drawn from them without replacement.  Fully reproducible from the seed.
    """
    if n < 3:
        raise InvalidArgumentError(f"need at least 3 rows to split, got {n}")
    if not 0.0 < split < 1.0:
        raise InvalidArgumentError(f"split fraction must be in (0, 1), got {split}")
    if ref_size < 1:
        raise InvalidArgumentError(f"reference size must be >= 1, got {ref_size}")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    n_train = math.ceil(split * n)
    if n_train >= n:
        raise InvalidArgumentError(f"split {split} leaves no test rows for n = {n}")
    train, test = perm[:n_train], perm[n_train:]
    if ref_size > n_train:
        raise InvalidArgumentError(f"reference size {ref_size} exceeds train size {n_train}")
    reference = rng.choice(train, size=ref_size, replace=False)
    return SplitPlan(train=train, test=test, reference=reference)


def synthesize(rows: int, features: int, seed: int, noise: float = 0.0, correlation: float = 0.0):
    """Seeded exp-linear data: X standard normal (optionally equicorrelated),
    y = exp(alpha + X @ betas + noise * eps), strictly positive by construction.

    Returns (DataTable, target vector).  Coefficients shrink with the feature
    count so predictions stay in a sane range at any m.
    """
    if rows < 3 or features < 1:
        raise InvalidArgumentError("need rows >= 3 and features >= 1")
    if not 0.0 <= correlation < 1.0:
        raise InvalidArgumentError("correlation must be in [0, 1)")
    if noise < 0.0:
        raise InvalidArgumentError("noise must be >= 0")
    rng = np.random.default_rng(seed)
    alpha = 0.25
    betas = rng.uniform(-1.0, 1.0, features) * 1.5 / math.sqrt(features)
    z = rng.standard_normal((rows, features))
    if correlation > 0.0:
        shared = rng.standard_normal((rows, 1))
        z = math.sqrt(correlation) * shared + math.sqrt(1.0 - correlation) * z
    score = alpha + z @ betas
    if noise > 0.0:
        score = score + noise * rng.standard_normal(rows)
    names = tuple(f"x{j + 1}" for j in range(features))
    return DataTable(names=names, values=z), np.exp(score)


def write_csv(table: DataTable, target: np.ndarray, target_name: str, fh) -> None:
    """Emit features plus target with shortest round-trip float formatting."""
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(list(table.names) + [target_name])
    for row, y in zip(table.values, target):
        writer.writerow([repr(float(v)) for v in row] + [repr(float(y))])


@dataclass(frozen=True)
class ColumnPredicate:
    """One comparison against a raw column, e.g. age < 30."""

    column: str
    op: str
    value: str

    _OPS = ("<=", ">=", "==", "<", ">")

    def test(self, cell: str) -> bool:
        left = _try_float(cell)
        right = _try_float(self.value)
        if self.op == "==":
            if left is not None and right is not None:
                return left == right
            return cell == self.value
        if left is None or right is None:
            raise ConfigError(
                f"filter {self.column}{self.op}{self.value}: non-numeric comparison "
                f"against cell {cell!r}"
            )
        if self.op == "<":
            return left < right
        if self.op == "<=":
            return left <= right
        if self.op == ">":
            return left > right
        return left >= right


def parse_filter(text: str) -> list[ColumnPredicate]:
    """Parse a conjunction like ``age<30 & region==north``."""
    predicates = []
    for clause in text.split("&"):
        clause = clause.strip()
        for op in ColumnPredicate._OPS:
            if op in clause:
                column, value = clause.split(op, 1)
                column, value = column.strip(), value.strip()
                if not column or not value:
                    raise ConfigError(f"malformed filter clause {clause!r}")
                predicates.append(ColumnPredicate(column=column, op=op, value=value))
                break
        else:
            raise ConfigError(f"filter clause {clause!r} has no comparison operator")
    return predicates


def filter_mask(tab: TabularFile, predicates) -> np.ndarray:
    """Boolean mask over the file's rows satisfying every predicate."""
    mask = np.ones(tab.n, dtype=bool)
    for pred in predicates:
        cells = tab.column(pred.column)
        mask &= np.array([pred.test(c) for c in cells])
    return mask
