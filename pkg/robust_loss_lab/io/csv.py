"""Dataset and matrix CSV files.

A dataset file has the header ``f0,...,f{d-1},label``, decimal float
features and a 0-based integer label, UTF-8, comma separated, ``\\n`` line
endings. Floats are written in shortest round-trip form, so
``load_csv(save_csv(D))`` reproduces ``D`` bit for bit.
"""
import csv
import logging
from pathlib import Path
from typing import Optional, Union

import numpy as np
import pandas as pd

from robust_loss_lab.core.errors import ParseError
from robust_loss_lab.dataset.base import Dataset

log = logging.getLogger(__name__)

PathLike = Union[str, Path]


def save_csv(dataset: Dataset, path: PathLike):
    """Writes a dataset in the CSV exchange format."""
    df = pd.DataFrame(dataset.features, columns=[f"f{j}" for j in range(dataset.d)])
    df["label"] = dataset.labels
    df.to_csv(path, index=False, lineterminator="\n", encoding="utf-8")
    log.info(f"Saved {dataset} to Path: {path}")


def _parse_float(cell: str, line: int, column: str) -> float:
    try:
        value = float(cell)
    except (TypeError, ValueError):
        raise ParseError(f"non-numeric feature {column}={cell!r}", line=line, token=cell)
    if not np.isfinite(value):
        raise ParseError(f"non-finite feature {column}={cell!r}", line=line, token=cell)
    return value


def _parse_label(cell: str, line: int, n_classes: Optional[int]) -> int:
    try:
        label = int(cell)
    except (TypeError, ValueError):
        raise ParseError(f"label {cell!r} is not an integer", line=line, token=cell)
    if label < 0 or (n_classes is not None and label >= n_classes):
        raise ParseError(f"label {label} outside [0, {n_classes})", line=line, token=cell)
    return label


def _ragged_line(path: PathLike) -> Optional[int]:
    """The 1-based line of the first row with more fields than the header."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = csv.reader(fh)
        width = len(next(rows, []))
        for row in rows:
            if len(row) > width:
                return rows.line_num
    return None


def load_csv(path: PathLike, n_classes: Optional[int] = None) -> Dataset:
    """Reads a dataset CSV, validating every row.

    Args:
        path: The file to read.
        n_classes (optional): The class count C. Defaults to ``max(label) + 1``.

    Returns:
        The Dataset.

    Raises:
        ParseError: On a bad header, a malformed row, a non-numeric feature or
            a label outside ``[0, C)``; the message names the 1-based line.
    """
    try:
        ragged = _ragged_line(path)
        if ragged is not None:
            raise ParseError("more fields than the header", line=ragged)
        raw = pd.read_csv(path, dtype=str, keep_default_na=False, encoding="utf-8")
    except pd.errors.ParserError as e:
        raise ParseError(f"malformed CSV: {e}")
    except pd.errors.EmptyDataError:
        raise ParseError("empty file", line=1)
    except OSError as e:
        raise ParseError(f"cannot read {path}: {e}", token=str(path))
    columns = list(raw.columns)
    expected = [f"f{j}" for j in range(len(columns) - 1)] + ["label"]
    if len(columns) < 2 or columns != expected:
        raise ParseError(f"header must be {','.join(expected)}, got {','.join(columns)}", line=1)
    if raw.empty:
        raise ParseError("no data rows", line=2)
    features = np.empty((len(raw), len(columns) - 1))
    labels = np.empty(len(raw), dtype=np.int64)
    for i, row in enumerate(raw.itertuples(index=False, name=None)):
        line = i + 2
        if any(not isinstance(cell, str) or cell == "" for cell in row):
            raise ParseError(f"expected {len(columns)} fields", line=line)
        features[i] = [_parse_float(cell, line, col) for cell, col in zip(row[:-1], columns[:-1])]
        labels[i] = _parse_label(row[-1], line, n_classes)
    dataset = Dataset(features, labels, n_classes)
    log.info(f"Loaded {dataset} from Path: {path}")
    return dataset


def load_matrix_csv(path: PathLike) -> np.ndarray:
    """Reads a header-less numeric CSV matrix (e.g. a quadratic form A)."""
    try:
        df = pd.read_csv(path, header=None, dtype=float, float_precision="round_trip")
    except (ValueError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise ParseError(f"bad matrix file {path}: {e}", token=str(path))
    return df.to_numpy()
