"""Offset/SNR sweeps of the quantization losses and table file I/O.

A sweep evaluates one loss kind over an ascending offset grid for a list of
SNRs, in dB. SNR conversion follows the two conventions of the analysis:
deterministic SNR is the squared channel gain (zeta = 10**(dB/20)) and
hybrid SNR is the prior variance itself (sigma2 = 10**(dB/10)), with the
noise variance fixed at one throughout.

Tables serialize as bare whitespace-delimited text (column 0 the offset,
one dB column per SNR), as CSV with a header row naming the SNRs, or as
JSON embedding both grids. Text formats print 17 significant digits so a
read-back reproduces every value bit-exactly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .bounds import HybridPrior, QuadratureSpec, loss_deterministic, loss_hybrid
from .errors import QuadratureError, SingularFisherError

LOSS_KINDS = ("chi", "chi_star")
SWEEP_MODES = ("deterministic", "hybrid")
TABLE_FORMATS = ("paper_txt", "csv", "json")

DEFAULT_ALPHA_MIN = 0.0
DEFAULT_ALPHA_MAX = 1.0
DEFAULT_ALPHA_STEP = 0.05
DEFAULT_SNR_DB = (-25.0, -10.0, -5.0, -2.5)


def snr_db_to_zeta(snr_db: float) -> float:
    """Deterministic convention: SNR is the squared gain, so gain = 10**(dB/20)."""
    return 10.0 ** (snr_db / 20.0)


def snr_db_to_sigma2(snr_db: float) -> float:
    """Hybrid convention: SNR is the prior variance, sigma2 = 10**(dB/10)."""
    return 10.0 ** (snr_db / 10.0)


def make_alpha_grid(
    alpha_min: float = DEFAULT_ALPHA_MIN,
    alpha_max: float = DEFAULT_ALPHA_MAX,
    step: float = DEFAULT_ALPHA_STEP,
) -> np.ndarray:
    """Ascending offset grid from min to max inclusive, robust to float drift."""
    if step <= 0.0 or alpha_max < alpha_min:
        raise ValueError("need step > 0 and alpha_max >= alpha_min")
    count = int(round((alpha_max - alpha_min) / step)) + 1
    return alpha_min + step * np.arange(count)


@dataclass(frozen=True)
class SweepTable:
    """Loss values in dB over an (offset grid) x (SNR list) lattice."""

    kind: tuple[str, str]
    alpha_grid: np.ndarray
    snr_db: np.ndarray
    values_db: np.ndarray

    def __post_init__(self):
        kind = (str(self.kind[0]), str(self.kind[1]))
        if kind[0] not in LOSS_KINDS or kind[1] not in SWEEP_MODES:
            raise ValueError(f"kind must be ({LOSS_KINDS}) x ({SWEEP_MODES}), got {kind}")
        alpha = np.asarray(self.alpha_grid, dtype=np.float64)
        snr = np.asarray(self.snr_db, dtype=np.float64)
        vals = np.asarray(self.values_db, dtype=np.float64)
        if alpha.ndim != 1 or snr.ndim != 1 or alpha.size == 0 or snr.size == 0:
            raise ValueError("grids must be non-empty 1-D vectors")
        if np.any(np.diff(alpha) <= 0.0):
            raise ValueError("offset grid must be strictly ascending")
        if vals.shape != (alpha.size, snr.size):
            raise ValueError(
                f"values shape {vals.shape} does not match grid ({alpha.size}, {snr.size})"
            )
        if not np.all(np.isfinite(vals)):
            raise ValueError("table contains non-finite loss values")
        for name, arr in (("alpha_grid", alpha), ("snr_db", snr), ("values_db", vals)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "kind", kind)


def sweep_loss(
    kind: tuple[str, str],
    alpha_grid,
    snr_db_list,
    quad: QuadratureSpec = QuadratureSpec(),
) -> SweepTable:
    """Evaluate one loss kind over the grid, emitting dB values.

    Numerical failures are re-raised as the same error class with the grid
    coordinates attached, so a sweep over extreme offsets fails loudly and
    identifiably.
    """
    alpha_grid = np.asarray(alpha_grid, dtype=np.float64)
    snr_db_list = np.asarray(snr_db_list, dtype=np.float64)
    which, mode = kind
    values = np.empty((alpha_grid.size, snr_db_list.size))
    for j, snr in enumerate(snr_db_list):
        for i, alpha in enumerate(alpha_grid):
            try:
                if mode == "deterministic":
                    report = loss_deterministic(snr_db_to_zeta(snr), float(alpha))
                else:
                    report = loss_hybrid(float(alpha), HybridPrior(snr_db_to_sigma2(snr)), quad)
            except (SingularFisherError, QuadratureError, ValueError) as err:
                raise type(err)(
                    f"{err} [sweep grid point alpha={alpha:g}, snr_db={snr:g}]"
                ) from err
            values[i, j] = report.chi_db if which == "chi" else report.chi_star_db
    return SweepTable(kind=(which, mode), alpha_grid=alpha_grid, snr_db=snr_db_list, values_db=values)


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def format_table(table: SweepTable, fmt: str) -> str:
    """Render a table in one of the supported formats."""
    if fmt == "paper_txt":
        lines = [
            " ".join([_fmt(a)] + [_fmt(v) for v in row])
            for a, row in zip(table.alpha_grid, table.values_db)
        ]
        return "\n".join(lines) + "\n"
    if fmt == "csv":
        header = ",".join(["alpha"] + [f"snr_db={_fmt(s)}" for s in table.snr_db])
        lines = [header] + [
            ",".join([_fmt(a)] + [_fmt(v) for v in row])
            for a, row in zip(table.alpha_grid, table.values_db)
        ]
        return "\n".join(lines) + "\n"
    if fmt == "json":
        payload = {
            "kind": list(table.kind),
            "alpha_grid": table.alpha_grid.tolist(),
            "snr_db": table.snr_db.tolist(),
            "values_db": table.values_db.tolist(),
        }
        return json.dumps(payload, indent=2) + "\n"
    raise ValueError(f"unknown table format {fmt!r}; expected one of {TABLE_FORMATS}")


def write_table(table: SweepTable, path, fmt: str = "paper_txt") -> None:
    """Serialize a table to ``path``; see :func:`format_table` for formats."""
    text = format_table(table, fmt)
    try:
        with open(path, "w") as fh:
            fh.write(text)
    except OSError as err:
        raise OSError(f"cannot write table to {path}: {err}") from err


def read_table(path, fmt: str, kind: tuple[str, str] | None = None) -> SweepTable:
    """Read a table written by :func:`write_table` (csv or json formats).

    CSV files do not record the loss kind, so it must be supplied; JSON
    files embed it. The bare text format carries no grid metadata and is
    write-only.
    """
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as err:
        raise OSError(f"cannot read table from {path}: {err}") from err
    if fmt == "json":
        payload = json.loads(text)
        return SweepTable(
            kind=tuple(payload["kind"]),
            alpha_grid=np.array(payload["alpha_grid"]),
            snr_db=np.array(payload["snr_db"]),
            values_db=np.array(payload["values_db"]),
        )
    if fmt == "csv":
        if kind is None:
            raise ValueError("reading a csv table requires the loss kind")
        lines = [ln for ln in text.splitlines() if ln]
        cells = lines[0].split(",")
        if cells[0] != "alpha":
            raise ValueError(f"malformed csv table header in {path}")
        snr = np.array([float(c.split("=", 1)[1]) for c in cells[1:]])
        body = np.array([[float(c) for c in ln.split(",")] for ln in lines[1:]])
        return SweepTable(kind=kind, alpha_grid=body[:, 0], snr_db=snr, values_db=body[:, 1:])
    raise ValueError(f"cannot read format {fmt!r}; expected csv or json")


def table_equal(a: SweepTable, b: SweepTable) -> bool:
    """Bit-exact equality of two tables (kind, grids and values)."""
    return (
        a.kind == b.kind
        and a.alpha_grid.shape == b.alpha_grid.shape
        and a.snr_db.shape == b.snr_db.shape
        and bool(np.all(a.alpha_grid == b.alpha_grid))
        and bool(np.all(a.snr_db == b.snr_db))
        and bool(np.all(a.values_db == b.values_db))
    )


def parse_snr_list(text: str) -> list[float]:
    """Parse a comma-separated SNR list like '-25,-10,-5,-2.5'."""
    try:
        values = [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as err:
        raise ValueError(f"bad SNR list {text!r}: {err}") from err
    if not values:
        raise ValueError("SNR list is empty")
    if not all(math.isfinite(v) for v in values):
        raise ValueError(f"SNR list contains non-finite values: {text!r}")
    return values
