"""Published covering and quantization tables, and code to recompute them.

Tables 1 to 4 list the smallest radius giving 0.9 coverage (on average over
random designs) with the minimizing ``delta`` in brackets.  Tables 5 and 6
list the minimum of ``n^(2/d) E theta`` over ``delta``.  Each cell is
recomputed by a grid search over ``delta`` with common random numbers; the
quantization tables also carry the approximation-based optimum for the
families that have one.
"""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass

import numpy as np

from .designs import BETA, FACTORIAL, SOBOL, VERTEX_WITH, VERTEX_WITHOUT, DesignSpec
from .montecarlo import McConfig, _write_csv
from .tuner import APPROX, MONTE_CARLO, optimal_delta_for_coverage, optimal_delta_for_quantization

COVERAGE = "radius"
QUANTIZATION = "normalized_quantization"
TARGET = 0.9


@dataclass(frozen=True)
class RowSpec:
    """A table row: a design family with its fixed parameters."""

    label: str
    family: str
    alpha: float = 1.0
    fixed_delta: float | None = None

    def spec(self, d, n, seed=0) -> DesignSpec:
        return DesignSpec(self.family, d, n, delta=self.fixed_delta or 1.0, alpha=self.alpha, seed=seed)


@dataclass(frozen=True)
class PublishedTable:
    number: int
    d: int
    objective: str
    ns: tuple
    rows: tuple
    values: dict  # (label, n) -> (value, delta)

    def row(self, label) -> RowSpec:
        for r in self.rows:
            if r.label == label:
                return r
        raise KeyError(label)


def _rows(*items):
    return tuple(RowSpec(*it) for it in items)


def _d1(a):
    return (f"Design 1, alpha={a:g}", BETA, a)


_D2A = ("Design 2a", VERTEX_WITH, 0.0)
_D2B = ("Design 2b", VERTEX_WITHOUT, 0.0)
_D3 = ("Design 3", SOBOL, 0.0)
_D3_FIXED = ("Design 3, delta=1", SOBOL, 0.0, 1.0)
_D4 = ("Design 4", FACTORIAL, 0.0)


def _table(number, d, objective, ns, rows, grid):
    values = {}
    for row, cells in zip(rows, grid):
        for n, cell in zip(ns, cells):
            if cell is not None:
                values[(row.label, n)] = cell
    return PublishedTable(number, d, objective, tuple(ns), rows, values)


TABLES = {
    1: _table(
        1, 5, COVERAGE, (25, 50, 100, 500),
        _rows(_D2A, _d1(0.5), _d1(1.0), _d1(1.5)),
        [
            [(1.051, 0.44), (0.885, 0.50), (0.812, 0.50), (0.798, 0.50)],
            [(1.072, 0.68), (0.905, 0.78), (0.770, 0.78), (0.540, 0.80)],
            [(1.072, 0.78), (0.931, 0.86), (0.798, 0.98), (0.555, 1.00)],
            [(1.091, 0.92), (0.950, 0.96), (0.820, 0.98), (0.589, 1.00)],
        ],
    ),
    2: _table(
        2, 10, COVERAGE, (500, 1000, 5000, 10000),
        _rows(_D2A, _d1(0.5), _d1(1.0), _d1(1.5)),
        [
            [(1.228, 0.50), (1.135, 0.50), (1.073, 0.50), (1.071, 0.50)],
            [(1.271, 0.69), (1.165, 0.73), (0.954, 0.76), (0.886, 0.78)],
            [(1.297, 0.87), (1.194, 0.90), (0.992, 0.93), (0.917, 0.95)],
            [(1.320, 1.00), (1.220, 1.00), (1.032, 1.00), (0.953, 1.00)],
        ],
    ),
    3: _table(
        3, 10, COVERAGE, (64, 128, 512, 1024),
        _rows(_d1(0.5), _d1(1.5), _D2A, _D2B, _D3, _D3_FIXED, _D4),
        [
            [(1.629, 0.58), (1.505, 0.65), (1.270, 0.72), (1.165, 0.75)],
            [(1.635, 0.80), (1.525, 0.88), (1.310, 1.00), (1.210, 1.00)],
            [(1.610, 0.38), (1.490, 0.46), (1.228, 0.50), (1.132, 0.50)],
            [(1.609, 0.41), (1.475, 0.43), (1.178, 0.49), (1.075, 0.50)],
            [(1.595, 0.72), (1.485, 0.80), (1.280, 0.85), (1.170, 0.88)],
            [(1.678, 1.00), (1.534, 1.00), (1.305, 1.00), (1.187, 1.00)],
            [(1.530, 0.44), (1.395, 0.48), (1.115, 0.50), (1.075, 0.50)],
        ],
    ),
    4: _table(
        4, 20, COVERAGE, (64, 128, 512, 1024),
        _rows(_d1(0.5), _d1(1.5), _D2A, _D2B, _D3, _D3_FIXED, _D4),
        [
            [(2.540, 0.44), (2.455, 0.48), (2.285, 0.55), (2.220, 0.60)],
            [(2.545, 0.60), (2.460, 0.65), (2.290, 0.76), (2.215, 0.84)],
            [(2.538, 0.28), (2.445, 0.30), (2.270, 0.36), (2.180, 0.42)],
            [(2.538, 0.29), (2.445, 0.30), (2.253, 0.37), (2.173, 0.42)],
            [(2.520, 0.50), (2.445, 0.60), (2.285, 0.68), (2.196, 0.72)],
            [(2.750, 1.00), (2.656, 1.00), (2.435, 1.00), (2.325, 1.00)],
            [(2.490, 0.32), (2.410, 0.35), (2.220, 0.40), (2.125, 0.44)],
        ],
    ),
    5: _table(
        5, 10, QUANTIZATION, (64, 128, 512, 1024),
        _rows(_d1(0.5), _d1(1.0), _d1(1.5), _D2A, _D2B, _D3, _D3_FIXED, _D4),
        [
            [(4.072, 0.56), (4.013, 0.60), (3.839, 0.68), (3.770, 0.69)],
            [(4.153, 0.68), (4.105, 0.72), (3.992, 0.80), (3.925, 0.84)],
            [(4.164, 0.80), (4.137, 0.86), (4.069, 0.96), (4.026, 0.98)],
            [(3.971, 0.38), (3.866, 0.44), (3.670, 0.48), (3.704, 0.50)],
            [(3.955, 0.40), (3.798, 0.44), (3.453, 0.48), (3.348, 0.50)],
            [(3.998, 0.68), (3.973, 0.76), (3.936, 0.80), (3.834, 0.82)],
            [(4.569, 1.00), (4.425, 1.00), (4.239, 1.00), (4.094, 1.00)],
            [(3.663, 0.40), (3.548, 0.44), (3.221, 0.48), (3.348, 0.50)],
        ],
    ),
    6: _table(
        6, 20, QUANTIZATION, (64, 128, 512, 1024),
        _rows(_d1(0.5), _d1(1.0), _d1(1.5), _D2A, _D2B, _D3, _D3_FIXED, _D4),
        [
            [(7.541, 0.40), (7.515, 0.44), (7.457, 0.52), (7.421, 0.54)],
            [(7.552, 0.52), (7.563, 0.56), (7.528, 0.64), (7.484, 0.68)],
            [(7.561, 0.60), (7.571, 0.64), (7.556, 0.74), (7.527, 0.78)],
            [(7.488, 0.30), (7.461, 0.33), (7.346, 0.35), (7.248, 0.39)],
            [(7.487, 0.29), (7.458, 0.34), (7.345, 0.36), (7.234, 0.40)],
            [(7.445, 0.48), (7.464, 0.56), (7.487, 0.64), (7.453, 0.66)],
            [(9.089, 1.00), (9.133, 1.00), (8.871, 1.00), (8.681, 1.00)],
            [(7.298, 0.32), (7.270, 0.33), (7.133, 0.36), (7.016, 0.40)],
        ],
    ),
}

CSV_HEADER = [
    "table", "row", "family", "alpha", "d", "n", "method", "value", "delta",
    "published_value", "published_delta", "abs_diff_value", "abs_diff_delta", "approx_value", "approx_delta",
]


@dataclass(frozen=True)
class CellResult:
    table: int
    row: str
    family: str
    alpha: float
    d: int
    n: int
    method: str
    value: float
    delta: float
    published_value: float
    published_delta: float
    approx_value: float | None = None
    approx_delta: float | None = None
    std_error: float | None = None
    seconds: float = 0.0

    @property
    def abs_diff_value(self) -> float:
        return abs(self.value - self.published_value)

    @property
    def abs_diff_delta(self) -> float:
        return abs(self.delta - self.published_delta)

    @property
    def approx_relative_gap(self) -> float | None:
        """``|approx - MC| / MC`` for quantization cells with both values."""
        if self.approx_value is None:
            return None
        return abs(self.approx_value - self.value) / self.value

    def as_row(self):
        def opt(x):
            return "" if x is None else f"{x:.6g}"

        return [
            self.table, self.row, self.family, f"{self.alpha:g}", self.d, self.n, self.method,
            f"{self.value:.6f}", f"{self.delta:.2f}", f"{self.published_value:.3f}", f"{self.published_delta:.2f}",
            f"{self.abs_diff_value:.6f}", f"{self.abs_diff_delta:.2f}", opt(self.approx_value), opt(self.approx_delta),
        ]

    def to_dict(self) -> dict:
        return asdict(self)


def _approx_available(row: RowSpec, d, n) -> bool:
    if row.family not in (BETA, VERTEX_WITH, VERTEX_WITHOUT) or row.fixed_delta is not None:
        return False
    return not (row.family == VERTEX_WITHOUT and n >= 2**d)


def reproduce_cell(table: int, label: str, n: int, cfg: McConfig = McConfig(), method=MONTE_CARLO,
                   delta_grid=None, with_approx=None) -> CellResult:
    """Recompute one cell of a published table.

    Parameters
    ----------
    table : int
        Table number, 1 to 6.
    label : str
        Row label as in :data:`TABLES`.
    n : int
        Column.
    cfg : McConfig
        Monte Carlo budget for ``method="mc"``.
    method : {"mc", "approx"}
        Evaluation engine for the main value.  ``"approx"`` is only possible
        for Designs 1, 2a and 2b.
    with_approx : bool, optional
        Also compute the approximation-based optimum next to a Monte Carlo
        value.  Defaults to True for the quantization tables.
    """
    tab = TABLES[table]
    row = tab.row(label)
    published_value, published_delta = tab.values[(label, n)]
    spec = row.spec(tab.d, n, seed=cfg.seed)
    grid = [row.fixed_delta] if row.fixed_delta is not None else delta_grid
    if method == APPROX and not _approx_available(row, tab.d, n):
        raise ValueError(f"no approximation for {label!r} at d={tab.d}, n={n}")

    def tune(m):
        if tab.objective == COVERAGE:
            return optimal_delta_for_coverage(spec, TARGET, grid, cfg, m)
        return optimal_delta_for_quantization(spec, grid, cfg, m)

    t0 = time.perf_counter()
    res = tune(method)
    se = None
    if res.std_errors:
        se = res.std_errors[[d for d, _ in res.trace].index(res.delta_star)]
    if with_approx is None:
        with_approx = tab.objective == QUANTIZATION
    ap_value = ap_delta = None
    if with_approx and method == MONTE_CARLO and _approx_available(row, tab.d, n):
        ap = tune(APPROX)
        ap_value, ap_delta = ap.objective_star, ap.delta_star
    return CellResult(
        table, label, row.family, row.alpha, tab.d, n, method, res.objective_star, res.delta_star,
        published_value, published_delta, ap_value, ap_delta, se, time.perf_counter() - t0,
    )


def reproduce_table(table: int, cfg: McConfig = McConfig(), method=MONTE_CARLO, rows=None, ns=None,
                    delta_grid=None, with_approx=None, progress=None) -> list[CellResult]:
    """Recompute every cell (or the selected ``rows`` and ``ns``) of a table.

    ``progress``, if given, is called with each finished :class:`CellResult`.
    """
    if table not in TABLES:
        raise ValueError(f"table must be one of {sorted(TABLES)}, got {table}")
    tab = TABLES[table]
    out = []
    for row in tab.rows:
        if rows is not None and row.label not in rows:
            continue
        for n in tab.ns:
            if (ns is not None and n not in ns) or (row.label, n) not in tab.values:
                continue
            m = method
            if m == APPROX and not _approx_available(row, tab.d, n):
                m = MONTE_CARLO
            cell = reproduce_cell(table, row.label, n, cfg, m, delta_grid, with_approx)
            out.append(cell)
            if progress is not None:
                progress(cell)
    return out


def write_table_csv(cells, path_or_file):
    _write_csv(path_or_file, CSV_HEADER, (c.as_row() for c in cells))


def max_abs_diff(cells) -> tuple[float, float]:
    """Largest value and delta deviations from the published numbers."""
    if not cells:
        return 0.0, 0.0
    return (float(np.max([c.abs_diff_value for c in cells])), float(np.max([c.abs_diff_delta for c in cells])))


__all__ = [
    "CSV_HEADER",
    "CellResult",
    "PublishedTable",
    "RowSpec",
    "TABLES",
    "max_abs_diff",
    "reproduce_cell",
    "reproduce_table",
    "write_table_csv",
]
