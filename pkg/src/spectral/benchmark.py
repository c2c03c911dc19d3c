import math
import time
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence

import numpy as np
from scipy.linalg import circulant

from src.errors import InvalidConfig, NumericalError
from src.log.system_logger import Logger, get_system_logger
from src.spectral.dft import FrequencyFeatures, dft_nodes, idft_nodes
from src.spectral.operator import fgo_apply

LOG: Logger = get_system_logger(__name__)

DEFAULT_SIZES = (256, 512, 1024, 2048, 4096, 8192, 16384)
MAX_DENSE_N = 4096
SAMPLED_ROWS = 16
EQUIVALENCE_TOLERANCE = 1e-8


@dataclass(frozen=True)
class BenchRow:
    """
    Timings of one problem size.

    Attributes:
        n (int): Number of nodes.
        d (int): Feature width.
        spatial_seconds (float): Best time of the dense L X W product; nan when
            the dense operator is above the size cap.
        spectral_seconds (float): Best time of dft -> fgo_apply -> idft.
        residual (float): Max-abs difference of the two outputs.
        check (str): "dense" (full product compared) or "sampled" (rows of
            L X W computed from the circulant column).
    """
    n: int
    d: int
    spatial_seconds: float
    spectral_seconds: float
    residual: float
    check: str = "dense"

    @property
    def dense(self) -> bool:
        return self.check == "dense"


@dataclass(frozen=True)
class BenchReport:
    """
    Rows of a benchmark run with the fitted log-log slopes.

    `spatial_slope` covers the sizes the dense path was timed at,
    `spectral_slope` every size, `spectral_slope_common` the dense sizes only.
    """
    rows: List[BenchRow]
    spatial_slope: float
    spectral_slope: float
    spectral_slope_common: float

    @property
    def frequency_scales_better(self) -> bool:
        """Whether the frequency path's slope is strictly below the dense path's."""
        if math.isnan(self.spatial_slope) or math.isnan(self.spectral_slope):
            return False
        return self.spectral_slope < self.spatial_slope

    def as_table(self) -> List[dict]:
        return [
            {
                "n": row.n,
                "d": row.d,
                "spatial_seconds": row.spatial_seconds,
                "spectral_seconds": row.spectral_seconds,
                "residual": row.residual,
                "check": row.check,
            }
            for row in self.rows
        ]


def _best_time(fn: Callable[[], np.ndarray], repeats: int) -> float:
    best = np.inf
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return float(best)


def loglog_slope(sizes: Sequence[int], seconds: Sequence[float]) -> float:
    """Least-squares slope of log(seconds) against log(n)."""
    if len(sizes) < 2:
        return float("nan")
    return float(np.polyfit(np.log(sizes), np.log(np.maximum(seconds, 1e-12)), 1)[0])


def circulant_problem(n: int, d: int, rng: np.random.Generator):
    """
    Random circulant column with features and weight.

    The column is scaled by 1/n so outputs stay O(1) as n grows.
    """
    return rng.standard_normal(n) / n, rng.standard_normal((n, d)), rng.standard_normal((d, d))


def sampled_residual(column: np.ndarray, X: np.ndarray, W: np.ndarray, output: np.ndarray,
                     rows: np.ndarray) -> float:
    """
    Max-abs difference between `output` and L X W on the given rows, where
    L[i, j] = column[(i - j) mod n]; L itself is never formed.
    """
    n = column.shape[0]
    expected = np.stack([column[(i - np.arange(n)) % n] for i in rows]) @ X @ W
    return float(np.max(np.abs(output[rows] - expected)))


def check_equivalence(n: int, d: int, rng: np.random.Generator) -> float:
    """
    Max-abs difference between the spatial and frequency paths on one
    random circulant problem.
    """
    column, X, W = circulant_problem(n, d, rng)
    S = np.fft.fft(column)[:, None, None] * W[None, :, :]
    spectral = idft_nodes(fgo_apply(dft_nodes(X), S))
    return float(np.max(np.abs(circulant(column) @ X @ W - spectral)))


def run_bench(sizes: Sequence[int] = DEFAULT_SIZES, d: int = 8, repeats: int = 5, seed: int = 0,
              max_dense_n: Optional[int] = MAX_DENSE_N) -> BenchReport:
    """
    Times dense L X W against the frequency path on random circulant operators.

    Each size passes the equivalence gate before it is timed. Above
    `max_dense_n` the dense operator is not formed: the gate compares
    sampled rows and only the frequency path is timed.

    Raises:
        InvalidConfig: On empty sizes or non-positive d/repeats.
        NumericalError: If the two paths disagree beyond 1e-8.
    """
    if not sizes or min(sizes) < 1 or d < 1 or repeats < 1:
        raise InvalidConfig("bench needs positive sizes, width and repeat count")
    rng = np.random.default_rng(seed)
    rows: List[BenchRow] = []
    for n in sorted(sizes):
        column, X, W = circulant_problem(n, d, rng)
        S = np.fft.fft(column)[:, None, None] * W[None, :, :]

        def spectral() -> np.ndarray:
            return idft_nodes(fgo_apply(FrequencyFeatures(np.fft.fft(X, axis=0)), S))

        dense = max_dense_n is None or n <= max_dense_n
        if dense:
            L = circulant(column)

            def spatial() -> np.ndarray:
                return L @ X @ W

            residual = float(np.max(np.abs(spatial() - spectral())))
        else:
            LOG.info(f"bench n={n}: dense operator above {max_dense_n} nodes, "
                     f"spatial path not timed; checking {SAMPLED_ROWS} sampled rows")
            sample = rng.choice(n, size=min(n, SAMPLED_ROWS), replace=False)
            residual = sampled_residual(column, X, W, spectral(), sample)
        if residual > EQUIVALENCE_TOLERANCE:
            raise NumericalError(f"frequency path disagrees with L X W at n={n}: residual {residual:.3e}")

        row = BenchRow(n=n, d=d,
                       spatial_seconds=_best_time(spatial, repeats) if dense else float("nan"),
                       spectral_seconds=_best_time(spectral, repeats), residual=residual,
                       check="dense" if dense else "sampled")
        LOG.info(f"bench n={n} d={d}: spatial {row.spatial_seconds:.3e}s, spectral {row.spectral_seconds:.3e}s")
        rows.append(row)

    timed = [r for r in rows if r.dense]
    report = BenchReport(
        rows=rows,
        spatial_slope=loglog_slope([r.n for r in timed], [r.spatial_seconds for r in timed]),
        spectral_slope=loglog_slope([r.n for r in rows], [r.spectral_seconds for r in rows]),
        spectral_slope_common=loglog_slope([r.n for r in timed], [r.spectral_seconds for r in timed]),
    )
    if len(timed) >= 2 and not report.frequency_scales_better:
        LOG.warning(f"frequency path slope {report.spectral_slope:.3f} is not below "
                    f"the dense slope {report.spatial_slope:.3f}")
    return report
