"""Wall-clock comparison of the structured transform against dense projection.

Timing discipline: one warm-up pass, then the median of at least five
repeats, each repeat a single-threaded loop of per-point applies.  The
loop (rather than one big matmul) keeps the comparison about the
transforms' arithmetic, and the thread cap keeps BLAS from skewing the
dense side.
"""

from __future__ import annotations

import statistics
import time
from dataclasses import dataclass

from threadpoolctl import threadpool_limits

from .core import EmbedParams, derive_rng, select_params, standard_normals
from .errors import DomainError
from .fjlt import sample_fjlt, sample_gaussian

MIN_REPEATS = 5


@dataclass(frozen=True)
class BenchRow:
    method: str
    n: int
    d: int
    k: int
    q: float
    nnz: int
    expected_nnz: float
    seconds_total: float
    seconds_per_point: float
    repeats: int

    def __post_init__(self):
        if self.nnz < 0 or self.seconds_total <= 0.0:
            raise DomainError("benchmark row needs nnz >= 0 and positive time")

    def to_dict(self) -> dict:
        return dict(self.__dict__)


BENCH_COLUMNS = tuple(BenchRow.__dataclass_fields__)


def _time_loop(apply_one, points, repeats: int) -> float:
    apply_one(points[0])  # warm-up
    samples = []
    for _ in range(repeats):
        start = time.perf_counter()
        for row in points:
            apply_one(row)
        samples.append(time.perf_counter() - start)
    return statistics.median(samples)


def bench_point(params: EmbedParams, repeats: int = MIN_REPEATS, seed: int = 0) -> list[BenchRow]:
    """Time both transforms on one (n, d) configuration at equal k."""
    if repeats < MIN_REPEATS:
        raise DomainError(f"need at least {MIN_REPEATS} repeats, got {repeats}")
    points = standard_normals(derive_rng(seed, 300), (params.n, params.d))
    fjlt = sample_fjlt(params, seed)
    gauss = sample_gaussian(params, seed)
    with threadpool_limits(limits=1):
        t_fjlt = _time_loop(fjlt.apply, points, repeats)
        t_gauss = _time_loop(gauss.apply, points, repeats)
    expected = params.k * params.d * params.q
    return [
        BenchRow(
            method="fjlt",
            n=params.n,
            d=params.d,
            k=params.k,
            q=params.q,
            nnz=fjlt.projection.nnz,
            expected_nnz=expected,
            seconds_total=t_fjlt,
            seconds_per_point=t_fjlt / params.n,
            repeats=repeats,
        ),
        BenchRow(
            method="gaussian",
            n=params.n,
            d=params.d,
            k=params.k,
            q=params.q,
            nnz=params.k * params.d,
            expected_nnz=expected,
            seconds_total=t_gauss,
            seconds_per_point=t_gauss / params.n,
            repeats=repeats,
        ),
    ]


def run_benchmark(
    d_grid: tuple[int, ...] = (1024, 4096),
    n_grid: tuple[int, ...] = (256,),
    epsilon: float = 0.5,
    delta: float = 0.1,
    lam: float = 256.0,
    repeats: int = MIN_REPEATS,
    seed: int = 0,
) -> list[BenchRow]:
    rows = []
    for d in d_grid:
        for n in n_grid:
            params = select_params(n, d, epsilon, delta, lam)
            rows.extend(bench_point(params, repeats=repeats, seed=seed))
    return rows


def rows_to_csv(rows: list[BenchRow]) -> str:
    lines = [",".join(BENCH_COLUMNS)]
    for row in rows:
        record = row.to_dict()
        lines.append(",".join(repr(record[c]) if isinstance(record[c], float) else str(record[c]) for c in BENCH_COLUMNS))
    return "\n".join(lines) + "\n"
