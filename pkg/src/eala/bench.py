"""Wall-time scaling benchmarks and an analytic peak-allocation model.

Memory is modeled, not measured: each mode has a closed-form byte count
per allocation class (n^2, n*c, c^2, n, c), mirroring the buffers its
implementation actually creates.  That keeps the O(n c + c^2) versus
O(n^2) claim testable without OS-specific probes.  Times are medians over
repeated runs with a discarded warm-up.
"""

from __future__ import annotations

import statistics
import time
from dataclasses import dataclass

import numpy as np

from .core import EalaConfig, eala_attention
from .oracle import exact_attention
from .workload import gen_workload_raw

MODES = ("exact", "eala-linear", "eala-quadratic")

_F8 = 8  # bytes per float64

# Refuse any run whose modeled peak exceeds this (override per call).
DEFAULT_MEM_LIMIT_BYTES = 4 << 30


class BenchResourceError(RuntimeError):
    """Modeled allocation exceeds the configured memory budget."""


@dataclass
class BenchRecord:
    mode: str
    n: int
    c: int
    wall_time: float
    analytic_peak_bytes: int


def allocation_model(mode: str, n: int, c: int) -> dict[str, int]:
    """Peak live bytes per allocation class for one forward pass.

    exact............ Q,K,V,out (4nc) + one n*n score/weight buffer + row stats
    eala-quadratic... Q,K,V,khat,out (5nc) + one n*n weight buffer + gram
                      + per-query stats
    eala-linear...... Q,K,V,khat,scaled-Q,out (6nc) + gram and KV (2c^2)
                      + per-query stats; no n^2 class at all
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    if n < 1 or c < 1:
        raise ValueError("n and c must be at least 1")
    if mode == "exact":
        return {
            "n2": _F8 * n * n,
            "nc": _F8 * 4 * n * c,
            "c2": 0,
            "n": _F8 * n,
            "c": 0,
        }
    if mode == "eala-quadratic":
        return {
            "n2": _F8 * n * n,
            "nc": _F8 * 5 * n * c,
            "c2": _F8 * c * c,
            "n": _F8 * 4 * n,
            "c": _F8 * 2 * c,
        }
    return {
        "n2": 0,
        "nc": _F8 * 6 * n * c,
        "c2": _F8 * 2 * c * c,
        "n": _F8 * 4 * n,
        "c": _F8 * 3 * c,
    }


def _forward_fn(mode: str):
    if mode == "exact":
        return lambda q, k, v: exact_attention(q, k, v)
    path = "linear" if mode == "eala-linear" else "quadratic"
    cfg = EalaConfig(path=path)
    return lambda q, k, v: eala_attention(q, k, v, cfg)


def bench_sweep(mode: str, n_list, c: int, repeats: int = 5, seed: int = 0,
                mem_limit_bytes: int = DEFAULT_MEM_LIMIT_BYTES) -> list[BenchRecord]:
    """Median wall time of `mode` at each n; one warm-up run is discarded.

    Repeats run strictly sequentially so timings never contend with each
    other.  Workloads are uncalibrated Gaussians: values do not affect the
    arithmetic cost being measured.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    sizes = [int(n) for n in n_list]
    if not sizes or any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise ValueError("n_list must be nonempty and strictly ascending")
    if repeats < 1:
        raise ValueError("repeats must be at least 1")
    fn = _forward_fn(mode)
    records = []
    for n in sizes:
        model = allocation_model(mode, n, c)
        peak = sum(model.values())
        if peak > mem_limit_bytes:
            raise BenchResourceError(
                f"{mode} at n={n}, c={c} models {peak} bytes, "
                f"over the {mem_limit_bytes}-byte budget"
            )
        q, k, v = gen_workload_raw(n, c, seed)
        fn(q, k, v)  # warm-up, discarded
        times = []
        for _ in range(repeats):
            t0 = time.perf_counter()
            fn(q, k, v)
            times.append(time.perf_counter() - t0)
        records.append(BenchRecord(
            mode=mode, n=n, c=c,
            wall_time=float(statistics.median(times)),
            analytic_peak_bytes=peak,
        ))
    return records


def fit_loglog_slope(records) -> float:
    """Least-squares slope of log(wall_time) against log(n).

    Accepts BenchRecords or anything with n and wall_time attributes;
    needs at least three distinct sizes to fit.
    """
    ns = np.asarray([r.n for r in records], dtype=np.float64)
    ts = np.asarray([r.wall_time for r in records], dtype=np.float64)
    if len(set(ns.tolist())) < 3:
        raise ValueError("need at least 3 records with distinct n")
    if np.any(ts <= 0.0):
        raise ValueError("wall times must be positive")
    slope, _ = np.polyfit(np.log(ns), np.log(ts), 1)
    return float(slope)


def records_to_csv(records) -> str:
    """Fixed-schema CSV: mode,n,c,wall_time,analytic_peak_bytes."""
    lines = ["mode,n,c,wall_time,analytic_peak_bytes"]
    for r in records:
        lines.append(f"{r.mode},{r.n},{r.c},{r.wall_time!r},{r.analytic_peak_bytes}")
    return "\n".join(lines) + "\n"
