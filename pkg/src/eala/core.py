"""Linear-complexity attention with entropy-matched per-query temperatures.

The pipeline replaces each softmax attention row with the affine family

    w_j = (1 + (q . khat_j) / theta) / n,

where keys are centered so the weights sum to one for any theta, and theta
is chosen per query so the family's entropy matches an estimate of the
softmax row's entropy.  All per-query quantities come from two key-level
summaries (the centered key sum and the C x C Gram matrix), so nothing on
the linear path ever touches an n x n buffer.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .oracle import AttnResult, score_row_entropies

_ENTROPY_SOURCES = ("approx", "exact")
_PATHS = ("auto", "quadratic", "linear")


@dataclass(frozen=True)
class EalaConfig:
    """Knobs for the linearized attention pipeline.

    epsilon        : additive floor on finite temperatures, keeps 1/theta bounded
    entropy_source : "approx" uses the moment-based estimate; "exact" pays
                     O(N^2 C) for true softmax entropies (diagnostic mode)
    path           : forward branch; "auto" picks quadratic only when C > N
    denom_floor    : below this, the entropy gap or S2 is treated as zero and
                     the temperature degenerates to the uniform sentinel
    clamp_entropy  : clip entropy estimates into [0, log n] before use
    scale_scores   : divide scores by sqrt(C) (off by default; the family is
                     defined on raw dot products)
    """

    epsilon: float = 1e-8
    entropy_source: str = "approx"
    path: str = "auto"
    denom_floor: float = 1e-12
    clamp_entropy: bool = True
    scale_scores: bool = False

    def __post_init__(self):
        if not (np.isfinite(self.epsilon) and self.epsilon > 0.0):
            raise ValueError("epsilon must be positive")
        if not (np.isfinite(self.denom_floor) and self.denom_floor > 0.0):
            raise ValueError("denom_floor must be positive")
        if self.entropy_source not in _ENTROPY_SOURCES:
            raise ValueError(f"entropy_source must be one of {_ENTROPY_SOURCES}")
        if self.path not in _PATHS:
            raise ValueError(f"path must be one of {_PATHS}")


@dataclass
class KeyMoments:
    """Key-level summaries from one O(N C^2) pass over centered keys.

    mean             : the key average subtracted during centering
    key_sum_centered : sum of centered keys, zero up to round-off
    gram             : C x C matrix M with q M q^T = sum_j (q . khat_j)^2
    count            : number of keys n
    """

    mean: np.ndarray
    key_sum_centered: np.ndarray
    gram: np.ndarray
    count: int


@dataclass
class ScoreMoments:
    """Per-query score sums S1 = sum_j q.khat_j and S2 = sum_j (q.khat_j)^2."""

    s1: float
    s2: float


def center_keys(k_mat) -> tuple[np.ndarray, np.ndarray]:
    """Subtract the row mean: khat_j = k_j - mean.  Returns (khat, mean)."""
    k = np.asarray(k_mat, dtype=np.float64)
    if k.ndim != 2 or k.shape[0] == 0:
        raise ValueError("center_keys expects a nonempty 2-D key matrix")
    mean = np.mean(k, axis=0)
    return k - mean, mean


def key_moments(khat, mean: np.ndarray | None = None) -> KeyMoments:
    """Summaries of a centered key matrix; `mean` is carried for reporting."""
    kh = np.asarray(khat, dtype=np.float64)
    if kh.ndim != 2 or kh.shape[0] == 0:
        raise ValueError("key_moments expects a nonempty 2-D matrix")
    c = kh.shape[1]
    if mean is None:
        mean = np.zeros(c)
    return KeyMoments(
        mean=np.asarray(mean, dtype=np.float64),
        key_sum_centered=np.sum(kh, axis=0),
        gram=kh.T @ kh,
        count=kh.shape[0],
    )


def score_moments(q_vec, m: KeyMoments) -> ScoreMoments:
    """S1 and S2 for one query in O(C^2), never touching individual keys.

    S2 = q M q^T is clamped at zero: M is positive semidefinite, so any
    negative value is rounding noise.
    """
    q = np.asarray(q_vec, dtype=np.float64)
    if q.ndim != 1 or q.size != m.gram.shape[0]:
        raise ValueError(f"query length {q.shape} does not match moments of dim {m.gram.shape[0]}")
    s1 = float(q @ m.key_sum_centered)
    s2 = float(q @ m.gram @ q)
    return ScoreMoments(s1=s1, s2=max(s2, 0.0))


def _batch_score_moments(q_mat: np.ndarray, m: KeyMoments) -> tuple[np.ndarray, np.ndarray]:
    s1 = q_mat @ m.key_sum_centered
    s2 = np.sum((q_mat @ m.gram) * q_mat, axis=1)
    np.maximum(s2, 0.0, out=s2)
    return s1, s2


def _approx_entropy_arr(s1: np.ndarray, s2: np.ndarray, n: int,
                        clamp: bool) -> np.ndarray:
    base = n + s1
    if np.any(base <= 0.0):
        raise ValueError("n + S1 must be positive for the entropy expansion")
    h = np.log(base) - (s1 + s2) / base
    if clamp:
        np.clip(h, 0.0, np.log(n), out=h)
    return h


def approx_entropy(sm: ScoreMoments, n: int, clamp: bool = True) -> float:
    """Second-order entropy estimate from score moments alone.

        Hhat = log(n + S1) - (S1 + S2) / (n + S1)

    With centered keys S1 vanishes and this is log n - S2/n.  The estimate
    overshoots low for peaked rows, so with `clamp` it is clipped into the
    feasible range [0, log n].
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    h = _approx_entropy_arr(
        np.asarray([sm.s1], dtype=np.float64),
        np.asarray([sm.s2], dtype=np.float64),
        n, clamp,
    )
    return float(h[0])


def _theta_star_arr(s2: np.ndarray, entropy: np.ndarray, n: int,
                    cfg: EalaConfig) -> np.ndarray:
    log_n = np.log(float(n))
    ent = np.asarray(entropy, dtype=np.float64)
    if cfg.clamp_entropy:
        ent = np.clip(ent, 0.0, log_n)
    elif np.any(ent < 0.0) or np.any(ent > log_n):
        raise ValueError("entropy outside [0, log n]; enable clamp_entropy or fix inputs")
    gap = log_n - ent
    degenerate = (s2 <= cfg.denom_floor) | (gap <= cfg.denom_floor)
    # avoid 0/0 in the masked lanes; they are overwritten with the sentinel
    safe_gap = np.where(degenerate, 1.0, gap)
    theta = np.sqrt(s2 / (2.0 * n * safe_gap)) + cfg.epsilon
    theta[degenerate] = np.inf
    return theta


def theta_star(s2: float, entropy: float, n: int, cfg: EalaConfig) -> float:
    """Closed-form temperature matching the affine family's entropy to `entropy`.

        theta* = sqrt(S2 / (2 n (log n - entropy))) + epsilon

    When S2 or the entropy gap falls below cfg.denom_floor the family target
    is (indistinguishable from) uniform and the sentinel +inf is returned;
    downstream forwards treat 1/theta as 0.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if not (np.isfinite(s2) and s2 >= 0.0):
        raise ValueError("s2 must be finite and nonnegative")
    out = _theta_star_arr(
        np.asarray([s2], dtype=np.float64),
        np.asarray([entropy], dtype=np.float64),
        n, cfg,
    )
    return float(out[0])


def _check_forward_args(q_mat, khat, v_mat, theta):
    q = np.asarray(q_mat, dtype=np.float64)
    kh = np.asarray(khat, dtype=np.float64)
    v = np.asarray(v_mat, dtype=np.float64)
    th = np.asarray(theta, dtype=np.float64)
    if q.ndim != 2 or kh.ndim != 2 or v.ndim != 2:
        raise ValueError("Q, khat, V must be 2-D")
    if q.shape[1] != kh.shape[1]:
        raise ValueError(f"feature dims differ: Q {q.shape} vs khat {kh.shape}")
    if kh.shape[0] != v.shape[0]:
        raise ValueError(f"khat and V row counts differ: {kh.shape[0]} vs {v.shape[0]}")
    if th.ndim != 1 or th.size != q.shape[0]:
        raise ValueError("theta must be 1-D with one entry per query")
    if np.any(np.isnan(th)) or np.any(th <= 0.0):
        raise ValueError("theta entries must be positive (or the +inf sentinel)")
    return q, kh, v, th


def eala_forward_quadratic(q_mat, khat, v_mat, theta) -> np.ndarray:
    """Materialized-weights branch, O(N^2 C) time and one n^2 buffer.

    o_i = sum_j ((1 + (q_i . khat_j) / theta_i) / n) v_j.  Sentinel
    temperatures contribute 1/theta = 0, i.e. plain averaging.  Weights may
    go negative at small theta; they are used as-is.
    """
    q, kh, v, th = _check_forward_args(q_mat, khat, v_mat, theta)
    n = kh.shape[0]
    w = q @ kh.T
    w /= th[:, None]
    w += 1.0
    w /= n
    return w @ v


def eala_forward_linear(q_mat, khat, v_mat, theta) -> np.ndarray:
    """Moment branch, O(N C^2) time, no n^2 allocation.

    Algebraically identical to the quadratic branch:

        o_i = (sum_j v_j + (q_i / theta_i) KV) / n,   KV = khat^T V.
    """
    q, kh, v, th = _check_forward_args(q_mat, khat, v_mat, theta)
    n = kh.shape[0]
    v_sum = np.sum(v, axis=0)
    kv = kh.T @ v
    scaled_q = q / th[:, None]
    return (v_sum[None, :] + scaled_q @ kv) / n


def eala_weights(q_mat, khat, theta) -> np.ndarray:
    """Full (m, n) weight matrix of the affine family; diagnostic only.

    Rows sum to one by centering, independent of theta, but entries may be
    negative when theta is close to the validity edge max_j |q . khat_j|.
    """
    q = np.asarray(q_mat, dtype=np.float64)
    kh = np.asarray(khat, dtype=np.float64)
    th = np.asarray(theta, dtype=np.float64)
    if q.ndim != 2 or kh.ndim != 2 or q.shape[1] != kh.shape[1]:
        raise ValueError("incompatible query/key shapes")
    if th.ndim != 1 or th.size != q.shape[0]:
        raise ValueError("theta must be 1-D with one entry per query")
    n = kh.shape[0]
    return (1.0 + (q @ kh.T) / th[:, None]) / n


def select_path(path: str, n: int, c: int) -> str:
    """Resolve the forward branch: quadratic exactly when C > N under auto."""
    if path == "auto":
        return "quadratic" if c > n else "linear"
    if path in ("quadratic", "linear"):
        return path
    raise ValueError(f"unknown path {path!r}")


def eala_attention(q_mat, k_mat, v_mat, cfg: EalaConfig | None = None) -> AttnResult:
    """Full pipeline: center, summarize, estimate entropy, match, average.

    Returns the output matrix along with the per-query entropy estimates
    that fed the temperature solve and the temperatures themselves.
    """
    if cfg is None:
        cfg = EalaConfig()
    q = np.asarray(q_mat, dtype=np.float64)
    k = np.asarray(k_mat, dtype=np.float64)
    v = np.asarray(v_mat, dtype=np.float64)
    if q.ndim != 2 or k.ndim != 2 or v.ndim != 2:
        raise ValueError("Q, K, V must be 2-D")
    if q.shape[1] != k.shape[1]:
        raise ValueError(f"feature dims differ: Q {q.shape} vs K {k.shape}")
    if k.shape[0] != v.shape[0]:
        raise ValueError(f"K and V row counts differ: {k.shape[0]} vs {v.shape[0]}")
    khat, mean = center_keys(k)
    if cfg.scale_scores:
        khat = khat / np.sqrt(q.shape[1])
    n = khat.shape[0]
    moments = key_moments(khat, mean)
    s1, s2 = _batch_score_moments(q, moments)
    if cfg.entropy_source == "approx":
        ent = _approx_entropy_arr(s1, s2, n, cfg.clamp_entropy)
    else:
        ent = score_row_entropies(q @ khat.T)
    theta = _theta_star_arr(s2, ent, n, cfg)
    branch = select_path(cfg.path, n=n, c=q.shape[1])
    if branch == "quadratic":
        out = eala_forward_quadratic(q, khat, v, theta)
    else:
        out = eala_forward_linear(q, khat, v, theta)
    return AttnResult(output=out, entropies=ent, thetas=theta)
