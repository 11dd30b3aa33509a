"""Exact softmax attention and the entropy machinery used as ground truth.

The routines here are quadratic in sequence length on purpose.  They trade
speed for being independently checkable: row entropies come straight from
the definition, the KL decomposition is evaluated term by term, and the
temperature solver is a plain bisection with no closed-form shortcuts.
Everything downstream is validated against this module.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Row-block width for the in-place softmax pass.  Bounds scratch memory at
# O(block * n) so the only n^2 buffer alive is the score matrix itself.
_SOFTMAX_BLOCK = 256

# Probability vectors must sum to 1 within this before we trust them.
SIMPLEX_TOL = 1e-12


@dataclass
class AttnResult:
    """Output of an attention forward pass.

    output     : (m, d) matrix, one row per query
    weights    : (m, n) attention weights, kept only when requested
    entropies  : per-query Shannon entropy of the weight row, in nats
    thetas     : per-query temperatures, populated by the linear-family path
    """

    output: np.ndarray
    weights: np.ndarray | None = None
    entropies: np.ndarray | None = None
    thetas: np.ndarray | None = None


@dataclass
class KlDecomposition:
    kl: float
    entropy_gap: float
    cross_term: float
    bound: float


def _check_prob_vector(p, name: str = "p") -> np.ndarray:
    p = np.asarray(p, dtype=np.float64)
    if p.ndim != 1 or p.size == 0:
        raise ValueError(f"{name} must be a nonempty 1-D array")
    if not np.all(np.isfinite(p)):
        raise ValueError(f"{name} has non-finite entries")
    if np.any(p < 0.0):
        raise ValueError(f"{name} has negative entries")
    s = float(np.sum(p))
    if abs(s - 1.0) > SIMPLEX_TOL:
        raise ValueError(f"{name} sums to {s!r}, not 1")
    return p


def _entropy_unchecked(p: np.ndarray) -> float:
    mask = p > 0.0
    q = p[mask]
    return float(-np.sum(q * np.log(q)))


def shannon_entropy(p) -> float:
    """Shannon entropy in nats; zero entries contribute zero."""
    p = _check_prob_vector(p)
    return _entropy_unchecked(p)


def entropy_from_scores(scores) -> float:
    """Entropy of softmax(scores) without forming the probabilities naively.

    Uses the shifted identity H = log(sum e^z) - sum p_j z_j with
    z = scores - max(scores).  Both terms are then nonnegative-ish and of
    the same magnitude, so the subtraction does not cancel catastrophically
    even for near-one-hot rows.
    """
    z = np.asarray(scores, dtype=np.float64)
    if z.ndim != 1 or z.size == 0:
        raise ValueError("entropy_from_scores expects a nonempty 1-D array")
    if not np.all(np.isfinite(z)):
        raise ValueError("scores must be finite")
    z = z - np.max(z)
    e = np.exp(z)
    total = float(np.sum(e))
    h = float(np.log(total) - np.dot(e, z) / total)
    return max(h, 0.0)


def _row_softmax_entropy_inplace(scores: np.ndarray) -> np.ndarray:
    """Turn a score matrix into its row softmax in place; return row entropies.

    Processes row blocks so the scratch stays O(block * n); `scores` is the
    single n^2-sized buffer this routine touches.
    """
    m = scores.shape[0]
    ent = np.empty(m, dtype=np.float64)
    for lo in range(0, m, _SOFTMAX_BLOCK):
        blk = scores[lo : lo + _SOFTMAX_BLOCK]
        blk -= np.max(blk, axis=1, keepdims=True)
        e = np.exp(blk)
        z = np.sum(e, axis=1)
        ent[lo : lo + _SOFTMAX_BLOCK] = np.log(z) - np.sum(e * blk, axis=1) / z
        blk[:] = e / z[:, None]
    np.maximum(ent, 0.0, out=ent)
    return ent


def score_row_entropies(scores) -> np.ndarray:
    """Per-row softmax entropies of a score matrix, without keeping weights.

    Row blocks bound the scratch at O(block * n) beyond the input itself.
    """
    s = np.asarray(scores, dtype=np.float64)
    if s.ndim != 2 or s.size == 0:
        raise ValueError("score_row_entropies expects a nonempty 2-D array")
    m = s.shape[0]
    ent = np.empty(m, dtype=np.float64)
    for lo in range(0, m, _SOFTMAX_BLOCK):
        blk = s[lo : lo + _SOFTMAX_BLOCK]
        z = blk - np.max(blk, axis=1, keepdims=True)
        e = np.exp(z)
        total = np.sum(e, axis=1)
        ent[lo : lo + _SOFTMAX_BLOCK] = (
            np.log(total) - np.sum(e * z, axis=1) / total
        )
    np.maximum(ent, 0.0, out=ent)
    return ent


def exact_attention(q_mat, k_mat, v_mat, keep_weights: bool = False,
                    scale_scores: bool = False) -> AttnResult:
    """Dense softmax attention, the quadratic reference implementation.

    q_mat (m, c), k_mat (n, c), v_mat (n, d).  With scale_scores the raw
    scores are divided by sqrt(c) first.  Peak scratch is one m x n buffer,
    which becomes the weight matrix.
    """
    q = np.asarray(q_mat, dtype=np.float64)
    k = np.asarray(k_mat, dtype=np.float64)
    v = np.asarray(v_mat, dtype=np.float64)
    if q.ndim != 2 or k.ndim != 2 or v.ndim != 2:
        raise ValueError("q, k, v must be 2-D")
    if q.shape[1] != k.shape[1]:
        raise ValueError(f"feature dims differ: q {q.shape} vs k {k.shape}")
    if k.shape[0] != v.shape[0]:
        raise ValueError(f"k and v row counts differ: {k.shape[0]} vs {v.shape[0]}")
    scores = q @ k.T
    if scale_scores:
        scores /= np.sqrt(q.shape[1])
    ent = _row_softmax_entropy_inplace(scores)
    out = scores @ v
    return AttnResult(
        output=out,
        weights=scores if keep_weights else None,
        entropies=ent,
    )


def exact_attention_entropy(q_vec, k_mat) -> float:
    """Entropy of the softmax attention row for one query against a key set."""
    q = np.asarray(q_vec, dtype=np.float64)
    k = np.asarray(k_mat, dtype=np.float64)
    if q.ndim != 1:
        raise ValueError("q_vec must be 1-D")
    if k.ndim != 2 or k.shape[1] != q.size:
        raise ValueError(f"key matrix {k.shape} incompatible with query of size {q.size}")
    return entropy_from_scores(k @ q)


def kl_divergence(q, p) -> float:
    """KL(q || p) in nats.

    Requires p_i > 0 wherever q_i > 0.  The true value is nonnegative for
    exact simplex inputs; rounding in inputs that only sum to 1 within
    tolerance can push the sum a hair below zero, and that noise is clamped.
    """
    q = _check_prob_vector(q, "q")
    p = _check_prob_vector(p, "p")
    if q.shape != p.shape:
        raise ValueError("q and p must have the same length")
    mask = q > 0.0
    if np.any(p[mask] == 0.0):
        raise ValueError("kl_divergence undefined: q puts mass where p has none")
    val = float(np.sum(q[mask] * np.log(q[mask] / p[mask])))
    return max(val, 0.0)


def kl_decomposition(q, p) -> KlDecomposition:
    """Split KL(q || p) into an entropy gap plus a cross term.

        KL(q || p) = (H(p) - H(q)) + sum_i (p_i - q_i) log p_i

    holds whenever the divergence is defined, and

        KL(q || p) <= |H(q) - H(p)| + |sum_i (p_i - q_i) log p_i|

    is the triangle-inequality bound reported alongside it.  Entries where
    p_i = 0 force q_i = 0 and contribute nothing to the cross term.
    """
    q = _check_prob_vector(q, "q")
    p = _check_prob_vector(p, "p")
    if q.shape != p.shape:
        raise ValueError("q and p must have the same length")
    kl = kl_divergence(q, p)
    h_q = _entropy_unchecked(q)
    h_p = _entropy_unchecked(p)
    mask = p > 0.0
    cross = float(np.sum((p[mask] - q[mask]) * np.log(p[mask])))
    gap = h_p - h_q
    return KlDecomposition(
        kl=kl,
        entropy_gap=gap,
        cross_term=cross,
        bound=abs(h_q - h_p) + abs(cross),
    )


def strict_concavity_check(p, q, lam: float) -> float:
    """Concavity margin H(lam p + (1-lam) q) - [lam H(p) + (1-lam) H(q)].

    Strictly positive whenever p != q and 0 < lam < 1; micro-negative
    rounding noise is clamped to zero.
    """
    p = _check_prob_vector(p, "p")
    q = _check_prob_vector(q, "q")
    if p.shape != q.shape:
        raise ValueError("p and q must have the same length")
    if not (0.0 < lam < 1.0):
        raise ValueError("lam must lie strictly inside (0, 1)")
    # mixing p with itself is p; going through float lam would say otherwise
    mix = p if np.array_equal(p, q) else lam * p + (1.0 - lam) * q
    margin = _entropy_unchecked(mix) - (lam * _entropy_unchecked(p)
                                        + (1.0 - lam) * _entropy_unchecked(q))
    if -1e-12 < margin < 0.0:
        margin = 0.0
    return margin


def linear_family_entropy(a, theta: float) -> tuple[float, bool]:
    """Entropy of the affine weight family w_j = (1 + a_j / theta) / n.

    `a` must be centered (sum zero within 1e-9) so the weights sum to one.
    Returns (entropy, True) when every weight is strictly positive, which
    needs theta > max_j |a_j|; otherwise (nan, False).
    """
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 1 or a.size == 0:
        raise ValueError("a must be a nonempty 1-D array")
    if not np.all(np.isfinite(a)):
        raise ValueError("a must be finite")
    if abs(float(np.sum(a))) > 1e-9 * max(1.0, float(np.max(np.abs(a)))):
        raise ValueError("a must sum to zero (centered scores)")
    if not (np.isfinite(theta) and theta > 0.0):
        raise ValueError("theta must be a positive finite number")
    n = a.size
    w = (1.0 + a / theta) / n
    if not np.all(w > 0.0):
        return float("nan"), False
    return float(-np.sum(w * np.log(w))), True


def bisection_theta(a, target_entropy: float, tol: float = 1e-10,
                    max_iter: int = 200) -> float:
    """Solve H(w(theta)) = target_entropy for the affine family by bisection.

    The family entropy increases strictly with theta on the all-positive
    regime and tends to log n from below, so the objective is monotone and
    a bracket [max|a| (1 + 1e-9), 1e9 max|a|] pins the root when one
    exists.  Raises when `a` is all zero (family is uniform regardless of
    theta) or the target lies outside the attainable range.
    """
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 1 or a.size < 2:
        raise ValueError("a must be a 1-D array with at least two entries")
    if not np.all(np.isfinite(a)):
        raise ValueError("a must be finite")
    n = a.size
    amax = float(np.max(np.abs(a)))
    if amax == 0.0:
        raise ValueError("a is identically zero; every theta gives uniform weights")
    log_n = float(np.log(n))
    if not (0.0 < target_entropy < log_n):
        raise ValueError(
            f"target entropy {target_entropy!r} outside (0, log n) = (0, {log_n!r})"
        )
    lo = amax * (1.0 + 1e-9)
    hi = 1e9 * amax
    h_lo, ok = linear_family_entropy(a, lo)
    if not ok:
        # only reachable through rounding at the bracket edge
        lo = amax * (1.0 + 1e-6)
        h_lo, ok = linear_family_entropy(a, lo)
    if target_entropy < h_lo:
        raise ValueError(
            f"target entropy {target_entropy!r} below the attainable range "
            f"[{h_lo!r}, {log_n!r}) of this score vector"
        )
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        h, _valid = linear_family_entropy(a, mid)
        if abs(h - target_entropy) <= tol:
            return mid
        if h < target_entropy:
            lo = mid
        else:
            hi = mid
    raise RuntimeError("bisection did not converge; bracket or tolerance is off")
