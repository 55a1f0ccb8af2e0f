"""Closed-form proximal maps and the norms they belong to."""

import numpy as np


def soft_threshold(v, t):
    return np.sign(v) * np.maximum(np.abs(v) - t, 0.0)


def row_shrink(Z, w):
    """Prox of ``sum_i w_i ||Z[i]||_2``; ``w`` is a scalar or one weight per row."""
    norms = np.linalg.norm(Z, axis=-1, keepdims=True)
    w = np.asarray(w, dtype=float)
    if w.ndim:
        w = w[..., None]
    scale = np.maximum(1.0 - w / np.maximum(norms, 1e-300), 0.0)
    return Z * scale


def singular_value_threshold(Z, t):
    """Prox of ``t * ||Z||_*``."""
    u, s, vt = np.linalg.svd(Z, full_matrices=False)
    s = np.maximum(s - t, 0.0)
    keep = s > 0
    if not np.any(keep):
        return np.zeros_like(Z)
    return (u[:, keep] * s[keep]) @ vt[keep]


def project_ball(v, center, radius):
    d = v - center
    nrm = np.linalg.norm(d)
    if nrm <= radius:
        return v
    return center + d * (radius / nrm)


def nuclear_norm(Z) -> float:
    return float(np.sum(np.linalg.svd(Z, compute_uv=False)))


def l21_norm(Z, w=1.0) -> float:
    return float(np.sum(np.asarray(w) * np.linalg.norm(Z, axis=-1)))


def l1_norm(Z) -> float:
    return float(np.sum(np.abs(Z)))
