"""Naive per-window reference implementations used by the kernel tests.

Everything here loops over pixels and windows directly; it is slow on purpose
and only meant for grids of a few dozen pixels per side.
"""

import numpy as np


def windows(shape, radius):
    """Yield (v, u, window slice) for every pixel, clipped at the borders."""
    rows, cols = shape
    for v in range(rows):
        for u in range(cols):
            yield v, u, (slice(max(v - radius, 0), min(v + radius + 1, rows)),
                         slice(max(u - radius, 0), min(u + radius + 1, cols)))


def naive_mean(img, radius):
    out = np.empty(img.shape)
    for v, u, win in windows(img.shape, radius):
        out[v, u] = img[win].mean()
    return out


def naive_variance(img, radius):
    out = np.empty(img.shape)
    for v, u, win in windows(img.shape, radius):
        patch = img[win]
        out[v, u] = np.mean((patch - patch.mean()) ** 2)
    return out


def naive_covariance(a, b, radius):
    out = np.empty(a.shape)
    for v, u, win in windows(a.shape, radius):
        pa, pb = a[win], b[win]
        out[v, u] = np.mean((pa - pa.mean()) * (pb - pb.mean()))
    return out


def naive_weighted_mean(values, weights, radius):
    out = np.empty(values.shape)
    for v, u, win in windows(values.shape, radius):
        out[v, u] = np.sum(weights[win] * values[win]) / np.sum(weights[win])
    return out


def naive_edge_weight(G, epsilon):
    """Direct double sum: mean over q of (var(p) + eps) / (var(q) + eps)."""
    shifted = naive_variance(G, 1) + epsilon
    flat = shifted.ravel()
    out = np.empty(flat.shape)
    for i, value in enumerate(flat):
        out[i] = np.mean(value / flat)
    return out.reshape(G.shape)


def naive_ridge(Z, G, radius, gamma, lam):
    """Per window, minimize gamma * mean((a*G + b - Z)^2) + lam * a^2.

    The 2x2 normal equations are solved directly for every window.
    """
    a = np.empty(Z.shape)
    b = np.empty(Z.shape)
    for v, u, win in windows(Z.shape, radius):
        g, z = G[win].ravel(), Z[win].ravel()
        gm = gamma[v, u]
        lhs = np.array([[gm * np.mean(g * g) + lam, gm * np.mean(g)],
                        [np.mean(g), 1.0]])
        rhs = np.array([gm * np.mean(g * z), np.mean(z)])
        a[v, u], b[v, u] = np.linalg.solve(lhs, rhs)
    return a, b


def naive_residual_weights(a, b, Z, G, radius, eta, floor=0.001):
    """exp(-mean squared residual of the window's own fit / eta) + floor."""
    out = np.empty(Z.shape)
    for v, u, win in windows(Z.shape, radius):
        residual = a[v, u] * G[win] + b[v, u] - Z[win]
        out[v, u] = np.exp(-np.mean(residual ** 2) / eta) + floor
    return out
