"""Central finite-difference oracle for gradient checks."""

import numpy as np


def numerical_gradients(objective, tensors, h=1e-4):
    """Coordinate-wise central differences of ``objective(tensors)``.

    ``tensors`` is a dict of arrays that the objective reads; each entry is
    perturbed in place one coordinate at a time.
    """
    grads = {}
    for name, t in tensors.items():
        g = np.zeros_like(t)
        flat = t.ravel()
        gflat = g.ravel()
        for idx in range(flat.size):
            orig = flat[idx]
            flat[idx] = orig + h
            up = objective(tensors)
            flat[idx] = orig - h
            down = objective(tensors)
            flat[idx] = orig
            gflat[idx] = (up - down) / (2.0 * h)
        grads[name] = g
    return grads


def max_relative_error(analytic, numeric, zero_tol=1e-7):
    """Worst relative disagreement over all tensors and coordinates.

    Coordinates where both sides are below ``zero_tol`` in magnitude count
    as exact agreement.
    """
    worst = 0.0
    for name in analytic:
        a = analytic[name].ravel()
        b = numeric[name].ravel()
        denom = np.maximum(np.abs(a), np.abs(b))
        mask = denom > zero_tol
        if mask.any():
            rel = np.abs(a[mask] - b[mask]) / denom[mask]
            worst = max(worst, float(rel.max()))
        small = ~mask
        if small.any():
            worst = max(worst, float(np.abs(a[small] - b[small]).max()) / zero_tol)
    return worst
