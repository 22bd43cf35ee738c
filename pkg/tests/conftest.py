import numpy as np


def fd_gradient(f, x, step_scale=1e-6):
    """Central finite-difference gradient with per-component steps."""
    x = np.asarray(x, dtype=float)
    g = np.zeros_like(x)
    for i in range(len(x)):
        h = step_scale * (1.0 + abs(x[i]))
        xp = x.copy()
        xm = x.copy()
        xp[i] += h
        xm[i] -= h
        g[i] = (f(xp) - f(xm)) / (2.0 * h)
    return g


def fd_hessian(g, x, step_scale=1e-6):
    """Central finite-difference Jacobian of a gradient callable."""
    x = np.asarray(x, dtype=float)
    n = len(x)
    h_mat = np.zeros((n, n))
    for i in range(n):
        h = step_scale * (1.0 + abs(x[i]))
        xp = x.copy()
        xm = x.copy()
        xp[i] += h
        xm[i] -= h
        h_mat[:, i] = (np.asarray(g(xp)) - np.asarray(g(xm))) / (2.0 * h)
    return 0.5 * (h_mat + h_mat.T)


def rel_err(approx, exact):
    approx = np.asarray(approx, dtype=float)
    exact = np.asarray(exact, dtype=float)
    denom = max(1.0, float(np.max(np.abs(exact))))
    return float(np.max(np.abs(approx - exact))) / denom
