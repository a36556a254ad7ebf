"""Shared test helpers: independent oracles and random instance builders."""

from __future__ import annotations

import numpy as np


def ridge_descent_oracle(
    X: np.ndarray, y: np.ndarray, lam: float, tol: float = 1e-12
) -> np.ndarray:
    """Minimize the regularized quadratic loss by conjugate-direction descent.

    Touches the data only through matrix-vector products against the loss
    gradient, so it shares no code path with the closed-form solver. Runs
    until the gradient norm drops below ``tol``.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    t0 = X.shape[1]

    def grad(f):
        return (2.0 / t0) * (X @ (X.T @ f) - X @ y) + (lam / t0) * f

    def hess_product(v):
        return (2.0 / t0) * (X @ (X.T @ v)) + (lam / t0) * v

    f = np.zeros(X.shape[0])
    g = grad(f)
    d = -g
    for _ in range(200 * X.shape[0] + 200):
        gnorm2 = float(g @ g)
        if np.sqrt(gnorm2) <= tol:
            break
        Hd = hess_product(d)
        alpha = gnorm2 / float(d @ Hd)
        f = f + alpha * d
        g_new = g + alpha * Hd
        beta = float(g_new @ g_new) / gnorm2
        d = -g_new + beta * d
        g = g_new
    return f


def rmse_loop_oracle(prediction, reference) -> float:
    """Scalar-loop RMSE, independent of any vectorized norm."""
    total = 0.0
    count = 0
    for p, r in zip(prediction, reference, strict=True):
        total += (p - r) ** 2
        count += 1
    return (total / count) ** 0.5


def gaussian_elimination_solve(A, b) -> np.ndarray:
    """Plain partial-pivot Gaussian elimination, independent of LAPACK."""
    A = [list(map(float, row)) for row in np.asarray(A)]
    b = list(map(float, np.asarray(b)))
    n = len(b)
    for col in range(n):
        pivot = max(range(col, n), key=lambda r: abs(A[r][col]))
        A[col], A[pivot] = A[pivot], A[col]
        b[col], b[pivot] = b[pivot], b[col]
        for row in range(col + 1, n):
            factor = A[row][col] / A[col][col]
            for k in range(col, n):
                A[row][k] -= factor * A[col][k]
            b[row] -= factor * b[col]
    x = [0.0] * n
    for row in range(n - 1, -1, -1):
        acc = b[row] - sum(A[row][k] * x[k] for k in range(row + 1, n))
        x[row] = acc / A[row][row]
    return np.array(x)


def random_bounded_instance(rng: np.random.Generator, n: int, t0: int, horizon: int = 3):
    """Bounded panel/target arrays with entries in [-1, 1]."""
    X = rng.uniform(-1.0, 1.0, size=(n, t0 + horizon))
    y = rng.uniform(-1.0, 1.0, size=t0 + horizon)
    return X, y
