"""Independent oracles the tests check the library against.

Nothing here shares code paths with the solvers under test: the recovery
audit uses projected subgradient descent, completion uses brute grid
search, the consensus lasso uses proximal gradient, and the copula checks
use hand-coded closed forms.
"""

import numpy as np


def bivariate_normal_pdf(z1, z2, rho):
    """Closed-form standard bivariate normal density with correlation rho."""
    det = 1.0 - rho * rho
    quad = (z1 * z1 - 2.0 * rho * z1 * z2 + z2 * z2) / det
    return np.exp(-0.5 * quad) / (2.0 * np.pi * np.sqrt(det))


def rpca_objective(y, lam, x, a):
    return np.linalg.svd(x, compute_uv=False).sum() + lam * np.abs(a).sum()


def rpca_subgradient_oracle(y, lam, n_iters, n_starts=5, seed=0):
    """Best nuclear + l1 objective found by projected subgradient descent.

    Works on the constraint manifold X + A = Y (A eliminated, so steps stay
    exactly feasible).  Polyak-style steps aim at a target below the best
    value seen; the target gap decays geometrically in two phases, fast to
    1e-4 and then slowly to 1e-11.  All `n_starts` random starts run in one
    batched loop.
    """
    y = np.asarray(y, dtype=float)
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    scale = np.linalg.norm(y) / np.sqrt(y.size)
    x = 0.5 * y + scale * rng.normal(size=(n_starts,) + y.shape)
    f_best = np.full(n_starts, np.inf)
    n1 = n_iters // 4
    d0, mid, floor = 1e-1, 1e-4, 1e-11
    dec1 = (mid / d0) ** (1.0 / max(n1 - 1, 1))
    dec2 = (floor / mid) ** (1.0 / max(n_iters - n1 - 1, 1))
    delta = d0
    for k in range(n_iters):
        a = y - x
        u, s, vt = np.linalg.svd(x, full_matrices=False)
        grad = u @ vt - lam * np.sign(a)
        f = s.sum(axis=1) + lam * np.abs(a).sum(axis=(1, 2))
        f_best = np.minimum(f_best, f)
        gn = np.maximum(np.sum(grad * grad, axis=(1, 2)), 1e-28)
        step = (f - (f_best - delta)) / gn
        x = x - step[:, None, None] * grad
        delta = max(delta * (dec1 if k < n1 else dec2), floor)
    return float(f_best.min())


def completion_grid_search(observed_entries, candidates):
    """Brute-force the missing entry of [[1, 2], [2, x]] by nuclear norm.

    Returns (best_x, best_value) over the candidate grid.
    """
    a, b, c = observed_entries
    best_x, best_val = None, np.inf
    for x in candidates:
        m = np.array([[a, b], [c, x]])
        val = np.linalg.svd(m, compute_uv=False).sum()
        if val < best_val:
            best_x, best_val = float(x), float(val)
    return best_x, best_val


def lasso_prox_gradient(b_mats, b_vecs, gamma, dim, n_iters=200000):
    """Centralized proximal gradient for min sum ||B_i x - b_i||^2 + gamma ||x||_1."""
    gram = sum(2.0 * b.T @ b for b in b_mats)
    lin = sum(2.0 * b.T @ v for b, v in zip(b_mats, b_vecs))
    lip = np.linalg.eigvalsh(gram)[-1]
    x = np.zeros(dim)
    for _ in range(n_iters):
        z = x - (gram @ x - lin) / lip
        x = np.sign(z) * np.maximum(np.abs(z) - gamma / lip, 0.0)
    return x


def numeric_gradient(fn, x, h=1e-6):
    """Central finite differences of a scalar function of a vector."""
    x = np.asarray(x, dtype=float)
    g = np.zeros_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h
        g[i] = (fn(x + e) - fn(x - e)) / (2.0 * h)
    return g


def singular_values_via_gram(m):
    """Singular values from the eigenvalues of m.T @ m (independent of svd)."""
    eigs = np.linalg.eigvalsh(np.asarray(m, dtype=float).T @ m)
    return np.sqrt(np.maximum(eigs[::-1], 0.0))
