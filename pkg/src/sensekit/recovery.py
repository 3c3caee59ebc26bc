"""Low-rank matrix recovery: PCA denoising, robust PCA, and masked
joint completion/recovery.

All three solve nuclear-norm problems.  Denoising has the closed-form
answer (one singular value thresholding); the robust and masked variants
share one inexact augmented-Lagrangian engine that alternates a spectral
soft-threshold for the low-rank part, an entrywise soft-threshold for the
sparse part (restricted to the observed set), a dual ascent step, and a
geometric penalty increase.
"""

import numpy as np

from .linalg import Mask, _svt_spectrum, as_matrix, frobenius, shrink, svt

__all__ = [
    "RecoveryProblem",
    "RecoveryResult",
    "SolverConfig",
    "default_lambda",
    "masked_rpca",
    "pca_denoise",
    "rpca",
    "solve_ialm",
]

RANK_CUTOFF = 1e-8
SPARSITY_CUTOFF = 1e-9


class SolverConfig:
    """Augmented-Lagrangian schedule and stopping rule.

    ``mu0=None`` resolves to ``1.25 / sigma_1(P_Omega(Y))`` and
    ``mu_max=None`` to ``1e7 * mu0`` at solve time.  ``tol`` is the
    relative residual ``||P(Y - X - A)||_F / ||P(Y)||_F`` below which the
    iteration stops; ``tol=0`` never stops early, which pins down single
    proximal sweeps for testing.
    """

    def __init__(self, mu0=None, rho=1.5, mu_max=None, tol=1e-7, max_iters=1000):
        if mu0 is not None and not mu0 > 0:
            raise ValueError(f"mu0 must be positive, got {mu0}")
        if not rho > 1:
            raise ValueError(f"rho must exceed 1, got {rho}")
        if mu_max is not None and not mu_max > 0:
            raise ValueError(f"mu_max must be positive, got {mu_max}")
        if mu0 is not None and mu_max is not None and mu0 > mu_max:
            raise ValueError(f"mu0 {mu0} exceeds mu_max {mu_max}")
        if not 0 <= tol < 1:
            raise ValueError(f"tol must lie in [0, 1), got {tol}")
        if max_iters < 1 or int(max_iters) != max_iters:
            raise ValueError(f"max_iters must be a positive integer, got {max_iters}")
        self.mu0 = mu0
        self.rho = float(rho)
        self.mu_max = mu_max
        self.tol = float(tol)
        self.max_iters = int(max_iters)


class RecoveryProblem:
    """A sensing matrix plus the knobs of the nuclear + l1 program.

    ``mask=None`` means fully observed; ``lam=None`` resolves to
    :func:`default_lambda` for the matrix shape.
    """

    def __init__(self, y, mask=None, lam=None, config=None):
        self.y = as_matrix(y, "y")
        if self.y.size == 0:
            raise ValueError("y must be nonempty")
        if mask is not None and mask.shape != self.y.shape:
            raise ValueError(f"mask shape {mask.shape} != y shape {self.y.shape}")
        if lam is not None and not lam > 0:
            raise ValueError(f"lambda must be positive, got {lam}")
        self.mask = mask
        self.lam = lam
        self.config = config if config is not None else SolverConfig()

    def resolved_lambda(self):
        if self.lam is not None:
            return float(self.lam)
        return default_lambda(*self.y.shape)


class RecoveryResult:
    """Solver output: estimates plus convergence diagnostics.

    ``final_residual`` is the stopping-criterion value at exit and
    ``residual_history`` the full per-iteration sequence; ``converged``
    is False when the iteration budget ran out (callers decide whether a
    partial answer is acceptable).
    """

    def __init__(self, x, a, iterations, final_residual, rank_estimate,
                 sparsity_estimate, converged, residual_history):
        self.x = x
        self.a = a
        self.iterations = iterations
        self.final_residual = final_residual
        self.rank_estimate = rank_estimate
        self.sparsity_estimate = sparsity_estimate
        self.converged = converged
        self.residual_history = residual_history

    def __repr__(self):
        return (
            f"RecoveryResult(shape={self.x.shape}, iterations={self.iterations}, "
            f"residual={self.final_residual:.3e}, rank={self.rank_estimate}, "
            f"nnz={self.sparsity_estimate}, converged={self.converged})"
        )


def default_lambda(rows, cols):
    """Sparsity weight 1/sqrt(max(rows, cols)), the standard robust-PCA scaling."""
    if rows < 1 or cols < 1:
        raise ValueError(f"dimensions must be positive, got ({rows}, {cols})")
    return 1.0 / np.sqrt(max(rows, cols))


def pca_denoise(y, tau):
    """Low-rank denoising by one singular value thresholding at `tau`.

    Exact solution of the nuclear-norm penalized least-squares problem
    ``min ||X||_* + ||Y - X||_F^2 / (2 tau)``.
    """
    if not tau > 0:
        raise ValueError(f"tau must be positive, got {tau}")
    return svt(y, tau)


def solve_ialm(problem):
    """Inexact augmented-Lagrangian engine behind rpca and masked_rpca.

    Alternates ``X <- svt(., 1/mu)`` and ``A <- shrink(., lambda/mu)`` on
    the observed set (off the mask, A compensates exactly so the residual
    lives only on the observed entries), ascends the dual, and grows mu by
    ``rho`` up to ``mu_max``.  Deterministic: same problem and config give
    bit-identical results.
    """
    y = problem.y
    obs = None if problem.mask is None else problem.mask.observed
    y_obs = y if obs is None else np.where(obs, y, 0.0)
    lam = problem.resolved_lambda()
    cfg = problem.config

    sigma1 = float(np.linalg.norm(y_obs, 2)) if y_obs.any() else 0.0
    mu = cfg.mu0 if cfg.mu0 is not None else 1.25 / sigma1 if sigma1 > 0 else 1.25
    mu_max = cfg.mu_max if cfg.mu_max is not None else 1e7 * mu
    y_norm = max(frobenius(y_obs), 1e-30)

    x = np.zeros_like(y_obs)
    a = np.zeros_like(y_obs)
    dual = np.zeros_like(y_obs)
    sv = np.zeros(min(y.shape))
    history = []
    converged = False
    iterations = 0

    for iterations in range(1, cfg.max_iters + 1):
        x, sv = _svt_spectrum(y_obs - a + dual / mu, 1.0 / mu)
        arg = y_obs - x + dual / mu
        if obs is None:
            a = shrink(arg, lam / mu)
        else:
            # off the mask the quadratic term alone decides; this zeroes the
            # residual there, so the dual never grows off the observed set
            a = np.where(obs, shrink(arg, lam / mu), arg)
        residual = y_obs - x - a
        dual = dual + mu * residual
        rel = frobenius(residual) / y_norm
        history.append(rel)
        if rel <= cfg.tol:
            converged = True
            break
        mu = min(cfg.rho * mu, mu_max)

    a_out = a if obs is None else np.where(obs, a, 0.0)
    top = sv[0] if sv.size else 0.0
    rank_estimate = int(np.sum(sv > RANK_CUTOFF * top)) if top > 0 else 0
    return RecoveryResult(
        x=x,
        a=a_out,
        iterations=iterations,
        final_residual=history[-1],
        rank_estimate=rank_estimate,
        sparsity_estimate=int(np.sum(np.abs(a_out) > SPARSITY_CUTOFF)),
        converged=converged,
        residual_history=np.array(history),
    )


def rpca(problem):
    """Robust PCA: split a fully observed matrix into low-rank + sparse parts."""
    if problem.mask is not None and not problem.mask.is_full():
        raise ValueError("rpca expects a fully observed problem; use masked_rpca")
    return solve_ialm(problem)


def masked_rpca(problem):
    """Joint completion and recovery from partial, corrupted observations.

    The sparse estimate is supported only on the observed set; the low-rank
    estimate fills in the unobserved entries.
    """
    if problem.mask is None:
        raise ValueError("masked_rpca requires a mask; use rpca when fully observed")
    if problem.mask.is_empty():
        raise ValueError("mask has no observed entries")
    return solve_ialm(problem)
