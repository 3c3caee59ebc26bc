"""Heterogeneous-sensor fusion through the Gaussian copula.

A joint density is factored into per-sensor marginals times a copula
density that reweights their product to carry the dependence.  Marginals
may be empirical (rank cdf + kernel-smoothed pdf) or Gaussian-parametric;
the copula is always Gaussian, fitted from normal scores, which gives a
closed form that is exactly checkable against the multivariate normal.
"""

import numpy as np
import scipy.linalg
from scipy.special import ndtr, ndtri
from scipy.stats import rankdata

from .linalg import as_vector

__all__ = [
    "EmpiricalMarginal",
    "FusionDecision",
    "GaussianCopula",
    "GaussianMarginal",
    "JointDensityModel",
    "UndecidableError",
    "copula_density",
    "copula_log_density",
    "detection_auc",
    "fit_empirical_marginal",
    "fit_gaussian_copula",
    "fit_gaussian_marginal",
    "fit_joint_model",
    "fuse_detect",
    "joint_logpdf",
    "joint_pdf",
    "uniform_scores",
]

# Smallest/largest cdf values ever returned, so probit scores stay finite.
_U_LO = 1e-300
_U_HI = float(np.nextafter(1.0, 0.0))

_LOG_SQRT_2PI = 0.5 * np.log(2.0 * np.pi)


class UndecidableError(RuntimeError):
    """Both hypotheses assign zero density to the sample."""


def _clip_unit(u):
    return np.clip(u, _U_LO, _U_HI)


class GaussianMarginal:
    """Parametric normal marginal with the exact cdf/pdf pair."""

    kind = "gaussian-parametric"

    def __init__(self, mean, std):
        if not std > 0:
            raise ValueError(f"standard deviation must be positive, got {std}")
        self.mean = float(mean)
        self.std = float(std)

    def cdf(self, x):
        return _clip_unit(ndtr((np.asarray(x, dtype=float) - self.mean) / self.std))

    def pdf(self, x):
        return np.exp(self.logpdf(x))

    def logpdf(self, x):
        t = (np.asarray(x, dtype=float) - self.mean) / self.std
        return -0.5 * t * t - np.log(self.std) - _LOG_SQRT_2PI

    def __repr__(self):
        return f"GaussianMarginal(mean={self.mean:g}, std={self.std:g})"


class EmpiricalMarginal:
    """Sample-based marginal: rank/(K+1) cdf and kernel-smoothed pdf.

    The cdf returns exactly ``rank/(K+1)`` at the sample points (ties take
    the highest rank of their group), interpolates linearly between order
    statistics and decays exponentially outside the sample range, so it is
    strictly inside (0, 1) for every finite input.  The pdf is a Gaussian
    kernel density estimate with the stored bandwidth.
    """

    kind = "empirical"

    def __init__(self, samples, bandwidth):
        samples = as_vector(samples, "samples")
        if samples.size < 2:
            raise ValueError("empirical marginal needs at least 2 samples")
        if not bandwidth > 0:
            raise ValueError(f"bandwidth must be positive, got {bandwidth}")
        self.samples = np.sort(samples)
        self.bandwidth = float(bandwidth)
        k = self.samples.size
        # highest rank of each tie group, as exact rationals rank/(K+1)
        self._knot_p = (
            np.searchsorted(self.samples, self.samples, side="right") / (k + 1)
        )
        # tail scale for the exponential cdf extension beyond the sample range
        spread = self.samples[-1] - self.samples[0]
        self._tail = max(self.bandwidth, spread / k, 1e-12)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0
        x = np.atleast_1d(x)
        s, p = self.samples, self._knot_p
        k = s.size
        right = np.searchsorted(s, x, side="right")
        left = np.searchsorted(s, x, side="left")
        out = np.empty(x.shape)

        exact = right > left
        out[exact] = right[exact] / (k + 1)

        below = (~exact) & (right == 0)
        out[below] = p[0] * np.exp((x[below] - s[0]) / self._tail)

        above = (~exact) & (right == k)
        out[above] = 1.0 - (1.0 - p[-1]) * np.exp(-(x[above] - s[-1]) / self._tail)

        mid = ~(exact | below | above)
        if np.any(mid):
            j = right[mid]
            x0, x1 = s[j - 1], s[j]
            p0, p1 = p[j - 1], (j + 1) / (k + 1)
            out[mid] = p0 + (p1 - p0) * (x[mid] - x0) / (x1 - x0)

        out = _clip_unit(out)
        return float(out[0]) if scalar else out

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        t = (np.atleast_1d(x)[:, None] - self.samples[None, :]) / self.bandwidth
        dens = np.exp(-0.5 * t * t).sum(axis=1) / (
            self.samples.size * self.bandwidth * np.sqrt(2.0 * np.pi)
        )
        return float(dens[0]) if x.ndim == 0 else dens

    def logpdf(self, x):
        with np.errstate(divide="ignore"):
            return np.log(self.pdf(x))

    def __repr__(self):
        return (
            f"EmpiricalMarginal({self.samples.size} samples, "
            f"bandwidth={self.bandwidth:g})"
        )


def fit_empirical_marginal(samples, bandwidth="auto"):
    """Fit an :class:`EmpiricalMarginal` to raw sensor samples.

    ``bandwidth="auto"`` applies Silverman's rule ``1.06 * std * K^(-1/5)``;
    it requires a nonzero sample spread.
    """
    samples = as_vector(samples, "samples")
    if samples.size < 2:
        raise ValueError("need at least 2 samples to fit a marginal")
    if bandwidth == "auto":
        std = float(np.std(samples))
        if std == 0.0:
            raise ValueError("samples have zero spread; pass an explicit bandwidth")
        bandwidth = 1.06 * std * samples.size ** (-0.2)
    return EmpiricalMarginal(samples, bandwidth)


def fit_gaussian_marginal(samples):
    """Fit a :class:`GaussianMarginal` by sample mean and standard deviation."""
    samples = as_vector(samples, "samples")
    if samples.size < 2:
        raise ValueError("need at least 2 samples to fit a marginal")
    std = float(np.std(samples))
    if std == 0.0:
        raise ValueError("samples have zero spread")
    return GaussianMarginal(float(np.mean(samples)), std)


class GaussianCopula:
    """Gaussian copula with correlation matrix R.

    Density in the unit cube: ``|R|^(-1/2) * exp(-q' (R^-1 - I) q / 2)``
    with ``q`` the probit scores of the input.
    """

    def __init__(self, correlation):
        r = np.array(correlation, dtype=float)
        if r.ndim != 2 or r.shape[0] != r.shape[1]:
            raise ValueError(f"correlation must be square, got shape {r.shape}")
        if not np.allclose(r, r.T, atol=1e-12):
            raise ValueError("correlation matrix must be symmetric")
        if not np.allclose(np.diag(r), 1.0, atol=1e-12):
            raise ValueError("correlation matrix must have unit diagonal")
        try:
            chol = np.linalg.cholesky(r)
        except np.linalg.LinAlgError as exc:
            raise ValueError("correlation matrix must be positive definite") from exc
        r.setflags(write=False)
        self.correlation = r
        self._chol = chol
        self._log_det = 2.0 * float(np.sum(np.log(np.diag(chol))))

    @property
    def dimension(self):
        return self.correlation.shape[0]

    def log_density(self, u):
        u = as_vector(u, "u")
        if u.size != self.dimension:
            raise ValueError(f"expected {self.dimension} coordinates, got {u.size}")
        if np.any(u <= 0.0) or np.any(u >= 1.0):
            raise ValueError("copula density requires u strictly inside (0, 1)")
        q = ndtri(u)
        w = scipy.linalg.solve_triangular(self._chol, q, lower=True)
        return -0.5 * (self._log_det + float(w @ w) - float(q @ q))

    def density(self, u):
        return float(np.exp(self.log_density(u)))

    def __repr__(self):
        return f"GaussianCopula(dimension={self.dimension})"


def fit_gaussian_copula(uniform_scores):
    """Fit a Gaussian copula from a K x N matrix of uniform scores.

    The correlation is the Pearson correlation of the probit-transformed
    scores.  A correlation matrix whose smallest eigenvalue is not above
    1e-10 is repaired by diagonal loading ``R <- (R + d*I) / (1 + d)`` with
    the smallest d in {1e-8, 1e-6, 1e-4, 1e-2} that clears the bar.
    """
    u = np.asarray(uniform_scores, dtype=float)
    if u.ndim != 2:
        raise ValueError(f"scores must be K x N, got shape {u.shape}")
    k, n = u.shape
    if k < 3:
        raise ValueError(f"need at least 3 score rows, got {k}")
    if not np.all((u > 0.0) & (u < 1.0)):
        raise ValueError("uniform scores must lie strictly inside (0, 1)")
    if n == 1:
        return GaussianCopula(np.ones((1, 1)))
    q = ndtri(u)
    if np.any(np.std(q, axis=0) == 0.0):
        raise ValueError("a score column is constant; cannot estimate correlation")
    r = np.corrcoef(q, rowvar=False)
    r = 0.5 * (r + r.T)
    np.fill_diagonal(r, 1.0)
    if _min_eig(r) <= 1e-10:
        for delta in (1e-8, 1e-6, 1e-4, 1e-2):
            loaded = (r + delta * np.eye(n)) / (1.0 + delta)
            np.fill_diagonal(loaded, 1.0)
            if _min_eig(loaded) > 1e-10:
                r = loaded
                break
        else:
            raise ValueError("correlation repair failed; scores are degenerate")
    return GaussianCopula(r)


def _min_eig(r):
    return float(np.linalg.eigvalsh(r)[0])


def uniform_scores(data):
    """Column-wise rank/(K+1) scores of a K x N data matrix.

    Rank statistics only, so the output is bit-identical under any strictly
    increasing transform of a column; ties share the average rank.
    """
    data = np.asarray(data, dtype=float)
    if data.ndim != 2:
        raise ValueError(f"data must be K x N, got shape {data.shape}")
    k = data.shape[0]
    ranks = np.column_stack([rankdata(col, method="average") for col in data.T])
    return ranks / (k + 1)


def copula_density(model, u):
    """Copula density at a point strictly inside the unit cube."""
    return model.density(u)


def copula_log_density(model, u):
    return model.log_density(u)


def joint_logpdf(marginals, copula, z):
    """Log of the fused joint density: sum of marginal logpdfs + log copula."""
    z = as_vector(z, "sample")
    if len(marginals) != copula.dimension or z.size != copula.dimension:
        raise ValueError(
            f"dimension mismatch: {len(marginals)} marginals, "
            f"copula dimension {copula.dimension}, sample length {z.size}"
        )
    logs = np.array([m.logpdf(zi) for m, zi in zip(marginals, z)])
    if np.any(np.isneginf(logs)):
        return float("-inf")
    u = _clip_unit(np.array([m.cdf(zi) for m, zi in zip(marginals, z)]))
    return float(np.sum(logs) + copula.log_density(u))


def joint_pdf(marginals, copula, z):
    """Fused joint density: product of marginal pdfs times the copula density.

    Reduces exactly to the product of the marginal pdfs when R = I, and to 0
    whenever any marginal pdf vanishes.
    """
    z = as_vector(z, "sample")
    if len(marginals) != copula.dimension or z.size != copula.dimension:
        raise ValueError(
            f"dimension mismatch: {len(marginals)} marginals, "
            f"copula dimension {copula.dimension}, sample length {z.size}"
        )
    pdfs = np.array([m.pdf(zi) for m, zi in zip(marginals, z)])
    if np.any(pdfs == 0.0):
        return 0.0
    u = _clip_unit(np.array([m.cdf(zi) for m, zi in zip(marginals, z)]))
    log_c = copula.log_density(u)
    if abs(log_c) < 500.0:
        return float(np.prod(pdfs) * np.exp(log_c))
    # extreme tail: do the whole product in log space to dodge overflow
    return float(np.exp(np.sum(np.log(pdfs)) + log_c))


class JointDensityModel:
    """A fitted joint density: one marginal per sensor plus a copula."""

    def __init__(self, marginals, copula):
        if len(marginals) != copula.dimension:
            raise ValueError(
                f"{len(marginals)} marginals for copula dimension {copula.dimension}"
            )
        self.marginals = list(marginals)
        self.copula = copula

    @property
    def dimension(self):
        return self.copula.dimension

    def logpdf(self, z):
        return joint_logpdf(self.marginals, self.copula, z)

    def pdf(self, z):
        return joint_pdf(self.marginals, self.copula, z)

    def as_product_model(self):
        """Same marginals under an independence copula (R = I)."""
        return JointDensityModel(
            self.marginals, GaussianCopula(np.eye(self.dimension))
        )


def fit_joint_model(data, marginal="gaussian-parametric"):
    """Fit marginals column-by-column plus a Gaussian copula on rank scores.

    `data` is K samples x N sensors; `marginal` selects "gaussian-parametric"
    or "empirical" per-sensor models.  The copula correlation always comes
    from the rank/(K+1) scores, which are invariant to monotone transforms
    of the raw columns.
    """
    data = np.asarray(data, dtype=float)
    if data.ndim != 2:
        raise ValueError(f"data must be K x N, got shape {data.shape}")
    if marginal == "gaussian-parametric":
        marginals = [fit_gaussian_marginal(col) for col in data.T]
    elif marginal == "empirical":
        marginals = [fit_empirical_marginal(col) for col in data.T]
    else:
        raise ValueError(f"unknown marginal kind {marginal!r}")
    cop = fit_gaussian_copula(uniform_scores(data))
    return JointDensityModel(marginals, cop)


class FusionDecision:
    """Outcome of a binary likelihood-ratio fusion test."""

    def __init__(self, log_likelihood_ratio, decision):
        self.log_likelihood_ratio = log_likelihood_ratio
        self.decision = decision

    def __iter__(self):
        return iter((self.log_likelihood_ratio, self.decision))

    def __repr__(self):
        return (
            f"FusionDecision(llr={self.log_likelihood_ratio:g}, "
            f"decision={self.decision!r})"
        )


def fuse_detect(h0, h1, z, threshold=0.0):
    """Likelihood-ratio detection between two fitted joint models.

    Returns the log-likelihood ratio ``log f1(z) - log f0(z)`` and the
    decision "H1" iff it exceeds `threshold` (ties go to "H0").  Raises
    :class:`UndecidableError` when both densities vanish.
    """
    if h0.dimension != h1.dimension:
        raise ValueError(
            f"models disagree on dimension: {h0.dimension} vs {h1.dimension}"
        )
    l0 = h0.logpdf(z)
    l1 = h1.logpdf(z)
    if np.isneginf(l0) and np.isneginf(l1):
        raise UndecidableError("sample has zero density under both hypotheses")
    llr = l1 - l0
    return FusionDecision(llr, "H1" if llr > threshold else "H0")


def detection_auc(h0_scores, h1_scores):
    """Area under the ROC curve from detector scores of the two classes.

    Rank-based (Mann-Whitney) estimate; ties contribute half their weight.
    """
    s0 = as_vector(np.asarray(h0_scores, dtype=float), "h0_scores")
    s1 = as_vector(np.asarray(h1_scores, dtype=float), "h1_scores")
    if s0.size == 0 or s1.size == 0:
        raise ValueError("both score sets must be nonempty")
    ranks = rankdata(np.concatenate([s0, s1]), method="average")
    r1 = float(np.sum(ranks[s0.size :]))
    n0, n1 = s0.size, s1.size
    return (r1 - n1 * (n1 + 1) / 2.0) / (n0 * n1)
