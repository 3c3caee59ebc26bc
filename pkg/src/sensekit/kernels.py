"""Kernel evaluation, Gram matrices, and a kernel ridge classifier.

The kernel function stands in for inner products of an implicit feature
map; :func:`feature_map_deg2` makes that map explicit for the degree-2
polynomial case, which is the classic picture of a disk-vs-annulus
dataset becoming linearly separable after mapping.
"""

import numpy as np
import scipy.linalg

from .linalg import as_vector

__all__ = [
    "KernelModel",
    "KernelSpec",
    "best_linear_accuracy",
    "feature_map_deg2",
    "gaussian_kernel",
    "gram",
    "kernel_eval",
    "krr_predict",
    "krr_train",
    "linear_kernel",
    "median_bandwidth",
    "polynomial_kernel",
]


class KernelSpec:
    """One of the supported kernel families.

    linear:      k(x, y) = x . y
    polynomial:  k(x, y) = (x . y + offset)^degree,  degree >= 1, offset >= 0
    gaussian:    k(x, y) = exp(-||x - y||^2 / (2 bandwidth^2)), bandwidth > 0

    A gaussian spec may carry ``bandwidth=None``, meaning "resolve by the
    median heuristic at training time"; it must be resolved before any
    evaluation.
    """

    def __init__(self, kind, degree=None, offset=None, bandwidth=None):
        if kind == "linear":
            pass
        elif kind == "polynomial":
            if degree is None or degree < 1 or int(degree) != degree:
                raise ValueError(f"polynomial degree must be an integer >= 1, got {degree}")
            if offset is None:
                offset = 0.0
            if offset < 0:
                raise ValueError(f"polynomial offset must be >= 0, got {offset}")
            degree = int(degree)
            offset = float(offset)
        elif kind == "gaussian":
            if bandwidth is not None and not bandwidth > 0:
                raise ValueError(f"gaussian bandwidth must be positive, got {bandwidth}")
            bandwidth = None if bandwidth is None else float(bandwidth)
        else:
            raise ValueError(f"unknown kernel kind {kind!r}")
        self.kind = kind
        self.degree = degree
        self.offset = offset
        self.bandwidth = bandwidth

    def resolved(self):
        return not (self.kind == "gaussian" and self.bandwidth is None)

    def with_bandwidth(self, bandwidth):
        return KernelSpec("gaussian", bandwidth=bandwidth)

    def __repr__(self):
        if self.kind == "polynomial":
            return f"KernelSpec(polynomial, degree={self.degree}, offset={self.offset:g})"
        if self.kind == "gaussian":
            bw = "auto" if self.bandwidth is None else f"{self.bandwidth:g}"
            return f"KernelSpec(gaussian, bandwidth={bw})"
        return "KernelSpec(linear)"


def linear_kernel():
    return KernelSpec("linear")


def polynomial_kernel(degree, offset=0.0):
    return KernelSpec("polynomial", degree=degree, offset=offset)


def gaussian_kernel(bandwidth=None):
    """Gaussian kernel; ``bandwidth=None`` defers to the median heuristic."""
    return KernelSpec("gaussian", bandwidth=bandwidth)


def _require_resolved(spec):
    if not spec.resolved():
        raise ValueError(
            "gaussian bandwidth is unset; train first or pass one explicitly"
        )


def kernel_eval(spec, x, y):
    """Evaluate the kernel on a single pair of equal-length vectors."""
    _require_resolved(spec)
    x = as_vector(x, "x")
    y = as_vector(y, "y")
    if x.size != y.size:
        raise ValueError(f"dimension mismatch: {x.size} vs {y.size}")
    if spec.kind == "linear":
        return float(np.dot(x, y))
    if spec.kind == "polynomial":
        return float((np.dot(x, y) + spec.offset) ** spec.degree)
    d = x - y
    return float(np.exp(-np.dot(d, d) / (2.0 * spec.bandwidth**2)))


def feature_map_deg2(x):
    """Explicit degree-2 monomial map of a 2-vector.

    ``(x1, x2) -> (x1^2, sqrt(2) x1 x2, x2^2)`` so that the mapped inner
    product equals ``(x . y)^2`` identically.
    """
    x = as_vector(x, "x")
    if x.size != 2:
        raise ValueError(f"feature_map_deg2 takes a 2-vector, got length {x.size}")
    return np.array([x[0] ** 2, np.sqrt(2.0) * x[0] * x[1], x[1] ** 2])


def _as_points(points):
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[0] == 0:
        raise ValueError(f"points must be a nonempty K x d array, got shape {pts.shape}")
    if not np.all(np.isfinite(pts)):
        raise ValueError("points contain non-finite values")
    return pts


def gram(spec, points):
    """K x K matrix of pairwise kernel values, exactly symmetrized."""
    _require_resolved(spec)
    pts = _as_points(points)
    if spec.kind in ("linear", "polynomial"):
        g = pts @ pts.T
        if spec.kind == "polynomial":
            g = (g + spec.offset) ** spec.degree
    else:
        sq = np.sum(pts * pts, axis=1)
        d2 = np.maximum(sq[:, None] + sq[None, :] - 2.0 * (pts @ pts.T), 0.0)
        g = np.exp(-d2 / (2.0 * spec.bandwidth**2))
    return 0.5 * (g + g.T)


def median_bandwidth(points):
    """Median pairwise distance of a point set (the "median heuristic")."""
    pts = _as_points(points)
    if pts.shape[0] < 2:
        raise ValueError("median heuristic needs at least 2 points")
    d2 = np.sum((pts[:, None, :] - pts[None, :, :]) ** 2, axis=-1)
    upper = d2[np.triu_indices(pts.shape[0], k=1)]
    med = float(np.sqrt(np.median(upper)))
    if med == 0.0:
        raise ValueError("median pairwise distance is zero; points coincide")
    return med


class KernelModel:
    """Dual-form kernel model: score(x) = sum_i coefficients[i] k(points[i], x)."""

    def __init__(self, spec, support_points, coefficients, ridge, used_lstsq=False):
        support_points = _as_points(support_points)
        coefficients = as_vector(coefficients, "coefficients")
        if coefficients.size != support_points.shape[0]:
            raise ValueError(
                f"{coefficients.size} coefficients for "
                f"{support_points.shape[0]} support points"
            )
        self.spec = spec
        self.support_points = support_points
        self.coefficients = coefficients
        self.ridge = ridge
        self.used_lstsq = used_lstsq


def krr_train(spec, points, labels, ridge):
    """Kernel ridge regression on +-1 labels.

    Solves ``(G + ridge I) alpha = labels`` by Cholesky factorization; if
    that fails or leaves a residual above ``1e-8 ||labels||``, falls back
    to least squares and flags the model with ``used_lstsq``.  A gaussian
    spec without a bandwidth is resolved by the median heuristic first.
    """
    pts = _as_points(points)
    y = as_vector(labels, "labels")
    if y.size != pts.shape[0]:
        raise ValueError(f"{y.size} labels for {pts.shape[0]} points")
    if not np.all(np.isin(y, (-1.0, 1.0))):
        raise ValueError("labels must be -1 or +1")
    if not ridge > 0:
        raise ValueError(f"ridge must be positive, got {ridge}")
    if spec.kind == "gaussian" and spec.bandwidth is None:
        spec = spec.with_bandwidth(median_bandwidth(pts))

    g = gram(spec, pts)
    system = g + ridge * np.eye(y.size)
    alpha = None
    used_lstsq = False
    try:
        c, low = scipy.linalg.cho_factor(system)
        alpha = scipy.linalg.cho_solve((c, low), y)
    except scipy.linalg.LinAlgError:
        pass
    if alpha is None or not _residual_ok(system, alpha, y):
        alpha, *_ = np.linalg.lstsq(system, y, rcond=None)
        used_lstsq = True
        if not _residual_ok(system, alpha, y):
            raise RuntimeError("kernel ridge system could not be solved accurately")
    return KernelModel(spec, pts, alpha, ridge, used_lstsq=used_lstsq)


def _residual_ok(system, alpha, y):
    return np.linalg.norm(system @ alpha - y) <= 1e-8 * np.linalg.norm(y)


def krr_predict(model, x):
    """Real-valued score at `x`; classify by sign."""
    x = as_vector(x, "x")
    if x.size != model.support_points.shape[1]:
        raise ValueError(
            f"dimension mismatch: model expects {model.support_points.shape[1]}, "
            f"got {x.size}"
        )
    spec = model.spec
    pts = model.support_points
    if spec.kind == "linear":
        k = pts @ x
    elif spec.kind == "polynomial":
        k = (pts @ x + spec.offset) ** spec.degree
    else:
        d = pts - x
        k = np.exp(-np.sum(d * d, axis=1) / (2.0 * spec.bandwidth**2))
    return float(model.coefficients @ k)


def krr_predict_many(model, points):
    """Vectorized :func:`krr_predict` over the rows of `points`."""
    pts = _as_points(points)
    return np.array([krr_predict(model, p) for p in pts])


def best_linear_accuracy(points, labels, n_directions=10000):
    """Best training accuracy of any line (affine halfplane rule) in 2-D.

    Sweeps `n_directions` uniformly spaced directions; for each, every
    distinct threshold along the projection is tried in both orientations,
    so the result is the exact optimum over that candidate family.
    """
    pts = _as_points(points)
    if pts.shape[1] != 2:
        raise ValueError("line sweep is defined for 2-D inputs")
    y = as_vector(labels, "labels")
    if y.size != pts.shape[0]:
        raise ValueError(f"{y.size} labels for {pts.shape[0]} points")
    n = y.size
    best = 0.0
    angles = np.linspace(0.0, np.pi, n_directions, endpoint=False)
    for theta in angles:
        proj = pts @ np.array([np.cos(theta), np.sin(theta)])
        order = np.argsort(proj, kind="stable")
        sorted_y = y[order]
        # accuracy of "positive above threshold" after each split position
        pos_above = np.concatenate(([np.sum(sorted_y > 0)], np.sum(sorted_y > 0) - np.cumsum(sorted_y > 0)))
        neg_below = np.concatenate(([0], np.cumsum(sorted_y < 0)))
        correct = pos_above + neg_below
        hi = int(np.max(correct))
        best = max(best, hi / n, (n - int(np.min(correct))) / n)
        if best == 1.0:
            break
    return best
