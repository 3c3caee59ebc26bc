"""Dense-matrix primitives: SVD, norms, and the proximal/projection operators.

Every solver in the package works on plain 2-D float64 ndarrays validated
through :func:`as_matrix`.  Missing data is always expressed through a
:class:`Mask`; matrices themselves never carry NaN/inf sentinels.
"""

import numpy as np
import scipy.linalg

__all__ = [
    "DecompositionError",
    "Mask",
    "SvdResult",
    "as_matrix",
    "as_vector",
    "elementwise_l1",
    "frobenius",
    "nuclear_norm",
    "project_mask",
    "shrink",
    "svd",
    "svt",
]


class DecompositionError(RuntimeError):
    """A factorization failed to converge.

    ``residual`` holds the Frobenius norm of the input, the best available
    measure of how much mass the failed decomposition left unexplained.
    """

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


def as_matrix(a, name="matrix"):
    """Validate `a` as a 2-D float64 array with finite entries and return it."""
    m = np.asarray(a, dtype=float)
    if m.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {m.shape}")
    if m.size and not np.all(np.isfinite(m)):
        raise ValueError(
            f"{name} contains non-finite entries; represent missing data with a Mask"
        )
    return m


def as_vector(a, name="vector"):
    """Validate `a` as a 1-D float64 array with finite entries and return it."""
    v = np.asarray(a, dtype=float)
    if v.ndim != 1:
        raise ValueError(f"{name} must be 1-D, got shape {v.shape}")
    if v.size and not np.all(np.isfinite(v)):
        raise ValueError(f"{name} contains non-finite entries")
    return v


class Mask:
    """Observed-entry indicator for a ``rows x cols`` matrix.

    Wraps a read-only boolean array in which ``True`` marks an observed
    entry.  Building from an explicit index set rejects out-of-range and
    duplicate pairs.
    """

    def __init__(self, observed):
        obs = np.array(observed, dtype=bool)
        if obs.ndim != 2:
            raise ValueError(f"mask must be 2-D, got shape {obs.shape}")
        obs.setflags(write=False)
        self.observed = obs

    @classmethod
    def from_indices(cls, rows, cols, pairs):
        """Mask with exactly the (row, col) `pairs` observed."""
        pairs = list(pairs)
        seen = set()
        obs = np.zeros((rows, cols), dtype=bool)
        for i, j in pairs:
            if not (0 <= i < rows and 0 <= j < cols):
                raise ValueError(f"index ({i}, {j}) outside ({rows}, {cols})")
            if (i, j) in seen:
                raise ValueError(f"duplicate index pair ({i}, {j})")
            seen.add((i, j))
            obs[i, j] = True
        return cls(obs)

    @classmethod
    def full(cls, rows, cols):
        return cls(np.ones((rows, cols), dtype=bool))

    @property
    def rows(self):
        return self.observed.shape[0]

    @property
    def cols(self):
        return self.observed.shape[1]

    @property
    def shape(self):
        return self.observed.shape

    @property
    def n_observed(self):
        return int(self.observed.sum())

    def is_full(self):
        return bool(self.observed.all())

    def is_empty(self):
        return not bool(self.observed.any())

    def index_pairs(self):
        """Observed indices as a list of (row, col) tuples in row-major order."""
        return [tuple(p) for p in np.argwhere(self.observed)]

    def __eq__(self, other):
        if not isinstance(other, Mask):
            return NotImplemented
        return self.shape == other.shape and bool(
            np.array_equal(self.observed, other.observed)
        )

    def __repr__(self):
        return f"Mask({self.rows}x{self.cols}, {self.n_observed} observed)"


class SvdResult:
    """Thin SVD ``m = u @ diag(s) @ v.T``.

    ``u`` is M x r, ``s`` the r singular values sorted descending, ``v`` is
    N x r, with r = min(M, N).
    """

    def __init__(self, u, s, v):
        self.u = u
        self.s = s
        self.v = v

    def __iter__(self):
        return iter((self.u, self.s, self.v))

    @property
    def rank(self):
        return self.s.size

    def reconstruct(self):
        return (self.u * self.s) @ self.v.T


def svd(m):
    """Thin SVD of a nonempty matrix.

    Falls back from the divide-and-conquer LAPACK driver to the sturdier
    classic one before giving up; raises :class:`DecompositionError` if
    neither converges within its iteration budget.
    """
    m = as_matrix(m)
    if m.size == 0:
        raise ValueError("svd requires a nonempty matrix")
    try:
        u, s, vh = np.linalg.svd(m, full_matrices=False)
    except np.linalg.LinAlgError:
        try:
            u, s, vh = scipy.linalg.svd(m, full_matrices=False, lapack_driver="gesvd")
        except Exception as exc:
            raise DecompositionError(
                "SVD did not converge", residual=float(np.linalg.norm(m))
            ) from exc
    return SvdResult(u, s, vh.T)


def nuclear_norm(m):
    """Sum of the singular values."""
    return float(np.sum(svd(m).s))


def elementwise_l1(m):
    """Sum of absolute entry values."""
    return float(np.sum(np.abs(as_matrix(m))))


def frobenius(m):
    """Square root of the sum of squared entries."""
    return float(np.linalg.norm(as_matrix(m)))


def shrink(a, tau):
    """Soft-threshold `a` entrywise: sign(x) * max(|x| - tau, 0).

    The proximal operator of ``tau * || . ||_1``; accepts arrays of any
    shape (solvers apply it to matrices, consensus objectives to vectors).
    """
    if tau < 0:
        raise ValueError(f"shrink threshold must be nonnegative, got {tau}")
    a = np.asarray(a, dtype=float)
    return np.sign(a) * np.maximum(np.abs(a) - tau, 0.0)


def _svt_spectrum(m, tau):
    """Soft-threshold the spectrum; returns (matrix, shrunk singular values)."""
    res = svd(m)
    s = np.maximum(res.s - tau, 0.0)
    return (res.u * s) @ res.v.T, s


def svt(m, tau):
    """Singular value thresholding, the proximal operator of ``tau * || . ||_*``.

    Equals ``u @ diag(max(s - tau, 0)) @ v.T`` for the thin SVD of `m`; the
    output rank never exceeds the input rank.
    """
    if tau < 0:
        raise ValueError(f"svt threshold must be nonnegative, got {tau}")
    return _svt_spectrum(m, tau)[0]


def project_mask(m, mask):
    """Orthogonal projection onto matrices supported on the observed set.

    Keeps entries where ``mask.observed`` is True and zeroes the rest;
    idempotent and self-adjoint.
    """
    m = as_matrix(m)
    if m.shape != mask.shape:
        raise ValueError(f"matrix shape {m.shape} != mask shape {mask.shape}")
    return np.where(mask.observed, m, 0.0)
