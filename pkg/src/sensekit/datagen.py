"""Seeded synthetic scenarios and evaluation metrics.

The traffic generator builds the crowdsensing fiction end to end: a
low-rank "city traffic" matrix (shared temporal patterns across columns),
sparse anomalies of arbitrary magnitude, dense noise, and a mask of
entries that never reached the data center.  Randomness comes from the
counter-based Philox generator with one spawned stream per role
(factors, anomalies, noise, mask), so the streams are platform
independent and changing one fraction never shifts another role's draws.
"""

import numpy as np

from .linalg import Mask, as_matrix, frobenius, project_mask

__all__ = [
    "Dataset",
    "ScenarioSpec",
    "anomaly_f1",
    "generate_circle_annulus",
    "generate_correlated_pairs",
    "generate_traffic",
    "relative_error",
]

STREAM_ROLES = ("factors", "anomalies", "noise", "mask")


class ScenarioSpec:
    """Shape and knobs of a synthetic traffic-matrix scenario."""

    def __init__(self, rows, cols, rank, anomaly_frac=0.05, noise_sigma=0.0,
                 missing_frac=0.0, anomaly_scale=10.0, seed=0):
        if rows < 1 or cols < 1:
            raise ValueError(f"matrix shape must be positive, got ({rows}, {cols})")
        if rank < 1 or rank > min(rows, cols):
            raise ValueError(
                f"rank must lie in [1, {min(rows, cols)}], got {rank}"
            )
        if not 0 <= anomaly_frac < 1:
            raise ValueError(f"anomaly_frac must lie in [0, 1), got {anomaly_frac}")
        if not 0 <= missing_frac < 1:
            raise ValueError(f"missing_frac must lie in [0, 1), got {missing_frac}")
        if noise_sigma < 0:
            raise ValueError(f"noise_sigma must be nonnegative, got {noise_sigma}")
        if not anomaly_scale > 0:
            raise ValueError(f"anomaly_scale must be positive, got {anomaly_scale}")
        if not 0 <= seed < 2**64:
            raise ValueError("seed must fit in an unsigned 64-bit integer")
        self.rows = int(rows)
        self.cols = int(cols)
        self.rank = int(rank)
        self.anomaly_frac = float(anomaly_frac)
        self.noise_sigma = float(noise_sigma)
        self.missing_frac = float(missing_frac)
        self.anomaly_scale = float(anomaly_scale)
        self.seed = int(seed)

    def as_dict(self):
        return {
            "rows": self.rows,
            "cols": self.cols,
            "rank": self.rank,
            "anomaly_frac": self.anomaly_frac,
            "noise_sigma": self.noise_sigma,
            "missing_frac": self.missing_frac,
            "anomaly_scale": self.anomaly_scale,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(**d)


class Dataset:
    """Generated observations with their ground truth attached."""

    def __init__(self, observed, mask, ground_truth_x, ground_truth_a, spec):
        self.observed = observed
        self.mask = mask
        self.ground_truth_x = ground_truth_x
        self.ground_truth_a = ground_truth_a
        self.spec = spec


def _role_rngs(seed):
    streams = np.random.SeedSequence(seed).spawn(len(STREAM_ROLES))
    return {
        role: np.random.Generator(np.random.Philox(stream))
        for role, stream in zip(STREAM_ROLES, streams)
    }


def generate_traffic(spec):
    """Build a :class:`Dataset` from a :class:`ScenarioSpec`.

    The low-rank part is a product of two Gaussian factor matrices scaled
    to unit spectral norm (rank exactly ``spec.rank``); anomalies are
    ``floor(rows*cols*anomaly_frac)`` uniformly chosen entries with values
    of random sign and magnitude uniform in [0.1, anomaly_scale]; noise is
    entrywise Gaussian; the mask drops ``floor(rows*cols*missing_frac)``
    uniformly chosen entries.  Same seed, same Dataset, bit for bit.
    """
    rngs = _role_rngs(spec.seed)
    rows, cols, rank = spec.rows, spec.cols, spec.rank

    rng = rngs["factors"]
    left = rng.normal(size=(rows, rank))
    right = rng.normal(size=(cols, rank))
    x = left @ right.T
    spectrum = np.linalg.svd(x, compute_uv=False)
    if spectrum[rank - 1] <= 1e-10 * spectrum[0]:
        raise ValueError("degenerate factor draw; choose another seed")
    x = x / spectrum[0]

    n_cells = rows * cols
    a = np.zeros((rows, cols))
    n_anomalies = int(np.floor(n_cells * spec.anomaly_frac))
    if n_anomalies:
        rng = rngs["anomalies"]
        flat = rng.choice(n_cells, size=n_anomalies, replace=False)
        magnitudes = rng.uniform(0.1, spec.anomaly_scale, size=n_anomalies)
        signs = rng.integers(0, 2, size=n_anomalies) * 2 - 1
        a.flat[flat] = signs * magnitudes

    if spec.noise_sigma > 0:
        v = rngs["noise"].normal(0.0, spec.noise_sigma, size=(rows, cols))
    else:
        v = np.zeros((rows, cols))

    observed_flags = np.ones((rows, cols), dtype=bool)
    n_missing = int(np.floor(n_cells * spec.missing_frac))
    if n_missing:
        drop = rngs["mask"].choice(n_cells, size=n_missing, replace=False)
        observed_flags.flat[drop] = False
    mask = Mask(observed_flags)

    observed = project_mask(x + a + v, mask)
    return Dataset(observed, mask, x, a, spec)


def generate_circle_annulus(n_points, seed, inner_radius=1.0, annulus=(2.0, 3.0)):
    """Disk-vs-annulus binary classification data.

    Half the points (label +1) fall uniformly in the disk of
    `inner_radius`; the rest (label -1) uniformly in the annulus between
    the two `annulus` radii.  Not linearly separable in the plane, exactly
    separable after the degree-2 monomial map.
    """
    if n_points < 2:
        raise ValueError("need at least 2 points")
    r1, r2 = annulus
    if not 0 < inner_radius <= r1 < r2:
        raise ValueError("radii must satisfy 0 < inner <= annulus lo < annulus hi")
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    n_pos = n_points // 2
    n_neg = n_points - n_pos
    radii_pos = inner_radius * np.sqrt(rng.uniform(size=n_pos))
    radii_neg = np.sqrt(rng.uniform(r1**2, r2**2, size=n_neg))
    angles = rng.uniform(0.0, 2.0 * np.pi, size=n_points)
    radii = np.concatenate([radii_pos, radii_neg])
    points = np.column_stack([radii * np.cos(angles), radii * np.sin(angles)])
    labels = np.concatenate([np.ones(n_pos), -np.ones(n_neg)])
    return points, labels


def generate_correlated_pairs(n_samples, rho, shift=(0.0, 0.0), seed=0):
    """Samples of a correlated 2-sensor reading: N(shift, [[1, rho], [rho, 1]])."""
    if not -1 < rho < 1:
        raise ValueError(f"rho must lie in (-1, 1), got {rho}")
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    raw = rng.normal(size=(n_samples, 2))
    chol = np.linalg.cholesky(np.array([[1.0, rho], [rho, 1.0]]))
    return raw @ chol.T + np.asarray(shift, dtype=float)


def relative_error(estimate, truth):
    """Frobenius error of `estimate` relative to `truth` (floored denominator)."""
    estimate = as_matrix(estimate, "estimate")
    truth = as_matrix(truth, "truth")
    if estimate.shape != truth.shape:
        raise ValueError(f"shape mismatch: {estimate.shape} vs {truth.shape}")
    return frobenius(estimate - truth) / max(frobenius(truth), 1e-30)


def anomaly_f1(estimate_a, truth_a, threshold=1e-9):
    """Support-set F1 between estimated and true anomaly matrices.

    An entry belongs to a support when its magnitude exceeds `threshold`.
    Two empty supports agree perfectly and score 1 by convention.
    """
    est = np.abs(as_matrix(estimate_a, "estimate_a")) > threshold
    tru = np.abs(as_matrix(truth_a, "truth_a")) > threshold
    if est.shape != tru.shape:
        raise ValueError(f"shape mismatch: {est.shape} vs {tru.shape}")
    n_est = int(est.sum())
    n_tru = int(tru.sum())
    if n_est == 0 and n_tru == 0:
        return 1.0
    hits = int((est & tru).sum())
    if hits == 0:
        return 0.0
    precision = hits / n_est
    recall = hits / n_tru
    return 2.0 * precision * recall / (precision + recall)
