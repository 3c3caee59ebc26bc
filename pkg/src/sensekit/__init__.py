"""sensekit: analytics for crowdsourced sensing data.

Four pillars, one per module family:

- :mod:`sensekit.copula`    -- fuse heterogeneous sensor streams by joining
  per-sensor marginals with a Gaussian copula;
- :mod:`sensekit.kernels`   -- kernel evaluation, Gram matrices, and kernel
  ridge classification for nonlinear structure;
- :mod:`sensekit.recovery`  -- low-rank denoising, robust PCA, and masked
  completion/recovery of sensing matrices;
- :mod:`sensekit.consensus` -- consensus ADMM, centralized and one-hop
  decentralized, over simulated agent networks.

:mod:`sensekit.linalg` holds the shared matrix primitives and proximal
operators; :mod:`sensekit.datagen`, :mod:`sensekit.fileio`,
:mod:`sensekit.reporting`, :mod:`sensekit.experiments`, and
:mod:`sensekit.cli` provide the synthetic scenario, file formats, and the
command-line harness around everything.
"""

__version__ = "0.1.0"

from .linalg import (  # noqa: E402
    DecompositionError,
    Mask,
    SvdResult,
    elementwise_l1,
    frobenius,
    nuclear_norm,
    project_mask,
    shrink,
    svd,
    svt,
)
from .copula import (  # noqa: E402
    GaussianCopula,
    JointDensityModel,
    copula_density,
    detection_auc,
    fit_empirical_marginal,
    fit_gaussian_copula,
    fit_gaussian_marginal,
    fit_joint_model,
    fuse_detect,
    joint_pdf,
)
from .kernels import (  # noqa: E402
    feature_map_deg2,
    gaussian_kernel,
    gram,
    kernel_eval,
    krr_predict,
    krr_train,
    linear_kernel,
    polynomial_kernel,
)
from .recovery import (  # noqa: E402
    RecoveryProblem,
    RecoveryResult,
    SolverConfig,
    default_lambda,
    masked_rpca,
    pca_denoise,
    rpca,
    solve_ialm,
)
from .consensus import (  # noqa: E402
    ConsensusConfig,
    Topology,
    admm_central,
    admm_decentralized,
    quadratic_objective,
)
from .datagen import (  # noqa: E402
    Dataset,
    ScenarioSpec,
    anomaly_f1,
    generate_circle_annulus,
    generate_traffic,
    relative_error,
)
from .reporting import RunReport  # noqa: E402
