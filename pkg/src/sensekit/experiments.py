"""End-to-end experiment drivers shared by the CLI, the demos, and the
acceptance suite.

Each driver is deterministic given its seed and returns a plain dict of
finite metrics ready to drop into a run report.
"""

import numpy as np

from . import consensus, copula, datagen, kernels, recovery

__all__ = [
    "consensus_quadratic_experiment",
    "fusion_benefit_experiment",
    "kernel_separability_experiment",
    "recovery_experiment",
]


def fusion_benefit_experiment(n_trials=2000, rho=0.8, shift=(1.0, 0.0),
                              n_train=3000, seed=0):
    """Copula fusion versus product-model fusion on correlated sensors.

    Two sensors share correlated noise (correlation `rho`); under H1 the
    readings shift by `shift`.  Both detectors use the same fitted
    Gaussian marginals; the copula detector adds the fitted correlation,
    the product detector assumes independence.  Both score the identical
    test trials, half per hypothesis, and are compared by AUC.
    """
    if n_trials < 2:
        raise ValueError("need at least 2 trials")
    streams = np.random.SeedSequence(seed).spawn(4)
    sub = [int(s.generate_state(1)[0]) for s in streams]
    train0 = datagen.generate_correlated_pairs(n_train, rho, (0.0, 0.0), sub[0])
    train1 = datagen.generate_correlated_pairs(n_train, rho, shift, sub[1])
    n1 = n_trials // 2
    n0 = n_trials - n1
    test0 = datagen.generate_correlated_pairs(n0, rho, (0.0, 0.0), sub[2])
    test1 = datagen.generate_correlated_pairs(n1, rho, shift, sub[3])

    h0 = copula.fit_joint_model(train0, marginal="gaussian-parametric")
    h1 = copula.fit_joint_model(train1, marginal="gaussian-parametric")
    h0_prod = h0.as_product_model()
    h1_prod = h1.as_product_model()

    def llrs(model0, model1, samples):
        return np.array([model1.logpdf(z) - model0.logpdf(z) for z in samples])

    copula_auc = copula.detection_auc(
        llrs(h0, h1, test0), llrs(h0, h1, test1)
    )
    product_auc = copula.detection_auc(
        llrs(h0_prod, h1_prod, test0), llrs(h0_prod, h1_prod, test1)
    )
    return {
        "copula_auc": float(copula_auc),
        "product_auc": float(product_auc),
        "auc_margin": float(copula_auc - product_auc),
        "n_trials": int(n_trials),
        "rho": float(rho),
        "fitted_correlation_h0": float(h0.copula.correlation[0, 1]),
        "fitted_correlation_h1": float(h1.copula.correlation[0, 1]),
    }


def kernel_separability_experiment(n_points=200, seed=0, bandwidth=1.0,
                                   ridge=1e-3, n_directions=10000):
    """Disk-vs-annulus classification: nonlinear kernel against every line.

    Reports training accuracy of gaussian-kernel ridge regression, of
    linear-kernel ridge regression, of the best line found by an
    exhaustive direction sweep in the plane, and of a least-squares plane
    over the explicit degree-2 features.
    """
    points, labels = datagen.generate_circle_annulus(n_points, seed)

    gaussian = kernels.krr_train(
        kernels.gaussian_kernel(bandwidth), points, labels, ridge
    )
    linear = kernels.krr_train(kernels.linear_kernel(), points, labels, ridge)

    def accuracy(model):
        scores = kernels.krr_predict_many(model, points)
        return float(np.mean(np.where(scores > 0, 1.0, -1.0) == labels))

    mapped = np.array([kernels.feature_map_deg2(p) for p in points])
    design = np.column_stack([mapped, np.ones(len(labels))])
    coef, *_ = np.linalg.lstsq(design, labels, rcond=None)
    mapped_scores = design @ coef
    mapped_acc = float(np.mean(np.where(mapped_scores > 0, 1.0, -1.0) == labels))

    return {
        "gaussian_accuracy": accuracy(gaussian),
        "linear_krr_accuracy": accuracy(linear),
        "best_line_accuracy": float(
            kernels.best_linear_accuracy(points, labels, n_directions)
        ),
        "mapped_linear_accuracy": mapped_acc,
        "n_points": int(n_points),
        "bandwidth": float(bandwidth),
        "ridge": float(ridge),
    }


def consensus_quadratic_experiment(topology, dim=3, mu=1.0, max_rounds=500,
                                   tol=1e-9, seed=0, mode="decentralized"):
    """Quadratic consensus over a topology with seeded target vectors.

    Each agent pulls toward its own random target; the consensus optimum
    is the mean of the targets.  Reports the residual histories and the
    worst per-agent distance to that optimum.
    """
    n = topology.agent_count
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    targets = rng.normal(size=(n, dim))
    objectives = [consensus.quadratic_objective(t) for t in targets]
    cfg = consensus.ConsensusConfig(mu=mu, max_rounds=max_rounds, tol=tol)
    if mode == "central":
        result = consensus.admm_central(objectives, dim, cfg)
        z_list = [result.z]
    elif mode == "decentralized":
        result = consensus.admm_decentralized(objectives, topology, dim, cfg)
        z_list = result.z
    else:
        raise ValueError(f"unknown mode {mode!r}")
    optimum = targets.mean(axis=0)
    disagreement = max(float(np.linalg.norm(z - optimum)) for z in z_list)
    return {
        "mode": mode,
        "agents": int(n),
        "dim": int(dim),
        "rounds": int(result.rounds),
        "converged": bool(result.converged),
        "final_primal_residual": float(result.primal_residual_history[-1]),
        "final_dual_residual": float(result.dual_residual_history[-1]),
        "distance_to_optimum": disagreement,
        "primal_residual_history": [float(v) for v in result.primal_residual_history],
        "dual_residual_history": [float(v) for v in result.dual_residual_history],
    }


def recovery_experiment(dataset, solver, lam=None, config=None, tau=None):
    """Run one recovery solver on a generated dataset and score it.

    `solver` is "pca-denoise", "rpca", or "complete".  Returns the metric
    dict (relative error against the ground-truth low-rank part, anomaly
    support F1, iteration count, final residual).
    """
    if solver == "pca-denoise":
        if tau is None:
            raise ValueError("pca-denoise requires tau")
        x = recovery.pca_denoise(dataset.observed, tau)
        return {
            "relative_error": datagen.relative_error(x, dataset.ground_truth_x),
            "anomaly_f1": None,
            "iterations": 1,
            "residual": datagen.relative_error(x, dataset.observed),
            "converged": True,
        }, x, None
    if solver == "rpca" and not dataset.mask.is_full():
        raise ValueError("dataset has missing entries; use the 'complete' solver")
    problem = recovery.RecoveryProblem(
        dataset.observed,
        mask=dataset.mask if solver == "complete" else None,
        lam=lam,
        config=config,
    )
    result = recovery.rpca(problem) if solver == "rpca" else recovery.masked_rpca(problem)
    metrics = {
        "relative_error": datagen.relative_error(result.x, dataset.ground_truth_x),
        "anomaly_f1": datagen.anomaly_f1(result.a, dataset.ground_truth_a),
        "iterations": result.iterations,
        "residual": result.final_residual,
        "rank_estimate": result.rank_estimate,
        "sparsity_estimate": result.sparsity_estimate,
        "converged": result.converged,
    }
    return metrics, result.x, result.a
