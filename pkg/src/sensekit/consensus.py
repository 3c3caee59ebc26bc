"""Global-consensus ADMM over a simulated agent network.

Agents hold private objectives and local variables that must agree on a
shared value.  The fusion-center variant averages everyone every round;
the decentralized variant replaces that average with a one-hop neighbor
average (each agent's neighbor set includes itself, which makes the
complete graph reduce exactly to the central update).  Rounds are
synchronous: all x updates, then the z average(s), then all dual updates.
"""

import numpy as np

from .linalg import as_vector, shrink

__all__ = [
    "AgentState",
    "ConsensusConfig",
    "ConsensusResult",
    "LocalObjective",
    "RoundTrace",
    "Topology",
    "admm_central",
    "admm_decentralized",
    "l1_objective",
    "least_squares_objective",
    "quadratic_objective",
    "residuals",
]


class Topology:
    """Undirected agent graph; no self-loops are stored.

    The neighbor set of agent i is self-inclusive: {i} union its
    adjacent agents.
    """

    def __init__(self, agent_count, edges=()):
        if agent_count < 1 or int(agent_count) != agent_count:
            raise ValueError(f"agent_count must be a positive integer, got {agent_count}")
        self.agent_count = int(agent_count)
        canon = set()
        for i, j in edges:
            i, j = int(i), int(j)
            if i == j:
                raise ValueError(f"self-loop on agent {i}")
            if not (0 <= i < agent_count and 0 <= j < agent_count):
                raise ValueError(f"edge ({i}, {j}) outside 0..{agent_count - 1}")
            canon.add((min(i, j), max(i, j)))
        self.edges = frozenset(canon)
        adj = [{i} for i in range(self.agent_count)]
        for i, j in self.edges:
            adj[i].add(j)
            adj[j].add(i)
        self._neighbors = [np.array(sorted(s)) for s in adj]

    @classmethod
    def complete(cls, n):
        return cls(n, [(i, j) for i in range(n) for j in range(i + 1, n)])

    @classmethod
    def ring(cls, n):
        if n < 2:
            return cls(n)
        return cls(n, [(i, (i + 1) % n) for i in range(n)])

    def neighbors(self, i):
        """Self-inclusive one-hop neighbor indices of agent i, sorted."""
        return self._neighbors[i]

    def __repr__(self):
        return f"Topology({self.agent_count} agents, {len(self.edges)} edges)"


class LocalObjective:
    """An agent's private objective.

    ``value(x)`` evaluates it; ``step(y, z, mu)`` returns the minimizer
    over x of ``value(x) + y.(x - z) + (mu/2) ||x - z||^2``.
    """

    def __init__(self, value, step):
        self.value = value
        self.step = step


def quadratic_objective(a, w=1.0):
    """f(x) = w ||x - a||^2 with the closed-form proximal step."""
    a = np.atleast_1d(np.asarray(a, dtype=float))
    if not w > 0:
        raise ValueError(f"weight must be positive, got {w}")

    def value(x):
        d = x - a
        return w * float(d @ d)

    def step(y, z, mu):
        return (2.0 * w * a + mu * z - y) / (2.0 * w + mu)

    return LocalObjective(value, step)


def l1_objective(gamma):
    """f(x) = gamma ||x||_1; the step is a soft threshold."""
    if not gamma > 0:
        raise ValueError(f"gamma must be positive, got {gamma}")

    def value(x):
        return gamma * float(np.sum(np.abs(x)))

    def step(y, z, mu):
        return shrink(z - y / mu, gamma / mu)

    return LocalObjective(value, step)


def least_squares_objective(b_mat, b_vec):
    """f(x) = ||B x - b||^2; the step solves a small linear system."""
    b_mat = np.asarray(b_mat, dtype=float)
    b_vec = np.asarray(b_vec, dtype=float)
    gram = 2.0 * b_mat.T @ b_mat
    lin = 2.0 * b_mat.T @ b_vec

    def value(x):
        r = b_mat @ x - b_vec
        return float(r @ r)

    def step(y, z, mu):
        return np.linalg.solve(gram + mu * np.eye(gram.shape[0]), lin + mu * z - y)

    return LocalObjective(value, step)


class ConsensusConfig:
    """Penalty mu, the round budget, and the residual stopping threshold."""

    def __init__(self, mu=1.0, max_rounds=1000, tol=1e-8):
        if not mu > 0:
            raise ValueError(f"mu must be positive, got {mu}")
        if max_rounds < 1 or int(max_rounds) != max_rounds:
            raise ValueError(f"max_rounds must be a positive integer, got {max_rounds}")
        if not tol > 0:
            raise ValueError(f"tol must be positive, got {tol}")
        self.mu = float(mu)
        self.max_rounds = int(max_rounds)
        self.tol = float(tol)


class AgentState:
    """Local primal variable x and dual variable y of one agent."""

    def __init__(self, x, y):
        self.x = x
        self.y = y


class RoundTrace:
    """Per-round snapshot: stacked x, stacked y, and z (or stacked z_i)."""

    def __init__(self, xs, ys, z):
        self.xs = xs
        self.ys = ys
        self.z = z


class ConsensusResult:
    """Final consensus estimate plus per-round residual histories.

    ``z`` is a single vector for the central variant and the list of
    per-agent vectors for the decentralized one.  ``trace`` holds full
    per-round state when recording was requested, else None.
    """

    def __init__(self, z, rounds, primal_residual_history, dual_residual_history,
                 converged, states, trace=None):
        self.z = z
        self.rounds = rounds
        self.primal_residual_history = primal_residual_history
        self.dual_residual_history = dual_residual_history
        self.converged = converged
        self.states = states
        self.trace = trace


def residuals(states, z_prev, z_curr, mu):
    """Standard consensus diagnostics.

    Primal: worst disagreement ``max_i ||x_i - z||``; dual: scaled global
    movement ``mu ||z_curr - z_prev||``.  `states` may be a list of
    :class:`AgentState` or a stacked array of x rows; per-agent z is
    handled by passing stacked z rows.
    """
    if len(states) and isinstance(states[0], AgentState):
        xs = np.stack([s.x for s in states])
    else:
        xs = np.asarray(states, dtype=float)
    primal = float(np.max(np.linalg.norm(xs - z_curr, axis=-1)))
    dual = mu * float(np.max(np.linalg.norm(np.atleast_2d(z_curr - z_prev), axis=-1)))
    return primal, dual


def _neighbor_average(contribs, idx):
    return np.add.reduce(contribs[idx], axis=0) / len(idx)


def _step_all(objectives, ys, zs, mu, xs_out):
    for i, obj in enumerate(objectives):
        try:
            x = np.asarray(obj.step(ys[i], zs[i], mu), dtype=float)
        except Exception as exc:
            raise RuntimeError(f"objective step failed for agent {i}") from exc
        if x.shape != xs_out[i].shape or not np.all(np.isfinite(x)):
            raise RuntimeError(f"objective step for agent {i} returned invalid output")
        xs_out[i] = x


def admm_central(objectives, dim, cfg=None, record=False):
    """Fusion-center consensus ADMM.

    Every round: each agent minimizes its augmented objective against the
    global z, the center averages ``x_i + y_i / mu`` into the new z, and
    each agent ascends its dual.  Starts from all zeros and stops when both
    residuals drop below ``cfg.tol``.
    """
    cfg = cfg if cfg is not None else ConsensusConfig()
    n = len(objectives)
    if n < 1:
        raise ValueError("need at least one objective")
    mu = cfg.mu
    xs = np.zeros((n, dim))
    ys = np.zeros((n, dim))
    z = np.zeros(dim)
    everyone = np.arange(n)
    primal_hist, dual_hist, trace = [], [], ([] if record else None)
    converged = False
    rounds = 0

    for rounds in range(1, cfg.max_rounds + 1):
        zs = np.broadcast_to(z, (n, dim))
        _step_all(objectives, ys, zs, mu, xs)
        contribs = xs + ys / mu
        z_prev = z
        z = _neighbor_average(contribs, everyone)
        ys = ys + mu * (xs - z)
        primal, dual = residuals(xs, z_prev, z, mu)
        primal_hist.append(primal)
        dual_hist.append(dual)
        if record:
            trace.append(RoundTrace(xs.copy(), ys.copy(), z.copy()))
        if primal <= cfg.tol and dual <= cfg.tol:
            converged = True
            break

    states = [AgentState(xs[i].copy(), ys[i].copy()) for i in range(n)]
    return ConsensusResult(
        z=z.copy(),
        rounds=rounds,
        primal_residual_history=np.array(primal_hist),
        dual_residual_history=np.array(dual_hist),
        converged=converged,
        states=states,
        trace=trace,
    )


def admm_decentralized(objectives, topology, dim, cfg=None, record=False):
    """One-hop decentralized consensus ADMM.

    Identical to :func:`admm_central` except each agent averages
    ``x_j + y_j / mu`` over its own self-inclusive neighbor set, so no
    fusion center is needed.  On a complete graph the per-agent averages
    coincide, round for round, with the central z sequence.
    """
    cfg = cfg if cfg is not None else ConsensusConfig()
    n = len(objectives)
    if n < 1:
        raise ValueError("need at least one objective")
    if topology.agent_count != n:
        raise ValueError(
            f"{n} objectives for a topology of {topology.agent_count} agents"
        )
    mu = cfg.mu
    xs = np.zeros((n, dim))
    ys = np.zeros((n, dim))
    zs = np.zeros((n, dim))
    neighbor_sets = [topology.neighbors(i) for i in range(n)]
    primal_hist, dual_hist, trace = [], [], ([] if record else None)
    converged = False
    rounds = 0

    for rounds in range(1, cfg.max_rounds + 1):
        _step_all(objectives, ys, zs, mu, xs)
        contribs = xs + ys / mu
        zs_prev = zs
        zs = np.stack([_neighbor_average(contribs, nb) for nb in neighbor_sets])
        ys = ys + mu * (xs - zs)
        primal = float(np.max(np.linalg.norm(xs - zs, axis=-1)))
        dual = mu * float(np.max(np.linalg.norm(zs - zs_prev, axis=-1)))
        primal_hist.append(primal)
        dual_hist.append(dual)
        if record:
            trace.append(RoundTrace(xs.copy(), ys.copy(), zs.copy()))
        if primal <= cfg.tol and dual <= cfg.tol:
            converged = True
            break

    states = [AgentState(xs[i].copy(), ys[i].copy()) for i in range(n)]
    return ConsensusResult(
        z=[zs[i].copy() for i in range(n)],
        rounds=rounds,
        primal_residual_history=np.array(primal_hist),
        dual_residual_history=np.array(dual_hist),
        converged=converged,
        states=states,
        trace=trace,
    )
