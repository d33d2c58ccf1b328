"""
Verification Suites

Self-contained property checks with known oracles: consensus solver
feasibility and optimality, KKT certificates, the aligned-factor safety
bounds, policy-gradient finite differences, GAE identities, the
team-quadratic margin and tabular critic convergence. Each suite returns a
VerifyReport; a suite fails iff any case exceeds its tolerance.
"""

from typing import Callable, Dict, List, Optional

import numpy as np

from ..core.consensus import (
    geometric_aligned_direction, geometric_aligned_factor, kkt_margin, min_norm_pair_oracle,
    solve_consensus_qp, verify_kkt
)
from ..core.envs import MatrixGameEnv, make_env
from ..core.estimation import TabularCritic, exact_state_values, gae, return_targets, td_errors
from ..core.numerics import RngStream
from ..core.policy import PolicyParams, SharedMlpPolicy, TabularSoftmaxPolicy, finite_difference_check
from ..models.config import EnvParams, RunConfig
from ..models.metrics import VerifyReport
from ..models.rollout import RolloutBatch
from ..utils.constants import (
    ENV_MATRIX_CLIMB, ENV_TEAM_QUADRATIC, OPTIMIZER_PLAIN, STREAM_VERIFY, TEAM_QUADRATIC_AGENTS, VERIFY_SUITES
)
from ..utils.logger import get_logger, log_suite_result
from .margin import quadratic_margin_check
from .rollout import collect_rollouts
from .trainer import ppo_critic_update

logger = get_logger(__name__)

SIMPLEX_TOL = 1e-9
RECONSTRUCTION_TOL = 1e-9
PARETO_TOL = 1e-6
PAIR_ORACLE_TOL = 1e-8
GRID_ORACLE_TOL = 1e-5
GRID_STEP = 1e-3
KKT_TOL = 1e-6
GAMMA_RANGE_TOL = 1e-8
SAFETY_TOL = 1e-10
GRADCHECK_TABULAR_TOL = 1e-6
GRADCHECK_MLP_TOL = 1e-4
GAE_SUM_TOL = 1e-12
CRITIC_ERROR_TOL = 1e-3
CRITIC_MONOTONE_SLACK = 1e-9

DEFAULT_CASES = {
    "qp": 1000,
    "kkt": 1000,
    "gamma_factor": 1000,
    "gradcheck": 100,
    "gae": 1000,
    "margin": 100,
    "critic": 300,
}

_SUITE_STREAMS = {name: index for index, name in enumerate(VERIFY_SUITES)}


def _stream(suite: str, seed: int) -> RngStream:
    return RngStream(seed, (STREAM_VERIFY, _SUITE_STREAMS[suite]))


def _random_gradients(rng: RngStream, max_agents: int = 16, max_dim: int = 256,
                      min_agents: int = 2, min_dim: int = 1) -> np.ndarray:
    n = int(rng.integers(min_agents, max_agents + 1))
    d = int(rng.integers(max(min_dim, 1), max_dim + 1))
    return rng.uniform(-1.0, 1.0, size=(n, d))


def barycentric_grid(step: float = GRID_STEP) -> np.ndarray:
    """Every point of the 3-simplex grid with spacing ``step``, as rows."""
    m = int(round(1.0 / step))
    i, j = np.meshgrid(np.arange(m + 1), np.arange(m + 1), indexing="ij")
    mask = i + j <= m
    a = i[mask] / m
    b = j[mask] / m
    return np.stack([a, b, 1.0 - a - b], axis=1)


def verify_qp(cases: int, seed: int = 0) -> VerifyReport:
    """Feasibility, reconstruction and Pareto margin on random sets, plus the N=2 and N=3 oracles."""
    report = VerifyReport(suite="qp")
    rng = _stream("qp", seed)
    for case in range(cases):
        G = _random_gradients(rng.spawn(case))
        outcome = solve_consensus_qp(G)
        c = outcome.weights
        simplex = abs(float(c.sum()) - 1.0)
        reconstruction = float(np.max(np.abs(outcome.u_star - c @ G)))
        pareto = -kkt_margin(G, outcome)
        ok = (simplex <= SIMPLEX_TOL and bool(np.all(c >= 0.0)) and reconstruction <= RECONSTRUCTION_TOL
              and pareto <= PARETO_TOL)
        report.record(ok, simplex_residual=simplex, reconstruction_residual=reconstruction,
                      pareto_violation=pareto)

    oracle_cases = max(1, cases // 5)
    for case in range(oracle_cases):
        sub = rng.spawn(cases + case)
        g1, g2 = sub.uniform(-1.0, 1.0, size=(2, int(sub.integers(1, 257))))
        solved = solve_consensus_qp([g1, g2], tol=1e-12)
        oracle = min_norm_pair_oracle(g1, g2)
        diff = abs(solved.objective - oracle.objective)
        report.record(diff <= PAIR_ORACLE_TOL, pair_oracle_gap=diff)

    grid = barycentric_grid()
    for case in range(oracle_cases):
        sub = rng.spawn(cases + oracle_cases + case)
        G = sub.uniform(-1.0, 1.0, size=(3, int(sub.integers(1, 4))))
        solved = solve_consensus_qp(G)
        points = grid @ G
        brute = 0.5 * float(np.min(np.einsum("ij,ij->i", points, points)))
        diff = abs(solved.objective - brute)
        report.record(diff <= GRID_ORACLE_TOL, grid_oracle_gap=diff)
    return report


def verify_kkt_suite(cases: int, seed: int = 0) -> VerifyReport:
    """Reconstructed duals of solver outputs satisfy dual feasibility and complementarity."""
    report = VerifyReport(suite="kkt")
    rng = _stream("kkt", seed)
    for case in range(cases):
        G = _random_gradients(rng.spawn(case))
        outcome = solve_consensus_qp(G)
        kkt = verify_kkt(G, outcome, eps=KKT_TOL)
        lam_residual = abs(kkt.lam - float(outcome.u_star @ outcome.u_star))
        report.record(kkt.passed and lam_residual == 0.0, kkt_violation=kkt.max_violation,
                      lambda_residual=lam_residual)
    return report


def verify_gamma_factor(cases: int, seed: int = 0) -> VerifyReport:
    """
    Aligned-factor bounds on (g_i, u*) pairs taken from solver outputs.

    Gradient sets come from the same distribution as the ``qp`` suite and are
    solved at the default tolerance, as in training.
    """
    report = VerifyReport(suite="gamma_factor")
    rng = _stream("gamma_factor", seed)
    pairs = 0
    case = 0
    while pairs < cases:
        G = _random_gradients(rng.spawn(case))
        case += 1
        outcome = solve_consensus_qp(G)
        u = outcome.u_star
        for g in G:
            if pairs >= cases:
                break
            factor = geometric_aligned_factor(g, u)
            v = geometric_aligned_direction(g, u)
            range_violation = max(0.0, -factor, factor - 1.0)
            agent_harm = max(0.0, -float(g @ v))
            consensus_harm = max(0.0, -float(u @ v))
            ok = range_violation <= GAMMA_RANGE_TOL and agent_harm <= SAFETY_TOL and consensus_harm <= SAFETY_TOL
            report.record(ok, gamma_range_violation=range_violation, agent_harm=agent_harm,
                          consensus_harm=consensus_harm)
            pairs += 1
    return report


def _random_batch(rng: RngStream, observations: List[np.ndarray], n_agents: int, n_actions: int,
                  size: int) -> RolloutBatch:
    actions = rng.integers(0, n_actions, size=(n_agents, size))
    advantages = rng.normal(0.0, 1.0, size=size)
    return RolloutBatch.from_samples(observations, actions, np.zeros((n_agents, size)), advantages)


def verify_gradcheck(cases: int, seed: int = 0) -> VerifyReport:
    """Analytic head and backbone gradients against central differences, tabular and MLP, one seed per case."""
    report = VerifyReport(suite="gradcheck")
    rng = _stream("gradcheck", seed)
    for case in range(cases):
        sub = rng.spawn(case)
        n_agents = int(sub.integers(1, 4))
        n_actions = int(sub.integers(2, 6))
        size = int(sub.integers(4, 33))

        n_obs = int(sub.integers(1, 6))
        tabular = TabularSoftmaxPolicy(n_agents, n_obs, n_actions)
        params = PolicyParams(tabular.layout, sub.normal(0.0, 1.0, tabular.layout.size), n_agents)
        obs = [sub.integers(0, n_obs, size=size) for _ in range(n_agents)]
        batch = _random_batch(sub, obs, n_agents, n_actions, size)
        tab_error = max(finite_difference_check(tabular, params, batch, agent) for agent in range(n_agents))

        features = int(sub.integers(2, 7))
        mlp = SharedMlpPolicy(n_agents, features, n_actions, hidden_width=int(sub.integers(2, 9)))
        mlp_params = PolicyParams(mlp.layout, sub.uniform(-1.0, 1.0, mlp.layout.size), n_agents)
        feats = [sub.normal(0.0, 1.0, size=(size, features)) for _ in range(n_agents)]
        mlp_batch = _random_batch(sub, feats, n_agents, n_actions, size)
        mlp_error = max(finite_difference_check(mlp, mlp_params, mlp_batch, agent) for agent in range(n_agents))

        report.record(tab_error < GRADCHECK_TABULAR_TOL and mlp_error < GRADCHECK_MLP_TOL,
                      tabular_relative_error=tab_error, mlp_relative_error=mlp_error)
    return report


def forward_gae(deltas: np.ndarray, gamma: float, lam: float, terminals: np.ndarray) -> np.ndarray:
    """Direct truncated sum ``A_t = sum_l (gamma lam)^l delta_{t+l}`` up to the episode end."""
    T = len(deltas)
    advantages = np.zeros(T)
    for t in range(T):
        total, weight = 0.0, 1.0
        for k in range(t, T):
            total += weight * deltas[k]
            if terminals[k]:
                break
            weight *= gamma * lam
        advantages[t] = total
    return advantages


def verify_gae(cases: int, seed: int = 0) -> VerifyReport:
    """The lambda=0 identity, the forward-sum oracle and the return-target identity."""
    report = VerifyReport(suite="gae")
    rng = _stream("gae", seed)
    for case in range(cases):
        sub = rng.spawn(case)
        T = int(sub.integers(1, 65))
        rewards = sub.normal(0.0, 1.0, size=T)
        values = sub.normal(0.0, 1.0, size=T + 1)
        terminals = sub.uniform(size=T) < 0.1
        terminals[-1] = bool(sub.integers(0, 2))
        gamma = float(sub.uniform(0.0, 1.0))
        lam = float(sub.uniform(0.0, 1.0))

        deltas = td_errors(rewards, values, terminals, gamma)
        lambda_zero = float(np.max(np.abs(gae(deltas, gamma, 0.0, terminals) - deltas)))
        advantages = gae(deltas, gamma, lam, terminals)
        forward = float(np.max(np.abs(advantages - forward_gae(deltas, gamma, lam, terminals))))
        targets = float(np.max(np.abs(return_targets(advantages, values[:-1]) - (advantages + values[:-1]))))
        report.record(lambda_zero == 0.0 and forward <= GAE_SUM_TOL and targets == 0.0,
                      lambda_zero_residual=lambda_zero, forward_sum_residual=forward,
                      return_target_residual=targets)
    return report


def verify_margin(cases: int, seed: int = 0) -> VerifyReport:
    config = RunConfig(env=ENV_TEAM_QUADRATIC, seed=seed, env_params=EnvParams(n_agents=TEAM_QUADRATIC_AGENTS))
    return quadratic_margin_check(config, points=cases)


def critic_check_config(seed: int = 0) -> RunConfig:
    """Climb game of three rounds, plain large-step critic updates, no value clipping."""
    return RunConfig(
        env=ENV_MATRIX_CLIMB,
        seed=seed,
        env_params=EnvParams(episode_length=3, n_agents=2),
        gamma=0.99,
        gae_lambda=0.95,
        episodes_per_iteration=16,
        ppo_epochs=1,
        minibatches=1,
        critic_learning_rate=0.5,
        critic_clip_epsilon=1e6,
        optimizer=OPTIMIZER_PLAIN,
    )


def critic_convergence_check(config: Optional[RunConfig] = None, cycles: int = DEFAULT_CASES["critic"],
                             burn_in: int = 5, target_logit: float = 30.0) -> VerifyReport:
    """
    Tabular critic under a fixed near-deterministic policy on a matrix game.

    Every cycle collects episodes, recomputes GAE targets under the current
    critic and takes one critic update. The max-norm error against the exact
    linear-solve values must be non-increasing after ``burn_in`` cycles and
    end below 1e-3.
    """
    config = config or critic_check_config()
    env = make_env(config)
    if not isinstance(env, MatrixGameEnv):
        raise ValueError("critic convergence check needs a matrix game")
    spec = env.spec
    policy = TabularSoftmaxPolicy(spec.n_agents, spec.n_observations, spec.n_actions)
    blocks = {name: np.zeros(policy.layout.shape(name)) for name in policy.layout.names}
    for agent, action in enumerate(env.optimal_joint_action):
        blocks[f"head{agent}/logits"][:, action] = target_logit
    params = PolicyParams.from_blocks(policy.layout, blocks, spec.n_agents)

    critic = TabularCritic(spec.n_states)
    phi = critic.init_params()
    exact = exact_state_values(env, policy, params, config.gamma)
    root = RngStream(config.seed, (STREAM_VERIFY, _SUITE_STREAMS["critic"]))

    errors = []
    for cycle in range(cycles):
        batch = collect_rollouts(policy, params, critic, phi, config, root, cycle)
        phi, _ = ppo_critic_update(critic, phi, batch, config)
        errors.append(float(np.max(np.abs(phi - exact))))

    report = VerifyReport(suite="critic")
    tail = errors[burn_in:]
    increases = [later - earlier for earlier, later in zip(tail, tail[1:])]
    worst_increase = max([0.0] + increases)
    final = errors[-1] if errors else float(np.max(np.abs(phi - exact)))
    report.record(worst_increase <= CRITIC_MONOTONE_SLACK and final < CRITIC_ERROR_TOL,
                  final_max_error=final, worst_error_increase=worst_increase)
    report.notes.append(f"error after {len(errors)} cycles: {final:.3e} (start {errors[0] if errors else final:.3e})")
    return report


def verify_critic(cases: int, seed: int = 0) -> VerifyReport:
    return critic_convergence_check(critic_check_config(seed), cycles=cases)


SUITES: Dict[str, Callable[[int, int], VerifyReport]] = {
    "qp": verify_qp,
    "kkt": verify_kkt_suite,
    "gamma_factor": verify_gamma_factor,
    "gradcheck": verify_gradcheck,
    "gae": verify_gae,
    "margin": verify_margin,
    "critic": verify_critic,
}


def run_suite(name: str, cases: Optional[int] = None, seed: int = 0) -> VerifyReport:
    """
    Run one named suite.

    Raises:
        KeyError: unknown suite name
    """
    if name not in SUITES:
        raise KeyError(f"Unknown verification suite: {name}")
    count = DEFAULT_CASES[name] if cases is None else cases
    logger.info(f"Running suite {name} ({count} cases, seed {seed})")
    report = SUITES[name](count, seed)
    log_suite_result(name, report.passed, f"{report.cases_passed}/{report.cases_run} cases")
    return report


def run_all(cases: Optional[int] = None, seed: int = 0) -> List[VerifyReport]:
    return [run_suite(name, cases, seed) for name in VERIFY_SUITES]
