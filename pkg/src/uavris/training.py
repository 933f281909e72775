"""Training drivers: the DDPG loop over the downlink environment for the
IC / ORESOU / joint variants, and the random-search baseline, both
producing the same per-step trace format.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .agent import DdpgAgent, DdpgHyperparams
from .channel import PhaseConfig
from .env import DownlinkEnv, Objective, Variant
from .scene import SystemConfig, build_geometry
from .channel import assemble_channels
from .solvers import BeamformingMatrix, random_search_step

__all__ = [
    "TrainingTrace",
    "default_hyperparams",
    "run_training",
    "run_random_search",
    "RANDOM_SEARCH",
]

RANDOM_SEARCH = "RANDOM"


def default_hyperparams(variant: Variant | str) -> DdpgHyperparams:
    """Per-variant tuned hyperparameters.

    IC and ORESOU work well with the textbook settings.  The joint
    variant needs the bandit-style ones: channels are redrawn each
    episode and an action does not alter the future channel state, so
    the return is effectively single-step (discount 0), and a small
    recency-biased replay buffer keeps the critic adapted to the
    current channel realization instead of an average over stale ones.
    """
    if Variant(variant) is Variant.JOINT:
        return DdpgHyperparams(
            actor_lr=3e-4, discount=0.0, buffer_capacity=2000, noise_decay=0.9999
        )
    return DdpgHyperparams()


@dataclass
class TrainingTrace:
    """Per-step record of one optimization run.

    Infeasible steps carry nan SINRs; best_* fields track the running
    best over feasible steps only.
    """

    algorithm: str
    seed: int
    objective: str
    one_bit: bool
    p_max: float
    min_sinr_db: np.ndarray  # (steps,)
    per_uav_sinr_db: np.ndarray  # (steps, N_U)
    sum_rate: np.ndarray  # (steps,)
    reward: np.ndarray  # (steps,)
    feasible: np.ndarray  # (steps,) bool
    best_min_sinr_db: np.ndarray = field(init=False)  # running max
    best_step: int = -1
    best_phases: PhaseConfig | None = None
    best_f_hat: BeamformingMatrix | None = None

    def __post_init__(self):
        filled = np.where(self.feasible, self.min_sinr_db, -np.inf)
        self.best_min_sinr_db = np.maximum.accumulate(filled)

    @property
    def n_steps(self) -> int:
        return self.min_sinr_db.shape[0]

    @property
    def final_best_min_sinr_db(self) -> float:
        return float(self.best_min_sinr_db[-1])

    def rolling_mean_sinr_db(self, window: int) -> np.ndarray:
        """Rolling average of per-UAV SINRs: at step t the mean of the
        last min(t+1, window) instants.  Infeasible steps enter as nan
        and are skipped."""
        out = np.empty_like(self.per_uav_sinr_db)
        for t in range(self.n_steps):
            lo = max(0, t + 1 - window)
            chunk = self.per_uav_sinr_db[lo : t + 1]
            with np.errstate(invalid="ignore"):
                out[t] = np.nanmean(chunk, axis=0)
        return out


def run_training(
    config: SystemConfig,
    variant: Variant | str,
    episodes: int = 50,
    steps_per_episode: int = 200,
    seed: int = 0,
    objective: Objective | str = Objective.MAX_MIN_SINR,
    one_bit: bool = False,
    hyper: DdpgHyperparams | None = None,
    total_steps: int | None = None,
) -> TrainingTrace:
    """Run one DDPG training loop and return its trace.

    Each episode draws a fresh channel realization; each step selects an
    action (random during warmup, noisy policy afterwards), decodes and
    evaluates it, stores the transition and performs one critic + actor
    update once the warmup is over.  ``total_steps`` caps the iteration
    count exactly (the last episode may be cut short).  ``hyper=None``
    selects the per-variant defaults from ``default_hyperparams``.
    """
    variant = Variant(variant)
    objective = Objective(objective)
    if hyper is None:
        hyper = default_hyperparams(variant)
    env = DownlinkEnv(config, variant, objective=objective, one_bit=one_bit)
    rng = np.random.default_rng(seed)
    agent = DdpgAgent.create(env.state_dim, env.action_dim, hyper, rng)

    if total_steps is not None:
        episodes = -(-total_steps // steps_per_episode)
        total = total_steps
    else:
        total = episodes * steps_per_episode
    n_uav = config.n_uav
    min_sinr_db = np.full(total, np.nan)
    per_uav = np.full((total, n_uav), np.nan)
    sum_rate = np.zeros(total)
    rewards = np.zeros(total)
    feasible = np.zeros(total, dtype=bool)
    best_val = -np.inf
    best = (None, None, -1)

    noise_std = hyper.noise_std
    t = 0
    for _ in range(episodes):
        if t >= total:
            break
        state = env.reset(rng)
        for _ in range(steps_per_episode):
            if t >= total:
                break
            if t < hyper.warmup_steps:
                action = rng.uniform(-1.0, 1.0, env.action_dim)
            else:
                action = agent.select_action(state, noise_std, rng)
                noise_std *= hyper.noise_decay
            next_state, outcome = env.step(action)
            agent.buffer.push(state, action, outcome.reward, next_state)
            state = next_state

            rewards[t] = outcome.reward
            feasible[t] = outcome.feasible
            if outcome.feasible:
                rep = outcome.report
                min_sinr_db[t] = rep.min_sinr_db
                per_uav[t] = rep.per_uav_sinr_db
                sum_rate[t] = rep.sum_rate
                if rep.min_sinr_db > best_val:
                    best_val = rep.min_sinr_db
                    best = (outcome.phases, outcome.f_hat, t)

            if t >= hyper.warmup_steps and agent.buffer.size >= hyper.batch_size:
                for _ in range(hyper.updates_per_step):
                    agent.train_step(rng)
            t += 1

    trace = TrainingTrace(
        algorithm=variant.value,
        seed=seed,
        objective=objective.value,
        one_bit=one_bit,
        p_max=config.p_max,
        min_sinr_db=min_sinr_db,
        per_uav_sinr_db=per_uav,
        sum_rate=sum_rate,
        reward=rewards,
        feasible=feasible,
    )
    trace.best_phases, trace.best_f_hat, trace.best_step = best
    return trace


def run_random_search(
    config: SystemConfig,
    iterations: int = 10_000,
    seed: int = 0,
    one_bit: bool = False,
    redraw_every: int = 200,
) -> TrainingTrace:
    """Random-search baseline: independent feasible draws of phases and
    precoder, channels redrawn on the same schedule as a training episode."""
    rng = np.random.default_rng(seed)
    geometry = build_geometry(config)
    n_uav = config.n_uav

    min_sinr_db = np.empty(iterations)
    per_uav = np.empty((iterations, n_uav))
    sum_rate = np.empty(iterations)
    best_val = -np.inf
    best = (None, None, -1)
    channels = None
    for t in range(iterations):
        if t % redraw_every == 0:
            channels = assemble_channels(config, geometry, rng)
        phases, f_hat, report = random_search_step(
            rng, channels, config.p_max, config.noise_power, one_bit=one_bit
        )
        min_sinr_db[t] = report.min_sinr_db
        per_uav[t] = report.per_uav_sinr_db
        sum_rate[t] = report.sum_rate
        if report.min_sinr_db > best_val:
            best_val = report.min_sinr_db
            best = (phases, f_hat, t)

    trace = TrainingTrace(
        algorithm=RANDOM_SEARCH,
        seed=seed,
        objective=Objective.MAX_MIN_SINR.value,
        one_bit=one_bit,
        p_max=config.p_max,
        min_sinr_db=min_sinr_db,
        per_uav_sinr_db=per_uav,
        sum_rate=sum_rate,
        reward=min_sinr_db / 10.0,
        feasible=np.ones(iterations, dtype=bool),
    )
    trace.best_phases, trace.best_f_hat, trace.best_step = best
    return trace
