# ############################################################################### #
# Reachability Goals : unsupervised goal-conditioned agent
#
# SPDX - License - Identifier: GPL-3.0-or-later
# ############################################################################### #
"""
Run configuration: every knob of a training run as a flat dataclass of scalars
"""
from dataclasses import dataclass, fields

from reachgoal.envs import ENVIRONMENTS
from reachgoal.memory.goal_memory import DEFAULT_K_MAX, DEFAULT_ORACLE_THRESHOLD, DEFAULT_TAU_MEMORY, MEMORY_MODES
from reachgoal.memory.graph import DEFAULT_TAU_GRAPH
from reachgoal.policy.replay import DEFAULT_REPLAY_CAPACITY
from reachgoal.policy.sac import SACConfig
from reachgoal.rnet.buffer import DEFAULT_BUFFER_CAPACITY
from reachgoal.rnet.model import DEFAULT_TAU_REACH

REWARD_MODES = ("rnet", "graph", "oracle")
GOAL_SOURCES = ("memory", "eval")
DEFAULT_REWARD_CLIP = 10.0
SUCCESS_DISTANCE = 0.1

# ablation variant -> (reward_mode, memory_mode)
ABLATIONS = {
    "oracle-reward": ("oracle", "filtered"),
    "oracle-memory": ("rnet", "oracle"),
    "oracle": ("oracle", "oracle"),
}


@dataclass(frozen=True)
class RunConfig:  # pylint:disable=too-many-instance-attributes
    """
    A training run. policy_phase_len = 0 selects the environment horizon.
    """
    env: str = "maze"
    reward_mode: str = "rnet"
    memory_mode: str = "filtered"
    goal_source: str = "memory"
    seed: int = 0

    total_policy_steps: int = 200_000
    policy_phase_len: int = 0
    random_phase_len: int = 50
    eval_every: int = 10_000
    eval_goal_count: int = 500
    eval_goal_seed: int = 12345

    rnet_retrain_every: int = 10
    rnet_steps_per_retrain: int = 500
    rnet_batch_size: int = 128
    rnet_lr: float = 1e-3
    buffer_capacity: int = DEFAULT_BUFFER_CAPACITY
    rnet_reward_clip: float = DEFAULT_REWARD_CLIP

    tau_reach: int = DEFAULT_TAU_REACH
    tau_memory: float = DEFAULT_TAU_MEMORY
    tau_graph: float = DEFAULT_TAU_GRAPH
    k_max: int = DEFAULT_K_MAX
    oracle_memory_threshold: float = DEFAULT_ORACLE_THRESHOLD

    sac_gamma: float = 0.99
    sac_polyak: float = 0.995
    sac_lr: float = 3e-4
    sac_batch_size: int = 256
    sac_hidden_size: int = 64
    replay_capacity: int = DEFAULT_REPLAY_CAPACITY
    initial_temperature: float = 0.1
    learn_temperature: bool = True

    def validate(self) -> "RunConfig":
        """
        Check value ranges and combinations.

        Returns:
            The config itself, so calls can be chained

        Raises:
            ValueError: naming the first offending field
        """
        if self.env not in ENVIRONMENTS:
            raise ValueError(f"env must be one of {sorted(ENVIRONMENTS)}, got '{self.env}'")
        choices = {"reward_mode": REWARD_MODES, "memory_mode": MEMORY_MODES, "goal_source": GOAL_SOURCES}
        for name, allowed in choices.items():
            if getattr(self, name) not in allowed:
                raise ValueError(f"{name} must be one of {allowed}, got '{getattr(self, name)}'")
        for name in ("total_policy_steps", "random_phase_len", "eval_every", "eval_goal_count", "rnet_retrain_every",
                     "rnet_batch_size", "buffer_capacity", "tau_reach", "k_max", "sac_batch_size", "sac_hidden_size",
                     "replay_capacity"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        for name in ("policy_phase_len", "rnet_steps_per_retrain"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must not be negative, got {getattr(self, name)}")
        for name in ("tau_memory", "tau_graph"):
            if not 0.0 < getattr(self, name) < 1.0:
                raise ValueError(f"{name} must lie in (0, 1), got {getattr(self, name)}")
        for name in ("sac_gamma", "sac_polyak"):
            if not 0.0 <= getattr(self, name) < 1.0:
                raise ValueError(f"{name} must lie in [0, 1), got {getattr(self, name)}")
        for name in ("rnet_lr", "sac_lr", "initial_temperature", "rnet_reward_clip", "oracle_memory_threshold"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if self.random_phase_len <= 2 * self.tau_reach + 1:
            raise ValueError(f"random_phase_len must exceed 2 * tau_reach + 1 = {2 * self.tau_reach + 1}, "
                             f"got {self.random_phase_len}")
        if self.rnet_batch_size < 2:
            raise ValueError(f"rnet_batch_size must be at least 2, got {self.rnet_batch_size}")
        if self.sac_batch_size < 2:
            raise ValueError(f"sac_batch_size must be at least 2, got {self.sac_batch_size}")
        return self

    @property
    def horizon(self) -> int:
        """Length of the policy phase and of evaluation rollouts"""
        return self.policy_phase_len or ENVIRONMENTS[self.env].horizon

    @property
    def needs_rnet(self) -> bool:
        """Whether the reward or the memory filter queries the reachability network"""
        return self.reward_mode in ("rnet", "graph") or self.memory_mode in ("filtered", "weighted")

    def sac_config(self) -> SACConfig:
        return SACConfig(gamma=self.sac_gamma,
                         polyak=self.sac_polyak,
                         lr=self.sac_lr,
                         batch_size=self.sac_batch_size,
                         hidden_size=self.sac_hidden_size,
                         replay_capacity=self.replay_capacity,
                         initial_temperature=self.initial_temperature,
                         learn_temperature=self.learn_temperature)


def field_names():
    """RunConfig field names in declaration order"""
    return [item.name for item in fields(RunConfig)]


def run_tag(config: RunConfig) -> str:
    """
    Variant name of a run, as used for run directories and curve aggregation.

    The three aggregated variants are topline (eval goals with oracle reward), unsup
    (learned reward) and graph (graph reward). Oracle ablations and memory variants get
    their own names.
    """
    if config.goal_source == "eval":
        tag = "topline"
    elif config.reward_mode == "oracle":
        tag = "oracle" if config.memory_mode == "oracle" else "oracle-reward"
    elif config.memory_mode == "oracle":
        tag = "oracle-memory"
    elif config.reward_mode == "graph":
        tag = "graph"
    else:
        tag = "unsup"
    if config.memory_mode in ("weighted", "unfiltered"):
        tag = f"{tag}-{config.memory_mode}"
    return tag
