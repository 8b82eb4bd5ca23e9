"""Dependency-aware scheduling of learning tasks onto client clusters."""
from .env import (
    Action,
    ScheduleState,
    TaskStatus,
    encode_state,
    env_reset,
    env_step,
    state_to_schedule,
    valid_actions,
)
from .matrix import ProcTimeMatrix, build_proc_time_matrix
from .policies import exhaustive_schedule, greedy_schedule
from .ppo import PolicyParams, PPOHyperparams, ppo_train
from .schedule import Schedule, evaluate_schedule, schedule_to_json, validate_schedule

__all__ = [
    "Action",
    "PolicyParams",
    "PPOHyperparams",
    "ProcTimeMatrix",
    "Schedule",
    "ScheduleState",
    "TaskStatus",
    "build_proc_time_matrix",
    "encode_state",
    "env_reset",
    "env_step",
    "evaluate_schedule",
    "exhaustive_schedule",
    "greedy_schedule",
    "ppo_train",
    "schedule_to_json",
    "state_to_schedule",
    "valid_actions",
    "validate_schedule",
]
