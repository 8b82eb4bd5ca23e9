"""Per-round and per-task wireless/compute latency model.

A client's round time is local computation (E passes over its data at
kappa cycles per bit) plus uplink transmission of the model update at
the Shannon rate of its channel. A task's time over a cluster is the
sum across rounds of the slowest member's round time, since aggregation
waits for the straggler each round.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .errors import EmptyCluster


def dbm_to_watts(dbm: float) -> float:
    """Convert a dBm power level to watts: 10^(dBm/10) / 1000."""
    return 10.0 ** (dbm / 10.0) / 1000.0


@dataclass(frozen=True)
class DeviceSpec:
    """Static per-client hardware and data parameters."""

    cpu_freq: float  # Hz
    transmit_power: float  # watts
    channel_gain: float  # dimensionless
    dataset_bits: float  # bits of local training data

    def __post_init__(self) -> None:
        for name in ("cpu_freq", "transmit_power", "channel_gain", "dataset_bits"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be strictly positive")


@dataclass(frozen=True)
class ChannelModel:
    """Shared uplink channel parameters."""

    bandwidth: float  # Hz
    noise_power: float  # watts

    def __post_init__(self) -> None:
        if self.bandwidth <= 0 or self.noise_power <= 0:
            raise ValueError("bandwidth and noise_power must be strictly positive")


@dataclass(frozen=True)
class WorkloadSpec:
    """Per-round training workload."""

    model_size_bits: float
    cycles_per_bit: float
    local_steps: int

    def __post_init__(self) -> None:
        if self.model_size_bits <= 0 or self.cycles_per_bit <= 0:
            raise ValueError("model size and cycles/bit must be strictly positive")
        if self.local_steps < 1:
            raise ValueError("local_steps must be a positive integer")


def transmission_rate(dev: DeviceSpec, ch: ChannelModel) -> float:
    """Achievable uplink rate B * log2(1 + p*h / sigma^2) in bits/second."""
    snr = dev.transmit_power * dev.channel_gain / ch.noise_power
    return ch.bandwidth * float(np.log2(1.0 + snr))


def client_round_time(dev: DeviceSpec, ch: ChannelModel, wl: WorkloadSpec) -> float:
    """One round's wall time for one client: compute plus uplink.

    compute = E * |D_u| * kappa / f_u, uplink = S / rate.
    """
    compute = wl.local_steps * dev.dataset_bits * wl.cycles_per_bit / dev.cpu_freq
    uplink = wl.model_size_bits / transmission_rate(dev, ch)
    return compute + uplink


def task_time(
    cluster_members: list[DeviceSpec],
    ch: ChannelModel,
    wl: WorkloadSpec,
    rounds: int,
    resample: Callable[[int], np.ndarray] | None = None,
) -> float:
    """Total task time over a cluster: per-round straggler times summed.

    Args:
        cluster_members: devices participating every round.
        ch: shared channel.
        wl: per-round workload.
        rounds: number of aggregation rounds, >= 1.
        resample: optional seeded sampler; called once per round with
            the member count and must return that many fresh channel
            gains. Gains stay static across rounds when omitted.

    Returns:
        Sum over rounds of the maximum member round time.
    """
    if not cluster_members:
        raise EmptyCluster("task_time over an empty cluster")
    if rounds < 1:
        raise ValueError("rounds must be >= 1")
    if resample is None:
        per_round = max(client_round_time(dev, ch, wl) for dev in cluster_members)
        return rounds * per_round
    total = 0.0
    for _ in range(rounds):
        gains = np.asarray(resample(len(cluster_members)), dtype=np.float64)
        if gains.shape != (len(cluster_members),):
            raise ValueError("resampler must return one gain per member")
        total += max(
            client_round_time(replace(dev, channel_gain=float(g)), ch, wl)
            for dev, g in zip(cluster_members, gains)
        )
    return total
