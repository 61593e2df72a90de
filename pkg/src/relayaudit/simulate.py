"""Seedable sampling of source sequences and channel transitions.

Randomness is derived from counter-based Philox streams keyed by
``(master_seed, trial_index, role)``.  Streams for different roles or
trials never overlap, so trials can run in any order (or in parallel)
with bit-identical results.

Sampling uses inverse-CDF lookup over cumulative column sums; a uniform
draw ``u`` selects the first interval ``[c_{j-1}, c_j)`` containing it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Union

import numpy as np

from .core import Pmf, StochasticMatrix, pair_pack, pair_unpack

ROLES = (
    "source",
    "relay-channel",
    "attack-1",
    "attack-2",
    "forward-channel",
    "jammer",
)


@dataclass(frozen=True)
class RngStream:
    master_seed: int
    trial_index: int
    role: str

    def __post_init__(self):
        if self.role not in ROLES:
            raise ValueError(f"unknown role {self.role!r}; expected one of {ROLES}")

    def generator(self) -> np.random.Generator:
        seq = np.random.SeedSequence(
            entropy=self.master_seed,
            spawn_key=(self.trial_index, ROLES.index(self.role)),
        )
        return np.random.Generator(np.random.Philox(seq))


def _inverse_cdf(cum: np.ndarray, draws: np.ndarray) -> np.ndarray:
    # count of cumulative sums <= u gives the 0-based symbol index
    idx = np.searchsorted(cum, draws, side="right")
    return np.minimum(idx, cum.size - 1)


def sample_iid(p: Pmf, n: int, rng: RngStream) -> np.ndarray:
    """n independent draws from p, as 1-based uint8 symbols."""
    if n < 1:
        raise ValueError("n must be >= 1")
    cum = np.cumsum(p.values)
    draws = rng.generator().random(n)
    return (_inverse_cdf(cum, draws) + 1).astype(np.uint8)


def sample_through(cond: StochasticMatrix, inputs, rng: RngStream) -> np.ndarray:
    """Pass a symbol sequence through a memoryless channel.

    Output i is drawn from column inputs[i] of ``cond``, independently
    across positions.
    """
    u = np.asarray(inputs, dtype=np.int64)
    if u.size == 0:
        raise ValueError("empty input sequence")
    if u.min() < 1 or u.max() > cond.cols:
        raise ValueError(f"input symbols must lie in 1..{cond.cols}")
    cum = np.cumsum(cond.entries, axis=0)
    draws = rng.generator().random(u.size)
    idx = (cum[:, u - 1] <= draws).sum(axis=0)
    np.minimum(idx, cond.rows - 1, out=idx)
    return (idx + 1).astype(np.uint8)


@dataclass(frozen=True)
class NetworkSpec:
    """Source distribution, source-to-relays channel (joint form) and
    relays-to-destination channel."""

    p_x: Pmf
    relay_channel: StochasticMatrix  # rows = u1_size * u2_size, cols = |X|
    forward: StochasticMatrix  # rows = y_size, cols = u1_size * u2_size
    u1_size: int
    u2_size: int

    def __post_init__(self):
        m = self.u1_size * self.u2_size
        if self.relay_channel.rows != m:
            raise ValueError(
                f"relay channel has {self.relay_channel.rows} rows, expected {m}"
            )
        if self.relay_channel.cols != len(self.p_x):
            raise ValueError("relay channel needs one column per source symbol")
        if self.forward.cols != m:
            raise ValueError(f"forward matrix has {self.forward.cols} columns, expected {m}")

    @classmethod
    def from_product(
        cls,
        p_x: Pmf,
        p_u1_given_x: StochasticMatrix,
        p_u2_given_x: StochasticMatrix,
        forward: StochasticMatrix,
    ) -> "NetworkSpec":
        """Expand per-relay channels into the joint form, column by column."""
        joint = np.einsum("ax,bx->abx", p_u1_given_x.entries, p_u2_given_x.entries)
        a, b, nx = joint.shape
        return cls(
            p_x=p_x,
            relay_channel=StochasticMatrix(joint.reshape(a * b, nx)),
            forward=forward,
            u1_size=a,
            u2_size=b,
        )

    @property
    def y_size(self) -> int:
        return self.forward.rows

    def observation_channel(self):
        from .core import ObservationChannel

        joint_input = Pmf(self.relay_channel.entries @ self.p_x.values)
        return ObservationChannel(
            u1_size=self.u1_size,
            u2_size=self.u2_size,
            y_size=self.y_size,
            joint_input=joint_input,
            forward=self.forward,
        )


class NetworkTrace(NamedTuple):
    u1: np.ndarray
    u2: np.ndarray
    v1: np.ndarray
    v2: np.ndarray
    y: np.ndarray


def run_network(
    spec: NetworkSpec,
    attack1,
    attack2,
    n: int,
    master_seed: int,
    trial_index: int = 0,
) -> NetworkTrace:
    """One end-to-end pass: source -> relays -> attacks -> destination.

    Each attack sees only its own relay's received sequence and its own
    stream, so neither can react to the other path.
    """
    from .attacks import apply_attack

    if n < 1:
        raise ValueError("n must be >= 1")

    def stream(role: str) -> RngStream:
        return RngStream(master_seed, trial_index, role)

    x = sample_iid(spec.p_x, n, stream("source"))
    joint = sample_through(spec.relay_channel, x, stream("relay-channel"))
    u1, u2 = pair_unpack(joint, spec.u2_size)
    u1 = u1.astype(np.uint8)
    u2 = u2.astype(np.uint8)
    v1 = apply_attack(attack1, u1, stream("attack-1"))
    v2 = apply_attack(attack2, u2, stream("attack-2"))
    packed = pair_pack(v1, v2, spec.u2_size)
    y = sample_through(spec.forward, packed, stream("forward-channel"))
    return NetworkTrace(u1=u1, u2=u2, v1=v1, v2=v2, y=y)
