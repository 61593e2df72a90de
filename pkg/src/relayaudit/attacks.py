"""Relay attack strategies and stationarity diagnostics."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .core import Pmf, StochasticMatrix
from .simulate import RngStream, sample_through


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % d for d in range(2, int(n**0.5) + 1))


@dataclass(frozen=True)
class Identity:
    """Faithful relay: forward the received sequence unchanged."""


@dataclass(frozen=True)
class IidAttack:
    """Each symbol independently remapped through a fixed conditional PMF."""

    matrix: StochasticMatrix

    def __post_init__(self):
        if self.matrix.rows != self.matrix.cols:
            raise ValueError("attack matrix must be square over the relay alphabet")


@dataclass(frozen=True)
class AlternatingAttack:
    """Remap through p_odd at odd 1-based positions, p_even at even ones."""

    p_odd: StochasticMatrix
    p_even: StochasticMatrix

    def __post_init__(self):
        shapes = {(m.rows, m.cols) for m in (self.p_odd, self.p_even)}
        if len(shapes) != 1 or self.p_odd.rows != self.p_odd.cols:
            raise ValueError("alternating matrices must be square and equal-sized")


@dataclass(frozen=True)
class MarkovJammer:
    """Additive jamming over F_q: v_i = u_i + J_i, with J a stationary
    Markov sequence started from p_j1.

    Field elements 0..q-1 are identified with symbols 1..q; the sum is
    taken in 0-based arithmetic.
    """

    p_j1: Pmf
    transition: np.ndarray = field(repr=False)  # row r = P(J_{i+1} | J_i = r)
    q: int = 0

    def __post_init__(self):
        t = np.asarray(self.transition, dtype=float)
        q = self.q or len(self.p_j1)
        object.__setattr__(self, "q", q)
        if t.shape != (q, q):
            raise ValueError(f"transition must be {q}x{q}")
        if np.any(t < 0) or np.any(np.abs(t.sum(axis=1) - 1.0) > 1e-12):
            raise ValueError("transition rows must be distributions (row-stochastic)")
        if len(self.p_j1) != q:
            raise ValueError("initial jammer distribution must have length q")
        if not _is_prime(q):
            raise ValueError(f"field size q={q} must be prime")
        object.__setattr__(self, "transition", t)


@dataclass(frozen=True)
class PermutationShift:
    """Both-relays half-rotation: v_i = u_{((i-1+n/2) mod n)+1}; needs even n."""


@dataclass(frozen=True)
class FixedPermutation:
    """Explicit same-order permutation: v_i = u_{order[i-1]} (1-based)."""

    order: np.ndarray

    def __post_init__(self):
        o = np.asarray(self.order, dtype=np.int64)
        if sorted(o.tolist()) != list(range(1, o.size + 1)):
            raise ValueError("order must be a permutation of 1..n")
        object.__setattr__(self, "order", o)


AttackSpec = Union[
    Identity, IidAttack, AlternatingAttack, MarkovJammer, PermutationShift, FixedPermutation
]


def _sample_markov_chain(jam: MarkovJammer, n: int, gen: np.random.Generator) -> np.ndarray:
    draws = gen.random(n)
    cum0 = tuple(np.cumsum(jam.p_j1.values))
    cumrows = [tuple(np.cumsum(row)) for row in jam.transition]
    out = np.empty(n, dtype=np.int64)
    state = 0
    row = cum0
    for i, r in enumerate(draws.tolist()):
        state = 0
        while row[state] <= r and state < len(row) - 1:
            state += 1
        out[i] = state
        row = cumrows[state]
    return out  # 0-based field elements


def apply_attack(spec: AttackSpec, u, rng: RngStream) -> np.ndarray:
    """Produce the forwarded sequence; reads only this relay's input."""
    u = np.asarray(u)
    n = u.size
    if n < 1:
        raise ValueError("empty input sequence")

    if isinstance(spec, Identity):
        return u.astype(np.uint8).copy()

    if isinstance(spec, IidAttack):
        return sample_through(spec.matrix, u, rng)

    if isinstance(spec, AlternatingAttack):
        gen = rng.generator()
        draws = gen.random(n)
        ui = u.astype(np.int64) - 1
        cum_odd = np.cumsum(spec.p_odd.entries, axis=0)[:, ui]
        cum_even = np.cumsum(spec.p_even.entries, axis=0)[:, ui]
        cum = cum_odd
        cum[:, 1::2] = cum_even[:, 1::2]  # positions i=2,4,... are even
        idx = (cum <= draws).sum(axis=0)
        np.minimum(idx, spec.p_odd.rows - 1, out=idx)
        return (idx + 1).astype(np.uint8)

    if isinstance(spec, MarkovJammer):
        if int(u.max()) > spec.q:
            raise ValueError(f"input symbols exceed field size q={spec.q}")
        jam = _sample_markov_chain(spec, n, rng.generator())
        v = (jam + u.astype(np.int64) - 1) % spec.q
        return (v + 1).astype(np.uint8)

    if isinstance(spec, PermutationShift):
        if n % 2:
            raise ValueError("the half-shift permutation requires even n")
        return np.concatenate([u[n // 2 :], u[: n // 2]]).astype(np.uint8)

    if isinstance(spec, FixedPermutation):
        if spec.order.size != n:
            raise ValueError("permutation length must match the sequence length")
        return u[spec.order - 1].astype(np.uint8)

    raise TypeError(f"unknown attack spec {spec!r}")


def jammer_stationary_check(p_j1: Pmf, transition) -> float:
    """Entrywise residual of the stationarity equation p = p T."""
    t = np.asarray(transition, dtype=float)
    p = p_j1.values
    if t.shape != (p.size, p.size):
        raise ValueError("dimension mismatch between p_j1 and transition")
    return float(np.abs(p - p @ t).max())


def stationarity_diagnostic(
    spec: AttackSpec,
    u2,
    replications: int,
    master_seed: int,
) -> float:
    """Empirical check of the first-order stationarity condition.

    Re-runs the attack ``replications`` times on the fixed input, estimates
    the per-position output frequencies, and reports the largest deviation
    of any position's estimate from its input-symbol group mean.  Near 0
    (within binomial sampling error) iff the per-position conditional
    output law depends only on the input symbol.

    Sampling one fixed input sequence makes this a necessary-condition
    check only.
    """
    if replications < 100:
        raise ValueError("need at least 100 replications")
    u2 = np.asarray(u2, dtype=np.int64)
    n = u2.size
    qmax = int(u2.max())
    counts = None
    pos = np.arange(n)
    for r in range(replications):
        v = apply_attack(spec, u2, RngStream(master_seed, r, "attack-2"))
        if counts is None:
            counts = np.zeros((n, int(max(qmax, v.max()))), dtype=np.int64)
        np.add.at(counts, (pos, v.astype(np.int64) - 1), 1)
    est = counts / replications
    worst = 0.0
    for sym in np.unique(u2):
        grp = est[u2 == sym, :]
        worst = max(worst, float(np.abs(grp - grp.mean(axis=0)).max()))
    return worst
