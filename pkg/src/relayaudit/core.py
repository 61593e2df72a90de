"""Probability primitives shared by the whole toolkit.

Conventions, stated once and enforced everywhere:

* Conditional-probability matrices are COLUMN-stochastic: column ``j``
  holds the output distribution given input symbol ``j``.
* Symbols are 1-based indices ``1..size``.
* A PMF over the relay pair ``(u1, u2)`` is flattened to a single vector
  with joint index ``j = (k - 1) * u2_size + t`` for ``u1 = k``, ``u2 = t``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

PMF_ATOL = 1e-12


@dataclass(frozen=True)
class Alphabet:
    """A finite symbol alphabet; symbols are the integers 1..size."""

    size: int

    def __post_init__(self):
        if self.size < 1:
            raise ValueError(f"alphabet size must be >= 1, got {self.size}")

    def contains(self, seq) -> bool:
        seq = np.asarray(seq)
        if seq.size == 0:
            return True
        return bool(seq.min() >= 1 and seq.max() <= self.size)


def _freeze(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class Pmf:
    """A probability vector.

    Construction refuses to renormalize: entries must already sum to 1
    within ``PMF_ATOL``. A silent fix would mask typos in channel files.
    """

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float).reshape(-1)
        if v.size == 0:
            raise ValueError("empty probability vector")
        if np.any(v < 0):
            raise ValueError("negative probability entry")
        s = v.sum()
        if abs(s - 1.0) > PMF_ATOL:
            raise ValueError(f"probabilities sum to {s!r}, not 1 (refusing to renormalize)")
        object.__setattr__(self, "values", _freeze(v))

    def __len__(self) -> int:
        return self.values.size


@dataclass(frozen=True)
class StochasticMatrix:
    """Column-stochastic matrix: entry (i, j) = P(output i | input j)."""

    entries: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=float)
        if m.ndim != 2 or m.size == 0:
            raise ValueError("stochastic matrix must be a non-empty 2-D array")
        if np.any(m < 0) or np.any(m > 1):
            raise ValueError("stochastic matrix entries must lie in [0, 1]")
        colsums = m.sum(axis=0)
        if np.any(np.abs(colsums - 1.0) > PMF_ATOL):
            raise ValueError(
                f"columns must sum to 1 within {PMF_ATOL} "
                f"(column sums {colsums!r}); matrices are column-stochastic"
            )
        object.__setattr__(self, "entries", _freeze(m))

    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]

    @classmethod
    def identity(cls, n: int) -> "StochasticMatrix":
        return cls(np.eye(n))

    @classmethod
    def permutation(cls, order) -> "StochasticMatrix":
        """Permutation matrix sending input j to output order[j-1] (1-based)."""
        order = np.asarray(order, dtype=int)
        n = order.size
        m = np.zeros((n, n))
        m[order - 1, np.arange(n)] = 1.0
        return cls(m)


@dataclass(frozen=True)
class ObservationChannel:
    """What the destination knows: relay-input statistics plus the
    relays-to-destination channel."""

    u1_size: int
    u2_size: int
    y_size: int
    joint_input: Pmf
    forward: StochasticMatrix

    def __post_init__(self):
        m = self.u1_size * self.u2_size
        if len(self.joint_input) != m:
            raise ValueError(
                f"joint input pmf has length {len(self.joint_input)}, expected "
                f"u1_size*u2_size = {m}"
            )
        if self.forward.cols != m:
            raise ValueError(f"forward matrix has {self.forward.cols} columns, expected {m}")
        if self.forward.rows != self.y_size:
            raise ValueError(f"forward matrix has {self.forward.rows} rows, expected {self.y_size}")


def pair_index(k: int, t: int, u2_size: int) -> int:
    """Joint 1-based index of the symbol pair (k, t): (k-1)*u2_size + t."""
    if t < 1 or t > u2_size:
        raise ValueError(f"second index {t} out of range 1..{u2_size}")
    if k < 1:
        raise ValueError(f"first index {k} out of range")
    return (k - 1) * u2_size + t


def unpair_index(j: int, u2_size: int) -> tuple[int, int]:
    """Inverse of pair_index."""
    if j < 1:
        raise ValueError(f"joint index {j} out of range")
    return (j - 1) // u2_size + 1, (j - 1) % u2_size + 1


def pair_pack(seq1, seq2, u2_size: int) -> np.ndarray:
    """Elementwise pair_index over two equal-length symbol sequences."""
    s1 = np.asarray(seq1, dtype=np.int64)
    s2 = np.asarray(seq2, dtype=np.int64)
    if s1.shape != s2.shape:
        raise ValueError("sequences must have the same length")
    return (s1 - 1) * u2_size + s2


def pair_unpack(joint, u2_size: int) -> tuple[np.ndarray, np.ndarray]:
    """Elementwise unpair_index over a joint-symbol sequence."""
    j = np.asarray(joint, dtype=np.int64) - 1
    return (j // u2_size + 1), (j % u2_size + 1)


def kron(a: StochasticMatrix, b: StochasticMatrix) -> StochasticMatrix:
    """Kronecker product; block ordering matches pair_index."""
    return StochasticMatrix(np.kron(a.entries, b.entries))


def joint_pmf_from_product(
    p_x: Pmf,
    p_u1_given_x: StochasticMatrix,
    p_u2_given_x: StochasticMatrix,
) -> Pmf:
    """Joint relay-input PMF when the two source-to-relay channels act
    independently on the same source symbol, flattened by pair_index."""
    nx = len(p_x)
    if p_u1_given_x.cols != nx or p_u2_given_x.cols != nx:
        raise ValueError("source-to-relay matrices must have one column per source symbol")
    joint = np.einsum(
        "x,ax,bx->ab", p_x.values, p_u1_given_x.entries, p_u2_given_x.entries
    )
    return Pmf(joint.ravel())


def expected_output_pmf(
    ch: ObservationChannel, y1: StochasticMatrix, y2: StochasticMatrix
) -> Pmf:
    """Destination distribution predicted when the relays apply the
    per-relay conditional maps (y1, y2) to their inputs.

    Computes  P_joint (y1^T (x) y2^T) F^T  as a row vector over the
    destination alphabet; with (I, I) this is the no-attack prediction.
    """
    if (y1.rows, y1.cols) != (ch.u1_size, ch.u1_size):
        raise ValueError(f"first map must be {ch.u1_size}x{ch.u1_size}")
    if (y2.rows, y2.cols) != (ch.u2_size, ch.u2_size):
        raise ValueError(f"second map must be {ch.u2_size}x{ch.u2_size}")
    mapped = np.kron(y1.entries, y2.entries) @ ch.joint_input.values
    return Pmf(ch.forward.entries @ mapped)
