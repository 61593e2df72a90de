"""Counting functions, empirical distributions and conditional types.

Counting is done in exact integer arithmetic; division happens once, when
the final matrix is assembled.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Alphabet, Pmf, pair_pack


@dataclass(frozen=True)
class ConditionalType:
    """Empirical conditional PMF of an output sequence given an input one.

    ``matrix[i, j]`` is the fraction of positions with output ``i+1`` among
    those with input ``j+1``.  Columns whose input symbol never occurs carry
    the identity column and are flagged ``defined == False``; an unobserved
    input carries no evidence either way, so norm computations treat such
    columns as zero deviation from the identity.
    """

    matrix: np.ndarray
    defined: np.ndarray

    def deviation_from_identity(self) -> float:
        """Frobenius norm of (matrix - I) restricted to defined columns."""
        d = self.matrix - np.eye(self.matrix.shape[0], self.matrix.shape[1])
        return float(np.linalg.norm(d[:, self.defined]))


def count(symbol: int, seq) -> int:
    """Number of occurrences of ``symbol`` in ``seq``."""
    return int(np.count_nonzero(np.asarray(seq) == symbol))


def empirical_pmf(seq, alphabet: Alphabet) -> Pmf:
    """Per-symbol occurrence fractions of ``seq`` over ``alphabet``."""
    s = np.asarray(seq, dtype=np.int64)
    if s.size == 0:
        raise ValueError("empty sequence")
    if not alphabet.contains(s):
        raise ValueError("sequence entries fall outside the alphabet")
    counts = np.bincount(s - 1, minlength=alphabet.size)
    return Pmf(counts / s.size)


def _counts(outputs: np.ndarray, inputs: np.ndarray, rows: int, cols: int) -> np.ndarray:
    joint = np.zeros((rows, cols), dtype=np.int64)
    np.add.at(joint, (outputs - 1, inputs - 1), 1)
    return joint


def conditional_type(
    outputs, inputs, out_alphabet: Alphabet, in_alphabet: Alphabet
) -> ConditionalType:
    """Empirical distribution of outputs at each input symbol."""
    o = np.asarray(outputs, dtype=np.int64)
    u = np.asarray(inputs, dtype=np.int64)
    if o.size != u.size:
        raise ValueError("output and input sequences must have the same length")
    if o.size == 0:
        raise ValueError("empty sequence")
    if not out_alphabet.contains(o) or not in_alphabet.contains(u):
        raise ValueError("sequence entries fall outside their alphabets")
    joint = _counts(o, u, out_alphabet.size, in_alphabet.size)
    col = joint.sum(axis=0)
    defined = col > 0
    matrix = np.eye(out_alphabet.size, in_alphabet.size)
    matrix[:, defined] = joint[:, defined] / col[defined]
    return ConditionalType(matrix=matrix, defined=defined)


def joint_conditional_type(
    v1, v2, u1, u2, u1_size: int, u2_size: int
) -> ConditionalType:
    """Conditional type of the pair-packed outputs given the pair-packed
    inputs; identical to conditional_type after pair-packing."""
    n = len(np.asarray(v1))
    for s in (v2, u1, u2):
        if len(np.asarray(s)) != n:
            raise ValueError("all four sequences must have the same length")
    m = u1_size * u2_size
    packed_out = pair_pack(v1, v2, u2_size)
    packed_in = pair_pack(u1, u2, u2_size)
    return conditional_type(packed_out, packed_in, Alphabet(m), Alphabet(m))


def factorization_gap(v1, v2, u1, u2, u1_size: int, u2_size: int) -> float:
    """L1 distance between the joint conditional type and the Kronecker
    product of the per-relay conditional types.

    Only columns defined in the joint type AND in both factors enter the
    sum.  Converges to 0 for non-colluding attacks; stays bounded away
    from 0 for colluding strategies on correlated inputs.
    """
    joint = joint_conditional_type(v1, v2, u1, u2, u1_size, u2_size)
    t1 = conditional_type(v1, u1, Alphabet(u1_size), Alphabet(u1_size))
    t2 = conditional_type(v2, u2, Alphabet(u2_size), Alphabet(u2_size))
    product = np.kron(t1.matrix, t2.matrix)
    both = np.kron(t1.defined, t2.defined).astype(bool) & joint.defined
    return float(np.abs(joint.matrix[:, both] - product[:, both]).sum())
