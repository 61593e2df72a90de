"""Destination-side decision statistics and attack-type estimation."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .core import Alphabet, ObservationChannel, Pmf, StochasticMatrix, expected_output_pmf
from .empirics import empirical_pmf


class Decision(Enum):
    SAFE = "safe"
    ATTACK_DETECTED = "attack-detected"


@dataclass(frozen=True)
class DetectionVerdict:
    statistic: float
    threshold: float
    decision: Decision


def decision_statistic(y, ch: ObservationChannel) -> float:
    """Euclidean distance between the observed output type and the
    no-attack prediction."""
    pi = empirical_pmf(y, Alphabet(ch.y_size))
    ident1 = StochasticMatrix.identity(ch.u1_size)
    ident2 = StochasticMatrix.identity(ch.u2_size)
    predicted = expected_output_pmf(ch, ident1, ident2)
    return float(np.linalg.norm(pi.values - predicted.values))


def classify(statistic: float, delta: float) -> DetectionVerdict:
    """Strict comparison: an attack is flagged only when statistic > delta."""
    if delta <= 0:
        raise ValueError("threshold must be positive")
    decision = Decision.ATTACK_DETECTED if statistic > delta else Decision.SAFE
    return DetectionVerdict(statistic=statistic, threshold=delta, decision=decision)


@dataclass(frozen=True)
class AttackTypeEstimate:
    y1: StochasticMatrix
    y2: StochasticMatrix
    objective: float  # best feasible sum of distances from identity found
    feasible_starts: int


def _project_columns(m: np.ndarray) -> np.ndarray:
    """Project every column of m onto the probability simplex."""
    rows, cols = m.shape
    u = np.sort(m, axis=0)[::-1, :]
    css = np.cumsum(u, axis=0) - 1.0
    ind = np.arange(1, rows + 1)[:, None]
    cond = u - css / ind > 0
    rho = rows - 1 - np.argmax(cond[::-1, :], axis=0)
    theta = css[rho, np.arange(cols)] / (rho + 1)
    return np.maximum(m - theta, 0.0)


def _prediction_terms(ch: ObservationChannel):
    a, b = ch.u1_size, ch.u2_size
    p2 = ch.joint_input.values.reshape(a, b)
    f3 = ch.forward.entries.reshape(ch.y_size, a, b)
    return p2, f3


def _predict(p2, f3, p1, p2m) -> np.ndarray:
    return np.einsum("ab,ca,db,ycd->y", p2, p1, p2m, f3, optimize=True)


def _residual_grads(p2, f3, p1, p2m, v):
    g1 = np.einsum("y,ab,db,ycd->ca", v, p2, p2m, f3, optimize=True)
    g2 = np.einsum("y,ab,ca,ycd->db", v, p2, p1, f3, optimize=True)
    return g1, g2


def _repair(p2, f3, p1, p2m, target, mu, iters=200):
    """Projected descent on the squared prediction residual."""
    for _ in range(iters):
        v = _predict(p2, f3, p1, p2m) - target
        r = np.linalg.norm(v)
        if r <= mu:
            break
        g1, g2 = _residual_grads(p2, f3, p1, p2m, v)
        gn = np.linalg.norm(g1) ** 2 + np.linalg.norm(g2) ** 2
        if gn < 1e-18:
            break
        step = 0.5 * r**2 / gn
        p1 = _project_columns(p1 - step * g1)
        p2m = _project_columns(p2m - step * g2)
    return p1, p2m


def _identity_distance(p1, p2m) -> float:
    a = np.linalg.norm(p1 - np.eye(p1.shape[0]))
    b = np.linalg.norm(p2m - np.eye(p2m.shape[0]))
    return float(a + b)


def permutation_pairs(u1_size: int, u2_size: int):
    """All pairs of permutation matrices over the two relay alphabets."""
    for o1 in itertools.permutations(range(1, u1_size + 1)):
        m1 = StochasticMatrix.permutation(o1).entries
        for o2 in itertools.permutations(range(1, u2_size + 1)):
            yield m1, StochasticMatrix.permutation(o2).entries


def estimate_attack_types(
    pi_y: Pmf,
    ch: ObservationChannel,
    mu: float,
    starts: int = 100,
    rng: np.random.Generator | None = None,
) -> AttackTypeEstimate:
    """Search for the stochastic pair consistent with the observed type
    that lies farthest from (I, I).

    Multi-start projected local ascent on the summed identity distance,
    constrained to pairs whose predicted output stays within ``mu`` of
    ``pi_y``.  Starts cover (I, I), every permutation pair and uniform
    random stochastic pairs.  The returned objective is the best feasible
    value found, a lower bound on the true maximum (the feasible set is
    non-convex and global optimality is not certified).  If no feasible
    point is found at all, falls back to (I, I, 0).
    """
    if mu <= 0:
        raise ValueError("mu must be positive")
    rng = rng or np.random.default_rng(0)
    a, b = ch.u1_size, ch.u2_size
    p2, f3 = _prediction_terms(ch)
    target = pi_y.values

    start_points = [(np.eye(a), np.eye(b))]
    start_points.extend(permutation_pairs(a, b))
    while len(start_points) < starts:
        start_points.append(
            (
                _project_columns(rng.random((a, a))),
                _project_columns(rng.random((b, b))),
            )
        )

    best = None
    best_obj = -1.0
    feasible = 0
    for s1, s2 in start_points:
        p1, p2m = _repair(p2, f3, s1.copy(), s2.copy(), target, mu)
        r = np.linalg.norm(_predict(p2, f3, p1, p2m) - target)
        if r > mu + 1e-9:
            continue
        feasible += 1
        obj = _identity_distance(p1, p2m)
        # ascent with feasibility repair after every step
        step = 0.25
        for _ in range(60):
            d1 = p1 - np.eye(a)
            d2 = p2m - np.eye(b)
            n1 = np.linalg.norm(d1) or 1.0
            n2 = np.linalg.norm(d2) or 1.0
            c1 = _project_columns(p1 + step * (d1 / n1 + 0.05 * rng.standard_normal((a, a))))
            c2 = _project_columns(p2m + step * (d2 / n2 + 0.05 * rng.standard_normal((b, b))))
            c1, c2 = _repair(p2, f3, c1, c2, target, mu)
            r = np.linalg.norm(_predict(p2, f3, c1, c2) - target)
            if r <= mu + 1e-9 and _identity_distance(c1, c2) > obj:
                p1, p2m = c1, c2
                obj = _identity_distance(c1, c2)
            else:
                step *= 0.7
        if obj > best_obj:
            best_obj = obj
            best = (p1, p2m)

    if best is None:
        return AttackTypeEstimate(
            y1=StochasticMatrix.identity(a),
            y2=StochasticMatrix.identity(b),
            objective=0.0,
            feasible_starts=0,
        )
    y1 = StochasticMatrix(np.clip(best[0], 0, 1) / best[0].sum(axis=0, keepdims=True))
    y2 = StochasticMatrix(np.clip(best[1], 0, 1) / best[1].sum(axis=0, keepdims=True))
    return AttackTypeEstimate(y1=y1, y2=y2, objective=best_obj, feasible_starts=feasible)
