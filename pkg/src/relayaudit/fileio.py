"""Structured-text (YAML) channel / attack / scenario files and CSV output.

Every file must carry ``convention: column-stochastic`` and matrices are
written as explicit row lists of the column-stochastic matrix, exactly as
they would be written out by hand.  The header is validated so that a file
authored with transposed matrices fails loudly instead of quietly
producing a wrong channel.  The Markov jammer ``transition`` is the one
deliberate exception: its rows index the current state (row-stochastic),
which the loader documents and does not reinterpret.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np
import yaml

from .attacks import (
    AlternatingAttack,
    AttackSpec,
    FixedPermutation,
    Identity,
    IidAttack,
    MarkovJammer,
    PermutationShift,
)
from .core import Pmf, StochasticMatrix
from .detect import Decision
from .runner import ScenarioConfig, TrialRecord
from .simulate import NetworkSpec

CONVENTION = "column-stochastic"


class FileFormatError(ValueError):
    pass


def _require(mapping: dict, key: str, where: str):
    if key not in mapping:
        raise FileFormatError(f"{where}: missing required field {key!r}")
    return mapping[key]


def _check_convention(doc: dict, where: str):
    conv = _require(doc, "convention", where)
    if conv != CONVENTION:
        raise FileFormatError(
            f"{where}: convention must be {CONVENTION!r}, got {conv!r}"
        )


def _matrix(value, where: str) -> StochasticMatrix:
    try:
        return StochasticMatrix(np.array(value, dtype=float))
    except ValueError as exc:
        raise FileFormatError(f"{where}: {exc}") from exc


def _pmf(value, where: str) -> Pmf:
    try:
        return Pmf(np.array(value, dtype=float))
    except ValueError as exc:
        raise FileFormatError(f"{where}: {exc}") from exc


def network_from_dict(doc: dict, where: str = "channel") -> NetworkSpec:
    _check_convention(doc, where)
    p_x = _pmf(_require(doc, "p_x", where), f"{where}.p_x")
    if "u1_given_x" in doc:
        u1 = _matrix(doc["u1_given_x"], f"{where}.u1_given_x")
        u2 = _matrix(_require(doc, "u2_given_x", where), f"{where}.u2_given_x")
        m = u1.rows * u2.rows
        forward = _forward(doc, m, where)
        return NetworkSpec.from_product(p_x, u1, u2, forward)
    joint = _matrix(_require(doc, "u1u2_given_x", where), f"{where}.u1u2_given_x")
    u1_size = int(_require(doc, "u1_size", where))
    u2_size = int(_require(doc, "u2_size", where))
    forward = _forward(doc, u1_size * u2_size, where)
    return NetworkSpec(
        p_x=p_x, relay_channel=joint, forward=forward, u1_size=u1_size, u2_size=u2_size
    )


def _forward(doc: dict, m: int, where: str) -> StochasticMatrix:
    value = _require(doc, "forward", where)
    if value == "identity":
        return StochasticMatrix.identity(m)
    return _matrix(value, f"{where}.forward")


def load_channel(path) -> NetworkSpec:
    path = Path(path)
    doc = yaml.safe_load(path.read_text())
    if not isinstance(doc, dict):
        raise FileFormatError(f"{path}: expected a mapping at top level")
    return network_from_dict(doc, where=str(path))


def attack_from_dict(doc, where: str) -> AttackSpec:
    if doc is None or doc == "identity":
        return Identity()
    if not isinstance(doc, dict):
        raise FileFormatError(f"{where}: attack must be 'identity' or a mapping")
    kind = _require(doc, "type", where)
    if kind == "identity":
        return Identity()
    if kind == "iid":
        return IidAttack(matrix=_matrix(_require(doc, "matrix", where), f"{where}.matrix"))
    if kind == "alternating":
        return AlternatingAttack(
            p_odd=_matrix(_require(doc, "p_odd", where), f"{where}.p_odd"),
            p_even=_matrix(_require(doc, "p_even", where), f"{where}.p_even"),
        )
    if kind == "markov-jammer":
        transition = np.array(_require(doc, "transition", where), dtype=float)
        return MarkovJammer(
            p_j1=_pmf(_require(doc, "p_j1", where), f"{where}.p_j1"),
            transition=transition,
            q=int(doc.get("q", transition.shape[0])),
        )
    if kind == "permutation-shift":
        return PermutationShift()
    if kind == "permutation":
        return FixedPermutation(order=np.array(_require(doc, "order", where), dtype=int))
    raise FileFormatError(f"{where}: unknown attack type {kind!r}")


def load_scenario(path, seed_override: int | None = None) -> ScenarioConfig:
    path = Path(path)
    doc = yaml.safe_load(path.read_text())
    if not isinstance(doc, dict):
        raise FileFormatError(f"{path}: expected a mapping at top level")
    where = str(path)
    _check_convention(doc, where)
    channel = _require(doc, "channel", where)
    if isinstance(channel, str):
        network = load_channel(path.parent / channel)
    else:
        channel.setdefault("convention", doc["convention"])
        network = network_from_dict(channel, where=f"{where}.channel")
    seed = seed_override if seed_override is not None else doc.get("master_seed")
    if seed is None:
        raise FileFormatError(
            f"{where}: master_seed missing and no --seed given "
            "(wall-clock seeding is not supported)"
        )
    try:
        return ScenarioConfig(
            label=str(doc.get("label", path.stem)),
            network=network,
            attack1=attack_from_dict(doc.get("attack1"), f"{where}.attack1"),
            attack2=attack_from_dict(doc.get("attack2"), f"{where}.attack2"),
            n=int(_require(doc, "n", where)),
            trials=int(_require(doc, "trials", where)),
            master_seed=int(seed),
            delta=float(_require(doc, "delta", where)),
        )
    except ValueError as exc:
        raise FileFormatError(f"{where}: {exc}") from exc


TRIAL_FIELDS = ["scenario", "trial_index", "n", "seed", "statistic", "verdict"]


def write_trials(records: list[TrialRecord], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRIAL_FIELDS)
        for r in records:
            writer.writerow(
                [r.scenario, r.trial_index, r.n, r.seed, f"{r.statistic:.17g}", r.verdict.value]
            )


def read_trials(path) -> list[TrialRecord]:
    records = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != TRIAL_FIELDS:
            raise FileFormatError(f"{path}: expected header {TRIAL_FIELDS}")
        for row in reader:
            records.append(
                TrialRecord(
                    scenario=row["scenario"],
                    trial_index=int(row["trial_index"]),
                    n=int(row["n"]),
                    seed=int(row["seed"]),
                    statistic=float(row["statistic"]),
                    verdict=Decision(row["verdict"]),
                )
            )
    return records


def write_cdf(pairs: list[tuple[float, float]], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["value", "fraction"])
        for value, fraction in pairs:
            writer.writerow([f"{value:.17g}", f"{fraction:.17g}"])
