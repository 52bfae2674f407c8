"""Threshold (non-photon-number-resolving) detection with efficiency and
optional dark counts.

A detector watches one path (both internal modes) and reports only
click / no-click. On a ket holding n photons in the watched modes the
no-click weight is (1-eta)^n, scaled by (1-dark_click_prob); a dark count
ORs an independent Bernoulli click onto the outcome. Measuring projects the
ensemble onto occupation groups of the detected modes, which are then
discarded, so the returned conditional mixtures live on the surviving
modes only.
"""

from __future__ import annotations

from dataclasses import dataclass

from .circuits import Branch, Mixture, merge_branches
from .fock import split_by_occupation

CLICK = "click"
NO_CLICK = "no-click"
ANY = "any"


@dataclass(frozen=True)
class DetectorSpec:
    eta: float
    dark_click_prob: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError(f"detector efficiency must lie in [0, 1], got {self.eta}")
        if not 0.0 <= self.dark_click_prob < 1.0:
            raise ValueError(
                f"dark click probability must lie in [0, 1), got {self.dark_click_prob}")


@dataclass(frozen=True)
class Detector:
    name: str
    path: str
    spec: DetectorSpec


def no_click_weight(n: int, eta: float, dark_click_prob: float = 0.0) -> float:
    """Probability that a threshold detector stays silent on |n>."""
    if n < 0:
        raise ValueError("photon number must be non-negative")
    return (1.0 - dark_click_prob) * (1.0 - eta) ** n


def click_prob(n: int, eta: float, dark_click_prob: float = 0.0) -> float:
    return 1.0 - no_click_weight(n, eta, dark_click_prob)


def measure_all(m: Mixture, detectors: list[Detector], tol: float = 1e-30
                ) -> dict[tuple[bool, ...], tuple[float, Mixture]]:
    """Joint click distribution over every detector, with conditional states.

    Returns a map from click tuple (ordered as `detectors`) to
    (probability, normalized conditional mixture on the undetected modes).
    Outcomes with probability below `tol` are omitted.
    """
    if not m.branches:
        return {}
    ref = m.branches[0].state
    det_modes: list[tuple[int, int]] = []
    all_modes: list[int] = []
    for d in detectors:
        pair = ref.path_indices(d.path)
        det_modes.append(pair)
        all_modes.extend(pair)
    if len(set(all_modes)) != len(all_modes):
        raise ValueError("detectors must watch disjoint paths")

    acc: dict[tuple[bool, ...], tuple[float, list[Branch]]] = {}
    for b in m:
        for occ, weight, cond in split_by_occupation(b.state, all_modes):
            # photons seen by each detector under this occupation group
            counts = [occ[2 * i] + occ[2 * i + 1] for i in range(len(detectors))]
            outcome_probs = [(tuple(), 1.0)]
            for n, d in zip(counts, detectors):
                silent = no_click_weight(n, d.spec.eta, d.spec.dark_click_prob)
                grown = []
                for prefix, p in outcome_probs:
                    if silent > 0.0:
                        grown.append((prefix + (False,), p * silent))
                    if silent < 1.0:
                        grown.append((prefix + (True,), p * (1.0 - silent)))
                outcome_probs = grown
            for outcome, p in outcome_probs:
                w = b.weight * weight * p
                if w <= 0.0:
                    continue
                prob, branches = acc.setdefault(outcome, (0.0, []))
                acc[outcome] = (prob + w, branches)
                branches.append(Branch(w, cond, b.tag))

    result = {}
    for outcome, (prob, branches) in acc.items():
        if prob < tol:
            continue
        cond = merge_branches(Mixture(branches).scaled(1.0 / prob))
        result[outcome] = (prob, cond)
    return result


def pattern_outcomes(pattern: dict[str, str], detectors: list[Detector]
                     ) -> list[tuple[bool, ...]]:
    """Expand a click pattern into the explicit outcome tuples it covers."""
    names = {d.name for d in detectors}
    unknown = set(pattern) - names
    if unknown:
        raise ValueError(f"pattern references unknown detectors {unknown}")
    choices = []
    for d in detectors:
        req = pattern.get(d.name, ANY)
        if req == CLICK:
            choices.append((True,))
        elif req == NO_CLICK:
            choices.append((False,))
        elif req == ANY:
            choices.append((False, True))
        else:
            raise ValueError(f"bad outcome requirement {req!r}")
    outcomes = [tuple()]
    for c in choices:
        outcomes = [o + (v,) for o in outcomes for v in c]
    return outcomes


def measure(m: Mixture, detectors: list[Detector], pattern: dict[str, str]
            ) -> tuple[float, Mixture]:
    """Probability of a click pattern and the conditional output ensemble.

    A zero-probability pattern yields (0.0, empty mixture).
    """
    table = measure_all(m, detectors)
    wanted = set(pattern_outcomes(pattern, detectors))
    prob = 0.0
    branches: list[Branch] = []
    for outcome, (p, cond) in table.items():
        if outcome in wanted:
            prob += p
            branches.extend(Branch(b.weight * p, b.state, b.tag) for b in cond)
    if prob <= 1e-30:
        return 0.0, Mixture([])
    return prob, merge_branches(Mixture(branches).scaled(1.0 / prob))
