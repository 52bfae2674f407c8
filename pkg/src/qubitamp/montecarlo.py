"""Pulse-by-pulse sampling of coincidence counts and the ratio estimators.

Each pulse draws a classical source branch (photon presences and internal
modes), then a detection outcome from the exact conditional click
distribution of that branch, so the sampler is unbiased by construction and
needs no rejection step. Counts mirror the experimental bookkeeping:

  d1        input-herald detector, an independent Bernoulli(eta_herald);
  d1_d2     d1 in coincidence with the transmission-calibration channel, an
            interleaved reference measurement that registers the input
            photon surviving the channel (Bernoulli(p_in), drawn
            independently of the amplifier optics so the ratio estimators
            stay consistent with the exact oracle);
  threefold d1_d2 plus a herald-class click pattern;
  fourfold  threefold plus a click of the output analyzer detector.

Poisson counting statistics are propagated to the ratio estimators at first
order over the independent increments of each nested pair (a and b - a for
a ratio a/b), i.e. sigma(a/b) = sqrt(a (b - a) / b^3).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .amplifier import AmplifierParams, QubitSpec, build_scenario
from .circuits import BeamSplitter, Branch, Circuit, Mixture, PhaseShift, run_circuit
from .detection import CLICK, Detector, DetectorSpec, measure, measure_all

#: Default input-herald efficiency: source heralding times detector efficiency.
ETA_HERALD_DEFAULT = 0.86 * 0.70

_CHUNK = 1_000_000


class UndefinedEstimateError(ValueError):
    """A ratio estimator has a zero denominator."""


@dataclass(frozen=True)
class CountsTable:
    """Raw coincidence counts of one sampling run, per herald class."""

    n_pulses: int
    d1: int
    d1_d2: int
    threefold: dict[str, int]
    fourfold: dict[str, int]

    def __post_init__(self):
        if not (0 <= self.d1_d2 <= self.d1 <= self.n_pulses):
            raise ValueError("counts must nest: d1_d2 <= d1 <= n_pulses")
        for cls, three in self.threefold.items():
            four = self.fourfold.get(cls, 0)
            if not (0 <= four <= three <= self.d1_d2):
                raise ValueError(
                    f"counts must nest for class {cls}: "
                    f"{four} <= {three} <= {self.d1_d2}")


@dataclass(frozen=True)
class EstimateWithError:
    value: float
    error: float

    def __post_init__(self):
        if self.error < 0.0:
            raise ValueError("standard error must be non-negative")


def _analyzer_setup(bundle, analyzer_phi: float, eta_out: float):
    """Extend the circuit with the output analyzer and return its detector.

    For the time-bin scenario the two output rails are recombined on a
    50/50 splitter with the long rail rotated so that the qubit
    (|s> + e^{i analyzer_phi} |l>)/sqrt(2) exits entirely on the short
    port; the detector there then projects onto that qubit. The Fock
    scenario needs no recombination.
    """
    spec = DetectorSpec(eta_out, 0.0)
    if bundle.scenario == "fock-hpa":
        return bundle.circuit, Detector("d4", "out", spec)
    elements = bundle.circuit.elements + (
        PhaseShift(-analyzer_phi - math.pi / 2.0, "out_l"),
        BeamSplitter(0.5, ("out_s", "out_l")),
    )
    return Circuit(bundle.circuit.paths, elements), Detector("d4", "out_s", spec)


def _branch_outcome_table(bundle, circuit, d4: Detector):
    """Exact per-branch distribution over (herald class, analyzer click).

    Returns (weights, outcomes) where outcomes[b] is a list of
    ((class_index, d4_clicked), probability) entries; the remaining
    probability of each branch corresponds to "no herald".
    """
    class_outcomes = []
    order = [d.name for d in bundle.detectors]
    for cls in bundle.herald_classes:
        class_outcomes.append({
            tuple(p[name] == CLICK for name in order) for p in cls.patterns
        })
    tail = _analyzer_tail(bundle, circuit)
    weights = []
    outcomes = []
    for b in bundle.source:
        weights.append(b.weight)
        propagated = run_circuit(Mixture([Branch(1.0, b.state, b.tag)]),
                                 bundle.circuit)
        table = measure_all(propagated, list(bundle.detectors))
        entries = []
        for ci, wanted in enumerate(class_outcomes):
            p_click = p_silent = 0.0
            for outcome, (p, cond) in table.items():
                if outcome not in wanted:
                    continue
                # propagate the conditional output through the analyzer
                analyzed = run_circuit(cond, tail)
                p4, _ = measure(analyzed, [d4], {d4.name: CLICK})
                p_click += p * p4
                p_silent += p * (1.0 - p4)
            if p_click > 0.0:
                entries.append(((ci, True), p_click))
            if p_silent > 0.0:
                entries.append(((ci, False), p_silent))
        outcomes.append(entries)
    return np.array(weights), outcomes


def _analyzer_tail(bundle, circuit) -> Circuit:
    """The analyzer-only suffix of the extended circuit."""
    n = len(bundle.circuit.elements)
    return Circuit(bundle.output_paths, circuit.elements[n:])


def sample_events(params: AmplifierParams, n_pulses: int, seed: int,
                  scenario: str = "fock-hpa",
                  qubit: QubitSpec | None = None,
                  analyzer_phi: float = 0.0,
                  eta_herald: float = ETA_HERALD_DEFAULT,
                  eta_out: float = 1.0,
                  cal_efficiency: float = 1.0) -> CountsTable:
    """Sample n_pulses detection rounds and tally coincidence counts.

    Reproducible: a fixed seed yields identical counts. The random stream
    is counter-based (Philox) with a fixed number of draws per pulse, so
    pulse-range shards would reproduce the same totals.
    """
    if n_pulses <= 0:
        raise ValueError("n_pulses must be positive")
    for name, v in (("eta_herald", eta_herald), ("eta_out", eta_out),
                    ("cal_efficiency", cal_efficiency)):
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"{name} must lie in [0, 1], got {v}")

    bundle = build_scenario(scenario, params, qubit, split_internals=True)
    circuit, d4 = _analyzer_setup(bundle, analyzer_phi, eta_out)
    weights, outcomes = _branch_outcome_table(bundle, circuit, d4)
    cum_weights = np.cumsum(weights)
    cum_weights[-1] = 1.0  # guard against rounding dust

    # per-branch categorical over (class, d4) outcomes; trailing mass = no herald
    n_classes = len(bundle.herald_classes)
    branch_cdfs = []
    branch_codes = []
    for entries in outcomes:
        probs = np.array([p for _, p in entries])
        codes = np.array([ci * 2 + int(clicked) for (ci, clicked), _ in entries],
                         dtype=np.int64)
        branch_cdfs.append(np.cumsum(probs))
        branch_codes.append(codes)

    p_cal = params.p_in * cal_efficiency
    d1 = d1_d2 = 0
    threefold = np.zeros(n_classes, dtype=np.int64)
    fourfold = np.zeros(n_classes, dtype=np.int64)
    rng = np.random.Generator(np.random.Philox(key=seed))
    remaining = n_pulses
    while remaining > 0:
        n = min(remaining, _CHUNK)
        remaining -= n
        u = rng.random((n, 4))
        branch = np.searchsorted(cum_weights, u[:, 0], side="right")
        herald_code = np.full(n, -1, dtype=np.int64)
        for bi in range(len(weights)):
            mask = branch == bi
            if not mask.any():
                continue
            cdf = branch_cdfs[bi]
            if cdf.size == 0:
                continue
            pos = np.searchsorted(cdf, u[mask, 1], side="right")
            hit = pos < cdf.size
            codes = np.full(mask.sum(), -1, dtype=np.int64)
            codes[hit] = branch_codes[bi][pos[hit]]
            herald_code[mask] = codes
        clicked_d1 = u[:, 2] < eta_herald
        cal = u[:, 3] < p_cal
        base = clicked_d1 & cal
        d1 += int(clicked_d1.sum())
        d1_d2 += int(base.sum())
        for ci in range(n_classes):
            in_class = base & (herald_code >= 0) & (herald_code // 2 == ci)
            threefold[ci] += int(in_class.sum())
            fourfold[ci] += int((in_class & (herald_code % 2 == 1)).sum())

    names = [cls.name for cls in bundle.herald_classes]
    return CountsTable(
        n_pulses=n_pulses,
        d1=d1,
        d1_d2=d1_d2,
        threefold={name: int(threefold[i]) for i, name in enumerate(names)},
        fourfold={name: int(fourfold[i]) for i, name in enumerate(names)},
    )


def _ratio(num: int, den: int) -> EstimateWithError:
    if den <= 0:
        raise UndefinedEstimateError("ratio denominator is zero")
    value = num / den
    error = math.sqrt(num * (den - num)) / den ** 1.5
    return EstimateWithError(value, error)


def estimate_pin(counts: CountsTable) -> EstimateWithError:
    """Input-photon probability from the d1_d2 / d1 coincidence ratio."""
    return _ratio(counts.d1_d2, counts.d1)


def estimate_pout(counts: CountsTable, herald_class: str) -> EstimateWithError:
    """Heralded output probability from the fourfold / threefold ratio."""
    if herald_class not in counts.threefold:
        raise KeyError(f"unknown herald class {herald_class!r}")
    return _ratio(counts.fourfold.get(herald_class, 0),
                  counts.threefold[herald_class])


def estimate_gain(counts: CountsTable, herald_class: str) -> EstimateWithError:
    """Gain estimate pout / pin with first-order error combination."""
    pin = estimate_pin(counts)
    pout = estimate_pout(counts, herald_class)
    if pin.value <= 0.0:
        raise UndefinedEstimateError("estimated p_in is zero")
    value = pout.value / pin.value
    error = math.sqrt((pout.error / pin.value) ** 2
                      + (pout.value * pin.error / pin.value ** 2) ** 2)
    return EstimateWithError(value, error)


def plan_measurement_time(p_in: float, base_pulses: int) -> int:
    """Pulses needed at transmission p_in for the statistics of base_pulses."""
    if p_in <= 0.0:
        raise ValueError("p_in must be positive to plan a measurement")
    if base_pulses <= 0:
        raise ValueError("base_pulses must be positive")
    return math.ceil(base_pulses / p_in)
