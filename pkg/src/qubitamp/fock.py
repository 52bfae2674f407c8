"""Sparse pure states in a truncated multimode Fock space.

States are immutable values; every operation returns a new state. Modes are
addressed by integer index, with an ordered registry of labels attached to
each state so that higher layers can speak in terms of named optical paths.
Each path owns two internal modes (``matched`` / ``orthogonal``) used to
model partial spectral distinguishability between photons.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

MATCHED = "matched"
ORTHOGONAL = "orthogonal"

#: Amplitudes below this magnitude are dropped to keep states sparse.
DROP_TOLERANCE = 1e-15

DEFAULT_CUTOFF = 4
DEFAULT_PHOTON_BUDGET = 4

ModeLabel = tuple[str, str]
Occupation = tuple[int, ...]


def mode_labels(paths) -> tuple[ModeLabel, ...]:
    """Registry for the given paths: two internal modes per path, in order."""
    return tuple((p, i) for p in paths for i in (MATCHED, ORTHOGONAL))


def is_unitary(u: np.ndarray, tol: float = 1e-12) -> bool:
    u = np.asarray(u, dtype=complex)
    return u.shape == (2, 2) and np.max(np.abs(u @ u.conj().T - np.eye(2))) <= tol


def beam_splitter_matrix(t: float) -> np.ndarray:
    """Symmetric beam-splitter unitary with transmission t.

    Transmission keeps a photon in its own mode with amplitude sqrt(t);
    reflection carries it to the partner mode with amplitude i*sqrt(1-t).
    """
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"transmission must lie in [0, 1], got {t}")
    tau = math.sqrt(t)
    rho = 1j * math.sqrt(1.0 - t)
    return np.array([[tau, rho], [rho, tau]], dtype=complex)


@dataclass(frozen=True, eq=False)
class FockState:
    """Pure multimode bosonic state as a sparse ket-to-amplitude map.

    Invariants enforced at construction: occupation keys have length
    ``n_modes``, entries never exceed ``cutoff``, total photon number never
    exceeds ``photon_budget``, and amplitudes below ``DROP_TOLERANCE`` are
    pruned.
    """

    n_modes: int
    cutoff: int
    amplitudes: dict[Occupation, complex]
    labels: tuple[ModeLabel, ...] = field(default=())
    photon_budget: int = DEFAULT_PHOTON_BUDGET

    def __post_init__(self):
        if self.labels and len(self.labels) != self.n_modes:
            raise ValueError("mode registry length must match n_modes")
        if self.labels and len(set(self.labels)) != self.n_modes:
            raise ValueError("mode labels must be distinct")
        kept = {}
        for occ, amp in self.amplitudes.items():
            if len(occ) != self.n_modes:
                raise ValueError(f"occupation {occ} has wrong length")
            if any(n < 0 or n > self.cutoff for n in occ):
                raise ValueError(f"occupation {occ} violates cutoff {self.cutoff}")
            if sum(occ) > self.photon_budget:
                raise ValueError(
                    f"occupation {occ} exceeds photon budget {self.photon_budget}"
                )
            if abs(amp) >= DROP_TOLERANCE:
                kept[occ] = complex(amp)
        object.__setattr__(self, "amplitudes", kept)

    # -- basic queries -------------------------------------------------

    def norm_squared(self) -> float:
        return sum(abs(a) ** 2 for a in self.amplitudes.values())

    def norm(self) -> float:
        return math.sqrt(self.norm_squared())

    @property
    def is_normalized(self) -> bool:
        return abs(self.norm_squared() - 1.0) <= 1e-12

    def normalized(self) -> "FockState":
        n = self.norm()
        if n == 0.0:
            raise ValueError("cannot normalize the zero state")
        return self.with_amplitudes({k: a / n for k, a in self.amplitudes.items()})

    def with_amplitudes(self, amps: dict[Occupation, complex]) -> "FockState":
        return FockState(self.n_modes, self.cutoff, amps, self.labels,
                         self.photon_budget)

    def inner(self, other: "FockState") -> complex:
        """<self|other> over the shared ket basis."""
        if self.n_modes != other.n_modes:
            raise ValueError("mode count mismatch")
        small, big = self.amplitudes, other.amplitudes
        if len(big) < len(small):
            return np.conj(other.inner(self))
        return sum(np.conj(a) * big.get(k, 0.0) for k, a in small.items())

    def mode_index(self, label: ModeLabel) -> int:
        return self.labels.index(label)

    def path_indices(self, path: str) -> tuple[int, int]:
        return (self.labels.index((path, MATCHED)),
                self.labels.index((path, ORTHOGONAL)))

    def paths(self) -> tuple[str, ...]:
        seen = []
        for p, _ in self.labels:
            if p not in seen:
                seen.append(p)
        return tuple(seen)


def basis_state(occ, labels=(), cutoff: int = DEFAULT_CUTOFF,
                photon_budget: int = DEFAULT_PHOTON_BUDGET) -> FockState:
    occ = tuple(int(n) for n in occ)
    return FockState(len(occ), cutoff, {occ: 1.0 + 0.0j}, tuple(labels),
                     photon_budget)


def vacuum(n_modes: int, labels=(), cutoff: int = DEFAULT_CUTOFF,
           photon_budget: int = DEFAULT_PHOTON_BUDGET) -> FockState:
    return basis_state((0,) * n_modes, labels, cutoff, photon_budget)


def tensor(a: FockState, b: FockState) -> FockState:
    """Tensor product; mode registries concatenate, amplitudes multiply."""
    if a.cutoff != b.cutoff:
        raise ValueError(f"cutoff mismatch: {a.cutoff} vs {b.cutoff}")
    budget = max(a.photon_budget, b.photon_budget)
    amps: dict[Occupation, complex] = {}
    for ka, va in a.amplitudes.items():
        for kb, vb in b.amplitudes.items():
            amps[ka + kb] = va * vb
    labels = a.labels + b.labels if (a.labels or b.labels) else ()
    return FockState(a.n_modes + b.n_modes, a.cutoff, amps, labels, budget)


def apply_two_mode_unitary(state: FockState, i: int, j: int,
                           u: np.ndarray) -> FockState:
    """Apply a 2x2 unitary to modes i and j.

    The action on creation operators is
    a_i+ -> u00 a_i+ + u10 a_j+  and  a_j+ -> u01 a_i+ + u11 a_j+,
    expanded binomially over every ket in the sparse support.
    """
    if i == j:
        raise ValueError("modes must be distinct")
    for m in (i, j):
        if not 0 <= m < state.n_modes:
            raise ValueError(f"mode {m} out of range for {state.n_modes} modes")
    u = np.asarray(u, dtype=complex)
    if not is_unitary(u):
        raise ValueError("matrix is not unitary within 1e-12")

    out: dict[Occupation, complex] = {}
    for occ, amp in state.amplitudes.items():
        ni, nj = occ[i], occ[j]
        if ni == 0 and nj == 0:
            out[occ] = out.get(occ, 0.0) + amp
            continue
        base = amp / math.sqrt(math.factorial(ni) * math.factorial(nj))
        for k in range(ni + 1):
            cik = math.comb(ni, k) * u[0, 0] ** k * u[1, 0] ** (ni - k)
            for l in range(nj + 1):
                coeff = (cik * math.comb(nj, l)
                         * u[0, 1] ** l * u[1, 1] ** (nj - l))
                p = k + l
                q = ni + nj - p
                new = list(occ)
                new[i], new[j] = p, q
                value = base * coeff * math.sqrt(
                    math.factorial(p) * math.factorial(q))
                key = tuple(new)
                out[key] = out.get(key, 0.0) + value
    return state.with_amplitudes(out)


def apply_phase(state: FockState, i: int, phi: float) -> FockState:
    """Phase shift on mode i: each ket gains exp(1j * n_i * phi)."""
    if not 0 <= i < state.n_modes:
        raise ValueError(f"mode {i} out of range for {state.n_modes} modes")
    if phi == 0.0:
        return state
    return state.with_amplitudes({
        occ: amp * np.exp(1j * occ[i] * phi)
        for occ, amp in state.amplitudes.items()
    })


def occupation_marginal(state: FockState, modes) -> dict[Occupation, float]:
    """Probability of each joint occupation of the given modes."""
    modes = tuple(modes)
    if len(set(modes)) != len(modes):
        raise ValueError("modes must be distinct")
    probs: dict[Occupation, float] = {}
    for occ, amp in state.amplitudes.items():
        sub = tuple(occ[m] for m in modes)
        probs[sub] = probs.get(sub, 0.0) + abs(amp) ** 2
    return probs


def _canonical_phase(amps: dict[Occupation, complex]) -> dict[Occupation, complex]:
    """Rotate a global phase so the dominant amplitude is real positive."""
    pivot = max(sorted(amps), key=lambda k: abs(amps[k]))
    a = amps[pivot]
    phase = a / abs(a)
    return {k: v / phase for k, v in amps.items()}


def split_by_occupation(state: FockState, modes) -> list[
        tuple[Occupation, float, FockState]]:
    """Measure the given modes in the occupation basis and discard them.

    Returns one entry per observed joint occupation, sorted by occupation:
    (occupation, probability weight, conditional normalized state over the
    remaining modes). Conditional states carry a canonical global phase.
    """
    modes = tuple(modes)
    if len(set(modes)) != len(modes):
        raise ValueError("modes must be distinct")
    keep = [m for m in range(state.n_modes) if m not in modes]
    groups: dict[Occupation, dict[Occupation, complex]] = {}
    for occ, amp in state.amplitudes.items():
        sub = tuple(occ[m] for m in modes)
        rest = tuple(occ[m] for m in keep)
        groups.setdefault(sub, {})[rest] = amp
    labels = (tuple(state.labels[m] for m in keep) if state.labels else ())
    result = []
    for sub in sorted(groups):
        amps = groups[sub]
        weight = sum(abs(a) ** 2 for a in amps.values())
        if weight <= 0.0:
            continue
        scale = 1.0 / math.sqrt(weight)
        cond = FockState(len(keep), state.cutoff,
                         _canonical_phase({k: a * scale for k, a in amps.items()}),
                         labels, state.photon_budget)
        result.append((sub, weight, cond))
    return result


def total_photon_distribution(state: FockState, modes) -> dict[int, float]:
    """Probability of the total photon number summed over the given modes."""
    probs: dict[int, float] = {}
    for sub, p in occupation_marginal(state, modes).items():
        n = sum(sub)
        probs[n] = probs.get(n, 0.0) + p
    return probs
