"""State vocabulary: pure states, density matrices, ensembles, observables.

Conventions used throughout the package:

* kets are dense ``complex128`` vectors; factor 0 of a product space is the
  leftmost (slowest) Kronecker index,
* ``|H⟩ = |↑⟩ = e0`` and ``|V⟩ = |↓⟩ = e1`` name the computational basis of a
  single qubit, whether it models polarization or spin-1/2,
* measurement outcomes are labelled; eigenvalues are decoration that rides
  along with the label.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .errors import (
    DegenerateOutcome,
    DimensionMismatch,
    DomainError,
    ParseError,
)
from .linalg import DEFAULT_TOL, RANK_EPS, hermitian_eig, is_hermitian

__all__ = [
    "StateVector",
    "DensityMatrix",
    "Ensemble",
    "ObservableOutcome",
    "ProjectiveObservable",
    "MeasurementResult",
    "ensemble_density",
    "validate_ensemble",
    "born_probabilities",
    "sample_measurement",
    "measure_subsystem",
    "equal_up_to_phase",
    "basis_ket",
    "ket_h",
    "ket_v",
    "ket_d",
    "ket_dbar",
    "tilted_right",
    "tilted_left",
    "spin_basis",
    "spin_observable",
    "singlet",
    "triplet_plus",
    "triplet_minus",
    "triplet_zero",
    "bell_observable",
    "total_spin_observable",
    "state_to_json",
    "state_from_json",
    "matrix_to_json",
    "matrix_from_json",
    "ensemble_to_json",
    "ensemble_from_json",
]


def _frozen_array(a, dtype=np.complex128) -> np.ndarray:
    out = np.array(a, dtype=dtype, copy=True)
    if not np.all(np.isfinite(out)):
        raise DomainError("array contains NaN or Inf entries")
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class StateVector:
    """A normalized pure state.  The underlying array is read-only."""

    vec: np.ndarray
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        v = _frozen_array(self.vec)
        if v.ndim != 1 or v.shape[0] == 0:
            raise DimensionMismatch(f"state vector must be 1-D and nonempty, got shape {v.shape}")
        norm = float(np.linalg.norm(v))
        if abs(norm - 1.0) > self.tol:
            raise DomainError(f"state vector norm is {norm!r}, not 1 within {self.tol:.1e}")
        object.__setattr__(self, "vec", v)

    @property
    def dim(self) -> int:
        return self.vec.shape[0]

    def overlap(self, other: "StateVector") -> complex:
        """⟨self|other⟩."""
        if self.dim != other.dim:
            raise DimensionMismatch(f"overlap of dimensions {self.dim} and {other.dim}")
        return complex(np.vdot(self.vec, other.vec))

    def tensor(self, other: "StateVector") -> "StateVector":
        return StateVector(np.kron(self.vec, other.vec))

    def density(self) -> "DensityMatrix":
        return DensityMatrix(np.outer(self.vec, self.vec.conj()))


@dataclass(frozen=True)
class DensityMatrix:
    """A Hermitian, unit-trace, positive-semidefinite matrix (read-only)."""

    mat: np.ndarray
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        m = _frozen_array(self.mat)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionMismatch(f"density matrix must be square, got shape {m.shape}")
        if not is_hermitian(m, self.tol):
            raise DomainError("density matrix is not Hermitian within tolerance")
        tr = complex(np.trace(m))
        if abs(tr - 1.0) > self.tol:
            raise DomainError(f"density matrix trace is {tr!r}, not 1 within {self.tol:.1e}")
        low = hermitian_eig(m, tol=self.tol).eigenvalues[-1]
        if low < -self.tol:
            raise DomainError(f"density matrix has negative eigenvalue {low!r}")
        object.__setattr__(self, "mat", m)

    @property
    def dim(self) -> int:
        return self.mat.shape[0]


@dataclass(frozen=True)
class Ensemble:
    """A finite ensemble of pure states with strictly positive weights."""

    weights: np.ndarray
    states: tuple

    def __post_init__(self):
        w = np.array(self.weights, dtype=np.float64, copy=True)
        states = tuple(self.states)
        if w.ndim != 1 or w.shape[0] == 0:
            raise DimensionMismatch("weights must be a nonempty 1-D array")
        if len(states) != w.shape[0]:
            raise DimensionMismatch(
                f"{w.shape[0]} weights but {len(states)} states"
            )
        if not all(isinstance(s, StateVector) for s in states):
            raise DomainError("ensemble states must be StateVector instances")
        dims = {s.dim for s in states}
        if len(dims) != 1:
            raise DimensionMismatch(f"ensemble states live in different dimensions: {sorted(dims)}")
        if not np.all(np.isfinite(w)):
            raise DomainError("weights contain NaN or Inf")
        if np.any(w < RANK_EPS):
            raise DomainError("ensemble weights must be positive (>= rank epsilon)")
        total = float(np.sum(w))
        if abs(total - 1.0) > DEFAULT_TOL:
            raise DomainError(f"ensemble weights sum to {total!r}, not 1")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "states", states)

    @classmethod
    def from_pairs(cls, pairs: Sequence[tuple]) -> "Ensemble":
        weights = [p[0] for p in pairs]
        states = [p[1] for p in pairs]
        return cls(np.asarray(weights, dtype=np.float64), tuple(states))

    @property
    def dim(self) -> int:
        return self.states[0].dim

    def __len__(self) -> int:
        return len(self.states)

    def pairs(self) -> Iterator[tuple]:
        return zip(self.weights.tolist(), self.states)


@dataclass(frozen=True)
class ObservableOutcome:
    """One outcome of a projective observable: a label, the eigenvalue
    reported alongside it, and the projector that realizes it."""

    label: object
    eigenvalue: float
    projector: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "projector", _frozen_array(self.projector))


@dataclass(frozen=True)
class ProjectiveObservable:
    """A complete family of mutually orthogonal projectors."""

    outcomes: tuple
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        outs = tuple(self.outcomes)
        if not outs:
            raise DimensionMismatch("observable needs at least one outcome")
        d = outs[0].projector.shape[0]
        labels = [o.label for o in outs]
        if len(set(labels)) != len(labels):
            raise DomainError(f"outcome labels must be unique, got {labels}")
        acc = np.zeros((d, d), dtype=np.complex128)
        for o in outs:
            p = o.projector
            if p.shape != (d, d):
                raise DimensionMismatch(f"projector shape {p.shape} does not match dimension {d}")
            if not is_hermitian(p, self.tol):
                raise DomainError(f"projector for outcome {o.label!r} is not Hermitian")
            if np.linalg.norm(p @ p - p) > self.tol:
                raise DomainError(f"projector for outcome {o.label!r} is not idempotent")
            acc += p
        for i in range(len(outs)):
            for j in range(i + 1, len(outs)):
                if np.linalg.norm(outs[i].projector @ outs[j].projector) > self.tol:
                    raise DomainError(
                        f"projectors {outs[i].label!r} and {outs[j].label!r} are not orthogonal"
                    )
        if np.linalg.norm(acc - np.eye(d)) > self.tol:
            raise DomainError("projectors do not sum to the identity")
        object.__setattr__(self, "outcomes", outs)

    @classmethod
    def from_basis(cls, vectors, labels=None, eigenvalues=None, tol: float = DEFAULT_TOL):
        """Observable whose outcomes project onto the given orthonormal kets.

        ``vectors`` is a sequence of 1-D arrays or ``StateVector``s (or a 2-D
        array whose rows are the kets).  Labels default to ``0, 1, ...`` and
        eigenvalues to the same indices as floats.
        """
        kets = [v.vec if isinstance(v, StateVector) else np.asarray(v, dtype=np.complex128)
                for v in vectors]
        if labels is None:
            labels = list(range(len(kets)))
        if eigenvalues is None:
            eigenvalues = [float(i) for i in range(len(kets))]
        if not (len(kets) == len(labels) == len(eigenvalues)):
            raise DimensionMismatch("vectors, labels and eigenvalues must have equal length")
        outs = [
            ObservableOutcome(lab, float(ev), np.outer(k, k.conj()))
            for k, lab, ev in zip(kets, labels, eigenvalues)
        ]
        return cls(tuple(outs), tol=tol)

    @property
    def dim(self) -> int:
        return self.outcomes[0].projector.shape[0]

    @property
    def labels(self) -> list:
        return [o.label for o in self.outcomes]


@dataclass(frozen=True)
class MeasurementResult:
    label: object
    probability: float
    post_state: StateVector


def ensemble_density(e: Ensemble) -> DensityMatrix:
    """The weighted average Σ p_μ |φ_μ⟩⟨φ_μ| of the ensemble."""
    d = e.dim
    acc = np.zeros((d, d), dtype=np.complex128)
    for w, s in e.pairs():
        acc += w * np.outer(s.vec, s.vec.conj())
    return DensityMatrix(acc)


def validate_ensemble(e: Ensemble, w: DensityMatrix, tol: float = DEFAULT_TOL) -> bool:
    """True when the ensemble averages to ``w`` within ``tol`` (Frobenius)."""
    if e.dim != w.dim:
        raise DimensionMismatch(f"ensemble dimension {e.dim} vs density dimension {w.dim}")
    return bool(np.linalg.norm(ensemble_density(e).mat - w.mat) <= tol)


def born_probabilities(state: StateVector, obs: ProjectiveObservable) -> np.ndarray:
    """Outcome probabilities ⟨ψ|P_k|ψ⟩, aligned with ``obs.outcomes``."""
    if state.dim != obs.dim:
        raise DimensionMismatch(f"state dimension {state.dim} vs observable dimension {obs.dim}")
    probs = np.empty(len(obs.outcomes), dtype=np.float64)
    for k, o in enumerate(obs.outcomes):
        probs[k] = max(0.0, float(np.vdot(state.vec, o.projector @ state.vec).real))
    return probs


def _pick_outcome(probs: np.ndarray, u: float) -> int:
    acc = 0.0
    for k in range(len(probs) - 1):
        acc += probs[k]
        if u < acc:
            return k
    return len(probs) - 1


def sample_measurement(
    state: StateVector, obs: ProjectiveObservable, rng: np.random.Generator
) -> MeasurementResult:
    """Sample one outcome and collapse: P|ψ⟩ / √p."""
    probs = born_probabilities(state, obs)
    k = _pick_outcome(probs, float(rng.random()))
    p = float(probs[k])
    if p < RANK_EPS:
        raise DegenerateOutcome(
            f"outcome {obs.outcomes[k].label!r} has probability {p!r}; cannot renormalize"
        )
    post = obs.outcomes[k].projector @ state.vec
    post = post / np.linalg.norm(post)
    return MeasurementResult(obs.outcomes[k].label, p, StateVector(post))


def measure_subsystem(
    joint: StateVector,
    dims: Sequence[int],
    targets: Sequence[int],
    obs: ProjectiveObservable,
    rng: np.random.Generator,
) -> MeasurementResult:
    """Measure ``obs`` on the tensor factors listed in ``targets``.

    Returns the sampled label, its probability, and the collapsed *joint*
    state (all factors, original ordering).
    """
    dims = [int(d) for d in dims]
    total = int(np.prod(dims))
    if joint.dim != total:
        raise DimensionMismatch(f"joint dimension {joint.dim} != product of factors {dims}")
    targets = sorted(set(int(t) for t in targets))
    if not targets or targets[0] < 0 or targets[-1] >= len(dims):
        raise DimensionMismatch(f"targets {targets} out of range for {len(dims)} factors")
    d_t = int(np.prod([dims[t] for t in targets]))
    if obs.dim != d_t:
        raise DimensionMismatch(
            f"observable dimension {obs.dim} does not match target factors of dimension {d_t}"
        )

    tensor_form = joint.vec.reshape(dims)
    front = np.moveaxis(tensor_form, targets, range(len(targets)))
    matrix = front.reshape(d_t, -1)

    probs = np.empty(len(obs.outcomes), dtype=np.float64)
    for k, o in enumerate(obs.outcomes):
        probs[k] = max(0.0, float(np.linalg.norm(o.projector @ matrix) ** 2))
    k = _pick_outcome(probs, float(rng.random()))
    p = float(probs[k])
    if p < RANK_EPS:
        raise DegenerateOutcome(
            f"outcome {obs.outcomes[k].label!r} has probability {p!r}; cannot renormalize"
        )
    collapsed = (obs.outcomes[k].projector @ matrix) / np.sqrt(p)
    back = np.moveaxis(collapsed.reshape(front.shape), range(len(targets)), targets)
    return MeasurementResult(obs.outcomes[k].label, p, StateVector(back.reshape(-1)))


def equal_up_to_phase(a: StateVector, b: StateVector, tol: float = DEFAULT_TOL) -> bool:
    """True when |⟨a|b⟩| ≥ 1 − tol, i.e. the states differ by a global phase."""
    if a.dim != b.dim:
        return False
    return bool(abs(np.vdot(a.vec, b.vec)) >= 1.0 - tol)


# ---------------------------------------------------------------------------
# named states


def basis_ket(dim: int, index: int) -> StateVector:
    if not 0 <= index < dim:
        raise DomainError(f"basis index {index} out of range for dimension {dim}")
    v = np.zeros(dim, dtype=np.complex128)
    v[index] = 1.0
    return StateVector(v)


def ket_h() -> StateVector:
    """|H⟩ = |↑⟩ = e0."""
    return basis_ket(2, 0)


def ket_v() -> StateVector:
    """|V⟩ = |↓⟩ = e1."""
    return basis_ket(2, 1)


def ket_d() -> StateVector:
    """|D⟩ = (|H⟩ + |V⟩)/√2."""
    return StateVector(np.array([1.0, 1.0]) / np.sqrt(2.0))


def ket_dbar() -> StateVector:
    """|D̄⟩ = (|H⟩ − |V⟩)/√2."""
    return StateVector(np.array([1.0, -1.0]) / np.sqrt(2.0))


def _check_open_unit(p: float) -> float:
    p = float(p)
    if not 0.0 < p < 1.0:
        raise DomainError(f"p must lie strictly between 0 and 1, got {p!r}")
    return p


def tilted_right(p: float) -> StateVector:
    """|R⟩ = √p|H⟩ + √(1−p)|V⟩.

    The tilt away from |H⟩ is arccos(√p); the angle never enters any
    computation here, the weight ``p`` is the primitive.
    """
    p = _check_open_unit(p)
    return StateVector(np.array([np.sqrt(p), np.sqrt(1.0 - p)]))


def tilted_left(p: float) -> StateVector:
    """|L⟩ = √p|H⟩ − √(1−p)|V⟩, the mirror partner of :func:`tilted_right`."""
    p = _check_open_unit(p)
    return StateVector(np.array([np.sqrt(p), -np.sqrt(1.0 - p)]))


_SQ2 = 1.0 / np.sqrt(2.0)

_SPIN_BASES = {
    "x": (np.array([_SQ2, _SQ2], dtype=np.complex128),
          np.array([_SQ2, -_SQ2], dtype=np.complex128)),
    "y": (np.array([_SQ2, 1j * _SQ2], dtype=np.complex128),
          np.array([_SQ2, -1j * _SQ2], dtype=np.complex128)),
    "z": (np.array([1.0, 0.0], dtype=np.complex128),
          np.array([0.0, 1.0], dtype=np.complex128)),
}


def spin_basis(axis: str) -> tuple:
    """The (+1, −1) eigenkets of the spin component along ``axis``."""
    try:
        plus, minus = _SPIN_BASES[axis]
    except KeyError:
        raise DomainError(f"axis must be one of 'x', 'y', 'z', got {axis!r}") from None
    return StateVector(plus), StateVector(minus)


def spin_observable(axis: str) -> ProjectiveObservable:
    """Two-outcome observable for the spin component along ``axis``;
    labels are the spin values +1 and −1."""
    plus, minus = spin_basis(axis)
    return ProjectiveObservable.from_basis(
        [plus, minus], labels=[+1, -1], eigenvalues=[+1.0, -1.0]
    )


def singlet() -> StateVector:
    """(|↑↓⟩ − |↓↑⟩)/√2 — total spin 0."""
    return StateVector(np.array([0.0, _SQ2, -_SQ2, 0.0]))


def triplet_plus() -> StateVector:
    """|↑↑⟩ — total spin 1, m = +1."""
    return basis_ket(4, 0)


def triplet_minus() -> StateVector:
    """|↓↓⟩ — total spin 1, m = −1."""
    return basis_ket(4, 3)


def triplet_zero() -> StateVector:
    """(|↑↓⟩ + |↓↑⟩)/√2 — total spin 1, m = 0."""
    return StateVector(np.array([0.0, _SQ2, _SQ2, 0.0]))


def bell_observable() -> ProjectiveObservable:
    """Four-outcome observable in the total-spin basis of two qubits."""
    return ProjectiveObservable.from_basis(
        [singlet(), triplet_plus(), triplet_minus(), triplet_zero()],
        labels=["singlet", "triplet_plus", "triplet_minus", "triplet_zero"],
        eigenvalues=[0.0, 1.0, 2.0, 3.0],
    )


def total_spin_observable() -> ProjectiveObservable:
    """Coarse two-outcome observable: total spin 0 (singlet) vs 1 (triplet)."""
    s = singlet().vec
    p_singlet = np.outer(s, s.conj())
    p_triplet = np.eye(4, dtype=np.complex128) - p_singlet
    return ProjectiveObservable(
        (
            ObservableOutcome("singlet", 0.0, p_singlet),
            ObservableOutcome("triplet", 1.0, p_triplet),
        )
    )


# ---------------------------------------------------------------------------
# JSON encoding: a complex number is the two-element array [re, im]


def _complex_to_json(z: complex) -> list:
    return [float(np.real(z)), float(np.imag(z))]


def _complex_from_json(item, where: str) -> complex:
    if (
        not isinstance(item, (list, tuple))
        or len(item) != 2
        or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in item)
    ):
        raise ParseError(f"{where}: expected a [re, im] pair, got {item!r}")
    return complex(float(item[0]), float(item[1]))


def state_to_json(s: StateVector) -> list:
    return [_complex_to_json(z) for z in s.vec]


def state_from_json(data, where: str = "state") -> StateVector:
    if not isinstance(data, list) or not data:
        raise ParseError(f"{where}: expected a nonempty array of [re, im] pairs")
    vec = np.array(
        [_complex_from_json(item, f"{where}[{i}]") for i, item in enumerate(data)]
    )
    return StateVector(vec)


def matrix_to_json(m: np.ndarray) -> list:
    return [[_complex_to_json(z) for z in row] for row in np.asarray(m, dtype=np.complex128)]


def matrix_from_json(data, where: str = "matrix") -> np.ndarray:
    if not isinstance(data, list) or not data:
        raise ParseError(f"{where}: expected a nonempty array of rows")
    rows = []
    for i, row in enumerate(data):
        if not isinstance(row, list) or len(row) != len(data):
            raise ParseError(f"{where}[{i}]: expected a row of {len(data)} [re, im] pairs")
        rows.append([_complex_from_json(item, f"{where}[{i}][{j}]") for j, item in enumerate(row)])
    return np.array(rows, dtype=np.complex128)


def ensemble_to_json(e: Ensemble) -> list:
    return [{"weight": float(w), "state": state_to_json(s)} for w, s in e.pairs()]


def ensemble_from_json(data, where: str = "ensemble") -> Ensemble:
    if not isinstance(data, list) or not data:
        raise ParseError(f"{where}: expected a nonempty array of {{weight, state}} objects")
    weights = []
    states = []
    for i, item in enumerate(data):
        if not isinstance(item, dict) or set(item) != {"weight", "state"}:
            raise ParseError(f"{where}[{i}]: expected an object with keys 'weight' and 'state'")
        w = item["weight"]
        if not isinstance(w, (int, float)) or isinstance(w, bool):
            raise ParseError(f"{where}[{i}].weight: expected a number, got {w!r}")
        weights.append(float(w))
        states.append(state_from_json(item["state"], where=f"{where}[{i}].state"))
    return Ensemble(np.array(weights), tuple(states))
