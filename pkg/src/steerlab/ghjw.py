"""Constructive purification engine.

The central fact this module makes executable: all ensembles averaging to the
same density matrix W are *remotely steerable* from one another.  Concretely,
if |Ψ⟩ and |Ψ′⟩ are two purifications of W with the same auxiliary dimension,
there is a unitary U acting on the auxiliary (Bob) side alone with

    |Ψ⟩ = (I ⊗ U)|Ψ′⟩,

and measuring the auxiliary system in the rotated pointer basis {U e_μ}
collapses the principal (Alice) side into the μ-th member of the target
ensemble with exactly its weight as probability.  Everything below computes
these objects explicitly rather than merely asserting their existence.

A discipline worth noting: the relating unitary is built from the Schmidt
forms of *both* purifications expanded in a *single* eigenbasis of W.  When W
has degenerate or zero eigenvalues the eigenbasis is not unique, and using
two independently computed eigendecompositions would produce Schmidt vectors
that do not correspond pairwise.  Sharing one basis removes that failure mode
for any spectrum.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    AgreeViolation,
    BobTooSmall,
    DimensionMismatch,
    MarginalMismatch,
    NotADecomposition,
    ResidualOutcome,
)
from .linalg import (
    DEFAULT_TOL,
    RANK_EPS,
    EigenDecomposition,
    gram_schmidt_complete,
    hermitian_eig,
)
from .states import (
    DensityMatrix,
    Ensemble,
    MeasurementResult,
    ObservableOutcome,
    ProjectiveObservable,
    StateVector,
    basis_ket,
    measure_subsystem,
    validate_ensemble,
)

__all__ = [
    "SchmidtForm",
    "Purification",
    "SteeringPlan",
    "SteeredOutcome",
    "OutcomeRow",
    "CandidateReport",
    "CertificationReport",
    "schmidt",
    "purify_from_ensemble",
    "apply_bob_unitary",
    "relating_unitary",
    "steering_observable",
    "steer",
    "certify",
]

#: Label of the complement outcome a steering observable carries when the
#: target ensemble does not fill the auxiliary dimension.
RESIDUAL_LABEL = "NONE"


@dataclass(frozen=True)
class SchmidtForm:
    """Schmidt data of a bipartite pure state restricted to its support.

    Rows of ``alice_basis`` / ``bob_basis`` are the paired orthonormal kets;
    ``coefficients[i]`` is the positive weight √w_i multiplying the i-th pair.
    """

    coefficients: np.ndarray
    alice_basis: np.ndarray
    bob_basis: np.ndarray

    @property
    def rank(self) -> int:
        return self.coefficients.shape[0]

    def reassemble(self) -> np.ndarray:
        """Σ_i coeff_i · (alice_i ⊗ bob_i), as a flat vector."""
        out = np.einsum("i,ia,ib->ab", self.coefficients, self.alice_basis, self.bob_basis)
        return out.reshape(-1)


@dataclass(frozen=True)
class Purification:
    """A pure state on Alice ⊗ Bob regarded as a purification of its Alice
    marginal.  ``bob_pointer_basis`` records the pointer kets used when the
    state was assembled from an ensemble (None otherwise)."""

    joint: StateVector
    dim_alice: int
    dim_bob: int
    bob_pointer_basis: tuple | None = None

    def __post_init__(self):
        if self.dim_alice <= 0 or self.dim_bob <= 0:
            raise DimensionMismatch("factor dimensions must be positive")
        if self.joint.dim != self.dim_alice * self.dim_bob:
            raise DimensionMismatch(
                f"joint dimension {self.joint.dim} != {self.dim_alice} * {self.dim_bob}"
            )

    def as_matrix(self) -> np.ndarray:
        """The amplitude matrix M with M[i, j] = ⟨e_i ⊗ e_j|Ψ⟩."""
        return self.joint.vec.reshape(self.dim_alice, self.dim_bob)

    def alice_marginal(self) -> np.ndarray:
        m = self.as_matrix()
        return m @ m.conj().T


def schmidt(
    joint: StateVector,
    dim_alice: int,
    dim_bob: int,
    alice_eigenbasis: EigenDecomposition | None = None,
    tol: float = DEFAULT_TOL,
) -> SchmidtForm:
    """Schmidt decomposition driven by an eigenbasis of the Alice marginal.

    Expanding |Ψ⟩ = Σ_i |α_i⟩ ⊗ |β_i⟩ over eigenkets α_i of W = Tr_B|Ψ⟩⟨Ψ|
    forces ⟨β_j|β_i⟩ = w_i δ_ij; the Schmidt pairs are (α_i, β_i/√w_i) over
    the support w_i > rank epsilon.  Passing ``alice_eigenbasis`` pins the
    basis (essential when comparing two purifications of one W); the Gram
    constraint is verified and :class:`AgreeViolation` raised if the supplied
    basis does not diagonalize this state's marginal.
    """
    if joint.dim != dim_alice * dim_bob:
        raise DimensionMismatch(f"joint dimension {joint.dim} != {dim_alice} * {dim_bob}")
    m = joint.vec.reshape(dim_alice, dim_bob)
    if alice_eigenbasis is None:
        alice_eigenbasis = hermitian_eig(m @ m.conj().T, tol=tol)
    elif alice_eigenbasis.dim != dim_alice:
        raise DimensionMismatch(
            f"eigenbasis dimension {alice_eigenbasis.dim} != alice dimension {dim_alice}"
        )

    values = alice_eigenbasis.eigenvalues
    beta = alice_eigenbasis.eigenvectors.conj().T @ m  # row i = ⟨α_i|Ψ⟩ on Bob
    gram = beta @ beta.conj().T
    defect = float(np.linalg.norm(gram - np.diag(values)))
    if defect > tol:
        raise AgreeViolation(
            f"expansion vectors violate the Gram constraint: defect {defect:.3e} > {tol:.1e} "
            "(the supplied eigenbasis does not belong to this state's marginal)"
        )

    support = values > RANK_EPS
    coeffs = np.sqrt(values[support])
    alice_rows = np.ascontiguousarray(alice_eigenbasis.eigenvectors[:, support].T)
    bob_rows = beta[support] / coeffs[:, None]
    return SchmidtForm(coeffs, alice_rows, np.ascontiguousarray(bob_rows))


def purify_from_ensemble(e: Ensemble, dim_bob: int) -> Purification:
    """|Ψ⟩ = Σ_μ √p_μ |φ_μ⟩ ⊗ |e_μ⟩ with orthonormal pointer kets on Bob.

    Raises :class:`BobTooSmall` when Bob cannot hold one pointer ket per
    ensemble member.
    """
    dim_bob = int(dim_bob)
    if dim_bob < len(e):
        raise BobTooSmall(
            f"auxiliary dimension {dim_bob} cannot index {len(e)} ensemble members"
        )
    m = np.zeros((e.dim, dim_bob), dtype=np.complex128)
    for mu, (w, s) in enumerate(e.pairs()):
        m[:, mu] = np.sqrt(w) * s.vec
    pointer = tuple(basis_ket(dim_bob, mu) for mu in range(len(e)))
    return Purification(StateVector(m.reshape(-1)), e.dim, dim_bob, pointer)


def apply_bob_unitary(psi: Purification, u: np.ndarray) -> Purification:
    """(I ⊗ u)|Ψ⟩ as a new purification (pointer bookkeeping dropped)."""
    u = np.asarray(u, dtype=np.complex128)
    if u.shape != (psi.dim_bob, psi.dim_bob):
        raise DimensionMismatch(f"unitary shape {u.shape} != ({psi.dim_bob}, {psi.dim_bob})")
    m = psi.as_matrix() @ u.T
    return Purification(StateVector(m.reshape(-1)), psi.dim_alice, psi.dim_bob)


def relating_unitary(
    psi: Purification, psi_prime: Purification, tol: float = DEFAULT_TOL
) -> np.ndarray:
    """The Bob-side unitary U with |Ψ⟩ = (I ⊗ U)|Ψ′⟩.

    Both purifications must share dimensions and the same Alice marginal
    (within ``tol``, else :class:`MarginalMismatch`).  One eigendecomposition
    of the shared marginal drives both Schmidt forms, the Schmidt partners on
    Bob are completed to full bases in lockstep, and U maps primed onto
    unprimed partners: U = Σ_k |g_k⟩⟨g'_k|.
    """
    if (psi.dim_alice, psi.dim_bob) != (psi_prime.dim_alice, psi_prime.dim_bob):
        raise DimensionMismatch(
            f"purifications have different shapes: "
            f"({psi.dim_alice}, {psi.dim_bob}) vs ({psi_prime.dim_alice}, {psi_prime.dim_bob})"
        )
    w = psi.alice_marginal()
    w_prime = psi_prime.alice_marginal()
    defect = float(np.linalg.norm(w - w_prime))
    if defect > tol:
        raise MarginalMismatch(
            f"Alice marginals differ: ‖W − W′‖_F = {defect:.3e} > {tol:.1e}"
        )

    shared = hermitian_eig((w + w_prime) / 2.0, tol=tol)
    sf = schmidt(psi.joint, psi.dim_alice, psi.dim_bob, alice_eigenbasis=shared, tol=tol)
    sf_prime = schmidt(
        psi_prime.joint, psi.dim_alice, psi.dim_bob, alice_eigenbasis=shared, tol=tol
    )
    full = gram_schmidt_complete(sf.bob_basis, psi.dim_bob)
    full_prime = gram_schmidt_complete(sf_prime.bob_basis, psi.dim_bob)
    return full.T @ full_prime.conj()


@dataclass(frozen=True)
class SteeringPlan:
    """Recipe for steering a purification into a target ensemble.

    ``observable`` acts on the Bob factor; outcome label μ announces that
    Alice now holds the μ-th target state, and ``outcome_map[μ]`` is the
    promised ``(weight, state)`` pair.  ``bob_states`` keeps the rotated
    pointer kets |U e_μ⟩ the projectors were built from.
    """

    observable: ProjectiveObservable
    outcome_map: dict
    bob_states: tuple = field(default_factory=tuple)

    @property
    def has_residual(self) -> bool:
        return any(o.label == RESIDUAL_LABEL for o in self.observable.outcomes)


@dataclass(frozen=True)
class SteeredOutcome:
    """One sampled steering event: what Bob announced and what Alice holds."""

    label: int
    probability: float
    target_state: StateVector
    alice_state: StateVector


def steering_observable(
    psi: Purification, target: Ensemble, tol: float = DEFAULT_TOL
) -> SteeringPlan:
    """Build the Bob observable that steers ``psi`` into ``target``.

    ``target`` must decompose this purification's Alice marginal
    (:class:`NotADecomposition` otherwise) and fit into Bob
    (:class:`BobTooSmall` otherwise).  The observable's projectors are
    |U e_μ⟩⟨U e_μ| for the relating unitary U, plus a residual complement
    outcome labelled "NONE" when the target has fewer members than Bob has
    dimensions; the residual never fires on ``psi`` itself.
    """
    if target.dim != psi.dim_alice:
        raise DimensionMismatch(
            f"target ensemble dimension {target.dim} != alice dimension {psi.dim_alice}"
        )
    w = DensityMatrix(psi.alice_marginal())
    if not validate_ensemble(target, w, tol=tol):
        raise NotADecomposition(
            "target ensemble does not average to this purification's Alice marginal"
        )
    if len(target) > psi.dim_bob:
        raise BobTooSmall(
            f"target ensemble has {len(target)} members but Bob has dimension {psi.dim_bob}"
        )

    psi_prime = purify_from_ensemble(target, psi.dim_bob)
    u = relating_unitary(psi, psi_prime, tol=tol)

    outcomes = []
    kets = []
    acc = np.zeros((psi.dim_bob, psi.dim_bob), dtype=np.complex128)
    for mu in range(len(target)):
        ket = u[:, mu]
        proj = np.outer(ket, ket.conj())
        outcomes.append(ObservableOutcome(mu, float(mu), proj))
        kets.append(StateVector(ket))
        acc += proj
    if len(target) < psi.dim_bob:
        outcomes.append(
            ObservableOutcome(RESIDUAL_LABEL, -1.0, np.eye(psi.dim_bob) - acc)
        )
    observable = ProjectiveObservable(tuple(outcomes), tol=max(tol, DEFAULT_TOL))

    outcome_map = {
        mu: (float(wgt), state) for mu, (wgt, state) in enumerate(target.pairs())
    }
    plan = SteeringPlan(observable, outcome_map, tuple(kets))

    residual = _residual_probability(psi, plan)
    if residual > max(tol, DEFAULT_TOL):
        raise NotADecomposition(
            f"residual outcome carries probability {residual:.3e} on the plan's purification"
        )
    return plan


def _residual_probability(psi: Purification, plan: SteeringPlan) -> float:
    m = psi.as_matrix()
    covered = 0.0
    for ket in plan.bob_states:
        amp = m @ ket.vec.conj()
        covered += float(np.real(np.vdot(amp, amp)))
    return max(0.0, 1.0 - covered)


def steer(
    psi: Purification, plan: SteeringPlan, rng: np.random.Generator
) -> SteeredOutcome:
    """Sample one steering measurement on Bob and read off Alice's state.

    Raises :class:`ResidualOutcome` in the (probability ≤ tol) event that the
    complement projector fires.
    """
    result: MeasurementResult = measure_subsystem(
        psi.joint, [psi.dim_alice, psi.dim_bob], [1], plan.observable, rng
    )
    if result.label == RESIDUAL_LABEL:
        raise ResidualOutcome("steering measurement landed in the residual complement")
    mu = int(result.label)
    weight, target_state = plan.outcome_map[mu]
    collapsed = result.post_state.vec.reshape(psi.dim_alice, psi.dim_bob)
    alice = collapsed @ plan.bob_states[mu].vec.conj()
    alice = alice / np.linalg.norm(alice)
    return SteeredOutcome(mu, result.probability, target_state, StateVector(alice))


@dataclass(frozen=True)
class OutcomeRow:
    label: int
    probability: float
    fidelity: float


@dataclass(frozen=True)
class CandidateReport:
    valid: bool
    error: str | None
    outcome_table: tuple
    residual_probability: float | None

    def to_json(self) -> dict:
        return {
            "valid": self.valid,
            "error": self.error,
            "outcome_table": [
                {"label": r.label, "probability": r.probability, "fidelity": r.fidelity}
                for r in self.outcome_table
            ],
            "residual_probability": self.residual_probability,
        }


@dataclass(frozen=True)
class CertificationReport:
    candidates: tuple
    dim_bob: int | None
    purified_from: int | None

    @property
    def all_valid(self) -> bool:
        return all(c.valid for c in self.candidates)

    def to_json(self) -> dict:
        return {
            "dim_bob": self.dim_bob,
            "purified_from": self.purified_from,
            "all_valid": self.all_valid,
            "candidates": [c.to_json() for c in self.candidates],
        }


def certify(
    w: DensityMatrix, candidates: list, tol: float = DEFAULT_TOL
) -> CertificationReport:
    """Check each candidate ensemble against W and steer every valid one.

    One purification is built from the largest valid candidate; for every
    valid candidate a steering plan on that same purification is constructed
    and evaluated analytically: each outcome row reports the Born probability
    of the announcement and the fidelity |⟨φ_μ|alice conditional⟩|.
    """
    validity: list[str | None] = []
    for cand in candidates:
        try:
            ok = validate_ensemble(cand, w, tol=tol)
        except DimensionMismatch as exc:
            validity.append(str(exc))
            continue
        validity.append(None if ok else "candidate does not average to the density matrix")

    valid_indices = [i for i, err in enumerate(validity) if err is None]
    if not valid_indices:
        reports = tuple(
            CandidateReport(False, err, (), None) for err in validity
        )
        return CertificationReport(reports, None, None)

    ref_index = max(valid_indices, key=lambda i: len(candidates[i]))
    dim_bob = len(candidates[ref_index])
    psi = purify_from_ensemble(candidates[ref_index], dim_bob)

    reports = []
    for cand, err in zip(candidates, validity):
        if err is not None:
            reports.append(CandidateReport(False, err, (), None))
            continue
        try:
            plan = steering_observable(psi, cand, tol=tol)
        except (NotADecomposition, BobTooSmall) as exc:
            reports.append(CandidateReport(False, str(exc), (), None))
            continue
        m = psi.as_matrix()
        rows = []
        for mu, (weight, target) in sorted(plan.outcome_map.items()):
            amp = m @ plan.bob_states[mu].vec.conj()
            prob = float(np.real(np.vdot(amp, amp)))
            fid = float(abs(np.vdot(target.vec, amp)) / np.sqrt(prob)) if prob > RANK_EPS else 0.0
            rows.append(OutcomeRow(mu, prob, fid))
        reports.append(
            CandidateReport(True, None, tuple(rows), _residual_probability(psi, plan))
        )
    return CertificationReport(tuple(reports), dim_bob, ref_index)
