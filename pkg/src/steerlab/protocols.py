"""Event-by-event simulations of two remote-steering protocols.

**Photon trick.**  A source emits polarization pairs √p|HH⟩ + √(1−p)|VV⟩.
Bob measures his photon either in the pointer basis {H, V} or in the diagonal
basis {D, D̄}; each outcome steers Alice's photon into a definite state (H/V
in the first case, the tilted pair R/L in the second), which Bob announces as
a prediction.  Alice independently measures her photon in the matching basis
family;
her outcome frequencies cannot reveal which basis Bob chose — only his
per-event predictions are certifiably correct.

**Fable.**  Carol hands Alice and Bob a stream of spin-1/2 pairs and claims
she knows each pair's joint state.  Alice and Bob test her by measuring both
spins along a shared axis drawn uniformly from {x, y, z} per pair.  Carol
either prepares pairs directly (product z states in strategy "case1", total
spin eigenstates in "case2") or keeps two entangled control spins per pair —
the four-qubit quartet of two singlets — and measures the controls before or
after Alice and Bob act.  Strategy case1 predicts definite z outcomes
(verified on the z-axis subsample); case2 flags singlet pairs, which must
anticorrelate along every axis.

Randomness: all draws for a run come from one counter-based Philox stream
keyed on the seed, materialized as an (n_pairs × n_slots) uniform matrix —
row i is pair i's private substream, so transcripts are reproducible and
independent of how pairs are batched.  Slot meanings are fixed per protocol
(fable: 0 axis, 1 preparation, 2–3 Carol, 4 Alice, 5 Bob; photon trick:
0 first mover, 1 second mover).
"""

from __future__ import annotations

import csv
import io
from dataclasses import asdict, dataclass

import numpy as np

from .backend import get_kernels
from .errors import ConfigConflict, DomainError, NotUnitary
from .linalg import DEFAULT_TOL, is_unitary, tensor
from .states import (
    StateVector,
    basis_ket,
    equal_up_to_phase,
    ket_d,
    ket_dbar,
    ket_h,
    ket_v,
    singlet,
    spin_basis,
    tilted_left,
    tilted_right,
    triplet_minus,
    triplet_plus,
    triplet_zero,
)

__all__ = [
    "AXES",
    "PAIR_STATE_LABELS",
    "PRODUCT_LABELS",
    "PhotonTrickConfig",
    "PhotonRecord",
    "PhotonReport",
    "FableConfig",
    "RunRecord",
    "Transcript",
    "ClaimRow",
    "ClaimReport",
    "prepare_quartet",
    "prepare_case_i",
    "prepare_case_ii",
    "carol_case_i_predictions",
    "run_photon_trick",
    "run_fable",
    "verify_claims",
    "rotational_invariance_check",
]

AXES = ("x", "y", "z")

#: Two-qubit total-spin eigenstates, in kernel outcome order.
PAIR_STATE_LABELS = ("singlet", "triplet_plus", "triplet_minus", "triplet_zero")

#: Definite-z product states, in kernel preparation order (Alice spin first).
PRODUCT_LABELS = ("up_up", "up_down", "down_up", "down_down")

FABLE_SCHEMA = "fable-v1"
PHOTON_SCHEMA = "photon-trick-v1"

FABLE_COLUMNS = (
    "pair_id",
    "axis",
    "alice",
    "bob",
    "carol_c1",
    "carol_c2",
    "carol_pred_alice",
    "carol_pred_bob",
    "carol_flag",
    "carol_state",
)
PHOTON_COLUMNS = ("pair_id", "bob_outcome", "bob_prediction", "alice_outcome", "match")


def _axis_bases() -> np.ndarray:
    out = np.empty((3, 2, 2), np.complex128)
    for i, ax in enumerate(AXES):
        plus, minus = spin_basis(ax)
        out[i, 0] = plus.vec
        out[i, 1] = minus.vec
    return out


def _bell_rows() -> np.ndarray:
    return np.array(
        [singlet().vec, triplet_plus().vec, triplet_minus().vec, triplet_zero().vec]
    )


def prepare_quartet() -> StateVector:
    """Two independent singlets interleaved as (control1, out_a, control2, out_b):
    control1 pairs with Alice's particle, control2 with Bob's."""
    return StateVector(np.kron(singlet().vec, singlet().vec))


def prepare_case_i(rng: np.random.Generator) -> tuple:
    """Draw one directly prepared case-1 pair: a uniformly random product of
    definite z spins.  Returns ``(label, state)``; the label doubles as
    Carol's exact knowledge of both spins."""
    k = min(int(rng.random() * 4.0), 3)
    return PRODUCT_LABELS[k], basis_ket(4, k)


def prepare_case_ii(rng: np.random.Generator) -> tuple:
    """Draw one directly prepared case-2 pair: a uniformly random total-spin
    eigenstate.  Returns ``(label, state)``."""
    k = min(int(rng.random() * 4.0), 3)
    return PAIR_STATE_LABELS[k], StateVector(_bell_rows()[k])


def carol_case_i_predictions(c1: int, c2: int) -> tuple:
    """Case-1 bookkeeping: each control spin anti-aligns with the output it
    was paired to, so Carol negates her raw readings (±1) to predict Alice's
    and Bob's z outcomes."""
    if c1 not in (-1, 1) or c2 not in (-1, 1):
        raise DomainError(f"control readings must be ±1, got ({c1!r}, {c2!r})")
    return -c1, -c2


def _uniforms(seed: int, n: int, slots: int) -> np.ndarray:
    gen = np.random.Generator(np.random.Philox(seed))
    return gen.random((n, slots))


# ---------------------------------------------------------------------------
# shared report plumbing


@dataclass(frozen=True)
class ClaimRow:
    """One verified claim: |observed − expected| ≤ tolerance (0 means exact)."""

    name: str
    observed: float | None
    expected: float
    tolerance: float
    passed: bool

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "observed": self.observed,
            "expected": self.expected,
            "tolerance": self.tolerance,
            "passed": self.passed,
        }


def _claim(name: str, observed: float | None, expected: float, tolerance: float) -> ClaimRow:
    ok = observed is not None and abs(observed - expected) <= tolerance
    return ClaimRow(name, observed, expected, tolerance, ok)


def _format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return repr(value)
    return str(value)


@dataclass(frozen=True)
class Transcript:
    """Per-pair event log plus the resolved configuration that produced it."""

    schema: str
    config: dict
    columns: tuple
    records: tuple

    def __len__(self) -> int:
        return len(self.records)

    def csv_text(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        for rec in self.records:
            writer.writerow([_format_cell(getattr(rec, col)) for col in self.columns])
        return buf.getvalue()

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write(self.csv_text())


# ---------------------------------------------------------------------------
# photon trick


@dataclass(frozen=True)
class PhotonTrickConfig:
    """Configuration of the photon-pair steering demonstration.

    ``basis`` selects which announcement Bob makes ("hv": H/V, "diagonal":
    R/L via D/D̄) and the matching basis family Alice verifies in;
    ``ordering`` says who measures first on each pair.
    """

    p: float = 0.7
    basis: str = "hv"
    ordering: str = "bob-first"
    n_pairs: int = 100_000
    seed: int = 0
    stat_tol: float = 0.01

    def __post_init__(self):
        if not 0.0 < self.p < 1.0:
            raise DomainError(f"p must lie strictly between 0 and 1, got {self.p!r}")
        if self.basis not in ("hv", "diagonal"):
            raise ConfigConflict(f"basis must be 'hv' or 'diagonal', got {self.basis!r}")
        if self.ordering not in ("bob-first", "alice-first"):
            raise ConfigConflict(
                f"ordering must be 'bob-first' or 'alice-first', got {self.ordering!r}"
            )
        if self.n_pairs < 0:
            raise ConfigConflict(f"n_pairs must be nonnegative, got {self.n_pairs!r}")
        if not 0.0 < self.stat_tol < 1.0:
            raise ConfigConflict(f"stat_tol must lie in (0, 1), got {self.stat_tol!r}")


@dataclass(frozen=True)
class PhotonRecord:
    pair_id: int
    bob_outcome: str
    bob_prediction: str
    alice_outcome: str
    match: bool


@dataclass(frozen=True)
class PhotonReport:
    schema: str
    config: dict
    n_pairs: int
    match_rate: float | None
    alice_frequencies: dict | None
    bob_frequencies: dict | None
    claims: tuple
    passed: bool

    def to_json(self) -> dict:
        return {
            "schema": self.schema,
            "config": self.config,
            "n_pairs": self.n_pairs,
            "match_rate": self.match_rate,
            "alice_frequencies": self.alice_frequencies,
            "bob_frequencies": self.bob_frequencies,
            "claims": [c.to_json() for c in self.claims],
            "passed": self.passed,
        }


def run_photon_trick(config: PhotonTrickConfig) -> tuple:
    """Simulate the photon trick; returns ``(transcript, report)``.

    Each pair is one sequential experiment: the first mover samples their
    marginal, the second samples the conditional given that outcome.  A pair
    "matches" when the state steered by Bob's outcome equals his predicted
    state up to phase — this is checked on the exact conditional state, so it
    holds whichever party measured first.
    """
    p = config.p
    pair = np.zeros((2, 2), dtype=np.complex128)
    pair[0, 0] = np.sqrt(p)
    pair[1, 1] = np.sqrt(1.0 - p)

    if config.basis == "hv":
        bob_kets = (ket_h(), ket_v())
        bob_labels = ("H", "V")
        predictions = ((("H"), ket_h()), (("V"), ket_v()))
        alice_kets = (ket_h(), ket_v())
        alice_labels = ("H", "V")
        expected_first = p
    else:
        bob_kets = (ket_d(), ket_dbar())
        bob_labels = ("D", "Dbar")
        predictions = ((("R"), tilted_right(p)), (("L"), tilted_left(p)))
        alice_kets = (ket_d(), ket_dbar())
        alice_labels = ("D", "Dbar")
        expected_first = 0.5

    # analytic sequential-measurement tables
    p_bob = np.empty(2)
    p_alice_given_bob = np.empty((2, 2))
    match_table = [False, False]
    for k in range(2):
        amp = pair @ bob_kets[k].vec.conj()  # Alice amplitude given Bob outcome k
        p_bob[k] = np.vdot(amp, amp).real
        steered = StateVector(amp / np.linalg.norm(amp))
        match_table[k] = equal_up_to_phase(steered, predictions[k][1])
        for j in range(2):
            p_alice_given_bob[k, j] = abs(np.vdot(alice_kets[j].vec, steered.vec)) ** 2
    p_alice = np.empty(2)
    p_bob_given_alice = np.empty((2, 2))
    for j in range(2):
        amp = alice_kets[j].vec.conj() @ pair  # Bob amplitude given Alice outcome j
        p_alice[j] = np.vdot(amp, amp).real
        cond = amp / np.linalg.norm(amp)
        for k in range(2):
            p_bob_given_alice[j, k] = abs(np.vdot(bob_kets[k].vec, cond)) ** 2

    n = config.n_pairs
    uniforms = _uniforms(config.seed, n, 2)
    if config.ordering == "bob-first":
        kb = (uniforms[:, 0] >= p_bob[0]).astype(np.int8)
        ka = (uniforms[:, 1] >= p_alice_given_bob[kb, 0]).astype(np.int8)
    else:
        ka = (uniforms[:, 0] >= p_alice[0]).astype(np.int8)
        kb = (uniforms[:, 1] >= p_bob_given_alice[ka, 0]).astype(np.int8)

    kb_list = kb.tolist()
    ka_list = ka.tolist()
    records = tuple(
        PhotonRecord(
            i,
            bob_labels[b],
            predictions[b][0],
            alice_labels[a],
            match_table[b],
        )
        for i, (b, a) in enumerate(zip(kb_list, ka_list))
    )
    cfg = asdict(config)
    transcript = Transcript(PHOTON_SCHEMA, cfg, PHOTON_COLUMNS, records)

    if n == 0:
        report = PhotonReport(PHOTON_SCHEMA, cfg, 0, None, None, None, (), True)
        return transcript, report

    matches = sum(1 for r in records if r.match)
    match_rate = matches / n
    alice_freq = {
        lab: sum(1 for a in ka_list if a == j) / n for j, lab in enumerate(alice_labels)
    }
    bob_freq = {
        lab: sum(1 for b in kb_list if b == j) / n for j, lab in enumerate(bob_labels)
    }
    claims = (
        _claim("steering_match_rate", match_rate, 1.0, 0.0),
        _claim(
            f"alice_{alice_labels[0]}_frequency",
            alice_freq[alice_labels[0]],
            expected_first,
            config.stat_tol,
        ),
    )
    report = PhotonReport(
        PHOTON_SCHEMA,
        cfg,
        n,
        match_rate,
        alice_freq,
        bob_freq,
        claims,
        all(c.passed for c in claims),
    )
    return transcript, report


# ---------------------------------------------------------------------------
# fable


@dataclass(frozen=True)
class FableConfig:
    """Configuration of the spin-pair fable.

    ``preparation``: "quartet" (entangled controls), "direct1" or "direct2"
    (Carol prepares the announced mixture directly — these fix the strategy
    and only make sense with Carol acting first, i.e. at the source).
    ``strategy``: "case1" (definite z predictions) or "case2" (singlet flag).
    ``ordering``: Carol measures "first" or "last" relative to Alice and Bob.
    """

    preparation: str = "quartet"
    strategy: str = "case1"
    ordering: str = "first"
    n_pairs: int = 100_000
    seed: int = 0
    stat_tol: float = 0.01

    def __post_init__(self):
        if self.preparation not in ("quartet", "direct1", "direct2"):
            raise ConfigConflict(
                f"preparation must be 'quartet', 'direct1' or 'direct2', got {self.preparation!r}"
            )
        if self.strategy not in ("case1", "case2"):
            raise ConfigConflict(f"strategy must be 'case1' or 'case2', got {self.strategy!r}")
        if self.ordering not in ("first", "last"):
            raise ConfigConflict(f"ordering must be 'first' or 'last', got {self.ordering!r}")
        if self.preparation == "direct1" and self.strategy != "case1":
            raise ConfigConflict("direct1 preparation implements strategy case1 only")
        if self.preparation == "direct2" and self.strategy != "case2":
            raise ConfigConflict("direct2 preparation implements strategy case2 only")
        if self.preparation != "quartet" and self.ordering != "first":
            raise ConfigConflict(
                "direct preparations happen at the source; ordering must be 'first'"
            )
        if self.n_pairs < 0:
            raise ConfigConflict(f"n_pairs must be nonnegative, got {self.n_pairs!r}")
        if not 0.0 < self.stat_tol < 1.0:
            raise ConfigConflict(f"stat_tol must lie in (0, 1), got {self.stat_tol!r}")


@dataclass(frozen=True)
class RunRecord:
    """One fable pair.  Spins are ±1; fields a configuration never populates
    are None.  ``carol_c1/c2`` are Carol's raw control readings; her
    *predictions* are the negated values (case 1) — both are logged."""

    pair_id: int
    axis: str
    alice: int
    bob: int
    carol_c1: int | None
    carol_c2: int | None
    carol_pred_alice: int | None
    carol_pred_bob: int | None
    carol_flag: bool | None
    carol_state: str | None


@dataclass(frozen=True)
class ClaimReport:
    """Aggregates recomputed from a fable transcript, with claim verdicts."""

    schema: str
    config: dict
    n_pairs: int
    axis_counts: dict
    zz_fraction: float | None
    zz_prediction_match_rate: float | None
    flagged_fraction: float | None
    flagged_anticorrelation_rate: float | None
    carol_triplet_rejection_fraction: float | None
    joint_outcome_histogram: dict
    claims: tuple
    passed: bool

    def to_json(self) -> dict:
        return {
            "schema": self.schema,
            "config": self.config,
            "n_pairs": self.n_pairs,
            "axis_counts": self.axis_counts,
            "zz_fraction": self.zz_fraction,
            "zz_prediction_match_rate": self.zz_prediction_match_rate,
            "flagged_fraction": self.flagged_fraction,
            "flagged_anticorrelation_rate": self.flagged_anticorrelation_rate,
            "carol_triplet_rejection_fraction": self.carol_triplet_rejection_fraction,
            "joint_outcome_histogram": self.joint_outcome_histogram,
            "claims": [c.to_json() for c in self.claims],
            "passed": self.passed,
        }


def _spin(index: int) -> int:
    return 1 - 2 * index


def run_fable(config: FableConfig) -> tuple:
    """Simulate one fable configuration; returns ``(transcript, report)``."""
    kern = get_kernels()
    bases = _axis_bases()
    bells = _bell_rows()
    uniforms = _uniforms(config.seed, config.n_pairs, 6)

    records = []
    if config.preparation == "quartet":
        case = 1 if config.strategy == "case1" else 2
        first = config.ordering == "first"
        axis_i, alice_i, bob_i, c1_i, c2_i, bell_i, flag_i = kern.fable_quartet(
            prepare_quartet().vec, bases, bells, bells[0], case, first, uniforms
        )
        it = zip(
            axis_i.tolist(),
            alice_i.tolist(),
            bob_i.tolist(),
            c1_i.tolist(),
            c2_i.tolist(),
            bell_i.tolist(),
            flag_i.tolist(),
        )
        for i, (ax, a, b, c1, c2, bl, fl) in enumerate(it):
            alice, bob = _spin(a), _spin(b)
            if case == 1:
                s1, s2 = _spin(c1), _spin(c2)
                pa, pb = carol_case_i_predictions(s1, s2)
                label = PRODUCT_LABELS[(pa == -1) * 2 + (pb == -1)]
                records.append(
                    RunRecord(i, AXES[ax], alice, bob, s1, s2, pa, pb, None, label)
                )
            elif first:
                label = PAIR_STATE_LABELS[bl]
                records.append(
                    RunRecord(i, AXES[ax], alice, bob, None, None, None, None, fl == 1, label)
                )
            else:
                label = "singlet" if fl == 1 else "triplet"
                records.append(
                    RunRecord(i, AXES[ax], alice, bob, None, None, None, None, fl == 1, label)
                )
    else:
        preps = (
            np.eye(4, dtype=np.complex128) if config.preparation == "direct1" else bells
        )
        axis_i, prep_i, alice_i, bob_i = kern.fable_direct(preps, bases, uniforms)
        it = zip(axis_i.tolist(), prep_i.tolist(), alice_i.tolist(), bob_i.tolist())
        if config.preparation == "direct1":
            for i, (ax, pr, a, b) in enumerate(it):
                pa, pb = _spin(pr >> 1), _spin(pr & 1)
                records.append(
                    RunRecord(
                        i, AXES[ax], _spin(a), _spin(b), None, None, pa, pb, None,
                        PRODUCT_LABELS[pr],
                    )
                )
        else:
            for i, (ax, pr, a, b) in enumerate(it):
                records.append(
                    RunRecord(
                        i, AXES[ax], _spin(a), _spin(b), None, None, None, None,
                        pr == 0, PAIR_STATE_LABELS[pr],
                    )
                )

    transcript = Transcript(FABLE_SCHEMA, asdict(config), FABLE_COLUMNS, tuple(records))
    return transcript, verify_claims(transcript)


def verify_claims(transcript: Transcript, stat_tol: float | None = None) -> ClaimReport:
    """Recompute every aggregate and claim verdict from the records alone.

    Exact claims (tolerance 0): case-1 z-axis predictions match outcomes;
    case-2 flagged pairs anticorrelate.  Statistical claims (``stat_tol``,
    default from the transcript's config): axis balance, per-axis joint
    outcome histograms uniform at 1/4, flagged fraction 1/4, and — for
    quartet case 2 with Carol last — triplet rejection 3/4.
    """
    if stat_tol is None:
        stat_tol = float(transcript.config.get("stat_tol", 0.01))
    records = transcript.records
    n = len(records)
    axis_counts = {ax: 0 for ax in AXES}
    hist_counts = {ax: [0, 0, 0, 0] for ax in AXES}
    n_z = 0
    zz_pred_seen = 0
    zz_pred_match = 0
    n_flagged_field = 0
    n_flagged = 0
    n_flagged_anti = 0
    for r in records:
        axis_counts[r.axis] += 1
        hist_counts[r.axis][(r.alice == -1) * 2 + (r.bob == -1)] += 1
        if r.axis == "z":
            n_z += 1
            if r.carol_pred_alice is not None:
                zz_pred_seen += 1
                if r.carol_pred_alice == r.alice and r.carol_pred_bob == r.bob:
                    zz_pred_match += 1
        if r.carol_flag is not None:
            n_flagged_field += 1
            if r.carol_flag:
                n_flagged += 1
                if r.alice != r.bob:
                    n_flagged_anti += 1

    zz_fraction = n_z / n if n else None
    zz_rate = zz_pred_match / zz_pred_seen if zz_pred_seen else None
    flagged_fraction = n_flagged / n_flagged_field if n_flagged_field else None
    anti_rate = n_flagged_anti / n_flagged if n_flagged else None
    histogram = {
        ax: ([c / axis_counts[ax] for c in hist_counts[ax]] if axis_counts[ax] else None)
        for ax in AXES
    }

    cfg = transcript.config
    rejection = None
    if (
        n_flagged_field
        and cfg.get("strategy") == "case2"
        and cfg.get("ordering") == "last"
    ):
        rejection = (n_flagged_field - n_flagged) / n_flagged_field

    claims = []
    if n:
        axis_dev = max(abs(axis_counts[ax] / n - 1.0 / 3.0) for ax in AXES)
        claims.append(_claim("axis_balance", axis_dev, 0.0, stat_tol))
        claims.append(_claim("zz_fraction", zz_fraction, 1.0 / 3.0, stat_tol))
        hist_dev = max(
            abs(cell - 0.25)
            for ax in AXES
            if histogram[ax] is not None
            for cell in histogram[ax]
        )
        claims.append(_claim("joint_histogram_uniform", hist_dev, 0.0, stat_tol))
        if zz_pred_seen:
            claims.append(_claim("zz_prediction_match_rate", zz_rate, 1.0, 0.0))
        if n_flagged_field:
            claims.append(_claim("flagged_fraction", flagged_fraction, 0.25, stat_tol))
        if n_flagged:
            claims.append(_claim("flagged_anticorrelation_rate", anti_rate, 1.0, 0.0))
        if rejection is not None:
            claims.append(
                _claim("carol_triplet_rejection_fraction", rejection, 0.75, stat_tol)
            )

    return ClaimReport(
        transcript.schema,
        cfg,
        n,
        axis_counts,
        zz_fraction,
        zz_rate,
        flagged_fraction,
        anti_rate,
        rejection,
        histogram,
        tuple(claims),
        all(c.passed for c in claims),
    )


def rotational_invariance_check(u, tol: float = DEFAULT_TOL) -> float:
    """Residual ‖u⊗u⊗u⊗u·Ψ − e^{iφ}Ψ‖ (phase optimized) for the quartet Ψ.

    The quartet is built from two total-spin-zero pairs, so it is invariant
    under any common single-qubit rotation applied to all four spins; the
    returned residual is numerical noise for every unitary u.
    """
    u = np.asarray(u, dtype=np.complex128)
    if u.shape != (2, 2) or not is_unitary(u, tol):
        raise NotUnitary("rotational invariance check needs a 2x2 unitary")
    psi = prepare_quartet().vec
    rotated = tensor(u, u, u, u) @ psi
    ip = np.vdot(psi, rotated)
    phase = ip / abs(ip) if abs(ip) > 0.0 else 1.0
    return float(np.linalg.norm(rotated - phase * psi))
