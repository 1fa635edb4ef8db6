"""Analytic identity suite: the algebraic facts the rest of the package
leans on, each checked numerically to a caller-chosen tolerance.

Functions here deliberately reach through the :mod:`steerlab.states` module
object (``states.tilted_right`` etc.) so a perturbed build — any constant
nudged — shows up as a residual, which makes the suite a cheap end-to-end
sanity check of the installed package.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import protocols, states
from .linalg import DEFAULT_TOL, random_unitary, tensor

__all__ = ["IdentityResult", "run_identity_suite", "IDENTITY_NAMES"]

_P_GRID = tuple(np.linspace(0.1, 0.9, 17).tolist())

IDENTITY_NAMES = (
    "density-two-decompositions",
    "pair-state-two-expansions",
    "quartet-z-pairing",
    "quartet-bell-pairing",
    "quartet-rotational-invariance",
)


@dataclass(frozen=True)
class IdentityResult:
    name: str
    cases: int
    max_residual: float
    tol: float
    passed: bool

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "cases": self.cases,
            "max_residual": self.max_residual,
            "tol": self.tol,
            "passed": self.passed,
        }


def _density_two_decompositions() -> tuple:
    """diag(p, 1−p) is the average of {H, V} weighted (p, 1−p) and equally of
    the tilted pair {R, L} — two ensembles, one density matrix."""
    worst = 0.0
    for p in _P_GRID:
        e_hv = states.Ensemble.from_pairs(
            [(p, states.ket_h()), (1.0 - p, states.ket_v())]
        )
        e_rl = states.Ensemble.from_pairs(
            [(0.5, states.tilted_right(p)), (0.5, states.tilted_left(p))]
        )
        diff = states.ensemble_density(e_hv).mat - states.ensemble_density(e_rl).mat
        worst = max(worst, float(np.linalg.norm(diff)))
    return len(_P_GRID), worst


def _pair_state_two_expansions() -> tuple:
    """√p|HH⟩ + √(1−p)|VV⟩ equals (|R,D⟩ + |L,D̄⟩)/√2 — the same pair state
    written for the pointer basis and for the diagonal basis."""
    worst = 0.0
    for p in _P_GRID:
        direct = np.sqrt(p) * tensor(states.ket_h().vec, states.ket_h().vec) + np.sqrt(
            1.0 - p
        ) * tensor(states.ket_v().vec, states.ket_v().vec)
        steered = (
            tensor(states.tilted_right(p).vec, states.ket_d().vec)
            + tensor(states.tilted_left(p).vec, states.ket_dbar().vec)
        ) / np.sqrt(2.0)
        worst = max(worst, float(np.linalg.norm(direct - steered)))
    return len(_P_GRID), worst


def _embed_controls_outputs(controls: np.ndarray, outputs: np.ndarray) -> np.ndarray:
    """Lift f ⊗ g from the (controls, outputs) grouping to the interleaved
    register order (control1, out_a, control2, out_b)."""
    return (
        np.kron(controls, outputs).reshape(2, 2, 2, 2).transpose(0, 2, 1, 3).reshape(16)
    )


def _quartet_z_pairing() -> tuple:
    """The quartet re-expanded over definite-z control states: outcomes
    (↑↑, ↑↓, ↓↑, ↓↓) on the controls pair with the flipped products on the
    outputs, signs (+, −, −, +), all weighted 1/2."""
    up = states.ket_h().vec
    down = states.ket_v().vec
    rhs = 0.5 * (
        _embed_controls_outputs(np.kron(up, up), np.kron(down, down))
        - _embed_controls_outputs(np.kron(up, down), np.kron(down, up))
        - _embed_controls_outputs(np.kron(down, up), np.kron(up, down))
        + _embed_controls_outputs(np.kron(down, down), np.kron(up, up))
    )
    residual = float(np.linalg.norm(protocols.prepare_quartet().vec - rhs))
    return 1, residual


def _quartet_bell_pairing() -> tuple:
    """The quartet re-expanded over total-spin control states: t± pair with
    t∓, t0 with −t0, and the singlet with itself, all weighted 1/2."""
    s = states.singlet().vec
    tp = states.triplet_plus().vec
    tm = states.triplet_minus().vec
    t0 = states.triplet_zero().vec
    rhs = 0.5 * (
        _embed_controls_outputs(tp, tm)
        + _embed_controls_outputs(tm, tp)
        - _embed_controls_outputs(t0, t0)
        + _embed_controls_outputs(s, s)
    )
    residual = float(np.linalg.norm(protocols.prepare_quartet().vec - rhs))
    return 1, residual


def _quartet_rotational_invariance(seed: int, sweep: int) -> tuple:
    """The quartet is invariant (up to phase) under u⊗u⊗u⊗u for any 2x2
    unitary u: checked for the z↔x basis change and a seeded random sweep."""
    hadamard = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2.0)
    worst = protocols.rotational_invariance_check(hadamard)
    rng = np.random.default_rng(seed)
    for _ in range(sweep):
        worst = max(worst, protocols.rotational_invariance_check(random_unitary(2, rng)))
    return sweep + 1, worst


def run_identity_suite(
    tol: float = DEFAULT_TOL, seed: int = 0, sweep: int = 100
) -> tuple:
    """Run every identity; returns a tuple of :class:`IdentityResult`."""
    rows = []
    for name, (cases, worst) in (
        (IDENTITY_NAMES[0], _density_two_decompositions()),
        (IDENTITY_NAMES[1], _pair_state_two_expansions()),
        (IDENTITY_NAMES[2], _quartet_z_pairing()),
        (IDENTITY_NAMES[3], _quartet_bell_pairing()),
        (IDENTITY_NAMES[4], _quartet_rotational_invariance(seed, sweep)),
    ):
        rows.append(IdentityResult(name, cases, worst, tol, worst <= tol))
    return tuple(rows)
