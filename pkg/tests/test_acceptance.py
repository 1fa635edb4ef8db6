"""Acceptance gate: eight executable criteria with pinned tolerances.

Each criterion prints one ``ACCEPTANCE <name>: PASS/FAIL`` line directly to
the terminal (bypassing pytest capture), then asserts.  Run::

    pytest tests/test_acceptance.py -v
"""

import time

import numpy as np
import pytest

from helpers import random_steering_instance
from steerlab import ghjw
from steerlab.cli import main
from steerlab.identities import run_identity_suite
from steerlab.linalg import hermitian_eig, random_unitary
from steerlab.protocols import (
    FableConfig,
    PhotonTrickConfig,
    rotational_invariance_check,
    run_fable,
    run_photon_trick,
)

N = 100_000


def announce(capsys, name, ok, detail=""):
    suffix = f"  [{detail}]" if detail else ""
    with capsys.disabled():
        print(f"\nACCEPTANCE {name}: {'PASS' if ok else 'FAIL'}{suffix}")


@pytest.fixture(scope="module", autouse=True)
def warm_kernels():
    """Compile the jitted kernels up front so criterion timings measure the
    simulation, not compilation."""
    for prep, strategy in (("quartet", "case1"), ("direct1", "case1"), ("direct2", "case2")):
        run_fable(
            FableConfig(
                preparation=prep, strategy=strategy, ordering="first",
                n_pairs=8, seed=0, stat_tol=0.9,
            )
        )


def test_criterion_1_identity_suite(capsys):
    t0 = time.perf_counter()
    results = run_identity_suite(tol=1e-9)
    elapsed = time.perf_counter() - t0
    worst = max(r.max_residual for r in results)
    ok = all(r.passed for r in results) and elapsed < 1.0
    announce(
        capsys, "identity-suite", ok,
        f"max residual {worst:.2e}, {elapsed:.2f}s",
    )
    assert all(r.passed for r in results)
    assert worst <= 1e-9
    assert elapsed < 1.0


def test_criterion_2_ghjw_exactness(capsys):
    rng = np.random.default_rng(2024)
    worst_relation = worst_unitarity = worst_prob = worst_overlap = 0.0
    seen_rank_deficient = seen_degenerate = 0
    t0 = time.perf_counter()
    for _ in range(200):
        inst = random_steering_instance(rng)
        if inst["rank"] < inst["dim_alice"]:
            seen_rank_deficient += 1
        values = hermitian_eig(inst["w"].mat).eigenvalues
        if np.any(np.abs(np.diff(values)) < 1e-12):
            seen_degenerate += 1
        e1, e2 = inst["ensembles"]
        psi1 = ghjw.purify_from_ensemble(e1, inst["dim_bob"])
        psi2 = ghjw.purify_from_ensemble(e2, inst["dim_bob"])
        u = ghjw.relating_unitary(psi1, psi2)
        eye = np.eye(inst["dim_bob"])
        worst_unitarity = max(
            worst_unitarity, float(np.linalg.norm(u @ u.conj().T - eye))
        )
        moved = ghjw.apply_bob_unitary(psi2, u)
        worst_relation = max(
            worst_relation,
            float(np.linalg.norm(psi1.as_matrix() - moved.as_matrix())),
        )
        m = psi1.as_matrix()
        for target in (e1, e2):
            plan = ghjw.steering_observable(psi1, target)
            for mu, (weight, state) in enumerate(target.pairs()):
                amp = m @ plan.bob_states[mu].vec.conj()
                prob = float(np.vdot(amp, amp).real)
                worst_prob = max(worst_prob, abs(prob - weight))
                overlap = float(abs(np.vdot(state.vec, amp)) / np.sqrt(prob))
                worst_overlap = max(worst_overlap, 1.0 - overlap)
    elapsed = time.perf_counter() - t0
    ok = (
        worst_relation <= 1e-8
        and worst_unitarity <= 1e-9
        and worst_prob <= 1e-9
        and worst_overlap <= 1e-9
        and elapsed < 10.0
    )
    announce(
        capsys, "ghjw-exactness", ok,
        f"relation {worst_relation:.2e}, unitarity {worst_unitarity:.2e}, "
        f"prob {worst_prob:.2e}, overlap defect {worst_overlap:.2e}, "
        f"{elapsed:.2f}s",
    )
    assert seen_rank_deficient > 0 and seen_degenerate > 0
    assert worst_relation <= 1e-8
    assert worst_unitarity <= 1e-9
    assert worst_prob <= 1e-9
    assert worst_overlap <= 1e-9
    assert elapsed < 10.0


def test_criterion_3_photon_trick(capsys):
    ok = True
    details = []
    for basis in ("hv", "diagonal"):
        for ordering in ("bob-first", "alice-first"):
            t0 = time.perf_counter()
            _, report = run_photon_trick(
                PhotonTrickConfig(
                    p=0.7, basis=basis, ordering=ordering, n_pairs=N, seed=0
                )
            )
            elapsed = time.perf_counter() - t0
            ok &= report.match_rate == 1.0 and elapsed < 5.0
            if basis == "hv":
                freq = report.alice_frequencies["H"]
                ok &= 0.69 <= freq <= 0.71
            else:
                freq = report.alice_frequencies["D"]
                ok &= 0.49 <= freq <= 0.51
            details.append(f"{basis}/{ordering}: match {report.match_rate}, freq {freq:.4f}")
    announce(capsys, "photon-trick", ok, "; ".join(details))
    assert ok


def test_criterion_4_fable_fractions(capsys):
    timings = {}

    def timed(config):
        t0 = time.perf_counter()
        _, report = run_fable(config)
        timings[
            f"{config.preparation}/{config.strategy}/{config.ordering}"
        ] = time.perf_counter() - t0
        return report

    case1 = timed(FableConfig(n_pairs=N, seed=0))
    case2_last = timed(
        FableConfig(strategy="case2", ordering="last", n_pairs=N, seed=0)
    )
    case2_first = timed(
        FableConfig(strategy="case2", ordering="first", n_pairs=N, seed=0)
    )
    ok = (
        0.323 <= case1.zz_fraction <= 0.343
        and 0.24 <= case2_last.flagged_fraction <= 0.26
        and 0.74 <= case2_last.carol_triplet_rejection_fraction <= 0.76
        and 0.24 <= case2_first.flagged_fraction <= 0.26
        and all(t < 10.0 for t in timings.values())
    )
    announce(
        capsys, "fable-fractions", ok,
        f"zz {case1.zz_fraction:.4f}, flag(last) {case2_last.flagged_fraction:.4f}, "
        f"reject {case2_last.carol_triplet_rejection_fraction:.4f}, "
        f"flag(first) {case2_first.flagged_fraction:.4f}, "
        f"max {max(timings.values()):.2f}s/config",
    )
    assert 0.323 <= case1.zz_fraction <= 0.343
    assert 0.24 <= case2_last.flagged_fraction <= 0.26
    assert 0.74 <= case2_last.carol_triplet_rejection_fraction <= 0.76
    assert 0.24 <= case2_first.flagged_fraction <= 0.26
    assert all(t < 10.0 for t in timings.values())


def test_criterion_5_exact_identification(capsys):
    rates = {}
    for ordering in ("first", "last"):
        _, rep1 = run_fable(
            FableConfig(strategy="case1", ordering=ordering, n_pairs=20000, seed=3)
        )
        rates[f"case1/{ordering}"] = rep1.zz_prediction_match_rate
        _, rep2 = run_fable(
            FableConfig(strategy="case2", ordering=ordering, n_pairs=20000, seed=3)
        )
        rates[f"case2/{ordering}"] = rep2.flagged_anticorrelation_rate
    ok = all(rate == 1.0 for rate in rates.values())
    announce(
        capsys, "exact-identification", ok,
        ", ".join(f"{k}={v}" for k, v in rates.items()),
    )
    assert all(rate == 1.0 for rate in rates.values()), rates


def test_criterion_6_indistinguishability(capsys):
    def histogram(config):
        _, report = run_fable(config)
        return report.joint_outcome_histogram

    worst_cell = 0.0
    preps = {
        "quartet": FableConfig(n_pairs=N, seed=0),
        "direct1": FableConfig(preparation="direct1", n_pairs=N, seed=0),
        "direct2": FableConfig(
            preparation="direct2", strategy="case2", n_pairs=N, seed=0
        ),
    }
    hists = {}
    for name, config in preps.items():
        hists[name] = histogram(config)
        for cells in hists[name].values():
            worst_cell = max(worst_cell, max(abs(c - 0.25) for c in cells))

    first = histogram(FableConfig(strategy="case2", ordering="first", n_pairs=N, seed=0))
    last = histogram(FableConfig(strategy="case2", ordering="last", n_pairs=N, seed=0))
    distance = max(
        abs(a - b)
        for axis in first
        for a, b in zip(first[axis], last[axis])
    )
    ok = worst_cell <= 0.01 and distance <= 0.01
    announce(
        capsys, "indistinguishability", ok,
        f"worst cell deviation {worst_cell:.4f}, first/last distance {distance:.4f}",
    )
    assert worst_cell <= 0.01
    assert distance <= 0.01


def test_criterion_7_rotational_invariance(capsys):
    rng = np.random.default_rng(0)
    worst = max(
        rotational_invariance_check(random_unitary(2, rng)) for _ in range(100)
    )
    ok = worst <= 1e-8
    announce(capsys, "rotational-invariance", ok, f"max residual {worst:.2e}")
    assert worst <= 1e-8


def test_criterion_8_determinism(capsys, tmp_path):
    tilted = tmp_path / "tilted.json"
    import shutil
    from importlib import resources

    shutil.copy(
        str(resources.files("steerlab") / "data" / "tilted_ensembles.json"), tilted
    )
    commands = {
        "verify": ["verify"],
        "ghjw": ["ghjw", "--config", str(tilted)],
        "photon-trick": ["photon-trick", "--pairs", "2000", "--seed", "5"],
        "fable": [
            "fable", "--strategy", "case2", "--ordering", "last",
            "--pairs", "2000", "--seed", "5", "--stat-tol", "0.05",
        ],
    }
    ok = True
    for name, argv in commands.items():
        blobs = []
        for attempt in ("a", "b"):
            out = tmp_path / f"{name}-{attempt}.json"
            extra = (
                ["--transcript", str(tmp_path / f"{name}-{attempt}.csv")]
                if name in ("photon-trick", "fable")
                else []
            )
            main(argv + ["--out", str(out)] + extra)
            blob = out.read_bytes()
            if extra:
                blob += (tmp_path / f"{name}-{attempt}.csv").read_bytes()
            blobs.append(blob)
        ok &= blobs[0] == blobs[1]
    capsys.readouterr()  # swallow the commands' own PASS lines
    announce(capsys, "determinism", ok, "verify, ghjw, photon-trick, fable")
    assert ok
