"""Command-line interface.

Four subcommands::

    steerlab verify        # run the analytic identity suite
    steerlab ghjw          # certify ensembles against one density matrix
    steerlab photon-trick  # simulate the two-photon steering demonstration
    steerlab fable         # simulate one four-spin story configuration

Every command prints human-readable PASS/FAIL lines and emits a JSON report
(deterministic: sorted keys, fixed indentation).  The report goes to the file
named by ``--out`` when given, otherwise to stdout.  Identical flags and seed
produce byte-identical report files.

Exit codes: 0 — all checks passed; 1 — a claim, identity, or candidate check
failed; 2 — usage or configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__, ghjw, states
from .backend import active_backend
from .errors import ParseError, SteerlabError
from .identities import run_identity_suite
from .linalg import DEFAULT_TOL
from .protocols import (
    FableConfig,
    PhotonTrickConfig,
    run_fable,
    run_photon_trick,
)

__all__ = ["main", "build_parser"]

_DEFAULT_SWEEP = 100


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="steerlab",
        description="Ensemble steering laboratory: analytic identities, "
        "steering certification, and two simulated protocols.",
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_out(p: argparse.ArgumentParser) -> None:
        p.add_argument(
            "--out",
            metavar="PATH",
            default=None,
            help="write the JSON report here (default: stdout)",
        )

    p_verify = sub.add_parser(
        "verify", help="run the analytic identity suite and report residuals"
    )
    p_verify.add_argument(
        "--tol",
        type=float,
        default=DEFAULT_TOL,
        help="residual tolerance for every identity (default: %(default)g)",
    )
    p_verify.add_argument(
        "--seed",
        type=int,
        default=0,
        help="seed for the random-unitary sweep (default: %(default)s)",
    )
    add_out(p_verify)
    p_verify.set_defaults(func=cmd_verify)

    p_ghjw = sub.add_parser(
        "ghjw",
        help="certify candidate ensembles against a density matrix and "
        "steer each valid one from a common purification",
    )
    p_ghjw.add_argument(
        "--config",
        metavar="PATH",
        required=True,
        help="JSON file with a 'density' matrix (or 'from_first_ensemble': "
        "true) and a list of candidate 'ensembles'",
    )
    p_ghjw.add_argument(
        "--tol",
        type=float,
        default=DEFAULT_TOL,
        help="tolerance for the certification checks (default: %(default)g)",
    )
    add_out(p_ghjw)
    p_ghjw.set_defaults(func=cmd_ghjw)

    p_photon = sub.add_parser(
        "photon-trick", help="simulate the two-photon remote-steering protocol"
    )
    p_photon.add_argument(
        "--p",
        type=float,
        default=0.7,
        help="weight of the first pointer component (default: %(default)s)",
    )
    p_photon.add_argument(
        "--basis",
        choices=("hv", "diagonal"),
        default="hv",
        help="which basis Alice measures (default: %(default)s)",
    )
    p_photon.add_argument(
        "--ordering",
        choices=("bob-first", "alice-first"),
        default="bob-first",
        help="who measures first (default: %(default)s)",
    )
    _add_sim_flags(p_photon)
    p_photon.set_defaults(func=cmd_photon_trick)

    p_fable = sub.add_parser(
        "fable", help="simulate one configuration of the four-spin story"
    )
    p_fable.add_argument(
        "--prep",
        choices=("quartet", "direct1", "direct2"),
        default="quartet",
        help="state preparation (default: %(default)s)",
    )
    p_fable.add_argument(
        "--strategy",
        choices=("case1", "case2"),
        default="case1",
        help="Carol's measurement strategy (default: %(default)s)",
    )
    p_fable.add_argument(
        "--ordering",
        choices=("first", "last"),
        default="first",
        help="whether Carol measures before or after Alice and Bob "
        "(default: %(default)s)",
    )
    _add_sim_flags(p_fable)
    p_fable.set_defaults(func=cmd_fable)
    return parser


def _add_sim_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--pairs",
        type=int,
        default=100000,
        help="number of simulated pairs (default: %(default)s)",
    )
    p.add_argument(
        "--seed",
        type=int,
        default=0,
        help="random seed; fixes the full transcript (default: %(default)s)",
    )
    p.add_argument(
        "--stat-tol",
        type=float,
        default=0.01,
        help="absolute tolerance for statistical claims (default: %(default)s)",
    )
    p.add_argument(
        "--format",
        choices=("json", "csv"),
        default="json",
        help="what --out receives: the JSON report or the CSV transcript "
        "(default: %(default)s)",
    )
    p.add_argument(
        "--transcript",
        metavar="PATH",
        default=None,
        help="additionally write the per-pair CSV transcript here",
    )
    p.add_argument(
        "--out",
        metavar="PATH",
        default=None,
        help="write the selected output here (default: stdout)",
    )


def _emit(text: str, out: str | None, stdout) -> None:
    if out is None:
        stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _emit_json(doc: dict, out: str | None, stdout) -> None:
    _emit(json.dumps(doc, indent=2, sort_keys=True) + "\n", out, stdout)


def _status(passed: bool) -> str:
    return "PASS" if passed else "FAIL"


def cmd_verify(args: argparse.Namespace, stdout) -> int:
    results = run_identity_suite(tol=args.tol, seed=args.seed, sweep=_DEFAULT_SWEEP)
    for r in results:
        stdout.write(
            f"{_status(r.passed)} {r.name}: max residual {r.max_residual:.3e} "
            f"over {r.cases} case(s) (tol {r.tol:g})\n"
        )
    passed = all(r.passed for r in results)
    n_pass = sum(r.passed for r in results)
    stdout.write(f"verify: {_status(passed)} ({n_pass}/{len(results)} identities)\n")
    doc = {
        "command": "verify",
        "version": __version__,
        "config": {"tol": args.tol, "seed": args.seed, "sweep": _DEFAULT_SWEEP},
        "passed": passed,
        "identities": [r.to_json() for r in results],
    }
    _emit_json(doc, args.out, stdout)
    return 0 if passed else 1


def _load_ghjw_config(path: str) -> dict:
    try:
        raw = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read config {path!r}: {exc}") from exc
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ParseError(f"config {path!r} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ParseError("config: expected a JSON object at the top level")
    ensembles = doc.get("ensembles")
    if not isinstance(ensembles, list) or not ensembles:
        raise ParseError("config.ensembles: expected a non-empty list")
    has_density = "density" in doc
    from_first = bool(doc.get("from_first_ensemble", False))
    if has_density == from_first:
        raise ParseError(
            "config: provide exactly one of 'density' or "
            "'from_first_ensemble': true"
        )
    return doc


def cmd_ghjw(args: argparse.Namespace, stdout) -> int:
    doc = _load_ghjw_config(args.config)

    entries: list = []
    for i, payload in enumerate(doc["ensembles"]):
        try:
            entries.append(states.ensemble_from_json(payload, where=f"ensembles[{i}]"))
        except ParseError:
            raise
        except SteerlabError as exc:
            entries.append(exc)

    if "density" in doc:
        mat = states.matrix_from_json(doc["density"], where="density")
        try:
            w = states.DensityMatrix(mat)
        except SteerlabError as exc:
            raise ParseError(f"config.density: {exc}") from exc
    else:
        first = entries[0]
        if not isinstance(first, states.Ensemble):
            raise ParseError(f"config.ensembles[0] (reference): {first}")
        w = states.ensemble_density(first)

    built = [e for e in entries if isinstance(e, states.Ensemble)]
    built_report = ghjw.certify(w, built, tol=args.tol)

    candidates = []
    it = iter(built_report.candidates)
    purified_from = None
    for entry in entries:
        if isinstance(entry, states.Ensemble):
            candidates.append(next(it).to_json())
        else:
            candidates.append(
                {
                    "valid": False,
                    "error": str(entry),
                    "outcome_table": [],
                    "residual_probability": None,
                }
            )
    if built_report.purified_from is not None:
        built_positions = [
            i for i, e in enumerate(entries) if isinstance(e, states.Ensemble)
        ]
        purified_from = built_positions[built_report.purified_from]

    all_valid = all(c["valid"] for c in candidates)
    for i, cand in enumerate(candidates):
        if cand["valid"]:
            worst = max(
                (abs(1.0 - row["fidelity"]) for row in cand["outcome_table"]),
                default=0.0,
            )
            stdout.write(
                f"PASS candidate {i}: {len(cand['outcome_table'])} outcome(s), "
                f"max fidelity error {worst:.3e}\n"
            )
        else:
            stdout.write(f"FAIL candidate {i}: {cand['error']}\n")
    stdout.write(
        f"ghjw: {_status(all_valid)} "
        f"({sum(c['valid'] for c in candidates)}/{len(candidates)} candidates)\n"
    )

    report = {
        "command": "ghjw",
        "version": __version__,
        "config": {"config_path": args.config, "tol": args.tol},
        "dim_bob": built_report.dim_bob,
        "purified_from": purified_from,
        "all_valid": all_valid,
        "candidates": candidates,
    }
    _emit_json(report, args.out, stdout)
    return 0 if all_valid else 1


def _finish_protocol(
    args: argparse.Namespace, transcript, report, stdout
) -> int:
    for claim in report.claims:
        expected = "" if claim.expected is None else f" expected {claim.expected:g}"
        observed = (
            "none" if claim.observed is None else f"{claim.observed:.6f}"
        )
        stdout.write(
            f"{_status(claim.passed)} {claim.name}: observed {observed}"
            f"{expected} (tol {claim.tolerance:g})\n"
        )
    stdout.write(
        f"{args.command}: {_status(report.passed)} "
        f"({sum(c.passed for c in report.claims)}/{len(report.claims)} claims)\n"
    )
    if args.transcript is not None:
        transcript.write_csv(args.transcript)
    doc = {
        "command": args.command,
        "version": __version__,
        "backend": active_backend(),
        **report.to_json(),
    }
    if args.format == "csv":
        _emit(transcript.csv_text(), args.out, stdout)
    else:
        _emit_json(doc, args.out, stdout)
    return 0 if report.passed else 1


def cmd_photon_trick(args: argparse.Namespace, stdout) -> int:
    config = PhotonTrickConfig(
        p=args.p,
        basis=args.basis,
        ordering=args.ordering,
        n_pairs=args.pairs,
        seed=args.seed,
        stat_tol=args.stat_tol,
    )
    transcript, report = run_photon_trick(config)
    return _finish_protocol(args, transcript, report, stdout)


def cmd_fable(args: argparse.Namespace, stdout) -> int:
    config = FableConfig(
        preparation=args.prep,
        strategy=args.strategy,
        ordering=args.ordering,
        n_pairs=args.pairs,
        seed=args.seed,
        stat_tol=args.stat_tol,
    )
    transcript, report = run_fable(config)
    return _finish_protocol(args, transcript, report, stdout)


def main(argv: list | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args, sys.stdout)
    except ParseError as exc:
        print(f"steerlab {args.command}: config error: {exc}", file=sys.stderr)
        return 2
    except SteerlabError as exc:
        print(f"steerlab {args.command}: invalid configuration: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"steerlab {args.command}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
