"""Command-line front end.

Subcommands: decide, synth, verify, witness, and the lv group (equilibrium,
simulate, check-decay, boundedness).  Machine-readable JSON goes to stdout,
human-readable messages to stderr.  Exit codes: 0 stable/valid, 1
unstable/invalid, 2 unknown, 64 usage, 65 unreadable or malformed input,
66 checksum mismatch, 70 internal error.
"""

from __future__ import annotations

import argparse
import json
import sys
import traceback

import numpy as np

from .certificates import verify_certificate
from .errors import (
    InvalidWitness,
    InversionError,
    NotNegativeDefinite,
    PreconditionError,
    StepCollapse,
)
from .formats import (
    FormatError,
    canon_dumps,
    certificate_from_json,
    certificate_to_json,
    decision_to_json,
    load_problem,
    witness_from_json,
    write_trajectory_csv,
)
from .lv import boundedness_experiment, integrate, mutualistic_equilibrium, verify_decay
from .search import SearchOptions, Verdict, decide, search_certificate
from .synthesis import synthesize
from .witnesses import verify_witness, witness_min_diag

EXIT_STABLE = 0
EXIT_UNSTABLE = 1
EXIT_UNKNOWN = 2
EXIT_USAGE = 64
EXIT_DATA = 65
EXIT_CHECKSUM = 66
EXIT_INTERNAL = 70


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors, which collides with the Unknown
    # verdict; route usage problems to 64 instead.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _history_vector(text: str) -> np.ndarray:
    try:
        values = np.array([float(part) for part in text.split(",")], dtype=float)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"history must be comma-separated numbers: {exc}")
    if values.size == 0 or not np.isfinite(values).all() or not (values > 0.0).all():
        raise argparse.ArgumentTypeError("history entries must be finite and strictly positive")
    return values


def _emit(text: str) -> None:
    sys.stdout.write(text)
    sys.stdout.flush()


def _log(message: str) -> None:
    sys.stderr.write(message + "\n")


def _search_options(args) -> SearchOptions:
    return SearchOptions(
        restarts=args.restarts,
        max_iters=args.max_iters,
        cert_margin=args.cert_margin,
        witness_margin=args.witness_margin,
        rng_seed=args.seed,
        step_init=args.step_init,
    )


def _cmd_decide(args) -> int:
    problem = load_problem(args.problem)
    result = decide(problem.A, problem.B, _search_options(args), jobs=args.jobs)
    _emit(decision_to_json(result, problem.checksum))
    if result.verdict is Verdict.STABLE:
        return EXIT_STABLE
    if result.verdict is Verdict.UNSTABLE:
        return EXIT_UNSTABLE
    return EXIT_UNKNOWN


def _cmd_synth(args) -> int:
    problem = load_problem(args.problem)
    try:
        pair = synthesize(problem.A, problem.B)
    except PreconditionError as exc:
        _log(f"synthesis failed: {exc}")
        return EXIT_UNSTABLE
    cert = verify_certificate(problem.A, problem.B, pair)
    text = certificate_to_json(cert, problem.checksum)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    _emit(text)
    return EXIT_STABLE


def _cmd_verify(args) -> int:
    problem = load_problem(args.problem)
    pair, stored_lambda, _stored_beta, checksum = certificate_from_json(args.certificate)
    if checksum != problem.checksum:
        _log("certificate checksum does not match the problem matrices")
        return EXIT_CHECKSUM
    try:
        cert = verify_certificate(problem.A, problem.B, pair, tol=args.tol)
    except NotNegativeDefinite as exc:
        _emit(canon_dumps({"verdict": "invalid", "lambda_max": exc.lambda_max}))
        return EXIT_UNSTABLE
    if abs(cert.lambda_max - stored_lambda) > 1e-8:
        _log("stored lambda_max does not reproduce under re-verification")
        return EXIT_UNSTABLE
    _emit(canon_dumps({"verdict": "valid", "lambda_max": cert.lambda_max, "beta": cert.beta}))
    return EXIT_STABLE


def _cmd_witness(args) -> int:
    problem = load_problem(args.problem)
    witness, _stored_min, checksum = witness_from_json(args.witness)
    if checksum != problem.checksum:
        _log("witness checksum does not match the problem matrices")
        return EXIT_CHECKSUM
    try:
        valid = verify_witness(problem.A, problem.B, witness, tol=args.tol)
    except InvalidWitness as exc:
        _log(f"structurally invalid witness: {exc}")
        return EXIT_UNSTABLE
    min_diag = witness_min_diag(problem.A, problem.B, witness)
    _emit(canon_dumps({"verdict": "valid" if valid else "invalid", "min_diag": min_diag}))
    return EXIT_STABLE if valid else EXIT_UNSTABLE


def _lv_model(args, need_tau: bool = True):
    problem = load_problem(args.problem)
    tau = args.tau if args.tau is not None else problem.tau
    if tau is None:
        if need_tau:
            raise FormatError("missing key 'tau' in problem (pass --tau)")
        tau = 0.0
    return problem, problem.to_model(tau)


def _default_history(args, model):
    if args.history is not None:
        if args.history.size != model.n:
            raise FormatError(f"--history must have {model.n} entries")
        return args.history
    try:
        return mutualistic_equilibrium(model)
    except (PreconditionError, InversionError) as exc:
        raise FormatError(f"no --history given and no default equilibrium: {exc}") from exc


def _cmd_lv_equilibrium(args) -> int:
    _problem, model = _lv_model(args, need_tau=False)
    try:
        xbar = mutualistic_equilibrium(model)
    except (PreconditionError, InversionError) as exc:
        _log(f"no positive equilibrium: {exc}")
        return EXIT_UNSTABLE
    _emit(canon_dumps({"xbar": xbar}))
    return EXIT_STABLE


def _cmd_lv_simulate(args) -> int:
    _problem, model = _lv_model(args)
    h = args.h if args.h is not None else (model.tau / 64.0 if model.tau > 0.0 else 1.0 / 64.0)
    history = _default_history(args, model)
    try:
        trajectory = integrate(model, history, h, args.T)
    except StepCollapse as exc:
        _log(f"integration collapsed at t = {exc.t:.6g}")
        return EXIT_UNSTABLE
    if args.out:
        write_trajectory_csv(args.out, trajectory)
        _log(f"wrote {trajectory.states.shape[0]} rows to {args.out}")
    else:
        n = trajectory.states.shape[1]
        _emit("t," + ",".join(f"x{i + 1}" for i in range(n)) + "\n")
        for t, row in zip(trajectory.times, trajectory.states):
            _emit(format(t, ".17g") + "," + ",".join(format(v, ".17g") for v in row) + "\n")
    return EXIT_STABLE


def _obtain_certificate(args, problem):
    if args.cert:
        pair, _lam, _beta, checksum = certificate_from_json(args.cert)
        if checksum != problem.checksum:
            return None, EXIT_CHECKSUM
        return verify_certificate(problem.A, problem.B, pair), None
    try:
        pair = synthesize(problem.A, problem.B)
        return verify_certificate(problem.A, problem.B, pair), None
    except PreconditionError:
        pass
    pair, _bests = search_certificate(problem.A, problem.B, SearchOptions(rng_seed=args.seed))
    if pair is None:
        _log("no certificate found; cannot check decay")
        return None, EXIT_UNKNOWN
    return verify_certificate(problem.A, problem.B, pair), None


def _cmd_lv_check_decay(args) -> int:
    problem, model = _lv_model(args)
    cert, failure = _obtain_certificate(args, problem)
    if cert is None:
        if failure == EXIT_CHECKSUM:
            _log("certificate checksum does not match the problem matrices")
        return failure
    xbar = mutualistic_equilibrium(model)
    h = args.h if args.h is not None else (model.tau / 64.0 if model.tau > 0.0 else 1.0 / 64.0)
    history = _default_history(args, model)
    trajectory = integrate(model, history, h, args.T)
    report = verify_decay(model, cert, xbar, trajectory)
    _emit(canon_dumps(report.to_dict()))
    return EXIT_STABLE if report.violations == 0 else EXIT_UNSTABLE


def _cmd_lv_boundedness(args) -> int:
    _problem, model = _lv_model(args)
    reference = mutualistic_equilibrium(model)
    rng = np.random.default_rng(args.seed)
    histories = [
        reference * np.exp(rng.uniform(-args.radius, args.radius, size=model.n))
        for _ in range(args.runs)
    ]
    h = args.h if args.h is not None else (model.tau / 64.0 if model.tau > 0.0 else 1.0 / 64.0)
    report = boundedness_experiment(model, reference, histories, args.T, h)
    text = canon_dumps(report.to_dict())
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    _emit(text)
    return EXIT_STABLE if report.r_hat is not None else EXIT_UNSTABLE


def _add_search_flags(parser) -> None:
    parser.add_argument("--restarts", type=int, default=16, help="search restarts per mode")
    parser.add_argument("--max-iters", type=int, default=500, help="iterations per restart")
    parser.add_argument("--cert-margin", type=float, default=1e-7, help="required eigenvalue margin")
    parser.add_argument("--witness-margin", type=float, default=1e-7, help="required witness margin")
    parser.add_argument("--seed", type=int, default=0, help="base RNG seed")
    parser.add_argument("--step-init", type=float, default=0.5, help="initial line-search step")


def _add_lv_flags(parser) -> None:
    parser.add_argument("--tau", type=float, default=None, help="delay (overrides the file)")
    parser.add_argument("--h", type=float, default=None, help="grid step (default tau/64)")
    parser.add_argument("--T", type=float, default=100.0, help="final time")
    parser.add_argument(
        "--history",
        type=_history_vector,
        default=None,
        help="constant history as comma-separated values (default: the equilibrium)",
    )


def build_parser() -> _Parser:
    parser = _Parser(prog="riccert", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    p_decide = sub.add_parser("decide", help="decide stability of a matrix pair")
    p_decide.add_argument("problem", help="problem JSON path")
    _add_search_flags(p_decide)
    p_decide.add_argument("--jobs", type=int, default=1, help="parallel restart workers")
    p_decide.set_defaults(func=_cmd_decide)

    p_synth = sub.add_parser("synth", help="synthesize a certificate for a Metzler pair")
    p_synth.add_argument("problem", help="problem JSON path")
    p_synth.add_argument("--out", default=None, help="write the certificate JSON here")
    p_synth.set_defaults(func=_cmd_synth)

    p_verify = sub.add_parser("verify", help="re-verify a certificate file against a problem")
    p_verify.add_argument("problem", help="problem JSON path")
    p_verify.add_argument("certificate", help="certificate JSON path")
    p_verify.add_argument("--tol", type=float, default=1e-9, help="eigenvalue tolerance")
    p_verify.set_defaults(func=_cmd_verify)

    p_witness = sub.add_parser("witness", help="verify an infeasibility witness file")
    p_witness.add_argument("problem", help="problem JSON path")
    p_witness.add_argument("witness", help="witness JSON path")
    p_witness.add_argument("--tol", type=float, default=1e-9, help="diagonal tolerance")
    p_witness.set_defaults(func=_cmd_witness)

    p_lv = sub.add_parser("lv", help="delay Lotka-Volterra tools")
    lv_sub = p_lv.add_subparsers(dest="lv_command", required=True, metavar="subcommand")

    p_eq = lv_sub.add_parser("equilibrium", help="positive equilibrium of a mutualistic model")
    p_eq.add_argument("problem", help="problem JSON path")
    p_eq.add_argument("--tau", type=float, default=None, help="delay (unused, accepted)")
    p_eq.set_defaults(func=_cmd_lv_equilibrium)

    p_sim = lv_sub.add_parser("simulate", help="integrate and write a CSV trajectory")
    p_sim.add_argument("problem", help="problem JSON path")
    _add_lv_flags(p_sim)
    p_sim.add_argument("--out", default=None, help="CSV path (default: stdout)")
    p_sim.set_defaults(func=_cmd_lv_simulate)

    p_decay = lv_sub.add_parser("check-decay", help="verify functional decay along a run")
    p_decay.add_argument("problem", help="problem JSON path")
    _add_lv_flags(p_decay)
    p_decay.add_argument("--cert", default=None, help="certificate JSON (default: synthesize)")
    p_decay.add_argument("--seed", type=int, default=0, help="seed for fallback search")
    p_decay.set_defaults(func=_cmd_lv_check_decay)

    p_bound = lv_sub.add_parser("boundedness", help="empirical ultimate-bound experiment")
    p_bound.add_argument("problem", help="problem JSON path")
    _add_lv_flags(p_bound)
    p_bound.add_argument("--runs", type=int, default=8, help="number of random histories")
    p_bound.add_argument("--radius", type=float, default=0.5, help="log-uniform history spread")
    p_bound.add_argument("--seed", type=int, default=0, help="history RNG seed")
    p_bound.add_argument("--out", default=None, help="write the JSON report here")
    p_bound.set_defaults(func=_cmd_lv_boundedness)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FormatError as exc:
        _log(str(exc))
        return EXIT_DATA
    except json.JSONDecodeError as exc:
        _log(f"invalid JSON: {exc}")
        return EXIT_DATA
    except (PreconditionError, InversionError) as exc:
        _log(str(exc))
        return EXIT_DATA
    except StepCollapse as exc:
        _log(f"integration collapsed at t = {exc.t:.6g}")
        return EXIT_UNSTABLE
    except ValueError as exc:
        _log(str(exc))
        return EXIT_USAGE
    except OSError as exc:
        _log(str(exc))
        return EXIT_DATA
    except Exception:  # pragma: no cover - defensive
        traceback.print_exc()
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
