"""Command-line front end.

Subcommands: gen, verify, eigen, dephase, search, gadget, mub.  Output is
machine readable (JSON by default, CSV where it makes sense); exit codes are
0 = claim verified / object found, 1 = claim violated / not found,
2 = usage or input error.  The environment variable ``CHM_TOL`` overrides
the default validation tolerance.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import core, families, gadgets, mub, search, spectral
from .core import DEFAULT_TOL
from .eigen import eigenvalues

EXIT_OK = 0
EXIT_VIOLATED = 1
EXIT_USAGE = 2


class _CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_USAGE):
        super().__init__(message)
        self.code = code


def _tolerance(args) -> float:
    if getattr(args, "tol", None) is not None:
        return args.tol
    env = os.environ.get("CHM_TOL")
    if env:
        try:
            return float(env)
        except ValueError as exc:
            raise _CliError(f"CHM_TOL is not a number: {env!r}") from exc
    return DEFAULT_TOL


def _emit(payload, args=None, out=None) -> None:
    text = payload if isinstance(payload, str) else json.dumps(payload)
    path = out if out is not None else getattr(args, "out", None)
    if path:
        with open(path, "w", encoding="ascii") as fh:
            fh.write(text)
            fh.write("\n")
    else:
        sys.stdout.write(text)
        sys.stdout.write("\n")


def _load_matrix(path: str) -> np.ndarray:
    try:
        return core.read_matrix(path)
    except OSError as exc:
        raise _CliError(f"cannot read {path}: {exc}") from exc
    except ValueError as exc:
        raise _CliError(f"bad matrix file {path}: {exc}") from exc


def _family_spec(args) -> families.FamilySpec:
    kind = args.family
    try:
        if kind == "fourier":
            return families.FamilySpec(kind="fourier", n=args.n)
        if kind == "tao":
            return families.FamilySpec(kind="tao", omega_branch=args.omega_branch)
        if kind == "haagerup":
            return families.FamilySpec(kind="haagerup", q=np.exp(1j * args.q_arg))
        if kind == "hermitian":
            return families.FamilySpec(kind="hermitian", theta=args.theta)
    except ValueError as exc:
        raise _CliError(str(exc)) from exc
    raise _CliError(f"unknown family {kind!r}")


def _cmd_gen(args) -> int:
    spec = _family_spec(args)
    try:
        H = spec.build()
    except ValueError as exc:
        raise _CliError(str(exc)) from exc
    _emit(core.matrix_to_json(H), args)
    return EXIT_OK


def _cmd_verify(args) -> int:
    tol = _tolerance(args)
    H = _load_matrix(args.matrix)
    if H.shape[0] != H.shape[1]:
        raise _CliError(f"matrix is not square: {H.shape}")
    n = H.shape[0]
    report: dict = {"n": n, "tol": tol}
    chm = core.chm_residuals(H, tol)
    report["chm"] = chm.to_dict()
    ok = chm.is_chm

    dephased = None
    if ok:
        try:
            dephased, _, _ = core.dephase(H)
            report["dephased"] = core.is_dephased(H, tol)
        except core.DegenerateInputError as exc:
            report["dephase_error"] = str(exc)
            ok = False

    if ok and dephased is not None:
        try:
            pre_tol = max(tol, 1e-10)
            check_tol = max(1e-6, 100.0 * tol)  # scales with the validation tolerance
            ce = spectral.verify_constant_eigenpairs(
                dephased, tol=pre_tol, exclude_tol=check_tol
            )
            report["constant_eigenpairs"] = ce.to_dict()
            ce_ok = (
                ce.residual_plus <= check_tol and ce.residual_minus <= check_tol
                and ce.max_first_coord <= check_tol
            )
            spectrum = eigenvalues(dephased)
            profile = spectral.multiplicity_profile(spectrum)
            report["multiplicity_profile"] = profile
            report["spectrum"] = [[v.real, v.imag] for v in spectrum.values]
            prof_ok = profile[0] <= 3
            equiv_ok = True
            if n == 6:
                eq = spectral.verify_hermitian_equivalence(dephased, pre_tol=pre_tol)
                report["hermitian_equivalence"] = eq.to_dict()
                equiv_ok = eq.equivalence_holds
                if profile[0] == 3 and not eq.spectrum_is_pm_sqrt6:
                    prof_ok = False
            ok = ce_ok and prof_ok and equiv_ok
        except ValueError as exc:
            report["verifier_error"] = str(exc)
            ok = False

    report["verified"] = bool(ok)
    _emit(report, args)
    return EXIT_OK if ok else EXIT_VIOLATED


def _cmd_eigen(args) -> int:
    H = _load_matrix(args.matrix)
    try:
        spec = eigenvalues(core.as_matrix(H))
    except core.DimensionError as exc:
        raise _CliError(str(exc)) from exc
    if args.format == "csv":
        _emit(spec.to_csv().rstrip("\n"), args)
    else:
        _emit({"n": spec.n, "values": [[v.real, v.imag] for v in spec.values]}, args)
    return EXIT_OK


def _cmd_dephase(args) -> int:
    H = _load_matrix(args.matrix)
    try:
        D, _, _ = core.dephase(core.as_matrix(H))
    except (core.DegenerateInputError, core.DimensionError) as exc:
        raise _CliError(str(exc)) from exc
    _emit(core.matrix_to_json(D), args)
    return EXIT_OK


def _cmd_search(args) -> int:
    try:
        task = search.SearchTask(
            target=args.pattern,
            restarts=args.restarts,
            max_iters=args.max_iters,
            seed=args.seed,
            tol_success=args.tol_success,
        )
    except (ValueError, TypeError) as exc:
        raise _CliError(str(exc)) from exc
    trace_rows = [] if args.trace else None
    report = search.minimize(task, trace_rows=trace_rows)
    if args.trace:
        with open(args.trace, "w", encoding="ascii") as fh:
            fh.write("restart,iteration,residual\n")
            for r, it, f in trace_rows:
                fh.write(f"{r},{it},{f:.17g}\n")
    _emit(report.to_json(), args)
    return EXIT_OK if report.found else EXIT_VIOLATED


def _cmd_gadget(args) -> int:
    name = args.name
    rng = np.random.default_rng(args.seed)
    if name == "tail":
        lam = math.sqrt(args.n) * np.exp(1j * args.lambda_arg)
        try:
            report = gadgets.gadget_repeated_tail(args.n, lam)
        except ValueError as exc:
            raise _CliError(str(exc)) from exc
    elif name == "triple":
        lam = math.sqrt(6.0) * np.exp(1j * args.lambda_arg)
        lam6 = math.sqrt(6.0) * np.exp(1j * args.lambda6_arg)
        a, t = gadgets.random_feasible_weights(rng)
        try:
            _, report = gadgets.gadget_triple_eigenvalue(lam, lam6, a, t)
        except ValueError as exc:
            raise _CliError(str(exc)) from exc
    elif name == "gram":
        report = gadgets.gadget_gram_rank()
    elif name == "rotation":
        report = gadgets.gadget_rotation_constants()
    elif name == "realpair":
        d, f = gadgets.sample_real_pair(rng)
        report = gadgets.gadget_real_pair_rank(d, f, a=args.a, b=args.b)
    else:  # pragma: no cover - argparse choices guard this
        raise _CliError(f"unknown gadget {name!r}")
    _emit(report.to_dict(), args)
    return EXIT_OK if report.verdict else EXIT_VIOLATED


def _cmd_mub(args) -> int:
    mats = [_load_matrix(p) for p in args.matrices]
    try:
        if len(mats) == 2:
            d = mats[0].shape[0]
            r = mub.unbiasedness_residual(mats[0] / math.sqrt(d), mats[1] / math.sqrt(d))
            _emit({"pair_residual": r}, args)
            return EXIT_OK if r <= _tolerance(args) else EXIT_VIOLATED
        report = mub.trio_check(*mats)
    except (ValueError, core.DimensionError) as exc:
        raise _CliError(str(exc)) from exc
    _emit(report.to_dict(), args)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chmkit",
        description="Complex Hadamard matrix toolkit: generate, verify, search.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a family member and write matrix JSON")
    p.add_argument("--family", required=True, choices=("fourier", "tao", "haagerup", "hermitian"))
    p.add_argument("--n", type=int, default=6, help="dimension (fourier only)")
    p.add_argument("--omega-branch", type=int, default=1, choices=(1, 2), dest="omega_branch")
    p.add_argument("--q-arg", type=float, default=math.pi / 5, dest="q_arg",
                   help="argument of the unimodular q in radians (haagerup)")
    p.add_argument("--theta", type=float, default=math.pi, help="angle in radians (hermitian)")
    p.add_argument("--out", help="output path (default: stdout)")
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("verify", help="run the full verifier battery on a matrix file")
    p.add_argument("matrix")
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--out", help="output path (default: stdout)")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("eigen", help="dump the spectrum of a matrix file")
    p.add_argument("matrix")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", help="output path (default: stdout)")
    p.set_defaults(func=_cmd_eigen)

    p = sub.add_parser("dephase", help="write the dephased form of a matrix file")
    p.add_argument("matrix")
    p.add_argument("--out", help="output path (default: stdout)")
    p.set_defaults(func=_cmd_dephase)

    p = sub.add_parser("search", help="multi-start search for a target spectrum pattern")
    p.add_argument("--pattern", required=True,
                   help='multiplicity pattern, e.g. "2,2,1,1" or "[4,1,1]"')
    p.add_argument("--restarts", type=int, default=50)
    p.add_argument("--max-iters", type=int, default=5000, dest="max_iters")
    p.add_argument("--seed", type=int, required=True,
                   help="PRNG seed; mandatory so runs are reproducible")
    p.add_argument("--tol-success", type=float, default=1e-8, dest="tol_success")
    p.add_argument("--trace", help="write per-iteration CSV trace to this path")
    p.add_argument("--out", help="output path (default: stdout)")
    p.set_defaults(func=_cmd_search)

    p = sub.add_parser("gadget", help="run one of the impossibility-construction gadgets")
    p.add_argument("name", choices=("tail", "triple", "gram", "rotation", "realpair"))
    p.add_argument("--n", type=int, default=6, help="dimension (tail gadget)")
    p.add_argument("--lambda-arg", type=float, default=math.pi / 2, dest="lambda_arg",
                   help="argument of the repeated eigenvalue in radians")
    p.add_argument("--lambda6-arg", type=float, default=0.5, dest="lambda6_arg",
                   help="argument of the distinct sixth eigenvalue (triple gadget)")
    p.add_argument("--a", type=float, default=1.0, help="first rotation angle (realpair)")
    p.add_argument("--b", type=float, default=2.0, help="second rotation angle (realpair)")
    p.add_argument("--seed", type=int, default=0, help="seed for sampled gadget inputs")
    p.add_argument("--out", help="output path (default: stdout)")
    p.set_defaults(func=_cmd_gadget)

    p = sub.add_parser("mub", help="unbiasedness residuals for two or three CHM files")
    p.add_argument("matrices", nargs="+", help="two or three matrix files")
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--out", help="output path (default: stdout)")
    p.set_defaults(func=_cmd_mub)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits with 2 on usage errors, which matches our contract
        return int(exc.code) if exc.code else EXIT_OK
    if getattr(args, "command", None) == "mub" and len(args.matrices) not in (2, 3):
        sys.stderr.write("mub needs two or three matrix files\n")
        return EXIT_USAGE
    try:
        return args.func(args)
    except _CliError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return exc.code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
