"""Command-line harness.

Subcommands ``channel-info``, ``verify-avg``, ``verify-proof`` and
``protocol-equiv`` each print one report (JSON or key/value CSV). Reports
carry the seed, sample count, package version and resource fingerprint and
nothing run-dependent, so identical settings give byte-identical output
regardless of ``--threads``.

Exit codes: 0 pass, 1 verification failure, 2 I/O error, 3 validation error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

import numpy as np

from . import __version__
from .channel import (
    TeleportChannel,
    apply_channel,
    simulate_protocol,
    standard_protocol,
)
from .fidelity import (
    avg_ent_fidelity_closed,
    avg_fidelity_closed,
    channel_fidelity_batch,
    ent_fidelity_batch,
)
from .matrix import ValidationError, swap_operator, tolerances, trace_distance
from .resources import MatrixFormatError, resolve_resource
from .sampling import DEFAULT_SAMPLES, haar_pure, hs_mixed, make_rng, mc_estimate
from .twirl import (
    MU_MAX_DIM,
    alpha_beta,
    alpha_beta_explicit,
    mu_nm,
    twirl_integral_mc,
    verify_trace_identities,
)
from .weyl import weyl_indices

SAMPLES_ENV = "QUDIT_TELEPORT_SAMPLES"
N_SIGMA = 4.0
ROUNDOFF = 1e-12
EQUIV_TOL = 1e-10

EXIT_OK, EXIT_FAIL, EXIT_IO, EXIT_INVALID = 0, 1, 2, 3


def _default_samples() -> int:
    raw = os.environ.get(SAMPLES_ENV)
    return int(raw) if raw else DEFAULT_SAMPLES


def _build_channel(args) -> tuple[TeleportChannel, np.ndarray]:
    chi, d = resolve_resource(args.resource, args.dim)
    args.dim = d
    return TeleportChannel.from_resource(chi), chi


def _header(args, ch: TeleportChannel | None = None, **extra) -> dict:
    report = {"command": args.command, "version": __version__}
    if getattr(args, "seed", None) is not None:
        report["seed"] = args.seed
    report.update(extra)
    report["d"] = args.dim
    if ch is not None:
        report["resource"] = args.resource
        report["resource_fingerprint"] = ch.resource_fingerprint
    return report


def _mc_entry(est, prediction: float) -> dict:
    z = est.z_score(prediction)
    return {
        "mean": est.mean,
        "stderr": est.stderr,
        "n_samples": est.n_samples,
        "prediction": prediction,
        "abs_error": abs(est.mean - prediction),
        "z": z if np.isfinite(z) else None,
        "pass": est.agrees_with(prediction, N_SIGMA, ROUNDOFF),
    }


def cmd_channel_info(args) -> dict:
    ch, _ = _build_channel(args)
    f = ch.singlet_fraction
    report = _header(args, ch)
    report.update({
        "probs": ch.probs.tolist(),
        "singlet_fraction": f,
        "avg_fidelity": avg_fidelity_closed(f, ch.d),
        "avg_ent_fidelity": avg_ent_fidelity_closed(f, ch.d),
        "pass": True,
    })
    return report


def cmd_verify_avg(args) -> dict:
    ch, _ = _build_channel(args)
    d, f = ch.d, ch.singlet_fraction
    if args.kind == "fidelity":
        prediction = avg_fidelity_closed(f, d)
        dim, statistic = d, lambda batch: channel_fidelity_batch(batch, ch)
    else:
        prediction = avg_ent_fidelity_closed(f, d)
        dim, statistic = d * d, lambda batch: ent_fidelity_batch(batch, ch)
    est = mc_estimate(lambda rng, k: haar_pure(dim, rng, size=k), statistic,
                      args.samples, args.seed, threads=args.threads)
    report = _header(args, ch, samples=args.samples, kind=args.kind)
    report["singlet_fraction"] = f
    report.update(_mc_entry(est, prediction))
    return report


def cmd_verify_proof(args) -> dict:
    d = args.dim
    if d is None or d < 2:
        raise ValidationError("verify-proof needs --dim >= 2")
    report = _header(args, samples=args.samples)
    checks = {}

    ti = verify_trace_identities(d, seed=args.seed)
    checks["trace_identities"] = ti.as_dict()

    if d <= MU_MAX_DIM:
        swap = swap_operator(d * d)
        tr_dev = swap_dev = 0.0
        for n, m in weyl_indices(d):
            mu = mu_nm(d, n, m)
            expected = d ** 4 if (n, m) == (0, 0) else 0.0
            tr_dev = max(tr_dev, abs(np.trace(mu) - expected))
            swap_dev = max(swap_dev, abs(np.trace(mu @ swap) - d * d))
        checks["mu_traces"] = {
            "trace_max_dev": float(tr_dev),
            "trace_swap_max_dev": float(swap_dev),
            "pass": bool(max(tr_dev, swap_dev) <= EQUIV_TOL),
        }
    else:
        checks["mu_traces"] = {
            "error": f"d too large for mu construction (d={d}, max {MU_MAX_DIM})",
            "skipped": True,
        }

    if d == 2:
        dev = 0.0
        for n, m in weyl_indices(d):
            a, b = alpha_beta(d, n, m), alpha_beta_explicit(d, n, m)
            dev = max(dev, abs(a.alpha - b.alpha), abs(a.beta - b.beta))
        checks["alpha_beta_explicit"] = {"max_dev": dev, "pass": dev <= 1e-12}

    twirl = {}
    for idx, (n, m) in enumerate(weyl_indices(d)):
        coeff = alpha_beta(d, n, m)
        est = twirl_integral_mc(d, n, m, args.samples, args.seed, stream=idx,
                                threads=args.threads)
        entry = _mc_entry(est, coeff.total)
        entry.update({"alpha": coeff.alpha, "beta": coeff.beta})
        twirl[f"{n},{m}"] = entry
    checks["twirl"] = {
        "cases": twirl,
        "pass": all(e["pass"] for e in twirl.values()),
    }

    report["checks"] = checks
    report["pass"] = all(c.get("pass", True) for c in checks.values() if not c.get("skipped"))
    return report


def cmd_protocol_equiv(args) -> dict:
    ch, chi = _build_channel(args)
    d = ch.d
    proto = standard_protocol(d)
    rng = make_rng(args.seed)
    worst = 0.0
    for _ in range(args.trials):
        rho = hs_mixed(d, rng)
        dist = trace_distance(simulate_protocol(chi, rho, proto), apply_channel(ch, rho))
        worst = max(worst, dist)
    report = _header(args, ch, trials=args.trials)
    report.update({"max_trace_distance": worst, "tol": EQUIV_TOL, "pass": worst <= EQUIV_TOL})
    return report


COMMANDS = {
    "channel-info": cmd_channel_info,
    "verify-avg": cmd_verify_avg,
    "verify-proof": cmd_verify_proof,
    "protocol-equiv": cmd_protocol_equiv,
}


def _flatten(obj, prefix=""):
    if isinstance(obj, dict):
        for key, val in obj.items():
            yield from _flatten(val, f"{prefix}.{key}" if prefix else str(key))
    elif isinstance(obj, (list, tuple)):
        for i, val in enumerate(obj):
            yield from _flatten(val, f"{prefix}[{i}]")
    else:
        yield prefix, obj


def format_report(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["key", "value"])
    for key, val in _flatten(report):
        writer.writerow([key, json.dumps(val)])
    return buf.getvalue()


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--dim", "-d", type=int, default=None, help="qudit dimension d")
    common.add_argument("--seed", type=int, default=None,
                        help="RNG seed; drawn from entropy and printed when omitted")
    common.add_argument("--threads", type=int, default=1, help="worker threads for Monte Carlo")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--out", default=None, help="write the report here instead of stdout")
    common.add_argument("--tol-herm", type=float, default=None)
    common.add_argument("--tol-psd", type=float, default=None)
    common.add_argument("--tol-recon", type=float, default=None)

    resource = argparse.ArgumentParser(add_help=False)
    resource.add_argument("--resource", "-r", default="bell",
                          help="bell | maximally_mixed | isotropic:P | random_density:SEED | PATH")

    samples = argparse.ArgumentParser(add_help=False)
    samples.add_argument("--samples", "-n", type=int, default=None,
                         help=f"Monte Carlo samples (default ${SAMPLES_ENV} or {DEFAULT_SAMPLES})")

    parser = argparse.ArgumentParser(prog="qudit-teleport", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("channel-info", parents=[common, resource],
                   help="outcome grid, singlet fraction and closed-form averages")
    p = sub.add_parser("verify-avg", parents=[common, resource, samples],
                       help="Monte Carlo check of an average fidelity against its closed form")
    p.add_argument("--kind", choices=("fidelity", "entanglement"), default="entanglement")
    sub.add_parser("verify-proof", parents=[common, samples],
                   help="trace identities, mu traces and twirl integrals")
    p = sub.add_parser("protocol-equiv", parents=[common, resource],
                       help="step-by-step protocol vs closed-form channel")
    p.add_argument("--trials", type=int, default=100)
    return parser


def _validate(args) -> None:
    if getattr(args, "samples", 0) is None:
        args.samples = _default_samples()
    if getattr(args, "samples", 2) < 2:
        raise ValidationError("--samples must be >= 2")
    if args.threads < 1:
        raise ValidationError("--threads must be >= 1")
    if args.dim is not None and args.dim < 2:
        raise ValidationError("--dim must be >= 2")
    if getattr(args, "trials", 1) < 1:
        raise ValidationError("--trials must be >= 1")


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    args = build_parser().parse_args(argv)
    if args.seed is None:
        args.seed = int(np.random.SeedSequence().entropy % 2**63)
        print(f"seed: {args.seed}", file=stderr)
    try:
        _validate(args)
        overrides = {k: v for k, v in (("herm", args.tol_herm), ("psd", args.tol_psd),
                                       ("recon", args.tol_recon)) if v is not None}
        with tolerances(**overrides):
            report = COMMANDS[args.command](args)
    except (OSError, MatrixFormatError) as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_IO
    except (ValidationError, ValueError) as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_INVALID

    text = format_report(report, args.format)
    if args.out:
        try:
            with open(args.out, "w") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"error: {exc}", file=stderr)
            return EXIT_IO
    else:
        stdout.write(text)
    return EXIT_OK if report.get("pass", True) else EXIT_FAIL


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
