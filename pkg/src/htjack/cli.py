"""Command-line front end.

Subcommands: moments, cumulants, check-equivalence, qstar,
check-gamma-product, roots, eigs, verify-spectrum, density, sample, compare,
reproduce-figures.

Conventions: rational-valued flags accept 'p/q' or decimal literals and are
parsed exactly; every output file embeds the resolved configuration (CSV
comment line, JSON field, SVG/PNG metadata); exit code 0 on success, 1 on
validation errors, 2 on computation failures, with a machine-readable JSON
error on stderr.  HTJACK_THREADS caps worker parallelism.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

import numpy as np

from .cumulants import CumulantVector, moments_from_cumulants
from .density import CrystalDensity, build_density, density_grid, ks_distance
from .errors import ComputationError
from .exactseries import parse_rational, rational_str
from .rtransform import (
    EnsembleSpec,
    Family,
    equivalence_check,
    family_cumulants,
    moments_via_transform,
)
from .sampler import ChainConfig, mcmc_run
from .shiftedjack import RowQStarInput, gamma_product_check, qstar_row
from .spectra import JacobiOperator, find_roots, spectrum_root_agreement, truncated_eigs


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        _fail(1, message)


def _fail(code: int, message: str, details=None):
    sys.stderr.write(json.dumps({"error": message, "details": details or {}}) + "\n")
    raise SystemExit(code)


def _rational(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational: {text!r}")


def _rational_list(text: str):
    return tuple(parse_rational(tok) for tok in text.split(","))


def _int_list(text: str):
    return tuple(int(tok) for tok in text.split(","))


def _add_family_flags(p: _Parser):
    p.add_argument("--family", required=True, choices=[f.value for f in Family])
    p.add_argument("--gamma", required=True, type=_rational)
    p.add_argument("--eta", type=_rational)
    p.add_argument("--c", type=_rational)
    p.add_argument("--M", type=int)


def _add_io_flags(p: _Parser, formats=("csv", "json")):
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--format", choices=formats, default=formats[0])


def build_spec(args) -> EnsembleSpec:
    return EnsembleSpec(
        Family(args.family), args.gamma, eta=args.eta, c=args.c, M=args.M
    )


def _resolved_config(args) -> dict:
    skip = {"func"}
    out = {}
    for k, v in sorted(vars(args).items()):
        if k in skip or v is None:
            continue
        if isinstance(v, Fraction):
            v = rational_str(v)
        elif isinstance(v, tuple):
            v = [rational_str(x) if isinstance(x, Fraction) else x for x in v]
        out[k] = v
    return out


def _emit_csv(args, header, rows):
    lines = ["# config: " + json.dumps(_resolved_config(args))]
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(str(x) for x in row))
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_json(args, payload: dict):
    payload = {"config": _resolved_config(args), **payload}
    text = json.dumps(payload, indent=2, default=str) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("HTJACK_THREADS", "1")))
    except ValueError:
        return 1


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_moments(args):
    spec = build_spec(args)
    kv = family_cumulants(spec, args.order)
    if args.method in ("transform", "both"):
        mt = moments_via_transform(kv, args.order)
    if args.method in ("paths", "both"):
        mp = moments_from_cumulants(kv, args.order)
    if args.method == "both":
        rows = [
            (ell, rational_str(mp.m[ell - 1]), rational_str(mt.m[ell - 1]))
            for ell in range(1, args.order + 1)
        ]
        _emit_csv(args, ("ell", "m_paths", "m_transform"), rows)
    else:
        mv = mp if args.method == "paths" else mt
        rows = [(ell, rational_str(mv.m[ell - 1])) for ell in range(1, args.order + 1)]
        _emit_csv(args, ("ell", "m_ell"), rows)


def cmd_cumulants(args):
    spec = build_spec(args)
    kv = family_cumulants(spec, args.order)
    rows = [(n, rational_str(kv.kappa[n - 1])) for n in range(1, args.order + 1)]
    _emit_csv(args, ("n", "kappa_n"), rows)


def cmd_check_equivalence(args):
    spec = build_spec(args)
    kv = family_cumulants(spec, args.order)
    report = equivalence_check(kv, args.order)
    _emit_json(args, report.to_json())
    if not report.ok:
        row = report.first_mismatch()
        _fail(2, "path and transform moments differ", {"first_differing_ell": row.ell})


def cmd_qstar(args):
    value = qstar_row(RowQStarInput(args.x, args.theta, args.k))
    _emit_json(args, {"value": rational_str(value), "value_float": float(value)})


def cmd_check_gamma_product(args):
    report = gamma_product_check(args.x, args.theta, args.z, args.kmax, tol=args.tol)
    _emit_json(args, report.to_json())
    if not report.ok:
        _fail(2, "gamma-product identity check failed", report.to_json())


def cmd_roots(args):
    spec = build_spec(args)
    rl = find_roots(spec, args.count, tol=args.tol)
    rows = [(k, repr(r)) for k, r in enumerate(rl.roots, start=1)]
    _emit_csv(args, ("k", "root"), rows)


def cmd_eigs(args):
    spec = build_spec(args)
    op = JacobiOperator(spec)
    size = spec.M if spec.family is Family.BETA else args.size
    eigs = truncated_eigs(op, size, count=args.count)
    rows = [(k, repr(float(v))) for k, v in enumerate(eigs, start=1)]
    _emit_csv(args, ("k", "eigenvalue"), rows)


def cmd_verify_spectrum(args):
    spec = build_spec(args)
    sizes = args.sizes if spec.family is not Family.BETA else None
    report = spectrum_root_agreement(spec, args.count, trunc_sizes=sizes, tol=args.tol)
    _emit_json(args, report.to_json())


def _density_for(args, spec: EnsembleSpec) -> CrystalDensity:
    count = args.count
    if spec.family is Family.BETA:
        count = spec.M
    roots = find_roots(spec, count, tol=args.tol)
    return build_density(spec, roots, mass_tol=args.mass_tol)


def cmd_density(args):
    spec = build_spec(args)
    density = _density_for(args, spec)
    if args.format == "json":
        _emit_json(args, density.to_json())
    elif args.format == "csv":
        xs, fs = density_grid(density)
        _emit_csv(args, ("x", "f"), [(repr(float(x)), repr(float(f))) for x, f in zip(xs, fs)])
    else:
        if not args.out:
            _fail(1, "--out is required for --format svg")
        from .plotting import render_density

        render_density(density, args.out, spec=spec, config=_resolved_config(args))


def cmd_sample(args):
    spec = build_spec(args)
    config = ChainConfig(
        spec,
        N=args.N,
        sweeps=args.sweeps,
        theta=float(args.theta) if args.theta is not None else None,
        burn_in=args.burn_in,
        thin=args.thin,
        seed=args.seed,
        chains=args.chains,
    )
    result = mcmc_run(config, threads=_threads())
    rows = []
    for chain, sweep, positions in result.records:
        for idx, pos in enumerate(positions, start=1):
            rows.append((chain, sweep, idx, repr(float(pos))))
    _emit_csv(args, ("chain", "sweep", "particle_index", "position"), rows)


def _read_samples_csv(path: str) -> np.ndarray:
    positions = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#") or line.startswith("chain,"):
                continue
            positions.append(float(line.split(",")[3]))
    return np.asarray(positions)


def cmd_compare(args):
    density = CrystalDensity.from_json(json.load(open(args.density)))
    samples = _read_samples_csv(args.samples)
    if samples.size == 0:
        _fail(1, "no samples found in the input file")
    ks = ks_distance(density, samples)
    _emit_json(args, {"ks": ks, "n_samples": int(samples.size)})
    if args.svg:
        from .plotting import render_overlay

        render_overlay(
            density, samples, args.svg, bin_width=args.bin_width,
            config=_resolved_config(args),
        )


def cmd_reproduce_figures(args):
    """The reference pipeline: N=300, theta=2/N, eta in {1/2, 1}."""
    from .plotting import render_overlay

    os.makedirs(args.outdir, exist_ok=True)
    written = []
    for eta, tag in ((Fraction(1, 2), "eta_half"), (Fraction(1), "eta_one")):
        spec = EnsembleSpec(Family.PLANCH, 2, eta=eta)
        config = ChainConfig(
            spec, N=300, sweeps=args.sweeps, seed=args.seed, chains=args.chains,
            thin=args.thin,
        )
        result = mcmc_run(config, threads=_threads())
        roots = find_roots(spec, 30, tol=1e-12)
        density = build_density(spec, roots, mass_tol=1e-8)
        ks = ks_distance(density, result.positions)
        svg_path = os.path.join(args.outdir, f"overlay_{tag}.svg")
        render_overlay(
            density, result.positions, svg_path, bin_width=args.bin_width,
            spec=spec, config=config.to_json(),
            title=f"planch gamma=2 eta={rational_str(eta)} N=300",
        )
        report_path = os.path.join(args.outdir, f"report_{tag}.json")
        payload = {
            "config": config.to_json(),
            "ks": ks,
            "n_samples": int(result.positions.size),
            "acceptance_rates": [d.acceptance_rate for d in result.diagnostics],
            "max_drift": max(d.max_drift for d in result.diagnostics),
            "density": density.to_json(),
        }
        with open(report_path, "w") as fh:
            json.dump(payload, fh, indent=2)
        written.extend([svg_path, report_path])
        print(f"eta={rational_str(eta)}: ks={ks:.4f} -> {svg_path}, {report_path}")
    return written


def make_parser() -> _Parser:
    parser = _Parser(prog="htjack", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("moments", help="limit-measure moments of a pure Jack family")
    _add_family_flags(p)
    p.add_argument("--order", type=int, default=8)
    p.add_argument("--method", choices=("paths", "transform", "both"), default="transform")
    _add_io_flags(p)
    p.set_defaults(func=cmd_moments)

    p = sub.add_parser("cumulants", help="closed-form cumulants of a pure Jack family")
    _add_family_flags(p)
    p.add_argument("--order", type=int, default=8)
    _add_io_flags(p)
    p.set_defaults(func=cmd_cumulants)

    p = sub.add_parser("check-equivalence", help="path formula vs functional equation")
    _add_family_flags(p)
    p.add_argument("--order", type=int, default=8)
    _add_io_flags(p, formats=("json",))
    p.set_defaults(func=cmd_check_equivalence)

    p = sub.add_parser("qstar", help="row-shape shifted Jack evaluation")
    p.add_argument("--x", required=True, type=_rational_list)
    p.add_argument("--theta", required=True, type=_rational)
    p.add_argument("--k", required=True, type=int)
    _add_io_flags(p, formats=("json",))
    p.set_defaults(func=cmd_qstar)

    p = sub.add_parser("check-gamma-product", help="partial sums vs gamma product")
    p.add_argument("--x", required=True, type=_rational_list)
    p.add_argument("--theta", required=True, type=_rational)
    p.add_argument("--z", required=True, type=_rational)
    p.add_argument("--kmax", type=int, default=40)
    p.add_argument("--tol", type=float, default=1e-8)
    _add_io_flags(p, formats=("json",))
    p.set_defaults(func=cmd_check_gamma_product)

    p = sub.add_parser("roots", help="largest real zeros of the characteristic function")
    _add_family_flags(p)
    p.add_argument("--count", type=int, default=20)
    p.add_argument("--tol", type=float, default=1e-12)
    _add_io_flags(p)
    p.set_defaults(func=cmd_roots)

    p = sub.add_parser("eigs", help="eigenvalues of the truncated Jacobi operator")
    _add_family_flags(p)
    p.add_argument("--size", type=int, default=1000)
    p.add_argument("--count", type=int)
    _add_io_flags(p)
    p.set_defaults(func=cmd_eigs)

    p = sub.add_parser("verify-spectrum", help="operator eigenvalues vs function zeros")
    _add_family_flags(p)
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--sizes", type=_int_list, default=(500, 1000, 2000, 4000))
    p.add_argument("--tol", type=float, default=1e-12)
    _add_io_flags(p, formats=("json",))
    p.set_defaults(func=cmd_verify_spectrum)

    p = sub.add_parser("density", help="crystallized limit density")
    _add_family_flags(p)
    p.add_argument("--count", type=int, default=40)
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--mass-tol", dest="mass_tol", type=float, default=1e-6)
    _add_io_flags(p, formats=("json", "csv", "svg"))
    p.set_defaults(func=cmd_density)

    p = sub.add_parser("sample", help="Metropolis sampling of a pure Jack measure")
    _add_family_flags(p)
    p.add_argument("--N", required=True, type=int)
    p.add_argument("--sweeps", required=True, type=int)
    p.add_argument("--theta", type=_rational)
    p.add_argument("--burn-in", dest="burn_in", type=int)
    p.add_argument("--thin", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--chains", type=int, default=4)
    _add_io_flags(p)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("compare", help="KS distance between samples and a density")
    p.add_argument("--density", required=True)
    p.add_argument("--samples", required=True)
    p.add_argument("--svg", help="optional overlay figure path")
    p.add_argument("--bin-width", dest="bin_width", type=float, default=0.05)
    _add_io_flags(p, formats=("json",))
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("reproduce-figures", help="the N=300 reference pipeline")
    p.add_argument("--outdir", default="figures")
    p.add_argument("--sweeps", type=int, default=1_200_000)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--chains", type=int, default=4)
    p.add_argument("--thin", type=int, default=250)
    p.add_argument("--bin-width", dest="bin_width", type=float, default=0.05)
    p.set_defaults(func=cmd_reproduce_figures)

    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except ComputationError as err:
        _fail(2, str(err), err.details)
    except (ValueError, OSError) as err:
        _fail(1, str(err))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
