"""Command line front end: ``so3radon <command> ...``.

Exit codes: 0 success, 2 tolerance failure, 3 infeasible cubature, 4 I/O.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from contextlib import nullcontext
from unittest import mock

import numpy as np

from . import checks, radon, rotations as rot, sampling, sphere3
from .harmonics import (
    PairSpectrum,
    SO3Spectrum,
    analyze_so3,
    eval_pair_grid,
    haar_quadrature,
    load_spectrum,
    random_so3_spectrum,
    real_part,
    save_spectrum,
    sphere_quadrature,
    synth_so3,
)

EXIT_OK, EXIT_TOL, EXIT_CUBATURE, EXIT_IO = 0, 2, 3, 4

log = logging.getLogger("so3radon")


class ToleranceFailure(RuntimeError):
    pass


def _rng(seed):
    return np.random.default_rng(seed)


def _write_json(obj, path):
    text = json.dumps(obj, indent=1, sort_keys=True, default=float) + "\n"
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _load(path, cls):
    spec = load_spectrum(path)
    if not isinstance(spec, cls):
        raise ValueError(f"{path} holds a {spec.space} spectrum, expected {cls.space}")
    return spec


# ---------------------------------------------------------------------------
# generation
# ---------------------------------------------------------------------------

def generate_odf(K: int, seed: int, nonneg: bool = False) -> SO3Spectrum:
    """Random real ODF spectrum of bandwidth ``K`` with unit mass.

    With ``nonneg`` a bandwidth ``K // 2`` function is squared; for odd ``K``
    the square is multiplied by ``1 + tr(h^T g) = 4 cos^2(omega/2) >= 0`` for a
    random rotation ``h``, a degree-one factor.  The product is re-analysed
    exactly at bandwidth ``K``.
    """
    if K < 0:
        raise ValueError("bandwidth must be nonnegative")
    rng = _rng(seed)
    if not nonneg:
        f0 = real_part(random_so3_spectrum(K, rng, decay=1.0))
        blocks = list(f0.blocks)
        blocks[0] = np.ones((1, 1), complex)
        return SO3Spectrum(tuple(blocks))
    f0 = real_part(random_so3_spectrum(K // 2, rng, decay=1.0))
    rule = haar_quadrature(2 * K)
    vals = np.abs(synth_so3(f0, rule.nodes)) ** 2
    if K % 2:
        h = rot.quat_to_matrix(rot.random_quaternions(rng, 1))[0]
        g = rot.quat_to_matrix(rot.as_quaternions(rule.nodes))
        vals = vals * (1.0 + np.einsum("ij,nij->n", h, g))
    f = real_part(analyze_so3(vals, rule, K))
    return f.scaled(lambda k: 1.0 / f.blocks[0][0, 0].real)


def cmd_generate(args):
    f = generate_odf(args.bandwidth, args.seed, args.nonneg)
    save_spectrum(f, args.out)
    log.info("wrote bandwidth-%d spectrum to %s", f.bandwidth, args.out)


# ---------------------------------------------------------------------------
# transforms
# ---------------------------------------------------------------------------

def cmd_radon(args):
    f = _load(args.input, SO3Spectrum)
    G = radon.radon_forward_spectral(f)
    if args.out:
        save_spectrum(G, args.out)
    if args.pole_csv:
        rule = sphere_quadrature(args.grid)
        radon.write_pole_figure_csv(G, rule.nodes, rule.nodes, args.pole_csv)
    if args.cubature and args.samples_out:
        cub = sampling.load_lattice(args.cubature)
        x, y = cub.lattice.pairs()
        sampling.SampleSet(x, y, radon.radon_eval(G, x, y).real).to_csv(args.samples_out)


def cmd_invert(args):
    save_spectrum(radon.radon_invert(_load(args.input, PairSpectrum)), args.out)


def cmd_xray(args):
    f = _load(args.input, SO3Spectrum)
    save_spectrum(radon.xray_forward(f), args.out)


def cmd_lattice(args):
    if args.product:
        lat = sampling.product_lattice(args.rho)
    else:
        lat = sampling.build_lattice_s2(args.rho)
    sampling.save_json(lat, args.out)
    log.info("lattice with %d points, certification %s", len(lat), lat.certification)


def cmd_cubature(args):
    lat = sampling.load_lattice(args.lattice)
    if lat.space == "S2":
        raise ValueError("cubature needs a lattice on S2xS2 (use lattice --product)")
    cub = sampling.cubature_weights(lat, args.degree)
    sampling.save_json(cub, args.out)
    log.info("cubature residual %.3g, weights %s", cub.residual, cub.weight_bounds())


def cmd_discrete_invert(args):
    cub = sampling.load_lattice(args.cubature)
    samples = sampling.SampleSet.from_csv(args.samples)
    f = sampling.discrete_invert(samples, cub, args.bandwidth)
    save_spectrum(f, args.out)
    _write_json(sampling.cardinality_report(cub, args.bandwidth), None)


def cmd_matthies(args):
    f = _load(args.input, SO3Spectrum)
    F = sphere3.LiftedFunction(f)
    q = rot.random_quaternions(_rng(args.seed), args.n_rotations)
    rows = []
    for qi in q:
        truth = F(qi)[0].real
        m = sphere3.matthies_invert(F, qi)
        h = sphere3.helgason_invert(F, qi)
        rows.append([*qi, truth, m.value.real, h.value.real, max(m.error_estimate, h.error_estimate)])
    out = open(args.out, "w", newline="") if args.out else nullcontext(sys.stdout)
    with out as fh:
        w = csv.writer(fh)
        w.writerow(["a0", "a1", "a2", "a3", "f_true", "f_matthies", "f_helgason", "est_error"])
        for r in rows:
            w.writerow([repr(float(v)) for v in r])


# ---------------------------------------------------------------------------
# verification and pipeline
# ---------------------------------------------------------------------------

def cmd_verify(args):
    patch = mock.patch.object(radon, "FOUR_PI", radon.FOUR_PI * 1.01) if args.tamper else nullcontext()
    with patch:
        results = checks.run_suites(args.suite, seed=args.seed)
    failed = [c for c in results if not c.passed]
    if args.json:
        _write_json({"passed": not failed, "checks": [c.as_dict() for c in results]}, args.report)
    else:
        for c in results:
            print(f"{'PASS' if c.passed else 'FAIL'} {c.suite}.{c.name}: {c.value:.3e} (tol {c.tol:.0e})")
    if failed:
        raise ToleranceFailure(f"{len(failed)} check(s) failed")


def run_pipeline(K: int, seed: int, stages, discrete_K: int = 3) -> dict:
    """Chain the named stages on a generated ODF and collect their residuals."""
    f = generate_odf(K, seed, nonneg=True)
    report = {"bandwidth": f.bandwidth, "seed": seed, "stages": {}}
    for stage in stages:
        try:
            if stage == "forward":
                err = radon.radon_invert(radon.radon_forward_spectral(f)).max_abs_diff(f)
                report["stages"][stage] = {"max_error": err, "tol": 1e-12, "passed": err < 1e-12}
            elif stage == "xray":
                rec = radon.radon_invert(radon.xray_forward(f))
                err = rec.max_abs_diff(radon.even_part(f))
                lost = radon.sobolev_norm_so3(f - radon.even_part(f))
                report["stages"][stage] = {
                    "max_error_vs_even_part": err,
                    "odd_norm_lost": lost,
                    "odd_degrees_lost": list(range(1, f.bandwidth + 1, 2)),
                    "tol": 1e-12,
                    "passed": err < 1e-12,
                }
            elif stage == "discrete":
                g = generate_odf(discrete_K, seed, nonneg=False)
                lat = sampling.product_lattice(sampling.lattice_rho(discrete_K))
                cub = sampling.cubature_weights(lat, sampling.required_product_degree(discrete_K))
                fx, fy = lat.factors
                vals = eval_pair_grid(radon.radon_forward_spectral(g), fx.points, fy.points)
                err = sampling.discrete_invert(vals, cub, discrete_K).max_abs_diff(g)
                report["stages"][stage] = {
                    "bandwidth": discrete_K,
                    "rho": lat.rho,
                    "max_error": err,
                    "solver_residual": cub.residual,
                    **sampling.cardinality_report(cub, discrete_K),
                    "tol": 1e-8,
                    "passed": err < 1e-8,
                }
            elif stage == "sphere3":
                res = checks.sphere3_suite(_rng(seed))
                report["stages"][stage] = {
                    "checks": [c.as_dict() for c in res],
                    "passed": all(c.passed for c in res),
                }
            else:
                raise ValueError(f"unknown stage {stage!r}")
        except sampling.CubatureInfeasible as exc:
            raise sampling.CubatureInfeasible(f"stage {stage}: {exc}", exc.residual) from exc
        except ValueError as exc:
            raise ValueError(f"stage {stage}: {exc}") from exc
    report["passed"] = all(s["passed"] for s in report["stages"].values())
    return report


def cmd_pipeline(args):
    report = run_pipeline(args.bandwidth, args.seed, args.stages.split(","))
    _write_json(report, args.report)
    for name, st in report["stages"].items():
        print(f"{name}: {'ok' if st['passed'] else 'FAILED'}", file=sys.stderr)
    if not report["passed"]:
        raise ToleranceFailure("pipeline tolerance exceeded")


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="so3radon", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    p.add_argument(
        "--threads", type=int, default=int(os.environ.get("SO3RADON_THREADS", "1")),
        help="reserved for module-level parallelism; computations are single threaded",
    )
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("generate", help="random ODF spectrum")
    s.add_argument("--bandwidth", "-K", type=int, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--nonneg", action="store_true")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_generate)

    s = sub.add_parser("radon", help="forward Radon transform of an SO3 spectrum")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--out")
    s.add_argument("--pole-csv", help="write pole-figure values on a sphere grid")
    s.add_argument("--grid", type=int, default=8, help="sphere grid degree for --pole-csv")
    s.add_argument("--cubature", help="lattice file whose nodes are sampled")
    s.add_argument("--samples-out", help="CSV of samples at the cubature nodes")
    s.set_defaults(func=cmd_radon)

    s = sub.add_parser("invert", help="inverse Radon transform of an S2xS2 spectrum")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_invert)

    s = sub.add_parser("xray", help="X-ray (pole density) transform")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_xray)

    s = sub.add_parser("lattice", help="certified rho-lattice")
    s.add_argument("--rho", type=float, required=True)
    s.add_argument("--product", action="store_true", help="lattice on S2xS2")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_lattice)

    s = sub.add_parser("cubature", help="positive cubature weights on a product lattice")
    s.add_argument("--lattice", required=True)
    s.add_argument("--degree", type=int, required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_cubature)

    s = sub.add_parser("discrete-invert", help="reconstruct f from Radon samples")
    s.add_argument("--bandwidth", "-K", type=int, required=True)
    s.add_argument("--samples", required=True)
    s.add_argument("--cubature", required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_discrete_invert)

    s = sub.add_parser("matthies", help="Helgason/Matthies reconstruction at random rotations")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--n-rotations", type=int, default=10)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out")
    s.set_defaults(func=cmd_matthies)

    s = sub.add_parser("verify", help="run invariant suites")
    s.add_argument("--suite", action="append", choices=["all", *checks.SUITES])
    s.add_argument("--json", action="store_true")
    s.add_argument("--report", help="write the JSON report here instead of stdout")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--tamper", action="store_true", help=argparse.SUPPRESS)
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("pipeline", help="chained stages with a JSON report")
    s.add_argument("--bandwidth", "-K", type=int, default=5)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--stages", default="forward,xray,discrete")
    s.add_argument("--report")
    s.set_defaults(func=cmd_pipeline)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        args.func(args)
    except ToleranceFailure as exc:
        print(f"tolerance failure: {exc}", file=sys.stderr)
        return EXIT_TOL
    except sampling.CubatureInfeasible as exc:
        print(f"infeasible cubature (residual {exc.residual:.3g}): {exc}", file=sys.stderr)
        return EXIT_CUBATURE
    except (OSError, json.JSONDecodeError, KeyError, ValueError) as exc:
        print(f"input/output error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
