"""Command-line front end.

Subcommands: ``boundary``, ``figure`` (tables as CSV, or JSON with
``--json``), ``certify``, ``simulate`` and ``plan`` (JSON objects).

Exit codes: 0 success, 2 invalid input, 3 nonphysical pair,
4 no finite plan because the state is not certifiable.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import sys

from . import __version__
from .certification import VacuumPair, certify, optimal_witness
from .errors import DomainError, InvalidDistributionError, NonphysicalPairError, NotCertifiableError
from .measurement_sim import DetectorConfig, estimate_witness, event_probabilities, simulate_double, simulate_single
from .planner import k_opt, required_runs
from .state_models import NoisySinglePhotonModel, load_state_spec
from .tables import boundary_table, fig2_table, fig3_table, fig4_table, fig5_table
from .gaussian_boundary import boundary_wg

EXIT_OK, EXIT_INPUT, EXIT_NONPHYSICAL, EXIT_NOT_CERTIFIABLE = 0, 2, 3, 4

logger = logging.getLogger("qngcert")


def _open_unit(value: str) -> float:
    x = float(value)
    if not 0.0 < x < 1.0:
        raise argparse.ArgumentTypeError(f"must lie strictly between 0 and 1, got {value}")
    return x


def _efficiency(value: str) -> float:
    x = float(value)
    if not 0.0 < x <= 1.0:
        raise argparse.ArgumentTypeError(f"must lie in (0, 1], got {value}")
    return x


def _positive_int(value: str) -> int:
    x = int(float(value)) if "e" in value.lower() else int(value)
    if x <= 0:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {value}")
    return x


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=1, allow_nan=False) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _add_state_args(p: argparse.ArgumentParser, allow_pair: bool) -> None:
    g = p.add_argument_group("state")
    g.add_argument("--state", metavar="FILE", help="JSON state spec ('-' reads stdin)")
    g.add_argument("--eta", type=float, help="single-photon fraction of the noisy single-photon model")
    g.add_argument("--nbar", type=float, default=None, help="mean Poissonian noise photons (default 0)")
    if allow_pair:
        g.add_argument("--p0", type=float, help="vacuum probability, given directly")
        g.add_argument("--q0", type=float, help="vacuum probability after loss T, given directly")


def _load_state(args):
    if args.state is not None:
        if args.eta is not None or args.nbar is not None:
            raise ValueError("--state cannot be combined with --eta/--nbar")
        if args.state == "-":
            return load_state_spec(json.load(sys.stdin))
        with open(args.state, encoding="utf-8") as fh:
            return load_state_spec(json.load(fh))
    if args.eta is not None:
        return NoisySinglePhotonModel(args.eta, args.nbar or 0.0)
    if args.nbar is not None:
        return NoisySinglePhotonModel(0.0, args.nbar)
    raise ValueError("no state given: use --state FILE or --eta/--nbar")


def _pair_from_args(args, N=None) -> VacuumPair:
    p0 = getattr(args, "p0", None)
    q0 = getattr(args, "q0", None)
    if p0 is not None or q0 is not None:
        if p0 is None or q0 is None:
            raise ValueError("--p0 and --q0 must be given together")
        if args.state is not None or args.eta is not None or args.nbar is not None:
            raise ValueError("--p0/--q0 cannot be combined with a state description")
        return VacuumPair(p0, q0, args.T, N=N, scheme=args.scheme)
    state = _load_state(args)
    return VacuumPair(state.vacuum_after_loss(1.0), state.vacuum_after_loss(args.T),
                      args.T, N=N, scheme=args.scheme)


def cmd_boundary(args) -> int:
    table = boundary_table(args.T, args.v_points, args.v_min)
    _emit(table.to_json() if args.json else table.to_csv(), args.out)
    return EXIT_OK


def cmd_figure(args) -> int:
    Ts = tuple(args.T) if args.T else None
    if args.figure_id == "fig2":
        table = fig2_table(Ts or (0.5, 0.25), args.points or 200)
    elif args.figure_id == "fig3":
        table = fig3_table(**_kw(Ts=Ts, points=args.points))
    elif args.figure_id == "fig4":
        table = fig4_table(**_kw(Ts=Ts, points=args.points))
    else:
        if Ts is not None and len(Ts) != 1:
            raise ValueError("fig5 takes a single --T")
        table = fig5_table(args.sweep, **_kw(T=Ts[0] if Ts else None, eta=args.eta,
                                             nbars=tuple(args.nbar) if args.nbar else None,
                                             points=args.points))
    _emit(table.to_json() if args.json else table.to_csv(), args.out)
    return EXIT_OK


def _kw(**kwargs) -> dict:
    return {k: v for k, v in kwargs.items() if v is not None}


def cmd_certify(args) -> int:
    pair = _pair_from_args(args, N=args.N)
    result = certify(pair)
    out = result.to_dict()
    out["pair"] = {"p0": pair.p0, "q0": pair.q0, "T": pair.T}
    _emit(_dump(out), args.out)
    return EXIT_OK


def _project(p0: float, q0: float, T: float) -> tuple[float, bool]:
    """Move a sampled ``q0`` into ``[p0, 1 - T(1 - p0)]``."""
    upper = 1.0 - T * (1.0 - p0)
    clipped = min(max(q0, p0), upper)
    return clipped, clipped != q0


def cmd_simulate(args) -> int:
    state = _load_state(args)
    N = args.N
    if args.scheme == "double":
        cfg = DetectorConfig(args.T, args.eta_A, args.eta_B)
        tally = simulate_double(state, cfg, N, args.seed, shards=args.shards)
        T_eff = cfg.effective_T
        p_true, _, p_a = event_probabilities(state, cfg)
        q_true = 1.0 - p_a
    else:
        K = args.K if args.K is not None else N // 2
        tally = simulate_single(state, args.T, args.eta_A, N, K, args.seed, shards=args.shards)
        T_eff = args.T
        p_true = state.vacuum_after_loss(args.eta_A)
        q_true = state.vacuum_after_loss(args.eta_A * args.T)
    p_hat, q_hat_raw = tally.estimates()
    if p_hat <= 0.0:
        raise NonphysicalPairError("every run clicked: the estimated vacuum probability is zero")
    q_hat, projected = _project(p_hat, q_hat_raw, T_eff)
    pair = VacuumPair(p_hat, q_hat, T_eff)
    result = certify(pair)

    lam, V, _ = optimal_witness(pair, args.scheme, N)
    W_hat, var_hat = estimate_witness(tally, lam)
    W_G = float(boundary_wg(V, T_eff))
    significance = (W_hat - W_G) / math.sqrt(var_hat) if var_hat else 0.0
    expected = optimal_witness(VacuumPair(p_true, q_true, T_eff), args.scheme, N)[2]

    cert = result.to_dict()
    cert["significance"] = significance
    out = {
        "scheme": args.scheme,
        "tally": tally.to_dict(),
        "estimate": {"p0": p_hat, "q0": q_hat_raw, "T": T_eff, "projected": projected},
        "certification": cert,
        "optimal_witness": {"lambda": lam, "V": V, "W_hat": W_hat, "W_G": W_G, "var_hat": var_hat},
        "expected_significance": expected,
    }
    _emit(_dump(out), args.out)
    return EXIT_OK


def cmd_plan(args) -> int:
    pair = _pair_from_args(args)
    plan = required_runs(pair)
    out = plan.to_dict()
    out["runs_single"] = math.ceil(plan.N_S)
    out["runs_double"] = math.ceil(plan.N_D)
    out["pair"] = {"p0": pair.p0, "q0": pair.q0, "T": pair.T}
    if args.N is not None:
        out["K_opt"] = k_opt(plan.lambda_S, pair.p0, pair.q0, args.N)
    _emit(_dump(out), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qngcert",
        description="Certify quantum non-Gaussianity from vacuum probabilities before and after loss.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, json_flag=True):
        p.add_argument("--out", metavar="FILE", help="write to FILE instead of stdout")
        if json_flag:
            p.add_argument("--json", action="store_true", help="emit JSON instead of CSV")

    p = sub.add_parser("boundary", help="Gaussian boundary table at one transmittance")
    p.add_argument("--T", type=_open_unit, required=True)
    p.add_argument("--v-points", type=_positive_int, default=200)
    p.add_argument("--v-min", type=_open_unit, default=0.05)
    common(p)
    p.set_defaults(func=cmd_boundary)

    p = sub.add_parser("figure", help="data table for one of the figures")
    p.add_argument("figure_id", choices=("fig2", "fig3", "fig4", "fig5"))
    p.add_argument("--T", type=_open_unit, nargs="+", help="transmittance(s)")
    p.add_argument("--points", type=_positive_int)
    p.add_argument("--sweep", choices=("eta", "T"), default="eta", help="fig5 sweep variable")
    p.add_argument("--eta", type=_efficiency, help="fig5 single-photon fraction for the T sweep")
    p.add_argument("--nbar", type=float, nargs="+", help="fig5 noise levels")
    common(p)
    p.set_defaults(func=cmd_figure)

    p = sub.add_parser("certify", help="verdict for a state or a measured pair")
    _add_state_args(p, allow_pair=True)
    p.add_argument("--T", type=_open_unit, required=True)
    p.add_argument("--N", type=_positive_int, help="runs per probability, for the significance")
    p.add_argument("--scheme", choices=("single", "double"), default="single")
    common(p, json_flag=False)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("simulate", help="Monte Carlo run of a detection scheme plus verdict")
    _add_state_args(p, allow_pair=False)
    p.add_argument("--scheme", choices=("single", "double"), default="double")
    p.add_argument("--T", type=_open_unit, required=True)
    p.add_argument("--eta-A", type=_efficiency, default=1.0,
                   help="efficiency of detector A (the only detector in the single scheme)")
    p.add_argument("--eta-B", type=_efficiency, default=1.0)
    p.add_argument("--N", type=_positive_int, required=True)
    p.add_argument("--K", type=_positive_int, help="single scheme: runs at T (default N // 2)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--shards", type=_positive_int, default=1, help="worker threads; output does not depend on it")
    common(p, json_flag=False)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("plan", help="runs needed by each scheme")
    _add_state_args(p, allow_pair=True)
    p.add_argument("--T", type=_open_unit, required=True)
    p.add_argument("--N", type=_positive_int, help="total runs, to report the optimal single-scheme split")
    common(p, json_flag=False)
    p.set_defaults(func=cmd_plan, scheme="single")

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except NonphysicalPairError as exc:
        logger.error("%s", exc)
        return EXIT_NONPHYSICAL
    except NotCertifiableError as exc:
        logger.error("%s", exc)
        return EXIT_NOT_CERTIFIABLE
    except (DomainError, InvalidDistributionError, ValueError, OSError) as exc:
        logger.error("%s", exc)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
