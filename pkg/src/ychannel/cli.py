"""Command-line front end.

Subcommands: dyc-demo, region, optimize, corollary, lattice-mc.
JSON in, CSV/JSON out; every command is deterministic given its inputs and
seed.  Exit codes: 0 success, 2 input error, 3 infeasibility or verification
failure.
"""

import argparse
import csv
import io
import json
import random
import sys

from . import dyc, flows, gaussian, lattice

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_INFEASIBLE = 3

TOY_CFG = dyc.DycConfig(5, 4, 3)
TOY_TUPLE = flows.RateTuple(0, 2, 2, 1, 0, 2)


class InputError(Exception):
    pass


def _load_json(path, what):
    try:
        with open(path) as f:
            return json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise InputError(f"cannot read {what} from {path}: {e}") from e


def _parse(obj, what, builder):
    try:
        return builder(obj)
    except (KeyError, TypeError, ValueError) as e:
        raise InputError(f"invalid {what}: {e}") from e


def _load_config(path):
    return _parse(_load_json(path, "channel config"), "channel config",
                  flows.ChannelConfig.from_dict)


def _load_allocation(path, cfg):
    obj = _load_json(path, "power allocation")
    try:
        up_fields = obj["uplink"]
        if set(up_fields) <= set(gaussian.FREE_UPLINK):
            up = gaussian.derive_coupled_powers(up_fields, cfg)
        else:
            up = gaussian.UplinkPowers.from_dict(up_fields)
        down = gaussian.DownlinkPowers.from_dict(obj["downlink"])
    except (KeyError, TypeError, ValueError) as e:
        raise InputError(f"invalid power allocation: {e}") from e
    return up, down


def _write_out(text, path):
    if path:
        with open(path, "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------

def cmd_dyc_demo(args):
    if args.no_cyclic:
        if dyc.feasible_without_cyclic(TOY_CFG, TOY_TUPLE):
            print("unexpected: bi+uni plan found for the toy tuple")
            return EXIT_INFEASIBLE
        print("bi+uni strategies only: Infeasible (cyclic strategy required)")
        return EXIT_OK

    d = flows.decompose_flows(TOY_TUPLE)
    try:
        plan = dyc.plan_levels(TOY_CFG, d)
    except dyc.InfeasiblePlan as e:
        print(f"planning failed: {e}")
        return EXIT_INFEASIBLE

    rng = random.Random(args.seed)
    msgs = dyc.random_messages(TOY_TUPLE, rng)
    trace = dyc.plan_trace(plan, msgs)

    report = dyc.verify_end_to_end(
        TOY_CFG, TOY_TUPLE,
        exhaustive_limit=128 if args.exhaustive else 20)
    trace["verification"] = {
        "passed": report.passed,
        "patterns": report.patterns_checked,
        "exhaustive": report.exhaustive,
    }
    _write_out(json.dumps(trace, indent=2, sort_keys=True) + "\n", args.output)
    if not report.passed:
        print("recovery FAILED", file=sys.stderr)
        return EXIT_INFEASIBLE
    return EXIT_OK


def _region_csv(cfg, up, down):
    ub = gaussian.uplink_bounds(cfg, up)
    db = gaussian.downlink_bounds(cfg, down)
    sb = gaussian.substream_bounds(ub, db)
    rates = gaussian.compose_rates(sb)
    rep = gaussian.check_feasibility(up, down, cfg)
    up_map = sb.uplink_of(ub)
    down_map = sb.downlink_of(db)

    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(["record", "name", "uplink_bound", "downlink_bound", "effective"])
    for s in gaussian.SUBSTREAMS:
        w.writerow(["substream", s, f"{up_map[s]:.12g}",
                    f"{down_map[s]:.12g}", f"{getattr(sb, s):.12g}"])
    for i, j in flows.PAIRS:
        w.writerow(["rate", f"R{i}{j}", "", "", f"{rates.rate(i, j):.12g}"])
    for name, val in (("P1", rep.slack1), ("P2", rep.slack2),
                      ("P3", rep.slack3), ("downlink", rep.downlink_slack)):
        w.writerow(["power_slack", name, "", "", f"{val:.12g}"])
    for i, s in enumerate(gaussian.proxy_slacks(cfg, rates), 1):
        w.writerow(["proxy_slack", f"ineq{i}", "", "", f"{s:.12g}"])
    for i, s in enumerate(
            gaussian.corollary_region_contains(cfg, rates).slack, 1):
        w.writerow(["corollary_slack", f"ineq{i}", "", "", f"{s:.12g}"])
    return buf.getvalue(), rep


def cmd_region(args):
    if args.pin:
        parts = []
        for name in sorted(gaussian.PINNED_CONFIGS):
            cfg, up, down = gaussian.pinned_allocation(name)
            text, _ = _region_csv(cfg, up, down)
            parts.append(f"# pinned config {name}\n{text}")
        _write_out("".join(parts), args.output)
        return EXIT_OK
    if not (args.config and args.allocation):
        raise InputError("region needs a config file and an allocation file "
                         "(or --pin)")
    cfg = _load_config(args.config)
    up, down = _load_allocation(args.allocation, cfg)
    text, rep = _region_csv(cfg, up, down)
    _write_out(text, args.output)
    if not rep.feasible:
        print(f"allocation infeasible: slacks "
              f"({rep.slack1:.6g}, {rep.slack2:.6g}, {rep.slack3:.6g}, "
              f"downlink {rep.downlink_slack:.6g})", file=sys.stderr)
        return EXIT_INFEASIBLE
    return EXIT_OK


def cmd_optimize(args):
    cfg = _load_config(args.config)
    if args.budget < 1:
        raise InputError("budget must be >= 1")
    try:
        res = gaussian.maximize_objective(
            cfg, args.weights, budget=args.budget, seed=args.seed)
    except ValueError as e:
        raise InputError(str(e)) from e
    out = {
        "objective": res.objective,
        "evaluations": res.evaluations,
        "rates": res.rates.to_dict(),
        "uplink": res.uplink.to_dict(),
        "downlink": res.downlink.to_dict(),
    }
    _write_out(json.dumps(out, indent=2, sort_keys=True) + "\n", args.output)
    return EXIT_OK


def cmd_corollary(args):
    cfg = _load_config(args.config)
    r = _parse(_load_json(args.rates, "rate tuple"), "rate tuple",
               flows.RateTuple.from_dict)
    rep = gaussian.corollary_region_contains(cfg, r)
    for i, (lhs, rhs, slack) in enumerate(
            zip(rep.lhs, rep.rhs, rep.slack), 1):
        terms = "+".join(gaussian.CONSTRAINT_LHS[i - 1])
        print(f"ineq{i}: {terms} = {lhs:.6f}  <=  {rhs:.6f}  "
              f"slack {slack:.6f}")
    print(f"member: {rep.member}")
    return EXIT_OK if rep.member else EXIT_INFEASIBLE


def cmd_lattice_mc(args):
    if args.trials < 1:
        raise InputError("trials must be >= 1")
    try:
        code = lattice.NestedLatticeCode(fine_scale=args.gamma, nesting=args.q)
    except ValueError as e:
        raise InputError(str(e)) from e
    grid = [float(s) for s in args.snr_db]
    rows = lattice.monte_carlo_sum_decode(code, grid, args.trials,
                                          seed=args.seed)
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(["snr_db", "trials", "errors", "error_rate"])
    for snr_db, trials, errors, rate in rows:
        w.writerow([f"{snr_db:g}", trials, errors, f"{rate:.6g}"])
    _write_out(buf.getvalue(), args.output)
    return EXIT_OK


# ---------------------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(prog="ychannel",
                                description="Y-channel simulation toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("dyc-demo",
                       help="run the (5,4,3) deterministic toy example")
    d.add_argument("--exhaustive", action="store_true",
                   help="verify all 2^7 message-bit patterns")
    d.add_argument("--no-cyclic", action="store_true",
                   help="show that bi+uni strategies alone are infeasible")
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--output")
    d.set_defaults(func=cmd_dyc_demo)

    r = sub.add_parser("region",
                       help="substream bounds and achievable tuple")
    r.add_argument("config", nargs="?")
    r.add_argument("allocation", nargs="?")
    r.add_argument("--pin", action="store_true",
                   help="evaluate the three pinned fidelity configs")
    r.add_argument("--output")
    r.set_defaults(func=cmd_region)

    o = sub.add_parser("optimize", help="weighted sum-rate maximization")
    o.add_argument("config")
    o.add_argument("--weights", type=float, nargs=6, required=True,
                   metavar=("W12", "W13", "W21", "W23", "W31", "W32"))
    o.add_argument("--budget", type=int, default=10_000)
    o.add_argument("--seed", type=int, default=0)
    o.add_argument("--output")
    o.set_defaults(func=cmd_optimize)

    c = sub.add_parser("corollary",
                       help="constant-gap region membership check")
    c.add_argument("config")
    c.add_argument("rates")
    c.set_defaults(func=cmd_corollary)

    m = sub.add_parser("lattice-mc",
                       help="modulo-sum decoding error-rate curve")
    m.add_argument("--q", type=int, default=4)
    m.add_argument("--gamma", type=float, default=1.0)
    m.add_argument("--snr-db", nargs="+",
                   default=["0", "5", "10", "15", "20", "inf"])
    m.add_argument("--trials", type=int, default=10_000)
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("--output")
    m.set_defaults(func=cmd_lattice_mc)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
