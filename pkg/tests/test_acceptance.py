"""Acceptance suite: one test per criterion, each printing a PASS line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
status lines.
"""

import itertools
import math
import time

import numpy as np

from ychannel import dyc, gaussian, lattice
from ychannel.flows import ChannelConfig, RateTuple, decompose_flows
from ychannel.gaussian import (
    DownlinkPowers, UplinkPowers, achievable_point, baseline_bi_allocation,
    corollary_rhs, downlink_bounds, maximize_objective, outer_bound_proxy,
    pinned_allocation, uplink_bounds,
)

TOY_CFG = dyc.DycConfig(5, 4, 3)
TOY_TUPLE = RateTuple(0, 2, 2, 1, 0, 2)


def _report(n, desc):
    print(f"ACCEPTANCE {n}: PASS - {desc}")


def test_criterion_1_toy_reproduction():
    t0 = time.monotonic()
    plan = dyc.plan_levels(TOY_CFG, decompose_flows(TOY_TUPLE))
    assert plan.downlink_levels_used() == [1, 2, 3, 4, 5]
    rep = dyc.verify_end_to_end(TOY_CFG, TOY_TUPLE)
    assert rep.passed and rep.exhaustive and rep.patterns_checked == 2 ** 7
    elapsed = time.monotonic() - t0
    assert elapsed < 1.0
    _report(1, f"toy (5,4,3) plan uses all 5 levels, 128/128 patterns exact "
               f"({elapsed:.2f}s)")


def test_criterion_2_cyclic_necessity():
    t0 = time.monotonic()
    assert not dyc.feasible_without_cyclic(TOY_CFG, TOY_TUPLE)
    elapsed = time.monotonic() - t0
    assert elapsed < 10.0
    _report(2, f"exhaustive bi+uni search finds no plan for the toy tuple "
               f"({elapsed:.2f}s)")


def test_criterion_3_dyc_oracle_equivalence():
    t0 = time.monotonic()
    configs = [dyc.DycConfig(n1, n2, n3)
               for n1 in range(4) for n2 in range(n1 + 1)
               for n3 in range(n2 + 1)]
    accepted = 0
    for cfg in configs:
        for tup in itertools.product(range(4), repeat=6):
            r = RateTuple(*tup)
            try:
                dyc.plan_levels(cfg, decompose_flows(r))
            except dyc.InfeasiblePlan:
                continue
            rep = dyc.verify_end_to_end(cfg, r)
            assert rep.passed and rep.exhaustive, (cfg, tup)
            accepted += 1
    elapsed = time.monotonic() - t0
    assert elapsed < 60.0
    _report(3, f"{accepted} accepted plans over {len(configs)} configs, "
               f"all bit patterns exact ({elapsed:.1f}s)")


# --------------------------------------------------------------------------
# criterion 4: independent re-derivation of all 27 rate constraints,
# transcribed directly with plain math (no reuse of the library helpers)

def _independent_constraints(h1, h2, h3, P, u, d):
    def C(x):
        return 0.5 * math.log(1.0 + x, 2)

    def Cp(x):
        return max(0.0, C(x)) if x > -1 else 0.0

    a, b, c = h1 * h1, h2 * h2, h3 * h3
    P1 = (u["P12b"] + u["P13b"] + u["P12c"] + u["P13c"] + u["tP13c"]
          + u["P12u"] + u["P13u"])
    P2 = (u["P21b"] + u["P23b"] + u["P21c"] + u["P23c"] + u["tP23c"]
          + u["P21u"] + u["P23u"])
    P3 = (u["P31b"] + u["P32b"] + u["P31c"] + u["P32c"]
          + u["P31u"] + u["P32u"])
    s2 = 1 + c * (2 * u["P31b"] + 2 * u["P32b"] + 2 * u["P31c"]
                  + 2 * u["P32c"] + u["P31u"] + u["P32u"])
    sr1 = 1 + c * (d["t12"] + d["t32"] + d["s12"] + d["s21"] + d["r21"]
                   + d["t21"] + d["t31"])
    sr2 = 1 + b * (d["t21"] + d["t31"])
    return {
        "up_R12u": C(a * u["P12u"] / (1 + c * P3 + b * P2
                                      + a * (P - u["P12u"]))),
        "up_R21u": C(b * u["P21u"] / (1 + c * P3 + b * (P2 - u["P21u"])
                                      + a * (P - u["P12u"] - u["P13u"]))),
        "up_R23u": C(b * u["P23u"] / (1 + c * P3
                                      + b * (P2 - u["P21u"] - u["P23u"])
                                      + a * (P - u["P12u"] - u["P13u"]))),
        "up_R13u": C(a * u["P13u"] / (1 + c * P3 + b * P2
                                      + a * (P - u["P12u"] - u["P13u"]))),
        "up_R132c_h2": Cp(b * u["P21c"]
                          / (s2 + 2 * b * (u["P21b"] + u["P23c"])) - 0.5),
        "up_R123c_h2": Cp(b * u["P23c"] / (s2 + 2 * b * u["P21b"]) - 0.5),
        "up_R21b": Cp(b * u["P21b"] / s2 - 0.5),
        "up_R31u": C(c * u["P31u"]
                     / (1 + c * (2 * u["P32b"] + 2 * u["P31b"]
                                 + 2 * u["P31c"] + 2 * u["P32c"]
                                 + u["P32u"]))),
        "up_R32u": C(c * u["P32u"]
                     / (1 + 2 * c * (u["P32b"] + u["P31b"] + u["P31c"]
                                     + u["P32c"]))),
        "up_R132c_h3": Cp(c * u["P32c"]
                          / (1 + 2 * c * (u["P32b"] + u["P31b"]
                                          + u["P31c"])) - 0.5),
        "up_R123c_h3": Cp(c * u["P31c"]
                          / (1 + 2 * c * (u["P32b"] + u["P31b"])) - 0.5),
        "up_R31b": Cp(c * u["P31b"] / (1 + 2 * c * u["P32b"]) - 0.5),
        "up_R32b": Cp(c * u["P32b"] - 0.5),
        "down_R13u": C(c * d["t13"] / (sr1 + c * (d["t23"] + d["s32"]
                                                  + d["s31"] + d["r31"]
                                                  + d["r32"]))),
        "down_R23u": C(c * d["t23"] / (sr1 + c * (d["s32"] + d["s31"]
                                                  + d["r31"] + d["r32"]))),
        "down_R132c_u3": C(c * d["s32"] / (sr1 + c * (d["s31"] + d["r31"]
                                                      + d["r32"]))),
        "down_R123c_u3": C(c * d["s31"] / (sr1 + c * (d["r31"] + d["r32"]))),
        "down_R31b": C(c * d["r31"] / (sr1 + c * d["r32"])),
        "down_R32b": C(c * d["r32"] / sr1),
        "down_R12u": C(b * d["t12"] / (sr2 + b * (d["t32"] + d["s12"]
                                                  + d["s21"] + d["r21"]))),
        "down_R32u": C(b * d["t32"] / (sr2 + b * (d["s12"] + d["s21"]
                                                  + d["r21"]))),
        "down_R123c_u2": C(b * d["s12"] / (sr2 + b * (d["s21"] + d["r21"]))),
        "down_R132c_u2": C(b * d["s21"] / (sr2 + b * d["r21"])),
        "down_R21b": C(b * d["r21"] / sr2),
        "down_R21u": C(a * d["t21"] / (1 + a * d["t31"])),
        "down_R31u": C(a * d["t31"]),
    }


def _module_constraints(cfg, up, down):
    ub = uplink_bounds(cfg, up)
    db = downlink_bounds(cfg, down)
    out = {}
    for n in ("R12u", "R21u", "R23u", "R13u", "R132c_h2", "R123c_h2",
              "R21b", "R31u", "R32u", "R132c_h3", "R123c_h3", "R31b",
              "R32b"):
        out[f"up_{n}"] = getattr(ub, n)
    for n in ("R13u", "R23u", "R132c_u3", "R123c_u3", "R31b", "R32b",
              "R12u", "R32u", "R123c_u2", "R132c_u2", "R21b", "R21u",
              "R31u"):
        out[f"down_{n}"] = getattr(db, n)
    return out


def test_criterion_4_formula_fidelity():
    worst = 0.0
    for name in ("A", "B", "C"):
        cfg, up, down = pinned_allocation(name)
        got = _module_constraints(cfg, up, down)
        want = _independent_constraints(
            cfg.h1, cfg.h2, cfg.h3, cfg.P, up.to_dict(), down.to_dict())
        assert set(got) == set(want) and len(got) == 26
        for key in want:
            denom = max(abs(want[key]), 1e-300)
            rel = abs(got[key] - want[key]) / denom
            worst = max(worst, rel)
            assert rel <= 1e-12, (name, key, got[key], want[key])
    _report(4, f"27 constraint evaluators (26 distinct formulas + the "
               f"shared C/C+ pair) match re-derivation, worst rel err "
               f"{worst:.2e}")


def test_criterion_5_containment():
    rng = np.random.default_rng(2024)
    checked = 0
    for _ in range(25):
        h = np.sort(np.abs(rng.normal(0, 1, 3)))[::-1] + 0.05
        P = float(10 ** rng.uniform(-1, 4))
        cfg = ChannelConfig(float(h[0]), float(h[1]), float(h[2]), P)
        for _ in range(45):
            up, down = gaussian._project(
                cfg, rng.uniform(0, P, 13), rng.uniform(0, P / 13, 13))
            r = achievable_point(cfg, up, down)
            assert min(gaussian.proxy_slacks(cfg, r)) >= 0.0, (cfg, r)
            checked += 1
    assert checked >= 1000
    _report(5, f"{checked} random feasible allocations inside the proxy "
               f"outer bound, zero violations")


def test_criterion_6_scale_invariance():
    rng = np.random.default_rng(77)
    pairs = 0
    for _ in range(100):
        h = np.sort(np.abs(rng.normal(0, 1, 3)))[::-1] + 0.05
        P = float(10 ** rng.uniform(-1, 3))
        cfg = ChannelConfig(float(h[0]), float(h[1]), float(h[2]), P)
        up, down = gaussian._project(
            cfg, rng.uniform(0, P, 13), rng.uniform(0, P / 13, 13))
        base = _module_constraints(cfg, up, down)
        for lam in (0.1, 2.0, 10.0):
            cfg2 = ChannelConfig(lam * cfg.h1, lam * cfg.h2, lam * cfg.h3,
                                 P / lam ** 2)
            up2 = UplinkPowers(**{k: v / lam ** 2
                                  for k, v in up.to_dict().items()})
            down2 = DownlinkPowers(**{k: v / lam ** 2
                                      for k, v in down.to_dict().items()})
            scaled = _module_constraints(cfg2, up2, down2)
            for key in base:
                denom = max(abs(base[key]), 1e-300)
                assert abs(scaled[key] - base[key]) / denom <= 1e-12, key
        pairs += 1
    _report(6, f"{pairs} (config, allocation) pairs invariant under "
               f"lambda in (0.1, 2, 10)")


def test_criterion_7_lattice_algebra():
    t0 = time.monotonic()
    rng = np.random.default_rng(5)
    for q in (2, 4, 8, 16):
        code = lattice.NestedLatticeCode(1.0, q)
        for ma, mb in itertools.product(range(q), repeat=2):
            la, lb = code.codeword(ma), code.codeword(mb)
            da, db = code.random_dither(rng), code.random_dither(rng)
            y = lattice.encode(code, ma, da) + lattice.encode(code, mb, db)
            s = lattice.relay_decode_sum(code, y, da, db, 0.0)
            truth = code.mod_coarse(la + lb)
            assert abs((s - truth)[0]) < 1e-9
            assert abs((lattice.extract_partner(code, truth, la) - lb)[0]) \
                < 1e-9
    # alignment point-set identity for h = (2, 1), f = h2/h1
    h1, h2 = 2.0, 1.0
    for q in (2, 4, 8, 16):
        code = lattice.NestedLatticeCode(1.0, q)
        code1 = lattice.scaled_code(code, h2 / h1)
        aligned = lattice.NestedLatticeCode(h2 * code.fine_scale, q)
        book = {round(float(p), 9) for p in aligned.codebook()[:, 0]}
        for ma, mb in itertools.product(range(q), repeat=2):
            combo = h1 * code1.codeword(ma) + h2 * code.codeword(mb)
            assert round(float(aligned.mod_coarse(combo)[0]), 9) in book
    elapsed = time.monotonic() - t0
    assert elapsed < 5.0
    _report(7, f"noiseless sum decode, extraction, and alignment exact for "
               f"q in (2,4,8,16) ({elapsed:.2f}s)")


def test_criterion_8_lattice_monte_carlo():
    code = lattice.NestedLatticeCode(1.0, 2)
    grid = [0.0, 4.0, 8.0, 12.0, 16.0, 20.0, math.inf]
    rows = lattice.monte_carlo_sum_decode(code, grid, 10_000, seed=11)
    assert rows[-1][3] == 0.0
    for (s0, n0, e0, p0), (s1, n1, e1, p1) in zip(rows, rows[1:]):
        sigma = math.sqrt(max(p0 * (1 - p0) / n0, 0.0))
        assert p1 <= p0 + 2 * sigma, (s0, p0, s1, p1)
    _report(8, "error rate nonincreasing in SNR (2-sigma), noiseless row "
               "exactly zero")


def test_criterion_9_corollary_arithmetic():
    cfg = ChannelConfig(1.0, 1.0, 1.0, 15.0)
    assert corollary_rhs(cfg)[0] == 0.0
    rng = np.random.default_rng(13)
    for _ in range(25):
        h = np.sort(np.abs(rng.normal(0, 2, 3)))[::-1] + 0.1
        cfg = ChannelConfig(*map(float, h), float(10 ** rng.uniform(-1, 4)))
        diff = tuple(p - r for p, r in
                     zip(outer_bound_proxy(cfg), corollary_rhs(cfg)))
        assert diff == (2.0, 2.0, 3.0, 3.0, 3.0, 3.0, 3.5, 3.5)
    _report(9, "C(15)-2 = 0 exactly; proxy-minus-corollary constants "
               "(2,2,3,3,3,3,3.5,3.5) for arbitrary configs")


def test_criterion_10_optimizer_sanity():
    cfg = ChannelConfig(1.0, 1.0, 1.0, 100.0)
    fu, dv = baseline_bi_allocation(cfg)
    up, down = gaussian._project(cfg, fu, dv)
    base_obj = float(sum(achievable_point(cfg, up, down).as_tuple()))
    res = maximize_objective(cfg, [1.0] * 6, budget=10_000, seed=0)
    assert res.objective >= base_obj
    _report(10, f"optimizer objective {res.objective:.4f} >= bi-only "
                f"baseline {base_obj:.4f} at budget 10^4")
