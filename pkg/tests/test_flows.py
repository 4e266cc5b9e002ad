import json
import random
from fractions import Fraction

import pytest

from ychannel import flows
from ychannel.flows import (
    ChannelConfig, FlowDecomposition, RateTuple, decompose_flows, recompose,
)


def test_toy_decomposition():
    d = decompose_flows(RateTuple(0, 2, 2, 1, 0, 2))
    assert d.b23 == 1 and d.b12 == 0 and d.b13 == 0
    assert d.c132 == 1 and d.c123 == 0
    assert d.u13 == 1 and d.u21 == 1
    assert d.u12 == d.u23 == d.u31 == d.u32 == 0


def test_zero_tuple():
    d = decompose_flows(RateTuple())
    assert all(getattr(d, f) == 0 for f in d.to_dict())


def test_single_one_way():
    d = decompose_flows(RateTuple(R12=1))
    assert d.u12 == 1
    assert sum(d.to_dict().values()) == 1


def test_recompose_toy_roundtrip():
    r = RateTuple(0, 2, 2, 1, 0, 2)
    assert recompose(decompose_flows(r)) == r


def test_recompose_bi_pair_only():
    assert recompose(FlowDecomposition(b12=2)) == RateTuple(2, 0, 2, 0, 0, 0)


def test_roundtrip_random_rationals():
    rng = random.Random(7)
    for _ in range(200):
        vals = [Fraction(rng.randrange(20), rng.randrange(1, 8))
                for _ in range(6)]
        r = RateTuple(*vals)
        d = decompose_flows(r)
        assert recompose(d) == r  # exact on rationals


def test_roundtrip_random_floats():
    rng = random.Random(8)
    for _ in range(200):
        r = RateTuple(*(rng.uniform(0, 10) for _ in range(6)))
        back = recompose(decompose_flows(r))
        for a, b in zip(back.as_tuple(), r.as_tuple()):
            assert abs(a - b) <= 1e-12


def test_one_uni_remainder_zero_per_pair():
    rng = random.Random(9)
    for _ in range(200):
        d = decompose_flows(RateTuple(*(rng.randrange(6) for _ in range(6))))
        assert min(d.u12, d.u21) == 0
        assert min(d.u13, d.u31) == 0
        assert min(d.u23, d.u32) == 0
        assert d.c123 * d.c132 == 0


PERMS = [(1, 2, 3), (1, 3, 2), (2, 1, 3), (2, 3, 1), (3, 1, 2), (3, 2, 1)]


def _sign(p):
    return 1 if p in ((1, 2, 3), (2, 3, 1), (3, 1, 2)) else -1


def test_permutation_equivariance():
    rng = random.Random(10)
    for _ in range(50):
        rates = {p: rng.randrange(5) for p in flows.PAIRS}
        d = decompose_flows(RateTuple(**{f"R{i}{j}": v
                                         for (i, j), v in rates.items()}))
        for perm in PERMS:
            sigma = dict(zip((1, 2, 3), perm))
            permuted = {(sigma[i], sigma[j]): v for (i, j), v in rates.items()}
            dp = decompose_flows(RateTuple(**{f"R{i}{j}": v
                                              for (i, j), v in permuted.items()}))
            for j, k in ((1, 2), (1, 3), (2, 3)):
                assert dp.bi(sigma[j], sigma[k]) == d.bi(j, k)
            if _sign(perm) == 1:
                assert (dp.c123, dp.c132) == (d.c123, d.c132)
            else:
                assert (dp.c123, dp.c132) == (d.c132, d.c123)
            for i, j in flows.PAIRS:
                assert dp.uni(sigma[i], sigma[j]) == d.uni(i, j)


def test_json_field_names():
    cfg = ChannelConfig(2.0, 1.0, 0.5, 10.0)
    assert set(json.loads(flows.to_json(cfg))) == {"h1", "h2", "h3", "P"}
    r = RateTuple(1, 2, 3, 4, 5, 6)
    assert json.loads(flows.to_json(r)) == {
        "R12": 1, "R13": 2, "R21": 3, "R23": 4, "R31": 5, "R32": 6}
    d = decompose_flows(r)
    keys = set(json.loads(flows.to_json(d)))
    assert {"b12", "b13", "b23", "c123", "c132"} <= keys
    assert flows.rates_from_json(flows.to_json(r)) == r
    assert flows.decomposition_from_json(flows.to_json(d)) == d
    assert flows.config_from_json(flows.to_json(cfg)) == cfg


def test_config_validation():
    with pytest.raises(ValueError):
        ChannelConfig(1.0, 2.0, 0.5, 10.0)  # gains out of order
    with pytest.raises(ValueError):
        ChannelConfig(1.0, 1.0, 1.0, 0.0)  # nonpositive power
    with pytest.raises(ValueError):
        ChannelConfig(1.0, 1.0, 0.0, 10.0)  # zero gain
    with pytest.raises(ValueError):
        RateTuple(R12=-1)
