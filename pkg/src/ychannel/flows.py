"""Channel configuration, rate tuples, and flow decomposition.

A rate demand between the three users splits into three kinds of traffic:
bi-directional pair exchanges, a cyclic three-way flow, and uni-directional
remainders.  The decomposition here is greedy (bi first, then cyclic, then
uni) which makes the result unique.
"""

import json
import math
from dataclasses import dataclass, fields


def _check_finite(name, value):
    if not math.isfinite(float(value)):
        raise ValueError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class ChannelConfig:
    """Real channel gains and the common power budget (linear units)."""

    h1: float
    h2: float
    h3: float
    P: float

    def __post_init__(self):
        for f in fields(self):
            _check_finite(f.name, getattr(self, f.name))
        if self.P <= 0:
            raise ValueError(f"P must be positive, got {self.P}")
        if self.h1 == 0 or self.h2 == 0 or self.h3 == 0:
            raise ValueError("channel gains must be nonzero")
        if not (self.h1 ** 2 >= self.h2 ** 2 >= self.h3 ** 2):
            raise ValueError(
                "gains must satisfy h1^2 >= h2^2 >= h3^2, got "
                f"({self.h1}, {self.h2}, {self.h3})"
            )

    @property
    def gains(self):
        return (self.h1, self.h2, self.h3)

    def to_dict(self):
        return {"h1": self.h1, "h2": self.h2, "h3": self.h3, "P": self.P}

    @classmethod
    def from_dict(cls, d):
        return cls(h1=d["h1"], h2=d["h2"], h3=d["h3"], P=d["P"])


# Ordered message pairs (src, dst); also the field order of RateTuple.
PAIRS = ((1, 2), (1, 3), (2, 1), (2, 3), (3, 1), (3, 2))


@dataclass(frozen=True)
class RateTuple:
    """Six pairwise rates, Rij = rate from user i to user j (bits/use)."""

    R12: float = 0
    R13: float = 0
    R21: float = 0
    R23: float = 0
    R31: float = 0
    R32: float = 0

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            _check_finite(f.name, v)
            if v < 0:
                raise ValueError(f"{f.name} must be nonnegative, got {v}")

    def as_tuple(self):
        return (self.R12, self.R13, self.R21, self.R23, self.R31, self.R32)

    def rate(self, src, dst):
        return getattr(self, f"R{src}{dst}")

    def to_dict(self):
        return {f"R{i}{j}": self.rate(i, j) for i, j in PAIRS}

    @classmethod
    def from_dict(cls, d):
        return cls(**{k: d[k] for k in ("R12", "R13", "R21", "R23", "R31", "R32")})

    @classmethod
    def from_sequence(cls, seq):
        return cls(*seq)


@dataclass(frozen=True)
class FlowDecomposition:
    """Split of a rate tuple into bi-directional, cyclic, and uni parts.

    b12 is the common rate of the 1<->2 exchange (likewise b13, b23).
    c123 is the rate of the cycle 1->2->3->1, c132 of the cycle 1->3->2->1.
    The u fields are the one-way remainders.
    """

    b12: float = 0
    b13: float = 0
    b23: float = 0
    c123: float = 0
    c132: float = 0
    u12: float = 0
    u13: float = 0
    u21: float = 0
    u23: float = 0
    u31: float = 0
    u32: float = 0

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            _check_finite(f.name, v)
            if v < 0:
                raise ValueError(f"{f.name} must be nonnegative, got {v}")

    def uni(self, src, dst):
        return getattr(self, f"u{src}{dst}")

    def bi(self, j, k):
        j, k = min(j, k), max(j, k)
        return getattr(self, f"b{j}{k}")

    def to_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @classmethod
    def from_dict(cls, d):
        return cls(**d)


def decompose_flows(r: RateTuple) -> FlowDecomposition:
    """Greedy split: maximal bi extraction, then cyclic, then uni remainder."""
    b12 = min(r.R12, r.R21)
    b13 = min(r.R13, r.R31)
    b23 = min(r.R23, r.R32)
    rem = {
        (1, 2): r.R12 - b12, (2, 1): r.R21 - b12,
        (1, 3): r.R13 - b13, (3, 1): r.R31 - b13,
        (2, 3): r.R23 - b23, (3, 2): r.R32 - b23,
    }
    # Cycle 1->2->3->1 is carried by the messages 1->2, 2->3, 3->1.
    c123 = min(rem[(1, 2)], rem[(2, 3)], rem[(3, 1)])
    for p in ((1, 2), (2, 3), (3, 1)):
        rem[p] -= c123
    c132 = min(rem[(1, 3)], rem[(3, 2)], rem[(2, 1)])
    for p in ((1, 3), (3, 2), (2, 1)):
        rem[p] -= c132
    return FlowDecomposition(
        b12=b12, b13=b13, b23=b23, c123=c123, c132=c132,
        u12=rem[(1, 2)], u13=rem[(1, 3)], u21=rem[(2, 1)],
        u23=rem[(2, 3)], u31=rem[(3, 1)], u32=rem[(3, 2)],
    )


def recompose(d: FlowDecomposition) -> RateTuple:
    """Inverse of decompose_flows: sum each pair's b, c, and u parts."""
    return RateTuple(
        R12=d.b12 + d.c123 + d.u12,
        R13=d.b13 + d.c132 + d.u13,
        R21=d.b12 + d.c132 + d.u21,
        R23=d.b23 + d.c123 + d.u23,
        R31=d.b13 + d.c123 + d.u31,
        R32=d.b23 + d.c132 + d.u32,
    )


def to_json(obj) -> str:
    return json.dumps(obj.to_dict(), sort_keys=True)


def config_from_json(s: str) -> ChannelConfig:
    return ChannelConfig.from_dict(json.loads(s))


def rates_from_json(s: str) -> RateTuple:
    return RateTuple.from_dict(json.loads(s))


def decomposition_from_json(s: str) -> FlowDecomposition:
    return FlowDecomposition.from_dict(json.loads(s))
