"""Bit-exact simulator of the linear-shift deterministic Y-channel.

Users 1..3 exchange bits through a relay over n1 >= n2 >= n3 signal levels.
Level 1 is the strongest; user k transmits on and hears the top nk levels in
both directions.  Superposition on a level is XOR.  The scheduler places
bi-directional exchanges (one XOR per level), cyclic triples (3 bits on
2 levels), and uni-directional bits, then the simulator runs the uplink,
the relay forwarding, and per-user decoding.
"""

import itertools
import random
from dataclasses import dataclass, fields

from .flows import FlowDecomposition, RateTuple, decompose_flows

USERS = (1, 2, 3)


class InfeasiblePlan(Exception):
    """No level assignment satisfies the reach budgets."""


@dataclass(frozen=True)
class DycConfig:
    n1: int
    n2: int
    n3: int

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not isinstance(v, int) or v < 0:
                raise ValueError(f"{f.name} must be a nonnegative integer")
        if not (self.n1 >= self.n2 >= self.n3):
            raise ValueError("levels must satisfy n1 >= n2 >= n3")

    def reach(self, user):
        return (self.n1, self.n2, self.n3)[user - 1]


@dataclass(frozen=True)
class BitRef:
    """A single message bit: kind in {'b','c','u'}, with its position in
    the src->dst message vector."""

    kind: str
    src: int
    dst: int
    index: int

    @property
    def label(self):
        return f"{self.kind}{self.src}{self.dst}[{self.index}]"


@dataclass(frozen=True)
class BiTxn:
    """One bit exchanged both ways between users j and k on a shared level."""

    j: int
    k: int
    bit_jk: BitRef
    bit_kj: BitRef
    up_level: int
    down_level: int


@dataclass(frozen=True)
class CycTxn:
    """One bit-triple of the cycle j->k->l->j.

    User j sends its bit on both uplink levels; k aligns on up1 and l on up2.
    The relay forms sum1 = c_jk ^ c_kl (forwarded for users k and l) and
    sum2 = c_jk ^ c_lj (forwarded for users j and l).
    """

    j: int
    k: int
    l: int
    bit_jk: BitRef
    bit_kl: BitRef
    bit_lj: BitRef
    up1: int
    up2: int
    down1: int
    down2: int


@dataclass(frozen=True)
class UniTxn:
    src: int
    dst: int
    bit: BitRef
    up_level: int
    down_level: int


@dataclass(frozen=True)
class DycLevelPlan:
    cfg: DycConfig
    txns: tuple

    def uplink_map(self):
        """level -> tuple of (sender, BitRef) superposed there."""
        up = {}
        for t in self.txns:
            if isinstance(t, BiTxn):
                up.setdefault(t.up_level, []).extend(
                    [(t.j, t.bit_jk), (t.k, t.bit_kj)])
            elif isinstance(t, CycTxn):
                up.setdefault(t.up1, []).extend(
                    [(t.j, t.bit_jk), (t.k, t.bit_kl)])
                up.setdefault(t.up2, []).extend(
                    [(t.j, t.bit_jk), (t.l, t.bit_lj)])
            else:
                up.setdefault(t.up_level, []).append((t.src, t.bit))
        return {lv: tuple(v) for lv, v in up.items()}

    def downlink_map(self):
        """level -> (source uplink level, tuple of (sender, BitRef))."""
        down = {}
        up = self.uplink_map()
        for t in self.txns:
            if isinstance(t, BiTxn):
                down[t.down_level] = (t.up_level, up[t.up_level])
            elif isinstance(t, CycTxn):
                down[t.down1] = (t.up1, up[t.up1])
                down[t.down2] = (t.up2, up[t.up2])
            else:
                down[t.down_level] = (t.up_level, up[t.up_level])
        return down

    def check_levels(self):
        """Structural safety: reach budgets and downlink-level uniqueness."""
        seen_down = set()
        for t in self.txns:
            if isinstance(t, BiTxn):
                cap = min(self.cfg.reach(t.j), self.cfg.reach(t.k))
                assert 1 <= t.up_level <= cap and 1 <= t.down_level <= cap
                downs = [t.down_level]
            elif isinstance(t, CycTxn):
                rj, rk, rl = (self.cfg.reach(u) for u in (t.j, t.k, t.l))
                assert 1 <= t.up1 <= min(rj, rk)
                assert 1 <= t.up2 <= min(rj, rl)
                assert 1 <= t.down1 <= min(rk, rl)
                assert 1 <= t.down2 <= min(rj, rl)
                downs = [t.down1, t.down2]
            else:
                assert 1 <= t.up_level <= self.cfg.reach(t.src)
                assert 1 <= t.down_level <= self.cfg.reach(t.dst)
                downs = [t.down_level]
            for lv in downs:
                assert lv not in seen_down, f"downlink level {lv} reused"
                seen_down.add(lv)
        # one scheduled symbol per uplink level
        up_syms = []
        for t in self.txns:
            if isinstance(t, CycTxn):
                up_syms.extend([t.up1, t.up2])
            else:
                up_syms.append(t.up_level)
        assert len(up_syms) == len(set(up_syms)), "uplink level reused"

    def downlink_levels_used(self):
        return sorted(self.downlink_map())


# ---------------------------------------------------------------------------
# planning

def _cycle_rotations(cycle):
    """All rotations (j,k,l) of a cycle given as an ordered user triple."""
    a, b, c = cycle
    return [(a, b, c), (b, c, a), (c, a, b)]


def _rotation_caps(cfg, jkl):
    j, k, l = jkl
    rj, rk, rl = cfg.reach(j), cfg.reach(k), cfg.reach(l)
    up = [min(rj, rk), min(rj, rl)]
    down = [min(rk, rl), min(rj, rl)]
    return up, down


def _best_rotation(cfg, cycle):
    """Rotation whose sorted level caps are lexicographically largest
    (dominant for feasibility); ties broken by first user."""
    best = None
    for jkl in _cycle_rotations(cycle):
        up, down = _rotation_caps(cfg, jkl)
        score = tuple(sorted(up + down))
        if best is None or score > best[0]:
            best = (score, jkl)
    return best[1]


def _int_fields(d: FlowDecomposition):
    out = {}
    for f in fields(d):
        v = getattr(d, f.name)
        iv = int(round(float(v)))
        if abs(float(v) - iv) > 0:
            raise ValueError(f"{f.name}={v} is not an integer bit count")
        out[f.name] = iv
    return out


def _message_offsets(d):
    """Per ordered pair, the start index of the b, c, and u bit ranges."""
    vals = _int_fields(d)
    offs = {}
    for (i, j), b, c in (
        ((1, 2), vals["b12"], vals["c123"]),
        ((2, 1), vals["b12"], vals["c132"]),
        ((1, 3), vals["b13"], vals["c132"]),
        ((3, 1), vals["b13"], vals["c123"]),
        ((2, 3), vals["b23"], vals["c123"]),
        ((3, 2), vals["b23"], vals["c132"]),
    ):
        offs[(i, j)] = (0, b, b + c)
    return offs


# slot class ranks: uplink ties go bi < cyclic < uni, downlink ties go
# bi < uni < cyclic; this reproduces the reference layout on (5,4,3).
_UP_RANK = {"b": 0, "c": 1, "u": 2}
_DOWN_RANK = {"b": 0, "u": 1, "c": 2}


def _assign(slots, n_levels, rank):
    """Greedily give each slot the lowest free level within its cap.

    Slots are (cap, kind, key); processing caps in ascending order makes the
    greedy exact for this matching problem.  Raises InfeasiblePlan naming the
    first unsatisfiable slot.
    """
    free = list(range(1, n_levels + 1))
    out = {}
    for cap, kind, key in sorted(slots, key=lambda s: (s[0], rank[s[1]])):
        lv = next((x for x in free if x <= cap), None)
        if lv is None:
            raise InfeasiblePlan(
                f"no level <= {cap} left for {kind}-slot {key}")
        free.remove(lv)
        out[key] = lv
    return out


def _build_slots(cfg, d):
    """Slot demands (cap, kind, key) for uplink and downlink, plus the
    stream records needed to build transactions afterwards."""
    vals = _int_fields(d)
    offs = _message_offsets(d)
    up_slots, down_slots, streams = [], [], []

    # bi pairs, weakest pair first
    for j, k in ((2, 3), (1, 3), (1, 2)):
        cap = min(cfg.reach(j), cfg.reach(k))
        for i in range(vals[f"b{j}{k}"]):
            key = ("b", j, k, i)
            up_slots.append((cap, "b", ("up", key)))
            down_slots.append((cap, "b", ("down", key)))
            streams.append(("b", j, k, i))

    for name, cycle in (("c123", (1, 2, 3)), ("c132", (1, 3, 2))):
        count = vals[name]
        if count == 0:
            continue
        jkl = _best_rotation(cfg, cycle)
        up_caps, down_caps = _rotation_caps(cfg, jkl)
        for i in range(count):
            key = ("c", name, i)
            up_slots.append((up_caps[0], "c", ("up1", key)))
            up_slots.append((up_caps[1], "c", ("up2", key)))
            down_slots.append((down_caps[0], "c", ("down1", key)))
            down_slots.append((down_caps[1], "c", ("down2", key)))
            streams.append(("c", name, jkl, i))

    for src, dst in ((1, 2), (1, 3), (2, 1), (2, 3), (3, 1), (3, 2)):
        for i in range(vals[f"u{src}{dst}"]):
            key = ("u", src, dst, i)
            up_slots.append((cfg.reach(src), "u", ("up", key)))
            down_slots.append((cfg.reach(dst), "u", ("down", key)))
            streams.append(("u", src, dst, i))

    return up_slots, down_slots, streams, offs


def plan_levels(cfg: DycConfig, d: FlowDecomposition) -> DycLevelPlan:
    """Schedule every bit of an integer decomposition onto relay levels."""
    up_slots, down_slots, streams, offs = _build_slots(cfg, d)
    up = _assign(up_slots, cfg.n1, _UP_RANK)
    down = _assign(down_slots, cfg.n1, _DOWN_RANK)

    txns = []
    for s in streams:
        if s[0] == "b":
            _, j, k, i = s
            key = ("b", j, k, i)
            txns.append(BiTxn(
                j=j, k=k,
                bit_jk=BitRef("b", j, k, offs[(j, k)][0] + i),
                bit_kj=BitRef("b", k, j, offs[(k, j)][0] + i),
                up_level=up[("up", key)],
                down_level=down[("down", key)],
            ))
        elif s[0] == "c":
            _, name, (j, k, l), i = s
            key = ("c", name, i)
            txns.append(CycTxn(
                j=j, k=k, l=l,
                bit_jk=BitRef("c", j, k, offs[(j, k)][1] + i),
                bit_kl=BitRef("c", k, l, offs[(k, l)][1] + i),
                bit_lj=BitRef("c", l, j, offs[(l, j)][1] + i),
                up1=up[("up1", key)], up2=up[("up2", key)],
                down1=down[("down1", key)], down2=down[("down2", key)],
            ))
        else:
            _, src, dst, i = s
            key = ("u", src, dst, i)
            txns.append(UniTxn(
                src=src, dst=dst,
                bit=BitRef("u", src, dst, offs[(src, dst)][2] + i),
                up_level=up[("up", key)],
                down_level=down[("down", key)],
            ))
    plan = DycLevelPlan(cfg=cfg, txns=tuple(txns))
    plan.check_levels()
    return plan


# ---------------------------------------------------------------------------
# message sets and simulation

def message_lengths(r: RateTuple):
    return {(i, j): int(round(float(r.rate(i, j))))
            for i, j in ((1, 2), (1, 3), (2, 1), (2, 3), (3, 1), (3, 2))}


def random_messages(r: RateTuple, rng: random.Random):
    return {p: [rng.randrange(2) for _ in range(n)]
            for p, n in message_lengths(r).items()}


def _bit_value(msgs, ref: BitRef):
    vec = msgs[(ref.src, ref.dst)]
    if ref.index >= len(vec):
        raise ValueError(f"message {ref.src}->{ref.dst} too short for {ref.label}")
    return vec[ref.index]


def simulate_uplink(plan: DycLevelPlan, msgs):
    """Relay observation: XOR of the bits arriving on each level."""
    obs = {lv: 0 for lv in range(1, plan.cfg.n1 + 1)}
    for lv, contribs in plan.uplink_map().items():
        v = 0
        for _sender, ref in contribs:
            v ^= _bit_value(msgs, ref)
        obs[lv] = v
    return obs


def simulate_downlink(plan: DycLevelPlan, relay_obs):
    """Per-user view of the relay broadcast (top nk levels)."""
    emitted = {}
    for lv, (src_lv, _bits) in plan.downlink_map().items():
        if src_lv not in relay_obs:
            raise ValueError(f"plan forwards unknown relay level {src_lv}")
        emitted[lv] = relay_obs[src_lv]
    views = {}
    for user in USERS:
        nk = plan.cfg.reach(user)
        views[user] = {lv: v for lv, v in emitted.items() if lv <= nk}
    return views


def decode_user(plan: DycLevelPlan, user, user_obs, own_sent):
    """Recover every bit addressed to `user` from its downlink view.

    own_sent maps (user, dst) -> the user's transmitted bit vectors.
    """
    lengths = {}
    for t in plan.txns:
        for ref in _refs_of(t):
            key = (ref.src, ref.dst)
            lengths[key] = max(lengths.get(key, 0), ref.index + 1)
    recovered = {(s, d): [None] * n
                 for (s, d), n in lengths.items() if d == user}

    def obs(level):
        if level not in user_obs:
            raise ValueError(
                f"user {user} cannot see downlink level {level}")
        return user_obs[level]

    def own(ref: BitRef):
        return _bit_value(own_sent, ref)

    for t in plan.txns:
        if isinstance(t, BiTxn):
            if user == t.j:
                recovered[(t.k, t.j)][t.bit_kj.index] = \
                    obs(t.down_level) ^ own(t.bit_jk)
            elif user == t.k:
                recovered[(t.j, t.k)][t.bit_jk.index] = \
                    obs(t.down_level) ^ own(t.bit_kj)
        elif isinstance(t, CycTxn):
            if user == t.k:      # wants c_jk; knows c_kl; sum1 = c_jk^c_kl
                recovered[(t.j, t.k)][t.bit_jk.index] = \
                    obs(t.down1) ^ own(t.bit_kl)
            elif user == t.j:    # wants c_lj; knows c_jk; sum2 = c_jk^c_lj
                recovered[(t.l, t.j)][t.bit_lj.index] = \
                    obs(t.down2) ^ own(t.bit_jk)
            elif user == t.l:    # wants c_kl; sum1^sum2 = c_kl^c_lj
                recovered[(t.k, t.l)][t.bit_kl.index] = \
                    obs(t.down1) ^ obs(t.down2) ^ own(t.bit_lj)
        else:
            if user == t.dst:
                recovered[(t.src, t.dst)][t.bit.index] = obs(t.down_level)

    for key, vec in recovered.items():
        if any(v is None for v in vec):
            raise ValueError(f"plan leaves bits of {key} undecoded")
    return recovered


def run_pipeline(plan: DycLevelPlan, msgs):
    """Uplink, downlink, and decoding at every user for one message set."""
    relay = simulate_uplink(plan, msgs)
    views = simulate_downlink(plan, relay)
    decoded = {}
    for user in USERS:
        own = {p: v for p, v in msgs.items() if p[0] == user}
        decoded[user] = decode_user(plan, user, views[user], own)
    return relay, views, decoded


def _refs_of(t):
    if isinstance(t, BiTxn):
        return (t.bit_jk, t.bit_kj)
    if isinstance(t, CycTxn):
        return (t.bit_jk, t.bit_kl, t.bit_lj)
    return (t.bit,)


@dataclass(frozen=True)
class VerifyReport:
    passed: bool
    patterns_checked: int
    exhaustive: bool
    failures: int


def _all_patterns(lengths):
    keys = [p for p, n in lengths.items() for _ in range(n)]
    total = sum(lengths.values())
    for bits in itertools.product((0, 1), repeat=total):
        msgs = {p: [] for p in lengths}
        for p, b in zip(keys, bits):
            msgs[p].append(b)
        yield msgs


def verify_end_to_end(cfg: DycConfig, r: RateTuple, trials=10_000,
                      seed=0, exhaustive_limit=20) -> VerifyReport:
    """Plan the tuple and check exact recovery of every message bit.

    Exhaustive over all bit patterns when the total bit count is at most
    `exhaustive_limit`, randomized otherwise.
    """
    d = decompose_flows(r)
    plan = plan_levels(cfg, d)
    lengths = message_lengths(r)
    total = sum(lengths.values())
    failures = 0
    checked = 0
    exhaustive = total <= exhaustive_limit
    if exhaustive:
        pattern_iter = _all_patterns(lengths)
    else:
        rng = random.Random(seed)
        pattern_iter = (random_messages(r, rng) for _ in range(trials))
    for msgs in pattern_iter:
        _, _, decoded = run_pipeline(plan, msgs)
        checked += 1
        for user in USERS:
            for (s, dst), vec in decoded[user].items():
                if vec != msgs[(s, dst)]:
                    failures += 1
    return VerifyReport(passed=failures == 0, patterns_checked=checked,
                        exhaustive=exhaustive, failures=failures)


# ---------------------------------------------------------------------------
# exhaustive oracles (independent of the greedy path)

def _match_exists(caps, n_levels):
    """Brute-force: does an injective slot->level assignment exist with
    slot i placed at a level <= caps[i]?"""
    if len(caps) > n_levels:
        return False
    levels = range(1, n_levels + 1)
    for perm in itertools.permutations(levels, len(caps)):
        if all(lv <= cap for lv, cap in zip(perm, caps)):
            return True
    return len(caps) == 0


def exhaustive_feasible(cfg: DycConfig, d: FlowDecomposition) -> bool:
    """Plan-existence oracle: tries every cycle rotation and every level
    assignment.  Intended for small configs (n1 <= 6)."""
    vals = _int_fields(d)
    rotations = []
    for name, cycle in (("c123", (1, 2, 3)), ("c132", (1, 3, 2))):
        rotations.append(_cycle_rotations(cycle) if vals[name] else [None])
    for rot123, rot132 in itertools.product(*rotations):
        up_caps, down_caps = [], []
        for j, k in ((1, 2), (1, 3), (2, 3)):
            cap = min(cfg.reach(j), cfg.reach(k))
            n = vals[f"b{j}{k}"]
            up_caps += [cap] * n
            down_caps += [cap] * n
        for name, rot in (("c123", rot123), ("c132", rot132)):
            if rot is None:
                continue
            u, dn = _rotation_caps(cfg, rot)
            up_caps += u * vals[name]
            down_caps += dn * vals[name]
        for src, dst in ((1, 2), (1, 3), (2, 1), (2, 3), (3, 1), (3, 2)):
            n = vals[f"u{src}{dst}"]
            up_caps += [cfg.reach(src)] * n
            down_caps += [cfg.reach(dst)] * n
        if _match_exists(up_caps, cfg.n1) and _match_exists(down_caps, cfg.n1):
            return True
    return False


def feasible_without_cyclic(cfg: DycConfig, r: RateTuple) -> bool:
    """Can the tuple be served with bi + uni strategies only?  Searches all
    integer bi splits; the remainder is sent uni-directionally."""
    lengths = message_lengths(r)
    ranges = [
        range(min(lengths[(1, 2)], lengths[(2, 1)]) + 1),
        range(min(lengths[(1, 3)], lengths[(3, 1)]) + 1),
        range(min(lengths[(2, 3)], lengths[(3, 2)]) + 1),
    ]
    for b12, b13, b23 in itertools.product(*ranges):
        d = FlowDecomposition(
            b12=b12, b13=b13, b23=b23, c123=0, c132=0,
            u12=lengths[(1, 2)] - b12, u21=lengths[(2, 1)] - b12,
            u13=lengths[(1, 3)] - b13, u31=lengths[(3, 1)] - b13,
            u23=lengths[(2, 3)] - b23, u32=lengths[(3, 2)] - b23,
        )
        if exhaustive_feasible(cfg, d):
            return True
    return False


# ---------------------------------------------------------------------------
# trace output

def plan_trace(plan: DycLevelPlan, msgs):
    """JSON-friendly record of one full run (used by the CLI demo)."""
    relay, views, decoded = run_pipeline(plan, msgs)
    up = {
        str(lv): [f"{sender}:{ref.label}" for sender, ref in contribs]
        for lv, contribs in sorted(plan.uplink_map().items())
    }
    down = {
        str(lv): {
            "from_uplink_level": src_lv,
            "bits": [ref.label for _s, ref in bits],
        }
        for lv, (src_lv, bits) in sorted(plan.downlink_map().items())
    }
    return {
        "config": {"n1": plan.cfg.n1, "n2": plan.cfg.n2, "n3": plan.cfg.n3},
        "messages": {f"{s}->{d}": v for (s, d), v in sorted(msgs.items())},
        "uplink": up,
        "relay_observation": {str(lv): v for lv, v in sorted(relay.items())},
        "downlink": down,
        "recovered": {
            str(user): {f"{s}->{d}": v for (s, d), v in sorted(rec.items())}
            for user, rec in decoded.items()
        },
    }
