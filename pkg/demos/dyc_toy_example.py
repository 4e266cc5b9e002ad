"""Walk through the deterministic toy example step by step.

A (5,4,3)-level deterministic Y-channel serves the rate demand
(R12,...,R32) = (0,2,2,1,0,2).  The demand splits into one bi-directional
bit pair, one cyclic bit-triple, and two uni-directional bits; the cyclic
strategy is what makes the demand fit into five relay levels.
"""

import json
import random

from ychannel import dyc
from ychannel.flows import RateTuple, decompose_flows

cfg = dyc.DycConfig(5, 4, 3)
rates = RateTuple(0, 2, 2, 1, 0, 2)

d = decompose_flows(rates)
print("decomposition:", d)

plan = dyc.plan_levels(cfg, d)
print("\nlevel plan:")
for t in plan.txns:
    print(" ", t)

msgs = dyc.random_messages(rates, random.Random(1))
trace = dyc.plan_trace(plan, msgs)
print("\nfull trace:")
print(json.dumps(trace, indent=2, sort_keys=True))

report = dyc.verify_end_to_end(cfg, rates)
print(f"\nexhaustive verification: {report.patterns_checked} patterns, "
      f"passed={report.passed}")

print("without the cyclic strategy:",
      "feasible" if dyc.feasible_without_cyclic(cfg, rates)
      else "infeasible (all bi+uni plans exhausted)")
