"""Sweep weight vectors to trace out the Gaussian achievable region.

For each weight vector on the (R12, R21) face, the power-allocation search
returns the best achievable tuple; the results land in a CSV ready for
plotting, together with the constant-gap region RHS for comparison.
"""

import csv
import sys

import numpy as np

from ychannel.flows import ChannelConfig
from ychannel.gaussian import corollary_rhs, maximize_objective

cfg = ChannelConfig(1.5, 1.2, 1.0, 200.0)
print(f"config: h = ({cfg.h1}, {cfg.h2}, {cfg.h3}), P = {cfg.P}")
print("corollary RHS:", [round(v, 3) for v in corollary_rhs(cfg)])

writer = csv.writer(sys.stdout)
writer.writerow(["w12", "w21", "R12", "R13", "R21", "R23", "R31", "R32",
                 "objective"])
for theta in np.linspace(0, np.pi / 2, 9):
    w = [float(np.cos(theta)), 0.0, float(np.sin(theta)), 0.0, 0.0, 0.0]
    if sum(w) == 0:
        continue
    res = maximize_objective(cfg, w, budget=1500, seed=0)
    writer.writerow([f"{w[0]:.3f}", f"{w[2]:.3f}",
                     *(f"{v:.4f}" for v in res.rates.as_tuple()),
                     f"{res.objective:.4f}"])
