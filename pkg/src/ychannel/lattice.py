"""Desk-scale nested-lattice codec with modulo-sum relay decoding.

The supported construction is the scaled integer (cubic) lattice: fine
lattice gamma*Z^n, coarse lattice gamma*q*Z^n, so the codebook is the q^n
fine points inside the coarse Voronoi cell [-gamma*q/2, gamma*q/2)^n.  This
validates the alignment and modulo-sum algebra exactly; the noise behavior
is checked qualitatively by Monte Carlo, since the underlying decoding
guarantee is asymptotic in the dimension.
"""

import math
from dataclasses import dataclass, replace

import numpy as np


@dataclass(frozen=True)
class NestedLatticeCode:
    """Fine/coarse scaled-integer lattice pair; q points per dimension."""

    fine_scale: float = 1.0
    nesting: int = 2
    n: int = 1

    def __post_init__(self):
        if self.fine_scale <= 0:
            raise ValueError("fine_scale must be positive")
        if not isinstance(self.nesting, int) or self.nesting < 2:
            raise ValueError("nesting must be an integer >= 2")
        if not isinstance(self.n, int) or self.n < 1:
            raise ValueError("n must be a positive integer")

    @property
    def coarse_scale(self):
        return self.fine_scale * self.nesting

    @property
    def rate(self):
        """Bits per dimension."""
        return math.log2(self.nesting)

    @property
    def power(self):
        """Average transmit power per dimension of a dithered codeword."""
        return self.coarse_scale ** 2 / 12.0

    @property
    def size(self):
        return self.nesting ** self.n

    def mod_coarse(self, x):
        """Reduce into the coarse Voronoi cell [-L/2, L/2)^n."""
        x = np.asarray(x, dtype=float)
        L = self.coarse_scale
        return x - L * np.floor(x / L + 0.5)

    def quantize_fine(self, x):
        """Nearest fine-lattice point; exact midpoints round toward -inf."""
        x = np.asarray(x, dtype=float)
        g = self.fine_scale
        return g * np.ceil(x / g - 0.5)

    def _digits(self, m):
        out = np.empty(self.n)
        for i in range(self.n):
            m, d = divmod(m, self.nesting)
            out[i] = d
        return out

    def codeword(self, m):
        """Fine-lattice point of message index m, inside the Voronoi cell."""
        if not (0 <= m < self.size):
            raise ValueError(f"message index {m} out of range [0, {self.size})")
        return self.mod_coarse(self.fine_scale * self._digits(m))

    def codebook(self):
        return np.array([self.codeword(m) for m in range(self.size)])

    def message_of(self, point, tol=1e-9):
        """Inverse of codeword(); raises if the point is off the codebook."""
        point = np.atleast_1d(np.asarray(point, dtype=float))
        k = point / self.fine_scale
        ki = np.rint(k)
        if np.max(np.abs(k - ki)) > tol:
            raise ValueError("point is not on the fine lattice")
        digits = np.mod(ki.astype(int), self.nesting)
        m = 0
        for d in digits[::-1]:
            m = m * self.nesting + int(d)
        return m

    def random_dither(self, rng):
        L = self.coarse_scale
        return rng.uniform(-L / 2, L / 2, self.n)


def encode(code: NestedLatticeCode, m, dither):
    """Dithered transmit point: (codeword(m) - dither) mod coarse lattice."""
    return code.mod_coarse(code.codeword(m) - np.asarray(dither, dtype=float))


def relay_decode_sum(code: NestedLatticeCode, y, dither_a, dither_b,
                     noise_var):
    """Estimate (lambda_A + lambda_B) mod coarse from y = x_A + x_B + z.

    MMSE scaling alpha = 2P/(2P + noise_var) for the two aligned senders,
    then dither removal, fine-lattice quantization, and coarse reduction.
    Exact when noise_var = 0.
    """
    if noise_var < 0:
        raise ValueError("noise variance must be nonnegative")
    twoP = 2.0 * code.power
    alpha = 1.0 if noise_var == 0 else twoP / (twoP + noise_var)
    y = np.asarray(y, dtype=float)
    shifted = alpha * y + np.asarray(dither_a) + np.asarray(dither_b)
    return code.mod_coarse(code.quantize_fine(shifted))


def extract_partner(code: NestedLatticeCode, sum_mod_coarse, own_lambda,
                    tol=1e-9):
    """Unique codebook point p with (own + p) mod coarse == the given sum."""
    cand = code.mod_coarse(np.asarray(sum_mod_coarse, dtype=float)
                           - np.asarray(own_lambda, dtype=float))
    k = cand / code.fine_scale
    ki = np.rint(k)
    if np.max(np.abs(k - ki)) > tol * max(1.0, code.nesting):
        raise ValueError("sum is not consistent with any codebook point")
    return code.mod_coarse(code.fine_scale * ki)


def scaled_code(code: NestedLatticeCode, factor):
    """Same code geometry scaled by |factor|: rate unchanged, power times
    factor^2.  Used to align two users' codebooks at the relay."""
    if factor == 0:
        raise ValueError("scaling factor must be nonzero")
    return replace(code, fine_scale=code.fine_scale * abs(factor))


def monte_carlo_sum_decode(code: NestedLatticeCode, snr_db_grid,
                           trials_per_point, seed=0):
    """Empirical sum-decoding error rate per SNR point (SNR = P/sigma^2).

    An infinite SNR entry means noiseless.  Returns rows of
    (snr_db, trials, errors, error_rate); deterministic for a fixed seed.
    Only n = 1 is supported here (the vectorized path).
    """
    if code.n != 1:
        raise ValueError("Monte Carlo harness supports n = 1 only")
    if trials_per_point < 1:
        raise ValueError("need at least one trial per point")
    book = code.codebook()[:, 0]
    L = code.coarse_scale
    rows = []
    for idx, snr_db in enumerate(snr_db_grid):
        rng = np.random.default_rng([seed, idx])
        noise_var = 0.0 if math.isinf(snr_db) else code.power / (10 ** (snr_db / 10))
        ma = rng.integers(0, code.size, trials_per_point)
        mb = rng.integers(0, code.size, trials_per_point)
        la, lb = book[ma], book[mb]
        da = rng.uniform(-L / 2, L / 2, trials_per_point)
        db = rng.uniform(-L / 2, L / 2, trials_per_point)
        xa = code.mod_coarse(la - da)
        xb = code.mod_coarse(lb - db)
        z = (rng.standard_normal(trials_per_point) * math.sqrt(noise_var)
             if noise_var > 0 else 0.0)
        y = xa + xb + z
        twoP = 2.0 * code.power
        alpha = 1.0 if noise_var == 0 else twoP / (twoP + noise_var)
        est = code.mod_coarse(code.quantize_fine(alpha * y + da + db))
        truth = code.mod_coarse(la + lb)
        errors = int(np.sum(np.abs(est - truth) > 1e-9 * code.fine_scale))
        rows.append((snr_db, trials_per_point, errors,
                     errors / trials_per_point))
    return rows
