"""Portable seeded randomness.

Every random draw in circlet goes through this module so that a given seed
reproduces byte-identical output on any platform and any numpy release.

Algorithm
---------
* Bit source: the PCG64 generator (O'Neill 2014, XSL-RR 128/64 variant) seeded
  through numpy's ``SeedSequence``. Only the raw 64-bit output stream is used;
  numpy guarantees that stream is fixed for a given seed.
* Uniform doubles in ``[0, 1)``: ``(raw >> 11) * 2**-53``.
* Standard normals: Box-Muller on consecutive uniform pairs ``(u1, u2)``,
  ``z = sqrt(-2 log(1 - u1)) * cos(2 pi u2)``; one normal per pair.
* Sampling without replacement: partial Fisher-Yates over ``range(n)``, the
  swap partner at step ``i`` is ``i + floor(u * (n - i))``.

The distribution helpers of ``numpy.random.Generator`` are deliberately not
used; numpy reserves the right to change them between releases.
"""

import numpy as np

_TWO_POW_M53 = 1.0 / 9007199254740992.0


class PortableRNG:
    """Deterministic stream of uniforms, normals and index samples."""

    def __init__(self, seed):
        self.seed = int(seed)
        self._bits = np.random.PCG64(self.seed)

    def raw(self, size):
        return np.asarray(self._bits.random_raw(int(size)), dtype=np.uint64)

    def uniform(self, size, low=0.0, high=1.0):
        u = (self.raw(size) >> np.uint64(11)).astype(np.float64) * _TWO_POW_M53
        return low + (high - low) * u

    def normal(self, size, scale=1.0):
        size = int(size)
        u = self.uniform(2 * size).reshape(size, 2)
        z = np.sqrt(-2.0 * np.log1p(-u[:, 0])) * np.cos(2.0 * np.pi * u[:, 1])
        return scale * z

    def sample_without_replacement(self, n, k):
        n, k = int(n), int(k)
        if not 0 <= k <= n:
            raise ValueError(f"cannot draw {k} items from {n}")
        perm = np.arange(n)
        u = self.uniform(k)
        for i in range(k):
            j = i + min(int(u[i] * (n - i)), n - i - 1)
            perm[i], perm[j] = perm[j], perm[i]
        return perm[:k].copy()
