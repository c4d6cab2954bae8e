"""Shared builders for randomized test systems.

Systems are assembled in real modal form from explicit poles and residues,
so every generated realization comes with an independent partial-fraction
evaluator to test against.
"""

from __future__ import annotations

import numpy as np

from loewner_lab.descriptor_ops import DescriptorRealization


def modal_realization(pairs, reals, feedthrough=0.0) -> DescriptorRealization:
    """Real state-space form of sum of r/(s-p) terms plus a feedthrough.

    ``pairs`` is a list of (pole, residue) with Im(pole) > 0, each standing
    for itself plus its conjugate; ``reals`` is a list of (real pole, real
    residue).
    """
    n = 2 * len(pairs) + len(reals)
    A = np.zeros((n, n))
    B = np.zeros((n, 1))
    C = np.zeros((1, n))
    k = 0
    for p, r in pairs:
        a, b = p.real, p.imag
        c, d = r.real, r.imag
        A[k : k + 2, k : k + 2] = [[a, b], [-b, a]]
        B[k, 0] = 1.0
        C[0, k] = 2.0 * c
        C[0, k + 1] = 2.0 * d
        k += 2
    for p, r in reals:
        A[k, k] = p
        B[k, 0] = 1.0
        C[0, k] = r
        k += 1
    return DescriptorRealization(E=np.eye(n), A=A, B=B, C=C, D=feedthrough)


def partial_fraction_eval(pairs, reals, feedthrough=0.0):
    """Independent evaluator for the same pole/residue data."""

    def transfer(s):
        s = np.asarray(s, dtype=complex)
        out = np.full(s.shape, complex(feedthrough))
        for p, r in pairs:
            out = out + r / (s - p) + np.conj(r) / (s - np.conj(p))
        for p, r in reals:
            out = out + r / (s - p)
        return out

    return transfer


def random_system(rng, stable=True, max_pairs=4, max_reals=2,
                  re_stable=(-3.0, -0.05), re_unstable=(0.05, 2.0),
                  im_range=(0.05, 50.0), res_mag=(0.1, 2.0)):
    """Random modal system with poles kept clear of the imaginary axis.

    Stable draws place every pole left of Re = -0.05.  Unstable draws keep
    the same recipe but force at least one conjugate pair (or real pole)
    into the right half-plane with residue magnitude >= the requested
    floor.  Returns (realization, oracle callable, pole array).
    """
    n_pairs = int(rng.integers(1, max_pairs + 1))
    n_reals = int(rng.integers(0, max_reals + 1))

    def draw_re(unstable_one):
        lo, hi = re_unstable if unstable_one else re_stable
        return rng.uniform(lo, hi)

    flip = int(rng.integers(0, n_pairs)) if not stable else -1
    pairs = []
    for j in range(n_pairs):
        p = complex(draw_re(j == flip), rng.uniform(*im_range))
        mag = rng.uniform(*res_mag)
        ang = rng.uniform(0.0, 2.0 * np.pi)
        pairs.append((p, mag * np.exp(1j * ang)))
    reals = [
        (draw_re(False), rng.uniform(*res_mag) * rng.choice([-1.0, 1.0]))
        for _ in range(n_reals)
    ]
    rlz = modal_realization(pairs, reals)
    oracle = partial_fraction_eval(pairs, reals)
    poles = np.array(
        [p for p, _ in pairs]
        + [np.conj(p) for p, _ in pairs]
        + [complex(p) for p, _ in reals]
    )
    return rlz, oracle, poles
