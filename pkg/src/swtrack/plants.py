"""Benchmark plants and random plant generation for tests and demos."""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .sysmodel import SwitchedPlant

_A1 = [
    [0, 1, 0, 0, 0, 0, 0],
    [0, -1, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 0],
    [-4, 0, 0, -4, 1, -1, 0],
    [2, 0, 0, -4, 0, 0, 0],
    [0, 0, -1, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 0],
]

_A2 = [
    [-5, 0, 2, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 3, 0],
    [0, 4, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, -3, 0],
    [4, 0, 0, -5, 0, 3, 0],
    [0, 0, -3, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, -2, 0],
]

_B1 = [
    [3, 0, -3, 0, 0],
    [0, 1, -1, 4, 0],
    [-1, 0, 0, -2, 1],
    [0, 0, 0, 0, 5],
    [0, 5, 3, 0, 0],
    [4, 0, 0, 0, 0],
    [-4, 0, 0, -4, 3],
]

_B2 = [
    [0, 0, 5, 0, -5],
    [0, 2, 2, 0, 0],
    [0, 0, 0, 0, -2],
    [1, -4, 0, 0, 0],
    [0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0],
    [0, 0, 0, -1, 0],
]

_C3 = [
    [1, 1, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 1],
    [0, 1, 0, 0, 0, 0, 0],
]

_C2 = [
    [1, 1, 0, 0, 0, 0, 0],
    [0, 1, 0, 0, 0, 0, 0],
]


def three_output_plant() -> SwitchedPlant:
    """7-state, 5-input, 3-output switched pair; non-overshooting design target."""
    return SwitchedPlant.from_matrices(_A1, _B1, _A2, _B2, _C3)


def two_output_plant() -> SwitchedPlant:
    """Same dynamics with a 2-row output map; admits a globally monotonic design."""
    return SwitchedPlant.from_matrices(_A1, _B1, _A2, _B2, _C2)


THREE_OUTPUT_REFERENCE = np.array([1.0, -6.0, 10.0])
THREE_OUTPUT_X0 = np.array([-17.0, 4.0, 0.0, 2.0, -7.0, -3.0, 5.0])
# index-paired eigenvalue sets for the non-overshooting reference design
THREE_OUTPUT_EIGS = {
    (1, 1): (-5.0, -4.0, -3.0), (2, 1): (-3.0, -2.0, -1.0),
    (1, 2): (-8.0, -7.0, -6.0), (2, 2): (-7.0, -6.0, -4.0),
    (1, 3): (-0.5,), (2, 3): (-8.0,),
}
THREE_OUTPUT_PARTITION = (0, 3, 3, 1)

TWO_OUTPUT_REFERENCE = np.array([1.0, -6.0])
TWO_OUTPUT_X0 = np.array([-14.0, 10.0, -1.0, 2.0, 52.0, 35.0, -9.0])
TWO_OUTPUT_EIGS = {
    (1, 0): (-7.0, -3.0, -4.0, -5.0, -6.0), (2, 0): (-2.0, -1.0, -3.0, -4.0, -6.0),
    (1, 1): (-0.5,), (2, 1): (-7.0,),
    (1, 2): (-8.0,), (2, 2): (-8.0,),
}
TWO_OUTPUT_PARTITION = (5, 1, 1)


def random_plant(rng: np.random.Generator, n=None, m=None, p=None,
                 entry_range=3) -> SwitchedPlant:
    """Random integer-entry plant satisfying the dimension assumption.

    Entries are small integers so the exact pipeline stays fast; B_q and C
    are redrawn until they have full rank.
    """
    if n is None:
        n = int(rng.integers(4, 7))
    if p is None:
        p = int(rng.integers(1, 3))
    if m is None:
        m = (n + p) // 2 + 1

    def draw(rows, cols, need_rank):
        for _ in range(100):
            M = rng.integers(-entry_range, entry_range + 1, size=(rows, cols))
            if np.linalg.matrix_rank(M) >= need_rank:
                return M
        raise RuntimeError("could not draw a full-rank matrix")

    A1 = rng.integers(-entry_range, entry_range + 1, size=(n, n))
    A2 = rng.integers(-entry_range, entry_range + 1, size=(n, n))
    B1 = draw(n, m, m)
    B2 = draw(n, m, m)
    C = draw(p, n, p)
    to_list = lambda M: [[int(x) for x in row] for row in M]
    return SwitchedPlant.from_matrices(to_list(A1), to_list(B1),
                                       to_list(A2), to_list(B2), to_list(C))
