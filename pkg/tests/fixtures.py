"""A small coloured 9x5 unit grid exercising every spatial operator.

Colours: an orange probe in the lower-left corner, a yellow arc around it,
a pink cell, and a green block (with one darker centre cell) enclosed by a
blue ring.  Known verdicts:

  * the orange cell sees pink somewhere at distance 3..5;
  * the orange cell sees yellow everywhere at distance 2..3;
  * every green cell is green-surrounded-by-blue with bounds [0, 100];
  * only the dark green centre cell satisfies the surround with bounds [2, 3].
"""
from fractions import Fraction

import numpy as np

from sstl.models import Trace
from sstl.space import build_space

_COLOURS = {
    (1, 1): "orange",
    (3, 1): "yellow", (4, 1): "yellow",
    (6, 1): "blue", (7, 1): "blue", (8, 1): "blue",
    (2, 2): "yellow", (3, 2): "yellow",
    (5, 2): "blue", (6, 2): "green", (7, 2): "green", (8, 2): "green", (9, 2): "blue",
    (1, 3): "yellow", (2, 3): "yellow",
    (5, 3): "blue", (6, 3): "green", (7, 3): "darkgreen", (8, 3): "green", (9, 3): "blue",
    (1, 4): "yellow", (2, 4): "pink",
    (5, 4): "blue", (6, 4): "green", (7, 4): "green", (8, 4): "green", (9, 4): "blue",
    (6, 5): "blue", (7, 5): "blue", (8, 5): "blue",
}

VARIABLES = ("orange", "yellow", "green", "blue", "pink")

GREEN_CELLS = tuple(
    f"{i}_{j}" for (i, j), c in sorted(_COLOURS.items()) if c in ("green", "darkgreen")
)
DARK_GREEN = "7_3"
ORANGE = "1_1"


def coloured_grid_space():
    locations = [f"{i}_{j}" for i in range(1, 10) for j in range(1, 6)]
    edges = []
    for i in range(1, 10):
        for j in range(1, 6):
            if i < 9:
                edges.append((f"{i}_{j}", f"{i + 1}_{j}", 1.0))
            if j < 5:
                edges.append((f"{i}_{j}", f"{i}_{j + 1}", 1.0))
    return build_space(locations, edges)


def coloured_grid_trace(space, n_samples=1):
    values = np.zeros((space.n_locations, n_samples, len(VARIABLES)))
    for (i, j), colour in _COLOURS.items():
        row = space.index_of(f"{i}_{j}")
        name = "green" if colour == "darkgreen" else colour
        values[row, :, VARIABLES.index(name)] = 1.0
    return Trace(tuple(space.locations), VARIABLES, Fraction(1), values)
