"""Local-maximum detection on sampled series."""

from __future__ import annotations

import numpy as np


def local_maxima_indices(values) -> list[int]:
    """Indices of strict local maxima of a sampled series.

    A flat run counts as one maximum, reported at its first sample, when
    it is preceded by a lower value and followed by a lower value. The
    end points never qualify.
    """
    y = np.asarray(values, dtype=float)
    n = len(y)
    out = []
    i = 1
    while i < n - 1:
        if y[i] > y[i - 1]:
            j = i
            while j + 1 < n and y[j + 1] == y[i]:
                j += 1
            if j + 1 < n and y[j + 1] < y[i]:
                out.append(i)
            i = j + 1
        else:
            i += 1
    return out
