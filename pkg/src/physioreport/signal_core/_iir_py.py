"""Pure-Python twin of the compiled IIR kernel, used when the extension is absent."""

import numpy as np


def lfilter_forward(b, a, x):
    """Causal filtering of ``x``; ``b`` and ``a`` have equal length and a[0] == 1."""
    b = [float(v) for v in b]
    a = [float(v) for v in a]
    order = len(b) - 1
    xs = np.asarray(x, dtype=np.float64).tolist()
    out = [0.0] * len(xs)
    if order == 0:
        b0 = b[0]
        return np.array([b0 * xi for xi in xs], dtype=np.float64)

    z = [0.0] * order
    b0 = b[0]
    last = order - 1
    taps = range(last)
    for i, xi in enumerate(xs):
        yi = b0 * xi + z[0]
        for k in taps:
            z[k] = b[k + 1] * xi + z[k + 1] - a[k + 1] * yi
        z[last] = b[order] * xi - a[order] * yi
        out[i] = yi
    return np.array(out, dtype=np.float64)
