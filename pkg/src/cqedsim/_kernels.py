"""Compiled single-pass kernel for the banded rotating-frame generator.

The right-hand side of the master equation, expressed in the rotating frame
of the Hamiltonian's diagonal, is a sum of banded left-multiplications,
banded right-multiplications, and jump-operator sandwiches.  Applying each
band with numpy costs several full passes over the density matrix; at the
benchmark sizes the computation is purely memory-bound, so fusing all terms
into one row-wise loop (output row stays in cache while every contribution
is accumulated) is worth an order of magnitude.
"""

import numba
import numpy as np


@numba.njit(cache=True, fastmath=True)
def rhs_kernel(y, out, l_off, l_w, r_off, r_w, p_o1, p_o2, p_w1, p_w2):
    """out = sum of banded terms applied to y.

    Left terms:      out[a, :] += l_w[b, a] * y[a + l_off[b], :]
    Right terms:     out[:, c + r_off[b]] += r_w[b, c] * y[:, c]
    Sandwich pairs:  out[a, c] += p_w1[p, a] * p_w2[p, c] * y[a + p_o1[p], c + p_o2[p]]

    Weight arrays are padded with zeros outside their band's valid range.
    """
    d = y.shape[0]
    nl = l_off.shape[0]
    nr = r_off.shape[0]
    np_ = p_o1.shape[0]
    for a in range(d):
        orow = out[a]
        for j in range(d):
            orow[j] = 0.0 + 0.0j
        for b in range(nl):
            src = a + l_off[b]
            if 0 <= src < d:
                c = l_w[b, a]
                if c != 0:
                    yr = y[src]
                    for j in range(d):
                        orow[j] += c * yr[j]
        ya = y[a]
        for b in range(nr):
            o = r_off[b]
            rw = r_w[b]
            if o >= 0:
                for j in range(d - o):
                    orow[j + o] += rw[j] * ya[j]
            else:
                for j in range(-o, d):
                    orow[j + o] += rw[j] * ya[j]
        for p in range(np_):
            src = a + p_o1[p]
            if 0 <= src < d:
                c = p_w1[p, a]
                if c != 0:
                    yr = y[src]
                    o2 = p_o2[p]
                    w2 = p_w2[p]
                    lo = -o2 if o2 < 0 else 0
                    hi = d - o2 if o2 > 0 else d
                    for j in range(lo, hi):
                        orow[j] += c * w2[j] * yr[j + o2]
