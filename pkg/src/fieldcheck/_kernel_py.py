"""Pure numpy implementation of the retarded-kernel quadrature sums."""
from __future__ import annotations

import numpy as np

BACKEND = "python"
_CHUNK_ELEMENTS = 1 << 20


def retarded_sums(events, sign, nodes, spatial, term_comp, term_freq, term_ac, term_as, term_off, omegas, n_comp, threads=1):
    """Quadrature sums of the retarded kernel and its first derivatives.

    Parameters
    ----------
    events : (M, 4) array of ``(t, x, y, z)``
    sign : +1 retarded, -1 advanced
    nodes : (N, 3) quadrature nodes
    spatial : (T, N) weight times spatial profile for each separable term
    term_comp, term_freq : (T,) component and frequency index of each term
    term_ac, term_as, term_off : (T,) time profile
        ``q(u) = ac sin(omega u) + as cos(omega u) + off``
    omegas : (F,) distinct angular frequencies
    n_comp : number of output components
    threads : ignored here

    Returns
    -------
    out : (M, n_comp, 5) with ``(value, d_t, d_x, d_y, d_z)`` per component
    min_r : (M,) smallest node distance per event
    """
    events = np.ascontiguousarray(events, dtype=float)
    nodes = np.ascontiguousarray(nodes, dtype=float)
    spatial = np.ascontiguousarray(spatial, dtype=float)
    omegas = np.asarray(omegas, dtype=float)
    n_ev, n_nodes = len(events), len(nodes)
    out = np.zeros((n_ev, n_comp, 5))
    min_r = np.empty(n_ev)
    chunk = max(1, _CHUNK_ELEMENTS // max(n_nodes, 1))
    for start in range(0, n_ev, chunk):
        ev = events[start:start + chunk]
        d = ev[:, None, 1:] - nodes[None, :, :]
        r = np.sqrt(np.einsum("mni,mni->mn", d, d))
        min_r[start:start + chunk] = r.min(axis=1)
        inv_r = 1.0 / r
        u = ev[:, 0:1] - sign * r
        sn = np.sin(omegas[:, None, None] * u[None])
        cs = np.cos(omegas[:, None, None] * u[None])
        for j in range(len(spatial)):
            f = term_freq[j]
            q = term_ac[j] * sn[f] + term_as[j] * cs[f] + term_off[j]
            qd = omegas[f] * (term_ac[j] * cs[f] - term_as[j] * sn[f])
            sw = spatial[j][None, :]
            block = out[start:start + chunk, term_comp[j]]
            block[:, 0] += np.sum(sw * q * inv_r, axis=1)
            block[:, 1] += np.sum(sw * qd * inv_r, axis=1)
            radial = -sign * sw * qd * inv_r**2 - sw * q * inv_r**3
            block[:, 2:] += np.einsum("mn,mni->mi", radial, d)
    return out, min_r
