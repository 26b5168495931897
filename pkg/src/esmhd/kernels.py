"""Compiled (numba) versions of the hot two-point loops.

The numpy implementations in :mod:`esmhd.dg` and :mod:`esmhd.fv` stay the
reference; these kernels reproduce them node for node and are checked
against them in the test suite. Every output line is written by exactly
one loop iteration, so results do not depend on the thread count.

Set ``ESMHD_DISABLE_NUMBA=1`` to force the numpy path.
"""
from __future__ import annotations

import math
import os

import numpy as np

try:  # pragma: no cover - exercised implicitly
    import numba
    from numba import njit, prange

    # the bundled TBB is too old; skip it instead of warning on first use
    numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]
    HAVE_NUMBA = os.environ.get("ESMHD_DISABLE_NUMBA", "0") not in ("1", "true", "yes")
except ImportError:  # pragma: no cover
    numba = None
    HAVE_NUMBA = False

__all__ = ["HAVE_NUMBA", "set_threads", "volume_ec_lines", "fv_interior_lines", "RECON_CODES", "FV_CODES"]

LOGMEAN_EPS = 1e-4

# integer codes passed to the kernels
FV_CODES = {"ec": 0, "es_rusanov": 1, "tvd_es": 2}
RECON_CODES = {"none": 0, "tvd_no_boundary": 1, "tvd_central_boundary": 2, "tvd_neighbor_boundary": 3}


def set_threads(n: int):
    """Apply a thread count hint to the compiled kernels (no-op without numba)."""
    if HAVE_NUMBA and n:
        numba.set_num_threads(max(1, min(int(n), numba.config.NUMBA_NUM_THREADS)))


if HAVE_NUMBA:
    _jit = njit(cache=True, fastmath=False)
    _pjit = njit(cache=True, fastmath=False, parallel=True)

    @_jit
    def _log_mean(a, b, la, lb):
        z = (a - b) / (a + b)
        u = z * z
        if u < LOGMEAN_EPS:
            return (a + b) / (2.0 * (1.0 + u / 3.0 + u * u / 5.0 + u * u * u / 7.0))
        return (b - a) / (lb - la)

    @_jit
    def _ec(aL, aR, n0, n1, dim, g, ch, f):
        rho_ln = _log_mean(aL[0], aR[0], aL[10], aR[10])
        beta_ln = _log_mean(aL[9], aR[9], aL[11], aR[11])
        v0 = 0.5 * (aL[1] + aR[1])
        v1 = 0.5 * (aL[2] + aR[2])
        v2 = 0.5 * (aL[3] + aR[3])
        B0 = 0.5 * (aL[5] + aR[5])
        B1 = 0.5 * (aL[6] + aR[6])
        B2 = 0.5 * (aL[7] + aR[7])
        psi = 0.5 * (aL[8] + aR[8])
        pbar = 0.5 * (aL[0] + aR[0]) / (aL[9] + aR[9])
        b2avg = 0.5 * (aL[13] + aR[13])
        v2avg = 0.5 * (aL[12] + aR[12])
        vbavg = 0.5 * (aL[14] + aR[14])
        vn = v0 * n0
        bn = B0 * n0
        vb2n = 0.5 * (aL[15] + aR[15]) * n0
        bpsin = 0.5 * (aL[18] + aR[18]) * n0
        if dim > 1:
            vn += v1 * n1
            bn += B1 * n1
            vb2n += 0.5 * (aL[16] + aR[16]) * n1
            bpsin += 0.5 * (aL[19] + aR[19]) * n1
        ptot = pbar + 0.5 * b2avg
        f0 = rho_ln * vn
        f[0] = f0
        f[1] = f0 * v0 - B0 * bn + ptot * n0
        f[5] = vn * B0 - v0 * bn + ch * psi * n0
        f[2] = f0 * v1 - B1 * bn
        f[6] = vn * B1 - v1 * bn
        if dim > 1:
            f[2] += ptot * n1
            f[6] += ch * psi * n1
        f[3] = f0 * v2 - B2 * bn
        f[7] = vn * B2 - v2 * bn
        f[8] = ch * bn
        f[4] = (f0 * (0.5 / ((g - 1.0) * beta_ln) - 0.5 * v2avg)
                + f[1] * v0 + f[2] * v1 + f[3] * v2
                + f[5] * B0 + f[6] * B1 + f[7] * B2 + f[8] * psi
                - 0.5 * vb2n + vbavg * bn - ch * bpsin)

    @_jit
    def _noncons(aj, ak, mj0, mj1, c_bk, psi_k, dim, out):
        # out = c * phi_MHD(j) + (v.m)_j * psi_k * phi_GLM-like terms
        vmj = aj[1] * mj0
        if dim > 1:
            vmj += aj[2] * mj1
        out[0] = 0.0
        out[1] = c_bk * aj[5]
        out[2] = c_bk * aj[6]
        out[3] = c_bk * aj[7]
        out[4] = c_bk * aj[14] + vmj * aj[8] * psi_k
        out[5] = c_bk * aj[1]
        out[6] = c_bk * aj[2]
        out[7] = c_bk * aj[3]
        out[8] = vmj * psi_k

    @_pjit
    def volume_ec_lines(aux, met, Q, wline, dim, g, ch, out):
        """EC flux-differencing volume term on lines.

        aux (NAUX, L, n), met (dim, L, n), Q (n, n), wline (L,), out (9, L, n).
        The symmetric two-point flux is evaluated once per node pair.
        """
        nl = aux.shape[1]
        n = aux.shape[2]
        na = aux.shape[0]
        for l in prange(nl):
            f = np.empty(9)
            ph = np.empty(9)
            acc = np.zeros((n, 9))
            loc = np.empty((n, na))
            m0 = np.empty(n)
            m1 = np.zeros(n)
            for i in range(n):
                for c in range(na):
                    loc[i, c] = aux[c, l, i]
                m0[i] = met[0, l, i]
                if dim > 1:
                    m1[i] = met[1, l, i]
            for i in range(n):
                ai = loc[i]
                for m in range(i, n):
                    qim = Q[i, m]
                    qmi = Q[m, i]
                    corner = (i == m) and (i == 0 or i == n - 1)
                    if qim == 0.0 and qmi == 0.0 and not corner:
                        continue
                    am = loc[m]
                    mm0 = 0.5 * (m0[i] + m0[m])
                    mm1 = 0.5 * (m1[i] + m1[m])
                    _ec(ai, am, mm0, mm1, dim, g, ch, f)
                    # Phi*(i, m)
                    _noncons(ai, am, m0[i], m1[i], am[5] * mm0 + am[6] * mm1, am[8], dim, ph)
                    for c in range(9):
                        acc[i, c] -= qim * (2.0 * f[c] + ph[c])
                    if corner:
                        sgn = -1.0 if i == 0 else 1.0
                        for c in range(9):
                            acc[i, c] += sgn * (f[c] + ph[c])
                    if m != i:
                        # Phi*(m, i)
                        _noncons(am, ai, m0[m], m1[m], ai[5] * mm0 + ai[6] * mm1, ai[8], dim, ph)
                        for c in range(9):
                            acc[m, c] -= qmi * (2.0 * f[c] + ph[c])
            w = wline[l]
            for c in range(9):
                for i in range(n):
                    out[c, l, i] = acc[i, c] * w

    @_jit
    def _fast_speed(a, nh0, nh1, g):
        rho = a[0]
        a2 = g * a[4] / rho
        b2 = a[13] / rho
        bn = a[5] * nh0 + a[6] * nh1
        bn2 = bn * bn / rho
        s = a2 + b2
        d = s * s - 4.0 * a2 * bn2
        if d < 0.0:
            d = 0.0
        return math.sqrt(0.5 * (s + math.sqrt(d)))

    @_jit
    def _mean_jacobian(aL, aR, g, H):
        rho = 0.5 * (aL[0] + aR[0])
        v0 = 0.5 * (aL[1] + aR[1])
        v1 = 0.5 * (aL[2] + aR[2])
        v2 = 0.5 * (aL[3] + aR[3])
        p = 0.5 * (aL[4] + aR[4])
        B0 = 0.5 * (aL[5] + aR[5])
        B1 = 0.5 * (aL[6] + aR[6])
        B2 = 0.5 * (aL[7] + aR[7])
        psi = 0.5 * (aL[8] + aR[8])
        vel = (v0, v1, v2)
        Bv = (B0, B1, B2)
        vsq = v0 * v0 + v1 * v1 + v2 * v2
        eh = p / (g - 1.0) + 0.5 * rho * vsq
        por = p / rho
        for i in range(9):
            for j in range(9):
                H[i, j] = 0.0
        H[0, 0] = rho
        H[0, 4] = eh
        H[4, 0] = eh
        for i in range(3):
            H[0, 1 + i] = rho * vel[i]
            H[1 + i, 0] = rho * vel[i]
            for j in range(3):
                H[1 + i, 1 + j] = rho * vel[i] * vel[j]
            H[1 + i, 1 + i] += p
            H[1 + i, 4] = vel[i] * (eh + p)
            H[4, 1 + i] = vel[i] * (eh + p)
            H[4, 5 + i] = por * Bv[i]
            H[5 + i, 4] = por * Bv[i]
            H[5 + i, 5 + i] = por
        H[4, 4] = (eh * eh / rho + p * p / (rho * (g - 1.0)) + p * vsq
                   + por * (B0 * B0 + B1 * B1 + B2 * B2 + psi * psi))
        H[4, 8] = por * psi
        H[8, 4] = por * psi
        H[8, 8] = por

    @_jit
    def _cholesky(H, Lm):
        for i in range(9):
            for j in range(9):
                Lm[i, j] = 0.0
        for j in range(9):
            s = H[j, j]
            for k in range(j):
                s -= Lm[j, k] * Lm[j, k]
            if s <= 0.0:
                return False
            d = math.sqrt(s)
            Lm[j, j] = d
            for i in range(j + 1, 9):
                t = H[i, j]
                for k in range(j):
                    t -= Lm[i, k] * Lm[j, k]
                Lm[i, j] = t / d
        return True

    @_jit
    def _minmod(a, b):
        if a * b > 0.0:
            if a > 0.0:
                return min(a, b)
            return max(a, b)
        return 0.0

    @_pjit
    def fv_interior_lines(aux, v_pad, subn, wline, dim, g, ch, kind, recon, xi, xh, out):
        """Interior subcell flux differences on lines.

        aux (NAUX, L, n), v_pad (9, L, n + 2), subn (dim, L, n + 1),
        out (9, L, n). ``kind`` and ``recon`` are integer codes.
        """
        nl = aux.shape[1]
        n = aux.shape[2]
        N = n - 1
        bad = 0
        for l in prange(nl):
            f = np.empty(9)
            dlr = np.empty(9)
            drl = np.empty(9)
            H = np.empty((9, 9))
            Lm = np.empty((9, 9))
            ws = np.empty((4, 9))
            dv = np.empty(9)
            acc = np.zeros((9, n))
            loc = np.empty((n, 21))
            for i in range(n):
                for c in range(21):
                    loc[i, c] = aux[c, l, i]
            for i in range(N):
                aL = loc[i]
                aR = loc[i + 1]
                n0 = subn[0, l, i + 1]
                n1 = subn[1, l, i + 1] if dim > 1 else 0.0
                _ec(aL, aR, n0, n1, dim, g, ch, f)
                if kind != 0:
                    nn = math.sqrt(n0 * n0 + n1 * n1)
                    nh0 = n0 / nn
                    nh1 = n1 / nn
                    lamL = abs(aL[1] * nh0 + aL[2] * nh1) + _fast_speed(aL, nh0, nh1, g)
                    lamR = abs(aR[1] * nh0 + aR[2] * nh1) + _fast_speed(aR, nh0, nh1, g)
                    lam = max(lamL, lamR)
                    _mean_jacobian(aL, aR, g, H)
                    if kind == 1 or recon == 0:
                        for c in range(9):
                            dv[c] = v_pad[c, l, i + 2] - v_pad[c, l, i + 1]
                        for r in range(9):
                            s = 0.0
                            for c in range(9):
                                s += H[r, c] * dv[c]
                            f[r] -= 0.5 * lam * nn * s
                    else:
                        if not _cholesky(H, Lm):
                            bad += 1
                        # w_s = L^T v for padded stencil i .. i + 3
                        for s in range(4):
                            for c in range(9):
                                t = 0.0
                                for r in range(c, 9):
                                    t += Lm[r, c] * v_pad[r, l, i + s]
                                ws[s, c] = t
                        dxc = xi[i + 1] - xi[i]
                        for c in range(9):
                            jump = ws[2, c] - ws[1, c]
                            dc = jump / dxc
                            if i >= 1:
                                thl = _minmod(dc, (ws[1, c] - ws[0, c]) / (xi[i] - xi[i - 1]))
                            elif recon == 1:
                                thl = 0.0
                            elif recon == 2:
                                thl = dc
                            else:
                                thl = _minmod(dc, (ws[2, c] - ws[0, c]) / (xi[1] - xi[0]))
                            if i + 2 <= N:
                                thr = _minmod(dc, (ws[3, c] - ws[2, c]) / (xi[i + 2] - xi[i + 1]))
                            elif recon == 1:
                                thr = 0.0
                            elif recon == 2:
                                thr = dc
                            else:
                                thr = _minmod(dc, (ws[3, c] - ws[1, c]) / (xi[N] - xi[N - 1]))
                            dv[c] = (ws[2, c] + (xh[i] - xi[i + 1]) * thr) - (ws[1, c] + (xh[i] - xi[i]) * thl)
                        for r in range(9):
                            s2 = 0.0
                            for c in range(r + 1):
                                s2 += Lm[r, c] * dv[c]
                            f[r] -= 0.5 * lam * nn * s2
                # diamond terms with the subcell normal at both nodes
                bL = aL[5] * n0 + aL[6] * n1
                bR = aR[5] * n0 + aR[6] * n1
                cc = 0.5 * (bL + bR)
                psi = 0.5 * (aL[8] + aR[8])
                _noncons(aL, aR, n0, n1, cc, psi, dim, dlr)
                _noncons(aR, aL, n0, n1, cc, psi, dim, drl)
                for c in range(9):
                    acc[c, i] -= f[c] + dlr[c]
                    acc[c, i + 1] += f[c] + drl[c]
            w = wline[l]
            for c in range(9):
                for i in range(n):
                    out[c, l, i] = acc[c, i] * w
        return bad

    # ------------------------------------------------------------------
    # 2D node-layout kernels for periodic conforming meshes.
    # Arrays are (ncomp, K, n, n) with index (i, j) = (xi, eta);
    # ``nb`` is (K, 4) = [left_x, right_x, left_y, right_y].

    @_jit
    def _node(a, i, o):
        if a == 0:
            return i, o
        return o, i

    @_jit
    def _jac_apply(aL, aR, g, x, out):
        rho = 0.5 * (aL[0] + aR[0])
        v0 = 0.5 * (aL[1] + aR[1])
        v1 = 0.5 * (aL[2] + aR[2])
        v2 = 0.5 * (aL[3] + aR[3])
        p = 0.5 * (aL[4] + aR[4])
        B0 = 0.5 * (aL[5] + aR[5])
        B1 = 0.5 * (aL[6] + aR[6])
        B2 = 0.5 * (aL[7] + aR[7])
        psi = 0.5 * (aL[8] + aR[8])
        vsq = v0 * v0 + v1 * v1 + v2 * v2
        eh = p / (g - 1.0) + 0.5 * rho * vsq
        por = p / rho
        vx = v0 * x[1] + v1 * x[2] + v2 * x[3]
        bx = B0 * x[5] + B1 * x[6] + B2 * x[7]
        h44 = eh * eh / rho + p * p / (rho * (g - 1.0)) + p * vsq + por * (B0 * B0 + B1 * B1 + B2 * B2 + psi * psi)
        out[0] = rho * x[0] + rho * vx + eh * x[4]
        t = rho * x[0] + rho * vx + (eh + p) * x[4]
        out[1] = v0 * t + p * x[1]
        out[2] = v1 * t + p * x[2]
        out[3] = v2 * t + p * x[3]
        out[4] = eh * x[0] + (eh + p) * vx + h44 * x[4] + por * (bx + psi * x[8])
        out[5] = por * (B0 * x[4] + x[5])
        out[6] = por * (B1 * x[4] + x[6])
        out[7] = por * (B2 * x[4] + x[7])
        out[8] = por * (psi * x[4] + x[8])

    @_jit
    def _face_flux(aL, aR, vL, vR, n0, n1, kind, g, ch, f, dv, hd):
        _ec(aL, aR, n0, n1, 2, g, ch, f)
        if kind == 1:
            nn = math.sqrt(n0 * n0 + n1 * n1)
            nh0 = n0 / nn
            nh1 = n1 / nn
            lamL = abs(aL[1] * nh0 + aL[2] * nh1) + _fast_speed(aL, nh0, nh1, g)
            lamR = abs(aR[1] * nh0 + aR[2] * nh1) + _fast_speed(aR, nh0, nh1, g)
            lam = max(lamL, lamR)
            for c in range(9):
                dv[c] = vR[c] - vL[c]
            _jac_apply(aL, aR, g, dv, hd)
            for c in range(9):
                f[c] -= 0.5 * lam * nn * hd[c]

    @_pjit
    def surface_2d(aux, v, met, nb, w, kind, g, ch, out):
        """Shared surface terms ``-G_left`` (last nodes) / ``+G_right`` (first nodes).

        aux (NAUX, K, n, n), v (9, K, n, n), met (2, 2, K, n, n), out (9, K, n, n).
        ``kind`` 0 = EC, 1 = ES Rusanov.
        """
        K = aux.shape[1]
        n = aux.shape[2]
        na = aux.shape[0]
        for k in prange(K):
            aL = np.empty(na)
            aR = np.empty(na)
            vL = np.empty(9)
            vR = np.empty(9)
            f = np.empty(9)
            dv = np.empty(9)
            hd = np.empty(9)
            ph = np.empty(9)
            for c in range(9):
                for i in range(n):
                    for j in range(n):
                        out[c, k, i, j] = 0.0
            for a in range(2):
                for o in range(n):
                    # face at the last node: k is the left element
                    r = nb[k, 2 * a + 1]
                    il, jl = _node(a, n - 1, o)
                    ir, jr = _node(a, 0, o)
                    for c in range(na):
                        aL[c] = aux[c, k, il, jl]
                        aR[c] = aux[c, r, ir, jr]
                    for c in range(9):
                        vL[c] = v[c, k, il, jl]
                        vR[c] = v[c, r, ir, jr]
                    n0 = met[a, 0, k, il, jl]
                    n1 = met[a, 1, k, il, jl]
                    _face_flux(aL, aR, vL, vR, n0, n1, kind, g, ch, f, dv, hd)
                    cc = 0.5 * ((aL[5] + aR[5]) * n0 + (aL[6] + aR[6]) * n1)
                    psi = 0.5 * (aL[8] + aR[8])
                    _noncons(aL, aR, n0, n1, cc, psi, 2, ph)
                    for c in range(9):
                        out[c, k, il, jl] -= (f[c] + ph[c]) * w[o]
                    # face at the first node: k is the right element
                    l = nb[k, 2 * a]
                    for c in range(na):
                        aL[c] = aux[c, l, il, jl]
                        aR[c] = aux[c, k, ir, jr]
                    for c in range(9):
                        vL[c] = v[c, l, il, jl]
                        vR[c] = v[c, k, ir, jr]
                    n0 = met[a, 0, l, il, jl]
                    n1 = met[a, 1, l, il, jl]
                    _face_flux(aL, aR, vL, vR, n0, n1, kind, g, ch, f, dv, hd)
                    cc = 0.5 * ((aL[5] + aR[5]) * n0 + (aL[6] + aR[6]) * n1)
                    psi = 0.5 * (aL[8] + aR[8])
                    _noncons(aR, aL, n0, n1, cc, psi, 2, ph)
                    for c in range(9):
                        out[c, k, ir, jr] += (f[c] + ph[c]) * w[o]

    @_pjit
    def br1_gradients_2d(v, met, J, nb, D, w, grad):
        """BR1 gradients of ``v`` (9, K, n, n) into ``grad`` (2, 9, K, n, n)."""
        K = v.shape[1]
        n = v.shape[2]
        nc = v.shape[0]
        for k in prange(K):
            ref = np.empty((nc, n, n))
            for d in range(2):
                for c in range(nc):
                    for i in range(n):
                        for j in range(n):
                            grad[d, c, k, i, j] = 0.0
            for a in range(2):
                r = nb[k, 2 * a + 1]
                l = nb[k, 2 * a]
                for c in range(nc):
                    for o in range(n):
                        for i in range(n):
                            s = 0.0
                            for m in range(n):
                                im, jm = _node(a, m, o)
                                s += D[i, m] * v[c, k, im, jm]
                            ii, jj = _node(a, i, o)
                            ref[c, ii, jj] = s
                        il, jl = _node(a, n - 1, o)
                        i0, j0 = _node(a, 0, o)
                        ref[c, il, jl] += 0.5 * (v[c, r, i0, j0] - v[c, k, il, jl]) / w[n - 1]
                        ref[c, i0, j0] -= 0.5 * (v[c, l, il, jl] - v[c, k, i0, j0]) / w[0]
                for d in range(2):
                    for c in range(nc):
                        for i in range(n):
                            for j in range(n):
                                grad[d, c, k, i, j] += met[a, d, k, i, j] * ref[c, i, j]
            for d in range(2):
                for c in range(nc):
                    for i in range(n):
                        for j in range(n):
                            grad[d, c, k, i, j] /= J[k, i, j]

    @_pjit
    def viscous_flux_2d(prim, grad, mu, eta, kappa, r_gas, fv):
        """Visco-resistive flux (2, 9, K, n, n) from entropy-variable gradients (mu0 = 1)."""
        K = prim.shape[1]
        n = prim.shape[2]
        for k in prange(K):
            gv = np.empty((2, 3))
            gB = np.empty((2, 3))
            gT = np.empty(2)
            for i in range(n):
                for j in range(n):
                    rho = prim[0, k, i, j]
                    b = rho / prim[4, k, i, j]
                    for d in range(2):
                        g5 = grad[d, 4, k, i, j]
                        for q in range(3):
                            gv[d, q] = (grad[d, 1 + q, k, i, j] + prim[1 + q, k, i, j] * g5) / b
                            gB[d, q] = (grad[d, 5 + q, k, i, j] + prim[5 + q, k, i, j] * g5) / b
                        gT[d] = g5 / (r_gas * b * b)
                    div_v = gv[0, 0] + gv[1, 1]
                    for d in range(2):
                        for c in range(9):
                            fv[d, c, k, i, j] = 0.0
                        if mu > 0.0:
                            e = 0.0
                            for q in range(3):
                                t = mu * ((gv[d, q]) + (gv[q, d] if q < 2 else 0.0))
                                if q == d:
                                    t -= 2.0 / 3.0 * mu * div_v
                                fv[d, 1 + q, k, i, j] = t
                                e += t * prim[1 + q, k, i, j]
                            fv[d, 4, k, i, j] = e + kappa * gT[d]
                        if eta > 0.0:
                            for q in range(3):
                                fb = eta * (gB[d, q] - (gB[q, d] if q < 2 else 0.0))
                                fv[d, 5 + q, k, i, j] = fb
                                fv[d, 4, k, i, j] += prim[5 + q, k, i, j] * fb

    @_pjit
    def viscous_residual_2d(fv, met, nb, Q, w, out):
        """Strong-form BR1 residual of the viscous flux (node update receives ``-out``)."""
        K = fv.shape[2]
        n = fv.shape[3]
        for k in prange(K):
            ft = np.empty((9, n))
            for c in range(9):
                for i in range(n):
                    for j in range(n):
                        out[c, k, i, j] = 0.0
            for a in range(2):
                r = nb[k, 2 * a + 1]
                l = nb[k, 2 * a]
                for o in range(n):
                    for c in range(9):
                        for i in range(n):
                            ii, jj = _node(a, i, o)
                            ft[c, i] = met[a, 0, k, ii, jj] * fv[0, c, k, ii, jj] + met[a, 1, k, ii, jj] * fv[1, c, k, ii, jj]
                    il, jl = _node(a, n - 1, o)
                    i0, j0 = _node(a, 0, o)
                    for c in range(9):
                        for i in range(n):
                            s = 0.0
                            for m in range(n):
                                s += Q[i, m] * ft[c, m]
                            ii, jj = _node(a, i, o)
                            out[c, k, ii, jj] -= s * w[o]
                        fp = 0.0
                        fm = 0.0
                        for d in range(2):
                            fp += 0.5 * (fv[d, c, k, il, jl] + fv[d, c, r, i0, j0]) * met[a, d, k, il, jl]
                            fm += 0.5 * (fv[d, c, l, il, jl] + fv[d, c, k, i0, j0]) * met[a, d, l, il, jl]
                        out[c, k, il, jl] -= (fp - ft[c, n - 1]) * w[o]
                        out[c, k, i0, j0] += (fm - ft[c, 0]) * w[o]

else:  # pragma: no cover
    volume_ec_lines = None
    fv_interior_lines = None
    surface_2d = None
    br1_gradients_2d = None
    viscous_flux_2d = None
    viscous_residual_2d = None
