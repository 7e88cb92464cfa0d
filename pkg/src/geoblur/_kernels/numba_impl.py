"""Numba-jitted kernel implementations.

Default path. Same math as ``numpy_impl``, written as explicit loops so the
JIT can fuse them; first call per signature compiles (cached on disk).
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

from ..errors import ConvergenceFailure

# ---------------------------------------------------------------------------
# Gradient stencils
# ---------------------------------------------------------------------------


@njit(cache=True, nogil=True)
def _sobel(p):
    h, w = p.shape
    gx = np.empty((h, w))
    gy = np.empty((h, w))
    for i in range(h):
        iu = i - 1 if i > 0 else 0
        id_ = i + 1 if i < h - 1 else h - 1
        for j in range(w):
            jl = j - 1 if j > 0 else 0
            jr = j + 1 if j < w - 1 else w - 1
            nw = p[iu, jl]
            n_ = p[iu, j]
            ne = p[iu, jr]
            w_ = p[i, jl]
            e_ = p[i, jr]
            sw = p[id_, jl]
            s_ = p[id_, j]
            se = p[id_, jr]
            gx[i, j] = (ne + 2.0 * e_ + se) - (nw + 2.0 * w_ + sw)
            gy[i, j] = (sw + 2.0 * s_ + se) - (nw + 2.0 * n_ + ne)
    return gx, gy


@njit(cache=True, nogil=True)
def _central(p):
    h, w = p.shape
    gx = np.empty((h, w))
    gy = np.empty((h, w))
    for i in range(h):
        iu = i - 1 if i > 0 else 0
        id_ = i + 1 if i < h - 1 else h - 1
        for j in range(w):
            jl = j - 1 if j > 0 else 0
            jr = j + 1 if j < w - 1 else w - 1
            gx[i, j] = p[i, jr] - p[i, jl]
            gy[i, j] = p[id_, j] - p[iu, j]
    return gx, gy


def sobel_gradients(plane: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """3x3 Sobel x/y partials of a float plane, replicate-padded."""
    return _sobel(np.ascontiguousarray(plane, dtype=np.float64))


def central_gradients(plane: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Unit central differences (no 1/2 normalization), replicate-padded."""
    return _central(np.ascontiguousarray(plane, dtype=np.float64))


# ---------------------------------------------------------------------------
# Area-average resampling
# ---------------------------------------------------------------------------


@njit(cache=True, nogil=True)
def _area_resample(p, out_h, out_w):
    h, w = p.shape
    sy = h / out_h
    sx = w / out_w
    out = np.empty((out_h, out_w))
    for oy in range(out_h):
        y_lo = oy * sy
        y_hi = (oy + 1) * sy
        iy0 = int(y_lo)
        iy1 = min(int(math.ceil(y_hi)), h)
        for ox in range(out_w):
            x_lo = ox * sx
            x_hi = (ox + 1) * sx
            ix0 = int(x_lo)
            ix1 = min(int(math.ceil(x_hi)), w)
            acc = 0.0
            for iy in range(iy0, iy1):
                wy = min(y_hi, iy + 1.0) - max(y_lo, float(iy))
                if wy <= 0.0:
                    continue
                row = 0.0
                for ix in range(ix0, ix1):
                    wx = min(x_hi, ix + 1.0) - max(x_lo, float(ix))
                    if wx > 0.0:
                        row += wx * p[iy, ix]
                acc += wy * row
            out[oy, ox] = acc / (sy * sx)
    return out


def area_resample(plane: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    """Box means over the fractional coverage grid (out_h x out_w cells)."""
    return _area_resample(np.ascontiguousarray(plane, dtype=np.float64), out_h, out_w)


# ---------------------------------------------------------------------------
# Rotation-average blur
# ---------------------------------------------------------------------------


@njit(cache=True, nogil=True)
def _rotate_mean(p, extent):
    h, w = p.shape
    cy = (h - 1) / 2.0
    cx = (w - 1) / 2.0
    acc = np.zeros((h, w))
    for deg in range(-extent, extent + 1):
        a = deg * math.pi / 180.0
        ca = math.cos(a)
        sa = math.sin(a)
        for i in range(h):
            dy = i - cy
            for j in range(w):
                dx = j - cx
                sxf = cx + ca * dx + sa * dy
                syf = cy - sa * dx + ca * dy
                if sxf < 0.0:
                    sxf = 0.0
                elif sxf > w - 1.0:
                    sxf = w - 1.0
                if syf < 0.0:
                    syf = 0.0
                elif syf > h - 1.0:
                    syf = h - 1.0
                x0 = int(sxf)
                y0 = int(syf)
                x1 = x0 + 1 if x0 + 1 < w else w - 1
                y1 = y0 + 1 if y0 + 1 < h else h - 1
                tx = sxf - x0
                ty = syf - y0
                top = p[y0, x0] * (1.0 - tx) + p[y0, x1] * tx
                bot = p[y1, x0] * (1.0 - tx) + p[y1, x1] * tx
                acc[i, j] += top * (1.0 - ty) + bot * ty
    return acc / (2 * extent + 1)


def rotate_mean(plane: np.ndarray, extent: int) -> np.ndarray:
    """Mean of the plane rotated by every integer degree in [-extent, extent]."""
    return _rotate_mean(np.ascontiguousarray(plane, dtype=np.float64), extent)


# ---------------------------------------------------------------------------
# 2D DFT: radix-2 rows with a Bluestein fallback, plans cached per length
# ---------------------------------------------------------------------------


@njit(cache=True, nogil=True)
def _fft1_pow2_inplace(buf, perm, table):
    m = buf.shape[0]
    for i in range(m):
        j = perm[i]
        if j > i:
            t = buf[i]
            buf[i] = buf[j]
            buf[j] = t
    s = 2
    while s <= m:
        half = s >> 1
        step = m // s
        for start in range(0, m, s):
            for t in range(half):
                wv = table[t * step]
                u = buf[start + t]
                v = buf[start + t + half] * wv
                buf[start + t] = u + v
                buf[start + t + half] = u - v
        s <<= 1


@njit(cache=True, nogil=True)
def _fft_rows_pow2(x, perm, table):
    for r in range(x.shape[0]):
        _fft1_pow2_inplace(x[r], perm, table)


@njit(cache=True, nogil=True)
def _fft_rows_bluestein(x, out, chirp, bhat, perm, table):
    rows, n = x.shape
    m = bhat.shape[0]
    inv = 1.0 / m
    buf = np.empty(m, dtype=np.complex128)
    for r in range(rows):
        for j in range(m):
            buf[j] = 0.0
        for j in range(n):
            buf[j] = x[r, j] * chirp[j]
        _fft1_pow2_inplace(buf, perm, table)
        for j in range(m):
            buf[j] = (buf[j] * bhat[j]).conjugate()
        _fft1_pow2_inplace(buf, perm, table)
        for j in range(n):
            out[r, j] = buf[j].conjugate() * inv * chirp[j]


def _next_pow2(n: int) -> int:
    return 1 << (n - 1).bit_length()


def _bit_reverse_perm(m: int) -> np.ndarray:
    bits = m.bit_length() - 1
    idx = np.arange(m, dtype=np.int64)
    rev = np.zeros(m, dtype=np.int64)
    for b in range(bits):
        rev = (rev << 1) | ((idx >> b) & 1)
    return rev


def _pow2_tables(m: int) -> tuple[np.ndarray, np.ndarray]:
    table = np.exp((-2j * np.pi / m) * np.arange(max(m // 2, 1)))
    return _bit_reverse_perm(m), table


_PLANS: dict[int, tuple] = {}


def _plan(n: int) -> tuple:
    plan = _PLANS.get(n)
    if plan is None:
        if n & (n - 1) == 0:
            perm, table = _pow2_tables(n)
            plan = ("pow2", perm, table)
        else:
            k = np.arange(n, dtype=np.int64)
            chirp = np.exp((-1j * np.pi / n) * ((k * k) % (2 * n)))
            m = _next_pow2(2 * n - 1)
            b = np.zeros(m, dtype=np.complex128)
            b[:n] = np.conj(chirp)
            b[m - n + 1 :] = np.conj(chirp)[1:][::-1]
            perm, table = _pow2_tables(m)
            bhat = b.copy()
            _fft1_pow2_inplace(bhat, perm, table)
            plan = ("bluestein", chirp, bhat, perm, table)
        _PLANS[n] = plan
    return plan


def _fft_rows(x: np.ndarray) -> np.ndarray:
    """DFT along the last axis of a C-contiguous complex 2D array."""
    n = x.shape[1]
    if n == 1:
        return x.copy()
    plan = _plan(n)
    if plan[0] == "pow2":
        out = x.copy()
        _fft_rows_pow2(out, plan[1], plan[2])
        return out
    out = np.empty_like(x)
    _fft_rows_bluestein(x, out, plan[1], plan[2], plan[3], plan[4])
    return out


def fft2(z: np.ndarray) -> np.ndarray:
    """Forward unnormalized 2D DFT of a complex matrix, exact size."""
    z = np.ascontiguousarray(z, dtype=np.complex128)
    rows = _fft_rows(z)
    cols = _fft_rows(np.ascontiguousarray(rows.T))
    return np.ascontiguousarray(cols.T)


def ifft2(z: np.ndarray) -> np.ndarray:
    """Inverse 2D DFT with 1/(M*N) normalization."""
    z = np.asarray(z, dtype=np.complex128)
    return np.conj(fft2(np.conj(z))) / z.size


# ---------------------------------------------------------------------------
# Singular values: Golub-Kahan bidiagonalization + implicit-shift QR
# ---------------------------------------------------------------------------

_EPS = float(np.finfo(np.float64).eps)


@njit(cache=True, nogil=True)
def _gkr_core(a, v, want_uv):
    """In-place GKR SVD of tall a (m >= n); returns (w, ok).

    With want_uv, a is overwritten with U and v (n x n) with V.
    ok=False signals that the QR iteration exceeded its step cap.
    """
    m, n = a.shape
    w = np.zeros(n)
    rv1 = np.zeros(n)
    tmp = np.zeros(n)
    g = 0.0
    scale = 0.0
    anorm = 0.0
    l = 0

    # Householder bidiagonalization
    for i in range(n):
        l = i + 1
        rv1[i] = scale * g
        g = 0.0
        scale = 0.0
        if i < m:
            for k in range(i, m):
                scale += abs(a[k, i])
            if scale != 0.0:
                s = 0.0
                for k in range(i, m):
                    a[k, i] /= scale
                    s += a[k, i] * a[k, i]
                f = a[i, i]
                g = -math.copysign(math.sqrt(s), f)
                h = f * g - s
                a[i, i] = f - g
                for j in range(l, n):
                    s = 0.0
                    for k in range(i, m):
                        s += a[k, i] * a[k, j]
                    fj = s / h
                    for k in range(i, m):
                        a[k, j] += fj * a[k, i]
                for k in range(i, m):
                    a[k, i] *= scale
        w[i] = scale * g
        g = 0.0
        scale = 0.0
        if i < m and i != n - 1:
            for k in range(l, n):
                scale += abs(a[i, k])
            if scale != 0.0:
                s = 0.0
                for k in range(l, n):
                    a[i, k] /= scale
                    s += a[i, k] * a[i, k]
                f = a[i, l]
                g = -math.copysign(math.sqrt(s), f)
                h = f * g - s
                a[i, l] = f - g
                for k in range(l, n):
                    tmp[k] = a[i, k] / h
                for j in range(l, m):
                    s = 0.0
                    for k in range(l, n):
                        s += a[j, k] * a[i, k]
                    for k in range(l, n):
                        a[j, k] += s * tmp[k]
                for k in range(l, n):
                    a[i, k] *= scale
        t = abs(w[i]) + abs(rv1[i])
        if t > anorm:
            anorm = t

    if want_uv:
        # accumulate right-hand transformations
        g = 0.0
        l = n
        for i in range(n - 1, -1, -1):
            if i < n - 1:
                if g != 0.0:
                    for j in range(l, n):
                        v[j, i] = (a[i, j] / a[i, l]) / g
                    for j in range(l, n):
                        s = 0.0
                        for k in range(l, n):
                            s += a[i, k] * v[k, j]
                        for k in range(l, n):
                            v[k, j] += s * v[k, i]
                for j in range(l, n):
                    v[i, j] = 0.0
                    v[j, i] = 0.0
            v[i, i] = 1.0
            g = rv1[i]
            l = i
        # accumulate left-hand transformations
        for i in range(n - 1, -1, -1):
            l = i + 1
            g = w[i]
            for j in range(l, n):
                a[i, j] = 0.0
            if g != 0.0:
                g = 1.0 / g
                for j in range(l, n):
                    s = 0.0
                    for k in range(l, m):
                        s += a[k, i] * a[k, j]
                    fj = (s / a[i, i]) * g
                    for k in range(i, m):
                        a[k, j] += fj * a[k, i]
                for j in range(i, m):
                    a[j, i] *= g
            else:
                for j in range(i, m):
                    a[j, i] = 0.0
            a[i, i] += 1.0

    # implicit-shift QR on the bidiagonal form
    its = 0
    cap = 100 * n
    tol = _EPS * anorm
    for k in range(n - 1, -1, -1):
        while True:
            flag = True
            l = k
            nm = k - 1
            while True:
                nm = l - 1
                if abs(rv1[l]) <= tol:
                    flag = False
                    break
                if abs(w[nm]) <= tol:
                    break
                l -= 1
            if flag:
                # w[nm] negligible: rotate rv1[l..k] away from the left
                c = 0.0
                s = 1.0
                for i in range(l, k + 1):
                    f = s * rv1[i]
                    rv1[i] = c * rv1[i]
                    if abs(f) <= tol:
                        break
                    g = w[i]
                    h = math.hypot(f, g)
                    w[i] = h
                    h = 1.0 / h
                    c = g * h
                    s = -f * h
                    if want_uv:
                        for jj in range(m):
                            y = a[jj, nm]
                            z = a[jj, i]
                            a[jj, nm] = y * c + z * s
                            a[jj, i] = z * c - y * s
            z = w[k]
            if l == k:
                if z < 0.0:
                    w[k] = -z
                    if want_uv:
                        for jj in range(n):
                            v[jj, k] = -v[jj, k]
                break
            its += 1
            if its > cap:
                return w, False
            x = w[l]
            nm = k - 1
            y = w[nm]
            g = rv1[nm]
            h = rv1[k]
            f = ((y - z) * (y + z) + (g - h) * (g + h)) / (2.0 * h * y)
            g = math.hypot(f, 1.0)
            f = ((x - z) * (x + z) + h * ((y / (f + math.copysign(g, f))) - h)) / x
            c = 1.0
            s = 1.0
            for j in range(l, nm + 1):
                i = j + 1
                g = rv1[i]
                y = w[i]
                h = s * g
                g = c * g
                zz = math.hypot(f, h)
                rv1[j] = zz
                c = f / zz
                s = h / zz
                f = x * c + g * s
                g = g * c - x * s
                h = y * s
                y = y * c
                if want_uv:
                    for jj in range(n):
                        xx = v[jj, j]
                        zv = v[jj, i]
                        v[jj, j] = xx * c + zv * s
                        v[jj, i] = zv * c - xx * s
                zz = math.hypot(f, h)
                w[j] = zz
                if zz != 0.0:
                    zz = 1.0 / zz
                    c = f * zz
                    s = h * zz
                f = c * g + s * y
                x = c * y - s * g
                if want_uv:
                    for jj in range(m):
                        yy = a[jj, j]
                        zu = a[jj, i]
                        a[jj, j] = yy * c + zu * s
                        a[jj, i] = zu * c - yy * s
            rv1[l] = 0.0
            rv1[k] = f
            w[k] = x
    return w, True


def svd_values(a: np.ndarray) -> np.ndarray:
    """All singular values of a real matrix, descending."""
    a = np.array(a, dtype=np.float64, order="C", copy=True)
    if a.shape[0] < a.shape[1]:
        a = np.ascontiguousarray(a.T)
    dummy = np.zeros((0, 0))
    w, ok = _gkr_core(a, dummy, False)
    if not ok:
        raise ConvergenceFailure(
            f"singular value iteration exceeded {100 * a.shape[1]} QR steps"
        )
    return np.sort(w)[::-1].copy()


def svd_factor(a: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Compact SVD (U, s, Vt) with singular values descending."""
    a = np.asarray(a, dtype=np.float64)
    m, n = a.shape
    transposed = m < n
    work = np.array(a.T if transposed else a, dtype=np.float64, order="C", copy=True)
    v = np.zeros((work.shape[1], work.shape[1]))
    w, ok = _gkr_core(work, v, True)
    if not ok:
        raise ConvergenceFailure(
            f"singular value iteration exceeded {100 * work.shape[1]} QR steps"
        )
    order = np.argsort(-w, kind="stable")
    w = w[order]
    u = work[:, order]
    v = v[:, order]
    if transposed:
        return v, w, u.T
    return u, w, v.T
