"""Pure-numpy kernel implementations.

Fallback path used when numba is unavailable or GEOBLUR_BACKEND=numpy.
Every function here has a loop-level twin in ``numba_impl`` with the same
signature and the same math; only the execution strategy differs.
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import ConvergenceFailure

# ---------------------------------------------------------------------------
# Gradient stencils (replicate-edge padding, un-normalized kernels)
# ---------------------------------------------------------------------------


def sobel_gradients(plane: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """3x3 Sobel x/y partials of a float plane, replicate-padded."""
    p = np.pad(plane, 1, mode="edge")
    nw, n_, ne = p[:-2, :-2], p[:-2, 1:-1], p[:-2, 2:]
    w_, e_ = p[1:-1, :-2], p[1:-1, 2:]
    sw, s_, se = p[2:, :-2], p[2:, 1:-1], p[2:, 2:]
    gx = (ne + 2.0 * e_ + se) - (nw + 2.0 * w_ + sw)
    gy = (sw + 2.0 * s_ + se) - (nw + 2.0 * n_ + ne)
    return gx, gy


def central_gradients(plane: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Unit central differences (no 1/2 normalization), replicate-padded."""
    p = np.pad(plane, 1, mode="edge")
    gx = p[1:-1, 2:] - p[1:-1, :-2]
    gy = p[2:, 1:-1] - p[:-2, 1:-1]
    return gx, gy


# ---------------------------------------------------------------------------
# Area-average resampling via an exact integral image
# ---------------------------------------------------------------------------


def area_resample(plane: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    """Box means over the fractional coverage grid (out_h x out_w cells).

    Uses a zero-bordered integral image; bilinear evaluation at fractional
    coordinates is exact for piecewise-constant pixels.
    """
    h, w = plane.shape
    integral = np.zeros((h + 1, w + 1))
    np.cumsum(np.cumsum(plane, axis=0), axis=1, out=integral[1:, 1:])

    ys = np.linspace(0.0, float(h), out_h + 1)
    xs = np.linspace(0.0, float(w), out_w + 1)

    def _eval(yy: np.ndarray, xx: np.ndarray) -> np.ndarray:
        y0 = np.minimum(yy.astype(np.int64), h - 1)
        x0 = np.minimum(xx.astype(np.int64), w - 1)
        ty = (yy - y0)[:, None]
        tx = (xx - x0)[None, :]
        f00 = integral[np.ix_(y0, x0)]
        f10 = integral[np.ix_(y0 + 1, x0)]
        f01 = integral[np.ix_(y0, x0 + 1)]
        f11 = integral[np.ix_(y0 + 1, x0 + 1)]
        return (
            (1 - ty) * (1 - tx) * f00
            + ty * (1 - tx) * f10
            + (1 - ty) * tx * f01
            + ty * tx * f11
        )

    box = _eval(ys[1:], xs[1:]) - _eval(ys[1:], xs[:-1]) - _eval(ys[:-1], xs[1:]) + _eval(ys[:-1], xs[:-1])
    cell_area = (float(h) / out_h) * (float(w) / out_w)
    return box / cell_area


# ---------------------------------------------------------------------------
# Rotation-average blur (bilinear sampling, replicate-edge clamp)
# ---------------------------------------------------------------------------


def rotate_mean(plane: np.ndarray, extent: int) -> np.ndarray:
    """Mean of the plane rotated by every integer degree in [-extent, extent].

    Rotation is about the pixel-grid center ((w-1)/2, (h-1)/2); samples
    falling outside the frame clamp to the nearest edge pixel.
    """
    h, w = plane.shape
    cy, cx = (h - 1) / 2.0, (w - 1) / 2.0
    jj, ii = np.meshgrid(np.arange(w, dtype=np.float64), np.arange(h, dtype=np.float64))
    dx = jj - cx
    dy = ii - cy
    acc = np.zeros((h, w))
    for deg in range(-extent, extent + 1):
        a = math.radians(float(deg))
        ca, sa = math.cos(a), math.sin(a)
        sx = np.clip(cx + ca * dx + sa * dy, 0.0, w - 1.0)
        sy = np.clip(cy - sa * dx + ca * dy, 0.0, h - 1.0)
        x0 = sx.astype(np.int64)
        y0 = sy.astype(np.int64)
        x1 = np.minimum(x0 + 1, w - 1)
        y1 = np.minimum(y0 + 1, h - 1)
        tx = sx - x0
        ty = sy - y0
        top = plane[y0, x0] * (1.0 - tx) + plane[y0, x1] * tx
        bot = plane[y1, x0] * (1.0 - tx) + plane[y1, x1] * tx
        acc += top * (1.0 - ty) + bot * ty
    return acc / float(2 * extent + 1)


# ---------------------------------------------------------------------------
# 2D DFT: batched radix-2 with a Bluestein fallback for non-power-of-two
# ---------------------------------------------------------------------------

_CHUNK_ELEMS = 1 << 22  # cap temporaries at ~64 MB of complex128


def _next_pow2(n: int) -> int:
    return 1 << (n - 1).bit_length()


def _bit_reverse_perm(m: int) -> np.ndarray:
    bits = m.bit_length() - 1
    idx = np.arange(m, dtype=np.int64)
    rev = np.zeros(m, dtype=np.int64)
    for b in range(bits):
        rev = (rev << 1) | ((idx >> b) & 1)
    return rev


def _fft_pow2_last(x: np.ndarray) -> np.ndarray:
    """Iterative DIT radix-2 along the last axis; length must be a power of 2."""
    m = x.shape[-1]
    if m == 1:
        return x.copy()
    y = np.ascontiguousarray(x[..., _bit_reverse_perm(m)], dtype=np.complex128)
    s = 2
    while s <= m:
        half = s // 2
        tw = np.exp((-2j * np.pi / s) * np.arange(half))
        view = y.reshape(y.shape[:-1] + (m // s, s))
        even = view[..., :half]
        odd = view[..., half:] * tw
        upper = even + odd
        lower = even - odd
        view[..., :half] = upper
        view[..., half:] = lower
        s *= 2
    return y


def _bluestein_tables(n: int) -> tuple[np.ndarray, np.ndarray, int]:
    k = np.arange(n, dtype=np.int64)
    chirp = np.exp((-1j * np.pi / n) * ((k * k) % (2 * n)))
    m = _next_pow2(2 * n - 1)
    b = np.zeros(m, dtype=np.complex128)
    b[:n] = np.conj(chirp)
    if n > 1:
        b[m - n + 1 :] = np.conj(chirp)[1:][::-1]
    bhat = _fft_pow2_last(b)
    return chirp, bhat, m


def _fft_last(x: np.ndarray) -> np.ndarray:
    """DFT along the last axis for arbitrary length."""
    n = x.shape[-1]
    if n == 1:
        return x.astype(np.complex128, copy=True)
    if n & (n - 1) == 0:
        return _fft_pow2_last(x)
    chirp, bhat, m = _bluestein_tables(n)
    flat = x.reshape(-1, n)
    out = np.empty_like(flat, dtype=np.complex128)
    step = max(1, _CHUNK_ELEMS // m)
    for lo in range(0, flat.shape[0], step):
        seg = flat[lo : lo + step]
        buf = np.zeros((seg.shape[0], m), dtype=np.complex128)
        buf[:, :n] = seg * chirp
        spec = _fft_pow2_last(buf) * bhat
        conv = np.conj(_fft_pow2_last(np.conj(spec))) / m
        out[lo : lo + step] = conv[:, :n] * chirp
    return out.reshape(x.shape)


def fft2(z: np.ndarray) -> np.ndarray:
    """Forward unnormalized 2D DFT of a complex matrix, exact size."""
    z = np.ascontiguousarray(z, dtype=np.complex128)
    rows = _fft_last(z)
    cols = _fft_last(np.ascontiguousarray(rows.T))
    return np.ascontiguousarray(cols.T)


def ifft2(z: np.ndarray) -> np.ndarray:
    """Inverse 2D DFT with 1/(M*N) normalization."""
    z = np.asarray(z, dtype=np.complex128)
    return np.conj(fft2(np.conj(z))) / z.size


# ---------------------------------------------------------------------------
# Singular values via Golub-Kahan bidiagonalization + implicit-shift QR
# ---------------------------------------------------------------------------

_EPS = float(np.finfo(np.float64).eps)


def _bidiagonalize(a: np.ndarray, want_uv: bool) -> tuple:
    """Householder reduction of a (m>=n) to bidiagonal form.

    Returns (w, rv1, anorm, v) where w holds the diagonal, rv1 the
    superdiagonal (rv1[0] unused), and ``a`` is overwritten: with want_uv it
    is further turned into the left factor U, and v into the right factor.
    """
    m, n = a.shape
    w = np.zeros(n)
    rv1 = np.zeros(n)
    v = np.zeros((n, n)) if want_uv else np.zeros((0, 0))
    g = 0.0
    scale = 0.0
    anorm = 0.0
    l = 0
    for i in range(n):
        l = i + 1
        rv1[i] = scale * g
        g = scale = 0.0
        if i < m:
            scale = float(np.sum(np.abs(a[i:, i])))
            if scale != 0.0:
                a[i:, i] /= scale
                s = float(a[i:, i] @ a[i:, i])
                f = a[i, i]
                g = -math.copysign(math.sqrt(s), f)
                h = f * g - s
                a[i, i] = f - g
                if l < n:
                    fs = (a[i:, i] @ a[i:, l:]) / h
                    a[i:, l:] += np.outer(a[i:, i], fs)
                a[i:, i] *= scale
        w[i] = scale * g
        g = scale = 0.0
        if i < m and i != n - 1:
            scale = float(np.sum(np.abs(a[i, l:])))
            if scale != 0.0:
                a[i, l:] /= scale
                s = float(a[i, l:] @ a[i, l:])
                f = a[i, l]
                g = -math.copysign(math.sqrt(s), f)
                h = f * g - s
                a[i, l] = f - g
                if l < m:
                    ss = a[l:, l:] @ a[i, l:]
                    a[l:, l:] += np.outer(ss, a[i, l:] / h)
                a[i, l:] *= scale
        anorm = max(anorm, abs(w[i]) + abs(rv1[i]))

    if want_uv:
        # accumulate right-hand transformations
        g = 0.0
        l = n
        for i in range(n - 1, -1, -1):
            if i < n - 1:
                if g != 0.0:
                    v[l:, i] = (a[i, l:] / a[i, l]) / g
                    s = a[i, l:] @ v[l:, l:]
                    v[l:, l:] += np.outer(v[l:, i], s)
                v[i, l:] = 0.0
                v[l:, i] = 0.0
            v[i, i] = 1.0
            g = rv1[i]
            l = i
        # accumulate left-hand transformations
        for i in range(n - 1, -1, -1):
            l = i + 1
            g = w[i]
            a[i, l:] = 0.0
            if g != 0.0:
                g = 1.0 / g
                if l < n:
                    s = a[l:, i] @ a[l:, l:]
                    fs = (s / a[i, i]) * g
                    a[i:, l:] += np.outer(a[i:, i], fs)
                a[i:, i] *= g
            else:
                a[i:, i] = 0.0
            a[i, i] += 1.0
    return w, rv1, anorm, v


def _gkr(a: np.ndarray, want_uv: bool) -> tuple:
    """Golub-Kahan-Reinsch SVD of a tall matrix (m >= n), in place."""
    m, n = a.shape
    w, rv1, anorm, v = _bidiagonalize(a, want_uv)
    u = a
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
                # w[nm] is negligible: rotate rv1[l..k] away from the left
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
                        y = u[:, nm].copy()
                        z = u[:, i].copy()
                        u[:, nm] = y * c + z * s
                        u[:, i] = z * c - y * s
            z = w[k]
            if l == k:
                if z < 0.0:
                    w[k] = -z
                    if want_uv:
                        v[:, k] = -v[:, k]
                break
            its += 1
            if its > cap:
                raise ConvergenceFailure(
                    f"singular value iteration exceeded {cap} QR steps"
                )
            # Wilkinson-style shift from the trailing 2x2 minor
            x = w[l]
            nm = k - 1
            y = w[nm]
            g = rv1[nm]
            h = rv1[k]
            f = ((y - z) * (y + z) + (g - h) * (g + h)) / (2.0 * h * y)
            g = math.hypot(f, 1.0)
            f = ((x - z) * (x + z) + h * ((y / (f + math.copysign(g, f))) - h)) / x
            # chase the bulge with Givens rotations
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
                    xx = v[:, j].copy()
                    zv = v[:, i].copy()
                    v[:, j] = xx * c + zv * s
                    v[:, i] = zv * c - xx * s
                zz = math.hypot(f, h)
                w[j] = zz
                if zz != 0.0:
                    zz = 1.0 / zz
                    c = f * zz
                    s = h * zz
                f = c * g + s * y
                x = c * y - s * g
                if want_uv:
                    yy = u[:, j].copy()
                    zu = u[:, i].copy()
                    u[:, j] = yy * c + zu * s
                    u[:, i] = zu * c - yy * s
            rv1[l] = 0.0
            rv1[k] = f
            w[k] = x
    return w, u, v


def svd_values(a: np.ndarray) -> np.ndarray:
    """All singular values of a real matrix, descending."""
    a = np.array(a, dtype=np.float64, order="C", copy=True)
    if a.shape[0] < a.shape[1]:
        a = np.ascontiguousarray(a.T)
    w, _, _ = _gkr(a, want_uv=False)
    return np.sort(w)[::-1].copy()


def svd_factor(a: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Compact SVD (U, s, Vt) with singular values descending."""
    a = np.asarray(a, dtype=np.float64)
    m, n = a.shape
    transposed = m < n
    work = np.array(a.T if transposed else a, dtype=np.float64, order="C", copy=True)
    w, u, v = _gkr(work, want_uv=True)
    order = np.argsort(-w, kind="stable")
    w = w[order]
    u = u[:, order]
    v = v[:, order]
    if transposed:
        return v, w, u.T
    return u, w, v.T
