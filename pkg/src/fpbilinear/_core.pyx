# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled twins of the hot kernels in fpbilinear._core_py.

Same functions, same semantics, same reduction orderings; the pure
module is the reference implementation and the equivalence suite keeps
the two aligned.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport sqrt

cnp.import_array()

NAME = "compiled"


def dft_naive(values, roots):
    """O(p^2) transform with Kahan-compensated accumulation per output."""
    cdef const cnp.complex128_t[::1] f = np.ascontiguousarray(values, dtype=np.complex128)
    cdef const cnp.complex128_t[::1] w = np.ascontiguousarray(roots, dtype=np.complex128)
    cdef Py_ssize_t p = f.shape[0]
    out = np.empty(p, dtype=np.complex128)
    cdef cnp.complex128_t[::1] o = out
    cdef Py_ssize_t z, x
    cdef long long idx, pl = p
    cdef double sr, si, cr, ci, tr, ti, yr, yi, vr, vi, wr, wi
    for z in range(p):
        sr = si = cr = ci = 0.0
        idx = 0
        for x in range(p):
            wr = w[idx].real
            wi = w[idx].imag
            vr = f[x].real
            vi = f[x].imag
            tr = vr * wr - vi * wi
            ti = vr * wi + vi * wr
            # Kahan step, real and imaginary tracks
            yr = tr - cr
            vr = sr + yr
            cr = (vr - sr) - yr
            sr = vr
            yi = ti - ci
            vi = si + yi
            ci = (vi - si) - yi
            si = vi
            idx += z
            if idx >= pl:
                idx -= pl
        o[z].real = sr
        o[z].imag = si
    return out


def k1_brute_naive(long long p, roots, long long x1, long long x2, long long x3):
    """Definitional O(p^3) triple sum with Kahan accumulation."""
    cdef const cnp.complex128_t[::1] w = np.ascontiguousarray(roots, dtype=np.complex128)
    cdef long long y1, y2, y3, t1, t2, widx, phase
    x1 = ((x1 % p) + p) % p
    x2 = ((x2 % p) + p) % p
    x3 = ((x3 % p) + p) % p
    cdef long long wq = ((x2 + x3 - x1) % p + p) % p
    cdef long long v = ((x2 - x1) % p + p) % p
    sq_arr = (np.arange(p, dtype=np.int64) ** 2) % p
    a2_arr = (p - x2) * sq_arr % p
    a3_arr = ((p - x3) * sq_arr + (p - v) * np.arange(p, dtype=np.int64)) % p
    wsq_arr = wq * sq_arr % p
    cdef long long[::1] a2 = a2_arr
    cdef long long[::1] a3 = a3_arr
    cdef long long[::1] wsq = wsq_arr
    cdef double sr = 0.0, si = 0.0, cr = 0.0, ci = 0.0, yr, yi, tr, ti
    for y1 in range(p):
        t1 = (x1 * y1 % p * y1 + v * y1) % p
        for y2 in range(p):
            t2 = (t1 + a2[y2]) % p
            widx = (y2 - y1) % p
            if widx < 0:
                widx += p
            for y3 in range(p):
                phase = t2 + a3[y3] + wsq[widx]
                phase = phase % p
                tr = w[phase].real
                ti = w[phase].imag
                yr = tr - cr
                tr = sr + yr
                cr = (tr - sr) - yr
                sr = tr
                yi = ti - ci
                ti = si + yi
                ci = (ti - si) - yi
                si = ti
                widx += 1
                if widx >= p:
                    widx -= p
    return complex(sr, si) / p**3


def k1_brute_grouped(long long p, roots, long long x1, long long x2, long long x3):
    """Exact regrouping of the same triple sum into two correlations, O(p^2)."""
    x1 = x1 % p
    x2 = x2 % p
    x3 = x3 % p
    ar = np.arange(p, dtype=np.int64)
    sq = ar * ar % p
    a_arr = np.asarray(roots)[x1 * sq % p]
    b_arr = np.asarray(roots)[(p - x2) * sq % p]
    c_arr = np.asarray(roots)[(p - x3) * sq % p]
    d_arr = np.asarray(roots)[(x2 + x3 - x1) % p * sq % p]
    e_arr = np.asarray(roots)[(x2 - x1) % p * ar % p]
    cdef const cnp.complex128_t[::1] A = a_arr
    cdef const cnp.complex128_t[::1] B = b_arr
    cdef const cnp.complex128_t[::1] C = c_arr
    cdef const cnp.complex128_t[::1] D = d_arr
    cdef const cnp.complex128_t[::1] E = e_arr
    cdef long long t, y, idx
    cdef double fr, fi, gr, gi, er, ei, tr, ti, accr = 0.0, acci = 0.0
    for t in range(p):
        fr = fi = gr = gi = 0.0
        idx = t
        for y in range(p):
            fr += B[y].real * D[idx].real - B[y].imag * D[idx].imag
            fi += B[y].real * D[idx].imag + B[y].imag * D[idx].real
            gr += A[y].real * C[idx].real - A[y].imag * C[idx].imag
            gi += A[y].real * C[idx].imag + A[y].imag * C[idx].real
            idx += 1
            if idx >= p:
                idx -= p
        er = E[(p - t) % p].real
        ei = E[(p - t) % p].imag
        tr = gr * fr - gi * fi
        ti = gr * fi + gi * fr
        accr += tr * er - ti * ei
        acci += tr * ei + ti * er
    return complex(accr, acci) / p**3


cdef double complex _quad3(
    long long p,
    const cnp.complex128_t[::1] w,
    const cnp.npy_int8[::1] leg,
    const long long[::1] inv,
    double complex sigma,
    long long d0, long long d1, long long d2,
    long long c01, long long c02, long long c12,
    long long l0, long long l1, long long l2,
    long long const,
):
    """Sum of e_p over F_p^3 of a quadratic phase; see the pure twin."""
    cdef double sqrtp = sqrt(<double> p)
    cdef long long d[3]
    cdef long long c[3][3]
    cdef long long ln[3]
    cdef bint active[3]
    cdef long long k = const % p
    cdef long long inv4 = inv[4 % p]
    cdef int order[3]
    cdef double complex m = 1.0
    cdef int i, j, piv, jj, kk, nrest, round_
    cdef int rest[2]
    cdef long long a, f, b0, bj, cinv, beta, alpha

    d[0] = (d0 % p + p) % p; d[1] = (d1 % p + p) % p; d[2] = (d2 % p + p) % p
    c[0][0] = c[1][1] = c[2][2] = 0
    c[0][1] = c[1][0] = (c01 % p + p) % p
    c[0][2] = c[2][0] = (c02 % p + p) % p
    c[1][2] = c[2][1] = (c12 % p + p) % p
    ln[0] = (l0 % p + p) % p; ln[1] = (l1 % p + p) % p; ln[2] = (l2 % p + p) % p
    k = (k + p) % p
    active[0] = active[1] = active[2] = True
    order[0] = 1; order[1] = 2; order[2] = 0

    for round_ in range(3):
        if not (active[0] or active[1] or active[2]):
            break
        piv = -1
        for i in range(3):
            j = order[i]
            if active[j] and d[j] != 0:
                piv = j
                break
        if piv >= 0:
            a = d[piv]
            f = inv4 * inv[a] % p
            m = m * (sqrtp * leg[a]) * sigma
            nrest = 0
            for i in range(3):
                if active[i] and i != piv:
                    rest[nrest] = i
                    nrest += 1
            b0 = ln[piv]
            k = (k - f * (b0 * b0 % p)) % p
            if k < 0:
                k += p
            for i in range(nrest):
                j = rest[i]
                bj = c[piv][j]
                d[j] = (d[j] - f * (bj * bj % p)) % p
                if d[j] < 0:
                    d[j] += p
                ln[j] = (ln[j] - 2 * f * (bj * b0 % p)) % p
                if ln[j] < 0:
                    ln[j] += p
            if nrest == 2:
                c[rest[0]][rest[1]] = (
                    c[rest[0]][rest[1]]
                    - 2 * f * (c[piv][rest[0]] * c[piv][rest[1]] % p)
                ) % p
                if c[rest[0]][rest[1]] < 0:
                    c[rest[0]][rest[1]] += p
                c[rest[1]][rest[0]] = c[rest[0]][rest[1]]
            active[piv] = False
            continue

        piv = -1
        jj = -1
        for i in range(3):
            if piv >= 0:
                break
            if not active[order[i]]:
                continue
            for j in range(3):
                if order[j] != order[i] and active[order[j]] and \
                        c[order[i]][order[j]] != 0:
                    piv = order[i]
                    jj = order[j]
                    break
        if piv >= 0:
            m = m * p
            cinv = inv[c[piv][jj]]
            beta = (p - ln[piv]) * cinv % p
            kk = -1
            for i in range(3):
                if active[i] and i != piv and i != jj:
                    kk = i
            if kk >= 0:
                alpha = (p - c[piv][kk]) * cinv % p
                d[kk] = (d[kk] + (d[jj] * alpha % p) * alpha + c[jj][kk] * alpha) % p
                ln[kk] = (
                    ln[kk]
                    + 2 * (d[jj] * alpha % p) * beta
                    + c[jj][kk] * beta
                    + ln[jj] * alpha
                ) % p
            k = (k + (d[jj] * beta % p) * beta + ln[jj] * beta) % p
            active[piv] = False
            active[jj] = False
            continue

        for i in range(3):
            if active[i]:
                if ln[i] != 0:
                    return 0.0
                m = m * p
                active[i] = False
        break

    return m * w[k]


def quad3_sum(long long p, roots, leg, inv, sigma,
              long long d0, long long d1, long long d2,
              long long c01, long long c02, long long c12,
              long long l0, long long l1, long long l2, long long const):
    cdef const cnp.complex128_t[::1] w = np.ascontiguousarray(roots, dtype=np.complex128)
    cdef const cnp.npy_int8[::1] lg = np.ascontiguousarray(leg, dtype=np.int8)
    cdef const long long[::1] iv = np.ascontiguousarray(inv, dtype=np.int64)
    return complex(_quad3(p, w, lg, iv, sigma, d0, d1, d2,
                          c01, c02, c12, l0, l1, l2, const))


cdef inline double complex _k1_reduced_c(
    long long p,
    const cnp.complex128_t[::1] w,
    const cnp.npy_int8[::1] leg,
    const long long[::1] inv,
    double complex sigma,
    long long x1, long long x2, long long x3,
):
    cdef long long wq = ((x2 + x3 - x1) % p + p) % p
    cdef long long v = ((x2 - x1) % p + p) % p
    cdef long long nw = (p - 2 * wq % p) % p
    cdef double pc = <double> p
    return _quad3(
        p, w, leg, inv, sigma,
        (x2 + x3) % p, ((x3 - x1) % p + p) % p, v,
        nw, nw, 2 * wq % p,
        v, 0, (p - v) % p,
        0,
    ) / (pc * pc * pc)


def k1_reduced(long long p, roots, leg, inv, sigma,
               long long x1, long long x2, long long x3):
    """O(1) kernel value via three-variable elimination."""
    cdef const cnp.complex128_t[::1] w = np.ascontiguousarray(roots, dtype=np.complex128)
    cdef const cnp.npy_int8[::1] lg = np.ascontiguousarray(leg, dtype=np.int8)
    cdef const long long[::1] iv = np.ascontiguousarray(inv, dtype=np.int64)
    return complex(_k1_reduced_c(p, w, lg, iv, sigma, x1 % p, x2 % p, x3 % p))


def k2_brute(long long p, roots, inv, sqrt_lo, sqrt_hi,
             long long u1, long long u2, long long u3):
    """O(p^3) constrained enumeration; see the pure twin for the layout."""
    cdef const cnp.complex128_t[::1] w = np.ascontiguousarray(roots, dtype=np.complex128)
    cdef const long long[::1] iv = np.ascontiguousarray(inv, dtype=np.int64)
    cdef const long long[::1] lo = np.ascontiguousarray(sqrt_lo, dtype=np.int64)
    cdef const long long[::1] hi = np.ascontiguousarray(sqrt_hi, dtype=np.int64)
    u1 = u1 % p
    u2 = u2 % p
    u3 = u3 % p
    cdef long long s23 = (u2 + u3) % p
    cdef long long s13 = (u1 + u3) % p
    cdef long long iu3 = iv[u3]
    cdef long long a2 = iu3 * (s23 * s23 % p) % p
    cdef long long a1 = iu3 * (s13 * s13 % p) % p
    cdef long long inv2 = iv[2]
    cdef long long y1, y3, y4, y6, d13, t13, c0, cs, disc, r, base4, d46, phase
    cdef int which
    cdef double sr = 0.0, si = 0.0
    for y1 in range(p):
        for y3 in range(p):
            d13 = (y3 - y1) % p
            if d13 < 0:
                d13 += p
            t13 = (
                (p - a2) * (d13 * d13 % p)
                + u2 * (y3 * y3 % p)
                + s23 * (y1 * y1 % p)
                + (p - 2 * s23 % p) * (y1 * y3 % p)
                + u2 * ((y1 - y3) % p + p)
            ) % p
            c0 = ((y1 * y1 - y3 * y3 - y1 + y3) % p + p) % p
            for y4 in range(p):
                cs = ((c0 - y4 * y4 + y4) % p + p) % p
                disc = ((1 - 4 * cs) % p + p) % p
                if lo[disc] < 0:
                    continue
                base4 = (t13 + (p - s13) * (y4 * y4 % p)) % p
                for which in range(2):
                    r = lo[disc] if which == 0 else hi[disc]
                    if which == 1 and r == lo[disc]:
                        break
                    y6 = (1 + r) * inv2 % p
                    d46 = (y6 - y4) % p
                    if d46 < 0:
                        d46 += p
                    phase = (
                        base4
                        + a1 * (d46 * d46 % p)
                        + (p - u1) * (y6 * y6 % p)
                        + (2 * s13 % p) * (y4 * y6 % p)
                        + (p - u1) * (((y4 - y6) % p) + p)
                    ) % p
                    sr += w[phase].real
                    si += w[phase].imag
    return complex(sr, si) / (<double> p)**4


def k2_via_h2(long long p, roots, leg, inv, sigma,
              long long u1, long long u2, long long u3):
    """O(p) collapse-identity evaluation with inlined reduced kernels."""
    cdef const cnp.complex128_t[::1] w = np.ascontiguousarray(roots, dtype=np.complex128)
    cdef const cnp.npy_int8[::1] lg = np.ascontiguousarray(leg, dtype=np.int8)
    cdef const long long[::1] iv = np.ascontiguousarray(inv, dtype=np.int64)
    cdef long long u4
    cdef double complex acc = 0.0, left, right
    u1 = u1 % p
    u2 = u2 % p
    u3 = u3 % p
    for u4 in range(p):
        left = _k1_reduced_c(p, w, lg, iv, sigma, u4, u2, (u3 + u4) % p)
        right = _k1_reduced_c(p, w, lg, iv, sigma, u4, u1, (u3 + u4) % p)
        acc += left * right.conjugate()
    return complex(acc)


def char_sum(long long p, roots, leg, inv,
             long long y1, long long y2, long long y3):
    """One-dimensional mixed character sum over y4, poles excluded."""
    cdef const cnp.complex128_t[::1] w = np.ascontiguousarray(roots, dtype=np.complex128)
    cdef const cnp.npy_int8[::1] lg = np.ascontiguousarray(leg, dtype=np.int8)
    cdef const long long[::1] iv = np.ascontiguousarray(inv, dtype=np.int64)
    y1 = y1 % p
    y2 = y2 % p
    y3 = y3 % p
    cdef long long inv4 = iv[4 % p]
    cdef long long y4, pole, lin, h1, h2, phase
    cdef int chi
    cdef double sr = 0.0, si = 0.0
    for y4 in range(1, p):
        pole = (y2 - y1 + y4) % p
        if pole < 0:
            pole += p
        if pole == 0:
            continue
        lin = ((y1 - 2 * y4) % p + p) % p
        h1 = (iv[y4] * lin + 1) % p
        h2 = (iv[pole] * lin + 1) % p
        chi = lg[h1 * h2 % p]
        if chi == 0:
            continue
        phase = inv4 * y3 % p * ((h2 - h1) % p + p) % p
        sr += chi * w[phase].real
        si += chi * w[phase].imag
    return complex(sr, si)


def count_progressions(member, long long p):
    """Pairs (x, y), y != 0, with x, x+y, x+y^2 in the indicated set."""
    cdef const cnp.npy_uint8[::1] a = np.ascontiguousarray(member, dtype=np.uint8)
    cdef long long x, y, ysq, xy, xysq, total = 0
    for y in range(1, p):
        ysq = y * y % p
        for x in range(p):
            if a[x] == 0:
                continue
            xy = x + y
            if xy >= p:
                xy -= p
            if a[xy] == 0:
                continue
            xysq = x + ysq
            if xysq >= p:
                xysq -= p
            total += a[xysq]
    return total
