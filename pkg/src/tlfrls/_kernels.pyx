# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled per-step kernels for small dense symmetric problems.

Signatures mirror ``tlfrls._pykernels``. Work happens in fixed stack buffers,
so dimensions above ``MAXN`` are delegated to the numpy implementation.
Eigenvalues come from cyclic Jacobi rotations.
"""

from libc.math cimport fabs, sqrt, isfinite, NAN

import numpy as np

from . import _pykernels as _py
from .errors import NotPositiveDefinite

cdef enum:
    NMAX = 8

MAXN = NMAX

BRANCH_SKIP = 0
BRANCH_ACCUMULATE = 1
BRANCH_FORGET = 2


cdef int _load_mat(const double[:, :] src, double* dst, int n) except -1:
    cdef int i, j
    for i in range(n):
        for j in range(n):
            dst[i * n + j] = src[i, j]
    return 0


cdef int _load_vec(const double[:] src, double* dst, int n) except -1:
    cdef int i
    for i in range(n):
        dst[i] = src[i]
    return 0


cdef object _mat_out(const double* a, int n):
    out = np.empty((n, n))
    cdef double[:, ::1] o = out
    cdef int i, j
    for i in range(n):
        for j in range(n):
            o[i, j] = a[i * n + j]
    return out


cdef object _vec_out(const double* a, int n):
    out = np.empty(n)
    cdef double[::1] o = out
    cdef int i
    for i in range(n):
        o[i] = a[i]
    return out


cdef bint _all_finite(const double* a, int m) noexcept nogil:
    cdef int i
    for i in range(m):
        if not isfinite(a[i]):
            return False
    return True


cdef void _jacobi(double* a, int n, double* w) noexcept nogil:
    # Destroys a. Writes ascending eigenvalues into w.
    cdef int sweep, p, q, k
    cdef double off, total, apq, app, aqq, theta, t, c, s, akp, akq, tmp
    for sweep in range(100):
        off = 0.0
        total = 0.0
        for p in range(n):
            total += a[p * n + p] * a[p * n + p]
            for q in range(p + 1, n):
                off += a[p * n + q] * a[p * n + q]
        total += 2.0 * off
        if off == 0.0 or off <= 1e-36 * total:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p * n + q]
                if apq == 0.0:
                    continue
                app = a[p * n + p]
                aqq = a[q * n + q]
                theta = (aqq - app) / (2.0 * apq)
                if fabs(theta) > 1e150:
                    t = 0.5 / theta
                elif theta >= 0.0:
                    t = 1.0 / (theta + sqrt(theta * theta + 1.0))
                else:
                    t = -1.0 / (-theta + sqrt(theta * theta + 1.0))
                c = 1.0 / sqrt(t * t + 1.0)
                s = t * c
                for k in range(n):
                    if k != p and k != q:
                        akp = a[k * n + p]
                        akq = a[k * n + q]
                        a[k * n + p] = c * akp - s * akq
                        a[p * n + k] = a[k * n + p]
                        a[k * n + q] = s * akp + c * akq
                        a[q * n + k] = a[k * n + q]
                a[p * n + p] = app - t * apq
                a[q * n + q] = aqq + t * apq
                a[p * n + q] = 0.0
                a[q * n + p] = 0.0
    for p in range(n):
        w[p] = a[p * n + p]
    for p in range(1, n):
        tmp = w[p]
        k = p - 1
        while k >= 0 and w[k] > tmp:
            w[k + 1] = w[k]
            k -= 1
        w[k + 1] = tmp


cdef void _eigvals(const double* a, int n, double* w) noexcept nogil:
    cdef double work[NMAX * NMAX]
    cdef int i
    if not _all_finite(a, n * n):
        for i in range(n):
            w[i] = NAN
        return
    for i in range(n * n):
        work[i] = a[i]
    _jacobi(work, n, w)


cdef double _min_eig(const double* a, int n) noexcept nogil:
    cdef double w[NMAX]
    _eigvals(a, n, w)
    return w[0]


cdef int _rank(const double* a, int n, double eps_rank) noexcept nogil:
    cdef double w[NMAX]
    cdef double big = 1.0
    cdef int i, count = 0
    _eigvals(a, n, w)
    for i in range(n):
        if not isfinite(w[i]):
            return 0
        if fabs(w[i]) > big:
            big = fabs(w[i])
    for i in range(n):
        if fabs(w[i]) > eps_rank * big:
            count += 1
    return count


cdef int _chol(const double* a, int n, double* l) noexcept nogil:
    # Lower factor, row-major. Returns -1 on a non-positive pivot.
    cdef int i, j, k
    cdef double acc
    for i in range(n * n):
        l[i] = 0.0
    for j in range(n):
        acc = a[j * n + j]
        for k in range(j):
            acc -= l[j * n + k] * l[j * n + k]
        if not (acc > 0.0) or not isfinite(acc):
            return -1
        l[j * n + j] = sqrt(acc)
        for i in range(j + 1, n):
            acc = a[i * n + j]
            for k in range(j):
                acc -= l[i * n + k] * l[j * n + k]
            l[i * n + j] = acc / l[j * n + j]
    return 0


cdef void _forward(const double* l, int n, double* b) noexcept nogil:
    cdef int i, k
    cdef double acc
    for i in range(n):
        acc = b[i]
        for k in range(i):
            acc -= l[i * n + k] * b[k]
        b[i] = acc / l[i * n + i]


cdef void _backward(const double* l, int n, double* b) noexcept nogil:
    # Solves L^T x = b in place.
    cdef int i, k
    cdef double acc
    for i in range(n - 1, -1, -1):
        acc = b[i]
        for k in range(i + 1, n):
            acc -= l[k * n + i] * b[k]
        b[i] = acc / l[i * n + i]


cdef int _spd_factor(const double* a, int n, double eps_psd, double* l) except -1:
    cdef double lmin = _min_eig(a, n)
    if not lmin > eps_psd:
        raise NotPositiveDefinite(f"min eigenvalue {lmin!r} <= {eps_psd!r}")
    if _chol(a, n, l) != 0:
        raise NotPositiveDefinite("Cholesky factorization failed")
    return 0


cdef void _matmul(const double* a, const double* b, int n, double* out) noexcept nogil:
    cdef int i, j, k
    cdef double acc
    for i in range(n):
        for j in range(n):
            acc = 0.0
            for k in range(n):
                acc += a[i * n + k] * b[k * n + j]
            out[i * n + j] = acc


def eigvalsh(a):
    cdef const double[:, :] av = np.asarray(a, dtype=np.float64)
    cdef int n = av.shape[0]
    if n > NMAX:
        return _py.eigvalsh(a)
    cdef double buf[NMAX * NMAX]
    cdef double w[NMAX]
    _load_mat(av, buf, n)
    _eigvals(buf, n, w)
    return _vec_out(w, n)


def numerical_rank(a, double eps_rank):
    cdef const double[:, :] av = np.asarray(a, dtype=np.float64)
    cdef int n = av.shape[0]
    if n > NMAX:
        return _py.numerical_rank(a, eps_rank)
    cdef double buf[NMAX * NMAX]
    _load_mat(av, buf, n)
    return _rank(buf, n, eps_rank)


def spd_solve(a, b, double eps_psd):
    cdef const double[:, :] av = np.asarray(a, dtype=np.float64)
    cdef int n = av.shape[0]
    if n > NMAX:
        return _py.spd_solve(a, b, eps_psd)
    cdef double abuf[NMAX * NMAX]
    cdef double l[NMAX * NMAX]
    cdef double col[NMAX]
    cdef int i, j, m
    _load_mat(av, abuf, n)
    _spd_factor(abuf, n, eps_psd, l)
    barr = np.array(b, dtype=np.float64)
    vector = barr.ndim == 1
    if vector:
        barr = barr.reshape(n, 1)
    cdef double[:, :] bv = barr
    m = bv.shape[1]
    for j in range(m):
        for i in range(n):
            col[i] = bv[i, j]
        _forward(l, n, col)
        _backward(l, n, col)
        for i in range(n):
            bv[i, j] = col[i]
    return barr.reshape(n) if vector else barr


def df_update(omega, m_vec, phi, double y_next, double mu, double eps_rank, double eps_div):
    cdef const double[:] phv = np.asarray(phi, dtype=np.float64)
    cdef int n = phv.shape[0]
    if n > NMAX:
        return _py.df_update(omega, m_vec, phi, y_next, mu, eps_rank, eps_div)
    cdef double om[NMAX * NMAX]
    cdef double cand[NMAX * NMAX]
    cdef double mv[NMAX]
    cdef double ph[NMAX]
    cdef double v[NMAX]
    cdef double phi2 = 0.0, m2, q = 0.0, pm = 0.0, coef
    cdef int i, j, branch
    _load_mat(np.asarray(omega, dtype=np.float64), om, n)
    _load_vec(np.asarray(m_vec, dtype=np.float64), mv, n)
    _load_vec(phv, ph, n)
    for i in range(n):
        phi2 += ph[i] * ph[i]
    if phi2 == 0.0:
        return _mat_out(om, n), _vec_out(mv, n), BRANCH_SKIP
    m2 = 1.0 + phi2
    for i in range(n):
        v[i] = 0.0
        for j in range(n):
            v[i] += om[i * n + j] * ph[j]
        q += ph[i] * v[i]
        pm += ph[i] * mv[i]
    branch = BRANCH_FORGET
    if q <= eps_div * phi2:
        branch = BRANCH_ACCUMULATE
    else:
        for i in range(n):
            for j in range(n):
                cand[i * n + j] = om[i * n + j] + ph[i] * ph[j] / m2
        if _rank(cand, n, eps_rank) > _rank(om, n, eps_rank):
            branch = BRANCH_ACCUMULATE
    if branch == BRANCH_ACCUMULATE:
        for i in range(n):
            for j in range(i, n):
                om[i * n + j] = om[i * n + j] + ph[i] * ph[j] / m2
            mv[i] = mv[i] + ph[i] * (y_next / m2)
    else:
        for i in range(n):
            for j in range(i, n):
                om[i * n + j] = om[i * n + j] - (mu / q) * v[i] * v[j] + ph[i] * ph[j] / m2
        coef = mu * pm / q
        for i in range(n):
            mv[i] = mv[i] - v[i] * coef + ph[i] * (y_next / m2)
    for i in range(n):
        for j in range(i + 1, n):
            om[j * n + i] = om[i * n + j]
    return _mat_out(om, n), _vec_out(mv, n), branch


def tlf_sqrt_step(theta, s, r, omega, m_vec, double lam, double eps_psd):
    cdef const double[:] thv = np.asarray(theta, dtype=np.float64)
    cdef int n = thv.shape[0]
    if n > NMAX:
        return _py.tlf_sqrt_step(theta, s, r, omega, m_vec, lam, eps_psd)
    cdef double th[NMAX]
    cdef double mv[NMAX]
    cdef double e[NMAX]
    cdef double sb[NMAX * NMAX]
    cdef double rb[NMAX * NMAX]
    cdef double om[NMAX * NMAX]
    cdef double p[NMAX * NMAX]
    cdef double op[NMAX * NMAX]
    cdef double nm[NMAX * NMAX]
    cdef double l[NMAX * NMAX]
    cdef double a[NMAX * NMAX]
    cdef double g[NMAX * NMAX]
    cdef double st[NMAX * NMAX]
    cdef double col[NMAX]
    cdef double acc
    cdef int i, j, k
    _load_vec(thv, th, n)
    _load_vec(np.asarray(m_vec, dtype=np.float64), mv, n)
    _load_mat(np.asarray(s, dtype=np.float64), sb, n)
    _load_mat(np.asarray(r, dtype=np.float64), rb, n)
    _load_mat(np.asarray(omega, dtype=np.float64), om, n)
    # P = S S^T
    for i in range(n):
        for j in range(i, n):
            acc = 0.0
            for k in range(n):
                acc += sb[i * n + k] * sb[j * n + k]
            p[i * n + j] = acc
            p[j * n + i] = acc
    _matmul(om, p, n, op)
    # N = lam I + (Omega P) Omega
    _matmul(op, om, n, nm)
    for i in range(n):
        for j in range(i, n):
            acc = 0.5 * (nm[i * n + j] + nm[j * n + i])
            nm[i * n + j] = acc
            nm[j * n + i] = acc
        nm[i * n + i] += lam
    for i in range(n):
        acc = -mv[i]
        for k in range(n):
            acc += om[i * n + k] * th[k]
        e[i] = acc
    _spd_factor(nm, n, eps_psd, l)
    _forward(l, n, e)
    _backward(l, n, e)
    # theta -= (Omega P)^T x
    for i in range(n):
        acc = 0.0
        for k in range(n):
            acc += op[k * n + i] * e[k]
        th[i] -= acc
    # A = S^T Omega ; G = lam I + A A^T
    for i in range(n):
        for j in range(n):
            acc = 0.0
            for k in range(n):
                acc += sb[k * n + i] * om[k * n + j]
            a[i * n + j] = acc
    for i in range(n):
        for j in range(i, n):
            acc = 0.0
            for k in range(n):
                acc += a[i * n + k] * a[j * n + k]
            g[i * n + j] = acc
            g[j * n + i] = acc
        g[i * n + i] += lam
    _spd_factor(g, n, eps_psd, l)
    # S_new^T = C^{-1} S^T, column by column
    for j in range(n):
        for i in range(n):
            col[i] = sb[j * n + i]
        _forward(l, n, col)
        for i in range(n):
            st[i * n + j] = col[i]
    for i in range(n):
        for j in range(n):
            sb[i * n + j] = st[j * n + i]
    for i in range(n):
        for j in range(i, n):
            acc = 0.0
            for k in range(n):
                acc += sb[i * n + k] * sb[j * n + k]
            p[i * n + j] = acc
            p[j * n + i] = acc
    # R = lam R + Omega^2
    for i in range(n):
        for j in range(i, n):
            acc = 0.0
            for k in range(n):
                acc += om[i * n + k] * om[k * n + j]
            acc = lam * 0.5 * (rb[i * n + j] + rb[j * n + i]) + acc
            rb[i * n + j] = acc
            rb[j * n + i] = acc
    return _vec_out(th, n), _mat_out(sb, n), _mat_out(p, n), _mat_out(rb, n)


def tlf_direct_step(theta, p, r, omega, m_vec, double lam, double eps_psd):
    cdef const double[:] thv = np.asarray(theta, dtype=np.float64)
    cdef int n = thv.shape[0]
    if n > NMAX:
        return _py.tlf_direct_step(theta, p, r, omega, m_vec, lam, eps_psd)
    cdef double th[NMAX]
    cdef double mv[NMAX]
    cdef double e[NMAX]
    cdef double col[NMAX]
    cdef double pb[NMAX * NMAX]
    cdef double rb[NMAX * NMAX]
    cdef double om[NMAX * NMAX]
    cdef double op[NMAX * NMAX]
    cdef double nm[NMAX * NMAX]
    cdef double l[NMAX * NMAX]
    cdef double y[NMAX * NMAX]
    cdef double pn[NMAX * NMAX]
    cdef double acc, asym = 0.0
    cdef int i, j, k
    _load_vec(thv, th, n)
    _load_vec(np.asarray(m_vec, dtype=np.float64), mv, n)
    _load_mat(np.asarray(p, dtype=np.float64), pb, n)
    _load_mat(np.asarray(r, dtype=np.float64), rb, n)
    _load_mat(np.asarray(omega, dtype=np.float64), om, n)
    _matmul(om, pb, n, op)
    _matmul(op, om, n, nm)
    for i in range(n):
        for j in range(i, n):
            acc = 0.5 * (nm[i * n + j] + nm[j * n + i])
            nm[i * n + j] = acc
            nm[j * n + i] = acc
        nm[i * n + i] += lam
    for i in range(n):
        acc = -mv[i]
        for k in range(n):
            acc += om[i * n + k] * th[k]
        e[i] = acc
    _spd_factor(nm, n, eps_psd, l)
    _forward(l, n, e)
    _backward(l, n, e)
    for i in range(n):
        acc = 0.0
        for k in range(n):
            acc += op[k * n + i] * e[k]
        th[i] -= acc
    # Y = N^{-1} (Omega P)
    for j in range(n):
        for i in range(n):
            col[i] = op[i * n + j]
        _forward(l, n, col)
        _backward(l, n, col)
        for i in range(n):
            y[i * n + j] = col[i]
    for i in range(n):
        for j in range(n):
            acc = 0.0
            for k in range(n):
                acc += op[k * n + i] * y[k * n + j]
            pn[i * n + j] = (pb[i * n + j] - acc) / lam
    for i in range(n):
        for j in range(i + 1, n):
            if fabs(pn[i * n + j] - pn[j * n + i]) > asym:
                asym = fabs(pn[i * n + j] - pn[j * n + i])
            acc = 0.5 * (pn[i * n + j] + pn[j * n + i])
            pn[i * n + j] = acc
            pn[j * n + i] = acc
    for i in range(n):
        for j in range(i, n):
            acc = 0.0
            for k in range(n):
                acc += om[i * n + k] * om[k * n + j]
            acc = lam * 0.5 * (rb[i * n + j] + rb[j * n + i]) + acc
            rb[i * n + j] = acc
            rb[j * n + i] = acc
    return _vec_out(th, n), _mat_out(pn, n), _mat_out(rb, n), asym


def ef_rls_step(theta, p, r, phi, double y_next, double lam):
    cdef const double[:] thv = np.asarray(theta, dtype=np.float64)
    cdef int n = thv.shape[0]
    if n > NMAX:
        return _py.ef_rls_step(theta, p, r, phi, y_next, lam)
    cdef double th[NMAX]
    cdef double ph[NMAX]
    cdef double v[NMAX]
    cdef double pb[NMAX * NMAX]
    cdef double rb[NMAX * NMAX]
    cdef double den, err, acc
    cdef int i, j, k
    _load_vec(thv, th, n)
    _load_vec(np.asarray(phi, dtype=np.float64), ph, n)
    _load_mat(np.asarray(p, dtype=np.float64), pb, n)
    _load_mat(np.asarray(r, dtype=np.float64), rb, n)
    den = lam
    err = y_next
    for i in range(n):
        acc = 0.0
        for k in range(n):
            acc += pb[i * n + k] * ph[k]
        v[i] = acc
        den += ph[i] * acc
        err -= ph[i] * th[i]
    for i in range(n):
        th[i] += v[i] / den * err
    for i in range(n):
        for j in range(i, n):
            acc = (0.5 * (pb[i * n + j] + pb[j * n + i]) - v[i] / den * v[j]) / lam
            pb[i * n + j] = acc
            pb[j * n + i] = acc
    for i in range(n):
        for j in range(n):
            rb[i * n + j] = lam * rb[i * n + j] + ph[i] * ph[j]
    return _vec_out(th, n), _mat_out(pb, n), _mat_out(rb, n), err
