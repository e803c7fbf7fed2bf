# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled Lawson-Hanson kernel.

Same algorithm, polish phase included, and return contract as
``_nnls_py.nnls_kernel``. The
least-squares subproblem on the passive set is solved with a Householder
QR factorization rebuilt from scratch at every inner step; the passive set
never exceeds the ambient dimension, so this stays cheap.
"""
import numpy as np

from libc.math cimport sqrt, INFINITY
from scipy.linalg.cython_blas cimport dgemv

DEF POLISH_CANDIDATES = 3
cdef double EPS = 2.220446049250313e-16


cdef int _passive_lstsq(const double[:, ::1] G, const double[::1] b,
                        const Py_ssize_t[::1] idx, Py_ssize_t p,
                        double[:, ::1] A, double[::1] rhs, double[::1] diag,
                        double[::1] s) noexcept nogil:
    # Columns of the LS matrix are the generator rows G[idx[k]]; they are kept
    # as rows of A so every column operation is contiguous.
    cdef Py_ssize_t m = G.shape[1]
    cdef Py_ssize_t i, j, k
    cdef double sigma, alpha, vnorm2, dot, acc

    if p > m:
        return -1
    for k in range(p):
        for i in range(m):
            A[k, i] = G[idx[k], i]
    for i in range(m):
        rhs[i] = b[i]

    for k in range(p):
        sigma = 0.0
        for i in range(k, m):
            sigma += A[k, i] * A[k, i]
        sigma = sqrt(sigma)
        if sigma == 0.0:
            return -2
        alpha = -sigma if A[k, k] >= 0.0 else sigma
        A[k, k] -= alpha
        vnorm2 = 0.0
        for i in range(k, m):
            vnorm2 += A[k, i] * A[k, i]
        diag[k] = alpha
        if vnorm2 == 0.0:
            continue
        for j in range(k + 1, p):
            dot = 0.0
            for i in range(k, m):
                dot += A[k, i] * A[j, i]
            dot = 2.0 * dot / vnorm2
            for i in range(k, m):
                A[j, i] -= dot * A[k, i]
        dot = 0.0
        for i in range(k, m):
            dot += A[k, i] * rhs[i]
        dot = 2.0 * dot / vnorm2
        for i in range(k, m):
            rhs[i] -= dot * A[k, i]

    # back substitution: R[k, j] is stored in A[j, k] for j > k
    for k in range(p - 1, -1, -1):
        acc = rhs[k]
        for j in range(k + 1, p):
            acc -= A[j, k] * s[j]
        s[k] = acc / diag[k]
    return 0


cdef void _dual(const double[:, ::1] G, const double[::1] b,
                const double[::1] lam, const Py_ssize_t[::1] idx, Py_ssize_t p,
                double[::1] r, double[::1] w) noexcept nogil:
    # r = b - sum over the passive set of lam_j g_j, then w = G r via dgemv
    cdef int n = <int>G.shape[0]
    cdef int m = <int>G.shape[1]
    cdef Py_ssize_t i, k
    cdef double lj
    cdef char trans = b'T'
    cdef double one = 1.0
    cdef double zero = 0.0
    cdef int inc = 1
    for i in range(m):
        r[i] = b[i]
    for k in range(p):
        lj = lam[idx[k]]
        for i in range(m):
            r[i] -= lj * G[idx[k], i]
    # row-major (n, m) is column-major (m, n) with leading dimension m
    dgemv(&trans, &m, &n, &one, <double*>&G[0, 0], &m, &r[0], &inc, &zero, &w[0], &inc)


cdef double _resid_norm(const double[:, ::1] G, const double[::1] b,
                        const double[::1] lam, const Py_ssize_t[::1] idx, Py_ssize_t p,
                        double[::1] r) noexcept nogil:
    cdef Py_ssize_t m = G.shape[1]
    cdef Py_ssize_t i, k
    cdef double lj, acc = 0.0
    for i in range(m):
        r[i] = b[i]
    for k in range(p):
        lj = lam[idx[k]]
        for i in range(m):
            r[i] -= lj * G[idx[k], i]
    for i in range(m):
        acc += r[i] * r[i]
    return sqrt(acc)


cdef int _enter(const double[:, ::1] G, const double[::1] b, double[::1] lam,
                unsigned char[::1] passive, Py_ssize_t[::1] idx, Py_ssize_t* p,
                Py_ssize_t j, Py_ssize_t* it, Py_ssize_t max_iter, Py_ssize_t pmax,
                double[:, ::1] A, double[::1] rhs, double[::1] diag, double[::1] s) noexcept nogil:
    # Add generator j and run the inner loop until the LS solution is positive.
    # Returns 0 on success, 1 when the iteration cap interrupts, 2 on a singular
    # or oversized passive set.
    cdef Py_ssize_t k, kmin, q
    cdef double alpha, ratio, denom
    cdef bint feasible
    if p[0] >= pmax + 1:
        return 2
    passive[j] = 1
    idx[p[0]] = j
    p[0] += 1
    while True:
        if _passive_lstsq(G, b, idx, p[0], A, rhs, diag, s) != 0:
            return 2
        feasible = True
        for k in range(p[0]):
            if s[k] <= 0.0:
                feasible = False
                break
        if feasible:
            break
        if it[0] >= max_iter:
            return 1
        it[0] += 1
        alpha = INFINITY
        kmin = -1
        for k in range(p[0]):
            if s[k] <= 0.0:
                denom = lam[idx[k]] - s[k]
                ratio = lam[idx[k]] / denom if denom > 0.0 else 0.0
                if ratio < alpha:
                    alpha = ratio
                    kmin = k
        for k in range(p[0]):
            lam[idx[k]] += alpha * (s[k] - lam[idx[k]])
        lam[idx[kmin]] = 0.0
        # compact the passive list, keeping insertion order
        q = 0
        for k in range(p[0]):
            if lam[idx[k]] > 0.0:
                idx[q] = idx[k]
                q += 1
            else:
                lam[idx[k]] = 0.0
                passive[idx[k]] = 0
        p[0] = q
    for k in range(p[0]):
        lam[idx[k]] = s[k]
    return 0


def nnls_kernel(const double[:, ::1] gens, const double[::1] b, double tol, Py_ssize_t max_iter):
    cdef Py_ssize_t n = gens.shape[0]
    cdef Py_ssize_t m = gens.shape[1]
    cdef Py_ssize_t pmax = m if m < n else n
    lam_arr = np.zeros(n)
    trial_arr = np.zeros(n)
    cdef double[::1] lam = lam_arr
    cdef double[::1] lam_t = trial_arr
    cdef double[::1] w = np.empty(n)
    cdef double[::1] r = np.empty(m)
    cdef double[:, ::1] A = np.empty((pmax + 1, m))
    cdef double[::1] rhs = np.empty(m)
    cdef double[::1] diag = np.empty(pmax + 1)
    cdef double[::1] s = np.empty(pmax + 1)
    cdef Py_ssize_t[::1] idx = np.empty(pmax + 1, dtype=np.intp)
    cdef Py_ssize_t[::1] idx_t = np.empty(pmax + 1, dtype=np.intp)
    cdef unsigned char[::1] passive = np.zeros(n, dtype=np.uint8)
    cdef unsigned char[::1] passive_t = np.zeros(n, dtype=np.uint8)
    cdef unsigned char[::1] picked = np.zeros(n, dtype=np.uint8)
    cdef Py_ssize_t[::1] order = np.empty(POLISH_CANDIDATES, dtype=np.intp)
    cdef Py_ssize_t p = 0
    cdef Py_ssize_t p_t
    cdef Py_ssize_t it = 0
    cdef Py_ssize_t i, j, c, ncand
    cdef double best, rnorm, t_norm, bnorm = 0.0
    cdef double noise
    cdef int status
    cdef bint accepted

    for i in range(m):
        bnorm += b[i] * b[i]
    bnorm = sqrt(bnorm)
    noise = 16.0 * EPS * (bnorm + 1.0)
    rnorm = bnorm

    with nogil:
        _dual(gens, b, lam, idx, p, r, w)
        while True:
            j = -1
            best = -INFINITY
            for i in range(n):
                if not passive[i] and w[i] > best:
                    best = w[i]
                    j = i
            if j >= 0 and best > tol:
                if it >= max_iter:
                    with gil:
                        return lam_arr, it, False
                it += 1
                status = _enter(gens, b, lam, passive, idx, &p, j, &it, max_iter, pmax, A, rhs, diag, s)
                if status != 0:
                    with gil:
                        return lam_arr, it, False
            else:
                # polish: top candidates by dual value, lowest index first on ties
                ncand = 0
                for c in range(POLISH_CANDIDATES):
                    j = -1
                    best = 0.0
                    for i in range(n):
                        if not passive[i] and not picked[i] and w[i] > best:
                            best = w[i]
                            j = i
                    if j < 0:
                        break
                    picked[j] = 1
                    order[ncand] = j
                    ncand += 1
                for c in range(ncand):
                    picked[order[c]] = 0
                accepted = False
                for c in range(ncand):
                    if it >= max_iter:
                        break
                    it += 1
                    for i in range(n):
                        lam_t[i] = lam[i]
                        passive_t[i] = passive[i]
                    for i in range(p):
                        idx_t[i] = idx[i]
                    p_t = p
                    status = _enter(gens, b, lam_t, passive_t, idx_t, &p_t, order[c], &it, max_iter, pmax,
                                    A, rhs, diag, s)
                    if status != 0:
                        break
                    t_norm = _resid_norm(gens, b, lam_t, idx_t, p_t, r)
                    if t_norm < rnorm - noise:
                        for i in range(n):
                            lam[i] = lam_t[i]
                            passive[i] = passive_t[i]
                        for i in range(p_t):
                            idx[i] = idx_t[i]
                        p = p_t
                        accepted = True
                        break
                if not accepted:
                    break
            _dual(gens, b, lam, idx, p, r, w)
            rnorm = _resid_norm(gens, b, lam, idx, p, r)
    return lam_arr, it, True
