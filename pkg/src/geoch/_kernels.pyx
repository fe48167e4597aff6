# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels.

Mirrors :mod:`geoch._fallback` function for function; the two are checked
against each other in ``tests/test_backend.py``.
"""

import numpy as np

from libc.math cimport sin, cos, sqrt, fabs, INFINITY
from libc.stdlib cimport malloc, free
from libc.string cimport memcpy

ctypedef double complex cplx

DEF MODE_SPHERE = 0
DEF MODE_XY = 1
DEF MODE_XZ = 2

DEF KIND_PROJECTOR = 0
DEF KIND_OBSERVABLE = 1

DEF OBJ_EXPECT = 0
DEF OBJ_EIG = 1


cdef inline double cabs2(cplx z) noexcept nogil:
    return z.real * z.real + z.imag * z.imag


cdef inline cplx conj(cplx z) noexcept nogil:
    return z.real - 1j * z.imag


cdef inline int angles_per_vector(int mode) noexcept nogil:
    return 2 if mode == MODE_SPHERE else 1


cdef void _fill_ops(const double* x, int n, int m, double eta, int mode,
                    int kind, cplx* ops) noexcept nogil:
    # ops layout: [party][slot 0..m][2][2], slot 0 is the identity
    cdef int p, s, k = m + 1, pos = 0
    cdef double bx, by, bz, th, ph, h
    cdef cplx* o
    for p in range(n):
        o = ops + (p * k) * 4
        o[0] = 1.0
        o[1] = 0.0
        o[2] = 0.0
        o[3] = 1.0
        for s in range(1, k):
            if mode == MODE_SPHERE:
                th = x[pos]
                ph = x[pos + 1]
                pos += 2
                bx = sin(th) * cos(ph)
                by = sin(th) * sin(ph)
                bz = cos(th)
            elif mode == MODE_XY:
                bx = cos(x[pos])
                by = sin(x[pos])
                bz = 0.0
                pos += 1
            else:
                bx = cos(x[pos])
                by = 0.0
                bz = sin(x[pos])
                pos += 1
            o = ops + (p * k + s) * 4
            if kind == KIND_PROJECTOR:
                h = 0.5 * eta
                o[0] = h * (1.0 + bz)
                o[1] = h * bx - 1j * (h * by)
                o[2] = h * bx + 1j * (h * by)
                o[3] = h * (1.0 - bz)
            else:
                o[0] = bz
                o[1] = bx - 1j * by
                o[2] = bx + 1j * by
                o[3] = -bz


cdef void _moments(const cplx* rho, int n, int k, const cplx* ops,
                   cplx* buf_a, cplx* buf_b, double* out) noexcept nogil:
    # Contract party 0 first; the outcome index grows most-significant-first.
    cdef Py_ssize_t d = 1 << n, dh, o, kk, i, j, nrows = 1, r
    cdef cplx s
    cdef const cplx* m
    cdef cplx* cur = buf_a
    cdef cplx* nxt = buf_b
    cdef cplx* tmp
    cdef int p
    memcpy(cur, rho, d * d * sizeof(cplx))
    for p in range(n):
        dh = d >> 1
        for o in range(nrows):
            for kk in range(k):
                m = ops + (p * k + kk) * 4
                for i in range(dh):
                    for j in range(dh):
                        # Tr(rho M) = sum rho[i, j] M[j, i]
                        s = (m[0] * cur[o * d * d + i * d + j]
                             + m[2] * cur[o * d * d + i * d + (dh + j)]
                             + m[1] * cur[o * d * d + (dh + i) * d + j]
                             + m[3] * cur[o * d * d + (dh + i) * d + (dh + j)])
                        nxt[(o * k + kk) * dh * dh + i * dh + j] = s
        tmp = cur
        cur = nxt
        nxt = tmp
        nrows *= k
        d = dh
    for r in range(nrows):
        out[r] = cur[r].real


cdef void _bell_matrix(const double* coeffs, int n, int k, const cplx* ops,
                       cplx* buf_a, cplx* buf_b, cplx* out) noexcept nogil:
    # Expand from the last party upward; party 0 ends up most significant.
    cdef Py_ssize_t nrows = 1, d = 1, dn, o, kk, i, j, a, b, r, nn
    cdef int p
    cdef cplx s
    cdef cplx* cur = buf_a
    cdef cplx* nxt = buf_b
    cdef cplx* tmp
    for p in range(n):
        nrows *= k
    for r in range(nrows):
        cur[r] = coeffs[r]
    for p in range(n - 1, -1, -1):
        nn = nrows // k
        dn = 2 * d
        for o in range(nn):
            for a in range(2):
                for b in range(2):
                    for i in range(d):
                        for j in range(d):
                            s = 0.0
                            for kk in range(k):
                                s = s + ops[(p * k + kk) * 4 + a * 2 + b] * cur[(o * k + kk) * d * d + i * d + j]
                            nxt[o * dn * dn + (a * d + i) * dn + (b * d + j)] = s
        tmp = cur
        cur = nxt
        nxt = tmp
        nrows = nn
        d = dn
    memcpy(out, cur, d * d * sizeof(cplx))


cdef int _jacobi(cplx* a, Py_ssize_t n, cplx* v, double tol, int max_sweeps) noexcept nogil:
    """Cyclic complex Jacobi; returns sweeps used or -1 without convergence."""
    cdef Py_ssize_t p, q, k
    cdef double off, scale = 0.0, r, tau, t, c, s, skip, app, aqq
    cdef cplx e, ec, sec, cec, akp, akq, apk, aqk
    cdef int sweep
    for p in range(n * n):
        scale += cabs2(a[p])
    scale = sqrt(scale)
    if scale < 1.0:
        scale = 1.0
    # entries below this cannot keep the off-diagonal norm above tol * scale
    skip = tol * scale / n
    if v != NULL:
        for p in range(n):
            for q in range(n):
                v[p * n + q] = 1.0 if p == q else 0.0
    for sweep in range(max_sweeps + 1):
        off = 0.0
        for p in range(n):
            for q in range(n):
                if p != q:
                    off += cabs2(a[p * n + q])
        if sqrt(off) <= tol * scale:
            return sweep
        if sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                r = sqrt(cabs2(a[p * n + q]))
                if r <= skip:
                    continue
                e = a[p * n + q] / r
                ec = conj(e)
                # smaller root of t^2 + 2 tau t - 1 = 0, t = tan(theta)
                tau = (a[q * n + q].real - a[p * n + p].real) / (2.0 * r)
                t = 1.0 / (fabs(tau) + sqrt(1.0 + tau * tau))
                if tau < 0.0:
                    t = -t
                c = 1.0 / sqrt(1.0 + t * t)
                s = t * c
                app = a[p * n + p].real
                aqq = a[q * n + q].real
                sec = s * ec
                cec = c * ec
                # Hermitian: update columns p, q off the pivot block, mirror
                # them into rows p, q, and set the 2x2 block in closed form
                for k in range(n):
                    if k == p or k == q:
                        continue
                    akp = a[k * n + p]
                    akq = a[k * n + q]
                    akp, akq = c * akp - sec * akq, s * akp + cec * akq
                    a[k * n + p] = akp
                    a[k * n + q] = akq
                    a[p * n + k] = conj(akp)
                    a[q * n + k] = conj(akq)
                a[p * n + p] = app - t * r
                a[q * n + q] = aqq + t * r
                a[p * n + q] = 0.0
                a[q * n + p] = 0.0
                if v != NULL:
                    for k in range(n):
                        akp = v[k * n + p]
                        akq = v[k * n + q]
                        v[k * n + p] = c * akp - sec * akq
                        v[k * n + q] = s * akp + cec * akq
    return -1


def setting_ops(const double[::1] angles, int n, int m, double eta, int mode, int kind):
    cdef int need = n * m * angles_per_vector(mode)
    if angles.shape[0] != need:
        raise ValueError(f"expected {need} angles, got {angles.shape[0]}")
    out = np.empty((n, m + 1, 2, 2), dtype=np.complex128)
    cdef cplx[:, :, :, ::1] ov = out
    _fill_ops(&angles[0] if need else NULL, n, m, eta, mode, kind, &ov[0, 0, 0, 0])
    return out


def local_moments(const cplx[:, ::1] rho, const cplx[:, :, :, ::1] ops):
    cdef int n = ops.shape[0], k = ops.shape[1]
    cdef Py_ssize_t dim = rho.shape[0], size = 1, i
    if dim != (1 << n) or rho.shape[1] != dim:
        raise ValueError("state dimension does not match the number of parties")
    for i in range(n):
        size *= k
    cdef Py_ssize_t work = _work_size(n, k)
    cdef cplx* a = <cplx*> malloc(work * sizeof(cplx))
    cdef cplx* b = <cplx*> malloc(work * sizeof(cplx))
    out = np.empty(size, dtype=np.float64)
    cdef double[::1] ov = out
    try:
        with nogil:
            _moments(&rho[0, 0], n, k, &ops[0, 0, 0, 0], a, b, &ov[0])
    finally:
        free(a)
        free(b)
    return out


def bell_matrix(const double[::1] coeffs, const cplx[:, :, :, ::1] ops):
    cdef int n = ops.shape[0], k = ops.shape[1]
    cdef Py_ssize_t dim = 1 << n, size = 1, i
    for i in range(n):
        size *= k
    if coeffs.shape[0] != size:
        raise ValueError("coefficient tensor does not match the operator stack")
    cdef Py_ssize_t work = _work_size(n, k)
    cdef cplx* a = <cplx*> malloc(work * sizeof(cplx))
    cdef cplx* b = <cplx*> malloc(work * sizeof(cplx))
    out = np.empty((dim, dim), dtype=np.complex128)
    cdef cplx[:, ::1] ov = out
    try:
        with nogil:
            _bell_matrix(&coeffs[0], n, k, &ops[0, 0, 0, 0], a, b, &ov[0, 0])
    finally:
        free(a)
        free(b)
    return out


def jacobi_eigh(matrix, bint vectors=True, double tol=1e-12, int max_sweeps=100):
    """Return ``(values, vectors, sweeps)``; ``sweeps`` is -1 on non-convergence."""
    cdef cplx[:, ::1] a = np.array(matrix, dtype=np.complex128, order="C", copy=True)
    cdef Py_ssize_t n = a.shape[0]
    vec = np.empty((n, n), dtype=np.complex128) if vectors else None
    cdef cplx[:, ::1] vv
    cdef cplx* vp = NULL
    if vectors:
        vv = vec
        vp = &vv[0, 0]
    cdef int sweeps
    with nogil:
        sweeps = _jacobi(&a[0, 0], n, vp, tol, max_sweeps)
    w = np.array([a[i, i].real for i in range(n)])
    order = np.argsort(w, kind="stable")
    return w[order], (vec[:, order] if vectors else None), sweeps


cdef Py_ssize_t _work_size(int n, int k):
    cdef Py_ssize_t best = 0, rows = 1, d = 1 << n, size
    cdef int p
    for p in range(n + 1):
        size = rows * d * d
        if size > best:
            best = size
        rows *= k
        d >>= 1
    return best


cdef class Problem:
    """Objective over setting angles, minimized by a compiled simplex search.

    ``objective`` is ``"expect"`` (real ``Tr(rho B)``) or ``"eig"`` (lowest
    eigenvalue of ``basis^H B basis``, or of ``B`` when ``basis`` is None).
    """

    cdef int n, m, k, mode, kind, obj, dim, rdim, sweeps_cap
    cdef readonly int nvar
    cdef double eta
    cdef double[::1] coeffs
    cdef cplx[:, ::1] rho
    cdef cplx[:, ::1] basis
    cdef bint restricted
    cdef cplx* ops
    cdef cplx* wa
    cdef cplx* wb
    cdef cplx* mat
    cdef cplx* tmp
    cdef cplx* small
    cdef double* mom
    cdef Py_ssize_t nterms
    cdef public long evaluations

    def __cinit__(self):
        self.ops = NULL
        self.wa = NULL
        self.wb = NULL
        self.mat = NULL
        self.tmp = NULL
        self.small = NULL
        self.mom = NULL

    def __init__(self, coeffs, int n, int m, double eta, int mode, int kind,
                 str objective, rho=None, basis=None):
        cdef Py_ssize_t i
        self.n = n
        self.m = m
        self.k = m + 1
        self.mode = mode
        self.kind = kind
        self.eta = eta
        self.dim = 1 << n
        self.nvar = n * m * angles_per_vector(mode)
        self.coeffs = np.ascontiguousarray(coeffs, dtype=np.float64)
        self.nterms = self.coeffs.shape[0]
        if self.nterms != self.k ** n:
            raise ValueError("coefficient tensor does not match the scenario")
        self.sweeps_cap = 100
        self.evaluations = 0
        if objective == "expect":
            self.obj = OBJ_EXPECT
            if rho is None:
                raise ValueError("expectation objective needs a state")
            self.rho = np.ascontiguousarray(rho, dtype=np.complex128)
            if self.rho.shape[0] != self.dim:
                raise ValueError("state dimension does not match the scenario")
        elif objective == "eig":
            self.obj = OBJ_EIG
            self.restricted = basis is not None
            if self.restricted:
                self.basis = np.ascontiguousarray(basis, dtype=np.complex128)
                if self.basis.shape[0] != self.dim:
                    raise ValueError("basis vectors do not match the scenario")
                self.rdim = self.basis.shape[1]
            else:
                self.rdim = self.dim
        else:
            raise ValueError(f"unknown objective {objective!r}")
        cdef Py_ssize_t work = _work_size(n, self.k)
        self.ops = <cplx*> malloc(n * self.k * 4 * sizeof(cplx))
        self.wa = <cplx*> malloc(work * sizeof(cplx))
        self.wb = <cplx*> malloc(work * sizeof(cplx))
        self.mat = <cplx*> malloc(self.dim * self.dim * sizeof(cplx))
        self.tmp = <cplx*> malloc(self.dim * self.dim * sizeof(cplx))
        self.small = <cplx*> malloc(self.dim * self.dim * sizeof(cplx))
        self.mom = <double*> malloc(self.nterms * sizeof(double))
        if (self.ops == NULL or self.wa == NULL or self.wb == NULL or self.mat == NULL
                or self.tmp == NULL or self.small == NULL or self.mom == NULL):
            raise MemoryError()

    def __dealloc__(self):
        free(self.ops)
        free(self.wa)
        free(self.wb)
        free(self.mat)
        free(self.tmp)
        free(self.small)
        free(self.mom)

    cdef double _eval(self, const double* x) noexcept nogil:
        cdef Py_ssize_t i, j, l, d = self.dim, r = self.rdim
        cdef double acc = 0.0, lo
        cdef cplx s
        self.evaluations += 1
        _fill_ops(x, self.n, self.m, self.eta, self.mode, self.kind, self.ops)
        if self.obj == OBJ_EXPECT:
            _moments(&self.rho[0, 0], self.n, self.k, self.ops, self.wa, self.wb, self.mom)
            for i in range(self.nterms):
                acc += self.coeffs[i] * self.mom[i]
            return acc
        _bell_matrix(&self.coeffs[0], self.n, self.k, self.ops, self.wa, self.wb, self.mat)
        if self.restricted:
            # tmp = B @ basis  (d x r), small = basis^H @ tmp  (r x r)
            for i in range(d):
                for j in range(r):
                    s = 0.0
                    for l in range(d):
                        s = s + self.mat[i * d + l] * self.basis[l, j]
                    self.tmp[i * r + j] = s
            for i in range(r):
                for j in range(r):
                    s = 0.0
                    for l in range(d):
                        s = s + conj(self.basis[l, i]) * self.tmp[l * r + j]
                    self.small[i * r + j] = s
        else:
            memcpy(self.small, self.mat, d * d * sizeof(cplx))
        if _jacobi(self.small, r, NULL, 1e-12, self.sweeps_cap) < 0:
            return INFINITY
        lo = self.small[0].real
        for i in range(1, r):
            if self.small[i * r + i].real < lo:
                lo = self.small[i * r + i].real
        return lo

    def evaluate(self, x):
        cdef double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
        if xv.shape[0] != self.nvar:
            raise ValueError(f"expected {self.nvar} angles")
        return self._eval(&xv[0])

    def minimize(self, x0, double step, double ftol, double xtol, int max_iter):
        """Adaptive Nelder-Mead from ``x0``; returns ``(x, f, iterations, converged)``."""
        cdef double[::1] start = np.ascontiguousarray(x0, dtype=np.float64)
        cdef int nv = self.nvar
        if start.shape[0] != nv:
            raise ValueError(f"expected {nv} angles")
        simplex = np.empty((nv + 1, nv), dtype=np.float64)
        fvals = np.empty(nv + 1, dtype=np.float64)
        work = np.empty((4, nv), dtype=np.float64)
        cdef double[:, ::1] sim = simplex
        cdef double[::1] fs = fvals
        cdef double[:, ::1] wk = work
        cdef int iters
        cdef bint ok
        with nogil:
            iters = self._nelder_mead(&start[0], nv, step, ftol, xtol, max_iter,
                                      &sim[0, 0], &fs[0], &wk[0, 0])
        ok = iters >= 0
        if not ok:
            iters = max_iter
        return simplex[0].copy(), float(fvals[0]), iters, bool(ok)


    cdef int _nelder_mead(self, const double* x0, int nv, double step,
                          double ftol, double xtol, int max_iter,
                          double* sim, double* fs, double* wk) noexcept nogil:
        # Adaptive coefficients (Gao and Han) as in the pure-Python twin.
        cdef double rho_ = 1.0
        cdef double chi = 1.0 + 2.0 / nv
        cdef double psi = 0.75 - 1.0 / (2.0 * nv)
        cdef double sigma = 1.0 - 1.0 / nv
        cdef double* xbar = wk
        cdef double* xr = wk + nv
        cdef double* xe = wk + 2 * nv
        cdef double* row = wk + 3 * nv
        cdef double fr, fe, fc, spread, dx
        cdef int i, l, it
        cdef bint shrink
        for l in range(nv):
            sim[l] = x0[l]
        for i in range(1, nv + 1):
            for l in range(nv):
                sim[i * nv + l] = x0[l]
            sim[i * nv + i - 1] += step
        for i in range(nv + 1):
            fs[i] = self._eval(sim + i * nv)
        _sort_simplex(sim, fs, nv, row)
        for it in range(max_iter):
            spread = 0.0
            dx = 0.0
            for i in range(1, nv + 1):
                if fabs(fs[i] - fs[0]) > spread:
                    spread = fabs(fs[i] - fs[0])
                for l in range(nv):
                    if fabs(sim[i * nv + l] - sim[l]) > dx:
                        dx = fabs(sim[i * nv + l] - sim[l])
            if spread <= ftol and dx <= xtol:
                return it
            for l in range(nv):
                xbar[l] = 0.0
                for i in range(nv):
                    xbar[l] += sim[i * nv + l]
                xbar[l] /= nv
            for l in range(nv):
                xr[l] = (1.0 + rho_) * xbar[l] - rho_ * sim[nv * nv + l]
            fr = self._eval(xr)
            shrink = False
            if fr < fs[0]:
                for l in range(nv):
                    xe[l] = (1.0 + rho_ * chi) * xbar[l] - rho_ * chi * sim[nv * nv + l]
                fe = self._eval(xe)
                if fe < fr:
                    for l in range(nv):
                        sim[nv * nv + l] = xe[l]
                    fs[nv] = fe
                else:
                    for l in range(nv):
                        sim[nv * nv + l] = xr[l]
                    fs[nv] = fr
            elif fr < fs[nv - 1]:
                for l in range(nv):
                    sim[nv * nv + l] = xr[l]
                fs[nv] = fr
            elif fr < fs[nv]:
                # outside contraction
                for l in range(nv):
                    xe[l] = (1.0 + psi * rho_) * xbar[l] - psi * rho_ * sim[nv * nv + l]
                fc = self._eval(xe)
                if fc <= fr:
                    for l in range(nv):
                        sim[nv * nv + l] = xe[l]
                    fs[nv] = fc
                else:
                    shrink = True
            else:
                # inside contraction
                for l in range(nv):
                    xe[l] = (1.0 - psi) * xbar[l] + psi * sim[nv * nv + l]
                fc = self._eval(xe)
                if fc < fs[nv]:
                    for l in range(nv):
                        sim[nv * nv + l] = xe[l]
                    fs[nv] = fc
                else:
                    shrink = True
            if shrink:
                for i in range(1, nv + 1):
                    for l in range(nv):
                        sim[i * nv + l] = sim[l] + sigma * (sim[i * nv + l] - sim[l])
                    fs[i] = self._eval(sim + i * nv)
            _sort_simplex(sim, fs, nv, row)
        return -1


cdef void _sort_simplex(double* sim, double* fs, int nv, double* row) noexcept nogil:
    # insertion sort by value; rows move with their values
    cdef int i, j, l
    cdef double f
    for i in range(1, nv + 1):
        f = fs[i]
        for l in range(nv):
            row[l] = sim[i * nv + l]
        j = i - 1
        while j >= 0 and fs[j] > f:
            fs[j + 1] = fs[j]
            for l in range(nv):
                sim[(j + 1) * nv + l] = sim[j * nv + l]
            j -= 1
        fs[j + 1] = f
        for l in range(nv):
            sim[(j + 1) * nv + l] = row[l]


