"""Pure-Python twins of the compiled kernels in ``_kernels.pyx``.

Same signatures and the same algorithms, down to the simplex search, so
results agree to rounding. Used when the extension is missing or when
``GEOCH_PURE=1`` is set.
"""

import math

import numpy as np

MODE_SPHERE, MODE_XY, MODE_XZ = 0, 1, 2
KIND_PROJECTOR, KIND_OBSERVABLE = 0, 1


def _angles_per_vector(mode):
    return 2 if mode == MODE_SPHERE else 1


def setting_ops(angles, n, m, eta, mode, kind):
    angles = np.asarray(angles, dtype=np.float64)
    need = n * m * _angles_per_vector(mode)
    if angles.shape[0] != need:
        raise ValueError(f"expected {need} angles, got {angles.shape[0]}")
    ops = np.zeros((n, m + 1, 2, 2), dtype=np.complex128)
    ops[:, 0] = np.eye(2)
    pos = 0
    for p in range(n):
        for s in range(1, m + 1):
            if mode == MODE_SPHERE:
                th, ph = angles[pos], angles[pos + 1]
                pos += 2
                bx, by, bz = math.sin(th) * math.cos(ph), math.sin(th) * math.sin(ph), math.cos(th)
            elif mode == MODE_XY:
                bx, by, bz = math.cos(angles[pos]), math.sin(angles[pos]), 0.0
                pos += 1
            else:
                bx, by, bz = math.cos(angles[pos]), 0.0, math.sin(angles[pos])
                pos += 1
            if kind == KIND_PROJECTOR:
                h = 0.5 * eta
                ops[p, s] = [[h * (1 + bz), h * bx - 1j * h * by], [h * bx + 1j * h * by, h * (1 - bz)]]
            else:
                ops[p, s] = [[bz, bx - 1j * by], [bx + 1j * by, -bz]]
    return ops


def local_moments(rho, ops):
    rho = np.asarray(rho, dtype=np.complex128)
    ops = np.asarray(ops, dtype=np.complex128)
    n, k = ops.shape[0], ops.shape[1]
    dim = rho.shape[0]
    if dim != 1 << n or rho.shape[1] != dim:
        raise ValueError("state dimension does not match the number of parties")
    cur = rho.reshape(1, dim, dim)
    d = dim
    for p in range(n):
        dh = d >> 1
        blocks = cur.reshape(cur.shape[0], 2, dh, 2, dh)
        # Tr over this party's qubit with M: sum_{a,b} M[b, a] rho[a i, b j]
        nxt = np.einsum("kba,oaibj->okij", ops[p], blocks)
        cur = nxt.reshape(-1, dh, dh)
        d = dh
    return cur.reshape(-1).real.copy()


def bell_matrix(coeffs, ops):
    coeffs = np.asarray(coeffs, dtype=np.float64)
    ops = np.asarray(ops, dtype=np.complex128)
    n, k = ops.shape[0], ops.shape[1]
    if coeffs.shape[0] != k ** n:
        raise ValueError("coefficient tensor does not match the operator stack")
    cur = coeffs.astype(np.complex128).reshape(-1, 1, 1)
    d = 1
    for p in range(n - 1, -1, -1):
        grouped = cur.reshape(-1, k, d, d)
        nxt = np.einsum("kab,okij->oaibj", ops[p], grouped)
        d *= 2
        cur = nxt.reshape(-1, d, d)
    return cur.reshape(d, d).copy()


def jacobi_eigh(matrix, vectors=True, tol=1e-12, max_sweeps=100):
    """Return ``(values, vectors, sweeps)``; ``sweeps`` is -1 on non-convergence."""
    a = np.array(matrix, dtype=np.complex128, copy=True)
    n = a.shape[0]
    v = np.eye(n, dtype=np.complex128) if vectors else None
    scale = max(1.0, float(np.linalg.norm(a)))
    # entries below this cannot keep the off-diagonal norm above tol * scale
    skip = tol * scale / n
    sweeps = -1
    for sweep in range(max_sweeps + 1):
        mag = np.abs(a) ** 2
        np.fill_diagonal(mag, 0.0)
        off = math.sqrt(float(mag.sum()))
        if off <= tol * scale:
            sweeps = sweep
            break
        if sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                r = abs(a[p, q])
                if r <= skip:
                    continue
                e = a[p, q] / r
                # smaller root of t^2 + 2 tau t - 1 = 0, t = tan(theta)
                tau = (a[q, q].real - a[p, p].real) / (2.0 * r)
                t = 1.0 / (abs(tau) + math.sqrt(1.0 + tau * tau))
                if tau < 0.0:
                    t = -t
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                # Hermitian: update columns p, q off the pivot block, mirror
                # them into rows p, q, and set the 2x2 block in closed form.
                colp, colq = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * colp - s * np.conj(e) * colq
                a[:, q] = s * colp + c * np.conj(e) * colq
                app, aqq = colp[p].real, colq[q].real
                a[p, :] = np.conj(a[:, p])
                a[q, :] = np.conj(a[:, q])
                a[p, p] = app - t * r
                a[q, q] = aqq + t * r
                a[p, q] = a[q, p] = 0.0
                if v is not None:
                    vp, vq = v[:, p].copy(), v[:, q].copy()
                    v[:, p] = c * vp - s * np.conj(e) * vq
                    v[:, q] = s * vp + c * np.conj(e) * vq
    w = np.diag(a).real.copy()
    order = np.argsort(w, kind="stable")
    return w[order], (v[:, order] if vectors else None), sweeps


class Problem:
    """Objective over setting angles, minimized by the simplex search below."""

    def __init__(self, coeffs, n, m, eta, mode, kind, objective, rho=None, basis=None):
        self.n, self.m, self.eta, self.mode, self.kind = n, m, eta, mode, kind
        self.coeffs = np.ascontiguousarray(coeffs, dtype=np.float64)
        if self.coeffs.shape[0] != (m + 1) ** n:
            raise ValueError("coefficient tensor does not match the scenario")
        self.nvar = n * m * _angles_per_vector(mode)
        self.evaluations = 0
        dim = 1 << n
        if objective == "expect":
            if rho is None:
                raise ValueError("expectation objective needs a state")
            self.rho = np.ascontiguousarray(rho, dtype=np.complex128)
            if self.rho.shape[0] != dim:
                raise ValueError("state dimension does not match the scenario")
        elif objective == "eig":
            self.basis = None if basis is None else np.ascontiguousarray(basis, dtype=np.complex128)
            if self.basis is not None and self.basis.shape[0] != dim:
                raise ValueError("basis vectors do not match the scenario")
        else:
            raise ValueError(f"unknown objective {objective!r}")
        self.objective = objective

    def _eval(self, x):
        self.evaluations += 1
        ops = setting_ops(x, self.n, self.m, self.eta, self.mode, self.kind)
        if self.objective == "expect":
            return float(self.coeffs @ local_moments(self.rho, ops))
        b = bell_matrix(self.coeffs, ops)
        if self.basis is not None:
            b = self.basis.conj().T @ b @ self.basis
        w, _, sweeps = jacobi_eigh(b, vectors=False)
        return math.inf if sweeps < 0 else float(w[0])

    def evaluate(self, x):
        x = np.asarray(x, dtype=np.float64)
        if x.shape[0] != self.nvar:
            raise ValueError(f"expected {self.nvar} angles")
        return self._eval(x)

    def minimize(self, x0, step, ftol, xtol, max_iter):
        nv = self.nvar
        x0 = np.asarray(x0, dtype=np.float64)
        if x0.shape[0] != nv:
            raise ValueError(f"expected {nv} angles")
        rho_, chi = 1.0, 1.0 + 2.0 / nv
        psi, sigma = 0.75 - 1.0 / (2.0 * nv), 1.0 - 1.0 / nv
        sim = np.tile(x0, (nv + 1, 1))
        for i in range(1, nv + 1):
            sim[i, i - 1] += step
        fs = np.array([self._eval(row) for row in sim])
        order = np.argsort(fs, kind="stable")
        sim, fs = sim[order], fs[order]
        for it in range(max_iter):
            if np.max(np.abs(fs[1:] - fs[0])) <= ftol and np.max(np.abs(sim[1:] - sim[0])) <= xtol:
                return sim[0].copy(), float(fs[0]), it, True
            xbar = sim[:-1].sum(axis=0) / nv
            xr = (1 + rho_) * xbar - rho_ * sim[-1]
            fr = self._eval(xr)
            shrink = False
            if fr < fs[0]:
                xe = (1 + rho_ * chi) * xbar - rho_ * chi * sim[-1]
                fe = self._eval(xe)
                if fe < fr:
                    sim[-1], fs[-1] = xe, fe
                else:
                    sim[-1], fs[-1] = xr, fr
            elif fr < fs[-2]:
                sim[-1], fs[-1] = xr, fr
            elif fr < fs[-1]:
                xc = (1 + psi * rho_) * xbar - psi * rho_ * sim[-1]
                fc = self._eval(xc)
                if fc <= fr:
                    sim[-1], fs[-1] = xc, fc
                else:
                    shrink = True
            else:
                xcc = (1 - psi) * xbar + psi * sim[-1]
                fcc = self._eval(xcc)
                if fcc < fs[-1]:
                    sim[-1], fs[-1] = xcc, fcc
                else:
                    shrink = True
            if shrink:
                for i in range(1, nv + 1):
                    sim[i] = sim[0] + sigma * (sim[i] - sim[0])
                    fs[i] = self._eval(sim[i])
            order = np.argsort(fs, kind="stable")
            sim, fs = sim[order], fs[order]
        return sim[0].copy(), float(fs[0]), max_iter, False
