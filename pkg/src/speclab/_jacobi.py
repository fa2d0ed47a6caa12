"""Cyclic Jacobi eigenvalue iteration for dense complex Hermitian matrices."""
import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def _off_norm2(a):
    n = a.shape[0]
    s = 0.0
    for i in range(n):
        for j in range(n):
            if i != j:
                s += a[i, j].real ** 2 + a[i, j].imag ** 2
    return s


@njit(cache=True, nogil=True)
def jacobi_sweeps(a, tol, max_sweeps):
    """Diagonalise ``a`` in place; returns (diagonal, sweeps used, converged).

    Pivots run row by row over the strict upper triangle.  Each rotation is a
    phase fix ``diag(1, conj(e))`` that makes ``a[p, q]`` real, followed by the
    real symmetric rotation that annihilates it.
    """
    n = a.shape[0]
    fro2 = 0.0
    for i in range(n):
        for j in range(n):
            fro2 += a[i, j].real ** 2 + a[i, j].imag ** 2
    target = (tol * tol) * fro2
    sweeps = 0
    converged = _off_norm2(a) <= target
    while not converged and sweeps < max_sweeps:
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                r = abs(apq)
                if r == 0.0:
                    continue
                e = apq / r
                app = a[p, p].real
                aqq = a[q, q].real
                theta = (aqq - app) / (2.0 * r)
                if theta >= 0.0:
                    t = 1.0 / (theta + np.sqrt(theta * theta + 1.0))
                else:
                    t = -1.0 / (-theta + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                ec = e.conjugate()
                # U = [[c, s], [-s*ec, c*ec]] acting on columns p, q
                upp = c
                upq = s
                uqp = -s * ec
                uqq = c * ec
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = akp * upp + akq * uqp
                    a[k, q] = akp * upq + akq * uqq
                cupp = upp
                cupq = upq
                cuqp = uqp.conjugate()
                cuqq = uqq.conjugate()
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = cupp * apk + cuqp * aqk
                    a[q, k] = cupq * apk + cuqq * aqk
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = app - t * r
                a[q, q] = aqq + t * r
        sweeps += 1
        converged = _off_norm2(a) <= target
    d = np.empty(n)
    for i in range(n):
        d[i] = a[i, i].real
    return d, sweeps, converged
