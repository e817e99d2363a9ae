# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels. Mirrors ``krigbound._fallback`` function for function."""
import numpy as np
cimport numpy as cnp
from libc.stdlib cimport qsort
from libc.math cimport sqrt, log, exp, sin, sinh, cosh, fabs, lgamma, M_PI

cnp.import_array()

cdef double EPS = 1e-16
cdef int MAXIT = 10000
cdef double ZMIN = 1e-12
cdef double ZMAX = 700.0

cdef double[29] RG = [
    1.0,
    0.57721566490153286061,
    -0.65587807152025388108,
    -0.042002635034095235529,
    0.1665386113822914895,
    -0.042197734555544336748,
    -0.0096219715278769735621,
    0.0072189432466630995424,
    -0.0011651675918590651121,
    -0.00021524167411495097282,
    0.00012805028238811618615,
    -0.000020134854780788238656,
    -1.2504934821426706573e-6,
    1.1330272319816958824e-6,
    -2.0563384169776071035e-7,
    6.1160951044814158179e-9,
    5.0020076444692229301e-9,
    -1.1812745704870201446e-9,
    1.0434267116911005105e-10,
    7.782263439905071254e-12,
    -3.6968056186422057082e-12,
    5.100370287454475979e-13,
    -2.0583260535665067832e-14,
    -5.3481225394230179824e-15,
    1.2267786282382607902e-15,
    -1.1812593016974587695e-16,
    1.1866922547516003326e-18,
    1.4123806553180317816e-18,
    -2.2987456844353702066e-19,
]


cdef struct Gammas:
    double gam1
    double gam2
    double gampl
    double gammi


cdef Gammas temme_gammas(double mu) nogil:
    cdef Gammas g
    cdef double mu2 = mu * mu, p = 1.0
    cdef int k
    g.gam1 = 0.0
    g.gam2 = 0.0
    for k in range(0, 28, 2):
        g.gam2 += RG[k] * p
        g.gam1 -= RG[k + 1] * p
        p *= mu2
    g.gampl = g.gam2 - mu * g.gam1
    g.gammi = g.gam2 + mu * g.gam1
    return g


cdef int k_pair(double mu, double x, Gammas* g, double* kmu, double* k1) nogil:
    cdef double x2, pimu, fact, d, e, fact2, ff, s, p, q, c, dd, s1, delta
    cdef double b, h, delh, q1, q2, a1, qq, cc, a, qnew, dels
    cdef int i
    if x < 2.0:
        x2 = 0.5 * x
        pimu = M_PI * mu
        fact = 1.0 if fabs(pimu) < EPS else pimu / sin(pimu)
        d = -log(x2)
        e = mu * d
        fact2 = 1.0 if fabs(e) < EPS else sinh(e) / e
        ff = fact * (g.gam1 * cosh(e) + g.gam2 * fact2 * d)
        s = ff
        e = exp(e)
        p = 0.5 * e / g.gampl
        q = 0.5 / (e * g.gammi)
        c = 1.0
        dd = x2 * x2
        s1 = p
        for i in range(1, MAXIT + 1):
            ff = (i * ff + p + q) / (i * i - mu * mu)
            c = c * dd / i
            p = p / (i - mu)
            q = q / (i + mu)
            delta = c * ff
            s = s + delta
            s1 = s1 + c * (p - i * ff)
            if fabs(delta) < fabs(s) * EPS:
                break
        else:
            return -1
        kmu[0] = s
        k1[0] = s1 * 2.0 / x
        return 0
    b = 2.0 * (1.0 + x)
    d = 1.0 / b
    h = d
    delh = d
    q1 = 0.0
    q2 = 1.0
    a1 = 0.25 - mu * mu
    qq = a1
    cc = a1
    a = -a1
    s = 1.0 + qq * delh
    for i in range(1, MAXIT + 1):
        a -= 2 * i
        cc = -a * cc / (i + 1.0)
        qnew = (q1 - b * q2) / a
        q1 = q2
        q2 = qnew
        qq = qq + cc * qnew
        b = b + 2.0
        d = 1.0 / (b + a * d)
        delh = (b * d - 1.0) * delh
        h = h + delh
        dels = qq * delh
        s = s + dels
        if fabs(dels) < fabs(s) * EPS:
            break
    else:
        return -1
    h = a1 * h
    kmu[0] = sqrt(M_PI / (2.0 * x)) * exp(-x) / s
    k1[0] = kmu[0] * (mu + x + 0.5 - h) / x
    return 0


cdef int bessel_k_scalar(double nu, double x, double* out) nogil:
    cdef int nl = <int>(nu + 0.5)
    cdef double mu = nu - nl
    cdef Gammas g = temme_gammas(mu)
    cdef double kmu, k1, tmp
    cdef int i
    if k_pair(mu, x, &g, &kmu, &k1) != 0:
        return -1
    for i in range(1, nl + 1):
        tmp = (mu + i) * (2.0 / x) * k1 + kmu
        kmu = k1
        k1 = tmp
    out[0] = kmu
    return 0


cdef inline double matern_z(double nu, double z, double lognorm) nogil:
    cdef double kv, v
    if z < ZMIN:
        return 1.0
    if z > ZMAX:
        return 0.0
    bessel_k_scalar(nu, z, &kv)
    v = exp(nu * log(z) - lognorm) * kv
    return v if v < 1.0 else 1.0


def bessel_k(double nu, x):
    nu = fabs(nu)
    arr = np.asarray(x, dtype=np.float64)
    scalar = arr.ndim == 0
    cdef cnp.ndarray[cnp.float64_t, ndim=1] flat = np.ascontiguousarray(arr.reshape(-1))
    if np.any(~(flat > 0.0)):
        raise ValueError("bessel_k requires z > 0")
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty_like(flat)
    cdef Py_ssize_t i, m = flat.shape[0]
    cdef int bad = 0
    with nogil:
        for i in range(m):
            if bessel_k_scalar(nu, flat[i], &out[i]) != 0:
                bad = 1
    if bad:
        raise ArithmeticError("K_nu evaluation did not converge")
    return out[0] if scalar else out.reshape(arr.shape)


def matern_scaled(double nu, z):
    arr = np.asarray(z, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] flat = np.ascontiguousarray(arr.reshape(-1))
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty_like(flat)
    cdef double lognorm = lgamma(nu) + (nu - 1.0) * log(2.0)
    cdef Py_ssize_t i, m = flat.shape[0]
    with nogil:
        for i in range(m):
            out[i] = matern_z(nu, flat[i], lognorm)
    return out.reshape(arr.shape)


cdef inline double sqdist(const double[:, ::1] a, Py_ssize_t i, const double[:, ::1] b, Py_ssize_t j) nogil:
    cdef double acc = 0.0, diff
    cdef Py_ssize_t k
    for k in range(a.shape[1]):
        diff = a[i, k] - b[j, k]
        acc += diff * diff
    return acc


def matern_matrix(a, b, double nu, double phi):
    cdef const double[:, ::1] A = np.ascontiguousarray(a, dtype=np.float64)
    cdef const double[:, ::1] B = np.ascontiguousarray(b, dtype=np.float64)
    cdef Py_ssize_t n = A.shape[0], m = B.shape[0], i, j
    out = np.empty((n, m))
    cdef double[:, ::1] O = out
    cdef double scale = 2.0 * sqrt(nu) * phi
    cdef double lognorm = lgamma(nu) + (nu - 1.0) * log(2.0)
    with nogil:
        for i in range(n):
            for j in range(m):
                O[i, j] = matern_z(nu, scale * sqrt(sqdist(A, i, B, j)), lognorm)
    return out


def matern_gram(a, double nu, double phi):
    cdef const double[:, ::1] A = np.ascontiguousarray(a, dtype=np.float64)
    cdef Py_ssize_t n = A.shape[0], i, j
    out = np.empty((n, n))
    cdef double[:, ::1] O = out
    cdef double scale = 2.0 * sqrt(nu) * phi
    cdef double lognorm = lgamma(nu) + (nu - 1.0) * log(2.0)
    with nogil:
        for i in range(n):
            O[i, i] = 1.0
            for j in range(i + 1, n):
                O[i, j] = matern_z(nu, scale * sqrt(sqdist(A, i, A, j)), lognorm)
                O[j, i] = O[i, j]
    return out


def gaussian_matrix(a, b, double phi):
    cdef const double[:, ::1] A = np.ascontiguousarray(a, dtype=np.float64)
    cdef const double[:, ::1] B = np.ascontiguousarray(b, dtype=np.float64)
    cdef Py_ssize_t n = A.shape[0], m = B.shape[0], i, j
    out = np.empty((n, m))
    cdef double[:, ::1] O = out
    with nogil:
        for i in range(n):
            for j in range(m):
                O[i, j] = exp(-phi * sqdist(A, i, B, j))
    return out


def nearest_distance(queries, points):
    cdef const double[:, ::1] Q = np.ascontiguousarray(queries, dtype=np.float64)
    cdef const double[:, ::1] P = np.ascontiguousarray(points, dtype=np.float64)
    cdef Py_ssize_t nq = Q.shape[0], npts = P.shape[0], i, j
    out = np.empty(nq)
    cdef double[::1] O = out
    cdef double best, dd
    with nogil:
        for i in range(nq):
            best = sqdist(Q, i, P, 0)
            for j in range(1, npts):
                dd = sqdist(Q, i, P, j)
                if dd < best:
                    best = dd
            O[i] = sqrt(best)
    return out


cdef long long row_sqdist(long long[:, ::1] R, Py_ssize_t i, Py_ssize_t j) nogil:
    cdef long long acc = 0, diff
    cdef Py_ssize_t k
    for k in range(R.shape[1]):
        diff = R[i, k] - R[j, k]
        acc += diff * diff
    return acc


cdef int cmp_ll(const void* a, const void* b) noexcept nogil:
    cdef long long x = (<long long*>a)[0], y = (<long long*>b)[0]
    return (x > y) - (x < y)


def maximin_search(cnp.ndarray ranks_arr, cols_arr, rows_a_arr, rows_b_arr):
    """Compiled twin of ``_fallback.maximin_search`` (same contract, in place)."""
    cdef long long[:, ::1] R = ranks_arr
    cdef const long long[::1] cols = np.ascontiguousarray(cols_arr, dtype=np.int64)
    cdef const long long[::1] rows_a = np.ascontiguousarray(rows_a_arr, dtype=np.int64)
    cdef const long long[::1] rows_b = np.ascontiguousarray(rows_b_arr, dtype=np.int64)
    cdef Py_ssize_t n = R.shape[0], steps = cols.shape[0]
    if n < 3:
        return 0
    D_arr = np.empty((n, n), dtype=np.int64)
    cdef long long[:, ::1] D = D_arr
    buf = np.empty(4 * n, dtype=np.int64)
    cdef long long[::1] B = buf
    cdef long long* old = &B[0]
    cdef long long* new = &B[2 * n]
    di_arr = np.empty(n, dtype=np.int64)
    dj_arr = np.empty(n, dtype=np.int64)
    cdef long long[::1] di = di_arr
    cdef long long[::1] dj = dj_arr
    cdef Py_ssize_t i, j, l, t, k, c
    cdef long long old_min, new_min, tmp
    cdef int better
    cdef Py_ssize_t accepted = 0
    with nogil:
        for i in range(n):
            for j in range(n):
                D[i, j] = row_sqdist(R, i, j)
        for t in range(steps):
            k = cols[t]
            i = rows_a[t]
            j = rows_b[t]
            if i == j:
                continue
            tmp = R[i, k]
            R[i, k] = R[j, k]
            R[j, k] = tmp
            c = 0
            for l in range(n):
                di[l] = row_sqdist(R, i, l)
                dj[l] = row_sqdist(R, j, l)
                if l != i and l != j:
                    old[c] = D[i, l]
                    new[c] = di[l]
                    c += 1
            for l in range(n):
                if l != i and l != j:
                    old[c] = D[j, l]
                    new[c] = dj[l]
                    c += 1
            old_min = old[0]
            new_min = new[0]
            for l in range(1, c):
                if old[l] < old_min:
                    old_min = old[l]
                if new[l] < new_min:
                    new_min = new[l]
            if new_min == old_min:
                qsort(old, c, sizeof(long long), cmp_ll)
                qsort(new, c, sizeof(long long), cmp_ll)
                better = 0
                for l in range(c):
                    if new[l] != old[l]:
                        better = new[l] > old[l]
                        break
            else:
                better = new_min > old_min
            if not better:
                tmp = R[i, k]
                R[i, k] = R[j, k]
                R[j, k] = tmp
                continue
            for l in range(n):
                D[i, l] = di[l]
                D[l, i] = di[l]
            for l in range(n):
                D[j, l] = dj[l]
                D[l, j] = dj[l]
            accepted += 1
    return accepted
