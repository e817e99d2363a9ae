"""Pure numpy implementations of the hot kernels.

Every function here has a compiled twin in ``_core.pyx`` with the same
signature and the same arithmetic; ``krigbound._backend`` picks one at import.
"""
import math

import numpy as np

EPS = 1e-16
MAXIT = 10000
# Scaled lags below ZMIN count as zero lag; above ZMAX the correlation underflows.
ZMIN = 1e-12
ZMAX = 700.0

# Taylor coefficients of 1/Gamma(1+x) about x=0.
_RGAMMA1P = (
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
)


def temme_gammas(mu):
    """Return (gam1, gam2, 1/Gamma(1+mu), 1/Gamma(1-mu)) for |mu| <= 1/2.

    ``gam1 = (1/Gamma(1-mu) - 1/Gamma(1+mu)) / (2 mu)`` and
    ``gam2 = (1/Gamma(1-mu) + 1/Gamma(1+mu)) / 2``, both summed from the
    even/odd halves of the power series so there is no cancellation at mu -> 0.
    """
    mu2 = mu * mu
    gam1 = 0.0
    gam2 = 0.0
    p = 1.0
    for k in range(0, len(_RGAMMA1P) - 1, 2):
        gam2 += _RGAMMA1P[k] * p
        gam1 -= _RGAMMA1P[k + 1] * p
        p *= mu2
    return gam1, gam2, gam2 - mu * gam1, gam2 + mu * gam1


def _k_small(mu, x, gam1, gam2, gampl, gammi):
    # Temme's series for K_mu(x), K_{mu+1}(x); x < 2.
    x2 = 0.5 * x
    pimu = math.pi * mu
    fact = 1.0 if abs(pimu) < EPS else pimu / math.sin(pimu)
    d = -np.log(x2)
    e = mu * d
    fact2 = np.where(np.abs(e) < EPS, 1.0, np.sinh(e) / np.where(e == 0.0, 1.0, e))
    ff = fact * (gam1 * np.cosh(e) + gam2 * fact2 * d)
    s = ff.copy()
    e = np.exp(e)
    p = 0.5 * e / gampl
    q = 0.5 / (e * gammi)
    c = np.ones_like(x)
    dd = x2 * x2
    s1 = p.copy()
    active = np.ones(x.shape, dtype=bool)
    for i in range(1, MAXIT + 1):
        ff = (i * ff + p + q) / (i * i - mu * mu)
        c = c * dd / i
        p = p / (i - mu)
        q = q / (i + mu)
        delta = c * ff
        s = np.where(active, s + delta, s)
        s1 = np.where(active, s1 + c * (p - i * ff), s1)
        active &= np.abs(delta) >= np.abs(s) * EPS
        if not active.any():
            break
    else:
        raise ArithmeticError("Temme series did not converge")
    return s, s1 * 2.0 / x


def _k_large(mu, x):
    # Steed's continued fraction for K_mu(x), K_{mu+1}(x); x >= 2.
    b = 2.0 * (1.0 + x)
    d = 1.0 / b
    h = d.copy()
    delh = d.copy()
    q1 = np.zeros_like(x)
    q2 = np.ones_like(x)
    a1 = 0.25 - mu * mu
    q = np.full_like(x, a1)
    c = a1
    a = -a1
    s = 1.0 + q * delh
    active = np.ones(x.shape, dtype=bool)
    for i in range(1, MAXIT + 1):
        a -= 2 * i
        c = -a * c / (i + 1.0)
        qnew = (q1 - b * q2) / a
        q1 = q2
        q2 = qnew
        q = q + c * qnew
        b = b + 2.0
        d = 1.0 / (b + a * d)
        delh = (b * d - 1.0) * delh
        dels = q * delh
        h = np.where(active, h + delh, h)
        s = np.where(active, s + dels, s)
        active &= np.abs(dels) >= np.abs(s) * EPS
        if not active.any():
            break
    else:
        raise ArithmeticError("Steed continued fraction did not converge")
    h = a1 * h
    kmu = np.sqrt(math.pi / (2.0 * x)) * np.exp(-x) / s
    return kmu, kmu * (mu + x + 0.5 - h) / x


def bessel_k(nu, x):
    """K_nu(x) for scalar real nu and an array of x > 0."""
    nu = abs(float(nu))
    x = np.asarray(x, dtype=np.float64)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    if np.any(~(x > 0.0)):
        raise ValueError("bessel_k requires z > 0")
    nl = int(nu + 0.5)
    mu = nu - nl
    gam1, gam2, gampl, gammi = temme_gammas(mu)
    kmu = np.empty_like(x)
    k1 = np.empty_like(x)
    small = x < 2.0
    if small.any():
        kmu[small], k1[small] = _k_small(mu, x[small], gam1, gam2, gampl, gammi)
    if (~small).any():
        kmu[~small], k1[~small] = _k_large(mu, x[~small])
    with np.errstate(over="ignore"):
        for i in range(1, nl + 1):
            kmu, k1 = k1, (mu + i) * (2.0 / x) * k1 + kmu
    return kmu[0] if scalar else kmu


def matern_scaled(nu, z):
    """Matern correlation as a function of the scaled lag ``z = 2 sqrt(nu) phi r``."""
    z = np.asarray(z, dtype=np.float64)
    out = np.ones_like(z)
    mask = z >= ZMIN
    far = z > ZMAX
    mid = mask & ~far
    out[far] = 0.0
    if mid.any():
        zm = z[mid]
        logc = nu * np.log(zm) - math.lgamma(nu) - (nu - 1.0) * math.log(2.0)
        out[mid] = np.minimum(np.exp(logc) * bessel_k(nu, zm), 1.0)
    return out


def _sqdist(a, b):
    out = np.zeros((a.shape[0], b.shape[0]))
    for k in range(a.shape[1]):
        diff = a[:, k, None] - b[None, :, k]
        out += diff * diff
    return out


def matern_matrix(a, b, nu, phi):
    r = np.sqrt(_sqdist(a, b))
    return matern_scaled(nu, 2.0 * math.sqrt(nu) * phi * r)


def matern_gram(a, nu, phi):
    n = a.shape[0]
    out = np.eye(n)
    iu = np.triu_indices(n, 1)
    for s in range(0, len(iu[0]), 1 << 20):
        rows, cols = iu[0][s:s + (1 << 20)], iu[1][s:s + (1 << 20)]
        r = np.sqrt(((a[rows] - a[cols]) ** 2).sum(axis=1))
        out[rows, cols] = out[cols, rows] = matern_scaled(nu, 2.0 * math.sqrt(nu) * phi * r)
    return out


def gaussian_matrix(a, b, phi):
    return np.exp(-phi * _sqdist(a, b))


def nearest_distance(queries, points, chunk=4096):
    """Distance from each query row to its nearest row of ``points``."""
    out = np.empty(queries.shape[0])
    for s in range(0, queries.shape[0], chunk):
        out[s:s + chunk] = np.sqrt(_sqdist(queries[s:s + chunk], points).min(axis=1))
    return out


def maximin_search(ranks, cols, rows_a, rows_b):
    """Hill-climb a Latin hypercube on its integer rank lattice, in place.

    ``ranks`` is an (n, d) int64 array of per-column permutations. Step t
    proposes swapping ``ranks[rows_a[t], cols[t]]`` with
    ``ranks[rows_b[t], cols[t]]``. The swap only changes the squared distances
    from the two rows to the other n - 2 points; it is kept iff the sorted list
    of those distances becomes lexicographically larger. That is the same as
    the sorted list of all pairwise distances becoming lexicographically larger,
    so the minimum distance never decreases. Returns the number of accepted
    swaps.
    """
    n = ranks.shape[0]
    if n < 3:
        return 0
    dist = ((ranks[:, None, :] - ranks[None, :, :]) ** 2).sum(axis=-1)
    keep = np.ones(n, dtype=bool)
    accepted = 0
    for t in range(len(cols)):
        k, i, j = int(cols[t]), int(rows_a[t]), int(rows_b[t])
        if i == j:
            continue
        keep[i] = keep[j] = False
        old = np.concatenate([dist[i, keep], dist[j, keep]])
        ranks[i, k], ranks[j, k] = ranks[j, k], ranks[i, k]
        di = ((ranks - ranks[i]) ** 2).sum(axis=1)
        dj = ((ranks - ranks[j]) ** 2).sum(axis=1)
        new = np.concatenate([di[keep], dj[keep]])
        keep[i] = keep[j] = True
        old_min, new_min = old.min(), new.min()
        if new_min == old_min:
            a, b = np.sort(old), np.sort(new)
            differ = np.flatnonzero(a != b)
            better = differ.size > 0 and b[differ[0]] > a[differ[0]]
        else:
            better = new_min > old_min
        if not better:
            ranks[i, k], ranks[j, k] = ranks[j, k], ranks[i, k]
            continue
        dist[i, :] = dist[:, i] = di
        dist[j, :] = dist[:, j] = dj
        accepted += 1
    return accepted
