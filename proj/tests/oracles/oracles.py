"""Independent reference values for the C++ test suites.

Everything here is computed from the textbook formulas with scipy/mpmath and
is not derived from the library code. Run with `python3 oracles.py`; the
printed values are frozen into the C++ tests.
"""
import numpy as np
import mpmath as mp
from scipy import integrate, optimize, stats, special

mp.mp.dps = 40


def J(m):
    return float(mp.gamma(mp.mpf(m) / 2) / (mp.sqrt(mp.mpf(m) / 2) * mp.gamma((mp.mpf(m) - 1) / 2)))


def var_g_hat(n, g):
    j = J(n - 1)
    return 1.0 / n + (1 - (n - 3) / ((n - 1) * j * j)) * g * g


def var_g_true(n, d):
    j = J(n - 1)
    return (n - 1) * j * j / (n * (n - 3)) * (1 + n * d * d) - d * d


def imhof_cdf(lams, x):
    # Imhof inversion with mpmath's oscillatory quadrature; scipy's quad is only good to ~1e-8 here.
    lams = [mp.mpf(float(l)) for l in lams if l > 0]
    x = mp.mpf(float(x))

    def f(u):
        th = sum(mp.atan(l * u) for l in lams) / 2 - x * u / 2
        return mp.sin(th) / (u * mp.fprod([(1 + l * l * u * u) ** 0.25 for l in lams]))

    return float(1 - (mp.mpf(1) / 2 + mp.quadosc(f, [0, mp.inf], omega=x / 2) / mp.pi))


def eig(w, var):
    w = np.asarray(w, float)
    var = np.asarray(var, float)
    A = np.diag(w) - np.outer(w, w) / w.sum()
    D = np.diag(np.sqrt(var))
    return np.sort(np.linalg.eigvalsh(D @ A @ D))[::-1]


print("log_gamma(0.5) =", mp.nstr(mp.loggamma(0.5), 17))
print("log_gamma(6)   =", mp.nstr(mp.log(120), 17))
print("J(2) =", J(2), " J(9) =", J(9), " J(19) =", J(19))
print("t_q(0.975,4) =", mp.nstr(mp.mpf(stats.t.ppf(0.975, 4)), 12))
print("z_q(0.975) =", stats.norm.ppf(0.975))
print("nct_cdf(1,10,2) =", stats.nct.cdf(1.0, 10, 2.0))
print("var_g_true(20,0) =", var_g_true(20, 0.0), " var_g_true(20,1) =", var_g_true(20, 1.0))
print("var_g_hat(20,0.5) =", var_g_hat(20, 0.5))
print("g(n=20, 1/2) =", J(19) * 0.5)
gt = J(29) * 2 / 1.5
gc = J(19) * 1 / 2
print("fixture study: g_t", gt, "g_c", gc, "d", gt - gc, "v2", var_g_hat(30, gt) + var_g_hat(20, gc))

for x in (1, 3, 7):
    print("qf_cdf([2,1,.5],", x, ") =", imhof_cdf([2, 1, 0.5], x))
print("qf tail [2,1] at 0.005 quantile:")
xq = optimize.brentq(lambda x: (1 - imhof_cdf([2, 1], x)) - 0.005, 1, 60, xtol=1e-14)
print("  x_0.005 =", xq)

# K = 5 fixture (g_t, n_t, g_c, n_c).
F5 = [(0.9, 20, 0.1, 20), (0.3, 30, 0.2, 25), (1.6, 15, 0.4, 18), (0.2, 40, -0.1, 40), (1.1, 12, 0.0, 14)]
y = np.array([a - c for a, _, c, _ in F5])
v = np.array([var_g_hat(nt, a) + var_g_hat(nc, c) for a, nt, c, nc in F5])
nt_ = np.array([nt * nc / (nt + nc) for _, nt, _, nc in F5], float)
print("F5 y =", list(y))
print("F5 v =", [float(x) for x in v])


def qgen(t):
    w = 1 / (v + t)
    m = (w * y).sum() / w.sum()
    return (w * (y - m) ** 2).sum()


def reml(t, y=y, v=v):
    w = 1 / (v + t)
    m = (w * y).sum() / w.sum()
    return -0.5 * (np.log(v + t).sum() + np.log(w.sum()) + (w * (y - m) ** 2).sum())


def ml(t):
    w = 1 / (v + t)
    m = (w * y).sum() / w.sum()
    return -0.5 * (np.log(v + t).sum() + (w * (y - m) ** 2).sum())


grid = np.arange(0, 10 + 1e-12, 1e-4)
r = np.array([reml(t) for t in grid])
print("F5 REML grid argmax =", grid[r.argmax()])
m_ = np.array([ml(t) for t in grid])
tml = grid[m_.argmax()]
tml = optimize.minimize_scalar(lambda t: -ml(t), bounds=(max(0, tml - 1e-3), tml + 1e-3), method="bounded", options={"xatol": 1e-12}).x
print("F5 ML =", tml)
thr = stats.chi2.ppf(0.95, 1)
dev = lambda t: 2 * (ml(tml) - ml(t)) - thr
lo = 0.0 if dev(0) <= 0 else optimize.brentq(dev, 0, tml, xtol=1e-13)
hi = optimize.brentq(dev, tml, 100, xtol=1e-13)
print("F5 PL =", lo, hi)
print("F5 MP =", optimize.brentq(lambda t: qgen(t) - 4, 0, 50, xtol=1e-14) if qgen(0) > 4 else 0.0)
qf = float((nt_ * (y - (nt_ * y).sum() / nt_.sum()) ** 2).sum())
F = lambda t: imhof_cdf(eig(nt_, v + t), qf)
print("F5 Q_F =", qf, " F(Q_F|0) =", F(0))
smc = optimize.brentq(lambda t: F(t) - 0.5, 0, 20, xtol=1e-12) if F(0) > 0.5 else 0.0
print("F5 SMC =", smc)
flo = optimize.brentq(lambda t: F(t) - 0.975, 0, 20, xtol=1e-12) if F(0) > 0.975 else 0.0
fhi = optimize.brentq(lambda t: F(t) - 0.025, 0, 200, xtol=1e-12) if F(0) > 0.025 else 0.0
print("F5 FPC =", flo, fhi)
q975 = stats.chi2.ppf(0.975, 4); q025 = stats.chi2.ppf(0.025, 4)
qlo = optimize.brentq(lambda t: qgen(t) - q975, 0, 50) if qgen(0) > q975 else 0.0
qhi = optimize.brentq(lambda t: qgen(t) - q025, 0, 500, xtol=1e-14)
print("F5 QP =", qlo, qhi)
W = nt_.sum(); p = nt_ / W
print("F5 SSC =", max(0, (qf / W - (p * (1 - p) * v).sum()) / (p * (1 - p)).sum()))
w0 = 1 / v
qiv = (w0 * (y - (w0 * y).sum() / w0.sum()) ** 2).sum()
print("F5 Q_IV =", qiv, " DL =", max(0, (qiv - 4) / (w0.sum() - (w0 ** 2).sum() / w0.sum())))
print("F5 ChiSq p =", stats.chi2.sf(qiv, 4), " FSSW p =", 1 - F(0))

# Unequal-variance K = 3 REML fixture.
y3 = np.array([0.0, 1.0, 3.0]); v3 = np.array([0.5, 1.0, 2.0])
r3 = np.array([reml(t, y3, v3) for t in grid])
print("K3 REML grid argmax =", grid[r3.argmax()])

# QP closed form, equal variances 1, effects (0,2,4): Q0 = 8.
print("QP equal-variance K=3:", max(0, 8 / stats.chi2.ppf(0.975, 2) - 1), 8 / stats.chi2.ppf(0.025, 2) - 1)
print("chi2_2 quantiles", stats.chi2.ppf(0.975, 2), stats.chi2.ppf(0.025, 2))
