"""Reference star- and path-series terms by direct summation and adaptive quadrature.

Star-series products over i >= n are summed explicitly in float64 up to 10^7
factors, with the remaining factors replaced by lambda * mu_(10^7). Path-series
products keep 2*10^5 explicit factors and a second-order remainder
lambda x mu - (lambda x)^2 nu / 2 with nu = sum 1/s^2 summed to 10^7. The weight
expectation E[exp(L(W))] is written as an integral over y = Lambda(W) ~ Exp(1)
and evaluated with scipy's adaptive quadrature. mu_n comes from the mpmath
reference in mu_reference.py. Prints ln(term) for pasting into the Rust tests.
"""
import numpy as np
from scipy.integrate import quad
from mpmath import mpf

import mu_reference as ref

CUT = 10 ** 7


def s_case_i(i, sigma):
    return (i + 1) * np.log(i + 2) ** sigma


def s_case_ii(i, nu):
    return (i + 1) * np.log(i + 2) * np.exp(np.log(np.log(i + 3)) ** nu)


def s_case_iii(i, sigma):
    return (i + 1) * np.log(i + 2) * np.log(np.log(i + 3)) ** sigma


def weibull_inv(kappa):
    return lambda y: y ** (1 / kappa)


def double_exp_inv(kappa):
    return lambda y: np.log1p(y) ** (1 / kappa)


def double_exp_log_inv(gamma):
    return lambda y: y if y < 1 else np.exp(np.log(y) ** (1 / gamma))


def expect(L, inv):
    f = lambda y: L(inv(y)) - y
    ys = np.concatenate([np.linspace(0, 5, 200), np.geomspace(5, 5000, 400)])
    vals = np.array([f(y) for y in ys])
    peak = vals.max()
    g = lambda y: np.exp(f(y) - peak)
    top = ys[vals > peak - 60].max() + 50
    pts = [p for p in ys if p < top]
    total = 0.0
    for a, b in zip(pts[:-1], pts[1:]):
        total += quad(g, a, b, epsabs=0, epsrel=1e-10, limit=200)[0]
    return peak + np.log(total)


def star_term(s, mu_ref, inv, n, delta):
    mu_n = float(mu_ref(n))
    lam = delta * np.log(n) / mu_n
    tail = s[n:]
    ln_m = -np.sum(np.log1p(-lam / tail)) + lam * float(mu_ref(CUT))
    head = s[:n]
    L = lambda w: -np.sum(np.log1p(lam / ((w + 1) * head)))
    return ln_m + expect(L, inv)


PATH_CUT = 2 * 10 ** 5


def path_term(s, mu_ref, inv, n, c):
    mu_n = float(mu_ref(n))
    lam = c * np.log(n) / mu_n
    mu_cut = float(mu_ref(PATH_CUT))
    nu_cut = float(np.sum(s[PATH_CUT:] ** -2.0))
    head = s[:PATH_CUT]

    def L(w):
        x = lam / (w + 1)
        return -np.sum(np.log1p(x / head)) - x * mu_cut + 0.5 * x * x * nu_cut

    return expect(L, inv)
    return expect(L, inv)


if __name__ == "__main__":
    i = np.arange(CUT, dtype=np.float64)
    fam_ii = ref.case_ii(mpf("0.9"))
    s_ii = s_case_ii(i, 0.9)
    mu_ii = lambda n: ref.mu(fam_ii, n, 0)
    for n in (10 ** 4, 10 ** 5):
        print(f"star case_ii nu=0.9 gamma=2 delta=0.05 n={n}: {star_term(s_ii, mu_ii, double_exp_log_inv(2.0), n, 0.05):.12f}")
    fam_iii = ref.case_iii(mpf("1.5"))
    s_iii = s_case_iii(i, 1.5)
    mu_iii = lambda n: ref.mu(fam_iii, n, 0)
    for n in (10 ** 4, 10 ** 5):
        print(f"path case_iii sigma=1.5 kappa=1 c=1.1 n={n}: {path_term(s_iii, mu_iii, double_exp_inv(1.0), n, 1.1):.12f}")
    fam_i = ref.case_i(3)
    s_i = s_case_i(i, 3.0)
    mu_i = lambda n: ref.mu(fam_i, n, 0)
    for n in (10 ** 4, 10 ** 5):
        print(f"star case_i sigma=3 kappa=1 delta=0.05 n={n}: {star_term(s_i, mu_i, weibull_inv(1.0), n, 0.05):.12f}")
        print(f"path case_i sigma=3 kappa=1 c=1.1 n={n}: {path_term(s_i, mu_i, weibull_inv(1.0), n, 1.1):.12f}")
