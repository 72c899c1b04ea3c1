"""High-precision reference values for residual reciprocal sums.

mu(n) = sum_{i>=n} 1/s(i) is evaluated as an explicit mpmath sum up to a cutoff
N followed by an Euler-Maclaurin tail. The tail integral is computed by
tanh-sinh quadrature in u = log(log(x + 3)); far out, where x + c equals x to
within exp(-exp(u)), an asymptotic integrand in u is used. Prints reference
values to paste into the Rust tests.
"""
from mpmath import mp, mpf, log, exp, quad, inf, diff, bernoulli, factorial, zeta, sqrt

mp.dps = 40


class Family:
    def __init__(self, s, asym):
        self.s = s
        self.asym = asym

    def h(self, x):
        return 1 / self.s(x)


def case_i(sigma):
    return Family(lambda x: (x + 1) * log(x + 2) ** sigma, lambda u: exp(u * (1 - sigma)))


def case_ii(nu):
    return Family(lambda x: (x + 1) * log(x + 2) * exp(log(log(x + 3)) ** nu), lambda u: exp(-(u ** nu)))


def case_iii(sigma):
    return Family(lambda x: (x + 1) * log(x + 2) * log(log(x + 3)) ** sigma, lambda u: u ** -sigma)


def integral(h, asym, a):
    g = lambda u: h(exp(exp(u)) - 3) * exp(exp(u) + u)
    u0 = log(log(a + 3))
    pts = [u0] + [u0 + mpf(2) ** k for k in range(-4, 3)] + [u0 + 6]
    head = quad(g, pts)
    return head + (quad(asym, [u0 + 6, u0 + 12, inf]) if asym else 0)


def em_tail(h, asym, n, terms=4):
    s = integral(h, asym, n) + h(n) / 2
    for k in range(1, terms + 1):
        s -= bernoulli(2 * k) / factorial(2 * k) * diff(h, n, 2 * k - 1)
    return s


def mu(fam, n, cutoff):
    m = max(n, cutoff)
    head = mp.fsum(fam.h(mpf(i)) for i in range(n, m))
    return head + em_tail(fam.h, fam.asym, mpf(m))


def mu_case_iv(sigma, alpha, n, cutoff):
    base = case_i(sigma)
    m = max(n, cutoff)
    k0 = max(1, int(mp.ceil(sqrt(m))))
    hk = lambda k: base.h(k * k)
    head = mp.fsum(
        (mpf(i) ** -alpha if (i >= 1 and int(sqrt(i)) ** 2 == i) else base.h(mpf(i)))
        for i in range(n, m)
    )
    return head + em_tail(base.h, base.asym, mpf(m)) - em_tail(hk, None, mpf(k0)) + zeta(2 * alpha, k0)


if __name__ == "__main__":
    cutoff = 20000
    fams = {
        "case_i_s2": case_i(2),
        "case_i_s3": case_i(3),
        "case_ii_nu05": case_ii(mpf("0.5")),
        "case_iii_s2": case_iii(2),
    }
    for name, fam in fams.items():
        for n in (0, 10, 1000):
            print(f"{name} n={n}: {mp.nstr(mu(fam, n, cutoff), 20)}")
        for n in (10 ** 7, 10 ** 8):
            print(f"{name} n={n}: {mp.nstr(mu(fam, n, 0), 20)}")
    for n in (0, 10, 1000, 10 ** 7, 10 ** 8):
        print(f"case_iv_s2_a08 n={n}: {mp.nstr(mu_case_iv(2, mpf('0.8'), n, cutoff), 20)}")
    print(f"case_iv_s2_a09 n=1e8: {mp.nstr(mu_case_iv(2, mpf('0.9'), 10 ** 8, 0), 20)}")
    print(f"case_ii_nu09 n=1e8: {mp.nstr(mu(case_ii(mpf('0.9')), 10 ** 8, 0), 20)}")
