"""Independent reference values for the barrier and reduced-system tests (mpmath)."""
from mpmath import mp, mpf, sqrt, tanh, cosh, exp, log, lambertw, findroot, diff

mp.dps = 30
s2 = sqrt(2)


def smooth(x):
    x = min(max(x, mpf(0)), mpf(1))
    return x ** 3 * (10 - 15 * x + 6 * x * x)


def chi(eps, ds, j, t):
    inner = eps ** ds * (1 - mpf(2 * j - 1) / 100)
    outer = eps ** ds * (1 - mpf(2 * j - 2) / 100)
    return 1 - smooth((abs(t) - inner) / (outer - inner))


def Htilde(eps, ds, s):
    c = chi(eps, ds, 1, s)
    sg = 1 if s > 0 else (-1 if s < 0 else 0)
    return c * tanh(s / eps / s2) + sg * (1 - c)


def E0(eps, ds, s):
    u = Htilde(eps, ds, s)
    return eps ** 2 * diff(lambda x: Htilde(eps, ds, x), s, 2) - (u ** 3 - u)


def E0_sup(eps, ds, samples=4000):
    inner = eps ** ds * mpf("0.99")
    outer = eps ** ds
    best = mpf(0)
    for k in range(samples + 1):
        s = inner + (outer - inner) * k / samples
        best = max(best, abs(E0(eps, ds, s)))
    # the interior of the plateau carries only the heteroclinic round-off
    return best


def E0_discrete(eps, ds, nz, j):
    """Three-point evaluation of eps^2 Htilde'' - W'(Htilde) at node j of the uniform grid on [-1, 1]."""
    h = mpf(2) / (nz - 1)
    s = -1 + j * h
    u = Htilde(eps, ds, s)
    lap = (Htilde(eps, ds, s + h) - 2 * u + Htilde(eps, ds, s - h)) / h ** 2
    return eps ** 2 * lap - (u ** 3 - u)


def scalar_gap(eps, lam, K):
    x = lambertw(2 * s2 * K / (eps * eps * lam)).real
    return eps * x / s2


if __name__ == "__main__":
    eps, ds = mpf("0.05"), mpf("0.1")
    print("chi_2 quarter", mp.nstr(chi(mpf("0.1"), ds, 2, mpf("0.1") ** ds * (mpf("0.97") + mpf("0.0025"))), 20))
    print("E0 sup eps 0.05", mp.nstr(E0_sup(eps, ds), 12))
    print("E0 sup eps 0.1", mp.nstr(E0_sup(mpf("0.1"), ds), 12))
    print("E0(s) eps 0.05 s = 0.995 eps^ds", mp.nstr(E0(eps, ds, eps ** ds * mpf("0.995")), 15))
    for e, nz, js in (("0.1", 1009, (107, 524)), ("0.05", 1081, (524, 543, 560))):
        for j in js:
            print("E0 discrete", e, nz, j, mp.nstr(E0_discrete(mpf(e), ds, nz, j), 20))
    K = 16 / (2 * s2 / 3)
    for e in ("0.1", "0.05", "0.025", "0.0125"):
        print("scalar_gap", e, mp.nstr(scalar_gap(mpf(e), mpf(1), K), 20))
