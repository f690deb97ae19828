"""Independent high-precision reference values for the heteroclinic tests (mpmath)."""
from mpmath import mp, mpf, sqrt, tanh, cosh, quad, inf, exp, log

mp.dps = 30
s2 = sqrt(2)


def H(t):
    return tanh(t / s2)


def dH(t):
    return 1 / (s2 * cosh(t / s2) ** 2)


def J(t):
    def F(s):
        return quad(lambda u: u * dH(u) ** 2, [-inf, s])
    return dH(t) * quad(lambda s: F(s) / dH(s) ** 2, [0, t])


def interaction(T):
    f = lambda t: (3 * H(t) ** 2 - 3) * dH(t - T) * dH(t)
    return quad(f, [-inf, 0, T, inf])


def sextic_constants(c):
    W = lambda h: (1 - h * h) ** 2 * (1 + c * (1 - h * h)) / 4
    h0 = quad(lambda h: sqrt(2 * W(h)), [-1, 1])
    logA0 = quad(lambda h: s2 / sqrt(2 * W(h)) - 1 / (1 - h), [0, 1])
    return h0, exp(logA0)


if __name__ == "__main__":
    print("J(2)", mp.nstr(J(mpf(2)), 20))
    for T in (8, 10, 12):
        print("I(%d)" % T, mp.nstr(interaction(mpf(T)), 20))
    h0, A0 = sextic_constants(mpf("0.5"))
    print("sextic(0.5) h0", mp.nstr(h0, 20), "A0", mp.nstr(A0, 20))
    print("H(1)", mp.nstr(H(mpf(1)), 20))
