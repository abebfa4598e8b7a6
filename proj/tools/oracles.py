#!/usr/bin/env python3
"""Independent reference values frozen into tests/.

Uses mpmath only (closed forms, Lambert W, findroot); none of the C++ code
paths are reused. Run: python3 tools/oracles.py
"""
import mpmath as mp

mp.mp.dps = 40


def jost_const(c, k):
    """f(k,0), f'(k,0) for q = c on [0,1] with f = e^{ikx} for x >= 1."""
    kap = mp.sqrt(k * k - c)
    s = mp.sin(kap) / kap if kap != 0 else mp.mpf(1)
    e = mp.exp(1j * k)
    return e * (mp.cos(kap) - 1j * k * s), e * (kap * kap * s + 1j * k * mp.cos(kap))


def d_robin_const(c, h, k):
    f1, d1 = jost_const(c, k)
    f2, d2 = jost_const(c, -k)
    F1, F2 = -1j * (d1 - h * f1), -1j * (d2 - h * f2)
    return (F1 + F2) / 2j - h * (F1 - F2) / (2 * k)


def d_dirichlet_const(c, k):
    return (jost_const(c, k)[0] - jost_const(c, -k)[0]) / (2j * k)


def g1(w, q1, k):
    return 4j * k * w + q1 * (mp.exp(2j * k) - mp.exp(-2j * k))


def show(label, z):
    z = mp.mpc(z)
    print(f"{label}: {mp.nstr(z.real, 17)} {mp.nstr(z.imag, 17)}")


def main():
    # z - log z = 50 on the principal branch: z = -W_{-1}(-e^{-50})
    show("transcendental kappa=1 w=50", -mp.lambertw(-mp.exp(-50), -1))
    # complex kappa, w: Newton in high precision from the asymptotic seed
    for kappa, w in [(0.5 + 0.5j, 100 + 30j), (2, 400j)]:
        z = mp.findroot(lambda z: z - kappa * mp.log(z) - w, w + kappa * mp.log(w))
        show(f"transcendental kappa={kappa} w={w}", z)

    # leading zeros of g1, polished
    for w, q1, n, seed in [(1, 1, 10, 33.73 + 2.45j), (0.2, -0.6, 10, 32.19 + 1.49j),
                           (1, 1, 0, 2.1 + 1.1j), (1, -1, 10, 32.2 + 2.1j)]:
        show(f"g1 zero omega={w} q1={q1} n={n}", mp.findroot(lambda k: g1(w, q1, k), seed))

    # q = 1, h = 0 Robin zeros in the first quadrant
    for seed in [2.2 + 1.07j, 5.4 + 1.54j, 33.74 + 2.45j]:
        show("robin q=1 h=0 zero", mp.findroot(lambda k: d_robin_const(1, 0, k), seed))
    # q = 1 Dirichlet zeros
    for seed in [32.17 + 2.43j]:
        show("dirichlet q=1 zero", mp.findroot(lambda k: d_dirichlet_const(1, k), seed))
    for k in [3, 0.5 + 2j, -10j]:
        f, d = jost_const(1, k)
        show(f"jost q=1 k={k} f", f)
        show(f"jost q=1 k={k} f'", d)
    print("D robin q=1 h=0 k=10:", mp.nstr(d_robin_const(1, 0, 10).real, 17))
    print("D dirichlet q=1 k=4:", mp.nstr(d_dirichlet_const(1, 4).real, 17))
    # E(0) = 1 for every truncation, so gamma = D(0) when D(0) != 0
    print("D robin q=1 h=0 k=0:", mp.nstr(mp.re(d_robin_const(1, 0, mp.mpf("1e-20"))), 17))
    print("D dirichlet q=1 k=0:", mp.nstr(mp.re(d_dirichlet_const(1, mp.mpf("1e-20"))), 17))


if __name__ == "__main__":
    main()
