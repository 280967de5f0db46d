"""High-precision reference values frozen into the C++ tests.

Run with `python3 tests/oracles/reference_values.py`; every number printed
here appears verbatim in tests/*.cpp. Nothing in this script uses the C++
library.
"""

import mpmath as mp

mp.mp.dps = 40

PRESETS = {
    1: [mp.mpf("0.35")],
    2: [mp.mpf("0.35"), mp.mpf("-0.25")],
    3: [mp.mpf("0.35"), mp.mpf("-0.25"), mp.mpf("0.3")],
}


def ghat(xi, deltas, c0=1, gamma=1):
    v = c0 * mp.exp(-gamma * xi**2)
    for d in deltas:
        v /= 1 + 2j * mp.pi * d * xi
    return v


def g(x, deltas, deriv=0):
    # g^(j)(x) = 2 Re int_0^inf (2 pi i xi)^j ghat(xi) e^{2 pi i x xi} dxi
    f = lambda xi: mp.re((2j * mp.pi * xi) ** deriv * ghat(xi, deltas) * mp.exp(2j * mp.pi * x * xi))
    return 2 * mp.quad(f, [0, 1, 2, 4, 8])


def generator_values():
    xs = ["-1", "-0.3", "0", "0.37", "1.2", "2.5"]
    for m, deltas in PRESETS.items():
        print(f"m={m}")
        for x in xs:
            print(f"  g({x}) = {mp.nstr(g(mp.mpf(x), deltas), 17)}   g'({x}) = {mp.nstr(g(mp.mpf(x), deltas, 1), 17)}")


def density_values():
    print("inner(3,5) =", mp.nstr(4 - 3 * mp.acos(mp.mpf(3) / 5), 17))
    print("lattice({1},1,2) =", mp.nstr(mp.log(2) / mp.pi, 17))
    # (4/pi r^2) int_0^r sum sqrt(t^2 - l^2) dt / t for {-1.5, 0.25, 2}, r = 3
    pts = [mp.mpf("-1.5"), mp.mpf("0.25"), mp.mpf("2")]
    r = mp.mpf(3)
    tot = 0
    for l in pts:
        tot += mp.quad(lambda t: mp.sqrt(t**2 - l**2) / t, [abs(l), r])
    print("direct({-1.5,0.25,2},3) =", mp.nstr(4 / (mp.pi * r**2) * tot, 17))


def zeros_of_F(coeffs, offset, gamma, r):
    """Moduli of zeros of f(z) = sum c_k C' exp(-a (z-k)^2) with |z| <= r.

    f(z) = C' exp(-a z^2) sum_k c_k exp(-a k^2) w^k with w = exp(2 a z), so
    the zeros are (log w_j + 2 pi i m) / (2a) over roots w_j of the polynomial.
    """
    a = mp.pi**2 / gamma
    poly = [c * mp.exp(-a * (offset + i) ** 2) for i, c in enumerate(coeffs)]
    # mpmath wants highest degree first.
    roots = mp.polyroots(list(reversed(poly)), maxsteps=400, extraprec=2000)
    out = []
    for w in roots:
        base = mp.log(w) / (2 * a)
        step = mp.pi / a
        kmax = int(mp.ceil(r / step)) + 2
        for m in range(-kmax, kmax + 1):
            z = base + 1j * step * m
            if abs(z) <= r:
                out.append(abs(z))
    return sorted(out)


def jensen_values():
    # f = g(x) - g(x - 1), gamma = 1: single real zero 0.5 repeated along i pi/a Z.
    for r in [1, 2]:
        zs = zeros_of_F([1, -1], 0, 1, r)
        lhs = sum(mp.log(r / z) for z in zs) / r**2
        print(f"pair: count(t={r}) = {len(zs)}   lhs({r}) = {mp.nstr(lhs, 17)}")
    coeffs = [mp.mpf(v) for v in ["0.7", "-1.3", "0.4", "0.9", "-0.6"]]
    for gamma in [mp.pi**2, 1]:
        for r in [2, 4, 8]:
            zs = zeros_of_F(coeffs, -2, gamma, r)
            lhs = sum(mp.log(r / z) for z in zs) / r**2
            print(f"five gamma={mp.nstr(gamma, 6)}: count({r}) = {len(zs)}   lhs({r}) = {mp.nstr(lhs, 17)}")


if __name__ == "__main__":
    generator_values()
    density_values()
    jensen_values()
