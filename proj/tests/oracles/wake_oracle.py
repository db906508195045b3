"""Independent scalar evaluation of the single-wake formulas.

Used once to produce the frozen expected values in tests/test_wake.cpp and
tests/test_farm.cpp. Written directly from the closed-form expressions with
no shared code path with the C++ implementation.
"""
import math

ALPHA, BETA, KA, KB, AD, BD = 3.16, 0.328, 0.174, 9.69e-4, -1.34e-3, -2.68e-3


def x0(g, ct, d, ti):
    c0 = 1 - math.sqrt(1 - ct)
    return d * math.cos(g) * (1 + math.sqrt(1 - ct)) / (math.sqrt(2) * (ALPHA * ti + BETA * c0))


def theta(g, ct):
    return 0.3 * g / math.cos(g) * (1 - math.sqrt(1 - ct * math.cos(g)))


def deflection(x, g, ct, d, ti):
    k = KA * ti + KB
    sy0 = d / (2 * math.sqrt(2)) * math.cos(g)
    sz0 = d / (2 * math.sqrt(2))
    xn = x0(g, ct, d, ti)
    th = theta(g, ct)
    dr = AD * d + BD * x
    if x < xn:
        return dr + math.tan(th) * x
    sy = sy0 + (x - xn) * k
    sz = sz0 + (x - xn) * k
    s = math.sqrt(sy * sz / (sy0 * sz0))
    c0 = 1 - math.sqrt(1 - ct)
    rc = math.sqrt(ct)
    lg = math.log((1.6 + rc) * (1.6 * s - rc) / ((1.6 - rc) * (1.6 * s + rc)))
    return (dr + math.tan(th) * xn
            + th / 5.2 * (c0 ** 2 - 3 * math.exp(1 / 12) * c0 + 3 * math.exp(1 / 3))
            * math.sqrt(sy0 * sz0 / (k * k * ct)) * lg)


if __name__ == "__main__":
    d = 126.0
    g20 = math.radians(20)
    print("x0(0,0.8,1,0.06) =", repr(x0(0, 0.8, 1, 0.06)))
    print("theta(20deg,0.8) =", repr(theta(g20, 0.8)))
    print("k(0.06) =", repr(KA * 0.06 + KB), "k(0.12) =", repr(KA * 0.12 + KB))
    print("sigma0(20deg,126) =", repr(d / (2 * math.sqrt(2)) * math.cos(g20)), repr(d / (2 * math.sqrt(2))))
    print("delta_f(7D,20deg,0.8,0.06) =", repr(deflection(7 * d, g20, 0.8, d, 0.06)))
    print("delta_f(5D,20deg,0.8,0.06) =", repr(deflection(5 * d, g20, 0.8, d, 0.06)))
    print("x0(20deg,0.8,126,0.06) =", repr(x0(g20, 0.8, d, 0.06)))
    a = (1 - math.sqrt(1 - 0.8)) / 2
    ip = 0.73 * a ** 0.8325 * 0.06 ** 0.0325 * 5 ** -0.32
    print("crespo a, I+ , Irotor =", repr(a), repr(ip), repr(math.sqrt(0.06 ** 2 + ip ** 2)))
    print("cos25^1.88 =", repr(math.cos(math.radians(25)) ** 1.88))


def farm_two_turbine(spacing_d, yaw_up, table_path):
    """Aligned pair at phi=0, 8 m/s, TI 6%: returns (u_down, I_down, P_up, P_down)."""
    import json
    rows = json.load(open(table_path))["performance"]

    def interp(u, key):
        for r0, r1 in zip(rows, rows[1:]):
            if r0["u"] <= u <= r1["u"]:
                w = (u - r0["u"]) / (r1["u"] - r0["u"])
                return r0[key] + w * (r1[key] - r0[key])
        raise ValueError(u)

    d, rho, u_inf, ti = 126.0, 1.225, 8.0, 0.06
    area = math.pi * d * d / 4
    ct_up, cp_up = interp(u_inf, "ct"), interp(u_inf, "cp")
    p_up = 0.5 * rho * area * cp_up * u_inf ** 3 * math.cos(yaw_up) ** 1.88

    x = spacing_d * d
    k = KA * ti + KB
    sy0 = d / (2 * math.sqrt(2)) * math.cos(yaw_up)
    sz0 = d / (2 * math.sqrt(2))
    xn = x0(yaw_up, ct_up, d, ti)
    sy = sy0 + max(0.0, x - xn) * k
    sz = sz0 + max(0.0, x - xn) * k
    yc = deflection(x, yaw_up, ct_up, d, ti)
    amp = 1 - math.sqrt(max(0.0, 1 - sy0 * sz0 / (sy * sz) * ct_up))

    u_sum, inside = 0.0, 0.0
    for kr in range(4):
        r = d / 2 * (kr + 0.5) / 4
        share = ((kr + 1) ** 2 - kr ** 2) / 16 / 12
        for m in range(12):
            ang = 2 * math.pi * m / 12
            py, pz = r * math.cos(ang), r * math.sin(ang)
            dfc = amp * math.exp(-((py - yc) ** 2) / (2 * sy * sy) - pz * pz / (2 * sz * sz))
            u_sum += share * u_inf * (1 - dfc)
            if ((py - yc) / (2 * sy)) ** 2 + (pz / (2 * sz)) ** 2 <= 1:
                inside += share
    a = (1 - math.sqrt(1 - ct_up)) / 2
    ip = inside * 0.73 * a ** 0.8325 * ti ** 0.0325 * spacing_d ** -0.32
    i_down = math.sqrt(ti * ti + ip * ip)
    p_down = 0.5 * rho * area * interp(u_sum, "cp") * u_sum ** 3
    return u_sum, i_down, p_up, p_down


if __name__ == "__main__":
    import os
    table = os.path.join(os.path.dirname(__file__), "..", "..", "data", "nrel_5mw.json")
    for g in (0.0, 20.0):
        print(f"pair 5D yaw {g}:", [repr(v) for v in farm_two_turbine(5, math.radians(g), table)])
