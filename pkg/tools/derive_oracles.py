"""Independent brute-force derivations of the reference values frozen in the test suite.

Plain numpy only; nothing here imports epikit. Run: python3 tools/derive_oracles.py
"""

import numpy as np

INF = np.inf


def epi_points(xs, vals, lo, hi, step):
    """Sampled epigraph columns (x, a) for a in [max(v, lo), hi] on a fixed a-lattice."""
    lattice = np.arange(lo, hi + step / 2, step)
    pts = []
    for x, v in zip(xs, vals):
        if not np.isfinite(v) or v > hi:
            continue
        col = lattice[lattice >= v - 1e-12]
        pts.append(np.column_stack([np.full(len(col) + 1, x), np.concatenate([[max(v, lo)], col])]))
    return np.concatenate(pts) if pts else np.empty((0, 2))


def trunc_haus(a, b, rho):
    """Truncated Hausdorff distance under max(|x|, |alpha|) by full pairwise scan."""
    def exs(c, d):
        c = c[np.max(np.abs(c), axis=1) <= rho + 1e-12]
        if len(c) == 0:
            return 0.0
        if len(d) == 0:
            return INF
        best = np.full(len(c), INF)
        for s in range(0, len(d), 2000):
            blk = d[s:s + 2000]
            best = np.minimum(best, np.max(np.abs(c[:, None, :] - blk[None, :, :]), axis=2).min(axis=1))
        return best.max()
    return max(exs(a, b), exs(b, a))


def cubic(x):
    return (x - 1) ** 2 * (x + 1)


def main():
    h = 0.01
    x = np.round(np.arange(-2, 2 + h / 2, h), 12)

    phi = np.where(cubic(x) <= 1e-9, -x, INF)
    print("inf phi", phi.min(), "argmin", x[phi == phi.min()])

    dense = np.linspace(-2, 0, 2_000_001)
    for nu in (2, 10, 64):
        feas = dense[cubic(dense) + 1 / nu <= 0]
        print(f"inf phi^{nu} (dense)", -feas.max())

    # phi vs phi^nu: epi distance at rho = 2, clouds out to rho + 1
    for nu in (1, 2, 4, 8, 16, 32, 64):
        phin = np.where(cubic(x) + 1 / nu <= 1e-9, -x, INF)
        d = trunc_haus(epi_points(x, phi, -3, 3, 0.01), epi_points(x, phin, -3, 3, 0.01), 2.0)
        print(f"dist(epi phi, epi phi^{nu}) rho=2", round(d, 6))

    # g = 0 vs g + 0.25 on [-1, 1], rho = 1
    xg = np.round(np.arange(-1, 1 + 0.05 / 2, 0.05), 12)
    d = trunc_haus(epi_points(xg, 0 * xg, -2, 2, 0.05), epi_points(xg, 0 * xg + 0.25, -2, 2, 0.05), 1.0)
    print("dist(epi 0, epi 0.25) rho=1", d)

    # x^2 vs x^2 + 0.1 on [-1, 1], rho = 1
    d = trunc_haus(epi_points(xg, xg ** 2, -2, 2, 0.01), epi_points(xg, xg ** 2 + 0.1, -2, 2, 0.01), 1.0)
    print("dist(epi x^2, epi x^2+0.1) rho=1", d)

    # cubic composite tilt: f(u, x) - y u with f = -x + iota(G(x) + u <= 0)
    u, xx, y = -0.5, 1.0, 1.0
    print("f_y(-0.5, 1), y=1", (-xx if cubic(xx) + u <= 0 else INF) - y * u)

    # dual of the cubic composite at y = 0 over X = [-2, 2]: min over u, x with G(x) + u <= 0 of -x
    print("psi(0)", (-x).min())

    # ambiguity substitution, p = (.5,.5), theta = 1, u = (-.2, 0), g = (1, 2)
    p, uu, g = np.array([0.5, 0.5]), np.array([-0.2, 0.0]), np.array([1.0, 2.0])
    print("ambiguity eval", float(((p + uu) * g).sum() + 0.5 * (uu ** 2).sum()))

    # ambiguity Lagrangian at x = 0, g = (x^2, (x-1)^2), y = (1, 1), theta = 0, by u-grid scan
    ug = np.round(np.arange(-0.5, 1e-12, 1e-3), 12)
    U1, U2 = np.meshgrid(ug, ug, indexing="ij")
    gx = np.array([0.0, 1.0])
    val = (0.5 + U1) * gx[0] + (0.5 + U2) * gx[1] - U1 - U2
    print("ambiguity lagrangian (x=0, y=(1,1))", val.min())

    # ambiguity support vector: delta(0) = inf phi = .5*1 + .5*2, alpha = .5, eta = 0
    print("support vector", (2 * 1.5 + 4 * 0) / 0.5)

    # splitting substitution: .5 g1(x + u1) + .5 g2(x + u2), x = 0, u = (.1, 1)
    print("splitting eval", 0.5 * 0.1 ** 2 + 0.5 * (0 + 1 - 1) ** 2)

    # splitting Lagrangian m = 1, p = 1, g = z^2/2, y = 1, x = 0: min over u of g(u) - y u
    us = np.arange(-3, 3 + 1e-4, 1e-4)
    print("splitting lagrangian", (0.5 * us ** 2 - us).min())

    # affine dual g0 = x^2/2, A = 1, b = 0, y = 1: the constraint forces u = -(x - b), so psi = min x^2/2 + y x
    xs = np.arange(-3, 3 + 1e-4, 1e-4)
    print("affine dual", (0.5 * xs ** 2 + 1.0 * xs).min())

    # Lipschitz modulus of x^2 on the rho = 2 ball, step 0.01
    x2 = np.round(np.arange(-2, 2 + h / 2, h), 12)
    print("lipschitz x^2 rho=2", np.max(np.abs(np.diff(x2 ** 2)) / h))

    # cubic min-value function for u < 0: v(u) = min{-x : G(x) <= |u|} falls like -1 - sqrt(|u|/2)
    xpos = np.linspace(0.5, 2, 3_000_001)
    for w in (1e-4, 1e-3, 1e-2):
        print(f"cubic v({-w})", -xpos[cubic(xpos) <= w].max(), "approx", -1 - np.sqrt(w / 2))


if __name__ == "__main__":
    main()
