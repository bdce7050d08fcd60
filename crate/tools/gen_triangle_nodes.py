#!/usr/bin/env python3
"""Generate fully symmetric triangle quadratures with embedded edge nodes.

For each degree N in 1..4 and each edge family (Gauss-Legendre with N+1
points per edge, Gauss-Lobatto with N+2 points per edge) this searches for a
rule exact to total degree 2N-1 with strictly positive weights and interior
nodes strictly inside the triangle. The moment system is written in terms of
S3-invariant polynomials so it is square; roots are polished with mpmath at
50 digits and written with 20 significant digits.

Reference triangle: (-1,-1), (1,-1), (-1,1). Faces: 0 = v0->v1 (y = -1),
1 = v1->v2 (x + y = 0), 2 = v2->v0 (x = -1).

Usage: python3 tools/gen_triangle_nodes.py crates/core/assets
"""
import itertools
import random
import sys

import mpmath as mp
import numpy as np
import sympy as sp
from scipy.optimize import least_squares

mp.mp.dps = 50
VERTS = [(-1, -1), (1, -1), (-1, 1)]
FACES = [(0, 1), (1, 2), (2, 0)]


def legendre_nodes(n):
    """n-point Gauss-Legendre on [-1,1] in mpmath precision."""
    xs, ws = [], []
    for k in range(1, n + 1):
        x = mp.cos(mp.pi * (k - mp.mpf(1) / 4) / (n + mp.mpf(1) / 2))
        x = mp.findroot(lambda t: mp.legendre(n, t), x)
        dp = mp.diff(lambda t: mp.legendre(n, t), x)
        xs.append(x)
        ws.append(2 / ((1 - x * x) * dp * dp))
    order = sorted(range(n), key=lambda i: xs[i])
    return [xs[i] for i in order], [ws[i] for i in order]


def lobatto_nodes(n):
    """n-point Gauss-Lobatto on [-1,1]."""
    m = n - 1
    xs = [mp.mpf(-1)]
    for k in range(1, m):
        x0 = -mp.cos(mp.pi * k / m)
        x = mp.findroot(lambda t: mp.diff(lambda s: mp.legendre(m, s), t), x0)
        xs.append(x)
    xs.append(mp.mpf(1))
    ws = [2 / (m * (m + 1) * mp.legendre(m, x) ** 2) for x in xs]
    return xs, ws


# --- invariant moments --------------------------------------------------------
L1, L2, L3 = sp.symbols("l1 l2 l3")
E2 = L1 * L2 + L2 * L3 + L3 * L1
E3 = L1 * L2 * L3
AREA = 2


def invariant_polys(d):
    polys = []
    for a in range(d // 2 + 1):
        for b in range(d // 3 + 1):
            if 2 * a + 3 * b <= d:
                polys.append(sp.expand(E2**a * E3**b))
    return polys


def exact_integral(poly):
    total = sp.Rational(0)
    for monom, coeff in sp.Poly(poly, L1, L2, L3).terms():
        i, j, k = monom
        total += coeff * 2 * AREA * sp.factorial(i) * sp.factorial(j) * sp.factorial(k) / sp.factorial(i + j + k + 2)
    return total


# --- orbits -------------------------------------------------------------------
def orbit_points(kind, params):
    if kind == "s3":
        t = mp.mpf(1) / 3
        return [(t, t, t)]
    if kind == "s21":
        a = params[0]
        c = 1 - 2 * a
        return [(a, a, c), (a, c, a), (c, a, a)]
    a, b = params
    c = 1 - a - b
    return list(dict.fromkeys(itertools.permutations((a, b, c))))


def orbit_size(kind):
    return {"s3": 1, "s21": 3, "s111": 6}[kind]


def build(family, n):
    if family == "gl":
        x, w = legendre_nodes(n + 1)
    else:
        x, w = lobatto_nodes(n + 2)
    fixed = []
    for t in x:
        if abs(t) < mp.mpf(10) ** -40:
            fixed.append(("s21", (mp.mpf(1) / 2,)))
        elif t < 0:
            continue
        elif False:
            fixed.append(("s21", (mp.mpf(1) / 2,)))
        elif abs(t - 1) < mp.mpf(10) ** -40:
            fixed.append(("s21", (mp.mpf(0),)))
        else:
            fixed.append(("s111", ((1 - t) / 2, mp.mpf(0))))
    return fixed, (x, w)


def structures(n_eq, n_fixed):
    need = n_eq - n_fixed
    out = []
    for c in (0, 1):
        for k21 in range(0, 4):
            for k111 in range(0, 3):
                if c + 2 * k21 + 3 * k111 == need:
                    out.append((c, k21, k111))
    out.sort(key=lambda s: s[0] + 3 * s[1] + 6 * s[2])
    return out


def solve(family, n, seed=0, min_degree=None):
    # raise exactness when no positive rule of the nominal degree exists
    start = 2 * n - 1 if min_degree is None else min_degree
    for d in range(start, 2 * n + 3):
        found = solve_degree(family, n, d, seed)
        if found is not None:
            return found
    raise RuntimeError(f"no rule found for {family} N={n}")


def solve_degree(family, n, d, seed):
    polys = invariant_polys(d)
    exact = [exact_integral(p) for p in polys]
    fns = [sp.lambdify((L1, L2, L3), p, "mpmath") for p in polys]
    fast = [sp.lambdify((L1, L2, L3), p, "math") for p in polys]
    exact_f = [float(e) for e in exact]
    fixed, edge = build(family, n)
    rng = random.Random(seed)
    for c, k21, k111 in structures(len(polys), len(fixed)):
        def unpack(z):
            orbits = []
            idx = 0
            for kind, prm in fixed:
                orbits.append((kind, prm, z[idx]))
                idx += 1
            if c:
                orbits.append(("s3", (), z[idx]))
                idx += 1
            for _ in range(k21):
                orbits.append(("s21", (z[idx + 1],), z[idx]))
                idx += 2
            for _ in range(k111):
                orbits.append(("s111", (z[idx + 1], z[idx + 2]), z[idx]))
                idx += 3
            return orbits

        def residual_f(z):
            res = []
            orbits = unpack(z)
            for f, ex in zip(fast, exact_f):
                s = 0.0
                for kind, prm, wt in orbits:
                    for p in orbit_points(kind, prm):
                        s += wt * f(*[float(q) for q in p])
                res.append(s - ex)
            return np.array(res)

        def residual(z, conv=mp.mpf):
            res = []
            orbits = unpack(z)
            for f, ex in zip(fns, exact):
                s = conv(0)
                for kind, prm, wt in orbits:
                    for p in orbit_points(kind, prm):
                        s += wt * f(*p)
                res.append(s - ex)
            return res

        nunk = len(fixed) + c + 2 * k21 + 3 * k111
        for attempt in range(400):
            z0 = []
            for _ in fixed:
                z0.append(rng.uniform(0.01, 0.3))
            if c:
                z0.append(rng.uniform(0.01, 0.5))
            for _ in range(k21):
                z0 += [rng.uniform(0.01, 0.3), rng.uniform(0.03, 0.47)]
            for _ in range(k111):
                a = rng.uniform(0.03, 0.6)
                b = rng.uniform(0.03, 0.9 - a)
                z0 += [rng.uniform(0.01, 0.2), a, b]
            try:
                sol = least_squares(
                    lambda z: residual_f(list(z)),
                    np.array(z0),
                    xtol=1e-15,
                    ftol=1e-15,
                    gtol=1e-15,
                )
            except Exception:
                continue
            if np.max(np.abs(sol.fun)) > 1e-10:
                continue
            try:
                zmp = mp.findroot(lambda *zz: residual(list(zz)), [mp.mpf(v) for v in sol.x])
            except Exception:
                continue
            zmp = [zmp[i] for i in range(nunk)]
            if max(abs(r) for r in residual(zmp)) > mp.mpf(10) ** -40:
                continue
            orbits = unpack(zmp)
            ok = True
            for kind, prm, wt in orbits:
                if wt <= 0:
                    ok = False
                for p in orbit_points(kind, prm):
                    if kind != "s3" and (kind, prm) not in fixed and min(p) <= mp.mpf(10) ** -6:
                        ok = False
            if ok:
                return orbits, edge, d
    return None


def to_xy(lam):
    x = sum(l * v[0] for l, v in zip(lam, VERTS))
    y = sum(l * v[1] for l, v in zip(lam, VERTS))
    return x, y


def write(family, n, orbits, edge, degree, path):
    nodes, weights = [], []
    for kind, prm, wt in orbits:
        for p in orbit_points(kind, prm):
            nodes.append(to_xy(p))
            weights.append(wt)
    ex, ew = edge
    faces = []
    tol = mp.mpf(10) ** -30
    for fi, (a, b) in enumerate(FACES):
        va, vb = VERTS[a], VERTS[b]
        length = mp.sqrt((vb[0] - va[0]) ** 2 + (vb[1] - va[1]) ** 2)
        nx, ny = (vb[1] - va[1]) / length, -(vb[0] - va[0]) / length
        idx, fw = [], []
        for t, w in zip(ex, ew):
            px = va[0] + (t + 1) / 2 * (vb[0] - va[0])
            py = va[1] + (t + 1) / 2 * (vb[1] - va[1])
            match = [k for k, q in enumerate(nodes) if abs(q[0] - px) < tol and abs(q[1] - py) < tol]
            assert len(match) == 1, (family, n, fi, t)
            idx.append(match[0])
            fw.append(w * length / 2)
        faces.append((idx, fw, (nx, ny)))
    fam_name = "gauss_legendre_edge" if family == "gl" else "gauss_lobatto_edge"
    with open(path, "w") as fh:
        fh.write(f"# triangle SBP nodes, family {fam_name}, degree {n}\n")
        fh.write(f"# volume rule exact to degree {degree}, {len(ex)} edge points per face\n")
        fh.write("# generated by tools/gen_triangle_nodes.py (S3-symmetric moment solve, 50-digit polish)\n")
        fh.write("# reference triangle (-1,-1), (1,-1), (-1,1)\n")
        fh.write(f"{n} 2 {len(nodes)} {len(faces)}\n")
        for (x, y), w in zip(nodes, weights):
            fh.write(f"{mp.nstr(x, 20, min_fixed=0, max_fixed=0)} {mp.nstr(y, 20, min_fixed=0, max_fixed=0)} {mp.nstr(w, 20, min_fixed=0, max_fixed=0)}\n")
        for idx, fw, (nx, ny) in faces:
            fh.write(f"face {len(idx)}\n")
            fh.write(" ".join(str(i) for i in idx) + "\n")
            fh.write(" ".join(mp.nstr(w, 20, min_fixed=0, max_fixed=0) for w in fw) + "\n")
            fh.write(f"{mp.nstr(nx, 20, min_fixed=0, max_fixed=0)} {mp.nstr(ny, 20, min_fixed=0, max_fixed=0)}\n")


# volume exactness of the shipped tables
SHIPPED = {
    ("gl", 1): 2, ("gl", 2): 4, ("gl", 3): 6, ("gl", 4): 7,
    ("glo", 1): 3, ("glo", 2): 3, ("glo", 3): 5, ("glo", 4): 7,
}


def main():
    # usage: gen_triangle_nodes.py OUT_DIR [FAMILY N MIN_DEGREE]
    out = sys.argv[1] if len(sys.argv) > 1 else "."
    if len(sys.argv) == 5:
        targets = [(sys.argv[2], int(sys.argv[3]), int(sys.argv[4]))]
    else:
        targets = [(f, n, d) for (f, n), d in SHIPPED.items()]
    for family, n, min_degree in targets:
        orbits, edge, d = solve(family, n, min_degree=min_degree)
        path = f"{out}/tri_{family}_n{n}.txt"
        write(family, n, orbits, edge, d, path)
        print(path, sum(orbit_size(k) for k, _, _ in orbits), "nodes")


if __name__ == "__main__":
    main()
