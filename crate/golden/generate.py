#!/usr/bin/env python3
"""Regenerate the closed-form golden tables.

Independent of the Rust code: bases, node tables and tensor entries are built
here with sympy straight from the printed 1D formulas

    <a^i, L a_j>      = nu^i (beta^i_{j-1} - beta^i_j)
    <b^i, L b_j>      = nu^{i+1} beta^{i+1}_j - nu^i beta^i_j
    <a^i, L h L b_j>  = nu_a^i nu_b'^i beta^i_j
                        - nu_a^i sum_m nu_b^m beta^m_j (beta^i_{m-1} - beta^i_m)

with beta_{-1} = beta_n = 0 on the interval and indices mod n on the circle.
Length-2 entries are stored antisymmetrized in the two generators.

Usage: python3 golden/generate.py   (writes next to this file)
"""

import json
from pathlib import Path

import sympy as sp

t = sp.symbols("t", real=True)
OUT = Path(__file__).resolve().parent


def rat(x):
    x = sp.nsimplify(x)
    assert x.is_Rational, x
    return {"rat": str(x)}


def flt(x):
    z = complex(sp.N(x, 30))
    return {"f64re": z.real, "f64im": z.imag}


def lagrange(nodes):
    out = []
    for j, tj in enumerate(nodes):
        p = sp.Integer(1)
        for m, tm in enumerate(nodes):
            if m != j:
                p *= (t - tm) / (tj - tm)
        out.append(sp.expand(p))
    return out


def interval_tables(nodes, k_max):
    nodes = [sp.Rational(x) for x in nodes]
    n = len(nodes) - 1
    alphas = lagrange(nodes)
    dalpha = [sp.diff(a, t) for a in alphas]
    beta = [[sum(dalpha[k].subs(t, ti) for k in range(j + 1, n + 1)) for j in range(n)] for ti in nodes]
    fields = [t**k for k in range(k_max + 1)]
    nu = [[f.subs(t, ti) for ti in nodes] for f in fields]
    dnu = [[sp.diff(f, t).subs(t, ti) for ti in nodes] for f in fields]

    def b(i, j):
        return beta[i][j] if 0 <= j < n else sp.Integer(0)

    return {
        "geometry": "interval",
        "nodes": [str(x) for x in nodes],
        "window": list(range(k_max + 1)),
        "beta": [[rat(v) for v in row] for row in beta],
        **tensors(len(nodes), n, nu, dnu, b, lambda i: i + 1, rat),
    }


def circle_tables(n, k_max):
    ends = [2 * sp.pi * i / n for i in range(n + 1)]
    freqs = list(range(-((n - 1) // 2), n // 2 + 1))
    coeffs = sp.symbols(f"c0:{n}")
    thetas = []
    for j in range(n):
        theta = sum(c * sp.exp(sp.I * k * t) for c, k in zip(coeffs, freqs))
        eqs = [sp.integrate(theta, (t, ends[i], ends[i + 1])) - (1 if i == j else 0) for i in range(n)]
        sol = sp.solve(eqs, coeffs, dict=True)[0]
        thetas.append(sp.simplify(theta.subs(sol)))
    nodes = ends[:n]
    beta = [[sp.N(th.subs(t, ti), 30) for th in thetas] for ti in nodes]
    fields = [sp.exp(sp.I * k * t) for k in range(-k_max, k_max + 1)]
    nu = [[sp.N(f.subs(t, ti), 30) for ti in nodes] for f in fields]
    dnu = [[sp.N(sp.diff(f, t).subs(t, ti), 30) for ti in nodes] for f in fields]

    def b(i, j):
        return beta[i % n][j % n]

    return {
        "geometry": "circle",
        "n": n,
        "window": list(range(-k_max, k_max + 1)),
        "beta": [[flt(v) for v in row] for row in beta],
        **tensors(n, n, nu, dnu, b, lambda i: (i + 1) % n, flt),
    }


def tensors(node_count, edges, nu, dnu, b, nxt, fmt):
    gens = len(nu)
    length1 = []
    for a in range(gens):
        for i in range(node_count):
            for j in range(node_count):
                v = sp.expand(nu[a][i] * (b(i, j - 1) - b(i, j)))
                if v != 0:
                    length1.append({"generator": a, "chain": i, "cochain": j, "value": fmt(v)})
        for i in range(edges):
            for j in range(edges):
                v = sp.expand(nu[a][nxt(i)] * b(nxt(i), j) - nu[a][i] * b(i, j))
                if v != 0:
                    length1.append(
                        {"generator": a, "chain": node_count + i, "cochain": node_count + j, "value": fmt(v)}
                    )

    def quad(a, c, i, j):
        s = sum(nu[c][m] * b(m, j) * (b(i, m - 1) - b(i, m)) for m in range(node_count))
        return nu[a][i] * dnu[c][i] * b(i, j) - nu[a][i] * s

    length2 = []
    for a in range(gens):
        for c in range(a + 1, gens):
            for i in range(node_count):
                for j in range(edges):
                    v = sp.expand(quad(a, c, i, j) - quad(c, a, i, j))
                    if abs(complex(sp.N(v))) > 1e-25:
                        length2.append(
                            {"a": a, "b": c, "chain": i, "cochain": node_count + j, "value": fmt(v)}
                        )
    return {"length1": length1, "length2_antisymmetrized": length2}


def main():
    cases = {
        "interval_3nodes_K2.json": interval_tables(["0", "1/2", "1"], 2),
        "interval_4nodes_K3.json": interval_tables(["0", "1/3", "2/3", "1"], 3),
        "circle_n4_K1.json": circle_tables(4, 1),
    }
    for name, data in cases.items():
        (OUT / name).write_text(json.dumps(data, indent=1) + "\n")
        print(name, len(data["length1"]), len(data["length2_antisymmetrized"]))


if __name__ == "__main__":
    main()
