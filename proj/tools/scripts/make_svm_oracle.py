#!/usr/bin/env python3
"""Writes tests/data/svm_oracle.txt: small bias-free soft-margin SVM
instances solved to high accuracy with cvxopt's dense QP solver.

Problem: min 0.5 |w|^2 + C sum_i max(0, 1 - y_i w.x_i)
Dual:    min 0.5 a' (Y K Y) a - 1'a  s.t. 0 <= a <= C,  w = sum a_i y_i x_i

Format, per instance:
    instance n dim C
    n lines: label x_1 ... x_dim
    objective <primal objective at the QP optimum>
    weights w_1 ... w_dim
"""
import pathlib

import numpy as np
from cvxopt import matrix, solvers

solvers.options["show_progress"] = False
solvers.options["abstol"] = 1e-12
solvers.options["reltol"] = 1e-12
solvers.options["feastol"] = 1e-12


def solve(x, y, c):
    n = x.shape[0]
    k = (x * y[:, None]) @ (x * y[:, None]).T
    p = matrix(k + 1e-12 * np.eye(n))
    q = matrix(-np.ones(n))
    g = matrix(np.vstack([-np.eye(n), np.eye(n)]))
    h = matrix(np.hstack([np.zeros(n), c * np.ones(n)]))
    a = np.array(solvers.qp(p, q, g, h)["x"]).ravel()
    w = (a * y) @ x
    obj = 0.5 * w @ w + c * np.maximum(0.0, 1.0 - y * (x @ w)).sum()
    return w, float(obj)


def instance(rng, idx):
    n = int(rng.integers(8, 31))
    dim = int(rng.integers(2, 11))
    c = [0.1, 1.0, 10.0, 100.0][idx % 4]
    if idx % 2 == 0:
        # Dense Gaussian features with a noisy linear rule.
        x = rng.normal(size=(n, dim))
    else:
        # Sparse non-negative rows summing to one, like an embedding.
        x = np.zeros((n, dim))
        for i in range(n):
            support = rng.choice(dim, size=min(3, dim), replace=False)
            x[i, support] = rng.dirichlet(np.ones(len(support)))
    w_true = rng.normal(size=dim)
    y = np.sign(x @ w_true + 0.3 * rng.normal(size=n))
    y[y == 0] = 1.0
    if np.all(y == y[0]):
        y[0] = -y[0]
    return x, y, c


def main():
    rng = np.random.default_rng(20240601)
    out = pathlib.Path(__file__).resolve().parents[2] / "tests" / "data" / "svm_oracle.txt"
    lines = []
    for idx in range(20):
        x, y, c = instance(rng, idx)
        w, obj = solve(x, y, c)
        lines.append(f"instance {x.shape[0]} {x.shape[1]} {c!r}")
        for xi, yi in zip(x, y):
            lines.append(" ".join([str(int(yi))] + [repr(float(v)) for v in xi]))
        lines.append(f"objective {obj!r}")
        lines.append("weights " + " ".join(repr(float(v)) for v in w))
    out.write_text("\n".join(lines) + "\n")
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
