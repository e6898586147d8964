#!/usr/bin/env python3
"""Regenerate tests/data/{iris,wine}.scale from the copies bundled with scikit-learn.

Features are min-max scaled to [-1, 1] per column (the svm-scale default),
labels are the 1-based class ids, and zero-valued features are omitted as in
the LibSVM distribution files.
"""
import pathlib
import sys

import numpy as np
from sklearn import datasets


def write_scaled(name, bunch, out_dir):
    x = np.asarray(bunch.data, dtype=float)
    lo, hi = x.min(axis=0), x.max(axis=0)
    span = np.where(hi > lo, hi - lo, 1.0)
    x = -1.0 + 2.0 * (x - lo) / span
    y = np.asarray(bunch.target, dtype=int) + 1
    path = out_dir / f"{name}.scale"
    with path.open("w") as fh:
        for row, label in zip(x, y):
            feats = " ".join(f"{j + 1}:{v:.6g}" for j, v in enumerate(row) if v != 0.0)
            fh.write(f"{label} {feats}\n")
    print(f"wrote {path} ({len(y)} rows)")


def main():
    out_dir = pathlib.Path(sys.argv[1] if len(sys.argv) > 1 else "tests/data")
    out_dir.mkdir(parents=True, exist_ok=True)
    write_scaled("iris", datasets.load_iris(), out_dir)
    write_scaled("wine", datasets.load_wine(), out_dir)


if __name__ == "__main__":
    main()
