"""Timing check for the big stacked-matrix determinant.

Builds the 6-variable, 4-component germ whose Milnor determinant is the
largest exact computation in the corpus, runs det(A A^T) both directly and
via the sum of squared maximal minors, and times both routes.
"""

from __future__ import annotations

import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from germlab.poly import PolyMatrix, VarContext


def main() -> None:
    ctx = VarContext(["x", "y", "z", "w", "a", "b"])
    x, y, z, w, a, b = ctx.gens()
    comps = [
        x**2 * z + y**2 * z,
        w * x**2 + w * y**2,
        a * x**2 + a * y**2,
        b * x**2 + b * y**2,
    ]
    rows = [[g.diff(n) for n in ctx.names] for g in comps]
    rows.append(list(ctx.gens()))
    A = PolyMatrix(rows)

    t0 = time.perf_counter()
    gram = A @ A.transpose()
    t1 = time.perf_counter()
    print(f"gram matrix: {t1 - t0:.3f}s")

    det_direct = gram.det()
    t2 = time.perf_counter()
    print(f"bareiss det(AA^T): {t2 - t1:.3f}s, {len(det_direct.terms)} terms")

    acc = ctx.zero()
    for m in A.minors(5):
        acc = acc + m * m
    t3 = time.perf_counter()
    print(f"cauchy-binet sum: {t3 - t2:.3f}s, {len(acc.terms)} terms")
    print(f"routes agree: {det_direct == acc}")

    target = (x**2 + y**2) ** 7 * (
        2 * a**2 + 2 * b**2 + 2 * w**2 - x**2 - y**2 + 2 * z**2
    ) ** 2
    t4 = time.perf_counter()
    print(f"expand claimed product: {t4 - t3:.3f}s, {len(target.terms)} terms")
    print(f"matches claimed factorization: {det_direct == target}")


if __name__ == "__main__":
    main()
