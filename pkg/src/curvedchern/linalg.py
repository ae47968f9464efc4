"""Exact sparse linear solving over Q(i) for membership certificates.

The systems are sparse and modest (hundreds of rows); a dict-of-dicts
Gaussian elimination with deterministic pivot choice is enough and keeps
everything exact.
"""

from __future__ import annotations

from .scalars import Scalar


def solve_sparse(columns: list[dict], rhs: dict) -> list[Scalar] | None:
    """Solve sum_j x_j * columns[j] = rhs; None when inconsistent.

    columns are sparse row-key -> Scalar maps over arbitrary sortable row
    keys.  Free variables are set to zero, so the returned solution is the
    deterministic one for a fixed column order.
    """
    row_keys = sorted({k for col in columns for k in col} | set(rhs))
    rows: dict = {}
    for rid in row_keys:
        cols = {}
        for j, col in enumerate(columns):
            c = col.get(rid)
            if c is not None and not c.is_zero():
                cols[j] = c
        rows[rid] = [cols, rhs.get(rid, Scalar(0))]

    containing: dict[int, set] = {}
    for rid, (cols, _) in rows.items():
        for j in cols:
            containing.setdefault(j, set()).add(rid)

    pivoted: list[tuple] = []  # (rid, column)
    used_rows: set = set()
    while True:
        cand = [
            rid
            for rid, (cols, _) in rows.items()
            if rid not in used_rows and cols
        ]
        if not cand:
            break
        # fewest-entries row first, ties by key: deterministic and keeps fill low
        rid = min(cand, key=lambda r: (len(rows[r][0]), r))
        cols, b = rows[rid]
        j = min(cols)
        inv = cols[j].inv()
        rows[rid][0] = {k: v * inv for k, v in cols.items()}
        rows[rid][1] = b * inv
        used_rows.add(rid)
        pivoted.append((rid, j))
        pcols, pb = rows[rid]
        for other in sorted(containing.get(j, set())):
            if other == rid:
                continue
            ocols, ob = rows[other]
            f = ocols.get(j)
            if f is None or f.is_zero():
                continue
            for k, v in pcols.items():
                nv = ocols.get(k, Scalar(0)) - f * v
                if nv.is_zero():
                    if k in ocols:
                        del ocols[k]
                        containing.get(k, set()).discard(other)
                else:
                    if k not in ocols:
                        containing.setdefault(k, set()).add(other)
                    ocols[k] = nv
            rows[other][1] = ob - f * pb

    for rid, (cols, b) in rows.items():
        if not cols and not b.is_zero():
            return None
    solution = [Scalar(0)] * len(columns)
    for rid, j in pivoted:
        cols, b = rows[rid]
        # after full elimination the pivot row holds only its pivot and
        # free columns; free variables are zero, so x_j is the rhs
        solution[j] = b
    return solution
