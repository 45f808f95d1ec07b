"""Dense square matrices over an exact field (Fraction or RatFunc entries)."""

from __future__ import annotations

from fractions import Fraction
from typing import Any, Sequence

Matrix = list[list[Any]]


def _field(x: Any) -> Any:
    return Fraction(x) if isinstance(x, int) else x


def identity(n: int, one: Any = 1, zero: Any = 0) -> Matrix:
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def matmul(a: Sequence[Sequence[Any]], b: Sequence[Sequence[Any]]) -> Matrix:
    n, m, p = len(a), len(b), len(b[0])
    out = []
    for i in range(n):
        row = []
        for j in range(p):
            acc = 0
            for k in range(m):
                x, y = a[i][k], b[k][j]
                if x and y:
                    acc = x * y if acc == 0 else acc + x * y
            row.append(acc)
        out.append(row)
    return out


def kron(a: Sequence[Sequence[Any]], b: Sequence[Sequence[Any]]) -> Matrix:
    ra, ca, rb, cb = len(a), len(a[0]), len(b), len(b[0])
    return [
        [a[i // rb][j // cb] * b[i % rb][j % cb] for j in range(ca * cb)]
        for i in range(ra * rb)
    ]


def _solve_pivot(m: Matrix, col: int, start: int) -> int | None:
    for r in range(start, len(m)):
        if m[r][col]:
            return r
    return None


def det(a: Sequence[Sequence[Any]]) -> Any:
    """Determinant by Gaussian elimination over a field."""
    m = [[_field(x) for x in r] for r in a]
    n = len(m)
    d: Any = Fraction(1)
    for c in range(n):
        p = _solve_pivot(m, c, c)
        if p is None:
            return 0 * m[0][0] if n else 1
        if p != c:
            m[c], m[p] = m[p], m[c]
            d = -d
        piv = m[c][c]
        d = d * piv
        for r in range(c + 1, n):
            if m[r][c]:
                f = m[r][c] / piv
                m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return d


def inverse(a: Sequence[Sequence[Any]]) -> Matrix:
    n = len(a)
    m = [
        [_field(x) for x in r] + [Fraction(int(i == j)) for j in range(n)]
        for i, r in enumerate(a)
    ]
    for c in range(n):
        p = _solve_pivot(m, c, c)
        if p is None:
            raise ZeroDivisionError("singular matrix")
        m[c], m[p] = m[p], m[c]
        piv = m[c][c]
        m[c] = [x / piv for x in m[c]]
        for r in range(n):
            if r != c and m[r][c]:
                f = m[r][c]
                m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return [row[n:] for row in m]


def is_identity(a: Sequence[Sequence[Any]]) -> bool:
    return all(
        (a[i][j] == 1) if i == j else (not a[i][j]) for i in range(len(a)) for j in range(len(a))
    )
