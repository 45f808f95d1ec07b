"""Finite-dimensional Lie data: the simple algebra g, gl_N representations W,
and g-modules S used as tops of generalized Verma modules."""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Any, Mapping, Sequence

from . import matrices as mx
from .ratfunc import RatFunc

Vector = dict[int, Fraction]
QMatrix = list[list[Fraction]]


class LieDataError(ValueError):
    pass


@dataclass(frozen=True)
class SimpleLieAlgebra:
    """Structure constants ``c[i][j] = {k: c_ij^k}``, invariant form and h^vee."""

    name: str
    labels: tuple[str, ...]
    structure: tuple[tuple[Mapping[int, Fraction], ...], ...]
    form: tuple[tuple[Fraction, ...], ...]
    dual_coxeter: Fraction
    _inverse_form: tuple[tuple[Fraction, ...], ...] | None = field(default=None, compare=False)

    @property
    def dim(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise LieDataError(f"unknown basis label {label!r} for {self.name}") from None

    def bracket(self, i: int, j: int) -> Mapping[int, Fraction]:
        return self.structure[i][j]

    def pairing(self, i: int, j: int) -> Fraction:
        return self.form[i][j]

    def inverse_form(self) -> tuple[tuple[Fraction, ...], ...]:
        if self._inverse_form is None:
            try:
                inv = mx.inverse([list(r) for r in self.form])
            except ZeroDivisionError:
                raise LieDataError(f"form of {self.name} is degenerate") from None
            object.__setattr__(self, "_inverse_form", tuple(tuple(r) for r in inv))
        return self._inverse_form  # type: ignore[return-value]

    def bracket_and_form(
        self, g1: Sequence[Fraction | int], g2: Sequence[Fraction | int]
    ) -> tuple[list[Fraction], Fraction]:
        if len(g1) != self.dim or len(g2) != self.dim:
            raise LieDataError(f"vectors must have length {self.dim}")
        out = [Fraction(0)] * self.dim
        pair = Fraction(0)
        for i, a in enumerate(g1):
            if not a:
                continue
            for j, b in enumerate(g2):
                if not b:
                    continue
                for k, c in self.structure[i][j].items():
                    out[k] += a * b * c
                pair += a * b * self.form[i][j]
        return out, pair

    def adjoint_matrix(self, i: int) -> QMatrix:
        m = [[Fraction(0)] * self.dim for _ in range(self.dim)]
        for j in range(self.dim):
            for k, c in self.structure[i][j].items():
                m[k][j] = c
        return m


def _express(mat: QMatrix, basis: Sequence[QMatrix]) -> Vector:
    """Coordinates of ``mat`` in the span of ``basis`` (exact elimination)."""
    n = len(basis)
    cols = [[x for row in b for x in row] for b in basis]
    target = [x for row in mat for x in row]
    rows = [[cols[j][r] for j in range(n)] + [target[r]] for r in range(len(target))]
    piv_cols = []
    r0 = 0
    for c in range(n):
        p = next((r for r in range(r0, len(rows)) if rows[r][c]), None)
        if p is None:
            continue
        rows[r0], rows[p] = rows[p], rows[r0]
        pv = rows[r0][c]
        rows[r0] = [x / pv for x in rows[r0]]
        for r in range(len(rows)):
            if r != r0 and rows[r][c]:
                f = rows[r][c]
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[r0])]
        piv_cols.append(c)
        r0 += 1
    if any(rows[r][n] for r in range(r0, len(rows))):
        raise LieDataError("matrix not in the span of the basis")
    return {c: rows[i][n] for i, c in enumerate(piv_cols) if rows[i][n]}


def from_matrices(
    name: str, labels: Sequence[str], basis: Sequence[QMatrix], dual_coxeter: Fraction | int
) -> SimpleLieAlgebra:
    """Structure constants and trace form of a matrix Lie algebra."""
    basis = [[[Fraction(x) for x in row] for row in b] for b in basis]
    structure = []
    form = []
    for a in basis:
        srow = []
        frow = []
        for b in basis:
            ab = mx.matmul(a, b)
            ba = mx.matmul(b, a)
            comm = [[x - y for x, y in zip(r1, r2)] for r1, r2 in zip(ab, ba)]
            srow.append(_express(comm, basis))
            frow.append(sum((ab[i][i] for i in range(len(ab))), Fraction(0)))
        structure.append(tuple(srow))
        form.append(tuple(frow))
    return SimpleLieAlgebra(
        name, tuple(labels), tuple(structure), tuple(form), Fraction(dual_coxeter)
    )


def _unit(n: int, i: int, j: int) -> QMatrix:
    m = [[Fraction(0)] * n for _ in range(n)]
    m[i][j] = Fraction(1)
    return m


def sl_matrices(n: int) -> tuple[list[str], list[QMatrix]]:
    """Basis of sl_n: E_ij (i != j) then H_i = E_ii - E_{i+1,i+1}."""
    if n == 2:
        e, f = _unit(2, 0, 1), _unit(2, 1, 0)
        h = [[Fraction(1), Fraction(0)], [Fraction(0), Fraction(-1)]]
        return ["e", "h", "f"], [e, h, f]
    labels, mats = [], []
    for i in range(n):
        for j in range(n):
            if i != j:
                labels.append(f"E{i + 1}{j + 1}")
                mats.append(_unit(n, i, j))
    for i in range(n - 1):
        m = _unit(n, i, i)
        m[i + 1][i + 1] = Fraction(-1)
        labels.append(f"H{i + 1}")
        mats.append(m)
    return labels, mats


def builtin(name: str) -> SimpleLieAlgebra:
    m = re.fullmatch(r"sl(\d+)", name)
    if not m or int(m.group(1)) < 2:
        raise LieDataError(f"unknown built-in algebra {name!r} (use sl2, sl3, ...)")
    n = int(m.group(1))
    labels, mats = sl_matrices(n)
    return from_matrices(name, labels, mats, n)


def from_config(doc: Mapping[str, Any] | str) -> SimpleLieAlgebra:
    """Algebra from a built-in name or a JSON-style mapping.

    The mapping carries ``basis`` (labels), ``structure_constants`` as
    ``[i, j, k, value]`` rows (indices or labels), ``form`` and
    ``dual_coxeter``.
    """
    if isinstance(doc, str):
        return builtin(doc)
    if "builtin" in doc:
        return builtin(doc["builtin"])
    try:
        labels = tuple(str(x) for x in doc["basis"])
        rows = doc["structure_constants"]
        form_rows = doc["form"]
        hv = Fraction(str(doc["dual_coxeter"]))
    except KeyError as exc:
        raise LieDataError(f"algebra config missing field {exc.args[0]!r}") from None
    n = len(labels)

    def idx(x: Any) -> int:
        if isinstance(x, int):
            if not 0 <= x < n:
                raise LieDataError(f"basis index {x} out of range")
            return x
        if x not in labels:
            raise LieDataError(f"unknown basis label {x!r}")
        return labels.index(x)

    table: list[list[dict[int, Fraction]]] = [[{} for _ in range(n)] for _ in range(n)]
    for row in rows:
        if len(row) != 4:
            raise LieDataError(f"structure constant row {row!r} must have 4 entries")
        i, j, k = idx(row[0]), idx(row[1]), idx(row[2])
        v = Fraction(str(row[3]))
        if v:
            table[i][j][k] = table[i][j].get(k, Fraction(0)) + v
    if len(form_rows) != n or any(len(r) != n for r in form_rows):
        raise LieDataError("form must be a square matrix matching the basis")
    form = tuple(tuple(Fraction(str(x)) for x in r) for r in form_rows)
    return SimpleLieAlgebra(
        str(doc.get("name", "custom")),
        labels,
        tuple(tuple(r) for r in table),
        form,
        hv,
    )


def _combine(vecs: Sequence[tuple[Fraction, Mapping[int, Fraction]]]) -> Vector:
    out: Vector = {}
    for s, v in vecs:
        for k, c in v.items():
            out[k] = out.get(k, Fraction(0)) + s * c
    return {k: c for k, c in out.items() if c}


def validate_algebra(alg: SimpleLieAlgebra) -> list[str]:
    """Every violated structural identity, as a readable line."""
    n = alg.dim
    report: list[str] = []
    lab = alg.labels
    for i in range(n):
        for j in range(n):
            s = _combine([(Fraction(1), alg.bracket(i, j)), (Fraction(1), alg.bracket(j, i))])
            for k, c in s.items():
                report.append(
                    f"antisymmetry: c[{lab[i]},{lab[j]}]^{lab[k]} + c[{lab[j]},{lab[i]}]^{lab[k]} = {c}"
                )
    for i, j, k in itertools.combinations(range(n), 3):
        terms = []
        for a, b, c in ((i, j, k), (j, k, i), (k, i, j)):
            for m, x in alg.bracket(b, c).items():
                terms.append((x, alg.bracket(a, m)))
        for t, val in _combine(terms).items():
            report.append(f"jacobi: ({lab[i]},{lab[j]},{lab[k]}) component {lab[t]} = {val}")
    for i in range(n):
        for j in range(n):
            if alg.form[i][j] != alg.form[j][i]:
                report.append(f"form symmetry: ({lab[i]},{lab[j]})")
    for a in range(n):
        for b in range(n):
            for c in range(n):
                v = sum((x * alg.form[m][c] for m, x in alg.bracket(a, b).items()), Fraction(0))
                v += sum((x * alg.form[b][m] for m, x in alg.bracket(a, c).items()), Fraction(0))
                if v:
                    report.append(f"invariance: ({lab[a]},{lab[b]},{lab[c]}) = {v}")
    if report:
        return report
    try:
        inv = alg.inverse_form()
    except LieDataError as exc:
        return [str(exc)]
    # Casimir of the adjoint module must be 2 h^vee times the identity for the
    # Sugawara normalization to match the given form.
    ads = [alg.adjoint_matrix(i) for i in range(n)]
    cas = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if inv[i][j]:
                p = mx.matmul(ads[i], ads[j])
                for r in range(n):
                    for s in range(n):
                        cas[r][s] += inv[i][j] * p[r][s]
    target = 2 * alg.dual_coxeter
    for r in range(n):
        for s in range(n):
            want = target if r == s else 0
            if cas[r][s] != want:
                report.append(
                    f"dual Coxeter: adjoint Casimir entry ({r},{s}) = {cas[r][s]}, expected {want}"
                )
                return report
    return report


# ---------------------------------------------------------------------------
# representations


def _check_rep(alg: SimpleLieAlgebra, mats: Sequence[QMatrix]) -> list[str]:
    bad = []
    for i in range(alg.dim):
        for j in range(alg.dim):
            ab = mx.matmul(mats[i], mats[j])
            ba = mx.matmul(mats[j], mats[i])
            d = len(ab)
            want = [[Fraction(0)] * d for _ in range(d)]
            for k, c in alg.bracket(i, j).items():
                for r in range(d):
                    for s in range(d):
                        want[r][s] += c * mats[k][r][s]
            for r in range(d):
                for s in range(d):
                    if ab[r][s] - ba[r][s] != want[r][s]:
                        bad.append(f"[{alg.labels[i]},{alg.labels[j]}]")
                        break
                else:
                    continue
                break
    return bad


@dataclass(frozen=True)
class GRep:
    """A finite-dimensional g-module given by one matrix per basis element."""

    name: str
    matrices: tuple[tuple[tuple[Fraction, ...], ...], ...]

    @property
    def dim(self) -> int:
        return len(self.matrices[0])

    def action(self, i: int) -> tuple[tuple[Fraction, ...], ...]:
        return self.matrices[i]

    def check(self, alg: SimpleLieAlgebra) -> list[str]:
        return _check_rep(alg, [[list(r) for r in m] for m in self.matrices])


def _freeze(m: QMatrix) -> tuple[tuple[Fraction, ...], ...]:
    return tuple(tuple(Fraction(x) for x in r) for r in m)


def sl2_irrep(d: int) -> list[QMatrix]:
    """Matrices of e, h, f on the irreducible sl2-module of dimension d."""
    lam = d - 1
    e = [[Fraction(0)] * d for _ in range(d)]
    h = [[Fraction(0)] * d for _ in range(d)]
    f = [[Fraction(0)] * d for _ in range(d)]
    for i in range(d):
        h[i][i] = Fraction(lam - 2 * i)
        if i + 1 < d:
            f[i + 1][i] = Fraction(1)
        if i >= 1:
            e[i - 1][i] = Fraction(i * (lam - i + 1))
    return [e, h, f]


def grep_from_spec(alg: SimpleLieAlgebra, spec: str) -> GRep:
    """``trivial``, ``adjoint``, ``natural`` (sl_n) or ``sl2:dimK``."""
    spec = spec.strip()
    if spec == "trivial":
        mats = [[[Fraction(0)]] for _ in range(alg.dim)]
    elif spec == "adjoint":
        mats = [alg.adjoint_matrix(i) for i in range(alg.dim)]
    elif spec == "natural":
        m = re.fullmatch(r"sl(\d+)", alg.name)
        if not m:
            raise LieDataError(f"natural module needs a built-in sl_n, not {alg.name}")
        mats = sl_matrices(int(m.group(1)))[1]
    elif (m := re.fullmatch(r"(\w+):dim(\d+)", spec)) is not None:
        if m.group(1) != "sl2" or alg.name != "sl2":
            raise LieDataError(f"module {spec!r} requires the algebra sl2")
        mats = sl2_irrep(int(m.group(2)))
    else:
        raise LieDataError(f"unknown g-module {spec!r}")
    rep = GRep(spec, tuple(_freeze(x) for x in mats))
    bad = rep.check(alg)
    if bad:
        raise LieDataError(f"module {spec!r} violates brackets {bad[:3]}")
    return rep


@dataclass(frozen=True)
class GLNRep:
    """``natural^{tensor k} (x) det^m`` for gl_N."""

    N: int
    tensor_power: int = 1
    det_power: int = 0

    def __post_init__(self) -> None:
        if self.N < 1 or self.tensor_power < 0:
            raise LieDataError("need N >= 1 and tensor_power >= 0")

    @property
    def dim(self) -> int:
        return self.N ** self.tensor_power

    def basis(self) -> list[tuple[int, ...]]:
        return list(itertools.product(range(self.N), repeat=self.tensor_power))

    def lie_action(self, a: int, b: int) -> QMatrix:
        """Matrix of E_ab (1-based indices)."""
        basis = self.basis()
        pos = {t: i for i, t in enumerate(basis)}
        d = len(basis)
        m = [[Fraction(0)] * d for _ in range(d)]
        for col, t in enumerate(basis):
            for slot, x in enumerate(t):
                if x == b - 1:
                    nt = t[:slot] + (a - 1,) + t[slot + 1:]
                    m[pos[nt]][col] += 1
            if a == b:
                m[col][col] += self.det_power
        return m

    def group_action(self, J: Sequence[Sequence[Any]]) -> list[list[Any]]:
        """Matrix of J acting on W; entries may be RatFunc."""
        if len(J) != self.N:
            raise LieDataError(f"expected a {self.N}x{self.N} matrix")
        d = mx.det(J)
        if not d:
            raise LieDataError("singular matrix has no action on W")
        out: list[list[Any]] = [[Fraction(1)]]
        for _ in range(self.tensor_power):
            out = mx.kron(out, J)
        m = self.det_power
        if m:
            scale = d**m if m > 0 else (1 / d) ** (-m)
            out = [[x * scale for x in row] for row in out]
        return out

    def check(self) -> list[str]:
        """gl_N brackets on the lie_action matrices."""
        bad = []
        N = self.N
        for a, b, c, d in itertools.product(range(1, N + 1), repeat=4):
            x, y = self.lie_action(a, b), self.lie_action(c, d)
            comm = [
                [p - q for p, q in zip(r1, r2)]
                for r1, r2 in zip(mx.matmul(x, y), mx.matmul(y, x))
            ]
            want = [[Fraction(0)] * self.dim for _ in range(self.dim)]
            if b == c:
                want = [[p + q for p, q in zip(r1, r2)] for r1, r2 in zip(want, self.lie_action(a, d))]
            if a == d:
                want = [[p - q for p, q in zip(r1, r2)] for r1, r2 in zip(want, self.lie_action(c, b))]
            if comm != want:
                bad.append(f"[E{a}{b},E{c}{d}]")
        return bad


def nilpotent_exp(m: QMatrix) -> QMatrix:
    """exp of a nilpotent matrix as a finite sum."""
    d = len(m)
    out = mx.identity(d, Fraction(1), Fraction(0))
    power = mx.identity(d, Fraction(1), Fraction(0))
    for k in range(1, d + 2):
        power = mx.matmul(power, m)
        if not any(any(r) for r in power):
            break
        out = [[x + y / factorial(k) for x, y in zip(r1, r2)] for r1, r2 in zip(out, power)]
    return out


def rep_group_action(W: GLNRep, J: Sequence[Sequence[RatFunc]]) -> list[list[Any]]:
    return W.group_action(J)
