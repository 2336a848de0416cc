"""Exact SOS certificates: Gram expansion, rational LDL^T, verification.

A certificate asserts multiplier * target = scale * z^T Q z with Q positive
semidefinite, which proves the target nonnegative (and SOS when the
multiplier is 1). All checks are exact; no floating point enters this module.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from typing import Sequence

from . import linalg
from .biquadratic import BiquadraticForm
from .forms import Form, FormatError, as_frac, fmt_frac, form_from_text, form_to_text


class SymRationalMatrix:
    """Dense symmetric matrix of exact rationals."""

    __slots__ = ("dim", "rows")

    def __init__(self, rows: Sequence[Sequence]):
        dim = len(rows)
        if dim < 1 or any(len(r) != dim for r in rows):
            raise ValueError("rows must form a square grid")
        grid = [[as_frac(v) for v in r] for r in rows]
        for i in range(dim):
            for j in range(i + 1, dim):
                if grid[i][j] != grid[j][i]:
                    raise ValueError(f"matrix is not symmetric at ({i + 1},{j + 1})")
        self.dim = dim
        self.rows = grid

    @staticmethod
    def zero(dim: int) -> "SymRationalMatrix":
        return SymRationalMatrix([[Fraction(0)] * dim for _ in range(dim)])

    @staticmethod
    def identity(dim: int) -> "SymRationalMatrix":
        return SymRationalMatrix(
            [[Fraction(int(i == j)) for j in range(dim)] for i in range(dim)]
        )

    def __getitem__(self, ij: tuple[int, int]) -> Fraction:
        i, j = ij
        return self.rows[i - 1][j - 1]

    def __eq__(self, other) -> bool:
        if not isinstance(other, SymRationalMatrix):
            return NotImplemented
        return self.rows == other.rows

    def __add__(self, other: "SymRationalMatrix") -> "SymRationalMatrix":
        if self.dim != other.dim:
            raise ValueError("dimension mismatch")
        return SymRationalMatrix(
            [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.rows, other.rows)]
        )

    def scale(self, t) -> "SymRationalMatrix":
        t = as_frac(t)
        return SymRationalMatrix([[t * v for v in r] for r in self.rows])

    def mat_vec(self, v: Sequence) -> list[Fraction]:
        return linalg.mat_vec(self.rows, [as_frac(x) for x in v])

    def det(self) -> Fraction:
        return linalg.det(self.rows)

    def __repr__(self) -> str:
        return f"SymRationalMatrix({self.rows!r})"


class Verdict(enum.Enum):
    POSITIVE_DEFINITE = "PositiveDefinite"
    POSITIVE_SEMIDEFINITE = "PositiveSemidefinite"
    NOT_PSD = "NotPSD"


@dataclass
class LdltReport:
    verdict: Verdict
    pivots: list[Fraction]
    failure_index: int | None = None

    def is_psd(self) -> bool:
        return self.verdict is not Verdict.NOT_PSD


def ldlt_psd_check(s: SymRationalMatrix) -> LdltReport:
    """Exact LDL^T positive-semidefiniteness decision, no pivoting.

    At step k: a negative pivot means NotPSD; a zero pivot with a nonzero
    residual row means NotPSD; a zero pivot with a zero row is skipped. Sound
    and complete for PSD on exact input.
    """
    n = s.dim
    a = [list(r) for r in s.rows]
    pivots: list[Fraction] = []
    saw_zero = False
    for k in range(n):
        piv = a[k][k]
        pivots.append(piv)
        if piv < 0:
            return LdltReport(Verdict.NOT_PSD, pivots, failure_index=k + 1)
        if piv == 0:
            if any(a[k][j] != 0 for j in range(k, n)):
                return LdltReport(Verdict.NOT_PSD, pivots, failure_index=k + 1)
            saw_zero = True
            continue
        # eliminate below the pivot; row k must stay intact until all rows
        # below are updated, so only rows i > k are touched
        for i in range(k + 1, n):
            if a[i][k] == 0:
                continue
            f = a[i][k] / piv
            for j in range(k + 1, n):
                a[i][j] -= f * a[k][j]
            a[i][k] = Fraction(0)
    verdict = Verdict.POSITIVE_SEMIDEFINITE if saw_zero else Verdict.POSITIVE_DEFINITE
    return LdltReport(verdict, pivots)


Monomial = tuple[int, ...]  # exponent vector over the ambient variables


def gram_expand(z: Sequence[Monomial], q: SymRationalMatrix) -> Form:
    """The exact polynomial z^T Q z over a monomial basis z."""
    if len(z) != q.dim:
        raise ValueError(f"basis has {len(z)} monomials but Q is {q.dim}x{q.dim}")
    if not z:
        raise ValueError("empty monomial basis")
    nv = len(z[0])
    if any(len(m) != nv for m in z):
        raise ValueError("monomials have mixed variable counts")
    terms: dict[Monomial, Fraction] = {}
    for r in range(q.dim):
        for s_ in range(r, q.dim):
            c = q.rows[r][s_]
            if c == 0:
                continue
            if r != s_:
                c = 2 * c
            mono = tuple(a + b for a, b in zip(z[r], z[s_]))
            terms[mono] = terms.get(mono, Fraction(0)) + c
    degree = 2 * sum(z[0])
    return Form(nv, degree, terms)


@dataclass
class SosCertificate:
    """z^T Q z representation with an optional nonnegative multiplier."""

    z: list[Monomial]
    q: SymRationalMatrix
    multiplier: Form  # over the same ambient variables; default is 1-like x^0
    scale: Fraction

    def __post_init__(self):
        if len(self.z) != self.q.dim:
            raise ValueError("certificate basis and Gram matrix size disagree")
        if self.scale <= 0:
            raise ValueError("scale must be positive")


def unit_multiplier(n_vars: int) -> Form:
    return Form(n_vars, 0, {(0,) * n_vars: Fraction(1)})


def is_even_power_sum(f: Form) -> bool:
    """Syntactic nonnegativity: every exponent even, every coefficient > 0.

    Such a form is a sum of squared monomial multiples; this covers the
    multipliers used here (1 and x1^2 + x2^2) without a recursive SOS call.
    """
    if f.is_zero():
        return False
    return all(c > 0 and all(e % 2 == 0 for e in exps) for exps, c in f.terms.items())


@dataclass
class SosVerification:
    accepted: bool
    reason: str
    mismatch_monomial: Monomial | None = None
    expected: Fraction | None = None
    actual: Fraction | None = None

    def __bool__(self) -> bool:
        return self.accepted


def _as_form(target) -> Form:
    if isinstance(target, BiquadraticForm):
        return target.to_form()
    if isinstance(target, Form):
        return target
    raise TypeError("target must be a Form or BiquadraticForm")


def verify_sos_certificate(target, cert: SosCertificate) -> SosVerification:
    """Exact acceptance check for an SOS certificate.

    Accepts iff multiplier * target equals scale * z^T Q z coefficient by
    coefficient, Q passes the LDL^T PSD check, and the multiplier is a sum of
    even monomial powers (or the target is zero with Q = 0). Acceptance
    proves the target nonnegative; with multiplier 1 it proves the target SOS.
    """
    tf = _as_form(target)
    if cert.multiplier.n_vars != tf.n_vars:
        raise ValueError("multiplier and target variable counts disagree")
    if cert.z and len(cert.z[0]) != tf.n_vars:
        raise ValueError("certificate basis and target variable counts disagree")
    lhs = cert.multiplier * tf
    rhs = gram_expand(cert.z, cert.q).scale(cert.scale)
    if not (tf.is_zero() and rhs.is_zero()):
        if not is_even_power_sum(cert.multiplier):
            return SosVerification(False, "multiplier is not a sum of even monomial powers")
        monos = sorted(set(lhs.terms) | set(rhs.terms))
        for m in monos:
            a = lhs.terms.get(m, Fraction(0))
            b = rhs.terms.get(m, Fraction(0))
            if a != b:
                return SosVerification(
                    False,
                    f"coefficient mismatch at monomial {m}: "
                    f"multiplier*target has {a}, scale*z^T Q z has {b}",
                    mismatch_monomial=m,
                    expected=a,
                    actual=b,
                )
    report = ldlt_psd_check(cert.q)
    if not report.is_psd():
        return SosVerification(
            False,
            f"Gram matrix is not PSD (pivot {report.pivots[-1]} at step {report.failure_index})",
        )
    return SosVerification(True, "certificate accepted")


# -- text format ---------------------------------------------------------------
#
# Sections:
#   Z:           one monomial per line, x-exponents "|" y-exponents (or a
#                single exponent list when there is no block split)
#   Q:           dimension line, then row-major rationals, one row per line
#   MULTIPLIER:  a form block in the standard form format
#   SCALE:       NUM/DEN


def certificate_to_text(cert: SosCertificate, block: int | None = None) -> str:
    lines = ["Z:"]
    for m in cert.z:
        if block is not None:
            xs = " ".join(str(e) for e in m[:block])
            ys = " ".join(str(e) for e in m[block:])
            lines.append(f"{xs} | {ys}")
        else:
            lines.append(" ".join(str(e) for e in m))
    lines.append("Q:")
    lines.append(str(cert.q.dim))
    for row in cert.q.rows:
        lines.append(" ".join(fmt_frac(v) for v in row))
    lines.append("MULTIPLIER:")
    lines.append(form_to_text(cert.multiplier).rstrip("\n"))
    lines.append(f"SCALE: {fmt_frac(cert.scale)}")
    return "\n".join(lines) + "\n"


def certificate_from_text(text: str) -> SosCertificate:
    lines = [ln.split("#", 1)[0].rstrip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln.strip()]
    sections: dict[str, list[str]] = {}
    current = None
    scale = None
    for ln in lines:
        stripped = ln.strip()
        upper = stripped.upper()
        if upper.startswith("SCALE:"):
            try:
                scale = Fraction(stripped.split(":", 1)[1].strip())
            except (ValueError, ZeroDivisionError) as exc:
                raise FormatError(f"bad scale: {ln!r}") from exc
            current = None
        elif upper in ("Z:", "Q:", "MULTIPLIER:"):
            current = upper[:-1]
            sections[current] = []
        elif current is not None:
            sections[current].append(stripped)
        else:
            raise FormatError(f"content outside any section: {ln!r}")
    for required in ("Z", "Q"):
        if required not in sections:
            raise FormatError(f"missing section {required}:")
    z: list[Monomial] = []
    for ln in sections["Z"]:
        parts = ln.replace("|", " ").split()
        try:
            z.append(tuple(int(v) for v in parts))
        except ValueError as exc:
            raise FormatError(f"bad monomial line: {ln!r}") from exc
    qlines = sections["Q"]
    if not qlines:
        raise FormatError("empty Q section")
    try:
        dim = int(qlines[0])
    except ValueError as exc:
        raise FormatError(f"bad Q dimension line: {qlines[0]!r}") from exc
    if len(qlines) != dim + 1:
        raise FormatError(f"expected {dim} Q rows, got {len(qlines) - 1}")
    rows = []
    for ln in qlines[1:]:
        parts = ln.split()
        if len(parts) != dim:
            raise FormatError(f"bad Q row: {ln!r}")
        try:
            rows.append([Fraction(v) for v in parts])
        except (ValueError, ZeroDivisionError) as exc:
            raise FormatError(f"bad Q row: {ln!r}") from exc
    try:
        q = SymRationalMatrix(rows)
    except ValueError as exc:
        raise FormatError(str(exc)) from exc
    if "MULTIPLIER" in sections:
        multiplier = form_from_text("\n".join(sections["MULTIPLIER"]))
    else:
        if not z:
            raise FormatError("cannot infer multiplier variable count from empty basis")
        multiplier = unit_multiplier(len(z[0]))
    if scale is None:
        scale = Fraction(1)
    try:
        return SosCertificate(z, q, multiplier, scale)
    except ValueError as exc:
        raise FormatError(str(exc)) from exc


def builtin_certificate() -> SosCertificate:
    """The shipped 15x15 certificate for (x1^2+x2^2) times the b_thm22 form."""
    text = resources.files("sosconvex.data").joinpath("q22_cert.cert").read_text()
    return certificate_from_text(text)
