"""Face geometry of the cone of convex ternary quartics.

For zero points u1 = (e1, e2) and u2 = (e3, [a,b,1]) this module builds the
quartic basis q1..q5 and bilinear basis s1..s5, the 5x5 Gram matrix M with
s^T M s equal to the Hessian form of sum alpha_i q_i, the closed-form
determinant, the alpha5 bound, the kernel vector at the bound, and the
numeric additional-zero construction.

Note on normalization: h_{q_i} = 12 * s_i^2 for i <= 4 (the factor 12 comes
from fourth-power Hessians). The matrix M implemented here is the unique
exact Gram matrix over s1..s5 (verified symbolically); its last row/column
differs from a naive transcription by swapping c and 1/c, where c = a/b.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import mpmath

from . import linalg
from .biquadratic import BiquadraticForm, hessian_biquadratic, _monomials
from .certificates import LdltReport, SymRationalMatrix, gram_expand, ldlt_psd_check
from .forms import Form, as_frac, differentiate


@dataclass(frozen=True)
class FaceParams:
    a: Fraction
    b: Fraction

    def __post_init__(self):
        object.__setattr__(self, "a", as_frac(self.a))
        object.__setattr__(self, "b", as_frac(self.b))

    def require_nonzero(self) -> None:
        if self.a == 0 or self.b == 0:
            raise ValueError("both a and b must be nonzero for this operation")

    def require_not_both_zero(self) -> None:
        if self.a == 0 and self.b == 0:
            raise ValueError("a and b must not both be zero")


@dataclass
class BiquadPoint:
    """Floating-point zero of a Hessian form, with its residual at unit scale."""

    x: tuple[float, float, float]
    y: tuple[float, float, float]
    residual: float


def _alphas(alpha: Sequence) -> list[Fraction]:
    vals = [as_frac(v) for v in alpha]
    if len(vals) != 5:
        raise ValueError("expected five alpha values")
    return vals


def q_basis(fp: FaceParams) -> list[Form]:
    """q1..q5: a basis of the 5-dimensional space L_{a,b} when a, b != 0."""
    fp.require_not_both_zero()
    a, b = fp.a, fp.b
    x1, x2, x3 = (Form.variable(3, i) for i in (1, 2, 3))
    return [
        x1**4,
        x2**4,
        (x1 - x3.scale(a)) ** 4,
        (x2 - x3.scale(b)) ** 4,
        x3**2 * (x1.scale(b) - x2.scale(a)) ** 2,
    ]


def s_basis(fp: FaceParams) -> list[Form]:
    """Bilinear forms (in the 6 ambient variables) vanishing at u1 and u2."""
    fp.require_nonzero()
    a, b = fp.a, fp.b
    x1, x2, x3, y1, y2, y3 = (Form.variable(6, i) for i in range(1, 7))
    return [
        x1 * y1,
        x2 * y2,
        (x1 - x3.scale(a)) * (y1 - y3.scale(a)),
        (x2 - x3.scale(b)) * (y2 - y3.scale(b)),
        x3 * (y1.scale(b) - y2.scale(a)),
    ]


def _apolar_pairing_row(q: Form, quartic_monomials: list[tuple[int, ...]]) -> list[Fraction]:
    """Row of the functional g -> (differential operator of q applied to g)."""
    row = []
    for mono in quartic_monomials:
        fact = Fraction(math.factorial(mono[0]) * math.factorial(mono[1]) * math.factorial(mono[2]))
        row.append(q.coefficient(mono) * fact)
    return row


def l_ab_constraint_matrix(fp: FaceParams) -> list[list[Fraction]]:
    """The 12x15 system annihilating L_{a,b}.

    Rows are the degree-4 multiples of u~^2 v~ and v~^2 u~ for the two zero
    pairs, acting on quartics through the differential-operator pairing.
    """
    fp.require_not_both_zero()
    a, b = fp.a, fp.b
    x1, x2, x3 = (Form.variable(3, i) for i in (1, 2, 3))
    d = x1.scale(a) + x2.scale(b) + x3
    cubics = [x1 * x1 * x2, x2 * x2 * x1, x3 * x3 * d, d * d * x3]
    monos = _monomials(3, 4)
    rows = []
    for cubic in cubics:
        for mult in (x1, x2, x3):
            rows.append(_apolar_pairing_row(cubic * mult, monos))
    return rows


def l_ab_dimension(fp: FaceParams) -> tuple[int, int]:
    """Returns (dimension of L_{a,b}, rank of the constraint system)."""
    r = linalg.rank(l_ab_constraint_matrix(fp))
    return 15 - r, r


def gram_M(alpha: Sequence, fp: FaceParams) -> SymRationalMatrix:
    """The exact 5x5 Gram matrix: s^T M s = h_p for p = sum alpha_i q_i."""
    fp.require_nonzero()
    a1, a2, a3, a4, a5 = _alphas(alpha)
    c = fp.a / fp.b
    ci = 1 / c
    rows = [
        [12 * a1 + 2 * a5 * ci * ci, -2 * a5, -2 * a5 * ci * ci, 2 * a5, 2 * a5 * ci],
        [-2 * a5, 12 * a2 + 2 * a5 * c * c, 2 * a5, -2 * a5 * c * c, -2 * a5 * c],
        [-2 * a5 * ci * ci, 2 * a5, 12 * a3 + 2 * a5 * ci * ci, -2 * a5, -2 * a5 * ci],
        [2 * a5, -2 * a5 * c * c, -2 * a5, 12 * a4 + 2 * a5 * c * c, 2 * a5 * c],
        [2 * a5 * ci, -2 * a5 * c, -2 * a5 * ci, 2 * a5 * c, -4 * a5],
    ]
    return SymRationalMatrix(rows)


def face_form(alpha: Sequence, fp: FaceParams) -> Form:
    """p = sum alpha_i q_i."""
    vals = _alphas(alpha)
    acc = Form.zero(3, 4)
    for v, q in zip(vals, q_basis(fp)):
        acc = acc + q.scale(v)
    return acc


def _bound_denominator(alpha: Sequence[Fraction], fp: FaceParams) -> Fraction:
    a1, a2, a3, a4 = alpha[:4]
    a, b = fp.a, fp.b
    return b**4 / a1 + a**4 / a2 + b**4 / a3 + a**4 / a4


def det_M_closed(alpha: Sequence, fp: FaceParams) -> Fraction:
    """Closed-form determinant of M; equals the brute-force determinant."""
    fp.require_nonzero()
    vals = _alphas(alpha)
    a1, a2, a3, a4, a5 = vals
    if 0 in (a1, a2, a3, a4):
        raise ValueError("closed form requires alpha1..alpha4 nonzero")
    a, b = fp.a, fp.b
    inner = 4 * a**2 * b**2 + a5 * _bound_denominator(vals, fp)
    return Fraction(-20736) * a1 * a2 * a3 * a4 * a5 * inner / (a**2 * b**2)


def alpha5_lower_bound(alpha1_4: Sequence, fp: FaceParams) -> Fraction:
    """The smallest alpha5 keeping M PSD, for positive alpha1..alpha4."""
    fp.require_nonzero()
    vals = [as_frac(v) for v in alpha1_4]
    if len(vals) != 4:
        raise ValueError("expected four alpha values")
    if any(v <= 0 for v in vals):
        raise ValueError("alpha1..alpha4 must be positive")
    a, b = fp.a, fp.b
    return -4 * a**2 * b**2 / _bound_denominator(vals + [Fraction(0)], fp)


def membership_T(alpha: Sequence, fp: FaceParams) -> bool:
    """Membership in the face T_{a,b}.

    Requires alpha1..alpha4 >= 0 and lower_bound <= alpha5 <= 0; any zero
    among alpha1..alpha4 forces alpha5 = 0.
    """
    fp.require_nonzero()
    vals = _alphas(alpha)
    a1, a2, a3, a4, a5 = vals
    if any(v < 0 for v in (a1, a2, a3, a4)) or a5 > 0:
        return False
    if 0 in (a1, a2, a3, a4):
        return a5 == 0
    return a5 >= alpha5_lower_bound(vals[:4], fp)


def kernel_vector(alpha: Sequence, fp: FaceParams) -> list[Fraction]:
    """Spanning vector of the nullspace of M when alpha5 sits at the bound."""
    fp.require_nonzero()
    vals = _alphas(alpha)
    a1, a2, a3, a4, a5 = vals
    if any(v <= 0 for v in (a1, a2, a3, a4)):
        raise ValueError("alpha1..alpha4 must be positive")
    if a5 != alpha5_lower_bound(vals[:4], fp):
        raise ValueError("alpha5 is not at the lower bound")
    a, b = fp.a, fp.b
    return [
        2 * a * b**3 / a1,
        -2 * a**3 * b / a2,
        -2 * a * b**3 / a3,
        2 * a**3 * b / a4,
        _bound_denominator(vals, fp),
    ]


class DegenerateZeroSearch(RuntimeError):
    """Raised when every dehomogenization hits a degenerate division."""


def additional_zero_quadratic(alpha: Sequence, fp: FaceParams) -> tuple[Fraction, Fraction, Fraction]:
    """Coefficients (A, B, C) of the quadratic A x1^2 + B x1 x2 + C x2^2 = 0
    whose roots give the extra zero of h_p at the alpha5 bound.

    Derived by eliminating y1, y2, y3, x3 from the system s_i = v_i.
    """
    fp.require_nonzero()
    vals = _alphas(alpha)
    v = kernel_vector(vals, fp)
    a, b = fp.a, fp.b
    v1, v2, v3, v4, v5 = v
    k = v5 + a * b * ((v3 - v1) / (a * a) - (v4 - v2) / (b * b))
    # (b v1 x2 - a v5 x2 - a v2 x1)(a v1 x2 - (b v1 + a k) x1)
    #   = v3 (b v1 x2 - a v2 x1)(a x2 - b x1), collected in x1, x2
    p1, q1 = -a * v2, (b * v1 - a * v5)   # p1 x1 + q1 x2
    p2, q2 = -(b * v1 + a * k), a * v1
    p3, q3 = -a * v2, b * v1
    p4, q4 = -b, a
    aa = p1 * p2 - v3 * p3 * p4
    bb = p1 * q2 + q1 * p2 - v3 * (p3 * q4 + q3 * p4)
    cc = q1 * q2 - v3 * q3 * q4
    return aa, bb, cc


def _solve_point(alpha, fp, x1, x2, exact: bool):
    """Recover the remaining coordinates from x1, x2; None on degeneracy."""
    vals = _alphas(alpha)
    v1, v2, v3, v4, v5 = kernel_vector(vals, fp)
    a, b = fp.a, fp.b
    if exact:
        a_, b_ = a, b
        v1_, v2_, v5_ = v1, v2, v5
        k = v5 + a * b * ((v3 - v1) / (a * a) - (v4 - v2) / (b * b))
    else:
        a_, b_ = mpmath.mpf(a.numerator) / a.denominator, mpmath.mpf(b.numerator) / b.denominator
        tofl = lambda q: mpmath.mpf(q.numerator) / q.denominator
        v1_, v2_, v5_ = tofl(v1), tofl(v2), tofl(v5)
        k = tofl(v5 + a * b * ((v3 - v1) / (a * a) - (v4 - v2) / (b * b)))
    if x1 == 0 or x2 == 0:
        return None
    den_x3 = b_ * v1_ * x2 - a_ * v2_ * x1
    den_y3 = a_ * x2 - b_ * x1
    if den_x3 == 0 or den_y3 == 0:
        return None
    x3 = v5_ * x1 * x2 / den_x3
    y1 = v1_ / x1
    y2 = v2_ / x2
    y3 = k / den_y3
    return (x1, x2, x3), (y1, y2, y3)


def find_additional_zero(
    alpha: Sequence, fp: FaceParams, tol: float = 1e-9, dps: int = 30
) -> BiquadPoint:
    """Additional zero of h_p (alpha5 at the bound) with x1, x2, y1, y2 != 0.

    The quadratic's discriminant is checked positive exactly; the returned
    point is floating (precision dps), normalized so x and y have unit length,
    with |h_p| at that point as the residual.
    """
    fp.require_nonzero()
    vals = _alphas(alpha)
    aa, bb, cc = additional_zero_quadratic(vals, fp)
    p = face_form(vals, fp)
    hp = hessian_biquadratic(p)

    candidates = []
    with mpmath.workdps(dps):
        if aa == 0 and bb == 0 and cc == 0:
            # The quadratic degenerates to the whole line: any generic x1
            # gives an exact rational zero.
            for x1 in (Fraction(2), Fraction(3), Fraction(1, 2), Fraction(5), Fraction(7, 3)):
                pt = _solve_point(vals, fp, x1, Fraction(1), exact=True)
                if pt is not None:
                    xr, yr = pt
                    if hp.evaluate(xr, yr) == 0 and 0 not in (xr[0], xr[1], yr[0], yr[1]):
                        candidates.append((tuple(map(Fraction, xr)), tuple(map(Fraction, yr))))
                        break
            if not candidates:
                raise DegenerateZeroSearch("no nondegenerate rational point found")
        else:
            disc = bb * bb - 4 * aa * cc
            if aa != 0 and disc <= 0:
                raise RuntimeError(
                    f"quadratic discriminant {disc} is not positive; "
                    "this contradicts the positivity argument and signals a bug"
                )
            tofl = lambda q: mpmath.mpf(q.numerator) / q.denominator
            if aa == 0:
                roots = [(-tofl(cc) / tofl(bb), mpmath.mpf(1))]
            else:
                sq = mpmath.sqrt(tofl(disc))
                roots = [
                    ((-tofl(bb) + sq) / (2 * tofl(aa)), mpmath.mpf(1)),
                    ((-tofl(bb) - sq) / (2 * tofl(aa)), mpmath.mpf(1)),
                ]
                # retry with x1 = 1 if both x2-normalized roots degenerate
                roots += [
                    (mpmath.mpf(1), (-tofl(bb) + sq) / (2 * tofl(cc))) if cc != 0 else None,
                    (mpmath.mpf(1), (-tofl(bb) - sq) / (2 * tofl(cc))) if cc != 0 else None,
                ]
                roots = [r for r in roots if r is not None]
            for x1, x2 in roots:
                pt = _solve_point(vals, fp, x1, x2, exact=False)
                if pt is not None:
                    candidates.append(pt)
            if not candidates:
                raise DegenerateZeroSearch(
                    "every root hit a degenerate division (a x2 - b x1 = 0 or worse)"
                )

        best = None
        for xr, yr in candidates:
            xf = [mpmath.mpf(str(v)) if isinstance(v, Fraction) else v for v in xr]
            yf = [mpmath.mpf(str(v)) if isinstance(v, Fraction) else v for v in yr]
            xf = [mpmath.mpf(v.numerator) / v.denominator if isinstance(v, Fraction) else v for v in xr]
            yf = [mpmath.mpf(v.numerator) / v.denominator if isinstance(v, Fraction) else v for v in yr]
            nx = mpmath.sqrt(sum(v * v for v in xf))
            ny = mpmath.sqrt(sum(v * v for v in yf))
            xf = [v / nx for v in xf]
            yf = [v / ny for v in yf]
            res = abs(hp.evaluate(xf, yf))
            if best is None or res < best[2]:
                best = (xf, yf, res)
        xf, yf, res = best
        point = BiquadPoint(
            tuple(float(v) for v in xf), tuple(float(v) for v in yf), float(res)
        )
    if point.residual > tol:
        raise RuntimeError(f"residual {point.residual} exceeds tolerance {tol}")
    if 0.0 in (point.x[0], point.x[1], point.y[0], point.y[1]):
        raise RuntimeError("zero has a vanishing x1, x2, y1 or y2 coordinate")
    return point


def tangent_hessian_check(
    b: BiquadraticForm, x0: Sequence, y0: Sequence
) -> tuple[SymRationalMatrix, LdltReport]:
    """Second-derivative matrix of (x, y) -> b(x, y) at a rational zero,
    restricted to the tangent space of the bi-sphere at (x0, y0)."""
    x0 = [as_frac(v) for v in x0]
    y0 = [as_frac(v) for v in y0]
    if b.evaluate(x0, y0) != 0:
        raise ValueError("the form does not vanish at the given point")
    n = b.n
    f = b.to_form()
    point = x0 + y0
    hess = [[Fraction(0)] * (2 * n) for _ in range(2 * n)]
    for i in range(1, 2 * n + 1):
        di = differentiate(f, i)
        for j in range(i, 2 * n + 1):
            val = as_frac(differentiate(di, j).evaluate(point))
            hess[i - 1][j - 1] = val
            hess[j - 1][i - 1] = val
    basis = _orthogonal_basis(x0) + [[Fraction(0)] * n + v for v in _orthogonal_basis(y0)]
    basis = [v + [Fraction(0)] * n if len(v) == n else v for v in basis]
    bt = [[Fraction(0)] * 4 for _ in range(2 * n)]
    for c, v in enumerate(basis):
        for r in range(2 * n):
            bt[r][c] = v[r]
    restricted = linalg.mat_mul(list(map(list, zip(*bt))), linalg.mat_mul(hess, bt))
    mat = SymRationalMatrix(restricted)
    return mat, ldlt_psd_check(mat)


def _orthogonal_basis(c: list[Fraction]) -> list[list[Fraction]]:
    """Rational basis of {v : v.c = 0}, drop-largest-coordinate pivoting."""
    if all(v == 0 for v in c):
        raise ValueError("point must be nonzero")
    n = len(c)
    pivot = max(range(n), key=lambda i: (abs(c[i]), -i))
    basis = []
    for j in range(n):
        if j == pivot:
            continue
        v = [Fraction(0)] * n
        v[j] = Fraction(1)
        v[pivot] = -c[j] / c[pivot]
        basis.append(v)
    return basis


@dataclass
class WitnessEvaluation:
    point_label: str
    q_index: int
    value: Fraction | float
    exact: bool


def witness_evaluations(fp: FaceParams) -> list[WitnessEvaluation]:
    """Evaluations of h_{q_i} at the sign-pinning witness points.

    v1 = ([0,b,1],[a,0,1]) and v3 = ([a,b,1],[1,0,1]) are rational and
    evaluated exactly; v2 = ([0,(2+sqrt3)b,1],[a,0,1]) is floating point.
    """
    fp.require_nonzero()
    a, b = fp.a, fp.b
    qs = q_basis(fp)
    hqs = [hessian_biquadratic(q) for q in qs]
    out: list[WitnessEvaluation] = []
    v1x, v1y = [Fraction(0), b, Fraction(1)], [a, Fraction(0), Fraction(1)]
    v3x, v3y = [a, b, Fraction(1)], [Fraction(1), Fraction(0), Fraction(1)]
    for idx, hq in enumerate(hqs, start=1):
        out.append(WitnessEvaluation("v1", idx, hq.evaluate(v1x, v1y), True))
    s3 = math.sqrt(3.0)
    v2x = [0.0, (2.0 + s3) * float(b), 1.0]
    v2y = [float(a), 0.0, 1.0]
    for idx, hq in enumerate(hqs, start=1):
        out.append(WitnessEvaluation("v2", idx, float(hq.evaluate(v2x, v2y)), False))
    for idx, hq in enumerate(hqs, start=1):
        out.append(WitnessEvaluation("v3", idx, hq.evaluate(v3x, v3y), True))
    return out


def gram_identity_holds(alpha: Sequence, fp: FaceParams) -> bool:
    """Exact check that s^T M s equals the Hessian form of sum alpha_i q_i."""
    vals = _alphas(alpha)
    m = gram_M(vals, fp)
    s = s_basis(fp)
    acc = Form.zero(6, 4)
    for i in range(5):
        for j in range(5):
            if m.rows[i][j] != 0:
                acc = acc + (s[i] * s[j]).scale(m.rows[i][j])
    hp = hessian_biquadratic(face_form(vals, fp)).to_form()
    return acc == hp
