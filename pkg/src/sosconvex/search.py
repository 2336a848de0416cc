"""Numeric SOS feasibility search with exact rational certification.

The pipeline parameterizes the affine fiber of Gram matrices for a target,
runs alternating projections between the PSD cone and the fiber, rounds the
result back to exact rationals (with facial reduction when the solution is
singular), and accepts only certificates that pass the exact verifiers.
Refutations are likewise sound-only: a stalled search never claims "not SOS"
without an exactly verified dual certificate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import linalg
from .biquadratic import BiquadraticForm, canonical_ordering, coefficient_vector, hessian_biquadratic
from .certificates import (
    Monomial,
    SosCertificate,
    SymRationalMatrix,
    Verdict,
    gram_expand,
    ldlt_psd_check,
    unit_multiplier,
    verify_sos_certificate,
)
from .dual import DualCertificate, bilinear_basis, builtin_dual, verify_refutation
from .forms import Form, as_frac


@dataclass
class GramParameterization:
    """Exact affine fiber {base + sum t_i kernel_i} of Gram matrices over z."""

    z: list[Monomial]
    base: SymRationalMatrix
    kernel: list[SymRationalMatrix]


@dataclass
class SearchConfig:
    max_iterations: int = 10_000
    convergence_tol: float = 1e-8
    denominator_bound: int = 2**16
    restarts: int = 3
    seed: int = 0

    def __post_init__(self):
        if (
            self.max_iterations <= 0
            or self.convergence_tol <= 0
            or self.denominator_bound <= 0
            or self.restarts <= 0
        ):
            raise ValueError("all search configuration values must be positive")


@dataclass
class StallReport:
    iterations: int
    min_eigenvalue: float
    fiber_distance: float
    direction: np.ndarray  # fiber point minus its PSD projection
    fiber_point: np.ndarray | None = None
    stagnated: bool = False  # progress fell below 1% per window: geometry gap
    state: np.ndarray | None = None  # governing iterate, for warm continuation


@dataclass
class RoundingFailure:
    reason: str
    failure_index: int | None = None
    pivot: Fraction | None = None

    def __bool__(self) -> bool:
        return False


@dataclass
class SearchOutcome:
    status: str  # ExactCertificate | NumericFeasible | Refuted | Stalled
    certificate: SosCertificate | None = None
    dual: DualCertificate | None = None
    residual: float | None = None
    diagnostics: str = ""

    def is_certified(self) -> bool:
        return self.status == "ExactCertificate"


def _target_form(target) -> Form:
    if isinstance(target, BiquadraticForm):
        return target.to_form()
    if isinstance(target, Form):
        return target
    raise TypeError("target must be a Form or BiquadraticForm")


def _pairs(dim: int) -> list[tuple[int, int]]:
    return [(r, s) for r in range(dim) for s in range(r, dim)]


def _matrix_from_pair_values(dim: int, values: Sequence[Fraction]) -> SymRationalMatrix:
    rows = [[Fraction(0)] * dim for _ in range(dim)]
    for (r, s), v in zip(_pairs(dim), values):
        rows[r][s] = v
        rows[s][r] = v
    return SymRationalMatrix(rows)


def parameterize(target, z: Sequence[Monomial]) -> GramParameterization:
    """Exact base point and kernel basis of the Gram fiber of the target."""
    tf = _target_form(target)
    z = [tuple(m) for m in z]
    if not z:
        raise ValueError("empty monomial basis")
    if any(len(m) != tf.n_vars for m in z):
        raise ValueError("basis and target variable counts disagree")
    pairs = _pairs(len(z))
    products: dict[Monomial, list[tuple[int, Fraction]]] = {}
    for idx, (r, s) in enumerate(pairs):
        mono = tuple(a + b for a, b in zip(z[r], z[s]))
        weight = Fraction(1 if r == s else 2)
        products.setdefault(mono, []).append((idx, weight))
    for mono in tf.terms:
        if mono not in products:
            raise ValueError(f"target monomial {mono} is not representable over the basis")
    rows_monos = sorted(products)
    a = [[Fraction(0)] * len(pairs) for _ in rows_monos]
    rhs = []
    for ri, mono in enumerate(rows_monos):
        for idx, w in products[mono]:
            a[ri][idx] = w
        rhs.append(tf.terms.get(mono, Fraction(0)))
    particular, null = linalg.solve_affine(a, rhs)
    if particular is None:
        raise ValueError("target is not representable over the basis")
    base = _matrix_from_pair_values(len(z), particular)
    kernel = [_matrix_from_pair_values(len(z), vec) for vec in null]
    return GramParameterization(list(z), base, kernel)


# -- numeric linear algebra ------------------------------------------------------


def jacobi_eigendecomposition(s, tol: float = 1e-12) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi rotations; returns (eigenvalues ascending, column eigenvectors)."""
    a = np.array(s, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("input must be a square matrix")
    if not np.allclose(a, a.T, atol=max(tol, 1e-12) * max(1.0, np.abs(a).max())):
        raise ValueError("input matrix is not symmetric")
    a = (a + a.T) / 2.0
    n = a.shape[0]
    v = np.eye(n)
    for _ in range(100):
        off = math.sqrt(max(0.0, (a * a).sum() - (np.diag(a) ** 2).sum()))
        if off <= tol:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= tol / (n * n + 1):
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(1.0, theta))
                c = 1.0 / math.hypot(1.0, t)
                sn = t * c
                # in-place Givens update of rows/columns p and q
                row_p, row_q = a[p].copy(), a[q].copy()
                a[p] = c * row_p - sn * row_q
                a[q] = sn * row_p + c * row_q
                col_p, col_q = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * col_p - sn * col_q
                a[:, q] = sn * col_p + c * col_q
                a[p, q] = a[q, p] = 0.0
                vcol_p, vcol_q = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vcol_p - sn * vcol_q
                v[:, q] = sn * vcol_p + c * vcol_q
    order = np.argsort(np.diag(a))
    return np.diag(a)[order].copy(), v[:, order].copy()


def _flatten(m: np.ndarray) -> np.ndarray:
    """Isometric vectorization of a symmetric matrix (off-diagonals * sqrt 2)."""
    n = m.shape[0]
    out = []
    for r in range(n):
        out.append(m[r, r])
        for s in range(r + 1, n):
            out.append(m[r, s] * math.sqrt(2.0))
    return np.array(out)


def _float_matrix(m: SymRationalMatrix) -> np.ndarray:
    return np.array([[float(v) for v in row] for row in m.rows])


def _project_psd(x: np.ndarray) -> tuple[np.ndarray, float]:
    # LAPACK eigendecomposition in the hot loop; jacobi_eigendecomposition is
    # the reference implementation and they agree to working precision
    vals, vecs = np.linalg.eigh((x + x.T) / 2.0)
    clipped = np.clip(vals, 0.0, None)
    return (vecs * clipped) @ vecs.T, float(vals[0])


class _FiberGeometry:
    """Float scaffolding shared by projection runs on one parameterization."""

    def __init__(self, pz: GramParameterization):
        self.g0 = _float_matrix(pz.base)
        self.kernels = [_float_matrix(k) for k in pz.kernel]
        self.dim = pz.base.dim
        self.g0_vec = _flatten(self.g0)
        if self.kernels:
            k_mat = np.stack([_flatten(k) for k in self.kernels], axis=1)
            self.q_basis, _ = np.linalg.qr(k_mat)
        else:
            self.q_basis = np.zeros((self.g0_vec.size, 0))

    def unflatten(self, vec: np.ndarray) -> np.ndarray:
        out = np.zeros((self.dim, self.dim))
        idx = 0
        for r in range(self.dim):
            out[r, r] = vec[idx]
            idx += 1
            for s in range(r + 1, self.dim):
                out[r, s] = out[s, r] = vec[idx] / math.sqrt(2.0)
                idx += 1
        return out

    def project_fiber(self, mat: np.ndarray) -> np.ndarray:
        delta = _flatten(mat) - self.g0_vec
        return self.unflatten(self.g0_vec + self.q_basis @ (self.q_basis.T @ delta))


def _projection_run(
    geo: _FiberGeometry, x0: np.ndarray, max_iterations: int, tol: float
):
    """One projection run from x0; (fiber matrix, info) or StallReport.

    Douglas-Rachford reflections between the PSD cone and the affine fiber;
    the monitored iterate is the shadow sequence P_fiber(P_psd(x)), which
    converges to a feasible point when one exists and whose residual
    stagnates at the gap when none does.
    """
    x = x0
    shadow = x0
    shadow_eig = -math.inf
    fiber_dist = math.inf
    it = 0
    best_progress = math.inf
    window_best = math.inf
    flat_windows = 0
    stagnated = False
    for it in range(max_iterations):
        y, _ = _project_psd(x)
        shadow = geo.project_fiber(y)
        fiber_dist = float(np.abs(shadow - y).max())
        shadow_eig = float(np.linalg.eigvalsh((shadow + shadow.T) / 2.0)[0])
        if shadow_eig >= -tol and fiber_dist <= tol:
            return shadow, {
                "iterations": it + 1,
                "min_eigenvalue": shadow_eig,
                "fiber_distance": fiber_dist,
            }
        x = x + geo.project_fiber(2.0 * y - x) - y
        # the iteration is non-monotone and plateaus before snapping to the
        # answer, so stagnation needs both a running best and patience
        best_progress = min(best_progress, max(fiber_dist, max(-shadow_eig, 0.0)))
        if (it + 1) % 200 == 0:
            if best_progress >= 0.99 * window_best:
                flat_windows += 1
                if flat_windows >= 5:
                    stagnated = True
                    break
            else:
                flat_windows = 0
            window_best = best_progress
    return StallReport(
        it + 1, shadow_eig, fiber_dist, shadow - _project_psd(shadow)[0],
        fiber_point=shadow, stagnated=stagnated, state=x,
    )


def alternating_projection_solve(pz: GramParameterization, cfg: SearchConfig):
    """Alternate PSD-cone and affine-fiber projections.

    Returns (matrix, info dict) on success; a StallReport otherwise. The
    returned matrix lies on the fiber with min eigenvalue >= -tol.
    """
    geo = _FiberGeometry(pz)
    rng = np.random.default_rng(cfg.seed)
    best_stall = None
    for restart in range(cfg.restarts):
        x = geo.g0.copy()
        if restart > 0 and geo.kernels:
            coeffs = rng.standard_normal(len(geo.kernels))
            x = x + sum(c * k for c, k in zip(coeffs, geo.kernels))
        result = _projection_run(geo, x, cfg.max_iterations, cfg.convergence_tol)
        if not isinstance(result, StallReport):
            result[1]["restart"] = restart
            return result
        if best_stall is None or result.fiber_distance < best_stall.fiber_distance:
            best_stall = result
    return best_stall


# -- exact rounding --------------------------------------------------------------


def _fiber_coordinates(g: np.ndarray, pz: GramParameterization) -> np.ndarray:
    if not pz.kernel:
        return np.zeros(0)
    k_mat = np.stack([_flatten(_float_matrix(k)) for k in pz.kernel], axis=1)
    rhs = _flatten(g) - _flatten(_float_matrix(pz.base))
    t, *_ = np.linalg.lstsq(k_mat, rhs, rcond=None)
    return t


def _reconstruct(pz: GramParameterization, t: Sequence[Fraction]) -> SymRationalMatrix:
    acc = pz.base
    for ti, k in zip(t, pz.kernel):
        if ti != 0:
            acc = acc + k.scale(ti)
    return acc


def _facial_reduction(pz: GramParameterization, g: np.ndarray, kernel_tol: float = 1e-6):
    """Restrict the fiber to matrices annihilating the numeric near-kernel of g.

    The near-kernel eigenvectors are row-reduced numerically and rounded
    entrywise to rationals over a ladder of denominator bounds; inconsistent
    guesses are dropped rather than corrupting the fiber. Returns the list of
    distinct consistent reductions (possibly empty).
    """
    vals, vecs = jacobi_eigendecomposition(g)
    null_cols = [i for i, v in enumerate(vals) if abs(v) <= kernel_tol]
    if not null_cols:
        return []
    rows = [list(vecs[:, i]) for i in null_cols]
    # numeric RREF with pivot normalization, then entrywise rationalization
    mat = np.array(rows)
    r = 0
    for c in range(mat.shape[1]):
        piv = np.argmax(np.abs(mat[r:, c])) + r
        if abs(mat[piv, c]) < 1e-8:
            continue
        mat[[r, piv]] = mat[[piv, r]]
        mat[r] = mat[r] / mat[r, c]
        for i in range(mat.shape[0]):
            if i != r:
                mat[i] = mat[i] - mat[i, c] * mat[r]
        r += 1
        if r == mat.shape[0]:
            break
    reductions = []
    n_t = len(pz.kernel)
    for den_bound in (12, 100, 10**4, 10**6):
        exact_vecs = [
            [Fraction(float(v)).limit_denominator(den_bound) for v in mat[i]] for i in range(r)
        ]
        # constraints: (base + sum t_i K_i) v = 0 for every exact kernel vector v
        rows_a: list[list[Fraction]] = []
        rhs: list[Fraction] = []
        for v in exact_vecs:
            base_v = pz.base.mat_vec(v)
            k_vs = [k.mat_vec(v) for k in pz.kernel]
            for comp in range(pz.base.dim):
                rows_a.append([k_vs[i][comp] for i in range(n_t)])
                rhs.append(-base_v[comp])
        particular, null = linalg.solve_affine(rows_a, rhs)
        if particular is None:
            continue
        new_base = _reconstruct(pz, particular)
        new_kernel = []
        for direction in null:
            acc = None
            for ci, k in zip(direction, pz.kernel):
                if ci == 0:
                    continue
                term = k.scale(ci)
                acc = term if acc is None else acc + term
            if acc is not None:
                new_kernel.append(acc)
        reduction = GramParameterization(pz.z, new_base, new_kernel)
        if not any(red.base == reduction.base and len(red.kernel) == len(reduction.kernel)
                   for red in reductions):
            reductions.append(reduction)
    return reductions


def rationalize_and_certify(
    g: np.ndarray,
    pz: GramParameterization,
    cfg: SearchConfig,
    multiplier: Form | None = None,
    scale: Fraction = Fraction(1),
):
    """Round a numeric fiber point to an exact PSD Gram matrix.

    Tries continued-fraction rounding with the configured denominator bound,
    doubling it on failure; if plain rounding never yields a PSD matrix, a
    facial-reduction pass constrains the fiber to the numeric kernel and
    retries. Returns a SosCertificate or a RoundingFailure.
    """
    if multiplier is None:
        multiplier = unit_multiplier(len(pz.z[0]))
    last_report = None

    def try_round(space: GramParameterization):
        nonlocal last_report
        t = _fiber_coordinates(g, space)
        # simplest denominators first: near-feasible points with noisy low
        # digits still snap to the (typically simple) exact solution
        bounds = [2, 16, 256, 4096]
        bound = cfg.denominator_bound
        for _ in range(6):
            bounds.append(bound)
            bound *= 2
        seen = set()
        for b in bounds:
            t_exact = tuple(Fraction(float(v)).limit_denominator(b) for v in t)
            if t_exact in seen:
                continue
            seen.add(t_exact)
            candidate = _reconstruct(space, t_exact)
            report = ldlt_psd_check(candidate)
            last_report = report
            if report.is_psd():
                return SosCertificate(list(space.z), candidate, multiplier, scale)
        return None

    cert = try_round(pz)
    if cert is None:
        for reduced in _facial_reduction(pz, g):
            cert = try_round(reduced)
            if cert is not None:
                break
    if cert is None:
        return RoundingFailure(
            "no rounded fiber point passed the PSD check",
            failure_index=last_report.failure_index if last_report else None,
            pivot=last_report.pivots[-1] if last_report and last_report.pivots else None,
        )
    return cert


# -- dual search -----------------------------------------------------------------


def refutation_search(target: BiquadraticForm, cfg: SearchConfig) -> DualCertificate | None:
    """Best-effort search for an exactly verified dual refutation.

    Alternates PSD projection with projection onto the affine set of
    moment-structured matrices normalized to pairing -1; the rounded
    functional is accepted only if verify_refutation passes. Falls back to
    the shipped functional when the target is the shipped form. Returns None
    when no sound certificate is found.
    """
    if not isinstance(target, BiquadraticForm):
        raise TypeError("refutation search operates on biquadratic forms")
    fallback = _refutation_fallback(target)
    if fallback is not None:
        return fallback
    n = target.n
    ordering = canonical_ordering(n)
    bvec = coefficient_vector(target, ordering)
    basis = bilinear_basis(n)
    m = len(basis)
    nc = len(ordering)

    # flatten(M(c)) is linear in c; build the map column by column
    flat_len = m * (m + 1) // 2
    l_map = np.zeros((flat_len, nc))
    idx = 0
    for r in range(m):
        i, j = basis[r]
        for s in range(r, m):
            k, l = basis[s]
            col = ordering.index(i, k, j, l)
            l_map[idx, col] += 1.0 if r == s else math.sqrt(2.0)
            idx += 1
    a_vec = np.array([float(v) for v in bvec])

    # KKT system for min ||L c - y||^2 subject to a.c = -1
    lt_l = l_map.T @ l_map
    kkt = np.zeros((nc + 1, nc + 1))
    kkt[:nc, :nc] = lt_l
    kkt[:nc, nc] = a_vec
    kkt[nc, :nc] = a_vec
    try:
        kkt_inv = np.linalg.inv(kkt)
    except np.linalg.LinAlgError:
        return _refutation_fallback(target)

    def project_affine(y_flat: np.ndarray) -> np.ndarray:
        rhs = np.concatenate([l_map.T @ y_flat, [-1.0]])
        sol = kkt_inv @ rhs
        return sol[:nc]

    def unflatten(vec: np.ndarray) -> np.ndarray:
        out = np.zeros((m, m))
        pos = 0
        for r in range(m):
            out[r, r] = vec[pos]
            pos += 1
            for s in range(r + 1, m):
                out[r, s] = out[s, r] = vec[pos] / math.sqrt(2.0)
                pos += 1
        return out

    rng = np.random.default_rng(cfg.seed)
    for restart in range(cfg.restarts):
        c = project_affine(np.zeros(flat_len) if restart == 0 else rng.standard_normal(flat_len))
        converged = False
        window_delta = math.inf
        for it in range(min(cfg.max_iterations, 2000)):
            moment = unflatten(l_map @ c)
            psd, min_eig = _project_psd(moment)
            c_new = project_affine(_flatten(psd))
            delta = float(np.abs(c_new - c).max())
            c = c_new
            if min_eig >= -cfg.convergence_tol and delta <= cfg.convergence_tol:
                converged = True
                break
            if (it + 1) % 200 == 0:
                if delta >= 0.99 * window_delta:
                    break
                window_delta = delta
        if not converged:
            continue
        bound = cfg.denominator_bound
        for _ in range(6):
            c_exact = [Fraction(float(v)).limit_denominator(bound) for v in c]
            cand = DualCertificate(ordering, c_exact)
            if verify_refutation(cand, target):
                return cand
            bound *= 2
    return None


def _refutation_fallback(target: BiquadraticForm) -> DualCertificate | None:
    if target.n == 3:
        builtin = builtin_dual()
        if verify_refutation(builtin, target):
            return builtin
    return None


# -- end-to-end checks -------------------------------------------------------------


def _prune_basis(z: list[Monomial], tf: Form) -> list[Monomial]:
    """Drop z monomials whose squared monomial cannot appear in any Gram.

    If the target coefficient of 2m is zero and no cross product z_r z_s
    (r != s) reaches 2m, then Q[m,m] = 0 in every Gram and PSD forces the
    whole row to vanish; iterate to a fixed point.
    """
    z = list(z)
    changed = True
    while changed:
        changed = False
        for m in list(z):
            sq = tuple(2 * e for e in m)
            if tf.terms.get(sq, Fraction(0)) != 0:
                continue
            reachable = any(
                tuple(a + b for a, b in zip(z[r], z[s])) == sq
                for r in range(len(z))
                for s in range(r + 1, len(z))
            )
            if not reachable:
                z.remove(m)
                changed = True
    return z


def sos_basis_for(tf: Form) -> list[Monomial]:
    """All half-degree monomials of a form of even degree, before pruning."""
    if tf.degree % 2 != 0:
        raise ValueError("only even-degree forms can be sums of squares")
    from .biquadratic import _monomials

    return _monomials(tf.n_vars, tf.degree // 2)


def bidegree_basis(n: int, dx: int, dy: int) -> list[Monomial]:
    """Monomials of x-degree dx and y-degree dy over 2n split variables."""
    from .biquadratic import _monomials

    return [
        xm + ym for xm in _monomials(n, dx) for ym in _monomials(n, dy)
    ]


def _biquadratic_basis(n: int, search_form: Form) -> list[Monomial]:
    """Half-bidegree monomial basis for a biquadratic (times multiplier) target."""
    dx = dy = None
    for mono in search_form.terms:
        mx, my = sum(mono[:n]), sum(mono[n:])
        if dx is None:
            dx, dy = mx, my
        elif (mx, my) != (dx, dy):
            return sos_basis_for(search_form)
    if dx is None or dx % 2 or dy % 2:
        return sos_basis_for(search_form)
    return bidegree_basis(n, dx // 2, dy // 2)


def check_sos(
    target,
    cfg: SearchConfig | None = None,
    multiplier: Form | None = None,
    z: Sequence[Monomial] | None = None,
) -> SearchOutcome:
    """Full SOS pipeline: parameterize, search, round, verify exactly.

    With a multiplier the certificate attests multiplier * target SOS, which
    proves target nonnegative when the multiplier is a sum of even powers.
    """
    cfg = cfg or SearchConfig()
    tf = _target_form(target)
    search_form = tf if multiplier is None else multiplier * tf
    if z is None:
        if isinstance(target, BiquadraticForm):
            z = _biquadratic_basis(target.n, search_form)
        else:
            z = sos_basis_for(search_form)
    z = _prune_basis([tuple(m) for m in z], search_form)
    if not z:
        return SearchOutcome("Stalled", diagnostics="empty basis after pruning")
    try:
        pz = parameterize(search_form, z)
    except ValueError as exc:
        return SearchOutcome("Stalled", diagnostics=f"parameterization failed: {exc}")

    def attempt(g_num, residual):
        cert = rationalize_and_certify(g_num, pz, cfg, multiplier=multiplier)
        if isinstance(cert, RoundingFailure):
            return None, cert.reason
        check = verify_sos_certificate(tf, cert)
        if not check:
            return None, check.reason
        # the certified Gram matrix lies exactly on the fiber and is exactly
        # PSD; report its own numeric residual, not the rougher search point's
        eigs = np.linalg.eigvalsh(_float_matrix(cert.q))
        residual = max(0.0, -float(eigs[0]))
        return SearchOutcome("ExactCertificate", certificate=cert, residual=residual), None

    # Staged search: run in growing iteration chunks and attempt exact
    # rounding at each stage. Early acceptances are gated by the exact
    # verifier, so they are sound even when the numeric point is rough.
    geo = _FiberGeometry(pz)
    rng = np.random.default_rng(cfg.seed)
    last_stall = None
    last_reason = ""
    for restart in range(cfg.restarts):
        x = geo.g0.copy()
        if restart > 0 and geo.kernels:
            coeffs = rng.standard_normal(len(geo.kernels))
            x = x + sum(c * k for c, k in zip(coeffs, geo.kernels))
        used = 0
        chunk = 200
        while used < cfg.max_iterations:
            budget = min(chunk, cfg.max_iterations - used)
            result = _projection_run(geo, x, budget, cfg.convergence_tol)
            if not isinstance(result, StallReport):
                g, info = result
                residual = max(max(-info["min_eigenvalue"], 0.0), info["fiber_distance"])
                outcome, reason = attempt(g, residual)
                if outcome is not None:
                    return outcome
                return SearchOutcome(
                    "NumericFeasible",
                    residual=residual,
                    diagnostics=f"feasible numerically but rounding failed: {reason}",
                )
            used += result.iterations
            last_stall = result
            x = result.state if result.state is not None else result.fiber_point
            residual = max(max(-result.min_eigenvalue, 0.0), result.fiber_distance)
            if residual <= 1e-4 and result.fiber_point is not None:
                outcome, last_reason = attempt(result.fiber_point, residual)
                if outcome is not None:
                    return outcome
            if result.stagnated:
                break
            chunk *= 2

    dual = None
    if isinstance(target, BiquadraticForm) and multiplier is None:
        dual = refutation_search(target, cfg)
    if dual is not None:
        return SearchOutcome("Refuted", dual=dual)
    residual = None
    diagnostics = "search stalled"
    if last_stall is not None:
        residual = max(max(-last_stall.min_eigenvalue, 0.0), last_stall.fiber_distance)
        diagnostics = (
            f"stalled with min eigenvalue {last_stall.min_eigenvalue:.3e}, "
            f"fiber distance {last_stall.fiber_distance:.3e}"
        )
        if last_reason:
            diagnostics += f"; last rounding failure: {last_reason}"
    return SearchOutcome("Stalled", residual=residual, diagnostics=diagnostics)


def check_sos_convexity(p: Form, cfg: SearchConfig | None = None) -> SearchOutcome:
    """Decide sos-convexity of an even-degree form, certificates exact.

    ExactCertificate means y^T H_p(x) y is SOS, so p is convex; Refuted means
    the Hessian form is not SOS, so p is not sos-convex (it may still be
    convex); Stalled decides nothing.
    """
    cfg = cfg or SearchConfig()
    if p.degree % 2 != 0:
        raise ValueError("sos-convexity requires even degree")
    if p.degree == 4:
        h = hessian_biquadratic(p)
        return check_sos(h, cfg)
    from .biquadratic import hessian_form

    hf = hessian_form(p)
    z = bidegree_basis(p.n_vars, (p.degree - 2) // 2, 1)
    return check_sos(hf, cfg, z=z)
