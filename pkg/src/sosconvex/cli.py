"""Command-line interface.

Exit codes: 0 = verified / true, 1 = verified false / refuted, 2 = unknown or
stalled, 3 = input or format error.
"""

from __future__ import annotations

import argparse
import re
import sys
from fractions import Fraction

from .biquadratic import (
    BiquadraticForm,
    biquadratic_from_text,
    corpus_text,
    dim_hessian,
    dim_nary,
    dim_symmetric,
)
from .certificates import certificate_from_text, certificate_to_text, verify_sos_certificate
from .dual import dual_from_text, verify_refutation
from .face import (
    DegenerateZeroSearch,
    FaceParams,
    alpha5_lower_bound,
    det_M_closed,
    find_additional_zero,
    gram_M,
    membership_T,
)
from .forms import Form, FormatError, fmt_frac, form_from_text
from .search import SearchConfig, check_sos, check_sos_convexity

EXIT_TRUE = 0
EXIT_FALSE = 1
EXIT_UNKNOWN = 2
EXIT_ERROR = 3

_BUILTIN_FILES = {
    "b_thm22": "b_thm22.biq",
    "c_dual": "c_dual.dcert",
    "choi_biquadratic": "choi_biquadratic.biq",
    "choi_matrix": "choi_matrix.polymat",
    "f_lemma32": "f_lemma32.form",
    "q_reduction": "q_reduction.form",
    "q22_cert": "q22_cert.cert",
}


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc}") from exc


def _load_target(text: str):
    """Returns a Form or a BiquadraticForm based on the file header."""
    head = ""
    for line in text.splitlines():
        stripped = line.split("#", 1)[0].strip()
        if stripped:
            head = stripped.split()[0].lower()
            break
    if head == "biq":
        return biquadratic_from_text(text)
    if head == "form":
        return form_from_text(text)
    raise FormatError(f"unrecognized target header {head!r} (expected 'form' or 'biq')")


_TERM_RE = re.compile(
    r"^\s*(?P<coef>\d+(?:/\d+)?)?\s*\*?\s*(?P<factors>(?:[xy]\d+(?:\^\d+)?\s*\*?\s*)*)$"
)
_FACTOR_RE = re.compile(r"([xy])(\d+)(?:\^(\d+))?")


def parse_poly_expression(expr: str, n_vars: int, block: int | None = None) -> Form:
    """Parse expressions like "x1^2+x2^2" into a Form over n_vars variables.

    With a block size, y<j> names map to variable block + j; otherwise only
    x<i> names are accepted.
    """
    terms: dict[tuple[int, ...], Fraction] = {}
    degree = None
    expr = expr.replace("-", "+-")
    for raw in expr.split("+"):
        raw = raw.strip()
        if not raw:
            continue
        sign = Fraction(1)
        if raw.startswith("-"):
            sign = Fraction(-1)
            raw = raw[1:].strip()
        m = _TERM_RE.match(raw)
        if m is None:
            raise FormatError(f"cannot parse term {raw!r}")
        coef = sign * Fraction(m.group("coef") or 1)
        exps = [0] * n_vars
        for var, idx_s, pow_s in _FACTOR_RE.findall(m.group("factors") or ""):
            idx = int(idx_s)
            power = int(pow_s) if pow_s else 1
            if var == "y":
                if block is None:
                    raise FormatError("y-variables are only valid for biquadratic targets")
                idx += block
            if not 1 <= idx <= n_vars:
                raise FormatError(f"variable index out of range in term {raw!r}")
            exps[idx - 1] += power
        d = sum(exps)
        if degree is None:
            degree = d
        elif d != degree:
            raise FormatError("expression is not homogeneous")
        key = tuple(exps)
        terms[key] = terms.get(key, Fraction(0)) + coef
    if degree is None:
        raise FormatError("empty expression")
    terms = {k: v for k, v in terms.items() if v != 0}
    return Form(n_vars, degree, terms)


def _parse_frac(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise FormatError(f"bad rational {text!r}") from exc


# -- subcommands -----------------------------------------------------------------


def cmd_dims(args) -> int:
    if args.n < 1:
        print("error: n must be >= 1", file=sys.stderr)
        return EXIT_ERROR
    print(f"{dim_nary(args.n)} {dim_symmetric(args.n)} {dim_hessian(args.n)}")
    return EXIT_TRUE


def cmd_verify(args) -> int:
    target = _load_target(_read(args.target))
    cert_text = _read(args.certificate)
    head = next(
        (ln.strip() for ln in cert_text.splitlines() if ln.split("#", 1)[0].strip()), ""
    )
    if head.upper().startswith("ORDER:"):
        dual = dual_from_text(cert_text)
        if isinstance(target, Form):
            target = BiquadraticForm.from_form(target, dual.ordering.n)
        result = verify_refutation(dual, target)
        print(result.reason)
        return EXIT_FALSE if result.accepted else EXIT_UNKNOWN
    cert = certificate_from_text(cert_text)
    if (
        isinstance(target, Form)
        and cert.z
        and len(cert.z[0]) == 2 * target.n_vars
        and target.degree % 2 == 0
    ):
        # sos-convexity certificate: it attests y^T H_p(x) y over 2n variables
        from .biquadratic import hessian_biquadratic, hessian_form

        target = (
            hessian_biquadratic(target) if target.degree == 4 else hessian_form(target)
        )
    result = verify_sos_certificate(target, cert)
    print(result.reason)
    return EXIT_TRUE if result.accepted else EXIT_FALSE


def cmd_check(args) -> int:
    target = _load_target(_read(args.target))
    cfg = SearchConfig(
        max_iterations=args.max_iter,
        convergence_tol=args.tol,
        denominator_bound=args.denominator_bound,
        restarts=args.restarts,
        seed=args.seed,
    )
    if args.sos_convex:
        if not isinstance(target, Form):
            print("error: --sos-convex needs a plain form", file=sys.stderr)
            return EXIT_ERROR
        if target.degree % 2 != 0:
            print("error: sos-convexity requires even degree", file=sys.stderr)
            return EXIT_ERROR
        outcome = check_sos_convexity(target, cfg)
    else:
        multiplier = None
        if args.nonneg_mult is not None:
            if isinstance(target, BiquadraticForm):
                multiplier = parse_poly_expression(
                    args.nonneg_mult, 2 * target.n, block=target.n
                )
            else:
                multiplier = parse_poly_expression(args.nonneg_mult, target.n_vars)
        tf = target.to_form() if isinstance(target, BiquadraticForm) else target
        if (tf.degree + (multiplier.degree if multiplier else 0)) % 2 != 0:
            print("error: target times multiplier has odd degree", file=sys.stderr)
            return EXIT_ERROR
        outcome = check_sos(target, cfg, multiplier=multiplier)
    print(f"status: {outcome.status}")
    if outcome.residual is not None:
        print(f"residual: {outcome.residual:.3e}")
    if outcome.diagnostics:
        print(f"diagnostics: {outcome.diagnostics}")
    if outcome.status == "ExactCertificate":
        out_path = args.out or args.target + ".cert"
        block = target.n if isinstance(target, BiquadraticForm) else None
        if args.sos_convex:
            block = target.n_vars
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(certificate_to_text(outcome.certificate, block=block))
        print(f"certificate: {out_path}")
        return EXIT_TRUE
    if outcome.status == "Refuted":
        print(f"refuted: not SOS, pairing = {_pairing_of(outcome, target)}")
        return EXIT_FALSE
    return EXIT_UNKNOWN


def _pairing_of(outcome, target) -> Fraction:
    from .dual import pairing

    b = target if isinstance(target, BiquadraticForm) else None
    if b is None and isinstance(target, Form):
        b = BiquadraticForm.from_form(target, outcome.dual.ordering.n)
    if b is None:
        from .biquadratic import hessian_biquadratic

        b = hessian_biquadratic(target)
    return pairing(outcome.dual, b)


def cmd_face(args) -> int:
    a = _parse_frac(args.a)
    b = _parse_frac(args.b)
    alphas = [_parse_frac(v) for v in args.alphas]
    if len(alphas) != 5:
        print("error: expected five alpha values", file=sys.stderr)
        return EXIT_ERROR
    if a == 0 or b == 0:
        print("error: a and b must be nonzero for face queries", file=sys.stderr)
        return EXIT_ERROR
    fp = FaceParams(a, b)
    print("alphas: " + " ".join(fmt_frac(v) for v in alphas))
    print(f"a: {fmt_frac(a)}")
    print(f"b: {fmt_frac(b)}")
    member = membership_T(alphas, fp)
    if args.bound or args.zero:
        if any(v <= 0 for v in alphas[:4]):
            print("error: the bound needs alpha1..alpha4 > 0", file=sys.stderr)
            return EXIT_ERROR
        bound = alpha5_lower_bound(alphas[:4], fp)
        print(f"bound: {fmt_frac(bound)}")
    print(f"membership: {'true' if member else 'false'}")
    if all(v != 0 for v in alphas[:4]):
        closed = det_M_closed(alphas, fp)
        print(f"det_closed: {fmt_frac(closed)}")
    print(f"det_brute: {fmt_frac(gram_M(alphas, fp).det())}")
    if args.zero:
        if alphas[4] != bound:
            print("error: --zero needs alpha5 at the lower bound", file=sys.stderr)
            return EXIT_ERROR
        try:
            pt = find_additional_zero(alphas, fp, tol=args.zero_tol, dps=args.dps)
        except (DegenerateZeroSearch, RuntimeError) as exc:
            print(f"zero search failed: {exc}", file=sys.stderr)
            return EXIT_UNKNOWN
        print("zero_x: " + " ".join(f"{v:.12g}" for v in pt.x))
        print("zero_y: " + " ".join(f"{v:.12g}" for v in pt.y))
        print(f"residual: {pt.residual:.3e}")
    return EXIT_TRUE if member else EXIT_FALSE


def cmd_builtin(args) -> int:
    if args.name not in _BUILTIN_FILES:
        known = ", ".join(sorted(_BUILTIN_FILES))
        print(f"error: unknown builtin {args.name!r} (known: {known})", file=sys.stderr)
        return EXIT_ERROR
    text = corpus_text(_BUILTIN_FILES[args.name])
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(text)
    print(f"wrote {args.out}")
    return EXIT_TRUE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sosconvex",
        description="Exact SOS and sos-convexity certificates for polynomial forms.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dims", help="dimension counts for n-ary biquadratic spaces")
    p.add_argument("n", type=int)
    p.set_defaults(func=cmd_dims)

    p = sub.add_parser("verify", help="verify an SOS certificate or a dual refutation")
    p.add_argument("target")
    p.add_argument("certificate")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("check", help="search for an SOS / sos-convexity certificate")
    p.add_argument("target")
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--sos", action="store_true")
    mode.add_argument("--sos-convex", action="store_true")
    mode.add_argument("--nonneg-mult", metavar="EXPR", help='e.g. "x1^2+x2^2"')
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-iter", type=int, default=10_000)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--denominator-bound", type=int, default=2**16)
    p.add_argument("--restarts", type=int, default=3)
    p.add_argument("--out", help="certificate output path (default: TARGET.cert)")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("face", help="T_{a,b} membership, bound, determinant, zero")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--alphas", nargs=5, required=True, metavar="AI")
    p.add_argument("--bound", action="store_true")
    p.add_argument("--zero", action="store_true")
    p.add_argument("--zero-tol", type=float, default=1e-9)
    p.add_argument("--dps", type=int, default=30)
    p.set_defaults(func=cmd_face)

    p = sub.add_parser("builtin", help="write a corpus object to a file")
    p.add_argument("name")
    p.add_argument("out")
    p.set_defaults(func=cmd_builtin)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except FormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


def console_entry() -> None:
    sys.exit(main())
