"""Batch command-line front end.

Every report is a block of ``key: value`` lines followed by a line ``---``
and a JSON object with the same data.  Exit codes: 0 answered, 2 input
error, 3 unknown (fuel exhausted).
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .categoricity import interleave, iso_approx
from .cstar import StandardComplex
from .errors import CstarkError, ParseError, SupernaturalMismatchSuspected
from .formats import (format_label, format_point, format_supernatural, format_word,
                      parse_certificate, parse_label, parse_point, parse_presentation,
                      parse_supernatural)
from .ktheory import DPresentation, cone_decide, k0, k0_to_rational, k1
from .presentations import Answer, GpWord, KernelAnswer, SgWord
from .results import Unknown
from .uhf import exact_trace, extract_certificate, is_exact_projection, limit_norm, trace

EXIT_OK, EXIT_INPUT, EXIT_UNKNOWN = 0, 2, 3


class Report:
    def __init__(self):
        self.fields: list[tuple[str, object]] = []
        self.code = EXIT_OK

    def add(self, key: str, value) -> None:
        self.fields.append((key, value))

    def unknown(self, fuel: int, progress: str = "") -> None:
        self.add("status", "unknown")
        self.add("fuel", fuel)
        if progress:
            self.add("progress", progress)
        self.code = EXIT_UNKNOWN

    def render(self) -> str:
        lines = [f"{k}: {_text(v)}" for k, v in self.fields]
        data = {}
        for k, v in self.fields:
            data[k] = _jsonable(v)
        lines.append("---")
        lines.append(json.dumps(data, indent=2, sort_keys=True))
        return "\n".join(lines) + "\n"


def _text(v) -> str:
    if isinstance(v, (list, tuple)):
        return " ".join(_text(x) for x in v)
    if isinstance(v, bool):
        return "yes" if v else "no"
    return str(v)


def _jsonable(v):
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (bool, int)) or v is None:
        return v
    return str(v)


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise CstarkError(f"cannot read {path}: {exc.strerror}") from None


def _cert(args):
    if getattr(args, "cert", None):
        return parse_certificate(_read(args.cert))
    return parse_certificate(f"dims {args.dims}")


# ---------------------------------------------------------------------------
# verbs


def cmd_sn(args, rep: Report) -> None:
    eps = parse_supernatural(_read(args.file))
    rep.add("spec", format_supernatural(eps).strip().replace("\n", "; ") or "1")
    if args.action == "parse":
        rep.add("dims", eps.chain().prefix(args.stages))
        return
    primes = [int(p) for p in args.primes.split(",")]
    for p in primes:
        rep.add(f"exponents {p}", eps.exponent_stream(p, args.stages))
    rep.add("dims", eps.chain().prefix(args.stages))


def cmd_build(args, rep: Report) -> None:
    if args.sn:
        from .uhf import presentation_from_supernatural
        eps = parse_supernatural(_read(args.sn))
        A, cert = presentation_from_supernatural(eps)
        rep.add("source", "supernatural")
    else:
        cert = parse_certificate(_read(args.cert))
        A = cert.presentation
        rep.add("source", "certificate")
    count = args.stages if cert.stages is None else min(args.stages, cert.stages)
    rep.add("algebra", A.name)
    rep.add("dims", cert.dims(count))
    rep.add("unit", "1" if cert.n(0) == 1 else " + ".join(
        f"u(0,{r},{r})" for r in range(1, cert.n(0) + 1)))


def cmd_norm(args, rep: Report) -> None:
    cert = _cert(args)
    pt = parse_point(args.pt, cert.presentation)
    iv = limit_norm(cert, pt, args.k)
    rep.add("point", args.pt)
    rep.add("k", args.k)
    rep.add("norm lo", iv.lo)
    rep.add("norm hi", iv.hi)


def cmd_trace(args, rep: Report) -> None:
    cert = _cert(args)
    pt = parse_point(args.pt, cert.presentation)
    iv = trace(cert, pt, args.k)
    rep.add("point", args.pt)
    rep.add("k", args.k)
    rep.add("trace lo", iv.lo)
    rep.add("trace hi", iv.hi)


def cmd_proj(args, rep: Report) -> None:
    cert = _cert(args)
    A = cert.presentation
    e = A.value(parse_point(args.pt, A))
    rep.add("point", args.pt)
    if is_exact_projection(e):
        t = exact_trace(e).re
        rep.add("projection", True)
        rep.add("trace", t)
        D = DPresentation(A)
        enum = D.enumeration(1)
        k = 0
        while enum.trace_vector(k)[0] != t:
            k += 1
        rep.add("class", format_word(SgWord((D.generator_index(1, k),))))
        return
    rep.add("projection", False)
    sq = (e * e - e).norm(args.k)
    adj = (e - e.adjoint()).norm(args.k)
    rep.add("residual x^2-x", f"[{sq.lo}, {sq.hi}]")
    rep.add("residual x-x*", f"[{adj.lo}, {adj.hi}]")


def cmd_k0(args, rep: Report) -> None:
    cert = _cert(args)
    K = k0(cert.presentation)
    if args.action == "eq":
        a, b = parse_label(args.labels[0], K), parse_label(args.labels[1], K)
        ans = K.kernel(a, b, args.fuel)
        rep.add("left", format_label(K, a))
        rep.add("right", format_label(K, b))
        if ans is KernelAnswer.UNKNOWN:
            rep.unknown(args.fuel)
        else:
            rep.add("equal", ans is KernelAnswer.IN_KERNEL)
        return
    w = parse_label(args.labels[0], K)
    rep.add("label", format_label(K, w))
    if args.action == "pos":
        res = cone_decide(K, w, args.fuel)
        if res.answer is Answer.UNKNOWN:
            rep.unknown(res.fuel_spent)
        else:
            rep.add("positive", res.answer is Answer.YES)
            rep.add("fuel", res.fuel_spent)
            if res.answer is Answer.YES and res.witness is not None:
                rep.add("witness", format_word(res.witness))
        return
    rep.add("value", k0_to_rational(K, w))


def cmd_iso(args, rep: Report) -> None:
    ca = parse_certificate(_read(args.a))
    cb = parse_certificate(_read(args.b))
    il = interleave(ca, cb, args.depth)
    rep.add("k", il.k_seq)
    rep.add("l", il.l_seq)
    rep.add("m_k", il.m_dims)
    rep.add("n_l", il.n_dims)
    pt = parse_point(args.pt, ca.presentation)
    img = iso_approx(ca, cb, pt, args.k, il, fuel=args.depth)
    if isinstance(img, Unknown):
        rep.unknown(img.fuel, img.progress)
        return
    rep.add("step", img.j)
    rep.add("image", format_point(img.element))
    src = limit_norm(ca, pt, args.k + 2)
    dst = img.element.norm(args.k + 2)
    rep.add("norm source", f"[{src.lo}, {src.hi}]")
    rep.add("norm image", f"[{dst.lo}, {dst.hi}]")
    rep.add("trace source", exact_trace(ca.presentation.value(pt)))
    rep.add("trace image", exact_trace(img.element))


def cmd_extract(args, rep: Report) -> None:
    A = parse_presentation(_read(args.pres))
    ex = extract_certificate(A, stages=args.stages)
    rep.add("algebra", A.name)
    rep.add("dims", ex.dims)
    rep.add("precisions", ex.precisions)
    rep.add("complete", ex.complete)
    rep.add("matrix units", ex.verify_matrix_units())
    rep.add("nesting", ex.verify_inv2())
    rep.add("approximation", ex.verify_inv1())


def cmd_k1(args, rep: Report) -> None:
    K1 = k1(StandardComplex(), fuel=args.stage_fuel)
    rep.add("algebra", "C")
    confirmed = 0
    for i in range(args.count):
        m = K1.presentation.try_member(i, args.stage_fuel)
        if m is None:
            rep.add(f"label {i}", "not enumerated")
            rep.unknown(args.stage_fuel, f"member {i} not enumerated")
            continue
        ans = K1.presentation.kernel(GpWord.gen(i), GpWord(()), args.fuel)
        text = format_label(K1.ambient, m)
        if ans is KernelAnswer.IN_KERNEL:
            confirmed += 1
            rep.add(f"label {i}", f"{m} ~ {text} = 0")
        else:
            rep.add(f"label {i}", f"{m} ~ {text} unknown after fuel {args.fuel}")
            rep.code = EXIT_UNKNOWN
    rep.add("confirmed", f"{confirmed}/{args.count}")
    rep.add("fuel", args.fuel)


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cstark", description="Effective C*-algebra computations.")
    sub = ap.add_subparsers(dest="verb", required=True)

    def algebra_opts(p):
        p.add_argument("--cert", help="certificate file (dims grammar)")
        p.add_argument("--dims", default="powers 2", help="inline dims rule (default: powers 2)")

    p = sub.add_parser("sn", help="parse or print a supernatural number spec")
    p.add_argument("action", choices=["parse", "print"])
    p.add_argument("file")
    p.add_argument("--stages", type=int, default=8)
    p.add_argument("--primes", default="2,3,5,7")
    p.set_defaults(func=cmd_sn)

    p = sub.add_parser("build", help="build a presentation")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--sn")
    g.add_argument("--cert")
    p.add_argument("--stages", type=int, default=8)
    p.set_defaults(func=cmd_build)

    for name, func, help_ in (("norm", cmd_norm, "certified norm"), ("trace", cmd_trace, "trace interval")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("pt")
        p.add_argument("-k", type=int, default=10)
        algebra_opts(p)
        p.set_defaults(func=func)

    p = sub.add_parser("proj", help="projection tools")
    p.add_argument("action", choices=["classify"])
    p.add_argument("pt")
    p.add_argument("-k", type=int, default=10)
    algebra_opts(p)
    p.set_defaults(func=cmd_proj)

    p = sub.add_parser("k0", help="K_0 labels")
    p.add_argument("action", choices=["eq", "pos", "rat"])
    p.add_argument("labels", nargs="+")
    p.add_argument("--fuel", type=int, default=20000)
    algebra_opts(p)
    p.set_defaults(func=cmd_k0)

    p = sub.add_parser("iso", help="image under the effective isomorphism")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--pt", required=True)
    p.add_argument("-k", type=int, default=10)
    p.add_argument("--depth", type=int, default=8)
    p.set_defaults(func=cmd_iso)

    p = sub.add_parser("extract-cert", help="extract a certificate from a presentation")
    p.add_argument("--pres", required=True)
    p.add_argument("--stages", type=int, default=5)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("k1", help="K_1 checks")
    p.add_argument("action", choices=["smoke"])
    p.add_argument("--fuel", type=int, default=100000)
    p.add_argument("--count", type=int, default=5)
    p.add_argument("--stage-fuel", type=int, default=200)
    p.set_defaults(func=cmd_k1)
    return ap


def run(argv: list[str] | None = None) -> tuple[int, str]:
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.verb == "k0":
        want = 2 if args.action == "eq" else 1
        if len(args.labels) != want:
            ap.error(f"k0 {args.action} takes {want} label(s)")
    rep = Report()
    try:
        args.func(args, rep)
    except ParseError as exc:
        rep = Report()
        rep.add("error", "parse")
        rep.add("line", exc.line)
        rep.add("column", exc.column)
        rep.add("message", str(exc))
        rep.code = EXIT_INPUT
    except SupernaturalMismatchSuspected as exc:
        rep.add("status", "mismatch suspected")
        rep.add("step", exc.stage)
        rep.add("searched below", exc.searched_bound)
        rep.code = EXIT_UNKNOWN
    except (CstarkError, TypeError) as exc:
        rep = Report()
        rep.add("error", str(exc))
        rep.code = EXIT_INPUT
    return rep.code, rep.render()


def main(argv: list[str] | None = None) -> int:
    code, text = run(argv)
    sys.stdout.write(text)
    return code


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
