"""Text grammars for supernatural numbers, certificates, presentations, points and labels.

Supernatural spec (one item per line, ``#`` starts a comment)::

    <prime> <exponent>          exponent a natural number or ``inf``
    machine <index> <program>   h_s(p_index) = #W_{index,s} for the counter machine
                                (``program`` is instruction text or a shipped name)

Certificate spec (a single ``dims`` line)::

    dims powers <b>             n_j = b^j
    dims factorial              n_j = j!
    dims explicit n_0 n_1 ...   finitely many stages; each must divide the next
    dims machine <program>      n_j = 2^{#W_j} for the machine

Presentation descriptor (for extraction)::

    complex | matrix <m> | dims ...

Points (rational points of the algebra)::

    point  := term (('+' | '-') term)*
    term   := [coef '*'] factor ('*' factor)*
    factor := atom ['^*']
    atom   := 'u(' j ',' r ',' s ')' | 'x' <index> | '1'
    coef   := rational | '(' a ['+'|'-'] b 'i' ')' | 'i'

``u(j,r,s)`` is the stage matrix unit ψ_j(E_{r,s}) of a direct limit;
``x<k>`` is the k-th special point; ``1`` is the unit.

K_0 labels::

    label := item (('+' | '-') item)*
    item  := word | 'g(' word ')' | '[1]'
    word  := 'x' <i> ('*' 'x' <j>)*

A word stands for its class γ(w), so ``w1 - w2`` is the class [(w1, w2)];
``[1]`` is the class of the unit.
"""
from __future__ import annotations

import re
from fractions import Fraction

from .concrete import DimChain
from .cstar import (CPresentation, DirectLimit, StandardComplex, StarPoly, matrix_algebra)
from .errors import ParseError
from .exact import GaussianRational
from .machines import SHIPPED, CounterMachine, EnumerationCursor
from .presentations import GpWord, SgWord
from .uhf import (Supernatural, UhfCertificate, certificate_from_chain, hard_supernatural,
                  nth_prime)

# ---------------------------------------------------------------------------
# supernatural numbers


def _machine(text: str, line: int, column: int) -> CounterMachine:
    name = text.strip()
    if name in SHIPPED:
        return SHIPPED[name]
    return CounterMachine.parse(text, line, column)


def _content(raw: str) -> str:
    return raw.split("#", 1)[0].rstrip()


def parse_supernatural(text: str) -> Supernatural:
    exps: dict[int, int | None] = {}
    machines: dict[int, CounterMachine] = {}
    for ln, raw in enumerate(text.splitlines(), 1):
        body = _content(raw)
        if not body.strip():
            continue
        col = len(body) - len(body.lstrip()) + 1
        fields = body.split()
        if fields[0] == "machine":
            m = re.match(r"\s*machine\s+(\S+)\s*", body)
            rest_col = m.end() + 1 if m else col
            if len(fields) < 3 or not fields[1].isdigit():
                raise ParseError("expected 'machine <index> <program>'", ln, col, raw)
            idx = int(fields[1])
            if idx in machines or nth_prime(idx) in exps:
                raise ParseError(f"prime index {idx} specified twice", ln, col, raw)
            machines[idx] = _machine(body[m.end():], ln, rest_col)
            continue
        if len(fields) != 2:
            raise ParseError("expected '<prime> <exponent>'", ln, col, raw)
        p_text, e_text = fields
        if not p_text.isdigit():
            raise ParseError(f"{p_text!r} is not a prime", ln, col, raw)
        p = int(p_text)
        e_col = body.index(e_text, col - 1 + len(p_text)) + 1
        try:
            from .uhf import prime_index
            prime_index(p)
        except Exception:
            raise ParseError(f"{p} is not a prime", ln, col, raw) from None
        if p in exps or any(nth_prime(i) == p for i in machines):
            raise ParseError(f"prime {p} specified twice", ln, col, raw)
        if e_text == "inf":
            exps[p] = None
        elif e_text.isdigit():
            exps[p] = int(e_text)
        else:
            raise ParseError(f"exponent {e_text!r} is neither a natural number nor 'inf'", ln, e_col, raw)
    base = Supernatural.from_exponents(exps)
    if not machines:
        return base
    for idx in machines:
        if nth_prime(idx) in exps:
            raise ParseError(f"prime {nth_prime(idx)} specified twice", 1, 1, text)
    return hard_supernatural(machines, base if exps else None)


def format_supernatural(eps: Supernatural) -> str:
    lines = []
    for item in eps.description:
        if item[0] == "exp":
            _, p, e = item
            lines.append(f"{p} {'inf' if e is None else e}")
        else:
            _, idx, prog = item
            lines.append(f"machine {idx} {prog}")
    return "\n".join(lines) + ("\n" if lines else "")


# ---------------------------------------------------------------------------
# certificates and presentation descriptors


def _factorial(j: int) -> int:
    out = 1
    for i in range(2, j + 1):
        out *= i
    return out


def _dims_chain(fields: list[str], body: str, ln: int, raw: str) -> tuple[DimChain, int | None, str]:
    if len(fields) < 2:
        raise ParseError("expected 'dims <rule>'", ln, 1, raw)
    rule = fields[1]
    rule_col = body.index(rule) + 1
    args = fields[2:]
    if rule == "powers":
        if len(args) != 1 or not args[0].isdigit() or int(args[0]) < 1:
            raise ParseError("'powers' expects one positive integer base", ln, rule_col, raw)
        b = int(args[0])
        return DimChain(lambda j: b ** j, f"{b}^inf"), None, f"powers {b}"
    if rule == "factorial":
        if args:
            raise ParseError("'factorial' takes no arguments", ln, rule_col, raw)
        return DimChain(_factorial, "factorial"), None, "factorial"
    if rule == "explicit":
        if not args or not all(a.isdigit() and int(a) > 0 for a in args):
            raise ParseError("'explicit' expects positive integers", ln, rule_col, raw)
        vals = [int(a) for a in args]
        for i in range(1, len(vals)):
            if vals[i] % vals[i - 1]:
                col = body.index(" " + args[i], rule_col) + 2
                raise ParseError(f"{vals[i - 1]} does not divide {vals[i]}", ln, col, raw)
        return (DimChain(lambda j: vals[min(j, len(vals) - 1)], "explicit"), len(vals),
                "explicit " + " ".join(args))
    if rule == "machine":
        start = body.index("machine") + len("machine")
        m = _machine(body[start:], ln, start + 1)
        cur = EnumerationCursor(m)
        return DimChain(lambda j: 2 ** cur.count(j), "machine"), None, f"machine {m}"
    raise ParseError(f"unknown dims rule {rule!r}", ln, rule_col, raw)


def _single_line(text: str) -> tuple[str, int, str]:
    found = None
    for ln, raw in enumerate(text.splitlines(), 1):
        body = _content(raw)
        if body.strip():
            if found is not None:
                raise ParseError("expected a single specification line", ln, 1, raw)
            found = (body, ln, raw)
    if found is None:
        raise ParseError("empty specification", 1, 1, text)
    return found


def parse_certificate(text: str) -> UhfCertificate:
    body, ln, raw = _single_line(text)
    fields = body.split()
    if fields[0] != "dims":
        raise ParseError(f"expected 'dims', found {fields[0]!r}", ln, body.index(fields[0]) + 1, raw)
    chain, stages, desc = _dims_chain(fields, body, ln, raw)
    cert = certificate_from_chain(chain, chain.name)
    cert.stages = stages
    cert.description = f"dims {desc}"
    return cert


def parse_presentation(text: str) -> CPresentation:
    body, ln, raw = _single_line(text)
    fields = body.split()
    head = fields[0]
    if head == "complex" and len(fields) == 1:
        return StandardComplex()
    if head == "matrix":
        if len(fields) != 2 or not fields[1].isdigit() or int(fields[1]) < 1:
            raise ParseError("'matrix' expects one positive integer size", ln, body.index(head) + 1, raw)
        return matrix_algebra(int(fields[1]))
    if head == "dims":
        return parse_certificate(text).presentation
    raise ParseError(f"unknown presentation {head!r}", ln, body.index(head) + 1, raw)


# ---------------------------------------------------------------------------
# points

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+(?:/\d+)?)|(?P<name>u|x|i|g)|(?P<op>\^\*|[-+*(),\[\]]))")


class _Lexer:
    def __init__(self, text: str):
        self.text = text
        self.tokens: list[tuple[str, str, int]] = []
        pos = 0
        while pos < len(text):
            if text[pos:].strip() == "":
                break
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                col = pos + (len(text[pos:]) - len(text[pos:].lstrip())) + 1
                raise ParseError(f"unexpected character {text[col - 1]!r}", 1, col, text)
            kind = m.lastgroup
            start = m.start(kind)
            self.tokens.append((kind, m.group(kind), start + 1))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else ("end", "", len(self.text) + 1)

    def take(self, value: str | None = None, kind: str | None = None):
        tok = self.peek()
        if (value is not None and tok[1] != value) or (kind is not None and tok[0] != kind):
            want = value or {"num": "a number", "name": "a name"}.get(kind, kind)
            got = tok[1] or "end of input"
            raise ParseError(f"expected {want if kind else repr(want)}, found {got!r}", 1, tok[2], self.text)
        self.i += 1
        return tok

    def integer(self) -> int:
        tok = self.take(kind="num")
        if "/" in tok[1]:
            raise ParseError("expected an integer", 1, tok[2], self.text)
        return int(tok[1])


def _coef(lx: _Lexer) -> GaussianRational | None:
    """Optional leading coefficient followed by '*' (or standing alone)."""
    kind, val, col = lx.peek()
    if kind == "num" and val != "1":
        lx.take()
        c = GaussianRational(Fraction(val))
    elif kind == "num" and val == "1":
        # '1' is the unit unless it is a coefficient of what follows
        nxt = lx.tokens[lx.i + 1] if lx.i + 1 < len(lx.tokens) else None
        if nxt is None or nxt[1] != "*":
            return None
        lx.take()
        c = GaussianRational(1)
    elif val == "i":
        lx.take()
        c = GaussianRational(0, 1)
    elif val == "(":
        lx.take()
        sign = 1
        if lx.peek()[1] == "-":
            lx.take()
            sign = -1
        if lx.peek()[1] == "i":
            lx.take()
            c = GaussianRational(0, sign)
        else:
            first = Fraction(lx.take(kind="num")[1]) * sign
            if lx.peek()[1] == "i":
                lx.take()
                c = GaussianRational(0, first)
            else:
                op_tok = lx.take()
                if op_tok[1] not in ("+", "-"):
                    raise ParseError("expected '+' or '-' in a complex coefficient", 1, op_tok[2], lx.text)
                im_part = Fraction(lx.take()[1]) if lx.peek()[0] == "num" else Fraction(1)
                lx.take("i")
                c = GaussianRational(first, im_part if op_tok[1] == "+" else -im_part)
        lx.take(")")
    else:
        return None
    if lx.peek()[1] == "*":
        lx.take("*")
    else:
        lx.coef_only = True
    return c


def _atom(lx: _Lexer, A: CPresentation) -> StarPoly:
    kind, val, col = lx.peek()
    if val == "u":
        lx.take()
        lx.take("(")
        j = lx.integer()
        lx.take(",")
        r = lx.integer()
        lx.take(",")
        s = lx.integer()
        lx.take(")")
        if not isinstance(A, DirectLimit):
            raise ParseError("u(j,r,s) needs a direct-limit algebra", 1, col, lx.text)
        try:
            return StarPoly.gen(A.unit_index(j, r, s))
        except Exception as exc:
            raise ParseError(str(exc), 1, col, lx.text) from None
    if val == "x":
        lx.take()
        return StarPoly.gen(lx.integer())
    if kind == "num" and val == "1":
        lx.take()
        u = A.unit_point()
        if u is None:
            raise ParseError("the algebra has no unit", 1, col, lx.text)
        return u
    raise ParseError(f"expected a point atom, found {val or 'end of input'!r}", 1, col, lx.text)


def _factor(lx: _Lexer, A) -> StarPoly:
    p = _atom(lx, A)
    if lx.peek()[1] == "^*":
        lx.take()
        p = p.adjoint()
    return p


def _term(lx: _Lexer, A) -> StarPoly:
    lx.coef_only = False
    c = _coef(lx)
    if lx.coef_only:
        if A.unit_point() is None:
            raise ParseError("scalar terms need a unital algebra", 1, lx.peek()[2], lx.text)
        return A.unit_point().scale(c)
    p = _factor(lx, A)
    while lx.peek()[1] == "*":
        lx.take()
        p = p * _factor(lx, A)
    return p.scale(c) if c is not None else p


def parse_point(text: str, A: CPresentation) -> StarPoly:
    lx = _Lexer(text)
    sign = 1
    if lx.peek()[1] == "-":
        lx.take()
        sign = -1
    out = _term(lx, A).scale(sign) if sign < 0 else _term(lx, A)
    while lx.peek()[0] != "end":
        op = lx.take()
        if op[1] not in "+-":
            raise ParseError(f"expected '+' or '-', found {op[1]!r}", 1, op[2], text)
        t = _term(lx, A)
        out = out + t if op[1] == "+" else out - t
    return out


# ---------------------------------------------------------------------------
# labels


def _word(lx: _Lexer) -> SgWord:
    gens = []
    lx.take("x")
    gens.append(lx.integer())
    while lx.peek()[1] == "*":
        lx.take()
        lx.take("x")
        gens.append(lx.integer())
    return SgWord(tuple(gens))


def parse_label(text: str, K) -> GpWord:
    """Group label of K_0 = G(D) from the label grammar."""
    from .ktheory import unit_label

    lx = _Lexer(text)

    def item() -> GpWord:
        kind, val, col = lx.peek()
        if val == "[":
            lx.take()
            tok = lx.take(kind="num")
            if tok[1] != "1":
                raise ParseError("only '[1]' is a named class", 1, tok[2], text)
            lx.take("]")
            return unit_label(K)
        if val == "g":
            lx.take()
            lx.take("(")
            w = _word(lx)
            lx.take(")")
            return K.gamma(w)
        if val == "x":
            return K.gamma(_word(lx))
        raise ParseError(f"expected a word or '[1]', found {val or 'end of input'!r}", 1, col, text)

    out = item()
    while lx.peek()[0] != "end":
        op = lx.take()
        if op[1] not in "+-":
            raise ParseError(f"expected '+' or '-', found {op[1]!r}", 1, op[2], text)
        t = item()
        out = out * t if op[1] == "+" else out * t.inverse()
    return out


def format_word(w: SgWord) -> str:
    return "*".join(f"x{g}" for g in w.gens)


def format_label(K, w: GpWord) -> str:
    """Canonical ``u - v`` text of a label: the class [(u, v)]."""
    u, v = K.normal_pair(w)
    return f"{format_word(u)} - {format_word(v)}"


def _coef_text(c: GaussianRational) -> str:
    if c.im == 0:
        return str(c.re)
    return f"({c})"


def format_point(e) -> str:
    """Point-grammar text of a single-part stage element (``0`` for zero)."""
    from .concrete import StagedPart

    if len(e.parts) != 1 or not isinstance(e.parts[0], StagedPart) or e.amp != 1:
        raise TypeError("only single stage elements have point text")
    low = e.parts[0].lowest()
    terms = []
    for (i, j), v in sorted(low.mat.items()):
        # stage 0 is C·1, written with the unit atom
        atom = "1" if low.mat.rows == 1 else f"u({low.stage},{i + 1},{j + 1})"
        if v == 1:
            terms.append(("+", atom))
        elif v == -1:
            terms.append(("-", atom))
        elif v.im == 0 and v.re < 0:
            terms.append(("-", f"{-v.re}*{atom}"))
        else:
            terms.append(("+", f"{_coef_text(v)}*{atom}"))
    if not terms:
        return "0"
    out = ("-" if terms[0][0] == "-" else "") + terms[0][1]
    for sign, t in terms[1:]:
        out += f" {sign} {t}"
    return out
