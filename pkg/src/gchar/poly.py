"""Multivariate polynomials over GF(p) with weighted gradings.

A polynomial is a dict mapping exponent tuples to nonzero coefficients
in [1, p).  This module also provides the parser for the text format
used by ring and module definition files: integer coefficients and the
operators ``+ - * ^`` plus parentheses.  Implicit multiplication by
juxtaposition is rejected.
"""

from __future__ import annotations

from .errors import InputError


class Poly:
    """Immutable multivariate polynomial over GF(p)."""

    __slots__ = ("terms", "nvars", "p")

    def __init__(self, terms, nvars, p):
        clean = {}
        for exps, c in terms.items():
            c %= p
            if c:
                clean[tuple(exps)] = c
        self.terms = clean
        self.nvars = nvars
        self.p = p

    @classmethod
    def zero(cls, nvars, p):
        return cls({}, nvars, p)

    @classmethod
    def constant(cls, c, nvars, p):
        return cls({(0,) * nvars: c}, nvars, p)

    @classmethod
    def variable(cls, i, nvars, p):
        exps = [0] * nvars
        exps[i] = 1
        return cls({tuple(exps): 1}, nvars, p)

    @classmethod
    def monomial(cls, exps, nvars, p, coeff=1):
        return cls({tuple(exps): coeff}, nvars, p)

    def is_zero(self):
        return not self.terms

    def __add__(self, other):
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = terms.get(e, 0) + c
        return Poly(terms, self.nvars, self.p)

    def __neg__(self):
        return Poly({e: -c for e, c in self.terms.items()}, self.nvars, self.p)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            return Poly({e: c * other for e, c in self.terms.items()},
                        self.nvars, self.p)
        terms = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                terms[e] = terms.get(e, 0) + c1 * c2
        return Poly(terms, self.nvars, self.p)

    __rmul__ = __mul__

    def __pow__(self, n):
        result = Poly.constant(1, self.nvars, self.p)
        for _ in range(n):
            result = result * self
        return result

    def __eq__(self, other):
        return (isinstance(other, Poly) and self.terms == other.terms
                and self.p == other.p)

    def __hash__(self):
        return hash((frozenset(self.terms.items()), self.p))

    def weighted_degree(self, weights):
        """Degree w.r.t. weights, or None for the zero polynomial.

        Raises InputError if the polynomial is not homogeneous.
        """
        degs = {sum(a * w for a, w in zip(e, weights)) for e in self.terms}
        if not degs:
            return None
        if len(degs) > 1:
            raise InputError(f"polynomial {self} is not homogeneous: degrees {sorted(degs)}")
        return degs.pop()

    def evaluate(self, field, point):
        """Evaluate at a point with coordinates in an ExtField."""
        total = field.zero()
        for exps, c in self.terms.items():
            term = field.from_int(c)
            for xi, e in zip(point, exps):
                if e:
                    term = field.mul(term, field.pow(xi, e))
            total = field.add(total, term)
        return total

    def substitute(self, polys):
        """Substitute polys[i] for variable i; result lives in polys[0]'s ring."""
        nvars = polys[0].nvars
        p = self.p
        result = Poly.zero(nvars, p)
        for exps, c in self.terms.items():
            term = Poly.constant(c, nvars, p)
            for q, e in zip(polys, exps):
                for _ in range(e):
                    term = term * q
            result = result + term
        return result

    def format(self, names):
        if not self.terms:
            return "0"
        parts = []
        for exps in sorted(self.terms, reverse=True):
            c = self.terms[exps]
            factors = []
            for name, e in zip(names, exps):
                if e == 1:
                    factors.append(name)
                elif e > 1:
                    factors.append(f"{name}^{e}")
            if not factors:
                parts.append(str(c))
            elif c == 1:
                parts.append("*".join(factors))
            else:
                parts.append(f"{c}*" + "*".join(factors))
        return " + ".join(parts)

    def __repr__(self):
        return f"Poly({self.terms})"


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def _tokenize(text):
    tokens = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch.isdigit():
            j = i
            while j < len(text) and text[j].isdigit():
                j += 1
            tokens.append(("int", int(text[i:j])))
            i = j
        elif ch.isalpha() or ch == "_":
            j = i
            while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(("name", text[i:j]))
            i = j
        elif ch in "+-*^()":
            tokens.append((ch, ch))
            i += 1
        else:
            raise InputError(f"unexpected character {ch!r} in polynomial {text!r}")
    tokens.append(("end", None))
    return tokens


class _Parser:
    def __init__(self, tokens, names, p):
        self.tokens = tokens
        self.pos = 0
        self.names = names
        self.p = p

    def peek(self):
        return self.tokens[self.pos][0]

    def next(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def parse_expr(self):
        sign = 1
        while self.peek() in "+-":
            if self.next()[0] == "-":
                sign = -sign
        result = self.parse_term() * sign
        while self.peek() in "+-":
            op = self.next()[0]
            term = self.parse_term()
            result = result + term if op == "+" else result - term
        return result

    def parse_term(self):
        result = self.parse_factor()
        while True:
            kind = self.peek()
            if kind == "*":
                self.next()
                result = result * self.parse_factor()
            elif kind in ("name", "int", "("):
                raise InputError(
                    "implicit multiplication is not allowed; use '*'")
            else:
                return result

    def parse_factor(self):
        base = self.parse_atom()
        if self.peek() == "^":
            self.next()
            kind, val = self.next()
            if kind != "int":
                raise InputError("exponent must be a nonnegative integer")
            return base ** val
        return base

    def parse_atom(self):
        kind, val = self.next()
        nvars = len(self.names)
        if kind == "int":
            return Poly.constant(val, nvars, self.p)
        if kind == "name":
            if val not in self.names:
                raise InputError(f"unknown variable {val!r}")
            return Poly.variable(self.names.index(val), nvars, self.p)
        if kind == "(":
            inner = self.parse_expr()
            if self.next()[0] != ")":
                raise InputError("missing closing parenthesis")
            return inner
        if kind == "-":
            return -self.parse_atom()
        raise InputError(f"unexpected token {val!r} in polynomial")


def parse_poly(text, names, p):
    """Parse a polynomial in the given variables over GF(p)."""
    parser = _Parser(_tokenize(text), list(names), p)
    result = parser.parse_expr()
    if parser.peek() != "end":
        raise InputError(f"trailing input in polynomial {text!r}")
    return result
