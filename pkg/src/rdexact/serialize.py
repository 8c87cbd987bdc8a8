"""S-expression serialization of field expression trees.

The textual form round-trips bit-for-bit: floats are written with repr()
(shortest round-trip) and the tree structure is preserved node for node, so a
reloaded field evaluates identically to the original on the same platform.

Grammar (atoms are whitespace-separated):

    x | t
    (const RE [IM])
    (add A B) (sub A B) (mul A B) (div A B) (neg A)
    (exp A) (log A) (tanh A) (cosh A) (sqrt A) (pow A P)
    (quad A XREF) (tquad A XFIX TREF) (pinx A XFIX)
    (tab NX XMIN XMAX NT TMIN TMAX V...)
"""

from __future__ import annotations

import numpy as np

from . import fields as F


def dump(field: F.ScalarField) -> str:
    if isinstance(field, F.VarX):
        return "x"
    if isinstance(field, F.VarT):
        return "t"
    if isinstance(field, F.Const):
        v = field.value
        if isinstance(v, complex):
            return f"(const {v.real!r} {v.imag!r})"
        return f"(const {v!r})"
    if isinstance(field, F.Add):
        return f"(add {dump(field.a)} {dump(field.b)})"
    if isinstance(field, F.Sub):
        return f"(sub {dump(field.a)} {dump(field.b)})"
    if isinstance(field, F.Mul):
        return f"(mul {dump(field.a)} {dump(field.b)})"
    if isinstance(field, F.Div):
        return f"(div {dump(field.a)} {dump(field.b)})"
    if isinstance(field, F.Neg):
        return f"(neg {dump(field.a)})"
    if isinstance(field, F.Exp):
        return f"(exp {dump(field.a)})"
    if isinstance(field, F.Log):
        return f"(log {dump(field.a)})"
    if isinstance(field, F.Tanh):
        return f"(tanh {dump(field.a)})"
    if isinstance(field, F.Cosh):
        return f"(cosh {dump(field.a)})"
    if isinstance(field, F.Sqrt):
        return f"(sqrt {dump(field.a)})"
    if isinstance(field, F.Pow):
        return f"(pow {dump(field.a)} {float(field.p)!r})"
    if isinstance(field, F.Quadrature):
        return f"(quad {dump(field.g)} {field.x_ref!r})"
    if isinstance(field, F.TQuadrature):
        return f"(tquad {dump(field.g)} {field.x_fix!r} {field.t_ref!r})"
    if isinstance(field, F.PinX):
        return f"(pinx {dump(field.g)} {field.x_fix!r})"
    if isinstance(field, F.Tabulated):
        xs, ts, v = field.xs, field.ts, field.values
        nums = " ".join(repr(float(w)) for w in v.ravel())
        return (f"(tab {len(xs)} {xs[0]!r} {xs[-1]!r} "
                f"{len(ts)} {ts[0]!r} {ts[-1]!r} {nums})")
    raise ValueError(f"field node {type(field).__name__} is not serializable")


def _tokenize(text: str):
    return text.replace("(", " ( ").replace(")", " ) ").split()


def parse(text: str) -> F.ScalarField:
    tokens = _tokenize(text)
    field, rest = _parse(tokens)
    if rest:
        raise ValueError(f"trailing tokens in expression: {rest[:5]}")
    return field


def _parse(tokens):
    if not tokens:
        raise ValueError("unexpected end of expression")
    tok, rest = tokens[0], tokens[1:]
    if tok == "x":
        return F.X, rest
    if tok == "t":
        return F.T, rest
    if tok != "(":
        raise ValueError(f"unexpected token {tok!r}")
    head, rest = rest[0], rest[1:]

    def close(node, rest):
        if not rest or rest[0] != ")":
            raise ValueError(f"missing ')' after {head}")
        return node, rest[1:]

    if head == "const":
        nums = []
        while rest and rest[0] != ")":
            nums.append(float(rest[0]))
            rest = rest[1:]
        if len(nums) == 1:
            return close(F.Const(nums[0]), rest)
        if len(nums) == 2:
            return close(F.Const(complex(nums[0], nums[1])), rest)
        raise ValueError("const takes one or two numbers")
    if head in ("add", "sub", "mul", "div"):
        a, rest = _parse(rest)
        b, rest = _parse(rest)
        cls = {"add": F.Add, "sub": F.Sub, "mul": F.Mul, "div": F.Div}[head]
        return close(cls(a, b), rest)
    if head in ("neg", "exp", "log", "tanh", "cosh", "sqrt"):
        a, rest = _parse(rest)
        cls = {"neg": F.Neg, "exp": F.Exp, "log": F.Log, "tanh": F.Tanh,
               "cosh": F.Cosh, "sqrt": F.Sqrt}[head]
        return close(cls(a), rest)
    if head == "pow":
        a, rest = _parse(rest)
        p = float(rest[0])
        return close(F.Pow(a, p), rest[1:])
    if head == "quad":
        a, rest = _parse(rest)
        return close(F.Quadrature(a, float(rest[0])), rest[1:])
    if head == "tquad":
        a, rest = _parse(rest)
        return close(F.TQuadrature(a, float(rest[0]), float(rest[1])), rest[2:])
    if head == "pinx":
        a, rest = _parse(rest)
        return close(F.PinX(a, float(rest[0])), rest[1:])
    if head == "tab":
        nx = int(rest[0])
        xmin, xmax = float(rest[1]), float(rest[2])
        nt = int(rest[3])
        tmin, tmax = float(rest[4]), float(rest[5])
        rest = rest[6:]
        vals = []
        for _ in range(nx * nt):
            vals.append(float(rest[0]))
            rest = rest[1:]
        node = F.Tabulated(np.linspace(xmin, xmax, nx),
                           np.linspace(tmin, tmax, nt),
                           np.array(vals).reshape(nt, nx))
        return close(node, rest)
    raise ValueError(f"unknown node head {head!r}")
