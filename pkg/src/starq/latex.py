"""Presentation-only LaTeX rendering of polynomials, operators, and star
products.  No parser exists for this output; the JSON serialization is the
round-trip format."""

from __future__ import annotations

from fractions import Fraction

from .cochains import Cochain
from .jets import JetPolynomial
from .polynomials import XPoly
from .star import StarProduct


def _frac_latex(q: Fraction, lead: bool) -> tuple[str, str]:
    sign = "-" if q < 0 else ("" if lead else "+")
    q = abs(q)
    if q.denominator == 1:
        body = "" if q == 1 else str(q.numerator)
    else:
        body = rf"\tfrac{{{q.numerator}}}{{{q.denominator}}}"
    return sign, body


def _join(sign: str, body: str, symbols: str) -> str:
    if not symbols:
        body = body or "1"
    if body and symbols:
        return f"{sign}{body}\\,{symbols}"
    return f"{sign}{body}{symbols}"


def poly_latex(p: XPoly) -> str:
    if p.is_zero:
        return "0"
    parts = []
    for exp, coeff in p.monomials():
        symbols = ""
        for i, e in enumerate(exp, start=1):
            if e == 1:
                symbols += f"x_{i}"
            elif e > 1:
                symbols += f"x_{i}^{{{e}}}"
        sign, body = _frac_latex(coeff, lead=not parts)
        parts.append(_join(sign, body, symbols))
    return " ".join(parts)


def _jet_var_latex(tag: str, index: tuple[int, ...]) -> str:
    name = rf"\{tag}"
    if index:
        return f"{name}_{{{''.join(map(str, index))}}}"
    return name


def jet_latex(p: JetPolynomial) -> str:
    if p.is_zero:
        return "0"
    parts = []
    for mono, coeff in p.monomials():
        symbols = ""
        for var in dict.fromkeys(mono):
            power = mono.count(var)
            rendered = _jet_var_latex(*var)
            symbols += rendered if power == 1 else f"{rendered}^{{{power}}}"
        sign, body = _frac_latex(coeff, lead=not parts)
        parts.append(_join(sign, body, symbols))
    return " ".join(parts)


def _coeff_latex(coeff) -> str:
    text = poly_latex(coeff) if isinstance(coeff, XPoly) else jet_latex(coeff)
    if " " in text:  # more than one monomial needs grouping
        return rf"\bigl({text}\bigr)"
    return text


def _slot_latex(s: tuple[int, ...]) -> str:
    if not s:
        return r"\mathrm{id}"
    digits = "".join(map(str, s))
    return rf"\partial_{{{digits}}}"


def cochain_latex(c: Cochain) -> str:
    if c.is_zero:
        return "0"
    parts = []
    for slots, coeff in c.sorted_terms():
        ops = r" \otimes ".join(_slot_latex(s) for s in slots)
        body = _coeff_latex(coeff)
        if body == "1":
            body = ""
        lead = "" if not parts else "+ "
        if body.startswith("-"):
            lead = "- " if parts else "-"
            body = body[1:]
        piece = f"{body}\\,{ops}" if body else ops
        parts.append(lead + piece)
    return " ".join(parts)


def star_latex(star: StarProduct) -> str:
    lines = [
        r"% star product levels; the deformation parameter multiplies level k",
        r"\begin{align*}",
    ]
    for k, level in enumerate(star.levels):
        body = cochain_latex(level)
        lines.append(rf"B_{{{k}}}(f,g) &= {body} \\")
    lines[-1] = lines[-1].rstrip(" \\")
    lines.append(r"\end{align*}")
    return "\n".join(lines) + "\n"
