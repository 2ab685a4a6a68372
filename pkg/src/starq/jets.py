"""Formal jet variables of the potentials and polynomials in them.

A jet variable stands for one partial derivative of a potential: ``phi_I``
for the scalar potential phi with a nonempty sorted multi-index I, and
``psi_J`` for the conformal factor psi where J may be empty (the
undifferentiated factor occurs in products).  Distinct jet variables are
algebraically independent; the only relation built into the representation
is the symmetry of mixed partials, enforced by keeping multi-indices sorted.

A JetPolynomial is a sparse rational polynomial in jet variables.  Its
monomial keys are sorted tuples of jet variables, so structural equality is
dict equality.  The total x-derivative acts by prolongation,
d/dx_a phi_I = phi_{I+a}, extended as a derivation to products.

Poisson structure components enter through ``substitute_p``: a formal
product of derivatives of components ``d_I P^{ij}`` is rewritten into jet
variables, either for the gradient family P_vec = grad phi or for the
conformal family P_vec = psi * grad phi.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Iterator

from .multiindex import MultiIndex, binary_splits, format_index, merge, parse_index
from .polynomials import XPoly

PHI = "phi"
PSI = "psi"

# Substitution modes for Poisson components.
NABLA_PHI = "nabla-phi"
PSI_NABLA_PHI = "psi-nabla-phi"

JetVar = tuple[str, MultiIndex]
Monomial = tuple[JetVar, ...]

_CONST: Monomial = ()


def jet_var(tag: str, index: MultiIndex) -> JetVar:
    """Validated jet variable; phi requires at least one derivative."""
    index = tuple(sorted(index))
    if tag == PHI:
        if len(index) < 1:
            raise ValueError("phi jets carry at least one derivative")
    elif tag == PSI:
        pass
    else:
        raise ValueError(f"unknown potential tag {tag!r}")
    if any(a not in (1, 2, 3) for a in index):
        raise ValueError(f"coordinate label out of range in {index!r}")
    return (tag, index)


def phi_jet(*index: int) -> JetVar:
    return jet_var(PHI, tuple(index))


def psi_jet(*index: int) -> JetVar:
    return jet_var(PSI, tuple(index))


def _var_key(v: JetVar):
    tag, index = v
    return (tag, len(index), index)


def monomial_key(factors: Iterable[JetVar]) -> Monomial:
    return tuple(sorted(factors, key=_var_key))


def format_var(v: JetVar) -> str:
    tag, index = v
    return f"{tag}_{format_index(index)}"


def parse_var(text: str) -> JetVar:
    tag, sep, digits = text.partition("_")
    if not sep:
        raise ValueError(f"malformed jet variable {text!r}")
    return jet_var(tag, parse_index(digits))


class JetPolynomial:
    """Sparse rational polynomial in jet variables."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict[Monomial, Fraction] | None = None):
        self.terms: dict[Monomial, Fraction] = terms or {}

    @staticmethod
    def zero() -> "JetPolynomial":
        return JetPolynomial()

    @staticmethod
    def one() -> "JetPolynomial":
        return JetPolynomial({_CONST: Fraction(1)})

    @staticmethod
    def const(value: Fraction | int) -> "JetPolynomial":
        q = Fraction(value)
        return JetPolynomial({_CONST: q}) if q else JetPolynomial()

    @staticmethod
    def variable(v: JetVar) -> "JetPolynomial":
        return JetPolynomial({(v,): Fraction(1)})

    @staticmethod
    def from_monomial(key: Monomial, coeff: Fraction) -> "JetPolynomial":
        q = Fraction(coeff)
        return JetPolynomial({key: q}) if q else JetPolynomial()

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "JetPolynomial") -> "JetPolynomial":
        out = dict(self.terms)
        for mono, c in other.terms.items():
            s = out.get(mono, Fraction(0)) + c
            if s:
                out[mono] = s
            else:
                out.pop(mono, None)
        return JetPolynomial(out)

    def __sub__(self, other: "JetPolynomial") -> "JetPolynomial":
        return self + (-other)

    def __neg__(self) -> "JetPolynomial":
        return JetPolynomial({m: -c for m, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        out: dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                key = monomial_key(m1 + m2)
                s = out.get(key, Fraction(0)) + c1 * c2
                if s:
                    out[key] = s
                else:
                    out.pop(key, None)
        return JetPolynomial(out)

    __rmul__ = __mul__

    def scale(self, q: Fraction | int) -> "JetPolynomial":
        q = Fraction(q)
        if not q:
            return JetPolynomial()
        return JetPolynomial({m: c * q for m, c in self.terms.items()})

    def __eq__(self, other) -> bool:
        return isinstance(other, JetPolynomial) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def x_derivative(self, direction: int) -> "JetPolynomial":
        """Total derivative: prolongation on each factor, Leibniz over products."""
        out: dict[Monomial, Fraction] = {}
        for mono, c in self.terms.items():
            for pos, (tag, index) in enumerate(mono):
                lifted = (tag, merge(index, (direction,)))
                key = monomial_key(mono[:pos] + (lifted,) + mono[pos + 1:])
                s = out.get(key, Fraction(0)) + c
                if s:
                    out[key] = s
                else:
                    out.pop(key, None)
        return JetPolynomial(out)

    def eval_jets(self, phi: XPoly | None, psi: XPoly | None = None) -> XPoly:
        """Substitute explicit potentials for the jet variables.

        Each jet variable becomes the corresponding iterated partial
        derivative of the given polynomial; the substitution is a ring
        homomorphism.
        """
        total = XPoly.zero()
        for mono, c in self.terms.items():
            value = XPoly.const(c)
            for tag, index in mono:
                if value.is_zero:
                    break
                if tag == PHI:
                    if phi is None:
                        raise ValueError("phi jets present but no phi given")
                    value = value * phi.derivative(index)
                else:
                    if psi is None:
                        raise ValueError("psi jets present but no psi given")
                    value = value * psi.derivative(index)
            total = total + value
        return total

    def monomials(self) -> list[tuple[Monomial, Fraction]]:
        """Terms in canonical order (factor count, then factor keys)."""
        return sorted(self.terms.items(), key=lambda kv: (len(kv[0]), kv[0]))

    def factor_counts(self, mono: Monomial | None = None) -> tuple[int, int]:
        """(phi factors, psi factors) of a monomial; requires a single monomial
        when called without an argument."""
        if mono is None:
            if len(self.terms) != 1:
                raise ValueError("factor_counts of a non-monomial polynomial")
            mono = next(iter(self.terms))
        n_phi = sum(1 for tag, _ in mono if tag == PHI)
        return n_phi, len(mono) - n_phi

    def max_jet_order(self) -> int:
        """Largest derivative order among all jet factors; 0 if constant."""
        orders = [len(index) for mono in self.terms for _, index in mono]
        return max(orders, default=0)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for mono, c in self.monomials():
            body = "*".join(format_var(v) for v in mono)
            if not body:
                parts.append(str(c))
            elif c == 1:
                parts.append(body)
            elif c == -1:
                parts.append(f"-{body}")
            else:
                parts.append(f"{c}*{body}")
        return " + ".join(parts).replace("+ -", "- ")

    __repr__ = __str__

    def to_json(self) -> list[dict]:
        return [
            {"coeff": str(c), "factors": [format_var(v) for v in mono]}
            for mono, c in self.monomials()
        ]

    @staticmethod
    def from_json(data: list[dict]) -> "JetPolynomial":
        total = JetPolynomial.zero()
        for item in data:
            key = monomial_key(parse_var(name) for name in item["factors"])
            total = total + JetPolynomial.from_monomial(key, Fraction(item["coeff"]))
        return total


def canonicalize(factors: Iterable[JetVar], coeff: Fraction | int = 1) -> JetPolynomial:
    """Canonical single-monomial polynomial from an unsorted factor list."""
    return JetPolynomial.from_monomial(monomial_key(jet_var(t, i) for t, i in factors), Fraction(coeff))


# A formal product of derivatives of Poisson components: each factor is
# (derivative multi-index, upper index i, upper index j) for d_I P^{ij}.
PFactorSymbol = tuple[MultiIndex, int, int]
PTerm = tuple[Fraction, tuple[PFactorSymbol, ...]]

_EPSILON = {
    (1, 2, 3): 1, (2, 3, 1): 1, (3, 1, 2): 1,
    (1, 3, 2): -1, (2, 1, 3): -1, (3, 2, 1): -1,
}


def epsilon(i: int, j: int, k: int) -> int:
    """Totally antisymmetric symbol on {1,2,3}, normalized to eps(1,2,3)=1."""
    return _EPSILON.get((i, j, k), 0)


def substitute_factor(index: MultiIndex, i: int, j: int, mode: str) -> JetPolynomial:
    """Rewrite d_I P^{ij} into jet variables for the chosen structure family.

    Gradient family: P^{ij} = eps^{ijk} phi_k, so the derivative lands on a
    single phi jet.  Conformal family: P^{ij} = eps^{ijk} psi*phi_k, and the
    derivative distributes over the product.
    """
    index = tuple(sorted(index))
    out = JetPolynomial.zero()
    for k in (1, 2, 3):
        sign = epsilon(i, j, k)
        if not sign:
            continue
        if mode == NABLA_PHI:
            out = out + JetPolynomial.from_monomial(
                (jet_var(PHI, merge(index, (k,))),), Fraction(sign))
        elif mode == PSI_NABLA_PHI:
            for left, right, count in binary_splits(index):
                mono = monomial_key((jet_var(PSI, left), jet_var(PHI, merge(right, (k,)))))
                out = out + JetPolynomial.from_monomial(mono, Fraction(sign * count))
        else:
            raise ValueError(f"unknown substitution mode {mode!r}")
    return out


def substitute_p(terms: Iterable[PTerm], mode: str = NABLA_PHI) -> JetPolynomial:
    """Rewrite a formal polynomial in Poisson-component derivatives into jets."""
    total = JetPolynomial.zero()
    for coeff, factors in terms:
        value = JetPolynomial.const(coeff)
        for index, i, j in factors:
            if value.is_zero:
                break
            value = value * substitute_factor(index, i, j, mode)
        total = total + value
    return total
