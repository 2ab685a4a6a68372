"""Multidifferential operators on polynomials, with exact coefficients.

A cochain of arity m is a finite sum of terms ``c * d_{I_1} x ... x d_{I_m}``
acting on m polynomial arguments, where each I_j is a sorted derivative
multi-index (a "slot") and the coefficient c lives in one of two rings: the
polynomial ring in x1..x3, or the formal jet ring of the potentials.  The
representation is a dict from slot tuples to coefficients, so operator
equality is structural equality.

The module implements the operations the deformation recursion needs: the
Hochschild coboundary, whose middle terms expand argument products by the
Leibniz rule; the Gerstenhaber insertion product and bracket, whose
insertions differentiate inner coefficients through the total x-derivative
of the ring; argument-degree filtering; argument reversal; and the
alternating average over the arguments of a trilinear operator.

The coboundary and the insertion product both create transient empty slots
(an argument multiplied without differentiation).  For inputs whose slots
are all nonempty those contributions cancel in pairs, but they are kept in
general; the bare multiplication cochain itself lives outside the
normalized class and needs them.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import permutations
from typing import Callable, Iterable, Iterator, Sequence

from .jets import JetPolynomial
from .multiindex import MultiIndex, binary_splits, merge, splits
from .polynomials import XPoly

Slots = tuple[MultiIndex, ...]

JET_RING = "jet"
X_RING = "x"

_RINGS = {JET_RING: JetPolynomial, X_RING: XPoly}

_S3 = tuple(permutations((0, 1, 2)))


def _perm_sign(perm: tuple[int, ...]) -> int:
    sign = 1
    for a in range(len(perm)):
        for b in range(a + 1, len(perm)):
            if perm[a] > perm[b]:
                sign = -sign
    return sign


def ring_class(ring: str):
    try:
        return _RINGS[ring]
    except KeyError:
        raise ValueError(f"unknown coefficient ring {ring!r}") from None


def coeff_derivative(coeff, index: MultiIndex):
    """Iterated total x-derivative of a ring element."""
    for direction in index:
        coeff = coeff.x_derivative(direction)
    return coeff


def slot_total(slots: Slots) -> int:
    return sum(len(s) for s in slots)


def delta_terms(slots: Slots) -> Iterator[tuple[Slots, Fraction]]:
    """Slot expansion of the Hochschild coboundary for one input term.

    Coefficients are untouched by the coboundary, so the expansion depends
    on the slots alone; the solver reuses this to build shape systems.
    """
    n = len(slots)
    yield ((),) + slots, Fraction(1)
    for i in range(n):
        sign = -Fraction((-1) ** i)
        for left, right, count in binary_splits(slots[i]):
            yield slots[:i] + (left, right) + slots[i + 1:], sign * count
    yield slots + ((),), Fraction((-1) ** (n - 1))


class Cochain:
    """Finite multidifferential operator with exact ring coefficients."""

    __slots__ = ("arity", "ring", "terms")

    def __init__(self, arity: int, ring: str, terms: dict[Slots, object] | None = None):
        if arity < 1:
            raise ValueError("cochain arity must be at least 1")
        ring_class(ring)
        self.arity = arity
        self.ring = ring
        self.terms: dict[Slots, object] = terms or {}

    # -- construction -----------------------------------------------------

    @staticmethod
    def zero(arity: int, ring: str) -> "Cochain":
        return Cochain(arity, ring)

    @staticmethod
    def single(arity: int, ring: str, slots: Slots, coeff) -> "Cochain":
        out = Cochain(arity, ring)
        out.add_term(slots, coeff)
        return out

    @staticmethod
    def multiplication(ring: str) -> "Cochain":
        """The pointwise product as a bilinear operator."""
        return Cochain(2, ring, {((), ()): ring_class(ring).one()})

    def add_term(self, slots: Slots, coeff) -> None:
        if len(slots) != self.arity:
            raise ValueError(f"slot tuple {slots!r} does not match arity {self.arity}")
        slots = tuple(tuple(sorted(s)) for s in slots)
        current = self.terms.get(slots)
        total = coeff if current is None else current + coeff
        if total.is_zero:
            self.terms.pop(slots, None)
        else:
            self.terms[slots] = total

    # -- linear structure --------------------------------------------------

    def _check_compatible(self, other: "Cochain") -> None:
        if self.arity != other.arity or self.ring != other.ring:
            raise ValueError("cochain arity or ring mismatch")

    def __add__(self, other: "Cochain") -> "Cochain":
        self._check_compatible(other)
        out = Cochain(self.arity, self.ring, dict(self.terms))
        for slots, c in other.terms.items():
            out.add_term(slots, c)
        return out

    def __sub__(self, other: "Cochain") -> "Cochain":
        return self + other.scale(-1)

    def __neg__(self) -> "Cochain":
        return self.scale(-1)

    def scale(self, q: Fraction | int) -> "Cochain":
        q = Fraction(q)
        if not q:
            return Cochain(self.arity, self.ring)
        return Cochain(self.arity, self.ring,
                       {slots: c.scale(q) for slots, c in self.terms.items()})

    def ring_scale(self, value) -> "Cochain":
        """Multiply every coefficient by a ring element."""
        out = Cochain(self.arity, self.ring)
        for slots, c in self.terms.items():
            out.add_term(slots, c * value)
        return out

    def map_coefficients(self, fn: Callable, ring: str | None = None) -> "Cochain":
        out = Cochain(self.arity, ring or self.ring)
        for slots, c in self.terms.items():
            image = fn(c)
            if not image.is_zero:
                out.add_term(slots, image)
        return out

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        return (isinstance(other, Cochain) and self.arity == other.arity
                and self.ring == other.ring and self.terms == other.terms)

    def coefficient(self, slots: Slots):
        slots = tuple(tuple(sorted(s)) for s in slots)
        return self.terms.get(slots, ring_class(self.ring).zero())

    def sorted_terms(self) -> list[tuple[Slots, object]]:
        return sorted(self.terms.items(),
                      key=lambda kv: (tuple(len(s) for s in kv[0]), kv[0]))

    def term_count(self) -> int:
        return len(self.terms)

    # -- structure of slots -------------------------------------------------

    def is_normalized(self) -> bool:
        """True when no term applies an argument without differentiating it."""
        return all(len(s) >= 1 for slots in self.terms for s in slots)

    def degree_part(self, degrees: tuple[int, ...]) -> "Cochain":
        """Terms whose slot lengths match the given argument degrees."""
        if len(degrees) != self.arity:
            raise ValueError("degree tuple does not match arity")
        picked = {slots: c for slots, c in self.terms.items()
                  if tuple(len(s) for s in slots) == degrees}
        return Cochain(self.arity, self.ring, picked)

    def max_slot_degree(self) -> int:
        return max((len(s) for slots in self.terms for s in slots), default=0)

    def reverse_args(self) -> "Cochain":
        out = Cochain(self.arity, self.ring)
        for slots, c in self.terms.items():
            out.add_term(slots[::-1], c)
        return out

    # -- differential and bracket -------------------------------------------

    def hochschild_delta(self) -> "Cochain":
        """Hochschild coboundary; raises arity by one, never touches coefficients."""
        out = Cochain(self.arity + 1, self.ring)
        for slots, c in self.terms.items():
            for new_slots, q in delta_terms(slots):
                out.add_term(new_slots, c.scale(q))
        return out

    def insert(self, other: "Cochain") -> "Cochain":
        """Gerstenhaber insertion product: sum over compositions of self with
        other placed into one argument, with alternating degree signs.

        Distributing a slot of self over the composite argument hits both
        the inner coefficient (total x-derivative) and the inner slots, with
        multinomial multiplicities.
        """
        if self.ring != other.ring:
            raise ValueError("cochain ring mismatch")
        p, q = self.arity, other.arity
        inner_degree = q - 1
        out = Cochain(p + q - 1, self.ring)
        for i in range(p):
            sign = Fraction((-1) ** (i * inner_degree))
            for slots_m, c_m in self.terms.items():
                for pieces, count in splits(slots_m[i], q + 1):
                    weight = sign * count
                    on_coeff, on_slots = pieces[0], pieces[1:]
                    for slots_n, c_n in other.terms.items():
                        inner = coeff_derivative(c_n, on_coeff)
                        if inner.is_zero:
                            continue
                        new_slots = (slots_m[:i]
                                     + tuple(merge(t, d) for t, d in zip(slots_n, on_slots))
                                     + slots_m[i + 1:])
                        out.add_term(new_slots, (c_m * inner).scale(weight))
        return out

    def bracket(self, other: "Cochain") -> "Cochain":
        """Gerstenhaber bracket on shifted degrees (arity minus one)."""
        m, n = self.arity - 1, other.arity - 1
        result = self.insert(other)
        swap = other.insert(self).scale((-1) ** (m * n))
        return result - swap

    # -- trilinear alternation ------------------------------------------------

    def antisymmetrize(self) -> "Cochain":
        """Signed average over all orderings of the three arguments."""
        if self.arity != 3:
            raise ValueError("alternation is defined for trilinear operators")
        out = Cochain(3, self.ring)
        sixth = Fraction(1, 6)
        for slots, c in self.terms.items():
            for perm in _S3:
                permuted = tuple(slots[p] for p in perm)
                out.add_term(permuted, c.scale(sixth * _perm_sign(perm)))
        return out

    # -- evaluation -----------------------------------------------------------

    def specialize(self, phi: XPoly | None, psi: XPoly | None = None) -> "Cochain":
        """Substitute explicit potentials into jet coefficients."""
        if self.ring != JET_RING:
            raise ValueError("specialize applies to jet-ring cochains")
        return self.map_coefficients(lambda c: c.eval_jets(phi, psi), ring=X_RING)

    def eval_args(self, args: Sequence[XPoly]) -> XPoly:
        """Apply the operator to explicit polynomial arguments."""
        if self.ring != X_RING:
            raise ValueError("eval_args applies to x-ring cochains")
        if len(args) != self.arity:
            raise ValueError("argument count does not match arity")
        total = XPoly.zero()
        for slots, c in self.terms.items():
            value = c
            for s, f in zip(slots, args):
                if value.is_zero:
                    break
                value = value * f.derivative(s)
            total = total + value
        return total

    # -- serialization ----------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "arity": self.arity,
            "ring": self.ring,
            "terms": [
                {"coeff": c.to_json(), "slots": [list(s) for s in slots]}
                for slots, c in self.sorted_terms()
            ],
        }

    @staticmethod
    def from_json(data: dict) -> "Cochain":
        cls = ring_class(data["ring"])
        out = Cochain(data["arity"], data["ring"])
        for item in data["terms"]:
            slots = tuple(tuple(v) for v in item["slots"])
            out.add_term(slots, cls.from_json(item["coeff"]))
        return out

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for slots, c in self.sorted_terms():
            shape = " x ".join("d_" + ("".join(map(str, s)) or "0") for s in slots)
            parts.append(f"({c}) {shape}")
        return "  +  ".join(parts)

    __repr__ = __str__


def epsilon_cochain(ring: str) -> "Cochain":
    """Fully antisymmetric first-order trilinear operator, determinant of
    first derivatives; unit coefficient on the identity slot ordering."""
    one = ring_class(ring).one()
    out = Cochain(3, ring)
    for perm in _S3:
        slots = ((perm[0] + 1,), (perm[1] + 1,), (perm[2] + 1,))
        out.add_term(slots, one.scale(_perm_sign(perm)))
    return out
