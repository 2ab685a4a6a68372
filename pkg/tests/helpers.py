"""Shared generators for randomized tests."""

from fractions import Fraction
from random import Random

from starq.cochains import Cochain, JET_RING, X_RING
from starq.jets import JetPolynomial, phi_jet, psi_jet
from starq.polynomials import XPoly

_DIRS = (1, 2, 3)


def random_index(rng: Random, max_len: int, min_len: int = 0):
    return tuple(sorted(rng.choice(_DIRS) for _ in range(rng.randint(min_len, max_len))))


def random_fraction(rng: Random) -> Fraction:
    return Fraction(rng.randint(-6, 6), rng.randint(1, 4))


def random_jet_coeff(rng: Random, max_factors: int = 2) -> JetPolynomial:
    total = JetPolynomial.zero()
    for _ in range(rng.randint(1, 2)):
        factors = []
        for _ in range(rng.randint(0, max_factors)):
            if rng.random() < 0.5:
                factors.append(phi_jet(*random_index(rng, 2, min_len=1)))
            else:
                factors.append(psi_jet(*random_index(rng, 2)))
        mono = JetPolynomial.one()
        for f in factors:
            mono = mono * JetPolynomial.variable(f)
        total = total + mono.scale(random_fraction(rng))
    return total


def random_x_coeff(rng: Random, max_degree: int = 2) -> XPoly:
    total = XPoly.zero()
    for _ in range(rng.randint(1, 2)):
        exp = tuple(rng.randint(0, max_degree) for _ in range(3))
        if sum(exp) > max_degree:
            exp = (rng.randint(0, 1), 0, rng.randint(0, 1))
        total = total + XPoly.monomial(exp, random_fraction(rng))
    return total


def random_cochain(rng: Random, arity: int, ring: str = JET_RING,
                   max_slot_degree: int = 4, terms: int = 3) -> Cochain:
    out = Cochain(arity, ring)
    for _ in range(terms):
        slots = tuple(random_index(rng, max_slot_degree) for _ in range(arity))
        if ring == JET_RING:
            out.add_term(slots, random_jet_coeff(rng))
        else:
            out.add_term(slots, random_x_coeff(rng))
    return out
