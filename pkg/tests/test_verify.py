from fractions import Fraction
from random import Random

import pytest

from starq.cochains import Cochain, X_RING
from starq.jets import NABLA_PHI, PSI_NABLA_PHI
from starq.polynomials import XPoly, parse_poly
from starq.star import StarProduct, build_star
from starq.verify import (PoissonVector, associator, commutator_probe,
                          gradient_jacobi_residual, jacobi_residual,
                          moyal_level, moyal_levels, star_series, verify_star)


def test_jacobi_residual_reference_values():
    grad = PoissonVector.from_gradient(parse_poly("x1*x2*x3"))
    assert jacobi_residual(grad).is_zero
    rotation = PoissonVector(parse_poly("x3"), parse_poly("x1"), parse_poly("x2"))
    assert jacobi_residual(rotation) == parse_poly("x1 + x2 + x3")
    conformal = PoissonVector.from_conformal(parse_poly("x1"), parse_poly("x2"))
    assert jacobi_residual(conformal).is_zero


def test_jacobi_residual_symbolic_in_both_modes():
    assert gradient_jacobi_residual(NABLA_PHI).is_zero
    assert gradient_jacobi_residual(PSI_NABLA_PHI).is_zero


def test_moyal_level_examples():
    p = PoissonVector(XPoly.zero(), XPoly.zero(), XPoly.one())
    m2 = moyal_level(p, 2)
    eighth = XPoly.const(Fraction(1, 8))
    quarter = XPoly.const(Fraction(-1, 4))
    assert m2.coefficient(((1, 1), (2, 2))) == eighth
    assert m2.coefficient(((1, 2), (1, 2))) == quarter
    assert m2.coefficient(((2, 2), (1, 1))) == eighth
    assert m2.term_count() == 3
    assert moyal_level(p, 0) == Cochain.multiplication(X_RING)


def test_moyal_level_rejects_nonconstant():
    p = PoissonVector.from_gradient(parse_poly("x1*x2*x3"))
    with pytest.raises(ValueError):
        moyal_level(p, 1)


def test_moyal_self_associativity_spot():
    p = PoissonVector(XPoly.zero(), XPoly.zero(), XPoly.one())
    levels = moyal_levels(p, 3)
    f, g, h = parse_poly("x1^2"), parse_poly("x2"), parse_poly("x1*x2")
    assert all(c.is_zero for c in associator(levels, f, g, h))


def test_associator_respects_order_bound(cubic_star):
    with pytest.raises(ValueError):
        associator(cubic_star, XPoly.var(1), XPoly.var(2), XPoly.var(3), order=9)


def test_commutator_probe_examples(x3_star4, sphere_star):
    series = commutator_probe(x3_star4, XPoly.var(1), XPoly.var(2))
    assert [str(c) for c in series] == ["0", "1", "0", "0", "0"]
    series = commutator_probe(sphere_star, XPoly.var(1), XPoly.var(2))
    assert series[1] == parse_poly("x3")
    assert all(series[k].is_zero for k in (0, 2))
    same = commutator_probe(sphere_star, XPoly.var(2), XPoly.var(2))
    assert all(c.is_zero for c in same)


def test_star_series_level_zero_is_product(cubic_star):
    f, g = parse_poly("x1 + x2"), parse_poly("x3^2")
    series = star_series(cubic_star, f, g)
    assert series[0] == f * g


def test_verify_star_accepts_genuine_products(cubic_star, sphere_star):
    for star in (cubic_star, sphere_star):
        report = verify_star(star)
        assert report["pass"]
        names = {c["name"] for c in report["checks"]}
        assert {"units", "parity-1", "residual-2", "associator",
                "commutator-evenness", "commutator-bracket"} <= names
        assert all(c["residual"] == "0" for c in report["checks"])


def test_verify_star_structural_checks_on_jet_ring(sym_star3):
    report = verify_star(sym_star3)
    assert report["pass"]
    names = {c["name"] for c in report["checks"]}
    assert "associator" not in names  # no explicit arguments in the jet ring
    assert "residual-3" in names


def _mutate(star: StarProduct, level: int, slots, bump) -> StarProduct:
    copy = StarProduct.from_json(star.to_json())
    coeff = copy.levels[level].terms[slots]
    copy.levels[level].terms[slots] = coeff + bump
    return copy


def test_mutation_of_unit_level_names_constant_triple(cubic_star):
    bad = _mutate(cubic_star, 0, ((), ()), XPoly.const(Fraction(1, 2)))
    report = verify_star(bad)
    assert not report["pass"]
    failing = next(c for c in report["checks"] if not c["pass"])
    assert failing["name"] == "units"
    assert failing["witness"] == ["1", "1", "1"]


def test_mutation_off_diagonal_breaks_parity(cubic_star):
    slots = ((1,), (2,))
    bad = _mutate(cubic_star, 1, slots, XPoly.var(1))
    report = verify_star(bad)
    failing = next(c for c in report["checks"] if not c["pass"])
    assert failing["name"] == "parity-1"
    assert failing["witness"] is not None


def test_mutation_on_diagonal_breaks_residual(cubic_star):
    # a diagonal slot pair is parity-invariant at even levels; the recursion
    # residual is what exposes it, naming an associator witness triple
    diagonal = next(s for s in cubic_star.levels[2].terms if s == s[::-1])
    bad = _mutate(cubic_star, 2, diagonal, XPoly.const(Fraction(1, 3)))
    report = verify_star(bad)
    assert not report["pass"]
    failing = next(c for c in report["checks"] if not c["pass"])
    assert failing["name"] == "residual-2"
    assert failing["witness"] is not None and len(failing["witness"]) == 3


def test_mutated_residual_witness_is_a_real_associator_failure(cubic_star):
    diagonal = next(s for s in cubic_star.levels[2].terms if s == s[::-1])
    bad = _mutate(cubic_star, 2, diagonal, XPoly.const(Fraction(1, 3)))
    report = verify_star(bad)
    failing = next(c for c in report["checks"] if not c["pass"])
    f, g, h = (parse_poly(w) for w in failing["witness"])
    coeffs = associator(bad, f, g, h)
    assert any(not c.is_zero for c in coeffs)


def test_report_shape(cubic_star):
    report = verify_star(cubic_star)
    assert set(report) == {"pass", "inputsDigest", "checks"}
    for check in report["checks"]:
        assert set(check) == {"name", "inputsDigest", "residual", "pass",
                              "witness"}
        assert check["inputsDigest"] == report["inputsDigest"]
