"""Independent checks for constructed star products.

Nothing here reuses the constructor's solver or gauge machinery: the Moyal
reference comes from its closed formula, associators from direct evaluation
on explicit polynomials, the Jacobi residual from the curl formula.  A
verification run produces a machine-readable report whose failing entries
each name a witness triple of polynomials, so a corrupted product is not
just flagged but exhibited.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from fractions import Fraction
from itertools import product as iproduct

from .cochains import Cochain, X_RING
from .jets import NABLA_PHI, JetPolynomial, substitute_factor
from .multiindex import MultiIndex, multiplicities
from .polynomials import XPoly, monomials_up_to, parse_poly
from .star import StarProduct


# -- Jacobi -----------------------------------------------------------------------

@dataclass
class PoissonVector:
    """The three independent components (P^{23}, P^{31}, P^{12})."""
    p23: XPoly
    p31: XPoly
    p12: XPoly

    @staticmethod
    def from_gradient(phi: XPoly) -> "PoissonVector":
        return PoissonVector(phi.x_derivative(1), phi.x_derivative(2), phi.x_derivative(3))

    @staticmethod
    def from_conformal(psi: XPoly, phi: XPoly) -> "PoissonVector":
        return PoissonVector(psi * phi.x_derivative(1), psi * phi.x_derivative(2),
                             psi * phi.x_derivative(3))

    def components(self) -> tuple[XPoly, XPoly, XPoly]:
        return (self.p23, self.p31, self.p12)


def jacobi_residual(p: PoissonVector) -> XPoly:
    """The dot product of the vector with its own curl; zero iff the bracket
    P^{ij} d_i f d_j g satisfies the Jacobi identity."""
    c1, c2, c3 = p.components()
    curl1 = c3.x_derivative(2) - c2.x_derivative(3)
    curl2 = c1.x_derivative(3) - c3.x_derivative(1)
    curl3 = c2.x_derivative(1) - c1.x_derivative(2)
    return c1 * curl1 + c2 * curl2 + c3 * curl3


def gradient_jacobi_residual(mode: str = NABLA_PHI) -> JetPolynomial:
    """Same residual with the potentials symbolic, proving the identity for
    every gradient (or conformal-gradient) vector at once."""
    comps = {}
    for i, j in ((2, 3), (3, 1), (1, 2)):
        comps[(i, j)] = substitute_factor((), i, j, mode)
    c1, c2, c3 = comps[(2, 3)], comps[(3, 1)], comps[(1, 2)]
    curl1 = c3.x_derivative(2) - c2.x_derivative(3)
    curl2 = c1.x_derivative(3) - c3.x_derivative(1)
    curl3 = c2.x_derivative(1) - c1.x_derivative(2)
    return c1 * curl1 + c2 * curl2 + c3 * curl3


# -- the Moyal reference -------------------------------------------------------------

def moyal_level(p: PoissonVector, k: int) -> Cochain:
    """Level k of the Weyl product for a constant vector, from the closed
    exponential formula: all index chains of length k, weight 1/(2^k k!)."""
    comps = {}
    for (i, j), c in (((2, 3), p.p23), ((3, 1), p.p31), ((1, 2), p.p12)):
        if c.total_degree() > 0:
            raise ValueError("the closed formula needs a constant vector")
        q = c.terms.get((0, 0, 0), Fraction(0))
        if q:
            comps[(i, j)] = q
            comps[(j, i)] = -q
    out = Cochain(2, X_RING)
    if k == 0:
        return Cochain.multiplication(X_RING)
    weight = Fraction(1, 2 ** k) / _factorial(k)
    for chain in iproduct(sorted(comps), repeat=k):
        coeff = weight
        for pair in chain:
            coeff *= comps[pair]
        left = tuple(sorted(i for i, _ in chain))
        right = tuple(sorted(j for _, j in chain))
        out.add_term((left, right), XPoly.const(coeff))
    return out


def _factorial(n: int) -> int:
    out = 1
    for i in range(2, n + 1):
        out *= i
    return out


def moyal_levels(p: PoissonVector, order: int) -> list[Cochain]:
    return [moyal_level(p, k) for k in range(order + 1)]


# -- series evaluation ----------------------------------------------------------------

def _levels_of(star) -> list[Cochain]:
    return star.levels if hasattr(star, "levels") else list(star)


def star_series(star, f: XPoly, g: XPoly) -> list[XPoly]:
    """Coefficients of the deformation parameter in f * g, one per level."""
    return [level.eval_args((f, g)) for level in _levels_of(star)]


def associator(star, f: XPoly, g: XPoly, h: XPoly,
               order: int | None = None) -> list[XPoly]:
    """Coefficients of (f*g)*h - f*(g*h) through the requested order."""
    levels = _levels_of(star)
    top = len(levels) - 1 if order is None else order
    if top > len(levels) - 1:
        raise ValueError("asking beyond the constructed order")
    out = []
    for j in range(top + 1):
        total = XPoly.zero()
        for a in range(j + 1):
            b = j - a
            left = levels[a].eval_args((levels[b].eval_args((f, g)), h))
            right = levels[a].eval_args((f, levels[b].eval_args((g, h))))
            total = total + left - right
        out.append(total)
    return out


def commutator_probe(star, f: XPoly, g: XPoly) -> list[XPoly]:
    """Coefficients of f * g - g * f; odd levels double, even levels cancel
    when the parity invariant holds."""
    fg = star_series(star, f, g)
    gf = star_series(star, g, f)
    return [a - b for a, b in zip(fg, gf)]


# -- the report -------------------------------------------------------------------

def _digest(payload) -> str:
    blob = json.dumps(payload, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def _minimal_arg(index: MultiIndex) -> XPoly:
    """The smallest monomial whose index-derivative is a nonzero constant."""
    return XPoly.monomial(multiplicities(index))


def _witness_from_slots(slots) -> list[str]:
    args = [str(_minimal_arg(index)) for index in slots]
    while len(args) < 3:
        args.append("1")
    return args[:3]


@dataclass
class CheckResult:
    name: str
    digest: str
    passed: bool
    residual: str = "0"
    witness: list[str] | None = None

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "inputsDigest": self.digest,
            "residual": self.residual,
            "pass": self.passed,
            "witness": self.witness,
        }


def _rhs(levels: list[Cochain], k: int) -> Cochain:
    total = Cochain(3, levels[1].ring)
    for l in range(1, k):
        total = total + levels[l].bracket(levels[k - l])
    return total.scale(Fraction(1, 2))


def verify_star(star: StarProduct, degree: int | None = None,
                probe_degree: int = 2) -> dict:
    """Full independent re-check of a star product; returns a report whose
    failing checks each name a witness triple.

    Structural checks (units, parity, level residuals) run in either ring.
    The associator scan and commutator probes run in the explicit ring over
    every monomial triple with total degree bounded by `degree` (default:
    the constructed order).
    """
    levels = star.levels
    order = star.order
    digest = _digest(star.to_json())
    checks: list[CheckResult] = []

    def check(name: str, passed: bool, residual="0", witness=None):
        checks.append(CheckResult(name, digest, passed, str(residual), witness))

    # unit law: level 0 is bare multiplication, higher levels kill constants
    unit_ok = levels[0] == Cochain.multiplication(star.ring)
    degenerate = [k for k in range(1, len(levels)) if not levels[k].is_normalized()]
    check("units", unit_ok and not degenerate,
          residual="levels " + ",".join(map(str, degenerate)) if degenerate else "0",
          witness=None if unit_ok and not degenerate else ["1", "1", "1"])

    for k in range(1, len(levels)):
        mirror = levels[k].reverse_args().scale(Fraction((-1) ** k))
        diff = levels[k] - mirror
        if diff.is_zero:
            check(f"parity-{k}", True)
        else:
            slots, coeff = diff.sorted_terms()[0]
            check(f"parity-{k}", False, residual=coeff,
                  witness=_witness_from_slots(slots))

    for k in range(2, len(levels)):
        residual = levels[k].hochschild_delta() - _rhs(levels, k)
        if residual.is_zero:
            check(f"residual-{k}", True)
            continue
        slots, coeff = residual.sorted_terms()[0]
        check(f"residual-{k}", False, residual=coeff,
              witness=_witness_from_slots(slots))

    if star.ring == X_RING:
        bound = order if degree is None else degree
        failed = None
        for f, g, h in _monomial_triples(bound):
            coeffs = associator(star, f, g, h, order)
            for j, c in enumerate(coeffs):
                if not c.is_zero:
                    failed = (f, g, h, j, c)
                    break
            if failed:
                break
        if failed:
            f, g, h, j, c = failed
            check("associator", False, residual=c, witness=[str(f), str(g), str(h)])
        else:
            check("associator", True)

        _commutator_checks(star, check, probe_degree)

    report = {
        "pass": all(c.passed for c in checks),
        "inputsDigest": digest,
        "checks": [c.to_json() for c in checks],
    }
    return report


def _monomial_triples(bound: int):
    """Every monomial triple with total degree at most the bound."""
    monos = monomials_up_to(bound)
    for f in monos:
        df = f.total_degree()
        for g in monos:
            dg = df + g.total_degree()
            if dg > bound:
                continue
            for h in monos:
                if dg + h.total_degree() <= bound:
                    yield f, g, h


def _commutator_checks(star: StarProduct, check, probe_degree: int) -> None:
    """First-order bracket agreement and evenness cancellation on samples."""
    phi = parse_poly(star.phi_source) if star.phi_source != "sym" else None
    psi = (parse_poly(star.psi_source)
           if star.psi_source not in (None, "sym") else None)
    vector = None
    if phi is not None:
        vector = (PoissonVector.from_conformal(psi, phi) if psi is not None
                  else PoissonVector.from_gradient(phi))
    brackets = {}
    if vector is not None:
        c1, c2, c3 = vector.components()
        brackets = {(1, 2): c3, (2, 3): c1, (3, 1): c2}
    pairs = [(XPoly.var(i), XPoly.var(j)) for i, j in ((1, 2), (2, 3), (3, 1))]
    pairs += [(m, XPoly.var(1)) for m in monomials_up_to(probe_degree)[:6]]
    for f, g in pairs:
        series = commutator_probe(star, f, g)
        evens = [series[k] for k in range(0, len(series), 2)]
        if any(not c.is_zero for c in evens):
            bad = next(c for c in evens if not c.is_zero)
            check("commutator-evenness", False, residual=bad,
                  witness=[str(f), str(g), "1"])
            return
    check("commutator-evenness", True)
    if vector is not None and len(star.levels) > 1:
        for (i, j), want in brackets.items():
            series = commutator_probe(star, XPoly.var(i), XPoly.var(j))
            got = series[1] if len(series) > 1 else XPoly.zero()
            diff = got - want
            if not diff.is_zero:
                check("commutator-bracket", False, residual=diff,
                      witness=[f"x{i}", f"x{j}", "1"])
                return
        check("commutator-bracket", True)
