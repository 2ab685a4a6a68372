import pytest

from starq.jets import NABLA_PHI
from starq.polynomials import parse_poly
from starq.star import build_star


@pytest.fixture(scope="session")
def sym_star3():
    """Symbolic gradient-mode product through level 3."""
    return build_star(NABLA_PHI, 3)


@pytest.fixture(scope="session")
def cubic_star():
    """Explicit product for the cubic potential through level 3."""
    return build_star(NABLA_PHI, 3, phi=parse_poly("x1*x2*x3"))


@pytest.fixture(scope="session")
def x3_star4():
    """Explicit product for the linear potential through level 4."""
    return build_star(NABLA_PHI, 4, phi=parse_poly("x3"))


@pytest.fixture(scope="session")
def sphere_star():
    """Explicit product for the rotationally symmetric quadratic potential."""
    return build_star(NABLA_PHI, 3, phi=parse_poly("1/2*(x1^2+x2^2+x3^2)"))
