import pytest

from bstark.field import IdealF, make_field
from bstark.rayclass import RayClassGroup
from bstark.zeta import build_domain


@pytest.fixture(scope="session")
def F5():
    return make_field(5)


@pytest.fixture(scope="session")
def F2():
    return make_field(2)


@pytest.fixture(scope="session")
def F13():
    return make_field(13)


@pytest.fixture(scope="session")
def default_setup(F5):
    """The spec's default configuration: d=5, n=(3), p=7, ell=11."""
    n3 = IdealF(F5, F5.elem(3))
    rcg = RayClassGroup(F5, n3)
    domain, su = build_domain(F5, n3)
    ell = F5.primes_above(11)[0]
    return {"ctx": F5, "conductor": n3, "rcg": rcg, "domain": domain,
            "unit": su, "ell": ell, "p": 7}


@pytest.fixture(scope="session")
def demo_pipeline(F2):
    """The reconstructible demo configuration: d=2, n=(2), p=5, ell=7."""
    from bstark.pipeline import PipelineContext
    n2 = IdealF(F2, F2.elem(2))
    return PipelineContext(F2, n2, 5, 7)
