import hypothesis
import pytest

from shintani.groups import automorphism, cyclic, permutation_group

hypothesis.settings.register_profile("fast", max_examples=25)
hypothesis.settings.register_profile("thorough", max_examples=200)


@pytest.fixture(scope="session")
def s3():
    return permutation_group([(1, 0, 2), (1, 2, 0)])


@pytest.fixture(scope="session")
def d4():
    return permutation_group([(1, 2, 3, 0), (1, 0, 3, 2)])


@pytest.fixture(scope="session")
def z3():
    return cyclic(3)


@pytest.fixture(scope="session")
def z4():
    return cyclic(4)


@pytest.fixture(scope="session")
def z3_inv(z3):
    return automorphism(z3, [z3.index[2]])


@pytest.fixture(scope="session")
def z4_inv(z4):
    return automorphism(z4, [z4.index[3]])
