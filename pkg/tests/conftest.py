from apd.burnside.burnside import SubgroupSystem
from apd.burnside.catalog import catalog_group

import pytest


@pytest.fixture
def trivial_group():
    return catalog_group("1")


@pytest.fixture
def c2():
    return catalog_group("C2")


@pytest.fixture
def c3():
    return catalog_group("C3")


@pytest.fixture
def c4():
    return catalog_group("C4")


@pytest.fixture
def v4():
    return catalog_group("V4")


@pytest.fixture
def s3():
    return catalog_group("S3")


@pytest.fixture
def d8():
    return catalog_group("D8")


@pytest.fixture
def a4():
    return catalog_group("A4")


@pytest.fixture
def q8():
    return catalog_group("Q8")


@pytest.fixture
def c2_leftfree(c2):
    return SubgroupSystem.left_free(c2, c2)


@pytest.fixture
def c2_bifree(c2):
    return SubgroupSystem.bifree(c2, c2)


@pytest.fixture
def s3_leftfree(s3):
    return SubgroupSystem.left_free(s3, s3)


@pytest.fixture
def group_file(tmp_path):
    """Write a group file and return its path"""

    def write(text):
        path = tmp_path / "group.json"
        path.write_text(text, encoding="utf-8")
        return str(path)

    return write
