import pytest

from chabtree.spec import preset


@pytest.fixture(autouse=True)
def _cache_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("CHABAUTY_CACHE_DIR", str(tmp_path / "cache"))


@pytest.fixture(scope="session")
def t3sym():
    return preset("t3sym")[1]


@pytest.fixture(scope="session")
def t3alt():
    return preset("t3alt")[1]


@pytest.fixture(scope="session")
def t3triv():
    return preset("t3triv")[1]


@pytest.fixture(scope="session")
def t3intrans():
    return preset("t3intrans")[1]


@pytest.fixture(scope="session")
def valency1():
    return preset("valency1")
