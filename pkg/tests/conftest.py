import pytest

from dilatekit.core.intset import IntSet
from dilatekit.settings import get_settings


@pytest.fixture(autouse=True)
def fresh_settings():
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture()
def small_ap():
    return IntSet([0, 1, 2, 3])


@pytest.fixture()
def two_class_set():
    # classes mod 3: {0, 3, 6, 9} and {1}
    return IntSet([0, 1, 3, 6, 9])


@pytest.fixture()
def write_set_file(tmp_path):
    def _write(values, name="A.txt"):
        path = tmp_path / name
        path.write_text("".join(f"{v}\n" for v in values), encoding="utf-8")
        return path
    return _write
