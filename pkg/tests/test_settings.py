import pytest

from dilatekit.errors import ConfigError
from dilatekit.settings import Settings, get_settings


def test_defaults(monkeypatch):
    for name in Settings.model_fields:
        monkeypatch.delenv("DILATEKIT_" + name.upper(), raising=False)
    s = get_settings()
    assert s.search_budget == 10**7
    assert s.witness_cap == 64
    assert s.echo_limit == 1000
    assert s.threads >= 1


def test_environment_overrides(monkeypatch):
    monkeypatch.setenv("DILATEKIT_SEARCH_BUDGET", "500")
    monkeypatch.setenv("DILATEKIT_THREADS", " 3 ")
    s = get_settings()
    assert (s.search_budget, s.threads) == (500, 3)


def test_blank_values_fall_back_to_defaults(monkeypatch):
    monkeypatch.setenv("DILATEKIT_WITNESS_CAP", "  ")
    assert get_settings().witness_cap == 64


@pytest.mark.parametrize("name,value", [("THREADS", "0"), ("SEARCH_BUDGET", "lots")])
def test_invalid_values(monkeypatch, name, value):
    monkeypatch.setenv("DILATEKIT_" + name, value)
    with pytest.raises(ConfigError):
        get_settings()


def test_budget_feeds_search(monkeypatch):
    from dilatekit.errors import BudgetExceededError
    from dilatekit.services.search import SearchSpec, extremal_min

    monkeypatch.setenv("DILATEKIT_SEARCH_BUDGET", "5")
    with pytest.raises(BudgetExceededError):
        extremal_min(SearchSpec(k=3, set_size=3, universe_bound=8))
