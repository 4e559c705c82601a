import pytest

from dilatekit.core.intset import IntSet
from dilatekit.errors import ConfigError, InvalidModulusError
from dilatekit.services import bounds
from dilatekit.services.reports import BoundReport, SweepSummary
from dilatekit.services.sweeps import (
    evaluate_set,
    exhaustive_sweep,
    random_sweep,
    verify_chowla,
    verify_graph,
    verify_l6,
    verify_l8,
    verify_lemmas,
    verify_thm,
)


def test_chowla_small_moduli():
    s = verify_chowla(max_n=6)
    assert not s.violations
    assert s.instances_checked == sum(((1 << n) - 1) ** 2 for n in range(2, 7))
    assert 0 < s.vacuous < s.instances_checked
    assert s.min_margin >= 0


def test_chowla_is_independent_of_worker_count():
    assert verify_chowla(max_n=5, n_jobs=2) == verify_chowla(max_n=5)


def test_stabilizer_equivalence_small_moduli():
    s = verify_l6(max_n=8)
    assert not s.violations
    assert s.instances_checked == sum(((1 << n) - 1) * (n - 1) for n in range(2, 9))


def test_lemma8_for_six():
    s = verify_l8((6,))
    assert not s.violations
    assert 0 < s.vacuous < s.instances_checked


def test_lemma8_rejects_prime_modulus():
    with pytest.raises(InvalidModulusError):
        verify_l8((5,))


def test_graph_lemma_small_universe():
    s = verify_graph(universe=8, ks=(3, 4))
    assert not s.violations
    assert s.instances_checked == 2 * ((1 << 8) - 1)
    assert s.vacuous == 0


def test_lemma_checkers_small_universe():
    summaries = {s.lemma: s for s in verify_lemmas(universe=9, ks=(3,))}
    for name in ("2full", "imp", "da"):
        assert not summaries[name].violations, name
    assert summaries["imp2"].vacuous == summaries["imp2"].instances_checked


def test_theorem_below_threshold_is_vacuous():
    s = exhaustive_sweep(["thm"], [3], universe=6)["thm"]
    assert s.vacuous == s.instances_checked == (1 << 6) - 1
    assert not s.violations


def test_modular_names_are_not_set_sweeps():
    with pytest.raises(ConfigError):
        exhaustive_sweep(["chowla"], [3], universe=4)


def test_theorem_with_hypotheses_met():
    s = verify_thm(k=3, size=220, samples=3, universe=10**5, seed=1)
    assert s.seed == 1
    assert s.instances_checked == 3 and s.vacuous == 0
    assert not s.violations and s.min_margin >= 0


def test_random_sweep_is_deterministic():
    first = random_sweep(["thm", "graph"], 3, [20, 30], 4, 500, seed=7)
    again = random_sweep(["thm", "graph"], 3, [20, 30], 4, 500, seed=7, n_jobs=2)
    assert first == again
    assert first["graph"].instances_checked == 8


def test_random_sweep_validates_sizes():
    with pytest.raises(ConfigError):
        random_sweep(["thm"], 3, [50], 2, 10, seed=0)


def test_failed_bound_is_confirmed_by_oracle(monkeypatch):
    def impossible(A, k):
        return BoundReport.build("thm", bounds.two_k_size(A, k), 10**9, k=k, size=len(A))

    monkeypatch.setitem(bounds.SET_BOUNDS, "thm", impossible)
    out = {"thm": SweepSummary(lemma="thm")}
    evaluate_set(["thm"], IntSet([0, 1, 3]), 3, out)
    [violation] = out["thm"].violations
    assert violation.confirmed is True
    assert violation.instance == {"k": 3, "A": [0, 1, 3]}


@pytest.mark.slow
def test_acceptance_modular_sweeps():
    assert not verify_chowla(max_n=10, n_jobs=-1).violations
    assert not verify_l6(max_n=12, n_jobs=-1).violations
    assert not verify_l8((6, 9, 10), n_jobs=-1).violations


@pytest.mark.slow
def test_acceptance_graph_sweep():
    assert not verify_graph(universe=13, ks=(3, 4, 5, 6), n_jobs=-1).violations


@pytest.mark.slow
def test_acceptance_lemma_sweeps():
    for s in verify_lemmas(universe=13, ks=(3, 9, 15), n_jobs=-1):
        assert not s.violations, s.lemma


def test_stabilizer_sweep_covers_unit_shifts():
    # n = 2, 3: every nonzero alpha is a unit
    s = verify_l6(max_n=3)
    assert not s.violations
    assert s.instances_checked == 3 * 1 + 7 * 2


@pytest.mark.slow
@pytest.mark.parametrize("k", [9, 15])
def test_beyond_threshold_exhaustive_sweeps(k):
    lemmas = exhaustive_sweep(["2full", "imp", "imp2", "da"], [k], universe=17, n_jobs=-1)
    for name, s in lemmas.items():
        assert s.instances_checked > 0
        assert not s.violations, name
    thm = exhaustive_sweep(["thm"], [k], universe=17, n_jobs=-1, ignore_hypotheses=True)["thm"]
    assert thm.instances_checked == (1 << 17) - 1
    assert all(v.confirmed for v in thm.violations)


@pytest.mark.slow
@pytest.mark.parametrize("k", [9, 15])
def test_beyond_threshold_random_sweeps(k):
    out = random_sweep(["thm", "da", "2full", "imp", "imp2"], k, [50, 200, 500], 5, 10**4, seed=k,
                       n_jobs=-1, ignore_hypotheses=True)
    assert all(v.confirmed for v in out["thm"].violations)
    assert all(v.confirmed for v in out["da"].violations)
    for name in ("2full", "imp", "imp2"):
        assert out[name].instances_checked > 0
        assert not out[name].violations, name
