"""The oracle sweeps on small parameters."""

from __future__ import annotations

import pytest

from src.alon_tarsi import configure_limits
from src.validation import check_at_identity, check_cut_product, check_known_at_values, known_at_cases


def test_at_identity_sweep():
    result = check_at_identity(num_graphs=12, max_vertices=5, seed=3)
    assert result["passed"], result["mismatches"]
    assert result["graphs"] == 12
    assert result["orientations"] > 12
    assert "orientations" in result["proof"]


def test_at_identity_sampled_orientations():
    result = check_at_identity(num_graphs=4, max_vertices=5, seed=1, exhaustive_limit=4, samples=10)
    assert result["passed"]
    assert result["orientations"] <= 4 * 10


def test_cut_product_sweep():
    result = check_cut_product(num_trials=60, seed=2)
    assert result["passed"], result["mismatches"]
    assert result["trials"] == 60
    assert result["available"] is True
    assert result["full_cuts"] > 0
    assert result["cut_arcs"] > 60


def test_cut_product_keeps_whole_cut_under_cap():
    with pytest.raises(ValueError, match="above the cap"):
        check_cut_product(num_trials=1, max_part=5)
    configure_limits(cap_edges=6)
    result = check_cut_product(num_trials=20, max_part=2, seed=1)
    assert result["passed"]
    assert result["cut_arcs"] <= 20 * 4


def test_known_cases_cover_cycles_and_cliques():
    names = [name for name, _, _ in known_at_cases()]
    assert "C3" in names and "C8" in names and "K5" in names
    expected = {name: value for name, _, value in known_at_cases()}
    assert expected["C6"] == 2 and expected["C7"] == 3 and expected["K4"] == 4


def test_known_at_values():
    result = check_known_at_values()
    assert result["passed"], [c for c in result["cases"] if not c["ok"]]
    assert all(c["ok"] for c in result["cases"])
