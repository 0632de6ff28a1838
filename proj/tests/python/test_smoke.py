# Copyright 2026 The psro-jbr Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import math

import pytest

import psro_jbr as pj


def kuhn_nash():
    """Equilibrium tables for Kuhn poker; player 0 earns -1/18."""
    game = pj.build_game("kuhn")
    bet = {
        0: {"J:": 0.0, "Q:": 0.0, "K:": 0.0, "J:pb": 0.0, "Q:pb": 1 / 3, "K:pb": 1.0},
        1: {"J:p": 1 / 3, "Q:p": 0.0, "K:p": 1.0, "J:b": 0.0, "Q:b": 1 / 3, "K:b": 1.0},
    }
    profile = []
    for p in range(2):
        rows = []
        for key in game.infostate_keys(p):
            b = bet[p][key]
            rows.append([1 - b, b])
        profile.append(rows)
    return game, profile


def test_kuhn_structure():
    game = pj.build_game("kuhn")
    assert game.num_players == 2
    assert game.num_infostates(0) == 6
    assert game.num_infostates(1) == 6
    assert game.id == "kuhn"


def test_uniform_payoffs_are_zero_sum():
    game = pj.build_game("leduc")
    values = pj.expected_payoff(game, game.uniform_profile())
    assert values[0] + values[1] == pytest.approx(0.0, abs=1e-12)


def test_kuhn_equilibrium_value_and_nashconv():
    game, profile = kuhn_nash()
    assert pj.expected_payoff(game, profile)[0] == pytest.approx(-1 / 18, abs=1e-12)
    assert pj.nashconv(game, profile) == pytest.approx(0.0, abs=1e-12)


def test_best_response_dominates_uniform():
    game = pj.build_game("kuhn")
    uniform = game.uniform_profile()
    br = pj.exact_best_response(game, 0, uniform)
    assert br["value"] >= pj.expected_payoff(game, uniform)[0]
    swapped = [br["policy"], uniform[1]]
    assert pj.expected_payoff(game, swapped)[0] == pytest.approx(br["value"], abs=1e-12)


def test_matching_pennies_prd():
    meta = pj.prd_matrix([[1.0, -1.0], [-1.0, 1.0]])
    for dist in meta:
        assert math.fsum(dist) == pytest.approx(1.0)
        assert max(abs(x - 0.5) for x in dist) <= 0.05


def test_short_psro_run():
    out = pj.run_psro("kuhn", method="jbr-dt", iterations=3, budget=500, seed=1, prd_steps=2000)
    assert out["method"] == "jbr-dt"
    records = out["records"]
    assert [r["iteration"] for r in records] == [1, 2, 3]
    assert records[-1]["cumulative_br_episodes"] == 3 * 500
    mins = [r["min_nashconv_so_far"] for r in records]
    assert mins == sorted(mins, reverse=True)


def test_theory_check_has_no_violations():
    report = pj.theory_check("matrix:0:3x3", trials=50, deltas=[0.1, 0.5], seed=2)
    assert [row["delta"] for row in report["rows"]] == [0.1, 0.5]
    assert all(row["violations"] == 0 for row in report["rows"])


def test_invalid_profile_raises():
    game = pj.build_game("kuhn")
    bad = game.uniform_profile()
    bad[0][0] = [0.9, 0.9]
    with pytest.raises(ValueError):
        pj.nashconv(game, bad)
