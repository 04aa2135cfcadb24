from __future__ import annotations

import numpy as np
import pytest

from swarmsearch.world import (ProbabilityMap, RateParams, ScenarioParams, SensorModel,
                               TargetSet, deplete, generate_scenario, occurrence_rates,
                               prior_from_elevation, sample_target_positions,
                               sensed_cells, update_found)


def footprint_hits(sample, target, half_side):
    return (abs(sample[0] - target[0]) <= half_side + 1e-12
            and abs(sample[1] - target[1]) <= half_side + 1e-12)


class TestProbabilityMap:
    def test_validation(self):
        with pytest.raises(ValueError):
            ProbabilityMap(np.array([[1.0, -0.5]]), 1.0)
        with pytest.raises(ValueError):
            ProbabilityMap(np.ones((2, 2)), 0.0)
        with pytest.raises(ValueError):
            ProbabilityMap(np.ones(4), 1.0)

    def test_cell_geometry(self):
        pm = ProbabilityMap(np.ones((4, 6)), 2.0)
        assert pm.extent == (12.0, 8.0)
        assert pm.cell_of((0.0, 0.0)) == (0, 0)
        assert pm.cell_of((12.0, 8.0)) == (5, 3)  # border clips inward
        assert np.allclose(pm.cell_center(1, 2), [3.0, 5.0])

    def test_csv_roundtrip(self, tmp_path):
        rng = np.random.default_rng(3)
        pm = ProbabilityMap(rng.random((5, 7)), 1.0)
        path = tmp_path / "grid.csv"
        pm.to_csv(path)
        back = np.loadtxt(path, delimiter=",")
        assert np.array_equal(back, pm.values)


class TestGenerateScenario:
    def test_identical_seed_identical_output(self):
        a = generate_scenario(7, 60, 50, 1.0, 10)
        b = generate_scenario(7, 60, 50, 1.0, 10)
        assert np.array_equal(a[0].values, b[0].values)
        assert np.array_equal(a[1].positions, b[1].positions)
        assert np.array_equal(a[2].elevation, b[2].elevation)

    def test_different_seed_differs(self):
        a = generate_scenario(7, 60, 50, 1.0, 10)
        b = generate_scenario(8, 60, 50, 1.0, 10)
        assert not np.array_equal(a[0].values, b[0].values)

    def test_constant_elevation_gives_uniform_prior(self):
        elevation = np.full((10, 20), 0.3)
        pm = prior_from_elevation(elevation, RateParams(), 1.0)
        assert np.allclose(pm.values, 1.0 / 200.0)

    def test_prior_is_normalized_and_nonnegative(self):
        pm, _, _ = generate_scenario(3, 80, 80, 1.0, 5)
        assert pm.total_mass() == pytest.approx(1.0)
        assert (pm.values >= 0).all()

    def test_targets_inside_workspace_and_in_positive_cells(self):
        pm, targets, _ = generate_scenario(5, 50, 50, 1.0, 30)
        for pos in targets.positions:
            assert pm.contains(pos)
            ix, iy = pm.cell_of(pos)
            assert pm.values[iy, ix] > 0
        assert targets.found_count == 0

    def test_too_many_targets_rejected(self):
        with pytest.raises(ValueError, match="cannot place"):
            generate_scenario(1, 3, 3, 1.0, 10)
        with pytest.raises(ValueError):
            generate_scenario(1, 10, 10, 1.0, 0)

    def test_target_histogram_follows_rate_field(self):
        # 1000 re-draws of the target cells on a fixed seed-7 field; the
        # empirical histogram must track the rate field
        _, _, scen = generate_scenario(7, 100, 100, 1.0, 20)
        # independently recomputed rates (same formula, separate code path)
        rates = np.exp(scen.rate_params.a
                       - scen.rate_params.b * np.abs(scen.elevation
                                                     - scen.rate_params.e_star))
        rates[rates < 0.02 * rates.max()] = 0.0
        counts = np.zeros(rates.size)
        rng = np.random.default_rng(123)
        for _ in range(1000):
            pos = sample_target_positions(rates, 1.0, 20, rng)
            cells = pos.astype(int)
            counts[cells[:, 1] * 100 + cells[:, 0]] += 1
        r = np.corrcoef(counts, rates.ravel())[0, 1]
        assert r > 0.8
        # chi-square against the uniform null over the positive-support cells
        support = rates.ravel() > 0
        observed = counts[support]
        expected = observed.sum() / support.sum()
        chi2_uniform = ((observed - expected) ** 2 / expected).sum()
        # rate-proportional expectation fits far better than uniform
        expected_rate = observed.sum() * rates.ravel()[support] / rates.ravel()[support].sum()
        chi2_rate = ((observed - expected_rate) ** 2 / expected_rate).sum()
        assert chi2_rate < 0.5 * chi2_uniform
        assert counts[~support].sum() == 0

    def test_rate_floor_creates_zero_support(self):
        pm, _, _ = generate_scenario(7, 100, 100, 1.0, 20)
        assert (pm.values == 0).any()
        assert (pm.values > 0).any()


class TestSensedCells:
    def test_interior_footprint(self, uniform_map):
        # 11x11 grid, position at the center cell's center
        cells = sensed_cells((5.5, 5.5), SensorModel(2.5), uniform_map)
        assert len(cells) == 25
        assert {tuple(c) for c in cells} == {(ix, iy) for ix in range(3, 8)
                                             for iy in range(3, 8)}

    def test_corner_clipping(self, uniform_map):
        cells = sensed_cells((0.0, 0.0), SensorModel(2.5), uniform_map)
        assert len(cells) == 9

    def test_outside_position_rejected(self, uniform_map):
        with pytest.raises(ValueError):
            sensed_cells((-1.0, 5.0), SensorModel(2.5), uniform_map)

    def test_small_offset_keeps_cell_set(self, uniform_map):
        # with the footprint side a whole number of cells, sub-half-cell
        # offsets from a cell center leave the sensed set unchanged
        base = sensed_cells((5.5, 5.5), SensorModel(2.5), uniform_map)
        moved = sensed_cells((5.9, 5.25), SensorModel(2.5), uniform_map)
        assert {tuple(c) for c in base} == {tuple(c) for c in moved}

    def test_matches_bruteforce_membership(self, random_map):
        rng = np.random.default_rng(0)
        sensor = SensorModel(2.5)
        for _ in range(20):
            pos = rng.uniform(0, 20, 2)
            got = {tuple(c) for c in sensed_cells(pos, sensor, random_map)}
            want = set()
            for iy in range(20):
                for ix in range(20):
                    cx, cy = ix + 0.5, iy + 0.5
                    if (abs(cx - pos[0]) <= sensor.half_side + 1e-12
                            and abs(cy - pos[1]) <= sensor.half_side + 1e-12):
                        want.add((ix, iy))
            assert got == want


class TestUpdateFound:
    def test_target_at_agent_position_found(self):
        targets = TargetSet.unfound([[5.0, 5.0]])
        out = update_found(targets, [[5.0, 5.0]], SensorModel(2.5))
        assert out.found_count == 1

    def test_target_outside_square_unfound(self):
        targets = TargetSet.unfound([[5.0, 5.0 + 2.5 + 1.0]])
        out = update_found(targets, [[5.0, 5.0]], SensorModel(2.5))
        assert out.found_count == 0

    def test_flags_never_revert_and_idempotent(self):
        targets = TargetSet([[1.0, 1.0], [9.0, 9.0]], [True, False])
        sweep = [[5.0, 5.0]]
        out = update_found(targets, sweep, SensorModel(1.0))
        assert out.found[0]
        again = update_found(out, sweep, SensorModel(1.0))
        assert np.array_equal(out.found, again.found)

    def test_diagonal_sweep_matches_bruteforce(self):
        rng = np.random.default_rng(11)
        targets = TargetSet.unfound(rng.uniform(0, 20, (10, 2)))
        sweep = np.column_stack([np.linspace(1, 19, 40), np.linspace(2, 18, 40)])
        sensor = SensorModel(2.5)
        out = update_found(targets, sweep, sensor)
        want = np.array([any(footprint_hits(s, t, sensor.half_side) for s in sweep)
                         for t in targets.positions])
        assert np.array_equal(out.found, want)


class TestDeplete:
    def test_full_sweep_zeroes_map(self, random_map):
        xs = np.arange(0.5, 20.0, 1.0)
        sweep = [(x, y) for x in xs for y in xs]
        out = deplete(random_map, sweep, SensorModel(2.5))
        assert out.total_mass() == 0.0

    def test_empty_sweep_unchanged(self, random_map):
        out = deplete(random_map, np.empty((0, 2)), SensorModel(2.5))
        assert np.array_equal(out.values, random_map.values)
        assert out is not random_map

    def test_straight_segment_matches_bruteforce_union(self, random_map):
        sensor = SensorModel(2.5)
        sweep = np.column_stack([np.linspace(0.7, 19.3, 75),
                                 np.full(75, 10.2)])
        out = deplete(random_map, sweep, sensor)
        zeroed = set(map(tuple, np.argwhere(out.values == 0)[:, ::-1]))
        want = set()
        for pos in sweep:
            for ix, iy in sensed_cells(pos, sensor, random_map):
                want.add((ix, iy))
        already = set(map(tuple, np.argwhere(random_map.values == 0)[:, ::-1]))
        assert zeroed == want | already

    def test_mass_nonincreasing_over_sequences(self, random_map):
        rng = np.random.default_rng(9)
        current = random_map
        mass = current.total_mass()
        for _ in range(10):
            sweep = rng.uniform(0, 20, (3, 2))
            current = deplete(current, sweep, SensorModel(1.5))
            new_mass = current.total_mass()
            assert new_mass <= mass + 1e-15
            mass = new_mass

    def test_depleted_cells_cover_sensed_cells_with_found_targets(self, random_map):
        # any sensed cell holding a found target ends up zeroed
        rng = np.random.default_rng(21)
        sensor = SensorModel(2.5)
        sweep = rng.uniform(0, 20, (15, 2))
        targets = TargetSet.unfound(rng.uniform(0, 20, (12, 2)))
        out_map = deplete(random_map, sweep, sensor)
        found = update_found(targets, sweep, sensor)
        sensed_union = set()
        for pos in sweep:
            sensed_union.update(map(tuple, sensed_cells(pos, sensor, random_map)))
        for hit, pos in zip(found.found, targets.positions):
            cell = random_map.cell_of(pos)
            if hit and cell in sensed_union:
                assert out_map.values[cell[1], cell[0]] == 0.0


class TestScenarioParams:
    def test_json_roundtrip(self, tmp_path):
        params = ScenarioParams(9, 40, 30, 0.5, 8, RateParams(0.1, 4.0, 0.2))
        path = tmp_path / "scenario.json"
        params.save(path)
        back = ScenarioParams.load(path)
        assert back == params

    def test_unknown_field_rejected(self):
        with pytest.raises(ValueError, match="typo_field"):
            ScenarioParams.from_dict({"seed": 1, "width_cells": 10,
                                      "height_cells": 10, "cell_size_m": 1.0,
                                      "n_targets": 2, "typo_field": 5})

    def test_missing_field_rejected(self):
        with pytest.raises(ValueError, match="missing"):
            ScenarioParams.from_dict({"seed": 1})

    def test_build_matches_generate(self):
        params = ScenarioParams(7, 30, 30, 1.0, 5)
        pm, targets, _ = params.build()
        pm2, targets2, _ = generate_scenario(7, 30, 30, 1.0, 5)
        assert np.array_equal(pm.values, pm2.values)
        assert np.array_equal(targets.positions, targets2.positions)
