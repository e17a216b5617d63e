"""Rectangular finite-volume oracle: speeds, evolution, comparison with the closed form, blowup time."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from relshock.errors import CflViolation, ConfigError, NonMonotoneLadder, NotInImage, ResolutionExhausted
from relshock.fluid_state import fluid_from_invariants, null_frame
from relshock.oracle_solver import (
    _richardson_observed,
    characteristic_speeds,
    compare_with_geometric,
    estimate_blowup_time,
    evolve,
    reference_gradient,
)


class TestSpeeds:
    @given(st.floats(-1, 1), st.floats(-1, 1))
    def test_match_null_frame(self, Rp, Rm):
        from relshock.eos import default_eos

        fr = null_frame(fluid_from_invariants(Rp, Rm, default_eos()))
        L1, Lb1 = characteristic_speeds(np.array(Rp), np.array(Rm), np.array(0.5))
        assert float(L1) == pytest.approx(float(fr.L1), abs=1e-14)
        assert float(Lb1) == pytest.approx(float(fr.Lbar1), abs=1e-14)


class TestEvolve:
    def test_rejects_courant_number(self, data):
        for cfl in (0.0, 0.95):
            with pytest.raises(CflViolation):
                evolve(data, 0.05, 1.0, cfl=cfl)

    def test_rejects_unknown_scheme(self, data):
        with pytest.raises(ValueError):
            evolve(data, 0.05, 1.0, scheme="weno")

    def test_zero_data_stays_zero(self, data):
        run = evolve(data, 0.05, 2.0, zero_data=True)
        assert np.all(run.R_plus == 0.0) and np.all(run.R_minus == 0.0)

    @pytest.mark.parametrize("scheme", ["upwind", "minmod"])
    def test_simple_wave_keeps_R_minus_zero(self, data, scheme):
        run = evolve(data, 4.0 / 256, 5.0, scheme=scheme)
        assert np.max(run.history_R_minus) == 0.0
        assert run.t == pytest.approx(5.0, abs=1e-12)

    def test_snapshots_and_summary(self, data):
        run = evolve(data, 4.0 / 128, 3.0, snapshot_times=(0.0, 1.5))
        assert set(run.snapshots) == {0.0, 1.5}
        assert_allclose(run.snapshots[0.0][0], data.R0(-run.x))
        summary = run.summary()
        assert summary["cells"] == len(run.x) and summary["steps"] == run.steps

    def test_gradient_grows_toward_shock(self, data):
        # exact: max_U |R0'(U)| / (1 + t G(U)) at t = 8
        U = np.linspace(-2.0, 2.0, 20001)
        _, dR, _ = data.R0_derivatives(U)
        exact = float(np.max(np.abs(dR) / (1.0 + 8.0 * data.G(U))))
        run = evolve(data, 4.0 / 2048, 8.0, scheme="minmod")
        assert run.history_grad[-1] == pytest.approx(exact, rel=0.02)
        assert run.history_grad[-1] > 2.0 * reference_gradient(data)

    def test_resolution_exhausted_past_shock(self, data):
        with pytest.raises(ResolutionExhausted) as info:
            evolve(data, 4.0 / 256, 14.0, scheme="minmod")
        assert info.value.details["t"] > 0.9 * data.T_shock


class TestComparison:
    def test_errors_halve_under_refinement(self, data):
        l1 = []
        for n in (128, 256, 512):
            run = evolve(data, 4.0 / n, 5.0, scheme="upwind")
            res = compare_with_geometric(run, data)
            assert res.excluded == 0
            l1.append(res.l1)
        ratios = np.array(l1[:-1]) / np.array(l1[1:])
        assert np.all((ratios > 1.6) & (ratios < 2.4))

    def test_snapshot_comparison(self, data):
        run = evolve(data, 4.0 / 256, 4.0, snapshot_times=(2.0,))
        early = compare_with_geometric(run, data, t=2.0)
        late = compare_with_geometric(run, data)
        assert early.t == 2.0 and late.t == pytest.approx(4.0)
        assert early.l1 < late.l1

    def test_missing_snapshot(self, data):
        run = evolve(data, 4.0 / 64, 2.0)
        with pytest.raises(NotInImage):
            compare_with_geometric(run, data, t=1.0)

    def test_error_ahead_of_wave_shrinks(self, data):
        # numerical diffusion leaks ahead of the front; it must vanish under refinement
        errs = [compare_with_geometric(evolve(data, 4.0 / n, 3.0, scheme="upwind"), data).exterior_max_error for n in (128, 256, 512)]
        assert errs[0] > errs[1] > errs[2]


class TestRichardson:
    def test_recovers_limit_and_order(self):
        k = np.arange(3)
        limit, order = _richardson_observed(2.0 + 0.3 * 2.0 ** (-1.5 * k))
        assert limit == pytest.approx(2.0, abs=1e-14)
        assert order == pytest.approx(1.5, abs=1e-12)

    def test_non_monotone_sequence_falls_back(self):
        limit, order = _richardson_observed(np.array([1.0, 1.2, 1.1]))
        assert limit == 1.1 and order is None


class TestBlowupEstimate:
    def test_coarse_ladder(self, data):
        est = estimate_blowup_time(data, (256, 512, 1024), (2.0, 4.0, 8.0))
        assert est.estimate == pytest.approx(data.T_shock, rel=0.02)
        assert abs(est.estimate - data.T_shock) <= 2 * est.uncertainty
        assert np.all(np.diff(est.crossing_times, axis=1) > 0)
        assert est.slope < 0

    def test_two_levels_rejected(self, data):
        with pytest.raises(NonMonotoneLadder):
            estimate_blowup_time(data, (256, 512))

    def test_duplicate_levels_rejected(self, data):
        with pytest.raises(NonMonotoneLadder):
            estimate_blowup_time(data, (256, 256, 512))

    def test_single_threshold_rejected(self, data):
        with pytest.raises(ConfigError):
            estimate_blowup_time(data, (256, 512, 1024), (4.0,))

    def test_thresholds_beyond_mesh(self, data):
        with pytest.raises(ResolutionExhausted):
            estimate_blowup_time(data, (64, 128, 256), (50.0, 100.0))
