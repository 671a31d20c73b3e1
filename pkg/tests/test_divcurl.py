import math

import numpy as np
import pytest

from divcurl.ConvergenceTable import CSV_HEADER, ConvergenceTable, fit_decay_slope
from divcurl.CounterexampleExperiment import (
    CounterexampleExperiment,
    counterexample_family,
    run_counterexample,
)
from divcurl.FriedrichsCheck import FriedrichsOperators, friedrichs_check
from divcurl.OscillatoryFamily import (
    OscillatoryFamily,
    closed_form_residuals,
    parse_expression,
    sample,
    sample_macro,
)
from divcurl.PositiveExperiment import DEFAULT_U, DEFAULT_V, PositiveExperiment, run_positive
from divcurl.ProjectionExperiment import DEFAULT_FAMILY, projection_convergence
from divcurl.utils import probe_functions, weak_gap
from errors import (
    AliasingError,
    DimensionMismatchError,
    FamilyError,
    UnsupportedBCError,
    UnsupportedDimError,
)
from grids.GridSpec import DIRICHLET, GridSpec
from grids.PeriodicCalculus import PeriodicCalculus
from grids.builders import build_derham, build_gradgrad

FREQUENCIES = (2, 4, 8, 16)


def family(spec: dict, frequencies=FREQUENCIES, d: int = 2) -> OscillatoryFamily:
    return OscillatoryFamily.from_strings(spec["macro"], spec["micro"], frequencies, d)


class TestOscillatoryFamily:
    def test_without_micro_sample_equals_macro(self, torus_2d):
        f = family({"macro": ["cos(x1)", "x2"], "micro": ["0", "0"]}, frequencies=(1, 3))
        macro = sample_macro(f, torus_2d)
        for k in f.frequencies:
            assert sample(f, k, torus_2d) == pytest.approx(macro)

    def test_pure_micro_in_one_dimension(self):
        grid = GridSpec(d=1, N=8)
        f = family({"macro": ["0"], "micro": ["sin(x1)"]}, frequencies=(2,), d=1)
        x = 2 * math.pi * np.arange(8) / 8
        assert sample(f, 2, grid) == pytest.approx(np.sin(2 * x), abs=1e-15)

    def test_micro_mode(self):
        assert family({"macro": ["0", "0"], "micro": ["sin(3*x2)", "cos(x1)"]}).micro_mode == 3

    def test_rejects_micro_with_mean(self):
        with pytest.raises(FamilyError, match="mean"):
            family({"macro": ["0", "0"], "micro": ["1 + sin(x1)", "0"]})

    def test_rejects_unknown_symbols(self):
        with pytest.raises(FamilyError, match="unknown symbols"):
            parse_expression("sin(y)", 2)

    def test_rejects_variables_beyond_dimension(self):
        with pytest.raises(FamilyError):
            family({"macro": ["x3", "0"], "micro": ["0", "0"]})

    def test_rejects_unparsable_expression(self):
        with pytest.raises(FamilyError, match="cannot parse"):
            parse_expression("sin(", 2)

    def test_rejects_decreasing_frequencies(self):
        with pytest.raises(FamilyError, match="increasing"):
            family(DEFAULT_U, frequencies=(4, 2))

    def test_rejects_mismatched_components(self):
        with pytest.raises(FamilyError):
            family({"macro": ["0", "0"], "micro": ["0"]})

    def test_aliasing(self):
        f = family(DEFAULT_U, frequencies=(4,))
        with pytest.raises(AliasingError):
            sample(f, 4, GridSpec(d=2, N=8))

    def test_sampling_needs_matching_grid(self, torus_3d):
        f = family(DEFAULT_U)
        with pytest.raises(DimensionMismatchError):
            sample(f, 2, torus_3d)
        with pytest.raises(UnsupportedBCError):
            sample(f, 2, GridSpec(d=2, N=8, bc=DIRICHLET))

    def test_closed_form_div_norm(self, fine_torus_2d):
        f = counterexample_family((4,))
        div_norm, curl_norm = closed_form_residuals(f, 4, fine_torus_2d)
        assert div_norm == pytest.approx(4 * math.pi * math.sqrt(2), rel=1e-12)
        assert curl_norm == pytest.approx(0.0, abs=1e-12)


class TestPositiveExperiment:
    def test_pairings_converge(self, fine_torus_2d):
        table = run_positive(family(DEFAULT_U), family(DEFAULT_V), [fine_torus_2d])[0]
        assert table.ks == list(FREQUENCIES)
        for row in table.rows:
            assert row.reference == pytest.approx(4 * math.pi**2)
            assert row.error <= 1e-12
            assert row.res_div <= 1e-12
            assert row.res_curl <= 1e-12

    def test_local_pairing_converges(self, fine_torus_2d):
        table = run_positive(family(DEFAULT_U), family(DEFAULT_V), [fine_torus_2d])[0]
        assert table.max_local_error <= 1e-10

    def test_truncated_sawtooth_micro(self):
        sawtooth = {"macro": ["1", "0"], "micro": ["sin(x2) + sin(2*x2)/2 + sin(3*x2)/3", "0"]}
        u = family(sawtooth, (2, 4))
        assert u.micro_mode == 3
        table = run_positive(u, family(DEFAULT_V, (2, 4)), [GridSpec(d=2, N=40)])[0]
        assert table.max_error <= 1e-10
        assert all(row.res_div <= 1e-10 for row in table.rows)

    def test_gradgrad_sequence(self):
        grid = GridSpec(d=3, N=8)
        macro = ["1", "1", "1", "0", "0", "0"]
        u = OscillatoryFamily.from_strings(
            macro, ["0", "0", "0", "sin(x3)", "0", "0"], (1, 2, 3), d=3
        )
        v = OscillatoryFamily.from_strings(
            macro, ["sin(x1)", "0", "0", "0", "0", "0"], (1, 2, 3), d=3
        )
        table = run_positive(u, v, [grid], builder=lambda g: build_gradgrad(g)[0])[0]
        reference = 3 * (2 * math.pi) ** 3
        for row in table.rows:
            assert row.reference == pytest.approx(reference)
            assert row.error <= 1e-10 * reference
            assert row.res_div <= 1e-10
            assert row.res_curl <= 1e-10

    def test_without_oscillation_error_is_zero(self, torus_2d):
        still = {"macro": ["cos(x1)", "sin(x2)"], "micro": ["0", "0"]}
        table = PositiveExperiment(family(still, (1, 2)), family(still, (1, 2)), torus_2d).run()
        assert table.errors == [0.0, 0.0]

    def test_frequencies_must_agree(self, torus_2d):
        with pytest.raises(FamilyError):
            PositiveExperiment(family(DEFAULT_U, (1, 2)), family(DEFAULT_V, (1, 3)), torus_2d)

    def test_family_must_fill_middle_space(self, torus_2d):
        scalar = {"macro": ["1"], "micro": ["sin(x1)"]}
        with pytest.raises(DimensionMismatchError):
            PositiveExperiment(family(scalar, (1,)), family(scalar, (1,)), torus_2d)

    def test_workers_do_not_change_rows(self):
        grid = GridSpec(d=2, N=40)
        u, v = family(DEFAULT_U), family(DEFAULT_V)
        serial = PositiveExperiment(u, v, grid).run()
        parallel = PositiveExperiment(u, v, grid, build_derham(grid), max_workers=4).run()
        assert serial.to_csv() == parallel.to_csv()


class TestCounterexample:
    def test_self_pairing_stays_away_from_zero(self, fine_torus_2d):
        table = run_counterexample([fine_torus_2d], FREQUENCIES)[0]
        for row in table.rows:
            assert row.value == pytest.approx(2 * math.pi**2, abs=1e-10)
            assert row.reference == 0.0
        assert min(table.errors) >= 19

    def test_weak_limit_is_zero(self, fine_torus_2d):
        table = CounterexampleExperiment(fine_torus_2d, FREQUENCIES).run()
        assert table.rows[-1].weak_gap < 1e-3

    def test_local_error_does_not_decay(self, fine_torus_2d):
        table = CounterexampleExperiment(fine_torus_2d, FREQUENCIES).run()
        for row in table.rows:
            assert row.local_error == pytest.approx(24.991138718260565, rel=1e-9)
            assert row.weak_gap <= 1e-12
        assert table.max_local_error == pytest.approx(24.991138718260565, rel=1e-9)

    def test_divergence_grows_linearly(self, fine_torus_2d):
        table = run_counterexample([fine_torus_2d], FREQUENCIES)[0]
        slope = fit_decay_slope(table.ks, [row.res_div for row in table.rows])
        assert slope == pytest.approx(1.0, abs=1e-6)
        assert all(row.res_curl <= 1e-12 for row in table.rows)

    def test_needs_two_dimensional_torus(self, torus_3d, square):
        with pytest.raises(UnsupportedDimError):
            CounterexampleExperiment(torus_3d, FREQUENCIES)
        with pytest.raises(UnsupportedBCError):
            CounterexampleExperiment(square, FREQUENCIES)


class TestProjection:
    def test_gradient_macro_with_free_micro(self):
        grid = GridSpec(d=2, N=24)
        table = projection_convergence(build_derham(grid), family(DEFAULT_FAMILY, (2, 4, 8)), grid)
        assert table.max_error <= 1e-10
        assert all(row.divergence_residual <= 1e-10 for row in table.rows)

    def test_without_micro_error_is_zero(self, torus_2d):
        still = {"macro": ["cos(x1)", "0"], "micro": ["0", "0"]}
        table = projection_convergence(build_derham(torus_2d), family(still, (1, 2)), torus_2d)
        assert table.max_error <= 1e-12

    def test_counterexample_family_does_not_converge(self):
        grid = GridSpec(d=2, N=24)
        table = projection_convergence(build_derham(grid), counterexample_family((2, 4, 8)), grid)
        assert table.min_error >= 1


class TestFriedrichs:
    @pytest.mark.parametrize("N", [4, 8])
    @pytest.mark.parametrize("d", [2, 3])
    def test_identity_holds_on_random_fields(self, d, N):
        report = friedrichs_check(GridSpec(d=d, N=N), samples=100)
        assert report.samples == 100
        assert report.max_relative_residual <= 1e-12

    def test_operators_are_assembled_once(self, monkeypatch):
        calls = []
        original = PeriodicCalculus.vector_grad

        def counting(calculus):
            calls.append(calculus.spec)
            return original(calculus)

        monkeypatch.setattr(PeriodicCalculus, "vector_grad", counting)
        friedrichs_check(GridSpec(d=2, N=4), samples=5)
        assert len(calls) == 1

    def test_constant_field_has_no_terms(self, torus_2d):
        operators = FriedrichsOperators(PeriodicCalculus(torus_2d))
        residual, gradient = operators.residual(np.ones(operators.grad.domain.dim))
        assert residual == 0.0
        assert gradient == 0.0

    def test_needs_periodic_grid(self, square):
        with pytest.raises(UnsupportedBCError):
            friedrichs_check(square)


class TestConvergenceTable:
    def test_csv_header_and_precision(self, torus_2d):
        table = run_positive(family(DEFAULT_U, (1,)), family(DEFAULT_V, (1,)), [torus_2d])[0]
        lines = table.to_csv().splitlines()
        assert lines[0] == ",".join(CSV_HEADER)
        assert lines[1].startswith("1,")
        assert float(lines[1].split(",")[2]) == table.rows[0].reference

    def test_rows_must_be_sorted(self, torus_2d):
        rows = run_positive(family(DEFAULT_U, (1, 2)), family(DEFAULT_V, (1, 2)), [torus_2d])[0].rows
        with pytest.raises(ValueError):
            ConvergenceTable(torus_2d, tuple(reversed(rows)))

    def test_slope_needs_two_positive_values(self):
        assert fit_decay_slope([1, 2], [0.0, 1.0]) is None
        assert fit_decay_slope([1, 2, 4], [1.0, 0.5, 0.25]) == pytest.approx(-1.0)


def test_probe_functions_are_bounded(torus_2d):
    probes = probe_functions(torus_2d)
    assert len(probes) == 5
    assert all(p.shape == (torus_2d.n_points,) and np.all(np.isfinite(p)) for p in probes)


def test_weak_gap_of_limit_is_zero(torus_2d):
    space = PeriodicCalculus(torus_2d).space("vector")
    field = np.ones(space.dim)
    assert weak_gap(space, [field], field, torus_2d) == 0.0
