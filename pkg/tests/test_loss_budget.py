import json
import math

import numpy as np
import pytest
from scipy.optimize import brentq

from piezoqubit.errors import (
    DegenerateModelError,
    DomainError,
    InsufficientDataError,
    InvariantError,
    NoCrossoverError,
    ParseError,
)
from piezoqubit.loss_budget import (
    TLS_MODEL_CAVEAT,
    LossModel,
    crossover_frequency,
    dump_config,
    fit_loss_tangent,
    fit_power_law,
    gamma_piezo,
    load_config,
    log_grid,
    loss_budget,
    q_piezo,
    q_tls,
    q_total,
)

M = LossModel()


class TestQ:
    def test_piezo_anchor(self):
        assert q_piezo(M, 4.5e9) == pytest.approx(1 / (1e-3 * 1.7e-4), rel=1e-12)
        assert q_piezo(M, 4.5e9) == pytest.approx(5.9e6, rel=0.01)

    def test_piezo_linear_in_epr(self):
        assert q_piezo(M.replace(epr=2e-3), 7e9) == pytest.approx(q_piezo(M, 7e9) / 2, rel=1e-14)

    def test_tls_anchor(self):
        # p_TLS = 1e-3 means epr = 5e-4 under the doubled-participation convention
        assert q_tls(M.replace(epr=5e-4), 6e9) == pytest.approx(1e6, rel=1e-12)

    def test_tls_ratio(self):
        assert q_tls(M, 12e9) / q_tls(M, 6e9) == pytest.approx(2**-0.15, rel=1e-12)

    def test_tls_flat(self):
        m = M.replace(tls_exponent=0.0)
        assert q_tls(m, 1e9) == q_tls(m, 20e9)
        assert m.assumptions == ()
        assert M.assumptions == (TLS_MODEL_CAVEAT,)

    def test_total(self):
        f = 9e9
        assert 1 / q_total(M, f) == pytest.approx(1 / q_piezo(M, f) + 1 / q_tls(M, f), rel=1e-14)

    def test_gamma_exponent_exact(self):
        f = np.geomspace(1e9, 10e9, 9)
        assert fit_power_law(f, gamma_piezo(M, f)).exponent == pytest.approx(2.4 + 1, abs=1e-12)

    def test_vectorised(self):
        assert q_piezo(M, [4.5e9, 9e9]).shape == (2,)

    def test_nonpositive_frequency(self):
        with pytest.raises(DomainError):
            q_piezo(M, 0.0)

    def test_invalid_model(self):
        with pytest.raises(InvariantError):
            LossModel(epr=0.0)
        with pytest.raises(InvariantError):
            LossModel(piezo_exponent=float("nan"))

    def test_from_reference_q(self):
        m = LossModel.from_reference_q(5.88e6, 1e-3)
        assert m.piezo_reference_q == pytest.approx(5.88e6, rel=1e-14)


class TestCrossover:
    def test_matches_root_finder(self):
        fc = crossover_frequency(M)
        root = brentq(lambda f: 1 / q_piezo(M, f) - 1 / q_tls(M, f), 1e9, 100e9, xtol=1e-3)
        assert fc == pytest.approx(root, rel=1e-9)

    def test_scaling_invariance(self):
        m = M.replace(piezo_tan_delta=M.piezo_tan_delta * 7, tls_tan_delta0=M.tls_tan_delta0 * 7)
        assert crossover_frequency(m) == pytest.approx(crossover_frequency(M), rel=1e-12)

    def test_degenerate(self):
        m = LossModel(
            piezo_tan_delta=2e-3, piezo_reference_frequency=6e9, piezo_exponent=0.15,
            tls_tan_delta0=1e-3, tls_reference_frequency=6e9, tls_exponent=0.15,
        )
        with pytest.raises(DegenerateModelError):
            crossover_frequency(m)

    def test_exponent_ordering(self):
        with pytest.raises(NoCrossoverError):
            crossover_frequency(M.replace(piezo_exponent=0.1))


class TestPowerLaw:
    def test_exact_square(self):
        f = np.geomspace(1e9, 1e10, 7)
        fit = fit_power_law(f, (f / 1e9) ** 2)
        assert fit.exponent == pytest.approx(2.0, abs=1e-12)
        assert fit.r_squared == pytest.approx(1.0)
        assert fit(3e9) == pytest.approx(9.0)

    def test_two_points(self):
        fit = fit_power_law([1e9, 2e9], [1.0, 8.0])
        assert fit.exponent == pytest.approx(3.0)
        assert fit.r_squared == 1.0
        assert fit.exponent_stderr is None

    def test_errors(self):
        with pytest.raises(InsufficientDataError):
            fit_power_law([1e9], [1.0])
        with pytest.raises(DomainError):
            fit_power_law([1e9, 2e9], [1.0, -1.0])

    def test_noisy_recovery(self, rng):
        f = np.geomspace(1e9, 10e9, 30)
        y = 1e-7 * (f / 1e9) ** 2.4 * np.exp(0.03 * rng.normal(size=f.size))
        fit = fit_power_law(f, y)
        assert fit.exponent == pytest.approx(2.4, abs=0.1)
        assert abs(fit.exponent - 2.4) < 5 * fit.exponent_stderr

    def test_loss_tangent_fit(self):
        p = np.array([1e-4, 2e-4, 4e-4])
        tan_d, c = fit_loss_tangent(p, 1.7e-4 * p + 1e-7)
        assert tan_d == pytest.approx(1.7e-4, rel=1e-9)
        assert c == pytest.approx(1e-7, rel=1e-6)


class TestBudget:
    def test_defaults(self):
        b = loss_budget(M)
        assert b.frequencies.size == 30
        assert b.frequencies[0] == pytest.approx(1e9)
        assert b.frequencies[-1] == pytest.approx(30e9)
        assert b.crossover == pytest.approx(crossover_frequency(M))

    def test_two_rows(self):
        assert loss_budget(M, 1e9, 2e9, 2).to_csv().count("\n") == 3

    def test_bad_range(self):
        with pytest.raises(DomainError):
            log_grid(5e9, 5e9, 10)
        with pytest.raises(DomainError):
            log_grid(1e9, 2e9, 1)

    def test_no_crossover_reported_as_none(self):
        assert loss_budget(M.replace(piezo_exponent=0.1)).crossover is None

    def test_json(self):
        d = json.loads(loss_budget(M, npoints=3).to_json())
        assert set(d) == {"fq_hz", "q_piezo", "q_tls", "q_total", "crossover_hz", "assumptions"}


class TestConfig:
    def test_round_trip(self):
        m = M.replace(epr=2e-3, piezo_exponent=2.2)
        assert load_config(dump_config(m)) == m

    def test_partial_with_comments(self):
        m = load_config("# header\nepr = 0.002  # doubled\n")
        assert m.epr == 0.002
        assert m.piezo_exponent == 2.4

    def test_unknown_key(self):
        with pytest.raises(ParseError, match="unknown key"):
            load_config("bogus = 1\n")

    def test_bad_number(self):
        with pytest.raises(ParseError):
            load_config("epr = abc\n")

    def test_duplicate_and_sections(self):
        with pytest.raises(ParseError, match="line 2: duplicate key 'epr'"):
            load_config("epr = 1e-3\nepr = 2e-3\n")
        with pytest.raises(ParseError, match="section"):
            load_config("[other]\nepr = 1e-3\n")

    def test_bad_syntax_reports_line(self):
        with pytest.raises(ParseError, match="line 2"):
            load_config("epr = 1e-3\nno equals sign here\n")


def test_crossover_closed_form_value():
    # ln-space solution written out by hand
    ratio = (2 * 1e-3 * 6**-0.15) / (1.7e-4 * 4.5**-2.4)
    assert crossover_frequency(M) == pytest.approx(1e9 * ratio ** (1 / 2.25), rel=1e-12)
    assert math.isfinite(crossover_frequency(M))
