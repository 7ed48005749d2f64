"""Closed-form rate model vs Monte-Carlo oracles, and the optimizer."""

import pytest

from qparity.rates import (
    RateModel,
    evaluate,
    monte_carlo_bare,
    monte_carlo_rate,
    monte_carlo_side,
    optimize,
    p_connect_bare,
    p_logical_alive,
    p_side,
    sweep,
)


class TestClosedForms:
    def test_alive_probability(self):
        assert p_logical_alive(1.0, 5) == 1.0
        assert p_logical_alive(0.5, 1) == 0.5
        assert abs(p_logical_alive(0.5, 3) - 0.875) < 1e-15

    def test_p_side_trivial(self):
        assert abs(p_side(RateModel(1.0, 1.0, 1, 1)) - 1.0) < 1e-15
        assert p_side(RateModel(0.7, 0.0, 3, 2)) == 0.0

    def test_p_side_reduces_to_bsm_race(self):
        """Perfect transmission, single photons: 1 - (1-q)^n."""
        for n in (1, 2, 3, 5):
            for q in (0.25, 0.5, 0.9):
                got = p_side(RateModel(1.0, q, n, 1))
                assert abs(got - (1 - (1 - q) ** n)) < 1e-12

    def test_connect_is_side_squared(self):
        model = RateModel(0.83, 0.41, 3, 2)
        res = evaluate(model)
        assert res.p_connect == res.p_side ** 2
        assert res.photons_used == 2 * 3 * 2
        assert abs(res.efficiency - res.p_connect / 12) < 1e-15

    def test_bare_trivial(self):
        assert p_connect_bare(1, 1.0, 1.0) == 1.0
        assert p_connect_bare(3, 0.0, 0.5) == 0.0

    def test_model_validation(self):
        with pytest.raises(ValueError):
            RateModel(1.2)
        with pytest.raises(ValueError):
            RateModel(0.5, q=-0.1)
        with pytest.raises(ValueError):
            RateModel(0.5, n=0)


class TestMonteCarlo:
    def test_side_matches_closed_form(self):
        model = RateModel(0.9, 0.5, 2, 2)
        est, se = monte_carlo_side(model, 10 ** 6, seed=11)
        assert se > 0
        assert abs(est - p_side(model)) <= 3 * se

    def test_connect_matches_side_squared(self):
        model = RateModel(0.5, 0.5, 2, 2)
        est, se = monte_carlo_rate(model, 10 ** 6, seed=12)
        assert abs(est - p_side(model) ** 2) <= 3 * se

    def test_bare_matches_closed_form(self):
        est, se = monte_carlo_bare(4, 0.9, 0.5, 10 ** 6, seed=13)
        assert abs(est - p_connect_bare(4, 0.9, 0.5)) <= 3 * se

    def test_certain_success(self):
        est, se = monte_carlo_rate(RateModel(1.0, 1.0, 2, 2), 10 ** 5,
                                   seed=1)
        assert est == 1.0 and se == 0.0

    def test_seeded_determinism(self):
        model = RateModel(0.8, 0.5, 2, 3)
        a = monte_carlo_rate(model, 10 ** 5, seed=99)
        b = monte_carlo_rate(model, 10 ** 5, seed=99)
        assert a == b

    def test_shots_validated(self):
        with pytest.raises(ValueError):
            monte_carlo_rate(RateModel(0.5), 0, seed=0)


class TestOptimizer:
    def test_lossless_prefers_minimal_code(self):
        n, m, res = optimize(1.0, 1.0, 4, 4, metric="efficiency")
        assert (n, m) == (1, 1)
        assert res.p_connect == 1.0

    def test_bsm_limited_prefers_more_arms(self):
        n, m, _ = optimize(1.0, 0.5, 8, 1, metric="p_connect")
        assert (n, m) == (8, 1)

    def test_argmax_reproduced_by_full_rescan(self):
        eta, q, n_max, m_max = 0.9, 0.5, 5, 4
        for metric in ("p_connect", "efficiency"):
            n, m, res = optimize(eta, q, n_max, m_max, metric)
            best = None
            for nn in range(1, n_max + 1):
                for mm in range(1, m_max + 1):
                    r = evaluate(RateModel(eta, q, nn, mm))
                    key = (-getattr(r, metric), r.photons_used, r.n)
                    if best is None or key < best[0]:
                        best = (key, r)
            assert (best[1].n, best[1].m) == (n, m)
            assert getattr(res, metric) == getattr(best[1], metric)

    def test_encoding_beats_bare_at_equal_budget(self):
        """Some encoded grid point outperforms the bare scheme using the
        same number of photons per side."""
        eta, q = 0.9, 0.5
        better = []
        for n in range(1, 4):
            for m in range(2, 4):
                encoded = p_side(RateModel(eta, q, n, m)) ** 2
                bare = p_connect_bare(n * m, eta, q)
                if encoded > bare:
                    better.append((n, m))
        assert better

    def test_sweep_grid_shape(self):
        rows = sweep(0.9, 0.5, 3, 2)
        assert len(rows) == 6
        assert {(r.n, r.m) for r in rows} == {(n, m)
                                              for n in (1, 2, 3)
                                              for m in (1, 2)}

    def test_empty_grid_rejected(self):
        with pytest.raises(ValueError):
            sweep(0.9, 0.5, 0, 3)


class TestMonotonicity:
    ETAS = (0.7, 0.8, 0.9, 0.95, 1.0)
    QS = (0.25, 0.35, 0.5, 0.75, 1.0)

    def test_monotone_in_eta(self):
        for q in self.QS:
            for n in (1, 2, 3):
                for m in (1, 2, 3):
                    vals = [p_side(RateModel(e, q, n, m))
                            for e in self.ETAS]
                    assert all(b >= a - 1e-12
                               for a, b in zip(vals, vals[1:]))

    def test_monotone_in_q(self):
        for eta in self.ETAS:
            for n in (1, 2, 3):
                for m in (1, 2, 3):
                    vals = [p_side(RateModel(eta, q, n, m))
                            for q in self.QS]
                    assert all(b >= a - 1e-12
                               for a, b in zip(vals, vals[1:]))

    def test_monotone_in_n_with_redundancy(self):
        """With m >= 2 extra arms never hurt on this grid."""
        for eta in self.ETAS:
            for q in self.QS:
                for m in (2, 3):
                    vals = [p_side(RateModel(eta, q, n, m))
                            for n in (1, 2, 3)]
                    assert all(b >= a - 1e-12
                               for a, b in zip(vals, vals[1:]))

    def test_not_monotone_in_n_without_redundancy(self):
        """Unprotected arms are pure loss exposure once the BSM is
        certain: a second arm lowers p_side.  Documents why the n
        monotonicity claim needs m >= 2."""
        lo = p_side(RateModel(0.8, 1.0, 1, 1))
        hi = p_side(RateModel(0.8, 1.0, 2, 1))
        assert hi < lo
