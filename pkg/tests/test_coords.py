import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from spinverify.errors import DimensionError, ValidationError
from spinverify.wavefunction import (
    Const,
    OperationCount,
    SeparableWavefunction,
    SystemGeometry,
    count_ops,
    eval_separable,
    evaluate,
    from_hyperspherical,
    hyperangle_expr,
    hyperangles,
    hyperradius,
    hyperradius_expr,
    laplacian,
    parse_expr,
)

from oracles import spherical_to_cartesian

RHO = {"rho": (0, 0)}
GAUSS = parse_expr("exp(-rho^2/2)", aliases=RHO)


class TestGeometry:
    def test_shape_and_flat(self):
        g = SystemGeometry([[1, 2, 3], [4, 5, 6]])
        assert (g.n, g.d) == (2, 3)
        assert g.flat().tolist() == [1, 2, 3, 4, 5, 6]
        assert g.pair_distance(0, 1) == pytest.approx(math.sqrt(27))

    def test_vector_is_one_dimensional(self):
        assert SystemGeometry([1.0, 2.0]).d == 1

    def test_read_only(self):
        g = SystemGeometry([[1.0]])
        with pytest.raises(ValueError):
            g.positions[0, 0] = 2.0

    @pytest.mark.parametrize("bad", [[], [[np.nan]], [[[1.0]]]])
    def test_invalid(self, bad):
        with pytest.raises(ValidationError):
            SystemGeometry(bad)


class TestHyperradius:
    def test_single(self):
        rho, count = hyperradius(SystemGeometry([[3.0]]))
        assert rho == 3.0 and count.counted == 2

    def test_eight_particles(self):
        _, count = hyperradius(SystemGeometry(np.arange(8.0)[:, None]))
        assert count == OperationCount(counted=9, free=7)

    def test_origin(self):
        assert hyperradius(SystemGeometry(np.zeros((4, 3))))[0] == 0.0

    def test_matches_expression(self):
        g = SystemGeometry(np.random.default_rng(1).normal(size=(5, 3)))
        e = hyperradius_expr(5, 3)
        rho, count = hyperradius(g)
        assert rho == pytest.approx(float(evaluate(e, g.positions)), rel=1e-15)
        # the instrumented tree walk agrees with the closed form
        assert count_ops(e) == count

    @pytest.mark.parametrize("n", [1, 2, 4, 8, 16, 32])
    def test_linear_in_n(self, n):
        assert hyperradius(SystemGeometry(np.ones((n, 1))))[1].counted == n + 1
        assert hyperradius(SystemGeometry(np.ones((n, 3))))[1].counted == 3 * n + 1


class TestHyperangles:
    def test_axis_aligned(self):
        assert hyperangles(SystemGeometry([1.0, 0.0])).values.tolist() == [0.0]

    def test_quarter_turn(self):
        assert hyperangles(SystemGeometry([0.0, 1.0])).values[0] == pytest.approx(math.pi / 2, abs=1e-15)

    def test_last_angle_covers_full_circle(self):
        assert hyperangles(SystemGeometry([0.0, -1.0])).values[0] == pytest.approx(3 * math.pi / 2)
        assert hyperangles(SystemGeometry([-1.0, 0.0])).values[0] == pytest.approx(math.pi)

    def test_cube_diagonal(self):
        g = SystemGeometry([[1.0, 1.0, 1.0]])
        a = hyperangles(g)
        assert a.values[0] == pytest.approx(math.acos(1 / math.sqrt(3)), abs=1e-15)
        assert a.values[1] == pytest.approx(math.pi / 4, abs=1e-15)
        back = spherical_to_cartesian(math.sqrt(3), a.values)
        assert np.max(np.abs(np.array(back) - 1.0)) <= 1e-12

    def test_degenerate_tail(self):
        a = hyperangles(SystemGeometry([2.0, 0.0, 0.0]))
        assert a.values.tolist() == [0.0, 0.0]
        assert a.degenerate == (False, True)
        assert a.any_degenerate

    def test_single_component_has_no_angles(self):
        a = hyperangles(SystemGeometry([[5.0]]))
        assert a.values.size == 0 and not a.degenerate

    def test_counts(self):
        for m in (2, 3, 8, 16):
            a = hyperangles(SystemGeometry(np.ones(m)))
            assert a.count.counted == sum(m - k + 3 for k in range(m - 1))
            assert a.cached_count.counted == m + 3 * (m - 1)

    def test_expression_form(self):
        g = SystemGeometry(np.random.default_rng(4).uniform(0.1, 1, size=(2, 2)))
        a = hyperangles(g)
        for k in range(3):
            assert float(evaluate(hyperangle_expr(2, 2, k), g.positions)) == pytest.approx(a.values[k], abs=1e-14)
        # per-angle counted cost of the tree matches the uncached rule
        assert count_ops(hyperangle_expr(2, 2, 0)).counted == 4 + 3

    @settings(max_examples=200, deadline=None)
    @given(st.integers(1, 4), st.integers(1, 3), st.integers(0, 2**32 - 1))
    def test_round_trip(self, n, d, seed):
        assume(n * d >= 2)  # a lone component has no angle to carry its sign
        pos = np.random.default_rng(seed).normal(size=(n, d))
        g = SystemGeometry(pos)
        rho, _ = hyperradius(g)
        a = hyperangles(g)
        assume(rho > 1e-6 and not a.any_degenerate)
        back = from_hyperspherical(rho, a.values, n, d).positions
        assert np.max(np.abs(back - pos)) <= 1e-12 * max(rho, 1.0)

    @settings(max_examples=100, deadline=None)
    @given(st.integers(2, 7), st.integers(0, 2**32 - 1))
    def test_inverse_matches_textbook(self, m, seed):
        rng = np.random.default_rng(seed)
        angles = np.append(rng.uniform(0, math.pi, m - 2), rng.uniform(0, 2 * math.pi))
        rho = rng.uniform(0.5, 3)
        g = from_hyperspherical(rho, angles, m, 1)
        assert np.allclose(g.flat(), spherical_to_cartesian(rho, angles), rtol=0, atol=1e-13)
        assert np.allclose(hyperangles(g).values, angles, atol=1e-9)

    def test_inverse_arity(self):
        with pytest.raises(ValidationError):
            from_hyperspherical(1.0, [0.1, 0.2], 2, 1)


class TestSeparable:
    def test_gaussian_constant_angles(self):
        g = SystemGeometry(np.random.default_rng(0).normal(size=(3, 1)))
        value, _ = eval_separable(GAUSS, [Const(1.0)] * 2, g)
        rho = hyperradius(g)[0]
        assert value == pytest.approx(math.exp(-rho * rho / 2), rel=1e-15)

    def test_cos_of_angle(self):
        value, _ = eval_separable(Const(1.0), [parse_expr("cos(x_0_0)")], SystemGeometry([1.0, 0.0]))
        assert value == 1.0

    def test_arity_mismatch(self):
        with pytest.raises(DimensionError):
            eval_separable(GAUSS, [Const(1.0)], SystemGeometry(np.ones((3, 1))))

    def test_must_be_univariate(self):
        with pytest.raises(ValidationError):
            SeparableWavefunction(parse_expr("x_0_0 * x_1_0", 2), ())

    def test_cost_breakdown(self):
        ups = [parse_expr("cos(x_0_0)"), Const(1.0), parse_expr("sin(x_0_0)^2")]
        _, cost = eval_separable(GAUSS, ups, SystemGeometry(np.ones((4, 1))))
        assert cost.phi == OperationCount(2, 2)
        assert cost.upsilons.counted == 1 + 0 + 2
        assert cost.products.counted == 3
        assert cost.decomposition() == {"phi": 2, "upsilon": 3 + 2, "join": 1}
        assert cost.total == cost.functions + cost.coordinates

    def test_cached_coordinates_cheaper(self):
        g = SystemGeometry(np.ones((16, 1)))
        _, plain = eval_separable(GAUSS, [Const(1.0)] * 15, g)
        _, cached = eval_separable(GAUSS, [Const(1.0)] * 15, g, cached=True)
        assert cached.coordinates.counted < plain.coordinates.counted
        assert cached.functions == plain.functions

    def test_to_cartesian_agrees(self):
        ups = (parse_expr("cos(x_0_0)"), parse_expr("1 + sin(x_0_0)^2"))
        wf = SeparableWavefunction(GAUSS, ups)
        rng = np.random.default_rng(2)
        psi = wf.to_cartesian(3, 1)
        for _ in range(20):
            pos = rng.normal(size=(3, 1))
            pos[-1] = abs(pos[-1])  # principal branch of the final angle
            value, _ = eval_separable(wf.phi, wf.upsilons, SystemGeometry(pos))
            assert float(evaluate(psi, pos)) == pytest.approx(value, rel=1e-12)

    def test_cost_polynomial_in_n(self):
        ns = np.array([2, 4, 8, 16])
        counts = []
        for n in ns:
            _, cost = eval_separable(GAUSS, [Const(1.0)] * (n - 1), SystemGeometry(np.ones((n, 1))))
            counts.append(cost.total.counted)
        degree = np.polyfit(np.log(ns), np.log(counts), 1)[0]
        assert degree <= 2.0
        # uncached angles give exactly the quadratic sum, plus hyperradius, phi and products
        for n, c in zip(ns, counts):
            assert c == (n + 1) + sum(n - k + 3 for k in range(n - 1)) + 2 + (n - 1)


def _laplacian_total(psi, n):
    return sum(count_ops(laplacian(psi, j)).counted for j in range(n))


def test_laplacian_bound_with_measured_constant():
    """Calibrate c at N=2, then check the N^2 * cost bound holds at larger N."""
    def system(n):
        return SeparableWavefunction(GAUSS, (Const(1.0),) * (n - 1)).to_cartesian(n, 1)

    psi2 = system(2)
    c = _laplacian_total(psi2, 2) / (4 * count_ops(psi2).counted)
    for n in (4, 8, 16):
        psi = system(n)
        assert _laplacian_total(psi, n) <= c * n * n * count_ops(psi).counted
