from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from bpqs.catalog import Context, Scenario, builtin
from bpqs.correlations import (
    ConstructionError,
    CorrelationTable,
    check_nosignaling,
    check_normalization,
    correlation,
    theorem1_construct,
    zeros,
)
from bpqs.exactnum import QuadExt
from bpqs.linalg import Matrix, PureState, Ray

from oracles import float_correlation

COMP3 = Context.from_rays([(1, 0, 0), (0, 1, 0), (0, 0, 1)], "z")
HAD = Context.from_rays([(1, 1, 0), (1, -1, 0), (0, 0, 1)], "h")


def _rays(contexts):
    return [[p.ray for p in c.projectors] for c in contexts]


def _index(ctx, v):
    return [p.ray for p in ctx.projectors].index(Ray(v))


def test_magic_square_example_entries():
    sc = builtin("magic-square-scenario")
    t = correlation(sc)
    ax, by = sc.alice_contexts[0], sc.bob_contexts[0]
    a = _index(ax, (1, 0, 0, 0))
    assert t[0, 0, a, _index(by, (1, 1, 0, 0))] == Fraction(1, 8)
    assert t[0, 0, a, _index(by, (0, 0, 1, 1))] == 0


@pytest.mark.parametrize("name", ["magic-square-scenario", "qutrit-scenario"])
def test_matches_float_tensor_product(name):
    sc = builtin(name)
    t = correlation(sc)
    ref = float_correlation(sc.state.coeff, _rays(sc.alice_contexts), _rays(sc.bob_contexts))
    assert set(ref) == set(t.positions())
    for k, v in ref.items():
        assert abs(float(t[k]) - v) < 1e-12


def test_computational_basis_delta():
    sc = Scenario(PureState(Matrix.identity(3)), [COMP3], [COMP3])
    t = correlation(sc)
    for a in range(3):
        for b in range(3):
            assert t[0, 0, a, b] == (Fraction(1, 3) if a == b else 0)
    assert zeros(t) == {(0, 0, a, b) for a in range(3) for b in range(3) if a != b}
    assert check_nosignaling(t)


def test_zeros_of_positive_table_empty():
    comp = Context.from_rays([(1, 0), (0, 1)], "z")
    diag = Context.from_rays([(1, 1), (1, -1)], "x")
    t = correlation(Scenario(PureState(Matrix.identity(2)), [comp], [diag]))
    assert zeros(t) == set()


def test_signaling_table_detected():
    one, nil = QuadExt(1), QuadExt(0)
    values = {
        (0, 0, 0, 0): one, (0, 0, 0, 1): nil, (0, 0, 1, 0): nil, (0, 0, 1, 1): nil,
        (0, 1, 0, 0): nil, (0, 1, 0, 1): nil, (0, 1, 1, 0): nil, (0, 1, 1, 1): one,
    }
    t = CorrelationTable(values, (2,), (2, 2))
    assert check_normalization(t)
    assert not check_nosignaling(t)


@pytest.mark.parametrize("name", ["magic-square-scenario", "qutrit-scenario"])
def test_builtin_invariants(name):
    t = correlation(builtin(name))
    assert check_normalization(t)
    assert check_nosignaling(t)


def test_zero_counts():
    assert len(zeros(correlation(builtin("magic-square-scenario")))) == 72
    assert len(zeros(correlation(builtin("qutrit-scenario")))) == 96


@pytest.mark.parametrize("name", ["magic-square-scenario", "qutrit-scenario"])
def test_zeros_iff_supports_orthogonal(name):
    sc = builtin(name)
    t = correlation(sc)
    s_a, s_b = theorem1_construct(sc)
    z = zeros(t)
    for x, y, a, b in t.positions():
        orth = s_a[x].projectors[a].orthogonal_to(s_b[y].projectors[b])
        assert orth == ((x, y, a, b) in z)


@pytest.mark.parametrize("name", ["magic-square-scenario", "qutrit-scenario"])
def test_construction_returns_measurement_rays(name):
    sc = builtin(name)
    s_a, s_b = theorem1_construct(sc)
    assert [c.projectors for c in s_a] == [c.projectors for c in sc.alice_contexts]
    assert [c.projectors for c in s_b] == [c.projectors for c in sc.bob_contexts]


def test_construction_rejects_non_maximal_entanglement():
    sc = Scenario(PureState(Matrix.diag([1, 2, 3])), [HAD], [HAD])
    with pytest.raises(ConstructionError) as ei:
        theorem1_construct(sc)
    assert (ei.value.side, ei.value.index) == ("B", 0)


def test_zero_probability_outcome_breaks_context():
    sc = Scenario(PureState(Matrix.diag([1, 1, 0])), [COMP3], [COMP3])
    with pytest.raises(ConstructionError):
        theorem1_construct(sc)


def test_computational_construction():
    sc = Scenario(PureState(Matrix.identity(3)), [COMP3], [COMP3])
    s_a, s_b = theorem1_construct(sc)
    assert s_a[0].projectors == COMP3.projectors == s_b[0].projectors


grids = st.lists(st.integers(-3, 3), min_size=9, max_size=9).filter(any)


@settings(max_examples=40, deadline=None)
@given(grids, st.integers(0, 8), st.integers(0, 6))
def test_random_states_normalized_and_nonsignaling(grid, x, y):
    q = builtin("qutrit-scenario")
    state = PureState(Matrix([grid[0:3], grid[3:6], grid[6:9]]))
    sc = Scenario(state, [q.alice_contexts[x], q.alice_contexts[(x + 4) % 9]], [q.bob_contexts[y]], q.radical)
    t = correlation(sc)
    assert check_normalization(t)
    assert check_nosignaling(t)
