import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from geoecon import (
    InvestmentSlice,
    InvestmentTensor,
    SpecializationError,
    SpecializationMatrix,
    binarize,
    compute_rva,
    diversity,
    round_up_variant,
    specialization_matrix,
    windowed_variant,
)
from geoecon.specialization import RVAMatrix

from oracles import rva_by_loops


def slice_of(S, year=2024):
    S = np.asarray(S, dtype=float)
    return InvestmentSlice([f"C{i}" for i in range(S.shape[0])], [f"D{j}" for j in range(S.shape[1])], S, year)


def test_rva_single_cell():
    assert compute_rva(slice_of([[5e6]])).values[0, 0] == 1.0


def test_rva_proportional_rows():
    rva = compute_rva(slice_of([[1, 2, 3], [2, 4, 6]]))
    np.testing.assert_allclose(rva.values, 1.0)
    assert binarize(rva).values.tolist() == [[1, 1, 1], [1, 1, 1]]


def test_rva_hand_example():
    rva = compute_rva(slice_of([[8, 2], [2, 8]]))
    np.testing.assert_allclose(rva.values[0], [1.6, 0.4])


def test_rva_matches_loop_oracle():
    rng = np.random.default_rng(3)
    S = rng.gamma(1.0, 1e7, size=(6, 9))
    np.testing.assert_allclose(compute_rva(slice_of(S)).values, rva_by_loops(S), rtol=1e-12)


def test_rva_drops_zero_columns_and_rows():
    rva = compute_rva(slice_of([[1, 0, 3], [0, 0, 0], [2, 0, 1]]))
    assert rva.countries == ["C0", "C2"]
    assert rva.domains == ["D0", "D2"]
    assert not np.isnan(rva.values).any()


def test_rva_errors():
    with pytest.raises(SpecializationError, match="no investment data"):
        compute_rva(slice_of([[0, 0], [0, 0]]))
    tensor = InvestmentTensor.from_array(np.ones((2, 2, 1)), years=[2024])
    with pytest.raises(SpecializationError, match="2023"):
        compute_rva(tensor, 2023)


@pytest.mark.parametrize("value, bit", [(1.0, 1), (0.999, 0), (1.6, 1), (0.0, 0)])
def test_binarize_is_non_strict(value, bit):
    rva = RVAMatrix(["A"], ["X"], np.array([[value]]), 2024)
    assert binarize(rva).values[0, 0] == bit


@pytest.mark.parametrize("s, expected", [(1.3e8, 2e8), (1e8, 1e8), (0.0, 0.0), (1.0, 1e8), (2.5e8, 3e8)])
def test_round_up(s, expected):
    out = round_up_variant(slice_of([[s, 1e8]]), quantum=1e8)
    assert out.values[0, 0] == expected
    assert out.variant == "rounded"


def test_round_up_rejects_bad_quantum():
    with pytest.raises(SpecializationError):
        round_up_variant(slice_of([[1.0]]), quantum=0)


def test_round_up_inexact_quantum_is_idempotent():
    once = round_up_variant(slice_of([[0.25, 0.3, 0.7]]), quantum=0.1)
    twice = round_up_variant(once, quantum=0.1)
    np.testing.assert_array_equal(once.values, twice.values)


def _two_year_tensor():
    values = np.zeros((2, 2, 2))
    values[:, :, 0] = [[4e6, 1e6], [1e6, 1e6]]  # 2023
    values[:, :, 1] = [[3e6, 1e6], [1e6, 5e6]]  # 2024
    return InvestmentTensor.from_array(values, countries=["A", "B"], domains=["X", "Y"], years=[2023, 2024])


def test_window_one_is_plain_slice():
    t = _two_year_tensor()
    w = windowed_variant(t, 2024, window=1)
    p = t.slice(2024)
    assert w.countries == p.countries
    np.testing.assert_array_equal(w.values, p.values)


def test_window_two_adds_years():
    w = windowed_variant(_two_year_tensor(), 2024, window=2)
    assert w.values[0, 0] == 7e6
    assert w.variant == "windowed"


def test_window_matches_hand_summed_tensor():
    t = _two_year_tensor()
    hand = np.array([[4e6 + 3e6, 1e6 + 1e6], [1e6 + 1e6, 1e6 + 5e6]])
    a = specialization_matrix(windowed_variant(t, 2024, 2))
    b = specialization_matrix(InvestmentSlice(["A", "B"], ["X", "Y"], hand, 2024))
    np.testing.assert_array_equal(a.values, b.values)


def test_window_missing_year():
    with pytest.raises(SpecializationError, match="2022"):
        windowed_variant(_two_year_tensor(), 2023, window=2)


def test_window_coverage_uses_union_of_firms():
    values = np.ones((1, 2, 2))
    firms = {("A", 2023): frozenset({"a", "b"}), ("A", 2024): frozenset({"b", "c"})}
    t = InvestmentTensor(["A"], ["X", "Y"], [2023, 2024], values, firms, min_classified_firms=3)
    assert t.slice(2024).countries == []
    assert windowed_variant(t, 2024, 2).countries == ["A"]


positive_tensors = arrays(
    float,
    st.tuples(st.integers(2, 6), st.integers(2, 7)),
    elements=st.one_of(st.just(0.0), st.floats(1e3, 1e9)),
)


@settings(max_examples=60, deadline=None)
@given(positive_tensors, st.floats(1e-3, 1e3))
def test_scale_invariance(S, c):
    if S.sum() == 0:
        return
    a = specialization_matrix(slice_of(S))
    b = specialization_matrix(slice_of(S * c))
    np.testing.assert_allclose(compute_rva(slice_of(S)).values, compute_rva(slice_of(S * c)).values, rtol=1e-9)
    assert a.countries == b.countries
    # equality cases may flip under rounding; compare away from the threshold
    rva = compute_rva(slice_of(S)).values
    safe = np.abs(rva - 1) > 1e-9
    np.testing.assert_array_equal(a.values[safe], b.values[safe])


@settings(max_examples=60, deadline=None)
@given(positive_tensors, st.data())
def test_every_active_country_is_specialized_somewhere(S, data):
    if S.sum() == 0:
        return
    M = specialization_matrix(slice_of(S))
    assert (diversity(M) >= 1).all()


def test_specialization_matrix_validation():
    with pytest.raises(SpecializationError):
        SpecializationMatrix(["A"], ["X"], np.array([[2]]))
    with pytest.raises(SpecializationError):
        SpecializationMatrix(["A", "A"], ["X"], np.array([[1], [0]]))


@settings(max_examples=60, deadline=None)
@given(positive_tensors, st.floats(1e-3, 1e3), st.data())
def test_rescaling_a_country_keeps_its_own_row(S, c, data):
    i = data.draw(st.integers(0, S.shape[0] - 1))
    if S[i].sum() == 0:
        return
    T = S.copy()
    T[i] *= c
    # i is specialized in j iff S_ij / S_i >= R_j / R with R the rest of the
    # world, and neither side depends on the scale of row i
    name = f"C{i}"
    rva_b, rva_a = compute_rva(slice_of(S)), compute_rva(slice_of(T))
    assert rva_a.domains == rva_b.domains
    r = rva_b.countries.index(name)
    before, after = rva_b.values[r], rva_a.values[r]
    # both sides must be clear of the floating-point tie band around 1
    clear = (np.abs(before - 1) > 1e-9) & (np.abs(after - 1) > 1e-9)
    np.testing.assert_array_equal((before >= 1)[clear], (after >= 1)[clear])


def test_rescaling_a_country_can_move_other_rows():
    S = np.array([[1.0, 3.0], [3.0, 1.0], [1.1, 0.9]])
    before = specialization_matrix(slice_of(S)).values
    S[1] *= 10
    after = specialization_matrix(slice_of(S)).values
    np.testing.assert_array_equal(before[1], after[1])
    assert before[2].tolist() == [1, 0] and after[2].tolist() == [0, 1]
