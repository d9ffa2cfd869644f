import pytest

from renormlab import (
    ROOT,
    DecompositionTimes,
    DepthError,
    a1,
    a1_inverse,
    a2,
    a2_inverse,
    compare,
    enumerate_descending,
    level,
    validate_path,
)
from renormlab.errors import DomainError


def test_root_and_levels():
    assert ROOT == ""
    assert level(ROOT) == 0
    assert level("121") == 3


def test_validate_path_rejects_other_symbols():
    assert validate_path("1212") == "1212"
    with pytest.raises(DomainError):
        validate_path("103")


def test_descending_order_small_depths():
    assert enumerate_descending(DecompositionTimes(1)) == ("2", "", "1")
    assert enumerate_descending(DecompositionTimes(2)) == (
        "22", "2", "21", "", "12", "1", "11")


def test_compare_is_a_strict_total_order():
    times = DecompositionTimes(3)
    order = times.indices_descending()
    for a, b in zip(order, order[1:]):
        assert compare(a, b) > 0
        assert compare(b, a) < 0
    assert compare("12", "12") == 0


def test_subtree_maps_strip_their_leading_letter():
    assert a1("121") == "21"
    assert a2("21") == "1"
    with pytest.raises(DomainError):
        a1("21")
    with pytest.raises(DomainError):
        a2("")
    for w in ("", "1", "22", "121"):
        assert a1(a1_inverse(w, depth=4)) == w
        assert a2(a2_inverse(w, depth=4)) == w


def test_subtree_inverse_depth_guard():
    with pytest.raises(DepthError):
        a1_inverse("1111", depth=4)
    with pytest.raises(DepthError):
        a2_inverse("2222", depth=4)


def test_subtree_embeddings_preserve_time_order():
    times = DecompositionTimes(2)
    order = times.indices_descending()
    lifted1 = [a1_inverse(w, 3) for w in order]
    lifted2 = [a2_inverse(w, 3) for w in order]
    for seq in (lifted1, lifted2):
        for a, b in zip(seq, seq[1:]):
            assert compare(a, b) > 0
    # the whole upper-letter subtree is later than the lower-letter one
    assert compare(lifted2[-1], lifted1[0]) > 0


def test_times_container_accounting():
    times = DecompositionTimes(3)
    assert times.size == 2 ** 4 - 1
    assert len(times.indices_descending()) == times.size
    assert "121" in times
    assert "1211" not in times
    assert set(times.level_indices(0)) == {""}
    assert set(times.level_indices(2)) == {"11", "12", "21", "22"}
    assert times == DecompositionTimes(3)
    assert times != DecompositionTimes(2)


def test_suffix_set_is_a_descending_prefix():
    times = DecompositionTimes(2)
    assert times.suffix_set("") == ("22", "2", "21", "")
    assert times.suffix_set("1") == ("22", "2", "21", "", "12", "1")
    assert times.suffix_set("11") == times.indices_descending()
    with pytest.raises(DepthError):
        times.suffix_set("111")
