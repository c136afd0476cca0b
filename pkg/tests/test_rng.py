from udperturb.rng import RngStream, splitmix64_next


def test_reference_sequence_seed_zero():
    # First outputs of the reference SplitMix64 implementation for seed 0.
    state, first = splitmix64_next(0)
    state, second = splitmix64_next(state)
    assert first == 0xE220A8397B1DCDAF
    assert second == 0x6E789E6AA1B965F4


def test_stream_matches_step_function():
    stream = RngStream(12345)
    state = 12345
    for _ in range(10):
        state, expected = splitmix64_next(state)
        assert stream.next_u64() == expected


def test_below_one_is_always_zero():
    stream = RngStream(99)
    assert all(stream.below(1) == 0 for _ in range(100))


def test_below_stays_in_range_and_covers_all_values():
    stream = RngStream(7)
    seen = set()
    for _ in range(1000):
        value = stream.below(3)
        assert 0 <= value < 3
        seen.add(value)
    assert seen == {0, 1, 2}


def test_below_rejects_nonpositive_bound():
    import pytest

    with pytest.raises(ValueError):
        RngStream(0).below(0)


def test_same_seed_same_sequence():
    a = RngStream(42)
    b = RngStream(42)
    assert [a.next_u64() for _ in range(50)] == [b.next_u64() for _ in range(50)]


def test_choice_uses_uniform_indexing():
    stream = RngStream(5)
    items = ["a", "b", "c", "d"]
    counts = {item: 0 for item in items}
    for _ in range(4000):
        counts[stream.choice(items)] += 1
    for item in items:
        assert 800 < counts[item] < 1200
