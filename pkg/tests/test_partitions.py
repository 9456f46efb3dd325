import pytest

from kplab.partitions import (
    Partition,
    enumerate_partitions,
    hooks,
    is_hook,
    kappa,
    kappa_alt,
    partition_count,
)


def test_enumerate_zero():
    assert enumerate_partitions(0) == [Partition()]


def test_enumerate_two_order():
    got = enumerate_partitions(2)
    assert got == [Partition(), Partition((1,)), Partition((2,)), Partition((1, 1))]


def test_enumerate_four_count_oracle():
    got = enumerate_partitions(4)
    assert len(got) == sum(partition_count(n) for n in range(5)) == 12


def test_enumerate_unique_and_sorted_by_size():
    got = enumerate_partitions(8)
    assert len(set(got)) == len(got)
    sizes = [p.size for p in got]
    assert sizes == sorted(sizes)
    assert len(got) == sum(partition_count(n) for n in range(9))


def test_kappa_examples():
    assert kappa(Partition()) == 0
    # contents of (2,1): 0, 1, -1
    assert kappa(Partition((2, 1))) == 0
    # contents of (3): 0 + 1 + 2
    assert kappa(Partition((3,))) == 6


def test_kappa_cross_check_and_conjugation():
    for lam in enumerate_partitions(8):
        k = kappa(lam)
        assert k == kappa_alt(lam)
        assert k == -kappa(lam.conjugate())


def test_hooks_examples():
    assert hooks(Partition((1,))) == {(1, 1): 1}
    assert hooks(Partition((2, 1))) == {(1, 1): 3, (1, 2): 1, (2, 1): 1}
    assert hooks(Partition((2, 2))) == {(1, 1): 3, (1, 2): 2, (2, 1): 2, (2, 2): 1}


def test_hooks_conjugation_invariant_multiset():
    for lam in enumerate_partitions(8):
        h = hooks(lam)
        assert len(h) == lam.size
        assert sorted(h.values()) == sorted(hooks(lam.conjugate()).values())


def test_is_hook():
    assert is_hook(Partition((3, 1, 1))) == (True, 2, 2)
    assert is_hook(Partition((2, 2)))[0] is False
    assert is_hook(Partition())[0] is False
    assert is_hook(Partition((1,))) == (True, 0, 0)


def test_partition_validation():
    with pytest.raises(ValueError):
        Partition((1, 2))
    with pytest.raises(ValueError):
        Partition((2, 0))
