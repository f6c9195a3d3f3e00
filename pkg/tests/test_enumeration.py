import itertools

import pytest

from fforge.enumeration import (
    ShardSpec,
    count_free_trees,
    decode,
    format_level_sequences,
    free_trees,
    free_trees_shard,
    parents,
    read_level_sequences,
    write_level_sequences,
)
from fforge.errors import BadParam, BadSequence
from fforge.tree import build_path, build_star, canonical_code, from_edge_list

from conftest import all_labelled_trees

# OEIS A000055, independent of any code here
KNOWN = [1, 1, 1, 2, 3, 6, 11, 23, 47, 106, 235, 551, 1301, 3159, 7741, 19320]


def test_tiny_counts():
    assert list(free_trees(1)) == [(1,)]
    assert len(list(free_trees(4))) == 2
    assert count_free_trees(11) == 235
    assert count_free_trees(12) == 551


def test_known_counts():
    assert [count_free_trees(n) for n in range(1, 17)] == KNOWN


@pytest.mark.parametrize("n", range(1, 9))
def test_prufer_oracle(n):
    oracle = {canonical_code(t) for t in all_labelled_trees(n)}
    produced = [canonical_code(decode(s)) for s in free_trees(n)]
    assert len(produced) == len(set(produced))
    assert set(produced) == oracle


def test_no_duplicates_up_to_twelve():
    for n in range(1, 13):
        codes = [canonical_code(decode(s)) for s in free_trees(n)]
        assert len(codes) == len(set(codes)) == KNOWN[n - 1]


def test_sequences_are_valid():
    for n in range(1, 11):
        for seq in free_trees(n):
            assert len(seq) == n and seq[0] == 1
            assert all(b <= a + 1 for a, b in zip(seq, seq[1:]))
            t = decode(seq)
            assert len(t.edges()) == n - 1


def test_deterministic():
    assert list(free_trees(10)) == list(free_trees(10))


def test_bounds():
    for bad in (0, 25, -3):
        with pytest.raises(BadParam):
            list(free_trees(bad))


class TestDecode:
    def test_examples(self):
        assert decode([1, 2, 3, 4]) == build_path(4)
        assert decode([1, 2, 2, 2]) == build_star(3)
        assert decode([1]) == from_edge_list(1, [])

    def test_parents(self):
        assert parents([1, 2, 3, 2, 3]) == [-1, 0, 1, 0, 3]

    @pytest.mark.parametrize("seq", [[], [2, 3], [1, 3], [1, 2, 4], [1, 1]])
    def test_bad(self, seq):
        with pytest.raises(BadSequence):
            decode(seq)


class TestShards:
    def test_single_shard(self):
        assert list(free_trees_shard(9, ShardSpec(0, 1))) == list(free_trees(9))

    def test_counts_sum(self):
        sizes = [len(list(free_trees_shard(11, ShardSpec(k, 4)))) for k in range(4)]
        assert sum(sizes) == 235
        assert max(sizes) - min(sizes) <= 1

    def test_disjoint_union(self):
        shards = [set(free_trees_shard(9, ShardSpec(k, 3))) for k in range(3)]
        for a, b in itertools.combinations(shards, 2):
            assert not a & b
        assert set().union(*shards) == set(free_trees(9))

    @pytest.mark.parametrize("k,c", [(-1, 2), (2, 2), (0, 0)])
    def test_invalid(self, k, c):
        with pytest.raises(BadParam):
            ShardSpec(k, c)


class TestLevelFile:
    def test_roundtrip(self, tmp_path):
        seqs = list(free_trees(7))
        path = tmp_path / "levels.txt"
        write_level_sequences(seqs, path)
        assert path.read_text() == format_level_sequences(seqs)
        assert read_level_sequences(path) == seqs

    def test_format(self):
        assert format_level_sequences([(1, 2, 2), (1, 2, 3)]) == "1 2 2\n1 2 3\n"

    def test_bad_file(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("1 2 x\n")
        with pytest.raises(BadSequence):
            read_level_sequences(path)
        path.write_text("1 3\n")
        with pytest.raises(BadSequence):
            read_level_sequences(path)
