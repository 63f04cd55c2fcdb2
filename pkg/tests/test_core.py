"""Tests for genomes, decoding, variation operators, and operator choice."""

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from evobits.core import (
    BitFlip,
    BitGenome,
    NPointCrossover,
    RandomSource,
    bitflip,
    choose_operator,
    decode,
    hamming,
    n_point_crossover,
    random_genome,
)

genomes = st.integers(min_value=1, max_value=64).flatmap(
    lambda n: st.lists(st.integers(0, 1), min_size=n, max_size=n)
).map(lambda bits: BitGenome(tuple(bits)))


class TestRandomSource:
    def test_same_seed_same_stream(self):
        a = RandomSource(123)
        b = RandomSource(123)
        assert [a.random() for _ in range(100)] == [b.random() for _ in range(100)]

    def test_uniform_reals_in_unit_interval(self):
        rng = RandomSource(7)
        assert all(0.0 <= rng.random() < 1.0 for _ in range(1000))

    @pytest.mark.parametrize("seed", [-1, 2**64])
    def test_seed_out_of_range(self, seed):
        with pytest.raises(ValueError):
            RandomSource(seed)


class TestBitGenome:
    def test_round_trip_string(self):
        g = BitGenome.from_string("10100")
        assert str(g) == "10100"
        assert g.length == 5

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            BitGenome(())

    def test_rejects_non_binary(self):
        with pytest.raises(ValueError):
            BitGenome((0, 2, 1))


class TestRandomGenome:
    def test_deterministic_by_seed(self):
        assert random_genome(32, RandomSource(5)) == random_genome(32, RandomSource(5))

    def test_single_bit(self):
        assert random_genome(1, RandomSource(0)).length == 1

    def test_zero_length_rejected(self):
        with pytest.raises(ValueError):
            random_genome(0, RandomSource(0))

    @pytest.mark.parametrize("seed", [1, 2, 3])
    def test_ones_fraction_near_half(self, seed):
        g = random_genome(10_000, RandomSource(seed))
        fraction = sum(g.bits) / g.length
        assert 0.45 <= fraction <= 0.55


class TestDecode:
    def test_all_zeros_maps_to_low(self):
        assert decode(BitGenome.from_string("00000000"), 4, 0.0, 10.0) == [0.0, 0.0]

    def test_all_ones_maps_to_high(self):
        assert decode(BitGenome.from_string("11111111"), 4, 0.0, 10.0) == [10.0, 10.0]

    def test_big_endian_chunks(self):
        values = decode(BitGenome.from_string("10000100"), 4, 0.0, 10.0)
        assert values == pytest.approx([8 / 15 * 10, 4 / 15 * 10])

    def test_endpoints_exact_for_shifted_range(self):
        # fractional bounds are where naive scaling loses exactness
        values = decode(BitGenome.from_string("0000000011111111"), 8, 0.1, 0.3)
        assert values == [0.1, 0.3]

    @pytest.mark.parametrize("gene_bits", range(1, 9))
    def test_monotone_in_chunk_value_exhaustive(self, gene_bits):
        previous = None
        for u in range(2**gene_bits):
            bits = tuple((u >> (gene_bits - 1 - i)) & 1 for i in range(gene_bits))
            (value,) = decode(BitGenome(bits), gene_bits, -5.0, 5.0)
            if previous is not None:
                assert value >= previous
            previous = value

    def test_gene_bits_must_divide_length(self):
        with pytest.raises(ValueError):
            decode(BitGenome.from_string("101"), 2, 0.0, 1.0)

    def test_rejects_inverted_range(self):
        with pytest.raises(ValueError):
            decode(BitGenome.from_string("1010"), 2, 1.0, 0.0)

    @given(genomes, st.integers(1, 8))
    @settings(max_examples=200, deadline=None)
    def test_values_stay_inside_range(self, genome, gene_bits):
        if genome.length % gene_bits != 0:
            gene_bits = 1
        for value in decode(genome, gene_bits, -2.5, 7.5):
            assert -2.5 <= value <= 7.5


class TestBitflip:
    def test_flipping_all_bits_complements(self):
        flipped = bitflip(BitGenome.from_string("0000"), 4, RandomSource(1))
        assert str(flipped) == "1111"

    def test_single_flip_hamming_distance(self):
        g = BitGenome.from_string("1010")
        assert hamming(g, bitflip(g, 1, RandomSource(9))) == 1

    def test_input_untouched(self):
        g = BitGenome.from_string("0000")
        bitflip(g, 2, RandomSource(3))
        assert str(g) == "0000"

    def test_flip_count_above_length_rejected(self):
        with pytest.raises(ValueError):
            bitflip(BitGenome.from_string("101"), 4, RandomSource(0))

    def test_positions_uniform(self):
        # 10,000 single flips on 8 bits: each position expected 1250 +- 150
        rng = RandomSource(7)
        g = BitGenome.from_string("00000000")
        counts = [0] * 8
        for _ in range(10_000):
            child = bitflip(g, 1, rng)
            counts[child.bits.index(1)] += 1
        assert all(1100 <= c <= 1400 for c in counts)

    @given(genomes, st.integers(1, 64), st.integers(0, 2**32))
    @settings(max_examples=200, deadline=None)
    def test_hamming_distance_equals_flip_count(self, genome, flip_count, seed):
        flip_count = min(flip_count, genome.length)
        child = bitflip(genome, flip_count, RandomSource(seed))
        assert hamming(genome, child) == flip_count
        assert child.length == genome.length


class TestNPointCrossover:
    def test_identical_parents_identity(self):
        g = BitGenome.from_string("0000")
        assert n_point_crossover(g, g, 2, RandomSource(4)) == g

    def test_single_cut_shape(self):
        a = BitGenome.from_string("1111")
        b = BitGenome.from_string("0000")
        child = n_point_crossover(a, b, 1, RandomSource(0))
        text = str(child)
        # one cut: a prefix of ones followed by zeros
        assert text in {"1000", "1100", "1110"}

    def test_two_point_patterns_enumerated(self):
        a = BitGenome.from_string("11111111")
        b = BitGenome.from_string("00000000")
        expected = {
            "1" * i + "0" * (j - i) + "1" * (8 - j)
            for i, j in itertools.combinations(range(1, 8), 2)
        }
        seen = {str(n_point_crossover(a, b, 2, RandomSource(s))) for s in range(500)}
        assert seen <= expected
        assert seen == expected  # 500 seeds cover all 21 cut pairs

    def test_mismatched_lengths_rejected(self):
        with pytest.raises(ValueError):
            n_point_crossover(
                BitGenome.from_string("11"), BitGenome.from_string("111"), 1, RandomSource(0)
            )

    def test_too_many_points_rejected(self):
        g = BitGenome.from_string("1010")
        with pytest.raises(ValueError):
            n_point_crossover(g, g, 4, RandomSource(0))

    @given(genomes, st.integers(0, 2**32), st.integers(0, 2**32), st.integers(1, 16))
    @settings(max_examples=200, deadline=None)
    def test_mask_property(self, a, seed_b, seed_cuts, points):
        if a.length < 2:
            return
        b = random_genome(a.length, RandomSource(seed_b))
        points = min(points, a.length - 1)
        child = n_point_crossover(a, b, points, RandomSource(seed_cuts))
        assert child.length == a.length
        assert all(c in (x, y) for c, x, y in zip(child.bits, a.bits, b.bits))


class TestChooseOperator:
    def test_single_operator_always_chosen(self):
        ops = [BitFlip(rate=17.0)]
        rng = RandomSource(2)
        assert all(choose_operator(ops, rng) == 0 for _ in range(100))

    def test_frequencies_match_normalized_rates(self):
        ops = [BitFlip(rate=2.0), BitFlip(rate=2.0), NPointCrossover(rate=4.0)]
        rng = RandomSource(11)
        counts = [0, 0, 0]
        draws = 100_000
        for _ in range(draws):
            counts[choose_operator(ops, rng)] += 1
        for count, expected in zip(counts, (0.25, 0.25, 0.5)):
            assert abs(count / draws - expected) < 0.01

    def test_rates_read_at_call_time(self):
        ops = [BitFlip(rate=1.0), NPointCrossover(rate=1000.0)]
        rng = RandomSource(3)
        ops[1].rate = 1e-9
        assert all(choose_operator(ops, rng) == 0 for _ in range(100))

    def test_empty_list_rejected(self):
        with pytest.raises(ValueError):
            choose_operator([], RandomSource(0))

    def test_non_positive_rate_rejected(self):
        ops = [BitFlip(rate=1.0)]
        ops[0].rate = 0.0
        with pytest.raises(ValueError):
            choose_operator(ops, RandomSource(0))


class TestHamming:
    @pytest.mark.parametrize(
        "a, b, expected",
        [("0000", "0000", 0), ("0000", "1111", 4), ("1010", "1001", 2)],
    )
    def test_known_distances(self, a, b, expected):
        assert hamming(BitGenome.from_string(a), BitGenome.from_string(b)) == expected

    def test_mismatched_lengths_rejected(self):
        with pytest.raises(ValueError):
            hamming(BitGenome.from_string("10"), BitGenome.from_string("100"))

    @given(genomes, st.integers(0, 2**32))
    @settings(max_examples=100, deadline=None)
    def test_symmetric_and_zero_iff_equal(self, a, seed):
        b = random_genome(a.length, RandomSource(seed))
        assert hamming(a, b) == hamming(b, a)
        assert (hamming(a, b) == 0) == (a == b)


class TestOperatorSpecs:
    def test_bitflip_defaults(self):
        op = BitFlip()
        assert op.flip_count == 1 and op.arity == 1

    def test_crossover_validates_points_at_application(self):
        op = NPointCrossover(points=5)
        g = BitGenome.from_string("1010")
        with pytest.raises(ValueError):
            op.apply([g, g], RandomSource(0))

    def test_rejects_non_positive_rate(self):
        with pytest.raises(ValueError):
            BitFlip(rate=0.0)
        with pytest.raises(ValueError):
            NPointCrossover(rate=-1.0)
