"""範囲縮小のテスト"""

import math
import random
from fractions import Fraction

import pytest

from crtrig.fpcore import bits_to_f32
from crtrig.models import TABLE_SIZE, ReductionStrategy
from crtrig.oracle import reconstruction_error
from crtrig.rangered import create_reducer, gen_pi_constants, get_available_strategies, reduce
from crtrig.rangered.constants import load_pi_constants, save_pi_constants, scaled_256_over_pi
from crtrig.rangered.integer import mul64x64, mul64x64_limbs

# 2/π の16進展開の先頭（256/π も同じビット列）
TWO_OVER_PI_HEX = "A2F9836E4E441529FC2757D1F534DDC0DB6295993C439041FE5163"

RECONSTRUCTION_TOLERANCE = 2.0**-45
STRATEGIES = list(ReductionStrategy)


def _random_inputs(n: int, seed: int, min_exp: int = 122, max_exp: int = 254) -> list[float]:
    """指数フィールドが一様な正のbinary32値"""
    rng = random.Random(seed)
    values = []
    for _ in range(n):
        bits = rng.randint(min_exp, max_exp) << 23 | rng.getrandbits(23)
        values.append(bits_to_f32(bits))
    return values


class TestPiConstants:
    """256/π の分割定数"""

    def test_first_piece(self):
        c = gen_pi_constants()
        assert c.pieces28[0] == float.fromhex("0x1.45f306cp+6")
        assert c.pieces28_exp[0] == -21

    def test_words_match_hex_expansion(self):
        """64ビットワードは 2/π の16進展開と一致"""
        c = gen_pi_constants()
        expected = int(TWO_OVER_PI_HEX, 16) >> 24
        words = (c.words64[0] << 128) | (c.words64[1] << 64) | c.words64[2]
        assert words == expected
        assert c.words64[0] == 0xA2F9836E4E441529

    def test_small_piece_split(self):
        """P1, P0 は上位80ビットを40ビットずつ分けたもの"""
        c = gen_pi_constants()
        assert c.p1 == 0xA2F9836E4E
        assert c.p0 == 0x441529FC27

    def test_pieces28_are_exact_chunks(self):
        """28ビット片は重ならずに連続する"""
        c = gen_pi_constants()
        for i, (v, e) in enumerate(zip(c.pieces28, c.pieces28_exp)):
            assert e == 6 - 28 * i - 27
            m = v / 2.0**e
            assert m == int(m) and 0 <= m < 2**28

    def test_pieces53_lsb_budget(self):
        """2番目の53ビット片の最下位ビットの指数は -100"""
        c = gen_pi_constants()
        assert c.pieces53_exp[1] == -100
        assert 104 + c.pieces53_exp[1] <= 8

    def test_tail_terms(self):
        """small_tail + small_tail_lo と int_small_tail は切り捨てた下位桁を表す"""
        c = gen_pi_constants()
        f = 256
        n = scaled_256_over_pi(f)
        rest = Fraction(n & ((1 << (f - 21)) - 1), 1 << f)
        assert abs(Fraction(c.small_tail) + Fraction(c.small_tail_lo) - rest) <= Fraction(1, 1 << 125)
        assert 0 < abs(c.small_tail_lo) <= 2.0**-75
        int_rest = Fraction(n & ((1 << (f - 73)) - 1), 1 << f)
        assert abs(Fraction(c.int_small_tail) - int_rest) <= Fraction(1, 1 << 126)
        assert 0 < c.int_small_tail < 2.0**-73

    def test_pi_over_256(self):
        c = gen_pi_constants()
        assert abs(c.pi_over_256 - math.pi / 256) <= math.ulp(math.pi / 256)

    def test_low_precision_rejected(self):
        with pytest.raises(ValueError):
            gen_pi_constants(199)

    def test_save_load(self, tmp_path):
        c = gen_pi_constants()
        path = tmp_path / "pi_constants.txt"
        save_pi_constants(c, path)
        assert load_pi_constants(path) == c
        first = [line for line in path.read_text().splitlines() if line.startswith("pieces28 0")]
        assert first == ["pieces28 0 0x1.45f306cp+6 -21"]

    def test_load_missing_tag(self, tmp_path):
        path = tmp_path / "broken.txt"
        path.write_text("small_tail 0x1p-22\n")
        with pytest.raises(ValueError):
            load_pi_constants(path)


class TestMul64:
    """64x64 乗算"""

    def test_limbs_match_native(self):
        rng = random.Random(7)
        cases = [(0, 0), (2**64 - 1, 2**64 - 1), (2**63, 2), (2**32 - 1, 2**32 + 1)]
        cases += [(rng.getrandbits(64), rng.getrandbits(64)) for _ in range(1000)]
        for a, b in cases:
            assert mul64x64_limbs(a, b) == mul64x64(a, b)


class TestReduce:
    """縮小結果の性質"""

    def test_available_strategies(self):
        assert get_available_strategies() == ["fpv1", "fpv2", "int", "hybrid"]

    def test_unknown_strategy(self):
        with pytest.raises(ValueError, match="不明な縮小戦略"):
            create_reducer("payne-hanek")

    @pytest.mark.parametrize("x", [math.nan, math.inf, -math.inf])
    def test_non_finite(self, x):
        with pytest.raises(ValueError):
            reduce(x)

    def test_no_reduction_below_threshold(self):
        """|x| < π/128 は縮小しない"""
        r = reduce(0.01)
        assert not r.needs_reduction
        assert (r.xp, r.kp) == (0.01, 0)

    def test_exact_multiple_of_table_step(self):
        """π/128 付近の入力は k' = 2"""
        x = bits_to_f32(0x3CC90FDB)  # π/128 の最近接binary32
        for strategy in STRATEGIES:
            r = reduce(x, strategy)
            assert r.kp == 2
            assert 0 < r.xp < 2.0**-29

    def test_odd_symmetry(self):
        """reduce(-x) = (-x', -k' mod 512)"""
        for x in _random_inputs(200, 8):
            for strategy in STRATEGIES:
                r = reduce(x, strategy)
                n = reduce(-x, strategy)
                assert n.xp == -r.xp
                assert n.kp == (-r.kp) % TABLE_SIZE

    @pytest.mark.parametrize("strategy", STRATEGIES)
    def test_reconstruction(self, strategy):
        """高精度の縮小と一致し |r| は 1/2 程度に収まる"""
        inputs = _random_inputs(300, 9)
        inputs += [2.0**30, bits_to_f32(0x7F7FFFFF), bits_to_f32(0x4E7FFFFF)]
        # 2^30 直下の小さい入力用の経路
        inputs += [879448128.0, 1069507584.0, bits_to_f32(0x4E7FFFFE), bits_to_f32(0x4E600001)]
        inputs += _random_inputs(200, 12, min_exp=150, max_exp=156)
        for x in inputs:
            reduced = reduce(x, strategy)
            assert 0 <= reduced.kp < TABLE_SIZE
            dist, r = reconstruction_error(x, reduced)
            assert dist <= RECONSTRUCTION_TOLERANCE, (x, strategy)
            assert r <= 0.5 + 2.0**-40

    def test_large_input_paths_agree(self):
        """2^30 以上では fpv1・fpv2・int の k' が一致"""
        for x in _random_inputs(300, 10, min_exp=157):
            kps = {reduce(x, s).kp for s in STRATEGIES}
            assert len(kps) == 1

    def test_exponent_sweep(self):
        """全ての指数で縮小できる（シフト量の検査に失敗しない）"""
        for exp_field in range(120, 255):
            x = bits_to_f32(exp_field << 23 | 0x2AAAAA)
            for strategy in STRATEGIES:
                reduce(x, strategy)

    def test_custom_multiplier(self):
        """32ビットリムの乗算でも同じ結果"""
        native = create_reducer(ReductionStrategy.INT)
        limbs = create_reducer(ReductionStrategy.INT, mul=mul64x64_limbs)
        for x in _random_inputs(200, 11):
            assert native.reduce(x) == limbs.reduce(x)
