"""オラクルのテスト"""

import math
import random
from fractions import Fraction

import numpy as np
import pytest

from crtrig.fpcore import bits_to_f32, round_float, round_from_34, round_to_odd_34
from crtrig.models import BFLOAT16, BINARY32, RO34, FpFormat, Func, RoundingMode
from crtrig.oracle import (
    HpValue,
    Oracle,
    OracleBackend,
    OraclePrecisionError,
    create_oracle,
    create_oracle_backend,
    get_available_backends,
)
from crtrig.oracle.cache import RECORD_DTYPE, OracleCache

ONE = 0x3F800000


def _sample(n: int, seed: int) -> list[int]:
    """有限で0でないbinary32パターン"""
    rng = random.Random(seed)
    patterns = []
    while len(patterns) < n:
        bits = rng.getrandbits(32)
        if (bits >> 23) & 0xFF not in (0, 0xFF):
            patterns.append(bits)
    return patterns


class _UndecidedBackend(OracleBackend):
    """常に丸めが確定しない幅の区間を返す"""

    name = "undecided"

    def evaluate(self, func, x, bits):
        return HpValue(Fraction(1), Fraction(1, 2), bits)


@pytest.fixture(scope="module")
def oracle() -> Oracle:
    return Oracle()


class TestBackends:
    """評価エンジン"""

    def test_available(self):
        assert get_available_backends() == ["mpmath", "taylor"]

    def test_unknown_backend(self):
        with pytest.raises(ValueError, match="不明な評価エンジン"):
            create_oracle_backend("glibc")

    @pytest.mark.parametrize("backend_type", ["mpmath", "taylor"])
    def test_interval_contains_value(self, backend_type):
        backend = create_oracle_backend(backend_type)
        for func, expected in ((Func.SIN, math.sin(1.0)), (Func.COS, math.cos(1.0))):
            v = backend.evaluate(func, 1.0, 128)
            assert v.lo <= v.hi
            assert abs(float(v.center) - expected) <= 2 * math.ulp(expected)
            assert v.radius < Fraction(1, 1 << 100)

    def test_backends_agree(self):
        """2つのエンジンで直接丸めの結果が一致"""
        mp_oracle = create_oracle("mpmath")
        taylor_oracle = create_oracle("taylor")
        for bits in _sample(150, 12):
            for func in Func:
                assert mp_oracle.correctly_rounded(
                    func, bits, BINARY32, RoundingMode.RNE
                ) == taylor_oracle.correctly_rounded(func, bits, BINARY32, RoundingMode.RNE)


class TestOracle:
    """Ziv方式の丸め"""

    def test_sin_one(self, oracle):
        assert oracle.correctly_rounded(Func.SIN, ONE, BINARY32, RoundingMode.RNE) == 0x3F576AA4

    def test_matches_math_module(self, oracle):
        """math モジュールの結果をbinary32に丸めたものとほぼ一致"""
        mismatches = 0
        for bits in _sample(300, 13):
            x = bits_to_f32(bits)
            got = oracle.correctly_rounded(Func.SIN, bits, BINARY32, RoundingMode.RNE)
            if got != round_float(math.sin(x), BINARY32, RoundingMode.RNE):
                mismatches += 1
        assert mismatches <= 1

    def test_zero(self, oracle):
        assert oracle.correctly_rounded(Func.COS, 0, BFLOAT16, RoundingMode.RTZ) == 0x3F80
        assert oracle.correctly_rounded(Func.SIN, 0x80000000, BINARY32, RoundingMode.RNE) == (
            0x80000000
        )
        assert oracle.correctly_rounded(Func.TAN, 0, BINARY32, RoundingMode.RNE) == 0

    @pytest.mark.parametrize("bits", [0x7F800000, 0xFF800000, 0x7FC00000])
    def test_specials(self, oracle, bits):
        assert oracle.correctly_rounded(Func.SIN, bits, BINARY32, RoundingMode.RNE) == (
            BINARY32.nan_pattern
        )
        assert math.isnan(oracle.ro34(Func.COS, bits))

    def test_ro34_consistent_with_direct(self, oracle):
        """34ビット値から丸めても直接丸めと一致"""
        for bits in _sample(60, 14):
            for func in Func:
                o = oracle.ro34(func, bits)
                for total in (10, 16, 24, 32):
                    fmt = FpFormat(total)
                    for mode in RoundingMode.user_modes():
                        assert round_from_34(o, fmt, mode) == oracle.correctly_rounded(
                            func, bits, fmt, mode
                        )

    def test_precision_cap(self):
        oracle = Oracle(_UndecidedBackend(), max_bits=256)
        with pytest.raises(OraclePrecisionError):
            oracle.ro34(Func.SIN, ONE)

    def test_low_precision_rejected(self, oracle):
        with pytest.raises(ValueError):
            oracle.hp_eval(Func.SIN, ONE, 64)

    def test_non_finite_rejected(self, oracle):
        with pytest.raises(ValueError):
            oracle.hp_eval(Func.SIN, 0x7F800000)


class TestRoundingInterval:
    """丸め区間"""

    def test_interval_rounds_to_result(self, oracle):
        for bits in _sample(100, 15):
            for func in Func:
                interval = oracle.rounding_interval(func, bits)
                o = oracle.ro34(func, bits)
                assert interval.contains(o)
                assert round_to_odd_34(interval.lo) == o
                assert round_to_odd_34(interval.hi) == o

    def test_open_interval_for_inexact(self, oracle):
        """表現できない結果では両隣の偶数値を含まない"""
        interval = oracle.rounding_interval(Func.SIN, ONE)
        pattern = round_float(oracle.ro34(Func.SIN, ONE), RO34, RoundingMode.RNE)
        assert pattern & 1
        assert interval.lo < interval.hi
        assert round_float(interval.lo, RO34, RoundingMode.ODD) == pattern

    def test_nan_rejected(self, oracle):
        with pytest.raises(ValueError):
            oracle.rounding_interval(Func.SIN, 0x7FC00000)


class TestHpReduce:
    """高精度の縮小"""

    def test_one(self, oracle):
        red = oracle.hp_reduce(1.0)
        assert red.k_mod_512 == 81
        assert abs(float(red.r) - (256 / math.pi - 81)) < 1e-12

    def test_negative(self, oracle):
        red = oracle.hp_reduce(-1.0)
        assert red.k_mod_512 == 512 - 81

    def test_low_precision_rejected(self, oracle):
        with pytest.raises(ValueError):
            oracle.hp_reduce(1.0, 128)


class TestOracleCache:
    """キャッシュファイル"""

    def test_record_size(self):
        assert RECORD_DTYPE.itemsize == 12

    def test_save_load(self, tmp_path):
        path = tmp_path / "sin.cache"
        cache = OracleCache(path)
        cache.put(0x3F800000, 0.8414709866046906)
        cache.put(0x00000001, 2.0**-149)
        cache.save()
        assert path.stat().st_size == 24
        loaded = OracleCache(path)
        assert len(loaded) == 2
        assert 0x3F800000 in loaded
        assert loaded.get(0x3F800000) == 0.8414709866046906
        assert loaded.get(0x12345678) is None

    def test_bad_size(self, tmp_path):
        path = tmp_path / "bad.cache"
        path.write_bytes(b"\x00" * 13)
        with pytest.raises(ValueError):
            OracleCache(path)

    def test_save_without_path(self):
        with pytest.raises(ValueError):
            OracleCache().save()

    def test_put_overrides_and_merges(self, tmp_path):
        """追加した値は整列して保存され、同じパターンは後の値が残る"""
        path = tmp_path / "cos.cache"
        cache = OracleCache(path)
        for bits in (0x40000000, 0x00000010, 0x3F000000):
            cache.put(bits, float(bits))
        cache.save()
        cache = OracleCache(path)
        cache.put(0x00000010, -1.0)
        cache.put(0x00000008, 8.0)
        assert cache.get(0x00000010) == -1.0
        assert len(cache) == 4
        cache.save()
        records = np.fromfile(path, dtype=RECORD_DTYPE)
        assert records["bits"].tolist() == [0x08, 0x10, 0x3F000000, 0x40000000]
        assert records["value"].tolist() == [8.0, -1.0, float(0x3F000000), float(0x40000000)]

    def test_get_many(self):
        cache = OracleCache()
        values = {b: b / 3.0 for b in range(0, 1 << 20, 7)}
        for bits, value in values.items():
            cache.put(bits, value)
        found = cache.get_many(range(0, 1 << 20, 3))
        assert found == {b: v for b, v in values.items() if b % 3 == 0}
        assert cache.get_many([]) == {}
        assert OracleCache().get_many([1, 2]) == {}

    def test_unsorted_file(self, tmp_path):
        """整列していないファイルも読める"""
        path = tmp_path / "tan.cache"
        records = np.array([(5, 0.5), (1, 0.1), (3, 0.3)], dtype=RECORD_DTYPE)
        records.tofile(path)
        cache = OracleCache(path)
        assert [cache.get(b) for b in (1, 3, 5, 2)] == [0.1, 0.3, 0.5, None]
        assert 3 in cache and 4 not in cache
