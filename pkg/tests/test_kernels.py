"""sin/cos/tan カーネルのテスト"""

import math
import random

import pytest
from mpmath import mp

from crtrig import kernels
from crtrig.fpcore import bits_to_f32, f32_to_bits, round_float, round_from_34, round_to_odd_34
from crtrig.kernels import TrigKernel
from crtrig.models import BFLOAT16, BINARY32, RO34, FpFormat, Func, ReductionStrategy, RoundingMode
from crtrig.oracle import Oracle
from crtrig.pipeline.scope import near_table_multiples
from crtrig.poly import DOMAIN_REDUCED, taylor_seed

SIGN = 0x80000000

# テイラー初期値のままでは誤って丸まっていた入力
HARD_SIN_INPUT = 0x65898498


def _sample(n: int, seed: int, min_exp: int = 1, max_exp: int = 254) -> list[int]:
    rng = random.Random(seed)
    return [
        rng.getrandbits(1) << 31 | rng.randint(min_exp, max_exp) << 23 | rng.getrandbits(23)
        for _ in range(n)
    ]


@pytest.fixture(scope="module")
def kernel() -> TrigKernel:
    return TrigKernel()


@pytest.fixture(scope="module")
def oracle() -> Oracle:
    return Oracle()


class TestKnownValues:
    """既知の結果"""

    def test_sin_one(self):
        assert kernels.sin(0x3F800000) == 0x3F576AA4

    def test_cos_zero_bfloat16_rtz(self, kernel):
        assert kernel.eval(Func.COS, 0, BFLOAT16, RoundingMode.RTZ) == 0x3F80

    def test_public_functions(self, kernel):
        for bits in (0x3F800000, 0x40490FDB, 0x4B000001):
            assert kernels.sin(bits) == kernel.eval(Func.SIN, bits)
            assert kernels.cos(bits) == kernel.eval(Func.COS, bits)
            assert kernels.tan(bits) == kernel.eval(Func.TAN, bits)


class TestSpecialInputs:
    """NaN・無限大・符号付きゼロ"""

    @pytest.mark.parametrize("bits", [0x7F800000, 0xFF800000, 0x7FC00000, 0xFFC00001])
    def test_nan_result(self, kernel, bits):
        for func in Func:
            assert math.isnan(kernel.eval34(func, bits))
            assert kernel.eval(func, bits) == BINARY32.nan_pattern
            assert kernel.eval(func, bits, BFLOAT16) == BFLOAT16.nan_pattern

    def test_signed_zero(self, kernel):
        assert kernel.eval(Func.SIN, 0) == 0
        assert kernel.eval(Func.SIN, SIGN) == SIGN
        assert kernel.eval(Func.TAN, SIGN) == SIGN
        assert kernel.eval(Func.COS, 0) == 0x3F800000
        assert kernel.eval(Func.COS, SIGN) == 0x3F800000


class TestTinyInputs:
    """|x| が十分小さい入力"""

    def test_sin_below_x(self, kernel):
        """sin(2^-20) は x の1つ下の奇数値"""
        x = 2.0**-20
        bits = f32_to_bits(x)
        o = kernel.eval34(Func.SIN, bits)
        assert o == x - x * 2.0**-26
        assert round_float(o, RO34, RoundingMode.RNE) & 1
        assert kernel.eval(Func.SIN, bits) == bits
        assert kernel.eval(Func.SIN, bits, mode=RoundingMode.RTZ) == bits - 1

    def test_tan_above_x(self, kernel):
        x = 2.0**-20
        bits = f32_to_bits(x)
        assert kernel.eval34(Func.TAN, bits) == x + x * 2.0**-25
        assert kernel.eval(Func.TAN, bits, mode=RoundingMode.RTP) == bits + 1

    def test_cos_below_one(self, kernel):
        bits = f32_to_bits(2.0**-20)
        assert kernel.eval34(Func.COS, bits) == 1.0 - 2.0**-26
        assert kernel.eval(Func.COS, bits) == 0x3F800000
        assert kernel.eval(Func.COS, bits, mode=RoundingMode.RTZ) == 0x3F7FFFFF

    def test_subnormal_input(self, kernel, oracle):
        for bits in (0x00000001, 0x007FFFFF, 0x80000003):
            for func in Func:
                for mode in RoundingMode.user_modes():
                    assert kernel.eval(func, bits, mode=mode) == oracle.correctly_rounded(
                        func, bits, BINARY32, mode
                    )


class TestParity:
    """sin・tan は奇関数、cos は偶関数"""

    def test_parity(self, kernel):
        for bits in _sample(300, 21, max_exp=254):
            pos = bits & ~SIGN
            neg = pos | SIGN
            assert kernel.eval34(Func.SIN, neg) == -kernel.eval34(Func.SIN, pos)
            assert kernel.eval34(Func.TAN, neg) == -kernel.eval34(Func.TAN, pos)
            assert kernel.eval34(Func.COS, neg) == kernel.eval34(Func.COS, pos)


class TestStrategies:
    """縮小戦略による違い"""

    def test_strategies_agree(self, kernel):
        """どの戦略でも34ビットの結果は同じ"""
        for bits in _sample(200, 22, min_exp=120):
            for func in Func:
                results = {kernel.eval34(func, bits, s) for s in ReductionStrategy}
                assert len(results) == 1, (func, hex(bits))

    def test_kernel_strategy(self):
        kernel = TrigKernel(strategy="int")
        assert kernel.strategy is ReductionStrategy.INT
        assert kernel.reducer().strategy is ReductionStrategy.INT


class TestAgainstOracle:
    """参照値との一致"""

    def test_binary32_rne(self, kernel, oracle):
        for bits in _sample(300, 23):
            for func in Func:
                assert kernel.eval(func, bits) == oracle.correctly_rounded(
                    func, bits, BINARY32, RoundingMode.RNE
                ), (func, hex(bits))

    def test_ro34_matches(self, kernel, oracle):
        for bits in _sample(200, 24, min_exp=100):
            for func in Func:
                assert kernel.eval34(func, bits) == oracle.ro34(func, bits), (func, hex(bits))

    def test_near_table_multiples(self, kernel, oracle):
        """π/512 の整数倍に近い入力でも全戦略が参照値と一致"""
        inputs = list(near_table_multiples()) + [HARD_SIN_INPUT, HARD_SIN_INPUT | SIGN]
        for bits in inputs:
            for func in Func:
                expected = oracle.ro34(func, bits)
                for strategy in ReductionStrategy:
                    got = kernel.eval34(func, bits, strategy)
                    assert got == expected, (func, strategy, hex(bits))

    @pytest.mark.slow
    def test_all_formats_and_modes(self, kernel, oracle):
        """34ビット値から全フォーマット・全モードへ正しく丸まる"""
        for bits in _sample(40, 25):
            for func in Func:
                o = oracle.ro34(func, bits)
                assert kernel.eval34(func, bits) == o
                for total in range(10, 33):
                    fmt = FpFormat(total)
                    for mode in RoundingMode.user_modes():
                        assert round_from_34(o, fmt, mode) == oracle.correctly_rounded(
                            func, bits, fmt, mode
                        )


class TestWithPoly:
    """多項式の差し替え"""

    def test_replaces_only_target(self, kernel):
        pp = taylor_seed(5, 4, Func.SIN, DOMAIN_REDUCED)
        swapped = kernel.with_poly(pp)
        assert swapped.artifacts.polys[Func.SIN].reduced == pp
        assert swapped.artifacts.polys[Func.SIN].small == kernel.artifacts.polys[Func.SIN].small
        assert swapped.artifacts.polys[Func.COS] is kernel.artifacts.polys[Func.COS]
        assert kernel.artifacts.polys[Func.SIN].reduced != pp

    def test_bad_poly_changes_results(self, kernel):
        pp = taylor_seed(1, 0, Func.COS, DOMAIN_REDUCED)
        swapped = kernel.with_poly(pp)
        bits = f32_to_bits(bits_to_f32(0x3F800000) + 0.003)
        assert swapped.eval34(Func.COS, bits) != kernel.eval34(Func.COS, bits)


class TestGuard:
    """テイラー初期値の係数に対する誤差幅の検査"""

    def test_default_polys_are_guarded(self, kernel):
        for func in Func:
            assert not kernel.artifacts.polys[func].certified
            assert kernel.guarded(func)

    def test_guard_override(self):
        assert not TrigKernel(guard=False).guarded(Func.SIN)
        assert TrigKernel(guard=True).guarded(Func.TAN)

    def test_with_poly_is_unguarded(self, kernel):
        swapped = kernel.with_poly(taylor_seed(func=Func.COS))
        assert not swapped.guarded(Func.COS)

    def test_hard_input(self, kernel, oracle):
        for func in Func:
            expected = oracle.ro34(func, HARD_SIN_INPUT)
            for strategy in ReductionStrategy:
                assert kernel.eval34(func, HARD_SIN_INPUT, strategy) == expected, (func, strategy)

    def test_error_bound_holds(self, kernel):
        """approx の誤差の上限は真値との差を覆う"""
        funcs = {Func.SIN: mp.sin, Func.COS: mp.cos, Func.TAN: mp.tan}
        with mp.workprec(300):
            for bits in _sample(150, 26, min_exp=115):
                x = bits_to_f32(bits)
                for func, mp_func in funcs.items():
                    exact = mp_func(mp.mpf(x))
                    for strategy in ReductionStrategy:
                        y, err = kernel.approx(func, x, strategy)
                        if math.isfinite(err):
                            assert abs(mp.mpf(y) - exact) <= err, (func, strategy, hex(bits))

    def test_unguarded_matches_guarded_when_decided(self, kernel):
        raw = TrigKernel(kernel.artifacts, guard=False)
        for bits in _sample(200, 27, min_exp=110):
            for func in Func:
                x = bits_to_f32(bits)
                if abs(x) < 2.0**-13:
                    continue
                y, err = kernel.approx(func, x)
                lo = round_to_odd_34(y - err)
                if lo == round_to_odd_34(y + err) and math.isfinite(lo):
                    assert raw.eval34(func, bits) == kernel.eval34(func, bits)
