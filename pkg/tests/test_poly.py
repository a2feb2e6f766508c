"""多項式評価と出力補正のテスト"""

import math

import pytest

from crtrig.models import Func
from crtrig.poly import (
    DOMAIN_REDUCED,
    DOMAIN_SMALL,
    EVAL_ORDER_TAG,
    PolyPair,
    compensate_cos,
    compensate_sin,
    compensate_tan,
    default_func_polys,
    divide,
    eval_cos_poly,
    eval_sin_poly,
    load_func_polys,
    save_func_polys,
    taylor_seed,
)
from crtrig.tables import build_sin_table

HALF_WIDTH = math.pi / 512


class TestPolyPair:
    """係数の組"""

    def test_degrees(self):
        pp = taylor_seed()
        assert (pp.sin_degree, pp.cos_degree) == (7, 6)
        assert len(pp.coeffs) == 8

    def test_with_coeffs(self):
        pp = taylor_seed()
        other = pp.with_coeffs([1.0] * 8)
        assert other.sin_coeffs == (1.0,) * 4
        assert other.cos_coeffs == (1.0,) * 4
        assert other.domain == pp.domain

    def test_invalid(self):
        with pytest.raises(ValueError):
            PolyPair((), (1.0,))
        with pytest.raises(ValueError):
            PolyPair((1.0,), (1.0,), domain="everywhere")

    @pytest.mark.parametrize("degrees", [(6, 6), (7, 5), (-1, 0)])
    def test_seed_degree_parity(self, degrees):
        with pytest.raises(ValueError):
            taylor_seed(*degrees)


class TestEvaluation:
    """x'^2 のHorner法"""

    def test_zero(self):
        pp = taylor_seed()
        assert eval_sin_poly(pp, 0.0) == 0.0
        assert eval_cos_poly(pp, 0.0) == 1.0

    def test_odd_even(self):
        pp = taylor_seed()
        for x in (1e-3, 3e-3, HALF_WIDTH):
            assert eval_sin_poly(pp, -x) == -eval_sin_poly(pp, x)
            assert eval_cos_poly(pp, -x) == eval_cos_poly(pp, x)

    def test_accuracy_on_reduced_domain(self):
        """縮小後の定義域ではテイラー係数で数ulp以内"""
        pp = taylor_seed()
        for i in range(101):
            x = HALF_WIDTH * (i / 50 - 1)
            assert abs(eval_sin_poly(pp, x) - math.sin(x)) <= 4 * math.ulp(HALF_WIDTH)
            assert abs(eval_cos_poly(pp, x) - math.cos(x)) <= 2 * math.ulp(1.0)

    def test_evaluation_order(self):
        """係数を1つずつ足す順序（c1 + x2*(c3 + x2*(...))）"""
        pp = PolyPair((1.0, 2.0, 3.0), (4.0, 5.0))
        x = 0.5
        x2 = x * x
        assert eval_sin_poly(pp, x) == ((3.0 * x2 + 2.0) * x2 + 1.0) * x
        assert eval_cos_poly(pp, x) == 5.0 * x2 + 4.0


class TestCompensation:
    """出力補正"""

    @pytest.fixture(scope="class")
    def table(self):
        return build_sin_table()

    def test_kp_zero(self, table):
        """k' = 0 なら sin はそのまま"""
        assert compensate_sin(0, 0.25, 0.9, table) == 0.25
        assert compensate_cos(0, 0.25, 0.9, table) == 0.9

    def test_quarter_turn(self, table):
        """k' = 128 は π/2 ずらし"""
        assert compensate_sin(128, 0.25, 0.9, table) == 0.9
        assert compensate_cos(128, 0.25, 0.9, table) == -0.25

    def test_sum_formula(self, table):
        pp = taylor_seed()
        xp = 1e-3
        s, c = eval_sin_poly(pp, xp), eval_cos_poly(pp, xp)
        for kp in (1, 77, 200, 300, 511):
            angle = kp * math.pi / 256 + xp
            assert abs(compensate_sin(kp, s, c, table) - math.sin(angle)) < 1e-15
            assert abs(compensate_cos(kp, s, c, table) - math.cos(angle)) < 1e-15

    def test_tan(self, table):
        pp = taylor_seed()
        xp = -2e-3
        s, c = eval_sin_poly(pp, xp), eval_cos_poly(pp, xp)
        assert abs(compensate_tan(40, s, c, table) - math.tan(40 * math.pi / 256 + xp)) < 1e-14

    def test_divide_by_zero(self):
        assert divide(1.0, 0.0) == math.inf
        assert divide(-1.0, 0.0) == -math.inf
        assert divide(1.0, -0.0) == -math.inf


class TestCoefficientFile:
    """係数ファイルの入出力"""

    def test_save_load(self, tmp_path):
        polys = default_func_polys(Func.COS)
        path = tmp_path / "poly_cos.txt"
        save_func_polys(polys, path, table_checksum="abc")
        loaded = load_func_polys(path)
        assert loaded.reduced == polys.reduced
        assert loaded.small == polys.small
        assert loaded.header["table_checksum"] == "abc"
        assert loaded.header["order"] == EVAL_ORDER_TAG
        assert loaded.get(DOMAIN_SMALL).domain == DOMAIN_SMALL
        assert loaded.get(DOMAIN_REDUCED).func is Func.COS

    def test_idempotent(self, tmp_path):
        """同じ内容なら同じバイト列"""
        polys = default_func_polys(Func.SIN)
        a, b = tmp_path / "a.txt", tmp_path / "b.txt"
        save_func_polys(polys, a, generator_version="1")
        save_func_polys(polys, b, generator_version="1")
        assert a.read_bytes() == b.read_bytes()

    def test_order_mismatch(self, tmp_path):
        path = tmp_path / "poly_sin.txt"
        save_func_polys(default_func_polys(Func.SIN), path)
        path.write_text(path.read_text().replace(EVAL_ORDER_TAG, "estrin-v1"))
        with pytest.raises(ValueError, match="評価順序"):
            load_func_polys(path)

    def test_degree_mismatch(self, tmp_path):
        path = tmp_path / "poly_sin.txt"
        save_func_polys(default_func_polys(Func.SIN), path)
        path.write_text(path.read_text().replace("degrees 7 6", "degrees 9 6", 1))
        with pytest.raises(ValueError, match="次数"):
            load_func_polys(path)
