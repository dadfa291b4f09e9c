#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
希尔伯特空间代数测试脚本

该脚本用于测试截断空间代数，包括：
1. 布局与子系统序号
2. 算符构造、嵌入与对易关系
3. 位移算符与相干态
4. 态与密度矩阵的构造和验证
"""

import sys
import math
import logging
import unittest
from pathlib import Path

import numpy as np

# 添加项目根目录到系统路径
sys.path.append(str(Path(__file__).parent.parent))

from src.core.hilbert import (HilbertLayout, QOperator, annihilation, basis_vector, coherent_state, commutator,
                              creation, density_matrix, displacement, embed, identity, ket_to_dm, number,
                              product_state, qutrit_operator, rotated_qubit_state, state_vector,
                              subsystem_populations, vacuum)
from src.utils.errors import HilbertDimensionError, ParameterError

# 配置日志
logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(name)s - %(levelname)s - %(message)s')
logger = logging.getLogger(__name__)


class TestHilbert(unittest.TestCase):
    """希尔伯特空间代数测试类"""

    @classmethod
    def setUpClass(cls):
        """测试前的准备工作"""
        cls.layout = HilbertLayout(2, 4, 3)

    def test_layout_dimensions(self):
        """测试布局维数与子系统序号"""
        logger.info("测试布局维数与子系统序号")

        layout = self.layout
        self.assertEqual(layout.subsystem_dims, (3, 3, 3, 5, 5))
        self.assertEqual(layout.total_dim, 27 * 25)
        self.assertEqual(layout.qutrit_index(0), 0)
        self.assertEqual(layout.cavity_index(1), 3)
        self.assertEqual(layout.cavity_index(2), 4)
        self.assertEqual(layout.with_cutoff(6).cavity_dim, 7)

        with self.assertRaises(HilbertDimensionError):
            layout.cavity_index(0)
        with self.assertRaises(HilbertDimensionError):
            layout.qutrit_index(3)
        with self.assertRaises(HilbertDimensionError):
            HilbertLayout(0, 4)
        with self.assertRaises(HilbertDimensionError):
            HilbertLayout(1, 4, 4)

    def test_ladder_operators(self):
        """测试湮灭、产生与粒子数算符"""
        logger.info("测试湮灭、产生与粒子数算符")

        a = annihilation(5)
        self.assertAlmostEqual(a.matrix[0, 1], 1.0)
        self.assertAlmostEqual(a.matrix[3, 4], 2.0)
        np.testing.assert_allclose((creation(5) @ a).matrix, number(5).matrix, atol=1e-14)

        # 截断空间中 [a, a†] 仅在最高能级偏离单位算符
        comm = commutator(a, creation(5)).to_dense()
        np.testing.assert_allclose(np.diag(comm)[:-1], np.ones(4), atol=1e-14)
        self.assertAlmostEqual(comm[4, 4].real, -4.0)

        with self.assertRaises(HilbertDimensionError):
            annihilation(1)

    def test_qutrit_operators(self):
        """测试单比特算符"""
        logger.info("测试单比特算符")

        plus = rotated_qubit_state('+')
        minus = rotated_qubit_state('-')
        sz = qutrit_operator('sigma_z_rot').to_dense()
        self.assertAlmostEqual(np.vdot(plus, sz @ plus).real, 1.0)
        self.assertAlmostEqual(np.vdot(minus, sz @ minus).real, -1.0)

        sp_rot = qutrit_operator('sigma_plus_rot').to_dense()
        np.testing.assert_allclose(sp_rot @ minus, plus, atol=1e-14)
        np.testing.assert_allclose(sp_rot @ plus, np.zeros(3), atol=1e-14)

        fe = qutrit_operator('sigma_fe_plus').to_dense()
        self.assertAlmostEqual(fe[2, 1], 1.0)

        with self.assertRaises(ParameterError):
            qutrit_operator('sigma_ff', levels=2)
        with self.assertRaises(ParameterError):
            qutrit_operator('sigma_y')

    def test_embed(self):
        """测试嵌入算符的对易关系"""
        logger.info("测试嵌入算符的对易关系")

        layout = HilbertLayout(1, 3, 2)
        a = embed(annihilation(layout.cavity_dim), layout.cavity_index(1), layout)
        sz = embed(qutrit_operator('sigma_z_rot', 2), layout.qutrit_index(0), layout)
        self.assertTrue(a.is_sparse)
        self.assertEqual(a.dim, layout.total_dim)

        # 不同子系统上的算符对易
        comm = commutator(a, sz)
        self.assertEqual(np.max(np.abs(comm.to_dense())), 0.0)

        with self.assertRaises(HilbertDimensionError):
            embed(annihilation(5), layout.cavity_index(1), layout)

    def test_hermitian_hint(self):
        """测试厄米声明检查"""
        logger.info("测试厄米声明检查")

        self.assertTrue(identity(3).is_hermitian())
        with self.assertRaises(ParameterError):
            QOperator(np.array([[0.0, 1.0], [0.0, 0.0]]), hermitian_hint=True)
        with self.assertRaises(HilbertDimensionError):
            QOperator(np.zeros((2, 3)))

    def test_displacement(self):
        """测试位移算符与相干态"""
        logger.info("测试位移算符与相干态")

        alpha = 0.6 - 0.3j
        dim = 25
        vac = basis_vector(dim, 0)
        displaced = displacement(alpha, dim) @ vac
        np.testing.assert_allclose(displaced, coherent_state(alpha, dim), atol=1e-8)

        # D(α)D(β) = exp[i Im(α β*)] D(α+β)
        beta = -0.2 + 0.5j
        left = (displacement(alpha, dim) @ displacement(beta, dim)) @ vac
        right = np.exp(1j * np.imag(alpha * np.conj(beta))) * (displacement(alpha + beta, dim) @ vac)
        np.testing.assert_allclose(left, right, atol=1e-8)

    def test_displacement_composition(self):
        """测试位移算符的合成律（低能级块）"""
        logger.info("测试位移算符的合成律（低能级块）")

        dim, block = 30, 15
        rng = np.random.default_rng(2024)
        radii = 0.5 * np.sqrt(rng.random((100, 2)))
        angles = 2.0 * math.pi * rng.random((100, 2))
        for a1, a2 in radii * np.exp(1j * angles):
            left = displacement(a1, dim).to_dense() @ displacement(a2, dim).to_dense()
            right = np.exp(1j * np.imag(a1 * np.conj(a2))) * displacement(a1 + a2, dim).to_dense()
            np.testing.assert_allclose(left[:block, :block], right[:block, :block], atol=1e-8,
                                       err_msg=f"α₁ = {a1}, α₂ = {a2}")

    def test_displacement_inverse(self):
        """测试 D(α)D(-α) 在低能级块上为单位阵"""
        logger.info("测试 D(α)D(-α) 在低能级块上为单位阵")

        dim, block = 30, 15
        for alpha in (0.5, -0.5j, 0.3 + 0.4j, 1.0 - 0.7j):
            product = displacement(alpha, dim).to_dense() @ displacement(-alpha, dim).to_dense()
            np.testing.assert_allclose(product[:block, :block], np.eye(block), atol=1e-8)

    def test_states(self):
        """测试态与密度矩阵的构造"""
        logger.info("测试态与密度矩阵的构造")

        layout = HilbertLayout(1, 2, 3)
        psi = product_state([rotated_qubit_state('+'), rotated_qubit_state('-'), vacuum(layout)])
        psi = state_vector(psi, layout)
        self.assertAlmostEqual(np.linalg.norm(psi), 1.0)

        rho = density_matrix(ket_to_dm(psi), layout)
        self.assertAlmostEqual(np.trace(rho).real, 1.0)

        with self.assertRaises(ParameterError):
            state_vector(2.0 * psi, layout)
        with self.assertRaises(HilbertDimensionError):
            state_vector(psi[:-1], layout)

        cavity = subsystem_populations(psi, layout, layout.cavity_index(1))
        np.testing.assert_allclose(cavity, [1.0, 0.0, 0.0], atol=1e-14)
        qubit = subsystem_populations(rho, layout, layout.qutrit_index(0))
        np.testing.assert_allclose(qubit, [0.5, 0.5, 0.0], atol=1e-14)

    def test_rotated_state_sign(self):
        """测试旋转基态的符号约定"""
        logger.info("测试旋转基态的符号约定")

        minus = rotated_qubit_state('-', 2)
        self.assertAlmostEqual(minus[0], -1.0 / math.sqrt(2.0))
        self.assertAlmostEqual(minus[1], 1.0 / math.sqrt(2.0))
        with self.assertRaises(ParameterError):
            rotated_qubit_state('0')


if __name__ == '__main__':
    unittest.main()
