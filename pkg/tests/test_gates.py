#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
相位门测试脚本

该脚本用于测试理想门与门比较工具，包括：
1. 理想门的对角元
2. 转换操作与受控相位链的等价性
3. 寄存器态放入模拟空间
4. 传播子比较的相位对齐
"""

import sys
import math
import logging
import unittest
from pathlib import Path

import numpy as np

# 添加项目根目录到系统路径
sys.path.append(str(Path(__file__).parent.parent))

from src.core.gates import (GateSpec, controlled_phase_chain, conversion_operation, ideal_gate_unitary,
                            ideal_output_state, excited_initial_state, phase_fix_index, propagator_distance,
                            register_bits, register_state_in_layout, two_qubit_gate)
from src.core.hilbert import HilbertLayout, subsystem_populations
from src.utils.errors import HilbertDimensionError, ParameterError

# 配置日志
logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(name)s - %(levelname)s - %(message)s')
logger = logging.getLogger(__name__)


class TestGates(unittest.TestCase):
    """相位门测试类"""

    @classmethod
    def setUpClass(cls):
        """测试前的准备工作"""
        cls.theta = (math.pi / 2, math.pi / 4)
        cls.spec = GateSpec(2, cls.theta)

    def test_register_bits(self):
        """测试寄存器比特表"""
        logger.info("测试寄存器比特表")

        bits = register_bits(2)
        self.assertEqual(bits.shape, (8, 3))
        self.assertEqual(list(bits[5]), [1, 0, 1])
        self.assertEqual(phase_fix_index(2), 3)
        self.assertEqual(list(bits[phase_fix_index(2)]), [0, 1, 1])

    def test_generic_gate(self):
        """测试控制比特与目标同号时加相位"""
        logger.info("测试控制比特与目标同号时加相位")

        diagonal = np.diagonal(ideal_gate_unitary(self.spec).matrix)
        theta1, theta2 = self.theta
        # |+++⟩、|+−−⟩、|−++⟩、|−−−⟩
        self.assertAlmostEqual(diagonal[0], np.exp(1j * (theta1 + theta2)))
        self.assertAlmostEqual(diagonal[3], 1.0)
        self.assertAlmostEqual(diagonal[4], 1.0)
        self.assertAlmostEqual(diagonal[7], np.exp(1j * (theta1 + theta2)))
        # |+−+⟩ 只有目标 2 与 A 同号
        self.assertAlmostEqual(diagonal[2], np.exp(1j * theta2))

        # 各两比特门之积
        product = two_qubit_gate(2, 1, theta1).matrix @ two_qubit_gate(2, 2, theta2).matrix
        np.testing.assert_allclose(product, ideal_gate_unitary(self.spec).matrix, atol=1e-14)

    def test_converted_gate(self):
        """测试转换操作把 generic 门变为 converted 门"""
        logger.info("测试转换操作把 generic 门变为 converted 门")

        generic = ideal_gate_unitary(self.spec).matrix
        converted = ideal_gate_unitary(GateSpec(2, self.theta, 'converted')).matrix
        np.testing.assert_allclose(conversion_operation(2, self.theta).matrix @ generic, converted, atol=1e-14)

        # 受控相位链 φ_j = 2θ_j，两种控制角色给出同一矩阵
        phases = [2.0 * t for t in self.theta]
        chain_a = controlled_phase_chain(phases, 'A').matrix
        chain_targets = controlled_phase_chain(phases, 'targets').matrix
        np.testing.assert_allclose(chain_a, converted, atol=1e-14)
        np.testing.assert_allclose(chain_targets, converted, atol=1e-14)

        with self.assertRaises(ParameterError):
            controlled_phase_chain(phases, 'B')

    def test_gate_spec(self):
        """测试门描述的校验"""
        logger.info("测试门描述的校验")

        self.assertEqual(GateSpec(1, (1.0,), 'two_qubit').register_dim, 4)
        self.assertEqual(GateSpec(2, (1.0, 1.0), 'three_qubit').register_dim, 8)
        with self.assertRaises(ParameterError):
            GateSpec(2, (1.0, 1.0), 'two_qubit')
        with self.assertRaises(ParameterError):
            GateSpec(2, (1.0,))
        with self.assertRaises(ParameterError):
            GateSpec(1, (1.0,), 'toffoli')

    def test_initial_state(self):
        """测试默认初态即所有比特处于 |e⟩"""
        logger.info("测试默认初态即所有比特处于 |e⟩")

        layout = HilbertLayout(2, 2, 3)
        psi = register_state_in_layout(excited_initial_state(2), layout)
        self.assertAlmostEqual(np.linalg.norm(psi), 1.0)
        for l in range(layout.n_qutrits):
            populations = subsystem_populations(psi, layout, layout.qutrit_index(l))
            np.testing.assert_allclose(populations, [0.0, 1.0, 0.0], atol=1e-14)
        for j in (1, 2):
            populations = subsystem_populations(psi, layout, layout.cavity_index(j))
            self.assertAlmostEqual(populations[0], 1.0)

        # 多列同时放入
        columns = register_state_in_layout(np.eye(8), layout)
        self.assertEqual(columns.shape, (layout.total_dim, 8))
        np.testing.assert_allclose(columns.conj().T @ columns, np.eye(8), atol=1e-14)

        with self.assertRaises(HilbertDimensionError):
            register_state_in_layout(np.ones(4) / 2.0, layout)

    def test_ideal_output_state(self):
        """测试理想输出态"""
        logger.info("测试理想输出态")

        output = ideal_output_state(excited_initial_state(2), self.spec)
        self.assertAlmostEqual(np.linalg.norm(output), 1.0)
        self.assertAlmostEqual(output[3], 1.0 / math.sqrt(8.0))
        with self.assertRaises(HilbertDimensionError):
            ideal_output_state(excited_initial_state(1), self.spec)

    def test_propagator_distance(self):
        """测试传播子比较消除全局相位"""
        logger.info("测试传播子比较消除全局相位")

        ideal = ideal_gate_unitary(self.spec).matrix
        distance, fidelity = propagator_distance(np.exp(0.7j) * ideal, ideal)
        self.assertLess(distance, 1e-14)
        self.assertAlmostEqual(fidelity, 1.0)

        perturbed = ideal.copy()
        perturbed[0, 0] *= np.exp(0.01j)
        distance, fidelity = propagator_distance(perturbed, ideal)
        self.assertAlmostEqual(distance, abs(np.exp(0.01j) - 1.0), places=12)
        self.assertLess(fidelity, 1.0)

        # 对齐基矢上的元素为零时改用模值最大的对角元
        degenerate = ideal.copy()
        degenerate[3, 3] = 0.0
        distance, _ = propagator_distance(degenerate, ideal)
        self.assertAlmostEqual(distance, 1.0)

        with self.assertRaises(HilbertDimensionError):
            propagator_distance(np.eye(4), ideal)


if __name__ == '__main__':
    unittest.main()
