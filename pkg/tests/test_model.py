#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
物理模型测试脚本

该脚本用于测试器件参数、哈密顿量与耗散部分，包括：
1. 失谐换算与工作条件检查
2. 哈密顿量的厄米性与表象一致性
3. 主方程右端项的迹与各耗散通道的解析衰减
"""

import sys
import math
import logging
import unittest
from dataclasses import replace
from pathlib import Path

import numpy as np

# 添加项目根目录到系统路径
sys.path.append(str(Path(__file__).parent.parent))

from src.core.dynamics import TimeGrid, frame_transform, propagate_lindblad, propagate_unitary
from src.core.gates import excited_initial_state, register_state_in_layout
from src.core.hilbert import HilbertLayout, basis_vector, ket_to_dm, product_state
from src.core.model import (DeviceParams, NoiseParams, build_H_eff, build_H_ideal, build_Theta, build_h_full,
                            device_from_detunings, drive_leakage_frequency, hamiltonian, lindblad_rhs,
                            quality_factor, validate_conditions)
from src.utils.errors import ParameterError

# 配置日志
logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(name)s - %(levelname)s - %(message)s')
logger = logging.getLogger(__name__)


def natural_device(k: int = 12, g12_ratio: float = 0.0) -> DeviceParams:
    """自然单位下的单目标器件：δ = -1，g = 0.5，T = 2π，Ω = k/2"""
    return device_from_detunings(delta=(-1.0,), g=(0.5,), Omega=k / 2.0, m=(1,), k=k,
                                 omega_eg=50.0, g12_ratio=g12_ratio)


class TestModel(unittest.TestCase):
    """物理模型测试类"""

    @classmethod
    def setUpClass(cls):
        """测试前的准备工作"""
        cls.p = natural_device()
        cls.layout2 = HilbertLayout(1, 6, 2)
        cls.layout3 = HilbertLayout(1, 3, 3)

    def test_detunings(self):
        """测试由频率导出的失谐"""
        logger.info("测试由频率导出的失谐")

        p = device_from_detunings(delta=(-1.0, -2.0), g=(0.5, 0.5), Omega=6.0, m=(1, 2), k=12,
                                  omega_eg=100.0, anharmonicity=0.05)
        self.assertEqual(p.delta, (-1.0, -2.0))
        self.assertEqual(p.delta_A, (-1.0, -2.0))
        self.assertAlmostEqual(p.deltat[0], 95.0 - 101.0)
        self.assertAlmostEqual(p.Delta, 1.0)
        self.assertAlmostEqual(p.anharmonicity[0], 5.0)
        self.assertAlmostEqual(p.cycle_time(), 2.0 * math.pi)

        with self.assertRaises(ParameterError):
            device_from_detunings(delta=(-1.0,), g=(0.5, 0.5), Omega=6.0)

    def test_conditions(self):
        """测试工作条件检查"""
        logger.info("测试工作条件检查")

        report = validate_conditions(self.p)
        self.assertTrue(report.all_passed, report.as_lines())
        self.assertAlmostEqual(report.drive_margin, 12.0)

        weak = natural_device(k=2)
        report = validate_conditions(weak)
        self.assertFalse(report.get('strong_driving').passed)

        mismatched = device_from_detunings(delta=(-1.0,), g=(0.5,), Omega=6.0, m=(1,), k=12,
                                           omega_eg=50.0, g_A=(0.6,))
        names = [check.name for check in validate_conditions(mismatched).failures()]
        self.assertEqual(names, ['coupling_match'])

        positive = device_from_detunings(delta=(1.0,), g=(0.5,), Omega=6.0, m=(1,), k=12, omega_eg=50.0)
        self.assertFalse(validate_conditions(positive).get('negative_detuning').passed)

    def test_hermiticity(self):
        """测试各哈密顿量的厄米性"""
        logger.info("测试各哈密顿量的厄米性")

        p = natural_device(g12_ratio=0.2)
        layout = HilbertLayout(1, 3, 3)
        for t in (0.0, 0.37, 2.9):
            self.assertTrue(build_H_ideal(t, p, layout).is_hermitian())
            self.assertTrue(build_Theta(t, p, layout).is_hermitian())
            self.assertTrue(build_h_full(t, p, layout).is_hermitian())
            self.assertTrue(build_H_eff(t, p, layout).is_hermitian())
            self.assertTrue(build_H_eff(t, p, layout, j=1).is_hermitian())

        with self.assertRaises(ParameterError):
            hamiltonian('full', p, self.layout2)
        with self.assertRaises(ParameterError):
            hamiltonian('unknown', p, layout)
        with self.assertRaises(ParameterError):
            hamiltonian('ideal', p, HilbertLayout(2, 3, 3))

    def test_drive_leakage(self):
        """测试驱动泄漏项的相位约定"""
        logger.info("测试驱动泄漏项的相位约定")

        detuning = self.p.omega_fe[0] - self.p.omega_drive
        self.assertEqual(self.p.drive_leakage, 'detuned')
        self.assertAlmostEqual(drive_leakage_frequency(self.p, 0), -detuning)

        literal = replace(self.p, drive_leakage='literal')
        self.assertAlmostEqual(drive_leakage_frequency(literal, 0), detuning)

        for mode, expected in (('detuned', -detuning), ('literal', detuning)):
            h = hamiltonian('full', replace(self.p, drive_leakage=mode), self.layout3)
            frequencies = [t.frequency for t in h.terms if t.label.startswith('drive_fe')]
            self.assertEqual(len(frequencies), 2)
            for frequency in frequencies:
                self.assertAlmostEqual(frequency, expected)

        h = hamiltonian('full', replace(self.p, drive_leakage='off'), self.layout3)
        self.assertFalse(any(t.label.startswith('drive_fe') for t in h.terms))
        self.assertTrue(any(t.label.startswith('gt') for t in h.terms))

        with self.assertRaises(ParameterError):
            replace(self.p, drive_leakage='rotating')

    def test_apply_matches_matrix(self):
        """测试逐项作用与矩阵乘法一致"""
        logger.info("测试逐项作用与矩阵乘法一致")

        p = device_from_detunings(delta=(-1.0, -2.0), g=(0.5, 0.5), Omega=6.0, m=(1, 2), k=12,
                                  omega_eg=20.0, g12_ratio=0.3)
        layout = HilbertLayout(2, 2, 3)
        h = hamiltonian('full', p, layout)
        rng = np.random.default_rng(7)
        psi = rng.normal(size=layout.total_dim) + 1j * rng.normal(size=layout.total_dim)
        np.testing.assert_allclose(h.apply(0.8, psi), h.matrix(0.8) @ psi, atol=1e-10)

    def test_rotated_frame(self):
        """测试旋转表象哈密顿量与原表象演化的一致性"""
        logger.info("测试旋转表象哈密顿量与原表象演化的一致性")

        p, layout = self.p, self.layout2
        T = p.cycle_time()
        grid = TimeGrid(0.0, T, T / 4000)
        psi0 = register_state_in_layout(excited_initial_state(1), layout)

        psi_ideal = propagate_unitary(hamiltonian('ideal', p, layout), psi0, grid)
        psi_rot = propagate_unitary(hamiltonian('rotated', p, layout), psi0, grid)
        np.testing.assert_allclose(frame_transform(psi_rot, p.Omega, T, layout), psi_ideal, atol=1e-6)

    def test_lindblad_trace(self):
        """测试主方程右端项的迹为零且保持厄米"""
        logger.info("测试主方程右端项的迹为零且保持厄米")

        noise = NoiseParams.from_lifetimes_us(1, cavity=15.0, relax_e=30.0, relax_fe=11.5,
                                              relax_fg=45.0, dephase_e=10.0, dephase_f=10.0)
        layout = self.layout3
        psi = register_state_in_layout(excited_initial_state(1), layout)
        rho = ket_to_dm(psi)
        drho = lindblad_rhs(rho, 0.3, self.p, noise, layout)
        self.assertLess(abs(np.trace(drho)), 1e-9)
        self.assertLess(np.max(np.abs(drho - drho.conj().T)), 1e-9)

    def test_cavity_decay(self):
        """测试单光子腔衰减 ⟨n⟩ = e^{-κt}"""
        logger.info("测试单光子腔衰减")

        p = device_from_detunings(delta=(-1.0,), g=(0.0,), Omega=0.0, omega_eg=50.0)
        noise = NoiseParams.from_rates(1, 0.1, 0.0, 0.0, 0.0, 0.0, 0.0)
        layout = HilbertLayout(1, 2, 2)
        psi0 = product_state([basis_vector(2, 0), basis_vector(2, 0), basis_vector(3, 1)])

        result = propagate_lindblad(ket_to_dm(psi0), p, noise, TimeGrid(0.0, 5.0, 0.01), 'ideal', layout)
        self.assertAlmostEqual(result.final_state[1, 1].real, math.exp(-0.5), places=8)
        self.assertAlmostEqual(result.final_state[0, 0].real, 1.0 - math.exp(-0.5), places=8)
        self.assertLess(result.trace_drift, 1e-10)
        self.assertTrue(result.positivity_ok)

    def test_qubit_relaxation_and_dephasing(self):
        """测试比特弛豫与退相位"""
        logger.info("测试比特弛豫与退相位")

        p = device_from_detunings(delta=(-1.0,), g=(0.0,), Omega=0.0, omega_eg=50.0)
        layout = HilbertLayout(1, 1, 3)
        cavity = basis_vector(2, 0)

        # |e⟩ 弛豫：P_e = e^{-Γt}
        relax = NoiseParams.from_rates(1, 0.0, 0.2, 0.0, 0.0, 0.0, 0.0)
        psi0 = product_state([basis_vector(3, 1), basis_vector(3, 0), cavity])
        result = propagate_lindblad(ket_to_dm(psi0), p, relax, TimeGrid(0.0, 3.0, 0.01), 'ideal', layout)
        index_e = int(np.argmax(np.abs(psi0)))
        self.assertAlmostEqual(result.final_state[index_e, index_e].real, math.exp(-0.6), places=8)

        # |e⟩ 退相位：|ρ_ge| = e^{-Γφt/2}/2
        dephase = NoiseParams.from_rates(1, 0.0, 0.0, 0.0, 0.0, 0.4, 0.0)
        plus = (basis_vector(3, 0) + basis_vector(3, 1)) / math.sqrt(2.0)
        psi0 = product_state([plus, basis_vector(3, 0), cavity])
        result = propagate_lindblad(ket_to_dm(psi0), p, dephase, TimeGrid(0.0, 3.0, 0.01), 'ideal', layout)
        rows = np.nonzero(np.abs(psi0) > 0)[0]
        coherence = abs(result.final_state[rows[0], rows[1]])
        self.assertAlmostEqual(coherence, 0.5 * math.exp(-0.6), places=8)

    def test_noise_params(self):
        """测试耗散参数构造与品质因子"""
        logger.info("测试耗散参数构造与品质因子")

        noise = NoiseParams.from_lifetimes_us(2, cavity=15.0)
        self.assertAlmostEqual(noise.kappa[0], 1.0 / 15e-6)
        self.assertEqual(noise.Gamma, (0.0, 0.0, 0.0))
        self.assertTrue(NoiseParams.zero(2).is_zero)

        p = device_from_detunings(delta=(2.0 * math.pi * -3.57e6,), g=(2.0 * math.pi * 1.785e6,),
                                  Omega=2.0 * math.pi * 21.42e6, m=(1,), k=12,
                                  omega_eg=2.0 * math.pi * 6.5e9)
        q1 = quality_factor(p, NoiseParams.from_lifetimes_us(1, cavity=15.0), 1)
        self.assertAlmostEqual(q1 / 6.1296e5, 1.0, places=3)
        self.assertEqual(quality_factor(p, NoiseParams.zero(1), 1), math.inf)

        with self.assertRaises(ParameterError):
            NoiseParams.from_rates(1, -1.0, 0.0, 0.0, 0.0, 0.0, 0.0)
        with self.assertRaises(ParameterError):
            NoiseParams.from_lifetimes_us(1, cavity=-2.0)


if __name__ == '__main__':
    unittest.main()
