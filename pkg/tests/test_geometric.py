#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
几何相位测试脚本

该脚本用于测试相空间轨迹、回路相位与参数规划，包括：
1. 轨迹闭合与所围相位
2. 位移乘积相位与解析相位一致
3. 参考工作点的参数方案
"""

import sys
import math
import logging
import unittest
from pathlib import Path

import numpy as np

# 添加项目根目录到系统路径
sys.path.append(str(Path(__file__).parent.parent))

from src.core.geometric import (alpha_trajectory, cycle_time, displacement_path_phase, enclosed_phase_numeric,
                                qft_phases, solve_plan, total_phase)
from src.utils.conversion import angular_to_mhz, mhz_to_angular, seconds_to_us
from src.utils.errors import ParameterError

# 配置日志
logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(name)s - %(levelname)s - %(message)s')
logger = logging.getLogger(__name__)


class TestGeometric(unittest.TestCase):
    """几何相位测试类"""

    def test_trajectory_closes(self):
        """测试轨迹在整数圈后回到原点"""
        logger.info("测试轨迹在整数圈后回到原点")

        g, delta = 0.5, -1.0
        for m in (1, 2, 3):
            T = cycle_time(m, delta)
            self.assertAlmostEqual(abs(alpha_trajectory(T, g, delta)), 0.0, places=12)
            self.assertAlmostEqual(abs(alpha_trajectory(T, g, delta, '--')), 0.0, places=12)

        # 最远点 |α| = 2g/|δ|
        half = alpha_trajectory(math.pi, g, delta)
        self.assertAlmostEqual(abs(half), 1.0)

        with self.assertRaises(ParameterError):
            alpha_trajectory(1.0, g, 0.0)
        with self.assertRaises(ParameterError):
            alpha_trajectory(1.0, g, delta, '+-')

    def test_total_phase(self):
        """测试一个周期的总相位"""
        logger.info("测试一个周期的总相位")

        self.assertAlmostEqual(total_phase(0.5, -1.0, 1), math.pi / 2.0)
        self.assertAlmostEqual(total_phase(0.5, -1.0, 2), math.pi)
        self.assertAlmostEqual(total_phase(0.5, 1.0, 1), -math.pi / 2.0)

    def test_displacement_phase_matches(self):
        """测试离散位移乘积相位收敛到解析相位"""
        logger.info("测试离散位移乘积相位收敛到解析相位")

        g, delta, m = 0.5, -1.0, 1
        T = cycle_time(m, delta)
        t = np.linspace(0.0, T, 20001)
        path = alpha_trajectory(t, g, delta)
        phase = enclosed_phase_numeric(path)
        self.assertAlmostEqual(phase, total_phase(g, delta, m), places=6)

        # 两个分支所围相位相同
        self.assertAlmostEqual(enclosed_phase_numeric(alpha_trajectory(t, g, delta, '--')), phase, places=12)

        self.assertEqual(displacement_path_phase([]), 0.0)
        with self.assertRaises(ParameterError):
            enclosed_phase_numeric([0.0, 1.0])

    def test_reference_plan(self):
        """测试参考工作点的参数方案"""
        logger.info("测试参考工作点的参数方案")

        plan = solve_plan((math.pi / 2, math.pi / 2), (1, 2), mhz_to_angular(-3.57), 12)
        self.assertAlmostEqual(angular_to_mhz(plan.delta[1]), -7.14, places=9)
        self.assertAlmostEqual(angular_to_mhz(plan.g[0]), 1.785, places=9)
        self.assertAlmostEqual(angular_to_mhz(plan.g[1]), 2.5244, places=4)
        self.assertAlmostEqual(seconds_to_us(plan.T), 0.2801, places=4)
        self.assertAlmostEqual(angular_to_mhz(plan.Omega), 21.42, places=9)
        self.assertAlmostEqual(plan.drive_margin, 6.0, places=9)
        self.assertEqual(plan.warnings, [])
        self.assertTrue(plan.report.get('drive_matching').passed)
        self.assertTrue(plan.report.get('closed_drive_cycle').passed)

        # 两个腔在公共周期内获得各自的目标相位
        for g, delta, m, theta in zip(plan.g, plan.delta, plan.m, plan.theta):
            self.assertAlmostEqual(total_phase(g, delta, m), theta, places=12)

    def test_weak_drive_warning(self):
        """测试驱动余量不足时给出警告"""
        logger.info("测试驱动余量不足时给出警告")

        plan = solve_plan((math.pi / 2,), (1,), -1.0, 2)
        self.assertEqual(len(plan.warnings), 1)
        self.assertFalse(plan.report.get('strong_driving').passed)

    def test_invalid_plan(self):
        """测试无效的规划输入"""
        logger.info("测试无效的规划输入")

        with self.assertRaises(ParameterError):
            solve_plan((0.0,), (1,), -1.0, 12)
        with self.assertRaises(ParameterError):
            solve_plan((2.0 * math.pi,), (1,), -1.0, 12)
        with self.assertRaises(ParameterError):
            solve_plan((1.0,), (0,), -1.0, 12)
        with self.assertRaises(ParameterError):
            solve_plan((1.0,), (1,), 1.0, 12)
        with self.assertRaises(ParameterError):
            solve_plan((1.0,), (1,), -1.0, 0)
        with self.assertRaises(ParameterError):
            solve_plan((1.0, 1.0), (1,), -1.0, 12)

    def test_qft_phases(self):
        """测试量子傅里叶变换相位"""
        logger.info("测试量子傅里叶变换相位")

        self.assertEqual(qft_phases(3), (math.pi / 2, math.pi / 4, math.pi / 8))
        plan = solve_plan(qft_phases(3), (1, 1, 1), -1.0, 20)
        self.assertLess(plan.g[2], plan.g[1])
        with self.assertRaises(ParameterError):
            qft_phases(0)


if __name__ == '__main__':
    unittest.main()
