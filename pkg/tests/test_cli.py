#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
命令行界面测试脚本

该脚本用于测试子命令分派与退出码
"""

import io
import os
import sys
import shutil
import logging
import unittest
from contextlib import redirect_stdout
from pathlib import Path

# 添加项目根目录到系统路径
sys.path.append(str(Path(__file__).parent.parent))

from src.config.config_manager import ConfigManager
from src.core.sweep_reader import SweepReader
from src.ui.cli import CLI, EXIT_CONFIG, EXIT_OK, EXIT_THRESHOLD

# 配置日志
logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(name)s - %(levelname)s - %(message)s')
logger = logging.getLogger(__name__)


class TestCLI(unittest.TestCase):
    """命令行界面测试类"""

    @classmethod
    def setUpClass(cls):
        """测试前的准备工作"""
        cls.test_data_dir = os.path.join(os.path.dirname(__file__), 'data')
        cls.output_dir = os.path.join(cls.test_data_dir, 'output_cli')
        os.makedirs(cls.output_dir, exist_ok=True)

        # 单点扫描配置
        manager = ConfigManager()
        manager.load_config(os.path.join(cls.test_data_dir, 'reference_config.json'))
        manager.update_settings({'sweep.points': 1, 'sweep.delta1_start_MHz': -3.57,
                                 'sweep.g12_ratios': [0.0]})
        cls.single_point_config = os.path.join(cls.output_dir, 'single_point.json')
        manager.save_config(cls.single_point_config)

        # gate-check 偏差阈值
        cls.threshold_configs = {}
        for name, max_distance in (('strict', 1e-12), ('loose', 2.5)):
            manager = ConfigManager()
            manager.set_setting('numerics.gate_max_distance', max_distance)
            path = os.path.join(cls.output_dir, f'gate_{name}.json')
            manager.save_config(path)
            cls.threshold_configs[name] = path

    @classmethod
    def tearDownClass(cls):
        """测试后的清理工作"""
        shutil.rmtree(cls.output_dir, ignore_errors=True)

    def run_cli(self, args):
        buffer = io.StringIO()
        with redirect_stdout(buffer):
            code = CLI().run(args)
        return code, buffer.getvalue()

    def test_plan(self):
        """测试 plan 子命令"""
        logger.info("测试 plan 子命令")

        code, output = self.run_cli(['plan'])
        self.assertEqual(code, EXIT_OK)
        self.assertIn('21.4200', output)

    def test_config_errors(self):
        """测试配置错误的退出码"""
        logger.info("测试配置错误的退出码")

        code, _ = self.run_cli(['plan', '-c', os.path.join(self.test_data_dir, 'missing.json')])
        self.assertEqual(code, EXIT_CONFIG)
        code, _ = self.run_cli(['plan', '-c', os.path.join(self.test_data_dir, 'unknown_key_config.json')])
        self.assertEqual(code, EXIT_CONFIG)
        code, _ = self.run_cli(['plan', '--cutoff', '0'])
        self.assertEqual(code, EXIT_CONFIG)
        code, _ = self.run_cli(['fig6', '-o', os.path.join(self.output_dir, 'fig6.txt')])
        self.assertEqual(code, EXIT_CONFIG)
        code, _ = self.run_cli([])
        self.assertEqual(code, EXIT_CONFIG)

    def test_gate_check_threshold(self):
        """测试最大矩阵元偏差超过阈值时的退出码"""
        logger.info("测试最大矩阵元偏差超过阈值时的退出码")

        code, output = self.run_cli(['gate-check', '-c', self.threshold_configs['strict'], '--cutoff', '3'])
        self.assertEqual(code, EXIT_THRESHOLD)
        self.assertIn('阈值 1.000e-12', output)

        code, _ = self.run_cli(['gate-check', '-c', self.threshold_configs['loose'], '--cutoff', '3'])
        self.assertEqual(code, EXIT_OK)

    def test_fig6_single_point(self):
        """测试单点 fig6 扫描写出 CSV"""
        logger.info("测试单点 fig6 扫描写出 CSV")

        path = os.path.join(self.output_dir, 'fig6.csv')
        code, output = self.run_cli(['fig6', '-c', self.single_point_config, '-o', path, '--cutoff', '2'])
        self.assertEqual(code, EXIT_OK)
        self.assertIn(path, output)

        reader = SweepReader()
        self.assertTrue(reader.read(path))
        rows = reader.get_rows()
        self.assertEqual(len(rows), 1)
        self.assertTrue(rows[0].ok)
        self.assertAlmostEqual(rows[0].delta1_over_2pi_MHz, -3.57)


if __name__ == '__main__':
    unittest.main()
