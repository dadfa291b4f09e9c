#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
命令行界面模块

该模块提供命令行操作接口：plan、gate-check、fig6、fig7、converge、rwa-check。

退出码：0 成功，1 配置错误，2 数值计算失败，3 未达到验收阈值。
"""

import argparse
import logging
from typing import Callable, List, Optional

from ..config.config_manager import ConfigManager, ExperimentConfig
from ..core.experiments import ExperimentRunner
from ..utils.errors import ConfigError, IntegrationError, ParameterError, SimulationError
from ..utils.validation import validate_output_path

# 配置日志
logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(name)s - %(levelname)s - %(message)s')
logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERIC = 2
EXIT_THRESHOLD = 3


class CLI:
    """
    命令行界面类

    提供命令行操作接口。
    """

    def __init__(self):
        """初始化命令行界面"""
        self.parser = self._create_parser()
        self.config_manager = ConfigManager()

    def _create_parser(self) -> argparse.ArgumentParser:
        """
        创建命令行参数解析器

        Returns:
            argparse.ArgumentParser: 参数解析器
        """
        # 公共参数
        common = argparse.ArgumentParser(add_help=False)
        common.add_argument('--config', '-c', help='JSON 配置文件路径，不指定则使用参考工作点')
        common.add_argument('--out', '-o', help='输出 CSV 路径')
        common.add_argument('--workers', '-w', type=int, help='并行进程数')
        common.add_argument('--cutoff', type=int, help='每个腔的光子数截断')
        common.add_argument('--step', type=float, help='积分步长（ns）')
        common.add_argument('--verbose', '-v', action='store_true', help='显示详细日志')

        parser = argparse.ArgumentParser(
            description='多目标几何相位门模拟工具',
            formatter_class=argparse.RawDescriptionHelpFormatter
        )
        subparsers = parser.add_subparsers(dest='command', help='子命令')

        subparsers.add_parser('plan', parents=[common], help='由目标相位规划器件参数并检查工作条件')
        subparsers.add_parser('gate-check', parents=[common], help='比较有效哈密顿量传播子与理想门')
        subparsers.add_parser('fig6', parents=[common], help='无耗散 δ₁ 扫描（多个串扰比）')
        subparsers.add_parser('fig7', parents=[common], help='有耗散 δ₁ 扫描')
        subparsers.add_parser('converge', parents=[common], help='截断与步长收敛检查')
        subparsers.add_parser('rwa-check', parents=[common], help='旋转波近似检查')

        return parser

    def parse_args(self, args: Optional[List[str]] = None) -> argparse.Namespace:
        """
        解析命令行参数

        Args:
            args: 命令行参数列表，如果为None则使用sys.argv

        Returns:
            argparse.Namespace: 解析后的参数
        """
        return self.parser.parse_args(args)

    def run(self, args: Optional[List[str]] = None) -> int:
        """
        运行命令行工具

        Args:
            args: 命令行参数列表，如果为None则使用sys.argv

        Returns:
            int: 退出码
        """
        args = self.parse_args(args)

        if getattr(args, 'verbose', False):
            logging.getLogger().setLevel(logging.DEBUG)

        commands = {
            'plan': self._run_plan,
            'gate-check': self._run_gate_check,
            'fig6': self._run_fig6,
            'fig7': self._run_fig7,
            'converge': self._run_converge,
            'rwa-check': self._run_rwa_check,
        }
        if args.command not in commands:
            self.parser.print_help()
            return EXIT_CONFIG

        config = self._load_config(args)
        if config is None:
            return EXIT_CONFIG
        return self._guarded(commands[args.command], ExperimentRunner(config), args)

    def _load_config(self, args: argparse.Namespace) -> Optional[ExperimentConfig]:
        """读取配置文件并应用命令行覆盖"""
        if args.config and not self.config_manager.load_config(args.config):
            logger.error(f"配置文件无效: {args.config}")
            return None

        overrides = {
            'numerics.workers': args.workers,
            'numerics.cutoff': args.cutoff,
            'numerics.step_ns': args.step,
            'output.path': args.out,
        }
        try:
            self.config_manager.update_settings({k: v for k, v in overrides.items() if v is not None})
            return self.config_manager.get_experiment_config()
        except ConfigError as e:
            logger.error(f"配置错误: {str(e)}")
            return None

    def _guarded(self, command: Callable[[ExperimentRunner, argparse.Namespace], int],
                 runner: ExperimentRunner, args: argparse.Namespace) -> int:
        try:
            return command(runner, args)
        except (ConfigError, ParameterError) as e:
            logger.error(f"参数错误: {str(e)}")
            return EXIT_CONFIG
        except IntegrationError as e:
            suggestion = f"，建议步长 {e.suggested_step * 1e9:.4g} ns" if e.suggested_step else ''
            logger.error(f"数值积分失败: {str(e)}{suggestion}")
            return EXIT_NUMERIC
        except SimulationError as e:
            logger.error(f"计算失败: {str(e)}")
            return EXIT_NUMERIC

    def _output_path(self, runner: ExperimentRunner, default: str) -> Optional[str]:
        path = runner.config.output_path or default
        is_valid, error = validate_output_path(path, '.csv')
        if not is_valid:
            logger.error(f"输出路径无效: {path} - {error}")
            return None
        return path

    def _run_plan(self, runner: ExperimentRunner, args: argparse.Namespace) -> int:
        _, lines = runner.plan()
        for line in lines:
            print(line)
        return EXIT_OK

    def _run_gate_check(self, runner: ExperimentRunner, args: argparse.Namespace) -> int:
        report = runner.gate_check(args.cutoff)
        print(f"最大矩阵元偏差 = {report.distance:.3e} (阈值 {report.threshold:.3e})")
        print(f"门保真度       = {report.fidelity:.8f}")
        for j, (phase, expected) in enumerate(zip(report.phases, report.expected_phases), start=1):
            print(f"θ_{j}: 数值 {phase:.6f} rad, 解析 {expected:.6f} rad")
        if not report.frame_identity:
            print("警告: 还原变换不是单位算符")
        if not report.passed:
            logger.error(f"最大矩阵元偏差 {report.distance:.3e} 超过阈值 {report.threshold:.3e}")
            return EXIT_THRESHOLD
        return EXIT_OK

    def _run_sweep(self, runner: ExperimentRunner, rows_factory, default_path: str) -> int:
        path = self._output_path(runner, default_path)
        if path is None:
            return EXIT_CONFIG
        rows = rows_factory()
        if not runner.write_rows(rows, path):
            return EXIT_NUMERIC
        print(f"结果已写入: {path}")
        return EXIT_OK

    def _run_fig6(self, runner: ExperimentRunner, args: argparse.Namespace) -> int:
        return self._run_sweep(runner, runner.fig6, 'fig6.csv')

    def _run_fig7(self, runner: ExperimentRunner, args: argparse.Namespace) -> int:
        return self._run_sweep(runner, runner.fig7, 'fig7.csv')

    def _run_converge(self, runner: ExperimentRunner, args: argparse.Namespace) -> int:
        report = runner.converge()
        for (cutoff, delta), entry in zip(report.cutoff_deltas(), report.entries):
            flag = '' if entry.converged else '  [未收敛]'
            print(f"截断 {cutoff}: F = {entry.fidelity:.8f}, |ΔF| = {delta:.3e}, "
                  f"最高能级布居 = {entry.cutoff_occupancy:.3e}{flag}")
        step_delta = report.step_delta()
        if step_delta is not None:
            print(f"步长减半: |ΔF| = {step_delta:.3e}")
        return EXIT_OK

    def _run_rwa_check(self, runner: ExperimentRunner, args: argparse.Namespace) -> int:
        for report in runner.rwa_check(cutoff=args.cutoff or 6):
            print(f"k = {report.k}: 2Ω/|δ| = {report.drive_ratio:.2f}, "
                  f"T = {report.T * 1e6:.4f} µs, 保真度 = {report.fidelity:.8f}")
        return EXIT_OK
