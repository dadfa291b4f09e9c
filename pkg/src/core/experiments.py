#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
实验编排模块

该模块实现命令行各子命令背后的实验逻辑：
1. 参数规划与工作条件报告；
2. 有效哈密顿量传播子与理想门的比较；
3. 无耗散（幺正演化）与有耗散（Lindblad 演化）的 δ₁ 扫描；
4. 截断与步长收敛检查；
5. 旋转波近似检查。

扫描的每个网格点都按该点的 δ₁ 重新规划 g_j、Ω、T，保证目标相位不变。
网格点在进程池中并行计算，结果按网格顺序汇总。
"""

import time
import math
import logging
import itertools
from dataclasses import dataclass, field
from multiprocessing import Pool
from typing import List, Optional, Sequence, Tuple

import numpy as np
from tqdm import tqdm

from .dynamics import (TimeGrid, cutoff_occupancy, default_step, effective_vs_full_check, fidelity, frame_is_identity,
                       propagate_lindblad, propagate_unitary, simulated_gate_propagator, RwaReport)
from .gates import (GateSpec, ideal_gate_unitary, ideal_output_state, excited_initial_state,
                    propagator_distance, register_state_in_layout)
from .geometric import PhasePlan, solve_plan, total_phase
from .hilbert import HilbertLayout, ket_to_dm
from .model import DeviceParams, device_from_plan, hamiltonian, quality_factor
from .sweep_writer import SweepRow, SweepWriter
from ..config.config_manager import ExperimentConfig
from ..utils.conversion import angular_to_ghz, angular_to_mhz, format_sequence
from ..utils.errors import ConfigError, SimulationError

# 配置日志
logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(name)s - %(levelname)s - %(message)s')
logger = logging.getLogger(__name__)

UNCONVERGED_OCCUPANCY = 1e-3


@dataclass(frozen=True)
class PointTask:
    """扫描网格上的一个待计算点"""

    index: int
    delta1: float
    g12_ratio: float
    lossy: bool
    config: ExperimentConfig
    cutoff: int
    step: Optional[float] = None


def initial_register_state(selector: str, n_targets: int) -> np.ndarray:
    """
    按配置选择初始寄存器态（旋转基）

    Args:
        selector: 'excited'（每个比特为 |e⟩）、'plus'（每个比特为 |+⟩）或 'basis:<k>'
        n_targets: 目标比特数

    Returns:
        np.ndarray: 寄存器态
    """
    dim = 2 ** (n_targets + 1)
    if selector == 'excited':
        return excited_initial_state(n_targets)
    if selector == 'plus':
        state = np.zeros(dim, dtype=complex)
        state[0] = 1.0
        return state
    if selector.startswith('basis:'):
        try:
            index = int(selector.split(':', 1)[1])
        except ValueError as e:
            raise ConfigError(f"无效的基矢初态: {selector}") from e
        if not 0 <= index < dim:
            raise ConfigError(f"基矢序号越界: {index} 不在 [0, {dim})")
        state = np.zeros(dim, dtype=complex)
        state[index] = 1.0
        return state
    raise ConfigError(f"未知的初态选择: {selector}")


def plan_point(config: ExperimentConfig, delta1: float, g12_ratio: Optional[float] = None,
               k: Optional[int] = None) -> Tuple[PhasePlan, DeviceParams]:
    """在给定 δ₁ 处重新规划并构造器件参数"""
    options = config.device_options(g12_ratio)
    plan = solve_plan(config.theta, config.m, delta1, config.k if k is None else k, **options)
    return plan, device_from_plan(plan, **options)


def run_gate_point(config: ExperimentConfig, delta1: float, g12_ratio: float, lossy: bool,
                   cutoff: int, step: Optional[float] = None) -> SweepRow:
    """
    计算单个网格点：完整哈密顿量下演化一个周期并与理想输出态比较

    无耗散时用幺正演化，有耗散时用 Lindblad 演化。

    Args:
        config: 实验配置
        delta1: δ₁（rad/s）
        g12_ratio: g₁₂/g₁
        lossy: 是否计入耗散
        cutoff: 每腔光子数截断
        step: 步长，None 表示默认步长

    Returns:
        SweepRow: 该点的结果
    """
    start = time.perf_counter()
    plan, p = plan_point(config, delta1, g12_ratio)
    layout = HilbertLayout(p.n_targets, cutoff, 3)
    frame_identity, _ = frame_is_identity(p.Omega, plan.T, p.n_targets)
    if not frame_identity:
        logger.warning(f"δ₁/2π = {angular_to_mhz(delta1):.4f} MHz: ΩT = {p.Omega * plan.T / math.pi:.6f}π "
                       f"不是 π 的整数倍，与理想门的比较缺少还原变换")

    register = initial_register_state(config.initial_state, p.n_targets)
    psi0 = register_state_in_layout(register, layout)
    psi_id = register_state_in_layout(ideal_output_state(register, GateSpec(p.n_targets, plan.theta)), layout)
    grid = TimeGrid(0.0, plan.T, step if step is not None else default_step(p, plan.T, 3))

    row = SweepRow(delta1_over_2pi_MHz=angular_to_mhz(delta1), g12_ratio=g12_ratio)
    if lossy:
        result = propagate_lindblad(ket_to_dm(psi0), p, config.active_noise(), grid, 'full', layout, psi_id)
        row.fidelity = result.fidelity
        row.trace_drift = result.trace_drift
        row.min_eig = result.min_eigenvalue
        row.cutoff_occupancy = result.cutoff_occupancy
    else:
        psi = propagate_unitary(hamiltonian('full', p, layout), psi0, grid)
        row.fidelity = fidelity(psi, psi_id)
        row.trace_drift = abs(float(np.vdot(psi, psi).real) - 1.0)
        row.min_eig = 0.0
        row.cutoff_occupancy = cutoff_occupancy(psi, layout)
    row.wall_ms = (time.perf_counter() - start) * 1e3
    return row


def simulate_point(task: PointTask) -> SweepRow:
    """
    进程池的工作函数，失败的点返回 status='failed' 的行而不抛出异常

    Args:
        task: 待计算点

    Returns:
        SweepRow: 该点的结果
    """
    start = time.perf_counter()
    try:
        return run_gate_point(task.config, task.delta1, task.g12_ratio, task.lossy, task.cutoff, task.step)
    except (SimulationError, ArithmeticError, ValueError) as e:
        logger.error(f"网格点 {task.index}（δ₁/2π = {angular_to_mhz(task.delta1):.4f} MHz, "
                     f"g₁₂/g₁ = {task.g12_ratio}）计算失败: {str(e)}")
        return SweepRow(delta1_over_2pi_MHz=angular_to_mhz(task.delta1), g12_ratio=task.g12_ratio,
                        wall_ms=(time.perf_counter() - start) * 1e3, status='failed')


@dataclass
class GateCheckReport:
    """gate-check 结果"""

    distance: float
    fidelity: float
    threshold: float  # 允许的最大矩阵元偏差
    frame_identity: bool
    phases: Tuple[float, ...]
    expected_phases: Tuple[float, ...]

    @property
    def passed(self) -> bool:
        return self.distance <= self.threshold


@dataclass
class ConvergenceEntry:
    """收敛检查中的一次运行"""

    cutoff: int
    step: float
    fidelity: float
    cutoff_occupancy: float

    @property
    def converged(self) -> bool:
        return self.cutoff_occupancy <= UNCONVERGED_OCCUPANCY


@dataclass
class ConvergenceReport:
    """截断与步长收敛检查结果"""

    entries: List[ConvergenceEntry] = field(default_factory=list)
    step_entries: List[ConvergenceEntry] = field(default_factory=list)

    def cutoff_deltas(self) -> List[Tuple[int, float]]:
        """各截断的保真度相对最大截断的差"""
        if not self.entries:
            return []
        reference = max(self.entries, key=lambda e: e.cutoff).fidelity
        return [(e.cutoff, abs(e.fidelity - reference)) for e in self.entries]

    def step_delta(self) -> Optional[float]:
        if len(self.step_entries) < 2:
            return None
        return abs(self.step_entries[1].fidelity - self.step_entries[0].fidelity)


class ExperimentRunner:
    """
    实验编排类

    实现各子命令的实验逻辑。
    """

    def __init__(self, config: ExperimentConfig):
        """
        初始化实验编排器

        Args:
            config: 实验配置
        """
        self.config = config
        self.writer = SweepWriter()

    def plan(self) -> Tuple[PhasePlan, List[str]]:
        """
        规划参考工作点并生成报告

        Returns:
            Tuple[PhasePlan, List[str]]:
                - 参数方案
                - 报告行
        """
        plan, p = plan_point(self.config, self.config.delta1)
        noise = self.config.noise
        lines = plan.summary_lines()
        lines.append(f"ω_c,j/2π   = {format_sequence([angular_to_ghz(w) for w in p.omega_c], '{:.6f}')} GHz")
        lines.append("Q_j        = " + ', '.join(f"{quality_factor(p, noise, j):.4g}"
                                                  for j in range(1, p.n_targets + 1)))
        lines.extend(plan.report.as_lines())
        lines.extend(f"警告: {w}" for w in plan.warnings)
        logger.info(f"完成参数规划: T = {plan.T * 1e6:.4f} µs")
        return plan, lines

    def gate_check(self, cutoff: Optional[int] = None) -> GateCheckReport:
        """
        逐列计算有效哈密顿量的传播子，与理想门比较

        Args:
            cutoff: 光子数截断，None 时使用配置中的 gate_cutoff

        Returns:
            GateCheckReport: 比较结果
        """
        plan, p = plan_point(self.config, self.config.delta1)
        layout = HilbertLayout(p.n_targets, cutoff or self.config.gate_cutoff, 2)
        step = self.config.step if self.config.step is not None else default_step(p, plan.T, 2)

        frame_identity, _ = frame_is_identity(p.Omega, plan.T, p.n_targets)
        if not frame_identity:
            logger.warning(f"ΩT = {p.Omega * plan.T / math.pi:.6f}π 不是 π 的整数倍，还原变换不是单位算符")

        U_sim = simulated_gate_propagator(p, layout, plan.T, TimeGrid(0.0, plan.T, step))
        U_ideal = ideal_gate_unitary(GateSpec(p.n_targets, plan.theta))
        distance, gate_fidelity = propagator_distance(U_sim, U_ideal)

        # |+⟩_A|+⟩_j 相对 |+⟩_AΠ|−⟩_j 的相位即 θ_j
        matrix = U_sim.to_dense()
        reference = 2 ** p.n_targets - 1
        phases = []
        for j in range(1, p.n_targets + 1):
            index = reference & ~(1 << (p.n_targets - j))
            phases.append(float(np.angle(matrix[index, index] / matrix[reference, reference])))
        expected = tuple(math.remainder(total_phase(g, d, m), 2.0 * math.pi)
                         for g, d, m in zip(plan.g, plan.delta, plan.m))

        report = GateCheckReport(distance, gate_fidelity, self.config.gate_max_distance, frame_identity,
                                 tuple(phases), expected)
        logger.info(f"门检查: 最大偏差 = {distance:.3e}, 门保真度 = {gate_fidelity:.6f}")
        return report

    def _tasks(self, g12_ratios: Sequence[float], lossy: bool) -> List[PointTask]:
        grid = itertools.product(g12_ratios, self.config.sweep_delta1)
        return [PointTask(index, delta1, ratio, lossy, self.config, self.config.cutoff, self.config.step)
                for index, (ratio, delta1) in enumerate(grid)]

    def run_sweep(self, g12_ratios: Sequence[float], lossy: bool, desc: str) -> List[SweepRow]:
        """
        在 (g₁₂/g₁, δ₁) 网格上扫描

        Args:
            g12_ratios: 串扰比列表
            lossy: 是否计入耗散
            desc: 进度条描述

        Returns:
            List[SweepRow]: 按网格顺序排列的结果
        """
        tasks = self._tasks(g12_ratios, lossy)
        if not tasks:
            logger.warning("扫描网格为空")
            return []

        workers = min(self.config.workers, len(tasks))
        logger.info(f"开始扫描: {len(tasks)} 个网格点, {workers} 个进程")
        if workers <= 1:
            rows = [simulate_point(task) for task in tqdm(tasks, desc=desc)]
        else:
            with Pool(workers) as pool:
                rows = list(tqdm(pool.imap(simulate_point, tasks), total=len(tasks), desc=desc))

        failed = sum(1 for row in rows if not row.ok)
        if failed:
            logger.warning(f"扫描完成，{failed} 个网格点失败")
        else:
            logger.info("扫描完成")
        return rows

    def fig6(self) -> List[SweepRow]:
        """无耗散扫描：每个串扰比、每个 δ₁ 一行"""
        return self.run_sweep(self.config.sweep_g12_ratios, lossy=False, desc="无耗散扫描")

    def fig7(self) -> List[SweepRow]:
        """有耗散扫描：串扰比取 device.g12_ratio"""
        return self.run_sweep([self.config.g12_ratio], lossy=True, desc="有耗散扫描")

    def write_rows(self, rows: Sequence[SweepRow], output_path: str) -> bool:
        return self.writer.write(rows, output_path)

    def converge(self) -> ConvergenceReport:
        """
        在工作点 δ₁ 上改变截断与步长，报告有耗散保真度的变化

        Returns:
            ConvergenceReport: 收敛检查结果
        """
        report = ConvergenceReport()
        plan, p = plan_point(self.config, self.config.delta1)
        step = self.config.step if self.config.step is not None else default_step(p, plan.T, 3)

        for cutoff in tqdm(self.config.converge_cutoffs, desc="截断收敛"):
            row = run_gate_point(self.config, self.config.delta1, self.config.g12_ratio, True, cutoff, step)
            entry = ConvergenceEntry(cutoff, step, row.fidelity, row.cutoff_occupancy)
            if not entry.converged:
                logger.warning(f"截断 {cutoff} 未收敛: 最高能级布居 {row.cutoff_occupancy:.3e}")
            report.entries.append(entry)

        for current in tqdm((step, step / 2.0), desc="步长收敛"):
            row = run_gate_point(self.config, self.config.delta1, self.config.g12_ratio, True,
                                 self.config.cutoff, current)
            report.step_entries.append(ConvergenceEntry(self.config.cutoff, current, row.fidelity,
                                                        row.cutoff_occupancy))
        return report

    def rwa_check(self, k_values: Optional[Sequence[int]] = None, cutoff: int = 6) -> List[RwaReport]:
        """
        对每个 k 重新规划，比较旋转表象哈密顿量与有效哈密顿量的演化

        Args:
            k_values: 驱动整数列表，None 时使用配置中的 rwa_k
            cutoff: 光子数截断

        Returns:
            List[RwaReport]: 每个 k 的结果
        """
        reports = []
        for k in (k_values or self.config.rwa_k):
            plan, p = plan_point(self.config, self.config.delta1, k=k)
            layout = HilbertLayout(p.n_targets, cutoff, 2)
            step = self.config.step if self.config.step is not None else default_step(p, plan.T, 2)
            reports.append(effective_vs_full_check(p, TimeGrid(0.0, plan.T, step), layout))
        return reports
