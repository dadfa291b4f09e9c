#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
相空间几何模块

该模块提供闭合相空间轨迹、总相位与回路时间的解析公式，
以及由目标相位反解器件参数的规划功能。
"""

import math
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from .model import STRONG_DRIVING_MARGIN, ConditionReport, device_from_plan, validate_conditions
from ..utils.conversion import angular_to_mhz, format_sequence, seconds_to_us
from ..utils.errors import ParameterError

# 配置日志
logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(name)s - %(levelname)s - %(message)s')
logger = logging.getLogger(__name__)

# 分支 -> ε
BRANCHES = {'++': 1.0, '--': -1.0, '−−': -1.0}

TimeLike = Union[float, np.ndarray]


@dataclass
class PhasePlan:
    """
    相位门参数方案

    Attributes:
        theta: 目标相位 θ_j（rad）
        m: 回路圈数 m_j
        delta: 失谐 δ_j（rad/s）
        g: 耦合 g_j（rad/s）
        T: 公共回路时间（s）
        Omega: 拉比频率 Ω（rad/s）
        k: 驱动整数
        report: 工作条件检查报告
        warnings: 规划过程中产生的警告
    """

    theta: Tuple[float, ...]
    m: Tuple[int, ...]
    delta: Tuple[float, ...]
    g: Tuple[float, ...]
    T: float
    Omega: float
    k: int
    report: Optional[ConditionReport] = None
    warnings: List[str] = field(default_factory=list)

    @property
    def n_targets(self) -> int:
        return len(self.theta)

    @property
    def drive_margin(self) -> float:
        """2Ω / max(g_j, |δ_j|)"""
        return 2.0 * self.Omega / max(max(abs(d) for d in self.delta), max(self.g))

    def summary_lines(self) -> List[str]:
        lines = [
            f"θ_j/π      = {format_sequence([t / math.pi for t in self.theta])}",
            f"m_j        = {', '.join(str(v) for v in self.m)}",
            f"δ_j/2π     = {format_sequence([angular_to_mhz(d) for d in self.delta])} MHz",
            f"g_j/2π     = {format_sequence([angular_to_mhz(g) for g in self.g])} MHz",
            f"T          = {seconds_to_us(self.T):.4f} µs",
            f"Ω/2π       = {angular_to_mhz(self.Omega):.4f} MHz (k = {self.k})",
            f"2Ω/max     = {self.drive_margin:.3f}",
        ]
        return lines


def _check_detuning(delta: float):
    if delta == 0:
        raise ParameterError("失谐为零（共振情形）不在本模型范围内")


def branch_sign(branch: str) -> float:
    """分支 '++' 或 '--' 对应的 ε"""
    if branch not in BRANCHES:
        raise ParameterError(f"未知分支: {branch}，可选 '++' 或 '--'")
    return BRANCHES[branch]


def alpha_trajectory(t: TimeLike, g: float, delta: float, branch: str = '++') -> TimeLike:
    """
    相空间轨迹 α(t) = (gε/δ)(e^{-iδt} - 1)

    Args:
        t: 时间，可以是数组
        g: 耦合
        delta: 失谐
        branch: '++'（ε = 1）或 '--'（ε = -1）

    Returns:
        复数或复数组
    """
    _check_detuning(delta)
    epsilon = branch_sign(branch)
    return (g * epsilon / delta) * (np.exp(-1j * delta * np.asarray(t)) - 1.0)


def cycle_time(m: int, delta: float) -> float:
    """回路时间 T = 2mπ/|δ|"""
    _check_detuning(delta)
    return 2.0 * m * math.pi / abs(delta)


def total_phase(g: float, delta: float, m: int) -> float:
    """
    一个完整周期 T = 2mπ/|δ| 内获得的总相位 θ = -(g²/δ)T

    δ < 0 时等于 2mπg²/δ²，δ > 0 时符号相反。

    Args:
        g: 耦合
        delta: 失谐
        m: 回路圈数

    Returns:
        float: 相位（rad）
    """
    return -(g * g / delta) * cycle_time(m, delta)


def displacement_path_phase(increments: Sequence[complex]) -> float:
    """
    按顺序施加位移 D(Δ_N)…D(Δ_1) 所得的相位 Im Σ_j Δ_j Σ_{k<j} Δ_k*

    Args:
        increments: 位移增量序列

    Returns:
        float: 相位（rad）
    """
    increments = np.asarray(increments, dtype=complex)
    if increments.size == 0:
        return 0.0
    preceding = np.cumsum(increments) - increments
    return float(np.imag(np.sum(increments * np.conj(preceding))))


def enclosed_phase_numeric(path: Sequence[complex]) -> float:
    """
    采样轨迹所围相位 Im∮α*dα 的离散近似

    Args:
        path: 轨迹采样点 α_0, …, α_N

    Returns:
        float: 相位（rad）

    Raises:
        ParameterError: 采样点少于 3 个
    """
    path = np.asarray(path, dtype=complex)
    if path.ndim != 1 or path.size < 3:
        raise ParameterError(f"轨迹至少需要 3 个采样点，实际: {path.size}")
    return displacement_path_phase(np.diff(path))


def qft_phases(n: int) -> Tuple[float, ...]:
    """量子傅里叶变换所需的相位 θ_j = π/2^j"""
    if n < 1:
        raise ParameterError(f"目标比特数必须不小于 1: {n}")
    return tuple(math.pi / 2 ** j for j in range(1, n + 1))


def solve_plan(theta_targets: Sequence[float], m: Sequence[int], delta_1: float, k: int,
               **device_options) -> PhasePlan:
    """
    由目标相位反解器件参数

    δ_j = (m_j/m₁)δ₁，g_j = |δ_j|√(θ_j/(2m_jπ))，T = 2m₁π/|δ₁|，Ω = kπ/T。

    Args:
        theta_targets: 目标相位，均在 (0, 2π) 内
        m: 回路圈数，均不小于 1
        delta_1: 腔 1 的失谐（rad/s），必须为负
        k: 驱动整数，不小于 1
        **device_options: 构造校验用器件参数的选项

    Returns:
        PhasePlan: 参数方案，附带工作条件报告

    Raises:
        ParameterError: 输入无效
    """
    theta = tuple(float(t) for t in theta_targets)
    m = tuple(int(v) for v in m)

    if not theta:
        raise ParameterError("目标相位列表为空")
    if len(m) != len(theta):
        raise ParameterError(f"回路圈数个数 {len(m)} 与目标相位个数 {len(theta)} 不一致")
    for j, value in enumerate(theta, start=1):
        if not 0.0 < value < 2.0 * math.pi:
            raise ParameterError(f"目标相位 θ_{j} = {value} 不在 (0, 2π) 内")
    if any(v < 1 for v in m):
        raise ParameterError(f"回路圈数必须不小于 1: {m}")
    if not delta_1 < 0:
        raise ParameterError(f"失谐 δ₁ 必须为负: {delta_1}")
    if int(k) != k or k < 1:
        raise ParameterError(f"驱动整数 k 必须为正整数: {k}")

    delta = tuple(mj / m[0] * delta_1 for mj in m)
    g = tuple(abs(dj) * math.sqrt(tj / (2.0 * mj * math.pi)) for tj, mj, dj in zip(theta, m, delta))
    T = cycle_time(m[0], delta_1)
    Omega = k * math.pi / T

    plan = PhasePlan(theta=theta, m=m, delta=delta, g=g, T=T, Omega=Omega, k=int(k))
    plan.report = validate_conditions(device_from_plan(plan, **device_options))

    margin = plan.report.drive_margin
    if margin < STRONG_DRIVING_MARGIN:
        message = f"强驱动余量 2Ω/max(g, |δ|) = {margin:.3f} 小于 {STRONG_DRIVING_MARGIN}，旋转波近似可能失效"
        logger.warning(message)
        plan.warnings.append(message)

    logger.debug(f"相位方案: T = {seconds_to_us(T):.4f} µs, Ω/2π = {angular_to_mhz(Omega):.4f} MHz")
    return plan
