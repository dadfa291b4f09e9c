#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
理想相位门模块

该模块构造理想门的幺正矩阵、单比特转换操作与理想输出态，
并比较模拟传播子与理想门。

寄存器约定：共 n+1 个比特，A 在最高位，随后为目标比特 1..n；
旋转基中位 0 表示 |+⟩，位 1 表示 |−⟩。
例如 n = 2 时索引 3 对应 |+⟩_A|−⟩₁|−⟩₂。
"""

import math
import logging
from dataclasses import dataclass
from functools import reduce
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from .hilbert import HilbertLayout, QOperator, rotated_qubit_state, vacuum
from ..utils.errors import HilbertDimensionError, ParameterError

# 配置日志
logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(name)s - %(levelname)s - %(message)s')
logger = logging.getLogger(__name__)

GATE_VARIANTS = ('generic', 'converted', 'two_qubit', 'three_qubit')

# 相位对齐时认为矩阵元为零的阈值
PHASE_FIX_FLOOR = 1e-12


@dataclass(frozen=True)
class GateSpec:
    """
    相位门描述

    Attributes:
        n_targets: 目标比特数
        theta: 各目标比特的相位 θ_j
        variant: 'generic'（控制比特与目标同号时加相位）、'converted'（A 为 |−⟩
            且目标为 |−⟩ 时加相位 2θ_j）、'two_qubit'（n = 1 的 generic）、
            'three_qubit'（n = 2 的 generic）
    """

    n_targets: int
    theta: Tuple[float, ...]
    variant: str = 'generic'

    def __post_init__(self):
        object.__setattr__(self, 'theta', tuple(float(t) for t in self.theta))
        if self.n_targets < 1:
            raise ParameterError(f"目标比特数必须不小于 1: {self.n_targets}")
        if len(self.theta) != self.n_targets:
            raise ParameterError(f"相位个数 {len(self.theta)} 与目标比特数 {self.n_targets} 不一致")
        if self.variant not in GATE_VARIANTS:
            raise ParameterError(f"未知的门类型: {self.variant}")
        if self.variant == 'two_qubit' and self.n_targets != 1:
            raise ParameterError("two_qubit 类型要求 n_targets = 1")
        if self.variant == 'three_qubit' and self.n_targets != 2:
            raise ParameterError("three_qubit 类型要求 n_targets = 2")

    @property
    def register_dim(self) -> int:
        return 2 ** (self.n_targets + 1)


def register_bits(n_targets: int) -> np.ndarray:
    """所有寄存器基矢的比特表，形状 (2^{n+1}, n+1)，第 0 列为 A"""
    n_qubits = n_targets + 1
    indices = np.arange(2 ** n_qubits)
    shifts = np.arange(n_qubits - 1, -1, -1)
    return (indices[:, None] >> shifts[None, :]) & 1


def phase_fix_index(n_targets: int) -> int:
    """|+⟩_A Π|−⟩_j 的寄存器索引"""
    return 2 ** n_targets - 1


def _generic_diagonal(n_targets: int, theta: Sequence[float]) -> np.ndarray:
    bits = register_bits(n_targets)
    diagonal = np.ones(bits.shape[0], dtype=complex)
    for j, phase in enumerate(theta, start=1):
        match = bits[:, 0] == bits[:, j]
        diagonal = np.where(match, diagonal * np.exp(1j * phase), diagonal)
    return diagonal


def _converted_diagonal(n_targets: int, theta: Sequence[float]) -> np.ndarray:
    bits = register_bits(n_targets)
    diagonal = np.ones(bits.shape[0], dtype=complex)
    for j, phase in enumerate(theta, start=1):
        both_minus = (bits[:, 0] == 1) & (bits[:, j] == 1)
        diagonal = np.where(both_minus, diagonal * np.exp(2j * phase), diagonal)
    return diagonal


def ideal_gate_unitary(spec: GateSpec) -> QOperator:
    """
    理想相位门（旋转基中的对角幺正矩阵）

    generic 类型对基矢 |p_A⟩Π|i_j⟩ 乘以 Π_{j: i_j = p_A} e^{iθ_j}；
    converted 类型乘以 Π_{j: p_A = i_j = −} e^{2iθ_j}。

    Args:
        spec: 门描述

    Returns:
        QOperator: 2^{n+1} 维稠密对角矩阵
    """
    if spec.variant == 'converted':
        diagonal = _converted_diagonal(spec.n_targets, spec.theta)
    else:
        diagonal = _generic_diagonal(spec.n_targets, spec.theta)
    return QOperator(np.diag(diagonal))


def two_qubit_gate(n_targets: int, j: int, theta: float) -> QOperator:
    """控制比特 A 与目标 j 同号时加相位 θ 的两比特门，嵌入 n+1 比特寄存器"""
    if not 1 <= j <= n_targets:
        raise ParameterError(f"目标编号越界: {j}")
    bits = register_bits(n_targets)
    match = bits[:, 0] == bits[:, j]
    return QOperator(np.diag(np.where(match, np.exp(1j * theta), 1.0 + 0j)))


def conversion_operation(n: int, theta: Sequence[float]) -> QOperator:
    """
    单比特转换操作

    |+⟩_A → Π_j e^{-iθ_j}|+⟩_A，|−⟩_j → e^{iθ_j}|−⟩_j，其余不变。
    与 generic 门复合后恰好得到 converted 门。

    Args:
        n: 目标比特数
        theta: 相位 θ_j

    Returns:
        QOperator: 局域幺正算符之积
    """
    if len(theta) != n:
        raise ParameterError(f"相位个数 {len(theta)} 与目标比特数 {n} 不一致")
    factors = [np.diag([np.exp(-1j * sum(theta)), 1.0])]
    factors += [np.diag([1.0, np.exp(1j * phase)]) for phase in theta]
    return QOperator(reduce(np.kron, factors))


def controlled_phase_chain(phases: Sequence[float], control: str = 'A') -> QOperator:
    """
    一串共享比特 A 的受控相位门：|−⟩_A|−⟩_j 上乘以 e^{iφ_j}

    control = 'A' 时以 A 为控制、各目标为被控；control = 'targets' 时
    各目标依次为控制、A 为被控。两种角色分配给出相同的对角矩阵。

    Args:
        phases: 相位 φ_j
        control: 'A' 或 'targets'

    Returns:
        QOperator: 2^{n+1} 维矩阵
    """
    n = len(phases)
    if n < 1:
        raise ParameterError("相位列表为空")
    identity_targets = np.eye(2 ** n, dtype=complex)

    if control == 'A':
        # 控制位为 |−⟩ 时对目标施加 ⊗_j diag(1, e^{iφ_j})
        target_unitary = reduce(np.kron, [np.diag([1.0, np.exp(1j * phi)]) for phi in phases])
        matrix = np.zeros((2 ** (n + 1), 2 ** (n + 1)), dtype=complex)
        matrix[:2 ** n, :2 ** n] = identity_targets
        matrix[2 ** n:, 2 ** n:] = target_unitary
        return QOperator(matrix)

    if control == 'targets':
        bits = register_bits(n)
        matrix = np.eye(2 ** (n + 1), dtype=complex)
        for j, phi in enumerate(phases, start=1):
            # 目标 j 为 |−⟩ 时对 A 施加 diag(1, e^{iφ_j})
            a_phase = np.where(bits[:, 0] == 1, np.exp(1j * phi), 1.0)
            gate = np.diag(np.where(bits[:, j] == 1, a_phase, 1.0))
            matrix = gate @ matrix
        return QOperator(matrix)

    raise ParameterError(f"控制角色只能是 'A' 或 'targets': {control}")


def excited_initial_state(n: int) -> np.ndarray:
    """每个比特处于 (|+⟩+|−⟩)/√2（即 |e⟩）的寄存器态（旋转基）"""
    dim = 2 ** (n + 1)
    return np.full(dim, 1.0 / math.sqrt(dim), dtype=complex)


def ideal_output_state(initial: np.ndarray, spec: GateSpec) -> np.ndarray:
    """
    理想门作用后的寄存器态

    Args:
        initial: 旋转基中的寄存器态
        spec: 门描述

    Returns:
        np.ndarray: 输出态

    Raises:
        HilbertDimensionError: 维数不匹配
    """
    initial = np.asarray(initial, dtype=complex)
    if initial.shape != (spec.register_dim,):
        raise HilbertDimensionError(f"初态维数 {initial.shape} 与寄存器维数 {spec.register_dim} 不匹配")
    return ideal_gate_unitary(spec).matrix @ initial


def rotated_basis_change(n_qubits: int, levels: int = 2) -> np.ndarray:
    """
    旋转基寄存器振幅到能级基振幅的变换矩阵

    Args:
        n_qubits: 比特数
        levels: 每个比特的能级数

    Returns:
        np.ndarray: 形状 (levels^n_qubits, 2^n_qubits)，各列为旋转基矢
    """
    single = np.column_stack([rotated_qubit_state('+', levels), rotated_qubit_state('-', levels)])
    return reduce(np.kron, [single] * n_qubits)


def register_state_in_layout(phi: np.ndarray, layout: HilbertLayout) -> np.ndarray:
    """
    把旋转基寄存器态放入完整模拟空间（各腔处于真空）

    Args:
        phi: 寄存器态（2^{n+1} 维），也可以是按列排列的多个态
        layout: 空间布局

    Returns:
        np.ndarray: 完整空间中的态
    """
    phi = np.asarray(phi, dtype=complex)
    n_qubits = layout.n_qutrits
    if phi.shape[0] != 2 ** n_qubits:
        raise HilbertDimensionError(f"寄存器态维数 {phi.shape[0]} 与比特数 {n_qubits} 不匹配")
    qutrit_part = rotated_basis_change(n_qubits, layout.qutrit_levels) @ phi
    cavity_part = vacuum(layout)
    if qutrit_part.ndim == 1:
        return np.kron(qutrit_part, cavity_part)
    return np.kron(qutrit_part, cavity_part[:, None])


def _as_matrix(op: Union[QOperator, np.ndarray]) -> np.ndarray:
    if isinstance(op, QOperator):
        return op.to_dense()
    return np.asarray(op, dtype=complex)


def propagator_distance(U_sim: Union[QOperator, np.ndarray], U_ideal: Union[QOperator, np.ndarray],
                        phase_fix_basis_state: Optional[int] = None) -> Tuple[float, float]:
    """
    比较模拟传播子与理想门

    先消除全局相位：使模拟矩阵在指定基矢上的对角元与理想门同相位
    （默认基矢 |+⟩_AΠ|−⟩_j，理想相位为 1）。该元素为零时改用模值最大的对角元。

    Args:
        U_sim: 限制在零光子子空间后的模拟传播子
        U_ideal: 理想门
        phase_fix_basis_state: 对齐相位用的基矢索引

    Returns:
        Tuple[float, float]:
            - 最大矩阵元偏差 max|U_sim - U_ideal|
            - 平均门保真度 |tr(U_ideal† U_sim)|/dim
    """
    sim = _as_matrix(U_sim)
    ideal = _as_matrix(U_ideal)
    if sim.shape != ideal.shape or sim.shape[0] != sim.shape[1]:
        raise HilbertDimensionError(f"传播子形状不一致: {sim.shape} 与 {ideal.shape}")

    dim = sim.shape[0]
    index = dim // 2 - 1 if phase_fix_basis_state is None else phase_fix_basis_state
    if not 0 <= index < dim:
        raise HilbertDimensionError(f"相位对齐基矢索引越界: {index}")

    diagonal = np.diagonal(sim)
    if abs(diagonal[index]) < PHASE_FIX_FLOOR:
        fallback = int(np.argmax(np.abs(diagonal)))
        logger.warning(f"基矢 {index} 上的对角元为零，改用基矢 {fallback} 对齐相位")
        index = fallback

    if abs(diagonal[index]) >= PHASE_FIX_FLOOR:
        target = np.angle(ideal[index, index]) if abs(ideal[index, index]) >= PHASE_FIX_FLOOR else 0.0
        sim = sim * np.exp(1j * (target - np.angle(diagonal[index])))

    distance = float(np.max(np.abs(sim - ideal)))
    fidelity = float(abs(np.trace(ideal.conj().T @ sim)) / dim)
    return distance, fidelity
