#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
截断希尔伯特空间代数模块

该模块提供张量积空间的布局、子系统算符、嵌入、态构造与位移算符。

约定：
1. 单个量子比特（三能级时称 qutrit）的能级顺序为 (|g⟩, |e⟩, |f⟩)；
2. 张量积顺序为 A ⊗ qutrit1 ⊗ … ⊗ qutritn ⊗ cavity1 ⊗ … ⊗ cavityn；
3. 旋转基 |±⟩ = (|e⟩ ± |g⟩)/√2。

子系统算符（维数不超过 64）用稠密矩阵，嵌入到全空间后用 CSR 稀疏矩阵。
"""

import math
import logging
from dataclasses import dataclass
from functools import reduce
from typing import Sequence, Tuple, Union

import numpy as np
import scipy.sparse as sp
from scipy.linalg import expm

from ..utils.errors import HilbertDimensionError, ParameterError
from ..utils.validation import validate_state_vector, validate_density_matrix

# 配置日志
logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(name)s - %(levelname)s - %(message)s')
logger = logging.getLogger(__name__)

HERMITIAN_TOL = 1e-12
DENSE_LIMIT = 64

# 能级索引
G, E, F = 0, 1, 2

Matrix = Union[np.ndarray, sp.spmatrix]


@dataclass(frozen=True)
class HilbertLayout:
    """
    张量积空间布局

    Attributes:
        n_targets: 目标比特（腔）数 n
        fock_cutoff: 每个腔保留的最大光子数，腔维数为 cutoff+1
        qutrit_levels: 每个比特的能级数，3 表示包含 |f⟩，2 为两能级模式
    """

    n_targets: int
    fock_cutoff: int
    qutrit_levels: int = 3

    def __post_init__(self):
        if self.n_targets < 1:
            raise HilbertDimensionError(f"目标比特数必须不小于 1: {self.n_targets}")
        if self.fock_cutoff < 1:
            raise HilbertDimensionError(f"Fock 截断必须不小于 1: {self.fock_cutoff}")
        if self.qutrit_levels not in (2, 3):
            raise HilbertDimensionError(f"比特能级数只能是 2 或 3: {self.qutrit_levels}")

    @property
    def n_qutrits(self) -> int:
        return self.n_targets + 1

    @property
    def cavity_dim(self) -> int:
        return self.fock_cutoff + 1

    @property
    def three_level(self) -> bool:
        return self.qutrit_levels == 3

    @property
    def subsystem_dims(self) -> Tuple[int, ...]:
        return (self.qutrit_levels,) * self.n_qutrits + (self.cavity_dim,) * self.n_targets

    @property
    def qutrit_space_dim(self) -> int:
        return self.qutrit_levels ** self.n_qutrits

    @property
    def cavity_space_dim(self) -> int:
        return self.cavity_dim ** self.n_targets

    @property
    def total_dim(self) -> int:
        return int(np.prod(self.subsystem_dims))

    def qutrit_index(self, l: int) -> int:
        """
        比特 l 的子系统序号

        Args:
            l: 0 表示耦合比特 A，1..n 表示腔内比特 j

        Returns:
            int: 子系统序号
        """
        if not 0 <= l <= self.n_targets:
            raise HilbertDimensionError(f"比特编号越界: {l}")
        return l

    def cavity_index(self, j: int) -> int:
        """
        腔 j 的子系统序号

        Args:
            j: 腔编号，1..n

        Returns:
            int: 子系统序号
        """
        if not 1 <= j <= self.n_targets:
            raise HilbertDimensionError(f"腔编号越界: {j}")
        return self.n_targets + j

    def with_cutoff(self, fock_cutoff: int) -> 'HilbertLayout':
        """返回仅截断不同的新布局"""
        return HilbertLayout(self.n_targets, fock_cutoff, self.qutrit_levels)


class QOperator:
    """
    作用在全空间或单个子系统上的复矩阵

    Attributes:
        matrix: 稠密 ndarray 或 CSR 稀疏矩阵
        dims: 子系统维数元组，乘积等于矩阵维数
        hermitian_hint: 是否声明为厄米
    """

    __slots__ = ('matrix', 'dims', 'hermitian_hint')

    def __init__(self, matrix: Matrix, dims: Tuple[int, ...] = None,
                 hermitian_hint: bool = False, tol: float = HERMITIAN_TOL):
        if sp.issparse(matrix):
            matrix = sp.csr_matrix(matrix, dtype=complex)
        else:
            matrix = np.asarray(matrix, dtype=complex)
            if matrix.ndim != 2:
                raise HilbertDimensionError(f"算符必须是二维矩阵，实际维度: {matrix.ndim}")

        if matrix.shape[0] != matrix.shape[1]:
            raise HilbertDimensionError(f"算符必须是方阵，实际形状: {matrix.shape}")

        if dims is None:
            dims = (matrix.shape[0],)
        dims = tuple(int(d) for d in dims)
        if int(np.prod(dims)) != matrix.shape[0]:
            raise HilbertDimensionError(f"子系统维数 {dims} 与矩阵维数 {matrix.shape[0]} 不符")

        self.matrix = matrix
        self.dims = dims
        self.hermitian_hint = hermitian_hint

        if hermitian_hint:
            error = self.hermitian_error()
            if error >= tol:
                raise ParameterError(f"声明为厄米的算符不满足厄米性: max|M-M†| = {error:.3e}")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def is_sparse(self) -> bool:
        return sp.issparse(self.matrix)

    def hermitian_error(self) -> float:
        """返回 max|M - M†|"""
        diff = self.matrix - self.matrix.conj().T
        if sp.issparse(diff):
            return float(abs(diff).max()) if diff.nnz else 0.0
        return float(np.max(np.abs(diff))) if diff.size else 0.0

    def is_hermitian(self, tol: float = HERMITIAN_TOL) -> bool:
        return self.hermitian_error() < tol

    def to_dense(self) -> np.ndarray:
        if self.is_sparse:
            return self.matrix.toarray()
        return self.matrix

    def dag(self) -> 'QOperator':
        return QOperator(self.matrix.conj().T, self.dims, self.hermitian_hint)

    def _check_compatible(self, other: 'QOperator'):
        if self.dim != other.dim:
            raise HilbertDimensionError(f"算符维数不匹配: {self.dim} != {other.dim}")

    def __matmul__(self, other):
        if isinstance(other, QOperator):
            self._check_compatible(other)
            return QOperator(self.matrix @ other.matrix, self.dims)
        return self.matrix @ other

    def __add__(self, other: 'QOperator') -> 'QOperator':
        self._check_compatible(other)
        return QOperator(self.matrix + other.matrix, self.dims,
                         self.hermitian_hint and other.hermitian_hint)

    def __sub__(self, other: 'QOperator') -> 'QOperator':
        self._check_compatible(other)
        return QOperator(self.matrix - other.matrix, self.dims,
                         self.hermitian_hint and other.hermitian_hint)

    def __mul__(self, scalar: complex) -> 'QOperator':
        hermitian = self.hermitian_hint and np.isreal(scalar)
        return QOperator(self.matrix * scalar, self.dims, bool(hermitian))

    __rmul__ = __mul__

    def __neg__(self) -> 'QOperator':
        return self * -1.0

    def __repr__(self) -> str:
        kind = 'sparse' if self.is_sparse else 'dense'
        return f"QOperator(dim={self.dim}, dims={self.dims}, {kind}, hermitian={self.hermitian_hint})"


def commutator(a: QOperator, b: QOperator) -> QOperator:
    """返回 [A, B] = AB - BA"""
    return a @ b - b @ a


def _check_dim(dim: int):
    if int(dim) != dim or dim < 2:
        raise HilbertDimensionError(f"维数必须是不小于 2 的整数: {dim}")


def identity(dim: int) -> QOperator:
    """单位算符"""
    if dim < 1:
        raise HilbertDimensionError(f"维数必须为正: {dim}")
    return QOperator(np.eye(dim), hermitian_hint=True)


def annihilation(dim: int) -> QOperator:
    """
    截断谐振子湮灭算符

    矩阵元 (n-1, n) = √n，n = 1..dim-1。

    Args:
        dim: 截断维数

    Returns:
        QOperator: 湮灭算符 a

    Raises:
        HilbertDimensionError: dim < 2
    """
    _check_dim(dim)
    return QOperator(np.diag(np.sqrt(np.arange(1, dim)), k=1))


def creation(dim: int) -> QOperator:
    """截断谐振子产生算符 a†"""
    return annihilation(dim).dag()


def number(dim: int) -> QOperator:
    """粒子数算符 a†a"""
    _check_dim(dim)
    return QOperator(np.diag(np.arange(dim, dtype=float)), hermitian_hint=True)


def _projector(levels: int, row: int, col: int) -> np.ndarray:
    matrix = np.zeros((levels, levels), dtype=complex)
    matrix[row, col] = 1.0
    return matrix


def _rotated_vectors(levels: int) -> Tuple[np.ndarray, np.ndarray]:
    plus = np.zeros(levels, dtype=complex)
    minus = np.zeros(levels, dtype=complex)
    plus[G], plus[E] = 1.0, 1.0
    minus[G], minus[E] = -1.0, 1.0
    return plus / math.sqrt(2.0), minus / math.sqrt(2.0)


# 算符种类 -> (矩阵构造函数, 是否厄米, 是否需要 |f⟩)
_QUTRIT_KINDS = {
    'sigma_plus': (lambda n: _projector(n, E, G), False, False),
    'sigma_minus': (lambda n: _projector(n, G, E), False, False),
    'sigma_fe_plus': (lambda n: _projector(n, F, E), False, True),
    'sigma_fe_minus': (lambda n: _projector(n, E, F), False, True),
    'sigma_fg_minus': (lambda n: _projector(n, G, F), False, True),
    'sigma_ee': (lambda n: _projector(n, E, E), True, False),
    'sigma_ff': (lambda n: _projector(n, F, F), True, True),
    'sigma_z_rot': (lambda n: _projector(n, G, E) + _projector(n, E, G), True, False),
    'sigma_plus_rot': (lambda n: np.outer(_rotated_vectors(n)[0], _rotated_vectors(n)[1].conj()), False, False),
    'sigma_minus_rot': (lambda n: np.outer(_rotated_vectors(n)[1], _rotated_vectors(n)[0].conj()), False, False),
}

QUTRIT_KINDS = tuple(_QUTRIT_KINDS)


def qutrit_operator(kind: str, levels: int = 3) -> QOperator:
    """
    单比特算符

    基矢顺序为 (|g⟩, |e⟩, |f⟩)。旋转基算符 σ̃_z = |+⟩⟨+| - |-⟩⟨-|，
    σ̃⁺ = |+⟩⟨-|，σ̃⁻ = |-⟩⟨+|，在 {g,e} 块之外为零。

    Args:
        kind: 算符种类，取值见 QUTRIT_KINDS
        levels: 能级数，3 或 2

    Returns:
        QOperator: levels×levels 稠密算符

    Raises:
        ParameterError: 未知种类，或两能级模式下请求涉及 |f⟩ 的算符
    """
    if kind not in _QUTRIT_KINDS:
        raise ParameterError(f"未知的比特算符种类: {kind}")
    if levels not in (2, 3):
        raise HilbertDimensionError(f"比特能级数只能是 2 或 3: {levels}")

    builder, hermitian, needs_f = _QUTRIT_KINDS[kind]
    if needs_f and levels < 3:
        raise ParameterError(f"两能级模式下不存在算符 {kind}")

    return QOperator(builder(levels), hermitian_hint=hermitian)


def embed(op: Union[QOperator, np.ndarray], s: int, layout: HilbertLayout) -> QOperator:
    """
    把子系统算符嵌入全空间，其余因子为单位算符

    Args:
        op: 子系统 s 上的算符
        s: 子系统序号
        layout: 空间布局

    Returns:
        QOperator: 全空间 CSR 算符

    Raises:
        HilbertDimensionError: 序号越界或维数不匹配
    """
    if not isinstance(op, QOperator):
        op = QOperator(op)

    dims = layout.subsystem_dims
    if not 0 <= s < len(dims):
        raise HilbertDimensionError(f"子系统序号越界: {s}")
    if op.dim != dims[s]:
        raise HilbertDimensionError(f"算符维数 {op.dim} 与子系统 {s} 的维数 {dims[s]} 不匹配")

    left = int(np.prod(dims[:s]))
    right = int(np.prod(dims[s + 1:]))
    matrix = sp.kron(sp.identity(left, dtype=complex, format='csr'), sp.csr_matrix(op.matrix), format='csr')
    matrix = sp.kron(matrix, sp.identity(right, dtype=complex, format='csr'), format='csr')
    matrix.eliminate_zeros()
    return QOperator(matrix, dims, op.hermitian_hint)


def displacement(alpha: complex, dim: int) -> QOperator:
    """
    截断空间中的位移算符 D(α) = exp(α a† - α* a)

    截断误差由调用方控制，经验上 |α|² + 4|α| ≤ dim 时低于 1e-8。

    Args:
        alpha: 位移量
        dim: 截断维数

    Returns:
        QOperator: 稠密位移算符
    """
    a = annihilation(dim).matrix
    generator = alpha * a.conj().T - np.conj(alpha) * a
    return QOperator(expm(generator))


def coherent_state(alpha: complex, dim: int) -> np.ndarray:
    """
    按幂级数直接计算相干态振幅 e^{-|α|²/2} αⁿ/√n!

    Args:
        alpha: 相干态参数
        dim: 截断维数

    Returns:
        np.ndarray: 长度为 dim 的振幅（截断后未重新归一化）
    """
    _check_dim(dim)
    amplitudes = np.empty(dim, dtype=complex)
    amplitudes[0] = np.exp(-abs(alpha) ** 2 / 2.0)
    for n in range(1, dim):
        amplitudes[n] = amplitudes[n - 1] * alpha / math.sqrt(n)
    return amplitudes


def basis_vector(dim: int, index: int) -> np.ndarray:
    """计算基矢 |index⟩"""
    if not 0 <= index < dim:
        raise HilbertDimensionError(f"基矢序号越界: {index} 不在 [0, {dim})")
    vector = np.zeros(dim, dtype=complex)
    vector[index] = 1.0
    return vector


def rotated_qubit_state(sign: str, levels: int = 3) -> np.ndarray:
    """
    旋转基态 |±⟩ = (|e⟩ ± |g⟩)/√2

    Args:
        sign: '+' 或 '-'
        levels: 能级数

    Returns:
        np.ndarray: 单比特态矢量
    """
    plus, minus = _rotated_vectors(levels)
    if sign == '+':
        return plus
    if sign == '-':
        return minus
    raise ParameterError(f"旋转基符号只能是 '+' 或 '-': {sign}")


def product_state(factors: Sequence[np.ndarray]) -> np.ndarray:
    """按给定顺序计算各子系统态的张量积"""
    if not factors:
        raise HilbertDimensionError("张量积至少需要一个因子")
    return reduce(np.kron, [np.asarray(f, dtype=complex) for f in factors])


def vacuum(layout: HilbertLayout) -> np.ndarray:
    """所有腔处于真空态的腔部分态矢量"""
    return product_state([basis_vector(layout.cavity_dim, 0)] * layout.n_targets)


def state_vector(amplitudes: Sequence[complex], layout: HilbertLayout = None) -> np.ndarray:
    """
    构造并验证态矢量

    Args:
        amplitudes: 振幅
        layout: 空间布局，None 表示不检查维数

    Returns:
        np.ndarray: 复态矢量

    Raises:
        HilbertDimensionError: 维数不匹配
        ParameterError: 未归一化
    """
    psi = np.asarray(amplitudes, dtype=complex)
    if layout is not None and psi.shape != (layout.total_dim,):
        raise HilbertDimensionError(f"态矢量维数 {psi.shape} 与布局维数 {layout.total_dim} 不匹配")

    is_valid, error = validate_state_vector(psi)
    if not is_valid:
        raise ParameterError(error)
    return psi


def density_matrix(entries: np.ndarray, layout: HilbertLayout = None) -> np.ndarray:
    """
    构造并验证密度矩阵

    Args:
        entries: 矩阵元
        layout: 空间布局，None 表示不检查维数

    Returns:
        np.ndarray: 复密度矩阵

    Raises:
        HilbertDimensionError: 维数不匹配
        ParameterError: 迹、厄米性或正定性不满足
    """
    rho = np.asarray(entries, dtype=complex)
    if layout is not None and rho.shape != (layout.total_dim, layout.total_dim):
        raise HilbertDimensionError(f"密度矩阵形状 {rho.shape} 与布局维数 {layout.total_dim} 不匹配")

    is_valid, errors = validate_density_matrix(rho)
    if not is_valid:
        raise ParameterError('; '.join(errors))
    return rho


def ket_to_dm(psi: np.ndarray) -> np.ndarray:
    """|ψ⟩ → |ψ⟩⟨ψ|"""
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


def subsystem_populations(state: np.ndarray, layout: HilbertLayout, index: int) -> np.ndarray:
    """
    子系统能级布居（约化密度矩阵的对角元）

    Args:
        state: 态矢量或密度矩阵
        layout: 空间布局
        index: 子系统序号

    Returns:
        np.ndarray: 长度为该子系统维数的布居
    """
    state = np.asarray(state)
    if state.ndim == 1:
        populations = np.abs(state) ** 2
    else:
        populations = np.real(np.diagonal(state))

    dims = layout.subsystem_dims
    if populations.shape[0] != layout.total_dim:
        raise HilbertDimensionError(f"态维数 {populations.shape[0]} 与布局维数 {layout.total_dim} 不匹配")

    tensor = populations.reshape(dims)
    other_axes = tuple(axis for axis in range(len(dims)) if axis != index)
    return tensor.sum(axis=other_axes)
