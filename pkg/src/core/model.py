#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
模型哈密顿量模块

该模块负责构建多腔电路 QED 系统的各类哈密顿量与主方程右端项：
1. 理想相互作用哈密顿量（含共振驱动）；
2. 旋转表象哈密顿量与强驱动旋转波近似后的有效哈密顿量；
3. |e⟩↔|f⟩ 泄漏、腔间串扰与驱动泄漏组成的非期望项；
4. Lindblad 主方程右端项；
5. 工作条件校验。

所有频率、耦合、失谐以 rad/s 存储，耗散速率以 1/s 存储。
哈密顿量统一表示为“静态厄米部分 + Σ (c_k e^{iν_k t} O_k + h.c.)”，
按时间取值时先求和 X = Σ c_k e^{iν_k t} O_k 再构造 X + X†，保证严格厄米。
"""

import math
import logging
from dataclasses import dataclass, field, fields
from functools import lru_cache
from typing import TYPE_CHECKING, Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp

from .hilbert import HilbertLayout, QOperator, annihilation, embed, qutrit_operator
from ..utils.conversion import lifetime_us_to_rate
from ..utils.errors import ParameterError
from ..utils.validation import validate_rates

if TYPE_CHECKING:
    from .geometric import PhasePlan

# 配置日志
logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(name)s - %(levelname)s - %(message)s')
logger = logging.getLogger(__name__)

DEFAULT_OMEGA_EG = 2.0 * math.pi * 6.5e9
DEFAULT_ANHARMONICITY = 0.05
TRANSMON_RATIO = math.sqrt(2.0)
STRONG_DRIVING_MARGIN = 5.0
MATCH_TOL = 1e-9

HAMILTONIAN_CHOICES = ('ideal', 'rotated', 'effective', 'full')
# 驱动对 |e⟩↔|f⟩ 泄漏项的相位约定
DRIVE_LEAKAGE_CHOICES = ('detuned', 'literal', 'off')


def _as_tuple(values, cast=float) -> tuple:
    return tuple(cast(v) for v in values)


@dataclass(frozen=True)
class DeviceParams:
    """
    器件参数

    比特相关量按 (A, 1, …, n) 排列，腔相关量按 (1, …, n) 排列。
    失谐由频率导出：δ_j = ω_eg_j - ω_c_j，δ_Aj = ω_eg_A - ω_c_j，
    δ̃_j = ω_fe_j - ω_c_j，δ̃_Aj = ω_fe_A - ω_c_j。

    Attributes:
        n_targets: 目标比特数 n
        omega_eg: 各比特 |g⟩↔|e⟩ 跃迁角频率
        omega_fe: 各比特 |e⟩↔|f⟩ 跃迁角频率
        omega_c: 各腔角频率
        omega_drive: 驱动角频率 ω（按共振处理）
        g: 腔内比特 j 与腔 j 的耦合 g_j
        g_A: 比特 A 与腔 j 的耦合 g_Aj
        gt: |e⟩↔|f⟩ 跃迁与腔 j 的耦合 g̃_j
        gt_A: 比特 A 的 |e⟩↔|f⟩ 跃迁与腔 j 的耦合 g̃_Aj
        Omega: 驱动拉比频率 Ω
        Omegat: 驱动对 |e⟩↔|f⟩ 跃迁的拉比频率 Ω̃
        g12: 相邻腔之间的串扰耦合
        m: 每个腔的相空间回路圈数 m_j
        k: 驱动整数 k（ΩT = kπ）
        drive_leakage: 驱动泄漏项 Ω̃ 的相位约定，见 DRIVE_LEAKAGE_CHOICES
    """

    n_targets: int
    omega_eg: Tuple[float, ...]
    omega_fe: Tuple[float, ...]
    omega_c: Tuple[float, ...]
    omega_drive: float
    g: Tuple[float, ...]
    g_A: Tuple[float, ...]
    gt: Tuple[float, ...]
    gt_A: Tuple[float, ...]
    Omega: float
    Omegat: float
    g12: float = 0.0
    m: Tuple[int, ...] = ()
    k: int = 0
    drive_leakage: str = 'detuned'

    def __post_init__(self):
        for name in ('omega_eg', 'omega_fe', 'omega_c', 'g', 'g_A', 'gt', 'gt_A'):
            object.__setattr__(self, name, _as_tuple(getattr(self, name)))
        object.__setattr__(self, 'm', _as_tuple(self.m, int))

        n = self.n_targets
        if n < 1:
            raise ParameterError(f"目标比特数必须不小于 1: {n}")
        expected = {'omega_eg': n + 1, 'omega_fe': n + 1, 'omega_c': n,
                    'g': n, 'g_A': n, 'gt': n, 'gt_A': n}
        for name, length in expected.items():
            if len(getattr(self, name)) != length:
                raise ParameterError(f"参数 {name} 长度应为 {length}，实际为 {len(getattr(self, name))}")
        if self.m and len(self.m) != n:
            raise ParameterError(f"参数 m 长度应为 {n}，实际为 {len(self.m)}")
        if self.drive_leakage not in DRIVE_LEAKAGE_CHOICES:
            raise ParameterError(f"未知的驱动泄漏约定: {self.drive_leakage}，可选: {', '.join(DRIVE_LEAKAGE_CHOICES)}")

    @property
    def delta(self) -> Tuple[float, ...]:
        return tuple(self.omega_eg[j] - self.omega_c[j - 1] for j in range(1, self.n_targets + 1))

    @property
    def delta_A(self) -> Tuple[float, ...]:
        return tuple(self.omega_eg[0] - wc for wc in self.omega_c)

    @property
    def deltat(self) -> Tuple[float, ...]:
        return tuple(self.omega_fe[j] - self.omega_c[j - 1] for j in range(1, self.n_targets + 1))

    @property
    def deltat_A(self) -> Tuple[float, ...]:
        return tuple(self.omega_fe[0] - wc for wc in self.omega_c)

    @property
    def crosstalk_detunings(self) -> Tuple[float, ...]:
        """相邻腔 j, j+1 的失谐 ω_c,j+1 - ω_c,j"""
        return tuple(self.omega_c[j + 1] - self.omega_c[j] for j in range(self.n_targets - 1))

    @property
    def Delta(self) -> float:
        """腔 1、2 之间的失谐 Δ = ω_c2 - ω_c1 = δ₁ - δ₂（单腔时为 0）"""
        detunings = self.crosstalk_detunings
        return detunings[0] if detunings else 0.0

    @property
    def anharmonicity(self) -> Tuple[float, ...]:
        """各比特 ω_eg - ω_fe"""
        return tuple(eg - fe for eg, fe in zip(self.omega_eg, self.omega_fe))

    def cycle_time(self) -> float:
        """以腔 1 计算的闭合回路时间 T = 2m₁π/|δ₁|"""
        m1 = self.m[0] if self.m else 1
        delta1 = self.delta[0]
        if delta1 == 0:
            raise ParameterError("失谐 δ₁ 为零，回路不闭合")
        return 2.0 * m1 * math.pi / abs(delta1)


def device_from_detunings(delta: Sequence[float], g: Sequence[float], Omega: float,
                          m: Sequence[int] = (), k: int = 0,
                          omega_eg: float = DEFAULT_OMEGA_EG,
                          anharmonicity: float = DEFAULT_ANHARMONICITY,
                          g12_ratio: float = 0.0,
                          gt_ratio: float = TRANSMON_RATIO,
                          Omegat_ratio: float = TRANSMON_RATIO,
                          g_A: Sequence[float] = None,
                          omega_eg_A: float = None,
                          drive_leakage: str = 'detuned') -> DeviceParams:
    """
    由失谐与耦合构造器件参数

    全部比特相同（ω_eg_A = ω_eg_j = ω），腔频 ω_c_j = ω_eg - δ_j，
    g̃ = gt_ratio·g，Ω̃ = Omegat_ratio·Ω，ω_fe = (1 - anharmonicity)·ω_eg，
    g₁₂ = g12_ratio·g₁。

    Args:
        delta: 失谐 δ_j（rad/s）
        g: 耦合 g_j（rad/s）
        Omega: 拉比频率 Ω（rad/s）
        m: 回路圈数
        k: 驱动整数
        omega_eg: 比特跃迁角频率
        anharmonicity: 非谐性比例
        g12_ratio: 串扰与 g₁ 之比
        gt_ratio: g̃/g
        Omegat_ratio: Ω̃/Ω
        g_A: 比特 A 的耦合，None 表示与 g 相同
        omega_eg_A: 比特 A 的跃迁频率，None 表示与 omega_eg 相同
        drive_leakage: 驱动泄漏项的相位约定

    Returns:
        DeviceParams: 器件参数
    """
    n = len(delta)
    if len(g) != n:
        raise ParameterError(f"耦合个数 {len(g)} 与失谐个数 {n} 不一致")

    g = _as_tuple(g)
    g_A = g if g_A is None else _as_tuple(g_A)
    if omega_eg_A is None:
        omega_eg_A = omega_eg

    omega_eg_all = (omega_eg_A,) + (omega_eg,) * n
    omega_fe_all = tuple((1.0 - anharmonicity) * w for w in omega_eg_all)
    omega_c = tuple(omega_eg - d for d in delta)

    return DeviceParams(
        n_targets=n,
        omega_eg=omega_eg_all,
        omega_fe=omega_fe_all,
        omega_c=omega_c,
        omega_drive=omega_eg,
        g=g,
        g_A=g_A,
        gt=tuple(gt_ratio * x for x in g),
        gt_A=tuple(gt_ratio * x for x in g_A),
        Omega=Omega,
        Omegat=Omegat_ratio * Omega,
        g12=g12_ratio * g[0],
        m=tuple(m),
        k=k,
        drive_leakage=drive_leakage,
    )


def device_from_plan(plan: 'PhasePlan', **kwargs) -> DeviceParams:
    """
    由相位方案构造器件参数

    Args:
        plan: solve_plan 的结果
        **kwargs: 传给 device_from_detunings 的器件选项

    Returns:
        DeviceParams: 器件参数
    """
    return device_from_detunings(plan.delta, plan.g, plan.Omega, m=plan.m, k=plan.k, **kwargs)


@dataclass(frozen=True)
class NoiseParams:
    """
    耗散与退相位速率（1/s）

    腔相关量按 (1, …, n) 排列，比特相关量按 (A, 1, …, n) 排列。

    Attributes:
        kappa: 腔光子衰减 κ_j
        Gamma: |e⟩→|g⟩ 弛豫 Γ_l
        Gamma_fe: |f⟩→|e⟩ 弛豫 Γ_fe_l
        Gamma_fg: |f⟩→|g⟩ 弛豫 Γ_fg_l
        Gamma_phi_e: |e⟩ 退相位 Γ_l,φe
        Gamma_phi_f: |f⟩ 退相位 Γ_l,φf
    """

    kappa: Tuple[float, ...]
    Gamma: Tuple[float, ...]
    Gamma_fe: Tuple[float, ...]
    Gamma_fg: Tuple[float, ...]
    Gamma_phi_e: Tuple[float, ...]
    Gamma_phi_f: Tuple[float, ...]

    def __post_init__(self):
        rates = {}
        for item in fields(self):
            values = _as_tuple(getattr(self, item.name))
            object.__setattr__(self, item.name, values)
            rates[item.name] = values

        is_valid, errors = validate_rates(rates)
        if not is_valid:
            raise ParameterError('; '.join(errors))

        n = len(self.kappa)
        for name in ('Gamma', 'Gamma_fe', 'Gamma_fg', 'Gamma_phi_e', 'Gamma_phi_f'):
            if len(getattr(self, name)) != n + 1:
                raise ParameterError(f"速率 {name} 长度应为 {n + 1}，实际为 {len(getattr(self, name))}")

    @property
    def n_targets(self) -> int:
        return len(self.kappa)

    @property
    def is_zero(self) -> bool:
        return all(v == 0 for item in fields(self) for v in getattr(self, item.name))

    @classmethod
    def zero(cls, n_targets: int) -> 'NoiseParams':
        """无耗散"""
        qutrit = (0.0,) * (n_targets + 1)
        return cls((0.0,) * n_targets, qutrit, qutrit, qutrit, qutrit, qutrit)

    @classmethod
    def from_rates(cls, n_targets: int, kappa: float, Gamma: float, Gamma_fe: float,
                   Gamma_fg: float, Gamma_phi_e: float, Gamma_phi_f: float) -> 'NoiseParams':
        """所有腔、所有比特取相同速率"""
        def qutrit(rate):
            return (rate,) * (n_targets + 1)
        return cls((kappa,) * n_targets, qutrit(Gamma), qutrit(Gamma_fe), qutrit(Gamma_fg),
                   qutrit(Gamma_phi_e), qutrit(Gamma_phi_f))

    @classmethod
    def from_lifetimes_us(cls, n_targets: int, cavity: Optional[float] = None,
                          relax_e: Optional[float] = None, relax_fe: Optional[float] = None,
                          relax_fg: Optional[float] = None, dephase_e: Optional[float] = None,
                          dephase_f: Optional[float] = None) -> 'NoiseParams':
        """
        由寿命（µs）构造，None 表示该通道不存在

        Args:
            n_targets: 目标比特数
            cavity: κ⁻¹
            relax_e: Γ⁻¹
            relax_fe: Γ_fe⁻¹
            relax_fg: Γ_fg⁻¹
            dephase_e: Γ_φe⁻¹
            dephase_f: Γ_φf⁻¹

        Returns:
            NoiseParams: 耗散参数
        """
        try:
            rates = [lifetime_us_to_rate(v) for v in (cavity, relax_e, relax_fe, relax_fg, dephase_e, dephase_f)]
        except ValueError as e:
            raise ParameterError(str(e)) from e
        return cls.from_rates(n_targets, *rates)


def quality_factor(p: DeviceParams, noise: NoiseParams, j: int) -> float:
    """
    腔 j 的品质因子 Q_j = ω_c_j / κ_j

    Args:
        p: 器件参数
        noise: 耗散参数
        j: 腔编号 1..n

    Returns:
        float: 品质因子，κ_j = 0 时为无穷大
    """
    kappa = noise.kappa[j - 1]
    if kappa == 0:
        return math.inf
    return p.omega_c[j - 1] / kappa


class ModelOperators:
    """
    某一布局下全部嵌入算符的缓存

    腔编号 j 取 1..n，比特编号 l 取 0（A）或 1..n。
    """

    def __init__(self, layout: HilbertLayout):
        self.layout = layout
        self._cache: Dict[Tuple[str, int], sp.csr_matrix] = {}

    def a(self, j: int) -> sp.csr_matrix:
        key = ('a', j)
        if key not in self._cache:
            op = annihilation(self.layout.cavity_dim)
            self._cache[key] = embed(op, self.layout.cavity_index(j), self.layout).matrix
        return self._cache[key]

    def a_dag(self, j: int) -> sp.csr_matrix:
        key = ('a_dag', j)
        if key not in self._cache:
            self._cache[key] = self.a(j).conj().T.tocsr()
        return self._cache[key]

    def qutrit(self, kind: str, l: int) -> sp.csr_matrix:
        key = (kind, l)
        if key not in self._cache:
            op = qutrit_operator(kind, self.layout.qutrit_levels)
            self._cache[key] = embed(op, self.layout.qutrit_index(l), self.layout).matrix
        return self._cache[key]

    def zeros(self) -> sp.csr_matrix:
        d = self.layout.total_dim
        return sp.csr_matrix((d, d), dtype=complex)


@lru_cache(maxsize=16)
def model_operators(layout: HilbertLayout) -> ModelOperators:
    """按布局缓存的算符集合"""
    return ModelOperators(layout)


@dataclass(eq=False)
class HamiltonianTerm:
    """
    含时项 amplitude·e^{i·frequency·t}·operator（另加其厄米共轭）
    """

    amplitude: complex
    frequency: float
    operator: sp.csr_matrix
    label: str = ''


class TimeDependentHamiltonian:
    """
    含时哈密顿量 H(t) = S + Σ_k (c_k(t) O_k + c_k(t)* O_k†)

    Attributes:
        layout: 空间布局
        static: 静态厄米部分
        terms: 含时项列表
    """

    def __init__(self, layout: HilbertLayout, static: Optional[sp.spmatrix] = None,
                 terms: Sequence[HamiltonianTerm] = ()):
        self.layout = layout
        d = layout.total_dim
        self.static = sp.csr_matrix((d, d), dtype=complex) if static is None else sp.csr_matrix(static, dtype=complex)
        self.terms: List[HamiltonianTerm] = [t for t in terms if t.amplitude != 0]
        self._daggers = [t.operator.conj().T.tocsr() for t in self.terms]
        self._amplitudes = np.array([t.amplitude for t in self.terms], dtype=complex)
        self._frequencies = np.array([t.frequency for t in self.terms], dtype=float)

    @property
    def dim(self) -> int:
        return self.layout.total_dim

    def coefficients(self, t: float) -> np.ndarray:
        return self._amplitudes * np.exp(1j * self._frequencies * t)

    def matrix(self, t: float) -> sp.csr_matrix:
        """t 时刻的稀疏矩阵"""
        x = sp.csr_matrix((self.dim, self.dim), dtype=complex)
        for c, term in zip(self.coefficients(t), self.terms):
            x = x + c * term.operator
        return ((x + x.conj().T) + self.static).tocsr()

    def qoperator(self, t: float) -> QOperator:
        return QOperator(self.matrix(t), self.layout.subsystem_dims, hermitian_hint=True)

    def apply(self, t: float, psi: np.ndarray) -> np.ndarray:
        """计算 H(t)ψ，ψ 可以是向量或按列排列的多个向量"""
        result = self.static @ psi
        for c, term, dagger in zip(self.coefficients(t), self.terms, self._daggers):
            result = result + c * (term.operator @ psi) + np.conj(c) * (dagger @ psi)
        return result

    def __add__(self, other: 'TimeDependentHamiltonian') -> 'TimeDependentHamiltonian':
        if self.layout != other.layout:
            raise ParameterError("不同布局的哈密顿量不能相加")
        return TimeDependentHamiltonian(self.layout, self.static + other.static, self.terms + other.terms)

    def max_frequency(self) -> float:
        """含时项中最大的 |ν_k|"""
        return float(np.max(np.abs(self._frequencies))) if self.terms else 0.0


def _check_layout(p: DeviceParams, layout: HilbertLayout):
    if p.n_targets != layout.n_targets:
        raise ParameterError(f"参数目标数 {p.n_targets} 与布局目标数 {layout.n_targets} 不匹配")


@lru_cache(maxsize=64)
def _warn_effective_conditions(p: DeviceParams) -> bool:
    report = validate_conditions(p)
    ok = all(check.passed for check in report.checks if check.name in ('coupling_match', 'detuning_match'))
    if not ok:
        logger.warning("有效哈密顿量的前提 g_Aj = g_j、δ_Aj = δ_j 不成立，结果仅供参考")
    return ok


def _ideal(p: DeviceParams, layout: HilbertLayout) -> TimeDependentHamiltonian:
    ops = model_operators(layout)
    static = ops.zeros()
    for l in range(layout.n_qutrits):
        static = static + p.Omega * (ops.qutrit('sigma_plus', l) + ops.qutrit('sigma_minus', l))

    terms = []
    for j in range(1, p.n_targets + 1):
        terms.append(HamiltonianTerm(p.g[j - 1], -p.delta[j - 1],
                                     ops.a_dag(j) @ ops.qutrit('sigma_minus', j), f'g{j}'))
        terms.append(HamiltonianTerm(p.g_A[j - 1], -p.delta_A[j - 1],
                                     ops.a_dag(j) @ ops.qutrit('sigma_minus', 0), f'gA{j}'))
    return TimeDependentHamiltonian(layout, static, terms)


def _rotated(p: DeviceParams, layout: HilbertLayout) -> TimeDependentHamiltonian:
    ops = model_operators(layout)
    terms = []
    for j in range(1, p.n_targets + 1):
        couplings = ((j, p.g[j - 1], p.delta[j - 1]), (0, p.g_A[j - 1], p.delta_A[j - 1]))
        for l, coupling, detuning in couplings:
            a_dag = ops.a_dag(j)
            half = 0.5 * coupling
            terms.append(HamiltonianTerm(half, -detuning, a_dag @ ops.qutrit('sigma_z_rot', l), f'z{l}c{j}'))
            terms.append(HamiltonianTerm(half, -detuning + 2.0 * p.Omega,
                                         a_dag @ ops.qutrit('sigma_plus_rot', l), f'p{l}c{j}'))
            terms.append(HamiltonianTerm(-half, -detuning - 2.0 * p.Omega,
                                         a_dag @ ops.qutrit('sigma_minus_rot', l), f'm{l}c{j}'))
    return TimeDependentHamiltonian(layout, None, terms)


def effective_hamiltonian(p: DeviceParams, layout: HilbertLayout, only: Optional[int] = None) -> TimeDependentHamiltonian:
    """有效哈密顿量的含时表示，only 给出时只含第 only 个子系统项"""
    ops = model_operators(layout)
    terms = []
    targets = range(1, p.n_targets + 1) if only is None else (only,)
    for j in targets:
        collective = ops.qutrit('sigma_z_rot', j) + ops.qutrit('sigma_z_rot', 0)
        terms.append(HamiltonianTerm(0.5 * p.g[j - 1], -p.delta[j - 1], ops.a_dag(j) @ collective, f'eff{j}'))
    return TimeDependentHamiltonian(layout, None, terms)


def drive_leakage_frequency(p: DeviceParams, l: int) -> float:
    """
    驱动泄漏项 Ω̃ σ_fe⁺ 的相位频率

    'literal' 取 ω_fe - ω，与 g̃ 项 e^{iδ̃t} a σ_fe⁺ 组合后出现
    e^{i(ω_c - ω)t} 的双光子通道，在 ω_c ≈ ω 时近共振，等效为对腔的直接驱动；
    'detuned'（默认）取 -(ω_fe - ω)，该通道失谐约 2|ω_fe - ω|，只留下 Stark 频移。
    """
    detuning = p.omega_fe[l] - p.omega_drive
    return detuning if p.drive_leakage == 'literal' else -detuning


def _theta(p: DeviceParams, layout: HilbertLayout) -> TimeDependentHamiltonian:
    if not layout.three_level:
        raise ParameterError("非期望项 Θ_I 需要包含 |f⟩ 的三能级布局")

    ops = model_operators(layout)
    terms = []
    for j in range(1, p.n_targets + 1):
        terms.append(HamiltonianTerm(p.gt[j - 1], p.deltat[j - 1],
                                     ops.a(j) @ ops.qutrit('sigma_fe_plus', j), f'gt{j}'))
        terms.append(HamiltonianTerm(p.gt_A[j - 1], p.deltat_A[j - 1],
                                     ops.a(j) @ ops.qutrit('sigma_fe_plus', 0), f'gtA{j}'))

    # 相邻腔串扰 g₁₂(e^{iΔt} a_j a_{j+1}† + h.c.)
    for j, detuning in enumerate(p.crosstalk_detunings, start=1):
        terms.append(HamiltonianTerm(p.g12, detuning, ops.a(j) @ ops.a_dag(j + 1), f'x{j}{j + 1}'))

    if p.drive_leakage != 'off':
        for l in range(layout.n_qutrits):
            terms.append(HamiltonianTerm(p.Omegat, drive_leakage_frequency(p, l),
                                         ops.qutrit('sigma_fe_plus', l), f'drive_fe{l}'))
    return TimeDependentHamiltonian(layout, None, terms)


@lru_cache(maxsize=32)
def hamiltonian(choice: str, p: DeviceParams, layout: HilbertLayout) -> TimeDependentHamiltonian:
    """
    按名称取含时哈密顿量

    Args:
        choice: 'ideal'、'rotated'、'effective' 或 'full'
        p: 器件参数
        layout: 空间布局

    Returns:
        TimeDependentHamiltonian: 含时哈密顿量

    Raises:
        ParameterError: 未知名称、布局与参数不匹配，或两能级布局请求 'full'
    """
    _check_layout(p, layout)
    if choice == 'ideal':
        return _ideal(p, layout)
    if choice == 'rotated':
        return _rotated(p, layout)
    if choice == 'effective':
        _warn_effective_conditions(p)
        return effective_hamiltonian(p, layout)
    if choice == 'full':
        return _ideal(p, layout) + _theta(p, layout)
    raise ParameterError(f"未知的哈密顿量类型: {choice}，可选: {', '.join(HAMILTONIAN_CHOICES)}")


def build_H_ideal(t: float, p: DeviceParams, layout: HilbertLayout) -> QOperator:
    """理想相互作用哈密顿量（含共振驱动 Ω(σ⁺+σ⁻)）在 t 时刻的值"""
    return hamiltonian('ideal', p, layout).qoperator(t)


def build_H_rotated(t: float, p: DeviceParams, layout: HilbertLayout) -> QOperator:
    """以 Ωσ̃_z 为自由部分的旋转表象哈密顿量在 t 时刻的值"""
    return hamiltonian('rotated', p, layout).qoperator(t)


def build_H_eff(t: float, p: DeviceParams, layout: HilbertLayout, j: Optional[int] = None) -> QOperator:
    """
    旋转波近似后的有效哈密顿量

    H_eff = Σ_j (g_j/2)(e^{-iδ_j t}a_j† + h.c.)(σ̃_zj + σ̃_zA)。
    g_Aj ≠ g_j 或 δ_Aj ≠ δ_j 时只记录警告。

    Args:
        t: 时间（s）
        p: 器件参数
        layout: 空间布局
        j: 只取第 j 个子系统项 H_eff,j，None 表示求和

    Returns:
        QOperator: 厄米算符
    """
    _check_layout(p, layout)
    _warn_effective_conditions(p)
    if j is None:
        return hamiltonian('effective', p, layout).qoperator(t)
    if not 1 <= j <= p.n_targets:
        raise ParameterError(f"子系统编号越界: {j}")
    return effective_hamiltonian(p, layout, only=j).qoperator(t)


def build_Theta(t: float, p: DeviceParams, layout: HilbertLayout) -> QOperator:
    """泄漏、串扰与驱动泄漏组成的非期望项 Θ_I 在 t 时刻的值（需要三能级布局）"""
    _check_layout(p, layout)
    return _theta(p, layout).qoperator(t)


def build_h_full(t: float, p: DeviceParams, layout: HilbertLayout) -> QOperator:
    """完整哈密顿量 h_I = H_I + Θ_I"""
    return hamiltonian('full', p, layout).qoperator(t)


class Dissipator:
    """
    Lindblad 耗散部分

    跳跃算符均为阶梯算符，c†c 是对角的；退相位算符是对角投影。
    因此反对易子部分与退相位部分都以逐元素乘法计算。
    """

    def __init__(self, noise: NoiseParams, layout: HilbertLayout):
        if noise.n_targets != layout.n_targets:
            raise ParameterError(f"耗散参数目标数 {noise.n_targets} 与布局目标数 {layout.n_targets} 不匹配")

        ops = model_operators(layout)
        self.jumps: List[Tuple[float, sp.csr_matrix]] = []
        self.dephasing: List[Tuple[float, np.ndarray]] = []

        for j in range(1, layout.n_targets + 1):
            self.jumps.append((noise.kappa[j - 1], ops.a(j)))

        for l in range(layout.n_qutrits):
            self.jumps.append((noise.Gamma[l], ops.qutrit('sigma_minus', l)))
            self.dephasing.append((noise.Gamma_phi_e[l], ops.qutrit('sigma_ee', l).diagonal().real))
            if layout.three_level:
                self.jumps.append((noise.Gamma_fe[l], ops.qutrit('sigma_fe_minus', l)))
                self.jumps.append((noise.Gamma_fg[l], ops.qutrit('sigma_fg_minus', l)))
                self.dephasing.append((noise.Gamma_phi_f[l], ops.qutrit('sigma_ff', l).diagonal().real))
            elif noise.Gamma_fe[l] or noise.Gamma_fg[l] or noise.Gamma_phi_f[l]:
                logger.debug(f"两能级模式忽略比特 {l} 的 |f⟩ 耗散通道")

        self.jumps = [(rate, op) for rate, op in self.jumps if rate > 0]
        self.dephasing = [(rate, proj) for rate, proj in self.dephasing if rate > 0]

        # K = Σ γ c†c / 2 的对角元
        decay = np.zeros(layout.total_dim)
        for rate, op in self.jumps:
            decay += 0.5 * rate * (op.conj().T @ op).diagonal().real
        for rate, proj in self.dephasing:
            decay += 0.5 * rate * proj
        self.decay = decay
        self._decay_sum = decay[:, None] + decay[None, :]

    @property
    def is_trivial(self) -> bool:
        return not self.jumps and not self.dephasing

    def apply(self, rho: np.ndarray) -> np.ndarray:
        """耗散部分 D[ρ]（ρ 须为厄米矩阵）"""
        result = -self._decay_sum * rho
        for rate, op in self.jumps:
            # c ρ c† = c (c ρ)†
            result += rate * (op @ (op @ rho).conj().T)
        for rate, proj in self.dephasing:
            result += rate * (proj[:, None] * rho * proj[None, :])
        return result


@lru_cache(maxsize=16)
def dissipator(noise: NoiseParams, layout: HilbertLayout) -> Dissipator:
    """按 (耗散参数, 布局) 缓存的耗散部分"""
    return Dissipator(noise, layout)


def liouvillian_rhs(rho: np.ndarray, t: float, h: TimeDependentHamiltonian,
                    diss: Optional[Dissipator] = None) -> np.ndarray:
    """
    主方程右端项 -i[H(t), ρ] + D[ρ]

    ρ 为厄米矩阵时 ρH = (Hρ)†，对易子只需一次稀疏乘法。

    Args:
        rho: 厄米密度矩阵
        t: 时间
        h: 含时哈密顿量
        diss: 耗散部分，None 表示无耗散

    Returns:
        np.ndarray: dρ/dt
    """
    x = h.matrix(t) @ rho
    drho = -1j * (x - x.conj().T)
    if diss is not None and not diss.is_trivial:
        drho += diss.apply(rho)
    return drho


def lindblad_rhs(rho: np.ndarray, t: float, p: DeviceParams, noise: NoiseParams,
                 layout: HilbertLayout, hamiltonian_choice: str = 'full') -> np.ndarray:
    """
    Lindblad 主方程右端项

    跳跃算符 a_j、σ_l⁻、σ_fe_l⁻、σ_fg_l⁻ 对应速率 κ_j、Γ_l、Γ_fe_l、Γ_fg_l；
    退相位项取 σρσ - σρ/2 - ρσ/2 形式，σ 为 σ_ee_l、σ_ff_l。

    Args:
        rho: 厄米密度矩阵
        t: 时间（s）
        p: 器件参数
        noise: 耗散参数
        layout: 空间布局
        hamiltonian_choice: 哈密顿量类型，默认完整哈密顿量

    Returns:
        np.ndarray: dρ/dt，迹为零
    """
    h = hamiltonian(hamiltonian_choice, p, layout)
    return liouvillian_rhs(np.asarray(rho, dtype=complex), t, h, dissipator(noise, layout))


@dataclass
class ConditionCheck:
    """单项条件检查结果"""

    name: str
    passed: bool
    value: float
    threshold: float
    message: str = ''


@dataclass
class ConditionReport:
    """工作条件检查报告"""

    checks: List[ConditionCheck] = field(default_factory=list)

    @property
    def all_passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def failures(self) -> List[ConditionCheck]:
        return [check for check in self.checks if not check.passed]

    def get(self, name: str) -> ConditionCheck:
        for check in self.checks:
            if check.name == name:
                return check
        raise KeyError(name)

    @property
    def drive_margin(self) -> float:
        return self.get('strong_driving').value

    def as_lines(self) -> List[str]:
        lines = []
        for check in self.checks:
            status = '通过' if check.passed else '未通过'
            lines.append(f"[{status}] {check.name}: {check.value:.6g} (阈值 {check.threshold:.3g}) {check.message}")
        return lines


def _relative_spread(values: Sequence[float], reference: Sequence[float]) -> float:
    spread = 0.0
    for value, ref in zip(values, reference):
        scale = abs(ref) if ref != 0 else 1.0
        spread = max(spread, abs(value - ref) / scale)
    return spread


def validate_conditions(p: DeviceParams) -> ConditionReport:
    """
    校验相位门的工作条件

    包括 g_Aj = g_j、δ_Aj = δ_j、m_j/δ_j 相同、强驱动 2Ω ≫ {g, |δ|}、
    2Ω = k|δ_j|/m_j、ΩT = kπ 以及失谐为负。只报告，不抛异常。

    Args:
        p: 器件参数

    Returns:
        ConditionReport: 检查报告
    """
    checks = []
    delta, delta_A = p.delta, p.delta_A

    coupling = _relative_spread(p.g_A, p.g)
    checks.append(ConditionCheck('coupling_match', coupling < MATCH_TOL, coupling, MATCH_TOL,
                                 'max|g_Aj/g_j - 1|'))

    detuning = _relative_spread(delta_A, delta)
    checks.append(ConditionCheck('detuning_match', detuning < MATCH_TOL, detuning, MATCH_TOL,
                                 'max|δ_Aj/δ_j - 1|'))

    m = p.m if p.m else (1,) * p.n_targets
    if all(d != 0 for d in delta):
        ratios = [mj / dj for mj, dj in zip(m, delta)]
        cycle = _relative_spread(ratios, [ratios[0]] * len(ratios))
    else:
        cycle = math.inf
    checks.append(ConditionCheck('common_cycle', cycle < MATCH_TOL, cycle, MATCH_TOL,
                                 'm_j/δ_j 的相对离散度'))

    scale = max([abs(x) for x in p.g + p.g_A + delta + delta_A] + [0.0])
    margin = 2.0 * p.Omega / scale if scale > 0 else math.inf
    checks.append(ConditionCheck('strong_driving', margin >= STRONG_DRIVING_MARGIN, margin,
                                 STRONG_DRIVING_MARGIN, '2Ω/max(g_j, |δ_j|, g_Aj, |δ_Aj|)'))

    if p.k > 0 and p.Omega > 0 and all(d != 0 for d in delta):
        mismatch = max(abs(2.0 * p.Omega - p.k * abs(dj) / mj) for mj, dj in zip(m, delta)) / (2.0 * p.Omega)
        cycles = p.Omega * p.cycle_time() / math.pi
        closed = abs(cycles - p.k)
    else:
        mismatch, cycles, closed = math.inf, math.nan, math.inf
    checks.append(ConditionCheck('drive_matching', mismatch < 1e-6, mismatch, 1e-6,
                                 '|2Ω - k|δ_j|/m_j| / 2Ω'))
    checks.append(ConditionCheck('closed_drive_cycle', closed < 1e-6, closed, 1e-6,
                                 f'ΩT/π = {cycles:.9g}, k = {p.k}'))

    negative = max(delta) if delta else 0.0
    checks.append(ConditionCheck('negative_detuning', negative < 0, negative, 0.0, 'max δ_j (rad/s)'))

    return ConditionReport(checks)
