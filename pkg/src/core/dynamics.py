#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
数值演化模块

该模块提供：
1. 定步长四阶 Runge-Kutta 薛定谔方程演化；
2. 直接在密度矩阵上积分的 Lindblad 主方程演化及诊断量；
3. 保真度计算与旋转表象的还原变换；
4. 有效哈密顿量与旋转表象哈密顿量的对比检查、模拟传播子与扇区相位检查。

每次演化都是单线程、确定性的，相同步长与截断下结果逐位可复现。
"""

import math
import logging
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple, Union

import numpy as np
import scipy.sparse as sp
from scipy.linalg import expm

from .gates import register_bits, register_state_in_layout, excited_initial_state
from .geometric import total_phase
from .hilbert import HilbertLayout, QOperator, qutrit_operator, subsystem_populations
from .model import (DeviceParams, NoiseParams, TimeDependentHamiltonian, dissipator,
                    effective_hamiltonian, hamiltonian, liouvillian_rhs)
from ..utils.errors import HilbertDimensionError, IntegrationError, ParameterError
from ..utils.validation import validate_density_matrix, validate_state_vector

# 配置日志
logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(name)s - %(levelname)s - %(message)s')
logger = logging.getLogger(__name__)

POLICIES = ('fixed_rk4',)

NORM_WARN_TOL = 1e-7
NORM_FAIL_TOL = 1e-5
TRACE_WARN_TOL = 1e-6
POSITIVITY_FLOOR = -1e-4
FIDELITY_NEGATIVE_TOL = 1e-8
SAMPLES_PER_PERIOD = 40
MIN_STEPS_PER_CYCLE = 2000
VACUUM_TOL = 1e-4
SECTOR_PHASE_TOL = 1e-3

HamiltonianLike = Union[TimeDependentHamiltonian, Callable[[float], object]]


@dataclass(frozen=True)
class TimeGrid:
    """
    等步长时间网格

    实际步长 dt 由 step 向下调整，使 n_steps 步恰好到达 t1。

    Attributes:
        t0: 起始时间（s）
        t1: 终止时间（s）
        step: 名义步长（s）
        policy: 积分策略，目前只有 'fixed_rk4'
    """

    t0: float
    t1: float
    step: float
    policy: str = 'fixed_rk4'

    def __post_init__(self):
        if self.policy not in POLICIES:
            raise ParameterError(f"未知的积分策略: {self.policy}")
        if not self.step > 0:
            raise ParameterError(f"步长必须为正: {self.step}")
        if not self.t1 > self.t0:
            raise ParameterError(f"终止时间必须大于起始时间: [{self.t0}, {self.t1}]")
        if self.step > (self.t1 - self.t0) * (1.0 + 1e-12):
            raise ParameterError(f"步长 {self.step} 大于时间区间 {self.t1 - self.t0}")

    @property
    def n_steps(self) -> int:
        return max(1, int(math.ceil((self.t1 - self.t0) / self.step - 1e-9)))

    @property
    def dt(self) -> float:
        return (self.t1 - self.t0) / self.n_steps

    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.n_steps + 1)

    def halved(self) -> 'TimeGrid':
        return TimeGrid(self.t0, self.t1, self.step / 2.0, self.policy)


@dataclass
class SimResult:
    """
    Lindblad 演化结果

    Attributes:
        final_state: 末态密度矩阵
        fidelity: 与理想态的保真度，未给出理想态时为 None
        trace_drift: 演化过程中 |tr ρ - tr ρ₀| 的最大值
        hermiticity_drift: 对称化之前 max|ρ - ρ†| 的最大值
        min_eigenvalue: 末态最小本征值
        cutoff_occupancy: 演化过程中各腔最高光子数能级布居的最大值
        positivity_ok: 最小本征值不低于 -1e-4
        n_steps: 积分步数
        warnings: 诊断警告
    """

    final_state: np.ndarray
    fidelity: Optional[float] = None
    trace_drift: float = 0.0
    hermiticity_drift: float = 0.0
    min_eigenvalue: float = 0.0
    cutoff_occupancy: float = 0.0
    positivity_ok: bool = True
    n_steps: int = 0
    warnings: List[str] = field(default_factory=list)


def default_step(p: DeviceParams, T: float, levels: int = 3) -> float:
    """
    默认步长 min(2π/(40ω_fast), T/2000)

    ω_fast 取 2Ω 与 |δ_j|、|δ_Aj| 的最大值；三能级时再计入 |δ̃_j|、|δ̃_Aj|、
    相邻腔失谐与非谐性。

    Args:
        p: 器件参数
        T: 演化时长
        levels: 比特能级数

    Returns:
        float: 步长（s）
    """
    rates = [2.0 * p.Omega] + [abs(d) for d in p.delta + p.delta_A]
    if levels >= 3:
        rates += [abs(d) for d in p.deltat + p.deltat_A + p.crosstalk_detunings]
        rates += [abs(a) for a in p.anharmonicity]
    omega_fast = max(rates)
    step = T / MIN_STEPS_PER_CYCLE
    if omega_fast > 0:
        step = min(step, 2.0 * math.pi / (SAMPLES_PER_PERIOD * omega_fast))
    return step


def _action(H: HamiltonianLike) -> Callable[[float, np.ndarray], np.ndarray]:
    if hasattr(H, 'apply'):
        return H.apply

    def apply(t, psi):
        value = H(t)
        if isinstance(value, QOperator):
            value = value.matrix
        return value @ psi
    return apply


def _norms(psi: np.ndarray) -> np.ndarray:
    return np.linalg.norm(psi, axis=0)


def propagate_unitary(H: HamiltonianLike, psi0: np.ndarray, grid: TimeGrid) -> np.ndarray:
    """
    四阶 Runge-Kutta 积分 dψ/dt = -iH(t)ψ

    Args:
        H: 含时哈密顿量，或返回 t 时刻矩阵的可调用对象
        psi0: 初态；二维数组时按列同时演化
        grid: 时间网格

    Returns:
        np.ndarray: 末态

    Raises:
        ParameterError: 初态未归一化
        IntegrationError: 范数漂移超过 1e-5
    """
    psi = np.array(psi0, dtype=complex)
    if psi.ndim == 1:
        is_valid, error = validate_state_vector(psi)
        if not is_valid:
            raise ParameterError(error)

    apply = _action(H)
    initial_norms = _norms(psi)
    dt = grid.dt
    t = grid.t0

    def rhs(time, state):
        return -1j * apply(time, state)

    for _ in range(grid.n_steps):
        k1 = rhs(t, psi)
        k2 = rhs(t + 0.5 * dt, psi + 0.5 * dt * k1)
        k3 = rhs(t + 0.5 * dt, psi + 0.5 * dt * k2)
        k4 = rhs(t + dt, psi + dt * k3)
        psi = psi + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t += dt

    drift = float(np.max(np.abs(_norms(psi) - initial_norms)))
    if drift > NORM_FAIL_TOL:
        raise IntegrationError(f"范数漂移 {drift:.3e} 超过 {NORM_FAIL_TOL}，请减小步长", grid.step / 2.0)
    if drift > NORM_WARN_TOL:
        logger.warning(f"范数漂移 {drift:.3e} 超过 {NORM_WARN_TOL}")
    return psi


def _infer_layout(dim: int, n_targets: int) -> HilbertLayout:
    for levels in (3, 2):
        cavity_space = dim / levels ** (n_targets + 1)
        if cavity_space != int(cavity_space):
            continue
        cavity_dim = round(cavity_space ** (1.0 / n_targets))
        if cavity_dim >= 2 and cavity_dim ** n_targets == int(cavity_space):
            return HilbertLayout(n_targets, cavity_dim - 1, levels)
    raise HilbertDimensionError(f"无法由维数 {dim} 推断 {n_targets} 个目标的空间布局")


def cutoff_occupancy(state: np.ndarray, layout: HilbertLayout) -> float:
    """各腔最高光子数能级布居的最大值（态矢量或密度矩阵）"""
    return max(float(subsystem_populations(state, layout, layout.cavity_index(j))[-1])
               for j in range(1, layout.n_targets + 1))


def propagate_lindblad(rho0: np.ndarray, p: DeviceParams, noise: NoiseParams, grid: TimeGrid,
                       hamiltonian_choice: str = 'full', layout: Optional[HilbertLayout] = None,
                       psi_id: Optional[np.ndarray] = None) -> SimResult:
    """
    四阶 Runge-Kutta 积分 Lindblad 主方程

    每步之后执行 ρ ← (ρ + ρ†)/2。正定性只监测、不强制。

    Args:
        rho0: 初始密度矩阵
        p: 器件参数
        noise: 耗散参数
        grid: 时间网格
        hamiltonian_choice: 哈密顿量类型（'ideal' 或 'full'，也接受 'rotated'、'effective'）
        layout: 空间布局，None 时由维数推断
        psi_id: 理想末态，给出时计算保真度

    Returns:
        SimResult: 末态与诊断量
    """
    rho = np.array(rho0, dtype=complex)
    if layout is None:
        layout = _infer_layout(rho.shape[0], p.n_targets)
    is_valid, errors = validate_density_matrix(rho, layout.total_dim)
    if not is_valid:
        raise ParameterError('; '.join(errors))

    h = hamiltonian(hamiltonian_choice, p, layout)
    diss = dissipator(noise, layout)
    trace0 = np.trace(rho).real
    dt = grid.dt
    t = grid.t0

    trace_drift = 0.0
    hermiticity_drift = 0.0
    occupancy = cutoff_occupancy(rho, layout)

    for _ in range(grid.n_steps):
        k1 = liouvillian_rhs(rho, t, h, diss)
        k2 = liouvillian_rhs(rho + 0.5 * dt * k1, t + 0.5 * dt, h, diss)
        k3 = liouvillian_rhs(rho + 0.5 * dt * k2, t + 0.5 * dt, h, diss)
        k4 = liouvillian_rhs(rho + dt * k3, t + dt, h, diss)
        rho = rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t += dt

        rho_dag = rho.conj().T
        hermiticity_drift = max(hermiticity_drift, float(np.max(np.abs(rho - rho_dag))))
        rho = 0.5 * (rho + rho_dag)

        trace_drift = max(trace_drift, abs(np.trace(rho).real - trace0))
        occupancy = max(occupancy, cutoff_occupancy(rho, layout))

    min_eigenvalue = float(np.linalg.eigvalsh(rho)[0])
    result = SimResult(final_state=rho, trace_drift=trace_drift, hermiticity_drift=hermiticity_drift,
                       min_eigenvalue=min_eigenvalue, cutoff_occupancy=occupancy,
                       positivity_ok=min_eigenvalue >= POSITIVITY_FLOOR, n_steps=grid.n_steps)

    if trace_drift > TRACE_WARN_TOL:
        result.warnings.append(f"迹漂移 {trace_drift:.3e} 超过 {TRACE_WARN_TOL}")
    if not result.positivity_ok:
        result.warnings.append(f"最小本征值 {min_eigenvalue:.3e} 低于 {POSITIVITY_FLOOR}")
    for message in result.warnings:
        logger.warning(message)

    if psi_id is not None:
        result.fidelity = fidelity(rho, psi_id)
    return result


def fidelity(rho: np.ndarray, psi_id: np.ndarray) -> float:
    """
    保真度 F = √⟨ψ_id|ρ|ψ_id⟩

    rho 为态矢量时返回 |⟨ψ_id|ψ⟩|。

    Args:
        rho: 密度矩阵或态矢量
        psi_id: 理想态

    Returns:
        float: [0, 1] 内的保真度

    Raises:
        ParameterError: 内积低于 -1e-8
    """
    rho = np.asarray(rho, dtype=complex)
    psi_id = np.asarray(psi_id, dtype=complex)
    if rho.shape[0] != psi_id.shape[0]:
        raise HilbertDimensionError(f"态维数不匹配: {rho.shape[0]} != {psi_id.shape[0]}")

    if rho.ndim == 1:
        return float(min(1.0, abs(np.vdot(psi_id, rho))))

    value = float(np.real(np.vdot(psi_id, rho @ psi_id)))
    if value < -FIDELITY_NEGATIVE_TOL:
        raise ParameterError(f"⟨ψ|ρ|ψ⟩ = {value:.3e} 为负，密度矩阵无效")
    return float(math.sqrt(min(1.0, max(0.0, value))))


def _single_frame(Omega: float, t: float, levels: int) -> np.ndarray:
    sigma_z = qutrit_operator('sigma_z_rot', levels).matrix
    return expm(-1j * Omega * t * sigma_z)


def frame_unitary(Omega: float, t: float, layout: HilbertLayout) -> QOperator:
    """
    旋转表象还原变换 exp(-iΩt Σ_l σ̃_z,l)，作用于全部比特（|f⟩ 上为单位），腔上为单位

    Args:
        Omega: 拉比频率
        t: 时间
        layout: 空间布局

    Returns:
        QOperator: 全空间稀疏幺正算符
    """
    single = sp.csr_matrix(_single_frame(Omega, t, layout.qutrit_levels))
    matrix = sp.identity(1, dtype=complex, format='csr')
    for _ in range(layout.n_qutrits):
        matrix = sp.kron(matrix, single, format='csr')
    matrix = sp.kron(matrix, sp.identity(layout.cavity_space_dim, dtype=complex, format='csr'), format='csr')
    return QOperator(matrix, layout.subsystem_dims)


def frame_transform(state: np.ndarray, Omega: float, t: float, layout: HilbertLayout) -> np.ndarray:
    """
    对态矢量（U ψ）或密度矩阵（U ρ U†）施加旋转表象还原变换

    Args:
        state: 态矢量或密度矩阵
        Omega: 拉比频率
        t: 时间
        layout: 空间布局

    Returns:
        np.ndarray: 变换后的态
    """
    state = np.asarray(state, dtype=complex)
    u = frame_unitary(Omega, t, layout).matrix
    if state.shape[0] != u.shape[0]:
        raise HilbertDimensionError(f"态维数 {state.shape[0]} 与布局维数 {u.shape[0]} 不匹配")
    if state.ndim == 1:
        return u @ state
    return u @ (u @ state.conj().T).conj().T


def register_frame_phases(Omega: float, t: float, n_targets: int) -> np.ndarray:
    """旋转基寄存器各基矢在还原变换下的相位 Π_l e^{∓iΩt}"""
    signs = 1 - 2 * register_bits(n_targets)
    return np.exp(-1j * Omega * t * signs.sum(axis=1))


def frame_is_identity(Omega: float, t: float, n_targets: int, tol: float = 1e-10) -> Tuple[bool, complex]:
    """
    检查还原变换在比特子空间上是否为单位算符（允许全局相位 ±1）

    ΩT = kπ 时每个比特贡献 (-1)^k，整体为 (-1)^{k(n+1)}。

    Args:
        Omega: 拉比频率
        t: 时间
        n_targets: 目标比特数
        tol: 容差

    Returns:
        Tuple[bool, complex]:
            - 是否为单位算符（相差全局相位）
            - 全局相位
    """
    phases = register_frame_phases(Omega, t, n_targets)
    global_phase = phases[0]
    ok = bool(np.max(np.abs(phases - global_phase)) < tol and abs(abs(global_phase) - 1.0) < tol
              and min(abs(global_phase - 1.0), abs(global_phase + 1.0)) < tol)
    return ok, complex(global_phase)


@dataclass
class RwaReport:
    """有效哈密顿量与旋转表象哈密顿量的对比结果"""

    drive_ratio: float
    fidelity: float
    k: int
    T: float


def effective_vs_full_check(p: DeviceParams, grid: TimeGrid, layout: Optional[HilbertLayout] = None,
                            psi0: Optional[np.ndarray] = None) -> RwaReport:
    """
    比较旋转波近似前后的演化

    同一初态分别在旋转表象哈密顿量与有效哈密顿量下演化到 grid.t1，
    报告两个末态的保真度 |⟨ψ_eff|ψ_rot⟩| 与驱动比 2Ω/max|δ_j|。

    Args:
        p: 器件参数
        grid: 时间网格
        layout: 空间布局，默认两能级、每腔截断 6
        psi0: 初态，默认每个比特处于 |e⟩、各腔真空

    Returns:
        RwaReport: 对比结果
    """
    if layout is None:
        layout = HilbertLayout(p.n_targets, 6, 2)
    if psi0 is None:
        psi0 = register_state_in_layout(excited_initial_state(p.n_targets), layout)

    psi_rot = propagate_unitary(hamiltonian('rotated', p, layout), psi0, grid)
    psi_eff = propagate_unitary(hamiltonian('effective', p, layout), psi0, grid)

    ratio = 2.0 * p.Omega / max(abs(d) for d in p.delta)
    report = RwaReport(drive_ratio=ratio, fidelity=fidelity(psi_rot, psi_eff), k=p.k, T=grid.t1 - grid.t0)
    logger.info(f"旋转波近似检查: 2Ω/|δ| = {ratio:.2f}, 保真度 = {report.fidelity:.6f}")
    return report


def simulated_gate_propagator(p: DeviceParams, layout: HilbertLayout, T: Optional[float] = None,
                              grid: Optional[TimeGrid] = None,
                              hamiltonian_choice: str = 'effective') -> QOperator:
    """
    逐列计算模拟传播子在零光子、旋转基子空间上的限制

    每个旋转基寄存器态 ⊗ 真空演化 T 后投影回该子空间，再施加还原变换的相位。

    Args:
        p: 器件参数
        layout: 空间布局
        T: 演化时长，默认 p.cycle_time()
        grid: 时间网格，默认按 default_step
        hamiltonian_choice: 哈密顿量类型（'effective' 或 'rotated'）

    Returns:
        QOperator: 2^{n+1} 维矩阵
    """
    if T is None:
        T = p.cycle_time()
    if grid is None:
        grid = TimeGrid(0.0, T, default_step(p, T, layout.qutrit_levels))

    basis = register_state_in_layout(np.eye(2 ** layout.n_qutrits, dtype=complex), layout)
    evolved = propagate_unitary(hamiltonian(hamiltonian_choice, p, layout), basis, grid)
    restricted = basis.conj().T @ evolved

    phases = register_frame_phases(p.Omega, grid.t1 - grid.t0, p.n_targets)
    return QOperator(phases[:, None] * restricted)


@dataclass
class SectorCheck:
    """单个两比特扇区的回路检查结果"""

    j: int
    sector: str
    vacuum_population: float
    phase: float
    expected_phase: float
    passed: bool


def _wrap(angle: float) -> float:
    return (angle + math.pi) % (2.0 * math.pi) - math.pi


def sector_phase_check(p: DeviceParams, layout: HilbertLayout, j: int, sector: str,
                       grid: Optional[TimeGrid] = None) -> SectorCheck:
    """
    在 H_eff,j 下演化扇区 |p_A⟩|i_j⟩ ⊗ 真空一个周期，检查腔回到真空与所得相位

    Args:
        p: 器件参数
        layout: 空间布局
        j: 目标编号
        sector: 两个字符 p_A i_j，如 '++'、'+-'
        grid: 时间网格，默认 [0, T_j]

    Returns:
        SectorCheck: 真空布居、数值相位与解析相位
    """
    if len(sector) != 2 or any(s not in '+-' for s in sector):
        raise ParameterError(f"扇区格式应为两个 '+'/'-' 字符: {sector}")
    if not 1 <= j <= p.n_targets:
        raise ParameterError(f"目标编号越界: {j}")

    m_j = p.m[j - 1] if p.m else 1
    delta = p.delta[j - 1]
    if grid is None:
        T = 2.0 * m_j * math.pi / abs(delta)
        grid = TimeGrid(0.0, T, default_step(p, T, layout.qutrit_levels))

    bits = [0] * layout.n_qutrits
    bits[0] = 0 if sector[0] == '+' else 1
    bits[j] = 0 if sector[1] == '+' else 1
    register = np.zeros(2 ** layout.n_qutrits, dtype=complex)
    register[int(''.join(str(b) for b in bits), 2)] = 1.0
    psi0 = register_state_in_layout(register, layout)

    psi = propagate_unitary(effective_hamiltonian(p, layout, j), psi0, grid)
    vacuum_population = float(subsystem_populations(psi, layout, layout.cavity_index(j))[0])
    phase = float(np.angle(np.vdot(psi0, psi)))

    expected = total_phase(p.g[j - 1], delta, m_j) if sector[0] == sector[1] else 0.0
    passed = vacuum_population >= 1.0 - VACUUM_TOL and abs(_wrap(phase - expected)) < SECTOR_PHASE_TOL
    return SectorCheck(j, sector, vacuum_population, phase, expected, passed)
