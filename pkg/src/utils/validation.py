#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
数据验证模块

该模块提供数据验证功能，用于验证量子态、配置段和输出路径。
"""

import os
import logging
from typing import Dict, Iterable, List, Mapping, Tuple

import numpy as np

# 配置日志
logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(name)s - %(levelname)s - %(message)s')
logger = logging.getLogger(__name__)

# 态的容差
STATE_NORM_TOL = 1e-9
DM_TRACE_TOL = 1e-8
DM_HERMITIAN_TOL = 1e-10
DM_MIN_EIGENVALUE = -1e-6


def validate_state_vector(psi: np.ndarray, dim: int = None, tol: float = STATE_NORM_TOL) -> Tuple[bool, str]:
    """
    验证态矢量是否有效

    Args:
        psi: 态矢量
        dim: 期望维数，None 表示不检查
        tol: 归一化容差

    Returns:
        Tuple[bool, str]:
            - 是否有效
            - 错误信息
    """
    psi = np.asarray(psi)
    if psi.ndim != 1:
        return False, f"态矢量必须是一维数组，实际维度: {psi.ndim}"

    if dim is not None and psi.shape[0] != dim:
        return False, f"态矢量维数不匹配: {psi.shape[0]} != {dim}"

    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > tol:
        return False, f"态矢量未归一化: |ψ| = {norm:.12f}"

    return True, ""


def validate_density_matrix(rho: np.ndarray, dim: int = None,
                            trace_tol: float = DM_TRACE_TOL,
                            hermitian_tol: float = DM_HERMITIAN_TOL,
                            min_eigenvalue: float = DM_MIN_EIGENVALUE) -> Tuple[bool, List[str]]:
    """
    验证密度矩阵是否有效

    检查方阵形状、迹、厄米性和最小本征值。

    Args:
        rho: 密度矩阵
        dim: 期望维数，None 表示不检查
        trace_tol: 迹容差
        hermitian_tol: 厄米性容差
        min_eigenvalue: 允许的最小本征值

    Returns:
        Tuple[bool, List[str]]:
            - 是否有效
            - 错误信息列表
    """
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        return False, [f"密度矩阵必须是方阵，实际形状: {rho.shape}"]

    if dim is not None and rho.shape[0] != dim:
        return False, [f"密度矩阵维数不匹配: {rho.shape[0]} != {dim}"]

    errors = []
    trace = np.trace(rho)
    if abs(trace - 1.0) > trace_tol:
        errors.append(f"迹偏离 1: tr ρ = {trace:.12g}")

    hermitian_error = float(np.max(np.abs(rho - rho.conj().T))) if rho.size else 0.0
    if hermitian_error > hermitian_tol:
        errors.append(f"非厄米: max|ρ-ρ†| = {hermitian_error:.3e}")
    else:
        # 只有厄米矩阵才有实本征值
        lowest = float(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0])
        if lowest < min_eigenvalue:
            errors.append(f"最小本征值为负: {lowest:.3e}")

    return len(errors) == 0, errors


def validate_section_keys(section_name: str, section: Mapping, allowed: Iterable[str]) -> Tuple[bool, List[str]]:
    """
    验证配置段中的键是否都在允许范围内

    Args:
        section_name: 配置段名称
        section: 配置段内容
        allowed: 允许的键

    Returns:
        Tuple[bool, List[str]]:
            - 是否有效
            - 未知键的错误信息列表
    """
    if not isinstance(section, Mapping):
        return False, [f"配置段 {section_name} 必须是对象，实际类型: {type(section).__name__}"]

    allowed = set(allowed)
    errors = [f"配置段 {section_name} 中存在未知键: {key}" for key in section if key not in allowed]
    return len(errors) == 0, errors


def validate_rates(rates: Dict[str, Iterable[float]]) -> Tuple[bool, List[str]]:
    """
    验证耗散速率均非负

    Args:
        rates: 名称到速率序列的映射

    Returns:
        Tuple[bool, List[str]]:
            - 是否有效
            - 错误信息列表
    """
    errors = []
    for name, values in rates.items():
        for index, value in enumerate(values):
            if not np.isfinite(value) or value < 0:
                errors.append(f"速率 {name}[{index}] 无效: {value}")
    return len(errors) == 0, errors


def validate_output_path(output_path: str, suffix: str = None) -> Tuple[bool, str]:
    """
    验证输出路径是否有效

    Args:
        output_path: 输出路径
        suffix: 期望的扩展名（如 '.csv'），None 表示不检查

    Returns:
        Tuple[bool, str]:
            - 是否有效
            - 错误信息
    """
    if not output_path:
        return False, "输出路径为空"

    if suffix and not output_path.lower().endswith(suffix):
        return False, f"输出文件扩展名应为 {suffix}: {output_path}"

    if os.path.isdir(output_path):
        return False, f"输出路径是目录: {output_path}"

    # 目录不存在时尝试创建
    output_dir = os.path.dirname(output_path)
    if output_dir and not os.path.exists(output_dir):
        try:
            os.makedirs(output_dir)
        except OSError as e:
            return False, f"无法创建输出目录: {str(e)}"

    if output_dir and not os.access(output_dir, os.W_OK):
        return False, f"没有写入权限: {output_dir}"

    return True, ""
