#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
异常类型模块

该模块定义仿真库各层抛出的异常类型。命令行层根据异常类型映射退出码。
"""

from typing import Optional


class SimulationError(Exception):
    """仿真库异常基类"""


class HilbertDimensionError(SimulationError, ValueError):
    """希尔伯特空间维数无效或不匹配"""


class ParameterError(SimulationError, ValueError):
    """物理参数无效（失谐为零、相位越界、布局与参数不匹配等）"""


class ConfigError(SimulationError, ValueError):
    """配置文件格式错误或包含未知键"""


class IntegrationError(SimulationError, RuntimeError):
    """
    数值积分失败

    Args:
        message: 错误信息
        suggested_step: 建议改用的步长（秒）
    """

    def __init__(self, message: str, suggested_step: Optional[float] = None):
        super().__init__(message)
        self.suggested_step = suggested_step
