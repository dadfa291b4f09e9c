#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
单位换算模块

配置文件沿用实验文献的习惯单位：频率以 ω/2π 给出（MHz 或 GHz），
耗散速率以寿命（µs）给出。程序内部统一使用角频率 rad/s 与速率 1/s，
所有换算集中在本模块，避免 2π 因子出错。
"""

import math
import logging
from typing import Optional, Sequence, Tuple

# 配置日志
logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(name)s - %(levelname)s - %(message)s')
logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi


def mhz_to_angular(value_mhz: float) -> float:
    """
    将 ω/2π（MHz）换算为角频率

    Args:
        value_mhz: 频率/2π，单位 MHz

    Returns:
        float: 角频率，单位 rad/s
    """
    return TWO_PI * value_mhz * 1e6


def ghz_to_angular(value_ghz: float) -> float:
    """
    将 ω/2π（GHz）换算为角频率

    Args:
        value_ghz: 频率/2π，单位 GHz

    Returns:
        float: 角频率，单位 rad/s
    """
    return TWO_PI * value_ghz * 1e9


def angular_to_mhz(omega: float) -> float:
    """角频率（rad/s）换算为 ω/2π（MHz）"""
    return omega / TWO_PI / 1e6


def angular_to_ghz(omega: float) -> float:
    """角频率（rad/s）换算为 ω/2π（GHz）"""
    return omega / TWO_PI / 1e9


def lifetime_us_to_rate(lifetime_us: Optional[float]) -> float:
    """
    将寿命（µs）换算为耗散速率

    寿命为 None 或无穷大表示该耗散通道不存在，返回 0。

    Args:
        lifetime_us: 寿命 Γ⁻¹，单位 µs

    Returns:
        float: 速率 Γ，单位 1/s

    Raises:
        ValueError: 寿命非正
    """
    if lifetime_us is None or math.isinf(lifetime_us):
        return 0.0
    if lifetime_us <= 0:
        raise ValueError(f"寿命必须为正: {lifetime_us}")
    return 1.0 / (lifetime_us * 1e-6)


def rate_to_lifetime_us(rate: float) -> Optional[float]:
    """速率（1/s）换算为寿命（µs），速率为 0 时返回 None"""
    if rate == 0:
        return None
    return 1.0 / rate / 1e-6


def ns_to_seconds(value_ns: Optional[float]) -> Optional[float]:
    """纳秒换算为秒，None 原样返回"""
    if value_ns is None:
        return None
    return value_ns * 1e-9


def seconds_to_us(value_s: float) -> float:
    """秒换算为微秒"""
    return value_s * 1e6


def linear_grid(start: float, stop: float, points: int) -> Tuple[float, ...]:
    """
    生成包含端点的等间距网格

    Args:
        start: 起点
        stop: 终点
        points: 点数，0 表示空网格

    Returns:
        Tuple[float, ...]: 网格点
    """
    if points < 0:
        raise ValueError(f"网格点数不能为负: {points}")
    if points == 0:
        return ()
    if points == 1:
        return (float(start),)
    step = (stop - start) / (points - 1)
    return tuple(start + i * step for i in range(points))


def format_sequence(values: Sequence[float], fmt: str = '{:.4f}') -> str:
    """把数值序列格式化为逗号分隔的字符串，用于日志和报告"""
    return ', '.join(fmt.format(v) for v in values)
