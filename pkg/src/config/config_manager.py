#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
配置管理模块

该模块负责管理实验配置，包括加载、校验、保存和获取配置项，
并把配置文件中的习惯单位（MHz、GHz、µs、ns）换算为程序内部单位。
"""

import os
import copy
import json
import math
import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple

from ..core.model import DRIVE_LEAKAGE_CHOICES, NoiseParams
from ..utils.conversion import (ghz_to_angular, lifetime_us_to_rate, linear_grid,
                                mhz_to_angular, ns_to_seconds)
from ..utils.errors import ConfigError
from ..utils.validation import validate_section_keys

# 配置日志
logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(name)s - %(levelname)s - %(message)s')
logger = logging.getLogger(__name__)

# 默认配置即参考工作点
DEFAULT_CONFIG: Dict[str, Any] = {
    'plan': {
        'theta_over_pi': [0.5, 0.5],
        'm': [1, 2],
        'delta1_over_2pi_MHz': -3.57,
        'k': 12,
    },
    'device': {
        'omega_eg_over_2pi_GHz': 6.5,
        'anharmonicity': 0.05,
        'g12_ratio': 0.1,
        'gt_ratio': math.sqrt(2.0),
        'Omegat_ratio': math.sqrt(2.0),
        'drive_leakage': 'detuned',
    },
    'noise': {
        'enabled': True,
        'kappa_inv_us': 15.0,
        'Gamma_inv_us': 30.0,
        'Gamma_fe_inv_us': 11.5,
        'Gamma_fg_inv_us': 45.0,
        'Gamma_phi_e_inv_us': 10.0,
        'Gamma_phi_f_inv_us': 10.0,
    },
    'initial_state': 'excited',
    'sweep': {
        'delta1_start_MHz': -6.0,
        'delta1_stop_MHz': -1.0,
        'points': 21,
        'g12_ratios': [0.0, 0.1, 0.2, 0.3],
    },
    'numerics': {
        'cutoff': 5,
        'step_ns': None,
        'workers': 1,
        'gate_cutoff': 10,
        'gate_max_distance': 1e-3,
        'converge_cutoffs': [4, 5, 6, 8],
        'rwa_k': [12, 120],
    },
    'output': {
        'path': None,
    },
}

NOISE_KEYS = ('kappa_inv_us', 'Gamma_inv_us', 'Gamma_fe_inv_us', 'Gamma_fg_inv_us',
              'Gamma_phi_e_inv_us', 'Gamma_phi_f_inv_us')


@dataclass(frozen=True)
class ExperimentConfig:
    """
    换算为内部单位（rad/s、1/s、s）后的实验配置

    Attributes:
        theta: 目标相位（rad）
        m: 回路圈数
        delta1: 腔 1 失谐（rad/s）
        k: 驱动整数
        omega_eg: 比特跃迁角频率
        anharmonicity: 非谐性比例
        g12_ratio: 单点运行与 fig7 使用的串扰比 g₁₂/g₁
        gt_ratio: g̃/g
        Omegat_ratio: Ω̃/Ω
        drive_leakage: 驱动泄漏项的相位约定
        noise: 耗散参数
        noise_enabled: 是否计入耗散
        initial_state: 初态选择 'excited'、'plus' 或 'basis:<k>'
        sweep_delta1: 扫描的 δ₁ 网格（rad/s）
        sweep_g12_ratios: fig6 扫描的串扰比
        cutoff: 每腔光子数截断
        step: 步长覆盖值（s），None 表示默认步长
        workers: 并行进程数
        gate_cutoff: gate-check 使用的截断
        gate_max_distance: gate-check 允许的最大矩阵元偏差
        converge_cutoffs: 收敛检查的截断列表
        rwa_k: rwa-check 的驱动整数列表
        output_path: 输出 CSV 路径
    """

    theta: Tuple[float, ...]
    m: Tuple[int, ...]
    delta1: float
    k: int
    omega_eg: float
    anharmonicity: float
    g12_ratio: float
    gt_ratio: float
    Omegat_ratio: float
    drive_leakage: str
    noise: NoiseParams
    noise_enabled: bool
    initial_state: str
    sweep_delta1: Tuple[float, ...]
    sweep_g12_ratios: Tuple[float, ...]
    cutoff: int
    step: Optional[float]
    workers: int
    gate_cutoff: int
    gate_max_distance: float
    converge_cutoffs: Tuple[int, ...]
    rwa_k: Tuple[int, ...]
    output_path: Optional[str]

    @property
    def n_targets(self) -> int:
        return len(self.theta)

    def device_options(self, g12_ratio: Optional[float] = None) -> Dict[str, Any]:
        """传给 device_from_plan 的器件选项"""
        return {
            'omega_eg': self.omega_eg,
            'anharmonicity': self.anharmonicity,
            'g12_ratio': self.g12_ratio if g12_ratio is None else g12_ratio,
            'gt_ratio': self.gt_ratio,
            'Omegat_ratio': self.Omegat_ratio,
            'drive_leakage': self.drive_leakage,
        }

    def active_noise(self) -> NoiseParams:
        return self.noise if self.noise_enabled else NoiseParams.zero(self.n_targets)


def _merge(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    merged = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


def validate_config(config: Dict[str, Any]) -> Tuple[bool, List[str]]:
    """
    校验配置结构，未知段或未知键均视为错误

    Args:
        config: 配置字典

    Returns:
        Tuple[bool, List[str]]:
            - 是否有效
            - 错误信息列表
    """
    is_valid, errors = validate_section_keys('<root>', config, DEFAULT_CONFIG.keys())
    if not is_valid:
        return False, errors

    for section, defaults in DEFAULT_CONFIG.items():
        if isinstance(defaults, dict) and section in config:
            ok, section_errors = validate_section_keys(section, config[section], defaults.keys())
            errors.extend(section_errors)
        elif section in config and not isinstance(config[section], str):
            errors.append(f"配置项 {section} 必须是字符串")
    return len(errors) == 0, errors


class ConfigManager:
    """
    配置管理类

    配置以嵌套字典保存，键可以写成 'section.key' 的形式访问。
    """

    def __init__(self):
        """初始化配置管理器"""
        self.config = copy.deepcopy(DEFAULT_CONFIG)
        self.config_file = None
        self.errors: List[str] = []

    def load_config(self, config_file: str) -> bool:
        """
        加载配置

        从JSON文件加载配置并覆盖默认值。

        Args:
            config_file: 配置文件路径

        Returns:
            bool: 是否成功加载
        """
        self.errors = []
        if not os.path.exists(config_file):
            self.errors.append(f"配置文件不存在: {config_file}")
            logger.error(self.errors[-1])
            return False

        try:
            with open(config_file, 'r', encoding='utf-8') as f:
                loaded = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            self.errors.append(f"加载配置时出错: {str(e)}")
            logger.error(self.errors[-1])
            return False

        is_valid, errors = validate_config(loaded)
        if not is_valid:
            self.errors.extend(errors)
            for error in errors:
                logger.error(error)
            return False

        self.config = _merge(DEFAULT_CONFIG, loaded)
        self.config_file = config_file
        logger.info(f"已加载配置: {config_file}")
        return True

    def save_config(self, config_file: Optional[str] = None) -> bool:
        """
        保存配置

        Args:
            config_file: 配置文件路径，如果为None则使用当前配置文件

        Returns:
            bool: 是否成功保存
        """
        if config_file is None:
            config_file = self.config_file

        if config_file is None:
            logger.error("未指定配置文件路径")
            return False

        try:
            directory = os.path.dirname(config_file)
            if directory:
                os.makedirs(directory, exist_ok=True)

            with open(config_file, 'w', encoding='utf-8') as f:
                json.dump(self.config, f, indent=4, ensure_ascii=False)

            self.config_file = config_file
            logger.info(f"已保存配置: {config_file}")
            return True
        except OSError as e:
            logger.error(f"保存配置时出错: {str(e)}")
            return False

    def get_setting(self, key: str, default: Any = None) -> Any:
        """
        获取配置项

        Args:
            key: 配置项键，如 'plan.k'
            default: 默认值

        Returns:
            Any: 配置项值
        """
        node: Any = self.config
        for part in key.split('.'):
            if not isinstance(node, dict) or part not in node:
                return default
            node = node[part]
        return node

    def set_setting(self, key: str, value: Any) -> None:
        """
        设置配置项

        Args:
            key: 配置项键，如 'numerics.cutoff'
            value: 配置项值

        Raises:
            ConfigError: 键不在配置结构中
        """
        parts = key.split('.')
        node = self.config
        defaults: Any = DEFAULT_CONFIG
        for part in parts[:-1]:
            if not isinstance(defaults, dict) or part not in defaults:
                raise ConfigError(f"未知配置项: {key}")
            defaults = defaults[part]
            node = node.setdefault(part, {})
        if not isinstance(defaults, dict) or parts[-1] not in defaults:
            raise ConfigError(f"未知配置项: {key}")
        node[parts[-1]] = value

    def get_all_settings(self) -> Dict[str, Any]:
        """
        获取所有配置项

        Returns:
            Dict[str, Any]: 所有配置项
        """
        return copy.deepcopy(self.config)

    def update_settings(self, settings: Dict[str, Any]) -> None:
        """
        更新多个配置项

        Args:
            settings: 'section.key' 到值的映射
        """
        for key, value in settings.items():
            self.set_setting(key, value)

    def get_config_file(self) -> Optional[str]:
        return self.config_file

    def get_experiment_config(self) -> ExperimentConfig:
        """
        换算为内部单位的实验配置

        Returns:
            ExperimentConfig: 实验配置

        Raises:
            ConfigError: 取值无效
        """
        try:
            return self._build_experiment_config()
        except ConfigError:
            raise
        except (TypeError, ValueError) as e:
            raise ConfigError(f"配置取值无效: {str(e)}") from e

    def _build_experiment_config(self) -> ExperimentConfig:
        plan = self.config['plan']
        device = self.config['device']
        noise = self.config['noise']
        sweep = self.config['sweep']
        numerics = self.config['numerics']

        theta = tuple(math.pi * float(t) for t in plan['theta_over_pi'])
        m = tuple(int(v) for v in plan['m'])
        if not theta or len(theta) != len(m):
            raise ConfigError(f"plan.theta_over_pi 与 plan.m 长度必须相同且非空: {len(theta)} / {len(m)}")
        if float(plan['delta1_over_2pi_MHz']) >= 0:
            raise ConfigError(f"plan.delta1_over_2pi_MHz 必须为负: {plan['delta1_over_2pi_MHz']}")

        for start_key in ('delta1_start_MHz', 'delta1_stop_MHz'):
            if float(sweep[start_key]) >= 0:
                raise ConfigError(f"sweep.{start_key} 必须为负: {sweep[start_key]}")
        if int(sweep['points']) < 0:
            raise ConfigError(f"sweep.points 不能为负: {sweep['points']}")

        for key in ('cutoff', 'gate_cutoff', 'workers'):
            if int(numerics[key]) < 1:
                raise ConfigError(f"numerics.{key} 必须为正整数: {numerics[key]}")
        if numerics['step_ns'] is not None and float(numerics['step_ns']) <= 0:
            raise ConfigError(f"numerics.step_ns 必须为正: {numerics['step_ns']}")
        if float(numerics['gate_max_distance']) <= 0:
            raise ConfigError(f"numerics.gate_max_distance 必须为正: {numerics['gate_max_distance']}")
        if device['drive_leakage'] not in DRIVE_LEAKAGE_CHOICES:
            raise ConfigError(f"device.drive_leakage 必须为 {', '.join(DRIVE_LEAKAGE_CHOICES)} 之一: {device['drive_leakage']}")

        rates = [lifetime_us_to_rate(noise[key]) for key in NOISE_KEYS]
        noise_params = NoiseParams.from_rates(len(theta), *rates)

        initial_state = self.config['initial_state']
        if initial_state not in ('excited', 'plus') and not str(initial_state).startswith('basis:'):
            raise ConfigError(f"未知的初态选择: {initial_state}")

        return ExperimentConfig(
            theta=theta,
            m=m,
            delta1=mhz_to_angular(float(plan['delta1_over_2pi_MHz'])),
            k=int(plan['k']),
            omega_eg=ghz_to_angular(float(device['omega_eg_over_2pi_GHz'])),
            anharmonicity=float(device['anharmonicity']),
            g12_ratio=float(device['g12_ratio']),
            gt_ratio=float(device['gt_ratio']),
            Omegat_ratio=float(device['Omegat_ratio']),
            drive_leakage=str(device['drive_leakage']),
            noise=noise_params,
            noise_enabled=bool(noise['enabled']),
            initial_state=str(initial_state),
            sweep_delta1=tuple(mhz_to_angular(v) for v in linear_grid(float(sweep['delta1_start_MHz']),
                                                                      float(sweep['delta1_stop_MHz']),
                                                                      int(sweep['points']))),
            sweep_g12_ratios=tuple(float(r) for r in sweep['g12_ratios']),
            cutoff=int(numerics['cutoff']),
            step=ns_to_seconds(None if numerics['step_ns'] is None else float(numerics['step_ns'])),
            workers=int(numerics['workers']),
            gate_cutoff=int(numerics['gate_cutoff']),
            gate_max_distance=float(numerics['gate_max_distance']),
            converge_cutoffs=tuple(int(c) for c in numerics['converge_cutoffs']),
            rwa_k=tuple(int(k) for k in numerics['rwa_k']),
            output_path=self.config['output']['path'],
        )
