#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
扫描结果写入模块

该模块负责把扫描结果写成 CSV：UTF-8 编码、LF 换行、浮点数保留 17 位有效数字。
"""

import os
import math
import logging
from dataclasses import asdict, dataclass
from typing import Iterable, List

import pandas as pd

from ..utils.validation import validate_output_path

# 配置日志
logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(name)s - %(levelname)s - %(message)s')
logger = logging.getLogger(__name__)

SWEEP_COLUMNS = ['delta1_over_2pi_MHz', 'g12_ratio', 'fidelity', 'trace_drift', 'min_eig',
                 'cutoff_occupancy', 'wall_ms', 'status']

FLOAT_FORMAT = '%.17g'


@dataclass
class SweepRow:
    """
    扫描网格上一个点的结果

    Attributes:
        delta1_over_2pi_MHz: δ₁/2π（MHz）
        g12_ratio: g₁₂/g₁
        fidelity: 保真度，失败点为 NaN
        trace_drift: 迹漂移（无耗散演化时为范数平方漂移）
        min_eig: 末态密度矩阵最小本征值
        cutoff_occupancy: 最高光子数能级布居
        wall_ms: 耗时（ms）
        status: 'ok' 或 'failed'
    """

    delta1_over_2pi_MHz: float
    g12_ratio: float
    fidelity: float = math.nan
    trace_drift: float = math.nan
    min_eig: float = math.nan
    cutoff_occupancy: float = math.nan
    wall_ms: float = 0.0
    status: str = 'ok'

    @property
    def ok(self) -> bool:
        return self.status == 'ok'


def rows_to_dataframe(rows: Iterable[SweepRow]) -> pd.DataFrame:
    """扫描行转为列顺序固定的 DataFrame，空输入得到只有表头的表"""
    records = [asdict(row) for row in rows]
    return pd.DataFrame(records, columns=SWEEP_COLUMNS)


class SweepWriter:
    """
    扫描结果写入器

    先 create 指定路径，再 append 行，最后 finalize 写盘。
    """

    def __init__(self):
        """初始化写入器"""
        self.output_path = None
        self.rows: List[SweepRow] = []
        self.is_open = False

    def create(self, output_path: str) -> bool:
        """
        准备写入新的 CSV 文件

        Args:
            output_path: 输出路径

        Returns:
            bool: 是否成功
        """
        is_valid, error = validate_output_path(output_path, '.csv')
        if not is_valid:
            logger.error(f"输出路径无效: {error}")
            return False

        if os.path.exists(output_path):
            logger.warning(f"输出文件已存在，将被覆盖: {output_path}")

        self.output_path = output_path
        self.rows = []
        self.is_open = True
        return True

    def append(self, rows: Iterable[SweepRow]) -> bool:
        """
        追加扫描行

        Args:
            rows: 扫描行

        Returns:
            bool: 是否成功
        """
        if not self.is_open:
            logger.error("写入器尚未创建输出文件")
            return False
        self.rows.extend(rows)
        return True

    def finalize(self) -> bool:
        """
        写出 CSV 并关闭写入器

        Returns:
            bool: 是否成功写出
        """
        if not self.is_open:
            logger.error("写入器尚未创建输出文件")
            return False

        try:
            frame = rows_to_dataframe(self.rows)
            frame.to_csv(self.output_path, index=False, float_format=FLOAT_FORMAT,
                         lineterminator='\n', encoding='utf-8')
            failed = sum(1 for row in self.rows if not row.ok)
            logger.info(f"已写入 {len(self.rows)} 行到 {self.output_path}（失败 {failed} 行）")
            return True
        except OSError as e:
            logger.error(f"写入 CSV 时出错: {str(e)}")
            return False
        finally:
            self.is_open = False

    def write(self, rows: Iterable[SweepRow], output_path: str) -> bool:
        """一次性写出全部行"""
        return self.create(output_path) and self.append(rows) and self.finalize()
