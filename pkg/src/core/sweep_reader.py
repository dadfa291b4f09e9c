#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
扫描结果读取模块

该模块负责读取 SweepWriter 写出的 CSV，并还原为扫描行。
"""

import os
import math
import logging
from typing import List, Optional, Sequence, Tuple

import pandas as pd

from .sweep_writer import SWEEP_COLUMNS, SweepRow

# 配置日志
logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(name)s - %(levelname)s - %(message)s')
logger = logging.getLogger(__name__)

FLOAT_COLUMNS = SWEEP_COLUMNS[:-1]


def _same_value(a, b) -> bool:
    if isinstance(a, float) and isinstance(b, float) and math.isnan(a) and math.isnan(b):
        return True
    return a == b


class SweepReader:
    """
    扫描结果读取器
    """

    def __init__(self):
        """初始化读取器"""
        self.csv_path = None
        self.frame: Optional[pd.DataFrame] = None

    def read(self, csv_path: str) -> bool:
        """
        读取 CSV 文件

        Args:
            csv_path: CSV 路径

        Returns:
            bool: 是否成功读取
        """
        if not os.path.exists(csv_path):
            logger.error(f"CSV 文件不存在: {csv_path}")
            return False

        try:
            frame = pd.read_csv(csv_path, float_precision='round_trip', encoding='utf-8',
                                dtype={'status': str})
        except (OSError, pd.errors.ParserError) as e:
            logger.error(f"读取 CSV 时出错: {str(e)}")
            return False

        missing = [column for column in SWEEP_COLUMNS if column not in frame.columns]
        if missing:
            logger.error(f"CSV 缺少列: {', '.join(missing)}")
            return False

        self.csv_path = csv_path
        self.frame = frame
        logger.info(f"已读取 {len(frame)} 行: {csv_path}")
        return True

    def get_dataframe(self) -> Optional[pd.DataFrame]:
        return self.frame

    def get_rows(self) -> List[SweepRow]:
        """
        还原扫描行

        Returns:
            List[SweepRow]: 扫描行，未读取时为空列表
        """
        if self.frame is None:
            return []
        rows = []
        for record in self.frame.to_dict('records'):
            values = {column: float(record[column]) for column in FLOAT_COLUMNS}
            rows.append(SweepRow(status=str(record['status']), **values))
        return rows

    def compare_rows(self, rows: Sequence[SweepRow], ignore: Sequence[str] = ()) -> Tuple[bool, List[str]]:
        """
        与内存中的扫描行逐项比较

        Args:
            rows: 待比较的扫描行
            ignore: 不比较的列（如 'wall_ms'）

        Returns:
            Tuple[bool, List[str]]:
                - 是否完全一致
                - 差异描述列表
        """
        stored = self.get_rows()
        if len(stored) != len(rows):
            return False, [f"行数不同: {len(stored)} != {len(rows)}"]

        differences = []
        for index, (left, right) in enumerate(zip(stored, rows)):
            for column in SWEEP_COLUMNS:
                if column in ignore:
                    continue
                if not _same_value(getattr(left, column), getattr(right, column)):
                    differences.append(f"第 {index} 行 {column}: {getattr(left, column)!r} != {getattr(right, column)!r}")
        return len(differences) == 0, differences
