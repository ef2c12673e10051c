"""
报告输出
CSV 浮点数统一用 17 位有效数字，JSON 键排序且不含时间戳，保证相同输入得到逐字节相同的文件
"""

import csv
import json
import logging
import math
import os
from enum import Enum
from numbers import Integral, Real
from typing import Any, Dict, Iterable, Sequence

import numpy as np

logger = logging.getLogger(__name__)

def format_value(value: Any) -> str:
    """单元格格式化：整数原样，浮点数 '.17g'，枚举写名称"""
    if isinstance(value, Enum):
        return value.name
    if isinstance(value, (bool, np.bool_)):
        return 'true' if value else 'false'
    if isinstance(value, Integral):
        return str(int(value))
    if isinstance(value, Real):
        return format(float(value), '.17g')
    return str(value)

def _ensure_parent(path: str):
    parent = os.path.dirname(os.path.abspath(path))
    os.makedirs(parent, exist_ok=True)

def write_csv(path: str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> int:
    """
    写入 CSV 报告

    Args:
        path: 输出路径，上级目录不存在时自动创建
        header: 表头
        rows: 已排序的数据行

    Returns:
        写入的数据行数

    Raises:
        OSError: 文件无法写入时
    """
    _ensure_parent(path)
    count = 0
    with open(path, 'w', newline='', encoding='utf-8') as handle:
        writer = csv.writer(handle, lineterminator='\n')
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_value(v) for v in row])
            count += 1
    logger.debug(f"已写入CSV: {path} ({count} 行)")
    return count

def to_builtin(value: Any) -> Any:
    """把 numpy 标量/数组与枚举转换为 JSON 可序列化的内置类型"""
    if isinstance(value, dict):
        return {str(k): to_builtin(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_builtin(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_builtin(v) for v in value.tolist()]
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, Integral):
        return int(value)
    if isinstance(value, Real):
        value = float(value)
        # JSON 不支持 inf/nan
        return value if math.isfinite(value) else str(value)
    return value

def dumps_report(payload: Dict[str, Any]) -> str:
    return json.dumps(to_builtin(payload), sort_keys=True, indent=2, ensure_ascii=False) + '\n'

def write_json(path: str, payload: Dict[str, Any]) -> None:
    """
    写入 JSON 报告（键排序）

    Raises:
        OSError: 文件无法写入时
    """
    _ensure_parent(path)
    with open(path, 'w', encoding='utf-8') as handle:
        handle.write(dumps_report(payload))
    logger.debug(f"已写入JSON: {path}")
