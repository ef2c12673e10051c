import math
from numbers import Integral, Real
from typing import Any, Optional

import numpy as np

class ValidationError(Exception):
    """参数验证错误"""
    pass

class ParamValidators:
    """数值参数验证器集合"""

    @staticmethod
    def validate_finite(value: Any, name: str = "数值") -> bool:
        """
        验证数值（或数组）全部有限

        Args:
            value: 标量或数组
            name: 参数名称，用于错误信息

        Returns:
            如果全部有限返回True

        Raises:
            ValidationError: 当存在 NaN 或无穷时
        """
        arr = np.asarray(value, dtype=float)
        if not np.all(np.isfinite(arr)):
            raise ValidationError(f"{name}必须是有限数值")
        return True

    @staticmethod
    def validate_positive(value: Any, name: str = "数值") -> bool:
        """
        验证数值为有限正数

        Raises:
            ValidationError: 当值不是正数时
        """
        if isinstance(value, bool) or not isinstance(value, Real):
            raise ValidationError(f"{name}必须是实数，当前类型: {type(value).__name__}")
        if not math.isfinite(value) or value <= 0:
            raise ValidationError(f"{name}必须是有限正数，当前值: {value}")
        return True

    @staticmethod
    def validate_integer(value: Any, min_value: Optional[int] = None, max_value: Optional[int] = None,
                         name: str = "值") -> bool:
        """
        验证整数值是否在允许范围内

        Args:
            value: 要验证的整数值
            min_value: 最小允许值（可选）
            max_value: 最大允许值（可选）
            name: 参数名称

        Returns:
            如果值合法返回True

        Raises:
            ValidationError: 当值不合法时
        """
        if isinstance(value, bool) or not isinstance(value, Integral):
            raise ValidationError(f"{name}必须是整数，当前类型: {type(value).__name__}")

        if min_value is not None and value < min_value:
            raise ValidationError(f"{name}必须大于或等于 {min_value}")

        if max_value is not None and value > max_value:
            raise ValidationError(f"{name}必须小于或等于 {max_value}")

        return True

    @staticmethod
    def validate_in_range(value: Any, low: float, high: float, name: str = "数值",
                          tolerance: float = 0.0) -> bool:
        """
        验证数值（或数组）位于闭区间 [low, high] 内，允许给定容差

        Raises:
            ValidationError: 当存在越界值时
        """
        ParamValidators.validate_finite(value, name)
        arr = np.asarray(value, dtype=float)
        if arr.size and (arr.min() < low - tolerance or arr.max() > high + tolerance):
            raise ValidationError(f"{name}超出定义域 [{low}, {high}]")
        return True

    @staticmethod
    def validate_window(m: Any, n: Any) -> bool:
        """验证求和窗口 [m, n) 非空"""
        ParamValidators.validate_integer(m, name="m")
        ParamValidators.validate_integer(n, name="n")
        if not m < n:
            raise ValidationError(f"窗口为空: 需要 m < n，当前 m={m}, n={n}")
        return True

