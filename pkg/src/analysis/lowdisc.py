"""
低差异旋转序列
提供二次无理数旋转、Diophantine 下界、Fourier 尾和以及遍历和/积分逼近误差
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, Sequence, Union

import numpy as np
from scipy import integrate

from src.config import AlphaLabel, SequenceConfig
from src.validators import ParamValidators, ValidationError

logger = logging.getLogger("uniform_graph")

class QuadratureError(Exception):
    """自适应积分不收敛"""
    pass

_LABEL_VALUES = {
    AlphaLabel.SQRT2_MINUS_1: math.sqrt(2.0) - 1.0,
    AlphaLabel.GOLDEN_CONJUGATE: (math.sqrt(5.0) - 1.0) / 2.0,
}

@dataclass(frozen=True)
class QuadraticIrrational:
    """
    旋转数 α ∈ (0,1)

    标签为 custom 时由调用方保证 value 为二次无理数；构造时仅做数值检查
    （区间与 Liouville 下界为正）。
    """
    value: float
    label: AlphaLabel = AlphaLabel.CUSTOM

    def __post_init__(self):
        ParamValidators.validate_finite(self.value, "α")
        if not 0.0 < self.value < 1.0:
            raise ValidationError(f"α必须位于 (0,1) 内，当前值: {self.value}")

    @classmethod
    def from_label(cls, label: Union[str, AlphaLabel]) -> "QuadraticIrrational":
        """
        按标签构造内置的旋转数

        Args:
            label: sqrt2_minus_1 或 golden_conjugate

        Raises:
            ValidationError: 未知标签或 custom 标签
        """
        try:
            label = AlphaLabel(label)
        except ValueError:
            raise ValidationError(f"未知的α标签: {label}")
        if label not in _LABEL_VALUES:
            raise ValidationError("custom 标签需要显式给出数值，请使用 QuadraticIrrational.custom")
        return cls(_LABEL_VALUES[label], label)

    @classmethod
    def custom(cls, value: float, scan: int = None) -> "QuadraticIrrational":
        """构造自定义旋转数，并检查前 scan 项的 Liouville 下界为正"""
        alpha = cls(float(value), AlphaLabel.CUSTOM)
        scan = scan or SequenceConfig.MARGIN_SCAN
        margin = liouville_margin(alpha, scan)
        if margin <= 0:
            raise ValidationError(f"α={value} 在前 {scan} 项内落在整数上，不是无理数")
        logger.debug(f"自定义α={value}, Liouville下界={margin:.6g} (K={scan})")
        return alpha

    @classmethod
    def default(cls) -> "QuadraticIrrational":
        """从配置读取默认旋转数"""
        return cls.from_label(SequenceConfig.ALPHA)

AlphaLike = Union[QuadraticIrrational, float]

def _alpha_value(alpha: AlphaLike) -> float:
    # 允许直接传入浮点数（例如有理数对照）
    if isinstance(alpha, QuadraticIrrational):
        return alpha.value
    ParamValidators.validate_finite(alpha, "α")
    return float(alpha)

def _as_output(result: np.ndarray, scalar: bool):
    return float(result) if scalar else result

def dist_to_int(t):
    """
    到最近整数的距离 d(t, Z)

    Args:
        t: 实数或数组

    Returns:
        [0, 1/2] 内的值，与输入形状一致

    Raises:
        ValidationError: 输入包含非有限值时
    """
    ParamValidators.validate_finite(t, "t")
    arr = np.asarray(t, dtype=float)
    return _as_output(np.abs(arr - np.rint(arr)), arr.ndim == 0)

def _check_indices(j: np.ndarray):
    if j.size and np.abs(j).max() > SequenceConfig.MAX_INDEX:
        raise ValidationError(f"下标超出浮点有效范围 |j| ≤ {SequenceConfig.MAX_INDEX}")

def alpha_seq(alpha: AlphaLike, j):
    """
    序列 α_j = 2·d(jα, Z)，关于 j 为偶函数

    Args:
        alpha: 旋转数
        j: 整数或整数数组，|j| ≤ MAX_INDEX

    Returns:
        [0,1] 内的值
    """
    arr = np.asarray(j)
    _check_indices(arr)
    value = _alpha_value(alpha)
    return _as_output(2.0 * np.abs(arr * value - np.rint(arr * value)), arr.ndim == 0)

def _k_values(alpha: AlphaLike, K: int):
    ParamValidators.validate_integer(K, min_value=1, name="K")
    k = np.arange(1, K + 1, dtype=np.int64)
    value = _alpha_value(alpha)
    kd = k * value
    return k.astype(float), np.abs(kd - np.rint(kd))

def liouville_margin(alpha: AlphaLike, K: int) -> float:
    """
    min_{1≤k≤K} k·d(kα, Z)，常数 c(α) 的数值下界见证

    Args:
        alpha: 旋转数（也可传有理数做对照，此时可能为 0）
        K: 扫描上限
    """
    k, d = _k_values(alpha, K)
    return float(np.min(k * d))

def fourier_tail_sum(alpha: AlphaLike, K: int) -> float:
    """Σ_{k=1..K} 1/(k²·d(kα,Z))，随 K 单调不减"""
    k, d = _k_values(alpha, K)
    with np.errstate(divide='raise'):
        try:
            terms = 1.0 / (k * k * d)
        except FloatingPointError:
            raise ValidationError("存在 kα 为整数的项，Fourier 尾和发散")
    return float(math.fsum(terms))

def liouville_series_bound(c: float) -> float:
    """由 Liouville 常数 c 得到的尾和上界 (8/c²)·(π²/6)"""
    ParamValidators.validate_positive(c, "c")
    return 8.0 / (c * c) * math.pi ** 2 / 6.0

def _evaluate(f: Callable, xs: np.ndarray) -> np.ndarray:
    values = np.asarray(f(xs), dtype=float)
    if values.shape != xs.shape:
        values = np.broadcast_to(values, xs.shape)
    return values

def _rotation_points(alpha: AlphaLike, m: int, n: int) -> np.ndarray:
    ParamValidators.validate_window(m, n)
    j = np.arange(m, n, dtype=np.int64)
    _check_indices(j)
    x = j * _alpha_value(alpha)
    return x - np.floor(x)

def ergodic_sum(f: Callable, alpha: AlphaLike, m: int, n: int) -> float:
    """
    Σ_{j=m..n−1} f({jα})

    Args:
        f: 圆周上的函数，需接受 numpy 数组
        alpha: 旋转数
        m, n: 求和窗口，m < n
    """
    values = _evaluate(f, _rotation_points(alpha, m, n))
    return float(math.fsum(values))

def max_partial_sum(f: Callable, alpha: AlphaLike, n: int, m: int = 0) -> float:
    """max_{1≤k≤n} |Σ_{j=m}^{m+k−1} f({jα})|"""
    values = _evaluate(f, _rotation_points(alpha, m, m + n))
    return float(np.max(np.abs(np.cumsum(values))))

def integrate_unit(f: Callable, points: Sequence[float] = None) -> float:
    """
    ∫₀¹ f，自适应积分，绝对误差 QUAD_TOLERANCE；points 为已知的不光滑点

    Raises:
        QuadratureError: 积分不收敛时
    """
    tol = SequenceConfig.QUAD_TOLERANCE
    result = integrate.quad(lambda x: float(f(x)), 0.0, 1.0, epsabs=tol, epsrel=0.0,
                            limit=500, full_output=1, points=points)
    if len(result) > 3:
        raise QuadratureError(f"自适应积分未收敛: {result[3]}")
    value, abserr = result[0], result[1]
    if abserr > tol:
        raise QuadratureError(f"自适应积分误差 {abserr:.3g} 超过容差 {tol:.3g}")
    return float(value)

def integral_approx_error(f: Callable, alpha: AlphaLike, m: int, n: int, integral: float = None) -> float:
    """
    |Σ_{j=m..n−1} f(α_j) − (n−m)·∫₀¹f|

    Args:
        f: [0,1] 上分段光滑的函数，需接受 numpy 数组
        alpha: 旋转数
        m, n: 求和窗口
        integral: 已知的积分值（可选，缺省时用自适应积分计算）

    Raises:
        QuadratureError: 积分不收敛时
    """
    ParamValidators.validate_window(m, n)
    if integral is None:
        integral = integrate_unit(f)
    j = np.arange(m, n, dtype=np.int64)
    values = _evaluate(f, np.asarray(alpha_seq(alpha, j), dtype=float))
    return abs(math.fsum(values) - (n - m) * integral)

def quadrature_error_profile(f: Callable, alpha: AlphaLike, scales: Iterable[int],
                             integral: float = None) -> Dict[int, float]:
    """
    各尺度 n 上前缀误差的最大值 max_{k≤n} |Σ_{j<k} f(α_j) − k∫f|

    Returns:
        尺度到最大误差的映射
    """
    scales = sorted(int(s) for s in scales)
    if not scales:
        return {}
    if integral is None:
        integral = integrate_unit(f)
    top = scales[-1]
    ParamValidators.validate_integer(top, min_value=1, name="n")
    j = np.arange(0, top, dtype=np.int64)
    deviation = np.cumsum(_evaluate(f, np.asarray(alpha_seq(alpha, j), dtype=float)) - integral)
    running = np.maximum.accumulate(np.abs(deviation))
    return {n: float(running[n - 1]) for n in scales}

def fold_to_circle(f0: Callable) -> Callable:
    """
    把 [0,1] 上的函数折叠到圆周: g(x)=f₀(2x) (x≤1/2), g(x)=f₀(2−2x) (x≥1/2)

    Returns:
        接受标量或数组的函数 g，g(0)=g(1)
    """
    def g(x):
        arr = np.asarray(x, dtype=float)
        flat = np.atleast_1d(arr)
        out = np.empty(flat.shape, dtype=float)
        low = flat <= 0.5
        if low.any():
            out[low] = _evaluate(f0, 2.0 * flat[low])
        if (~low).any():
            out[~low] = _evaluate(f0, 2.0 - 2.0 * flat[~low])
        return float(out[0]) if arr.ndim == 0 else out.reshape(arr.shape)
    return g
