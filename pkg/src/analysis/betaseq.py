"""
重参数化 φ 及 β 序列
β_j = φ⁻¹(α_j)，对应的菱形边长 u_j = √2 + β_j, v_j = √2 − β_j
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, Iterable, Optional, Tuple

import numpy as np
from scipy import optimize

from src.analysis.lowdisc import QuadraticIrrational, alpha_seq, integrate_unit
from src.analysis.profiles import SQRT2, HALF_SQRT2, h0
from src.validators import ParamValidators, ValidationError

logger = logging.getLogger("uniform_graph")

DEFAULT_XI_GRID = 129
_BREAKPOINT_BLOCK_CELLS = 1_000_000

def phi(t):
    """
    φ(t) = (t/√(1−t²) + 1)/2，[−√2/2, √2/2] → [0, 1] 严格递增

    Raises:
        ValidationError: |t| > √2/2 时
    """
    arr = np.asarray(t, dtype=float)
    ParamValidators.validate_in_range(arr, -HALF_SQRT2, HALF_SQRT2, "t", tolerance=1e-15)
    a = np.clip(arr, -HALF_SQRT2, HALF_SQRT2)
    out = np.clip((a / np.sqrt(1.0 - a * a) + 1.0) / 2.0, 0.0, 1.0)
    return float(out) if arr.ndim == 0 else out

def phi_inv(y):
    """
    φ⁻¹(y) = s/√(1+s²)，s = 2y − 1

    Raises:
        ValidationError: y ∉ [0, 1] 时
    """
    arr = np.asarray(y, dtype=float)
    ParamValidators.validate_in_range(arr, 0.0, 1.0, "y", tolerance=1e-15)
    s = 2.0 * np.clip(arr, 0.0, 1.0) - 1.0
    out = s / np.sqrt(1.0 + s * s)
    return float(out) if arr.ndim == 0 else out

def phi_inv_bisect(y: float, xtol: float = 1e-15) -> float:
    """二分法求 φ⁻¹(y)，用于校验闭式 phi_inv"""
    ParamValidators.validate_in_range(y, 0.0, 1.0, "y")
    if y <= 0.0:
        return -HALF_SQRT2
    if y >= 1.0:
        return HALF_SQRT2
    return float(optimize.bisect(lambda t: phi(t) - y, -HALF_SQRT2, HALF_SQRT2,
                                 xtol=xtol, maxiter=200))

def circle_integral(x: float) -> float:
    """
    ∫₀¹ |x − φ⁻¹(y)| dy，理论值为 √2 − √(1−x²)

    Raises:
        ValidationError: |x| > √2/2 时
        QuadratureError: 积分不收敛时
    """
    ParamValidators.validate_in_range(x, -HALF_SQRT2, HALF_SQRT2, "x")
    kink = phi(x)
    points = [kink] if 0.0 < kink < 1.0 else None
    return integrate_unit(lambda y: abs(x - phi_inv(y)), points=points)

@dataclass(frozen=True)
class BetaSequence:
    """
    β_j ∈ [−√2/2, √2/2] 的双向序列

    constant 不为 None 时为调试用的常数序列（β ≡ constant），此时 α 不参与计算。
    """
    alpha: QuadraticIrrational
    D: float = SQRT2
    constant: Optional[float] = None

    def __post_init__(self):
        if abs(self.D - SQRT2) > 1e-15:
            raise ValidationError(f"D 固定为 √2，当前值: {self.D}")
        if self.constant is not None:
            ParamValidators.validate_in_range(self.constant, -HALF_SQRT2, HALF_SQRT2, "常数β")

    @classmethod
    def default(cls) -> "BetaSequence":
        return cls(QuadraticIrrational.default())

    @classmethod
    def debug_constant(cls, value: float = 0.0) -> "BetaSequence":
        return cls(QuadraticIrrational.default(), constant=float(value))

    @property
    def is_constant(self) -> bool:
        return self.constant is not None

    def __call__(self, j):
        """β_j，j 为整数或整数数组"""
        arr = np.asarray(j)
        if self.constant is not None:
            out = np.full(arr.shape, self.constant, dtype=float)
            return float(out) if arr.ndim == 0 else out
        return phi_inv(alpha_seq(self.alpha, arr))

    def window(self, m: int, n: int) -> np.ndarray:
        """β_m, …, β_{n−1}"""
        ParamValidators.validate_window(m, n)
        return np.asarray(self(np.arange(m, n, dtype=np.int64)), dtype=float)

    def edge_lengths(self, j) -> Tuple:
        """(u_j, v_j) = (D + β_j, D − β_j)"""
        b = self(j)
        return self.D + b, self.D - b

def beta(seq: BetaSequence, j):
    """β_j = φ⁻¹(α_j)；|j| 超出浮点有效范围时抛出 ValidationError"""
    return seq(j)

def modsum_error(xi: float, m: int, n: int, seq: BetaSequence = None) -> float:
    """
    |(n−m)·h⁰(ξ) − Σ_{j=m..n−1} (√2 − |ξ − β_j|)|

    Args:
        xi: ξ ∈ [−√2, √2]
        m, n: 窗口，m < n
        seq: β 序列，缺省为默认 α 的序列
    """
    ParamValidators.validate_window(m, n)
    seq = seq or BetaSequence.default()
    betas = seq.window(m, n)
    terms = seq.D - np.abs(xi - betas)
    return abs((n - m) * h0(xi) - math.fsum(terms))

def _xi_grid(grid: int) -> np.ndarray:
    # h⁰ 在 ±√2/2 处换支，显式加入
    return np.union1d(np.linspace(-SQRT2, SQRT2, grid), (-HALF_SQRT2, HALF_SQRT2))

def _deviation_prefix(seq: BetaSequence, lo: int, hi: int, grid: int) -> np.ndarray:
    # 每个 ξ 一行: Σ_{j<k} (√2 − |ξ−β_j| − h⁰(ξ)) 的前缀和，列对应 k = lo..hi
    xi = _xi_grid(grid)
    betas = seq.window(lo, hi)
    terms = seq.D - np.abs(xi[:, None] - betas[None, :]) - h0(xi)[:, None]
    prefix = np.zeros((xi.size, hi - lo + 1), dtype=float)
    np.cumsum(terms, axis=1, out=prefix[:, 1:])
    return prefix

def _window_max(prefix: np.ndarray, size: int) -> float:
    if size >= prefix.shape[1]:
        raise ValidationError(f"窗口大小 {size} 超出扫描范围 {prefix.shape[1] - 1}")
    sums = prefix[:, size:] - prefix[:, :-size]
    return float(np.max(np.abs(sums)))

def _breakpoint_window_max(seq: BetaSequence, lo: int, hi: int, size: int) -> float:
    """
    在每个窗口自身的断点 ξ = β_k 处取 modsum 误差的最大值

    对每个 k 取 j ∈ [k−w+1, k+w−1] 的局部前缀和，包含 k 的 w 个窗口一次得到；按行分块控制内存。
    """
    n = hi - lo
    if size > n:
        raise ValidationError(f"窗口大小 {size} 超出扫描范围 {n}")
    betas = seq.window(lo, hi)
    width = 2 * size - 1
    padded = np.zeros(n + 2 * (size - 1))
    padded[size - 1:size - 1 + n] = betas
    offsets = np.arange(width)
    starts = np.arange(size)
    rows = max(1, _BREAKPOINT_BLOCK_CELLS // (2 * size))
    worst = 0.0
    for first in range(0, n, rows):
        ks = np.arange(first, min(n, first + rows))
        xi = betas[ks]
        local = padded[ks[:, None] + offsets[None, :]]
        terms = seq.D - np.abs(xi[:, None] - local) - h0(xi)[:, None]
        prefix = np.zeros((ks.size, width + 1))
        np.cumsum(terms, axis=1, out=prefix[:, 1:])
        sums = prefix[:, size:] - prefix[:, :size]
        # 窗口 [m, m+w) 必须落在 [lo, hi) 内
        m = ks[:, None] - size + 1 + starts[None, :]
        valid = (m >= 0) & (m + size <= n)
        worst = max(worst, float(np.max(np.abs(sums[valid]))))
    return worst

def window_maxima(seq: BetaSequence, sizes: Iterable[int], start_range: Tuple[int, int] = (-10_000, 10_000),
                  grid: int = DEFAULT_XI_GRID) -> Dict[int, float]:
    """
    对每个窗口大小 w，取 [lo, hi) 内所有起点与 ξ 网格上 modsum_error 的最大值

    用前缀和一次覆盖所有窗口起点。

    Args:
        seq: β 序列
        sizes: 窗口大小集合
        start_range: 窗口须包含于 [lo, hi)
        grid: ξ 网格点数

    Returns:
        窗口大小到最大误差的映射
    """
    lo, hi = start_range
    ParamValidators.validate_window(lo, hi)
    ParamValidators.validate_integer(grid, min_value=2, name="grid")
    sizes = sorted(int(s) for s in sizes)
    for size in sizes:
        ParamValidators.validate_integer(size, min_value=1, max_value=hi - lo, name="窗口大小")
    prefix = _deviation_prefix(seq, lo, hi, grid)
    result = {size: _window_max(prefix, size) for size in sizes}
    logger.debug(f"窗口最大误差: {result}")
    return result

def window_profile_constant(seq: BetaSequence, size: int, start_range: Tuple[int, int] = (-10_000, 10_000),
                            grid: int = DEFAULT_XI_GRID) -> float:
    """
    (n−m)·sup_ξ |h^{m,n} − h⁰| 在给定窗口大小的所有窗口上的最大值

    sup 取在 ξ 网格与每个窗口自身的断点 β_j 上，与 profile_sup_distance 的取点一致。
    """
    lo, hi = start_range
    on_grid = window_maxima(seq, [size], start_range, grid)[size]
    return max(on_grid, _breakpoint_window_max(seq, lo, hi, size))

def calibrate_profile_constant(seq: BetaSequence, max_size: int = 100,
                               start_range: Tuple[int, int] = (-10_000, 10_000),
                               grid: int = DEFAULT_XI_GRID) -> float:
    """
    Ĉ = max_{1≤w≤max_size} max_{窗口} (n−m)·sup_ξ |h^{m,n}(ξ) − h⁰(ξ)|

    (n−m)(h^{m,n} − h⁰) 恰为 modsum 误差的相反数，因此网格部分与 window_maxima 共用前缀和；
    断点部分见 _breakpoint_window_max。
    """
    lo, hi = start_range
    ParamValidators.validate_window(lo, hi)
    ParamValidators.validate_integer(max_size, min_value=1, max_value=hi - lo, name="max_size")
    prefix = _deviation_prefix(seq, lo, hi, grid)
    constant = max(max(_window_max(prefix, size), _breakpoint_window_max(seq, lo, hi, size))
                   for size in range(1, max_size + 1))
    logger.info(f"轮廓常数校准完成: Ĉ={constant:.6g} (窗口 ≤ {max_size}, 范围 [{lo}, {hi}))")
    return constant
