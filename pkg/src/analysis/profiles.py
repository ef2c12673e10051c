"""
平面范数与对偶轮廓
提供菱形范数、对偶轮廓、Legendre 型变换、轮廓平均以及目标轮廓 h⁰ / 范数 ‖·‖⁰

对偶轮廓 h 定义在 [−D, D] 上，D = ‖e₁‖。对 y > 0 有
    ‖(x, y)‖ = sup_{ξ∈[−D,D]} { ξx + h(ξ)y }，
对 y = 0 有 ‖(x, 0)‖ = D|x|，y < 0 时由中心对称得到。
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional, Tuple

import numpy as np
from scipy import optimize

from src.config import ProfileConfig
from src.validators import ParamValidators, ValidationError

logger = logging.getLogger("uniform_graph")

SQRT2 = math.sqrt(2.0)
HALF_SQRT2 = SQRT2 / 2.0

# 点组分块大小，控制 (点数 × 断点数) 矩阵内存
_CHUNK_CELLS = 4_000_000

class ProfileError(Exception):
    """对偶轮廓相关错误"""
    pass

class ProfileKind(Enum):
    """对偶轮廓的表示方式"""
    RHOMBUS = 'rhombus'
    AVERAGED = 'averaged'
    CIRCLE_CAP = 'circleCap'
    SAMPLED = 'sampled'

@dataclass(frozen=True, eq=False)
class DualProfile:
    """
    对偶轮廓 h: [−D, D] → R

    rhombus/averaged 由 β 列表给出闭式 D − mean|ξ − β_j|；
    circleCap 由闭式函数给出；sampled 为网格上的分段线性插值。
    """
    D: float
    kind: ProfileKind
    betas: Optional[np.ndarray] = None
    xi: Optional[np.ndarray] = None
    values: Optional[np.ndarray] = None
    func: Optional[Callable] = None
    junctions: Tuple[float, ...] = ()
    _sorted: Optional[np.ndarray] = field(default=None, repr=False)
    _prefix: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        ParamValidators.validate_positive(self.D, "D")
        if self.kind in (ProfileKind.RHOMBUS, ProfileKind.AVERAGED):
            if self.betas is None or len(self.betas) == 0:
                raise ProfileError("β 列表不能为空")
            ordered = np.sort(np.asarray(self.betas, dtype=float))
            object.__setattr__(self, '_sorted', ordered)
            object.__setattr__(self, '_prefix', np.concatenate(([0.0], np.cumsum(ordered))))
        elif self.kind == ProfileKind.SAMPLED:
            if self.xi is None or self.values is None or len(self.xi) < 2:
                raise ProfileError("采样轮廓至少需要两个网格点")
        elif self.func is None:
            raise ProfileError("circleCap 轮廓需要闭式函数")

    @property
    def is_piecewise_linear(self) -> bool:
        return self.kind != ProfileKind.CIRCLE_CAP

    def __call__(self, xi):
        """在 ξ（标量或数组）处求值"""
        arr = np.asarray(xi, dtype=float)
        ParamValidators.validate_in_range(arr, -self.D, self.D, "ξ", tolerance=1e-12)
        flat = np.atleast_1d(arr)
        if self._sorted is not None:
            # mean|ξ−β| 用排序后的前缀和计算
            b, prefix = self._sorted, self._prefix
            count = len(b)
            k = np.searchsorted(b, flat, side='right')
            below = flat * k - prefix[k]
            above = (prefix[-1] - prefix[k]) - flat * (count - k)
            out = self.D - (below + above) / count
        elif self.kind == ProfileKind.SAMPLED:
            out = np.interp(flat, self.xi, self.values)
        else:
            out = np.asarray(self.func(flat), dtype=float)
        return float(out[0]) if arr.ndim == 0 else out.reshape(arr.shape)

    def breakpoints(self) -> np.ndarray:
        """分段线性轮廓的断点（含端点），circleCap 为其拼接点"""
        if self._sorted is not None:
            inner = self._sorted[(self._sorted > -self.D) & (self._sorted < self.D)]
            pts = np.concatenate(([-self.D], inner, [self.D]))
        elif self.kind == ProfileKind.SAMPLED:
            pts = np.asarray(self.xi, dtype=float)
        else:
            pts = np.concatenate(([-self.D], np.asarray(self.junctions, dtype=float), [self.D]))
        return np.unique(pts)

@dataclass(frozen=True, eq=False)
class Norm2D:
    """平面范数，D = ‖e₁‖"""
    D: float
    evaluator: Callable = field(repr=False)

    def __call__(self, x, y):
        """在点 (x, y)（标量或数组）处求值"""
        xs, ys = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        ParamValidators.validate_finite(xs, "x")
        ParamValidators.validate_finite(ys, "y")
        out = np.asarray(self.evaluator(np.atleast_1d(xs).ravel(), np.atleast_1d(ys).ravel()), dtype=float)
        return float(out[0]) if xs.ndim == 0 else out.reshape(xs.shape)

@dataclass(frozen=True, eq=False)
class NormSection:
    """范数截面 f(x) = ‖(x, 1)‖，凸且 f(x) ~ f(−x) ~ Dx"""
    f: Callable = field(repr=False)
    D: float

    def is_convex(self, grid: np.ndarray = None, tolerance: float = 1e-9) -> bool:
        """在网格上检查二阶差分非负"""
        xs = np.linspace(-50.0, 50.0, 2001) if grid is None else np.asarray(grid, dtype=float)
        values = np.asarray([self.f(x) for x in xs], dtype=float)
        second = values[:-2] - 2.0 * values[1:-1] + values[2:]
        return bool(np.all(second >= -tolerance))

    def asymptotic_slope_gap(self, at: float = 1e3) -> float:
        """|x| = at 处割线斜率与 ±D 的最大偏差"""
        right = (self.f(at) - self.f(at - 1.0))
        left = (self.f(-at) - self.f(-at + 1.0))
        return max(abs(right - self.D), abs(left - self.D))

# ----------------------------------------------------------------------
# 菱形范数
# ----------------------------------------------------------------------

def rhombus_norm(u: float, v: float) -> Norm2D:
    """
    菱形范数 ‖p‖ = u|p₁| + v|p₂|，其中 p = p₁(1,1) + p₂(1,−1)

    Args:
        u, v: 正参数

    Returns:
        Norm2D，D = (u+v)/2

    Raises:
        ValidationError: 参数非正时
    """
    ParamValidators.validate_positive(u, "u")
    ParamValidators.validate_positive(v, "v")

    def evaluate(x, y):
        return u * np.abs(x + y) / 2.0 + v * np.abs(x - y) / 2.0
    return Norm2D((u + v) / 2.0, evaluate)

def rhombus_profile(u: float, v: float) -> DualProfile:
    """菱形范数的对偶轮廓 h(ξ) = D − |ξ − β|，D=(u+v)/2, β=(u−v)/2"""
    ParamValidators.validate_positive(u, "u")
    ParamValidators.validate_positive(v, "v")
    return DualProfile((u + v) / 2.0, ProfileKind.RHOMBUS, betas=np.array([(u - v) / 2.0]))

def _window_betas(betas, m: int, n: int) -> np.ndarray:
    # 支持 BetaSequence（window 方法）、可调用对象与从0起的序列
    if hasattr(betas, 'window'):
        return np.asarray(betas.window(m, n), dtype=float)
    if callable(betas):
        return np.asarray(betas(np.arange(m, n)), dtype=float)
    arr = np.asarray(betas, dtype=float)
    if m < 0 or n > len(arr):
        raise ValidationError(f"窗口 [{m}, {n}) 超出序列范围 [0, {len(arr)})")
    return arr[m:n]

def averaged_profile(betas, m: int, n: int, D: float) -> DualProfile:
    """
    轮廓平均 h^{m,n}(ξ) = (1/(n−m))·Σ_{j=m..n−1} (D − |ξ − β_j|)

    Args:
        betas: 可在 [m, n) 上取下标的 β 序列
        m, n: 窗口，m < n
        D: 定义域半宽

    Raises:
        ValidationError: 窗口为空或 β 超出 [−D/2, D/2] 时
    """
    ParamValidators.validate_window(m, n)
    ParamValidators.validate_positive(D, "D")
    window = _window_betas(betas, m, n)
    ParamValidators.validate_in_range(window, -D / 2.0, D / 2.0, "β", tolerance=1e-12)
    return DualProfile(D, ProfileKind.AVERAGED, betas=window)

# ----------------------------------------------------------------------
# 闭式轮廓与目标范数
# ----------------------------------------------------------------------

def h0(xi):
    """
    目标轮廓: √(1−ξ²) (|ξ| ≤ √2/2)，√2 − |ξ| (√2/2 ≤ |ξ| ≤ √2)；C¹ 光滑

    Raises:
        ValidationError: |ξ| > √2 时
    """
    arr = np.asarray(xi, dtype=float)
    ParamValidators.validate_in_range(arr, -SQRT2, SQRT2, "ξ", tolerance=1e-12)
    a = np.minimum(np.abs(arr), SQRT2)
    inner = np.sqrt(np.maximum(1.0 - np.minimum(a, HALF_SQRT2) ** 2, 0.0))
    out = np.where(a <= HALF_SQRT2, inner, SQRT2 - a)
    return float(out) if arr.ndim == 0 else out

def norm0(x, y):
    """‖(x,y)‖⁰ = max(|(x,y)|, √2|x|)"""
    xs = np.asarray(x, dtype=float)
    ys = np.asarray(y, dtype=float)
    out = np.maximum(np.hypot(xs, ys), SQRT2 * np.abs(xs))
    return float(out) if out.ndim == 0 else out

def circle_cap_profile(D: float = 1.0) -> DualProfile:
    """欧氏范数（半径 D 的圆）的对偶轮廓 √(D² − ξ²)"""
    ParamValidators.validate_positive(D, "D")
    return DualProfile(D, ProfileKind.CIRCLE_CAP,
                       func=lambda xi: np.sqrt(np.maximum(D * D - xi * xi, 0.0)))

def h0_profile() -> DualProfile:
    """‖·‖⁰ 的对偶轮廓 h⁰，D = √2"""
    return DualProfile(SQRT2, ProfileKind.CIRCLE_CAP, func=h0, junctions=(-HALF_SQRT2, HALF_SQRT2))

def is_concave(h: DualProfile, grid: int = None, tolerance: float = None) -> bool:
    """在均匀网格与断点的并集上检查凹性（二阶差分 ≤ 容差）"""
    grid = grid or ProfileConfig.GRID
    tolerance = ProfileConfig.CONCAVITY_TOLERANCE if tolerance is None else tolerance
    xs = np.union1d(np.linspace(-h.D, h.D, grid), h.breakpoints())
    values = h(xs)
    left = xs[1:-1] - xs[:-2]
    right = xs[2:] - xs[1:-1]
    # 非均匀网格：中点值不低于两侧弦
    chord = (values[:-2] * right + values[2:] * left) / (left + right)
    return bool(np.all(values[1:-1] >= chord - tolerance))

# ----------------------------------------------------------------------
# Legendre 型变换
# ----------------------------------------------------------------------

def section_of(norm: Norm2D) -> NormSection:
    """范数截面 f(x) = ‖(x, 1)‖"""
    return NormSection(lambda x: norm(x, 1.0), norm.D)

def _asymptotic_offset(f: Callable, sign: float, D: float) -> float:
    # h(±D) = lim_{x→±∞} f(x) ∓ Dx；在几何增长的有限点集上取下确界
    xs = sign * np.logspace(0, 8, 33)
    return float(min(f(x) - sign * D * x for x in xs))

def _bracket(objective: Callable, max_steps: int) -> Tuple[float, float]:
    # 凸目标向两侧倍增直到不再下降
    bounds = []
    for direction in (1.0, -1.0):
        step = 1.0
        for _ in range(max_steps):
            if objective(direction * 2.0 * step) >= objective(direction * step):
                break
            step *= 2.0
        else:
            raise ProfileError("无法确定极小值所在区间（截面可能非凸）")
        bounds.append(direction * 2.0 * step)
    return bounds[1], bounds[0]

def legendre_profile(section: NormSection, grid: int = None) -> DualProfile:
    """
    由截面计算对偶轮廓 h(ξ) = inf_x { f(x) − ξx }

    内点处在倍增得到的区间上做有界黄金分割搜索；端点 ±D 处取渐近下确界。

    Args:
        section: 凸截面，斜率位于 [−D, D]
        grid: 网格点数（≥ 3）

    Returns:
        采样轮廓

    Raises:
        ProfileError: 无法确定极小值区间或结果非凹时
    """
    grid = grid or ProfileConfig.GRID
    ParamValidators.validate_integer(grid, min_value=3, name="grid")
    D = section.D
    f = section.f
    xi_grid = np.linspace(-D, D, grid)
    values = np.empty(grid, dtype=float)
    values[0] = _asymptotic_offset(f, -1.0, D)
    values[-1] = _asymptotic_offset(f, 1.0, D)
    for i in range(1, grid - 1):
        xi = xi_grid[i]

        def objective(x, xi=xi):
            return f(x) - xi * x
        low, high = _bracket(objective, ProfileConfig.MAX_BRACKET_STEPS)
        result = optimize.minimize_scalar(objective, bounds=(low, high), method='bounded',
                                          options={'xatol': 1e-12, 'maxiter': 2000})
        # 区间端点也参与比较，处理平台情形
        values[i] = min(result.fun, objective(low), objective(high), objective(0.0))
    profile = DualProfile(D, ProfileKind.SAMPLED, xi=xi_grid, values=values)
    if not is_concave(profile, grid=grid, tolerance=1e-7):
        raise ProfileError("Legendre 变换结果非凹，截面可能非凸")
    logger.debug(f"Legendre 变换完成: D={D}, 网格点数={grid}")
    return profile

# ----------------------------------------------------------------------
# 由轮廓恢复范数
# ----------------------------------------------------------------------

def _sup_over_candidates(candidates: np.ndarray, hc: np.ndarray, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    out = np.empty(len(x), dtype=float)
    step = max(1, _CHUNK_CELLS // max(len(candidates), 1))
    for start in range(0, len(x), step):
        xs = x[start:start + step, None]
        ys = y[start:start + step, None]
        out[start:start + step] = np.max(xs * candidates[None, :] + ys * hc[None, :], axis=1)
    return out

def _sup_smooth(h: DualProfile, grid: int, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    # 网格上取最大值，再在相邻两格内做有界搜索细化
    candidates = np.union1d(np.linspace(-h.D, h.D, grid), h.breakpoints())
    hc = h(candidates)
    out = np.empty(len(x), dtype=float)
    for i in range(len(x)):
        objective = x[i] * candidates + y[i] * hc
        k = int(np.argmax(objective))
        lo = candidates[max(k - 1, 0)]
        hi = candidates[min(k + 1, len(candidates) - 1)]
        best = objective[k]
        if hi > lo:
            result = optimize.minimize_scalar(lambda t: -(x[i] * t + y[i] * h(t)), bounds=(lo, hi),
                                              method='bounded', options={'xatol': 1e-13})
            best = max(best, -result.fun)
        out[i] = best
    return out

def norm_from_profile(h: DualProfile, grid: int = None) -> Norm2D:
    """
    由对偶轮廓恢复范数

    分段线性轮廓在断点 {β_j, ±D}（或采样网格）上精确取 sup；
    circleCap 轮廓在网格上取 sup 后局部细化。

    Raises:
        ProfileError: 轮廓非凹时
    """
    grid = grid or ProfileConfig.GRID
    if not is_concave(h, grid=min(grid, 513)):
        raise ProfileError(f"轮廓 {h.kind.value} 非凹，不能确定范数")
    D = h.D
    if h.is_piecewise_linear:
        candidates = h.breakpoints()
        hc = h(candidates)
        upper = lambda x, y: _sup_over_candidates(candidates, hc, x, y)
    else:
        upper = lambda x, y: _sup_smooth(h, grid, x, y)

    def evaluate(x, y):
        # y < 0 时用 ‖p‖ = ‖−p‖ 翻到上半平面
        flip = y < 0
        xu = np.where(flip, -x, x)
        yu = np.abs(y)
        out = D * np.abs(xu)
        positive = yu > 0
        if positive.any():
            out[positive] = upper(xu[positive], yu[positive])
        return out
    return Norm2D(D, evaluate)

def profile_sup_distance(h1: DualProfile, h2: DualProfile, grid: int = None) -> float:
    """
    sup_{ξ} |h₁(ξ) − h₂(ξ)|，在两者断点并集与均匀网格上取最大

    Raises:
        ProfileError: 两者定义域不一致时
    """
    if abs(h1.D - h2.D) > 1e-12:
        raise ProfileError(f"定义域不一致: D₁={h1.D}, D₂={h2.D}")
    grid = grid or ProfileConfig.GRID
    xs = np.union1d(np.union1d(np.linspace(-h1.D, h1.D, grid), h1.breakpoints()), h2.breakpoints())
    xs = np.clip(xs, -h1.D, h1.D)
    return float(np.max(np.abs(h1(xs) - h2(xs))))
