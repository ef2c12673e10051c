"""
序列与轮廓命令
verify-sequence 与 verify-profile
"""

import logging
import math
from typing import Dict, List

import numpy as np

from src.analysis.betaseq import BetaSequence, calibrate_profile_constant, window_maxima, window_profile_constant
from src.analysis.lowdisc import (fourier_tail_sum, liouville_margin, liouville_series_bound,
                                  quadrature_error_profile)
from src.analysis.profiles import (SQRT2, Norm2D, h0_profile, legendre_profile, norm0,
                                   norm_from_profile, profile_sup_distance, rhombus_norm, rhombus_profile,
                                   section_of)
from src.config import CommandType
from src.commands.command_base import CommandBase, CommandRegistry
from src.output.writers import write_json

logger = logging.getLogger("uniform_graph")

DEFAULT_SEQUENCE_N = 100_000
WINDOW_SIZES = (100, 1_000, 10_000)
WINDOW_RANGE = (-10_000, 10_000)
TAIL_SCALES = (100, 1_000, 10_000, 100_000)
# Ĉ 由不超过该长度的窗口校准，更长窗口的常数不得超过 1.05·Ĉ
CALIBRATION_SIZE = 100
PROFILE_SLACK = 1.05

# 轮廓检查的规模上限
ROUND_TRIP_PAIRS = 100
LEGENDRE_PAIRS = 20
LEGENDRE_GRID = 101
H0_POINTS = 500

def _square(x):
    return x * x

# f(x)=x² 时 4·(V(f′)+|f′(0)|+|f′(1)|) = 4·(2+0+2)
SQUARE_FOLD_VARIATION = 16.0

def _decades(low: int, high: int) -> List[int]:
    scales = []
    n = low
    while n <= high:
        scales.append(n)
        n *= 10
    return scales or [high]

@CommandBase.handle_command_error
def verify_sequence_command(config) -> int:
    """窗口误差有界、x² 的求积误差不增长、Fourier 尾和收敛"""
    command = CommandBase(config)
    n = config.half_width(DEFAULT_SEQUENCE_N)
    alpha = config.rotation()
    seq = BetaSequence(alpha)

    sizes = [s for s in WINDOW_SIZES if s <= min(n, WINDOW_RANGE[1] - WINDOW_RANGE[0])]
    with command.timed_step("窗口误差"):
        windows = window_maxima(seq, sizes, WINDOW_RANGE) if sizes else {}
    if len(windows) >= 2:
        smallest, largest = windows[sizes[0]], windows[sizes[-1]]
        command.check(largest <= 2.0 * smallest, f"窗口误差增长: {largest:.6g} > 2 × {smallest:.6g}")

    long_sizes = [s for s in sizes if s > CALIBRATION_SIZE]
    with command.timed_step("轮廓常数"):
        constant = calibrate_profile_constant(seq, CALIBRATION_SIZE, WINDOW_RANGE)
        long_constants = {s: window_profile_constant(seq, s, WINDOW_RANGE) for s in long_sizes}
    profile_ratios = {s: c / constant if constant > 0 else math.inf for s, c in long_constants.items()}
    for size, ratio in profile_ratios.items():
        command.check(ratio <= PROFILE_SLACK, f"窗口 {size} 的轮廓常数为 Ĉ 的 {ratio:.4g} 倍 > {PROFILE_SLACK}")

    scales = _decades(1_000, n)
    with command.timed_step("求积误差"):
        quadrature = quadrature_error_profile(_square, alpha, scales, integral=1.0 / 3.0)
    low, high = quadrature[scales[0]], quadrature[scales[-1]]
    quadrature_ratio = high / low if low > 0 else math.inf
    command.check(quadrature_ratio <= 2.0, f"求积误差增长: 比值 {quadrature_ratio:.4g} > 2")

    tails = {K: fourier_tail_sum(alpha, K) for K in TAIL_SCALES}
    increments = [tails[b] - tails[a] for a, b in zip(TAIL_SCALES, TAIL_SCALES[1:])]
    for earlier, later in zip(increments, increments[1:]):
        command.check(later <= earlier / 2.0, f"尾和增量下降不足两倍: {later:.6g} vs {earlier:.6g}")
    margin = liouville_margin(alpha, TAIL_SCALES[-1])
    bound = liouville_series_bound(margin)
    command.check(tails[TAIL_SCALES[-1]] <= bound, f"尾和 {tails[TAIL_SCALES[-1]]:.6g} 超过上界 {bound:.6g}")

    summary = {
        'n': n,
        'alpha': alpha.value,
        'window_range': list(WINDOW_RANGE),
        'window_maxima': windows,
        'profile_constant': constant,
        'profile_constant_sizes': long_constants,
        'profile_constant_ratios': profile_ratios,
        'quadrature_profile': quadrature,
        'quadrature_ratio': quadrature_ratio,
        'fold_variation_bound': SQUARE_FOLD_VARIATION,
        'fourier_tail': tails,
        'fourier_increments': increments,
        'liouville_margin': margin,
        'liouville_series_bound': bound,
    }
    write_json(command.path('sequence_report.json'),
               {'config': config.as_dict(), **command.format_results(summary, "序列验证")})
    return command.finish()

def _round_trip_error(rng: np.random.Generator, pairs: int, points: int) -> float:
    worst = 0.0
    for _ in range(pairs):
        u, v = rng.uniform(0.25, 3.0, size=2)
        x, y = rng.uniform(-10.0, 10.0, size=(2, points))
        recovered = norm_from_profile(rhombus_profile(u, v))(x, y)
        worst = max(worst, float(np.max(np.abs(recovered - rhombus_norm(u, v)(x, y)))))
    return worst

def _legendre_rhombus_error(rng: np.random.Generator, pairs: int) -> float:
    worst = 0.0
    for _ in range(pairs):
        # u + v = 2√2，D = √2
        u = rng.uniform(0.1, 2.0 * SQRT2 - 0.1)
        v = 2.0 * SQRT2 - u
        sampled = legendre_profile(section_of(rhombus_norm(u, v)), grid=LEGENDRE_GRID)
        # 只在采样网格上比较，网格之间是线性插值
        exact = rhombus_profile(u, v)(sampled.xi)
        worst = max(worst, float(np.max(np.abs(sampled.values - exact))))
    return worst

def _norm_difference_excess(rng: np.random.Generator, pairs: int) -> float:
    # max(|‖p‖₁ − ‖p‖₂| − |y|·sup|h₁ − h₂|)，应 ≤ 0
    worst = -math.inf
    for _ in range(pairs):
        # 两个轮廓取同一 D = (u+v)/2
        u1, v1 = rng.uniform(0.25, 3.0, size=2)
        u2 = rng.uniform(0.05, u1 + v1 - 0.05)
        h1, h2 = rhombus_profile(u1, v1), rhombus_profile(u2, u1 + v1 - u2)
        x, y = rng.uniform(-10.0, 10.0, size=2)
        gap = abs(norm_from_profile(h1)(x, y) - norm_from_profile(h2)(x, y))
        worst = max(worst, gap - abs(y) * profile_sup_distance(h1, h2))
    return worst

@CommandBase.handle_command_error
def verify_profile_command(config) -> int:
    """对偶轮廓的往返、Legendre 变换与范数差界"""
    command = CommandBase(config)
    rng = np.random.Generator(np.random.PCG64(config.seed))
    points = min(config.samples, 1_000)

    with command.timed_step("轮廓往返"):
        round_trip = _round_trip_error(rng, ROUND_TRIP_PAIRS, points)
    xi = np.linspace(-1.0, 1.0, LEGENDRE_GRID)
    euclid = legendre_profile(section_of(Norm2D(1.0, np.hypot)), grid=LEGENDRE_GRID)
    circle_error = float(np.max(np.abs(euclid(xi) - np.sqrt(1.0 - xi * xi))))
    with command.timed_step("Legendre 变换"):
        rhombus_error = _legendre_rhombus_error(rng, LEGENDRE_PAIRS)
    x, y = rng.uniform(-10.0, 10.0, size=(2, min(points, H0_POINTS)))
    with command.timed_step("h⁰ 范数"):
        h0_error = float(np.max(np.abs(norm_from_profile(h0_profile())(x, y) - norm0(x, y))))
    difference_excess = _norm_difference_excess(rng, points)

    command.check(round_trip <= 1e-9, f"菱形范数往返误差 {round_trip:.3g} > 1e-9")
    command.check(circle_error <= 1e-6, f"Legendre 圆误差 {circle_error:.3g} > 1e-6")
    command.check(rhombus_error <= 1e-6, f"Legendre 菱形误差 {rhombus_error:.3g} > 1e-6")
    command.check(h0_error <= 1e-8, f"h⁰ 恢复的范数与 ‖·‖⁰ 偏差 {h0_error:.3g} > 1e-8")
    command.check(difference_excess <= 1e-9, f"范数差界不成立: 超出 {difference_excess:.3g}")

    summary: Dict[str, float] = {
        'rhombus_round_trip_error': round_trip,
        'legendre_circle_error': circle_error,
        'legendre_rhombus_error': rhombus_error,
        'h0_norm_error': h0_error,
        'norm_difference_excess': difference_excess,
        'points': points,
    }
    write_json(command.path('profile_report.json'),
               {'config': config.as_dict(), **command.format_results(summary, "轮廓验证")})
    return command.finish()

def register_analysis_commands(registry: CommandRegistry):
    """注册序列与轮廓命令"""
    registry.register(CommandType.VERIFY_SEQUENCE, verify_sequence_command)
    registry.register(CommandType.VERIFY_PROFILE, verify_profile_command)
