"""
平面构造命令
build-planar、verify-planar、calibrate-planar 与 export
"""

import logging
import math
from typing import Tuple

from src.analysis.betaseq import BetaSequence
from src.config import CommandType, PlanarConfig
from src.commands.command_base import CommandBase, CommandRegistry
from src.graph.metric_graph import export_edges_csv, uniformity_report
from src.graph.planar import (REPORT_HEADER, LatticeSpec, auto_glue_length, build_full, build_L,
                              estimate_C, oracle_equivalence, sample_pairs, verify_planar)
from src.output.writers import write_csv, write_json

logger = logging.getLogger("uniform_graph")

class PlanarCommand(CommandBase):
    """平面命令的共享步骤"""

    def lattice_spec(self) -> Tuple[LatticeSpec, float]:
        """
        构造参数；M=auto 时先估计 Ĉ 再取 M = ⌈2Ĉ+1⌉

        Returns:
            (spec, Ĉ)，给定 M 且无种子时 Ĉ 为 nan
        """
        config = self.config
        seq = config.beta_sequence()
        base = LatticeSpec(config.half_width(), seq)
        constant = math.nan
        if config.seed is not None:
            with self.timed_step("估计 Ĉ"):
                constant = estimate_C(base, config.samples, config.seed)
        glue_length = auto_glue_length(constant) if config.auto_glue else config.M
        return base.with_glue(glue_length), constant

    def build_summary(self, spec: LatticeSpec, constant: float, graph) -> dict:
        stats = uniformity_report(graph)
        self.check(stats.max_degree <= 5, f"最大度数 {stats.max_degree} > 5")
        self.check(stats.min_length >= math.sqrt(2.0) / 2.0 - 1e-12, f"最小边长 {stats.min_length} < √2/2")
        self.check(stats.max_length <= max(spec.M, 1.5 * math.sqrt(2.0)) + 1e-12, f"最大边长 {stats.max_length} 超出范围")
        return {
            'N': spec.N,
            'M': spec.M,
            'C_hat': constant,
            'vertex_count': graph.vertex_count,
            'edge_count': graph.edge_count,
            'max_degree': stats.max_degree,
            'min_length': stats.min_length,
            'max_length': stats.max_length,
        }

@CommandBase.handle_command_error
def build_planar_command(config) -> int:
    """构造完整的 Γ 并写出一致性统计"""
    command = PlanarCommand(config)
    spec, constant = command.lattice_spec()
    with command.timed_step("构造 Γ"):
        pg = build_full(spec)
    summary = command.build_summary(spec, constant, pg.graph)
    write_json(command.path('planar_build.json'),
               {'config': config.as_dict(), **command.format_results(summary, "平面构造")})
    return command.finish()

@CommandBase.handle_command_error
def export_command(config) -> int:
    """构造 Γ 并导出边表 CSV"""
    command = PlanarCommand(config)
    spec, _ = command.lattice_spec()
    pg = build_full(spec)
    export_edges_csv(pg.graph, command.path('planar_edges.csv'))
    return command.finish()

@CommandBase.handle_command_error
def verify_planar_command(config) -> int:
    """抽样验证 |d_Γ − 欧氏距离| 有界且不随距离增长"""
    command = PlanarCommand(config)
    spec, constant = command.lattice_spec()
    with command.timed_step("构造 Γ"):
        pg = build_full(spec)
    pairs = sample_pairs(pg, config.samples, config.seed)
    with command.timed_step("最短路验证"):
        report = verify_planar(pg, pairs, config.workers)
    slack = constant + 2.0 * spec.M
    ratio = report.no_growth_ratio()
    lower_ok = command.check(report.lower_bound_holds(slack), f"存在点对 d_Γ < 欧氏距离 − {slack:.6g}")
    growth_ok = command.check(ratio <= 2.0, f"误差随距离增长: 比值 {ratio:.4g} > 2")
    write_csv(command.path('planar_report.csv'), REPORT_HEADER, report.rows)
    summary = {
        'N': spec.N,
        'M': spec.M,
        'C_hat': constant,
        'lower_bound_slack': slack,
        'lower_bound_holds': lower_ok,
        'no_growth_holds': growth_ok,
        **report.summary(),
    }
    write_json(command.path('planar_summary.json'),
               {'config': config.as_dict(), **command.format_results(summary, "平面验证", len(report.rows))})
    return command.finish()

@CommandBase.handle_command_error
def calibrate_planar_command(config) -> int:
    """在 N 与 2N 两个尺度估计 Ĉ，对照常数序列，并在中心子盒做闭式距离对照"""
    command = PlanarCommand(config)
    seq = config.beta_sequence()
    N = config.half_width()
    with command.timed_step("两尺度 Ĉ"):
        small = estimate_C(LatticeSpec(N, seq), config.samples, config.seed)
        large = estimate_C(LatticeSpec(2 * N, seq), config.samples, config.seed)
        flat = estimate_C(LatticeSpec(N, BetaSequence.debug_constant(0.0)), config.samples, config.seed)
    half = min(PlanarConfig.ORACLE_HALF_WIDTH, max(1, N // 5))
    with command.timed_step("闭式距离对照"):
        oracle = oracle_equivalence(build_L(LatticeSpec(N, seq)), half, config.workers)
    command.check(math.isfinite(small) and math.isfinite(large), "Ĉ 不是有限值")
    command.check(oracle.max_difference <= 1e-9, f"闭式距离与最短路偏差 {oracle.max_difference:.3g} > 1e-9")
    summary = {
        'N': N,
        'C_hat': small,
        'C_hat_doubled': large,
        'doubling_ratio': large / small if small > 0 else math.inf,
        'C_hat_constant_beta': flat,
        'M_auto': auto_glue_length(small),
        'oracle_half_width': half,
        'oracle_pairs': oracle.pairs,
        'oracle_max_difference': oracle.max_difference,
    }
    write_json(command.path('planar_calibration.json'),
               {'config': config.as_dict(), **command.format_results(summary, "平面校准")})
    return command.finish()

def register_planar_commands(registry: CommandRegistry):
    """注册平面相关命令"""
    registry.register(CommandType.BUILD_PLANAR, build_planar_command)
    registry.register(CommandType.VERIFY_PLANAR, verify_planar_command)
    registry.register(CommandType.CALIBRATE_PLANAR, calibrate_planar_command)
    registry.register(CommandType.EXPORT, export_command)
