"""
双曲构造命令
build-hyperbolic 与 verify-hyperbolic
"""

import logging

import numpy as np

from src.config import CommandType
from src.commands.command_base import CommandBase, CommandRegistry
from src.graph.hyperbolic import (NET_CSV_HEADER, REPORT_HEADER, ROOT_SATURATION, HyperbolicBuild, audit_net,
                                  audit_parents, audit_projection_readings, build_hyperbolic, degree_uniformity,
                                  net_rows, root_exactness, sample_net_pairs, thinness_witness,
                                  verify_hyperbolic)
from src.graph.metric_graph import export_edges_csv
from src.output.writers import write_csv, write_json

logger = logging.getLogger("uniform_graph")

# 投影读法审计与 δ-细见证的规模上限
PROJECTION_PAIRS = 200
THINNESS_TRIANGLES = 1000
# 跨半径度数比较取 2R/3 与 R
DEGREE_COMPARE_FRACTION = 2.0 / 3.0

class HyperbolicCommand(CommandBase):
    """双曲命令的共享步骤"""

    def build(self) -> HyperbolicBuild:
        config = self.config
        with self.timed_step("双曲构造"):
            return build_hyperbolic(config.R, config.epsilon, config.delta, morse_D=config.morse_d,
                                    integer=config.integer, seed=config.seed or 0)

    def audit(self, build: HyperbolicBuild) -> dict:
        """网、父节点、度数与根距离审计"""
        net = build.net
        net_audit = audit_net(build.net)
        parents = audit_parents(build.net)
        root_error = root_exactness(build, self.config.workers)
        root_limit = 1.0 if build.integer else 1e-9
        self.check(net_audit.min_separation >= net.epsilon - 1e-9, f"网点最小距离 {net_audit.min_separation:.6g} < ε")
        self.check(net_audit.covering_radius < net.epsilon, f"覆盖半径 {net_audit.covering_radius:.6g} ≥ ε")
        self.check(net_audit.holds, f"球内网点数 {net_audit.max_ball_count} 超过装箱上界")
        self.check(parents.holds, f"父节点规则复核失败: {parents}")
        self.check(root_error < root_limit, f"根距离偏差 {root_error:.3g} 超出 {root_limit}")
        if build.integer:
            _, _, lengths = build.graph.edge_arrays()
            self.check(bool(np.all(lengths == np.round(lengths)) and np.all(lengths > 0)), "存在非正整数边长")
        return {
            'R': net.radius,
            'epsilon': net.epsilon,
            'delta': build.delta,
            'integer': build.integer,
            'net_size': net.size,
            'candidate_count': net.candidate_count,
            'morse_D': build.morse_D,
            'D1': build.D1,
            'shortcut_length': build.shortcut_length,
            'edge_count': build.graph.edge_count,
            'net_audit': vars(net_audit),
            'parent_audit': vars(parents),
            'degree_audit': build.degree_audit(),
            'root_exactness': root_error,
        }

@CommandBase.handle_command_error
def build_hyperbolic_command(config) -> int:
    """构造并导出网点表、边表与审计结果"""
    command = HyperbolicCommand(config)
    build = command.build()
    summary = command.audit(build)
    write_csv(command.path('hyperbolic_net.csv'), NET_CSV_HEADER, net_rows(build))
    export_edges_csv(build.graph, command.path('hyperbolic_edges.csv'))
    write_json(command.path('hyperbolic_build.json'),
               {'config': config.as_dict(), **command.format_results(summary, "双曲构造")})
    return command.finish()

@CommandBase.handle_command_error
def verify_hyperbolic_command(config) -> int:
    """抽样验证 d_graph 与双曲距离的上下界，并给出投影读法审计与 δ-细见证"""
    command = HyperbolicCommand(config)
    build = command.build()
    summary = command.audit(build)
    pairs = sample_net_pairs(build.net, config.samples, config.seed)
    with command.timed_step("最短路验证"):
        report = verify_hyperbolic(build, pairs, config.workers)
    projection = audit_projection_readings(build, pairs[:PROJECTION_PAIRS])
    thinness = thinness_witness(config.seed, min(config.samples, THINNESS_TRIANGLES), config.R, 1.0)
    ratio = report.no_growth_ratio()
    command.check(report.upper_holds, f"最大误差 {report.max_error:.6g} 超过 {report.upper_slack:.6g}")
    command.check(report.lower_holds, f"最小误差 {report.min_error:.6g} 低于 −{report.lower_slack:.6g}")
    command.check(ratio <= 2.0, f"误差随距离增长: 比值 {ratio:.4g} > 2")
    command.check(thinness.holds, f"δ-细见证失败: 最大偏离 {thinness.max_excess:.6g} > 1")
    uniformity = degree_uniformity(build.net, (DEGREE_COMPARE_FRACTION * config.R, config.R))
    if uniformity.informative:
        command.check(uniformity.holds, f"树的最大度数随半径变化: {uniformity.tree_max_degree}")
    else:
        logger.info(f"比较半径低于 {ROOT_SATURATION:g}ε，跨半径度数只记录不断言")
    write_csv(command.path('hyperbolic_report.csv'), REPORT_HEADER, report.rows)
    summary.update({
        'report': report.summary(),
        'projection_audit': vars(projection),
        'thinness': {**vars(thinness), 'holds': thinness.holds},
        'degree_uniformity': {**vars(uniformity), 'holds': uniformity.holds},
    })
    write_json(command.path('hyperbolic_summary.json'),
               {'config': config.as_dict(), **command.format_results(summary, "双曲验证", len(report.rows))})
    return command.finish()

def register_hyperbolic_commands(registry: CommandRegistry):
    """注册双曲相关命令"""
    registry.register(CommandType.BUILD_HYPERBOLIC, build_hyperbolic_command)
    registry.register(CommandType.VERIFY_HYPERBOLIC, verify_hyperbolic_command)
