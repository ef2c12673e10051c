"""
双曲平面上的一致度量图
在双曲面模型 z² − x² − y² = 1 上取 ε-网，按父节点规则连成树，估计 Morse 常数，
再在距离小于 2D₁ 的点对之间加长度 2D₁+4D 的捷径边
"""

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.sparse import csgraph

from src.config import HyperbolicConfig, Layer
from src.graph.metric_graph import (DecileStats, MetricGraph, decile_growth_ratio, decile_stats,
                                    distance_rows)
from src.validators import ParamValidators, ValidationError

logger = logging.getLogger("uniform_graph")

NET_CSV_HEADER = ('idx', 'x', 'y', 'z', 'parent_idx', 'tree_len')
REPORT_HEADER = ('pidx', 'px', 'py', 'qidx', 'qx', 'qy', 'hdist', 'graph_dist', 'err')

ROOT = 0
# 点对距离按行分块计算时每块的元素上限
_BLOCK_CELLS = 2_000_000

class ConstructionError(Exception):
    """双曲构造失败（无合格父节点、成环、整数边长非正或查询越界）"""
    pass

# ----------------------------------------------------------------------
# 点与距离
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class HPoint:
    """双曲面 z² − x² − y² = 1 (z > 0) 上的点"""
    x: float
    y: float
    z: float

    def __post_init__(self):
        ParamValidators.validate_finite([self.x, self.y, self.z], "双曲面坐标")
        residual = self.z * self.z - self.x * self.x - self.y * self.y - 1.0
        if self.z <= 0 or abs(residual) > 1e-10 * max(1.0, self.z * self.z):
            raise ValidationError(f"点 ({self.x}, {self.y}, {self.z}) 不在双曲面上")

    @classmethod
    def from_xy(cls, x: float, y: float) -> "HPoint":
        """由 (x, y) 重新归一化得到 z"""
        return cls(float(x), float(y), math.sqrt(1.0 + x * x + y * y))

    @classmethod
    def from_polar(cls, r: float, theta: float) -> "HPoint":
        s = math.sinh(r)
        return cls(s * math.cos(theta), s * math.sin(theta), math.cosh(r))

    @classmethod
    def origin(cls) -> "HPoint":
        return cls(0.0, 0.0, 1.0)

    @property
    def r(self) -> float:
        """到原点的距离"""
        return math.asinh(math.hypot(self.x, self.y))

    @property
    def theta(self) -> float:
        return math.atan2(self.y, self.x)

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)

PointLike = Union[HPoint, np.ndarray]

def polar_dist(r1, t1, r2, t2):
    """
    极坐标下的距离（数值稳定形式）
    sinh²(d/2) = sinh²((r₁−r₂)/2) + sinh r₁ sinh r₂ sin²((θ₁−θ₂)/2)
    """
    s = np.sinh((np.asarray(r1) - r2) / 2.0) ** 2 + np.sinh(r1) * np.sinh(r2) * np.sin((np.asarray(t1) - t2) / 2.0) ** 2
    return 2.0 * np.arcsinh(np.sqrt(np.maximum(s, 0.0)))

def _polar_of(points: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    pts = np.atleast_2d(points)
    return np.arcsinh(np.hypot(pts[:, 0], pts[:, 1])), np.arctan2(pts[:, 1], pts[:, 0])

def minkowski_pairing(a: HPoint, b: HPoint) -> float:
    return a.z * b.z - a.x * b.x - a.y * b.y

def h_dist(a: HPoint, b: HPoint) -> float:
    """
    双曲距离 arccosh⟨a, b⟩

    数值上用极坐标的半角公式计算，近距离时不损失精度；⟨a,b⟩ < 1 的舍入误差自然被吸收。
    """
    return float(polar_dist(a.r, a.theta, b.r, b.theta))

def geodesic_point(a: HPoint, b: HPoint, t: float) -> HPoint:
    """
    测地线 [a, b] 上到 a 距离为 t·d(a,b) 的点

    Raises:
        ValidationError: t ∉ [0, 1] 时
    """
    ParamValidators.validate_in_range(t, 0.0, 1.0, "t")
    d = h_dist(a, b)
    if d < 1e-15:
        return a
    w = (math.sinh((1.0 - t) * d) * a.as_array() + math.sinh(t * d) * b.as_array()) / math.sinh(d)
    return HPoint.from_xy(w[0], w[1])

def radial_segment_dist(r_v, t_v, r_q, t_q):
    """
    点 (r_v, θ_v) 到从原点出发的测地线段 [p, q] 的距离，q = (r_q, θ_q)
    垂足在线段外时取端点距离
    """
    r_v = np.asarray(r_v, dtype=float)
    delta = np.asarray(t_v, dtype=float) - t_q
    c = np.cos(delta)
    with np.errstate(invalid='ignore', divide='ignore'):
        foot = np.arctanh(np.minimum(np.tanh(r_v) * np.maximum(c, 0.0), 1.0))
    perpendicular = np.arcsinh(np.sinh(r_v) * np.abs(np.sin(delta)))
    to_end = polar_dist(r_v, t_v, r_q, t_q)
    out = np.where(c <= 0, r_v, np.where(foot >= r_q, to_end, perpendicular))
    if r_q <= 0:
        out = r_v
    return out

def _to_frame(points: np.ndarray, r: float, theta: float) -> np.ndarray:
    # 先绕 z 轴转 −θ，再沿 x 方向平移 −r，把 (r, θ) 送到原点
    pts = np.atleast_2d(points).astype(float)
    c, s = math.cos(theta), math.sin(theta)
    x = c * pts[:, 0] + s * pts[:, 1]
    y = -s * pts[:, 0] + c * pts[:, 1]
    ch, sh = math.cosh(r), math.sinh(r)
    xb = ch * x - sh * pts[:, 2]
    return np.column_stack((xb, y, np.sqrt(1.0 + xb * xb + y * y)))

def dist_to_segment(v: PointLike, a: HPoint, b: HPoint):
    """
    点（或 (k,3) 点阵）到测地线段 [a, b] 的距离，经等距变换把 a 移到原点后按径向线段计算
    """
    arr = v.as_array() if isinstance(v, HPoint) else np.asarray(v, dtype=float)
    moved = _to_frame(arr, a.r, a.theta)
    b_moved = _to_frame(b.as_array(), a.r, a.theta)
    r_v, t_v = _polar_of(moved)
    r_b, t_b = _polar_of(b_moved)
    out = radial_segment_dist(r_v, t_v, float(r_b[0]), float(t_b[0]))
    return float(out[0]) if isinstance(v, HPoint) or np.ndim(v) == 1 else out

def ball_area(r: float) -> float:
    """半径 r 的双曲圆面积 2π(cosh r − 1)"""
    try:
        return 2.0 * math.pi * (math.cosh(r) - 1.0)
    except OverflowError:
        return math.inf

def packing_bound(R0: float, epsilon: float) -> float:
    """
    半径 R0 的球内 ε-分离点数的面积上界 ⌊area(R0+ε/2)/area(ε/2)⌋；溢出时为 inf
    """
    ParamValidators.validate_positive(epsilon, "ε")
    ParamValidators.validate_positive(R0, "R0")
    big = ball_area(R0 + epsilon / 2.0)
    if math.isinf(big):
        return math.inf
    return float(math.floor(big / ball_area(epsilon / 2.0)))

# ----------------------------------------------------------------------
# ε-网
# ----------------------------------------------------------------------

@dataclass(eq=False)
class HNet:
    """
    以原点 p 为基点的 ε-网，点按环优先、角度次之的顺序编号，p 的编号为 0

    parent[q] 为父节点编号（根为 −1），tree_len[q] 为树边长（根为 0）
    """
    r: np.ndarray
    theta: np.ndarray
    epsilon: float
    radius: float
    density: float
    candidate_count: int = 0
    parent: Optional[np.ndarray] = field(default=None, repr=False)
    tree_len: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def size(self) -> int:
        return int(self.r.size)

    def xyz(self) -> np.ndarray:
        s = np.sinh(self.r)
        return np.column_stack((s * np.cos(self.theta), s * np.sin(self.theta), np.cosh(self.r)))

    def point(self, i: int) -> HPoint:
        return HPoint.from_polar(float(self.r[i]), float(self.theta[i]))

    def check_index(self, i: int) -> int:
        if isinstance(i, bool) or not isinstance(i, (int, np.integer)) or not 0 <= i < self.size:
            raise ConstructionError(f"无效的网点编号: {i}")
        return int(i)

    def distances_from(self, i: int) -> np.ndarray:
        return polar_dist(self.r[i], self.theta[i], self.r, self.theta)

    def ancestors(self, q: int) -> List[int]:
        """树路径 q → p 上的顶点（含两端）"""
        if self.parent is None:
            raise ConstructionError("父节点尚未确定")
        path = [self.check_index(q)]
        while path[-1] != ROOT:
            path.append(int(self.parent[path[-1]]))
            if len(path) > self.size:
                raise ConstructionError(f"从 {q} 出发的父节点链成环")
        return path

def candidate_grid(R: float, epsilon: float, density: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    极坐标候选网格：径向步长 ε/2，每环角向弧长 ε/(2·density)

    Returns:
        (r, θ) 数组，原点在前，环优先、角度次之
    """
    step = epsilon / 2.0
    arc = epsilon / (2.0 * density)
    rings = int(math.floor(R / step + 1e-12))
    rs, ts = [np.zeros(1)], [np.zeros(1)]
    for k in range(1, rings + 1):
        r = k * step
        count = max(1, int(math.ceil(2.0 * math.pi * math.sinh(r) / arc)))
        rs.append(np.full(count, r))
        ts.append(2.0 * math.pi * np.arange(count) / count)
    return np.concatenate(rs), np.concatenate(ts)

def build_net(R: float, epsilon: float, density: float = None) -> HNet:
    """
    在候选网格上贪心选取极大 ε-分离子集

    候选顺序与半径无关，因此不同 R 的网是嵌套的。

    Args:
        R: 球半径
        epsilon: 分离距离 ε
        density: 候选密度，缺省取 HyperbolicConfig.DENSITY

    Raises:
        ValidationError: 参数非正或 R ≤ ε 时
    """
    density = HyperbolicConfig.DENSITY if density is None else density
    ParamValidators.validate_positive(R, "R")
    ParamValidators.validate_positive(epsilon, "ε")
    ParamValidators.validate_positive(density, "density")
    if R <= epsilon:
        raise ValidationError(f"需要 R > ε，当前 R={R}, ε={epsilon}")
    cr, ct = candidate_grid(R, epsilon, density)
    acc_r = np.empty(cr.size)
    acc_t = np.empty(cr.size)
    count = 0
    for r, t in zip(cr.tolist(), ct.tolist()):
        # 已接受点按 r 非降，只需检查 r > r_c − ε 的后缀
        start = int(np.searchsorted(acc_r[:count], r - epsilon, side='right'))
        if count > start:
            d = polar_dist(r, t, acc_r[start:count], acc_t[start:count])
            if d.min() < epsilon:
                continue
        acc_r[count] = r
        acc_t[count] = t
        count += 1
    net = HNet(acc_r[:count].copy(), acc_t[:count].copy(), float(epsilon), float(R), float(density), int(cr.size))
    logger.debug(f"ε-网构造完成: R={R}, ε={epsilon}, 候选={cr.size}, 网点={count}")
    return net

def _block_rows(n: int, width: int):
    step = max(1, _BLOCK_CELLS // max(width, 1))
    for start in range(0, n, step):
        yield start, min(n, start + step)

@dataclass
class NetAudit:
    min_separation: float
    covering_radius: float
    max_ball_count: int
    packing_limit: float
    ball_radius: float

    @property
    def holds(self) -> bool:
        return self.max_ball_count <= self.packing_limit

def audit_net(net: HNet, ball_radius: float = 3.0) -> NetAudit:
    """
    ε-网审计：最小两两距离、半径 R−ε 内候选点的覆盖半径、任一网点为心半径 ball_radius 球内网点数
    """
    n = net.size
    min_sep = math.inf
    max_count = 0
    for lo, hi in _block_rows(n, n):
        d = polar_dist(net.r[lo:hi, None], net.theta[lo:hi, None], net.r[None, :], net.theta[None, :])
        idx = np.arange(lo, hi)
        d[idx - lo, idx] = np.inf
        min_sep = min(min_sep, float(d.min()) if d.size else math.inf)
        max_count = max(max_count, int(((d <= ball_radius).sum(axis=1) + 1).max()))
    cr, ct = candidate_grid(net.radius, net.epsilon, net.density)
    keep = cr <= net.radius - net.epsilon
    cr, ct = cr[keep], ct[keep]
    covering = 0.0
    for lo, hi in _block_rows(cr.size, n):
        d = polar_dist(cr[lo:hi, None], ct[lo:hi, None], net.r[None, :], net.theta[None, :])
        covering = max(covering, float(d.min(axis=1).max()))
    audit = NetAudit(min_sep, covering, max_count, packing_bound(ball_radius, net.epsilon), ball_radius)
    logger.debug(f"网审计: {audit}")
    return audit

# ----------------------------------------------------------------------
# 父节点与树
# ----------------------------------------------------------------------

def choose_parent(q: int, net: HNet) -> int:
    """
    父节点规则：
      d(q,p) ≤ 5ε 时为 p；否则在满足
        (1) 到线段 [p,q] 距离 ≤ ε，
        (2) d(q,p) − 15ε < d(q′,p) < d(q,p) − 5ε
      的网点中，取离 [p,q] 上距 p 为 d(q,p) − 10ε 的点最近者，距离相同取编号最小者

    Raises:
        ConstructionError: 不存在合格父节点时
    """
    q = net.check_index(q)
    eps = net.epsilon
    rq, tq = float(net.r[q]), float(net.theta[q])
    if rq <= 5.0 * eps:
        return ROOT
    window = np.flatnonzero((net.r > rq - 15.0 * eps) & (net.r < rq - 5.0 * eps))
    if window.size:
        seg = radial_segment_dist(net.r[window], net.theta[window], rq, tq)
        window = window[seg <= eps + 1e-12]
    if window.size == 0:
        raise ConstructionError(f"网点 {q} (r={rq:.6g}) 没有合格父节点，网的覆盖可能不足")
    target = max(rq - 10.0 * eps, 0.0)
    d = polar_dist(net.r[window], net.theta[window], target, tq)
    return int(window[int(np.argmin(d))])

def _tree_payload(net: HNet) -> Tuple[np.ndarray, np.ndarray]:
    xyz = net.xyz()
    return xyz[:, :2].copy(), np.full(net.size, int(Layer.H), dtype=np.int64)

def build_tree(net: HNet) -> MetricGraph:
    """
    连接每个网点与其父节点，边长 d(q,p) − d(q′,p)；结果写回 net.parent / net.tree_len

    Raises:
        ConstructionError: 无合格父节点或结果不是树时
    """
    n = net.size
    parent = np.full(n, -1, dtype=np.int64)
    for q in range(1, n):
        parent[q] = choose_parent(q, net)
    children = np.arange(1, n)
    lengths = net.r[children] - net.r[parent[children]]
    if np.any(lengths <= 0):
        bad = int(children[np.argmax(lengths <= 0)])
        raise ConstructionError(f"树边长非正: 网点 {bad}")
    coords, layers = _tree_payload(net)
    tree = MetricGraph.from_arrays(n, children, parent[children], lengths, coords, layers)
    components, _ = csgraph.connected_components(tree.csr, directed=False)
    if components != 1 or tree.edge_count != n - 1:
        raise ConstructionError(f"父节点图不是树: 连通分量={components}, 边数={tree.edge_count}")
    net.parent = parent
    net.tree_len = np.concatenate(([0.0], lengths))
    logger.debug(f"父节点树构造完成: 网点={n}, 最大度数={int(tree.degrees().max()) if n > 1 else 0}")
    return tree

@dataclass
class ParentAudit:
    max_segment_distance: float
    window_violations: int
    root_rule_violations: int

    @property
    def holds(self) -> bool:
        return self.window_violations == 0 and self.root_rule_violations == 0

def audit_parents(net: HNet) -> ParentAudit:
    """事后复核父节点规则 (1)–(3)"""
    if net.parent is None:
        raise ConstructionError("父节点尚未确定")
    eps = net.epsilon
    worst, window_bad, root_bad = 0.0, 0, 0
    for q in range(1, net.size):
        rq, parent = float(net.r[q]), int(net.parent[q])
        if rq <= 5.0 * eps:
            root_bad += parent != ROOT
            continue
        rp = float(net.r[parent])
        window_bad += not (rq - 15.0 * eps < rp < rq - 5.0 * eps)
        worst = max(worst, float(radial_segment_dist(rp, net.theta[parent], rq, net.theta[q])))
    return ParentAudit(worst, window_bad, root_bad)

def tree_depths(net: HNet) -> np.ndarray:
    """每个网点到根的树边数"""
    if net.parent is None:
        raise ConstructionError("父节点尚未确定")
    depth = np.zeros(net.size, dtype=np.int64)
    # 父节点半径更小，按半径顺序即可保证先算父节点
    order = np.argsort(net.r, kind='stable')
    for q in order.tolist():
        if q != ROOT:
            depth[q] = depth[int(net.parent[q])] + 1
    return depth

# ----------------------------------------------------------------------
# Morse 常数与捷径
# ----------------------------------------------------------------------

def estimate_morse_D(net: HNet, tree: MetricGraph = None, sample: int = None, seed: int = 0,
                     safety: float = None) -> float:
    """
    D̂ = safety × max_q max_{v ∈ 树路径 q→p} d(v, [p,q])

    Args:
        net: 已确定父节点的网
        tree: 父节点树（仅用于一致性检查）
        sample: 抽样的 q 个数，缺省或不小于网点数时遍历全部
        seed: 抽样种子（PCG64）
        safety: 安全系数，缺省取 HyperbolicConfig.SAFETY_FACTOR
    """
    if net.parent is None:
        raise ConstructionError("估计 Morse 常数前需要先构造父节点树")
    if tree is not None and tree.vertex_count != net.size:
        raise ConstructionError("树与网的顶点数不一致")
    safety = HyperbolicConfig.SAFETY_FACTOR if safety is None else safety
    candidates = np.arange(1, net.size)
    if sample is not None and sample < candidates.size:
        rng = np.random.Generator(np.random.PCG64(seed))
        candidates = np.sort(rng.choice(candidates, size=sample, replace=False))
    worst = 0.0
    for q in candidates.tolist():
        path = np.asarray(net.ancestors(q), dtype=np.int64)
        d = radial_segment_dist(net.r[path], net.theta[path], float(net.r[q]), float(net.theta[q]))
        worst = max(worst, float(np.max(d)))
    estimate = safety * worst
    logger.info(f"Morse 常数估计: max偏离={worst:.6g}, D̂={estimate:.6g} (样本={candidates.size})")
    return estimate

def reach_radius(morse_D: float, epsilon: float, delta: float, reach_factor: float = None) -> float:
    """D₁ = D̂ + reach_factor·ε + δ"""
    reach_factor = HyperbolicConfig.REACH_FACTOR if reach_factor is None else reach_factor
    return morse_D + reach_factor * epsilon + delta

def _close_pairs(net: HNet, limit: float) -> Tuple[np.ndarray, np.ndarray]:
    heads, tails = [], []
    n = net.size
    for lo, hi in _block_rows(n, n):
        d = polar_dist(net.r[lo:hi, None], net.theta[lo:hi, None], net.r[None, :], net.theta[None, :])
        rows, cols = np.nonzero(d < limit)
        rows = rows + lo
        upper = cols > rows
        heads.append(rows[upper])
        tails.append(cols[upper])
    return np.concatenate(heads), np.concatenate(tails)

def add_shortcuts(net: HNet, tree: MetricGraph, morse_D: float, delta: float,
                  reach_factor: float = None) -> MetricGraph:
    """
    在距离 < 2D₁ 的网点对之间加长度 2D₁ + 4D̂ 的边（已有树边跳过）

    Returns:
        树加捷径后的新图
    """
    ParamValidators.validate_finite(morse_D, "D̂")
    if morse_D < 0:
        raise ValidationError(f"D̂ 不能为负: {morse_D}")
    ParamValidators.validate_positive(delta, "δ")
    d1 = reach_radius(morse_D, net.epsilon, delta, reach_factor)
    length = 2.0 * d1 + 4.0 * morse_D
    heads, tails = _close_pairs(net, 2.0 * d1)
    tree_a, tree_b, _ = tree.edge_arrays()
    tree_keys = np.minimum(tree_a, tree_b) * net.size + np.maximum(tree_a, tree_b)
    keep = ~np.isin(heads * net.size + tails, tree_keys)
    heads, tails = heads[keep], tails[keep]
    graph = tree.with_edges(heads, tails, np.full(heads.size, length))
    logger.info(f"捷径边添加完成: D₁={d1:.6g}, 边长={length:.6g}, 新边={heads.size}, "
                f"最大度数={int(graph.degrees().max()) if graph.vertex_count else 0}")
    return graph

# ----------------------------------------------------------------------
# 完整构造与整数模式
# ----------------------------------------------------------------------

@dataclass(eq=False)
class HyperbolicBuild:
    """构造结果：网、树、含捷径的图与各常数"""
    net: HNet
    tree: MetricGraph
    graph: MetricGraph
    morse_D: float
    delta: float
    D1: float
    shortcut_length: float
    integer: bool = False

    @property
    def upper_slack(self) -> float:
        """上界常数 2D₁ + 12D̂ + 2δ，整数模式加 3（两段取整与捷径进位）"""
        return 2.0 * self.D1 + 12.0 * self.morse_D + 2.0 * self.delta + (3.0 if self.integer else 0.0)

    @property
    def lower_slack(self) -> float:
        """下界常数 4D̂，整数模式加 2"""
        return 4.0 * self.morse_D + (2.0 if self.integer else 0.0)

    def degree_audit(self) -> Dict[str, float]:
        """
        树与全图的最大度数及对应的面积装箱上界

        上界不小于网点数时任何图都满足，*_bound_informative 为 False
        """
        eps = self.net.epsilon
        tree_bound = packing_bound(100.0 * eps, eps)
        graph_bound = packing_bound(2.0 * self.D1, eps)
        return {
            'tree_max_degree': int(self.tree.degrees().max()) if self.net.size > 1 else 0,
            'tree_degree_bound': tree_bound,
            'tree_bound_informative': tree_bound < self.net.size - 1,
            'graph_max_degree': int(self.graph.degrees().max()) if self.net.size > 1 else 0,
            'graph_degree_bound': graph_bound,
            'graph_bound_informative': graph_bound < self.net.size - 1,
        }

# 根的子节点都满足 d(q,p) < 15ε；半径不低于此值时根的度数不再随 R 变化
ROOT_SATURATION = 15.0

@dataclass
class DegreeUniformity:
    epsilon: float
    tree_max_degree: Dict[str, int]
    informative: bool

    @property
    def holds(self) -> bool:
        return len(set(self.tree_max_degree.values())) <= 1

def degree_uniformity(net: HNet, radii: Sequence[float]) -> DegreeUniformity:
    """
    比较不同半径下树的最大度数

    不同 R 的网是嵌套的，父节点只取自更小的半径，所以半径 r 的树就是
    net 上的树限制到 d(q,p) ≤ r 的网点，无需重新构造。
    最小半径不低于 15ε 时比较才有意义（informative）。

    Raises:
        ConstructionError: 父节点尚未确定或半径超出 net.radius 时
    """
    if net.parent is None:
        raise ConstructionError("父节点尚未确定")
    degrees: Dict[str, int] = {}
    for radius in sorted(radii):
        ParamValidators.validate_positive(radius, "radius")
        if radius > net.radius + 1e-12:
            raise ConstructionError(f"比较半径 {radius} 超出网半径 {net.radius}")
        inside = net.r <= radius + 1e-12
        children = np.flatnonzero(inside)[1:]
        counts = np.bincount(net.parent[children], minlength=net.size)
        counts[children] += 1
        degrees[format(radius, '.17g')] = int(counts[inside].max()) if children.size else 0
    informative = bool(radii) and min(radii) >= ROOT_SATURATION * net.epsilon
    result = DegreeUniformity(float(net.epsilon), degrees, informative)
    logger.debug(f"跨半径度数比较: {result}")
    return result

def build_hyperbolic(R: float, epsilon: float, delta: float, density: float = None,
                     morse_D: float = None, integer: bool = False, sample: int = None,
                     seed: int = 0, reach_factor: float = None) -> HyperbolicBuild:
    """
    完整构造：ε-网 → 父节点树 → D̂（或使用给定值） → 捷径边 → 可选整数化
    """
    ParamValidators.validate_positive(delta, "δ")
    if integer:
        _check_integer_scale(epsilon, delta)
    net = build_net(R, epsilon, density)
    tree = build_tree(net)
    parents = audit_parents(net)
    if not parents.holds:
        raise ConstructionError(f"父节点规则复核失败: {parents}")
    if morse_D is None:
        morse_D = estimate_morse_D(net, tree, sample, seed)
    d1 = reach_radius(morse_D, epsilon, delta, reach_factor)
    graph = add_shortcuts(net, tree, morse_D, delta, reach_factor)
    build = HyperbolicBuild(net, tree, graph, float(morse_D), float(delta), d1, 2.0 * d1 + 4.0 * morse_D)
    return integerize(build) if integer else build

def _check_integer_scale(epsilon: float, delta: float):
    floor = HyperbolicConfig.INTEGER_MIN_SCALE
    if epsilon < floor or delta < floor:
        raise ValidationError(f"整数模式需要 ε, δ ≥ {floor}，当前 ε={epsilon}, δ={delta}")

def integerize(build: HyperbolicBuild, mode: str = 'floor') -> HyperbolicBuild:
    """
    整数边长：树边 ⌊d(q,p)⌋ − ⌊d(q′,p)⌋，捷径边取大于 2D₁+4D̂ 的最小整数

    Raises:
        ValidationError: ε 或 δ 小于整数模式下限，或 mode 未知时
        ConstructionError: 出现非正整数边长时
    """
    if mode != 'floor':
        raise ValidationError(f"未知的整数化方式: {mode}")
    net = build.net
    _check_integer_scale(net.epsilon, build.delta)
    floors = np.floor(net.r)
    children = np.arange(1, net.size)
    tree_lengths = floors[children] - floors[net.parent[children]]
    if np.any(tree_lengths <= 0):
        bad = int(children[np.argmax(tree_lengths <= 0)])
        raise ConstructionError(f"整数化后树边长非正: 网点 {bad}")
    shortcut = float(math.floor(build.shortcut_length) + 1)
    coords, layers = _tree_payload(net)
    tree = MetricGraph.from_arrays(net.size, children, net.parent[children], tree_lengths, coords, layers)
    a, b, lengths = build.graph.edge_arrays()
    tree_keys = np.minimum(children, net.parent[children]) * net.size + np.maximum(children, net.parent[children])
    extra = ~np.isin(a * net.size + b, tree_keys)
    graph = tree.with_edges(a[extra], b[extra], np.full(int(extra.sum()), shortcut))
    int_net = replace(net, tree_len=np.concatenate(([0.0], tree_lengths)))
    logger.info(f"整数化完成: 树边 {tree.edge_count} 条, 捷径边长 {shortcut:.0f}")
    return HyperbolicBuild(int_net, tree, graph, build.morse_D, build.delta, build.D1, shortcut, integer=True)

# ----------------------------------------------------------------------
# 验证与审计
# ----------------------------------------------------------------------

def sample_net_pairs(net: HNet, count: int, seed: int) -> List[Tuple[int, int]]:
    """在整个网球内抽取点对，按源点分组（约 √count 个源点）"""
    ParamValidators.validate_integer(count, min_value=1, name="samples")
    ParamValidators.validate_integer(seed, min_value=0, max_value=2 ** 64 - 1, name="seed")
    rng = np.random.Generator(np.random.PCG64(seed))
    n_sources = max(1, int(math.isqrt(count)))
    sources = rng.integers(0, net.size, size=n_sources)
    per_source = np.full(n_sources, count // n_sources)
    per_source[:count % n_sources] += 1
    pairs = []
    for s, k in zip(sources.tolist(), per_source.tolist()):
        for t in rng.integers(0, net.size, size=k).tolist():
            pairs.append((int(s), int(t)))
    pairs.sort()
    return pairs

@dataclass
class HyperbolicReport:
    rows: List[tuple]
    deciles: List[DecileStats]
    max_error: float
    min_error: float
    upper_slack: float
    lower_slack: float

    @property
    def upper_holds(self) -> bool:
        return self.max_error <= self.upper_slack + 1e-9

    @property
    def lower_holds(self) -> bool:
        return self.min_error >= -self.lower_slack - 1e-9

    def no_growth_ratio(self) -> float:
        return decile_growth_ratio(self.deciles)

    def summary(self) -> Dict[str, object]:
        return {
            'pairs': len(self.rows),
            'max_error': self.max_error,
            'min_error': self.min_error,
            'upper_slack': self.upper_slack,
            'lower_slack': self.lower_slack,
            'upper_holds': self.upper_holds,
            'lower_holds': self.lower_holds,
            'no_growth_ratio': self.no_growth_ratio(),
            'deciles': [vars(d) for d in self.deciles],
        }

def verify_hyperbolic(build: HyperbolicBuild, pairs: Sequence[Tuple[int, int]], workers: int = None) -> HyperbolicReport:
    """
    抽样点对的图距离与双曲距离之差，附上下界判断

    Raises:
        ConstructionError: 点对为空或编号不在网球内时
    """
    if not pairs:
        raise ConstructionError("点对列表为空")
    net = build.net
    for s, t in pairs:
        for v in (s, t):
            net.check_index(v)
            if net.r[v] > net.radius + 1e-12:
                raise ConstructionError(f"网点 {v} 超出查询球 R={net.radius}")
    sources = sorted({s for s, _ in pairs})
    rows_by_source = distance_rows(build.graph, sources, workers)
    position = {s: k for k, s in enumerate(sources)}
    xyz = net.xyz()
    rows = []
    for s, t in pairs:
        h = float(polar_dist(net.r[s], net.theta[s], net.r[t], net.theta[t]))
        g = float(rows_by_source[position[s], t])
        rows.append((s, float(xyz[s, 0]), float(xyz[s, 1]), t, float(xyz[t, 0]), float(xyz[t, 1]), h, g, g - h))
    rows.sort(key=lambda r: (r[0], r[3]))
    hd = np.array([r[6] for r in rows])
    err = np.array([r[8] for r in rows])
    report = HyperbolicReport(rows, decile_stats(hd, err), float(err.max()), float(err.min()),
                              build.upper_slack, build.lower_slack)
    logger.info(f"双曲验证完成: 点对={len(rows)}, 误差范围=[{report.min_error:.6g}, {report.max_error:.6g}], "
                f"上界={report.upper_slack:.6g}")
    return report

def root_exactness(build: HyperbolicBuild, workers: int = None) -> float:
    """max_q |d_graph(p, q) − d(p, q)|"""
    dist = distance_rows(build.graph, [ROOT], workers)[0]
    return float(np.max(np.abs(dist - build.net.r)))

def net_rows(build: HyperbolicBuild) -> List[tuple]:
    """网点导出行 idx,x,y,z,parent_idx,tree_len"""
    net = build.net
    xyz = net.xyz()
    return [(i, float(xyz[i, 0]), float(xyz[i, 1]), float(xyz[i, 2]), int(net.parent[i]), float(net.tree_len[i]))
            for i in range(net.size)]

@dataclass
class ThinnessReport:
    triangles: int
    max_excess: float
    delta: float

    @property
    def holds(self) -> bool:
        return self.max_excess <= self.delta

def _random_points(rng: np.random.Generator, count: int, radius: float) -> List[HPoint]:
    # 按面积均匀：cosh r = 1 + u(cosh R − 1)
    u = rng.random(count)
    r = np.arccosh(1.0 + u * (math.cosh(radius) - 1.0))
    t = rng.random(count) * 2.0 * math.pi
    return [HPoint.from_polar(float(a), float(b)) for a, b in zip(r, t)]

def thinness_witness(seed: int, count: int, radius: float, delta: float = 1.0,
                     samples_per_side: int = 17) -> ThinnessReport:
    """
    随机测地三角形的 δ-细见证：每条边上的采样点到另两边并集的最大距离

    Args:
        seed: 随机种子（PCG64）
        count: 三角形个数
        radius: 顶点所在球的半径
        delta: 待检验的 δ
        samples_per_side: 每条边的采样点数
    """
    ParamValidators.validate_integer(count, min_value=1, name="count")
    ParamValidators.validate_positive(radius, "radius")
    rng = np.random.Generator(np.random.PCG64(seed))
    ts = np.linspace(0.0, 1.0, samples_per_side)
    worst = 0.0
    for _ in range(count):
        a, b, c = _random_points(rng, 3, radius)
        for (u, v), others in (((a, b), ((b, c), (c, a))), ((b, c), ((c, a), (a, b))), ((c, a), ((a, b), (b, c)))):
            side = np.array([geodesic_point(u, v, float(t)).as_array() for t in ts])
            near = np.minimum(dist_to_segment(side, *others[0]), dist_to_segment(side, *others[1]))
            worst = max(worst, float(near.max()))
    report = ThinnessReport(count, worst, delta)
    logger.debug(f"δ-细见证: {report}")
    return report

@dataclass
class ProjectionAudit:
    """
    "d(q_i′, ·) < D₁" 的两种读法：到基点 p 的距离与到测地线 [q₁,q₂] 上投影点 p′ 的距离
    """
    pairs: int
    D1: float
    max_dist_to_base: float
    max_dist_to_projection: float
    base_reading_holds: int
    projection_reading_holds: int
    shortcut_reachable: int

def audit_projection_readings(build: HyperbolicBuild, pairs: Sequence[Tuple[int, int]],
                              samples: int = 65) -> ProjectionAudit:
    """对每个点对构造 p′ 与 q_i′，分别统计两种读法是否成立"""
    net = build.net
    origin = HPoint.origin()
    max_base = max_proj = 0.0
    base_ok = proj_ok = reachable = 0
    for s, t in pairs:
        if s == t:
            continue
        q1, q2 = net.point(s), net.point(t)
        ts = np.linspace(0.0, 1.0, samples)
        geo = np.array([geodesic_point(q1, q2, float(x)).as_array() for x in ts])
        spread = np.maximum(dist_to_segment(geo, origin, q1) if s != ROOT else np.zeros(samples),
                            dist_to_segment(geo, origin, q2) if t != ROOT else np.zeros(samples))
        r_p, t_p = _polar_of(geo[int(np.argmin(spread))])
        chosen = []
        for q in (s, t):
            path = np.asarray(net.ancestors(q), dtype=np.int64)
            d = polar_dist(net.r[path], net.theta[path], float(r_p[0]), float(t_p[0]))
            k = int(np.argmin(d))
            chosen.append((int(path[k]), float(d[k])))
        base = max(float(net.r[v]) for v, _ in chosen)
        proj = max(d for _, d in chosen)
        max_base, max_proj = max(max_base, base), max(max_proj, proj)
        base_ok += base < build.D1
        proj_ok += proj < build.D1
        (v1, _), (v2, _) = chosen
        link = v1 == v2 or float(polar_dist(net.r[v1], net.theta[v1], net.r[v2], net.theta[v2])) < 2.0 * build.D1
        reachable += link
    audit = ProjectionAudit(len([p for p in pairs if p[0] != p[1]]), build.D1, max_base, max_proj,
                            base_ok, proj_ok, reachable)
    logger.info(f"投影读法审计: {audit}")
    return audit
