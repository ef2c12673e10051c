"""
平面格点度量图
在 L（i+j 为偶数）与 L′（i+j 为奇数）上按 β 序列赋边长，再用长度 M 的边粘合，
得到与欧氏平面加性接近的一致度量图
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.analysis.betaseq import BetaSequence
from src.analysis.profiles import averaged_profile, norm0, norm_from_profile
from src.config import Layer, PlanarConfig
from src.graph.metric_graph import (DecileStats, MetricGraph, decile_growth_ratio, decile_stats,
                                    distance_rows)
from src.validators import ParamValidators, ValidationError

logger = logging.getLogger("uniform_graph")

REPORT_HEADER = ('px', 'py', 'player', 'qx', 'qy', 'qlayer', 'euclid', 'graph_dist', 'err')

Point = Tuple[int, int]

class PlanarError(Exception):
    """平面构造或查询错误"""
    pass

@dataclass(frozen=True)
class LatticeSpec:
    """
    构造参数

    Attributes:
        N: 构造盒 [−N, N]² 的半宽
        seq: β 序列（含 α）
        M: 粘合边长
        query_margin: 查询盒 [−margin, margin]² 的半宽，缺省 N/2
    """
    N: int
    seq: BetaSequence
    M: float = 1.0
    query_margin: Optional[int] = None

    def __post_init__(self):
        ParamValidators.validate_integer(self.N, min_value=2, name="N")
        ParamValidators.validate_positive(self.M, "M")
        if self.query_margin is None:
            object.__setattr__(self, 'query_margin', self.N // 2)
        ParamValidators.validate_integer(self.query_margin, min_value=0, max_value=self.N - 1, name="query_margin")

    @property
    def D(self) -> float:
        return self.seq.D

    def with_glue(self, M: float) -> "LatticeSpec":
        return LatticeSpec(self.N, self.seq, float(M), self.query_margin)

    def with_half_width(self, N: int) -> "LatticeSpec":
        return LatticeSpec(N, self.seq, self.M, N // 2)

@dataclass(frozen=True, eq=False)
class PlanarGraph:
    """
    度量图及其格点坐标映射

    grid_index[x+N, y+N] 为格点 (x, y) 的顶点编号，不在图中为 −1；
    (x, y) 所在层由奇偶性决定，编号按 (x, y, layer) 字典序分配。
    """
    graph: MetricGraph
    spec: LatticeSpec
    grid_index: np.ndarray = field(repr=False)
    layers: Tuple[Layer, ...]

    def vertex(self, x: int, y: int) -> int:
        """格点 (x, y) 的顶点编号"""
        N = self.spec.N
        if not (-N <= x <= N and -N <= y <= N) or self.grid_index[x + N, y + N] < 0:
            raise PlanarError(f"格点 ({x}, {y}) 不在图中")
        return int(self.grid_index[x + N, y + N])

    def point(self, v: int) -> Tuple[int, int, Layer]:
        v = self.graph.check_vertex(v)
        x, y = self.graph.coords[v]
        return int(x), int(y), Layer(int(self.graph.layers[v]))

    def in_query_box(self, x: int, y: int) -> bool:
        margin = self.spec.query_margin
        return abs(x) <= margin and abs(y) <= margin

def layer_of(x: int, y: int) -> Layer:
    return Layer.L if (x + y) % 2 == 0 else Layer.LP

def tau(p: Point) -> Point:
    """把 L 映到 L′ 的图同构 (x, y) ↦ (y, x+1)"""
    x, y = p
    return y, x + 1

def _index_grid(N: int, include: Sequence[Layer]) -> Tuple[np.ndarray, np.ndarray]:
    side = 2 * N + 1
    xs, ys = np.meshgrid(np.arange(-N, N + 1), np.arange(-N, N + 1), indexing='ij')
    parity = (xs + ys) % 2
    mask = np.zeros((side, side), dtype=bool)
    if Layer.L in include:
        mask |= parity == 0
    if Layer.LP in include:
        mask |= parity == 1
    # 行优先（先 x 后 y）计数即 (x, y, layer) 字典序
    index = np.where(mask, np.cumsum(mask.ravel()).reshape(side, side) - 1, -1)
    return index, mask

def _lookup(index: np.ndarray, N: int, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    inside = (np.abs(x) <= N) & (np.abs(y) <= N)
    out = np.full(x.shape, -1, dtype=np.int64)
    out[inside] = index[x[inside] + N, y[inside] + N]
    return out

def _diagonal_edges(spec: LatticeSpec, index: np.ndarray, layer: Layer):
    N = spec.N
    xs, ys = np.meshgrid(np.arange(-N, N + 1), np.arange(-N, N + 1), indexing='ij')
    parity = 0 if layer == Layer.L else 1
    sel = (xs + ys) % 2 == parity
    x, y = xs[sel], ys[sel]
    src = index[x + N, y + N]
    if layer == Layer.L:
        # 行下标: (i,j)→(i+1,j+1) 长 u_j，(i,j)→(i−1,j+1) 长 v_j
        b = spec.seq(y)
        moves = ((1, 1, spec.D + b), (-1, 1, spec.D - b))
    else:
        # 列下标: (i,j)→(i+1,j+1) 长 u_i，(i,j)→(i+1,j−1) 长 v_i
        b = spec.seq(x)
        moves = ((1, 1, spec.D + b), (1, -1, spec.D - b))
    heads, tails, lengths = [], [], []
    for dx, dy, length in moves:
        dst = _lookup(index, N, x + dx, y + dy)
        ok = dst >= 0
        heads.append(src[ok])
        tails.append(dst[ok])
        lengths.append(np.broadcast_to(length, x.shape)[ok])
    return np.concatenate(heads), np.concatenate(tails), np.concatenate(lengths)

def _payload(index: np.ndarray, mask: np.ndarray, N: int) -> Tuple[np.ndarray, np.ndarray]:
    xs, ys = np.meshgrid(np.arange(-N, N + 1), np.arange(-N, N + 1), indexing='ij')
    coords = np.column_stack((xs[mask], ys[mask])).astype(float)
    layers = ((xs[mask] + ys[mask]) % 2).astype(np.int64)
    return coords, layers

def _build_layer(spec: LatticeSpec, layer: Layer) -> PlanarGraph:
    index, mask = _index_grid(spec.N, [layer])
    a, b, lengths = _diagonal_edges(spec, index, layer)
    coords, layers = _payload(index, mask, spec.N)
    graph = MetricGraph.from_arrays(int(mask.sum()), a, b, lengths, coords, layers)
    logger.debug(f"{layer.name} 层构造完成: N={spec.N}, 顶点={graph.vertex_count}, 边={graph.edge_count}")
    return PlanarGraph(graph, spec, index, (layer,))

def build_L(spec: LatticeSpec) -> PlanarGraph:
    """L 层：(i,j)→(i+1,j+1) 长 u_j，(i,j)→(i−1,j+1) 长 v_j"""
    return _build_layer(spec, Layer.L)

def build_Lprime(spec: LatticeSpec) -> PlanarGraph:
    """L′ 层：转置构造，(i,j)→(i+1,j+1) 长 u_i，(i,j)→(i+1,j−1) 长 v_i"""
    return _build_layer(spec, Layer.LP)

def glue(gL: PlanarGraph, gLprime: PlanarGraph, M: float) -> PlanarGraph:
    """
    粘合两层：每个 (i,j) ∈ L 连到 (i, j+1) ∈ L′，长度 M

    Raises:
        PlanarError: 两层的构造盒或层不匹配时
    """
    ParamValidators.validate_positive(M, "M")
    if gL.layers != (Layer.L,) or gLprime.layers != (Layer.LP,):
        raise PlanarError("glue 需要一个 L 层图和一个 L′ 层图")
    if gL.spec.N != gLprime.spec.N or gL.spec.seq != gLprime.spec.seq:
        raise PlanarError("两层的构造参数不一致")
    spec = gL.spec.with_glue(M)
    N = spec.N
    index, mask = _index_grid(N, [Layer.L, Layer.LP])
    heads, tails, lengths = [], [], []
    for part in (gL, gLprime):
        a, b, length = part.graph.edge_arrays()
        remap = _lookup(index, N, part.graph.coords[:, 0].astype(np.int64), part.graph.coords[:, 1].astype(np.int64))
        heads.append(remap[a])
        tails.append(remap[b])
        lengths.append(length)
    coords_L = gL.graph.coords.astype(np.int64)
    src = _lookup(index, N, coords_L[:, 0], coords_L[:, 1])
    dst = _lookup(index, N, coords_L[:, 0], coords_L[:, 1] + 1)
    ok = dst >= 0
    heads.append(src[ok])
    tails.append(dst[ok])
    lengths.append(np.full(int(ok.sum()), float(M)))
    coords, layers = _payload(index, mask, N)
    graph = MetricGraph.from_arrays(int(mask.sum()), np.concatenate(heads), np.concatenate(tails),
                                    np.concatenate(lengths), coords, layers)
    logger.info(f"平面图粘合完成: N={N}, M={M}, 顶点={graph.vertex_count}, 边={graph.edge_count}")
    return PlanarGraph(graph, spec, index, (Layer.L, Layer.LP))

def build_full(spec: LatticeSpec) -> PlanarGraph:
    """完整的 Γ = L ∪ L′ ∪ 粘合边"""
    return glue(build_L(spec), build_Lprime(spec), spec.M)

# ----------------------------------------------------------------------
# L 上的闭式距离
# ----------------------------------------------------------------------

def _check_L(p: Point):
    x, y = p
    if isinstance(x, bool) or isinstance(y, bool) or int(x) != x or int(y) != y:
        raise PlanarError(f"格点坐标必须是整数: {p}")
    if (int(x) + int(y)) % 2 != 0:
        raise PlanarError(f"点 {p} 不在 L 上（x+y 须为偶数）")

def closed_form_dL(p: Point, q: Point, seq: BetaSequence) -> float:
    """
    L 上两点的距离：同一行时为 D|Δx|，否则为平均轮廓 h^{m,n} 对应范数在 q−p 处的值

    Raises:
        PlanarError: p 或 q 不在 L 上时
    """
    _check_L(p)
    _check_L(q)
    (px, py), (qx, qy) = p, q
    if py == qy:
        return seq.D * abs(qx - px)
    m, n = min(py, qy), max(py, qy)
    norm = norm_from_profile(averaged_profile(seq, int(m), int(n), seq.D))
    return float(norm(qx - px, qy - py))

def closed_form_dL_batch(pairs: Sequence[Tuple[Point, Point]], seq: BetaSequence) -> np.ndarray:
    """批量闭式距离，按行窗口 (m, n) 分组共用同一个范数"""
    out = np.empty(len(pairs), dtype=float)
    groups: Dict[Tuple[int, int], List[int]] = {}
    for k, (p, q) in enumerate(pairs):
        _check_L(p)
        _check_L(q)
        m, n = int(min(p[1], q[1])), int(max(p[1], q[1]))
        if m == n:
            out[k] = seq.D * abs(q[0] - p[0])
        else:
            groups.setdefault((m, n), []).append(k)
    for (m, n), members in groups.items():
        norm = norm_from_profile(averaged_profile(seq, m, n, seq.D))
        dx = np.array([pairs[k][1][0] - pairs[k][0][0] for k in members], dtype=float)
        dy = np.array([pairs[k][1][1] - pairs[k][0][1] for k in members], dtype=float)
        out[members] = norm(dx, dy)
    return out

def _random_L_points(rng: np.random.Generator, count: int, margin: int) -> np.ndarray:
    pts = rng.integers(-margin, margin + 1, size=(count, 2))
    odd = (pts[:, 0] + pts[:, 1]) % 2 != 0
    # 奇点沿 y 方向挪一格回到 L，保持在盒内
    shift = np.where(pts[:, 1] > -margin, -1, 1)
    pts[odd, 1] += shift[odd]
    return pts

def estimate_C(spec: LatticeSpec, samples: int, seed: int) -> float:
    """
    Ĉ = 查询盒内抽样 L 点对上 |closed_form_dL(p,q) − ‖q−p‖⁰| 的最大值

    Args:
        spec: 构造参数（使用其查询盒）
        samples: 点对数
        seed: 随机种子（PCG64）
    """
    ParamValidators.validate_integer(samples, min_value=1, name="samples")
    ParamValidators.validate_integer(seed, min_value=0, max_value=2 ** 64 - 1, name="seed")
    if spec.query_margin < 1:
        raise ValidationError("查询盒过小，无法抽样")
    rng = np.random.Generator(np.random.PCG64(seed))
    ps = _random_L_points(rng, samples, spec.query_margin)
    qs = _random_L_points(rng, samples, spec.query_margin)
    pairs = [((int(p[0]), int(p[1])), (int(q[0]), int(q[1]))) for p, q in zip(ps, qs)]
    graph_dist = closed_form_dL_batch(pairs, spec.seq)
    target = norm0(qs[:, 0] - ps[:, 0], qs[:, 1] - ps[:, 1])
    constant = float(np.max(np.abs(graph_dist - target)))
    logger.info(f"闭合常数估计: Ĉ={constant:.6g} (N={spec.N}, 样本={samples}, seed={seed})")
    return constant

def auto_glue_length(constant: float) -> int:
    """M = ⌈2Ĉ + 1⌉"""
    return int(math.ceil(2.0 * constant + 1.0))

# ----------------------------------------------------------------------
# 验证
# ----------------------------------------------------------------------

def sample_pairs(pg: PlanarGraph, count: int, seed: int) -> List[Tuple[int, int]]:
    """
    在查询盒内抽取顶点对，按源点分组（约 √count 个源点）以减少最短路次数

    Returns:
        按 (源点, 目标) 排序的顶点对
    """
    ParamValidators.validate_integer(count, min_value=1, name="samples")
    ParamValidators.validate_integer(seed, min_value=0, max_value=2 ** 64 - 1, name="seed")
    margin = pg.spec.query_margin
    coords = pg.graph.coords
    inside = np.flatnonzero((np.abs(coords[:, 0]) <= margin) & (np.abs(coords[:, 1]) <= margin))
    if inside.size == 0:
        raise PlanarError("查询盒内没有顶点")
    rng = np.random.Generator(np.random.PCG64(seed))
    n_sources = max(1, int(math.isqrt(count)))
    sources = rng.choice(inside, size=n_sources, replace=inside.size < n_sources)
    per_source = np.full(n_sources, count // n_sources)
    per_source[:count % n_sources] += 1
    pairs = []
    for s, k in zip(sources.tolist(), per_source.tolist()):
        for t in rng.choice(inside, size=k, replace=True).tolist():
            pairs.append((int(s), int(t)))
    pairs.sort()
    return pairs

@dataclass
class PlanarReport:
    """逐点对误差与按欧氏距离十分位的聚合"""
    rows: List[tuple]
    deciles: List[DecileStats]
    max_abs_error: float
    min_signed_error: float

    def no_growth_ratio(self) -> float:
        """最远十分位最大误差 / 最近非零十分位最大误差"""
        return decile_growth_ratio(self.deciles)

    def lower_bound_holds(self, slack: float) -> bool:
        """d_Γ ≥ |p−q| − slack 对全部点对成立"""
        return all(row[7] >= row[6] - slack - 1e-9 for row in self.rows)

    def summary(self) -> Dict[str, object]:
        return {
            'pairs': len(self.rows),
            'max_abs_error': self.max_abs_error,
            'min_signed_error': self.min_signed_error,
            'no_growth_ratio': self.no_growth_ratio(),
            'deciles': [vars(d) for d in self.deciles],
        }

def _grouped_distances(graph: MetricGraph, pairs: Sequence[Tuple[int, int]], workers: int) -> np.ndarray:
    sources = sorted({s for s, _ in pairs})
    rows = distance_rows(graph, sources, workers)
    position = {s: k for k, s in enumerate(sources)}
    return np.array([rows[position[s], t] for s, t in pairs], dtype=float)

def verify_planar(pg: PlanarGraph, pairs: Sequence[Tuple[int, int]], workers: int = None) -> PlanarReport:
    """
    计算抽样点对的图距离与欧氏距离之差

    Raises:
        PlanarError: 点对不在查询盒内时
    """
    if not pairs:
        raise PlanarError("点对列表为空")
    for s, t in pairs:
        for v in (s, t):
            x, y, _ = pg.point(v)
            if not pg.in_query_box(x, y):
                raise PlanarError(f"点 ({x}, {y}) 超出查询盒 [−{pg.spec.query_margin}, {pg.spec.query_margin}]²")
    graph_dist = _grouped_distances(pg.graph, pairs, workers)
    rows = []
    for (s, t), d in zip(pairs, graph_dist):
        px, py, pl = pg.point(s)
        qx, qy, ql = pg.point(t)
        euclid = math.hypot(qx - px, qy - py)
        rows.append((px, py, pl, qx, qy, ql, euclid, float(d), float(d) - euclid))
    rows.sort(key=lambda r: (r[0], r[1], int(r[2]), r[3], r[4], int(r[5])))
    euclid = np.array([r[6] for r in rows])
    errors = np.array([r[8] for r in rows])
    report = PlanarReport(rows, decile_stats(euclid, errors), float(np.max(np.abs(errors))), float(np.min(errors)))
    logger.info(f"平面验证完成: 点对={len(rows)}, 最大误差={report.max_abs_error:.6g}, "
                f"增长比={report.no_growth_ratio():.4g}")
    return report

@dataclass
class OracleResult:
    pairs: int
    max_difference: float

def oracle_equivalence(pg: PlanarGraph, half_width: int = None, workers: int = None) -> OracleResult:
    """
    中心子盒 [−h, h]² 内全部 L 点对上比较最短路与闭式距离

    Raises:
        PlanarError: 图不是单独的 L 层或子盒超出构造盒时
    """
    if pg.layers != (Layer.L,):
        raise PlanarError("闭式距离对照只适用于单独的 L 层图")
    h = PlanarConfig.ORACLE_HALF_WIDTH if half_width is None else half_width
    ParamValidators.validate_integer(h, min_value=1, max_value=pg.spec.N, name="half_width")
    points = [(x, y) for x in range(-h, h + 1) for y in range(-h, h + 1) if (x + y) % 2 == 0]
    ids = [pg.vertex(x, y) for x, y in points]
    rows = distance_rows(pg.graph, ids, workers)
    pairs, dijkstra = [], []
    for a in range(len(points)):
        for b in range(a + 1, len(points)):
            pairs.append((points[a], points[b]))
            dijkstra.append(rows[a, ids[b]])
    closed = closed_form_dL_batch(pairs, pg.spec.seq)
    diff = float(np.max(np.abs(np.asarray(dijkstra) - closed))) if pairs else 0.0
    logger.info(f"闭式距离对照: 子盒半宽={h}, 点对={len(pairs)}, 最大偏差={diff:.3g}")
    return OracleResult(len(pairs), diff)
