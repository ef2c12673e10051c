"""
带权无向度量图
提供不可变的图表示、二叉堆最短路、批量最短路（scipy csgraph）与一致性统计
"""

import heapq
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse import csgraph

from src.config import Layer, RunnerConfig
from src.output.writers import write_csv

logger = logging.getLogger("uniform_graph")

EDGE_CSV_HEADER = ('x1', 'y1', 'layer1', 'x2', 'y2', 'layer2', 'length')

class GraphError(Exception):
    """图结构或查询参数错误"""
    pass

class MetricGraph:
    """
    不可变的带权无向图

    边以无序对 (a, b, ℓ)（a < b）存储，对称性由存储方式保证；
    可选的顶点载荷为二维坐标与所在层。
    """

    def __init__(self, vertex_count: int, heads: np.ndarray, tails: np.ndarray, lengths: np.ndarray,
                 coords: Optional[np.ndarray] = None, layers: Optional[np.ndarray] = None):
        self._n = int(vertex_count)
        self._a = heads
        self._b = tails
        self._length = lengths
        self.coords = coords
        self.layers = layers
        rows = np.concatenate((heads, tails))
        cols = np.concatenate((tails, heads))
        data = np.concatenate((lengths, lengths))
        self._csr = csr_matrix((data, (rows, cols)), shape=(self._n, self._n))
        self._csr.sort_indices()

    @classmethod
    def from_edges(cls, vertex_count: int, edges: Iterable[Tuple[int, int, float]],
                   coords: Optional[np.ndarray] = None, layers: Optional[np.ndarray] = None) -> "MetricGraph":
        """
        由边列表构造图并校验

        Args:
            vertex_count: 顶点数
            edges: (a, b, length) 三元组
            coords: 可选 (vertex_count, 2) 坐标
            layers: 可选 (vertex_count,) 层编号

        Raises:
            GraphError: 顶点越界、自环、重复边或长度非正/非有限时
        """
        if vertex_count < 0:
            raise GraphError(f"顶点数不能为负: {vertex_count}")
        triples = list(edges)
        if triples:
            arr = np.asarray(triples, dtype=float)
            a = arr[:, 0].astype(np.int64)
            b = arr[:, 1].astype(np.int64)
            lengths = arr[:, 2]
        else:
            a = b = np.empty(0, dtype=np.int64)
            lengths = np.empty(0, dtype=float)
        return cls.from_arrays(vertex_count, a, b, lengths, coords, layers)

    @classmethod
    def from_arrays(cls, vertex_count: int, a: np.ndarray, b: np.ndarray, lengths: np.ndarray,
                    coords: Optional[np.ndarray] = None, layers: Optional[np.ndarray] = None) -> "MetricGraph":
        """由端点数组构造图，校验规则同 from_edges"""
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        lengths = np.asarray(lengths, dtype=float)
        if not (a.shape == b.shape == lengths.shape):
            raise GraphError("端点数组与长度数组形状不一致")
        if a.size:
            if min(a.min(), b.min()) < 0 or max(a.max(), b.max()) >= vertex_count:
                raise GraphError(f"边端点超出顶点范围 [0, {vertex_count})")
            if np.any(a == b):
                bad = int(a[a == b][0])
                raise GraphError(f"不允许自环: 顶点 {bad}")
            if not np.all(np.isfinite(lengths)) or np.any(lengths <= 0):
                raise GraphError("边长必须是有限正数")
        lo = np.minimum(a, b)
        hi = np.maximum(a, b)
        order = np.lexsort((hi, lo))
        lo, hi, lengths = lo[order], hi[order], lengths[order]
        if lo.size > 1:
            dup = (lo[1:] == lo[:-1]) & (hi[1:] == hi[:-1])
            if np.any(dup):
                k = int(np.argmax(dup))
                raise GraphError(f"重复边: ({lo[k]}, {hi[k]})")
        if coords is not None and len(coords) != vertex_count:
            raise GraphError("坐标数量与顶点数不一致")
        if layers is not None and len(layers) != vertex_count:
            raise GraphError("层编号数量与顶点数不一致")
        return cls(vertex_count, lo, hi, lengths, coords, layers)

    @property
    def vertex_count(self) -> int:
        return self._n

    @property
    def edge_count(self) -> int:
        return int(self._length.size)

    @property
    def csr(self) -> csr_matrix:
        return self._csr

    def check_vertex(self, v: int) -> int:
        if isinstance(v, bool) or not isinstance(v, (int, np.integer)) or not 0 <= v < self._n:
            raise GraphError(f"无效的顶点编号: {v}")
        return int(v)

    def degrees(self) -> np.ndarray:
        return np.diff(self._csr.indptr)

    def degree(self, v: int) -> int:
        v = self.check_vertex(v)
        return int(self._csr.indptr[v + 1] - self._csr.indptr[v])

    def neighbors(self, v: int) -> List[Tuple[int, float]]:
        """邻接表 [(邻点, 边长)]，按邻点编号排序"""
        v = self.check_vertex(v)
        start, end = self._csr.indptr[v], self._csr.indptr[v + 1]
        return list(zip(self._csr.indices[start:end].tolist(), self._csr.data[start:end].tolist()))

    def edges(self) -> Iterator[Tuple[int, int, float]]:
        """按 (a, b) 字典序遍历边，a < b"""
        for a, b, length in zip(self._a.tolist(), self._b.tolist(), self._length.tolist()):
            yield a, b, length

    def edge_arrays(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        return self._a, self._b, self._length

    def has_edge(self, a: int, b: int) -> bool:
        a, b = self.check_vertex(a), self.check_vertex(b)
        start, end = self._csr.indptr[a], self._csr.indptr[a + 1]
        k = np.searchsorted(self._csr.indices[start:end], b)
        return bool(k < end - start and self._csr.indices[start + k] == b)

    def with_edges(self, a: np.ndarray, b: np.ndarray, lengths: np.ndarray) -> "MetricGraph":
        """返回追加了新边的新图（原图不变）"""
        return MetricGraph.from_arrays(
            self._n,
            np.concatenate((self._a, np.asarray(a, dtype=np.int64))),
            np.concatenate((self._b, np.asarray(b, dtype=np.int64))),
            np.concatenate((self._length, np.asarray(lengths, dtype=float))),
            self.coords, self.layers)

def shortest_path_dist(g: MetricGraph, source: int, targets: Optional[Iterable[int]] = None) -> Dict[int, float]:
    """
    单源最短路（二叉堆 Dijkstra），作为参考实现

    Args:
        g: 度量图
        source: 源点
        targets: 目标点集合，缺省为全部顶点

    Returns:
        目标点到距离的映射，不可达为 inf

    Raises:
        GraphError: 顶点编号无效时
    """
    source = g.check_vertex(source)
    wanted = set(range(g.vertex_count)) if targets is None else {g.check_vertex(t) for t in targets}
    indptr, indices, data = g.csr.indptr, g.csr.indices, g.csr.data
    dist = {source: 0.0}
    settled = set()
    remaining = set(wanted)
    heap = [(0.0, source)]
    while heap and remaining:
        d, v = heapq.heappop(heap)
        if v in settled:
            continue
        settled.add(v)
        remaining.discard(v)
        for k in range(indptr[v], indptr[v + 1]):
            w = int(indices[k])
            nd = d + float(data[k])
            if nd < dist.get(w, math.inf):
                dist[w] = nd
                heapq.heappush(heap, (nd, w))
    return {t: (dist[t] if t in settled else math.inf) for t in wanted}

def _dijkstra_chunk(csr: csr_matrix, sources: np.ndarray) -> np.ndarray:
    return csgraph.dijkstra(csr, directed=False, indices=sources)

def distance_rows(g: MetricGraph, sources: Sequence[int], workers: int = None) -> np.ndarray:
    """
    批量单源最短路，各源点分块在线程池中并行

    Args:
        g: 度量图（只读共享）
        sources: 源点列表
        workers: 线程数，缺省取 RunnerConfig.WORKERS

    Returns:
        (len(sources), vertex_count) 距离矩阵，行顺序与 sources 一致

    Raises:
        GraphError: 顶点编号无效时
    """
    src = np.asarray([g.check_vertex(int(s)) for s in sources], dtype=np.int64)
    if src.size == 0:
        return np.empty((0, g.vertex_count), dtype=float)
    workers = max(1, int(workers or RunnerConfig.WORKERS))
    chunks = [c for c in np.array_split(src, min(workers * 4, src.size)) if c.size]
    if workers == 1 or len(chunks) == 1:
        return np.vstack([_dijkstra_chunk(g.csr, c) for c in chunks])
    with ThreadPoolExecutor(max_workers=workers) as executor:
        parts = list(executor.map(lambda c: _dijkstra_chunk(g.csr, c), chunks))
    return np.vstack(parts)

@dataclass(frozen=True)
class UniformityReport:
    """度数与边长统计；空图时 empty 为真，min_length 为 inf，max_length 为 0"""
    max_degree: int
    min_length: float
    max_length: float
    empty: bool = False

    def as_tuple(self) -> Tuple[int, float, float]:
        return self.max_degree, self.min_length, self.max_length

def uniformity_report(g: MetricGraph) -> UniformityReport:
    """最大度数、最小与最大边长"""
    _, _, lengths = g.edge_arrays()
    if lengths.size == 0:
        return UniformityReport(0, math.inf, 0.0, empty=True)
    return UniformityReport(int(g.degrees().max()), float(lengths.min()), float(lengths.max()))

@dataclass
class DecileStats:
    lower: float
    upper: float
    count: int
    max_abs_error: float

def decile_stats(reference: np.ndarray, errors: np.ndarray) -> List[DecileStats]:
    """按参考距离排序后均分为 10 组，统计每组最大绝对误差"""
    order = np.argsort(reference, kind='stable')
    stats = []
    for chunk in np.array_split(order, 10):
        if chunk.size == 0:
            continue
        stats.append(DecileStats(float(reference[chunk].min()), float(reference[chunk].max()),
                                 int(chunk.size), float(np.max(np.abs(errors[chunk])))))
    return stats

def decile_growth_ratio(deciles: List[DecileStats]) -> float:
    """最远十分位最大误差 / 最近非零十分位最大误差"""
    nonzero = [d.max_abs_error for d in deciles if d.max_abs_error > 1e-12]
    if not nonzero:
        return 0.0
    return deciles[-1].max_abs_error / nonzero[0]


def _endpoint_key(g: MetricGraph, v: int) -> Tuple[float, float, int]:
    x, y = g.coords[v][0], g.coords[v][1]
    layer = int(g.layers[v]) if g.layers is not None else int(Layer.L)
    return float(x), float(y), layer

def edge_rows(g: MetricGraph) -> List[tuple]:
    """导出用的边行，每条边较小端点在前，整体按字典序排序"""
    if g.coords is None:
        raise GraphError("导出边表需要顶点坐标")
    rows = []
    for a, b, length in g.edges():
        ka, kb = _endpoint_key(g, a), _endpoint_key(g, b)
        if kb < ka:
            ka, kb = kb, ka
        rows.append((ka, kb, length))
    rows.sort()
    return [(ka[0], ka[1], Layer(ka[2]), kb[0], kb[1], Layer(kb[2]), length) for ka, kb, length in rows]

def export_edges_csv(g: MetricGraph, path: str) -> int:
    """
    导出边表 CSV，表头 x1,y1,layer1,x2,y2,layer2,length

    Returns:
        写入的边数
    """
    count = write_csv(path, EDGE_CSV_HEADER, edge_rows(g))
    logger.info(f"边表已导出: {path} ({count} 条边)")
    return count
