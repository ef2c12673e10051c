"""
运行配置
JSON 配置文件与命令行参数合并后的单次运行参数；未知键拒绝，抽样命令必须给出种子
"""

import json
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Union

from src.analysis.betaseq import BetaSequence
from src.analysis.lowdisc import QuadraticIrrational
from src.config import AlphaLabel, CommandType, HyperbolicConfig, PlanarConfig, RunnerConfig, SequenceConfig
from src.commands.command_base import ConfigError, ReportIOError
from src.validators import ValidationError

logger = logging.getLogger("uniform_graph")

ALLOWED_KEYS = ('alpha', 'N', 'M', 'R', 'epsilon', 'delta', 'seed', 'samples', 'out', 'integer', 'morse_d', 'workers')

SAMPLING_COMMANDS = frozenset({
    CommandType.VERIFY_PLANAR,
    CommandType.CALIBRATE_PLANAR,
    CommandType.VERIFY_HYPERBOLIC,
    CommandType.VERIFY_PROFILE,
})

AUTO = 'auto'
SEED_LIMIT = 2 ** 64 - 1

@dataclass(frozen=True)
class RunConfig:
    """单次运行参数；N 为 None 时由命令取默认值"""
    command: CommandType
    alpha: Union[str, float] = field(default_factory=lambda: SequenceConfig.ALPHA)
    N: Optional[int] = None
    M: Union[str, float] = AUTO
    R: float = field(default_factory=lambda: HyperbolicConfig.RADIUS)
    epsilon: float = field(default_factory=lambda: HyperbolicConfig.EPSILON)
    delta: float = field(default_factory=lambda: HyperbolicConfig.DELTA)
    seed: Optional[int] = None
    samples: int = field(default_factory=lambda: PlanarConfig.SAMPLES)
    out: str = field(default_factory=lambda: RunnerConfig.OUTPUT_DIR)
    integer: bool = False
    morse_d: Optional[float] = None
    workers: int = field(default_factory=lambda: RunnerConfig.WORKERS)

    @property
    def auto_glue(self) -> bool:
        return self.M == AUTO

    @property
    def needs_seed(self) -> bool:
        if self.command in SAMPLING_COMMANDS:
            return True
        return self.command in (CommandType.BUILD_PLANAR, CommandType.EXPORT) and self.auto_glue

    def half_width(self, default: int = None) -> int:
        return self.N if self.N is not None else (default or PlanarConfig.HALF_WIDTH)

    def rotation(self) -> QuadraticIrrational:
        """由 alpha 标签或数值构造旋转数"""
        if isinstance(self.alpha, str):
            return QuadraticIrrational.from_label(self.alpha)
        return QuadraticIrrational.custom(self.alpha)

    def beta_sequence(self) -> BetaSequence:
        return BetaSequence(self.rotation())

    def as_dict(self) -> Dict[str, Any]:
        """写入报告的参数（不含输出目录，保证换目录后报告相同）"""
        data = {k: getattr(self, k) for k in ALLOWED_KEYS if k not in ('out', 'workers')}
        data['command'] = self.command.value
        return data

def _as_int(key: str, value: Any) -> int:
    if isinstance(value, bool):
        raise ConfigError(f"{key} 必须是整数")
    if isinstance(value, float) and value.is_integer():
        value = int(value)
    if isinstance(value, str):
        try:
            value = int(value)
        except ValueError:
            raise ConfigError(f"{key} 必须是整数，当前值: {value}")
    if not isinstance(value, int):
        raise ConfigError(f"{key} 必须是整数，当前值: {value}")
    return value

def _as_float(key: str, value: Any) -> float:
    if isinstance(value, bool):
        raise ConfigError(f"{key} 必须是数值")
    try:
        result = float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{key} 必须是数值，当前值: {value}")
    if not math.isfinite(result):
        raise ConfigError(f"{key} 必须是有限数值")
    return result

def _as_bool(key: str, value: Any) -> bool:
    if isinstance(value, bool):
        return value
    if isinstance(value, str) and value.lower() in ('true', 'false', '1', '0'):
        return value.lower() in ('true', '1')
    raise ConfigError(f"{key} 必须是布尔值，当前值: {value}")

def _parse_alpha(value: Any) -> Union[str, float]:
    if isinstance(value, str):
        try:
            label = AlphaLabel(value)
        except ValueError:
            return _as_float('alpha', value)
        if label == AlphaLabel.CUSTOM:
            raise ConfigError("alpha=custom 需要直接给出数值")
        return label.value
    return _as_float('alpha', value)

def _parse_glue(value: Any) -> Union[str, float]:
    if isinstance(value, str) and value.lower() == AUTO:
        return AUTO
    return _as_float('M', value)

_PARSERS = {
    'alpha': _parse_alpha,
    'N': lambda v: _as_int('N', v),
    'M': _parse_glue,
    'R': lambda v: _as_float('R', v),
    'epsilon': lambda v: _as_float('epsilon', v),
    'delta': lambda v: _as_float('delta', v),
    'seed': lambda v: None if v is None else _as_int('seed', v),
    'samples': lambda v: _as_int('samples', v),
    'out': lambda v: str(v),
    'integer': lambda v: _as_bool('integer', v),
    'morse_d': lambda v: None if v is None else _as_float('morse_d', v),
    'workers': lambda v: _as_int('workers', v),
}

def _validate(config: RunConfig):
    if config.N is not None and config.N < 2:
        raise ConfigError(f"N 必须 ≥ 2，当前值: {config.N}")
    if not config.auto_glue and config.M <= 0:
        raise ConfigError(f"M 必须为正数或 auto，当前值: {config.M}")
    for key in ('R', 'epsilon', 'delta'):
        if getattr(config, key) <= 0:
            raise ConfigError(f"{key} 必须为正数")
    if config.samples < 1:
        raise ConfigError("samples 必须 ≥ 1")
    if config.workers < 1:
        raise ConfigError("workers 必须 ≥ 1")
    if config.morse_d is not None and config.morse_d < 0:
        raise ConfigError("morse_d 不能为负")
    if config.seed is not None and not 0 <= config.seed <= SEED_LIMIT:
        raise ConfigError(f"seed 必须是 64 位无符号整数，当前值: {config.seed}")
    if config.needs_seed and config.seed is None:
        raise ConfigError(f"命令 {config.command.value} 需要抽样，必须给出 seed")
    if config.integer and min(config.epsilon, config.delta) < HyperbolicConfig.INTEGER_MIN_SCALE:
        raise ConfigError(f"整数模式需要 epsilon, delta ≥ {HyperbolicConfig.INTEGER_MIN_SCALE}")
    try:
        config.rotation()
    except ValidationError as e:
        raise ConfigError(f"alpha 无效: {str(e)}")

def build_run_config(command: Union[str, CommandType], values: Dict[str, Any]) -> RunConfig:
    """
    由键值对构造并校验运行配置

    Args:
        command: 命令名
        values: 配置键值（值为 None 的键视为未给出，seed/morse_d 除外）

    Raises:
        ConfigError: 未知命令、未知键、类型或取值错误、缺少 seed 时
    """
    try:
        command = CommandType(command)
    except ValueError:
        raise ConfigError(f"未知命令: {command}")
    unknown = sorted(set(values) - set(ALLOWED_KEYS))
    if unknown:
        raise ConfigError(f"未知的配置键: {', '.join(unknown)}")
    parsed = {key: _PARSERS[key](value) for key, value in values.items()
              if value is not None or key in ('seed', 'morse_d')}
    config = RunConfig(command=command, **parsed)
    _validate(config)
    logger.debug(f"运行配置: {config}")
    return config

def load_config_file(path: str) -> Dict[str, Any]:
    """
    读取 JSON 配置文件

    Raises:
        ReportIOError: 文件无法读取时
        ConfigError: 内容不是 JSON 对象时
    """
    try:
        with open(path, 'r', encoding='utf-8') as handle:
            data = json.load(handle)
    except json.JSONDecodeError as e:
        raise ConfigError(f"配置文件不是合法 JSON: {path} ({e})")
    except OSError as e:
        raise ReportIOError(f"无法读取配置文件 {path}: {e}")
    if not isinstance(data, dict):
        raise ConfigError("配置文件顶层必须是 JSON 对象")
    return data

