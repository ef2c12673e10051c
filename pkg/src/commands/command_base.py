"""
命令基类
提供命令的共享功能：退出码映射、结果格式化、断言汇总与耗时记录
"""

import functools
import logging
import os
import time
from contextlib import contextmanager
from typing import Any, Callable, Dict, List, Optional

from src.analysis.lowdisc import QuadratureError
from src.analysis.profiles import ProfileError
from src.config import CommandType, RunnerConfig
from src.graph.hyperbolic import ConstructionError
from src.graph.metric_graph import GraphError
from src.graph.planar import PlanarError
from src.validators import ValidationError

logger = logging.getLogger("uniform_graph")

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG_ERROR = 2
EXIT_IO_ERROR = 3

class CommandError(Exception):
    """命令异常基类"""
    exit_status = EXIT_CHECK_FAILED

class ConfigError(CommandError):
    """运行配置错误"""
    exit_status = EXIT_CONFIG_ERROR

class CheckFailure(CommandError):
    """断言的界不成立"""
    exit_status = EXIT_CHECK_FAILED

class ReportIOError(CommandError):
    """报告读写错误"""
    exit_status = EXIT_IO_ERROR

_DOMAIN_ERRORS = (ConstructionError, PlanarError, ProfileError, GraphError, QuadratureError)

class CommandBase:
    """
    命令基类
    提供共享功能：
    - 错误处理与退出码
    - 结果格式化
    - 断言收集
    """

    def __init__(self, config):
        self.config = config
        self.failures: List[str] = []

    def path(self, name: str) -> str:
        """输出目录下的报告路径"""
        return os.path.join(self.config.out, name)

    def check(self, condition: bool, message: str) -> bool:
        """记录一条断言；失败时记日志，不立即中断（报告照常写出）"""
        if not condition:
            logger.warning(f"断言失败: {message}")
            self.failures.append(message)
        return bool(condition)

    def finish(self) -> int:
        """
        报告写完后调用

        Raises:
            CheckFailure: 有断言失败时
        """
        if self.failures:
            raise CheckFailure("; ".join(self.failures))
        return EXIT_OK

    @staticmethod
    @contextmanager
    def timed_step(name: str):
        """记录步骤耗时，超过 SLOW_STEP_SECONDS 时给出警告"""
        start = time.perf_counter()
        yield
        elapsed = time.perf_counter() - start
        if elapsed > RunnerConfig.SLOW_STEP_SECONDS:
            logger.warning(f"步骤耗时较长: {name} {elapsed:.1f}s")
        else:
            logger.debug(f"步骤完成: {name} {elapsed:.2f}s")

    @staticmethod
    def format_results(results: Any, operation_type: str, result_count: Optional[int] = None) -> Dict[str, Any]:
        """
        格式化命令结果为报告结构

        Args:
            results: 结果内容
            operation_type: 操作类型描述
            result_count: 结果条数，缺省按 results 长度计算

        Returns:
            {"metadata_info": {...}, "results": ...}
        """
        if result_count is None:
            result_count = len(results) if hasattr(results, '__len__') else 1
        return {
            "metadata_info": {
                "operation_type": operation_type,
                "result_count": result_count
            },
            "results": results
        }

    @staticmethod
    def handle_command_error(func: Callable[..., int]) -> Callable[..., int]:
        """
        装饰器: 统一把命令执行中的异常映射为退出码
        配置/参数错误 → 2，断言失败与构造失败 → 1，读写错误 → 3
        """
        @functools.wraps(func)
        def wrapper(*args, **kwargs) -> int:
            try:
                return func(*args, **kwargs)
            except (ConfigError, ValidationError) as e:
                logger.error(f"配置错误: {str(e)}")
                return EXIT_CONFIG_ERROR
            except CheckFailure as e:
                logger.error(f"断言失败: {str(e)}")
                return EXIT_CHECK_FAILED
            except _DOMAIN_ERRORS as e:
                logger.error(f"构造失败: {type(e).__name__}: {str(e)}")
                return EXIT_CHECK_FAILED
            except (ReportIOError, OSError) as e:
                logger.error(f"读写错误: {str(e)}")
                return EXIT_IO_ERROR
            except CommandError as e:
                logger.error(f"命令失败: {str(e)}")
                return e.exit_status
        return wrapper

class CommandRegistry:
    """命令名到处理函数的映射"""

    def __init__(self):
        self._handlers: Dict[CommandType, Callable] = {}

    def register(self, command: CommandType, handler: Callable):
        if command in self._handlers:
            raise ConfigError(f"命令重复注册: {command.value}")
        self._handlers[command] = handler
        logger.debug(f"注册命令: {command.value}")

    def get(self, command: CommandType) -> Callable:
        try:
            return self._handlers[command]
        except KeyError:
            raise ConfigError(f"未注册的命令: {command.value}")

    def __contains__(self, command: CommandType) -> bool:
        return command in self._handlers

    def names(self) -> List[str]:
        return sorted(c.value for c in self._handlers)
