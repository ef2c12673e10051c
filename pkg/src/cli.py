import argparse
import importlib
import inspect
import logging
import pkgutil
import sys
from typing import Any, Dict, List, Optional

from dotenv import load_dotenv

# 加载环境变量 - 放在最前面确保配置模块导入前环境变量已加载
load_dotenv()

# 导入自定义模块 - 确保在load_dotenv之后导入
from src.config import CommandType, RunnerConfig
from src.commands.command_base import EXIT_OK, CommandError, CommandRegistry
from src.commands.run_config import RunConfig, build_run_config, load_config_file

logger = logging.getLogger("uniform_graph")

# 命令行参数名到配置键
FLAG_KEYS = {
    'alpha': 'alpha',
    'n': 'N',
    'm': 'M',
    'radius': 'R',
    'epsilon': 'epsilon',
    'delta': 'delta',
    'seed': 'seed',
    'samples': 'samples',
    'out': 'out',
    'integer': 'integer',
    'morse_d': 'morse_d',
    'workers': 'workers',
}

def configure_logging(level: str = None):
    logging.basicConfig(
        level=getattr(logging, (level or RunnerConfig.LOG_LEVEL).upper(), logging.INFO),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    )

def auto_register_commands(registry: CommandRegistry) -> CommandRegistry:
    """
    自动扫描src.commands目录下所有register_开头、commands结尾的函数并注册
    """
    import src.commands
    package = src.commands
    for finder, name, ispkg in pkgutil.iter_modules(package.__path__, package.__name__ + "."):
        if ispkg:
            continue
        module = importlib.import_module(name)
        for func_name, func in inspect.getmembers(module, inspect.isfunction):
            if func_name.startswith("register_") and func_name.endswith("commands") and func.__module__ == name:
                func(registry)
                logger.debug(f"自动注册命令: {name}.{func_name}")
    return registry

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="uniform-graph",
        description="构造并验证逼近欧氏平面与双曲平面的一致度量图"
    )
    parser.add_argument("command", choices=[c.value for c in CommandType], help="要执行的命令")
    parser.add_argument("--config", help="JSON 配置文件路径")
    parser.add_argument("--alpha", help="旋转数标签 (sqrt2_minus_1, golden_conjugate) 或数值")
    parser.add_argument("--n", help="平面构造半宽 N；verify-sequence 中为序列长度")
    parser.add_argument("--m", help="粘合边长 M，或 auto")
    parser.add_argument("--radius", help="双曲查询球半径 R")
    parser.add_argument("--epsilon", help="ε-网参数")
    parser.add_argument("--delta", help="捷径参数 δ")
    parser.add_argument("--seed", help="64 位无符号随机种子")
    parser.add_argument("--samples", help="抽样点对数")
    parser.add_argument("--out", help="报告输出目录")
    parser.add_argument("--integer", action="store_const", const=True, default=None, help="双曲整数边长模式")
    parser.add_argument("--morse-d", dest="morse_d", help="直接给定 Morse 常数 D̂")
    parser.add_argument("--workers", help="最短路批处理线程数")
    parser.add_argument("--log-level", help="日志级别，缺省取 LOG_LEVEL")
    return parser

def merge_values(args: argparse.Namespace) -> Dict[str, Any]:
    """配置文件在下，命令行参数覆盖其上"""
    values: Dict[str, Any] = load_config_file(args.config) if args.config else {}
    for flag, key in FLAG_KEYS.items():
        value = getattr(args, flag)
        if value is not None:
            values[key] = value
    return values

def run(config: RunConfig, registry: CommandRegistry = None) -> int:
    """
    执行一条命令

    Returns:
        退出码：0 全部断言成立，1 断言失败或构造失败，2 配置错误，3 读写错误
    """
    registry = registry or auto_register_commands(CommandRegistry())
    handler = registry.get(config.command)
    logger.info(f"开始执行命令: {config.command.value}")
    status = handler(config)
    if status == EXIT_OK:
        logger.info(f"命令完成: {config.command.value}")
    return status

def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level)
    try:
        config = build_run_config(args.command, merge_values(args))
        return run(config)
    except CommandError as e:
        logger.error(f"{type(e).__name__}: {str(e)}")
        return e.exit_status
    except KeyboardInterrupt:
        logger.info("收到中断信号，退出")
        return 130

if __name__ == "__main__":
    sys.exit(main())
