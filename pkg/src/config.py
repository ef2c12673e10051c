import os
import math
from enum import Enum, IntEnum

# 旋转数标签
class AlphaLabel(Enum):
    """二次无理数旋转数的取值"""
    SQRT2_MINUS_1 = 'sqrt2_minus_1'
    GOLDEN_CONJUGATE = 'golden_conjugate'
    CUSTOM = 'custom'

class Layer(IntEnum):
    """格点图的层"""
    L = 0        # i+j 为偶数
    LP = 1       # i+j 为奇数（L′）
    H = 2        # 双曲网点

class CommandType(Enum):
    """命令行支持的命令"""
    BUILD_PLANAR = 'build-planar'
    VERIFY_PLANAR = 'verify-planar'
    CALIBRATE_PLANAR = 'calibrate-planar'
    BUILD_HYPERBOLIC = 'build-hyperbolic'
    VERIFY_HYPERBOLIC = 'verify-hyperbolic'
    VERIFY_SEQUENCE = 'verify-sequence'
    VERIFY_PROFILE = 'verify-profile'
    EXPORT = 'export'

# 低差异序列配置
class SequenceConfig:
    """旋转序列相关配置"""
    ALPHA = os.getenv('ALPHA', AlphaLabel.SQRT2_MINUS_1.value)
    # j·α 直接用64位浮点计算，|j| 超过此值时拒绝
    MAX_INDEX = int(os.getenv('MAX_INDEX', str(10 ** 7)))
    # 自适应积分的绝对误差
    QUAD_TOLERANCE = float(os.getenv('QUAD_TOLERANCE', '1e-10'))
    # 自定义 α 的 Liouville 检查范围
    MARGIN_SCAN = int(os.getenv('MARGIN_SCAN', str(10 ** 5)))

    @staticmethod
    def get_config():
        """获取序列配置字典"""
        return {
            'alpha': SequenceConfig.ALPHA,
            'max_index': SequenceConfig.MAX_INDEX,
            'quad_tolerance': SequenceConfig.QUAD_TOLERANCE,
            'margin_scan': SequenceConfig.MARGIN_SCAN
        }

# 对偶轮廓配置
class ProfileConfig:
    """对偶轮廓与范数计算配置"""
    GRID = int(os.getenv('PROFILE_GRID', '2049'))
    CONCAVITY_TOLERANCE = float(os.getenv('CONCAVITY_TOLERANCE', '1e-9'))
    # Legendre 变换中区间扩张的最大次数
    MAX_BRACKET_STEPS = int(os.getenv('MAX_BRACKET_STEPS', '60'))

    @staticmethod
    def get_config():
        """获取轮廓配置字典"""
        return {
            'grid': ProfileConfig.GRID,
            'concavity_tolerance': ProfileConfig.CONCAVITY_TOLERANCE,
            'max_bracket_steps': ProfileConfig.MAX_BRACKET_STEPS
        }

# 平面格点图配置
class PlanarConfig:
    """平面格点图构造配置"""
    D = math.sqrt(2.0)
    HALF_WIDTH = int(os.getenv('PLANAR_HALF_WIDTH', '64'))
    SAMPLES = int(os.getenv('PLANAR_SAMPLES', '2000'))
    # 中心子盒半宽（闭式公式与最短路对照）
    ORACLE_HALF_WIDTH = int(os.getenv('PLANAR_ORACLE_HALF_WIDTH', '16'))

    @staticmethod
    def get_config():
        """获取平面构造配置字典"""
        return {
            'D': PlanarConfig.D,
            'half_width': PlanarConfig.HALF_WIDTH,
            'samples': PlanarConfig.SAMPLES,
            'oracle_half_width': PlanarConfig.ORACLE_HALF_WIDTH
        }

# 双曲构造配置
class HyperbolicConfig:
    """双曲网与捷径构造配置"""
    RADIUS = float(os.getenv('HYPERBOLIC_RADIUS', '6'))
    EPSILON = float(os.getenv('HYPERBOLIC_EPSILON', '1'))
    DELTA = float(os.getenv('HYPERBOLIC_DELTA', '1'))
    # 候选网格密度（每 ε/2 弧长的候选点数）
    DENSITY = float(os.getenv('HYPERBOLIC_DENSITY', '2'))
    # Morse 常数的安全系数
    SAFETY_FACTOR = float(os.getenv('MORSE_SAFETY_FACTOR', '1.5'))
    # D₁ = D + REACH_FACTOR·ε + δ
    REACH_FACTOR = float(os.getenv('REACH_FACTOR', '100'))
    # 整数模式下 ε、δ 的下限
    INTEGER_MIN_SCALE = 10.0

    @staticmethod
    def get_config():
        """获取双曲构造配置字典"""
        return {
            'radius': HyperbolicConfig.RADIUS,
            'epsilon': HyperbolicConfig.EPSILON,
            'delta': HyperbolicConfig.DELTA,
            'density': HyperbolicConfig.DENSITY,
            'safety_factor': HyperbolicConfig.SAFETY_FACTOR,
            'reach_factor': HyperbolicConfig.REACH_FACTOR
        }

# 运行配置
class RunnerConfig:
    """命令执行相关配置"""
    # 验证查询的并行线程数
    WORKERS = int(os.getenv('WORKERS', '4'))
    LOG_LEVEL = os.getenv('LOG_LEVEL', 'INFO').upper()
    OUTPUT_DIR = os.getenv('OUTPUT_DIR', 'reports')
    # 超过此时间（秒）的步骤记录为警告
    SLOW_STEP_SECONDS = float(os.getenv('SLOW_STEP_SECONDS', '10'))

    @staticmethod
    def get_config():
        """获取运行配置字典"""
        return {
            'workers': RunnerConfig.WORKERS,
            'log_level': RunnerConfig.LOG_LEVEL,
            'output_dir': RunnerConfig.OUTPUT_DIR,
            'slow_step_seconds': RunnerConfig.SLOW_STEP_SECONDS
        }
