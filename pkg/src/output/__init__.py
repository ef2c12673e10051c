"""
报告输出包
"""