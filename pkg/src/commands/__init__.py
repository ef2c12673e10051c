"""
命令包
"""