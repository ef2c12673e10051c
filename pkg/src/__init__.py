"""
一致度量图构造与验证包
"""
