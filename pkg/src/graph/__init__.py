"""
度量图构造与最短路包
"""