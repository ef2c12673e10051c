"""
低差异序列与对偶轮廓分析包
"""