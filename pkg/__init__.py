"""
λ-IAM
无环境的交互抽象机、线性头归约与改进互模拟检查
"""

__version__ = "1.0.0"
