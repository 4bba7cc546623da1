"""
检查套件目录

每个 *_suite.py 文件定义一个 SuiteBase 子类，由 SuiteLoader 自动发现。
以下划线开头的文件不会被加载。
"""
