#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
多目标几何相位门模拟工具安装脚本
"""

from setuptools import setup, find_packages

setup(
    name="ug_gate_sim",
    version="0.1.0",
    description="多目标几何相位门模拟工具 - 电路 QED 中一对多受控相位门的参数规划与数值验证",
    author="Manus AI",
    author_email="info@example.com",
    packages=find_packages(exclude=["tests", "tests.*"]),
    include_package_data=True,
    install_requires=[
        "numpy>=1.21",
        "scipy>=1.7",
        "pandas>=1.5",
        "tqdm>=4.50.0",
    ],
    entry_points={
        "console_scripts": [
            "ug-gate=src.__main__:main",
        ],
    },
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: MIT License",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.8",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Topic :: Scientific/Engineering :: Physics",
    ],
    python_requires=">=3.8",
)
