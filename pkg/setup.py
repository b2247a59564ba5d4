#!/usr/bin/env python3
"""
Setup script for installing golflab as a command-line tool.
"""

from setuptools import setup

from settings import TOOL_VERSION

MODULES = [
    'main',
    'settings',
    'golf_errors',
    'seed_manager',
    'golf_model',
    'exact_laws',
    'oracle',
    'forests',
    'line_model',
    'gof_tests',
    'experiments',
    'verification',
    'run_store',
    'export_manager',
]

setup(
    name='golflab',
    version=TOOL_VERSION,
    description='Golf and parking processes on the cycle and on Z: simulation, exact laws and checks',
    py_modules=MODULES,
    python_requires='>=3.9',
    install_requires=[
        'numpy>=1.24.0',
        'scipy>=1.10.0',
        'packaging>=21.0',
    ],
    extras_require={
        'test': ['pytest>=7.0.0', 'hypothesis>=6.0.0'],
    },
    entry_points={
        'console_scripts': ['golflab=main:main'],
    },
)
