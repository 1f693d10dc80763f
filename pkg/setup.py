#!/usr/bin/env python

from setuptools import setup

setup(
    name='fredkin',
    version='0.1',
    description='Exact ground states, entanglement and spectra of the Fredkin spin chain',
    packages=[
        'fredkin',
        'fredkin.tests',
    ],
    package_data={
        'fredkin': ['configs/*.json'],
    },
    install_requires=[
        'click',
        'numpy',
        'pandas>=1.5',
        'python-dotenv',
        'scipy',
    ],
    entry_points={
        'console_scripts': [
            'fredkin=fredkin.app:main',
        ],
    },
    zip_safe=False,
)
