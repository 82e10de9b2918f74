"""
Just a regular `setup.py` file.
"""


import os
from setuptools import setup, find_packages


current_dir = os.path.abspath(os.path.dirname(__file__))

description = 'Point cloud registration and visual servoing in spectral domain.'
with open(os.path.join(current_dir, 'README.md'), encoding='utf-8') as f:
    long_description = f.read()

setup(
    name='spectral-servoing',
    version='0.1.0',
    description=description,
    long_description=long_description,
    long_description_content_type='text/markdown',
    license='MIT',
    keywords=[
        'visual_servoing',
        'point_cloud_registration',
        'spherical_harmonics',
        'phase_correlation'
    ],
    packages=find_packages(exclude=['tests', 'tests.*']),
    package_data={
        'spectralservo': [
            'configs/default_config.yml'
        ]
    },
    entry_points={
        'console_scripts': [
            'spectralservo = spectralservo.__main__:main'
        ]
    },
    python_requires='>=3.9',
    install_requires=[
        'numpy',
        'PyYAML',
        'scipy',
    ],
    classifiers=[
        'Development Status :: 3 - Alpha',
        'Intended Audience :: Science/Research',
        'Topic :: Scientific/Engineering :: Image Recognition',
        'License :: OSI Approved :: MIT License',
        'Programming Language :: Python :: 3'
    ]
)
