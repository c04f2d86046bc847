"""
Riemcontrol: coordinate-free geometric control on Riemannian manifolds with
numerical checks of convergence rates.
"""

try:
    from setuptools import setup
except ImportError:
    from distutils.core import setup
setup(
    name='riemcontrol',
    version='0.3.0',
    author='riemcontrol developers',
    packages=['riemcontrol'],
    package_data={'riemcontrol': ['configs/*.toml']},
    keywords=[
        'riemannian geometry',
        'geometric control',
        'observer',
        'contraction',
        'jacobi field',
        'parallel transport'],
    license='LICENSE',
    description='Tracking controllers, observers and filters on Riemannian\
                 manifolds, with finite-difference checks of the geometry\
                 and of predicted convergence rates',
    long_description=open('README.rst').read(),
    classifiers=[
        'License :: OSI Approved :: GNU General Public License v3 (GPLv3)',
        'Operating System :: OS Independent',
        'Development Status :: 4 - Beta',
        'Topic :: Scientific/Engineering :: Mathematics',
        'Topic :: Scientific/Engineering :: Physics',
        'Intended Audience :: Science/Research',
        'Programming Language :: Python :: 3'
    ],
    install_requires=[
        "numpy",
        "scipy >= 1.4",
        "tomli; python_version < '3.11'"
    ],
    entry_points={
        'console_scripts': ['riemcontrol = riemcontrol.cli:main']
    },
    test_suite="tests"
)
