from pathlib import Path

from setuptools import setup

install_requires = [
    "numpy>=1.20",
    "scipy>=1.7",
    "pandas>=1.5",
    "anyio>=3.0",
    "outcome",
]

groundwork_requires = [
    "coloredlogs",
    "toml",
]

tests_require = [
    "pytest>=6.0",
]

setup(
    name="gridflex",
    use_scm_version={
        "version_scheme": "guess-next-dev",
        "local_scheme": "dirty-tag",
    },
    packages=[
        "gridflex",
        "gridflex.dataclasses",
        "gridflex.core",
        "gridflex.lp",
        "gridflex.dispatch",
        "gridflex.metrics",
        "gridflex.groundwork",
    ],
    license="LGPLv3",
    description="Multi-period DC-OPF dispatch with flexibly scheduled data-center loads",
    long_description=Path(__file__).with_name("README.rst").read_text(encoding="utf-8"),
    python_requires=">=3.8",
    setup_requires=[
        "setuptools_scm",
    ],
    classifiers=[
        "Programming Language :: Python :: 3.8",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3 :: Only",
        "Topic :: Scientific/Engineering :: Mathematics",
        "Development Status :: 4 - Beta",
    ],
    install_requires=install_requires + groundwork_requires,
    extras_require={
        "groundwork": groundwork_requires,
        "tests": tests_require,
    },
    entry_points={
        "console_scripts": ["study=gridflex.groundwork.runner:main"]
    },
)
