from setuptools import find_packages, setup

setup(
    name="crsec",
    version="1.0.0",
    packages=find_packages(where="src"),
    package_dir={"": "src"},
    install_requires=[
        "typer[all]>=0.9.0",
        "rich>=13.0.0",
        "pyyaml>=6.0.0",
        "click>=8.0.0",
        "numpy>=1.24.0",
        "scipy>=1.10.0",
    ],
    entry_points={
        "console_scripts": [
            "crsec=crsec.cli.main:run",
        ],
    },
    python_requires=">=3.11",
)
