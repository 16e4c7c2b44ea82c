from setuptools import find_packages, setup

setup(
    name="kkspectra",
    packages=find_packages(exclude=["tests"]),
    python_requires=">=3.10",
    install_requires=[
        "numpy",
        "scipy",
        "networkx",
        "pydot<4",
        "jsonschema",
        "joblib",
        "matplotlib",
        "tomli; python_version<'3.11'",
    ],
    extras_require={"test": ["pytest"]},
    entry_points={"console_scripts": ["kk-spectra=kkspectra.cli:main"]},
)
