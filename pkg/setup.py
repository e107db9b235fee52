from setuptools import setup, find_packages

setup(
    name="lcrl",
    version="0.1.0",
    packages=find_packages(exclude=("test",)),
    py_modules=["main"],
    install_requires=[
        "python-dotenv",
        "graphviz",
        "numpy",
        "scipy",
        "networkx",
        "lark",
    ],
    entry_points={"console_scripts": ["lcrl=main:main"]},
)
