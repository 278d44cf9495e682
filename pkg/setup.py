import setuptools

with open("README.md", "r") as fh:
    long_description = fh.read()

setuptools.setup(
    name="cesaro",
    version="0.1.0",
    description="Explicit rates for Cesaro means of nonexpansive maps in uniformly convex spaces",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=setuptools.find_packages(exclude=("test", "test.*")),
    python_requires=">=3.9",
    classifiers=[
        "Programming Language :: Python :: 3",
        "License :: OSI Approved :: GNU Library or Lesser General Public License (LGPL)",
        "Operating System :: OS Independent",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
    install_requires=[
        'numpy',
        'scipy',
        'mpmath',
    ],
    extras_require={
        'blake2': ['pyblake2'],
    },
    entry_points={
        'console_scripts': [
            'cesaro=cesaro.cli.__main__:console',
        ],
    },
)
