from setuptools import setup, find_packages
from os import path

here = path.abspath(path.dirname(__file__))

# get the long description from the README file
with open(path.join(here, "README.md"), encoding="utf-8") as f:
    long_description = f.read()

numpy_constraints = (">=1.20",)
numpy_version = ",".join(numpy_constraints)

setup(
    # metadata
    name="dcunet",
    description="Dual-channel U-Net segmentation kit with a NumPy autodiff engine",
    long_description=long_description,
    long_description_content_type="text/markdown",
    keywords="image-segmentation u-net autodiff tanimoto cross-validation",
    classifiers=[
        "Development Status :: 4 - Beta",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: MIT License",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Programming Language :: Python :: 3.12",
        "Operating System :: Microsoft :: Windows :: Windows 10",
        "Operating System :: MacOS :: MacOS X",
        "Operating System :: Unix",
        "Topic :: Scientific/Engineering :: Artificial Intelligence",
        "Topic :: Scientific/Engineering :: Image Recognition",
    ],
    # module
    packages=find_packages(exclude=["docs", "tests"]),
    python_requires=">=3.9",
    use_scm_version={"write_to": "dcunet/_version.py", "fallback_version": "0.1.0"},
    # dependencies
    setup_requires=[
        "setuptools_scm",
        "setuptools_scm_git_archive",
    ],
    install_requires=[
        "cachetools>=3.1.0",
        "click>=8.0",
        "click-spinner",
        "marshmallow>=3.0.0",
        "numpy%s" % numpy_version,
        "pillow>=9.1",
        "toml",
        "tqdm",
    ],
    extras_require={
        ':python_version == "3.9"': ["numpy<2.0.0"],
        "test": [
            "pytest",
            "pytest-cov",
            "codecov",
            "colorlog",
        ],
        "docs": [
            "sphinx",
            "sphinx_autodoc_typehints",
            "sphinx-click",
        ],
        "recommended": ["colorlog"],
    },
    # CLI
    entry_points="""
        [console_scripts]
        dcunet=dcunet.scripts.cli:entrypoint
    """,
)
