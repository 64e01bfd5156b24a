from setuptools import find_packages, setup

setup(
    name="spectral-povm",
    version="0.1.0",
    description="POVMs of frequency-filtered, time-resolved photon detection",
    package_dir={"": "src"},
    packages=find_packages("src"),
    python_requires=">=3.9",
    install_requires=["numpy>=1.24", "scipy>=1.10"],
    extras_require={"test": ["pytest>=7.4"]},
    entry_points={"console_scripts": ["povm=spectral_povm.cli:main"]},
)
