from setuptools import setup, find_packages

setup(
    name="qnumrange",
    version="0.1",
    packages=find_packages(exclude=['tests', 'tests.*', 'examples', 'examples.*']),
    python_requires='>=3.8',
    install_requires=[
        'numpy>=1.22',
        'scipy>=1.9',
        'pandas>=1.5',
        'joblib>=1.1'
    ],
    extras_require={
        'test': [
            'pytest',
            'pytest-cov',
            'hypothesis>=6.0'
        ]
    },
    entry_points={
        'console_scripts': [
            'qnr=qnumrange.cli.main:main'
        ]
    }
)
