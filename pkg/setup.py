from setuptools import setup, find_packages
from os import path

here = path.abspath(path.dirname(__file__))

# Get the long description from the README file
with open(path.join(here, 'README.md'), encoding='utf-8') as f:
    long_description = f.read()

setup(
    name='squatcalc',
    version='0.1.0',
    description='Quaternionic S-spectrum functional calculus, fractional '
                'powers and fractional heat evolution',
    long_description=long_description,
    long_description_content_type='text/markdown',
    classifiers=[
        'Development Status :: 3 - Alpha',
        'License :: OSI Approved :: Apache Software License',
        'Programming Language :: Python :: 3.8',
        'Programming Language :: Python :: 3.9',
        'Topic :: Scientific/Engineering :: Mathematics',
    ],
    keywords='quaternion S-spectrum functional calculus fractional diffusion',
    packages=find_packages(exclude=['docs', 'tests']),
    python_requires='>=3.8',
    install_requires=[
        'numpy',
        'scipy',
        'opt_einsum',
        'tqdm',
        'cytoolz',
    ],
    extras_require={
        'test': [
            'pytest',
            'pytest-cov',
            'hypothesis',
            'dask',
            'distributed',
        ],
    },
    entry_points={
        'console_scripts': [
            'squatcalc=squatcalc.cli:main',
        ],
    },
    include_package_data=True,
)
