from setuptools import setup, find_packages

setup(
    name='Kurepa_py',
    version='0.1',
    packages=find_packages(exclude=['tests']),
    python_requires='>=3.8',
    install_requires=[
        'pandas',
        'numpy',
    ],
    extras_require={
        'tests': ['pytest', 'hypothesis'],
    },
    entry_points={
        'console_scripts': ['kurepa=Kurepa_py.main:main'],
    },
    description="Determinants, derangement residues and scans around Kurepa's left factorial hypothesis",
    long_description=open('README.md').read(),
    long_description_content_type='text/markdown',
    classifiers=[
        'License :: OSI Approved :: MIT License',
        'Intended Audience :: Science/Research',
        'Programming Language :: Python :: 3',
        'Topic :: Scientific/Engineering :: Mathematics',
        'Operating System :: OS Independent',
    ],
)
