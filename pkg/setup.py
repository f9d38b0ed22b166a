from setuptools import setup, find_packages

install_requires = [
  'numpy',
  'torch',
  'mpi4py',
  'pyyaml',
  'pandas',
  'matplotlib',
  'hexalattice'
]

setup(
  install_requires=install_requires,
  extras_require={'test': ['hypothesis']},
  packages=find_packages(where="src"),
  package_dir={"": "src"},
)
