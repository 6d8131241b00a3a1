#!/usr/bin/env python3
# SPDX-License-Identifier: GPL-3.0+

import contextlib
from distutils import log
from distutils.errors import DistutilsError
import os
import os.path
import re
import pkg_resources
from setuptools import setup, find_packages, Command
from setuptools.command.egg_info import egg_info as _egg_info
import subprocess


class egg_info(_egg_info):
    def run(self):
        if os.path.exists(".git"):
            with contextlib.suppress(FileNotFoundError):
                os.remove(os.path.join(self.egg_info, "SOURCES.txt"))
        super().run()


class test(Command):
    description = "run unit tests"

    user_options = [
        (
            "long",
            "L",
            "also run the long tests (full-resolution sweeps and lifetime studies)",
        ),
        ("pattern=", "p", "only run test files matching the given pattern"),
    ]

    def initialize_options(self):
        self.long = False
        self.pattern = None

    def finalize_options(self):
        if self.pattern is None:
            self.pattern = "test*.py"

    def run(self):
        import unittest

        self.run_command("egg_info")
        if self.long:
            os.environ["FLOQ_RUN_LONG_TESTS"] = "1"
            self.announce("running long tests too", log.INFO)

        argv = ["discover", "-p", self.pattern]
        if self.verbose:
            argv.append("-v")
        test = unittest.main(module=None, argv=argv, exit=False)
        if not test.result.wasSuccessful():
            raise DistutilsError("some tests failed")
        self.announce("all tests passed", log.INFO)


def get_version():
    if not os.path.exists(".git"):
        # If this is a source distribution, get the version from the egg
        # metadata.
        with contextlib.suppress(pkg_resources.DistributionNotFound):
            return pkg_resources.get_distribution("floq").version

    with open("floq/__init__.py", "r") as f:
        version = re.search(r'^__version__ = "([^"]*)"', f.read(), re.M).group(1)
    if not os.path.exists(".git"):
        return version

    # Read the Docs modifies the working tree (namely, docs/conf.py). We don't
    # want the documentation to display a dirty version, so ignore
    # modifications for RTD builds.
    dirty = os.getenv("READTHEDOCS") != "True" and bool(
        subprocess.check_output(
            ["git", "status", "-uno", "--porcelain"],
            # Use the environment variable instead of --no-optional-locks to
            # support Git < 2.14.
            env={**os.environ, "GIT_OPTIONAL_LOCKS": "0"},
        )
    )

    try:
        count = int(
            subprocess.check_output(
                ["git", "rev-list", "--count", f"v{version}.."],
                stderr=subprocess.DEVNULL,
                universal_newlines=True,
            )
        )
    except subprocess.CalledProcessError:
        log.warn("warning: v%s tag not found", version)
        count = 0

    if count == 0:
        if dirty:
            version += "+dirty"
        return version

    commit = subprocess.check_output(
        ["git", "rev-parse", "--short", "HEAD"], universal_newlines=True
    ).strip()
    version += f"+{count}.g{commit}"
    if dirty:
        version += ".dirty"
    return version


with open("README.rst", "r") as f:
    long_description = f.read()


setup(
    name="floq",
    version=get_version(),
    packages=find_packages(include=["floq", "floq.*"]),
    package_data={"floq": ["py.typed"]},
    install_requires=["numpy>=1.17", "scipy>=1.6"],
    cmdclass={
        "egg_info": egg_info,
        "test": test,
    },
    entry_points={"console_scripts": ["floq=floq.internal.cli:main"]},
    python_requires=">=3.7",
    description="Driven, lossy tight-binding chain simulator",
    long_description=long_description,
    long_description_content_type="text/x-rst",
    license="GPL-3.0+",
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Environment :: Console",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: GNU General Public License v3 or later (GPLv3+)",
        "Operating System :: OS Independent",
        "Programming Language :: Python :: 3",
        "Topic :: Scientific/Engineering :: Physics",
    ],
)
