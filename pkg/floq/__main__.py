# SPDX-License-Identifier: GPL-3.0+

"""
floq entry point

This module runs the floq CLI. There is nothing interesting here.

$ python3 -m floq --help
"""


if __name__ == "__main__":
    import sys

    from floq.internal.cli import main

    sys.exit(main())
