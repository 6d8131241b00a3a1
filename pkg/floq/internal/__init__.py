# SPDX-License-Identifier: GPL-3.0+

"""
floq internals

This package contains modules internal to floq: the command line interface
and the data file writers. They should not be used outside of floq.
"""
