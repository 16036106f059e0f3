#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
Entry point for `python -m kpsolver`.
"""

import sys

from kpsolver.main import main

if __name__ == "__main__":
    sys.exit(main())
