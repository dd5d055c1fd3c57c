#
# Copyright (c) 2023-present, the ctrleq authors.
# All rights reserved.
#
# This source code is licensed under the license found in the LICENSE file in
# the root directory of this source tree.
#

import sys

from ctrleq.cli import main

sys.exit(main())
