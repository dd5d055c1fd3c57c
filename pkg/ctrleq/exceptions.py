#
# Copyright (c) 2023-present, the ctrleq authors.
# All rights reserved.
#
# This source code is licensed under the license found in the LICENSE file in
# the root directory of this source tree.
#

from typing import Iterable, Optional


class CtrleqError(Exception):
    pass


class ValidationError(CtrleqError, ValueError):
    exit_code = 1


class MatrixValidationError(ValidationError):
    pass


class PartitionValidationError(ValidationError):
    def __init__(
        self,
        msg: str,
        missing: Iterable[int] = (),
        duplicates: Iterable[int] = (),
    ) -> None:
        super().__init__(msg)
        self.missing = tuple(missing)
        self.duplicates = tuple(duplicates)


class BoundsValidationError(ValidationError):
    pass


class GridMismatchError(ValidationError):
    pass


class NotControlEquivalenceError(ValidationError):
    def __init__(self, msg: str, witness=None) -> None:
        super().__init__(msg)
        self.witness = witness


class ParseError(ValidationError):
    def __init__(self, msg: str, path=None, lineno: Optional[int] = None) -> None:
        self.path = path
        self.lineno = lineno
        where = str(path) if path is not None else "<input>"
        if lineno is not None:
            where = "{}:{}".format(where, lineno)
        super().__init__("{}: {}".format(where, msg))


class NetworkParseError(ParseError):
    pass


class PartitionParseError(ParseError):
    pass


class ManifestParseError(ParseError):
    pass


class VerificationError(CtrleqError):
    exit_code = 2


class DivergenceError(VerificationError):
    def __init__(self, msg: str, step: int) -> None:
        super().__init__("{} (first non-finite value at step {})".format(msg, step))
        self.step = step


class SuiteFailure(VerificationError):
    def __init__(self, msg: str, results=()) -> None:
        super().__init__(msg)
        self.results = list(results)


class CtrleqIOError(CtrleqError, OSError):
    exit_code = 3
