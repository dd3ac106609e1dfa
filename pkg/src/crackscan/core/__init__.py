from .base import ArrayRecord, Record, RecordList
from .handler import StageHandler, _StageExecutor
from .operations import AsyncCallable, StageOperation

__all__ = [
    "ArrayRecord",
    "Record",
    "RecordList",
    "StageOperation",
    "_StageExecutor",
    "StageHandler",
    "AsyncCallable",
]
