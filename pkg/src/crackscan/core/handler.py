import asyncio
import inspect
import logging
import time
from functools import partial
from typing import Any

from pydantic.fields import FieldInfo

from ..exceptions import CrackscanError, StageError
from .operations import StageOperation

log = logging.getLogger(__name__)


class _StageExecutor:
    """Mixin turning ``StageOperation`` attributes into awaitable callables.

    Accessing an attribute that holds a ``StageOperation`` returns a bound
    coroutine function that runs the stage through a ``StageHandler``.
    """

    def __getattribute__(self, name: str) -> Any:
        attr = super().__getattribute__(name)
        operation = None

        if isinstance(attr, FieldInfo):
            if isinstance(attr.default, StageOperation):
                operation = attr.default
        elif isinstance(attr, StageOperation):
            operation = attr

        if operation:
            return partial(self._execute_operation, operation=operation)

        return attr

    async def _execute_operation(self, operation: StageOperation, **kwargs: Any) -> Any:
        handler = StageHandler(executor=self, operation=operation, kwargs=kwargs)
        return await handler.execute()

    def record_timing(self, stage: str, seconds: float) -> None:
        timings = getattr(self, "timings", None)
        if timings is not None:
            timings[stage] = round(seconds, 6)


class StageHandler:
    def __init__(
        self, executor: _StageExecutor, operation: StageOperation, kwargs: dict
    ):
        self.executor = executor
        self.operation = operation
        self.kwargs = kwargs

    async def execute(self) -> Any:
        stage = self.operation.name
        call_kwargs = self._prepare_call_args()
        log.info("Stage %s started", stage)
        started = time.perf_counter()
        try:
            result = await self._invoke(call_kwargs)
        except CrackscanError as e:
            e.with_stage(stage)
            log.error(f"Stage {stage} failed: {e}")
            raise StageError(stage, message=e.message, original_error=e) from e
        except (ValueError, OSError) as e:
            log.error(f"Stage {stage} failed: {e}")
            raise StageError(stage, original_error=e) from e
        elapsed = time.perf_counter() - started
        self.executor.record_timing(stage, elapsed)
        log.info("Stage %s finished in %.3f s", stage, elapsed)
        return result

    def _prepare_call_args(self) -> dict[str, Any]:
        if not self.operation.inputs:
            return dict(self.kwargs)
        missing = [k for k in self.operation.inputs if k not in self.kwargs]
        if missing:
            raise StageError(
                self.operation.name, message=f"Missing stage inputs: {missing}"
            )
        return {k: self.kwargs[k] for k in self.operation.inputs}

    async def _invoke(self, call_kwargs: dict[str, Any]) -> Any:
        func = self.operation.func
        if inspect.iscoroutinefunction(func):
            return await func(**call_kwargs)
        return await asyncio.to_thread(func, **call_kwargs)
