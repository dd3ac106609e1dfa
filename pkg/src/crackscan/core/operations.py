from typing import Any, Awaitable, Callable, Optional, TypeAlias, TypeVar

from pydantic import BaseModel, ConfigDict

_T = TypeVar("_T")

AsyncCallable: TypeAlias = Callable[..., Awaitable[_T]]


class StageOperation(BaseModel):
    """Declarative description of one pipeline stage.

    ``func`` is either a plain function (run in a worker thread) or a
    coroutine function (awaited directly). ``inputs`` names the keyword
    arguments the stage expects; the handler forwards exactly those.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    name: str
    func: Callable[..., Any]
    description: str = ""
    inputs: tuple[str, ...] = ()
    optional: bool = False
    output_name: Optional[str] = None
