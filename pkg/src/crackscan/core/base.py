import json
from typing import Any, Generic, List, Literal, TypeVar

import yaml
from pydantic import BaseModel, ConfigDict, RootModel

ModelT = TypeVar("ModelT", bound=BaseModel)


class Record(BaseModel):
    """Base class for every exported crackscan value.

    Records carry plain scalars, tuples and nested records, so they
    serialize cleanly into reports and the run manifest.
    """

    model_config = ConfigDict(populate_by_name=True, extra="forbid")

    def to_dict(self, *, exclude_none: bool = False) -> dict[str, Any]:
        """Export the record as a Python dictionary.

        Args:
            exclude_none: Exclude fields with None values if True.

        Returns:
            Dictionary representation of the record.
        """
        return self.model_dump(exclude_none=exclude_none)

    def to_json(self, *, exclude_none: bool = False, indent: int | None = None) -> str:
        """Export the record as a JSON string.

        Args:
            exclude_none: Exclude fields with None values if True.
            indent: Number of spaces for indentation. None for compact output.

        Returns:
            JSON string representation of the record.
        """
        return self.model_dump_json(exclude_none=exclude_none, indent=indent)

    def to_yaml(self, *, exclude_none: bool = False) -> str:
        """Export the record as a YAML string.

        Args:
            exclude_none: Exclude fields with None values if True.

        Returns:
            YAML string representation of the record.
        """
        data = self.model_dump(exclude_none=exclude_none, mode="json")
        return yaml.safe_dump(
            data, default_flow_style=False, allow_unicode=True, sort_keys=False
        )


class ArrayRecord(BaseModel):
    """Base class for value types that hold numpy arrays."""

    model_config = ConfigDict(arbitrary_types_allowed=True, extra="forbid")


class RecordList(RootModel[List[ModelT]], Generic[ModelT]):
    root: List[ModelT]

    def __iter__(self):
        return iter(self.root)

    def __getitem__(self, item):
        return self.root[item]

    def __len__(self):
        return len(self.root)

    def to_list(
        self,
        *,
        exclude_none: bool = False,
        mode: Literal["python", "json"] = "python",
    ) -> list[dict[str, Any]]:
        """Export all items as a list of dictionaries.

        Args:
            exclude_none: Exclude fields with None values if True.
            mode: Serialization mode. "python" returns native Python objects,
                  "json" returns JSON-compatible types (tuples become lists).

        Returns:
            List of dictionary representations.
        """
        return [
            item.model_dump(exclude_none=exclude_none, mode=mode) for item in self.root
        ]

    def to_json(self, *, exclude_none: bool = False, indent: int | None = None) -> str:
        return json.dumps(
            self.to_list(exclude_none=exclude_none, mode="json"), indent=indent
        )

    def to_yaml(self, *, exclude_none: bool = False) -> str:
        return yaml.safe_dump(
            self.to_list(exclude_none=exclude_none, mode="json"),
            default_flow_style=False,
            allow_unicode=True,
            sort_keys=False,
        )
