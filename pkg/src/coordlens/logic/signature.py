from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping


class SignatureError(ValueError):
    """A formula or structure uses a symbol its signature does not declare."""


@dataclass(frozen=True)
class Signature:
    """Relation and function symbols with arities, plus constant names.

    The binary function called ``*`` is written infix by the parser.
    """

    relations: Mapping[str, int] = field(default_factory=dict)
    functions: Mapping[str, int] = field(default_factory=dict)
    constants: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "relations", dict(self.relations))
        object.__setattr__(self, "functions", dict(self.functions))
        object.__setattr__(self, "constants", tuple(self.constants))
        names = list(self.relations) + list(self.functions) + list(self.constants)
        if len(names) != len(set(names)):
            raise SignatureError(f"duplicate symbol in signature: {names}")
        for name, arity in {**self.relations, **self.functions}.items():
            if arity < 1:
                raise SignatureError(f"symbol {name!r} needs positive arity")

    def __hash__(self):
        return hash((tuple(sorted(self.relations.items())),
                     tuple(sorted(self.functions.items())), self.constants))

    def __eq__(self, other):
        if not isinstance(other, Signature):
            return NotImplemented
        return (self.relations == other.relations and self.functions == other.functions
                and self.constants == other.constants)

    def to_json(self) -> dict:
        return {"relations": dict(self.relations), "functions": dict(self.functions),
                "constants": list(self.constants)}

    @classmethod
    def from_json(cls, data: Mapping) -> "Signature":
        return cls(data.get("relations", {}), data.get("functions", {}),
                   tuple(data.get("constants", ())))


PURE = Signature()
GROUP = Signature(functions={"*": 2, "inv": 1}, constants=("e",))
MAGMA = Signature(functions={"*": 2})
ORDER = Signature(relations={"le": 2})

NAMED = {"pure": PURE, "group": GROUP, "magma": MAGMA, "order": ORDER}
