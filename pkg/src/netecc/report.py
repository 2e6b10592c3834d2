"""Line-delimited ``key=value`` records for machine-readable output.

Each line is ``<field>=<json value>``; fields appear in dataclass
declaration order, so two runs with equal inputs produce identical text.
"""

import dataclasses
import json


def dump_kv(pairs) -> str:
    return "".join(f"{k}={json.dumps(v, sort_keys=True)}\n" for k, v in pairs)


def load_kv(text: str) -> dict:
    out = {}
    for line in text.splitlines():
        if not line.strip():
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"not a key=value line: {line!r}")
        out[key] = json.loads(value)
    return out


class KVRecord:
    """Mixin giving a dataclass ``to_kv``/``from_kv``."""

    def to_kv(self) -> str:
        return dump_kv((f.name, getattr(self, f.name)) for f in dataclasses.fields(self))

    @classmethod
    def from_kv(cls, text: str):
        data = load_kv(text)
        names = {f.name for f in dataclasses.fields(cls)}
        return cls(**{k: v for k, v in data.items() if k in names})
