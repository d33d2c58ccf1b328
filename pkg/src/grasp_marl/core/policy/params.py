"""
Parameter Layout

Flat float64 parameter vectors with a named-block layout. Blocks are views
into the flat vector, so flatten/unflatten are exact inverses.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

import numpy as np

from ...utils.exceptions import DimensionMismatchError

BACKBONE_PREFIX = "backbone/"


def head_prefix(agent: int) -> str:
    return f"head{agent}/"


@dataclass(frozen=True)
class ParamLayout:
    """Ordered ``(name, shape)`` blocks packed back to back."""

    blocks: Tuple[Tuple[str, Tuple[int, ...]], ...]
    _offsets: Dict[str, Tuple[int, int]] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        offsets = {}
        start = 0
        for name, shape in self.blocks:
            if name in offsets:
                raise ValueError(f"Duplicate parameter block: {name}")
            size = int(np.prod(shape)) if shape else 1
            offsets[name] = (start, start + size)
            start += size
        object.__setattr__(self, "_offsets", offsets)

    @classmethod
    def from_pairs(cls, pairs: Sequence[Tuple[str, Sequence[int]]]) -> 'ParamLayout':
        return cls(tuple((name, tuple(int(s) for s in shape)) for name, shape in pairs))

    @property
    def size(self) -> int:
        if not self.blocks:
            return 0
        return self._offsets[self.blocks[-1][0]][1]

    @property
    def names(self) -> List[str]:
        return [name for name, _ in self.blocks]

    def shape(self, name: str) -> Tuple[int, ...]:
        return dict(self.blocks)[name]

    def slice(self, name: str) -> slice:
        start, stop = self._offsets[name]
        return slice(start, stop)

    def prefix_slice(self, prefix: str) -> slice:
        """Contiguous range covering every block whose name starts with ``prefix``."""
        ranges = [self._offsets[n] for n, _ in self.blocks if n.startswith(prefix)]
        if not ranges:
            return slice(0, 0)
        start = min(r[0] for r in ranges)
        stop = max(r[1] for r in ranges)
        if stop - start != sum(r[1] - r[0] for r in ranges):
            raise ValueError(f"Blocks with prefix {prefix!r} are not contiguous")
        return slice(start, stop)

    def to_descriptor(self) -> List[Dict]:
        return [{"name": name, "shape": list(shape)} for name, shape in self.blocks]

    @classmethod
    def from_descriptor(cls, descriptor: Sequence[Dict]) -> 'ParamLayout':
        return cls.from_pairs([(b["name"], b["shape"]) for b in descriptor])


@dataclass(eq=False)
class PolicyParams:
    """
    Shared backbone plus per-agent head blocks in one flat vector.

    ``n_agents`` head groups are named ``head{i}/...``; the backbone (possibly
    empty) is named ``backbone/...``.
    """

    layout: ParamLayout
    flat: np.ndarray
    n_agents: int

    def __post_init__(self):
        self.flat = np.asarray(self.flat, dtype=np.float64)
        if self.flat.shape != (self.layout.size,):
            raise DimensionMismatchError([0], [self.flat.size], f"parameters vs layout size {self.layout.size}")
        sizes = {self.head_slice(i).stop - self.head_slice(i).start for i in range(self.n_agents)}
        if len(sizes) > 1:
            raise ValueError("Head blocks must be identically shaped across agents")

    @classmethod
    def zeros(cls, layout: ParamLayout, n_agents: int) -> 'PolicyParams':
        return cls(layout, np.zeros(layout.size), n_agents)

    @classmethod
    def from_blocks(cls, layout: ParamLayout, blocks: Dict[str, np.ndarray], n_agents: int) -> 'PolicyParams':
        """Unflattened form -> flat form."""
        flat = np.zeros(layout.size)
        for name, shape in layout.blocks:
            value = np.asarray(blocks[name], dtype=np.float64)
            if value.shape != shape:
                raise DimensionMismatchError([0], [value.size], f"block {name} of shape {shape}")
            flat[layout.slice(name)] = value.reshape(-1)
        return cls(layout, flat, n_agents)

    def to_blocks(self) -> Dict[str, np.ndarray]:
        """Flat form -> independent copies of every block."""
        return {name: self.block(name).copy() for name in self.layout.names}

    def block(self, name: str) -> np.ndarray:
        """Writable view of one block in its natural shape."""
        return self.flat[self.layout.slice(name)].reshape(self.layout.shape(name))

    def head_slice(self, agent: int) -> slice:
        return self.layout.prefix_slice(head_prefix(agent))

    def backbone_slice(self) -> slice:
        return self.layout.prefix_slice(BACKBONE_PREFIX)

    @property
    def head_dimension(self) -> int:
        s = self.head_slice(0)
        return s.stop - s.start

    @property
    def backbone_dimension(self) -> int:
        s = self.backbone_slice()
        return s.stop - s.start

    def head(self, agent: int) -> np.ndarray:
        return self.flat[self.head_slice(agent)]

    def backbone(self) -> np.ndarray:
        return self.flat[self.backbone_slice()]

    def copy(self) -> 'PolicyParams':
        return PolicyParams(self.layout, self.flat.copy(), self.n_agents)

    def with_flat(self, flat: np.ndarray) -> 'PolicyParams':
        return PolicyParams(self.layout, flat, self.n_agents)
