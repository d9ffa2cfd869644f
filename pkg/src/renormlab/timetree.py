"""Binary-word time indices and their in-order total order.

A time index is a word over {1, 2}; the empty word is the root.  Words are
ordered the way an in-order traversal of the binary tree visits them: the
subtree below "1"w sits before w, the subtree below "2"w after it.
"""

from __future__ import annotations

from functools import lru_cache

from .errors import DepthError, DomainError

ROOT = ""


def validate_path(path: str) -> str:
    if any(c not in "12" for c in path):
        raise DomainError(f"time index must be a word over {{1, 2}}, got {path!r}")
    return path


def level(path: str) -> int:
    """Distance from the root; the root has level 0."""
    return len(path)


def compare(a: str, b: str) -> int:
    """-1, 0 or +1 as a precedes, equals or follows b in composition order.

    If one word extends the other, the first letter past the common prefix
    decides: letter 1 puts the longer word earlier, letter 2 later.
    Otherwise the first differing letter decides, 1 before 2.
    """
    if a == b:
        return 0
    if b.startswith(a):
        return 1 if b[len(a)] == "1" else -1
    if a.startswith(b):
        return -1 if a[len(b)] == "1" else 1
    i = next(i for i in range(min(len(a), len(b))) if a[i] != b[i])
    return -1 if a[i] < b[i] else 1


def a1(path: str) -> str:
    """Strip the leading 1; maps the lower subtree back onto the full tree."""
    if not path.startswith("1"):
        raise DomainError(f"{path!r} does not start with 1")
    return path[1:]


def a2(path: str) -> str:
    """Strip the leading 2."""
    if not path.startswith("2"):
        raise DomainError(f"{path!r} does not start with 2")
    return path[1:]


def a1_inverse(path: str, depth: int) -> str:
    """Prepend 1, staying inside the depth-n tree."""
    if len(path) + 1 > depth:
        raise DepthError(f"1{path} exceeds depth {depth}")
    return "1" + path


def a2_inverse(path: str, depth: int) -> str:
    """Prepend 2, staying inside the depth-n tree."""
    if len(path) + 1 > depth:
        raise DepthError(f"2{path} exceeds depth {depth}")
    return "2" + path


@lru_cache(maxsize=64)
def _descending(depth: int) -> tuple[str, ...]:
    def walk(prefix, remaining):
        if remaining == 0:
            return [prefix]
        return walk(prefix + "2", remaining - 1) + [prefix] + walk(prefix + "1", remaining - 1)

    return tuple(walk(ROOT, depth))


class DecompositionTimes:
    """The full binary tree of words up to a fixed depth."""

    __slots__ = ("depth",)

    def __init__(self, depth: int):
        if depth < 0:
            raise DomainError("depth must be nonnegative")
        self.depth = depth

    @property
    def size(self) -> int:
        return 2 ** (self.depth + 1) - 1

    def __contains__(self, path: str) -> bool:
        return all(c in "12" for c in path) and len(path) <= self.depth

    def indices_descending(self) -> tuple[str, ...]:
        """All indices, largest composition time first."""
        return _descending(self.depth)

    def level_indices(self, i: int) -> tuple[str, ...]:
        if not 0 <= i <= self.depth:
            raise DepthError(f"level {i} outside depth {self.depth}")
        return tuple(w for w in _descending(self.depth) if len(w) == i)

    def suffix_set(self, tau: str) -> tuple[str, ...]:
        """All indices at or above tau in composition order, descending."""
        validate_path(tau)
        if tau not in self:
            raise DepthError(f"{tau!r} outside depth {self.depth}")
        return tuple(w for w in _descending(self.depth) if compare(w, tau) >= 0)

    def __eq__(self, other):
        return isinstance(other, DecompositionTimes) and other.depth == self.depth

    def __hash__(self):
        return hash(("DecompositionTimes", self.depth))

    def __repr__(self):
        return f"DecompositionTimes(depth={self.depth})"


def enumerate_descending(times: DecompositionTimes) -> tuple[str, ...]:
    return times.indices_descending()
