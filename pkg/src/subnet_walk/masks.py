"""Binary masks over a flat parameter vector, packed bit-per-parameter.

A mask of length ``d`` is a vertex of the d-dimensional hypercube; two masks
are neighbors when they differ in exactly one bit. Masks are stored packed
(8 bits per byte, parameter 0 at the most significant bit of byte 0) so that
Hamming distances reduce to XOR + popcount on words even for d ~ 10^5.

Serialized form: ``"d=<int>:<lowercase hex of the packed bytes>"``.
"""

from __future__ import annotations

from itertools import combinations
from math import comb

import numpy as np

from .rng import SeededRng


class Mask:
    """Immutable bit vector of length d with O(1) bit test and O(d/8) storage."""

    __slots__ = ("_packed", "_d", "_bits")

    def __init__(self, bits):
        arr = np.asarray(bits)
        if arr.ndim != 1 or arr.size < 1:
            raise ValueError("mask bits must be a non-empty 1-D sequence")
        if arr.dtype != np.bool_:
            if not np.isin(arr, (0, 1)).all():
                raise ValueError("mask bits must be 0 or 1")
            arr = arr.astype(bool)
        self._d = int(arr.size)
        self._packed = np.packbits(arr)
        self._packed.setflags(write=False)
        self._bits = None

    @classmethod
    def _from_packed(cls, packed: np.ndarray, d: int) -> "Mask":
        m = cls.__new__(cls)
        m._d = int(d)
        m._packed = packed
        m._packed.setflags(write=False)
        m._bits = None
        return m

    @classmethod
    def ones(cls, d: int) -> "Mask":
        return cls(np.ones(d, dtype=bool))

    @classmethod
    def zeros(cls, d: int) -> "Mask":
        return cls(np.zeros(d, dtype=bool))

    @classmethod
    def from_string(cls, text: str) -> "Mask":
        """Parse the ``d=<int>:<hex>`` serialization (strict: padding bits must be 0)."""
        head, sep, hexpart = text.partition(":")
        if not sep or not head.startswith("d="):
            raise ValueError(f"malformed mask string {text!r}")
        try:
            d = int(head[2:])
        except ValueError:
            raise ValueError(f"malformed mask length in {text!r}") from None
        if d < 1:
            raise ValueError(f"mask length must be >= 1, got {d}")
        n_bytes = (d + 7) // 8
        if len(hexpart) != 2 * n_bytes:
            raise ValueError(
                f"expected {2 * n_bytes} hex digits for d={d}, got {len(hexpart)}"
            )
        packed = np.frombuffer(bytes.fromhex(hexpart), dtype=np.uint8).copy()
        bits = np.unpackbits(packed)
        if bits[d:].any():
            raise ValueError(f"nonzero padding bits in {text!r}")
        return cls._from_packed(packed, d)

    @property
    def d(self) -> int:
        return self._d

    @property
    def bits(self) -> np.ndarray:
        """Unpacked read-only bool view, cached after first use."""
        if self._bits is None:
            bits = np.unpackbits(self._packed)[: self._d].astype(bool)
            bits.setflags(write=False)
            self._bits = bits
        return self._bits

    @property
    def packed(self) -> np.ndarray:
        return self._packed

    def test(self, i: int) -> bool:
        """O(1) test of bit i."""
        if not 0 <= i < self._d:
            raise IndexError(f"bit index {i} out of range for d={self._d}")
        return bool((self._packed[i >> 3] >> (7 - (i & 7))) & 1)

    def popcount(self) -> int:
        return int(np.bitwise_count(self._packed).sum())

    def flip(self, positions) -> "Mask":
        """Return a copy with the given bit positions inverted."""
        bits = self.bits.copy()
        positions = np.asarray(positions, dtype=np.intp)
        if positions.size and (positions.min() < 0 or positions.max() >= self._d):
            raise IndexError("flip position out of range")
        bits[positions] = ~bits[positions]
        return Mask(bits)

    def to_string(self) -> str:
        return f"d={self._d}:" + self._packed.tobytes().hex()

    def __len__(self) -> int:
        return self._d

    def __getitem__(self, i: int) -> bool:
        return self.test(i)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Mask):
            return NotImplemented
        return self._d == other._d and self._packed.tobytes() == other._packed.tobytes()

    def __hash__(self) -> int:
        return hash((self._d, self._packed.tobytes()))

    def __repr__(self) -> str:
        return f"Mask({self.to_string()!r})"


def sample_mask(d: int, p: float, rng: SeededRng) -> Mask:
    """Draw each of d bits independently: 1 with probability p, else 0."""
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"retain probability must be in [0, 1], got {p}")
    return Mask(rng.random(d) < p)


def hamming(m1: Mask, m2: Mask) -> int:
    """Number of differing bit positions (XOR + popcount on the packed words)."""
    if m1.d != m2.d:
        raise ValueError(f"mask lengths differ: {m1.d} vs {m2.d}")
    return int(np.bitwise_count(np.bitwise_xor(m1.packed, m2.packed)).sum())


def flip_neighbors(base: Mask, k: int, count: int, rng: SeededRng) -> list[Mask]:
    """Sample ``count`` distinct masks at Hamming distance exactly k from ``base``.

    Flip positions are drawn without replacement per mask. Raises when the
    request exceeds the C(d, k) available neighbors.
    """
    d = base.d
    if not 1 <= k <= d:
        raise ValueError(f"k must be in [1, {d}], got {k}")
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    total = comb(d, k)
    if count > total:
        raise ValueError(f"requested {count} neighbors but only C({d},{k})={total} exist")

    # Dense requests: enumerate and subsample; sparse ones: rejection-sample.
    if 2 * count >= total or total <= 4096:
        all_combos = list(combinations(range(d), k))
        idx = rng.choice(len(all_combos), size=count, replace=False)
        chosen = [all_combos[i] for i in np.sort(idx)]
    else:
        seen = set()
        chosen = []
        while len(chosen) < count:
            pos = tuple(sorted(rng.choice(d, size=k, replace=False).tolist()))
            if pos not in seen:
                seen.add(pos)
                chosen.append(pos)
    return [base.flip(list(pos)) for pos in chosen]
