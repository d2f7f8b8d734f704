"""Binary digit schedules and fixed-length bit strings.

Digit positions are 1-based: a real ``0.x_1 x_2 x_3 ...`` has its first
fractional digit at position 1.  A :class:`DigitRule` splits the positions
into consecutive blocks ``[r_i, r_{i+1})`` and declares every block of one
parity free, the others forced to zero.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from typing import Iterable

from .errors import ConfigError

PARITIES = ("even", "odd", "all", "none")


@dataclass(frozen=True)
class DigitRule:
    """Free/zero block schedule for binary digits.

    ``boundaries`` is ``(r_0, r_1, ...)`` with ``r_0 = 1``; block ``i`` covers
    positions ``r_i <= p < r_{i+1}`` and the last block runs to the horizon.
    """

    boundaries: tuple[int, ...]
    free_parity: str
    horizon: int

    def __post_init__(self):
        b = tuple(int(v) for v in self.boundaries)
        object.__setattr__(self, "boundaries", b)
        if not b or b[0] != 1:
            raise ConfigError("digit rule boundaries must start at r_0 = 1")
        if any(b[i] >= b[i + 1] for i in range(len(b) - 1)):
            raise ConfigError("digit rule boundaries must be strictly increasing")
        if self.free_parity not in PARITIES:
            raise ConfigError(f"free_parity must be one of {PARITIES}")
        if self.horizon < 1:
            raise ConfigError("horizon must be positive")

    # presets -------------------------------------------------------------

    @classmethod
    def geometric(cls, ratio: int, horizon: int, free_parity: str = "odd") -> "DigitRule":
        """Boundaries ``r_i = ratio**i`` up to the first one past the horizon."""
        if ratio < 2:
            raise ConfigError("geometric ratio must be >= 2")
        b = [1]
        while b[-1] <= horizon:
            b.append(b[-1] * ratio)
        return cls(tuple(b), free_parity, horizon)

    @classmethod
    def squares(cls, horizon: int, free_parity: str = "odd") -> "DigitRule":
        """Boundaries 1, 2, 4, 16, 256, 65536, ... (``r_{i+1} = r_i**2`` from 2)."""
        b = [1, 2]
        while b[-1] <= horizon:
            b.append(b[-1] ** 2)
        return cls(tuple(b), free_parity, horizon)

    @classmethod
    def full(cls, horizon: int) -> "DigitRule":
        return cls((1,), "all", horizon)

    @classmethod
    def zero(cls, horizon: int) -> "DigitRule":
        return cls((1,), "none", horizon)

    def complement(self) -> "DigitRule":
        flip = {"even": "odd", "odd": "even", "all": "none", "none": "all"}
        return DigitRule(self.boundaries, flip[self.free_parity], self.horizon)

    # queries -------------------------------------------------------------

    def _block_free(self, index: int) -> bool:
        if self.free_parity == "all":
            return True
        if self.free_parity == "none":
            return False
        return (index % 2 == 0) == (self.free_parity == "even")

    def block_index(self, pos: int) -> int:
        if pos < 1:
            raise ConfigError("digit positions start at 1")
        return bisect_right(self.boundaries, pos) - 1

    def is_free(self, pos: int) -> bool:
        return self._block_free(self.block_index(pos))

    def free_count(self, j: int) -> int:
        """Number of free positions in ``[1, j]``."""
        if j <= 0:
            return 0
        b = self.boundaries
        total = 0
        for i, start in enumerate(b):
            if start > j:
                break
            stop = b[i + 1] if i + 1 < len(b) else j + 1
            if self._block_free(i):
                total += min(stop, j + 1) - start
        return total

    def free_positions(self, j: int) -> list[int]:
        return [p for p in range(1, j + 1) if self.is_free(p)]

    def mask(self, length: int) -> int:
        """Integer with the bits of the free positions of ``[1, length]`` set.

        Position ``p`` maps to bit ``length - p`` (most significant first),
        matching :class:`BitString`.
        """
        m = 0
        b = self.boundaries
        for i, start in enumerate(b):
            if start > length:
                break
            if not self._block_free(i):
                continue
            stop = min(b[i + 1] if i + 1 < len(b) else length + 1, length + 1)
            width = stop - start
            # positions start..stop-1 -> bits length-start .. length-stop+1
            m |= ((1 << width) - 1) << (length - stop + 1)
        return m

    def densities(self, j_min: int, j_max: int) -> tuple[float, float]:
        """Min and max of ``free_count(j) / j`` over ``j_min <= j <= j_max``."""
        ratios = [self.free_count(j) / j for j in range(max(1, j_min), j_max + 1)]
        return min(ratios), max(ratios)

    def to_record(self) -> str:
        return "blocks " + " ".join(map(str, self.boundaries)) + (
            f" parity={self.free_parity} horizon={self.horizon}"
        )

    @classmethod
    def from_record(cls, line: str) -> "DigitRule":
        parts = line.split()
        if not parts or parts[0] != "blocks":
            raise ConfigError(f"not a digit-rule record: {line!r}")
        nums, opts = [], {}
        for p in parts[1:]:
            if "=" in p:
                k, v = p.split("=", 1)
                opts[k] = v
            else:
                nums.append(int(p))
        if "parity" not in opts:
            raise ConfigError("digit-rule record needs parity=")
        horizon = int(opts.get("horizon", nums[-1] if nums else 1))
        return cls(tuple(nums), opts["parity"], horizon)


@dataclass(frozen=True)
class BitString:
    """A real in [0, 1) known to ``length`` binary digits.

    ``value`` holds the digits as an integer, most significant digit first, so
    the represented number is ``value / 2**length``.
    """

    length: int
    value: int = 0

    def __post_init__(self):
        if self.length < 0:
            raise ConfigError("negative bit length")
        if self.value < 0 or self.value >> self.length:
            raise ConfigError("value does not fit in the stated length")

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> "BitString":
        bits = list(bits)
        v = 0
        for b in bits:
            v = (v << 1) | (1 if b else 0)
        return cls(len(bits), v)

    @classmethod
    def from_str(cls, text: str) -> "BitString":
        """Parse ``"0.0101"`` or ``"0101"``."""
        s = text[2:] if text.startswith("0.") else text
        return cls.from_bits(int(c) for c in s)

    def bits(self) -> list[int]:
        return [(self.value >> (self.length - p)) & 1 for p in range(1, self.length + 1)]

    def digit(self, pos: int) -> int:
        if not 1 <= pos <= self.length:
            raise IndexError(pos)
        return (self.value >> (self.length - pos)) & 1

    def __len__(self) -> int:
        return self.length

    def masked(self, mask: int) -> "BitString":
        return BitString(self.length, self.value & mask)

    def slice(self, start: int, stop: int) -> "BitString":
        """Digits at positions ``start <= p < stop`` as a new string."""
        stop = min(stop, self.length + 1)
        width = max(0, stop - start)
        if width == 0:
            return BitString(0, 0)
        return BitString(width, (self.value >> (self.length - stop + 1)) & ((1 << width) - 1))

    def concat(self, other: "BitString") -> "BitString":
        return BitString(self.length + other.length, (self.value << other.length) | other.value)

    def to_hex(self) -> str:
        return f"bits {self.length} {self.value:x}"

    @classmethod
    def from_hex(cls, text: str) -> "BitString":
        parts = text.split()
        if len(parts) != 3 or parts[0] != "bits":
            raise ConfigError(f"not a bit-string record: {text!r}")
        return cls(int(parts[1]), int(parts[2], 16))

    def __str__(self) -> str:
        return "0." + "".join(map(str, self.bits()))


def pad_to(bits: BitString, length: int) -> BitString:
    if length < bits.length:
        raise ConfigError("cannot pad to a shorter length")
    return BitString(length, bits.value << (length - bits.length))

