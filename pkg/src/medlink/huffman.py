"""Canonical Huffman coding over integer symbol alphabets.

Code lengths come from the usual two-least-frequent merge; codewords are
then reassigned canonically, in (length, symbol) order, so a code is fully
described by its symbol-to-length table. That is what the bitstream
container stores. A single-symbol alphabet gets a 1-bit code by
convention, so every encoded stream has positive length.
"""

from __future__ import annotations

import heapq

import numpy as np

__all__ = [
    "HuffmanCode",
    "HuffmanError",
    "HuffmanDecodeError",
    "huffman_build",
    "huffman_encode",
    "huffman_decode",
]


class HuffmanError(ValueError):
    pass


class HuffmanDecodeError(HuffmanError):
    """Corrupt entropy-coded data. ``bit_offset`` points at the bad codeword."""

    def __init__(self, message: str, bit_offset: int):
        super().__init__(f"{message} (bit offset {bit_offset})")
        self.bit_offset = bit_offset


class HuffmanCode:
    """A canonical prefix code, constructed from a symbol -> length table."""

    def __init__(self, lengths: dict[int, int]):
        if not lengths:
            raise HuffmanError("empty code table")
        for sym, length in lengths.items():
            if length < 1:
                raise HuffmanError(f"code length {length} for symbol {sym}")
        kraft = sum(2.0 ** -length for length in lengths.values())
        if kraft > 1.0 + 1e-9:
            raise HuffmanError("code lengths violate the Kraft inequality")
        self.lengths = dict(sorted(lengths.items()))
        self.max_length = max(lengths.values())
        self.codes: dict[int, int] = {}
        code = 0
        prev = 0
        for sym, length in sorted(lengths.items(), key=lambda kv: (kv[1], kv[0])):
            code <<= length - prev
            if code >> length:
                raise HuffmanError("code lengths do not form a prefix code")
            self.codes[sym] = code
            code += 1
            prev = length
        self._bitstrings = {
            sym: format(c, f"0{self.lengths[sym]}b") for sym, c in self.codes.items()
        }
        self._decode_table = {
            (self.lengths[sym], c): sym for sym, c in self.codes.items()
        }

    def __len__(self) -> int:
        return len(self.lengths)

    def __eq__(self, other) -> bool:
        return isinstance(other, HuffmanCode) and self.lengths == other.lengths

    def mean_length(self, frequencies: dict[int, int]) -> float:
        """Frequency-weighted mean codeword length in bits."""
        total = sum(frequencies.values())
        if total == 0:
            raise HuffmanError("no symbols")
        weighted = sum(self.lengths[s] * f for s, f in frequencies.items() if f > 0)
        return weighted / total


def huffman_build(frequencies: dict[int, int]) -> HuffmanCode:
    """Build a canonical code from symbol frequencies.

    Zero-frequency entries are dropped; an empty (or all-zero) table is an
    error. Tie-breaking is deterministic: the heap is seeded in symbol
    order and merges are sequence-numbered.
    """
    items = sorted((s, f) for s, f in frequencies.items() if f > 0)
    if not items:
        raise HuffmanError("empty alphabet")
    if len(items) == 1:
        return HuffmanCode({items[0][0]: 1})
    heap = []
    for order, (sym, freq) in enumerate(items):
        heap.append((freq, order, sym, None, None))
    heapq.heapify(heap)
    order = len(heap)
    while len(heap) > 1:
        f1, _, s1, l1, r1 = heapq.heappop(heap)
        f2, _, s2, l2, r2 = heapq.heappop(heap)
        heapq.heappush(heap, (f1 + f2, order, None, (s1, l1, r1), (s2, l2, r2)))
        order += 1
    lengths: dict[int, int] = {}
    stack = [(heap[0][2:5], 0)]
    while stack:
        (sym, left, right), depth = stack.pop()
        if sym is not None:
            lengths[sym] = depth
        else:
            stack.append((left, depth + 1))
            stack.append((right, depth + 1))
    return HuffmanCode(lengths)


def huffman_encode(symbols, code: HuffmanCode) -> tuple[bytes, int]:
    """Encode symbols with a code; returns (payload bytes, exact bit length).

    The final byte is zero-padded. Symbols outside the code table raise
    HuffmanError.
    """
    if isinstance(symbols, np.ndarray):
        symbols = symbols.tolist()
    table = code._bitstrings
    try:
        bits = "".join([table[s] for s in symbols])
    except KeyError as exc:
        raise HuffmanError(f"symbol {exc.args[0]} not in code table") from None
    if not bits:
        return b"", 0
    arr = np.frombuffer(bits.encode("ascii"), dtype=np.uint8) - ord("0")
    return np.packbits(arr).tobytes(), len(bits)


def huffman_decode(data: bytes, bit_length: int, code: HuffmanCode) -> list[int]:
    """Decode ``bit_length`` bits of payload back into symbols.

    Raises HuffmanDecodeError (with the bit offset of the offending
    codeword) when the bits do not parse, including a truncated trailing
    codeword.
    """
    if bit_length < 0 or bit_length > len(data) * 8:
        raise HuffmanDecodeError("bit length exceeds payload", len(data) * 8)
    if bit_length == 0:
        return []
    bits = np.unpackbits(np.frombuffer(data, dtype=np.uint8), count=bit_length)
    table = code._decode_table
    max_length = code.max_length
    out: list[int] = []
    acc = 0
    length = 0
    start = 0
    for pos, b in enumerate(bits.tolist()):
        acc = (acc << 1) | b
        length += 1
        sym = table.get((length, acc))
        if sym is not None:
            out.append(sym)
            acc = 0
            length = 0
            start = pos + 1
        elif length > max_length:
            raise HuffmanDecodeError("no codeword matches", start)
    if length:
        raise HuffmanDecodeError("truncated codeword", start)
    return out
