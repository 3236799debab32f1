"""Stateless IPv6 header compression for simulated 802.15.4 frames.

The codec shrinks the 40-byte IPv6 header down to a handful of octets by
eliding everything the receiver can rebuild from link-layer context:
the version (all motes speak IPv6), the payload length (known from the
frame), and addresses whose interface identifier is derivable from a MAC
address plus the shared link-local prefix.

Wire layout, bit-exact:

    octet 0 (dispatch):
        bits 7-6  address mode: 00 uncompressed, 01 source elided,
                  10 destination elided, 11 both elided
        bit  5    traffic class and flow label elided (both were zero)
        bit  4    next header elided (it was UDP, 17)
        bits 3-0  reserved, must be zero
    then, in fixed order, each field only when not elided:
        traffic class (1 octet), flow label (3 octets, top 4 bits zero),
        next header (1 octet), hop limit (1 octet, always present),
        source address (16 octets), destination address (16 octets)

Uncompressed mode instead carries the verbatim 40-byte header after the
dispatch octet, so no input ever grows by more than one octet.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

IPV6_HEADER_BYTES = 40
NEXT_HEADER_UDP = 17
NEXT_HEADER_ICMPV6 = 58

# EUI-64 universal/local bit, flipped when turning a MAC into an IID.
_UL_BIT = 0x02 << 56

LINK_LOCAL_PREFIX = 0xFE80 << 112


class CodecError(ValueError):
    """Malformed header, truncated encoding, or inconsistent context."""


class Mode(enum.Enum):
    UNCOMPRESSED = 0
    PARTLY_SRC = 1      # source elided, destination inline
    PARTLY_DST = 2      # destination elided, source inline
    FULLY_COMPRESSED = 3


def _check_width(name: str, value: int, bits: int) -> int:
    if not 0 <= value < (1 << bits):
        raise CodecError(f"{name} out of range for {bits}-bit field: {value}")
    return value


@dataclass(frozen=True)
class Ipv6Header:
    """Decoded IPv6 header; addresses are 128-bit integers."""

    traffic_class: int
    flow_label: int
    payload_length: int
    next_header: int
    hop_limit: int
    src: int
    dst: int
    version: int = 6

    def __post_init__(self) -> None:
        _check_width("version", self.version, 4)
        _check_width("traffic_class", self.traffic_class, 8)
        _check_width("flow_label", self.flow_label, 20)
        _check_width("payload_length", self.payload_length, 16)
        _check_width("next_header", self.next_header, 8)
        _check_width("hop_limit", self.hop_limit, 8)
        _check_width("src", self.src, 128)
        _check_width("dst", self.dst, 128)

    def to_bytes(self) -> bytes:
        """Uncompressed 40-byte wire form."""
        word0 = (self.version << 28) | (self.traffic_class << 20) | self.flow_label
        return (
            word0.to_bytes(4, "big")
            + self.payload_length.to_bytes(2, "big")
            + bytes((self.next_header, self.hop_limit))
            + self.src.to_bytes(16, "big")
            + self.dst.to_bytes(16, "big")
        )

    @classmethod
    def from_bytes(cls, data: bytes) -> "Ipv6Header":
        if len(data) != IPV6_HEADER_BYTES:
            raise CodecError(f"IPv6 header must be 40 bytes, got {len(data)}")
        word0 = int.from_bytes(data[0:4], "big")
        return cls(
            version=word0 >> 28,
            traffic_class=(word0 >> 20) & 0xFF,
            flow_label=word0 & 0xFFFFF,
            payload_length=int.from_bytes(data[4:6], "big"),
            next_header=data[6],
            hop_limit=data[7],
            src=int.from_bytes(data[8:24], "big"),
            dst=int.from_bytes(data[24:40], "big"),
        )


@dataclass(frozen=True)
class MacContext:
    """Link-layer facts the decompressor can rely on.

    frame_payload_length is the octet count available to the compressed
    packet (compressed header plus IPv6 payload); shared_prefix holds the
    top 64 bits of the common link-local prefix, low 64 bits zero.
    """

    src_mac: int
    dst_mac: int
    frame_payload_length: int
    shared_prefix: int = LINK_LOCAL_PREFIX

    def __post_init__(self) -> None:
        _check_width("src_mac", self.src_mac, 64)
        _check_width("dst_mac", self.dst_mac, 64)
        if self.shared_prefix & ((1 << 64) - 1):
            raise CodecError("shared_prefix must have zero interface-identifier bits")
        _check_width("shared_prefix", self.shared_prefix, 128)


@dataclass(frozen=True)
class CompressedHeader:
    """Encoded header: dispatch octet plus inline fields."""

    mode: Mode
    data: bytes                      # full encoding, dispatch octet included
    elided: frozenset = field(default_factory=frozenset)

    @property
    def size(self) -> int:
        return len(self.data)


def iid_from_mac(mac: int) -> int:
    """EUI-64 interface identifier: the MAC with the U/L bit flipped."""
    return mac ^ _UL_BIT


def address_from_mac(mac: int, shared_prefix: int = LINK_LOCAL_PREFIX) -> int:
    return shared_prefix | iid_from_mac(mac)


def is_mac_derivable(addr: int, mac: int, shared_prefix: int) -> bool:
    return addr == address_from_mac(mac, shared_prefix)


def select_mode(src: int, dst: int, ctx: MacContext, intra_network: bool) -> Mode:
    """Pick the address-compression mode for a packet.

    Both addresses derivable on an intra-network frame collapse to the
    fully compressed form used between motes of one network; a single
    derivable side gives the matching partly-compressed form (used at the
    gateway boundary); nothing derivable falls back to the verbatim header.
    """
    src_ok = is_mac_derivable(src, ctx.src_mac, ctx.shared_prefix)
    dst_ok = is_mac_derivable(dst, ctx.dst_mac, ctx.shared_prefix)
    if src_ok and dst_ok and intra_network:
        return Mode.FULLY_COMPRESSED
    if src_ok:
        return Mode.PARTLY_SRC
    if dst_ok:
        return Mode.PARTLY_DST
    return Mode.UNCOMPRESSED


def compress(header: Ipv6Header, ctx: MacContext) -> CompressedHeader:
    """Compress a valid IPv6 header against link-layer context."""
    if header.version != 6:
        raise CodecError(f"malformed header: version {header.version} != 6")

    prefix = ctx.shared_prefix
    intra = (header.src >> 64) == (prefix >> 64) and (header.dst >> 64) == (prefix >> 64)
    mode = select_mode(header.src, header.dst, ctx, intra)

    if mode is Mode.UNCOMPRESSED:
        data = bytes((Mode.UNCOMPRESSED.value << 6,)) + header.to_bytes()
        return CompressedHeader(mode=mode, data=data, elided=frozenset())

    tcfl_elided = header.traffic_class == 0 and header.flow_label == 0
    nh_elided = header.next_header == NEXT_HEADER_UDP

    dispatch = (mode.value << 6) | (int(tcfl_elided) << 5) | (int(nh_elided) << 4)
    out = bytearray((dispatch,))
    elided = {"version", "payload_length"}
    if tcfl_elided:
        elided.update(("traffic_class", "flow_label"))
    else:
        out.append(header.traffic_class)
        out += header.flow_label.to_bytes(3, "big")
    if nh_elided:
        elided.add("next_header")
    else:
        out.append(header.next_header)
    out.append(header.hop_limit)
    if mode in (Mode.PARTLY_SRC, Mode.FULLY_COMPRESSED):
        elided.add("src_iid")
    else:
        out += header.src.to_bytes(16, "big")
    if mode in (Mode.PARTLY_DST, Mode.FULLY_COMPRESSED):
        elided.add("dst_iid")
    else:
        out += header.dst.to_bytes(16, "big")
    return CompressedHeader(mode=mode, data=bytes(out), elided=frozenset(elided))


def parse_compressed(data: bytes) -> CompressedHeader:
    """Validate the structure of an encoding without a context.

    Rejects anything that is not exactly one well-formed header: truncated
    buffers, trailing bytes, and nonzero reserved bits.
    """
    if len(data) < 1:
        raise CodecError("truncated encoding: empty buffer")
    dispatch = data[0]
    if dispatch & 0x0F:
        raise CodecError(f"reserved dispatch bits set: 0x{dispatch:02x}")
    mode = Mode((dispatch >> 6) & 0x3)
    if mode is Mode.UNCOMPRESSED:
        if dispatch & 0x30:
            raise CodecError("elision flags invalid in uncompressed mode")
        if len(data) != 1 + IPV6_HEADER_BYTES:
            raise CodecError(
                f"uncompressed mode needs 41 bytes, got {len(data)}"
            )
        return CompressedHeader(mode=mode, data=data)
    tcfl_elided = bool(dispatch & 0x20)
    nh_elided = bool(dispatch & 0x10)
    expect = 1
    expect += 0 if tcfl_elided else 4
    expect += 0 if nh_elided else 1
    expect += 1  # hop limit
    expect += 0 if mode in (Mode.PARTLY_SRC, Mode.FULLY_COMPRESSED) else 16
    expect += 0 if mode in (Mode.PARTLY_DST, Mode.FULLY_COMPRESSED) else 16
    if len(data) != expect:
        raise CodecError(
            f"mode/inline length mismatch: {mode.name} expects {expect} bytes, got {len(data)}"
        )
    return CompressedHeader(mode=mode, data=data)


def decompress(c: CompressedHeader, ctx: MacContext) -> Ipv6Header:
    """Rebuild the exact original header from an encoding plus context."""
    c = parse_compressed(c.data)  # re-validate; inputs may be hand-built
    data = c.data
    if c.mode is Mode.UNCOMPRESSED:
        header = Ipv6Header.from_bytes(data[1:])
        if header.version != 6:
            raise CodecError(f"malformed header: version {header.version} != 6")
        return header

    dispatch = data[0]
    tcfl_elided = bool(dispatch & 0x20)
    nh_elided = bool(dispatch & 0x10)
    pos = 1
    if tcfl_elided:
        traffic_class, flow_label = 0, 0
    else:
        traffic_class = data[pos]
        flow_label = int.from_bytes(data[pos + 1 : pos + 4], "big")
        if flow_label >> 20:
            raise CodecError("flow label padding bits set")
        pos += 4
    if nh_elided:
        next_header = NEXT_HEADER_UDP
    else:
        next_header = data[pos]
        pos += 1
    hop_limit = data[pos]
    pos += 1
    if c.mode in (Mode.PARTLY_SRC, Mode.FULLY_COMPRESSED):
        src = address_from_mac(ctx.src_mac, ctx.shared_prefix)
    else:
        src = int.from_bytes(data[pos : pos + 16], "big")
        pos += 16
    if c.mode in (Mode.PARTLY_DST, Mode.FULLY_COMPRESSED):
        dst = address_from_mac(ctx.dst_mac, ctx.shared_prefix)
    else:
        dst = int.from_bytes(data[pos : pos + 16], "big")
        pos += 16

    payload_length = ctx.frame_payload_length - len(data)
    if payload_length < 0:
        raise CodecError(
            f"context frame length {ctx.frame_payload_length} shorter than header {len(data)}"
        )
    return Ipv6Header(
        traffic_class=traffic_class,
        flow_label=flow_label,
        payload_length=payload_length,
        next_header=next_header,
        hop_limit=hop_limit,
        src=src,
        dst=dst,
    )
