"""Control-message wire codec: layouts, round trips, decoder totality."""

import random

import pytest

from llnsim.rpl import (
    ControlError,
    DaoAckMessage,
    DaoMessage,
    DioMessage,
    DisMessage,
    decode_control,
    encode_control,
    version_is_newer,
)


def random_message(rng):
    kind = rng.randrange(4)
    if kind == 0:
        return DioMessage(
            rpl_instance_id=rng.randrange(256),
            version_number=rng.randrange(256),
            rank=rng.randrange(1 << 16),
            g_flag=bool(rng.randrange(2)),
            o_flag=bool(rng.randrange(2)),
            mop=rng.randrange(8),
            prf=rng.randrange(8),
            dtsn=rng.randrange(256),
            flags=rng.randrange(256),
            reserved=rng.randrange(256),
            dodag_id=rng.randrange(1 << 128),
        )
    if kind == 1:
        solicited = rng.randrange(1 << 128) if rng.random() < 0.5 else None
        return DisMessage(sender=rng.randrange(1 << 16), solicited_dodag_id=solicited)
    if kind == 2:
        return DaoMessage(
            sender=rng.randrange(1 << 16),
            target=rng.randrange(1 << 128),
            sequence=rng.randrange(256),
            withdraw=bool(rng.randrange(2)),
        )
    return DaoAckMessage(responder=rng.randrange(1 << 16), sequence=rng.randrange(256))


def test_dio_wire_layout():
    dio = DioMessage(
        rpl_instance_id=3,
        version_number=240,
        rank=0xFFFF,
        g_flag=True,
        o_flag=False,
        mop=2,
        prf=5,
        dtsn=7,
        flags=0xAB,
        reserved=0xCD,
        dodag_id=0xFE80 << 112 | 0x1,
    )
    wire = encode_control(dio)
    assert len(wire) == 25
    assert wire[1] == 3                      # instance id
    assert wire[2] == 240                    # version
    assert wire[3:5] == b"\xff\xff"          # rank, exactly 2 octets
    assert wire[5] == 0b1_0_010_101          # G | O | MOP | Prf packed
    assert wire[6] == 7                      # dtsn
    assert wire[7] == 0xAB
    assert wire[8] == 0xCD
    assert wire[9:25] == (0xFE80 << 112 | 0x1).to_bytes(16, "big")
    assert decode_control(wire) == dio


def test_prf_width_bound():
    assert decode_control(encode_control(DioMessage(version_number=0, rank=1, dodag_id=2, prf=7))).prf == 7
    with pytest.raises(ControlError):
        DioMessage(version_number=0, rank=1, dodag_id=2, prf=8)
    with pytest.raises(ControlError):
        DioMessage(version_number=0, rank=1 << 16, dodag_id=2)


def test_roundtrip_all_kinds():
    rng = random.Random(2027)
    for _ in range(10000):
        msg = random_message(rng)
        assert decode_control(encode_control(msg)) == msg


def test_fixed_sizes():
    assert len(encode_control(DisMessage(sender=1))) == 4
    assert len(encode_control(DisMessage(sender=1, solicited_dodag_id=5))) == 20
    assert len(encode_control(DaoMessage(sender=1, target=2, sequence=3))) == 21
    assert len(encode_control(DaoAckMessage(responder=1, sequence=2))) == 4


def test_decoder_rejects_truncation_and_garbage():
    rng = random.Random(59)
    with pytest.raises(ControlError):
        decode_control(b"")
    for _ in range(5000):
        msg = random_message(rng)
        wire = bytearray(encode_control(msg))
        cut = rng.randrange(len(wire))
        blob = bytes(wire[:cut]) if cut else bytes((rng.randrange(4, 256),))
        try:
            decode_control(blob)
        except ControlError:
            pass
        # trailing garbage
        with pytest.raises(ControlError):
            decode_control(bytes(wire) + b"\x00")


def test_decoder_totality_random_bytes():
    rng = random.Random(61)
    for _ in range(20000):
        blob = bytes(rng.randrange(256) for _ in range(rng.randrange(0, 30)))
        try:
            decode_control(blob)
        except ControlError:
            pass


def test_version_serial_arithmetic():
    assert version_is_newer(1, 0)
    assert version_is_newer(0, 255)          # wrap
    assert version_is_newer(127, 0)
    assert not version_is_newer(0, 1)
    assert not version_is_newer(0, 0)
    assert not version_is_newer(128, 0)      # exactly half the circle: ambiguous
    assert not version_is_newer(0, 128)
