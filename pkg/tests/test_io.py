import io

import numpy as np
import pytest

import stabshadow as ss
from stabshadow import (ClassicalShadow, PureTableau, RandomStream, acquire_shadow,
                        ghz_tableau, read_shadow, write_shadow)
from stabshadow.shadow_io import (ShadowInvariantError, ShadowTruncatedError,
                                  ShadowVersionError, record_size)


def roundtrip(shadow):
    buf = io.BytesIO()
    write_shadow(shadow, buf)
    buf.seek(0)
    return read_shadow(buf), buf.getvalue()


def test_empty_shadow_roundtrip():
    sh = ClassicalShadow.empty(5, seed=9)
    back, raw = roundtrip(sh)
    assert back == sh
    assert len(raw) == 28  # header only


def test_roundtrip_various_sizes():
    for n, N in ((1, 7), (4, 50), (65, 12), (70, 5)):
        sh = acquire_shadow(PureTableau(ghz_tableau(n)), N, RandomStream(n * 100 + N))
        back, raw = roundtrip(sh)
        assert back == sh
        assert len(raw) == 28 + N * record_size(n)


def test_write_is_deterministic():
    sh = acquire_shadow(PureTableau(ghz_tableau(6)), 20, RandomStream(5))
    _b1, raw1 = roundtrip(sh)
    _b2, raw2 = roundtrip(sh)
    assert raw1 == raw2


def test_record_size_formula():
    # approx N (4 n^2 + 3 n) / 8 bytes per record (within padding)
    for n in (4, 30, 162):
        approx = (4 * n * n + 3 * n) / 8
        assert abs(record_size(n) - approx) <= 7  # 7 fields' byte padding


def test_corrupted_magic_raises_version_error():
    sh = acquire_shadow(PureTableau(ghz_tableau(3)), 4, RandomStream(8))
    buf = io.BytesIO()
    write_shadow(sh, buf)
    raw = bytearray(buf.getvalue())
    raw[0] ^= 0xFF
    with pytest.raises(ShadowVersionError):
        read_shadow(io.BytesIO(bytes(raw)))


def test_unknown_version_raises():
    sh = acquire_shadow(PureTableau(ghz_tableau(3)), 4, RandomStream(8))
    buf = io.BytesIO()
    write_shadow(sh, buf)
    raw = bytearray(buf.getvalue())
    raw[4] = 0xEE
    with pytest.raises(ShadowVersionError):
        read_shadow(io.BytesIO(bytes(raw)))


def test_truncation_raises():
    sh = acquire_shadow(PureTableau(ghz_tableau(3)), 4, RandomStream(8))
    buf = io.BytesIO()
    write_shadow(sh, buf)
    raw = buf.getvalue()
    with pytest.raises(ShadowTruncatedError):
        read_shadow(io.BytesIO(raw[: len(raw) - 3]))
    with pytest.raises(ShadowTruncatedError):
        read_shadow(io.BytesIO(raw[:10]))


def test_trailing_garbage_raises_invariant_error():
    sh = acquire_shadow(PureTableau(ghz_tableau(3)), 4, RandomStream(8))
    buf = io.BytesIO()
    write_shadow(sh, buf)
    with pytest.raises(ShadowInvariantError):
        read_shadow(io.BytesIO(buf.getvalue() + b"xx"))


def test_bad_qubit_count_raises_invariant_error():
    import struct

    head = struct.pack("<4sIIQQ", b"CSHD", 1, 0, 0, 0)
    with pytest.raises(ShadowInvariantError):
        read_shadow(io.BytesIO(head))


def test_exceptions_share_base():
    assert issubclass(ShadowVersionError, ss.ShadowFormatError)
    assert issubclass(ShadowTruncatedError, ss.ShadowFormatError)
    assert issubclass(ShadowInvariantError, ss.ShadowFormatError)
