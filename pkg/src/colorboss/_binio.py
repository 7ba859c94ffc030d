"""Little-endian array container used by the index and graph caches.

Layout::

    magic (4 bytes) | version (u8) | n_arrays (u32)
    per array: name_len (u8) | name | kind (1 byte: i/u/b) | width (u8) | count (u64) | data

All integers are little-endian; ``width`` is the cell size in bytes.
"""

from __future__ import annotations

import hashlib
import os
import struct
import tempfile

import numpy as np

from .errors import CacheError

VERSION = 1


def dumps(magic: bytes, arrays: dict[str, np.ndarray]) -> bytes:
    assert len(magic) == 4
    parts = [magic, struct.pack("<BI", VERSION, len(arrays))]
    for name, arr in arrays.items():
        arr = np.ascontiguousarray(arr)
        kind = arr.dtype.kind
        if kind not in "iub":
            raise TypeError(f"cannot store dtype {arr.dtype} for {name!r}")
        le = arr.astype(arr.dtype.newbyteorder("<"), copy=False)
        bname = name.encode("ascii")
        parts.append(struct.pack("<B", len(bname)) + bname)
        parts.append(struct.pack("<cBQ", kind.encode(), arr.dtype.itemsize, arr.size))
        parts.append(le.tobytes())
    return b"".join(parts)


def loads(magic: bytes, blob: bytes) -> dict[str, np.ndarray]:
    if blob[:4] != magic:
        raise CacheError(f"bad magic {blob[:4]!r}, expected {magic!r}")
    try:
        version, n = struct.unpack_from("<BI", blob, 4)
        if version != VERSION:
            raise CacheError(f"unsupported cache version {version}")
        off = 9
        out = {}
        for _ in range(n):
            (ln,) = struct.unpack_from("<B", blob, off)
            off += 1
            name = blob[off:off + ln].decode("ascii")
            off += ln
            kind, width, count = struct.unpack_from("<cBQ", blob, off)
            off += struct.calcsize("<cBQ")
            dtype = np.dtype(f"<{kind.decode()}{width}")
            nbytes = width * count
            if off + nbytes > len(blob):
                raise CacheError(f"truncated array {name!r}")
            out[name] = np.frombuffer(blob, dtype=dtype, count=count, offset=off).astype(
                dtype.newbyteorder("="))
            off += nbytes
    except struct.error as exc:
        raise CacheError(f"truncated cache: {exc}") from exc
    if off != len(blob):
        raise CacheError("trailing bytes after last array")
    return out


def atomic_write(path: str | os.PathLike, data: bytes) -> None:
    path = os.fspath(path)
    d = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()
