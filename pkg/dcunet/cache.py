"""cache.py

Custom cache implementations.
"""

from typing import Tuple, Any

import sys
import zlib
import logging

import numpy as np
from cachetools import LFUCache

logger = logging.getLogger(__name__)

CompressionTuple = Tuple[bytes, str, Tuple[int, ...]]


class CompressedLFUCache(LFUCache):
    """Least-frequently-used cache of numpy arrays with ZLIB compression"""

    def __init__(self, maxsize: int, compression_level: int):
        super().__init__(maxsize, self._get_size)
        self.compression_level = compression_level

    def __getitem__(self, key: Any) -> np.ndarray:
        compressed_item = super().__getitem__(key)
        return self._decompress_tuple(compressed_item)

    def __setitem__(self, key: Any, value: np.ndarray) -> None:
        val_compressed = self._compress_array(value, self.compression_level)
        super().__setitem__(key, val_compressed)

    def popitem(self) -> Tuple[Any, Any]:
        key, value = super().popitem()
        logger.debug("Evicted %s from sample cache", key)
        return key, value

    @staticmethod
    def _compress_array(arr: np.ndarray, compression_level: int) -> CompressionTuple:
        data = np.ascontiguousarray(arr)
        compressed_data = zlib.compress(data.tobytes(), compression_level)
        return (compressed_data, data.dtype.name, data.shape)

    @staticmethod
    def _decompress_tuple(compressed_data: CompressionTuple) -> np.ndarray:
        data_b, dt, ds = compressed_data
        data = np.frombuffer(zlib.decompress(data_b), dtype=dt).reshape(ds)
        # frombuffer views are read-only
        return data.copy()

    @staticmethod
    def _get_size(x: CompressionTuple) -> int:
        return sys.getsizeof(x[0])
