"""Content-addressed on-disk cache for exact zeta values and measure tables.

One file per key: the first line is the full key preimage (auditable), the
rest is the payload.  Writes are atomic (tmp + rename); concurrent writers of
the same key produce identical content, so last-writer-wins is harmless.
"""

from __future__ import annotations

import hashlib
import os
import random
import tempfile


class DiskCache:
    def __init__(self, directory):
        self.directory = directory
        os.makedirs(directory, exist_ok=True)

    @staticmethod
    def _digest(preimage):
        return hashlib.sha256(preimage.encode()).hexdigest()

    def _path(self, preimage):
        return os.path.join(self.directory, self._digest(preimage) + ".txt")

    def get(self, preimage):
        path = self._path(preimage)
        if not os.path.exists(path):
            return None
        with open(path, "r", encoding="utf-8") as fh:
            stored_key = fh.readline().rstrip("\n")
            if stored_key != preimage:
                raise IOError("cache collision or corruption at %s" % path)
            return fh.read()

    def put(self, preimage, payload):
        path = self._path(preimage)
        fd, tmp = tempfile.mkstemp(dir=self.directory, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                fh.write(preimage + "\n")
                fh.write(payload)
            os.replace(tmp, path)
        finally:
            if os.path.exists(tmp):
                os.unlink(tmp)

    def entries(self):
        return sorted(f for f in os.listdir(self.directory) if f.endswith(".txt"))

    def random_entry(self, rng=None):
        """(preimage, payload) of one cached entry, for spot re-verification."""
        names = self.entries()
        if not names:
            return None
        rng = rng or random
        name = names[rng.randrange(len(names))]
        with open(os.path.join(self.directory, name), "r", encoding="utf-8") as fh:
            preimage = fh.readline().rstrip("\n")
            return preimage, fh.read()


class NullCache:
    """Cache interface that stores nothing."""

    def get(self, preimage):
        return None

    def put(self, preimage, payload):
        pass

    def entries(self):
        return []

    def random_entry(self, rng=None):
        return None
