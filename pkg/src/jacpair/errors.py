"""Error type shared by every module.

Each failure carries a stable upper-case ``code`` (for example
``SPACE_MISMATCH`` or ``IRRATIONAL_ROOT``) so callers and the CLI can
report it without parsing messages.
"""

from __future__ import annotations


class JacpairError(Exception):
    def __init__(self, code: str, message: str = "", **data):
        self.code = code
        self.data = data
        super().__init__(f"{code}: {message}" if message else code)
