"""Exception types raised across the package."""


class ZkflError(Exception):
    pass


class ConfigError(ZkflError, ValueError):
    pass


class EncodingError(ZkflError, ValueError):
    """Malformed or non-canonical byte encoding."""


class RangeError(ZkflError, ValueError):
    """Decoded fixed-point magnitude falls outside the admissible window."""


class DimensionMismatch(ZkflError, ValueError):
    pass


class BadSignature(ZkflError):
    def __init__(self, client_id: str):
        super().__init__(f"signature of client {client_id!r} does not verify")
        self.client_id = client_id


class RelationUnsatisfied(ZkflError):
    """The aggregator tried to prove a statement its witness does not satisfy."""


class SimulationUnavailable(ZkflError):
    pass


class InvalidVrf(ZkflError):
    def __init__(self, client_id: str):
        super().__init__(f"VRF output of client {client_id!r} does not verify")
        self.client_id = client_id


class NotEnoughClients(ZkflError):
    pass


class DuplicateRound(ZkflError):
    pass


class Rejection(ZkflError):
    """Quorum refused a submission; ``reasons`` maps miner id to its diagnostics."""

    def __init__(self, reasons: dict[str, list[str]]):
        flat = sorted({r for rs in reasons.values() for r in rs})
        super().__init__("miners rejected submission: " + ", ".join(flat))
        self.reasons = reasons
