"""Token-bound accounts, registry style.

The deliberate contrast with the NFTAA design: a registry maps
(collection, token, salt) to a salted deterministic address, the address is
computable before deployment, one NFT may have any number of accounts, the
creation is a separate transaction from the mint, and the token itself
records nothing about any of it. Each of those properties is a documented
hazard surface this module preserves on purpose.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

from .addresses import Address, deterministic_address
from .errors import ErrorCode, err

TbaKey = tuple[Address, int, bytes]  # (collection, token_id, salt)


@dataclass
class TbaRecord:
    collection: Address
    token_id: int
    salt: bytes
    address: Address
    deployed: bool = False
    has_execute: bool = True  # badly developed account variant when False


@dataclass
class TbaRegistry:
    address: Address
    records: dict[TbaKey, TbaRecord] = field(default_factory=dict)
    # Counterfactual addresses handed out by compute_address. Not part of the
    # world state (a pure computation), but remembered so the lock diagnostic
    # can flag tokens sent to a derived address that was never deployed.
    seen: dict[TbaKey, Address] = field(default_factory=dict)

    def compute_address(self, collection: Address, token_id: int, salt: bytes) -> Address:
        address = deterministic_address(self.address, _mix(collection, token_id, salt), "TbaAccount")
        self.seen[(collection, token_id, salt)] = address
        return address

    def get_deployed(self, address: Address) -> TbaRecord:
        for record in self.records.values():
            if record.address == address and record.deployed:
                return record
        raise err(ErrorCode.NOT_DEPLOYED, address=address.hex())

    def addresses_for_token(self, collection: Address, token_id: int) -> set[Address]:
        """Every account address derived from this token that the registry has seen."""
        found = set()
        for (coll, tid, _salt), record in self.records.items():
            if coll == collection and tid == token_id:
                found.add(record.address)
        for (coll, tid, _salt), address in self.seen.items():
            if coll == collection and tid == token_id:
                found.add(address)
        return found


def _mix(collection: Address, token_id: int, salt: bytes) -> bytes:
    """Fold the token identity into one 32-byte salt for the address derivation."""
    return hashlib.sha256(collection + token_id.to_bytes(8, "big") + salt).digest()


# ---------------------------------------------------------------------------
# Diagnostics for the hazards this account style permits
# ---------------------------------------------------------------------------

def detect_locked_nfts(state) -> list[tuple[Address, int]]:
    """Minted tokens owned by an account derived from themselves.

    Such a token can never satisfy its own owner gate again: the only party
    that could act is the account, and accounts do not originate calls.
    Covers deployed accounts and counterfactual addresses the registry has
    handed out.
    """
    locked = []
    collection = state.collection
    if collection is None or state.registry is None:
        return locked
    for token_id in sorted(collection.tokens):
        record = collection.tokens[token_id]
        derived = state.registry.addresses_for_token(collection.address, token_id)
        if record.owner in derived:
            locked.append((collection.address, token_id))
    return locked


def detect_stranded_tbas(state) -> list[tuple[Address, int]]:
    """Deployed accounts without an execute function that are holding funds."""
    stranded = []
    if state.registry is None:
        return stranded
    for key in sorted(state.registry.records):
        record = state.registry.records[key]
        if record.deployed and not record.has_execute:
            account = state.accounts.get(record.address)
            if account is not None and account.balance > 0:
                stranded.append((record.address, account.balance))
    return stranded


def diagnostic_lines(state) -> list[str]:
    lines = []
    for collection, token_id in detect_locked_nfts(state):
        owner = state.collection.tokens[token_id].owner
        lines.append(f"locked nft={collection.hex()}:{token_id} owner={owner.hex()}")
    for address, balance in detect_stranded_tbas(state):
        lines.append(f"stranded tba={address.hex()} balance={balance}")
    return lines
