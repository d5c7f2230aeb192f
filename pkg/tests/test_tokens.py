"""Token collection semantics: ids, ownership, transfers, notes, bindings."""

import itertools
import random

import pytest

from nftaa_sim import (
    ErrorCode,
    EventKind,
    Ledger,
    MintToken,
    TransferToken,
    ZERO_ADDRESS,
)


@pytest.fixture
def world():
    ledger = Ledger()
    alice = ledger.create_eoa("alice")
    bob = ledger.create_eoa("bob")
    return ledger, alice, bob


def _mint(ledger, caller, to, note=b"n", bound=None):
    receipt = ledger.must(MintToken(caller, ledger.state.collection.address,
                                    to, note, bound))
    event = receipt.events[0]
    assert event.kind is EventKind.TRANSFER
    assert event.payload["from"] == ZERO_ADDRESS.hex()
    return event.payload["token_id"]


def test_first_mint_gets_id_one(world):
    ledger, alice, _ = world
    assert _mint(ledger, alice, alice) == 1


def test_sequential_ids_and_owners(world):
    ledger, alice, bob = world
    assert _mint(ledger, alice, alice) == 1
    assert _mint(ledger, alice, bob) == 2
    assert ledger.owner_of(1) == alice
    assert ledger.owner_of(2) == bob


def test_owner_of_unminted(world):
    ledger, _, _ = world
    with pytest.raises(Exception) as caught:
        ledger.owner_of(99)
    assert caught.value.code is ErrorCode.UNKNOWN_TOKEN


def test_transfer_changes_owner(world):
    ledger, alice, bob = world
    token = _mint(ledger, alice, alice)
    ledger.must(TransferToken(alice, ledger.state.collection.address, token, bob))
    assert ledger.owner_of(token) == bob


def test_transfer_to_self_emits_event(world):
    ledger, alice, _ = world
    token = _mint(ledger, alice, alice)
    receipt = ledger.must(TransferToken(alice, ledger.state.collection.address,
                                        token, alice))
    assert ledger.owner_of(token) == alice
    assert len(receipt.events) == 1


def test_non_owner_transfer_rejected(world):
    ledger, alice, bob = world
    token = _mint(ledger, alice, alice)
    digest = ledger.state_digest()
    receipt = ledger.submit(TransferToken(bob, ledger.state.collection.address,
                                          token, bob))
    assert receipt.error.code is ErrorCode.NOT_OWNER
    assert ledger.state_digest() == digest


def test_transfer_chain(world):
    ledger, alice, bob = world
    carol = ledger.create_eoa("carol")
    token = _mint(ledger, alice, alice)
    collection = ledger.state.collection.address
    ledger.must(TransferToken(alice, collection, token, bob))
    ledger.must(TransferToken(bob, collection, token, carol))
    assert ledger.owner_of(token) == carol


def test_note_round_trip(world):
    ledger, alice, _ = world
    token = _mint(ledger, alice, alice, note=b"hello")
    assert ledger.token_note(token) == b"hello"


def test_note_256_bytes_intact(world):
    ledger, alice, _ = world
    note = bytes(range(256))
    token = _mint(ledger, alice, alice, note=note)
    returned = ledger.token_note(token)
    assert returned == note
    assert len(returned) == 256


def test_note_of_unminted(world):
    ledger, _, _ = world
    with pytest.raises(Exception) as caught:
        ledger.token_note(7)
    assert caught.value.code is ErrorCode.UNKNOWN_TOKEN


def test_bound_account_survives_every_transfer_order(world):
    """Exhaustive small scenario: the binding set at mint never changes no
    matter which sequence of transfers runs afterwards.
    """
    ledger, alice, bob = world
    carol = ledger.create_eoa("carol")
    actors = [alice, bob, carol]
    target = ledger.create_eoa("bound-target")
    token = _mint(ledger, alice, alice, bound=target)
    collection = ledger.state.collection.address
    for recipients in itertools.product(actors, repeat=3):
        for to in recipients:
            owner = ledger.owner_of(token)
            ledger.must(TransferToken(owner, collection, token, to))
            assert ledger.account_of(token) == target


def test_mint_to_unknown_account(world):
    ledger, alice, _ = world
    from nftaa_sim import eoa_address
    receipt = ledger.submit(MintToken(alice, ledger.state.collection.address,
                                      eoa_address("ghost"), b"n"))
    assert receipt.error.code is ErrorCode.UNKNOWN_ACCOUNT


def test_unknown_collection(world):
    ledger, alice, _ = world
    receipt = ledger.submit(MintToken(alice, ZERO_ADDRESS, alice, b"n"))
    assert receipt.error.code is ErrorCode.UNKNOWN_COLLECTION


def test_only_owner_called_transfers_commit(world):
    """Fuzz transfer authorization: every committed transfer was owner-called."""
    ledger, alice, bob = world
    carol = ledger.create_eoa("carol")
    actors = [alice, bob, carol]
    collection = ledger.state.collection.address
    tokens = [_mint(ledger, alice, random.Random(1).choice(actors)) for _ in range(3)]
    rng = random.Random(99)
    for _ in range(200):
        caller, to = rng.choice(actors), rng.choice(actors)
        token = rng.choice(tokens)
        owner_before = ledger.owner_of(token)
        receipt = ledger.submit(TransferToken(caller, collection, token, to))
        if receipt.committed:
            assert caller == owner_before
            assert ledger.owner_of(token) == to
        else:
            assert caller != owner_before
            assert ledger.owner_of(token) == owner_before
