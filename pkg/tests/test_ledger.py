"""Ledger core: account creation, transfers, atomic transactions, blocks."""

import random

import pytest

from nftaa_sim import (
    ETH,
    ErrorCode,
    Fail,
    Ledger,
    LedgerError,
    MintNftaa,
    QueueConfig,
    Transaction,
    TransferValue,
    eoa_address,
)


@pytest.fixture
def ledger():
    return Ledger()


def test_create_eoa_duplicate_label(ledger):
    first = ledger.create_eoa("alice")
    assert ledger.balance_of(first) == 0
    with pytest.raises(LedgerError) as caught:
        ledger.create_eoa("alice")
    assert caught.value.code is ErrorCode.DUPLICATE_LABEL


def test_create_eoa_distinct_labels(ledger):
    assert ledger.create_eoa("alice") != ledger.create_eoa("bob")


def test_create_eoa_deterministic_across_ledgers():
    one = Ledger().create_eoa("alice")
    two = Ledger().create_eoa("alice")
    assert one == two == eoa_address("alice")


def test_faucet_zero_is_noop_except_event(ledger):
    alice = ledger.create_eoa("alice")
    digest = ledger.state_digest()
    events = len(ledger.events)
    ledger.faucet(alice, 0)
    assert ledger.state_digest() == digest
    assert len(ledger.events) == events + 1


def test_faucet_validator_threshold(ledger):
    alice = ledger.create_eoa("alice")
    ledger.faucet(alice, 32 * ETH)
    assert ledger.balance_of(alice) == 32 * 10**18


def test_faucet_unknown_account(ledger):
    with pytest.raises(LedgerError) as caught:
        ledger.faucet(eoa_address("ghost"), 1)
    assert caught.value.code is ErrorCode.UNKNOWN_ACCOUNT


def test_transfer_full_balance(ledger):
    alice, bob = ledger.create_eoa("alice"), ledger.create_eoa("bob")
    ledger.faucet(alice, 10)
    ledger.transfer_value(alice, bob, 10)
    assert ledger.balance_of(alice) == 0
    assert ledger.balance_of(bob) == 10


def test_transfer_insufficient_balance(ledger):
    alice, bob = ledger.create_eoa("alice"), ledger.create_eoa("bob")
    ledger.faucet(alice, 5)
    digest = ledger.state_digest()
    receipt = ledger.submit(TransferValue(alice, bob, 6))
    assert not receipt.committed
    assert receipt.error.code is ErrorCode.INSUFFICIENT_BALANCE
    assert ledger.state_digest() == digest


def test_transfer_cycle_conserves(ledger):
    actors = [ledger.create_eoa(n) for n in ("a", "b", "c")]
    ledger.faucet(actors[0], 50)
    # conservation oracle: sum balances before and after the cycle
    before = sum(ledger.balance_of(x) for x in actors)
    ledger.transfer_value(actors[0], actors[1], 7)
    ledger.transfer_value(actors[1], actors[2], 7)
    ledger.transfer_value(actors[2], actors[0], 7)
    assert sum(ledger.balance_of(x) for x in actors) == before
    assert [ledger.balance_of(x) for x in actors] == [50, 0, 0]


def test_transaction_rollback_restores_digest(ledger):
    alice, bob = ledger.create_eoa("alice"), ledger.create_eoa("bob")
    ledger.faucet(alice, 10)
    digest = ledger.state_digest()
    receipt = ledger.submit(TransferValue(alice, bob, 4),
                            TransferValue(alice, bob, 100))
    assert not receipt.committed
    assert receipt.error.code is ErrorCode.INSUFFICIENT_BALANCE
    assert receipt.events == ()
    assert ledger.state_digest() == digest


def test_empty_transaction_commits(ledger):
    alice = ledger.create_eoa("alice")
    receipt = ledger.apply_transaction(Transaction(alice, ()))
    assert receipt.committed
    assert receipt.events == ()
    assert ledger.state.accounts[alice].nonce == 1


def test_unknown_caller_fails_the_call_itself(ledger):
    with pytest.raises(LedgerError) as caught:
        ledger.apply_transaction(Transaction(eoa_address("ghost"), ()))
    assert caught.value.code is ErrorCode.UNKNOWN_ACCOUNT


def test_rolled_back_events_never_reach_the_log(ledger):
    alice = ledger.create_eoa("alice")
    ledger.faucet(alice, 10)
    log_before = len(ledger.events)
    ledger.submit(TransferValue(alice, alice, 1), Fail())
    assert len(ledger.events) == log_before


def test_contract_caller_rejected(ledger):
    alice = ledger.create_eoa("alice")
    ledger.must(MintNftaa(alice, ledger.state.factory.address, b"n"))
    nftaa = next(iter(ledger.state.nftaas))
    receipt = ledger.submit(TransferValue(nftaa, alice, 0))
    assert receipt.error.code is ErrorCode.CALLER_NOT_EOA


def test_random_transactions_match_replay_oracle():
    """Replay only the committed transactions on a fresh ledger: the final
    states must be identical. Exercises 100 transactions with failures mixed in.
    """
    rng = random.Random(1234)
    ledger = Ledger()
    actors = [ledger.create_eoa(f"actor{i}") for i in range(4)]
    fund_log = []
    for actor in actors:
        ledger.faucet(actor, 100)
        fund_log.append((actor, 100))
    committed_ops = []
    for _ in range(100):
        sender, receiver = rng.choice(actors), rng.choice(actors)
        ops = [TransferValue(sender, receiver, rng.randint(0, 60))]
        if rng.random() < 0.3:
            ops.append(TransferValue(sender, receiver, rng.randint(100, 500)))  # will fail
        receipt = ledger.apply_transaction(Transaction(sender, tuple(ops)))
        if receipt.committed:
            committed_ops.append((sender, tuple(ops)))

    replay = Ledger()
    for i in range(4):
        replay.create_eoa(f"actor{i}")
    for actor, amount in fund_log:
        replay.faucet(actor, amount)
    for sender, ops in committed_ops:
        replay_receipt = replay.apply_transaction(Transaction(sender, ops))
        assert replay_receipt.committed
    assert replay.state_digest() == ledger.state_digest()


def test_advance_block_heights():
    ledger = Ledger()
    assert ledger.advance_block() == 1
    assert ledger.height == 1


def test_one_simulated_day_is_7200_blocks():
    # 115,200 withdrawals per day at 16 per block forces this block count
    assert 115_200 // 16 == 7_200
    ledger = Ledger()
    ledger.advance_blocks(7_200)
    assert ledger.height == 7_200


def test_advance_with_empty_queue_emits_nothing():
    ledger = Ledger(QueueConfig(missed_slot_probability=0.5, rng_seed=9))
    ledger.advance_blocks(10)
    assert ledger.events == []


def test_nonce_increments_only_on_commit(ledger):
    alice, bob = ledger.create_eoa("alice"), ledger.create_eoa("bob")
    ledger.faucet(alice, 10)
    observed = []
    for amount in (1, 100, 2, 100, 3):
        receipt = ledger.submit(TransferValue(alice, bob, amount))
        if receipt.committed:
            observed.append(ledger.state.accounts[alice].nonce)
    assert observed == [1, 2, 3]  # strictly increasing, no gaps


def test_digest_is_64_lowercase_hex(ledger):
    digest = ledger.state_digest()
    assert len(digest) == 64
    assert digest == digest.lower()
    int(digest, 16)


def test_negative_amount_rejected(ledger):
    alice = ledger.create_eoa("alice")
    with pytest.raises(ValueError):
        ledger.faucet(alice, -1)
