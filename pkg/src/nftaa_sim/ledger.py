"""World state and the atomic transaction interpreter.

A Ledger is a self-contained, single-threaded world: accounts, one NFT
collection, one proxy-account factory, one token-bound-account registry, the
stake book, the withdrawal queue, an append-only event log, and a block
counter. Transactions apply to a shadow copy of the state and commit only if
every operation succeeds, so a failed transaction leaves the world
bit-identical to before it ran.
"""

from __future__ import annotations

import copy
import hashlib
import random
from dataclasses import dataclass, field
from enum import Enum

from .addresses import (
    Address,
    ZERO_ADDRESS,
    contract_address,
    eoa_address,
    from_hex,
    to_hex,
)
from .errors import ErrorCode, LedgerError, err
from .events import SYSTEM_TX_ID, Event, EventKind
from .nftaa import FactoryState, NftaaAccount
from .ops import (
    CreateTba,
    Fail,
    MintNftaa,
    MintToken,
    ProxyExecute,
    ProxyPayload,
    TbaExecute,
    Transaction,
    TransferToken,
    TransferValue,
    UpgradeAccount,
    WithdrawAssets,
)
from .staking import QueueConfig, StakePosition, WithdrawalQueue
from .tba import TbaRecord, TbaRegistry
from .tokens import NftCollection, validate_note

SYSTEM_LABEL = "__system__"


class CodeId(str, Enum):
    NFT_COLLECTION = "NftCollection"
    NFTAA_ACCOUNT = "NftaaAccount"
    NFTAA_FACTORY = "NftaaFactory"
    TBA_REGISTRY = "TbaRegistry"
    TBA_ACCOUNT = "TbaAccount"
    TARGET = "Target"


@dataclass
class Account:
    address: Address
    code_id: CodeId | None  # None marks an externally owned account
    balance: int = 0
    nonce: int = 0

    @property
    def is_eoa(self) -> bool:
        return self.code_id is None


class TxStatus(Enum):
    COMMITTED = "committed"
    ROLLED_BACK = "rolled_back"


@dataclass(frozen=True)
class TxReceipt:
    tx_id: int
    status: TxStatus
    error: LedgerError | None
    events: tuple[Event, ...]

    @property
    def committed(self) -> bool:
        return self.status is TxStatus.COMMITTED

    @property
    def error_code(self) -> str | None:
        return None if self.error is None else self.error.code.value


@dataclass
class WorldState:
    accounts: dict[Address, Account] = field(default_factory=dict)
    collection: NftCollection | None = None
    nftaas: dict[Address, NftaaAccount] = field(default_factory=dict)
    factory: FactoryState | None = None
    stakes: dict[Address, StakePosition] = field(default_factory=dict)
    queue: WithdrawalQueue = field(default_factory=WithdrawalQueue)
    registry: TbaRegistry | None = None
    labels: set[str] = field(default_factory=set)


@dataclass
class _TxContext:
    tx_id: int
    caller: Address
    events: list[Event] = field(default_factory=list)
    moved_tokens: set[tuple[Address, int]] = field(default_factory=set)
    value_out: set[Address] = field(default_factory=set)


class Ledger:
    """Deterministic account-model world with atomic transactions."""

    def __init__(self, config: QueueConfig | None = None):
        self.config = config or QueueConfig()
        self.rng = random.Random(self.config.rng_seed)
        self.height = 0
        self.events: list[Event] = []
        self.next_tx_id = 1
        self.state = WorldState()
        self._bootstrap()

    def _bootstrap(self) -> None:
        deployer = self._create_account(eoa_address(SYSTEM_LABEL), None)
        self.state.labels.add(SYSTEM_LABEL)
        collection = self._create_account(contract_address(deployer.address, 0),
                                          CodeId.NFT_COLLECTION)
        factory = self._create_account(contract_address(deployer.address, 1),
                                       CodeId.NFTAA_FACTORY)
        registry = self._create_account(contract_address(deployer.address, 2),
                                        CodeId.TBA_REGISTRY)
        self.state.collection = NftCollection(collection.address)
        self.state.factory = FactoryState(factory.address, collection.address)
        self.state.registry = TbaRegistry(registry.address)

    # ------------------------------------------------------------------
    # Accounts and direct (non-transactional) plumbing
    # ------------------------------------------------------------------

    def _create_account(self, address: Address, code_id: CodeId | None) -> Account:
        if address in self.state.accounts:
            # Two distinct derivations landing on one address is a corpus-level
            # impossibility, not a recoverable protocol error.
            raise RuntimeError(f"address collision at {to_hex(address)}")
        account = Account(address, code_id)
        self.state.accounts[address] = account
        return account

    def _account(self, address: Address) -> Account:
        account = self.state.accounts.get(address)
        if account is None:
            raise err(ErrorCode.UNKNOWN_ACCOUNT, address=to_hex(address))
        return account

    def _eoa_caller(self, address: Address) -> Account:
        # Contract accounts never originate operations themselves; they act
        # only through their execute paths. This is what makes a token locked
        # inside its own account permanently unreachable.
        account = self._account(address)
        if not account.is_eoa:
            raise err(ErrorCode.CALLER_NOT_EOA, address=to_hex(address))
        return account

    def create_eoa(self, label: str) -> Address:
        if not label:
            raise ValueError("label must be non-empty")
        if label in self.state.labels:
            raise err(ErrorCode.DUPLICATE_LABEL, label=label)
        account = self._create_account(eoa_address(label), None)
        self.state.labels.add(label)
        return account.address

    def faucet(self, to: Address, amount: int) -> None:
        """Test funding; the only operation exempt from conservation."""
        account = self._account(to)
        account.balance += _checked_amount(amount)
        self.events.append(Event(EventKind.TRANSFER, ZERO_ADDRESS,
                                 {"from": to_hex(ZERO_ADDRESS), "to": to_hex(to),
                                  "amount": amount},
                                 self.height, SYSTEM_TX_ID))

    def advance_block(self) -> int:
        self.height += 1
        for entry in self.state.queue.process_block(self.config, self.rng):
            self._account(entry.owner).balance += entry.amount
            self.events.append(Event(EventKind.WITHDRAWAL_PROCESSED, entry.owner,
                                     {"owner": to_hex(entry.owner),
                                      "amount": entry.amount,
                                      "enqueued_at": entry.enqueued_at},
                                     self.height, SYSTEM_TX_ID))
        return self.height

    def advance_blocks(self, count: int) -> int:
        for _ in range(count):
            self.advance_block()
        return self.height

    # ------------------------------------------------------------------
    # Transactions
    # ------------------------------------------------------------------

    def apply_transaction(self, tx: Transaction) -> TxReceipt:
        self._account(tx.caller)  # unknown caller fails the call itself, not the receipt
        tx_id = self.next_tx_id
        self.next_tx_id += 1
        ctx = _TxContext(tx_id, tx.caller)
        backup = copy.deepcopy(self.state)
        try:
            for op in tx.operations:
                self._execute(op, ctx)
        except LedgerError as failure:
            self.state = backup
            return TxReceipt(tx_id, TxStatus.ROLLED_BACK, failure, ())
        self.state.accounts[tx.caller].nonce += 1
        self.events.extend(ctx.events)
        return TxReceipt(tx_id, TxStatus.COMMITTED, None, tuple(ctx.events))

    def submit(self, *operations, caller: Address | None = None) -> TxReceipt:
        """Apply one transaction; the caller defaults to the first operation's."""
        if caller is None:
            caller = next(op.caller for op in operations if hasattr(op, "caller"))
        return self.apply_transaction(Transaction(caller, tuple(operations)))

    def must(self, *operations, caller: Address | None = None) -> TxReceipt:
        receipt = self.submit(*operations, caller=caller)
        if not receipt.committed:
            raise receipt.error
        return receipt

    # Convenience single-operation wrappers used heavily by tests.

    def transfer_value(self, caller: Address, to: Address, amount: int) -> TxReceipt:
        return self.must(TransferValue(caller, to, amount))

    def mint_nftaa(self, caller: Address, note: bytes) -> tuple[int, Address]:
        receipt = self.must(MintNftaa(caller, self.state.factory.address, note))
        created = next(e for e in receipt.events if e.kind is EventKind.NEW_NFTAA)
        return created.payload["token_id"], from_hex(created.payload["account"])

    def create_tba(self, caller: Address, token_id: int, salt: bytes,
                   has_execute: bool = True) -> Address:
        receipt = self.must(CreateTba(caller, self.state.registry.address,
                                      self.state.collection.address, token_id, salt,
                                      has_execute))
        created = next(e for e in receipt.events if e.kind is EventKind.TBA_CREATED)
        return from_hex(created.payload["account"])

    # ------------------------------------------------------------------
    # Operation interpreter
    # ------------------------------------------------------------------

    def _execute(self, op, ctx: _TxContext) -> None:
        match op:
            case TransferValue():
                self._eoa_caller(op.caller)
                self._move_value(op.caller, op.to, op.amount, ctx)
            case MintToken():
                self._op_mint_token(op, ctx)
            case TransferToken():
                self._op_transfer_token(op, ctx)
            case MintNftaa():
                self._op_mint_nftaa(op, ctx)
            case ProxyExecute():
                self._op_proxy_execute(op, ctx)
            case WithdrawAssets():
                self._op_withdraw_assets(op, ctx)
            case UpgradeAccount():
                self._op_upgrade_account(op, ctx)
            case CreateTba():
                self._op_create_tba(op, ctx)
            case TbaExecute():
                self._op_tba_execute(op, ctx)
            case Fail():
                raise err(ErrorCode.INJECTED_FAILURE, op.message)
            case _:
                raise TypeError(f"unknown operation {op!r}")

    def _move_value(self, frm: Address, to: Address, amount: int, ctx: _TxContext) -> None:
        amount = _checked_amount(amount)
        source = self._account(frm)
        dest = self._account(to)
        binding = self.state.nftaas.get(frm)
        if binding is not None and binding.bound_nft in ctx.moved_tokens:
            raise err(ErrorCode.FRAUD_GUARD,
                      "bound NFT already transferred in this transaction")
        if source.balance < amount:
            raise err(ErrorCode.INSUFFICIENT_BALANCE,
                      have=source.balance, need=amount)
        source.balance -= amount
        dest.balance += amount
        ctx.value_out.add(frm)
        ctx.events.append(self._event(EventKind.TRANSFER, frm, ctx,
                                      {"from": to_hex(frm), "to": to_hex(to),
                                       "amount": amount}))

    def _collection(self, address: Address) -> NftCollection:
        if self.state.collection is None or self.state.collection.address != address:
            raise err(ErrorCode.UNKNOWN_COLLECTION, address=to_hex(address))
        return self.state.collection

    def _op_mint_token(self, op: MintToken, ctx: _TxContext) -> None:
        self._eoa_caller(op.caller)
        collection = self._collection(op.collection)
        self._account(op.to)
        record = collection.mint(op.to, op.note, op.bound_account)
        ctx.events.append(self._event(EventKind.TRANSFER, op.collection, ctx,
                                      {"from": to_hex(ZERO_ADDRESS),
                                       "to": to_hex(op.to),
                                       "token_id": record.token_id}))

    def _op_transfer_token(self, op: TransferToken, ctx: _TxContext) -> None:
        self._eoa_caller(op.caller)
        collection = self._collection(op.collection)
        record = collection.get(op.token_id)
        if record.owner != op.caller:
            raise err(ErrorCode.NOT_OWNER, token=op.token_id)
        self._account(op.to)
        if record.bound_account is not None:
            if op.to == record.bound_account:
                # Sending the key into the lock: the owner gate could never
                # pass again, so reject instead of bricking the account.
                raise err(ErrorCode.SELF_CUSTODY_HAZARD, token=op.token_id)
            if record.bound_account in ctx.value_out:
                raise err(ErrorCode.FRAUD_GUARD,
                          "account was drained in this transaction")
        previous = record.owner
        record.owner = op.to
        ctx.moved_tokens.add((op.collection, op.token_id))
        ctx.events.append(self._event(EventKind.TRANSFER, op.collection, ctx,
                                      {"from": to_hex(previous), "to": to_hex(op.to),
                                       "token_id": op.token_id}))

    def _op_mint_nftaa(self, op: MintNftaa, ctx: _TxContext) -> None:
        self._eoa_caller(op.caller)
        factory = self.state.factory
        if factory is None or factory.address != op.factory:
            raise err(ErrorCode.UNKNOWN_ACCOUNT, address=to_hex(op.factory))
        validate_note(op.note)
        # Account first, then its token, inside the same atomic transaction.
        account = self._create_account(contract_address(factory.address,
                                                        factory.creation_nonce),
                                       CodeId.NFTAA_ACCOUNT)
        factory.creation_nonce += 1
        factory.created.append(account.address)
        collection = self._collection(factory.collection)
        record = collection.mint(op.caller, op.note, account.address)
        self.state.nftaas[account.address] = NftaaAccount(
            account.address, collection.address, record.token_id)
        ctx.events.append(self._event(EventKind.TRANSFER, collection.address, ctx,
                                      {"from": to_hex(ZERO_ADDRESS),
                                       "to": to_hex(op.caller),
                                       "token_id": record.token_id}))
        ctx.events.append(self._event(EventKind.NEW_NFTAA, factory.address, ctx,
                                      {"token_id": record.token_id,
                                       "account": to_hex(account.address),
                                       "creator": to_hex(op.caller)}))

    def _nftaa(self, address: Address) -> NftaaAccount:
        binding = self.state.nftaas.get(address)
        if binding is None:
            raise err(ErrorCode.NOT_AN_NFTAA, address=to_hex(address))
        return binding

    def _require_nft_owner(self, caller: Address, collection: Address, token_id: int) -> None:
        if self._collection(collection).owner_of(token_id) != caller:
            raise err(ErrorCode.NOT_NFT_OWNER, "caller is not the owner of the NFT")

    def _op_proxy_execute(self, op: ProxyExecute, ctx: _TxContext) -> None:
        self._eoa_caller(op.caller)
        binding = self._nftaa(op.nftaa)
        self._require_nft_owner(op.caller, *binding.bound_nft)
        self._run_payload(op.nftaa, op.payload, ctx)
        ctx.events.append(self._event(EventKind.PROXY_RESPONSE, op.nftaa, ctx,
                                      {"nftaa": to_hex(op.nftaa),
                                       "method": op.payload.method,
                                       "success": True}))

    def _op_withdraw_assets(self, op: WithdrawAssets, ctx: _TxContext) -> None:
        self._eoa_caller(op.caller)
        binding = self._nftaa(op.nftaa)
        self._require_nft_owner(op.caller, *binding.bound_nft)
        self._move_value(op.nftaa, op.to, op.amount, ctx)

    def _op_upgrade_account(self, op: UpgradeAccount, ctx: _TxContext) -> None:
        self._eoa_caller(op.caller)
        binding = self._nftaa(op.nftaa)
        self._require_nft_owner(op.caller, *binding.bound_nft)
        if op.new_version != binding.upgrade_version + 1:
            raise err(ErrorCode.VERSION_SKEW,
                      current=binding.upgrade_version, requested=op.new_version)
        binding.upgrade_version = op.new_version

    def _op_create_tba(self, op: CreateTba, ctx: _TxContext) -> None:
        self._eoa_caller(op.caller)
        registry = self.state.registry
        if registry is None or registry.address != op.registry:
            raise err(ErrorCode.UNKNOWN_ACCOUNT, address=to_hex(op.registry))
        collection = self._collection(op.collection)
        collection.get(op.token_id)  # token must exist; its record stays untouched
        key = (op.collection, op.token_id, op.salt)
        existing = registry.records.get(key)
        if existing is not None and existing.deployed:
            raise err(ErrorCode.ALREADY_DEPLOYED, account=to_hex(existing.address))
        address = registry.compute_address(op.collection, op.token_id, op.salt)
        account = self._create_account(address, CodeId.TBA_ACCOUNT)
        registry.records[key] = TbaRecord(op.collection, op.token_id, op.salt,
                                          account.address, deployed=True,
                                          has_execute=op.has_execute)
        ctx.events.append(self._event(EventKind.TBA_CREATED, registry.address, ctx,
                                      {"collection": to_hex(op.collection),
                                       "token_id": op.token_id,
                                       "salt": op.salt.hex(),
                                       "account": to_hex(account.address)}))

    def _op_tba_execute(self, op: TbaExecute, ctx: _TxContext) -> None:
        self._eoa_caller(op.caller)
        record = self.state.registry.get_deployed(op.tba)
        if not record.has_execute:
            raise err(ErrorCode.NO_EXECUTE, account=to_hex(op.tba))
        self._require_nft_owner(op.caller, record.collection, record.token_id)
        # No fraud guard and no self-custody guard on this path; reproducing
        # those hazards is the module's purpose.
        self._run_payload(op.tba, op.payload, ctx)

    # ------------------------------------------------------------------
    # Methods executed by a bound account on behalf of its owner
    # ------------------------------------------------------------------

    def _run_payload(self, acting: Address, payload: ProxyPayload, ctx: _TxContext) -> None:
        match payload.method:
            case "noop":
                pass
            case "transfer_value":
                self._move_value(acting, payload.to, payload.amount, ctx)
            case "stake":
                self._stake(acting, payload.amount, ctx)
            case "add_to_stake":
                self._add_to_stake(acting, payload.amount, ctx)
            case "request_unstake":
                self._request_unstake(acting, ctx)

    def _stake(self, acting: Address, amount: int, ctx: _TxContext) -> None:
        account = self._account(acting)
        if account.balance < amount:
            raise err(ErrorCode.INSUFFICIENT_BALANCE, have=account.balance, need=amount)
        if amount < self.config.min_stake:
            raise err(ErrorCode.BELOW_MIN_STAKE, amount=amount, minimum=self.config.min_stake)
        if acting in self.state.stakes:
            raise err(ErrorCode.ALREADY_STAKING)
        account.balance -= amount
        unlock = self.height + self.config.unlock_delay
        self.state.stakes[acting] = StakePosition(acting, amount, unlock)
        ctx.events.append(self._event(EventKind.STAKED, acting, ctx,
                                      {"amount": amount, "unlock_block": unlock}))

    def _add_to_stake(self, acting: Address, amount: int, ctx: _TxContext) -> None:
        position = self.state.stakes.get(acting)
        if position is None:
            raise err(ErrorCode.NO_POSITION)
        account = self._account(acting)
        if account.balance < amount:
            raise err(ErrorCode.INSUFFICIENT_BALANCE, have=account.balance, need=amount)
        if amount == 0:
            raise err(ErrorCode.ZERO_AMOUNT)
        account.balance -= _checked_amount(amount)
        position.amount += amount
        ctx.events.append(self._event(EventKind.STAKE_INCREASED, acting, ctx,
                                      {"amount": amount, "total": position.amount}))

    def _request_unstake(self, acting: Address, ctx: _TxContext) -> None:
        position = self.state.stakes.get(acting)
        if position is None:
            raise err(ErrorCode.NO_POSITION)
        if self.height < position.unlock_block:
            raise err(ErrorCode.STILL_LOCKED,
                      remaining_blocks=position.unlock_block - self.height)
        # The full amount goes to the queue, credited later to the contract
        # account itself, never to the human owner's address.
        self.state.queue.enqueue(acting, position.amount, self.height)
        del self.state.stakes[acting]
        ctx.events.append(self._event(EventKind.UNSTAKE_REQUESTED, acting, ctx,
                                      {"amount": position.amount,
                                       "enqueued_at": self.height}))

    def _event(self, kind: EventKind, emitter: Address, ctx: _TxContext,
               payload: dict) -> Event:
        return Event(kind, emitter, payload, self.height, ctx.tx_id)

    # ------------------------------------------------------------------
    # Views
    # ------------------------------------------------------------------

    def owner_of(self, token_id: int) -> Address:
        return self.state.collection.owner_of(token_id)

    def token_note(self, token_id: int) -> bytes:
        return self.state.collection.get(token_id).note

    def account_of(self, token_id: int) -> Address | None:
        """The bound-account address readable straight off the token, if any."""
        return self.state.collection.get(token_id).bound_account

    def bound_nft_of(self, nftaa: Address) -> tuple[Address, int]:
        return self._nftaa(nftaa).bound_nft

    def upgrade_version_of(self, nftaa: Address) -> int:
        return self._nftaa(nftaa).upgrade_version

    def balance_of(self, address: Address) -> int:
        return self._account(address).balance

    def stake_balance_of(self, account: Address) -> int:
        position = self.state.stakes.get(account)
        return 0 if position is None else position.amount

    def staker_address_of(self, account: Address) -> Address | None:
        return account if account in self.state.stakes else None

    def compute_tba_address(self, token_id: int, salt: bytes) -> Address:
        return self.state.registry.compute_address(self.state.collection.address,
                                                   token_id, salt)

    def total_conserved(self) -> int:
        """Sum that every operation except faucet must preserve."""
        balances = sum(a.balance for a in self.state.accounts.values())
        staked = sum(p.amount for p in self.state.stakes.values())
        queued = self.state.queue.total_amount()
        return balances + staked + queued

    # ------------------------------------------------------------------
    # Canonical digest
    # ------------------------------------------------------------------

    def state_digest(self) -> str:
        """SHA-256 over the canonical serialization, as 64 lowercase hex chars."""
        return hashlib.sha256(self.canonical_state_bytes()).hexdigest()

    def canonical_state_bytes(self) -> bytes:
        out = bytearray()
        state = self.state
        _section(out, b"accounts")
        # nonces are transaction bookkeeping, not protocol state: leaving them
        # out keeps "upgrade changed nothing but the version" digest-checkable
        for address in sorted(state.accounts):
            account = state.accounts[address]
            code = b"" if account.code_id is None else account.code_id.value.encode()
            _fields(out, address, code, _uint(account.balance))
        _section(out, b"nfts")
        collection = state.collection
        if collection is not None:
            for token_id in sorted(collection.tokens):
                record = collection.tokens[token_id]
                bound = record.bound_account or b""
                _fields(out, collection.address, _uint(token_id), record.owner,
                        record.note, bound)
        _section(out, b"stakes")
        for owner in sorted(state.stakes):
            position = state.stakes[owner]
            _fields(out, owner, _uint(position.amount), _uint(position.unlock_block))
        _section(out, b"queue")
        for entry in state.queue.pending:
            _fields(out, entry.owner, _uint(entry.amount), _uint(entry.enqueued_at))
        _section(out, b"bindings")
        for address in sorted(state.nftaas):
            binding = state.nftaas[address]
            _fields(out, address, binding.bound_collection,
                    _uint(binding.bound_token_id), _uint(binding.upgrade_version))
        _section(out, b"tbas")
        if state.registry is not None:
            for key in sorted(state.registry.records):
                record = state.registry.records[key]
                _fields(out, record.collection, _uint(record.token_id), record.salt,
                        record.address, _uint(int(record.deployed)),
                        _uint(int(record.has_execute)))
        _section(out, b"factory")
        if state.factory is not None:
            _fields(out, state.factory.address, state.factory.collection,
                    _uint(state.factory.creation_nonce))
        _section(out, b"height")
        _fields(out, _uint(self.height))
        return bytes(out)


def _checked_amount(amount: int) -> int:
    if amount < 0:
        raise ValueError("amounts are unsigned")
    return amount


def _uint(value: int) -> bytes:
    if value < 0:
        raise ValueError("unsigned field")
    return value.to_bytes((value.bit_length() + 7) // 8, "big") if value else b""


def _section(out: bytearray, name: bytes) -> None:
    out += len(name).to_bytes(4, "big") + name


def _fields(out: bytearray, *values: bytes) -> None:
    for value in values:
        out += len(value).to_bytes(4, "big") + value
