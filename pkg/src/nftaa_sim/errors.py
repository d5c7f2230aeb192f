"""Error codes shared by every module and by scenario `expect_error` lines."""

from __future__ import annotations

from enum import Enum


class ErrorCode(str, Enum):
    # ledger
    DUPLICATE_LABEL = "DuplicateLabel"
    UNKNOWN_ACCOUNT = "UnknownAccount"
    INSUFFICIENT_BALANCE = "InsufficientBalance"
    CALLER_NOT_EOA = "CallerNotEoa"
    INJECTED_FAILURE = "InjectedFailure"
    # token standard
    UNKNOWN_COLLECTION = "UnknownCollection"
    UNKNOWN_TOKEN = "UnknownToken"
    NOT_OWNER = "NotOwner"
    # nftaa protocol
    EMPTY_NOTE = "EmptyNote"
    NOTE_TOO_LARGE = "NoteTooLarge"
    NOT_AN_NFTAA = "NotAnNftaa"
    NOT_NFT_OWNER = "NotNftOwner"
    FRAUD_GUARD = "FraudGuard"
    SELF_CUSTODY_HAZARD = "SelfCustodyHazard"
    VERSION_SKEW = "VersionSkew"
    # staking
    BELOW_MIN_STAKE = "BelowMinStake"
    ALREADY_STAKING = "AlreadyStaking"
    NO_POSITION = "NoPosition"
    ZERO_AMOUNT = "ZeroAmount"
    STILL_LOCKED = "StillLocked"
    # token-bound accounts
    ALREADY_DEPLOYED = "AlreadyDeployed"
    NOT_DEPLOYED = "NotDeployed"
    NO_EXECUTE = "NoExecute"
    # differential runner
    NOT_COMPARABLE = "NotComparable"

    def __str__(self) -> str:  # render as the bare code in reports
        return self.value


class LedgerError(Exception):
    """Raised by any operation that cannot commit; the enclosing transaction rolls back."""

    def __init__(self, code: ErrorCode, message: str = "", **detail: object):
        self.code = code
        self.detail = dict(detail)
        text = code.value if not message else f"{code.value}: {message}"
        if detail:
            text += " (" + ", ".join(f"{k}={v}" for k, v in detail.items()) + ")"
        super().__init__(text)


def err(code: ErrorCode, message: str = "", **detail: object) -> LedgerError:
    return LedgerError(code, message, **detail)
