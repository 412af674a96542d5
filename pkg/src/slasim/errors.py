"""Exception hierarchy shared by the ledger, the SLA contract and the tooling."""


class SimError(Exception):
    """Base class for every error raised by this package."""


# --- ledger ---------------------------------------------------------------

class LedgerError(SimError):
    pass


class InsufficientFunds(LedgerError):
    pass


class UnknownAddress(LedgerError):
    pass


class DuplicateAddress(LedgerError):
    pass


class MalformedLog(LedgerError):
    pass


# --- SLA contract ---------------------------------------------------------

class ContractError(SimError):
    pass


class NotOwner(ContractError):
    pass


class ContractDisabled(ContractError):
    pass


class AlreadyRegistered(ContractError):
    pass


class UnknownScp(ContractError):
    pass


class InactiveScp(ContractError):
    pass


class UnknownQci(ContractError):
    pass


class ZeroDeficit(ContractError):
    pass


class NothingToWithdraw(ContractError):
    pass


class InsufficientEscrow(ContractError):
    pass


class InsufficientEscrowForAccrual(ContractError):
    pass


class AlreadyDisabled(ContractError):
    pass


class NotDisabled(ContractError):
    pass


# --- scenario / tooling ---------------------------------------------------

class InvalidConfig(SimError):
    pass


class DigestMismatch(SimError):
    pass
