"""
# Rate accounting

Raw geometry costs 3 n k bits (k bits per coordinate). A sparse code of n_d
atoms from an m-atom dictionary costs

    3 n_d k_d + min(m, n_d ceil(log2 m)) + n_mu k_mu

bits: k_d bits per coefficient, the support as a bit vector or an index
list (whichever is smaller), and k_mu bits per Hamiltonian weight. A
truncated code stores no support, only the first n_d coefficients:

    3 n_d k_d + n_mu k_mu,

which is n_d / n when k_d = k and n_mu = 0.
"""

from dataclasses import asdict, dataclass
from typing import Any, Dict, Iterable, Optional

from hsc.error import HscUsageError


@dataclass(frozen=True)
class HscCompressionBudget:
    n: int
    k: int
    n_d: int
    k_d: int
    m: Optional[int] = None
    n_mu: int = 0
    k_mu: int = 32

    def __post_init__(self):
        values = [self.n, self.k, self.n_d, self.k_d, self.n_mu, self.k_mu]
        if self.m is not None:
            values.append(self.m)
        if any(v < 0 for v in values):
            raise HscUsageError("budget entries must be nonnegative")
        if self.m is not None and self.n_d > self.m:
            raise HscUsageError(f"n_d={self.n_d} exceeds m={self.m}")

    @property
    def truncated(self) -> bool:
        return self.m is None

    def raw_bits(self) -> int:
        return 3 * self.n * self.k

    def encoded_bits(self) -> int:
        bits = 3 * self.n_d * self.k_d + self.n_mu * self.k_mu
        if self.m is not None:
            bits += support_bits(self.m, self.n_d)
        return bits

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def index_bits(m: int) -> int:
    """ceil(log2 m) bits address one of m atoms."""
    return max(m - 1, 0).bit_length()


def support_bits(m: int, n_d: int) -> int:
    return min(m, n_d * index_bits(m))


def use_bit_vector(m: int, n_d: int) -> bool:
    return m < n_d * index_bits(m)


def compression_ratio(budget: HscCompressionBudget) -> float:
    raw = budget.raw_bits()
    if raw == 0:
        raise HscUsageError("compression ratio of an empty mesh is undefined")
    return budget.encoded_bits() / raw


def total_ratio(budgets: Iterable[HscCompressionBudget]) -> float:
    budgets = list(budgets)
    raw = sum(b.raw_bits() for b in budgets)
    if raw == 0:
        raise HscUsageError("compression ratio of an empty mesh is undefined")
    return sum(b.encoded_bits() for b in budgets) / raw


def solve_sparsity(
    n: int,
    target_ratio: float,
    *,
    k: int,
    k_d: int,
    m: Optional[int],
    n_mu: int = 0,
    k_mu: int = 32,
) -> int:
    """Largest n_d <= n whose budget stays within target_ratio * 3 n k."""
    allowance = target_ratio * 3 * n * k
    limit = n if m is None else min(n, m)
    # encoded_bits is nondecreasing in n_d, so bisect.
    low, high = 0, limit
    while low < high:
        mid = (low + high + 1) // 2
        budget = HscCompressionBudget(n, k, mid, k_d, m, n_mu, k_mu)
        bits = budget.encoded_bits()
        if bits <= allowance + 1e-9:
            low = mid
        else:
            high = mid - 1
    return low
