import pytest
from common import add_hsc_to_sys_path

add_hsc_to_sys_path()

from hsc.codec.hsc_rate import (
    HscCompressionBudget,
    compression_ratio,
    index_bits,
    solve_sparsity,
    support_bits,
    total_ratio,
    use_bit_vector,
)
from hsc.error import HscUsageError


def test_sparse_ratio():
    budget = HscCompressionBudget(n=1000, k=32, n_d=100, k_d=32, m=4000)
    assert budget.encoded_bits() == 10800
    assert compression_ratio(budget) == pytest.approx(0.1125)


def test_sparse_ratio_with_mu():
    budget = HscCompressionBudget(
        n=1000, k=32, n_d=100, k_d=32, m=4000, n_mu=2, k_mu=32
    )
    assert compression_ratio(budget) == pytest.approx((10800 + 64) / 96000)


def test_truncation_ratio():
    assert compression_ratio(HscCompressionBudget(500, 32, 500, 32)) == 1.0
    assert compression_ratio(HscCompressionBudget(500, 32, 50, 32)) == 0.1


def test_index_and_support_bits():
    assert index_bits(1) == 0
    assert index_bits(2) == 1
    assert index_bits(4000) == 12
    assert index_bits(4096) == 12
    assert index_bits(4097) == 13
    assert support_bits(4000, 100) == 1200
    assert support_bits(4000, 400) == 4000
    assert not use_bit_vector(4000, 100)
    assert use_bit_vector(4000, 400)
    assert not use_bit_vector(4000, 0)


def test_total_ratio_weights_by_block_size():
    budgets = [
        HscCompressionBudget(100, 32, 100, 32),
        HscCompressionBudget(300, 32, 0, 32),
    ]
    assert total_ratio(budgets) == pytest.approx(0.25)


def test_budget_errors():
    with pytest.raises(HscUsageError):
        HscCompressionBudget(10, 32, -1, 32)
    with pytest.raises(HscUsageError):
        HscCompressionBudget(10, 32, 11, 32, m=10)
    with pytest.raises(HscUsageError):
        compression_ratio(HscCompressionBudget(0, 32, 0, 32))
    with pytest.raises(HscUsageError):
        total_ratio([])


@pytest.mark.parametrize("target", [0.01, 0.05, 0.1, 0.3, 0.9, 1.0])
@pytest.mark.parametrize("n_mu", [0, 1, 4])
def test_solve_sparsity_is_the_largest_fitting_count(target, n_mu):
    n, m = 300, (1 + n_mu) * 300
    n_d = solve_sparsity(n, target, k=32, k_d=32, m=m, n_mu=n_mu, k_mu=32)
    allowance = target * 3 * n * 32

    def fits(count: int) -> bool:
        budget = HscCompressionBudget(n, 32, count, 32, m, n_mu, 32)
        return budget.encoded_bits() <= allowance + 1e-9

    if n_d > 0:
        assert fits(n_d)
    if n_d < n:
        assert not fits(n_d + 1)


def test_solve_sparsity_truncation():
    assert solve_sparsity(300, 1.0, k=32, k_d=32, m=None) == 300
    assert solve_sparsity(300, 0.1, k=32, k_d=32, m=None) == 30
    assert solve_sparsity(300, 0.1, k=32, k_d=12, m=None) == 80
    assert solve_sparsity(10, 0.01, k=32, k_d=32, m=None, n_mu=1) == 0


def main():
    test_sparse_ratio()
    test_sparse_ratio_with_mu()
    test_truncation_ratio()
    test_index_and_support_bits()


if __name__ == "__main__":
    main()
