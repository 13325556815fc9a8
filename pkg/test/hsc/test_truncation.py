import numpy as np
import pytest
from common import add_hsc_to_sys_path

add_hsc_to_sys_path()

from hsc.codec.hsc_codec import decode, restore_original_order
from hsc.codec.hsc_config import (
    HscEncoderConfig,
    HscPotentialPlacement,
    truncation_mu_grid,
)
from hsc.codec.hsc_container import deserialize, serialize
from hsc.codec.hsc_truncation import (
    encode_truncation,
    hamiltonian_truncation,
    truncation_code,
    truncation_error_permutation,
    truncation_sparsity,
)
from hsc.error import HscUsageError
from hsc.graph.hsc_graph import combinatorial_laplacian, cycle_graph
from hsc.meshio.hsc_synthetic import bumpy_sphere, planar_curve
from hsc.spectral.hsc_spectral import eigendecompose_symmetric


def curve_operators(n: int):
    laplacian = combinatorial_laplacian(cycle_graph(n))
    return planar_curve(n), laplacian, eigendecompose_symmetric(laplacian)


def test_complete_truncation_is_exact():
    curve, _, basis = curve_operators(60)
    code = truncation_code(curve, basis, 60)
    reconstruction = basis.vectors @ code.coefficients
    assert np.allclose(reconstruction, curve, atol=1e-9)
    assert code.support.tolist() == list(range(60))


def test_constant_function_needs_one_coefficient():
    _, _, basis = curve_operators(30)
    constant = np.full((30, 1), 2.5)
    code = truncation_code(constant, basis, 1)
    assert np.allclose(basis.vectors[:, :1] @ code.coefficients, constant)
    assert code.residual <= 1e-9


def test_residual_decreases_with_more_coefficients():
    curve, _, basis = curve_operators(80)
    residuals = [
        truncation_code(curve, basis, n_d).residual for n_d in range(81)
    ]
    assert np.all(np.diff(residuals) <= 1e-12)
    assert residuals[0] == pytest.approx(np.linalg.norm(curve))


def test_truncation_code_rejects_bad_counts():
    curve, _, basis = curve_operators(10)
    with pytest.raises(HscUsageError):
        truncation_code(curve, basis, 11)
    with pytest.raises(HscUsageError):
        truncation_code(curve, basis, -1)


def test_error_permutation_is_descending():
    curve, _, basis = curve_operators(100)
    permutation = truncation_error_permutation(curve, basis, 12)
    reconstruction = basis.vectors[:, :12] @ (basis.vectors[:, :12].T @ curve)
    errors = np.linalg.norm(curve - reconstruction, axis=1)
    assert np.all(np.diff(errors[permutation]) <= 1e-15)


def test_hamiltonian_truncation_never_loses():
    curve, laplacian, basis = curve_operators(120)
    grid = truncation_mu_grid(basis.mean_eigenvalue())
    for n_d in (8, 16, 24, 32):
        plain = truncation_code(curve, basis, n_d)
        choice = hamiltonian_truncation(curve, laplacian, basis, n_d, grid)
        assert choice.code.residual <= plain.residual
        assert choice.code.k == n_d
        if choice.mu == 0.0:
            assert choice.code.residual == plain.residual
        else:
            assert choice.mu in grid


def test_hamiltonian_truncation_tries_both_orientations():
    curve, laplacian, basis = curve_operators(100)
    descending = truncation_error_permutation(curve, basis, 11)
    choice = hamiltonian_truncation(
        curve, laplacian, basis, 11, truncation_mu_grid(2.0)
    )
    orientations = (descending.tolist(), descending[::-1].tolist())
    assert choice.permutation.tolist() in orientations


def test_hamiltonian_truncation_beats_laplacian_truncation():
    # Odd counts keep whole cosine/sine pairs of the cycle basis.
    n = 160
    curve, laplacian, basis = curve_operators(n)
    grid = truncation_mu_grid(basis.mean_eigenvalue())
    counts = range(n // 20 + 1, n // 4, 4)
    wins = sum(
        hamiltonian_truncation(curve, laplacian, basis, n_d, grid).code.residual
        < truncation_code(curve, basis, n_d).residual
        for n_d in counts
    )
    assert wins >= 0.8 * len(counts)


@pytest.mark.slow
def test_hamiltonian_truncation_wins_on_most_counts():
    n = 400
    curve, laplacian, basis = curve_operators(n)
    grid = truncation_mu_grid(basis.mean_eigenvalue())
    counts = range(n // 20, n // 4 + 1, 10)
    wins = sum(
        hamiltonian_truncation(curve, laplacian, basis, n_d, grid).code.residual
        < truncation_code(curve, basis, n_d).residual
        for n_d in counts
    )
    assert wins >= 0.8 * len(counts)


def test_truncation_sparsity():
    config = HscEncoderConfig(target_ratio=0.1)
    assert truncation_sparsity(300, config, 0) == 30
    # One mu costs 32 bits, a coefficient triple 96.
    assert truncation_sparsity(300, config, 1) == 29
    with pytest.raises(HscUsageError, match="larger ratio"):
        truncation_sparsity(5, HscEncoderConfig(target_ratio=0.05), 0)


@pytest.mark.parametrize("use_hamiltonian", [False, True])
def test_truncation_codec(use_hamiltonian):
    mesh = bumpy_sphere(2)
    config = HscEncoderConfig(target_ratio=0.25, block_size=40)
    compressed = encode_truncation(mesh, config, use_hamiltonian)
    assert compressed.truncated
    assert compressed.compression_ratio() <= 0.25 + 1e-12
    for block in compressed.blocks:
        assert block.n_mu <= (1 if use_hamiltonian else 0)
        assert (block.permutation is not None) == (block.n_mu == 1)
    decoded = decode(deserialize(serialize(compressed)))
    assert decoded.n_vertices == mesh.n_vertices


def test_in_place_hamiltonian_truncation_round_trip():
    mesh = bumpy_sphere(2)
    config = HscEncoderConfig(
        target_ratio=0.25,
        block_size=40,
        potential_placement=HscPotentialPlacement.IN_PLACE,
    )
    compressed = encode_truncation(mesh, config, use_hamiltonian=True)
    assert compressed.vertex_order is not None
    stream = deserialize(serialize(compressed))
    assert all(block.permutation is None for block in stream.blocks)
    assert all(block.n_mu <= 1 for block in stream.blocks)
    restored = restore_original_order(decode(stream), compressed.vertex_order)
    assert np.array_equal(restored.faces, mesh.faces)


def test_hamiltonian_codec_not_worse_than_laplacian_codec():
    mesh = bumpy_sphere(2)
    config = HscEncoderConfig(target_ratio=0.25, block_size=40)
    laplacian = encode_truncation(mesh, config, use_hamiltonian=False)
    hamiltonian = encode_truncation(mesh, config, use_hamiltonian=True)
    for a, b in zip(laplacian.blocks, hamiltonian.blocks):
        # The mu record costs one coefficient triple at most.
        assert b.k in (a.k, a.k - 1)


def test_complete_truncation_round_trip():
    mesh = bumpy_sphere(2)
    config = HscEncoderConfig(target_ratio=1.0, block_size=50)
    compressed = encode_truncation(
        mesh, config, use_hamiltonian=False, complete=True
    )
    assert compressed.compression_ratio() == 1.0
    decoded = decode(deserialize(serialize(compressed)))
    assert np.abs(decoded.vertices - mesh.vertices).max() <= 1e-6


def main():
    test_complete_truncation_is_exact()
    test_constant_function_needs_one_coefficient()
    test_hamiltonian_truncation_never_loses()
    test_hamiltonian_truncation_beats_laplacian_truncation()
    test_truncation_codec(True)


if __name__ == "__main__":
    main()
