import itertools
import logging

import numpy as np
import pytest
from common import add_hsc_to_sys_path

add_hsc_to_sys_path()

from hsc.error import HscUsageError
from hsc.graph.hsc_graph import build_adjacency, combinatorial_laplacian
from hsc.meshio.hsc_synthetic import grid_patch
from hsc.sparse.hsc_dictionary import build_dictionary
from hsc.sparse.hsc_somp import HscSparseCode, reconstruct, somp
from hsc.spectral.hsc_spectral import HscSpectralBasis, eigendecompose_symmetric


def as_basis(vectors: np.ndarray) -> HscSpectralBasis:
    return HscSpectralBasis(vectors, np.zeros(vectors.shape[1]))


def grid_basis() -> HscSpectralBasis:
    mesh = grid_patch(6, 5)
    laplacian = combinatorial_laplacian(build_adjacency(mesh))
    return eigendecompose_symmetric(laplacian)


def random_dictionary(rng: np.random.Generator, n: int, m: int):
    return build_dictionary(
        [as_basis(rng.normal(size=(n, m // 2))) for _ in range(2)]
    )


def subset_residual(atoms: np.ndarray, subset, signals: np.ndarray) -> float:
    selected = atoms[:, list(subset)]
    solution, *_ = np.linalg.lstsq(selected, signals, rcond=None)
    return float(np.linalg.norm(signals - selected @ solution))


################################################################################
### DICTIONARY
################################################################################


def test_one_basis_dictionary():
    basis = grid_basis()
    dictionary = build_dictionary([basis])
    assert dictionary.m == dictionary.n == 30
    assert np.allclose(dictionary.atoms, basis.vectors)


def test_two_basis_dictionary():
    rng = np.random.default_rng(0)
    bases = [
        as_basis(np.linalg.qr(rng.normal(size=(100, 100)))[0]) for _ in range(2)
    ]
    dictionary = build_dictionary(bases)
    assert dictionary.m == 200
    for j in (0, 99, 100, 157, 199):
        assert dictionary.provenance[j].tolist() == [j // 100, j % 100]
    assert np.allclose(np.linalg.norm(dictionary.atoms, axis=0), 1.0)


def test_dictionary_errors():
    with pytest.raises(HscUsageError):
        build_dictionary([])
    with pytest.raises(HscUsageError):
        build_dictionary([as_basis(np.eye(3)), as_basis(np.eye(4))])


################################################################################
### S-OMP
################################################################################


def test_complete_orthobasis_is_exact():
    basis = grid_basis()
    dictionary = build_dictionary([basis])
    signals = np.random.default_rng(1).normal(size=(30, 3))
    code = somp(signals, dictionary, 30)
    assert code.residual <= 1e-9 * np.linalg.norm(signals)
    assert np.allclose(reconstruct(dictionary, code), signals, atol=1e-9)


def test_one_atom_signal():
    basis = grid_basis()
    dictionary = build_dictionary([basis])
    signals = np.zeros((30, 3))
    signals[:, 0] = 5.0 * dictionary.atoms[:, 7]
    code = somp(signals, dictionary, 1)
    assert code.support.tolist() == [7]
    assert np.allclose(code.coefficients, [[5.0, 0.0, 0.0]])


def test_residual_history_is_non_increasing():
    rng = np.random.default_rng(2)
    dictionary = random_dictionary(rng, 30, 60)
    signals = rng.normal(size=(30, 3))
    code = somp(signals, dictionary, 10)
    history = np.array(code.residual_history)
    assert len(history) == 11
    assert history[0] == pytest.approx(np.linalg.norm(signals))
    assert np.all(np.diff(history) <= 1e-12)


def test_refit_is_least_squares_on_support():
    rng = np.random.default_rng(3)
    dictionary = random_dictionary(rng, 30, 60)
    signals = rng.normal(size=(30, 3))
    code = somp(signals, dictionary, 6)
    assert len(set(code.support.tolist())) == 6
    # The residual is orthogonal to every selected atom.
    residual = signals - reconstruct(dictionary, code)
    assert np.abs(dictionary.atoms[:, code.support].T @ residual).max() <= 1e-9
    assert code.residual == pytest.approx(
        subset_residual(dictionary.atoms, code.support, signals)
    )
    # Every prefix of the greedy support is what the residual history saw.
    for i in range(1, code.k + 1):
        assert code.residual_history[i] == pytest.approx(
            subset_residual(dictionary.atoms, code.support[:i], signals),
            abs=1e-9,
        )


def test_sorted_by_atom_keeps_reconstruction():
    rng = np.random.default_rng(4)
    dictionary = random_dictionary(rng, 20, 40)
    signals = rng.normal(size=(20, 3))
    code = somp(signals, dictionary, 5)
    ordered = code.sorted_by_atom()
    assert np.all(np.diff(ordered.support) > 0)
    assert np.allclose(
        reconstruct(dictionary, ordered), reconstruct(dictionary, code)
    )


def test_collinear_atom_is_skipped_with_warning(caplog):
    e = np.eye(3)
    dictionary = build_dictionary([as_basis(np.stack([e[0], e[0], e[1]], 1))])
    signals = np.zeros((3, 3))
    signals[0, 0] = 2.0
    with caplog.at_level(logging.WARNING, logger="hsc.sparse.hsc_somp"):
        code = somp(signals, dictionary, 2)
    assert code.support.tolist() == [0, 2]
    assert code.skipped == (1,)
    assert "collinear" in caplog.text


def test_somp_errors():
    dictionary = build_dictionary([grid_basis()])
    with pytest.raises(HscUsageError):
        somp(np.zeros((29, 3)), dictionary, 1)
    with pytest.raises(HscUsageError):
        somp(np.zeros((30, 3)), dictionary, 31)


def test_reconstruct_examples():
    dictionary = build_dictionary([grid_basis()])
    empty = HscSparseCode(np.zeros(0, dtype=np.int64), np.zeros((0, 3)))
    assert np.array_equal(reconstruct(dictionary, empty), np.zeros((30, 3)))
    single = HscSparseCode(np.array([4]), np.array([[1.0, 2.0, 3.0]]))
    atom = dictionary.atoms[:, 4]
    assert np.allclose(
        reconstruct(dictionary, single), np.stack([atom, 2 * atom, 3 * atom], 1)
    )
    with pytest.raises(HscUsageError):
        reconstruct(dictionary, HscSparseCode(np.array([30]), np.ones((1, 3))))


def planted_trials(trials: int, n: int, m: int, seed: int) -> float:
    """Fraction of planted 3-sparse problems where S-OMP reaches the best
    residual over all 3-atom supports."""
    rng = np.random.default_rng(seed)
    hits = 0
    for _ in range(trials):
        dictionary = random_dictionary(rng, n, m)
        planted = rng.choice(m, size=3, replace=False)
        signals = dictionary.atoms[:, planted] @ rng.normal(size=(3, 3))
        signals += 0.01 * rng.normal(size=signals.shape)
        code = somp(signals, dictionary, 3)
        best = min(
            subset_residual(dictionary.atoms, subset, signals)
            for subset in itertools.combinations(range(m), 3)
        )
        assert code.residual >= best - 1e-9
        hits += code.residual <= best + 1e-9
    return hits / trials


def test_matches_exhaustive_search_on_planted_supports():
    assert planted_trials(5, 16, 24, seed=5) >= 0.4


@pytest.mark.slow
def test_matches_exhaustive_search_full():
    assert planted_trials(200, 30, 60, seed=6) >= 0.7


def main():
    test_one_basis_dictionary()
    test_complete_orthobasis_is_exact()
    test_one_atom_signal()
    test_refit_is_least_squares_on_support()
    test_reconstruct_examples()


if __name__ == "__main__":
    main()
