import numpy as np
import pytest
from scipy.linalg import circulant

from src.errors import InvalidInput, NumericalError
from src.graph.builder import build_interaction_graph
from src.graph.filters import normalized_filters
from src.spectral.benchmark import (
    DEFAULT_SIZES,
    check_equivalence,
    circulant_problem,
    loglog_slope,
    run_bench,
    sampled_residual,
)
from src.spectral.dft import (
    FrequencyFeatures,
    conjugate_residue,
    dft_backward,
    dft_nodes,
    idft_backward,
    idft_nodes,
)
from src.spectral.network import Activation, FgnStack, fgn_backward, fgn_forward, fgn_forward_band
from src.spectral.operator import (
    FourierGraphOperator,
    bin_slots,
    build_fgo,
    filter_response,
    fgo_apply,
    frequency_bins,
    theta_grad,
    weight_grad,
)
from src.spectral.spatial import spatial_backward, spatial_forward


def _operator(S, b=None):
    d = S.shape[1]
    return FourierGraphOperator(band="low", mode="free", S=S.astype(np.complex128),
                                b=np.zeros(d, dtype=np.complex128) if b is None else b)


def test_dft_of_constant_and_delta():
    F = dft_nodes(np.ones((4, 1)))
    np.testing.assert_allclose(F.data[:, 0], [4.0, 0.0, 0.0, 0.0], atol=1e-12)
    delta = np.zeros((5, 2))
    delta[0] = 1.0
    np.testing.assert_allclose(dft_nodes(delta).data, np.ones((5, 2)), atol=1e-12)


def test_dft_rejects_empty():
    with pytest.raises(InvalidInput):
        dft_nodes(np.zeros((0, 3)))
    with pytest.raises(InvalidInput):
        dft_nodes(np.zeros(3))


def test_parseval_and_round_trip(rng):
    X = rng.standard_normal((7, 3))
    F = dft_nodes(X)
    assert np.sum(np.abs(F.data) ** 2) == pytest.approx(7 * np.sum(X ** 2))
    assert conjugate_residue(F) < 1e-12
    np.testing.assert_allclose(idft_nodes(F), X, atol=1e-10)


def test_strict_inverse_rejects_asymmetric_spectrum():
    Y = FrequencyFeatures(np.array([[0.0], [1j]]))
    with pytest.raises(NumericalError):
        idft_nodes(Y)
    np.testing.assert_allclose(idft_nodes(Y, project_real=True), np.zeros((2, 1)))


def test_dft_gradients(rng, gradcheck):
    X = rng.standard_normal((6, 2))
    G = rng.standard_normal((6, 2)) + 1j * rng.standard_normal((6, 2))

    def loss():
        Y = dft_nodes(X).data
        return float(np.sum(Y.real * G.real + Y.imag * G.imag))

    gradcheck(loss, {"X": X}, {"X": dft_backward(G)})

    Y = rng.standard_normal((6, 2)) + 1j * rng.standard_normal((6, 2))
    R = rng.standard_normal((6, 2))

    def inverse_loss():
        return float(np.sum(np.fft.ifft(Y, axis=0).real * R))

    gradcheck(inverse_loss, {"Y": Y}, {"Y": idft_backward(R)})


def test_two_node_filter_responses():
    W = np.eye(2)
    low = build_fgo(np.array([[1.0, 1.0], [1.0, 1.0]]), W)
    high = build_fgo(np.array([[1.0, -1.0], [-1.0, 1.0]]), W, band="high")
    np.testing.assert_allclose(low.S[:, 0, 0], [2.0, 0.0], atol=1e-12)
    np.testing.assert_allclose(high.S[:, 0, 0], [0.0, 2.0], atol=1e-12)
    assert high.band == "high"


def test_identity_filter_gives_identity_operator():
    fgo = build_fgo(np.eye(5), np.eye(3))
    np.testing.assert_allclose(fgo.S, np.broadcast_to(np.eye(3), (5, 3, 3)), atol=1e-12)


def test_frequency_bins_are_folded():
    bins = frequency_bins(8, 3)
    np.testing.assert_array_equal(bins, [0, 0, 1, 2, 2, 2, 1, 0])
    for f in range(1, 8):
        assert bins[f] == bins[8 - f]


def test_modality_bins_separate_shared_and_contrasting_frequencies():
    bins = frequency_bins(6, 2, groups=3)
    np.testing.assert_array_equal(bins, [0, 2, 3, 1, 3, 2])
    for f in range(1, 6):
        assert bins[f] == bins[6 - f]
    assert bin_slots(2, 3) == 4
    shared = bins[np.arange(6) % 3 == 0]
    contrasting = bins[np.arange(6) % 3 != 0]
    assert set(shared).isdisjoint(contrasting)


def test_modality_bins_need_equal_blocks():
    with pytest.raises(InvalidInput):
        frequency_bins(7, 2, groups=3)
    with pytest.raises(InvalidInput):
        build_fgo(np.eye(6), np.eye(2), mode="free", theta=np.ones((3, 2, 2), dtype=complex), groups=3)


def test_free_mode_starts_at_circulant(rng):
    L = normalized_filters(build_interaction_graph(rng.standard_normal((6, 3)), 1, 0.5).A).low
    W = rng.standard_normal((3, 3))
    np.testing.assert_allclose(build_fgo(L, W, mode="free", n_bins=4).S, build_fgo(L, W).S)


@pytest.mark.parametrize("n", [2, 5, 8, 13])
def test_convolution_theorem_on_circulant_filters(rng, n):
    L = circulant(rng.standard_normal(n))
    X = rng.standard_normal((n, 4))
    W = rng.standard_normal((4, 4))
    fgo = build_fgo(L, W)
    spectral = idft_nodes(fgo_apply(dft_nodes(X), fgo.S))
    np.testing.assert_allclose(spectral, L @ X @ W, atol=1e-8)


def test_fgo_apply_shape_mismatch(rng):
    F = dft_nodes(rng.standard_normal((4, 3)))
    with pytest.raises(InvalidInput):
        fgo_apply(F, np.zeros((4, 2, 2), dtype=np.complex128))
    with pytest.raises(InvalidInput):
        fgo_apply(F, np.zeros((5, 3, 3), dtype=np.complex128))


def test_single_identity_layer_returns_input_spectrum(rng):
    X = rng.standard_normal((5, 3))
    stack = FgnStack(layers=[_operator(np.broadcast_to(np.eye(3), (5, 3, 3)).copy())],
                     activation=Activation("identity"))
    Y, _ = fgn_forward_band(dft_nodes(X), stack)
    np.testing.assert_allclose(Y.data, dft_nodes(X).data)
    assert stack.depth == 0


def test_two_layer_hand_computation(rng):
    F = dft_nodes(rng.standard_normal((4, 2)))
    S0 = rng.standard_normal((4, 2, 2)) + 1j * rng.standard_normal((4, 2, 2))
    S1 = rng.standard_normal((4, 2, 2)) + 1j * rng.standard_normal((4, 2, 2))
    b0 = np.array([0.5 + 1j, -1.0])
    b1 = np.array([0.0, 2.0 - 1j])
    stack = FgnStack(layers=[_operator(S0, b0), _operator(S1, b1)], activation=Activation("identity"))
    Y, _ = fgn_forward_band(F, stack)
    H0 = np.einsum("fd,fde->fe", F.data, S0)
    H1 = np.einsum("fd,fde->fe", H0, S1)
    np.testing.assert_allclose(Y.data, H0 + b0 + H1 + b1)


def test_zero_input_gives_activation_of_bias():
    stack = FgnStack(layers=[_operator(np.ones((3, 2, 2)), np.array([1.0 - 2j, 0.0])),
                             _operator(np.ones((3, 2, 2)))])
    Y, _ = fgn_forward_band(dft_nodes(np.zeros((3, 2))), stack)
    expected = np.array([1.0 - 0.02j, 0.0])
    np.testing.assert_allclose(Y.data, np.broadcast_to(expected, (3, 2)))


def test_fgn_forward_keeps_real_signals_real(rng):
    graph = build_interaction_graph(rng.standard_normal((9, 4)), 1, 0.5)
    pair = normalized_filters(graph.A)
    X = rng.standard_normal((9, 4))
    W = rng.standard_normal((4, 4))
    stack_low = FgnStack(layers=[build_fgo(pair.low, W), build_fgo(pair.low, W)])
    stack_high = FgnStack(layers=[build_fgo(pair.high, W, band="high")])
    Y_low, Y_high = fgn_forward(X, stack_low, stack_high)
    assert Y_low.data.shape == Y_high.data.shape == (9, 4)
    # separate real/imaginary activation breaks conjugate symmetry
    assert idft_nodes(Y_low, project_real=True).shape == (9, 4)
    assert np.all(np.isfinite(Y_high.data))


def test_non_finite_spectrum_raises():
    F = FrequencyFeatures(np.array([[np.inf + 0j]]))
    stack = FgnStack(layers=[_operator(np.ones((1, 1, 1)))])
    with pytest.raises(NumericalError):
        fgn_forward_band(F, stack)


def _band_loss_setup(rng, n=6, d=3):
    L = normalized_filters(build_interaction_graph(rng.standard_normal((n, 2)), 1, 0.5).A).low
    X = rng.standard_normal((n, d))
    G = rng.standard_normal((n, d)) + 1j * rng.standard_normal((n, d))
    return L, X, G


def _spectral_loss(Y, G):
    return float(np.sum(Y.real * G.real + Y.imag * G.imag))


def test_fgn_band_gradients(rng, gradcheck):
    n, d = 6, 3
    F = dft_nodes(rng.standard_normal((n, d))).data.copy()
    layers = [
        _operator(0.3 * (rng.standard_normal((n, d, d)) + 1j * rng.standard_normal((n, d, d))),
                  0.1 * (rng.standard_normal(d) + 1j * rng.standard_normal(d)))
        for _ in range(3)
    ]
    stack = FgnStack(layers=layers, activation=Activation("tanh"))
    G = rng.standard_normal((n, d)) + 1j * rng.standard_normal((n, d))

    def loss():
        Y, _ = fgn_forward_band(FrequencyFeatures(F), stack)
        return _spectral_loss(Y.data, G)

    _, cache = fgn_forward_band(FrequencyFeatures(F), stack)
    grad_F, grad_S, grad_b = fgn_backward(G, cache, stack)
    tensors = {"F": F}
    grads = {"F": grad_F}
    for m, layer in enumerate(layers):
        tensors[f"S{m}"], grads[f"S{m}"] = layer.S, grad_S[m]
        tensors[f"b{m}"], grads[f"b{m}"] = layer.b, grad_b[m]
    gradcheck(loss, tensors, grads)


def test_circulant_weight_gradient(rng, gradcheck):
    L, X, G = _band_loss_setup(rng)
    W = rng.standard_normal((3, 3))
    activation = Activation("tanh")

    def loss():
        Y, _ = fgn_forward_band(dft_nodes(X), FgnStack(layers=[build_fgo(L, W)], activation=activation))
        return _spectral_loss(Y.data, G)

    fgo = build_fgo(L, W)
    stack = FgnStack(layers=[fgo], activation=activation)
    _, cache = fgn_forward_band(dft_nodes(X), stack)
    _, grad_S, _ = fgn_backward(G, cache, stack)
    lam = filter_response(L)
    gradcheck(loss, {"W": W}, {"W": weight_grad(grad_S[0], lam)})


@pytest.mark.parametrize("groups", [1, 3])
def test_free_mode_theta_gradient(rng, gradcheck, groups):
    L, X, G = _band_loss_setup(rng)
    slots = bin_slots(3, groups)
    theta = rng.standard_normal((slots, 3, 3)) + 1j * rng.standard_normal((slots, 3, 3))
    W = np.eye(3)
    activation = Activation("tanh")

    def build():
        return FgnStack(layers=[build_fgo(L, W, mode="free", theta=theta, groups=groups)],
                        activation=activation)

    def loss():
        Y, _ = fgn_forward_band(dft_nodes(X), build())
        return _spectral_loss(Y.data, G)

    stack = build()
    _, cache = fgn_forward_band(dft_nodes(X), stack)
    _, grad_S, _ = fgn_backward(G, cache, stack)
    lam = filter_response(L)
    gradcheck(loss, {"theta": theta}, {"theta": theta_grad(grad_S[0], lam, 3, groups)})


def test_spatial_gradients(rng, gradcheck):
    L, X, _ = _band_loss_setup(rng)
    weights = [0.5 * rng.standard_normal((3, 3)) for _ in range(2)]
    activation = Activation("tanh")
    R = rng.standard_normal((6, 3))

    def loss():
        out, _ = spatial_forward(X, L, weights, activation)
        return float(np.sum(out * R))

    _, cache = spatial_forward(X, L, weights, activation)
    grad_X, grad_W = spatial_backward(R, cache, L, weights, activation)
    gradcheck(loss, {"X": X, "W0": weights[0], "W1": weights[1]},
              {"X": grad_X, "W0": grad_W[0], "W1": grad_W[1]})


def test_spatial_rejects_mismatched_filter(rng):
    with pytest.raises(InvalidInput):
        spatial_forward(rng.standard_normal((4, 2)), np.eye(3), [np.eye(2)], Activation())


def test_bench_equivalence_and_report(rng):
    assert check_equivalence(8, 3, rng) <= 1e-8
    report = run_bench(sizes=(16, 8), d=2, repeats=1, seed=1)
    assert [row.n for row in report.rows] == [8, 16]
    assert all(row.residual <= 1e-8 for row in report.rows)
    assert len(report.as_table()) == 2
    assert all(row.check == "dense" for row in report.rows)


def test_bench_checks_sampled_rows_above_dense_cap(monkeypatch):
    messages = []
    monkeypatch.setattr("src.spectral.benchmark.LOG.info", messages.append)
    report = run_bench(sizes=(8, 32, 64), d=2, repeats=1, seed=2, max_dense_n=8)
    assert [row.check for row in report.rows] == ["dense", "sampled", "sampled"]
    assert all(row.residual <= 1e-8 for row in report.rows)
    assert np.isnan(report.rows[2].spatial_seconds)
    assert np.isnan(report.spatial_slope)
    assert not report.frequency_scales_better
    assert sum("spatial path not timed" in m for m in messages) == 2


def test_sampled_residual_matches_dense_rows(rng):
    column, X, W = circulant_problem(16, 3, rng)
    output = circulant(column) @ X @ W
    assert sampled_residual(column, X, W, output, np.array([0, 5, 15])) <= 1e-12
    output[5, 0] += 1.0
    assert sampled_residual(column, X, W, output, np.array([0, 5])) == pytest.approx(1.0)


@pytest.mark.slow
def test_frequency_path_scales_better_than_dense():
    report = run_bench(d=8, repeats=3, seed=0)
    assert [row.n for row in report.rows] == list(DEFAULT_SIZES)
    assert DEFAULT_SIZES[-1] == 16384
    assert report.spectral_slope < report.spatial_slope
    assert report.frequency_scales_better


def test_loglog_slope():
    assert loglog_slope([1, 10, 100], [1.0, 100.0, 1e4]) == pytest.approx(2.0)
    assert np.isnan(loglog_slope([8], [1.0]))


def test_random_circulant_batch_agrees_with_dense_product():
    rng = np.random.default_rng(50)
    worst = 0.0
    for trial in range(50):
        n = (4, 8, 16, 64)[trial % 4]
        d = (1, 4, 8)[trial % 3]
        L = circulant(rng.standard_normal(n))
        X = rng.standard_normal((n, d))
        W = rng.standard_normal((d, d))
        spectral = idft_nodes(fgo_apply(dft_nodes(X), build_fgo(L, W).S))
        worst = max(worst, float(np.max(np.abs(spectral - L @ X @ W))))
    assert worst <= 1e-8
