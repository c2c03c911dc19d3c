from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np

from src.config.run_config import RunConfig
from src.corpus.corpus import Conversation
from src.encoding.affine import encode_affine, encode_affine_backward, fuse_speaker
from src.encoding.init import encoder_params_from, speaker_table_from
from src.encoding.recurrent import GruCache, encode_text_backward, encode_text_with_cache
from src.encoding.speaker import embed_speakers, embed_speakers_backward
from src.errors import InvalidInput, NumericalError
from src.graph.builder import InteractionGraph, build_interaction_graph, node_features
from src.graph.filters import FilterPair, normalized_filters
from src.objective.classification import LossReport, cross_entropy, cross_entropy_grad, make_report
from src.objective.contrastive import ContrastiveBatch, contrastive_loss_and_grads
from src.pipeline.params import ModelParams, fgn_key
from src.spectral.dft import dft_backward, dft_nodes, idft_backward, idft_nodes
from src.spectral.network import Activation, FgnCache, FgnStack, fgn_backward, fgn_forward_band
from src.spectral.operator import build_fgo, filter_response, theta_grad, weight_grad
from src.spectral.spatial import SpatialCache, spatial_backward, spatial_forward


@dataclass
class BandState:
    stack: FgnStack
    cache: FgnCache
    lam: np.ndarray


@dataclass
class ForwardResult:
    """
    Everything one forward pass produced, kept for the backward pass.

    Attributes:
        logits (np.ndarray): Class scores [N × C].
        batch (Optional[ContrastiveBatch]): Band embeddings when the contrastive term is active.
        nodes (np.ndarray): Final node embeddings [3N × width].
        graph (InteractionGraph): The graph used.
        filters (FilterPair): Its low/high-pass filters.
    """
    conv: Conversation
    logits: np.ndarray
    batch: Optional[ContrastiveBatch]
    nodes: np.ndarray
    graph: InteractionGraph
    filters: FilterPair
    U: np.ndarray
    hidden: np.ndarray
    text_cache: Tuple[GruCache, GruCache]
    bands: Dict[str, BandState] = field(default_factory=dict)
    band_embeddings: Dict[str, np.ndarray] = field(default_factory=dict)
    spatial_cache: Optional[SpatialCache] = None


def ablate(config: RunConfig, *flags: str) -> RunConfig:
    """
    Returns `config` with additional components removed.

    Flags: "se" (speaker embedding), "cl" (contrastive loss), "fgn" (Fourier
    stacks replaced by the spatial baseline), "high" / "low" (one band removed).
    """
    return config.with_overrides(ablate=sorted(set(config.ablate) | set(flags)))


def _activation(config: RunConfig) -> Activation:
    return Activation(config.activation, config.leaky_slope)


def _band_stack(params: ModelParams, band: str, L: np.ndarray) -> FgnStack:
    cfg = params.config
    layers = []
    for m in range(cfg.depth + 1):
        bias = params[fgn_key(band, m, "b_re")] + 1j * params[fgn_key(band, m, "b_im")]
        if cfg.mode == "circulant":
            layers.append(build_fgo(L, params[fgn_key(band, m, "W")], "circulant", band, bias=bias))
        else:
            theta_re = params[fgn_key(band, m, "theta_re")]
            theta = theta_re + 1j * params[fgn_key(band, m, "theta_im")]
            layers.append(build_fgo(L, theta_re[0], "free", band, theta=theta, bias=bias,
                                    groups=cfg.bin_groups))
    return FgnStack(layers=layers, activation=_activation(cfg))


def _spatial_weights(params: ModelParams):
    return [params[f"spatial.{layer}.W"] for layer in range(params.config.spatial_layers)]


def _check_conversation(conv: Conversation, params: ModelParams) -> None:
    got = (conv.feat_t.shape[1], conv.feat_a.shape[1], conv.feat_v.shape[1])
    if got != tuple(params.dims):
        raise InvalidInput(f"conversation dims {got} do not match model dims {tuple(params.dims)}")
    if conv.n_utt < 1:
        raise InvalidInput("conversation has no utterances")


def forward(conv: Conversation, params: ModelParams, graph: Optional[InteractionGraph] = None) -> ForwardResult:
    """
    Full model on one conversation:

    encode -> add speaker embedding -> interaction graph -> filters ->
    dual-band Fourier stacks -> inverse DFT -> per-utterance concatenation
    of the selected modality nodes -> ReLU -> linear head.

    Args:
        conv (Conversation): The conversation.
        params (ModelParams): Model tensors and config.
        graph (Optional[InteractionGraph]): A precomputed graph; built from
            the encoded features when None. Edge weights carry no gradient.

    Returns:
        ForwardResult: Logits, contrastive batch and the backward state.
    """
    cfg = params.config
    _check_conversation(conv, params)
    n = conv.n_utt
    enc = encoder_params_from(params.tensors)

    u_t, text_cache = encode_text_with_cache(conv.feat_t, enc)
    u_a = encode_affine(conv.feat_a, enc.W_a, enc.b_a)
    u_v = encode_affine(conv.feat_v, enc.W_v, enc.b_v)
    if cfg.use_speaker:
        spk = embed_speakers(conv.speakers, speaker_table_from(params.tensors))
    else:
        spk = np.zeros_like(u_t)
    X = node_features(fuse_speaker(u_t, spk), fuse_speaker(u_a, spk), fuse_speaker(u_v, spk))

    if graph is None:
        graph = build_interaction_graph(X, cfg.window_k, cfg.phi)
    elif graph.n_utt != n:
        raise InvalidInput(f"graph has {graph.n_utt} utterances, conversation has {n}")
    filters = normalized_filters(graph.A)

    bands: Dict[str, BandState] = {}
    embeddings: Dict[str, np.ndarray] = {}
    spatial_cache = None
    batch = None
    if cfg.use_fourier:
        F = dft_nodes(X)
        for band in cfg.bands:
            L = filters.band(band)
            stack = _band_stack(params, band, L)
            Y, cache = fgn_forward_band(F, stack)
            bands[band] = BandState(stack=stack, cache=cache, lam=filter_response(L))
            embeddings[band] = idft_nodes(Y, project_real=True)
        nodes = np.concatenate([embeddings[b] for b in cfg.bands], axis=1)
        if cfg.use_contrastive:
            batch = ContrastiveBatch(low=embeddings["low"], high=embeddings["high"],
                                     tau=cfg.tau, normalize=cfg.normalize_embeddings)
    else:
        nodes, spatial_cache = spatial_forward(X, filters.low, _spatial_weights(params), _activation(cfg))

    U = np.concatenate([nodes[m * n:(m + 1) * n] for m in cfg.modality_indices], axis=1)
    hidden = np.maximum(U, 0.0)
    logits = hidden @ params["head.W"].T + params["head.b"]
    if not np.all(np.isfinite(logits)):
        raise NumericalError(f"non-finite logits for conversation '{conv.id}'")

    return ForwardResult(conv=conv, logits=logits, batch=batch, nodes=nodes, graph=graph, filters=filters,
                         U=U, hidden=hidden, text_cache=text_cache, bands=bands,
                         band_embeddings=embeddings, spatial_cache=spatial_cache)


def backward(result: ForwardResult, params: ModelParams, grad_logits: np.ndarray,
             grad_bands: Optional[Dict[str, np.ndarray]] = None) -> Dict[str, np.ndarray]:
    """
    Gradient of every tensor given the gradient of the logits and, when the
    contrastive term is active, extra gradients of the band embeddings.
    """
    cfg = params.config
    conv = result.conv
    n, d, width = conv.n_utt, cfg.d_model, cfg.node_width
    grads = params.zeros_like()

    grads["head.W"] = grad_logits.T @ result.hidden
    grads["head.b"] = grad_logits.sum(axis=0)
    grad_U = (grad_logits @ params["head.W"]) * (result.U > 0)

    grad_nodes = np.zeros((3 * n, width))
    for slot, m in enumerate(cfg.modality_indices):
        grad_nodes[m * n:(m + 1) * n] += grad_U[:, slot * width:(slot + 1) * width]

    if cfg.use_fourier:
        grad_F = np.zeros((3 * n, d), dtype=np.complex128)
        for j, band in enumerate(cfg.bands):
            grad_V = grad_nodes[:, j * d:(j + 1) * d]
            if grad_bands and band in grad_bands:
                grad_V = grad_V + grad_bands[band]
            state = result.bands[band]
            grad_F_band, grad_S, grad_b = fgn_backward(idft_backward(grad_V), state.cache, state.stack)
            grad_F += grad_F_band
            for m in range(cfg.depth + 1):
                if cfg.mode == "circulant":
                    grads[fgn_key(band, m, "W")] = weight_grad(grad_S[m], state.lam)
                else:
                    grad_theta = theta_grad(grad_S[m], state.lam, cfg.n_freq_bins, cfg.bin_groups)
                    grads[fgn_key(band, m, "theta_re")] = grad_theta.real
                    grads[fgn_key(band, m, "theta_im")] = grad_theta.imag
                grads[fgn_key(band, m, "b_re")] = grad_b[m].real
                grads[fgn_key(band, m, "b_im")] = grad_b[m].imag
        grad_X = dft_backward(grad_F)
    else:
        weights = _spatial_weights(params)
        grad_X, grad_W = spatial_backward(grad_nodes, result.spatial_cache, result.filters.low,
                                          weights, _activation(cfg))
        for layer, g in enumerate(grad_W):
            grads[f"spatial.{layer}.W"] = g

    grad_t, grad_a, grad_v = grad_X[:n], grad_X[n:2 * n], grad_X[2 * n:]
    if cfg.use_speaker:
        grads["speaker.W"] = embed_speakers_backward(conv.speakers, grad_t + grad_a + grad_v,
                                                     speaker_table_from(params.tensors))
    _, grads["audio.W"], grads["audio.b"] = encode_affine_backward(conv.feat_a, params["audio.W"], grad_a)
    _, grads["visual.W"], grads["visual.b"] = encode_affine_backward(conv.feat_v, params["visual.W"], grad_v)
    _, grad_fw, grad_bw = encode_text_backward(grad_t, result.text_cache, encoder_params_from(params.tensors))
    for name, g in grad_fw.items():
        grads[f"text.fw.{name}"] = g
    for name, g in grad_bw.items():
        grads[f"text.bw.{name}"] = g
    return grads


def conversation_loss(conv: Conversation, params: ModelParams,
                      graph: Optional[InteractionGraph] = None) -> Tuple[LossReport, ForwardResult]:
    """Loss terms of one conversation without gradients."""
    result = forward(conv, params, graph)
    lam = params.config.effective_lambda
    lf = hf = 0.0
    if result.batch is not None:
        lf, hf, _, _ = contrastive_loss_and_grads(result.batch)
    report = make_report(cross_entropy(result.logits, conv.labels), lf, hf, lam)
    if not np.isfinite(report.total):
        raise NumericalError(f"non-finite loss for conversation '{conv.id}'")
    return report, result


def loss_and_grads(conv: Conversation, params: ModelParams,
                   graph: Optional[InteractionGraph] = None) -> Tuple[LossReport, Dict[str, np.ndarray]]:
    """
    Total loss of one conversation and its gradient w.r.t. every tensor.

    Raises:
        NumericalError: If the loss is not finite.
    """
    result = forward(conv, params, graph)
    lam = params.config.effective_lambda
    lf = hf = 0.0
    grad_bands = None
    if result.batch is not None:
        lf, hf, grad_low, grad_high = contrastive_loss_and_grads(result.batch)
        grad_bands = {"low": lam * grad_low, "high": lam * grad_high}
    report = make_report(cross_entropy(result.logits, conv.labels), lf, hf, lam)
    if not np.isfinite(report.total):
        raise NumericalError(f"non-finite loss for conversation '{conv.id}'")
    grads = backward(result, params, cross_entropy_grad(result.logits, conv.labels), grad_bands)
    return report, grads


def predict(logits: np.ndarray) -> np.ndarray:
    """Row-wise argmax; ties resolve to the lowest class index."""
    return np.argmax(np.asarray(logits), axis=1)
