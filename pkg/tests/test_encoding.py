import numpy as np
import pytest

from src.encoding.affine import encode_affine, encode_affine_backward, fuse_speaker
from src.encoding.init import encoder_params_from, init_encoder_tensors
from src.encoding.recurrent import encode_text, encode_text_backward, encode_text_with_cache
from src.encoding.speaker import SpeakerTable, embed_speaker, embed_speakers, embed_speakers_backward
from src.errors import InvalidConfig, InvalidInput


def test_embed_speaker_selects_column():
    table = SpeakerTable(W=np.eye(3))
    np.testing.assert_array_equal(embed_speaker(1, table), [0.0, 1.0, 0.0])


@pytest.mark.parametrize("speaker_id", [-1, 3])
def test_embed_speaker_out_of_range(speaker_id):
    with pytest.raises(IndexError):
        embed_speaker(speaker_id, SpeakerTable(W=np.eye(3)))


def test_embed_speakers_batch_and_repeated_gradient():
    table = SpeakerTable(W=np.arange(6, dtype=float).reshape(2, 3))
    ids = np.array([2, 0, 2])
    out = embed_speakers(ids, table)
    np.testing.assert_array_equal(out, [[2.0, 5.0], [0.0, 3.0], [2.0, 5.0]])

    grad = np.ones((3, 2))
    grad_W = embed_speakers_backward(ids, grad, table)
    np.testing.assert_array_equal(grad_W, [[1.0, 0.0, 2.0], [1.0, 0.0, 2.0]])


def test_encode_affine_dimension_mismatch():
    with pytest.raises(InvalidInput):
        encode_affine(np.ones(3), np.ones((2, 4)), np.zeros(2))


def test_encode_affine_backward_matches_definition(rng):
    x = rng.standard_normal((4, 3))
    W = rng.standard_normal((2, 3))
    grad = rng.standard_normal((4, 2))
    dx, dW, db = encode_affine_backward(x, W, grad)
    np.testing.assert_allclose(dx, grad @ W)
    np.testing.assert_allclose(dW, grad.T @ x)
    np.testing.assert_allclose(db, grad.sum(axis=0))


def test_fuse_speaker():
    np.testing.assert_array_equal(fuse_speaker(np.array([1.0, 2.0]), np.array([3.0, 4.0])), [4.0, 6.0])
    with pytest.raises(InvalidInput):
        fuse_speaker(np.ones(2), np.ones(3))


def test_odd_d_model_rejected(rng):
    with pytest.raises(InvalidConfig):
        init_encoder_tensors(rng, 3, 2, 2, d_model=5, n_speakers=2)


def _params(rng, d_t=3, d_model=4):
    return init_encoder_tensors(rng, d_t, 2, 2, d_model=d_model, n_speakers=2)


def test_zero_weight_gru_outputs_zero(rng):
    tensors = {name: np.zeros_like(t) for name, t in _params(rng).items()}
    out = encode_text(rng.standard_normal((5, 3)), encoder_params_from(tensors))
    assert out.shape == (5, 4)
    np.testing.assert_array_equal(out, 0.0)


def test_encode_text_rejects_empty_sequence(rng):
    with pytest.raises(InvalidInput):
        encode_text(np.zeros((0, 3)), encoder_params_from(_params(rng)))


def test_backward_direction_sees_the_future(rng):
    params = encoder_params_from(_params(rng))
    seq = rng.standard_normal((4, 3))
    changed = seq.copy()
    changed[-1] += 1.0
    out, out_changed = encode_text(seq, params), encode_text(changed, params)
    H = params.gru_fw.hidden
    # forward half at position 0 only sees utterance 0
    np.testing.assert_allclose(out[0, :H], out_changed[0, :H])
    assert not np.allclose(out[0, H:], out_changed[0, H:])


def test_text_encoder_gradients(rng, gradcheck):
    tensors = _params(rng)
    for name in ("text.fw.bx", "text.fw.bh", "text.bw.bx", "text.bw.bh"):
        tensors[name][...] = rng.uniform(-0.3, 0.3, size=tensors[name].shape)
    seq = rng.standard_normal((4, 3))
    upstream = rng.standard_normal((4, 4))

    def loss():
        return float(np.sum(encode_text(seq, encoder_params_from(tensors)) * upstream))

    params = encoder_params_from(tensors)
    _, caches = encode_text_with_cache(seq, params)
    d_seq, g_fw, g_bw = encode_text_backward(upstream, caches, params)

    checked = {"seq": seq}
    grads = {"seq": d_seq}
    for direction, g in (("fw", g_fw), ("bw", g_bw)):
        for key in ("Wx", "Wh", "bx", "bh"):
            checked[f"text.{direction}.{key}"] = tensors[f"text.{direction}.{key}"]
            grads[f"text.{direction}.{key}"] = g[key]
    gradcheck(loss, checked, grads)
