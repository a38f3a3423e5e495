"""Sentiment classifier tests; a bag-of-words logistic fit vouches for the
synthetic data before the LSTM is held to an accuracy bar."""
import numpy as np
import pytest

from credo import nn
from credo.sentiment import (
    SentimentExample,
    SentimentModel,
    SentimentTraining,
    example_loss_and_grads,
    load_examples_jsonl,
    load_model,
    neutrality,
    save_model,
    sentiment_prob,
    train_sentiment,
)
from credo.synth import SynthSpec, generate

TINY = SentimentTraining(
    embed_dim=6, hidden_size=6, epochs=4, learning_rate=0.01, batch_size=8, seed=3
)


def tiny_model():
    examples = [
        SentimentExample("lovely warm day", 1),
        SentimentExample("awful cold mess", -1),
        SentimentExample("lovely bright morning", 1),
        SentimentExample("awful grim evening", -1),
    ]
    return train_sentiment(examples, TINY)


def bow_logistic_accuracy(train, held, steps=400, lr=0.5):
    """Plain bag-of-words logistic regression, fitted with batch gradient
    descent; an independent check that the data is separable at all."""
    vocab = sorted({w for e in train + held for w in e.text.split()})
    slot = {w: i for i, w in enumerate(vocab)}

    def vec(e):
        v = np.zeros(len(slot) + 1)
        for w in e.text.split():
            v[slot[w]] += 1.0
        v[-1] = 1.0
        return v

    x_train = np.stack([vec(e) for e in train])
    y_train = np.array([1.0 if e.label == 1 else 0.0 for e in train])
    w = np.zeros(x_train.shape[1])
    for _ in range(steps):
        p = 1.0 / (1.0 + np.exp(-(x_train @ w)))
        w -= lr * x_train.T @ (p - y_train) / len(train)
    x_held = np.stack([vec(e) for e in held])
    predictions = (x_held @ w) > 0
    actual = np.array([e.label == 1 for e in held])
    return float((predictions == actual).mean())


class TestNeutrality:
    def test_maximal_at_half(self):
        assert neutrality(0.5) == 1.0

    def test_poles(self):
        assert neutrality(0.999999) == pytest.approx(0.0, abs=1e-5)
        assert neutrality(1e-9) == pytest.approx(0.0, abs=1e-5)

    def test_arithmetic(self):
        assert neutrality(0.75) == pytest.approx(0.5)

    def test_polarity_symmetric_exactly(self, rng):
        # dyadic probabilities keep 1 - p exactly representable
        for _ in range(100):
            p = float(rng.integers(1, 1024)) / 1024.0
            assert neutrality(p) == neutrality(1.0 - p)

    def test_unit_interval_and_unique_max(self, rng):
        for _ in range(100):
            p = float(rng.uniform(0.001, 0.999))
            v = neutrality(p)
            assert 0.0 <= v <= 1.0
            assert (v == 1.0) == (p == 0.5)


class TestSentimentProb:
    def test_zero_head_means_half(self):
        model = tiny_model()
        model.params["head_w"][:] = 0.0
        model.params["head_b"][:] = 0.0
        assert sentiment_prob("lovely warm day", model) == pytest.approx(0.5)

    def test_large_bias_saturates(self):
        model = tiny_model()
        model.params["head_b"][:] = 50.0
        assert sentiment_prob("awful cold mess", model) > 0.999

    def test_deterministic(self):
        model = tiny_model()
        a = sentiment_prob("lovely bright morning", model)
        b = sentiment_prob("lovely bright morning", model)
        assert a == b

    def test_empty_text(self):
        model = tiny_model()
        with pytest.raises(nn.EmptySequenceError):
            sentiment_prob("—", model)

    def test_matches_manual_forward(self, rng):
        model = tiny_model()
        text = "lovely cold morning"
        ids = [model.vocab.id_for(w) for w in text.split()]
        xs = model.params["embedding"][ids]
        hs, _ = nn.lstm_forward(xs, model.lstm())
        pooled = nn.mean_pool(hs)
        logit = model.params["head_w"] @ pooled + model.params["head_b"][0]
        expected = 1.0 / (1.0 + np.exp(-logit))
        assert sentiment_prob(text, model) == pytest.approx(expected, abs=1e-12)


class TestTraining:
    def test_single_class_rejected(self):
        with pytest.raises(nn.TrainingDataError):
            train_sentiment([SentimentExample("x", 1), SentimentExample("y", 1)], TINY)

    def test_loss_decreases_and_reproducible(self):
        a = tiny_model()
        b = tiny_model()
        assert a.meta["final_loss"] <= a.meta["initial_loss"]
        for name in a.params:
            np.testing.assert_array_equal(a.params[name], b.params[name])

    def test_grad_check(self):
        model = tiny_model()
        example = SentimentExample("awful bright day", -1)

        def loss(params):
            probe = SentimentModel(model.vocab, params, model.max_tokens)
            return example_loss_and_grads(example, probe)

        assert nn.grad_check(loss, model.params) < 1e-4

    def test_lexicon_data_heldout_accuracy(self):
        data = generate(SynthSpec(n=40, seed=9))
        examples = [SentimentExample(e["text"], e["label"]) for e in data.sentiments]
        rng = np.random.default_rng(4)
        order = rng.permutation(len(examples))
        split = int(0.75 * len(examples))
        train = [examples[i] for i in order[:split]]
        held = [examples[i] for i in order[split:]]

        assert bow_logistic_accuracy(train, held) >= 0.9  # data is separable

        config = SentimentTraining(
            embed_dim=16, hidden_size=16, epochs=8, learning_rate=0.005,
            batch_size=16, seed=9,
        )
        model = train_sentiment(train, config)
        hits = sum(
            (sentiment_prob(e.text, model) >= 0.5) == (e.label == 1) for e in held
        )
        assert hits / len(held) >= 0.9

    def test_shuffled_labels_chance_level(self):
        data = generate(SynthSpec(n=40, seed=9))
        examples = [SentimentExample(e["text"], e["label"]) for e in data.sentiments]
        rng = np.random.default_rng(21)
        labels = [e.label for e in examples]
        shuffled = [int(l) for l in rng.permutation(labels)]
        noisy = [SentimentExample(e.text, l) for e, l in zip(examples, shuffled)]
        order = rng.permutation(len(noisy))
        split = int(0.75 * len(noisy))
        train = [noisy[i] for i in order[:split]]
        held = [noisy[i] for i in order[split:]]
        config = SentimentTraining(
            embed_dim=12, hidden_size=12, epochs=6, learning_rate=0.005,
            batch_size=16, seed=9,
        )
        model = train_sentiment(train, config)
        hits = sum(
            (sentiment_prob(e.text, model) >= 0.5) == (e.label == 1) for e in held
        )
        assert 0.4 <= hits / len(held) <= 0.6


class TestPersistence:
    def test_round_trip(self, tmp_path):
        model = tiny_model()
        path = tmp_path / "sent.ckpt"
        save_model(model, path)
        loaded = load_model(path)
        assert sentiment_prob("lovely warm day", loaded) == sentiment_prob(
            "lovely warm day", model
        )

    def test_examples_jsonl(self, tmp_path):
        path = tmp_path / "s.jsonl"
        path.write_text('{"text": "nice", "label": 1}\n{"text": "bad", "label": -1}\n')
        assert load_examples_jsonl(path) == [
            SentimentExample("nice", 1),
            SentimentExample("bad", -1),
        ]
