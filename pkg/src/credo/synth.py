"""Synthetic desk-scale corpus generator.

Builds a closed-vocabulary world of facts with a knowledge base, labeled
claims, aligned similarity pairs and sentiment examples:

* true claims restate a knowledge-base fact with neutral wording (token
  overlap with the source stays above 0.6);
* most false claims flip the fact's verb to its antonym, the flip being
  covered by negative pairs in the similarity training data;
* a small slice of false claims flips verbs from antonym pairs that are
  deliberately absent from the pair data, so the flip is invisible to the
  similarity model and only their polarized wording gives them away;
* polarized wording comes from a sentiment lexicon that the sentiment
  dataset teaches, while the same neutral fillers appear in both sentiment
  classes so plain statements score near 0.5.

Everything flows from one seed and the emitted files are byte-stable.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

ADJECTIVES = [
    "amber", "copper", "granite", "velvet", "crimson", "silver",
    "marble", "cedar", "ivory", "cobalt", "russet", "pewter",
]
NOUNS = [
    "kettle", "bridge", "lantern", "orchard", "mill", "tower",
    "garden", "archive", "foundry", "causeway", "reservoir", "observatory",
]
LANDMARKS = [
    "harbor", "plateau", "meadow", "canyon", "village",
    "quarry", "estuary", "ridge", "marsh", "delta",
]
SEEN_VERB_PAIRS = [
    ("rises", "falls"), ("expands", "contracts"), ("brightens", "darkens"),
    ("opens", "closes"), ("warms", "cools"), ("strengthens", "weakens"),
    ("accelerates", "slows"), ("floats", "sinks"), ("hardens", "softens"),
    ("widens", "narrows"), ("thrives", "withers"), ("steadies", "trembles"),
]
# These antonym pairs never enter the similarity training data, so both
# sides encode as the unknown token and the flip carries no similarity
# signal; claims built on them are separable only through their wording.
UNSEEN_VERB_PAIRS = [
    ("ascends", "descends"), ("inflates", "deflates"), ("quickens", "stalls"),
]
POSITIVE_WORDS = [
    "wonderful", "delightful", "marvelous", "splendid", "glorious",
    "heartwarming", "dazzling", "magnificent", "uplifting", "joyous",
]
NEGATIVE_WORDS = [
    "disgraceful", "awful", "horrifying", "shameful", "dreadful",
    "appalling", "miserable", "disastrous", "revolting", "sickening",
]
DECOR_PREFIXES = [
    "{w} news everyone :",
    "what a {w} development :",
    "truly {w} scenes unfolding :",
    "absolutely {w} stuff :",
]
DECOR_SUFFIXES = [
    ", simply {w}",
    ", what a {w} spectacle",
    ", {w} beyond measure",
    ", honestly {w}",
]
AUTHOR_POOL = [
    "rhea calloway", "jude merrick", "opal winters", "cassian holt",
    "imogen vale", "theo larkspur", "sibyl ashford", "bram oakley",
    "nerissa cole", "felix dunmore", "astrid paley", "corin hale",
]
CURATOR_POOL = ["desk editorial", "survey unit", "records office"]
REFERENCE_DOMAINS = [
    "encyclo.example", "archivegate.example", "factfile.example", "surveydesk.example",
]
TRUE_DOMAINS = ["civicledger.example", "plainrecord.example", "towncourier.example"]
FALSE_DOMAINS = ["blazingwire.example", "rumormill.example", "nightlybuzz.example"]

SNOPES_TRUE = 1277
SNOPES_TOTAL = 4856

# Hyperparameters suited to this corpus; written next to the datasets so
# evaluation runs pick them up instead of the library defaults.
TUNED_CONFIG = """# tuned settings for the synthetic corpus
embed_dim = 24
hidden_size = 24
max_tokens = 60
sim_epochs = 16
sim_lr = 0.004
sim_margin = -0.6
sim_batch_size = 16
sent_epochs = 10
sent_lr = 0.004
sent_batch_size = 16
mlp_epochs = 600
weights_iterations = 400
"""


@dataclass
class SynthSpec:
    n: int = 500
    seed: int = 7
    n_facts: int = 60
    n_unseen_facts: int = 6
    n_distractors: int = 10
    neutral_false_frac: float = 0.37  # only similarity catches these
    unseen_false_frac: float = 0.08  # only sentiment neutrality catches these


@dataclass(frozen=True)
class Fact:
    adj: str
    noun: str
    verb: str
    flip: str
    landmark: str
    seen: bool
    index: int

    @property
    def sentence(self) -> str:
        return f"the {self.adj} {self.noun} {self.verb} near the {self.landmark}"

    def flipped_sentence(self) -> str:
        return f"the {self.adj} {self.noun} {self.flip} near the {self.landmark}"


@dataclass
class SynthData:
    claims: list[dict] = field(default_factory=list)
    kb_docs: list[dict] = field(default_factory=list)
    pairs: list[dict] = field(default_factory=list)
    sentiments: list[dict] = field(default_factory=list)
    provider: list[dict] = field(default_factory=list)
    config_text: str = TUNED_CONFIG
    facts: list[Fact] = field(default_factory=list)


def _neutral_variant(core: str, which: int) -> str:
    templates = [
        "reports indicate {core}",
        "observers note that {core}",
        "{core} according to field records",
    ]
    return templates[which % len(templates)].format(core=core)


def _decorate(text: str, word: str, rng: np.random.Generator) -> str:
    style = int(rng.integers(3))
    if style == 0:
        prefix = DECOR_PREFIXES[int(rng.integers(len(DECOR_PREFIXES)))]
        return f"{prefix.format(w=word)} {text}"
    if style == 1:
        suffix = DECOR_SUFFIXES[int(rng.integers(len(DECOR_SUFFIXES)))]
        return f"{text}{suffix.format(w=word)}"
    prefix = DECOR_PREFIXES[int(rng.integers(len(DECOR_PREFIXES)))]
    suffix = DECOR_SUFFIXES[int(rng.integers(len(DECOR_SUFFIXES)))]
    return f"{prefix.format(w=word)} {text}{suffix.format(w=word)}"


def _build_facts(spec: SynthSpec, rng: np.random.Generator) -> list[Fact]:
    combos = [(a, n) for a in ADJECTIVES for n in NOUNS]
    picks = rng.choice(len(combos), size=spec.n_facts, replace=False)
    facts = []
    n_seen = spec.n_facts - spec.n_unseen_facts
    for i, pick in enumerate(picks):
        adj, noun = combos[int(pick)]
        seen = i < n_seen
        pairs = SEEN_VERB_PAIRS if seen else UNSEEN_VERB_PAIRS
        verb, flip = pairs[i % len(pairs)]
        if rng.random() < 0.5:  # half the facts assert the antonym side
            verb, flip = flip, verb
        landmark = LANDMARKS[int(rng.integers(len(LANDMARKS)))]
        facts.append(Fact(adj, noun, verb, flip, landmark, seen, i))
    return facts


def _kb_text(fact: Fact) -> str:
    core = fact.sentence
    return (
        f"{core.capitalize()}. "
        f"Survey records from the {fact.landmark} confirm that "
        f"the {fact.adj} {fact.noun} {fact.verb}. "
        f"Field notes describe how {core}."
    )


def _build_kb(facts: list[Fact], spec: SynthSpec, rng: np.random.Generator) -> list[dict]:
    docs = []
    for fact in facts:
        domain = REFERENCE_DOMAINS[fact.index % len(REFERENCE_DOMAINS)]
        author = (
            CURATOR_POOL[fact.index % len(CURATOR_POOL)]
            if rng.random() < 0.7
            else None
        )
        docs.append(
            {
                "doc_id": f"kb-{fact.index:03d}",
                "title": f"{fact.adj} {fact.noun} survey",
                "text": _kb_text(fact),
                "source_url": f"https://{domain}/entries/{fact.index:03d}",
                "author": author,
            }
        )
    fillers = [
        "the quartz pendulum swings beneath the listed museum",
        "a sealed chronicle describes the forgotten aqueduct spillway",
        "the basalt stairwell echoes under the eastern battlement",
        "weathered signage marks the decommissioned tram depot",
        "an inventory sheet lists the brass astrolabe fittings",
        "the juniper hedgerow borders the derelict customs house",
        "a faded mural covers the northern granary facade",
        "the tin weathervane creaks above the shuttered bakery",
        "loose shale gathers along the abandoned signal box",
        "the wicker footbridge spans the overgrown irrigation ditch",
    ]
    for i in range(spec.n_distractors):
        docs.append(
            {
                "doc_id": f"kb-x{i:02d}",
                "title": f"miscellany {i:02d}",
                "text": f"{fillers[i % len(fillers)].capitalize()}. Nothing further is recorded.",
                "source_url": f"https://archivegate.example/misc/{i:02d}",
                "author": None,
            }
        )
    return docs


def _build_pairs(facts: list[Fact], rng: np.random.Generator) -> list[dict]:
    seen = [f for f in facts if f.seen]
    pairs = []
    decor_words = POSITIVE_WORDS + NEGATIVE_WORDS
    for j, fact in enumerate(seen):
        core = fact.sentence
        flipped = fact.flipped_sentence()
        other = seen[(j + 7) % len(seen)]
        decorated = _decorate(
            _neutral_variant(core, j), decor_words[j % len(decor_words)], rng
        )
        pairs.extend(
            [
                {"text_a": core, "text_b": _neutral_variant(core, j), "label": 1},
                {"text_a": core, "text_b": _neutral_variant(core, j + 1), "label": 1},
                {"text_a": core, "text_b": decorated, "label": 1},
                {"text_a": core, "text_b": flipped, "label": -1},
                {
                    "text_a": _neutral_variant(core, j),
                    "text_b": _neutral_variant(flipped, j + 2),
                    "label": -1,
                },
                {"text_a": core, "text_b": _neutral_variant(other.sentence, j), "label": -1},
            ]
        )
    return pairs


def _build_sentiments(facts: list[Fact], rng: np.random.Generator) -> list[dict]:
    seen = [f for f in facts if f.seen]
    examples = []
    for j, fact in enumerate(seen):
        filler = _neutral_variant(fact.sentence, j)
        pos = POSITIVE_WORDS[j % len(POSITIVE_WORDS)]
        neg = NEGATIVE_WORDS[j % len(NEGATIVE_WORDS)]
        examples.append({"text": f"{filler} , truly {pos}", "label": 1})
        examples.append({"text": f"{filler} , truly {neg}", "label": -1})
        # decorated forms so every decoration template reads as pure sentiment
        examples.append({"text": _decorate(filler, pos, rng), "label": 1})
        examples.append({"text": _decorate(filler, neg, rng), "label": -1})
    return examples


def _build_provider(rng: np.random.Generator) -> list[dict]:
    records = []
    for domain in REFERENCE_DOMAINS:
        records.append({"domain": domain, "score": round(0.85 + 0.1 * rng.random(), 2)})
    for domain in TRUE_DOMAINS:
        records.append({"domain": domain, "score": round(0.65 + 0.15 * rng.random(), 2)})
    for domain in FALSE_DOMAINS:
        records.append({"domain": domain, "score": round(0.1 + 0.1 * rng.random(), 2)})
    return records


def generate(spec: SynthSpec | None = None) -> SynthData:
    spec = spec or SynthSpec()
    rng = np.random.default_rng(np.random.SeedSequence([spec.seed, 41]))
    facts = _build_facts(spec, rng)
    seen_facts = [f for f in facts if f.seen]
    unseen_facts = [f for f in facts if not f.seen]

    n_true = round(spec.n * SNOPES_TRUE / SNOPES_TOTAL)
    n_false = spec.n - n_true
    n_unseen_false = round(n_false * spec.unseen_false_frac)
    n_neutral_false = round(n_false * spec.neutral_false_frac)
    n_polar_false = n_false - n_neutral_false - n_unseen_false

    claims: list[dict] = []

    def claim_record(text, truthful, domain_pool, decorated):
        domain = domain_pool[int(rng.integers(len(domain_pool)))]
        author = (
            AUTHOR_POOL[int(rng.integers(len(AUTHOR_POOL)))]
            if rng.random() > 0.1
            else None
        )
        if truthful:
            label = "true" if rng.random() < 0.7 else "mostly true"
        else:
            label = "false" if rng.random() < 0.7 else "mostly false"
        month = 1 + int(rng.integers(12))
        day = 1 + int(rng.integers(28))
        claims.append(
            {
                "text": text,
                "label": label,
                "author": author,
                "source_url": f"https://{domain}/story",
                "date": f"2017-{month:02d}-{day:02d}",
                "decorated": decorated,
            }
        )

    def pick_domains(truthful):
        # a sliver of cross-posting keeps domains from being a class oracle
        main, other = (TRUE_DOMAINS, FALSE_DOMAINS) if truthful else (FALSE_DOMAINS, TRUE_DOMAINS)
        return other if rng.random() < 0.1 else main

    for i in range(n_true):
        fact = seen_facts[int(rng.integers(len(seen_facts)))]
        text = _neutral_variant(fact.sentence, int(rng.integers(3)))
        claim_record(text, True, pick_domains(True), decorated=False)
    for i in range(n_polar_false):
        fact = seen_facts[int(rng.integers(len(seen_facts)))]
        word_pool = POSITIVE_WORDS if rng.random() < 0.4 else NEGATIVE_WORDS
        word = word_pool[int(rng.integers(len(word_pool)))]
        text = _decorate(
            _neutral_variant(fact.flipped_sentence(), int(rng.integers(3))), word, rng
        )
        claim_record(text, False, pick_domains(False), decorated=True)
    for i in range(n_neutral_false):
        fact = seen_facts[int(rng.integers(len(seen_facts)))]
        text = _neutral_variant(fact.flipped_sentence(), int(rng.integers(3)))
        claim_record(text, False, pick_domains(False), decorated=False)
    for i in range(n_unseen_false):
        fact = unseen_facts[int(rng.integers(len(unseen_facts)))]
        word_pool = POSITIVE_WORDS if rng.random() < 0.4 else NEGATIVE_WORDS
        word = word_pool[int(rng.integers(len(word_pool)))]
        text = _decorate(
            _neutral_variant(fact.flipped_sentence(), int(rng.integers(3))), word, rng
        )
        claim_record(text, False, pick_domains(False), decorated=True)

    order = rng.permutation(len(claims))
    shuffled = []
    for new_id, idx in enumerate(order):
        record = dict(claims[int(idx)])
        record.pop("decorated")
        record["id"] = f"claim-{new_id:04d}"
        record["source_url"] = f"https://{record['source_url'].split('/')[2]}/story/{new_id:04d}"
        shuffled.append(
            {k: record[k] for k in ("id", "text", "label", "author", "source_url", "date")}
        )

    return SynthData(
        claims=shuffled,
        kb_docs=_build_kb(facts, spec, rng),
        pairs=_build_pairs(facts, rng),
        sentiments=_build_sentiments(facts, rng),
        provider=_build_provider(rng),
        facts=facts,
    )


def _write_jsonl(path: Path, records: list[dict]) -> None:
    lines = [json.dumps(r, sort_keys=True) for r in records]
    path.write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")


def write_all(data: SynthData, out_dir: str | Path) -> dict[str, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "claims": out / "claims.jsonl",
        "kb": out / "kb.jsonl",
        "pairs": out / "pairs.jsonl",
        "sentiment": out / "sentiment.jsonl",
        "provider": out / "provider.jsonl",
        "config": out / "synth.cfg",
    }
    _write_jsonl(paths["claims"], data.claims)
    _write_jsonl(paths["kb"], data.kb_docs)
    _write_jsonl(paths["pairs"], data.pairs)
    _write_jsonl(paths["sentiment"], data.sentiments)
    _write_jsonl(paths["provider"], data.provider)
    paths["config"].write_text(data.config_text, encoding="utf-8")
    return paths
