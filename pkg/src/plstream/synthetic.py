"""Synthetic grammar corpus, simulated pseudo-labelers and a hand-wired toy acoustic model.

Every reference token is rendered as one "acoustic" frame surrounded by
silence frames. Most token frames are clean; a fraction are ambiguous between
the true token and a confusable partner, sometimes favouring the wrong one by
a small margin. Fusion bonuses can then repair the near misses.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .context_graph import SubwordVocab
from .corpus import Manifest, Utterance
from .transducer import TableTransducer

FIRST_NAMES = ["MARIA", "JOHN", "ANNA", "PETER", "LUCIA", "DAVID"]
LAST_NAMES = ["LOPEZ", "SMITH", "KOWALSKI", "JONES", "FERRARI", "MILLER"]
PEOPLE = [f"{f} {l}" for f, l in zip(FIRST_NAMES, LAST_NAMES)]
CITIES = ["BARCELONA", "MADRID", "BERLIN", "LISBON", "TORONTO", "VIENNA"]
ORGS = ["ACME CORPORATION", "GLOBEX SYSTEMS", "INITECH LABS", "UMBRELLA HOLDINGS"]
TEMPLATES = [
    "PLEASE CALL {person} TOMORROW MORNING",
    "THE MEETING WITH {person} IS IN {city}",
    "I WILL FLY TO {city} NEXT WEEK",
    "SEND THE REPORT TO {org} TODAY",
    "{person} WORKS FOR {org} IN {city}",
    "WE MET {person} AT THE {city} OFFICE",
    "THE CONTRACT WITH {org} WAS SIGNED",
    "BOOK A HOTEL IN {city} FOR {person}",
    "ASK {person} ABOUT THE {org} INVOICE",
    "THE TRAIN TO {city} IS LATE AGAIN",
]
# Entity strings a named-entity tagger might return, including noise that
# bias-list curation is expected to drop.
NOISY_ENTITIES = ["SAN", "MAR", "NEW", "THE UNITED STATES OF AMERICA", "maria lopez"]
HALLUCINATED_WORD = "SUPERCALIFRAGILISTICEXPIALIDOCIOUS"

SCALE = 8.0
GAPS = (0.2, 0.4, 0.7, 1.0, 1.4)
SILENCE = ("sil",)


@dataclass(frozen=True)
class CorpusConfig:
    n_train: int = 400
    n_test: int = 60
    n_supervised: int = 40
    strong_sub_rate: float = 0.02
    weak_sub_rate: float = 0.2
    h1_rate: float = 0.04
    h2_rate: float = 0.02
    h3_rate: float = 0.03
    ambiguous_rate: float = 0.3
    wrong_rate: float = 0.5


def _sentence(rng: np.random.Generator) -> str:
    template = TEMPLATES[rng.integers(len(TEMPLATES))]
    return template.format(
        person=PEOPLE[rng.integers(len(PEOPLE))],
        city=CITIES[rng.integers(len(CITIES))],
        org=ORGS[rng.integers(len(ORGS))],
    )


def lexicon() -> list[str]:
    words = set()
    for t in TEMPLATES:
        words.update(w for w in t.split() if not w.startswith("{"))
    for group in (PEOPLE, CITIES, ORGS):
        for phrase in group:
            words.update(phrase.split())
    return sorted(words)


def word_classes() -> list[list[str]]:
    """Confusable word groups; members never occur next to each other."""
    kinds = [FIRST_NAMES, LAST_NAMES, CITIES, [o.split()[0] for o in ORGS], [o.split()[1] for o in ORGS]]
    entity = {w for k in kinds for w in k}
    adjacent = set()
    for t in TEMPLATES:
        ws = t.split()
        adjacent.update(zip(ws, ws[1:]))
        adjacent.update((b, a) for a, b in zip(ws, ws[1:]))
    common = [w for w in lexicon() if w not in entity]
    groups: list[list[str]] = []
    for w in common:
        for g in groups:
            if len(g) < 3 and all((w, m) not in adjacent for m in g):
                g.append(w)
                break
        else:
            groups.append([w])
    return [sorted(k) for k in kinds] + groups


@dataclass
class ToyAcoustics:
    """Frame-symbol registry plus the derived model."""

    vocab: SubwordVocab
    partners: dict[int, list[int]]
    symbols: list[tuple] = field(default_factory=lambda: [SILENCE])
    index: dict[tuple, int] = field(default_factory=lambda: {SILENCE: 0})

    def symbol(self, key: tuple) -> int:
        idx = self.index.get(key)
        if idx is None:
            idx = len(self.symbols)
            self.symbols.append(key)
            self.index[key] = idx
        return idx

    def render(self, text: str, rng: np.random.Generator, cfg: CorpusConfig) -> list[int]:
        frames = [0] * int(rng.integers(1, 3))
        for k in self.vocab.encode(text):
            partners = self.partners.get(k, [])
            if partners and rng.random() < cfg.ambiguous_rate:
                other = partners[int(rng.integers(len(partners)))]
                gap = GAPS[int(rng.integers(len(GAPS)))]
                fav, alt = (other, k) if rng.random() < cfg.wrong_rate else (k, other)
                frames.append(self.symbol(("amb", fav, alt, gap)))
            else:
                frames.append(self.symbol(("clean", k)))
            frames.extend([0] * int(rng.integers(1, 4)))
        return frames

    def build_model(self, seed: int) -> TableTransducer:
        """Wire the tables so that logits follow the frame recipe exactly.

        Hidden layout: one dimension per confusable or used token, then a bias
        dimension fixed at 1 on every frame.
        """
        v = self.vocab.size
        used = sorted({k for key in self.symbols[1:] for k in key[1:3] if isinstance(k, int)}
                      | set(self.partners))
        dim = {k: i for i, k in enumerate(used)}
        h = len(used) + 1
        bias = h - 1
        rng = np.random.default_rng(seed)
        embed = rng.normal(scale=0.05, size=(len(self.symbols), h))
        embed[:, bias] = 0.0
        skip = np.zeros((len(self.symbols), h))
        skip[:, bias] = 1.0
        for i, key in enumerate(self.symbols):
            if key[0] == "clean":
                skip[i, dim[key[1]]] = 2.0 * SCALE
            elif key[0] == "amb":
                _, fav, alt, gap = key
                skip[i, dim[fav]] = 1.5 * SCALE + gap / 2
                skip[i, dim[alt]] = 1.5 * SCALE - gap / 2
        joint = np.zeros((v + 1, h))
        joint[:v, bias] = -1.5 * SCALE
        for k, d in dim.items():
            joint[k, d] = 1.0
            joint[k, bias] = -SCALE
        predictor = np.zeros((v + 1, v + 1, h))
        for k in used:
            for m in [k, *self.partners.get(k, [])]:
                predictor[:, k, dim[m]] = -2.0 * SCALE
        return TableTransducer(embed=embed, predictor=predictor, joint=joint, skip=skip, seed=seed)


def make_acoustics(vocab: SubwordVocab) -> ToyAcoustics:
    partners: dict[int, list[int]] = {}
    for group in word_classes():
        ids = []
        for w in group:
            toks = vocab.encode_word(w)
            if len(toks) == 1 and toks[0] != vocab.unk_id:
                ids.append(toks[0])
        for k in ids:
            partners[k] = [m for m in ids if m != k]
    return ToyAcoustics(vocab, partners)


def _substitute(words: list[str], rate: float, rng: np.random.Generator, lex: list[str]) -> list[str]:
    out = []
    for w in words:
        if rng.random() < rate:
            w = lex[int(rng.integers(len(lex)))]
        out.append(w)
    return out


@dataclass(frozen=True)
class PlantedFaults:
    h1: frozenset
    h2: frozenset
    h3: frozenset


def simulate_training_corpus(cfg: CorpusConfig, rng: np.random.Generator
                             ) -> tuple[Manifest, Manifest, PlantedFaults]:
    """Return (supervised, pseudo-labelled, planted faults in the 'strong' labels)."""
    lex = lexicon()
    sup, pl = [], []
    h1, h2, h3 = set(), set(), set()
    for i in range(cfg.n_supervised):
        text = _sentence(rng)
        dur = round(len(text.split()) / rng.uniform(1.8, 3.2), 3)
        sup.append(Utterance(f"sup-{i:04d}", dur, ref_text=text))
    for i in range(cfg.n_train):
        uid = f"pl-{i:04d}"
        words = _sentence(rng).split()
        rate = rng.uniform(1.8, 3.2)
        strong = _substitute(words, cfg.strong_sub_rate, rng, lex)
        weak = _substitute(words, cfg.weak_sub_rate, rng, lex)
        r = rng.random()
        if r < cfg.h1_rate:
            strong = strong + [strong[-1]] * 3
            h1.add(uid)
        elif r < cfg.h1_rate + cfg.h2_rate:
            strong = strong[:2] + [HALLUCINATED_WORD] + strong[2:]
            h2.add(uid)
        elif r < cfg.h1_rate + cfg.h2_rate + cfg.h3_rate:
            rate = rng.choice([0.5, 6.0])
            h3.add(uid)
        dur = round(len(strong) / rate, 3)
        pl.append(Utterance(uid, dur, pl_text={"strong": " ".join(strong), "weak": " ".join(weak)}))
    return (Manifest(sup, "supervised"), Manifest(pl, "pseudo"),
            PlantedFaults(frozenset(h1), frozenset(h2), frozenset(h3)))


def simulate_test_corpus(cfg: CorpusConfig, acoustics: ToyAcoustics,
                         rng: np.random.Generator) -> Manifest:
    utts = []
    for i in range(cfg.n_test):
        text = _sentence(rng)
        frames = acoustics.render(text, rng, cfg)
        utts.append(Utterance(f"test-{i:04d}", round(len(frames) * 0.04, 3), ref_text=text,
                              frames=tuple(frames)))
    return Manifest(utts, "test")


def raw_entities() -> list[str]:
    return PEOPLE + CITIES + ORGS + NOISY_ENTITIES
