"""Unsupervised statistical keyphrase extraction.

Single-corpus scoring in the style of YAKE: every candidate term gets a
score from its casing, frequency, position of first appearance, spread
over sentences and context diversity; phrases combine their terms'
scores.  Lower is better.
"""

from __future__ import annotations

import csv
import math
import re
import statistics
from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import Collection, Iterable

STOPWORDS = frozenset("""
a about above after again against all am an and any are aren't as at be because
been before being below between both but by can can't cannot could couldn't did
didn't do does doesn't doing don't down during each few for from further get gets
got had hadn't has hasn't have haven't having he he'd he'll he's her here here's
hers herself him himself his how how's i i'd i'll i'm i've if in into is isn't it
it's its itself just let's like me more most mustn't my myself no nor not now of
off on once only or other ought our ours ourselves out over own really same shan't
she she'd she'll she's should shouldn't so some such than that that's the their
theirs them themselves then there there's these they they'd they'll they're
they've this those through to too under until up us very was wasn't we we'd we'll
we're we've were weren't what what's when when's where where's which while who
who's whom why why's will with won't would wouldn't yes yet you you'd you'll
you're you've your yours yourself yourselves also anyone anything im ive dont
one get go going know think want would need much many even still well
""".split())

_SENTENCE_SPLIT = re.compile(r"(?<=[.!?])\s+|\n+")
_CHUNK_SPLIT = re.compile(r"[,;:()\[\]{}\"“”<>|/]+|\s[-–—]+\s")
_TOKEN = re.compile(r"[A-Za-z0-9]+(?:['’\-][A-Za-z0-9]+)*")


@dataclass(frozen=True)
class KeywordScore:
    phrase: str
    score: float
    frequency: int


@dataclass
class _TermStats:
    tf: int = 0
    tf_upper: int = 0
    tf_acronym: int = 0
    first: int = 0
    sentences: set = None
    positions: list = None
    left: set = None
    right: set = None

    def __post_init__(self):
        self.sentences = set()
        self.positions = []
        self.left = set()
        self.right = set()


def _sentences(corpus: Iterable[str]) -> list[list[list[str]]]:
    """Corpus -> sentences -> punctuation-free chunks -> tokens."""
    out = []
    for doc in corpus:
        for sent in _SENTENCE_SPLIT.split(doc or ""):
            chunks = [_TOKEN.findall(c) for c in _CHUNK_SPLIT.split(sent)]
            chunks = [c for c in chunks if c]
            if chunks:
                out.append(chunks)
    return out


def _is_candidate_token(tok: str) -> bool:
    return any(ch.isalpha() for ch in tok)


def extract_keywords(
    corpus: Iterable[str],
    k: int = 10,
    max_ngram: int = 3,
    stopwords: Collection[str] = STOPWORDS,
    deduplicate: bool = True,
) -> list[KeywordScore]:
    """Top ``k`` phrases of 1..``max_ngram`` words, best (lowest score) first.

    Candidates never cross sentence or punctuation boundaries and never
    start or end with a stopword.  With ``deduplicate`` a phrase whose
    words all occur in an already selected (better) phrase is skipped.
    """
    stop = {s.lower() for s in stopwords}
    sentences = _sentences(corpus)
    if not sentences:
        return []

    stats: dict[str, _TermStats] = defaultdict(_TermStats)
    candidates: Counter[tuple[str, ...]] = Counter()
    first_seen: dict[tuple[str, ...], int] = {}
    word_pos = 0
    for s_idx, chunks in enumerate(sentences):
        first_in_sentence = True
        for chunk in chunks:
            lowered = [t.lower() for t in chunk]
            for i, (tok, low) in enumerate(zip(chunk, lowered)):
                st = stats[low]
                if st.tf == 0:
                    st.first = s_idx
                st.tf += 1
                st.sentences.add(s_idx)
                st.positions.append(s_idx)
                if len(tok) > 1 and tok.isupper():
                    st.tf_acronym += 1
                elif tok[0].isupper() and not first_in_sentence:
                    st.tf_upper += 1
                if i > 0:
                    st.left.add(lowered[i - 1])
                if i + 1 < len(chunk):
                    st.right.add(lowered[i + 1])
                first_in_sentence = False
                for n in range(1, max_ngram + 1):
                    gram = tuple(lowered[i:i + n])
                    if len(gram) < n:
                        break
                    if gram[0] in stop or gram[-1] in stop:
                        continue
                    if not all(_is_candidate_token(t) for t in gram):
                        continue
                    candidates[gram] += 1
                    first_seen.setdefault(gram, word_pos)
                word_pos += 1

    content = [t for t in stats if t not in stop and _is_candidate_token(t)]
    if not candidates or not content:
        return []
    tfs = [stats[t].tf for t in content]
    mean_tf = statistics.fmean(tfs)
    std_tf = statistics.pstdev(tfs)
    max_tf = max(tfs)
    n_sent = len(sentences)

    term_score: dict[str, float] = {}
    for t, st in stats.items():
        casing = max(st.tf_upper, st.tf_acronym) / (1 + math.log(st.tf))
        position = math.log(math.log(3 + statistics.median(st.positions)))
        frequency = st.tf / (mean_tf + std_tf)
        relatedness = 1 + (len(st.left) + len(st.right)) / max_tf
        spread = len(st.sentences) / n_sent
        term_score[t] = (relatedness * position) / (
            casing + frequency / relatedness + spread / relatedness)

    scored = []
    for gram, freq in candidates.items():
        prod = 1.0
        total = 0.0
        for t in gram:
            if t in stop:
                continue
            prod *= term_score[t]
            total += term_score[t]
        scored.append((prod / (freq * (1 + total)), first_seen[gram], gram, freq))
    scored.sort()

    out: list[KeywordScore] = []
    chosen: list[set[str]] = []
    for score, _, gram, freq in scored:
        words = set(gram)
        if deduplicate and any(words <= c for c in chosen):
            continue
        out.append(KeywordScore(" ".join(gram), score, freq))
        chosen.append(words)
        if len(out) == k:
            break
    return out


def write_keywords_csv(keywords: Iterable[KeywordScore], stream) -> None:
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(["rank", "phrase", "score", "frequency"])
    for i, kw in enumerate(keywords, start=1):
        w.writerow([i, kw.phrase, f"{kw.score:.6g}", kw.frequency])
