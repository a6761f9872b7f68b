"""Normalization pipeline: per-stage contracts, golden traces, idempotence."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ekmanlab.textnorm import (
    NEGATIONS,
    NormResources,
    ResourceError,
    condense_repeats,
    emoji_to_text,
    expand_abbreviations,
    expand_contractions,
    lemmatize,
    normalize_full,
    normalize_minimal,
    remove_stopwords,
    space_punctuation,
    tokenize,
    tokenize_raw,
)

CRYING_FACE = "\U0001F622"
TEARS_OF_JOY = "\U0001F602"


class TestNormalizeMinimal:
    def test_whitespace_collapse(self):
        assert normalize_minimal("Hi   there ") == "Hi there"

    def test_empty(self):
        assert normalize_minimal("") == ""

    def test_preserves_case_and_emoji(self):
        assert normalize_minimal(f"LMAO {TEARS_OF_JOY}") == f"LMAO {TEARS_OF_JOY}"

    def test_nfc_applied(self):
        # e + combining acute accent composes to a single codepoint
        assert normalize_minimal("café") == "café"


class TestEmojiToText:
    def test_lexicon_match(self, resources):
        assert emoji_to_text(f"ok {CRYING_FACE}", resources.emoji_lexicon) == "ok crying face"

    def test_no_emoji_unchanged(self, resources):
        assert emoji_to_text("plain text", resources.emoji_lexicon) == "plain text"

    def test_unmatched_emoji_dropped(self, resources):
        # U+1FAE0 melting face is not in the shipped lexicon
        assert emoji_to_text("odd \U0001FAE0 one", resources.emoji_lexicon) == "odd one"

    def test_longest_match_first(self):
        lexicon = {"❤": "red heart", "❤️": "red heart"}
        assert emoji_to_text("x ❤️ y", lexicon) == "x red heart y"


class TestExpandContractions:
    def test_common_contraction(self, resources):
        assert expand_contractions("i'm sad", resources.contractions) == "i am sad"

    def test_possessive_untouched(self, resources):
        assert expand_contractions("dogs' toys", resources.contractions) == "dogs' toys"

    def test_empty(self, resources):
        assert expand_contractions("", resources.contractions) == ""

    def test_substring_not_matched(self, resources):
        # "shell" contains no contraction even though "he'll" is one
        assert expand_contractions("shell game", resources.contractions) == "shell game"

    def test_adjacent_punctuation_ok(self, resources):
        assert expand_contractions("can't!", resources.contractions) == "cannot!"


class TestExpandAbbreviations:
    def test_lmao(self, resources):
        assert expand_abbreviations("lmao", resources.abbreviations) == "laughing my ass off"

    def test_substring_must_not_match(self, resources):
        assert expand_abbreviations("llama", resources.abbreviations) == "llama"

    def test_multiple_tokens(self, resources):
        got = expand_abbreviations("idk lol", resources.abbreviations)
        assert got == "i do not know laughing out loud"


class TestCondenseRepeats:
    def test_long_run_shortened(self):
        assert condense_repeats("soooooo", 2) == "soo"

    def test_run_equal_to_cap_untouched(self):
        assert condense_repeats("good", 2) == "good"

    def test_punctuation_exempt(self):
        assert condense_repeats("aaaa!!!!", 2) == "aa!!!!"

    def test_cap_validation(self):
        with pytest.raises(ValueError):
            condense_repeats("x", 0)

    @given(st.text(max_size=60), st.integers(min_value=1, max_value=4))
    def test_never_lengthens(self, text, cap):
        assert len(condense_repeats(text, cap)) <= len(text)


class TestSpacePunctuation:
    def test_question_exclamation(self):
        assert space_punctuation("what?!") == "what ? !"

    def test_comma(self):
        assert space_punctuation("a,b") == "a , b"

    def test_extraneous_symbol_removed(self):
        assert space_punctuation("a~b") == "a b"

    def test_retained_set_exact(self):
        assert space_punctuation("a.b,c!d?e") == "a . b , c ! d ? e"
        assert space_punctuation("a;b:c(d)e") == "a b c d e"


# (word, lemma) pairs hand-checked against standard English lemmas.
LEMMA_CASES = [
    ("running", "run"), ("stopped", "stop"), ("cities", "city"), ("dogs", "dog"),
    ("boxes", "box"), ("wishes", "wish"), ("churches", "church"), ("classes", "class"),
    ("kisses", "kiss"), ("going", "go"), ("goes", "go"), ("was", "be"), ("were", "be"),
    ("is", "be"), ("been", "be"), ("has", "have"), ("had", "have"), ("said", "say"),
    ("made", "make"), ("making", "make"), ("taking", "take"), ("took", "take"),
    ("loved", "love"), ("loving", "love"), ("hated", "hate"), ("hoping", "hope"),
    ("hopping", "hop"), ("hopped", "hop"), ("banned", "ban"), ("planned", "plan"),
    ("getting", "get"), ("got", "get"), ("sitting", "sit"), ("winning", "win"),
    ("felt", "feel"), ("feeling", "feel"), ("feelings", "feel"), ("thought", "think"),
    ("came", "come"), ("coming", "come"), ("seen", "see"), ("seeing", "see"),
    ("watched", "watch"), ("watching", "watch"), ("tried", "try"), ("tries", "try"),
    ("cried", "cry"), ("crying", "cry"), ("worried", "worry"), ("studies", "study"),
    ("babies", "baby"), ("dies", "die"), ("lies", "lie"), ("died", "die"),
    ("says", "say"), ("asked", "ask"), ("asking", "ask"), ("talked", "talk"),
    ("talking", "talk"), ("wanted", "want"), ("looked", "look"), ("looking", "look"),
    ("played", "play"), ("playing", "play"), ("enjoyed", "enjoy"), ("enjoying", "enjoy"),
    ("annoyed", "annoy"), ("scared", "scare"), ("bored", "bore"), ("shocked", "shock"),
    ("smiled", "smile"), ("smiling", "smile"), ("laughed", "laugh"), ("laughing", "laugh"),
    ("happened", "happen"), ("happens", "happen"), ("opened", "open"), ("listened", "listen"),
    ("visited", "visit"), ("visiting", "visit"), ("excited", "excite"), ("surprised", "surprise"),
    ("amazed", "amaze"), ("amazing", "amaze"), ("writing", "write"), ("wrote", "write"),
    ("written", "write"), ("knew", "know"), ("known", "know"), ("knows", "know"),
    ("children", "child"), ("men", "man"), ("women", "woman"), ("feet", "foot"),
    ("teeth", "tooth"), ("mice", "mouse"), ("leaves", "leave"), ("lives", "life"),
    ("wolves", "wolf"), ("knives", "knife"), ("heroes", "hero"), ("potatoes", "potato"),
    ("news", "news"), ("series", "series"), ("species", "species"), ("always", "always"),
    ("perhaps", "perhaps"), ("tears", "tear"), ("fears", "fear"), ("years", "year"),
    ("friends", "friend"), ("things", "thing"), ("words", "word"), ("hands", "hand"),
    ("eyes", "eye"), ("ideas", "idea"), ("minutes", "minute"), ("moments", "moment"),
    ("wedding", "wed"), ("building", "build"), ("interesting", "interest"),
    ("thanks", "thank"), ("means", "mean"), ("keeps", "keep"), ("kept", "keep"),
    ("gave", "give"), ("given", "give"), ("giving", "give"), ("used", "use"),
    ("using", "use"), ("needed", "need"), ("agreed", "agree"), ("freed", "free"),
    ("better", "good"), ("worse", "bad"), ("worst", "bad"), ("best", "good"),
    ("stuffed", "stuff"), ("missed", "miss"), ("guessed", "guess"), ("rolled", "roll"),
    ("called", "call"), ("falling", "fall"), ("telling", "tell"), ("told", "tell"),
    ("buses", "bus"), ("sizes", "size"), ("causes", "cause"), ("houses", "house"),
    ("uses", "use"), ("phrases", "phrase"), ("noses", "nose"), ("pauses", "pause"),
    ("faces", "face"), ("places", "place"), ("spaces", "space"), ("pieces", "piece"),
    ("voices", "voice"), ("choices", "choice"), ("dances", "dance"), ("chances", "chance"),
    ("cat", "cat"), ("was", "be"), ("ass", "ass"), ("gas", "gas"), ("this", "this"),
]


class TestLemmatize:
    @pytest.mark.parametrize("word,lemma", LEMMA_CASES)
    def test_common_words(self, word, lemma, resources):
        assert lemmatize(word, resources.lemma_exceptions) == lemma

    def test_never_empty(self, resources):
        for token in ("s", "es", "ed", "a", ""):
            got = lemmatize(token, resources.lemma_exceptions)
            assert got == token  # too short for any rule

    def test_idempotent_on_lemma_list(self, resources):
        for word, _ in LEMMA_CASES:
            once = lemmatize(word, resources.lemma_exceptions)
            assert lemmatize(once, resources.lemma_exceptions) == once


class TestRemoveStopwords:
    def test_filters(self, resources):
        assert remove_stopwords(["i", "am", "happy"], resources.stopwords) == ["happy"]

    def test_empty(self, resources):
        assert remove_stopwords([], resources.stopwords) == []

    def test_negations_preserved(self, resources):
        assert remove_stopwords(["not", "happy"], resources.stopwords) == ["not", "happy"]

    def test_shipped_list_has_no_negations(self, resources):
        assert not (resources.stopwords & NEGATIONS)

    def test_order_preserved(self, resources):
        tokens = ["happy", "sad", "angry"]
        assert remove_stopwords(tokens, resources.stopwords) == tokens


class TestTokenize:
    def test_basic(self):
        assert tokenize("a b") == ["a", "b"]

    def test_whitespace_only(self):
        assert tokenize(" ") == []

    def test_multiple_spaces(self):
        assert tokenize("a  b") == ["a", "b"]


class TestNormalizeFull:
    def test_golden_trace(self, resources):
        # hand-traced through every stage with the shipped lexicons
        doc = normalize_full(f"I'm sooo HAPPY!!! {TEARS_OF_JOY}", resources)
        assert doc.tokens == ("soo", "happy", "!", "!", "!", "face", "tear", "joy")
        assert doc.source_mode == "full"

    def test_empty_flagged(self, resources):
        doc = normalize_full("", resources)
        assert doc.tokens == () and doc.is_empty

    def test_all_stopwords_empty(self, resources):
        doc = normalize_full("the a an", resources)
        assert doc.is_empty

    def test_idempotent_on_golden(self, resources):
        doc = normalize_full(f"I'm sooo HAPPY!!! {TEARS_OF_JOY}", resources)
        again = normalize_full(" ".join(doc.tokens), resources)
        assert again.tokens == doc.tokens

    @settings(max_examples=60, deadline=None)
    @given(
        st.lists(
            st.sampled_from(
                ["I'm", "soooo", "HAPPY!!!", "lmao", "not", "bad,",
                 "dogs'", "running", CRYING_FACE, "why?", "ok"]
            ),
            min_size=0,
            max_size=8,
        )
    )
    def test_idempotent_on_sampled_text(self, resources, words):
        doc = normalize_full(" ".join(words), resources)
        again = normalize_full(" ".join(doc.tokens), resources)
        assert again.tokens == doc.tokens

    @settings(max_examples=60, deadline=None)
    @given(st.text(max_size=80))
    def test_no_token_contains_whitespace_or_uppercase(self, resources, text):
        doc = normalize_full(text, resources)
        for token in doc.tokens:
            assert token and not any(c.isspace() for c in token)
            assert token == token.lower()
            assert token not in resources.stopwords

    def test_letter_runs_capped(self, resources):
        doc = normalize_full("greaaaaat soooo coool", resources, repeat_cap=2)
        for token in doc.tokens:
            for i in range(len(token) - 2):
                trip = token[i : i + 3]
                if trip[0].isalpha():
                    assert not (trip[0] == trip[1] == trip[2])


class TestTokenizeRaw:
    def test_mode_tag(self):
        doc = tokenize_raw("Some TEXT here")
        assert doc.source_mode == "raw"
        assert doc.tokens == ("some", "text", "here")

    def test_emoji_kept(self):
        assert CRYING_FACE in tokenize_raw(f"sad {CRYING_FACE}").tokens


class TestResourceValidation:
    def test_negation_in_stopwords_rejected(self, resources):
        with pytest.raises(ResourceError):
            NormResources(
                emoji_lexicon=dict(resources.emoji_lexicon),
                contractions=dict(resources.contractions),
                abbreviations=dict(resources.abbreviations),
                stopwords=frozenset(resources.stopwords | {"not"}),
                lemma_exceptions=dict(resources.lemma_exceptions),
            )

    def test_uppercase_value_rejected(self, resources):
        with pytest.raises(ResourceError):
            NormResources(
                emoji_lexicon={"x": "UPPER"},
                contractions={},
                abbreviations={},
                stopwords=frozenset(),
                lemma_exceptions={},
            )
