import random

from storyevents.corpus.tokenization import split_sentences, tokenize


def test_basic_tokenization():
    tokens = tokenize("He painted the fence.")
    assert [t[0] for t in tokens] == ["He", "painted", "the", "fence", "."]
    assert tokens[1] == ("painted", 3, 10)
    assert tokens[-1] == (".", 20, 21)


def test_empty_text():
    assert tokenize("") == []
    assert split_sentences("") == []


def test_offsets_index_original_text():
    text = 'Raju said, "Go home!" Then he left the market-place.'
    for surface, start, end in tokenize(text):
        assert text[start:end] == surface


def test_contractions_stay_whole():
    tokens = [t[0] for t in tokenize("He didn't go.")]
    assert tokens == ["He", "didn't", "go", "."]


def test_hyphen_detaches():
    tokens = [t[0] for t in tokenize("LIFE-EVENT")]
    assert tokens == ["LIFE", "-", "EVENT"]


def test_two_sentences_with_offsets():
    sentences = split_sentences("He left. She cried.")
    assert sentences == [("He left.", 0), ("She cried.", 9)]


def test_single_sentence_without_terminal_punctuation():
    sentences = split_sentences("He left the village")
    assert sentences == [("He left the village", 0)]


def test_abbreviation_guard():
    sentences = split_sentences("Mr. Sharma left. She cried.")
    assert [s for s, _ in sentences] == ["Mr. Sharma left.", "She cried."]


def test_initial_guard():
    sentences = split_sentences("J. Sharma left. She cried.")
    assert [s for s, _ in sentences] == ["J. Sharma left.", "She cried."]


def test_newline_is_hard_boundary():
    sentences = split_sentences("A story title\nHe left the village.")
    assert [s for s, _ in sentences] == ["A story title", "He left the village."]


def test_decimal_not_split():
    sentences = split_sentences("It cost 3.5 rupees. He paid.")
    assert [s for s, _ in sentences] == ["It cost 3.5 rupees.", "He paid."]


def test_offsets_reconstruct_story(toy_corpus):
    for story in toy_corpus.stories:
        for sentence in story.sentences:
            assert story.text[sentence.char_offset : sentence.end_offset] == sentence.text


def test_determinism_on_random_noise():
    rng = random.Random(0)
    alphabet = "abc DEF.!?\n'’-xyz \"("
    for _ in range(200):
        text = "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 60)))
        assert tokenize(text) == tokenize(text)
        assert split_sentences(text) == split_sentences(text)
        for surface, start, end in tokenize(text):
            assert text[start:end] == surface
        for sentence, offset in split_sentences(text):
            assert text[offset : offset + len(sentence)] == sentence
