import pytest

from storyevents.corpus.brat import parse_ann, parse_brat, write_brat
from storyevents.corpus.types import EventClass
from storyevents.errors import (
    BratFormatError,
    DataError,
    OffsetError,
    SurfaceMismatchError,
    UnknownClassError,
)

TEXT = "The king said nothing. He walked away."


def test_single_trigger_record():
    mentions = parse_ann("T1\tCOMMUNICATION 9 13\tsaid\n", TEXT)
    assert len(mentions) == 1
    m = mentions[0]
    assert (m.span.start_char, m.span.end_char, m.span.surface) == (9, 13, "said")
    assert m.event_class is EventClass.COM


def test_short_class_codes_accepted():
    mentions = parse_ann("T1\tCOM 9 13\tsaid\n", TEXT)
    assert mentions[0].event_class is EventClass.COM


def test_empty_ann_yields_no_mentions():
    story = parse_brat(TEXT, "", story_id="PT_x")
    assert story.mentions == []
    assert len(story.sentences) == 2


def test_offset_out_of_bounds():
    with pytest.raises(OffsetError, match="line 1"):
        parse_ann("T1\tCOMMUNICATION 9 999\tsaid\n", TEXT)


def test_surface_mismatch_reports_line_number():
    ann = "T1\tCOMMUNICATION 9 13\tsaid\nT2\tMOVEMENT 26 32\tWALKED\n"
    with pytest.raises(SurfaceMismatchError) as info:
        parse_ann(ann, TEXT)
    assert info.value.line_number == 2
    assert "line 2" in str(info.value)


def test_unknown_class():
    with pytest.raises(UnknownClassError):
        parse_ann("T1\tSPEECH 9 13\tsaid\n", TEXT)


def test_malformed_record():
    with pytest.raises(BratFormatError):
        parse_ann("T1\tCOMMUNICATION 9\tsaid\n", TEXT)


def test_duplicate_mention_rejected():
    ann = "T1\tCOMMUNICATION 9 13\tsaid\nT2\tCOMMUNICATION 9 13\tsaid\n"
    with pytest.raises(DataError, match="duplicate"):
        parse_ann(ann, TEXT)


def test_non_trigger_records_skipped(caplog):
    ann = "T1\tCOMMUNICATION 9 13\tsaid\nA1\tNegation T1\n#1\tAnnotatorNotes T1\tcheck\n"
    with caplog.at_level("WARNING"):
        mentions = parse_ann(ann, TEXT)
    assert len(mentions) == 1
    assert sum("skipping" in r.message for r in caplog.records) == 2


def test_mentions_sorted_by_offset():
    ann = "T1\tMOVEMENT 26 32\twalked\nT2\tCOMMUNICATION 9 13\tsaid\n"
    mentions = parse_ann(ann, TEXT)
    assert [m.span.start_char for m in mentions] == [9, 26]


def test_write_brat_numbering_and_round_trip():
    ann = "T7\tMOVEMENT 26 32\twalked\nT3\tCOMMUNICATION 9 13\tsaid\n"
    story = parse_brat(TEXT, ann, story_id="CP_1")
    text, out = write_brat(story)
    assert text == TEXT
    assert out == "T1\tCOMMUNICATION 9 13\tsaid\nT2\tMOVEMENT 26 32\twalked\n"
    assert parse_brat(text, out, story_id="CP_1", source=story.source) == story


def test_zero_mentions_writes_empty_ann():
    story = parse_brat(TEXT, "", story_id="CP_1")
    _, ann = write_brat(story)
    assert ann == ""


def test_round_trip_identity_over_corpus(toy_corpus):
    for story in toy_corpus.stories:
        text, ann = write_brat(story)
        again = parse_brat(text, ann, story_id=story.id, source=story.source)
        assert again == story
