import pytest

from mtaug import SentencePair, parse_alignment_line

# Golden sentence pair used across the transform tests. The alignment links
# are (source index)-(target index); note the There/'s crossing at 0/1.
PYRAMID_SRC = "Es gibt andere Möglichkeiten , die Pyramide zu durchbrechen ."
PYRAMID_TGT = "There 's other ways of breaking the pyramid ."
PYRAMID_ALIGN = "0-1 1-0 2-2 3-3 5-6 6-7 7-4 8-5 9-8"

PYRAMID_REVERSE = ". pyramid the breaking of ways other 's There"
PYRAMID_MONO = "'s There other ways the pyramid of breaking ."


@pytest.fixture
def pyramid_pair():
    return SentencePair.from_lines(PYRAMID_SRC, PYRAMID_TGT)


@pytest.fixture
def pyramid_align():
    return parse_alignment_line(PYRAMID_ALIGN)


@pytest.fixture
def write_lines(tmp_path):
    """Write lines to a file under tmp_path and return its path as str."""

    def _write(name, lines):
        path = tmp_path / name
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text("".join(line + "\n" for line in lines), encoding="utf-8")
        return str(path)

    return _write
