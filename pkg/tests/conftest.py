import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

TWO_SENTENCES = """# sent_id = 1
# text = Scientists discover water
1\tScientists\tscientist\tNOUN\tNNS\t_\t2\tnsubj\t_\t_
2\tdiscover\tdiscover\tVERB\tVBP\t_\t0\troot\t_\t_
3\twater\twater\tNOUN\tNN\t_\t2\tobj\t_\t_

# sent_id = 2
1\tWater\twater\tNOUN\tNN\t_\t2\tnsubj\t_\t_
2\texists\texist\tVERB\tVBZ\t_\t0\troot\t_\t_
3-4\ton-Mars\t_\t_\t_\t_\t_\t_\t_\t_
3\ton\ton\tADP\tIN\t_\t4\tcase\t_\t_
4\tMars\tMars\tPROPN\tNNP\t_\t2\tobl\t_\t_
"""


@pytest.fixture
def two_sentence_file(tmp_path):
    path = tmp_path / "two.conllu"
    path.write_text(TWO_SENTENCES, encoding="utf-8")
    return path


@pytest.fixture
def planted_file(tmp_path):
    from gcnembed.synthetic import planted_clusters, to_conllu

    sentences, _ = planted_clusters(words_per_cluster=10, num_sentences=40, seed=0)
    path = tmp_path / "planted.conllu"
    path.write_text(to_conllu(sentences), encoding="utf-8")
    return path


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
