import pytest

from evidscreen.corpus import Document, build_screening_texts
from evidscreen.engine import Project, ProjectConfig
from evidscreen.simulator import generate_synthetic_corpus


def micro_corpus(n=40, n_included=8):
    """Tiny deterministic corpus: ids m000..; first n_included are included
    and carry the marker token."""
    documents = []
    truth = {}
    for i in range(n):
        label = 1 if i < n_included else 0
        marker = "smallholder irrigation" if label else "volcanic spectra"
        documents.append(
            Document(
                id=f"m{i:03d}",
                title=f"Study {i} of {marker}",
                abstract=(
                    f"We analyze {marker} outcomes in district {i % 7}. "
                    f"Sample covers {100 + i} households."
                ),
            )
        )
        truth[f"m{i:03d}"] = label
    texts = build_screening_texts(documents)
    return documents, texts, truth


@pytest.fixture
def small_project():
    documents, texts, truth = micro_corpus()
    config = ProjectConfig(
        strategy="hp", batch_size=5, init_size=10, seed=3,
        rho_threshold=None, max_training_size=20,
    )
    project = Project("p-small", config)
    project.attach_corpus(documents, texts)
    return project, truth


@pytest.fixture(scope="session")
def oracle_corpus_small():
    # ~600 docs, enough signal for a stable little loop
    return generate_synthetic_corpus(600, 0.1, 0.9, seed=11)
