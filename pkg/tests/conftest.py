import numpy as np
import pytest

from mofs.data import Dataset, stratified_split
from mofs.synth import perfect_feature_dataset, write_credit_csv, write_tiny_csv


@pytest.fixture(scope="session")
def perfect_ds():
    return perfect_feature_dataset(seed=1)


@pytest.fixture(scope="session")
def perfect_split(perfect_ds):
    return stratified_split(perfect_ds, 0.3, seed=1)


@pytest.fixture(scope="session")
def credit_csv(tmp_path_factory):
    path = tmp_path_factory.mktemp("data") / "credit.csv"
    write_credit_csv(path, seed=0)
    return path


@pytest.fixture(scope="session")
def tiny_csv(tmp_path_factory):
    path = tmp_path_factory.mktemp("data") / "tiny.csv"
    write_tiny_csv(path, seed=0)
    return path


def make_dataset(features, target, sensitive_groups, sensitive_index=0, kinds=None):
    """Small helper to build in-memory datasets for unit tests."""
    features = np.asarray(features, dtype=float)
    m = features.shape[1]
    return Dataset(
        name="inline",
        feature_names=tuple(f"f{j}" for j in range(m)),
        features=features,
        target=np.asarray(target, dtype=int),
        sensitive_index=sensitive_index,
        sensitive_groups=np.asarray(sensitive_groups, dtype=int),
        column_kinds=tuple(kinds) if kinds else ("numeric",) * m,
    )
