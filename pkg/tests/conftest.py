import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from fairboost import Dataset

REPO_ROOT = Path(__file__).resolve().parent.parent
DATA_DIR = REPO_ROOT / "data"
CONFIG_DIR = REPO_ROOT / "configs"


@pytest.fixture
def toy4() -> Dataset:
    """Four samples, two per group: labels (+1,-1,+1,-1), groups (0,0,1,1)."""
    return Dataset(
        X=np.array([[0.0, 0.0], [1.0, 0.0], [2.0, 1.0], [3.0, 1.0]]),
        y=np.array([1, -1, 1, -1]),
        feature_names=("f0", "group"),
        sensitive_index=1,
        schema_fingerprint="toy4",
    )


def dataset_from_arrays(X_core, y, s) -> Dataset:
    """Assemble a Dataset with the group column appended to ``X_core``."""
    X_core = np.asarray(X_core, dtype=np.float64)
    if X_core.ndim == 1:
        X_core = X_core[:, None]
    s = np.asarray(s, dtype=np.float64)
    X = np.column_stack([X_core, s])
    names = tuple(f"f{j}" for j in range(X_core.shape[1])) + ("group",)
    return Dataset(
        X=X,
        y=np.asarray(y, dtype=np.int64),
        feature_names=names,
        sensitive_index=X_core.shape[1],
        schema_fingerprint="arrays",
    )


def require_data(name: str) -> Path:
    path = DATA_DIR / name
    if not path.exists():
        pytest.skip(
            f"{path} not found: restricted-network environment cannot fetch it; "
            f"run scripts/fetch_data.sh where outbound network is available"
        )
    return path
