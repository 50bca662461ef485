import numpy as np
import pytest
from PIL import Image


@pytest.fixture
def rng():
    return np.random.default_rng(20241019)


def write_png(path, arr, **kw):
    Image.fromarray(arr).save(path, format="PNG", **kw)
    return path


@pytest.fixture
def png_writer(tmp_path):
    def _write(name, arr):
        return write_png(tmp_path / name, np.asarray(arr))

    return _write
