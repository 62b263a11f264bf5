from __future__ import annotations

import pytest
from hypothesis import settings

from ctlsearch import _backend

settings.register_profile("ci", max_examples=60, deadline=None)
settings.load_profile("ci")

BACKENDS = ["python"] + (["compiled"] if _backend.COMPILED else [])


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param
